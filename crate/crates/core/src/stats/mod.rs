//! Order-statistic and dependence-measure primitives shared by the screeners.

mod correlation;
mod dcor;
mod ecdf;
mod normal;
mod quadrature;
mod ranks;

pub use correlation::{kendall_tau, pearson};
pub use dcor::{distance_correlation, CenteredDistances, DistanceCorrelation};
pub use ecdf::{empirical_cdf, ks_two_sample, SortedSample};
pub use normal::{normal_cdf, normal_pdf, normal_quantile};
pub use quadrature::{adaptive_quadrature, DEFAULT_QUADRATURE_TOL};
pub use ranks::{quantile_rank_thresholds, stable_order, RankVector};
