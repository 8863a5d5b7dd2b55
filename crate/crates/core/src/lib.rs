//! Variable screening with the fused Kolmogorov filter.
//!
//! A covariate is kept when its distribution changes across slices of the
//! response. [`kfilter::screen`] scores every column of a design matrix,
//! ranks them, and keeps the top `d_n`. The crate also ships marginal
//! baselines, population-level diagnostics, the simulation models used to
//! benchmark the filter, and CSV input/output.
//!
//! ```
//! use kfuse::{screen, FilterConfig, Matrix, Response};
//!
//! let x = Matrix::from_columns(&[
//!     vec![0.1, 0.9, 0.2, 0.8, 0.3, 0.7],
//!     vec![5.0, 1.0, 4.0, 2.0, 6.0, 3.0],
//! ])?;
//! let y = Response::Continuous(vec![1.0, 6.0, 2.0, 5.0, 3.0, 4.0]);
//! let cfg = FilterConfig { slice_counts: Some(vec![2]), screen_size: Some(1), ..Default::default() };
//! let result = screen(&x, &y, &cfg)?;
//! assert_eq!(result.selected, vec![0]);
//! # Ok::<(), kfuse::Error>(())
//! ```

pub mod baselines;
pub mod bench;
mod error;
pub mod io;
pub mod kfilter;
mod matrix;
pub mod rng;
pub mod simgen;
pub mod slicing;
pub mod stats;
pub mod theory;

pub use baselines::BaselineMethod;
pub use bench::{run_bench, BenchConfig, BenchReport, Method};
pub use error::{Error, Result};
pub use kfilter::{khat_fused, khat_single, screen, FilterConfig, ScreeningResult, VariableScore};
pub use matrix::Matrix;
pub use simgen::{generate, Dataset, ModelId, ModelSpec};
pub use slicing::{build_grid, Response, ResponseKind, SliceAssignment, SliceGrid};
pub use theory::{alpha_vector, condition_c1_set, oracle_kg_normal, CovarianceSpec};

/// The guide's code samples run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kolmogorov-statistic.md")]
    mod kolmogorov_statistic {}
    #[doc = include_str!("../../../book/src/slicing.md")]
    mod slicing {}
    #[doc = include_str!("../../../book/src/fusion-and-screening.md")]
    mod fusion_and_screening {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/gaussian-copula-oracle.md")]
    mod gaussian_copula_oracle {}
    #[doc = include_str!("../../../book/src/signal-strength.md")]
    mod signal_strength {}
    #[doc = include_str!("../../../book/src/simulation-models.md")]
    mod simulation_models {}
    #[doc = include_str!("../../../book/src/benchmarking.md")]
    mod benchmarking {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
