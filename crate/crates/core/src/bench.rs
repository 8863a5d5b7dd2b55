//! Replicated simulation runs scored by minimum model size.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::BaselineMethod;
use crate::error::{Error, Result};
use crate::kfilter::{rank_descending, score_columns};
use crate::rng::{derive_seed, rng_from_seed};
use crate::simgen::{generate, Dataset, ModelId, ModelSpec};
use crate::slicing::{
    assign_categorical, assign_continuous, assign_count, default_slice_counts, Response, ResponseKind,
    SliceAssignment, SliceGrid,
};

/// Default number of bootstrap resamples for the standard error of a median.
pub const DEFAULT_BOOTSTRAP: usize = 1000;

/// A screening method as run by the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Fused filter over the model's slicing grid.
    Fused,
    /// Single uniform slicing scheme with `G` slices.
    Kolmogorov(usize),
    Baseline(BaselineMethod),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Fused => f.write_str("fused"),
            Method::Kolmogorov(g) => write!(f, "kolmogorov:{g}"),
            Method::Baseline(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "fused" {
            return Ok(Method::Fused);
        }
        if let Some(g) = s.strip_prefix("kolmogorov:") {
            let g: usize = g
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad slice count in {s:?}")))?;
            if g < 2 {
                return Err(Error::InvalidParameter(format!("at least 2 slices required in {s:?}")));
            }
            return Ok(Method::Kolmogorov(g));
        }
        s.parse::<BaselineMethod>().map(Method::Baseline).map_err(|_| {
            Error::InvalidParameter(format!(
                "unknown method {s:?} (expected fused, kolmogorov:G, sis, rcs or dcs)"
            ))
        })
    }
}

/// Parses a comma-separated method list.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub model: ModelId,
    pub n: usize,
    pub p: usize,
    pub replicates: usize,
    pub methods: Vec<Method>,
    pub master_seed: u64,
    pub bootstrap: usize,
}

impl BenchConfig {
    pub fn new(model: ModelId, n: usize, p: usize, replicates: usize, methods: Vec<Method>, master_seed: u64) -> Self {
        BenchConfig {
            model,
            n,
            p,
            replicates,
            methods,
            master_seed,
            bootstrap: DEFAULT_BOOTSTRAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    /// Minimum model size per replicate, in replicate order.
    pub mms: Vec<usize>,
    pub median: Option<f64>,
    /// Bootstrap standard error of the median.
    pub se: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub model: String,
    pub n: usize,
    pub p: usize,
    pub replicates: usize,
    pub master_seed: u64,
    pub truth_size: usize,
    pub methods: Vec<MethodSummary>,
    /// Wall-clock seconds; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub runtime_seconds: f64,
}

impl BenchReport {
    pub fn summary(&self, method: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == method)
    }
}

/// Smallest `k` such that the top `k` of `ranking` contain every index in
/// `truth`.
pub fn minimum_model_size(ranking: &[usize], truth: &[usize]) -> Result<usize> {
    if truth.is_empty() {
        return Err(Error::EmptyTruth);
    }
    let mut position = vec![usize::MAX; ranking.len()];
    for (k, &j) in ranking.iter().enumerate() {
        if j < position.len() {
            position[j] = k + 1;
        }
    }
    truth
        .iter()
        .map(|&j| match position.get(j) {
            Some(&pos) if pos != usize::MAX => Ok(pos),
            _ => Err(Error::InvalidParameter(format!("truth index {j} missing from the ranking"))),
        })
        .try_fold(0, |acc, pos| pos.map(|p| acc.max(p)))
}

/// Median of a nonempty sample (mean of the middle pair for even sizes).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Bootstrap standard error of the median.
pub fn bootstrap_median_se(values: &[f64], resamples: usize, seed: u64) -> Option<f64> {
    if values.is_empty() || resamples < 2 {
        return None;
    }
    let mut rng = rng_from_seed(seed);
    let mut buf = vec![0.0; values.len()];
    let medians: Vec<f64> = (0..resamples)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = values[rng.random_range(0..values.len())];
            }
            median(&buf).unwrap_or(0.0)
        })
        .collect();
    let k = medians.len() as f64;
    let mean = medians.iter().sum::<f64>() / k;
    Some((medians.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (k - 1.0)).sqrt())
}

fn response_kind(model: ModelId) -> ResponseKind {
    match model {
        ModelId::M6 => ResponseKind::Count,
        ModelId::M7 => ResponseKind::Categorical,
        _ => ResponseKind::Continuous,
    }
}

/// Why `method` cannot run on `model`, if it cannot.
fn inapplicable(method: Method, model: ModelId) -> Option<String> {
    let kind = response_kind(model);
    match method {
        Method::Fused => None,
        Method::Kolmogorov(g) if kind == ResponseKind::Categorical && g != 5 => Some(format!(
            "categorical response has 5 levels; kolmogorov:{g} does not apply"
        )),
        Method::Kolmogorov(_) => None,
        Method::Baseline(b) if !b.supports(kind) => Some(format!("{b} requires a continuous response")),
        Method::Baseline(_) => None,
    }
}

/// Slice counts of the fused filter for `model`. Count responses use the
/// single three-slice truncation `{0}, {1}, {>=2}` and categorical responses
/// the single scheme `H = Y`.
fn fused_slice_counts(model: ModelId, n: usize) -> Result<Vec<usize>> {
    match response_kind(model) {
        ResponseKind::Continuous => default_slice_counts(n),
        ResponseKind::Count => Ok(vec![3]),
        ResponseKind::Categorical => Ok(vec![5]),
    }
}

fn assignment(resp: &Response, slices: usize) -> Result<SliceAssignment> {
    match resp {
        Response::Continuous(y) => assign_continuous(y, slices),
        Response::Count(y) => assign_count(y, slices),
        Response::Categorical { values, levels } => assign_categorical(values, *levels),
    }
}

/// Minimum model sizes of every applicable method on one dataset.
fn replicate_mms(data: &Dataset, methods: &[Method], skipped: &[bool], fused_counts: &[usize]) -> Result<Vec<Option<usize>>> {
    // One grid carries the fused schemes first, then any extra single schemes,
    // so each column is sorted once for all Kolmogorov-type methods.
    let mut counts: Vec<usize> = fused_counts.to_vec();
    for (m, &skip) in methods.iter().zip(skipped) {
        if let (Method::Kolmogorov(g), false) = (m, skip) {
            if !counts.contains(g) {
                counts.push(*g);
            }
        }
    }
    let needs_grid = methods
        .iter()
        .zip(skipped)
        .any(|(m, &s)| !s && matches!(m, Method::Fused | Method::Kolmogorov(_)));
    let per_scheme: Vec<Vec<f64>> = if needs_grid {
        let grid = SliceGrid::from_assignments(
            counts
                .iter()
                .map(|&g| assignment(&data.response, g))
                .collect::<Result<Vec<_>>>()?,
        )?;
        score_columns(&data.x, &grid, true)?
            .into_iter()
            .map(|s| s.per_scheme.unwrap_or_default())
            .collect()
    } else {
        Vec::new()
    };
    let nfused = fused_counts.len();
    methods
        .iter()
        .zip(skipped)
        .map(|(&m, &skip)| {
            if skip {
                return Ok(None);
            }
            let ranking = match m {
                Method::Fused => rank_descending(per_scheme.iter().map(|s| s[..nfused].iter().sum())),
                Method::Kolmogorov(g) => {
                    let k = counts.iter().position(|&c| c == g).unwrap_or(0);
                    rank_descending(per_scheme.iter().map(|s| s[k]))
                }
                Method::Baseline(b) => b.screen(&data.x, &data.response, 1)?.ranking,
            };
            minimum_model_size(&ranking, &data.truth).map(Some)
        })
        .collect()
}

/// Runs every replicate and summarizes minimum model sizes per method.
///
/// Replicate `r` uses the seed `derive_seed(master_seed, r)`; results are
/// stored by replicate index, so the report does not depend on scheduling.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate required".into()));
    }
    if cfg.methods.is_empty() {
        return Err(Error::InvalidParameter("no methods requested".into()));
    }
    ModelSpec::new(cfg.model, cfg.n, cfg.p, 0).validate()?;
    let started = Instant::now();
    let reasons: Vec<Option<String>> = cfg.methods.iter().map(|&m| inapplicable(m, cfg.model)).collect();
    let skipped: Vec<bool> = reasons.iter().map(Option::is_some).collect();
    let fused_counts = fused_slice_counts(cfg.model, cfg.n)?;

    let per_replicate: Vec<Vec<Option<usize>>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let spec = ModelSpec::new(cfg.model, cfg.n, cfg.p, derive_seed(cfg.master_seed, r as u64));
            let data = generate(&spec)?;
            replicate_mms(&data, &cfg.methods, &skipped, &fused_counts)
        })
        .collect::<Result<_>>()?;

    let methods = cfg
        .methods
        .iter()
        .enumerate()
        .map(|(k, m)| {
            if let Some(reason) = &reasons[k] {
                return MethodSummary {
                    method: m.to_string(),
                    mms: Vec::new(),
                    median: None,
                    se: None,
                    skipped: Some(reason.clone()),
                };
            }
            let mms: Vec<usize> = per_replicate.iter().map(|row| row[k].unwrap_or(0)).collect();
            let as_f64: Vec<f64> = mms.iter().map(|&v| v as f64).collect();
            let se_seed = derive_seed(cfg.master_seed ^ 0x5EED_B007_5EED_B007, k as u64);
            MethodSummary {
                method: m.to_string(),
                median: median(&as_f64),
                se: bootstrap_median_se(&as_f64, cfg.bootstrap, se_seed),
                mms,
                skipped: None,
            }
        })
        .collect();

    Ok(BenchReport {
        model: cfg.model.to_string(),
        n: cfg.n,
        p: cfg.p,
        replicates: cfg.replicates,
        master_seed: cfg.master_seed,
        truth_size: cfg.model.truth().len(),
        methods,
        runtime_seconds: started.elapsed().as_secs_f64(),
    })
}

fn format_median(m: f64) -> String {
    if m.fract() == 0.0 {
        format!("{m:.0}")
    } else {
        format!("{m:.1}")
    }
}

fn format_cell(summary: Option<&MethodSummary>) -> String {
    match summary {
        Some(MethodSummary {
            median: Some(m),
            se,
            skipped: None,
            ..
        }) => format!("{} ({:.1})", format_median(*m), se.unwrap_or(0.0)),
        _ => "—".to_string(),
    }
}

/// Plain-text table: one row per method, one `median (se)` column per model.
pub fn format_table(reports: &[BenchReport]) -> String {
    let mut methods: Vec<&str> = Vec::new();
    let mut seen = BTreeSet::new();
    for r in reports {
        for m in &r.methods {
            if seen.insert(m.method.as_str()) {
                methods.push(&m.method);
            }
        }
    }
    let header: Vec<String> = reports
        .iter()
        .map(|r| format!("model {} (d={})", r.model, r.truth_size))
        .collect();
    let rows: Vec<Vec<String>> = methods
        .iter()
        .map(|m| reports.iter().map(|r| format_cell(r.summary(m))).collect())
        .collect();
    let first = methods.iter().map(|m| m.chars().count()).max().unwrap_or(0).max("method".len());
    let widths: Vec<usize> = (0..reports.len())
        .map(|c| {
            rows.iter()
                .map(|row| row[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w.saturating_sub(s.chars().count())));
    let mut out = String::new();
    let _ = write!(out, "{}", pad("method", first));
    for (h, &w) in header.iter().zip(&widths) {
        let _ = write!(out, "  {}", pad(h, w));
    }
    out = out.trim_end().to_string();
    out.push('\n');
    for (m, row) in methods.iter().zip(&rows) {
        let mut line = pad(m, first);
        for (cell, &w) in row.iter().zip(&widths) {
            let _ = write!(line, "  {}", pad(cell, w));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Machine-readable form of [`format_table`]'s input.
pub fn reports_to_json(reports: &[BenchReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}
