use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kfuse::bench::{format_table, parse_methods, reports_to_json, BenchConfig, Method};
use kfuse::io::{read_csv, sidecar_path, write_csv, ColumnRef, Sidecar};
use kfuse::kfilter::default_screen_size;
use kfuse::theory::{condition_c1_set, oracle_kg_normal, CovarianceSpec};
use kfuse::{generate, FilterConfig, ModelId, ModelSpec, ResponseKind, ScreeningResult};

/// Model-free variable screening with the fused Kolmogorov filter.
#[derive(Debug, Parser)]
#[command(name = "kfuse", version)]
struct Cli {
    /// Worker threads (0 = all cores). Results do not depend on this.
    #[arg(long, global = true, env = "KFUSE_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank the covariates of a CSV file and keep the top d_n.
    Screen(ScreenArgs),
    /// Write one simulated dataset as CSV plus a JSON sidecar.
    Simulate(SimulateArgs),
    /// Replicated minimum-model-size benchmark on the simulation models.
    Bench(BenchArgs),
    /// Population value of the single-scheme statistic under a Gaussian copula.
    OracleKg(OracleArgs),
    /// Marginal signal vector alpha = Sigma beta and its separating set.
    C1Check(C1Args),
}

#[derive(Debug, Args)]
struct ScreenArgs {
    #[arg(long)]
    input: PathBuf,
    /// Response column: header name or 1-based position.
    #[arg(long, default_value = "y")]
    response: String,
    #[arg(long, default_value = "continuous")]
    kind: ResponseKind,
    /// fused | kolmogorov:G | sis | rcs | dcs (repeatable)
    #[arg(long = "method", default_value = "fused")]
    methods: Vec<Method>,
    /// Number of variables to keep (default ceil(n / ln n), at most p).
    #[arg(long)]
    dn: Option<usize>,
    /// Slice counts of the fused grid, e.g. 3,4,5.
    #[arg(long, value_delimiter = ',')]
    slices: Option<Vec<usize>>,
    /// Ranking CSV: variable, method, statistic, rank, selected.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    model: ModelId,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 5000)]
    p: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// CSV path; the sidecar goes next to it with a .json extension.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// One or more models, e.g. 2a or 2a,2b,2c.
    #[arg(long = "model", required = true, value_delimiter = ',')]
    models: Vec<ModelId>,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 5000)]
    p: usize,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value = "fused,sis,rcs,dcs")]
    methods: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, allow_hyphen_values = true)]
    rho: f64,
    /// Number of slices.
    #[arg(long = "G")]
    slices: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum CovArg {
    Identity,
    Cs,
    Ar,
}

#[derive(Debug, Args)]
struct C1Args {
    #[arg(long, value_enum)]
    cov: CovArg,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    rho: f64,
    /// Leading coefficients; the rest of beta is zero.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    beta: Vec<f64>,
    #[arg(long)]
    p: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Screen(args) => cmd_screen(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::OracleKg(args) => cmd_oracle_kg(args),
        Command::C1Check(args) => cmd_c1_check(args),
    }
}

fn cmd_screen(args: ScreenArgs) -> Result<()> {
    let data = read_csv(&args.input, &ColumnRef::parse(&args.response), args.kind)?;
    let d_n = match args.dn {
        Some(d) => d,
        None => default_screen_size(data.n()).min(data.p()),
    };
    let mut results: Vec<ScreeningResult> = Vec::new();
    for method in &args.methods {
        let result = match *method {
            Method::Fused => kfuse::screen(
                &data.x,
                &data.response,
                &FilterConfig {
                    slice_counts: args.slices.clone(),
                    screen_size: Some(d_n),
                    record_per_scheme: false,
                },
            )?,
            Method::Kolmogorov(g) => {
                let mut r = kfuse::screen(
                    &data.x,
                    &data.response,
                    &FilterConfig {
                        slice_counts: Some(vec![g]),
                        screen_size: Some(d_n),
                        record_per_scheme: false,
                    },
                )?;
                r.method = method.to_string();
                r
            }
            Method::Baseline(b) => b.screen(&data.x, &data.response, d_n)?,
        };
        for w in &result.warnings {
            eprintln!("warning: {}: {w}", result.method);
        }
        results.push(result);
    }

    if let Some(out) = &args.out {
        let mut w = BufWriter::new(File::create(out).with_context(|| format!("creating {}", out.display()))?);
        writeln!(w, "variable,method,statistic,rank,selected")?;
        for r in &results {
            for (k, &j) in r.ranking.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    data.column_names[j],
                    r.method,
                    r.scores[j].fused,
                    k + 1,
                    k < r.selected.len()
                )?;
            }
        }
        w.flush()?;
    }
    for r in &results {
        let names: Vec<&str> = r.selected.iter().map(|&j| data.column_names[j].as_str()).collect();
        println!("{} ({} of {}): {}", r.method, r.selected.len(), data.p(), names.join(", "));
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let spec = ModelSpec::new(args.model, args.n, args.p, args.seed);
    let data = generate(&spec)?;
    write_csv(&args.out, &data).with_context(|| format!("writing {}", args.out.display()))?;
    let meta_path = sidecar_path(&args.out);
    Sidecar::for_dataset(args.model.as_str(), args.seed, &data).write(&meta_path)?;
    println!(
        "{}: n = {}, p = {} -> {} (+ {})",
        data.label,
        data.n(),
        data.p(),
        args.out.display(),
        meta_path.display()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let methods = parse_methods(&args.methods)?;
    let mut reports = Vec::new();
    for model in args.models {
        let cfg = BenchConfig::new(model, args.n, args.p, args.reps, methods.clone(), args.seed);
        let report = kfuse::run_bench(&cfg)?;
        for m in &report.methods {
            if let Some(reason) = &m.skipped {
                eprintln!("warning: model {model}: {} skipped: {reason}", m.method);
            }
        }
        eprintln!("model {model}: {} replicates in {:.1}s", report.replicates, report.runtime_seconds);
        reports.push(report);
    }
    print!("{}", format_table(&reports));
    if let Some(out) = &args.out {
        std::fs::write(out, reports_to_json(&reports)? + "\n").with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn cmd_oracle_kg(args: OracleArgs) -> Result<()> {
    let value = oracle_kg_normal(args.rho, args.slices, args.tol)?;
    println!("{value}");
    Ok(())
}

fn cmd_c1_check(args: C1Args) -> Result<()> {
    if args.beta.len() > args.p {
        bail!("beta has {} entries but p = {}", args.beta.len(), args.p);
    }
    let sigma = match args.cov {
        CovArg::Identity => CovarianceSpec::identity(args.p),
        CovArg::Cs => CovarianceSpec::compound_symmetry(args.rho, args.p),
        CovArg::Ar => CovarianceSpec::ar1(args.rho, args.p),
    };
    let mut beta = args.beta;
    beta.resize(args.p, 0.0);
    let report = condition_c1_set(&sigma, &beta)?;
    let set: Vec<String> = report.set.iter().map(|j| (j + 1).to_string()).collect();
    println!("covariance: {sigma}");
    println!("S = {{{}}}", set.join(", "));
    println!("|S| = {}", report.set.len());
    println!("margin = {}", report.margin);
    if let Some(bound) = report.ar_bound {
        println!("AR bound = {bound}");
    }
    Ok(())
}
