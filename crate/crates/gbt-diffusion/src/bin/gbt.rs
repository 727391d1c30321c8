//! `gbt` — file-based front end for the library: score fitting, embedding
//! audits, monotonicity audits, violation hunting, and synthetic
//! experiments.
//!
//! Exit codes: `0` success; `1` audit failure (a monotonicity violation was
//! found, or a check failed under `--expect-pass`); `2` usage or input
//! error (malformed files are reported with line/column diagnostics).
//!
//! Every subcommand is deterministic under a fixed `--seed` and never
//! modifies its input files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use gbt_diffusion::embedding::{
    default_lambda_grid, good_check_monte_carlo, is_diffusion_embedding, lambda_grid,
    GoodnessOptions, Verdict,
};
use gbt_diffusion::experiment::{
    run_goodness_heatmap, run_nmse_vs_count, run_nmse_vs_dim, ExperimentResult, HeatmapMode,
    HeatmapOptions, NmseVsCountOptions, NmseVsDimOptions,
};
use gbt_diffusion::io;
use gbt_diffusion::laplacian::PREDICATE_TOL;
use gbt_diffusion::monotonicity::{
    assert_monotone, hunt_violation, random_favoring_trace, EmbeddingFamily, InstanceGenerator,
    ViolationWitness, MONOTONE_SLACK,
};
use gbt_diffusion::plot::{render_heatmap, render_line_chart};
use gbt_diffusion::rng::stream;
use gbt_diffusion::{Embedding, Error, ModelConfig, Result, RootLaw, SolverOptions, DEFAULT_SEED};

/// Top-level command line: global thread cap plus one subcommand.
#[derive(Debug, Parser)]
#[command(
    name = "gbt",
    version,
    about = "Preference learning with diffusion priors: fit scores, audit embeddings, hunt monotonicity violations, run synthetic experiments"
)]
struct CliConfig {
    /// Worker threads for parallel sections (0 = one per core).
    #[arg(long, global = true, env = "GBT_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit MAP scores for a comparison dataset under a model configuration.
    Fit(FitArgs),
    /// Audit an embedding matrix: diffusion predicate or goodness hunt.
    CheckEmbedding(CheckEmbeddingArgs),
    /// Run random favoring traces against a model and dataset; any score
    /// drop beyond slack is a violation (exit 1, witness bundle written).
    MonotonicityAudit(AuditArgs),
    /// Search a random instance family for a monotonicity violation and
    /// shrink the first hit to a small replayable witness.
    HuntViolation(HuntArgs),
    /// Synthetic experiments; each writes results.csv, meta.json, and
    /// figure.svg into the output directory.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

/// Root law names as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LawArg {
    /// Continuous judgments, uniform on [-1, 1] at zero score gap.
    Uniform,
    /// Win/loss outcomes on {-1, +1}.
    Binary,
    /// Unbounded Gaussian judgments.
    Gaussian,
}

impl From<LawArg> for RootLaw {
    fn from(law: LawArg) -> RootLaw {
        match law {
            LawArg::Uniform => RootLaw::Uniform,
            LawArg::Binary => RootLaw::Binary,
            LawArg::Gaussian => RootLaw::Gaussian,
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Comparison dataset (CSV with header `a,b,r`, 1-indexed ids).
    #[arg(long)]
    dataset: PathBuf,
    /// Model configuration (JSON referencing the embedding and prior graph).
    #[arg(long)]
    config: PathBuf,
    /// Output fit result (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Override the configured root law.
    #[arg(long, value_enum)]
    root_law: Option<LawArg>,
    /// Override the configured prior scale σ.
    #[arg(long)]
    sigma: Option<f64>,
    /// Solver tolerance factor (gradient norm, relative to the origin's).
    #[arg(long)]
    tol_factor: Option<f64>,
    /// Newton iteration cap.
    #[arg(long)]
    max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckMode {
    /// Grid-check that every shifted Gram inverse is super-Laplacian.
    Diffusion,
    /// Hunt for a Laplacian whose dominance matrix breaks goodness.
    Good,
}

#[derive(Debug, Args)]
struct CheckEmbeddingArgs {
    /// Embedding matrix (CSV rows or JSON nested arrays), one column per
    /// alternative.
    #[arg(long)]
    embedding: PathBuf,
    /// Which check to run.
    #[arg(long, value_enum)]
    mode: CheckMode,
    /// Diffusion: number of grid shifts (default 50). Good: number of
    /// random graphs (default 2000).
    #[arg(long)]
    trials: Option<usize>,
    /// Seed for the goodness hunt's random graphs.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output report (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Exit 1 unless the check passes.
    #[arg(long)]
    expect_pass: bool,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Model configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Comparison dataset the traces start from (CSV).
    #[arg(long)]
    dataset: PathBuf,
    /// Number of random favoring traces to audit.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Seed for trace generation.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output report (JSON; embeds the first violation, if any).
    #[arg(long)]
    out: PathBuf,
    /// Where to write the replayable witness bundle on violation
    /// (default: the report path with a `.witness.json` suffix).
    #[arg(long)]
    witness_out: Option<PathBuf>,
}

/// Instance family names as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    /// Identity features (certified monotone).
    Identity,
    /// I.i.d. Gaussian features (violations exist when features are scarce).
    Gaussian,
    /// One-hot class features stacked with a shared exclusive component.
    OneHot,
    /// Square roots of inverted random strictly-dominant graph matrices,
    /// grid-verified before use.
    DiffusionVerified,
    /// Two collinear feature columns (reliably violating).
    Collinear,
}

impl From<FamilyArg> for EmbeddingFamily {
    fn from(family: FamilyArg) -> EmbeddingFamily {
        match family {
            FamilyArg::Identity => EmbeddingFamily::Identity,
            FamilyArg::Gaussian => EmbeddingFamily::Gaussian,
            FamilyArg::OneHot => EmbeddingFamily::OneHot,
            FamilyArg::DiffusionVerified => EmbeddingFamily::DiffusionVerified,
            FamilyArg::Collinear => EmbeddingFamily::Collinear,
        }
    }
}

#[derive(Debug, Args)]
struct HuntArgs {
    /// Which random instance family to search.
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Root law of the generated instances.
    #[arg(long, value_enum, default_value_t = LawArg::Uniform)]
    root_law: LawArg,
    /// Instances to try before giving up.
    #[arg(long, default_value_t = 300)]
    budget: usize,
    /// Seed for instance generation.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Where to write the shrunk witness bundle when a violation is found.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum ExperimentCommand {
    /// Probability that a random Gaussian embedding passes the goodness
    /// hunt, per (A, D) cell, with and without identity concatenation.
    GoodnessHeatmap(HeatmapArgs),
    /// Estimation error of the full embedding vs baselines as the feature
    /// dimension grows.
    NmseVsD(NmseVsDimArgs),
    /// Estimation error of one-hot vs classic models as the number of
    /// comparisons grows.
    NmseVsN(NmseVsCountArgs),
}

#[derive(Debug, Args)]
struct HeatmapArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Smallest alternative count.
    #[arg(long, default_value_t = 2)]
    a_min: usize,
    /// Largest alternative count.
    #[arg(long, default_value_t = 8)]
    a_max: usize,
    /// Smallest feature dimension.
    #[arg(long, default_value_t = 1)]
    d_min: usize,
    /// Largest feature dimension.
    #[arg(long, default_value_t = 8)]
    d_max: usize,
    /// Random embeddings drawn per cell.
    #[arg(long, default_value_t = 200)]
    embeddings: usize,
    /// Random graphs tested per embedding.
    #[arg(long, default_value_t = 50)]
    trials: usize,
}

#[derive(Debug, Args)]
struct NmseVsDimArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Number of alternatives.
    #[arg(long, default_value_t = 10)]
    alternatives: usize,
    /// Comparisons per trial.
    #[arg(long, default_value_t = 100)]
    comparisons: usize,
    /// Sweep feature dimensions 1..=max-d.
    #[arg(long, default_value_t = 8)]
    max_d: usize,
    /// Independent trials per dimension.
    #[arg(long, default_value_t = 30)]
    seeds: usize,
}

#[derive(Debug, Args)]
struct NmseVsCountArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// One-hot class sizes of the ground truth (comma separated).
    #[arg(long, value_delimiter = ',', default_values_t = vec![5, 5])]
    partition: Vec<usize>,
    /// Largest comparison count.
    #[arg(long, default_value_t = 100)]
    max_n: usize,
    /// Step between comparison counts (the sweep always starts at 0).
    #[arg(long, default_value_t = 10)]
    step: usize,
    /// Independent trials per count.
    #[arg(long, default_value_t = 30)]
    seeds: usize,
}

fn main() -> ExitCode {
    let cli = CliConfig::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("gbt: cannot configure {} worker threads: {e}", cli.threads);
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gbt: {e}");
            ExitCode::from(2)
        }
    }
}

/// Dispatches a subcommand; `Ok(false)` means "ran fine, audit failed".
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Fit(args) => run_fit(args),
        Command::CheckEmbedding(args) => run_check_embedding(args),
        Command::MonotonicityAudit(args) => run_audit(args),
        Command::HuntViolation(args) => run_hunt(args),
        Command::Experiment(cmd) => run_experiment(cmd),
    }
}

fn run_fit(args: FitArgs) -> Result<bool> {
    let mut cfg = io::read_model_config(&args.config)?;
    if args.root_law.is_some() || args.sigma.is_some() {
        cfg = ModelConfig::new(
            args.root_law.map_or(cfg.law(), RootLaw::from),
            args.sigma.unwrap_or(cfg.sigma()),
            cfg.embedding().clone(),
            cfg.laplacian().clone(),
        )?;
    }
    let dataset = io::read_dataset_csv(&args.dataset, Some(cfg.num_alternatives()))?;

    let mut opts = SolverOptions::default();
    if let Some(tol) = args.tol_factor {
        opts.tol_factor = tol;
    }
    if let Some(cap) = args.max_iterations {
        opts.max_iterations = cap;
    }

    let fit = gbt_diffusion::fit(&cfg, &dataset, &opts)?;
    io::write_fit_result(&args.out, &fit)?;

    let theta: Vec<String> = fit.theta_star.iter().map(|v| format!("{v:.6}")).collect();
    println!(
        "fit: {} comparisons, {} alternatives, {} Newton iterations, gradient norm {:.3e}",
        dataset.len(),
        cfg.num_alternatives(),
        fit.iterations,
        fit.grad_norm
    );
    println!("theta* = [{}]", theta.join(", "));
    println!("wrote {}", args.out.display());
    Ok(true)
}

fn run_check_embedding(args: CheckEmbeddingArgs) -> Result<bool> {
    let x = io::load_matrix(&args.embedding)?;
    let embedding = Embedding::new(x);
    let report = match args.mode {
        CheckMode::Diffusion => {
            let grid = match args.trials {
                Some(n) => lambda_grid(n),
                None => default_lambda_grid(),
            };
            let diffusion = is_diffusion_embedding(&embedding, &grid, PREDICATE_TOL)?;
            println!(
                "diffusion check: {} ({} shifts, worst margin {:.3e})",
                if diffusion.pass { "pass" } else { "FAIL" },
                diffusion.lambdas_checked,
                diffusion.margin
            );
            if let Some(lambda) = diffusion.failed_lambda {
                println!("first failing shift: lambda = {lambda:.6e}");
            }
            io::EmbeddingCheckReport::from_diffusion(diffusion)
        }
        CheckMode::Good => {
            let opts = GoodnessOptions {
                n_laplacians: args.trials.unwrap_or_else(|| GoodnessOptions::default().n_laplacians),
                ..GoodnessOptions::default()
            };
            let mut rng = stream(args.seed, 0);
            let goodness = good_check_monte_carlo(&embedding, &opts, &mut rng)?;
            let verdict = match goodness.verdict {
                Verdict::Good => "good (exact criterion)",
                Verdict::NotGood => "not_good",
                Verdict::Undetermined => "undetermined (no counterexample found)",
            };
            println!("goodness check: {verdict} after {} graph trials", goodness.trials);
            if let Some(w) = &goodness.witness {
                println!(
                    "witness: dominance entry ({}, {}) beats the diagonal by {:.3e}",
                    w.a, w.b, -w.margin
                );
            }
            io::EmbeddingCheckReport::from_goodness(goodness)
        }
    };
    io::write_json(&args.out, &report)?;
    println!("wrote {}", args.out.display());
    Ok(!args.expect_pass || report.result)
}

fn run_audit(args: AuditArgs) -> Result<bool> {
    let cfg = io::read_model_config(&args.config)?;
    if cfg.num_alternatives() < 2 {
        return Err(Error::InvalidParameter(
            "monotonicity audit needs at least two alternatives".into(),
        ));
    }
    let dataset = io::read_dataset_csv(&args.dataset, Some(cfg.num_alternatives()))?;

    let mut rng = stream(args.seed, 0);
    let mut violations = 0usize;
    let mut first: Option<ViolationWitness> = None;
    for _ in 0..args.trials {
        let target = rng.gen_range(0..cfg.num_alternatives());
        let trace = random_favoring_trace(&dataset, cfg.law(), target, &mut rng);
        let report = assert_monotone(&cfg, &dataset, &trace, MONOTONE_SLACK)?;
        if !report.pass {
            violations += 1;
            if first.is_none() {
                let failure = report.failure.expect("failed report carries its failure");
                first = Some(ViolationWitness {
                    law: cfg.law(),
                    sigma: cfg.sigma(),
                    embedding: cfg.embedding().matrix().clone(),
                    laplacian: cfg.laplacian().clone(),
                    dataset: dataset.clone(),
                    trace,
                    drop: failure.drop,
                });
            }
        }
    }

    let report = io::AuditReportFile::new(args.trials, violations, first.as_ref().map(io::WitnessBundle::from));
    io::write_json(&args.out, &report)?;
    println!(
        "monotonicity audit: {} of {} favoring traces violated (slack {MONOTONE_SLACK:.1e})",
        violations, args.trials
    );
    println!("wrote {}", args.out.display());
    if let Some(witness) = &first {
        let witness_path = args
            .witness_out
            .unwrap_or_else(|| args.out.with_extension("witness.json"));
        io::write_witness_bundle(&witness_path, witness)?;
        println!(
            "first violation: target {} dropped {:.6}; replayable bundle at {}",
            witness.trace.target,
            witness.drop,
            witness_path.display()
        );
    }
    Ok(report.pass)
}

fn run_hunt(args: HuntArgs) -> Result<bool> {
    let generator = InstanceGenerator::new(args.family.into(), args.root_law.into());
    let mut rng = stream(args.seed, 0);
    match hunt_violation(&generator, &mut rng, args.budget)? {
        Some(witness) => {
            io::write_witness_bundle(&args.out, &witness)?;
            println!(
                "violation found: target {} dropped {:.6} on a {}-alternative instance",
                witness.trace.target,
                witness.drop,
                witness.dataset.num_alternatives()
            );
            println!("shrunk witness bundle at {}", args.out.display());
            Ok(false)
        }
        None => {
            println!("no violation found in {} instances", args.budget);
            Ok(true)
        }
    }
}

fn run_experiment(cmd: ExperimentCommand) -> Result<bool> {
    match cmd {
        ExperimentCommand::GoodnessHeatmap(args) => {
            let base = HeatmapOptions {
                a_range: (args.a_min, args.a_max),
                d_range: (args.d_min, args.d_max),
                n_embeddings: args.embeddings,
                trials_per: args.trials,
                mode: HeatmapMode::Plain,
                seed: args.seed,
            };
            let mut rows = run_goodness_heatmap(&base)?;
            rows.extend(run_goodness_heatmap(&HeatmapOptions {
                mode: HeatmapMode::IdentityConcat,
                ..base.clone()
            })?);
            let svg = render_heatmap(
                &rows,
                "d",
                "a",
                "Probability a random embedding passes the goodness hunt",
            );
            let meta = serde_json::json!({
                "experiment": "goodness-heatmap",
                "seed": args.seed,
                "a_range": [args.a_min, args.a_max],
                "d_range": [args.d_min, args.d_max],
                "embeddings_per_cell": args.embeddings,
                "graphs_per_embedding": args.trials,
                "series": ["plain", "identity_concat"],
            });
            io::write_experiment_dir(&args.out, &rows, &meta, &svg)?;
            for series in ["plain", "identity_concat"] {
                let cells: Vec<&ExperimentResult> =
                    rows.iter().filter(|r| r.series == series).collect();
                let mean = cells.iter().map(|r| r.estimate).sum::<f64>() / cells.len() as f64;
                println!("{series}: mean pass probability {mean:.3} over {} cells", cells.len());
            }
            println!("wrote {}", args.out.display());
            Ok(true)
        }
        ExperimentCommand::NmseVsD(args) => {
            if args.max_d < 1 {
                return Err(Error::InvalidParameter("need max-d >= 1".into()));
            }
            let opts = NmseVsDimOptions {
                alternatives: args.alternatives,
                comparisons: args.comparisons,
                dims: (1..=args.max_d).collect(),
                n_seeds: args.seeds,
                seed: args.seed,
            };
            let rows = run_nmse_vs_dim(&opts)?;
            let svg = render_line_chart(&rows, "d", "nMSE", "Estimation error vs feature dimension");
            let meta = serde_json::json!({
                "experiment": "nmse-vs-d",
                "seed": args.seed,
                "alternatives": args.alternatives,
                "comparisons": args.comparisons,
                "dims": opts.dims,
                "n_seeds": args.seeds,
            });
            io::write_experiment_dir(&args.out, &rows, &meta, &svg)?;
            print_final_estimates(&rows, "d");
            println!("wrote {}", args.out.display());
            Ok(true)
        }
        ExperimentCommand::NmseVsN(args) => {
            if args.step == 0 {
                return Err(Error::InvalidParameter("need step >= 1".into()));
            }
            let opts = NmseVsCountOptions {
                partition: args.partition.clone(),
                counts: (0..=args.max_n).step_by(args.step).collect(),
                n_seeds: args.seeds,
                seed: args.seed,
            };
            let rows = run_nmse_vs_count(&opts)?;
            let svg = render_line_chart(&rows, "n", "nMSE", "Estimation error vs comparison count");
            let meta = serde_json::json!({
                "experiment": "nmse-vs-n",
                "seed": args.seed,
                "partition": args.partition,
                "counts": opts.counts,
                "n_seeds": args.seeds,
            });
            io::write_experiment_dir(&args.out, &rows, &meta, &svg)?;
            print_final_estimates(&rows, "n");
            println!("wrote {}", args.out.display());
            Ok(true)
        }
    }
}

/// Prints each series' estimate at the largest swept coordinate.
fn print_final_estimates(rows: &[ExperimentResult], coord: &str) {
    let max_x = rows.iter().filter_map(|r| r.coord(coord)).fold(f64::NEG_INFINITY, f64::max);
    for row in rows.iter().filter(|r| r.coord(coord) == Some(max_x)) {
        println!(
            "{} at {coord} = {}: nMSE {:.4} (stderr {:.4}, {} seeds, {} discarded)",
            row.series, max_x, row.estimate, row.stderr, row.n_seeds, row.discarded
        );
    }
}
