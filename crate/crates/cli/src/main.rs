//! `quboselect`: QUBO-based feature selection from the command line.
//!
//! Exit status: 0 success, 1 I/O failure, 2 usage or configuration error,
//! 3 data error, 4 solver size guard exceeded.

mod config;

use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use quboselect::feature_select::{CsvOptions, Dataset};
use quboselect::pipeline::{alpha_sweep, build_model, prepare_dataset, run_selection, training_profile, PipelineError};
use quboselect::solvers::compare_solvers;
use quboselect::classify::train_test_split;
use quboselect::{DataError, Qubo, QuboError, SolveError, SolverRegistry};
use serde::Serialize;

use config::{ClassifierArgs, DataArgs, FileConfig, Flags, ModelArgs, Resolved, SolverArgs, SplitArgs, UsageError};

#[derive(Debug, Parser)]
#[command(name = "quboselect", version, about = "QUBO models, solvers and correlation-based feature selection")]
struct Cli {
    /// TOML file with default settings; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for persisted artifacts
    #[arg(short, long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read, impute, encode and normalize a CSV dataset
    Ingest {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Spearman correlation profile of the training rows
    Profile {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Build the feature-selection QUBO
    Build {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Solve a persisted QUBO model
    Solve {
        /// QUBO model document
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Full pipeline: build, solve, and compare the selected features against all features
    Select {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        classifier: ClassifierArgs,
        /// Also solve for each of these alpha values (comma separated)
        #[arg(long, value_delimiter = ',')]
        sweep_alphas: Vec<f64>,
    },
    /// Run every registered solver on one model and tabulate the results
    Bench {
        #[command(flatten)]
        source: BenchSource,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        model_args: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Debug, Args)]
struct BenchSource {
    /// QUBO model document (otherwise built from --input)
    #[arg(long, conflicts_with_all = ["random", "zero"])]
    model: Option<PathBuf>,
    /// Random model with this many variables, entries uniform in [-5, 5]
    #[arg(long, conflicts_with = "zero")]
    random: Option<usize>,
    /// Seed of the random model
    #[arg(long, default_value_t = 0)]
    random_seed: u64,
    /// All-zero model with this many variables
    #[arg(long)]
    zero: Option<usize>,
}

const RANDOM_BOUND: f64 = 5.0;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let solve = |e: &SolveError| match e {
        SolveError::TooLarge { .. } => 4,
        SolveError::InvalidParams(_) | SolveError::UnknownSolver(_) => 2,
    };
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<PipelineError>() {
            return match e {
                PipelineError::Data(_) => 3,
                PipelineError::Solve(s) => solve(s),
            };
        }
        if let Some(e) = cause.downcast_ref::<SolveError>() {
            return solve(e);
        }
        if cause.is::<DataError>() || cause.is::<QuboError>() || cause.is::<serde_json::Error>() {
            return 3;
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let out = cli.output_dir.as_ref();
    match &cli.command {
        Command::Ingest { data } => {
            let r = Resolved::merge(Flags { output_dir: out, data: Some(data), ..Flags::default() }, file)?;
            cmd_ingest(&r)
        }
        Command::Profile { data, split } => {
            let r = Resolved::merge(
                Flags { output_dir: out, data: Some(data), split: Some(split), ..Flags::default() },
                file,
            )?;
            cmd_profile(&r)
        }
        Command::Build { data, split, model } => {
            let r = Resolved::merge(
                Flags { output_dir: out, data: Some(data), split: Some(split), model: Some(model), ..Flags::default() },
                file,
            )?;
            cmd_build(&r)
        }
        Command::Solve { model, solver } => {
            let r = Resolved::merge(Flags { output_dir: out, solver: Some(solver), ..Flags::default() }, file)?;
            cmd_solve(&r, model)
        }
        Command::Select { data, split, model, solver, classifier, sweep_alphas } => {
            let r = Resolved::merge(
                Flags {
                    output_dir: out,
                    data: Some(data),
                    split: Some(split),
                    model: Some(model),
                    solver: Some(solver),
                    classifier: Some(classifier),
                },
                file,
            )?;
            cmd_select(&r, sweep_alphas)
        }
        Command::Bench { source, data, split, model_args, solver } => {
            let r = Resolved::merge(
                Flags {
                    output_dir: out,
                    data: Some(data),
                    split: Some(split),
                    model: Some(model_args),
                    solver: Some(solver),
                    ..Flags::default()
                },
                file,
            )?;
            cmd_bench(&r, source)
        }
    }
}

fn load_dataset(r: &Resolved) -> anyhow::Result<Dataset> {
    let path = r.input()?;
    let target = r.target()?;
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let options = CsvOptions { delimiter: r.delimiter };
    Ok(prepare_dataset(BufReader::new(file), target, &options)?)
}

fn output_dir(r: &Resolved) -> anyhow::Result<&Path> {
    fs::create_dir_all(&r.output_dir).with_context(|| format!("creating {}", r.output_dir.display()))?;
    Ok(&r.output_dir)
}

/// Pretty JSON with a trailing newline.
fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, &text)
}

fn write_text(dir: &Path, name: &str, text: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_dataset(dir: &Path, ds: &Dataset) -> anyhow::Result<()> {
    let path = dir.join("dataset.csv");
    let file = File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    ds.write_csv(file)?;
    write_json(dir, "ingest_report.json", ds.report())
}

fn cmd_ingest(r: &Resolved) -> anyhow::Result<()> {
    let ds = load_dataset(r)?;
    let dir = output_dir(r)?;
    write_dataset(dir, &ds)?;
    let report = ds.report();
    println!(
        "{} rows x {} features, target `{}` (minority fraction {:.3})",
        report.rows, report.features, report.target, report.minority_fraction
    );
    println!("rows with unknown values: {}", report.rows_with_unknown);
    for enc in &report.encodings {
        println!("encoded `{}`: {} categories", enc.column, enc.categories.len());
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
    println!("artifacts written to {}", dir.display());
    Ok(())
}

fn profile_table(names: &[String], target_corr: &[f64]) -> String {
    let width = names.iter().map(|n| n.chars().count()).max().unwrap_or(0).max("Feature".len());
    let mut out = format!("{:<width$}  {:>10}\n", "Feature", "rho(target)");
    for (name, rho) in names.iter().zip(target_corr) {
        out.push_str(&format!("{name:<width$}  {rho:>11.6}\n"));
    }
    out
}

fn cmd_profile(r: &Resolved) -> anyhow::Result<()> {
    let ds = load_dataset(r)?;
    let split = train_test_split(&ds, r.pipeline.split_ratio, r.pipeline.split_seed)?;
    let profile = training_profile(&ds, &split)?;
    let dir = output_dir(r)?;
    write_json(dir, "split.json", &split)?;
    write_json(dir, "profile.json", &profile)?;
    print!("{}", profile_table(&profile.names, &profile.target_corr));
    Ok(())
}

fn cmd_build(r: &Resolved) -> anyhow::Result<()> {
    let ds = load_dataset(r)?;
    let split = train_test_split(&ds, r.pipeline.split_ratio, r.pipeline.split_seed)?;
    let profile = training_profile(&ds, &split)?;
    let model = build_model(&profile, &r.pipeline)?;
    let dir = output_dir(r)?;
    write_json(dir, "profile.json", &profile)?;
    write_json(dir, "qubo.json", &model)?;
    println!(
        "built {}-variable model (alpha = {}, energy scale {:.6})",
        model.n(),
        r.pipeline.alpha,
        model.energy_scale()
    );
    Ok(())
}

fn read_model(path: &Path) -> anyhow::Result<Qubo> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing model {}", path.display()))
}

fn cmd_solve(r: &Resolved, model_path: &Path) -> anyhow::Result<()> {
    let model = read_model(model_path)?;
    let params = r.pipeline.solve_params(&model)?;
    let registry = SolverRegistry::default();
    let result = registry.get(&r.pipeline.solver)?.solve(&model, &params)?;
    let dir = output_dir(r)?;
    write_json(dir, "solve_result.json", &result)?;
    println!(
        "{}: best energy {:.6} with {} of {} variables set ({:.3}s)",
        result.solver,
        result.best_energy,
        result.selected_count,
        model.n(),
        result.total_seconds()
    );
    println!("assignment: {:?}", result.best.as_slice());
    Ok(())
}

fn cmd_select(r: &Resolved, sweep_alphas: &[f64]) -> anyhow::Result<()> {
    let ds = load_dataset(r)?;
    let registry = SolverRegistry::default();
    let run = run_selection(&ds, &r.pipeline, &registry)?;
    let dir = output_dir(r)?;
    write_dataset(dir, &ds)?;
    write_json(dir, "config.json", &r.pipeline)?;
    write_json(dir, "profile.json", &run.profile)?;
    write_json(dir, "qubo.json", &run.model)?;
    write_json(dir, "solve_result.json", &run.report.result)?;
    write_json(dir, "selection_report.json", &run.report)?;
    let summary = run.report.summary();
    write_text(dir, "summary.txt", &summary)?;
    print!("{summary}");

    if !sweep_alphas.is_empty() {
        for &alpha in sweep_alphas {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(UsageError(format!("sweep alpha {alpha} outside [0, 1]")).into());
            }
        }
        let points = alpha_sweep(&run.profile, sweep_alphas, &r.pipeline, &registry)?;
        write_json(dir, "alpha_sweep.json", &points)?;
        println!("\n{:>6}  {:>12}  {:>10}", "alpha", "best value", "# features");
        for p in &points {
            println!("{:>6}  {:>12.6}  {:>10}", p.alpha, p.best_energy, p.selected_count);
        }
    }
    Ok(())
}

fn cmd_bench(r: &Resolved, source: &BenchSource) -> anyhow::Result<()> {
    let model = if let Some(path) = &source.model {
        read_model(path)?
    } else if let Some(n) = source.random {
        Qubo::random(n, RANDOM_BOUND, source.random_seed)?
    } else if let Some(n) = source.zero {
        Qubo::zeros(n)?
    } else {
        let ds = load_dataset(r)?;
        let split = train_test_split(&ds, r.pipeline.split_ratio, r.pipeline.split_seed)?;
        build_model(&training_profile(&ds, &split)?, &r.pipeline)?
    };
    let params = r.pipeline.solve_params(&model)?;
    let comparison = compare_solvers(&SolverRegistry::default(), &model, &params)?;
    let dir = output_dir(r)?;
    write_json(dir, "bench.json", &comparison)?;
    write_text(dir, "bench.txt", &comparison.render_table(false))?;
    print!("{}", comparison.render_table(true));
    Ok(())
}
