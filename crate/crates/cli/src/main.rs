//! `faglsud` — command-line runner for fuzzy-adaptive evolutionary feature
//! selection. Orchestrates single- and multi-objective batches over seeds
//! and writes traces, summaries, Pareto fronts, plot data, and rule dumps.

mod config;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use faglsud::data::{load_csv, save_csv, Dataset};
use faglsud::multi::run_multi;
use faglsud::search::run_single;
use faglsud::synth::{synthetic_johnson, synthetic_nhanes};

use config::{resolve, FileConfig, Mode, Overrides, ResolvedConfig};

#[derive(Parser)]
#[command(
    name = "faglsud",
    version,
    about = "Fuzzy-adaptive evolutionary feature selection for regression datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the bundled synthetic benchmark CSVs.
    GenData {
        /// Directory to write the CSV files into.
        #[arg(long, default_value = "data")]
        out: PathBuf,
        /// Generator seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Objective mode (default: single).
    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Dataset CSV with a header row.
    #[arg(long)]
    data: Option<PathBuf>,

    /// Target column name (default: pbf).
    #[arg(long)]
    target: Option<String>,

    /// JSON config file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Seeds: single (7), list (1,2,9), or inclusive range (1..5).
    /// Default: 1..5.
    #[arg(long)]
    seeds: Option<String>,

    /// Iteration budget override.
    #[arg(long)]
    iters: Option<usize>,

    /// Output directory (default: runs).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write the four fuzzy rule tables as text files.
    #[arg(long)]
    dump_fis: bool,

    /// Also write gnuplot-ready plot data files.
    #[arg(long)]
    emit_plots: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(Command::GenData { out, seed }) = cli.command {
        return gen_data(&out, seed);
    }

    let file = match &cli.run.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let flags = Overrides {
        mode: cli.run.mode,
        data: cli.run.data.clone(),
        target: cli.run.target.clone(),
        seeds: cli.run.seeds.clone(),
        iters: cli.run.iters,
        out: cli.run.out.clone(),
    };
    let cfg = resolve(file, flags)?;

    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("cannot create output directory {}", cfg.out.display()))?;
    if cli.run.dump_fis {
        for path in report::write_fis_dumps(&cfg.out)? {
            println!("wrote {}", path.display());
        }
    }

    let Some(data_path) = cfg.data.clone() else {
        if cli.run.dump_fis {
            // Dumping the rule tables is a complete request on its own.
            return Ok(());
        }
        bail!("no dataset given: pass --data <csv> or set \"data\" in the config file");
    };
    let dataset = load_csv(&data_path, &cfg.target)?;

    match cfg.mode {
        Mode::Single => run_single_batch(&cfg, &dataset, cli.run.emit_plots),
        Mode::Multi => run_multi_batch(&cfg, &dataset, cli.run.emit_plots),
    }
}

/// Write the two synthetic benchmark datasets.
fn gen_data(out: &Path, seed: u64) -> Result<()> {
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory {}", out.display()))?;
    for dataset in [synthetic_johnson(seed), synthetic_nhanes(seed)] {
        let path = out.join(format!("{}.csv", dataset.name));
        save_csv(&dataset, &path)?;
        println!(
            "wrote {} ({} rows x {} features)",
            path.display(),
            dataset.rows.len(),
            dataset.feature_names.len()
        );
    }
    Ok(())
}

/// Run every seed in single-objective mode and write its artifacts.
fn run_single_batch(cfg: &ResolvedConfig, dataset: &Dataset, plots: bool) -> Result<()> {
    let mut results = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let mut search = cfg.search.clone();
        search.seed = seed;
        let result = run_single(&search, dataset)?;

        report::write_csv(&cfg.out.join(format!("trace_{seed}.csv")), &result.trace)?;
        let summary = report::single_summary(cfg, dataset, &result);
        report::write_json(&cfg.out.join(format!("summary_{seed}.json")), &summary)?;
        if plots {
            report::write_convergence_plot(
                &cfg.out.join(format!("plot_convergence_{seed}.dat")),
                &result.trace,
            )?;
        }

        println!(
            "seed {seed}: rmse {:.4}  std {:.4}  n_f {}  [{}]",
            result.evaluation.metrics.rmse,
            result.evaluation.metrics.std,
            result.evaluation.objectives.n_f,
            result.selected_features.join(", ")
        );
        results.push(result);
    }

    let batch = report::batch_from_single(cfg, &dataset.name, &results);
    report::write_json(&cfg.out.join("batch_summary.json"), &batch)?;
    println!("batch: best seed {} -> {}", batch.best_seed, cfg.out.display());
    Ok(())
}

/// Run every seed in multi-objective mode and write its artifacts.
fn run_multi_batch(cfg: &ResolvedConfig, dataset: &Dataset, plots: bool) -> Result<()> {
    let mut results = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let mut search = cfg.search.clone();
        search.seed = seed;
        let result = run_multi(&search, dataset)?;

        report::write_csv(&cfg.out.join(format!("trace_{seed}.csv")), &result.trace)?;
        let summary = report::multi_summary(cfg, dataset, &result);
        report::write_json(&cfg.out.join(format!("summary_{seed}.json")), &summary)?;
        report::write_pareto_csv(&cfg.out.join(format!("pareto_{seed}.csv")), &result)?;
        report::write_json(
            &cfg.out.join(format!("pareto_{seed}.json")),
            &report::front_rows(&result),
        )?;
        if plots {
            report::write_front_plot(
                &cfg.out.join(format!("plot_front_{seed}.dat")),
                &result,
            )?;
            report::write_archive_plot(
                &cfg.out.join(format!("plot_convergence_{seed}.dat")),
                &result.trace,
            )?;
        }

        println!("seed {seed}: {} front entries", result.front.len());
        results.push(result);
    }

    let batch = report::batch_from_multi(cfg, &dataset.name, &results);
    report::write_json(&cfg.out.join("batch_summary.json"), &batch)?;
    println!("batch: best seed {} -> {}", batch.best_seed, cfg.out.display());
    Ok(())
}
