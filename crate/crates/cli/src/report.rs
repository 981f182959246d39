//! Artifact writers: per-seed trace/summary/Pareto files, the batch
//! aggregate, gnuplot-ready plot data, and fuzzy rule-table dumps.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use faglsud::data::Dataset;
use faglsud::fuzzy::{build_fis1, build_fis2, build_fis3, build_fis4};
use faglsud::multi::MultiRunResult;
use faglsud::search::{OperatorProbs, RunResult};
use serde::Serialize;

use crate::config::ResolvedConfig;

/// Render a selection mask as a bit string, one character per feature.
pub fn mask_to_string(mask: &[bool]) -> String {
    mask.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// The winning candidate of a single-objective run.
#[derive(Debug, Serialize)]
pub struct BestSummary {
    pub mask: String,
    pub selected_features: Vec<String>,
    pub n_f: usize,
    pub rmse: f64,
    pub std: f64,
    pub mae: f64,
    pub mape: Option<f64>,
    pub tic: f64,
    pub z: f64,
    pub power: f64,
}

/// One Pareto-front entry with feature names resolved.
#[derive(Debug, Serialize)]
pub struct FrontRow {
    pub mask: String,
    pub selected_features: Vec<String>,
    pub n_f: usize,
    pub rmse: f64,
    pub std: f64,
}

/// Per-seed run summary; the shape is pinned by
/// `schemas/run_summary.schema.json` at the repository root.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub mode: String,
    pub seed: u64,
    pub dataset: String,
    pub target: String,
    pub n_features_total: usize,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best: Option<BestSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub archive_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub front: Option<Vec<FrontRow>>,
    pub final_probabilities: OperatorProbs,
}

/// Mean/median pair used by the batch aggregate.
#[derive(Debug, Serialize)]
pub struct MeanMedian {
    pub mean: f64,
    pub median: f64,
}

/// One row per seed in the batch summary.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum SeedStats {
    Single {
        seed: u64,
        n_f: usize,
        rmse: f64,
        std: f64,
        mae: f64,
        tic: f64,
        z: f64,
        power: f64,
    },
    Multi {
        seed: u64,
        archive_size: usize,
        distinct_n_f: usize,
        best_rmse: f64,
        best_rmse_n_f: usize,
        best_rmse_std: f64,
    },
}

/// Aggregate over all seeds of a batch: per-seed rows plus the mean and
/// median of every scalar metric.
#[derive(Debug, Serialize)]
pub struct BatchSummary {
    pub mode: String,
    pub dataset: String,
    pub target: String,
    pub seeds: Vec<u64>,
    pub runs: Vec<SeedStats>,
    pub aggregate: BTreeMap<String, MeanMedian>,
    pub best_seed: u64,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn mean_median(values: &[f64]) -> MeanMedian {
    MeanMedian {
        mean: mean(values),
        median: median(values),
    }
}

/// Serialize rows to a comma-delimited CSV with a header row.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer =
        csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Serialize a value as pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Build the per-seed summary of a single-objective run.
pub fn single_summary(cfg: &ResolvedConfig, dataset: &Dataset, result: &RunResult) -> RunSummary {
    let m = &result.evaluation.metrics;
    let last = result.trace.last().expect("a run records at least one iteration");
    RunSummary {
        mode: "single".into(),
        seed: result.seed,
        dataset: dataset.name.clone(),
        target: cfg.target.clone(),
        n_features_total: dataset.feature_names.len(),
        iterations: result.trace.len(),
        best: Some(BestSummary {
            mask: mask_to_string(&result.best_mask),
            selected_features: result.selected_features.clone(),
            n_f: result.evaluation.objectives.n_f,
            rmse: m.rmse,
            std: m.std,
            mae: m.mae,
            mape: m.mape,
            tic: m.tic,
            z: result.evaluation.z,
            power: result.evaluation.power,
        }),
        archive_size: None,
        front: None,
        final_probabilities: OperatorProbs {
            glva: last.p_glva,
            udvd: last.p_udvd,
            edels: last.p_edels,
        },
    }
}

/// Build the per-seed summary of a multi-objective run.
pub fn multi_summary(
    cfg: &ResolvedConfig,
    dataset: &Dataset,
    result: &MultiRunResult,
) -> RunSummary {
    let last = result.trace.last().expect("a run records at least one iteration");
    RunSummary {
        mode: "multi".into(),
        seed: result.seed,
        dataset: dataset.name.clone(),
        target: cfg.target.clone(),
        n_features_total: dataset.feature_names.len(),
        iterations: result.trace.len(),
        best: None,
        archive_size: Some(result.front.len()),
        front: Some(front_rows(result)),
        final_probabilities: OperatorProbs {
            glva: last.p_glva,
            udvd: last.p_udvd,
            edels: last.p_edels,
        },
    }
}

/// Front entries with masks rendered as bit strings.
pub fn front_rows(result: &MultiRunResult) -> Vec<FrontRow> {
    result
        .front
        .iter()
        .map(|f| FrontRow {
            mask: mask_to_string(&f.mask),
            selected_features: f.selected_features.clone(),
            n_f: f.objectives.n_f,
            rmse: f.objectives.rmse,
            std: f.objectives.std,
        })
        .collect()
}

/// Pareto CSV row: `mask,n_f,rmse,std`.
#[derive(Serialize)]
struct ParetoRow {
    mask: String,
    n_f: usize,
    rmse: f64,
    std: f64,
}

/// Write the Pareto front as CSV (`mask,n_f,rmse,std`).
pub fn write_pareto_csv(path: &Path, result: &MultiRunResult) -> Result<()> {
    let rows: Vec<ParetoRow> = result
        .front
        .iter()
        .map(|f| ParetoRow {
            mask: mask_to_string(&f.mask),
            n_f: f.objectives.n_f,
            rmse: f.objectives.rmse,
            std: f.objectives.std,
        })
        .collect();
    write_csv(path, &rows)
}

/// Aggregate single-objective runs into the batch summary.
pub fn batch_from_single(
    cfg: &ResolvedConfig,
    dataset_name: &str,
    results: &[RunResult],
) -> BatchSummary {
    let runs: Vec<SeedStats> = results
        .iter()
        .map(|r| SeedStats::Single {
            seed: r.seed,
            n_f: r.evaluation.objectives.n_f,
            rmse: r.evaluation.metrics.rmse,
            std: r.evaluation.metrics.std,
            mae: r.evaluation.metrics.mae,
            tic: r.evaluation.metrics.tic,
            z: r.evaluation.z,
            power: r.evaluation.power,
        })
        .collect();

    let pick = |f: fn(&RunResult) -> f64| results.iter().map(f).collect::<Vec<f64>>();
    let mut aggregate = BTreeMap::new();
    aggregate.insert("rmse".into(), mean_median(&pick(|r| r.evaluation.metrics.rmse)));
    aggregate.insert("std".into(), mean_median(&pick(|r| r.evaluation.metrics.std)));
    aggregate.insert("mae".into(), mean_median(&pick(|r| r.evaluation.metrics.mae)));
    aggregate.insert("tic".into(), mean_median(&pick(|r| r.evaluation.metrics.tic)));
    aggregate.insert(
        "n_f".into(),
        mean_median(&pick(|r| r.evaluation.objectives.n_f as f64)),
    );
    aggregate.insert("z".into(), mean_median(&pick(|r| r.evaluation.z)));
    aggregate.insert("power".into(), mean_median(&pick(|r| r.evaluation.power)));

    let best_seed = results
        .iter()
        .min_by(|a, b| a.evaluation.metrics.rmse.total_cmp(&b.evaluation.metrics.rmse))
        .map(|r| r.seed)
        .expect("batch has at least one seed");

    BatchSummary {
        mode: "single".into(),
        dataset: dataset_name.into(),
        target: cfg.target.clone(),
        seeds: cfg.seeds.clone(),
        runs,
        aggregate,
        best_seed,
    }
}

/// Aggregate multi-objective runs into the batch summary. A run's headline
/// numbers come from its lowest-RMSE front entry.
pub fn batch_from_multi(
    cfg: &ResolvedConfig,
    dataset_name: &str,
    results: &[MultiRunResult],
) -> BatchSummary {
    let best_entry = |r: &MultiRunResult| {
        r.front
            .iter()
            .min_by(|a, b| a.objectives.rmse.total_cmp(&b.objectives.rmse))
            .map(|f| f.objectives)
            .expect("final archive is never empty")
    };

    let runs: Vec<SeedStats> = results
        .iter()
        .map(|r| {
            let mut sizes: Vec<usize> = r.front.iter().map(|f| f.objectives.n_f).collect();
            sizes.sort_unstable();
            sizes.dedup();
            let best = best_entry(r);
            SeedStats::Multi {
                seed: r.seed,
                archive_size: r.front.len(),
                distinct_n_f: sizes.len(),
                best_rmse: best.rmse,
                best_rmse_n_f: best.n_f,
                best_rmse_std: best.std,
            }
        })
        .collect();

    let mut aggregate = BTreeMap::new();
    let sizes: Vec<f64> = results.iter().map(|r| r.front.len() as f64).collect();
    let distinct: Vec<f64> = results
        .iter()
        .map(|r| {
            let mut n: Vec<usize> = r.front.iter().map(|f| f.objectives.n_f).collect();
            n.sort_unstable();
            n.dedup();
            n.len() as f64
        })
        .collect();
    let best_rmse: Vec<f64> = results.iter().map(|r| best_entry(r).rmse).collect();
    aggregate.insert("archive_size".into(), mean_median(&sizes));
    aggregate.insert("distinct_n_f".into(), mean_median(&distinct));
    aggregate.insert("best_rmse".into(), mean_median(&best_rmse));

    let best_seed = results
        .iter()
        .min_by(|a, b| best_entry(a).rmse.total_cmp(&best_entry(b).rmse))
        .map(|r| r.seed)
        .expect("batch has at least one seed");

    BatchSummary {
        mode: "multi".into(),
        dataset: dataset_name.into(),
        target: cfg.target.clone(),
        seeds: cfg.seeds.clone(),
        runs,
        aggregate,
        best_seed,
    }
}

/// Write a whitespace-delimited convergence curve (`iter rmse best_power`).
pub fn write_convergence_plot(
    path: &Path,
    trace: &[faglsud::search::TraceRow],
) -> Result<()> {
    let mut text = String::from("# iter rmse best_power\n");
    for row in trace {
        text.push_str(&format!("{} {} {}\n", row.iter, row.rmse, row.best_power));
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Write the multi-objective convergence curve (`iter archive_size`).
pub fn write_archive_plot(path: &Path, trace: &[faglsud::multi::MoTraceRow]) -> Result<()> {
    let mut text = String::from("# iter archive_size\n");
    for row in trace {
        text.push_str(&format!("{} {}\n", row.iter, row.archive_size));
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Write the front scatter (`n_f rmse std`), one data line per entry; an
/// empty front leaves just the header.
pub fn write_front_plot(path: &Path, result: &MultiRunResult) -> Result<()> {
    let mut text = String::from("# n_f rmse std\n");
    for f in &result.front {
        text.push_str(&format!(
            "{} {} {}\n",
            f.objectives.n_f, f.objectives.rmse, f.objectives.std
        ));
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Dump the four fuzzy rule tables as text files; returns the paths written.
pub fn write_fis_dumps(dir: &Path) -> Result<Vec<PathBuf>> {
    let tables = [build_fis1(), build_fis2(), build_fis3(), build_fis4()];
    let mut paths = Vec::new();
    for table in &tables {
        let path = dir.join(format!("{}_rules.txt", table.name.to_lowercase()));
        fs::write(&path, table.dump())
            .with_context(|| format!("cannot write {}", path.display()))?;
        paths.push(path);
    }
    Ok(paths)
}
