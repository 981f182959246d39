//! Run configuration: defaults, optional JSON config file, and command-line
//! flags, merged in that order (flags win).

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use faglsud::search::SearchConfig;
use serde::Deserialize;

/// Objective mode of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Minimize the weighted scalar objective Z.
    Single,
    /// Maintain a Pareto archive over (n_f, rmse, std).
    Multi,
}

/// Seeds as written in a config file: either the same compact text accepted
/// on the command line or an explicit JSON array.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SeedsSpec {
    Text(String),
    List(Vec<u64>),
}

/// Optional JSON config file. Keys are flat and mirror the run settings;
/// unknown keys are rejected so typos surface instead of being ignored.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<String>,
    pub data: Option<PathBuf>,
    pub target: Option<String>,
    pub seeds: Option<SeedsSpec>,
    pub out: Option<PathBuf>,
    pub n_imp: Option<usize>,
    pub n_col: Option<usize>,
    pub iters: Option<usize>,
    pub tw: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub split_ratio: Option<f64>,
    pub epochs: Option<usize>,
    pub learning_rate: Option<f64>,
    pub momentum: Option<f64>,
    pub init_range: Option<f64>,
    pub hidden_adjustment: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &PathBuf) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))
    }
}

/// Everything a run needs once defaults, config file, and flags are merged.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub mode: Mode,
    pub data: Option<PathBuf>,
    pub target: String,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    pub search: SearchConfig,
}

/// Command-line values that may override the config file. `None` means the
/// flag was not given.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub data: Option<PathBuf>,
    pub target: Option<String>,
    pub seeds: Option<String>,
    pub iters: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Parse a seeds expression: a single seed (`7`), a comma list (`1,2,9`),
/// or an inclusive range (`1..5`).
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    if text.is_empty() {
        bail!("seeds expression is empty");
    }
    if let Some((lo, hi)) = text.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u64 = lo.trim().parse().context("bad range start in seeds")?;
        let hi: u64 = hi.trim().parse().context("bad range end in seeds")?;
        if lo > hi {
            bail!("seeds range {lo}..{hi} is reversed");
        }
        return Ok((lo..=hi).collect());
    }
    let seeds = text
        .split(',')
        .map(|s| s.trim().parse::<u64>().with_context(|| format!("bad seed {s:?}")))
        .collect::<Result<Vec<u64>>>()?;
    Ok(seeds)
}

/// Merge defaults ← config file ← flags into a validated run plan.
pub fn resolve(file: FileConfig, flags: Overrides) -> Result<ResolvedConfig> {
    let mode = match flags.mode {
        Some(m) => m,
        None => match file.mode.as_deref() {
            None | Some("single") => Mode::Single,
            Some("multi") => Mode::Multi,
            Some(other) => bail!("config mode must be \"single\" or \"multi\", got {other:?}"),
        },
    };

    let seeds = match (flags.seeds, file.seeds) {
        (Some(text), _) => parse_seeds(&text)?,
        (None, Some(SeedsSpec::Text(text))) => parse_seeds(&text)?,
        (None, Some(SeedsSpec::List(list))) if !list.is_empty() => list,
        (None, Some(SeedsSpec::List(_))) => bail!("seeds list in config file is empty"),
        (None, None) => (1..=5).collect(),
    };

    let mut search = SearchConfig::default();
    if let Some(v) = file.n_imp {
        search.n_imp = v;
    }
    if let Some(v) = file.n_col {
        search.n_col = v;
    }
    if let Some(v) = file.iters {
        search.max_iters = v;
    }
    if let Some(v) = file.tw {
        search.tw = v;
    }
    if let Some(v) = file.alpha {
        search.alpha = v;
    }
    if let Some(v) = file.beta {
        search.beta = v;
    }
    if let Some(v) = file.gamma {
        search.gamma = v;
    }
    if let Some(v) = file.split_ratio {
        search.split_ratio = v;
    }
    if let Some(v) = file.epochs {
        search.train.epochs = v;
    }
    if let Some(v) = file.learning_rate {
        search.train.learning_rate = v;
    }
    if let Some(v) = file.momentum {
        search.train.momentum = v;
    }
    if let Some(v) = file.init_range {
        search.train.init_range = v;
    }
    if let Some(v) = file.hidden_adjustment {
        search.hidden_adjustment = Some(v);
    }
    if let Some(v) = flags.iters {
        search.max_iters = v;
    }
    search.validate().map_err(anyhow::Error::from)?;

    Ok(ResolvedConfig {
        mode,
        data: flags.data.or(file.data),
        target: flags
            .target
            .or(file.target)
            .unwrap_or_else(|| "pbf".to_string()),
        seeds,
        out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from("runs")),
        search,
    })
}
