//! Prediction-quality metrics and both fitness formulations: the scalar
//! weighted objective Z (and its reciprocal, Power) for single-objective
//! runs, plus the `(n_f, RMSE, STD)` objective vector for multi-objective
//! runs. Metrics are computed on the held-out test split — the wrapper
//! selects subsets by generalization, not training fit.

use serde::{Deserialize, Serialize};

use crate::data::{project, SplitDataset};
use crate::error::{Error, Result};
use crate::mlp::{train, MlpModel, TrainConfig};

/// Reciprocal guard: a perfect zero-error subset gets Power = 1/ε rather
/// than a division by zero.
pub const POWER_EPSILON: f64 = 1e-12;

/// Error-based quality metrics for one prediction batch.
///
/// `std` is the population standard deviation of the errors, so the identity
/// `rmse² = std² + mean(e)²` holds; `rmse ≥ std` is *not* an invariant in
/// general. `mape` is `None` whenever some target is exactly zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionMetrics {
    pub rmse: f64,
    pub std: f64,
    pub mae: f64,
    pub mape: Option<f64>,
    pub tic: f64,
    /// Raw errors e_i = t_i − f_i, kept for diagnostics; not serialized.
    #[serde(skip)]
    pub errors: Vec<f64>,
}

/// The multi-objective fitness vector: subset size, test RMSE, test STD.
/// All three are minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub n_f: usize,
    pub rmse: f64,
    pub std: f64,
}

/// Compute all metrics from targets and predictions of equal length.
pub fn compute_metrics(targets: &[f64], predictions: &[f64]) -> Result<PredictionMetrics> {
    if targets.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            targets: targets.len(),
            predictions: predictions.len(),
        });
    }
    if targets.is_empty() {
        return Err(Error::Config("metrics need at least one observation".into()));
    }
    let n = targets.len() as f64;
    let errors: Vec<f64> = targets.iter().zip(predictions).map(|(t, f)| t - f).collect();

    let rmse = (errors.iter().map(|e| e * e).sum::<f64>() / n).sqrt();
    let mean = errors.iter().sum::<f64>() / n;
    let std = (errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n).sqrt();
    let mae = errors.iter().map(|e| e.abs()).sum::<f64>() / n;

    let mape = if targets.contains(&0.0) {
        None
    } else {
        Some(
            errors
                .iter()
                .zip(targets)
                .map(|(e, t)| (e / t).abs())
                .sum::<f64>()
                / n,
        )
    };

    let rms_t = (targets.iter().map(|t| t * t).sum::<f64>() / n).sqrt();
    let rms_f = (predictions.iter().map(|f| f * f).sum::<f64>() / n).sqrt();
    let denom = rms_t + rms_f;
    let tic = if denom > 0.0 { rmse / denom } else { 0.0 };

    Ok(PredictionMetrics {
        rmse,
        std,
        mae,
        mape,
        tic,
        errors,
    })
}

/// Scalar fitness with explicit accuracy/size trade-off weights:
/// `Z = RMSE·(1 + β·n_f) + γ·STD`. Lower is better.
pub fn weighted_objective_with(
    metrics: &PredictionMetrics,
    n_f: usize,
    beta: f64,
    gamma: f64,
) -> f64 {
    metrics.rmse * (1.0 + beta * n_f as f64) + gamma * metrics.std
}

/// Scalar fitness Z with the standard weights β = γ = 0.04. The feature
/// ratio form `β·n_x·(n_f/n_x)` reduces to `β·n_f`, so `n_x` only guards
/// the precondition `1 ≤ n_f ≤ n_x`.
pub fn weighted_objective(metrics: &PredictionMetrics, n_f: usize, n_x: usize) -> f64 {
    debug_assert!(n_f >= 1 && n_f <= n_x, "n_f = {n_f} out of 1..={n_x}");
    weighted_objective_with(metrics, n_f, 0.04, 0.04)
}

/// Fitness as the reciprocal of Z; higher is fitter. A zero Z (perfect
/// prediction with zero spread) is guarded by [`POWER_EPSILON`].
pub fn power(metrics: &PredictionMetrics, n_f: usize, n_x: usize) -> f64 {
    power_of_z(weighted_objective(metrics, n_f, n_x))
}

/// Reciprocal with the zero guard, for callers that already have Z.
pub fn power_of_z(z: f64) -> f64 {
    1.0 / z.max(POWER_EPSILON)
}

/// Everything needed to score one candidate mask: the MLP shape and
/// trainer settings plus the objective weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalSettings {
    pub n_hidden: usize,
    pub train: TrainConfig,
    pub beta: f64,
    pub gamma: f64,
}

impl EvalSettings {
    pub fn new(n_hidden: usize) -> Self {
        Self {
            n_hidden,
            train: TrainConfig::default(),
            beta: 0.04,
            gamma: 0.04,
        }
    }

    /// Same settings with a different trainer seed — used to derive
    /// per-candidate streams from the master seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            train: TrainConfig { seed, ..self.train.clone() },
            ..self.clone()
        }
    }
}

/// Full evaluation of one candidate mask.
///
/// The model is trained against the standardized target; `target_mean` and
/// `target_sd` (train statistics) turn its raw outputs back into
/// target-scale predictions.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub metrics: PredictionMetrics,
    pub objectives: ObjectiveVector,
    pub z: f64,
    pub power: f64,
    pub model: MlpModel,
    pub target_mean: f64,
    pub target_sd: f64,
}

/// The wrapper pipeline for one candidate: project both splits onto the
/// mask, train an MLP on the train side (target standardized so gradient
/// descent works on O(1) scales), predict the test side, and score the
/// test-set metrics on the original target scale. Deterministic per
/// (mask, settings).
pub fn evaluate_candidate(
    mask: &[bool],
    split: &SplitDataset,
    settings: &EvalSettings,
) -> Result<Evaluation> {
    let mut train_data = project(&split.train, mask)?;
    let test_data = project(&split.test, mask)?;

    let n = train_data.n_rows().max(1) as f64;
    let target_mean = train_data.target.iter().sum::<f64>() / n;
    let variance = train_data
        .target
        .iter()
        .map(|t| (t - target_mean) * (t - target_mean))
        .sum::<f64>()
        / n;
    let target_sd = if variance > 0.0 { variance.sqrt() } else { 1.0 };
    for t in &mut train_data.target {
        *t = (*t - target_mean) / target_sd;
    }

    let model = train(&train_data, settings.n_hidden, &settings.train)?;
    let predictions: Vec<f64> = model
        .predict(&test_data.rows)?
        .into_iter()
        .map(|p| p * target_sd + target_mean)
        .collect();
    let metrics = compute_metrics(&test_data.target, &predictions)?;

    let n_f = mask.iter().filter(|&&b| b).count();
    let z = weighted_objective_with(&metrics, n_f, settings.beta, settings.gamma);
    let objectives = ObjectiveVector {
        n_f,
        rmse: metrics.rmse,
        std: metrics.std,
    };
    Ok(Evaluation {
        metrics,
        objectives,
        z,
        power: power_of_z(z),
        model,
        target_mean,
        target_sd,
    })
}
