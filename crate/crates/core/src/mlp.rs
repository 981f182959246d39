//! Small feed-forward regressor: one tanh hidden layer, linear output,
//! trained per candidate feature subset by full-batch gradient descent with
//! momentum. This is the wrapper evaluator — cheap, deterministic, and good
//! enough to rank subsets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Hidden-layer width rule: `round(round(sqrt(n_inputs + n_outputs)) + c)`,
/// never below 1. The adjustment constant `c` is a dataset-level knob
/// (6 for the 13-feature schema, 8.5 for the 41-feature schema).
pub fn hidden_size(n_inputs: usize, n_outputs: usize, c: f64) -> usize {
    let base = ((n_inputs + n_outputs) as f64).sqrt().round();
    ((base + c).round() as usize).max(1)
}

/// Gradient-descent hyperparameters. Defaults are tuned for the wrapper
/// role: fast, stable, and deterministic given the seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Weights are initialized uniformly in `±init_range`.
    pub init_range: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            learning_rate: 0.01,
            momentum: 0.9,
            init_range: 0.5,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        if !(self.init_range > 0.0 && self.init_range.is_finite()) {
            return Err(Error::Config(format!(
                "init range must be positive, got {}",
                self.init_range
            )));
        }
        Ok(())
    }
}

/// One-hidden-layer perceptron with a single linear output unit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlpModel {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub n_outputs: usize,
    /// Input→hidden weights, `n_hidden` rows of `n_inputs` entries.
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    /// Hidden→output weights for the single output unit.
    pub w2: Vec<f64>,
    pub b2: f64,
}

/// Batch-MSE gradients, one entry per model parameter.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpModel {
    /// Seeded uniform initialization in `±range`. Draw order is fixed
    /// (w1 row-major, then b1, w2, b2) so models are reproducible.
    pub fn random(n_inputs: usize, n_hidden: usize, range: f64, rng: &mut impl Rng) -> Self {
        assert!(n_inputs >= 1 && n_hidden >= 1, "layer sizes must be positive");
        let mut draw = |n: usize| -> Vec<f64> {
            (0..n).map(|_| rng.gen_range(-range..=range)).collect()
        };
        let w1 = (0..n_hidden).map(|_| draw(n_inputs)).collect();
        let b1 = draw(n_hidden);
        let w2 = draw(n_hidden);
        let b2 = draw(1)[0];
        Self {
            n_inputs,
            n_hidden,
            n_outputs: 1,
            w1,
            b1,
            w2,
            b2,
        }
    }

    fn hidden(&self, row: &[f64]) -> Vec<f64> {
        self.w1
            .iter()
            .zip(&self.b1)
            .map(|(w, b)| {
                let z: f64 = b + w.iter().zip(row).map(|(wi, xi)| wi * xi).sum::<f64>();
                z.tanh()
            })
            .collect()
    }

    fn forward(&self, row: &[f64]) -> f64 {
        let h = self.hidden(row);
        self.b2 + self.w2.iter().zip(&h).map(|(w, hj)| w * hj).sum::<f64>()
    }

    /// Forward pass over a batch of rows, one prediction per row in order.
    pub fn predict(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        for row in rows {
            if row.len() != self.n_inputs {
                return Err(Error::WidthMismatch {
                    expected: self.n_inputs,
                    got: row.len(),
                });
            }
        }
        Ok(rows.iter().map(|r| self.forward(r)).collect())
    }

    /// Mean squared error over a batch.
    pub fn mse(&self, rows: &[Vec<f64>], targets: &[f64]) -> Result<f64> {
        let preds = self.predict(rows)?;
        if preds.len() != targets.len() {
            return Err(Error::LengthMismatch {
                targets: targets.len(),
                predictions: preds.len(),
            });
        }
        let n = targets.len().max(1) as f64;
        Ok(preds
            .iter()
            .zip(targets)
            .map(|(f, t)| (f - t) * (f - t))
            .sum::<f64>()
            / n)
    }

    /// Analytic backpropagation gradients of the batch MSE
    /// `mean((f_i - t_i)^2)` with respect to every parameter.
    pub fn gradient(&self, rows: &[Vec<f64>], targets: &[f64]) -> Result<Gradients> {
        if rows.is_empty() {
            return Err(Error::Config("gradient needs a non-empty batch".into()));
        }
        if rows.len() != targets.len() {
            return Err(Error::LengthMismatch {
                targets: targets.len(),
                predictions: rows.len(),
            });
        }
        let mut g = Gradients {
            w1: vec![vec![0.0; self.n_inputs]; self.n_hidden],
            b1: vec![0.0; self.n_hidden],
            w2: vec![0.0; self.n_hidden],
            b2: 0.0,
        };
        let scale = 2.0 / rows.len() as f64;
        for (row, &t) in rows.iter().zip(targets) {
            if row.len() != self.n_inputs {
                return Err(Error::WidthMismatch {
                    expected: self.n_inputs,
                    got: row.len(),
                });
            }
            let h = self.hidden(row);
            let y = self.b2 + self.w2.iter().zip(&h).map(|(w, hj)| w * hj).sum::<f64>();
            let dy = scale * (y - t);
            g.b2 += dy;
            for (j, &hj) in h.iter().enumerate() {
                g.w2[j] += dy * hj;
                let dh = dy * self.w2[j] * (1.0 - hj * hj);
                g.b1[j] += dh;
                for (gw, xi) in g.w1[j].iter_mut().zip(row) {
                    *gw += dh * xi;
                }
            }
        }
        Ok(g)
    }
}

/// Train a fresh model on the dataset's rows by full-batch gradient descent
/// with momentum. The best parameter snapshot seen across all epochs
/// (including the initial state) is returned, so the resulting train MSE
/// never exceeds the initial one. A non-finite loss aborts with a
/// diagnostic instead of returning garbage weights.
pub fn train(data: &Dataset, n_hidden: usize, config: &TrainConfig) -> Result<MlpModel> {
    config.validate()?;
    if data.n_rows() == 0 {
        return Err(Error::Config("cannot train on an empty dataset".into()));
    }
    if n_hidden == 0 {
        return Err(Error::Config("hidden layer needs at least one unit".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = MlpModel::random(data.n_features(), n_hidden, config.init_range, &mut rng);

    let mut vel = Gradients {
        w1: vec![vec![0.0; model.n_inputs]; model.n_hidden],
        b1: vec![0.0; model.n_hidden],
        w2: vec![0.0; model.n_hidden],
        b2: 0.0,
    };

    let mut best = model.clone();
    let mut best_mse = model.mse(&data.rows, &data.target)?;
    if !best_mse.is_finite() {
        return Err(Error::Diverged { epoch: 0 });
    }

    for epoch in 1..=config.epochs {
        let g = model.gradient(&data.rows, &data.target)?;
        let step = |v: &mut f64, g: f64| {
            *v = config.momentum * *v - config.learning_rate * g;
        };
        for (vr, gr) in vel.w1.iter_mut().zip(&g.w1) {
            for (v, &gi) in vr.iter_mut().zip(gr) {
                step(v, gi);
            }
        }
        for (v, &gi) in vel.b1.iter_mut().zip(&g.b1) {
            step(v, gi);
        }
        for (v, &gi) in vel.w2.iter_mut().zip(&g.w2) {
            step(v, gi);
        }
        step(&mut vel.b2, g.b2);

        for (wr, vr) in model.w1.iter_mut().zip(&vel.w1) {
            for (w, v) in wr.iter_mut().zip(vr) {
                *w += v;
            }
        }
        for (w, v) in model.b1.iter_mut().zip(&vel.b1) {
            *w += v;
        }
        for (w, v) in model.w2.iter_mut().zip(&vel.w2) {
            *w += v;
        }
        model.b2 += vel.b2;

        let mse = model.mse(&data.rows, &data.target)?;
        if !mse.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        if mse < best_mse {
            best_mse = mse;
            best = model.clone();
        }
    }

    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(rows: Vec<Vec<f64>>, target: Vec<f64>) -> Dataset {
        let width = rows[0].len();
        Dataset::new(
            "toy",
            (0..width).map(|j| format!("x{j}")).collect(),
            rows,
            target,
            "y",
        )
        .unwrap()
    }

    fn linear_toy() -> Dataset {
        // y = 2x over 20 evenly spaced points in [-1, 1].
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![-1.0 + i as f64 / 9.5]).collect();
        let target = rows.iter().map(|r| 2.0 * r[0]).collect();
        dataset(rows, target)
    }

    #[test]
    fn hidden_size_matches_published_settings() {
        assert_eq!(hidden_size(13, 1, 6.0), 10);
        assert_eq!(hidden_size(41, 1, 8.5), 15);
        assert_eq!(hidden_size(3, 1, 0.0), 2);
        assert_eq!(hidden_size(1, 1, 0.0), 1);
    }

    #[test]
    fn predict_with_zero_weights_returns_output_bias() {
        let model = MlpModel {
            n_inputs: 2,
            n_hidden: 3,
            n_outputs: 1,
            w1: vec![vec![0.0; 2]; 3],
            b1: vec![0.0; 3],
            w2: vec![0.0; 3],
            b2: 1.25,
        };
        let preds = model.predict(&[vec![5.0, -7.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(preds, vec![1.25, 1.25]);
    }

    #[test]
    fn predict_single_unit_matches_hand_computation() {
        let model = MlpModel {
            n_inputs: 1,
            n_hidden: 1,
            n_outputs: 1,
            w1: vec![vec![0.3]],
            b1: vec![0.1],
            w2: vec![2.0],
            b2: -0.5,
        };
        // 2 * tanh(0.3 * 1 + 0.1) - 0.5, with tanh(0.4) = 0.3799489622552249.
        let pred = model.predict(&[vec![1.0]]).unwrap()[0];
        assert!((pred - (2.0 * 0.379_948_962_255_224_9 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn predict_keeps_batch_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let model = MlpModel::random(2, 4, 0.5, &mut rng);
        let rows = vec![vec![0.1, 0.2], vec![-1.0, 2.0], vec![0.0, 0.0]];
        let batch = model.predict(&rows).unwrap();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(batch[i], model.predict(std::slice::from_ref(row)).unwrap()[0]);
        }
    }

    #[test]
    fn predict_rejects_width_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let model = MlpModel::random(3, 2, 0.5, &mut rng);
        let err = model.predict(&[vec![1.0, 2.0]]).unwrap_err();
        assert!(matches!(err, Error::WidthMismatch { expected: 3, got: 2 }));
    }

    #[test]
    fn zero_error_batch_has_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let model = MlpModel::random(2, 3, 0.5, &mut rng);
        let rows = vec![vec![0.4, -0.2], vec![1.0, 0.5]];
        let targets = model.predict(&rows).unwrap();
        let g = model.gradient(&rows, &targets).unwrap();
        assert!(g.w1.iter().flatten().all(|&v| v == 0.0));
        assert!(g.b1.iter().all(|&v| v == 0.0));
        assert!(g.w2.iter().all(|&v| v == 0.0));
        assert_eq!(g.b2, 0.0);
    }

    #[test]
    fn duplicated_rows_leave_mean_gradient_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let model = MlpModel::random(2, 3, 0.5, &mut rng);
        let rows = vec![vec![0.4, -0.2], vec![1.0, 0.5]];
        let targets = vec![0.3, -0.7];
        let doubled_rows: Vec<Vec<f64>> = rows.iter().chain(&rows).cloned().collect();
        let doubled_targets: Vec<f64> = targets.iter().chain(&targets).copied().collect();
        let g1 = model.gradient(&rows, &targets).unwrap();
        let g2 = model.gradient(&doubled_rows, &doubled_targets).unwrap();
        for (a, b) in g1.w1.iter().flatten().zip(g2.w1.iter().flatten()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((g1.b2 - g2.b2).abs() < 1e-14);
    }

    fn param_count(model: &MlpModel) -> usize {
        model.n_hidden * model.n_inputs + 2 * model.n_hidden + 1
    }

    /// Flat parameter indexing (w1 row-major, b1, w2, b2) so the
    /// finite-difference oracle can perturb each parameter in turn.
    fn param_mut(model: &mut MlpModel, k: usize) -> &mut f64 {
        let nw1 = model.n_hidden * model.n_inputs;
        if k < nw1 {
            return &mut model.w1[k / model.n_inputs][k % model.n_inputs];
        }
        let k = k - nw1;
        if k < model.n_hidden {
            return &mut model.b1[k];
        }
        let k = k - model.n_hidden;
        if k < model.n_hidden {
            return &mut model.w2[k];
        }
        &mut model.b2
    }

    fn flat_grads(g: &Gradients) -> Vec<f64> {
        let mut v: Vec<f64> = g.w1.iter().flatten().copied().collect();
        v.extend(&g.b1);
        v.extend(&g.w2);
        v.push(g.b2);
        v
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let step = 1e-5;
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut model = MlpModel::random(3, 4, 0.5, &mut rng);
            let rows: Vec<Vec<f64>> = (0..5)
                .map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let targets: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();

            let analytic = flat_grads(&model.gradient(&rows, &targets).unwrap());
            let mut numeric = Vec::with_capacity(param_count(&model));
            for k in 0..param_count(&model) {
                let orig = *param_mut(&mut model, k);
                *param_mut(&mut model, k) = orig + step;
                let plus = model.mse(&rows, &targets).unwrap();
                *param_mut(&mut model, k) = orig - step;
                let minus = model.mse(&rows, &targets).unwrap();
                *param_mut(&mut model, k) = orig;
                numeric.push((plus - minus) / (2.0 * step));
            }

            let diff: f64 = analytic
                .iter()
                .zip(&numeric)
                .map(|(a, n)| (a - n) * (a - n))
                .sum::<f64>()
                .sqrt();
            let norm: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
            assert!(
                diff / norm.max(1e-8) < 1e-4,
                "seed {seed}: relative gradient error {}",
                diff / norm.max(1e-8)
            );
        }
    }

    #[test]
    fn training_fits_linear_toy() {
        let data = linear_toy();
        let config = TrainConfig {
            epochs: 500,
            ..TrainConfig::default()
        };
        let model = train(&data, 3, &config).unwrap();
        let rmse = model.mse(&data.rows, &data.target).unwrap().sqrt();
        assert!(rmse < 0.1, "train RMSE {rmse}");
    }

    #[test]
    fn training_never_ends_worse_than_it_started() {
        for seed in 0..5 {
            let data = linear_toy();
            let config = TrainConfig {
                epochs: 7,
                seed,
                ..TrainConfig::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let initial = MlpModel::random(1, 3, config.init_range, &mut rng)
                .mse(&data.rows, &data.target)
                .unwrap();
            let trained = train(&data, 3, &config).unwrap();
            let fin = trained.mse(&data.rows, &data.target).unwrap();
            assert!(fin <= initial, "seed {seed}: {fin} > {initial}");
        }
    }

    #[test]
    fn zero_epochs_is_a_config_error() {
        let config = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train(&linear_toy(), 2, &config),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let config = TrainConfig {
            epochs: 50,
            seed: 123,
            ..TrainConfig::default()
        };
        let a = train(&linear_toy(), 4, &config).unwrap();
        let b = train(&linear_toy(), 4, &config).unwrap();
        assert_eq!(a.w1, b.w1);
        assert_eq!(a.b1, b.b1);
        assert_eq!(a.w2, b.w2);
        assert_eq!(a.b2, b.b2);
    }

    #[test]
    fn runaway_learning_rate_reports_divergence() {
        let data = dataset(
            vec![vec![1000.0], vec![-1000.0]],
            vec![1000.0, -1000.0],
        );
        let config = TrainConfig {
            learning_rate: 1e12,
            epochs: 200,
            ..TrainConfig::default()
        };
        match train(&data, 4, &config) {
            Err(Error::Diverged { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
