//! Acceptance suite: one test per release criterion. Each test prints a
//! single pass/fail line; every tolerance and ceiling is pinned as a
//! constant next to the check it governs. Criteria 6–8 run the full
//! desk-scale configuration on the bundled synthetic benchmark, so this
//! file is the slowest in the workspace (a few minutes total).

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use faglsud::fuzzy::{build_fis1, build_fis2, build_fis3, build_fis4};
use faglsud::mlp::{Gradients, MlpModel};
use faglsud::multi::{dominates, nondominated_sort, run_multi, ssd, ssdr};
use faglsud::objectives::{
    compute_metrics, power_of_z, weighted_objective_with, ObjectiveVector, PredictionMetrics,
};
use faglsud::search::{
    avlf_bounds, run_single, run_single_observed, transfer, SearchConfig, TraceRow,
    VELOCITY_LIMIT,
};
use faglsud::synth::synthetic_johnson;

/// Run one criterion body and print its verdict as a single line.
fn criterion(label: &str, body: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {label}: pass"),
        Err(payload) => {
            println!("criterion {label}: fail");
            resume_unwind(payload);
        }
    }
}

#[test]
fn criterion_1_transfer_function_exactness() {
    criterion("1 (transfer function)", || {
        const AT_QUARTER: f64 = 0.76159;
        const TOL: f64 = 1e-5;
        const BUDGET: Duration = Duration::from_secs(1);

        let start = Instant::now();
        assert_eq!(transfer(0.0), 0.0);
        assert!((transfer(0.25) - AT_QUARTER).abs() < TOL);
        assert!((transfer(-0.25) - AT_QUARTER).abs() < TOL);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let u: f64 = rng.gen_range(-VELOCITY_LIMIT..=VELOCITY_LIMIT);
            assert_eq!(transfer(u), transfer(-u), "asymmetric at u = {u}");
            assert!((0.0..1.0).contains(&transfer(u)));
        }
        assert!(start.elapsed() < BUDGET, "took {:?}", start.elapsed());
    });
}

#[test]
fn criterion_2_fuzzy_inference_oracle() {
    criterion("2 (fuzzy inference oracle)", || {
        // Analytic unit-universe centroids of the Low and High terms.
        const LOW_CENTROID: f64 = 1.0 / 6.0;
        const HIGH_CENTROID: f64 = 5.0 / 6.0;
        const TOL: f64 = 1e-3;

        let fis1 = build_fis1();
        // All indicators at zero: only the all-Low row fires, so every
        // coefficient lands on the Low centroid scaled onto [0, 2].
        let outs = fis1
            .infer(&[
                ("np1", 0.0),
                ("np2", 0.0),
                ("np3", 0.0),
                ("np4", 0.0),
                ("nit", 0.0),
            ])
            .unwrap();
        assert_eq!(outs.len(), 4);
        for (name, value) in &outs {
            assert!(
                (value - 2.0 * LOW_CENTROID).abs() < TOL,
                "{name} = {value}, expected {}",
                2.0 * LOW_CENTROID
            );
        }

        // Late stage (nit = 1): only the wildcard end-game row fires, for
        // any indicator values — social rates Low, cognitive rates High.
        for nps in [[0.0, 0.3, 0.6, 1.0], [0.9, 0.1, 0.5, 0.2]] {
            let outs = fis1
                .infer(&[
                    ("np1", nps[0]),
                    ("np2", nps[1]),
                    ("np3", nps[2]),
                    ("np4", nps[3]),
                    ("nit", 1.0),
                ])
                .unwrap();
            let expected = [
                2.0 * LOW_CENTROID,
                2.0 * HIGH_CENTROID,
                2.0 * LOW_CENTROID,
                2.0 * HIGH_CENTROID,
            ];
            for ((name, value), want) in outs.iter().zip(expected) {
                assert!((value - want).abs() < TOL, "{name} = {value}, expected {want}");
            }
        }

        assert_eq!(fis1.rules.len(), 18);
        assert_eq!(build_fis2().rules.len(), 18);
        assert_eq!(build_fis3().rules.len(), 18);
        assert_eq!(build_fis4().rules.len(), 33);
    });
}

#[test]
fn criterion_3_metric_identity_and_objective_values() {
    criterion("3 (metric identities)", || {
        const IDENTITY_TOL: f64 = 1e-9;
        const VALUE_TOL: f64 = 1e-5;
        const EXPECTED_Z: f64 = 4.91864;
        const EXPECTED_POWER: f64 = 0.203308;

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let n = rng.gen_range(2..40);
            let targets: Vec<f64> = (0..n).map(|_| rng.gen_range(5.0..50.0)).collect();
            let predictions: Vec<f64> = (0..n).map(|_| rng.gen_range(5.0..50.0)).collect();
            let m = compute_metrics(&targets, &predictions).unwrap();
            let mean_error = m.errors.iter().sum::<f64>() / n as f64;
            let gap = m.rmse.powi(2) - (m.std.powi(2) + mean_error.powi(2));
            assert!(gap.abs() < IDENTITY_TOL, "identity violated by {gap:e}");
        }

        // The scalar objective and fitness for a 5-of-13 subset with the
        // published accuracy/stability figures.
        let metrics = PredictionMetrics {
            rmse: 3.967,
            std: 3.956,
            mae: 0.0,
            mape: None,
            tic: 0.0,
            errors: Vec::new(),
        };
        let z = weighted_objective_with(&metrics, 5, 0.04, 0.04);
        assert!((z - EXPECTED_Z).abs() < VALUE_TOL, "Z = {z}");
        let power = power_of_z(z);
        assert!((power - EXPECTED_POWER).abs() < VALUE_TOL, "power = {power}");
    });
}

/// Brute-force rank peeling: repeatedly extract the mutually non-dominated
/// subset of what remains.
fn peel_ranks(points: &[ObjectiveVector]) -> Vec<usize> {
    let mut ranks = vec![0usize; points.len()];
    let mut rank = 0;
    while ranks.contains(&0) {
        rank += 1;
        let layer: Vec<usize> = (0..points.len())
            .filter(|&i| ranks[i] == 0)
            .filter(|&i| {
                !(0..points.len())
                    .any(|j| ranks[j] == 0 && j != i && dominates(&points[j], &points[i]))
            })
            .collect();
        for i in layer {
            ranks[i] = rank;
        }
    }
    ranks
}

#[test]
fn criterion_4_domination_facts_and_sort_oracle() {
    criterion("4 (domination facts)", || {
        let ov = |n_f: usize, rmse: f64, std: f64| ObjectiveVector { n_f, rmse, std };

        // Published benchmark fronts on the 13-feature dataset: the
        // proposed method (x) and four competitors (m, z, w, t).
        let x = [
            ov(2, 4.531, 4.526),
            ov(3, 4.304, 4.303),
            ov(5, 3.967, 3.956),
            ov(9, 3.9055, 3.9019),
        ];
        let m = [ov(2, 5.695, 5.691), ov(5, 4.036, 4.03), ov(9, 3.906, 3.902)];
        let z = [
            ov(3, 6.164, 6.156),
            ov(4, 5.159, 5.137),
            ov(5, 4.183, 4.178),
            ov(7, 3.971, 3.959),
        ];
        let w = [
            ov(3, 5.589, 5.586),
            ov(3, 5.616, 5.575),
            ov(4, 4.709, 4.638),
            ov(5, 4.381, 4.373),
            ov(6, 4.1318, 4.1282),
            ov(7, 4.083, 4.048),
            ov(9, 3.989, 3.986),
        ];
        let t = [ov(3, 4.423, 4.418), ov(6, 4.111, 4.106), ov(7, 4.13, 4.092)];

        // Cross-method domination chains, expanded into ordered pairs.
        let facts = [
            (x[0], m[0]),
            (x[1], t[0]),
            (t[0], w[0]),
            (t[0], w[1]),
            (w[0], z[0]),
            (w[1], z[0]),
            (x[1], w[0]),
            (x[1], w[1]),
            (x[1], z[0]),
            (x[2], m[1]),
            (m[1], z[2]),
            (z[2], w[3]),
            (x[2], z[2]),
            (x[2], w[3]),
            (m[1], w[3]),
            (x[3], m[2]),
            (m[2], w[6]),
            (x[3], w[6]),
            (w[2], z[1]),
            (z[3], w[5]),
            (w[5], t[2]),
            (z[3], t[2]),
            (t[1], w[4]),
        ];
        for (a, b) in facts {
            assert!(dominates(&a, &b), "{a:?} should dominate {b:?}");
            assert!(!dominates(&b, &a), "{b:?} must not dominate {a:?}");
        }

        // The proposed method's own four front points are mutually
        // non-dominated.
        for i in 0..x.len() {
            for j in 0..x.len() {
                if i != j {
                    assert!(!dominates(&x[i], &x[j]), "x[{i}] vs x[{j}]");
                }
            }
        }

        // Full sort equals brute-force peeling on 300 random vectors drawn
        // from a coarse grid (so exact ties occur).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let points: Vec<ObjectiveVector> = (0..300)
            .map(|_| {
                ObjectiveVector {
                    n_f: rng.gen_range(1..=13),
                    rmse: f64::from(rng.gen_range(30..80)) / 10.0,
                    std: f64::from(rng.gen_range(30..80)) / 10.0,
                }
            })
            .collect();
        assert_eq!(nondominated_sort(&points), peel_ranks(&points));
    });
}

fn param_count(model: &MlpModel) -> usize {
    model.n_hidden * model.n_inputs + model.n_hidden + model.n_hidden + 1
}

fn param_mut(model: &mut MlpModel, k: usize) -> &mut f64 {
    let n_w1 = model.n_hidden * model.n_inputs;
    if k < n_w1 {
        return &mut model.w1[k / model.n_inputs][k % model.n_inputs];
    }
    let k = k - n_w1;
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
    let mut flat: Vec<f64> = g.w1.iter().flatten().copied().collect();
    flat.extend(&g.b1);
    flat.extend(&g.w2);
    flat.push(g.b2);
    flat
}

#[test]
fn criterion_5_gradient_check() {
    criterion("5 (gradient check)", || {
        const STEP: f64 = 1e-5;
        const REL_TOL: f64 = 1e-4;
        const BUDGET: Duration = Duration::from_secs(10);

        let start = Instant::now();
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n_inputs = rng.gen_range(2..8);
            let n_hidden = rng.gen_range(2..8);
            let mut model = MlpModel::random(n_inputs, n_hidden, 0.5, &mut rng);
            let rows: Vec<Vec<f64>> = (0..6)
                .map(|_| (0..n_inputs).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let targets: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();

            let analytic = flat_grads(&model.gradient(&rows, &targets).unwrap());
            let mut numeric = Vec::with_capacity(analytic.len());
            for k in 0..param_count(&model) {
                let original = *param_mut(&mut model, k);
                *param_mut(&mut model, k) = original + STEP;
                let plus = model.mse(&rows, &targets).unwrap();
                *param_mut(&mut model, k) = original - STEP;
                let minus = model.mse(&rows, &targets).unwrap();
                *param_mut(&mut model, k) = original;
                numeric.push((plus - minus) / (2.0 * STEP));
            }

            let diff: f64 = analytic
                .iter()
                .zip(&numeric)
                .map(|(a, n)| (a - n) * (a - n))
                .sum::<f64>()
                .sqrt();
            let norm: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
            let relative = diff / norm.max(1e-8);
            assert!(relative < REL_TOL, "seed {seed}: relative error {relative:e}");
        }
        assert!(start.elapsed() < BUDGET, "took {:?}", start.elapsed());
    });
}

/// Render a trace exactly as the runner's CSV artifact for byte comparison.
fn trace_bytes(trace: &[TraceRow]) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in trace {
        writer.serialize(row).unwrap();
    }
    writer.into_inner().unwrap()
}

#[test]
fn criterion_6_full_run_invariants_and_determinism() {
    criterion("6 (search invariants)", || {
        const VELOCITY_TOL: f64 = 1e-9;
        const BUDGET: Duration = Duration::from_secs(300);

        let start = Instant::now();
        let dataset = synthetic_johnson(42);
        let config = SearchConfig {
            seed: 1,
            ..SearchConfig::default()
        };

        let mut last_best = 0.0f64;
        let result = run_single_observed(&config, &dataset, |state| {
            let best = &state.global_best;
            assert!(
                best.eval.power >= last_best,
                "best power dropped at t = {}",
                state.t
            );
            last_best = best.eval.power;

            for (i, cand) in state.candidates.iter().enumerate() {
                assert!(
                    cand.position.iter().all(|p| (0.0..=1.0).contains(p)),
                    "position out of range (t = {}, candidate {i})",
                    state.t
                );
                assert!(
                    cand.velocity.iter().all(|v| v.abs() <= VELOCITY_LIMIT + VELOCITY_TOL),
                    "velocity beyond hard limit (t = {}, candidate {i})",
                    state.t
                );
                assert!(
                    cand.mask.iter().any(|&b| b),
                    "empty mask (t = {}, candidate {i})",
                    state.t
                );
                if state.t >= 1 {
                    let bounds =
                        avlf_bounds(&cand.position, &best.position, state.t, config.alpha);
                    for (d, (v, bound)) in cand.velocity.iter().zip(&bounds).enumerate() {
                        assert!(
                            v.abs() <= bound + VELOCITY_TOL,
                            "adaptive bound violated (t = {}, candidate {i}, dim {d}): \
                             |{v}| > {bound}",
                            state.t
                        );
                    }
                }
            }
        })
        .unwrap();

        assert_eq!(result.trace.len(), config.max_iters);
        for pair in result.trace.windows(2) {
            assert!(pair[1].best_power >= pair[0].best_power);
        }

        // Same seed, fresh engine: the serialized trace is byte-identical.
        let again = run_single(&config, &dataset).unwrap();
        assert_eq!(
            trace_bytes(&result.trace),
            trace_bytes(&again.trace),
            "same seed must reproduce the trace exactly"
        );

        assert!(start.elapsed() < BUDGET, "took {:?}", start.elapsed());
    });
}

#[test]
fn criterion_7_single_objective_quality_band() {
    criterion("7 (single-objective quality)", || {
        const BEST_RMSE_CEILING: f64 = 4.6;
        const BEST_NF_CEILING: usize = 8;
        const MEDIAN_RMSE_CEILING: f64 = 5.0;

        let dataset = synthetic_johnson(42);
        let mut rmses = Vec::new();
        let mut best: Option<(f64, usize)> = None;
        for seed in 1..=5 {
            let config = SearchConfig {
                seed,
                ..SearchConfig::default()
            };
            let result = run_single(&config, &dataset).unwrap();
            let rmse = result.evaluation.metrics.rmse;
            let n_f = result.evaluation.objectives.n_f;
            if best.is_none_or(|(r, _)| rmse < r) {
                best = Some((rmse, n_f));
            }
            rmses.push(rmse);
        }

        rmses.sort_by(f64::total_cmp);
        let (best_rmse, best_nf) = best.unwrap();
        assert!(
            best_rmse <= BEST_RMSE_CEILING,
            "best rmse {best_rmse} over ceiling {BEST_RMSE_CEILING}"
        );
        assert!(
            best_nf <= BEST_NF_CEILING,
            "best run selected {best_nf} features, ceiling {BEST_NF_CEILING}"
        );
        let median = rmses[rmses.len() / 2];
        assert!(
            median <= MEDIAN_RMSE_CEILING,
            "median rmse {median} over ceiling {MEDIAN_RMSE_CEILING}"
        );
    });
}

#[test]
fn criterion_8_multi_objective_archive_structure() {
    criterion("8 (multi-objective archive)", || {
        const MIN_DISTINCT_SUBSET_SIZES: usize = 3;
        const BUDGET: Duration = Duration::from_secs(600);

        let start = Instant::now();
        let dataset = synthetic_johnson(42);
        let n_features = dataset.feature_names.len();
        let mut max_distinct = 0;
        for seed in 1..=5 {
            let config = SearchConfig {
                seed,
                ..SearchConfig::default()
            };
            let capacity = (config.n_imp + config.n_col) / 2;
            let result = run_multi(&config, &dataset).unwrap();
            let front = &result.front;

            assert!(!front.is_empty());
            assert!(
                front.len() <= capacity,
                "seed {seed}: {} entries over capacity {capacity}",
                front.len()
            );
            for entry in front {
                assert!(entry.objectives.rmse >= 0.0);
                assert!((1..=n_features).contains(&entry.objectives.n_f));
            }
            for (i, a) in front.iter().enumerate() {
                for (j, b) in front.iter().enumerate() {
                    if i != j {
                        assert!(
                            !dominates(&a.objectives, &b.objectives),
                            "seed {seed}: entry {i} dominates entry {j}"
                        );
                    }
                }
            }

            let mut sizes: Vec<usize> = front.iter().map(|f| f.objectives.n_f).collect();
            sizes.sort_unstable();
            sizes.dedup();
            max_distinct = max_distinct.max(sizes.len());
        }

        assert!(
            max_distinct >= MIN_DISTINCT_SUBSET_SIZES,
            "best archive spans only {max_distinct} subset sizes"
        );
        assert!(start.elapsed() < BUDGET, "took {:?}", start.elapsed());
    });
}

#[test]
fn criterion_9_spread_deviation_hand_cases() {
    criterion("9 (spread-deviation hand cases)", || {
        const TOL: f64 = 1e-12;
        const OS_PENALTY: f64 = 3.0;
        const DS_PENALTY: f64 = 13.0;

        // A rank with a single member has zero spread deviation.
        assert_eq!(ssd(&[vec![0.3, 0.4]], 0, 0), 0.0);

        // Two members at distance 2: deviation is exactly 2 for both.
        let pair = [vec![0.0, 0.0], vec![2.0, 0.0]];
        assert!((ssd(&pair, 0, 1) - 2.0).abs() < TOL);
        assert!((ssd(&pair, 1, 1) - 2.0).abs() < TOL);

        // Rank penalties: each rank past the first adds exactly the
        // configured amount — 3 (the objective count) in objective space,
        // the variable count in decision space.
        let points = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![5.0, 5.0]];
        let ranks = vec![1, 1, 2];
        let os = ssdr(&points, &ranks, OS_PENALTY);
        assert!((os[0] - 2.0).abs() < TOL);
        assert!((os[1] - 2.0).abs() < TOL);
        assert!((os[2] - OS_PENALTY).abs() < TOL, "singleton second rank");
        let ds = ssdr(&points, &ranks, DS_PENALTY);
        assert!((ds[2] - DS_PENALTY).abs() < TOL);

        // Deeper ranks accumulate linearly.
        let chain = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        let chain_ranks = vec![1, 2, 3];
        let penalised = ssdr(&chain, &chain_ranks, OS_PENALTY);
        assert!((penalised[1] - OS_PENALTY).abs() < TOL);
        assert!((penalised[2] - 2.0 * OS_PENALTY).abs() < TOL);
    });
}
