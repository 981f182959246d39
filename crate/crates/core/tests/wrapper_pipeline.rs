//! End-to-end wrapper checks on the synthetic 13-feature dataset: the
//! informative subset must score near the generator's noise floor, and the
//! evaluation pipeline must stay deterministic through the full
//! load → split → normalize → project → train → score chain.

use faglsud::data::{normalize, split};
use faglsud::mlp::hidden_size;
use faglsud::objectives::{evaluate_candidate, EvalSettings};
use faglsud::synth::synthetic_johnson;

/// The five columns the generator's target actually depends on:
/// age, height, abdomen, hip, wrist.
fn informative_mask() -> [bool; 13] {
    let mut mask = [false; 13];
    for i in [0, 2, 5, 6, 12] {
        mask[i] = true;
    }
    mask
}

#[test]
fn informative_subset_scores_near_the_noise_floor() {
    let data = synthetic_johnson(11);
    let prepared = normalize(&split(&data, 0.7, 11).unwrap());
    let settings = EvalSettings::new(hidden_size(13, 1, 6.0));

    let eval = evaluate_candidate(&informative_mask(), &prepared, &settings).unwrap();
    assert_eq!(eval.objectives.n_f, 5);
    assert!(
        eval.metrics.rmse < 4.3,
        "informative subset should be learnable: test RMSE {}",
        eval.metrics.rmse
    );
    assert!(eval.metrics.rmse > 3.0, "cannot beat the noise floor: {}", eval.metrics.rmse);
}

#[test]
fn full_mask_also_fits_but_scores_a_larger_subset_penalty() {
    let data = synthetic_johnson(11);
    let prepared = normalize(&split(&data, 0.7, 11).unwrap());
    let settings = EvalSettings::new(hidden_size(13, 1, 6.0));

    let five = evaluate_candidate(&informative_mask(), &prepared, &settings).unwrap();
    let all = evaluate_candidate(&[true; 13], &prepared, &settings).unwrap();
    assert!(all.metrics.rmse < 5.5, "full mask RMSE {}", all.metrics.rmse);
    // Equal-accuracy subsets: the smaller one must win on Z.
    assert!(
        five.z < all.z,
        "5-feature Z {} should beat 13-feature Z {}",
        five.z,
        all.z
    );
}

#[test]
fn single_distractor_column_is_clearly_worse() {
    let data = synthetic_johnson(11);
    let prepared = normalize(&split(&data, 0.7, 11).unwrap());
    let settings = EvalSettings::new(hidden_size(13, 1, 6.0));

    let mut ankle_only = [false; 13];
    ankle_only[9] = true;
    let weak = evaluate_candidate(&ankle_only, &prepared, &settings).unwrap();
    let strong = evaluate_candidate(&informative_mask(), &prepared, &settings).unwrap();
    assert!(
        weak.metrics.rmse > strong.metrics.rmse + 1.0,
        "ankle-only RMSE {} vs informative {}",
        weak.metrics.rmse,
        strong.metrics.rmse
    );
}
