//! The single-objective FAGLSUD evolutionary loop.
//!
//! A population of candidate subsets is organized into empires (each led by
//! its best member, the imperialist). Three fuzzy-adaptive operators evolve
//! positions, velocities, and masks each iteration — FAGLVA (PSO-like
//! attraction, FIS1-tuned), FAUDVD (cross-learning diversity pulls,
//! FIS2-tuned), FAEDELs (differential local search inside empires,
//! FIS3-tuned) — while FAOS (FIS4) re-sets the three operators' application
//! probabilities every time window from the stagnation status. Elitist
//! personal/global best bookkeeping makes the best-so-far trace monotone.
//!
//! Everything is driven by one sequential RNG stream plus per-evaluation
//! seeds derived from (master seed, iteration, candidate, operator), so a
//! run is fully reproducible from its configuration.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{normalize, split, Dataset, SplitDataset};
use crate::error::{Error, Result};
use crate::fuzzy::{build_fis1, build_fis2, build_fis3, build_fis4, RuleBase};
use crate::mlp::{hidden_size, TrainConfig};
use crate::multi::MoContext;
use crate::objectives::{evaluate_candidate, EvalSettings, Evaluation, ObjectiveVector};

/// Hard velocity box; the AVLF bound is intersected with it.
pub const VELOCITY_LIMIT: f64 = 12.0;

// Operator ids folded into derived evaluation seeds.
const OP_SPLIT: u64 = 1;
const OP_STREAM: u64 = 2;
const OP_INIT: u64 = 3;
const OP_GLVA: u64 = 4;
const OP_UDVD: u64 = 5;
const OP_EDELS_COL: u64 = 6;
const OP_EDELS_IMP: u64 = 7;

/// Derive an independent evaluation seed from the run context. The
/// splitmix64 finalizer scatters structured inputs well enough that
/// per-candidate trainer streams are effectively independent.
fn mix_seed(master: u64, t: u64, candidate: u64, op: u64) -> u64 {
    let mut z = master
        ^ t.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ candidate.wrapping_mul(0xBF58_476D_1CE4_E5B9)
        ^ op.wrapping_mul(0x94D0_49BB_1331_11EB);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// V-shaped transfer function mapping a velocity component to a bit-flip
/// probability: `2·|1/(1+e^(−8u)) − 0.5|`, algebraically `|tanh(4u)|`.
/// Even, zero at zero, strictly increasing in |u|, and capped just below 1
/// so no flip is ever certain.
pub fn transfer(u: f64) -> f64 {
    (4.0 * u).tanh().abs().min(1.0 - f64::EPSILON)
}

/// Per-dimension adaptive velocity limit: `α·|g_d − p_d|/t`, intersected
/// with the global ±12 box. Zero wherever the candidate sits on the global
/// best, and decaying as iterations accumulate.
pub fn avlf_bounds(position: &[f64], global_best: &[f64], t: usize, alpha: f64) -> Vec<f64> {
    assert!(t >= 1, "AVLF bound needs t >= 1");
    position
        .iter()
        .zip(global_best)
        .map(|(p, g)| (alpha * (g - p).abs() / t as f64).min(VELOCITY_LIMIT))
        .collect()
}

/// Stagnation over a window of global-best powers: `1 − (max−min)/max`.
/// 1 means no progress at all; guarded to 1 for degenerate windows.
pub fn stagnation(window: &[f64]) -> f64 {
    let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = window.iter().copied().fold(f64::INFINITY, f64::min);
    if window.is_empty() || max.is_nan() || max <= 0.0 {
        return 1.0;
    }
    1.0 - (max - min) / max
}

/// Roulette-wheel selection with deficit-complement weights: an item's
/// weight is `1 − (max_power − power)/Σ(max_power − power)`. Powers
/// [3, 2, 1] yield selection probabilities [1/2, 1/3, 1/6]; all-equal
/// powers degenerate to a uniform draw.
fn roulette(powers: &[f64], rng: &mut ChaCha8Rng) -> usize {
    assert!(!powers.is_empty(), "roulette over an empty set");
    let max = powers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total_deficit: f64 = powers.iter().map(|p| max - p).sum();
    let weights: Vec<f64> = if total_deficit > 0.0 {
        powers.iter().map(|p| 1.0 - (max - p) / total_deficit).collect()
    } else {
        vec![1.0; powers.len()]
    };
    let total: f64 = weights.iter().sum();
    let mut ball = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        ball -= w;
        if ball <= 0.0 {
            return i;
        }
    }
    powers.len() - 1
}

/// Normalized power gap `|a − b| / global_best_power`, clamped into the
/// unit interval; zero when the global best has no positive power yet.
fn power_gap(a: f64, b: f64, global_best: f64) -> f64 {
    if global_best > 0.0 {
        ((a - b).abs() / global_best).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Index of the lowest-power member of `set`, if any.
fn weakest(state: &SearchState, set: &[usize]) -> Option<usize> {
    set.iter().copied().min_by(|&a, &b| {
        let pa = state.candidates[a].power();
        let pb = state.candidates[b].power();
        pa.partial_cmp(&pb).unwrap()
    })
}

/// Index of the highest-power member of `set`, if any.
fn strongest(state: &SearchState, set: &[usize]) -> Option<usize> {
    set.iter().copied().max_by(|&a, &b| {
        let pa = state.candidates[a].power();
        let pb = state.candidates[b].power();
        pa.partial_cmp(&pb).unwrap()
    })
}

/// A candidate's best experience so far. The objective vector is carried
/// along so the multi-objective loop can re-score old experiences when the
/// population context shifts.
#[derive(Debug, Clone)]
pub struct PersonalBest {
    pub position: Vec<f64>,
    pub mask: Vec<bool>,
    pub power: f64,
    pub objectives: ObjectiveVector,
}

/// One member of the population: continuous position/velocity, the binary
/// mask it currently encodes, its evaluation, and its personal best.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub mask: Vec<bool>,
    pub eval: Evaluation,
    pub best: PersonalBest,
}

impl Candidate {
    pub fn power(&self) -> f64 {
        self.eval.power
    }
}

/// An empire: the index of its imperialist and of its colonies.
#[derive(Debug, Clone)]
pub struct Empire {
    pub imperialist: usize,
    pub colonies: Vec<usize>,
}

/// Best candidate snapshot (the elitist record the trace reports).
#[derive(Debug, Clone)]
pub struct BestSnapshot {
    pub position: Vec<f64>,
    pub mask: Vec<bool>,
    pub eval: Evaluation,
}

/// The three operator application probabilities set by FAOS.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OperatorProbs {
    pub glva: f64,
    pub udvd: f64,
    pub edels: f64,
}

/// Full mutable state of one run.
#[derive(Debug, Clone)]
pub struct SearchState {
    pub candidates: Vec<Candidate>,
    pub empires: Vec<Empire>,
    pub global_best: BestSnapshot,
    pub probs: OperatorProbs,
    pub t: usize,
    /// Global-best powers of the current time window, cleared by FAOS.
    pub window: Vec<f64>,
}

/// Run configuration. Defaults mirror the published desk-scale settings:
/// 5 imperialists + 15 colonies, 100 iterations, time window 10, velocity
/// limit factor α = 10, objective weights β = γ = 0.04, 70/30 split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n_imp: usize,
    pub n_col: usize,
    pub max_iters: usize,
    pub tw: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub split_ratio: f64,
    pub seed: u64,
    /// Hidden-size adjustment constant c; `None` picks 8.5 for 41-feature
    /// data and 6.0 otherwise, matching the published layer widths.
    pub hidden_adjustment: Option<f64>,
    pub train: TrainConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_imp: 5,
            n_col: 15,
            max_iters: 100,
            tw: 10,
            alpha: 10.0,
            beta: 0.04,
            gamma: 0.04,
            split_ratio: 0.7,
            seed: 0,
            hidden_adjustment: None,
            train: TrainConfig::default(),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_imp < 1 {
            return Err(Error::Config("need at least one imperialist".into()));
        }
        if self.n_col < self.n_imp {
            return Err(Error::Config(format!(
                "need at least as many colonies as imperialists ({} < {})",
                self.n_col, self.n_imp
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::Config("need at least one iteration".into()));
        }
        if self.tw < 1 {
            return Err(Error::Config("time window must be at least 1".into()));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::Config(format!(
                "split ratio must be in (0, 1), got {}",
                self.split_ratio
            )));
        }
        self.train.validate()
    }

    fn hidden_for(&self, n_x: usize) -> usize {
        let c = self
            .hidden_adjustment
            .unwrap_or(if n_x == 41 { 8.5 } else { 6.0 });
        hidden_size(n_x, 1, c)
    }
}

/// One per-iteration trace record (serialized to the convergence CSV).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub best_power: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    pub rmse: f64,
    pub std: f64,
    pub n_f: usize,
    pub p_glva: f64,
    pub p_udvd: f64,
    pub p_edels: f64,
}

/// Final artifact of a single-objective run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub seed: u64,
    pub best_mask: Vec<bool>,
    pub selected_features: Vec<String>,
    pub evaluation: Evaluation,
    pub trace: Vec<TraceRow>,
}

/// Rank candidate indices into empires: the top `n_imp` by power lead,
/// every other candidate joins an empire by power-weighted roulette, and a
/// round-robin repair guarantees each empire at least one colony.
pub fn form_empires(powers: &[f64], n_imp: usize, rng: &mut ChaCha8Rng) -> Vec<Empire> {
    assert!(
        n_imp >= 1 && powers.len() >= 2 * n_imp,
        "need at least one colony per imperialist"
    );
    let mut order: Vec<usize> = (0..powers.len()).collect();
    order.sort_by(|&a, &b| powers[b].partial_cmp(&powers[a]).unwrap().then(a.cmp(&b)));

    let mut empires: Vec<Empire> = order[..n_imp]
        .iter()
        .map(|&i| Empire {
            imperialist: i,
            colonies: Vec::new(),
        })
        .collect();
    let imp_powers: Vec<f64> = empires.iter().map(|e| powers[e.imperialist]).collect();

    for &i in &order[n_imp..] {
        let e = roulette(&imp_powers, rng);
        empires[e].colonies.push(i);
    }

    // Repair: move colonies from the fullest empires into empty ones.
    while let Some(empty) = empires.iter().position(|e| e.colonies.is_empty()) {
        let donor = (0..empires.len())
            .max_by_key(|&i| empires[i].colonies.len())
            .expect("at least one empire");
        if empires[donor].colonies.len() <= 1 {
            break; // nothing left to move; only possible when n_col < n_imp
        }
        let moved = empires[donor].colonies.pop().expect("donor has colonies");
        empires[empty].colonies.push(moved);
    }
    empires
}

/// The operator engine: compiled rule bases, the prepared dataset, the
/// evaluation settings, and the run's sequential RNG stream.
pub struct Engine {
    config: SearchConfig,
    data: SplitDataset,
    settings: EvalSettings,
    fis1: RuleBase,
    fis2: RuleBase,
    fis3: RuleBase,
    fis4: RuleBase,
    rng: ChaCha8Rng,
    /// When set, freshly evaluated candidates are scored by insertion into
    /// this ranking context instead of keeping the scalar power.
    mo_context: Option<MoContext>,
}

impl Engine {
    /// Build an engine over an already split-and-normalized dataset.
    pub fn new(config: SearchConfig, data: SplitDataset) -> Result<Self> {
        config.validate()?;
        let n_x = data.train.n_features();
        let mut settings = EvalSettings::new(config.hidden_for(n_x));
        settings.train = config.train.clone();
        settings.beta = config.beta;
        settings.gamma = config.gamma;
        let rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, 0, 0, OP_STREAM));
        Ok(Self {
            config,
            data,
            settings,
            fis1: build_fis1(),
            fis2: build_fis2(),
            fis3: build_fis3(),
            fis4: build_fis4(),
            rng,
            mo_context: None,
        })
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    /// Install (or clear) the multi-objective scoring context used for
    /// mid-iteration insertion scoring.
    pub fn set_mo_context(&mut self, context: Option<MoContext>) {
        self.mo_context = context;
    }

    /// Re-rank candidates into fresh empires from their current powers —
    /// used once by the multi-objective loop after its first re-scoring.
    pub fn reform_empires(&mut self, state: &mut SearchState) {
        let powers: Vec<f64> = state.candidates.iter().map(Candidate::power).collect();
        state.empires = form_empires(&powers, self.config.n_imp, &mut self.rng);
    }

    fn dim(&self) -> usize {
        self.data.train.n_features()
    }

    fn nit(&self, t: usize) -> f64 {
        t as f64 / self.config.max_iters as f64
    }

    fn evaluate(&self, mask: &[bool], t: usize, candidate: u64, op: u64) -> Result<Evaluation> {
        let seed = mix_seed(self.config.seed, t as u64, candidate, op);
        evaluate_candidate(mask, &self.data, &self.settings.with_seed(seed))
    }

    /// Seeded population: uniform positions, zero velocities, masks from a
    /// 0.5 position threshold (randomly repaired if empty), everything
    /// evaluated, empires formed, probabilities at the neutral 0.5.
    pub fn initialize(&mut self) -> Result<SearchState> {
        let d = self.dim();
        let n = self.config.n_imp + self.config.n_col;
        let mut candidates = Vec::with_capacity(n);
        for idx in 0..n {
            let position: Vec<f64> = (0..d).map(|_| self.rng.gen_range(0.0..=1.0)).collect();
            let mut mask: Vec<bool> = position.iter().map(|&p| p >= 0.5).collect();
            if !mask.iter().any(|&b| b) {
                mask[self.rng.gen_range(0..d)] = true;
            }
            let eval = self.evaluate(&mask, 0, idx as u64, OP_INIT)?;
            let best = PersonalBest {
                position: position.clone(),
                mask: mask.clone(),
                power: eval.power,
                objectives: eval.objectives,
            };
            candidates.push(Candidate {
                position,
                velocity: vec![0.0; d],
                mask,
                eval,
                best,
            });
        }

        let powers: Vec<f64> = candidates.iter().map(Candidate::power).collect();
        let empires = form_empires(&powers, self.config.n_imp, &mut self.rng);
        let best_idx = (0..n)
            .max_by(|&a, &b| powers[a].partial_cmp(&powers[b]).unwrap())
            .expect("non-empty population");
        let global_best = BestSnapshot {
            position: candidates[best_idx].position.clone(),
            mask: candidates[best_idx].mask.clone(),
            eval: candidates[best_idx].eval.clone(),
        };

        Ok(SearchState {
            candidates,
            empires,
            global_best,
            probs: OperatorProbs {
                glva: 0.5,
                udvd: 0.5,
                edels: 0.5,
            },
            t: 0,
            window: Vec::new(),
        })
    }

    /// Status indicators for a colony paired with its imperialist:
    /// (NP1..NP4), each |power difference| / global best power in [0,1].
    fn colony_nps(&self, state: &SearchState, colony: usize, imp: usize) -> [f64; 4] {
        let gb = state.global_best.eval.power;
        let c = &state.candidates[colony];
        let i = &state.candidates[imp];
        [
            power_gap(i.power(), c.power(), gb),
            power_gap(c.best.power, c.power(), gb),
            power_gap(gb, i.power(), gb),
            power_gap(i.best.power, i.power(), gb),
        ]
    }

    /// Imperialist-side indicators: empire-mean NP1/NP2 over its colonies,
    /// own NP3/NP4.
    fn imperialist_nps(&self, state: &SearchState, empire: &Empire) -> [f64; 4] {
        let mut np1 = 0.0;
        let mut np2 = 0.0;
        for &c in &empire.colonies {
            let nps = self.colony_nps(state, c, empire.imperialist);
            np1 += nps[0];
            np2 += nps[1];
        }
        let n = empire.colonies.len().max(1) as f64;
        let own = self.colony_nps(state, empire.imperialist, empire.imperialist);
        [np1 / n, np2 / n, own[2], own[3]]
    }

    fn infer4(
        &self,
        fis: &RuleBase,
        nps: [f64; 4],
        names: [&str; 4],
        nit: f64,
    ) -> Result<Vec<f64>> {
        let crisp = [
            (names[0], nps[0]),
            (names[1], nps[1]),
            (names[2], nps[2]),
            (names[3], nps[3]),
            ("nit", nit),
        ];
        Ok(fis.infer(&crisp)?.into_iter().map(|(_, v)| v).collect())
    }

    /// Clip a proposed velocity to the AVLF bounds, advance the position
    /// with boundary reflection, flip mask bits through the transfer
    /// function, repair an emptied mask, and re-evaluate iff the mask
    /// changed. Personal and global bests are refreshed on improvement.
    fn apply_move(
        &mut self,
        state: &mut SearchState,
        idx: usize,
        velocity: Vec<f64>,
        op: u64,
    ) -> Result<()> {
        let t = state.t;
        let bounds = avlf_bounds(
            &state.candidates[idx].position,
            &state.global_best.position,
            t,
            self.config.alpha,
        );
        let cand = &mut state.candidates[idx];
        let mut velocity: Vec<f64> = velocity
            .into_iter()
            .zip(&bounds)
            .map(|(v, b)| v.clamp(-b, *b))
            .collect();

        for (d, v) in velocity.iter_mut().enumerate() {
            let p = cand.position[d] + *v;
            if p > 1.0 {
                cand.position[d] = 1.0;
                *v = -*v;
            } else if p < 0.0 {
                cand.position[d] = 0.0;
                *v = -*v;
            } else {
                cand.position[d] = p;
            }
        }

        let mut mask = cand.mask.clone();
        for (d, &v) in velocity.iter().enumerate() {
            if self.rng.gen::<f64>() < transfer(v) {
                mask[d] = !mask[d];
            }
        }
        if !mask.iter().any(|&b| b) {
            let keep = (0..mask.len())
                .max_by(|&a, &b| velocity[a].abs().partial_cmp(&velocity[b].abs()).unwrap())
                .expect("non-empty mask vector");
            mask[keep] = true;
        }

        cand.velocity = velocity;
        if mask != cand.mask {
            let mut eval = self.evaluate(&mask, t, idx as u64, op)?;
            if let Some(ctx) = &self.mo_context {
                eval.power = ctx.score(&eval.objectives, &state.candidates[idx].position);
            }
            let cand = &mut state.candidates[idx];
            cand.mask = mask;
            cand.eval = eval;
            self.refresh_bests(state, idx);
        }
        Ok(())
    }

    fn refresh_bests(&self, state: &mut SearchState, idx: usize) {
        let cand = &mut state.candidates[idx];
        if cand.eval.power > cand.best.power {
            cand.best = PersonalBest {
                position: cand.position.clone(),
                mask: cand.mask.clone(),
                power: cand.eval.power,
                objectives: cand.eval.objectives,
            };
            if cand.eval.power > state.global_best.eval.power {
                state.global_best = BestSnapshot {
                    position: cand.position.clone(),
                    mask: cand.mask.clone(),
                    eval: cand.eval.clone(),
                };
            }
        }
    }

    /// FAGLVA: velocity re-derived from attraction toward the leader and
    /// the personal best, with FIS1-tuned coefficients. Colonies follow
    /// their imperialist (β₁, c₁); imperialists follow the global best
    /// (β₂, c₂). Applied per candidate with probability PFAGLVA.
    pub fn faglva_step(&mut self, state: &mut SearchState) -> Result<()> {
        let nit = self.nit(state.t);
        let empires = state.empires.clone();
        for empire in &empires {
            for &ci in &empire.colonies {
                if self.rng.gen::<f64>() > state.probs.glva {
                    continue;
                }
                let nps = self.colony_nps(state, ci, empire.imperialist);
                let out = self.infer4(&self.fis1, nps, ["np1", "np2", "np3", "np4"], nit)?;
                let (beta1, c1) = (out[0], out[1]);
                let r1 = self.rng.gen::<f64>();
                let r2 = self.rng.gen::<f64>();
                let leader = state.candidates[empire.imperialist].position.clone();
                let cand = &state.candidates[ci];
                let velocity: Vec<f64> = (0..self.dim())
                    .map(|d| {
                        beta1 * r1 * (leader[d] - cand.position[d])
                            + c1 * r2 * (cand.best.position[d] - cand.position[d])
                    })
                    .collect();
                self.apply_move(state, ci, velocity, OP_GLVA)?;
            }

            if self.rng.gen::<f64>() > state.probs.glva {
                continue;
            }
            let nps = self.imperialist_nps(state, empire);
            let out = self.infer4(&self.fis1, nps, ["np1", "np2", "np3", "np4"], nit)?;
            let (beta2, c2) = (out[2], out[3]);
            let r1 = self.rng.gen::<f64>();
            let r2 = self.rng.gen::<f64>();
            let leader = state.global_best.position.clone();
            let cand = &state.candidates[empire.imperialist];
            let velocity: Vec<f64> = (0..self.dim())
                .map(|d| {
                    beta2 * r1 * (leader[d] - cand.position[d])
                        + c2 * r2 * (cand.best.position[d] - cand.position[d])
                })
                .collect();
            self.apply_move(state, empire.imperialist, velocity, OP_GLVA)?;
        }
        Ok(())
    }

    /// FAUDVD: inertia-weighted pull toward the personal best of a
    /// roulette-selected peer — colonies learn from a sibling colony (ω₁),
    /// imperialists from another imperialist (ω₂), and the strongest
    /// imperialist from any imperialist (ω₃). Applied with probability
    /// PFAUDVD.
    pub fn faudvd_step(&mut self, state: &mut SearchState) -> Result<()> {
        let nit = self.nit(state.t);
        let empires = state.empires.clone();

        for empire in &empires {
            for &ci in &empire.colonies {
                if self.rng.gen::<f64>() > state.probs.udvd {
                    continue;
                }
                let donors: Vec<usize> = empire
                    .colonies
                    .iter()
                    .copied()
                    .filter(|&c| c != ci)
                    .collect();
                if donors.is_empty() {
                    continue; // lone colony: no peer to learn from
                }
                let donor_powers: Vec<f64> =
                    donors.iter().map(|&i| state.candidates[i].power()).collect();
                let donor = donors[roulette(&donor_powers, &mut self.rng)];

                let nps = self.colony_nps(state, ci, empire.imperialist);
                let out = self.infer4(&self.fis2, nps, ["np1", "np2", "np3", "np4"], nit)?;
                let w1 = out[0];
                let r = self.rng.gen::<f64>();
                let target = state.candidates[donor].best.position.clone();
                let cand = &state.candidates[ci];
                let velocity: Vec<f64> = (0..self.dim())
                    .map(|d| w1 * (cand.velocity[d] + r * (target[d] - cand.position[d])))
                    .collect();
                self.apply_move(state, ci, velocity, OP_UDVD)?;
            }
        }

        let imps: Vec<usize> = empires.iter().map(|e| e.imperialist).collect();
        if imps.len() < 2 {
            return Ok(()); // a single imperialist has no peer
        }
        let leader = strongest(state, &imps).expect("at least two imperialists");

        for empire in &empires {
            let j = empire.imperialist;
            if self.rng.gen::<f64>() > state.probs.udvd {
                continue;
            }
            let pool: Vec<usize> = if j == leader {
                imps.clone()
            } else {
                imps.iter().copied().filter(|&k| k != j).collect()
            };
            let pool_powers: Vec<f64> = pool.iter().map(|&i| state.candidates[i].power()).collect();
            let donor = pool[roulette(&pool_powers, &mut self.rng)];

            let nps = self.imperialist_nps(state, empire);
            let out = self.infer4(&self.fis2, nps, ["np1", "np2", "np3", "np4"], nit)?;
            let w = if j == leader { out[2] } else { out[1] };
            let r = self.rng.gen::<f64>();
            let target = state.candidates[donor].best.position.clone();
            let cand = &state.candidates[j];
            let velocity: Vec<f64> = (0..self.dim())
                .map(|d| w * (cand.velocity[d] + r * (target[d] - cand.position[d])))
                .collect();
            self.apply_move(state, j, velocity, OP_UDVD)?;
        }
        Ok(())
    }

    /// FAEDELs: differential mutation/crossover/greedy-selection. Per
    /// empire, a colony trial is built from three distinct non-worst
    /// colonies (scale factors F₁..F₃, attraction to the imperialist,
    /// repulsion from the worst colony); an imperialist trial analogously
    /// from three distinct non-worst imperialists (F₄..F₆, attraction to
    /// the global best, repulsion from the worst imperialist). The trial
    /// replaces its base (the third pick) iff strictly fitter. Branches
    /// without enough distinct members are skipped.
    pub fn faedels_step(&mut self, state: &mut SearchState) -> Result<()> {
        let nit = self.nit(state.t);
        let d = self.dim();
        let empires = state.empires.clone();
        let imps: Vec<usize> = empires.iter().map(|e| e.imperialist).collect();

        for empire in &empires {
            // Colony branch. Extremes are recomputed per branch because a
            // replacement in one branch shifts the power landscape.
            if self.rng.gen::<f64>() <= state.probs.edels {
                let worst = weakest(state, &empire.colonies)
                    .expect("empires keep at least one colony");
                let worst_imp = weakest(state, &imps).expect("at least one imperialist");
                let pool: Vec<usize> = empire
                    .colonies
                    .iter()
                    .copied()
                    .filter(|&c| c != worst)
                    .collect();
                if pool.len() >= 3 {
                    let picks = sample(&mut self.rng, pool.len(), 3);
                    let (r1, r2, base) =
                        (pool[picks.index(0)], pool[picks.index(1)], pool[picks.index(2)]);
                    let imp = empire.imperialist;
                    let gb = state.global_best.eval.power;
                    let power = |i: usize| state.candidates[i].power();
                    let nps = [
                        power_gap(power(imp), power(base), gb),
                        power_gap(power(base), power(worst), gb),
                        power_gap(gb, power(imp), gb),
                        power_gap(power(imp), power(worst_imp), gb),
                    ];
                    let f = self.infer4(&self.fis3, nps, ["np5", "np6", "np7", "np8"], nit)?;
                    let mutant: Vec<f64> = (0..d)
                        .map(|dd| {
                            let p = |i: usize| state.candidates[i].position[dd];
                            f[0] * (p(r1) - p(r2))
                                + f[1] * (p(imp) - p(base))
                                + f[2] * (p(base) - p(worst))
                        })
                        .collect();
                    self.try_trial(state, base, mutant, OP_EDELS_COL)?;
                }
            }

            // Imperialist branch (triple sampled across all imperialists).
            if self.rng.gen::<f64>() <= state.probs.edels {
                let worst_imp = weakest(state, &imps).expect("at least one imperialist");
                let pool: Vec<usize> = imps.iter().copied().filter(|&i| i != worst_imp).collect();
                if pool.len() >= 3 {
                    let picks = sample(&mut self.rng, pool.len(), 3);
                    let (r1, r2, base) =
                        (pool[picks.index(0)], pool[picks.index(1)], pool[picks.index(2)]);
                    let worst_col = weakest(state, &empire.colonies)
                        .expect("empires keep at least one colony");
                    let anchor = strongest(state, &empire.colonies)
                        .expect("empires keep at least one colony");
                    let gb = state.global_best.eval.power;
                    let power = |i: usize| state.candidates[i].power();
                    let nps = [
                        power_gap(power(empire.imperialist), power(anchor), gb),
                        power_gap(power(anchor), power(worst_col), gb),
                        power_gap(gb, power(base), gb),
                        power_gap(power(base), power(worst_imp), gb),
                    ];
                    let f = self.infer4(&self.fis3, nps, ["np5", "np6", "np7", "np8"], nit)?;
                    let gbest = state.global_best.position.clone();
                    let mutant: Vec<f64> = (0..d)
                        .map(|dd| {
                            let p = |i: usize| state.candidates[i].position[dd];
                            f[3] * (p(r1) - p(r2))
                                + f[4] * (gbest[dd] - p(base))
                                + f[5] * (p(base) - p(worst_imp))
                        })
                        .collect();
                    self.try_trial(state, base, mutant, OP_EDELS_IMP)?;
                }
            }
        }
        Ok(())
    }

    /// Binomial crossover of a mutant velocity against the base's current
    /// velocity (one dimension guaranteed to come from the mutant), then
    /// trial position/mask construction and greedy replacement.
    fn try_trial(
        &mut self,
        state: &mut SearchState,
        base: usize,
        mutant: Vec<f64>,
        op: u64,
    ) -> Result<()> {
        let d = self.dim();
        let forced = self.rng.gen_range(0..d);
        let base_velocity = state.candidates[base].velocity.clone();
        let trial_v: Vec<f64> = (0..d)
            .map(|dd| {
                if dd == forced || self.rng.gen::<f64>() <= state.probs.edels {
                    mutant[dd]
                } else {
                    base_velocity[dd]
                }
            })
            .collect();

        let trial_p: Vec<f64> = state.candidates[base]
            .position
            .iter()
            .zip(&trial_v)
            .map(|(p, v)| (p + v).clamp(0.0, 1.0))
            .collect();

        let mut trial_mask = state.candidates[base].mask.clone();
        for (dd, &v) in trial_v.iter().enumerate() {
            if self.rng.gen::<f64>() < transfer(v) {
                trial_mask[dd] = !trial_mask[dd];
            }
        }
        if !trial_mask.iter().any(|&b| b) {
            let keep = (0..d)
                .max_by(|&a, &b| trial_v[a].abs().partial_cmp(&trial_v[b].abs()).unwrap())
                .expect("non-empty mask vector");
            trial_mask[keep] = true;
        }

        // An identical mask carries no new information; the greedy rule
        // cannot improve on a tie, so skip the evaluation.
        if trial_mask == state.candidates[base].mask {
            return Ok(());
        }
        let mut eval = self.evaluate(&trial_mask, state.t, base as u64, op)?;
        if let Some(ctx) = &self.mo_context {
            eval.power = ctx.score(&eval.objectives, &trial_p);
        }
        if eval.power > state.candidates[base].power() {
            let cand = &mut state.candidates[base];
            cand.position = trial_p;
            cand.velocity = trial_v
                .into_iter()
                .map(|v| v.clamp(-VELOCITY_LIMIT, VELOCITY_LIMIT))
                .collect();
            cand.mask = trial_mask;
            cand.eval = eval;
            self.refresh_bests(state, base);
        }
        Ok(())
    }

    /// Promote any colony that outgrew its imperialist (at most one swap
    /// per empire per iteration — the strongest colony).
    pub fn swap_pass(&self, state: &mut SearchState) {
        for empire in &mut state.empires {
            let Some(slot) = (0..empire.colonies.len()).max_by(|&a, &b| {
                let pa = state.candidates[empire.colonies[a]].power();
                let pb = state.candidates[empire.colonies[b]].power();
                pa.partial_cmp(&pb).unwrap()
            }) else {
                continue;
            };
            let best_colony = empire.colonies[slot];
            if state.candidates[best_colony].power() > state.candidates[empire.imperialist].power()
            {
                empire.colonies[slot] = empire.imperialist;
                empire.imperialist = best_colony;
            }
        }
    }

    /// End-of-iteration clamp: every velocity is brought inside the AVLF
    /// bound computed at the candidate's current position, so the bound
    /// invariant holds for gated-out candidates too.
    pub fn enforce_velocity_bounds(&self, state: &mut SearchState) {
        let gbest = state.global_best.position.clone();
        let t = state.t;
        for cand in &mut state.candidates {
            let bounds = avlf_bounds(&cand.position, &gbest, t, self.config.alpha);
            for (v, b) in cand.velocity.iter_mut().zip(&bounds) {
                *v = v.clamp(-*b, *b);
            }
        }
    }

    /// FAOS: infer fresh operator probabilities from the stagnation of the
    /// elapsed window, the current probabilities, and NIT; then clear the
    /// window.
    pub fn faos_update(&mut self, state: &mut SearchState) -> Result<()> {
        let stag = stagnation(&state.window);
        let out = self.fis4.infer(&[
            ("stagnation", stag),
            ("p_glva", state.probs.glva),
            ("p_udvd", state.probs.udvd),
            ("p_edels", state.probs.edels),
            ("nit", self.nit(state.t)),
        ])?;
        state.probs = OperatorProbs {
            glva: out[0].1.clamp(0.0, 1.0),
            udvd: out[1].1.clamp(0.0, 1.0),
            edels: out[2].1.clamp(0.0, 1.0),
        };
        state.window.clear();
        Ok(())
    }

    /// One full iteration: the three operators in order, the swap pass,
    /// the velocity-bound clamp, window bookkeeping, and (every tw
    /// iterations) the FAOS probability update.
    pub fn iterate(&mut self, state: &mut SearchState) -> Result<TraceRow> {
        state.t += 1;
        self.faglva_step(state)?;
        self.faudvd_step(state)?;
        self.faedels_step(state)?;
        self.swap_pass(state);
        self.enforce_velocity_bounds(state);

        state.window.push(state.global_best.eval.power);
        if state.t.is_multiple_of(self.config.tw) && state.window.len() >= self.config.tw {
            self.faos_update(state)?;
        }

        let best = &state.global_best.eval;
        Ok(TraceRow {
            iter: state.t,
            best_power: best.power,
            z: best.z,
            rmse: best.metrics.rmse,
            std: best.metrics.std,
            n_f: best.objectives.n_f,
            p_glva: state.probs.glva,
            p_udvd: state.probs.udvd,
            p_edels: state.probs.edels,
        })
    }
}

/// Seeded train/test split plus train-statistics standardization — the
/// preparation both run modes share, keyed off the run seed.
pub fn prepare_data(config: &SearchConfig, dataset: &Dataset) -> Result<SplitDataset> {
    Ok(normalize(&split(
        dataset,
        config.split_ratio,
        mix_seed(config.seed, 0, 0, OP_SPLIT),
    )?))
}

/// Run the full single-objective search on a raw dataset: seeded split +
/// standardization, engine setup, `max_iters` iterations, and the final
/// global best with its convergence trace.
pub fn run_single(config: &SearchConfig, dataset: &Dataset) -> Result<RunResult> {
    run_single_observed(config, dataset, |_| {})
}

/// As [`run_single`], invoking `observer` after initialization and after
/// every iteration — the hook used by invariant checks.
pub fn run_single_observed(
    config: &SearchConfig,
    dataset: &Dataset,
    mut observer: impl FnMut(&SearchState),
) -> Result<RunResult> {
    config.validate()?;
    let prepared = prepare_data(config, dataset)?;
    let mut engine = Engine::new(config.clone(), prepared)?;
    let mut state = engine.initialize()?;
    observer(&state);

    let mut trace = Vec::with_capacity(config.max_iters);
    for _ in 0..config.max_iters {
        trace.push(engine.iterate(&mut state)?);
        observer(&state);
    }

    let best = state.global_best;
    let selected_features = dataset
        .feature_names
        .iter()
        .zip(&best.mask)
        .filter(|(_, &m)| m)
        .map(|(n, _)| n.clone())
        .collect();
    Ok(RunResult {
        seed: config.seed,
        best_mask: best.mask,
        selected_features,
        evaluation: best.eval,
        trace,
    })
}
