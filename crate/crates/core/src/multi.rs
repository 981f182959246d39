//! Multi-objective extension: Pareto domination over (n_f, RMSE, STD),
//! non-dominated sorting, the SSDR diversity-aware fitness that replaces
//! the scalar power, and a bounded archive of the first front.
//!
//! The evolutionary loop itself is reused from [`crate::search`]; this
//! module re-scores every candidate each iteration — rank from
//! non-dominated sorting, then a sum-of-scaled-distances (SSD) crowding
//! measure in both objective space (min-max normalized objectives) and
//! decision space (continuous positions), each inflated by a rank penalty
//! — and maintains the archive the run ultimately reports.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::Result;
use crate::objectives::ObjectiveVector;
use crate::search::{BestSnapshot, Engine, PersonalBest, SearchConfig, SearchState};

/// Number of objectives — the rank-penalty unit in objective space.
pub const OBJECTIVE_COUNT: f64 = 3.0;
/// Guard for zero pairwise distances and zero SSDR sums.
pub const DISTANCE_EPSILON: f64 = 1e-12;

fn objective_coords(o: &ObjectiveVector) -> [f64; 3] {
    [o.n_f as f64, o.rmse, o.std]
}

/// Pareto domination under minimization of all three objectives: `a`
/// dominates `b` iff it is no worse everywhere and strictly better
/// somewhere.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    let av = objective_coords(a);
    let bv = objective_coords(b);
    let no_worse = av.iter().zip(&bv).all(|(x, y)| x <= y);
    let better = av.iter().zip(&bv).any(|(x, y)| x < y);
    no_worse && better
}

/// Non-dominated sorting: rank 1 is the non-dominated set, and peeling it
/// away exposes rank 2, and so on. Returns one 1-based rank per vector.
pub fn nondominated_sort(objectives: &[ObjectiveVector]) -> Vec<usize> {
    let n = objectives.len();
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut dominator_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&objectives[i], &objectives[j]) {
                dominated[i].push(j);
                dominator_count[j] += 1;
            } else if dominates(&objectives[j], &objectives[i]) {
                dominated[j].push(i);
                dominator_count[i] += 1;
            }
        }
    }

    let mut ranks = vec![0usize; n];
    let mut front: Vec<usize> = (0..n).filter(|&i| dominator_count[i] == 0).collect();
    let mut rank = 1;
    while !front.is_empty() {
        let mut next = Vec::new();
        for &i in &front {
            ranks[i] = rank;
            for &j in &dominated[i] {
                dominator_count[j] -= 1;
                if dominator_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        front = next;
        rank += 1;
    }
    ranks
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Sum of scaled distances for point `i` within one rank: with D the
/// pairwise distances of the rank and range = D_max − D_min,
/// `SSD_i = √( μ_i + Σ over the k nearest neighbours of range/D_ij )`
/// where `μ_i = (1/(n−1)) Σ_{j≠i} (D_ij − range)²`. A singleton rank
/// scores 0; zero distances are guarded by ε.
pub fn ssd(points: &[Vec<f64>], i: usize, k: usize) -> f64 {
    let n = points.len();
    assert!(i < n, "ssd index out of range");
    if n <= 1 {
        return 0.0;
    }

    let mut d_max = f64::NEG_INFINITY;
    let mut d_min = f64::INFINITY;
    for a in 0..n {
        for b in (a + 1)..n {
            let d = euclidean(&points[a], &points[b]);
            d_max = d_max.max(d);
            d_min = d_min.min(d);
        }
    }
    let range = d_max - d_min;

    let mut to_others: Vec<f64> = (0..n)
        .filter(|&j| j != i)
        .map(|j| euclidean(&points[i], &points[j]))
        .collect();
    let mu = to_others
        .iter()
        .map(|d| (d - range) * (d - range))
        .sum::<f64>()
        / (n - 1) as f64;

    to_others.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let neighbours: f64 = to_others
        .iter()
        .take(k)
        .map(|d| range / d.max(DISTANCE_EPSILON))
        .sum();

    (mu + neighbours).sqrt()
}

/// Per-point SSDR: the SSD within the point's own rank plus the rank
/// penalty `(rank − 1) · penalty_per_rank` (the objective count in
/// objective space, the variable count in decision space). Neighbour
/// count is `min(3, rank size − 1)`.
pub fn ssdr(points: &[Vec<f64>], ranks: &[usize], penalty_per_rank: f64) -> Vec<f64> {
    assert_eq!(points.len(), ranks.len(), "one rank per point");
    let n = points.len();
    let mut out = vec![0.0; n];
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    for rank in 1..=max_rank {
        let members: Vec<usize> = (0..n).filter(|&i| ranks[i] == rank).collect();
        if members.is_empty() {
            continue;
        }
        let group: Vec<Vec<f64>> = members.iter().map(|&i| points[i].clone()).collect();
        let k = (members.len() - 1).min(3);
        let penalty = (rank - 1) as f64 * penalty_per_rank;
        for (local, &global) in members.iter().enumerate() {
            out[global] = ssd(&group, local, k) + penalty;
        }
    }
    out
}

/// Diversity-aware power: the reciprocal of the two SSDR values' sum,
/// guarded so two perfectly isolated rank-1 scores don't divide by zero.
pub fn mo_power(ssdr_os: f64, ssdr_ds: f64) -> f64 {
    1.0 / (ssdr_os + ssdr_ds).max(DISTANCE_EPSILON)
}

/// Min-max normalize objective vectors over the given set; a collapsed
/// objective (max = min) maps to 0. Returns the coordinates plus bounds.
fn normalize_objectives(objectives: &[ObjectiveVector]) -> (Vec<Vec<f64>>, [f64; 3], [f64; 3]) {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for o in objectives {
        for (d, v) in objective_coords(o).into_iter().enumerate() {
            lo[d] = lo[d].min(v);
            hi[d] = hi[d].max(v);
        }
    }
    let scale = move |o: &ObjectiveVector| -> Vec<f64> {
        objective_coords(o)
            .into_iter()
            .enumerate()
            .map(|(d, v)| {
                if hi[d] > lo[d] {
                    (v - lo[d]) / (hi[d] - lo[d])
                } else {
                    0.0
                }
            })
            .collect()
    };
    let coords = objectives.iter().map(scale).collect();
    (coords, lo, hi)
}

/// A frozen per-iteration ranking context: the population snapshot, its
/// fronts, and the normalization bounds. Mid-iteration evaluations are
/// scored by inserting the new point into this context, so powers stay
/// comparable until the next full re-scoring.
#[derive(Debug, Clone)]
pub struct MoContext {
    objectives: Vec<ObjectiveVector>,
    normalized: Vec<Vec<f64>>,
    positions: Vec<Vec<f64>>,
    ranks: Vec<usize>,
    lo: [f64; 3],
    hi: [f64; 3],
    n_var: f64,
}

impl MoContext {
    /// Rank the snapshot and compute every member's diversity-aware power.
    pub fn build(
        objectives: Vec<ObjectiveVector>,
        positions: Vec<Vec<f64>>,
    ) -> (Self, Vec<f64>) {
        assert_eq!(objectives.len(), positions.len());
        let ranks = nondominated_sort(&objectives);
        let (normalized, lo, hi) = normalize_objectives(&objectives);
        let n_var = positions.first().map_or(0.0, |p| p.len() as f64);
        let os = ssdr(&normalized, &ranks, OBJECTIVE_COUNT);
        let ds = ssdr(&positions, &ranks, n_var);
        let powers = os.iter().zip(&ds).map(|(a, b)| mo_power(*a, *b)).collect();
        let ctx = Self {
            objectives,
            normalized,
            positions,
            ranks,
            lo,
            hi,
            n_var,
        };
        (ctx, powers)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    fn scale(&self, o: &ObjectiveVector) -> Vec<f64> {
        objective_coords(o)
            .into_iter()
            .enumerate()
            .map(|(d, v)| {
                if self.hi[d] > self.lo[d] {
                    (v - self.lo[d]) / (self.hi[d] - self.lo[d])
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Score a point not in the snapshot: its rank is one past its deepest
    /// dominator's, and its SSD values come from inserting it into that
    /// front. Degenerate fronts fall back to the singleton rule.
    pub fn score(&self, objectives: &ObjectiveVector, position: &[f64]) -> f64 {
        let mut rank = 1;
        for (j, o) in self.objectives.iter().enumerate() {
            if dominates(o, objectives) {
                rank = rank.max(self.ranks[j] + 1);
            }
        }
        let members: Vec<usize> = (0..self.ranks.len())
            .filter(|&j| self.ranks[j] == rank)
            .collect();

        let mut os_group: Vec<Vec<f64>> = members.iter().map(|&j| self.normalized[j].clone()).collect();
        os_group.push(self.scale(objectives));
        let mut ds_group: Vec<Vec<f64>> = members.iter().map(|&j| self.positions[j].clone()).collect();
        ds_group.push(position.to_vec());

        let i = os_group.len() - 1;
        let k = (os_group.len() - 1).min(3);
        let penalty = (rank - 1) as f64;
        let os = ssd(&os_group, i, k) + penalty * OBJECTIVE_COUNT;
        let ds = ssd(&ds_group, i, k) + penalty * self.n_var;
        mo_power(os, ds)
    }
}

/// One stored non-dominated solution.
#[derive(Debug, Clone)]
pub struct ArchiveEntry {
    pub mask: Vec<bool>,
    pub position: Vec<f64>,
    pub objectives: ObjectiveVector,
}

/// Bounded record of the best first front seen across the whole run.
/// Entries are mutually non-dominated with unique masks; when over
/// capacity, the most crowded entry (largest SSD sum over both spaces)
/// is evicted first.
#[derive(Debug, Clone)]
pub struct ParetoArchive {
    capacity: usize,
    entries: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "archive capacity must be positive");
        Self {
            capacity,
            entries: Vec::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    /// Merge a batch of candidates, keeping the archive mutually
    /// non-dominated and duplicate-free, then prune back to capacity.
    pub fn merge(&mut self, incoming: impl IntoIterator<Item = ArchiveEntry>) {
        for entry in incoming {
            self.insert(entry);
        }
        self.prune();
    }

    fn insert(&mut self, entry: ArchiveEntry) {
        if let Some(slot) = self.entries.iter().position(|e| e.mask == entry.mask) {
            // Same subset seen again: keep whichever evaluation dominates;
            // on a tie (evaluation noise), the incumbent stays.
            if dominates(&entry.objectives, &self.entries[slot].objectives) {
                self.entries.remove(slot);
            } else {
                return;
            }
        }
        if self
            .entries
            .iter()
            .any(|e| dominates(&e.objectives, &entry.objectives))
        {
            return;
        }
        self.entries
            .retain(|e| !dominates(&entry.objectives, &e.objectives));
        self.entries.push(entry);
    }

    fn prune(&mut self) {
        while self.entries.len() > self.capacity {
            let objectives: Vec<ObjectiveVector> =
                self.entries.iter().map(|e| e.objectives).collect();
            let positions: Vec<Vec<f64>> =
                self.entries.iter().map(|e| e.position.clone()).collect();
            let (normalized, _, _) = normalize_objectives(&objectives);
            let ranks = vec![1usize; self.entries.len()];
            let n_var = positions.first().map_or(0.0, |p| p.len() as f64);
            let os = ssdr(&normalized, &ranks, OBJECTIVE_COUNT);
            let ds = ssdr(&positions, &ranks, n_var);
            let crowded = (0..self.entries.len())
                .max_by(|&a, &b| {
                    (os[a] + ds[a]).partial_cmp(&(os[b] + ds[b])).unwrap()
                })
                .expect("non-empty archive");
            self.entries.remove(crowded);
        }
    }
}

/// One per-iteration record of the multi-objective run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoTraceRow {
    pub iter: usize,
    pub archive_size: usize,
    pub p_glva: f64,
    pub p_udvd: f64,
    pub p_edels: f64,
}

/// One reported front member: the mask, its feature names, and the
/// objective triple.
#[derive(Debug, Clone)]
pub struct FrontSolution {
    pub mask: Vec<bool>,
    pub selected_features: Vec<String>,
    pub objectives: ObjectiveVector,
}

/// Final artifact of a multi-objective run.
#[derive(Debug, Clone)]
pub struct MultiRunResult {
    pub seed: u64,
    pub front: Vec<FrontSolution>,
    pub trace: Vec<MoTraceRow>,
}

/// Re-rank the whole population, install diversity-aware powers, refresh
/// personal bests under the new scoring (old experiences are re-scored by
/// insertion before comparing), and re-seat the global best — which is
/// deliberately non-sticky: it is whichever current candidate scores
/// highest in this iteration's context.
fn rescore(state: &mut SearchState) -> MoContext {
    let objectives: Vec<ObjectiveVector> =
        state.candidates.iter().map(|c| c.eval.objectives).collect();
    let positions: Vec<Vec<f64>> = state.candidates.iter().map(|c| c.position.clone()).collect();
    let (ctx, powers) = MoContext::build(objectives, positions);

    for (cand, &power) in state.candidates.iter_mut().zip(&powers) {
        cand.eval.power = power;
        let best_power = ctx.score(&cand.best.objectives, &cand.best.position);
        if power >= best_power {
            cand.best = PersonalBest {
                position: cand.position.clone(),
                mask: cand.mask.clone(),
                power,
                objectives: cand.eval.objectives,
            };
        } else {
            cand.best.power = best_power;
        }
    }

    let leader = (0..state.candidates.len())
        .max_by(|&a, &b| {
            state.candidates[a]
                .eval
                .power
                .partial_cmp(&state.candidates[b].eval.power)
                .unwrap()
        })
        .expect("non-empty population");
    state.global_best = BestSnapshot {
        position: state.candidates[leader].position.clone(),
        mask: state.candidates[leader].mask.clone(),
        eval: state.candidates[leader].eval.clone(),
    };
    ctx
}

/// Current first-front candidates as archive entries.
fn front_entries(state: &SearchState, ranks: &[usize]) -> Vec<ArchiveEntry> {
    state
        .candidates
        .iter()
        .zip(ranks)
        .filter(|(_, &r)| r == 1)
        .map(|(c, _)| ArchiveEntry {
            mask: c.mask.clone(),
            position: c.position.clone(),
            objectives: c.eval.objectives,
        })
        .collect()
}

/// Run the multi-objective search: the single-objective loop with
/// candidate power replaced by the SSDR-based score (re-computed each
/// iteration after ranking) and a bounded first-front archive updated
/// each iteration.
pub fn run_multi(config: &SearchConfig, dataset: &Dataset) -> Result<MultiRunResult> {
    run_multi_observed(config, dataset, |_, _| {})
}

/// As [`run_multi`], invoking `observer` with the state and archive after
/// initialization and after every iteration.
pub fn run_multi_observed(
    config: &SearchConfig,
    dataset: &Dataset,
    mut observer: impl FnMut(&SearchState, &ParetoArchive),
) -> Result<MultiRunResult> {
    config.validate()?;
    let prepared = crate::search::prepare_data(config, dataset)?;
    let mut engine = Engine::new(config.clone(), prepared)?;
    let mut state = engine.initialize()?;

    let context = rescore(&mut state);
    engine.reform_empires(&mut state);
    let capacity = ((config.n_imp + config.n_col) / 2).max(1);
    let mut archive = ParetoArchive::new(capacity);
    archive.merge(front_entries(&state, context.ranks()));
    engine.set_mo_context(Some(context));
    observer(&state, &archive);

    let mut trace = Vec::with_capacity(config.max_iters);
    for _ in 0..config.max_iters {
        state.t += 1;
        engine.faglva_step(&mut state)?;
        engine.faudvd_step(&mut state)?;
        engine.faedels_step(&mut state)?;

        let context = rescore(&mut state);
        archive.merge(front_entries(&state, context.ranks()));
        engine.set_mo_context(Some(context));

        engine.swap_pass(&mut state);
        engine.enforce_velocity_bounds(&mut state);

        state.window.push(state.global_best.eval.power);
        if state.t % config.tw == 0 && state.window.len() >= config.tw {
            engine.faos_update(&mut state)?;
        }

        trace.push(MoTraceRow {
            iter: state.t,
            archive_size: archive.len(),
            p_glva: state.probs.glva,
            p_udvd: state.probs.udvd,
            p_edels: state.probs.edels,
        });
        observer(&state, &archive);
    }

    let mut front: Vec<FrontSolution> = archive
        .entries()
        .iter()
        .map(|e| FrontSolution {
            mask: e.mask.clone(),
            selected_features: dataset
                .feature_names
                .iter()
                .zip(&e.mask)
                .filter(|(_, &m)| m)
                .map(|(n, _)| n.clone())
                .collect(),
            objectives: e.objectives,
        })
        .collect();
    front.sort_by(|a, b| {
        a.objectives
            .n_f
            .cmp(&b.objectives.n_f)
            .then(a.objectives.rmse.partial_cmp(&b.objectives.rmse).unwrap())
    });

    Ok(MultiRunResult {
        seed: config.seed,
        front,
        trace,
    })
}
