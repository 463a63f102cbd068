//! Seeded multistart maximization of the CHSH value.
//!
//! Every restart is a bounded Nelder-Mead ascent from its own start point.
//! Starts are ordered: the all-zeros point, then caller-supplied warm starts,
//! then `restarts` uniform random points whose seeds depend only on
//! `(seed, index)`. Restarts are pure functions of their index, so any
//! [`RestartExecutor`] (sequential or a thread pool) gives the same result.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::DEFAULT_CUTOFF;
use crate::scenario::{scenario_evaluate, ParamVector, Scenario, SlotKind};
use crate::TSIRELSON_BOUND;

/// Closed interval per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    intervals: Vec<(f64, f64)>,
}

pub const AMPLITUDE_BOUND: f64 = 2.0;
pub const SQUEEZING_BOUND: f64 = 1.0;
pub const CENTER_BOUND: f64 = 6.0;
pub const MIN_WIDTH: f64 = 1e-3;
pub const MAX_WIDTH: f64 = 24.0;
/// Random starts draw amplitude and squeezing from this fraction of their
/// bounds; see [`sample_start`].
pub const START_FRACTION: f64 = 0.5;
/// Random homodyne bins have both ends in `[-BIN_SPAN, BIN_SPAN]`.
pub const BIN_SPAN: f64 = 5.0;

impl Bounds {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &intervals {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidParameter {
                    name: "bounds",
                    value: hi - lo,
                });
            }
        }
        Ok(Self { intervals })
    }

    /// Search box of a scenario's parameter layout.
    pub fn for_scenario(scenario: &Scenario) -> Self {
        let mut intervals = Vec::with_capacity(scenario.param_len());
        for slot in &scenario.slots {
            match slot.kind {
                SlotKind::Homodyne => intervals.extend([
                    (-PI, PI),
                    (-CENTER_BOUND, CENTER_BOUND),
                    (MIN_WIDTH, MAX_WIDTH),
                ]),
                SlotKind::OnOff => {
                    if slot.allow_displacement {
                        intervals.extend([(-AMPLITUDE_BOUND, AMPLITUDE_BOUND); 2]);
                    }
                    if slot.allow_squeezing {
                        intervals.extend([(-SQUEEZING_BOUND, SQUEEZING_BOUND), (-PI, PI)]);
                    }
                }
            }
        }
        Self { intervals }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn project(&self, x: &mut [f64]) {
        for (v, &(lo, hi)) in x.iter_mut().zip(&self.intervals) {
            *v = if v.is_nan() {
                0.5 * (lo + hi)
            } else {
                v.clamp(lo, hi)
            };
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.len()
            && x.iter()
                .zip(&self.intervals)
                .all(|(v, &(lo, hi))| lo <= *v && *v <= hi)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.intervals
            .iter()
            .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
            .collect()
    }
}

/// Random start point for `scenario`, inside [`Bounds::for_scenario`].
///
/// On-off amplitudes and squeezing are drawn from the central
/// [`START_FRACTION`] of their ranges: far out, `U_G` moves the `{|0>, |1>}`
/// manifold almost entirely off the vacuum, the observable flattens to the
/// identity and the ascent stalls at `S = 2`. Homodyne bins get two uniform
/// ends in `[-BIN_SPAN, BIN_SPAN]`, which covers the bulk of every low-photon
/// wavefunction and makes half-line bins as likely as short ones.
pub fn sample_start<R: Rng>(scenario: &Scenario, rng: &mut R) -> Vec<f64> {
    let mut x = Vec::with_capacity(scenario.param_len());
    let amp = AMPLITUDE_BOUND * START_FRACTION;
    let sq = SQUEEZING_BOUND * START_FRACTION;
    for slot in &scenario.slots {
        match slot.kind {
            SlotKind::Homodyne => {
                let theta = rng.gen_range(-PI..=PI);
                let u: f64 = rng.gen_range(-BIN_SPAN..=BIN_SPAN);
                let v: f64 = rng.gen_range(-BIN_SPAN..=BIN_SPAN);
                let (z1, z2) = (u.min(v), u.max(v));
                x.extend([theta, 0.5 * (z1 + z2), (z2 - z1).max(MIN_WIDTH)]);
            }
            SlotKind::OnOff => {
                if slot.allow_displacement {
                    x.push(rng.gen_range(-amp..=amp));
                    x.push(rng.gen_range(-amp..=amp));
                }
                if slot.allow_squeezing {
                    x.push(rng.gen_range(-sq..=sq));
                    x.push(rng.gen_range(-PI..=PI));
                }
            }
        }
    }
    x
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Random restarts, in addition to the zero start and any warm starts.
    pub restarts: usize,
    pub seed: u64,
    pub cutoff: usize,
    /// Stop a local ascent once a full cycle improves `S` by less than this.
    pub local_tol: f64,
    /// Simplex diameter at which a Nelder-Mead cycle is considered collapsed.
    pub local_xtol: f64,
    pub max_local_iter: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 200,
            seed: 1,
            cutoff: DEFAULT_CUTOFF,
            local_tol: 1e-7,
            local_xtol: 1e-5,
            max_local_iter: 2000,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff < 2 {
            return Err(Error::InvalidDimension { dim: self.cutoff });
        }
        if !(self.local_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "local_tol",
                value: self.local_tol,
            });
        }
        if self.max_local_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_local_iter",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of random restart `index`; independent of the total restart count.
pub fn restart_seed(seed: u64, index: usize) -> u64 {
    mix64(mix64(seed).wrapping_add((index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// Per-restart seeds by counter-mode mixing of `seed`.
pub fn restart_seeds(seed: u64, restarts: usize) -> Vec<u64> {
    (0..restarts).map(|i| restart_seed(seed, i)).collect()
}

/// Outcome of one bounded Nelder-Mead ascent.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

/// Bounded Nelder-Mead maximization with dimension-adaptive coefficients.
///
/// Candidate points are projected onto `bounds`. A cycle ends when the
/// simplex values spread by at most `tol` and its diameter is at most
/// `xtol`; the simplex is then rebuilt around the best vertex. The ascent
/// stops once a cycle improves the best value by less than `tol`, or after
/// `max_iter` iterations. Non-finite objective values count as `-inf`.
pub fn local_refine<F>(
    mut objective: F,
    start: &[f64],
    bounds: &Bounds,
    tol: f64,
    xtol: f64,
    max_iter: usize,
) -> LocalResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    assert_eq!(n, bounds.len(), "start point and bounds differ in length");
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };

    let mut best = start.to_vec();
    bounds.project(&mut best);
    let mut best_value = eval(&best);
    if n == 0 {
        return LocalResult {
            point: best,
            value: best_value,
            iterations: 0,
            evaluations,
        };
    }

    let nf = n as f64;
    let (reflect, expand, contract, shrink) =
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut iterations = 0usize;
    let mut step_fraction = 0.05;
    while iterations < max_iter {
        // Initial simplex around the incumbent.
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best.clone(), best_value));
        for i in 0..n {
            let (lo, hi) = bounds.intervals[i];
            let mut step = step_fraction * (hi - lo);
            if step == 0.0 {
                step = step_fraction;
            }
            let mut vertex = best.clone();
            vertex[i] = if best[i] + step <= hi {
                best[i] + step
            } else {
                best[i] - step
            };
            bounds.project(&mut vertex);
            let v = eval(&vertex);
            simplex.push((vertex, v));
        }
        let cycle_start_value = best_value;

        let mut centroid = vec![0.0; n];
        let mut trial = vec![0.0; n];
        while iterations < max_iter {
            iterations += 1;
            // Descending by value; NaN-free because eval maps to -inf.
            simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
            let spread = simplex[0].1 - simplex[n].1;
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread.is_finite() && spread <= tol && diameter <= xtol {
                break;
            }

            centroid.fill(0.0);
            for (x, _) in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / nf;
                }
            }
            let worst = simplex[n].clone();
            let along = |coef: f64, out: &mut Vec<f64>| {
                for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&worst.0) {
                    *o = c + coef * (c - w);
                }
                bounds.project(out);
            };

            along(reflect, &mut trial);
            let reflected = (trial.clone(), eval(&trial));
            if reflected.1 > simplex[0].1 {
                along(reflect * expand, &mut trial);
                let expanded_value = eval(&trial);
                simplex[n] = if expanded_value > reflected.1 {
                    (trial.clone(), expanded_value)
                } else {
                    reflected
                };
                continue;
            }
            if reflected.1 > simplex[n - 1].1 {
                simplex[n] = reflected;
                continue;
            }
            let outside = reflected.1 > worst.1;
            along(
                if outside {
                    reflect * contract
                } else {
                    -contract
                },
                &mut trial,
            );
            let contracted_value = eval(&trial);
            if contracted_value > if outside { reflected.1 } else { worst.1 } {
                simplex[n] = (trial.clone(), contracted_value);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for (x, v) in simplex[1..].iter_mut() {
                for (xi, ai) in x.iter_mut().zip(&anchor) {
                    *xi = ai + shrink * (*xi - ai);
                }
                bounds.project(x);
                *v = eval(x);
            }
        }

        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        if simplex[0].1 > best_value {
            best = simplex[0].0.clone();
            best_value = simplex[0].1;
        }
        if best_value - cycle_start_value < tol {
            break;
        }
        step_fraction = (step_fraction * 0.5).max(1e-3);
    }
    LocalResult {
        point: best,
        value: best_value,
        iterations,
        evaluations,
    }
}

/// How a restart chose its start point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartKind {
    Zero,
    /// Index into the caller's warm starts.
    Warm(usize),
    /// Index of the random restart.
    Random(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartRecord {
    pub kind: StartKind,
    pub seed: Option<u64>,
    /// Best `S` of this restart, or the error that aborted it.
    pub outcome: core::result::Result<f64, Error>,
    pub params: Option<ParamVector>,
    pub iterations: usize,
    pub evaluations: usize,
}

impl RestartRecord {
    pub fn best_s(&self) -> Option<f64> {
        self.outcome.as_ref().ok().copied()
    }
}

/// Runs `count` independent jobs and returns their outputs in index order.
pub trait RestartExecutor {
    fn run(
        &self,
        count: usize,
        job: &(dyn Fn(usize) -> RestartRecord + Sync),
    ) -> Vec<RestartRecord>;
}

/// Runs restarts one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl RestartExecutor for Sequential {
    fn run(
        &self,
        count: usize,
        job: &(dyn Fn(usize) -> RestartRecord + Sync),
    ) -> Vec<RestartRecord> {
        (0..count).map(job).collect()
    }
}

impl<T: RestartExecutor + ?Sized> RestartExecutor for &T {
    fn run(
        &self,
        count: usize,
        job: &(dyn Fn(usize) -> RestartRecord + Sync),
    ) -> Vec<RestartRecord> {
        (**self).run(count, job)
    }
}

impl<T: RestartExecutor + ?Sized> RestartExecutor for Box<T> {
    fn run(
        &self,
        count: usize,
        job: &(dyn Fn(usize) -> RestartRecord + Sync),
    ) -> Vec<RestartRecord> {
        (**self).run(count, job)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub scenario: Scenario,
    pub eta: f64,
    pub p: f64,
    pub best_s: f64,
    pub best_params: ParamVector,
    /// One record per start, in start order.
    pub restarts: Vec<RestartRecord>,
    pub seed: u64,
    pub cutoff: usize,
    /// Filled in by callers that can measure time.
    pub wall_time: Option<Duration>,
}

impl OptimizationResult {
    pub fn per_restart_s(&self) -> Vec<f64> {
        self.restarts
            .iter()
            .filter_map(RestartRecord::best_s)
            .collect()
    }

    pub fn failed_restarts(&self) -> usize {
        self.restarts.iter().filter(|r| r.outcome.is_err()).count()
    }
}

/// Maximizes `S` for `scenario` at efficiencies `(eta, p)`.
pub fn optimize_scenario(
    scenario: &Scenario,
    eta: f64,
    p: f64,
    config: &OptimizerConfig,
    warm_starts: &[ParamVector],
    executor: &dyn RestartExecutor,
) -> Result<OptimizationResult> {
    config.validate()?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
        });
    }
    let len = scenario.param_len();
    for warm in warm_starts {
        if warm.len() != len {
            return Err(Error::LayoutMismatch {
                expected: len,
                found: warm.len(),
            });
        }
    }
    let bounds = Bounds::for_scenario(scenario);
    let total = 1 + warm_starts.len() + config.restarts;

    let job = |index: usize| -> RestartRecord {
        let (kind, seed, start) = if index == 0 {
            (StartKind::Zero, None, vec![0.0; len])
        } else if index <= warm_starts.len() {
            (
                StartKind::Warm(index - 1),
                None,
                warm_starts[index - 1].0.clone(),
            )
        } else {
            let k = index - 1 - warm_starts.len();
            let seed = restart_seed(config.seed, k);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (
                StartKind::Random(k),
                Some(seed),
                sample_start(scenario, &mut rng),
            )
        };
        let mut first_error = None;
        let local = local_refine(
            |x| match scenario_evaluate(scenario, &ParamVector(x.to_vec()), eta, p, config.cutoff) {
                Ok(s) => s,
                Err(e) => {
                    first_error.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            },
            &start,
            &bounds,
            config.local_tol,
            config.local_xtol,
            config.max_local_iter,
        );
        let outcome = if local.value.is_finite() {
            Ok(local.value)
        } else {
            Err(first_error.unwrap_or(Error::NonFinite("objective")))
        };
        let params = outcome.is_ok().then_some(ParamVector(local.point));
        RestartRecord {
            kind,
            seed,
            outcome,
            params,
            iterations: local.iterations,
            evaluations: local.evaluations,
        }
    };

    let restarts = executor.run(total, &job);
    // Ties go to the lowest start index.
    let mut best: Option<(f64, &ParamVector)> = None;
    for record in &restarts {
        if let (Ok(s), Some(params)) = (&record.outcome, &record.params) {
            if best.is_none_or(|(b, _)| *s > b) {
                best = Some((*s, params));
            }
        }
    }
    let (best_s, best_params) = best.ok_or(Error::AllRestartsFailed)?;
    debug_assert!(
        best_s <= TSIRELSON_BOUND + 1e-6,
        "S = {best_s} exceeds the Tsirelson bound"
    );
    let best_params = best_params.clone();
    Ok(OptimizationResult {
        scenario: *scenario,
        eta,
        p,
        best_s,
        best_params,
        restarts,
        seed: config.seed,
        cutoff: config.cutoff,
        wall_time: None,
    })
}
