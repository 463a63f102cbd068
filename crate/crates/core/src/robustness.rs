//! Maximized CHSH value over detection efficiency `eta` and source
//! efficiency `p`, and the efficiencies below which violation disappears.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::optimizer::{
    optimize_scenario, restart_seed, OptimizationResult, OptimizerConfig, RestartExecutor,
};
use crate::reference::printed_warm_starts;
use crate::scenario::{ParamVector, Scenario};
use crate::CLASSICAL_BOUND;

/// `S` must exceed `2` by more than this to count as a violation.
pub const VIOLATION_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Axis {
    Eta,
    P,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Eta => "eta",
            Axis::P => "p",
        }
    }

    /// `(eta, p)` with this axis at `value` and the other at 1.
    pub fn point(self, value: f64) -> (f64, f64) {
        match self {
            Axis::Eta => (value, 1.0),
            Axis::P => (1.0, value),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eta" => Ok(Axis::Eta),
            "p" => Ok(Axis::P),
            _ => Err(Error::UnknownName {
                kind: "axis",
                name: s.into(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessConfig {
    /// Settings of the first (ideal-corner) optimization; later points reuse
    /// everything except the restart count.
    pub optimizer: OptimizerConfig,
    /// Random restarts at every point after the first, besides warm starts.
    pub fresh_restarts: usize,
    /// Bisection stops once the bracket is at most this wide.
    pub bracket_width: f64,
    /// First lower end tried for a threshold bracket.
    pub lower_start: f64,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        Self {
            optimizer: OptimizerConfig::default(),
            fresh_restarts: 50,
            bracket_width: 0.005,
            lower_start: 0.5,
        }
    }
}

impl RobustnessConfig {
    fn point_config(&self, tag: u64) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.fresh_restarts,
            seed: restart_seed(self.optimizer.seed ^ 0x5bd1_e995, tag as usize),
            ..self.optimizer.clone()
        }
    }
}

pub fn violates(s: f64) -> bool {
    s > CLASSICAL_BOUND + VIOLATION_MARGIN
}

/// Maximized `S` on a rectangular `(eta, p)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub scenario: Scenario,
    pub eta_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    /// `values[i][j]` is the best `S` at `(eta_axis[i], p_axis[j])`.
    pub values: Vec<Vec<f64>>,
    pub params: Vec<Vec<ParamVector>>,
    pub config: RobustnessConfig,
}

impl SweepGrid {
    /// Grid points in row-major `(eta, p, S, params)` order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64, &ParamVector)> + '_ {
        self.eta_axis.iter().enumerate().flat_map(move |(i, &eta)| {
            self.p_axis
                .iter()
                .enumerate()
                .map(move |(j, &p)| (eta, p, self.values[i][j], &self.params[i][j]))
        })
    }
}

fn check_axis(axis: &[f64], name: &'static str) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidParameter { name, value: 0.0 });
    }
    for w in axis.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidParameter { name, value: w[1] });
        }
    }
    for &v in axis {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidParameter { name, value: v });
        }
    }
    Ok(())
}

/// Evenly spaced axis of `steps` points on `[min, max]`.
pub fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![max],
        _ => (0..steps)
            .map(|k| min + (max - min) * k as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Caller warm starts followed by the printed optimum, when one exists.
fn with_printed(scenario: &Scenario, warm_starts: &[ParamVector]) -> Vec<ParamVector> {
    let mut warm = warm_starts.to_vec();
    warm.extend(printed_warm_starts(scenario));
    warm
}

/// Maximizes `S` on every grid point.
///
/// Points are visited from the `(max eta, max p)` corner downwards. The first
/// point runs the full restart budget from `warm_starts` and the printed
/// optimum, when one exists; every later point is warm-started from its already computed
/// neighbours at higher `eta` and higher `p`, plus `fresh_restarts` random starts.
pub fn sweep(
    scenario: &Scenario,
    eta_axis: &[f64],
    p_axis: &[f64],
    config: &RobustnessConfig,
    warm_starts: &[ParamVector],
    executor: &dyn RestartExecutor,
) -> Result<SweepGrid> {
    check_axis(eta_axis, "eta axis")?;
    check_axis(p_axis, "p axis")?;
    let (rows, cols) = (eta_axis.len(), p_axis.len());
    let mut values = vec![vec![f64::NAN; cols]; rows];
    let mut params = vec![vec![ParamVector::default(); cols]; rows];

    for i in (0..rows).rev() {
        for j in (0..cols).rev() {
            let first = i == rows - 1 && j == cols - 1;
            let result = if first {
                let warm = with_printed(scenario, warm_starts);
                optimize_scenario(
                    scenario,
                    eta_axis[i],
                    p_axis[j],
                    &config.optimizer,
                    &warm,
                    executor,
                )?
            } else {
                let mut warm = Vec::new();
                if i + 1 < rows {
                    warm.push(params[i + 1][j].clone());
                }
                if j + 1 < cols {
                    warm.push(params[i][j + 1].clone());
                }
                let tag = (i * cols + j) as u64;
                optimize_scenario(
                    scenario,
                    eta_axis[i],
                    p_axis[j],
                    &config.point_config(tag),
                    &warm,
                    executor,
                )?
            };
            values[i][j] = result.best_s;
            params[i][j] = result.best_params;
        }
    }
    Ok(SweepGrid {
        scenario: *scenario,
        eta_axis: eta_axis.to_vec(),
        p_axis: p_axis.to_vec(),
        values,
        params,
        config: config.clone(),
    })
}

/// One optimized point visited while locating a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPoint {
    pub value: f64,
    pub best_s: f64,
    pub violates: bool,
    pub best_params: ParamVector,
}

/// Marginal violation threshold along one axis, the other axis held at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub scenario: Scenario,
    pub axis: Axis,
    /// Midpoint of the final bracket.
    pub value: f64,
    /// `(non-violating, violating)` ends of the final bracket.
    pub bracket: (f64, f64),
    pub ideal_s: f64,
    /// Every optimized point, in evaluation order, starting with the ideal point.
    pub evidence: Vec<ThresholdPoint>,
}

/// Bisects the efficiency along `axis` for the point where the maximized
/// `S` drops to 2.
///
/// The ideal point is started from `warm_starts` and the printed optimum,
/// when one exists. Each probe is warm-started from the best settings at the
/// nearest violating point above it, plus `fresh_restarts` random starts.
pub fn find_threshold(
    scenario: &Scenario,
    axis: Axis,
    config: &RobustnessConfig,
    warm_starts: &[ParamVector],
    executor: &dyn RestartExecutor,
) -> Result<Threshold> {
    if !(config.bracket_width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "bracket_width",
            value: config.bracket_width,
        });
    }
    if !(config.lower_start > 0.0 && config.lower_start < 1.0) {
        return Err(Error::InvalidParameter {
            name: "lower_start",
            value: config.lower_start,
        });
    }
    let warm = with_printed(scenario, warm_starts);
    let ideal = optimize_scenario(scenario, 1.0, 1.0, &config.optimizer, &warm, executor)?;
    if !violates(ideal.best_s) {
        return Err(Error::NoViolation {
            best_s: ideal.best_s,
        });
    }

    let mut evidence = vec![ThresholdPoint {
        value: 1.0,
        best_s: ideal.best_s,
        violates: true,
        best_params: ideal.best_params.clone(),
    }];
    let probe = |value: f64,
                 from: &ParamVector,
                 evidence: &mut Vec<ThresholdPoint>|
     -> Result<OptimizationResult> {
        let (eta, p) = axis.point(value);
        let tag = evidence.len() as u64;
        let result = optimize_scenario(
            scenario,
            eta,
            p,
            &config.point_config(tag),
            core::slice::from_ref(from),
            executor,
        )?;
        evidence.push(ThresholdPoint {
            value,
            best_s: result.best_s,
            violates: violates(result.best_s),
            best_params: result.best_params.clone(),
        });
        Ok(result)
    };

    let mut hi = 1.0;
    let mut hi_params = ideal.best_params;
    let mut lo = config.lower_start;
    loop {
        let result = probe(lo, &hi_params, &mut evidence)?;
        if !violates(result.best_s) {
            break;
        }
        hi = lo;
        hi_params = result.best_params;
        lo *= 0.5;
        if lo < 1e-3 {
            return Err(Error::InvalidParameter {
                name: "threshold below",
                value: hi,
            });
        }
    }
    while hi - lo > config.bracket_width {
        let mid = 0.5 * (lo + hi);
        let result = probe(mid, &hi_params, &mut evidence)?;
        if violates(result.best_s) {
            hi = mid;
            hi_params = result.best_params;
        } else {
            lo = mid;
        }
    }
    Ok(Threshold {
        scenario: *scenario,
        axis,
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
        ideal_s: ideal.best_s,
        evidence,
    })
}
