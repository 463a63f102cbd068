//! CSV and JSON layouts of every command's output, and the parameter file
//! read by `eval` and `--params`.

use std::io::Write;

use serde::{Deserialize, Serialize};
use spqn_core::optimizer::OptimizationResult;
use spqn_core::robustness::{Axis, SweepGrid, Threshold};
use spqn_core::scenario::{
    unpack_params, Scenario, ScenarioName, SlotKind, StructuredParams, Variant,
};

/// Digits used for every number written to CSV.
pub const CSV_DIGITS: usize = 12;
/// Digits printed by `eval`.
pub const EVAL_DIGITS: usize = 10;

/// `x` rounded to `digits` significant digits, in the shortest of fixed or
/// scientific notation (like C's `%.*g`).
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn slot_pattern(kinds: &[SlotKind]) -> String {
    kinds
        .iter()
        .map(|k| match k {
            SlotKind::OnOff => "on-off",
            SlotKind::Homodyne => "HD",
        })
        .collect::<Vec<_>>()
        .join(";")
}

/// One reproduced reference table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub row_id: usize,
    pub scenario: ScenarioName,
    pub variant: Variant,
    #[serde(rename = "S_max")]
    pub s_max: f64,
    /// `None` where the published row reads "no violation".
    #[serde(rename = "paper_S")]
    pub reference_s: Option<f64>,
    pub best_params: StructuredParams,
}

pub fn write_table1_csv<W: Write>(rows: &[Table1Row], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "row_id",
        "alice_slots",
        "bob_slots",
        "variant",
        "S_max",
        "paper_S",
    ])?;
    for row in rows {
        let pattern = row.scenario.pattern();
        w.write_record([
            row.row_id.to_string(),
            slot_pattern(&pattern[..2]),
            slot_pattern(&pattern[2..]),
            row.variant.to_string(),
            sig(row.s_max, CSV_DIGITS),
            row.reference_s
                .map_or_else(|| "<=2".to_string(), |s| s.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Spread of the per-restart maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub starts: usize,
    pub failed: usize,
    /// Restarts ending within `1e-3` of the best value.
    pub near_best: usize,
    #[serde(rename = "median_S")]
    pub median_s: f64,
    #[serde(rename = "worst_S")]
    pub worst_s: f64,
    #[serde(rename = "per_restart_S")]
    pub per_restart_s: Vec<Option<f64>>,
}

impl RestartSummary {
    pub fn new(result: &OptimizationResult) -> Self {
        let per_restart_s: Vec<Option<f64>> = result.restarts.iter().map(|r| r.best_s()).collect();
        let mut ok: Vec<f64> = per_restart_s.iter().flatten().copied().collect();
        ok.sort_by(f64::total_cmp);
        Self {
            starts: result.restarts.len(),
            failed: result.failed_restarts(),
            near_best: ok.iter().filter(|&&s| s >= result.best_s - 1e-3).count(),
            median_s: ok.get(ok.len() / 2).copied().unwrap_or(f64::NAN),
            worst_s: ok.first().copied().unwrap_or(f64::NAN),
            per_restart_s,
        }
    }
}

/// Output of `optimize`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub scenario: ScenarioName,
    pub variant: Variant,
    pub eta: f64,
    pub p: f64,
    pub seed: u64,
    pub cutoff: usize,
    pub restarts: usize,
    #[serde(rename = "best_S")]
    pub best_s: f64,
    pub best_params: StructuredParams,
    pub per_restart_summary: RestartSummary,
}

impl OptimizeReport {
    pub fn new(result: &OptimizationResult, restarts: usize) -> spqn_core::Result<Self> {
        Ok(Self {
            scenario: result.scenario.name,
            variant: result.scenario.variant,
            eta: result.eta,
            p: result.p,
            seed: result.seed,
            cutoff: result.cutoff,
            restarts,
            best_s: result.best_s,
            best_params: unpack_params(&result.scenario, &result.best_params)?,
            per_restart_summary: RestartSummary::new(result),
        })
    }
}

/// Header and rows of a sweep CSV: `eta, p, s_max`, then the labelled
/// best parameters.
pub fn write_sweep_csv<W: Write>(grid: &SweepGrid, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["eta".to_string(), "p".to_string(), "s_max".to_string()];
    header.extend(grid.scenario.param_labels());
    w.write_record(&header)?;
    for (eta, p, s, params) in grid.points() {
        let mut record = vec![sig(eta, CSV_DIGITS), sig(p, CSV_DIGITS), sig(s, CSV_DIGITS)];
        record.extend(params.as_slice().iter().map(|&v| sig(v, CSV_DIGITS)));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eta: f64,
    pub p: f64,
    pub s_max: f64,
    pub best_params: StructuredParams,
}

/// JSON form of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scenario: ScenarioName,
    pub variant: Variant,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    pub fn new(grid: &SweepGrid) -> spqn_core::Result<Self> {
        let points = grid
            .points()
            .map(|(eta, p, s_max, params)| {
                Ok(SweepPoint {
                    eta,
                    p,
                    s_max,
                    best_params: unpack_params(&grid.scenario, params)?,
                })
            })
            .collect::<spqn_core::Result<_>>()?;
        Ok(Self {
            scenario: grid.scenario.name,
            variant: grid.scenario.variant,
            points,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidencePoint {
    pub value: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub violates: bool,
}

/// Output of `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub scenario: ScenarioName,
    pub variant: Variant,
    pub axis: Axis,
    pub threshold: f64,
    /// `[non-violating, violating]` ends of the final bracket.
    pub bracket: [f64; 2],
    #[serde(rename = "ideal_S")]
    pub ideal_s: f64,
    pub evidence: Vec<EvidencePoint>,
}

impl ThresholdReport {
    pub fn new(t: &Threshold) -> Self {
        Self {
            scenario: t.scenario.name,
            variant: t.scenario.variant,
            axis: t.axis,
            threshold: t.value,
            bracket: [t.bracket.0, t.bracket.1],
            ideal_s: t.ideal_s,
            evidence: t
                .evidence
                .iter()
                .map(|e| EvidencePoint {
                    value: e.value,
                    s: e.best_s,
                    violates: e.violates,
                })
                .collect(),
        }
    }
}

pub fn write_threshold_csv<W: Write>(report: &ThresholdReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([report.axis.name(), "S", "violates"])?;
    for e in &report.evidence {
        w.write_record([
            sig(e.value, CSV_DIGITS),
            sig(e.s, CSV_DIGITS),
            e.violates.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_optimize_csv<W: Write>(
    scenario: &Scenario,
    report: &OptimizeReport,
    flat: &[f64],
    out: W,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["eta".to_string(), "p".to_string(), "s_max".to_string()];
    header.extend(scenario.param_labels());
    w.write_record(&header)?;
    let mut record = vec![
        sig(report.eta, CSV_DIGITS),
        sig(report.p, CSV_DIGITS),
        sig(report.best_s, CSV_DIGITS),
    ];
    record.extend(flat.iter().map(|&v| sig(v, CSV_DIGITS)));
    w.write_record(&record)?;
    w.flush()?;
    Ok(())
}

/// Reads structured settings from JSON: either the settings object itself
/// or any report carrying it under `best_params`.
pub fn parse_params(text: &str) -> Result<StructuredParams, String> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let inner = value.get("best_params").cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| format!("invalid parameter file: {e}"))
}
