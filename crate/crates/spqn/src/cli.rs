//! The `spqn` command line.
//!
//! Exit codes: 0 on success, 1 for invalid input or IO failures, 2 when the
//! mathematics fails (no violation where one is required, cutoff or
//! optimizer breakdown).

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spqn_core::fock::DEFAULT_CUTOFF;
use spqn_core::optimizer::{optimize_scenario, OptimizerConfig};
use spqn_core::reference::{printed_warm_starts, table1_rows};
use spqn_core::robustness::{find_threshold, linspace, sweep, Axis, RobustnessConfig};
use spqn_core::scenario::{pack_params, scenario_evaluate, ParamVector, Scenario};

use crate::executor::PoolExecutor;
use crate::format::{
    parse_params, sig, write_optimize_csv, write_sweep_csv, write_table1_csv, write_threshold_csv,
    OptimizeReport, SweepReport, Table1Row, ThresholdReport, EVAL_DIGITS,
};

#[derive(Debug, Parser)]
#[command(
    name = "spqn",
    version,
    about = "CHSH tests of a single-photon entangled state with on-off and homodyne detection"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize all ten reference table rows at eta = p = 1.
    Table1(Table1Args),
    /// Maximize S for one scenario.
    Optimize(OptimizeArgs),
    /// Maximize S on an (eta, p) grid.
    Sweep(SweepArgs),
    /// Locate the efficiency below which S no longer exceeds 2.
    Threshold(ThresholdArgs),
    /// Evaluate S for fixed settings.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// 4h, 3h, 2h-i, 2h-ii, 1h or 0h.
    #[arg(long)]
    scenario: String,
    /// do, sdo or squeeze-only.
    #[arg(long, default_value = "sdo")]
    variant: String,
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<Scenario, Failure> {
        Ok(Scenario::parse(&self.scenario, &self.variant)?)
    }
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Random restarts (the zero start and warm starts come on top).
    #[arg(long, default_value_t = 200)]
    restarts: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Initial Fock cutoff; doubled until the on-off observables converge.
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    cutoff: usize,
}

impl SearchArgs {
    fn config(&self) -> Result<OptimizerConfig, Failure> {
        if self.restarts == 0 {
            return Err(Failure::Input("--restarts must be at least 1".into()));
        }
        Ok(OptimizerConfig {
            restarts: self.restarts,
            seed: self.seed,
            cutoff: self.cutoff,
            ..Default::default()
        })
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct Table1Args {
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[command(flatten)]
    search: SearchArgs,
    /// Extra warm start (settings JSON or a previous report).
    #[arg(long)]
    params: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, default_value_t = 0.7)]
    eta_min: f64,
    #[arg(long, default_value_t = 1.0)]
    eta_max: f64,
    #[arg(long, default_value_t = 7)]
    eta_steps: usize,
    #[arg(long, default_value_t = 0.7)]
    p_min: f64,
    #[arg(long, default_value_t = 1.0)]
    p_max: f64,
    #[arg(long, default_value_t = 7)]
    p_steps: usize,
    #[command(flatten)]
    search: SearchArgs,
    /// Random restarts at every grid point after the first.
    #[arg(long, default_value_t = 50)]
    fresh_restarts: usize,
    /// Extra warm start for the first grid point.
    #[arg(long)]
    params: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// eta or p; the other efficiency is held at 1.
    #[arg(long)]
    axis: String,
    #[command(flatten)]
    search: SearchArgs,
    /// Random restarts at every bisection point.
    #[arg(long, default_value_t = 50)]
    fresh_restarts: usize,
    /// Extra warm start for the ideal point.
    #[arg(long)]
    params: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Settings JSON, or a report carrying `best_params`.
    #[arg(long)]
    params: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    cutoff: usize,
}

/// Why a command failed, and so which exit code it returns.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<spqn_core::Error> for Failure {
    fn from(e: spqn_core::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(format!("io: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(format!("json: {e}"))
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("spqn: {failure}");
            failure.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Table1(args) => cmd_table1(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Threshold(args) => cmd_threshold(args),
        Command::Eval(args) => cmd_eval(args),
    }
}

fn executor() -> Result<PoolExecutor, Failure> {
    PoolExecutor::from_env().map_err(Failure::Input)
}

fn read_warm_start(path: Option<&Path>, scenario: &Scenario) -> Result<Vec<ParamVector>, Failure> {
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let structured = parse_params(&text).map_err(Failure::Input)?;
    Ok(vec![pack_params(scenario, &structured)?])
}

/// Renders into memory first so a failed render never leaves a partial file.
fn emit<F>(out: Option<&Path>, render: F) -> Result<(), Failure>
where
    F: FnOnce(&mut Vec<u8>) -> Result<(), Failure>,
{
    let mut buf = Vec::new();
    render(&mut buf)?;
    match out {
        Some(path) => std::fs::write(path, &buf)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(&buf)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn write_json<T: serde::Serialize>(buf: &mut Vec<u8>, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *buf, value)?;
    buf.push(b'\n');
    Ok(())
}

fn cmd_table1(args: Table1Args) -> Result<(), Failure> {
    let config = args.search.config()?;
    let exec = executor()?;
    let mut rows = Vec::new();
    for (k, (scenario, reference_s)) in table1_rows().into_iter().enumerate() {
        let start = Instant::now();
        let result = optimize_scenario(
            &scenario,
            1.0,
            1.0,
            &config,
            &printed_warm_starts(&scenario),
            &exec,
        )?;
        eprintln!(
            "row {}: {scenario} S = {:.6} ({:.1?})",
            k + 1,
            result.best_s,
            start.elapsed()
        );
        rows.push(Table1Row {
            row_id: k + 1,
            scenario: scenario.name,
            variant: scenario.variant,
            s_max: result.best_s,
            reference_s,
            best_params: spqn_core::scenario::unpack_params(&scenario, &result.best_params)?,
        });
    }
    emit(args.output.out.as_deref(), |buf| {
        match args.output.format.unwrap_or(Format::Csv) {
            Format::Csv => Ok(write_table1_csv(&rows, buf)?),
            Format::Json => write_json(buf, &rows),
        }
    })
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), Failure> {
    let scenario = args.scenario.scenario()?;
    let config = args.search.config()?;
    let mut warm = read_warm_start(args.params.as_deref(), &scenario)?;
    warm.extend(printed_warm_starts(&scenario));
    let start = Instant::now();
    let result = optimize_scenario(&scenario, args.eta, args.p, &config, &warm, &executor()?)?;
    eprintln!(
        "{scenario}: S = {:.6} ({:.1?})",
        result.best_s,
        start.elapsed()
    );
    let report = OptimizeReport::new(&result, config.restarts)?;
    emit(args.output.out.as_deref(), |buf| {
        match args.output.format.unwrap_or(Format::Json) {
            Format::Json => write_json(buf, &report),
            Format::Csv => Ok(write_optimize_csv(
                &scenario,
                &report,
                result.best_params.as_slice(),
                buf,
            )?),
        }
    })
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let scenario = args.scenario.scenario()?;
    let config = RobustnessConfig {
        optimizer: args.search.config()?,
        fresh_restarts: args.fresh_restarts,
        ..Default::default()
    };
    let warm = read_warm_start(args.params.as_deref(), &scenario)?;
    let eta_axis = linspace(args.eta_min, args.eta_max, args.eta_steps);
    let p_axis = linspace(args.p_min, args.p_max, args.p_steps);
    let start = Instant::now();
    let grid = sweep(&scenario, &eta_axis, &p_axis, &config, &warm, &executor()?)?;
    eprintln!(
        "{scenario}: {} points ({:.1?})",
        eta_axis.len() * p_axis.len(),
        start.elapsed()
    );
    emit(args.output.out.as_deref(), |buf| {
        match args.output.format.unwrap_or(Format::Csv) {
            Format::Csv => Ok(write_sweep_csv(&grid, buf)?),
            Format::Json => write_json(buf, &SweepReport::new(&grid)?),
        }
    })
}

fn cmd_threshold(args: ThresholdArgs) -> Result<(), Failure> {
    let scenario = args.scenario.scenario()?;
    let axis: Axis = args.axis.parse()?;
    let config = RobustnessConfig {
        optimizer: args.search.config()?,
        fresh_restarts: args.fresh_restarts,
        ..Default::default()
    };
    let warm = read_warm_start(args.params.as_deref(), &scenario)?;
    let start = Instant::now();
    let threshold = find_threshold(&scenario, axis, &config, &warm, &executor()?).map_err(|e| match e {
        spqn_core::Error::NoViolation { best_s } => Failure::Numerical(format!(
            "{scenario} does not violate CHSH at eta = p = 1 (best S = {best_s:.6}); no threshold exists"
        )),
        other => other.into(),
    })?;
    eprintln!(
        "{scenario}: {axis} threshold {:.4} ({:.1?})",
        threshold.value,
        start.elapsed()
    );
    let report = ThresholdReport::new(&threshold);
    emit(args.output.out.as_deref(), |buf| {
        match args.output.format.unwrap_or(Format::Json) {
            Format::Json => write_json(buf, &report),
            Format::Csv => Ok(write_threshold_csv(&report, buf)?),
        }
    })
}

fn cmd_eval(args: EvalArgs) -> Result<(), Failure> {
    let scenario = args.scenario.scenario()?;
    let text = std::fs::read_to_string(&args.params)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", args.params.display())))?;
    let structured = parse_params(&text).map_err(Failure::Input)?;
    let flat = pack_params(&scenario, &structured)?;
    let s = scenario_evaluate(&scenario, &flat, args.eta, args.p, args.cutoff)?;
    emit(None, |buf| Ok(writeln!(buf, "{}", sig(s, EVAL_DIGITS))?))
}
