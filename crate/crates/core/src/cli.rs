//! Command-line front end.
//!
//! Every subcommand is deterministic given its flags. Exit codes: 0 on
//! success, 2 for usage errors (including unknown fault locations), 1 for
//! runtime failures such as an unwritable output or a degenerate fit.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{estimate_rate, fault_census, fit_and_threshold, FitResult, RateEstimate};
use crate::circuit::{build_fig1, build_fig2, enumerate_locations, export_text, Circuit, LocationKind};
use crate::engine::{format_trace, Engine, EngineError};
use crate::noise::{AncillaChannel, ErrorModel, FaultEvent, GateNoise};
use crate::pauli::PauliString;
use crate::REGISTER_QUBITS;

pub const CSV_HEADER: &str = "circuit,model,p,shots,failures,p_log,ci_low,ci_high,seed";
pub const DEFAULT_GRID: [f64; 6] = [1e-4, 2e-4, 3e-4, 5e-4, 7e-4, 1e-3];
pub const DEFAULT_SHOTS: u64 = 1_000_000;
pub const WORKERS_ENV: &str = "CECSIM_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "cecsim",
    version,
    about = "Coherent error-correction fault simulator for the Steane code"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo logical error rate at each p.
    Simulate(RunArgs),
    /// Exhaustive single-fault census (JSON).
    Census(CensusArgs),
    /// Simulate a grid, fit A p + B p^2 and report the pseudo-threshold.
    Threshold(RunArgs),
    /// Propagate explicit faults through one round.
    Trace(TraceArgs),
    /// Inspect a built circuit.
    Circuit {
        #[command(subcommand)]
        action: CircuitAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CircuitArg {
    Fig1,
    Fig2,
}

impl CircuitArg {
    pub fn build(self) -> Circuit {
        match self {
            CircuitArg::Fig1 => build_fig1(),
            CircuitArg::Fig2 => build_fig2(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Full,
    BitflipAncilla,
}

impl From<ModelArg> for AncillaChannel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Full => AncillaChannel::Full,
            ModelArg::BitflipAncilla => AncillaChannel::BitflipOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GateNoiseArg {
    DataLocal,
    Uniform,
    PerQubit,
}

impl From<GateNoiseArg> for GateNoise {
    fn from(g: GateNoiseArg) -> Self {
        match g {
            GateNoiseArg::DataLocal => GateNoise::DataLocal,
            GateNoiseArg::Uniform => GateNoise::Uniform,
            GateNoiseArg::PerQubit => GateNoise::PerQubit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub circuit: CircuitArg,
    #[arg(long, value_enum, default_value = "full")]
    pub model: ModelArg,
    /// Noise on gates wider than two qubits.
    #[arg(long, value_enum, default_value = "data-local")]
    pub gate_noise: GateNoiseArg,
}

impl ModelArgs {
    fn model(&self, p: f64) -> ErrorModel {
        ErrorModel::new(p, self.model.into()).with_gate_noise(self.gate_noise.into())
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Physical error rates; repeat or separate with commas. Defaults to
    /// 1,2,3,5,7,10 x 1e-4.
    #[arg(long = "p", value_delimiter = ',')]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; output does not depend on this.
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json for simulate; text or json for threshold.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long, value_enum)]
    pub circuit: CircuitArg,
    /// `<location-id>:<pauli>`, e.g. `12:Z8`. Repeatable.
    #[arg(long = "fault")]
    pub faults: Vec<String>,
    /// Data error present before the round, e.g. `X1.X2`.
    #[arg(long)]
    pub inject: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum CircuitAction {
    /// Print the circuit text format.
    Export {
        #[arg(long, value_enum)]
        circuit: CircuitArg,
    },
    /// Print the fault-location table.
    Locations {
        #[arg(long, value_enum)]
        circuit: CircuitArg,
    },
    /// Print gate, idle and depth counts.
    Stats {
        #[arg(long, value_enum)]
        circuit: CircuitArg,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

/// Parses `args` (program name first), runs, prints, and returns the exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Runtime(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(args) => {
            let format = match args.format.unwrap_or(Format::Csv) {
                Format::Text => return Err(CliError::Usage("simulate writes csv or json".into())),
                f => f,
            };
            let rows = with_workers(args.workers, || simulate_grid(args))??;
            emit(args.out.as_ref(), &render_rows(&rows, format))
        }
        Command::Census(args) => {
            let c = args.model.circuit.build();
            let census = with_workers(args.workers, || fault_census(&c, &args.model.model(0.0)))?;
            emit(args.out.as_ref(), &(to_json(&census) + "\n"))
        }
        Command::Threshold(args) => {
            let format = match args.format.unwrap_or(Format::Text) {
                Format::Csv => return Err(CliError::Usage("threshold writes text or json".into())),
                f => f,
            };
            if grid(args)?.len() < 3 {
                return Err(CliError::Usage("threshold needs at least 3 grid points".into()));
            }
            let rows = with_workers(args.workers, || simulate_grid(args))??;
            let fit = fit_and_threshold(&rows).map_err(|e| CliError::Runtime(format!("fit failed: {e}")))?;
            let text = match format {
                Format::Json => {
                    to_json(&ThresholdReport {
                        fit: &fit,
                        points: &rows,
                    }) + "\n"
                }
                _ => render_threshold(&rows, &fit),
            };
            emit(args.out.as_ref(), &text)
        }
        Command::Trace(args) => emit(None, &trace(args)?),
        Command::Circuit { action } => emit(None, &circuit_action(action)),
    }
}

fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
    let Some(k) = workers else { return Ok(f()) };
    if k == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start {k} workers: {e}")))?;
    Ok(pool.install(f))
}

fn grid(args: &RunArgs) -> Result<Vec<f64>, CliError> {
    let grid = if args.p.is_empty() {
        DEFAULT_GRID.to_vec()
    } else {
        args.p.clone()
    };
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(CliError::Usage(format!("p = {p} is not a probability")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage("grid values must be strictly ascending".into()));
    }
    if args.shots == 0 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    Ok(grid)
}

fn simulate_grid(args: &RunArgs) -> Result<Vec<RateEstimate>, CliError> {
    let c = args.model.circuit.build();
    Ok(grid(args)?
        .into_iter()
        .map(|p| estimate_rate(&c, &args.model.model(p), args.shots, args.seed))
        .collect())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

pub fn render_rows(rows: &[RateEstimate], format: Format) -> String {
    match format {
        Format::Json => to_json(&rows) + "\n",
        _ => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            for row in rows {
                w.serialize(row).expect("row serializes");
            }
            let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8");
            format!("{CSV_HEADER}\n{body}")
        }
    }
}

#[derive(Serialize)]
struct ThresholdReport<'a> {
    fit: &'a FitResult,
    points: &'a [RateEstimate],
}

fn render_threshold(rows: &[RateEstimate], fit: &FitResult) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:>10} {:>9} {:>9} {:>12} {:>12} {:>12}",
        "p", "shots", "failures", "p_log", "ci_low", "ci_high"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{:>10.3e} {:>9} {:>9} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.p, r.shots, r.failures, r.p_log, r.ci_low, r.ci_high
        )
        .unwrap();
    }
    writeln!(out, "A = {:.6e}", fit.a).unwrap();
    writeln!(out, "B = {:.6e}", fit.b).unwrap();
    match fit.threshold {
        Some(t) => writeln!(out, "threshold = {t:.6e}").unwrap(),
        None => writeln!(out, "threshold = none").unwrap(),
    }
    out
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Runtime(format!("cannot write output: {e}")))
        }
    }
}

fn parse_pauli(lit: &str) -> Result<PauliString, CliError> {
    PauliString::parse(REGISTER_QUBITS, lit).map_err(|e| CliError::Usage(format!("bad Pauli `{lit}`: {e}")))
}

fn parse_fault(spec: &str) -> Result<FaultEvent, CliError> {
    let (id, lit) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("fault `{spec}` is not <location-id>:<pauli>")))?;
    let location = id
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("fault `{spec}`: `{id}` is not a location id")))?;
    Ok(FaultEvent {
        location,
        pauli: parse_pauli(lit)?,
    })
}

fn trace(args: &TraceArgs) -> Result<String, CliError> {
    let c = args.circuit.build();
    let faults = args
        .faults
        .iter()
        .map(|s| parse_fault(s))
        .collect::<Result<Vec<_>, _>>()?;
    let inject = args.inject.as_deref().map(parse_pauli).transpose()?;
    let engine = Engine::new(&c);
    let hint = format!("run `cecsim circuit locations --circuit {}` for the valid ids", c.label);
    let snapshots = engine.trace(&faults, inject).map_err(|e| match e {
        EngineError::UnknownLocation(id) => CliError::Usage(format!(
            "no fault location with id {id}; ids run 0..={}; {hint}",
            engine.num_locations() - 1
        )),
        e @ EngineError::OutsideLocation { .. } => CliError::Usage(format!("{e}; {hint}")),
        e => CliError::Usage(e.to_string()),
    })?;
    let outcome = engine.run_unchecked(&faults, inject);
    let mut out = format_trace(&snapshots);
    writeln!(out, "residual={}", outcome.residual).unwrap();
    writeln!(out, "class={}", outcome.cls).unwrap();
    Ok(out)
}

fn circuit_action(action: &CircuitAction) -> String {
    match *action {
        CircuitAction::Export { circuit } => export_text(&circuit.build()),
        CircuitAction::Locations { circuit } => {
            let mut out = String::from("id\tt\tkind\tgate\tqubits\n");
            for l in enumerate_locations(&circuit.build()) {
                let kind = match l.kind {
                    LocationKind::Gate => "gate",
                    LocationKind::Idle => "idle",
                };
                let gate = l.gate_kind.map_or("-", |k| k.name());
                let qubits: Vec<String> = l.support.iter().map(|q| (q + 1).to_string()).collect();
                writeln!(out, "{}\t{}\t{kind}\t{gate}\t{}", l.id, l.timestep, qubits.join(",")).unwrap();
            }
            out
        }
        CircuitAction::Stats { circuit } => {
            let s = circuit.build().stats();
            let mut out = String::new();
            writeln!(out, "circuit {}", s.circuit).unwrap();
            writeln!(out, "depth {}", s.depth).unwrap();
            for (kind, n) in &s.gates {
                writeln!(out, "{kind} {n}").unwrap();
            }
            writeln!(out, "gates {}", s.total_gates).unwrap();
            writeln!(out, "idle_locations {}", s.idle_locations).unwrap();
            writeln!(out, "locations {}", s.total_locations).unwrap();
            out
        }
    }
}
