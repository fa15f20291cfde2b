//! Command-line front end.
//!
//! Site pairs are 1-based (`--sites 1,2`). Data goes to stdout; errors go to
//! stderr as one `level=error code=<exit> msg="..."` line. Exit codes: 0
//! success, 2 input or schema error, 3 physically invalid system (zero or
//! unstable mode), 4 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use crate::diag::{mode_frequencies, simultaneous_diagonalize, NormalModeBasis};
use crate::emit::{emit, emit_table, format_float, Cell, Format, Record, Table};
use crate::entangle::{
    critical_temperature_in_basis, entanglement_report, is_entangled, log_negativity,
    pair_covariance, separability_l, CriticalTemperature, EntanglementReport, PairCovariance,
};
use crate::error::{Error, ErrorKind};
use crate::network::{make_chain, parse_network, ChainKind, OscillatorNetwork, ThermalEnvironment};

#[derive(Debug, Parser)]
#[command(name = "harmonic-entanglement", version, about = "Two-site entanglement in thermal oscillator networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normal-mode basis: mu, lambdas, phonon frequencies and transforms.
    Modes {
        network: PathBuf,
    },
    /// Two-site covariance entries A, E, C, G, H, J.
    Cov(PointArgs),
    /// Separability L, logarithmic negativity and the PPT spectrum.
    Entangle(PointArgs),
    /// Entanglement of one pair over a temperature grid.
    Sweep {
        network: PathBuf,
        #[arg(long, value_parser = parse_sites)]
        sites: (usize, usize),
        #[arg(long)]
        tmin: f64,
        #[arg(long)]
        tmax: f64,
        #[arg(long)]
        steps: usize,
        /// Log-spaced grid instead of linear.
        #[arg(long)]
        log: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Temperature above which the pair is separable.
    Tcrit {
        network: PathBuf,
        #[arg(long, value_parser = parse_sites)]
        sites: (usize, usize),
        #[arg(long, default_value_t = 1e-3)]
        tlo: f64,
        #[arg(long, default_value_t = 10.0)]
        thi: f64,
    },
    /// Circular vs linear chain negativity for pairs at equal separation.
    Compare {
        #[arg(long, value_delimiter = ',', default_value = "circular,linear")]
        kind: Vec<ChainKind>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        separation: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        onsite: f64,
        #[arg(long, default_value_t = 1.0)]
        coupling: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct PointArgs {
    network: PathBuf,
    /// Inverse temperature; `inf` for the ground state.
    #[arg(long)]
    beta: f64,
    #[arg(long, value_parser = parse_sites)]
    sites: (usize, usize),
    #[arg(long, value_enum, default_value = "json-lines")]
    format: Format,
}

fn parse_sites(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s
        .split_once(',')
        .ok_or_else(|| format!("expected i,j but got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("bad site {x:?}: {e}"));
    Ok((parse(i)?, parse(j)?))
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Physical => 3,
                ErrorKind::Numerical => 4,
            },
            Failure::Io(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(m) => m.clone(),
        }
    }
}

fn diagnostic(err: &mut dyn Write, level: &str, code: i32, msg: &str) {
    let msg = msg.lines().next().unwrap_or("").replace('\\', "\\\\").replace('"', "\\\"");
    let _ = writeln!(err, "level={level} code={code} msg=\"{msg}\"");
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(out, "{e}");
                return if e.kind() == K::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            }
            let text = e.to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            diagnostic(err, "error", 2, first.trim_start_matches("error: "));
            return 2;
        }
    };
    match execute(cli.command, err) {
        Ok(text) => match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
            Ok(()) => 0,
            Err(e) => {
                diagnostic(err, "error", 2, &format!("writing output: {e}"));
                2
            }
        },
        Err(f) => {
            let code = f.exit_code();
            diagnostic(err, "error", code, &f.message());
            code
        }
    }
}

fn load(path: &PathBuf) -> Result<OscillatorNetwork, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(parse_network(&text)?)
}

fn env_from_beta(beta: f64) -> Result<ThermalEnvironment, Failure> {
    Ok(ThermalEnvironment::new(beta)?)
}

fn execute(command: Command, err: &mut dyn Write) -> Result<String, Failure> {
    match command {
        Command::Modes { network } => {
            let net = load(&network)?;
            let basis = simultaneous_diagonalize(&net)?;
            Ok(modes_document(&basis)?)
        }
        Command::Cov(p) => {
            let basis = simultaneous_diagonalize(&load(&p.network)?)?;
            let env = env_from_beta(p.beta)?;
            let pc = pair_covariance(&basis, env, p.sites.0, p.sites.1)?;
            Ok(emit(&[CovarianceRecord { beta: p.beta, pc }], p.format))
        }
        Command::Entangle(p) => {
            let basis = simultaneous_diagonalize(&load(&p.network)?)?;
            let env = env_from_beta(p.beta)?;
            let pc = pair_covariance(&basis, env, p.sites.0, p.sites.1)?;
            let report = entanglement_report(&pc)?;
            Ok(emit(&[EntanglementRecord { beta: p.beta, pc, report }], p.format))
        }
        Command::Sweep { network, sites, tmin, tmax, steps, log, format } => {
            let basis = simultaneous_diagonalize(&load(&network)?)?;
            let grid = temperature_grid(tmin, tmax, steps, log)?;
            let rows = sweep(&basis, sites, &grid)?;
            Ok(emit(&rows, format))
        }
        Command::Tcrit { network, sites, tlo, thi } => {
            if !(tlo > 0.0 && thi > tlo && thi.is_finite()) {
                return Err(Error::InvalidParameter(format!("invalid temperature bracket [{tlo}, {thi}]")).into());
            }
            let basis = simultaneous_diagonalize(&load(&network)?)?;
            match critical_temperature_in_basis(&basis, sites.0, sites.1, tlo, thi)? {
                CriticalTemperature::Crossing(t) => Ok(format!("{}\n", format_float(t))),
                CriticalTemperature::Separable => Ok("none\n".into()),
                CriticalTemperature::NoCrossing { t_max } => {
                    diagnostic(err, "warn", 0, &format!("no crossing in range: still entangled at T={}", format_float(t_max)));
                    Ok("none\n".into())
                }
            }
        }
        Command::Compare { kind, n, separation, beta, mass, onsite, coupling, format } => {
            let env = env_from_beta(beta)?;
            Ok(emit_table(&compare(&kind, n, separation, env, mass, onsite, coupling)?, format))
        }
    }
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// JSON document describing a normal-mode basis; matrices are row-major.
pub fn modes_document(basis: &NormalModeBasis) -> Result<String, Error> {
    let omega = mode_frequencies(basis)?;
    let doc = json!({
        "n": basis.n(),
        "mu": basis.mu(),
        "lambdas": basis.lambdas(),
        "omega": omega,
        "r_diag": basis.r_diag(),
        "s": matrix_rows(basis.s()),
        "a": matrix_rows(basis.a()),
        "a_inv": matrix_rows(basis.a_inv()),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("finite values serialize");
    text.push('\n');
    Ok(text)
}

/// Temperatures from `tmin` to `tmax` inclusive; a single step yields `[tmin]`.
pub fn temperature_grid(tmin: f64, tmax: f64, steps: usize, log: bool) -> Result<Vec<f64>, Error> {
    if !(tmin > 0.0 && tmax >= tmin && tmax.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < tmin <= tmax, got tmin={tmin}, tmax={tmax}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    if steps == 1 {
        return Ok(vec![tmin]);
    }
    let last = (steps - 1) as f64;
    let mut grid: Vec<f64> = (0..steps)
        .map(|k| {
            let f = k as f64 / last;
            if log {
                (tmin.ln() + f * (tmax.ln() - tmin.ln())).exp()
            } else {
                tmin + f * (tmax - tmin)
            }
        })
        .collect();
    grid[0] = tmin;
    grid[steps - 1] = tmax;
    Ok(grid)
}

/// One temperature of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub temperature: f64,
    pub i: usize,
    pub j: usize,
    pub l_value: f64,
    pub log_negativity: f64,
    pub entangled: bool,
}

impl Record for SweepRow {
    fn columns() -> Vec<String> {
        ["temperature", "i", "j", "L", "E_N", "entangled"].map(String::from).to_vec()
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            self.temperature.into(),
            self.i.into(),
            self.j.into(),
            self.l_value.into(),
            self.log_negativity.into(),
            self.entangled.into(),
        ]
    }
}

/// Evaluates the pair on every grid temperature in parallel; rows keep grid order.
pub fn sweep(basis: &NormalModeBasis, sites: (usize, usize), grid: &[f64]) -> Result<Vec<SweepRow>, Error> {
    grid.par_iter()
        .map(|&t| {
            let env = ThermalEnvironment::from_temperature(t)?;
            let pc = pair_covariance(basis, env, sites.0, sites.1)?;
            Ok(SweepRow {
                temperature: t,
                i: sites.0,
                j: sites.1,
                l_value: separability_l(&pc),
                log_negativity: log_negativity(&pc)?,
                entangled: is_entangled(&pc),
            })
        })
        .collect()
}

struct CovarianceRecord {
    beta: f64,
    pc: PairCovariance,
}

impl Record for CovarianceRecord {
    fn columns() -> Vec<String> {
        ["i", "j", "beta", "A", "E", "C", "G", "H", "J"].map(String::from).to_vec()
    }

    fn cells(&self) -> Vec<Cell> {
        let pc = &self.pc;
        vec![
            pc.site_i.into(),
            pc.site_j.into(),
            self.beta.into(),
            pc.a.into(),
            pc.e.into(),
            pc.c.into(),
            pc.g.into(),
            pc.h.into(),
            pc.j.into(),
        ]
    }
}

struct EntanglementRecord {
    beta: f64,
    pc: PairCovariance,
    report: EntanglementReport,
}

impl Record for EntanglementRecord {
    fn columns() -> Vec<String> {
        let mut c = CovarianceRecord::columns();
        c.extend(["L", "E_N", "nu_min", "entangled"].map(String::from));
        c
    }

    fn cells(&self) -> Vec<Cell> {
        let mut cells = CovarianceRecord { beta: self.beta, pc: self.pc }.cells();
        cells.extend([
            self.report.l_value.into(),
            self.report.log_negativity.into(),
            self.report.nu_tilde.0.into(),
            self.report.entangled.into(),
        ]);
        cells
    }
}

/// Side-by-side `L` and `E_N` of uniform chains for the pairs `(i, i + separation)`.
pub fn compare(
    kinds: &[ChainKind],
    n: usize,
    separation: usize,
    env: ThermalEnvironment,
    mass: f64,
    onsite: f64,
    coupling: f64,
) -> Result<Table, Error> {
    if kinds.is_empty() {
        return Err(Error::InvalidParameter("at least one chain kind is required".into()));
    }
    if separation == 0 || separation >= n {
        return Err(Error::InvalidParameter(format!(
            "separation must be in 1..{n}, got {separation}"
        )));
    }
    let mut kinds = kinds.to_vec();
    kinds.dedup();
    let bases = kinds
        .iter()
        .map(|&k| simultaneous_diagonalize(&make_chain(k, n, mass, onsite, coupling)?))
        .collect::<Result<Vec<_>, _>>()?;

    let mut columns = vec!["i".to_string(), "j".to_string(), "separation".to_string()];
    for k in &kinds {
        columns.push(format!("{k}_L"));
        columns.push(format!("{k}_E_N"));
    }
    let mut table = Table::new(columns);
    for i in 1..=(n - separation) {
        let j = i + separation;
        let mut row: Vec<Cell> = vec![i.into(), j.into(), separation.into()];
        for basis in &bases {
            let pc = pair_covariance(basis, env, i, j)?;
            row.push(separability_l(&pc).into());
            row.push(log_negativity(&pc)?.into());
        }
        table.push(row);
    }
    Ok(table)
}
