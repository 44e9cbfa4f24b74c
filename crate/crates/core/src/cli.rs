//! Command-line experiment runner. Parameters come from flags or a JSON
//! config file (`--config`); flags win. Exit codes: 0 success, 2 invalid
//! input, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bell::{chsh_maximize, horodecki_max, ChshStrategy};
use crate::dynamics::{
    alpha_eta_with, evolve_fock, evolve_spin, fock_trajectory_csv, identify_eta_convention,
    spin_trajectory_csv, Drive, DriveSpec, EnergyConvention, EvolveOptions, LinearSpinHamiltonian,
};
use crate::error::Error;
use crate::fock::{fock_state, glauber_cs, split_fock, SplitSpec};
use crate::qcore::{Factor, SpaceDescriptor, StateVector};
use crate::random::{haar_state, sample_rng};
use crate::spin::{basis_state, spin_cs, split_spin, SpinCsParams, SpinPoint};
use crate::splitting::{solve_splitting_series, factorization_report, uniqueness_scan, FunctionalEquation, ScanSystem};
use crate::SpinJ;

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "COHERENCE_LAB_THREADS";

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Core(e) if e.is_validation() => write!(f, "invalid input: {e}"),
            CliError::Core(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

/// Complex number given as `a+bi` on the command line, or as a string,
/// a number, or an `[re, im]` pair in a config file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub Complex64);

pub fn parse_complex(text: &str) -> std::result::Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse '{text}' as a complex number (expected a+bi)");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split before the last sign that is not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    let re = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse::<f64>().map_err(|_| bad())?
    };
    Ok(Complex64::new(re, im))
}

impl FromStr for ComplexArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        parse_complex(s).map(ComplexArg)
    }
}

impl<'de> Deserialize<'de> for ComplexArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Real(f64),
            Pair([f64; 2]),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => parse_complex(&s).map(ComplexArg).map_err(serde::de::Error::custom),
            Raw::Real(x) => Ok(ComplexArg(Complex64::new(x, 0.0))),
            Raw::Pair([re, im]) => Ok(ComplexArg(Complex64::new(re, im))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Fock,
    Spin,
}

#[derive(Debug, Parser)]
#[command(name = "coherence-lab", version, about = "Coherent-state splitting, CHSH and trajectory experiments")]
pub struct Cli {
    /// JSON file with parameters; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for randomized commands (required by them).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a state into two subsystems and analyse the factorization.
    Split(SplitArgs),
    /// Maximize the CHSH quantity on a bipartite state.
    Chsh(ChshArgs),
    /// Integrate an oscillator or spin trajectory.
    Evolve(EvolveArgs),
    /// Randomized uniqueness scan.
    Scan(ScanArgs),
    /// Order-by-order solution of the splitting functional equation.
    Series(SeriesArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Split(_) => "split",
            Command::Chsh(_) => "chsh",
            Command::Evolve(_) => "evolve",
            Command::Scan(_) => "scan",
            Command::Series(_) => "series",
        }
    }
}

macro_rules! merge_fields {
    ($self:ident, $file:ident; $($field:ident),* $(,)?) => {
        $( if $self.$field.is_none() { $self.$field = $file.$field; } )*
    };
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitArgs {
    #[arg(long, value_enum)]
    pub system: Option<SystemKind>,
    /// Fock cutoff.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub cutoff: Option<usize>,
    /// Glauber amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<ComplexArg>,
    /// Number state instead of a Glauber state.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<ComplexArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<ComplexArg>,
    /// Beamsplitter angle: μ = cos t, ν = sin t e^{iφ}.
    #[arg(long = "split-angle", allow_hyphen_values = true)]
    #[serde(rename = "split_angle")]
    pub split_angle: Option<f64>,
    #[arg(long = "split-phase", allow_hyphen_values = true)]
    #[serde(rename = "split_phase")]
    pub split_phase: Option<f64>,
    #[arg(long = "jA")]
    #[serde(rename = "jA")]
    pub j_a: Option<f64>,
    #[arg(long = "jB")]
    #[serde(rename = "jB")]
    pub j_b: Option<f64>,
    #[arg(long = "jC")]
    #[serde(rename = "jC")]
    pub j_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<ComplexArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Magnetic quantum number of a spin basis state.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    /// Input state as JSON (as emitted in reports).
    #[arg(long = "state-file")]
    #[serde(rename = "state_file")]
    pub state_file: Option<PathBuf>,
}

impl SplitArgs {
    fn merge(mut self, file: Self) -> Self {
        merge_fields!(self, file; system, cutoff, alpha, n, mu, nu, split_angle, split_phase, j_a, j_b, j_c, zeta, theta, phi, m, state_file);
        self
    }
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshArgs {
    /// Named state: split-spin1-m0, split-spin1-zeta, split-fock-n1, random-two-qubit.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long = "state-file")]
    #[serde(rename = "state_file")]
    pub state_file: Option<PathBuf>,
    /// analytic-qubit or multistart-local-search.
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long = "n-starts")]
    #[serde(rename = "n_starts")]
    pub n_starts: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<ComplexArg>,
}

impl ChshArgs {
    fn merge(mut self, file: Self) -> Self {
        merge_fields!(self, file; state, state_file, strategy, n_starts, tol, zeta);
        self
    }
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveArgs {
    #[arg(long, value_enum)]
    pub system: Option<SystemKind>,
    /// zero, constant, sinusoid or table.
    #[arg(long)]
    pub drive: Option<String>,
    /// Constant drive value, or sinusoid amplitude.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<ComplexArg>,
    /// Sinusoid frequency ν in λ(t) = A e^{−iνt}; defaults to ω.
    #[arg(long = "drive-frequency", allow_hyphen_values = true)]
    #[serde(rename = "drive_frequency")]
    pub drive_frequency: Option<f64>,
    /// JSON file {"times": [...], "values": [[re, im], ...]}.
    #[arg(long = "drive-table")]
    #[serde(rename = "drive_table")]
    pub drive_table: Option<PathBuf>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of output times, evenly spaced on [0, tmax].
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub cutoff: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha0: Option<ComplexArg>,
    /// Largest integration sub-step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// number (ωa†a) or symmetric (ω(a†a + 1/2)).
    #[arg(long)]
    pub convention: Option<String>,
    /// Add the vacuum-energy convention comparison to JSON reports.
    #[arg(long = "eta-report")]
    #[serde(rename = "eta_report")]
    pub eta_report: Option<bool>,
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta0: Option<f64>,
    #[arg(long = "beta-plus", allow_hyphen_values = true)]
    #[serde(rename = "beta_plus")]
    pub beta_plus: Option<ComplexArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta0: Option<ComplexArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
}

impl EvolveArgs {
    fn merge(mut self, file: Self) -> Self {
        merge_fields!(self, file; system, drive, lambda, drive_frequency, drive_table, omega, tmax, points, cutoff, alpha0, dt, convention, eta_report, j, beta0, beta_plus, zeta0, theta0, phi0);
        self
    }
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub system: Option<SystemKind>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub cutoff: Option<usize>,
    #[arg(long = "jA")]
    #[serde(rename = "jA")]
    pub j_a: Option<f64>,
    #[arg(long = "jB")]
    #[serde(rename = "jB")]
    pub j_b: Option<f64>,
    #[arg(long = "jC")]
    #[serde(rename = "jC")]
    pub j_c: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

impl ScanArgs {
    fn merge(mut self, file: Self) -> Self {
        merge_fields!(self, file; system, cutoff, j_a, j_b, j_c, samples);
        self
    }
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesArgs {
    /// semisimple or heisenberg.
    #[arg(long = "case")]
    #[serde(rename = "case")]
    pub case: Option<String>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<ComplexArg>,
    #[arg(long = "f0-b", allow_hyphen_values = true)]
    #[serde(rename = "f0_b")]
    pub f0_b: Option<ComplexArg>,
    #[arg(long = "f0-c", allow_hyphen_values = true)]
    #[serde(rename = "f0_c")]
    pub f0_c: Option<ComplexArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<ComplexArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<ComplexArg>,
}

impl SeriesArgs {
    fn merge(mut self, file: Self) -> Self {
        merge_fields!(self, file; case, order, tau, f0_b, f0_c, mu, nu);
        self
    }
}

/// Global settings after merging flags with the config file.
#[derive(Debug, Default)]
struct Globals {
    seed: Option<u64>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
struct FileGlobals {
    command: Option<String>,
    seed: Option<u64>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn load_config(path: &Path, command: &str) -> CliResult<(FileGlobals, Value)> {
    let text = read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return config_err(format!("{}: config must be a JSON object", path.display()));
    };
    let mut globals = Map::new();
    for key in ["command", "seed", "format", "output"] {
        if let Some(v) = map.remove(key) {
            globals.insert(key.into(), v);
        }
    }
    let globals: FileGlobals = serde_json::from_value(Value::Object(globals))
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if let Some(cmd) = &globals.command {
        if cmd != command {
            return config_err(format!("config file is for command '{cmd}', not '{command}'"));
        }
    }
    Ok((globals, Value::Object(map)))
}

fn file_args<T: serde::de::DeserializeOwned>(v: Value) -> CliResult<T> {
    serde_json::from_value(v).map_err(|e| CliError::Config(format!("config file: {e}")))
}

/// A finished report: the text to write.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub output: Option<PathBuf>,
}

/// Runs a parsed command line and returns the report.
pub fn execute(cli: Cli) -> CliResult<Report> {
    let name = cli.command.name();
    let (file_globals, file_value) = match &cli.config {
        Some(path) => load_config(path, name)?,
        None => (FileGlobals::default(), Value::Object(Map::new())),
    };
    let globals = Globals {
        seed: cli.seed.or(file_globals.seed),
        format: cli.format.or(file_globals.format),
        output: cli.output.or(file_globals.output),
    };
    let text = match cli.command {
        Command::Split(a) => run_split(a.merge(file_args(file_value)?), &globals)?,
        Command::Chsh(a) => run_chsh(a.merge(file_args(file_value)?), &globals)?,
        Command::Evolve(a) => run_evolve(a.merge(file_args(file_value)?), &globals)?,
        Command::Scan(a) => run_scan(a.merge(file_args(file_value)?), &globals)?,
        Command::Series(a) => run_series(a.merge(file_args(file_value)?), &globals)?,
    };
    Ok(Report {
        text,
        output: globals.output,
    })
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a non-negative integer, got '{raw}'")))?;
    if n > 0 {
        // A pool may already exist when embedded; the cap then stays as is.
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
    Ok(())
}

/// Entry point used by the binary: parses `args`, runs, writes the report
/// and returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = configure_threads().and_then(|_| execute(cli)).and_then(|report| {
        match &report.output {
            Some(path) => std::fs::write(path, &report.text)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
            None => {
                use std::io::Write;
                let mut out = std::io::stdout().lock();
                match out.write_all(report.text.as_bytes()).and_then(|_| out.flush()) {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                        Err(CliError::Config(format!("cannot write to standard output: {e}")))
                    }
                    _ => Ok(()),
                }
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn json_report(command: &str, mut body: Map<String, Value>) -> CliResult<String> {
    body.insert("schema_version".into(), json!(SCHEMA_VERSION));
    body.insert("command".into(), json!(command));
    let mut text = serde_json::to_string_pretty(&Value::Object(body))
        .map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn pair(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn require_json(globals: &Globals, command: &str) -> CliResult<()> {
    match globals.format {
        None | Some(Format::Json) => Ok(()),
        Some(Format::Csv) => config_err(format!("{command} reports are JSON only")),
    }
}

fn spin_j(value: Option<f64>, flag: &str) -> CliResult<SpinJ> {
    let v = value.ok_or_else(|| CliError::Config(format!("--{flag} is required")))?;
    Ok(SpinJ::from_f64(v)?)
}

fn load_state(path: &Path) -> CliResult<StateVector> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn split_spec(mu: Option<ComplexArg>, nu: Option<ComplexArg>, t: Option<f64>, phi: Option<f64>) -> CliResult<SplitSpec> {
    match (mu, nu, t) {
        (Some(mu), Some(nu), None) => Ok(SplitSpec::new(mu.0, nu.0)?),
        (None, None, Some(t)) => Ok(SplitSpec::from_angles(t, phi.unwrap_or(0.0))),
        (None, None, None) => Ok(SplitSpec::balanced()),
        _ => config_err("give both --mu and --nu, or --split-angle (with optional --split-phase)"),
    }
}

fn run_split(a: SplitArgs, globals: &Globals) -> CliResult<String> {
    require_json(globals, "split")?;
    let (system, input, output) = if let Some(path) = &a.state_file {
        let input = load_state(path)?;
        match input.space().single() {
            Some(Factor::Fock { .. }) => {
                let spec = split_spec(a.mu, a.nu, a.split_angle, a.split_phase)?;
                let out = split_fock(&input, spec)?;
                ("fock", input, out)
            }
            Some(Factor::Spin { .. }) => {
                let out = split_spin(&input, spin_j(a.j_b, "jB")?, spin_j(a.j_c, "jC")?)?;
                ("spin", input, out)
            }
            None => return config_err("state file must hold a single-factor state"),
        }
    } else {
        match a.system {
            Some(SystemKind::Fock) => {
                let cutoff = a.cutoff.ok_or_else(|| CliError::Config("--N is required".into()))?;
                let input = match (a.alpha, a.n) {
                    (Some(alpha), None) => glauber_cs(alpha.0, cutoff)?,
                    (None, Some(n)) => fock_state(n, cutoff)?,
                    _ => return config_err("give exactly one of --alpha or --n"),
                };
                let spec = split_spec(a.mu, a.nu, a.split_angle, a.split_phase)?;
                let out = split_fock(&input, spec)?;
                ("fock", input, out)
            }
            Some(SystemKind::Spin) => {
                let (ja, jb, jc) = (spin_j(a.j_a, "jA")?, spin_j(a.j_b, "jB")?, spin_j(a.j_c, "jC")?);
                let input = match (a.zeta, a.theta, a.m) {
                    (Some(z), None, None) => spin_cs(SpinCsParams { j: ja, point: SpinPoint::Zeta(z.0) })?,
                    (None, Some(theta), None) => spin_cs(SpinCsParams {
                        j: ja,
                        point: SpinPoint::Angles { theta, phi: a.phi.unwrap_or(0.0) },
                    })?,
                    (None, None, Some(m)) => {
                        let two_m = 2.0 * m;
                        if (two_m - two_m.round()).abs() > 1e-9 {
                            return config_err(format!("m = {m} is not a half-integer"));
                        }
                        basis_state(ja, two_m.round() as i32)?
                    }
                    _ => return config_err("give exactly one of --zeta, --theta or --m"),
                };
                let out = split_spin(&input, jb, jc)?;
                ("spin", input, out)
            }
            None => return config_err("--system (fock or spin) or --state-file is required"),
        }
    };
    let report = factorization_report(&output)?;
    let mut body = Map::new();
    body.insert("system".into(), json!(system));
    body.insert("input_state".into(), to_value(&input));
    body.insert("split_state".into(), to_value(&output));
    body.insert("entropy_bits".into(), json!(report.entropy_bits));
    body.insert("is_product".into(), json!(report.is_product));
    body.insert("schmidt_coefficients".into(), to_value(&report.schmidt_coefficients));
    body.insert("residual".into(), json!(report.residual));
    body.insert("factor_b".into(), to_value(&report.factor_b));
    body.insert("factor_c".into(), to_value(&report.factor_c));
    json_report("split", body)
}

fn named_state(name: &str, a: &ChshArgs, seed: Option<u64>) -> CliResult<StateVector> {
    let half = SpinJ::HALF;
    match name {
        "split-spin1-m0" => Ok(split_spin(&basis_state(SpinJ::ONE, 0)?, half, half)?),
        "split-spin1-zeta" => {
            let z = a.zeta.ok_or_else(|| CliError::Config("--zeta is required for split-spin1-zeta".into()))?;
            Ok(split_spin(&spin_cs(SpinCsParams { j: SpinJ::ONE, point: SpinPoint::Zeta(z.0) })?, half, half)?)
        }
        "split-fock-n1" => Ok(split_fock(&fock_state(1, 1)?, SplitSpec::balanced())?),
        "random-two-qubit" => {
            let seed = seed.ok_or_else(|| CliError::Config("random-two-qubit requires --seed".into()))?;
            let space = SpaceDescriptor::spin(half).tensor(&SpaceDescriptor::spin(half));
            Ok(haar_state(space, &mut sample_rng(seed, 0))?)
        }
        other => config_err(format!(
            "unknown state '{other}' (expected split-spin1-m0, split-spin1-zeta, split-fock-n1 or random-two-qubit)"
        )),
    }
}

fn run_chsh(a: ChshArgs, globals: &Globals) -> CliResult<String> {
    require_json(globals, "chsh")?;
    let (state_id, state) = match (&a.state, &a.state_file) {
        (Some(name), None) => (name.clone(), named_state(name, &a, globals.seed)?),
        (None, Some(path)) => (path.display().to_string(), load_state(path)?),
        _ => return config_err("give exactly one of --state or --state-file"),
    };
    let strategy = match a.strategy.as_deref().unwrap_or("multistart-local-search") {
        "analytic-qubit" => ChshStrategy::AnalyticQubit,
        "multistart-local-search" | "multistart" => {
            let seed = globals
                .seed
                .ok_or_else(|| CliError::Config("the multistart strategy requires --seed".into()))?;
            ChshStrategy::MultistartLocalSearch {
                n_starts: a.n_starts.unwrap_or(ChshStrategy::DEFAULT_STARTS),
                seed,
                tol: a.tol.unwrap_or(ChshStrategy::DEFAULT_TOL),
            }
        }
        other => return config_err(format!("unknown strategy '{other}'")),
    };
    let outcome = chsh_maximize(&state, strategy)?;
    let tol = match strategy {
        ChshStrategy::MultistartLocalSearch { tol, .. } => tol,
        ChshStrategy::AnalyticQubit => 1e-12,
    };
    let s = &outcome.settings;
    let mut body = Map::new();
    body.insert("state_id".into(), json!(state_id));
    body.insert("strategy".into(), json!(strategy.name()));
    body.insert("max_value".into(), json!(outcome.max_value));
    body.insert("violation_found".into(), json!(outcome.violation_found(tol)));
    body.insert(
        "settings".into(),
        json!({
            "b_sigma": s.b_sigma.angles(),
            "b_sigma_prime": s.b_sigma_prime.angles(),
            "c_rho": s.c_rho.angles(),
            "c_rho_prime": s.c_rho_prime.angles(),
        }),
    );
    let (n_starts, seed) = match strategy {
        ChshStrategy::MultistartLocalSearch { n_starts, seed, .. } => (json!(n_starts), json!(seed)),
        ChshStrategy::AnalyticQubit => (Value::Null, Value::Null),
    };
    body.insert("n_starts".into(), n_starts);
    body.insert("seed".into(), seed);
    body.insert(
        "horodecki_max".into(),
        horodecki_max(&state).map(|v| json!(v)).unwrap_or(Value::Null),
    );
    body.insert("state".into(), to_value(&state));
    json_report("chsh", body)
}

#[derive(Deserialize)]
struct DriveTable {
    times: Vec<f64>,
    values: Vec<ComplexArg>,
}

fn time_grid(tmax: Option<f64>, points: Option<usize>) -> CliResult<Vec<f64>> {
    let tmax = tmax.ok_or_else(|| CliError::Config("--tmax is required".into()))?;
    if !(tmax.is_finite() && tmax >= 0.0) {
        return config_err(format!("--tmax must be finite and >= 0, got {tmax}"));
    }
    let points = points.unwrap_or(101);
    if points < 2 {
        return config_err("--points must be at least 2");
    }
    Ok((0..points).map(|k| tmax * k as f64 / (points - 1) as f64).collect())
}

fn run_evolve(a: EvolveArgs, globals: &Globals) -> CliResult<String> {
    let grid = time_grid(a.tmax, a.points)?;
    let format = globals.format.unwrap_or(Format::Csv);
    match a.system.unwrap_or(SystemKind::Fock) {
        SystemKind::Fock => {
            let omega = a.omega.unwrap_or(1.0);
            let cutoff = a.cutoff.ok_or_else(|| CliError::Config("--N is required".into()))?;
            let lambda = a.lambda.map(|z| z.0);
            let drive = match a.drive.as_deref().unwrap_or(if lambda.is_some() { "constant" } else { "zero" }) {
                "zero" => Drive::Zero,
                "constant" => Drive::Constant {
                    lambda: lambda.ok_or_else(|| CliError::Config("--lambda is required for a constant drive".into()))?,
                },
                "sinusoid" => Drive::Sinusoid {
                    amplitude: lambda.ok_or_else(|| CliError::Config("--lambda is required for a sinusoid drive".into()))?,
                    frequency: a.drive_frequency.unwrap_or(omega),
                },
                "table" => {
                    let path = a
                        .drive_table
                        .as_ref()
                        .ok_or_else(|| CliError::Config("--drive-table is required for a table drive".into()))?;
                    let t: DriveTable = serde_json::from_str(&read_to_string(path)?)
                        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                    Drive::Table {
                        times: t.times,
                        values: t.values.into_iter().map(|z| z.0).collect(),
                    }
                }
                other => return config_err(format!("unknown drive '{other}'")),
            };
            let spec = DriveSpec::new(omega, drive)?;
            let convention = match a.convention.as_deref().unwrap_or("number") {
                "number" => EnergyConvention::NumberOperator,
                "symmetric" => EnergyConvention::Symmetric,
                other => return config_err(format!("unknown convention '{other}'")),
            };
            let alpha0 = a.alpha0.map(|z| z.0).unwrap_or_default();
            let initial = glauber_cs(alpha0, cutoff)?;
            let traj = evolve_fock(&spec, &grid, &initial, EvolveOptions { max_dt: a.dt, convention })?;
            match format {
                Format::Csv => Ok(fock_trajectory_csv(&traj)),
                Format::Json => {
                    let closed_form: Vec<Value> = grid
                        .iter()
                        .map(|&t| alpha_eta_with(&spec, alpha0, t, convention).map(|(al, _)| pair(al)))
                        .collect::<Result<_, _>>()?;
                    let mut body = Map::new();
                    body.insert("system".into(), json!("fock"));
                    body.insert("drive".into(), to_value(&spec));
                    body.insert("convention".into(), to_value(&convention));
                    body.insert("times".into(), to_value(&traj.times));
                    body.insert("alpha".into(), Value::Array(traj.alpha_track.iter().map(|z| pair(*z)).collect()));
                    body.insert("alpha_closed_form".into(), Value::Array(closed_form));
                    body.insert("eta".into(), to_value(&traj.eta_track));
                    body.insert("fidelity".into(), to_value(&traj.cs_fidelity));
                    body.insert("final_state".into(), to_value(traj.states.last().expect("non-empty grid")));
                    if a.eta_report.unwrap_or(false) {
                        let positive: Vec<f64> = grid.iter().copied().filter(|&t| t > 0.0).collect();
                        body.insert("eta_convention".into(), to_value(&identify_eta_convention(&spec, &positive, cutoff)?));
                    }
                    json_report("evolve", body)
                }
            }
        }
        SystemKind::Spin => {
            let j = spin_j(a.j, "j")?;
            let beta0 = a.beta0.unwrap_or(0.0);
            let beta_plus = a.beta_plus.map(|z| z.0).unwrap_or_default();
            let h = LinearSpinHamiltonian::new(Complex64::new(beta0, 0.0), beta_plus, beta_plus.conj())?;
            let point = match (a.zeta0, a.theta0) {
                (Some(z), None) => SpinPoint::Zeta(z.0),
                (None, Some(theta)) => SpinPoint::Angles { theta, phi: a.phi0.unwrap_or(0.0) },
                (None, None) => SpinPoint::Zeta(Complex64::new(0.0, 0.0)),
                _ => return config_err("give at most one of --zeta0 or --theta0"),
            };
            let initial = spin_cs(SpinCsParams { j, point })?;
            let traj = evolve_spin(&h, j, &grid, &initial, a.dt)?;
            match format {
                Format::Csv => Ok(spin_trajectory_csv(&traj)),
                Format::Json => {
                    let mut body = Map::new();
                    body.insert("system".into(), json!("spin"));
                    body.insert("hamiltonian".into(), to_value(&h));
                    body.insert("times".into(), to_value(&traj.times));
                    body.insert("zeta_track".into(), to_value(&traj.zeta_track));
                    body.insert("fidelity".into(), to_value(&traj.cs_fidelity));
                    body.insert("final_state".into(), to_value(traj.states.last().expect("non-empty grid")));
                    json_report("evolve", body)
                }
            }
        }
    }
}

fn run_scan(a: ScanArgs, globals: &Globals) -> CliResult<String> {
    require_json(globals, "scan")?;
    let seed = globals
        .seed
        .ok_or_else(|| CliError::Config("scan requires --seed".into()))?;
    let system = match a.system {
        Some(SystemKind::Fock) => ScanSystem::Fock {
            cutoff: a.cutoff.ok_or_else(|| CliError::Config("--N is required".into()))?,
        },
        Some(SystemKind::Spin) => ScanSystem::Spin {
            two_j_a: spin_j(a.j_a, "jA")?,
            two_j_b: spin_j(a.j_b, "jB")?,
            two_j_c: spin_j(a.j_c, "jC")?,
        },
        None => return config_err("--system (fock or spin) is required"),
    };
    let stats = uniqueness_scan(system, a.samples.unwrap_or(500), seed)?;
    let Value::Object(body) = to_value(&stats) else {
        unreachable!("ScanStats serializes to an object")
    };
    json_report("scan", body)
}

fn run_series(a: SeriesArgs, globals: &Globals) -> CliResult<String> {
    require_json(globals, "series")?;
    let one = Complex64::new(1.0, 0.0);
    let equation = match a.case.as_deref().unwrap_or("semisimple") {
        "semisimple" => {
            if a.mu.is_some() || a.nu.is_some() {
                return config_err("--mu/--nu apply to the heisenberg case only");
            }
            FunctionalEquation::Semisimple
        }
        "heisenberg" => {
            let spec = match (a.mu, a.nu) {
                (Some(mu), Some(nu)) => SplitSpec::new(mu.0, nu.0)?,
                (None, None) => SplitSpec::balanced(),
                _ => return config_err("give both --mu and --nu"),
            };
            FunctionalEquation::Heisenberg { mu: spec.mu, nu: spec.nu }
        }
        other => return config_err(format!("unknown case '{other}'")),
    };
    let sol = solve_splitting_series(
        equation,
        a.order.unwrap_or(8),
        a.tau.map_or(one, |z| z.0),
        a.f0_b.map_or(one, |z| z.0),
        a.f0_c.map_or(one, |z| z.0),
    )?;
    let coeffs = |p: &crate::splitting::SeriesPoly| Value::Array(p.coeffs.iter().map(|z| pair(*z)).collect());
    let mut body = Map::new();
    body.insert("equation".into(), to_value(&sol.equation));
    body.insert("order".into(), json!(sol.order));
    body.insert("tau".into(), pair(sol.tau));
    body.insert("f0_b".into(), pair(sol.f0_b));
    body.insert("f0_c".into(), pair(sol.f0_c));
    body.insert("a".into(), coeffs(&sol.a));
    body.insert("b".into(), coeffs(&sol.b));
    body.insert("c".into(), coeffs(&sol.c));
    body.insert("consistency".into(), to_value(&sol.consistency));
    body.insert("max_residual".into(), json!(sol.max_residual()));
    body.insert("exponential_deviation".into(), json!(sol.exponential_deviation()));
    body.insert("free_parameters".into(), json!(["tau", "f0_b", "f0_c"]));
    json_report("series", body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        let cases = [
            ("1", (1.0, 0.0)),
            ("1+0i", (1.0, 0.0)),
            ("-0.5-2i", (-0.5, -2.0)),
            ("2i", (0.0, 2.0)),
            ("i", (0.0, 1.0)),
            ("-i", (0.0, -1.0)),
            ("1e-3+2e-1i", (1e-3, 0.2)),
            ("-1e+2-3E-2i", (-100.0, -0.03)),
            (" 0.3 + 0.4i ", (0.3, 0.4)),
        ];
        for (text, (re, im)) in cases {
            assert_eq!(parse_complex(text).unwrap(), Complex64::new(re, im), "{text}");
        }
        for bad in ["", "abc", "1+", "1+2", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(Error::AntipodalPoint).exit_code(), 2);
        assert_eq!(CliError::Core(Error::NonFinite).exit_code(), 3);
        assert_eq!(
            CliError::Core(Error::StepSizeTooLarge { drift: 1.0, time: 0.0 }).exit_code(),
            3
        );
    }
}
