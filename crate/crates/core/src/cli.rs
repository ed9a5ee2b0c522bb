//! Batch command-line front end.
//!
//! Every subcommand reads a [`RunConfig`] assembled from built-in defaults, an
//! optional `key = value` config file and command-line flags (flags win), runs
//! one computation and writes a CSV or JSON table whose header records the
//! version, the effective configuration and the seed.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 failed numerical check,
//! 3 malformed or invalid configuration.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::ctrw::{self, Bin, CtrwModel, JumpModel, WaitingTimeModel};
use crate::fourier::{self, LocallyConstantFunction};
use crate::fractional::{self, FractionalSolution, Initial, WalkParams};
use crate::haar::{self, KNorm, RadialFunction};
use crate::levy::{self, LevyKernel};
use crate::number::MadicNumber;
use crate::special;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "MADIC_OUTPUT_DIR";

const NOTICE: &str = "the integer base m stands in for the prime p of the classical p-adic statements";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Haar measures and character integrals of balls, spheres and |x|^power.
    Integrate,
    /// Fourier transform of a locally constant function.
    Fourier,
    /// Symbol of the Vladimirov kernel against -|k|^alpha.
    LevySymbol,
    /// Monte Carlo CTRW shell histogram against the exact marginal.
    CtrwSim,
    /// Shell values of the fractional-time walk.
    Solve,
    /// Survival probability with its two-sided bounds.
    Survival,
    /// Cross-module invariant checks.
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Integrate => "integrate",
            Command::Fourier => "fourier",
            Command::LevySymbol => "levy-symbol",
            Command::CtrwSim => "ctrw-sim",
            Command::Solve => "solve",
            Command::Survival => "survival",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Start {
    /// Delta function at the origin.
    Point,
    /// Indicator of the unit ball.
    Ball,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub mass: f64,
    pub symbol: f64,
    pub tv: f64,
    pub roundtrip: f64,
}

/// The effective configuration of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub m: u32,
    pub alpha: f64,
    pub beta: f64,
    pub times: Vec<f64>,
    pub samples: u64,
    pub seed: u64,
    pub shells: (i64, i64),
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub lambda: f64,
    pub eta: Option<i64>,
    pub initial: Start,
    pub support: i64,
    pub constancy: i64,
    pub input: Option<PathBuf>,
    pub knorm: Option<i64>,
    pub power: f64,
    pub kernel_shells: usize,
}

/// Options shared by every subcommand; each is also a config-file key
/// (with `-` or `_`).
#[derive(Args, Clone, Debug, Default, PartialEq)]
pub struct Options {
    /// Config file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub m: Option<u32>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Comma-separated times.
    #[arg(long, global = true, value_delimiter = ',', num_args = 1..)]
    pub t: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Shell window `lo,hi`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_window)]
    pub shells: Option<(i64, i64)>,
    #[arg(long, global = true)]
    pub mass_tol: Option<f64>,
    #[arg(long, global = true)]
    pub symbol_tol: Option<f64>,
    #[arg(long, global = true)]
    pub tv_tol: Option<f64>,
    #[arg(long, global = true)]
    pub roundtrip_tol: Option<f64>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Rate of exponential waiting times.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Diffusive scaling level: jumps scaled by m^-eta.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eta: Option<i64>,
    #[arg(long, global = true)]
    pub initial: Option<Start>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub support: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub constancy: Option<i64>,
    /// CSV (`digits,re,im`) of the function to transform.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Exponent e of |k| = m^e.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub knorm: Option<i64>,
    /// Exponent of the radial integrand |x|^power.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub power: Option<f64>,
    #[arg(long, global = true)]
    pub kernel_shells: Option<usize>,
}

#[derive(Parser, Debug)]
#[command(name = "madic", version, about = "m-adic analysis and random walks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

fn parse_window(s: &str) -> std::result::Result<(i64, i64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let lo = a.parse::<i64>().map_err(|e| e.to_string())?;
            let hi = b.parse::<i64>().map_err(|e| e.to_string())?;
            Ok((lo, hi))
        }
        _ => Err(format!("expected `lo,hi`, got `{s}`")),
    }
}

/// Failure of a run, carrying its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Check(String),
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Check(_) => 2,
            CliError::Config(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Check(s) => write!(f, "check failed: {s}"),
            CliError::Config(s) => write!(f, "bad configuration: {s}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn check_err(e: crate::Error) -> CliError {
    CliError::Check(e.to_string())
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> CliResult<Options> {
    let mut o = Options::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", n + 1)))?;
        let (key, value) = (key.trim().replace('-', "_"), value.trim());
        let bad = |e: String| CliError::Config(format!("line {}: {key}: {e}", n + 1));
        fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            v.parse::<T>().map_err(|e| format!("`{v}`: {e}"))
        }
        fn choice<T: ValueEnum>(v: &str) -> std::result::Result<T, String> {
            T::from_str(v, true)
        }
        match key.as_str() {
            "m" => o.m = Some(num(value).map_err(bad)?),
            "alpha" => o.alpha = Some(num(value).map_err(bad)?),
            "beta" => o.beta = Some(num(value).map_err(bad)?),
            "t" => {
                o.t = Some(value.split(',').map(|v| num(v.trim())).collect::<std::result::Result<_, _>>().map_err(bad)?)
            }
            "samples" => o.samples = Some(num(value).map_err(bad)?),
            "seed" => o.seed = Some(num(value).map_err(bad)?),
            "shells" => o.shells = Some(parse_window(value).map_err(bad)?),
            "mass_tol" => o.mass_tol = Some(num(value).map_err(bad)?),
            "symbol_tol" => o.symbol_tol = Some(num(value).map_err(bad)?),
            "tv_tol" => o.tv_tol = Some(num(value).map_err(bad)?),
            "roundtrip_tol" => o.roundtrip_tol = Some(num(value).map_err(bad)?),
            "output" => o.output = Some(PathBuf::from(value)),
            "format" => o.format = Some(choice(value).map_err(bad)?),
            "lambda" => o.lambda = Some(num(value).map_err(bad)?),
            "eta" => o.eta = Some(num(value).map_err(bad)?),
            "initial" => o.initial = Some(choice(value).map_err(bad)?),
            "support" => o.support = Some(num(value).map_err(bad)?),
            "constancy" => o.constancy = Some(num(value).map_err(bad)?),
            "input" => o.input = Some(PathBuf::from(value)),
            "knorm" => o.knorm = Some(num(value).map_err(bad)?),
            "power" => o.power = Some(num(value).map_err(bad)?),
            "kernel_shells" => o.kernel_shells = Some(num(value).map_err(bad)?),
            _ => return Err(CliError::Config(format!("line {}: unknown key `{key}`", n + 1))),
        }
    }
    Ok(o)
}

/// Merges flags over the config file over the defaults and validates.
pub fn parse_config(command: Command, flags: Options, file: Option<&str>) -> CliResult<RunConfig> {
    let f = match file {
        Some(text) => parse_config_text(text)?,
        None => Options::default(),
    };
    let c = RunConfig {
        command,
        m: flags.m.or(f.m).unwrap_or(3),
        alpha: flags.alpha.or(f.alpha).unwrap_or(1.0),
        beta: flags.beta.or(f.beta).unwrap_or(0.5),
        times: flags.t.or(f.t).unwrap_or_else(|| vec![1.0]),
        samples: flags.samples.or(f.samples).unwrap_or(100_000),
        seed: flags.seed.or(f.seed).unwrap_or(0),
        shells: flags.shells.or(f.shells).unwrap_or((-40, 40)),
        tolerances: Tolerances {
            mass: flags.mass_tol.or(f.mass_tol).unwrap_or(fractional::MASS_TOLERANCE),
            symbol: flags.symbol_tol.or(f.symbol_tol).unwrap_or(1e-8),
            tv: flags.tv_tol.or(f.tv_tol).unwrap_or(0.02),
            roundtrip: flags.roundtrip_tol.or(f.roundtrip_tol).unwrap_or(1e-10),
        },
        output: flags.output.or(f.output),
        format: flags.format.or(f.format).unwrap_or_default(),
        lambda: flags.lambda.or(f.lambda).unwrap_or(1.0),
        eta: flags.eta.or(f.eta),
        initial: flags.initial.or(f.initial).unwrap_or(Start::Ball),
        support: flags.support.or(f.support).unwrap_or(2),
        constancy: flags.constancy.or(f.constancy).unwrap_or(-2),
        input: flags.input.or(f.input),
        knorm: flags.knorm.or(f.knorm),
        power: flags.power.or(f.power).unwrap_or(-0.5),
        kernel_shells: flags.kernel_shells.or(f.kernel_shells).unwrap_or(levy::VLADIMIROV_WINDOW),
    };
    validate(&c)?;
    Ok(c)
}

fn validate(c: &RunConfig) -> CliResult<()> {
    let bad = |s: String| Err(CliError::Config(s));
    if c.m < 2 {
        return bad(format!("m must be an integer >= 2, got {}", c.m));
    }
    if !(c.alpha > 0.0 && c.alpha.is_finite()) {
        return bad(format!("alpha must be positive, got {}", c.alpha));
    }
    if !(c.beta > 0.0 && c.beta <= 1.0) {
        return bad(format!("beta must lie in (0, 1], got {}", c.beta));
    }
    if c.samples < 1 {
        return bad("samples must be at least 1".into());
    }
    if c.times.is_empty() || c.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return bad(format!("times must be finite and nonnegative, got {:?}", c.times));
    }
    if c.shells.0 > c.shells.1 {
        return bad(format!("empty shell window {},{}", c.shells.0, c.shells.1));
    }
    let t = c.tolerances;
    if [t.mass, t.symbol, t.tv, t.roundtrip].iter().any(|x| !(*x > 0.0)) {
        return bad("tolerances must be positive".into());
    }
    if !(c.lambda > 0.0 && c.lambda.is_finite()) {
        return bad(format!("lambda must be positive, got {}", c.lambda));
    }
    if c.support <= c.constancy {
        return bad(format!("support {} must exceed constancy {}", c.support, c.constancy));
    }
    if c.kernel_shells == 0 {
        return bad("kernel_shells must be positive".into());
    }
    Ok(())
}

impl RunConfig {
    /// Effective configuration in a fixed key order. The output path is not
    /// part of it, so identical runs written to different files agree.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let opt = |v: Option<i64>| v.map_or("none".to_string(), |x| x.to_string());
        let fmt = |f: Format| if f == Format::Csv { "csv" } else { "json" };
        vec![
            ("command", self.command.name().to_string()),
            ("m", self.m.to_string()),
            ("alpha", self.alpha.to_string()),
            ("beta", self.beta.to_string()),
            ("t", list(&self.times)),
            ("samples", self.samples.to_string()),
            ("seed", self.seed.to_string()),
            ("shells", format!("{},{}", self.shells.0, self.shells.1)),
            ("mass_tol", self.tolerances.mass.to_string()),
            ("symbol_tol", self.tolerances.symbol.to_string()),
            ("tv_tol", self.tolerances.tv.to_string()),
            ("roundtrip_tol", self.tolerances.roundtrip.to_string()),
            ("format", fmt(self.format).to_string()),
            ("lambda", self.lambda.to_string()),
            ("eta", opt(self.eta)),
            ("initial", if self.initial == Start::Ball { "ball" } else { "point" }.to_string()),
            ("support", self.support.to_string()),
            ("constancy", self.constancy.to_string()),
            ("input", self.input.as_ref().map_or("none".to_string(), |p| p.display().to_string())),
            ("knorm", opt(self.knorm)),
            ("power", self.power.to_string()),
            ("kernel_shells", self.kernel_shells.to_string()),
        ]
    }

    fn params(&self) -> CliResult<WalkParams> {
        WalkParams::new(self.m, self.alpha, self.beta).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$(Cell::from($x)),*] };
}

/// A result table plus any failed checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notice: bool,
    pub failures: Vec<String>,
}

impl Report {
    fn new(columns: &[&'static str]) -> Self {
        Report { columns: columns.to_vec(), ..Default::default() }
    }

    fn fail_if(&mut self, bad: bool, what: String) {
        if bad {
            self.failures.push(what);
        }
    }

    /// The table with its provenance header.
    pub fn render(&self, config: &RunConfig) -> String {
        match config.format {
            Format::Csv => {
                let mut out = String::new();
                let _ = writeln!(out, "# madic {VERSION}");
                for (k, v) in config.entries() {
                    let _ = writeln!(out, "# {k} = {v}");
                }
                if self.notice {
                    let _ = writeln!(out, "# notice: {NOTICE}");
                }
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for r in &self.rows {
                    out.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let cfg: Map<String, Value> = config.entries().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect()))
                    .collect();
                let mut doc = json!({
                    "version": VERSION,
                    "config": cfg,
                    "seed": config.seed,
                    "columns": self.columns,
                    "rows": rows,
                });
                if self.notice {
                    doc["notice"] = json!(NOTICE);
                }
                let mut s = serde_json::to_string_pretty(&doc).unwrap_or_default();
                s.push('\n');
                s
            }
        }
    }
}

/// Dispatches to the owning module. Check failures are listed in the report
/// rather than returned, so the table is still written.
pub fn run(config: &RunConfig) -> CliResult<Report> {
    match config.command {
        Command::Integrate => integrate(config),
        Command::Fourier => fourier_cmd(config),
        Command::LevySymbol => levy_symbol(config),
        Command::CtrwSim => ctrw_sim(config),
        Command::Solve => solve(config),
        Command::Survival => survival(config),
        Command::Selftest => selftest(config),
    }
}

fn integrate(c: &RunConfig) -> CliResult<Report> {
    let mut rep = Report::new(&["r", "ball_measure", "sphere_measure", "ball_character", "sphere_character", "radial_character", "radial_tail_bound"]);
    let k = c.knorm.map_or(KNorm::Zero, KNorm::Power);
    let f = RadialFunction::power(c.m, 1.0, c.power).map_err(check_err)?;
    for r in c.shells.0..=c.shells.1 {
        let radial = haar::radial_character_integral(&f, k, r).map_err(check_err)?;
        rep.rows.push(row![
            r,
            haar::ball_measure(c.m, r),
            haar::sphere_measure(c.m, r),
            haar::character_ball_integral(c.m, k, r),
            haar::character_sphere_integral(c.m, k, r),
            radial.value.re,
            radial.tail_bound,
        ]);
    }
    Ok(rep)
}

fn fourier_cmd(c: &RunConfig) -> CliResult<Report> {
    let f = match &c.input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            fourier::from_csv(c.m, c.support, c.constancy, &text).map_err(|e| CliError::Config(e.to_string()))?
        }
        None => {
            let r = 0.clamp(c.constancy, c.support);
            LocallyConstantFunction::ball_indicator(c.m, r, 1.0).and_then(|b| b.embed(c.support, c.constancy)).map_err(check_err)?
        }
    };
    let g = fourier::forward(&f).map_err(check_err)?;
    let back = fourier::inverse(&g).map_err(check_err)?;
    let err = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let maps = fourier::coset_index_maps(c.m, g.support(), g.constancy()).map_err(check_err)?;
    let mut rep = Report::new(&["k_digits", "k_norm", "re", "im"]);
    for (i, v) in g.values().iter().enumerate() {
        let k = fourier::x_representative(&maps, i).map_err(check_err)?;
        let digits = maps.digits(i).iter().map(|d| d.to_string()).collect::<Vec<_>>().join(":");
        rep.rows.push(row![digits, k.pseudonorm(), v.re, v.im]);
    }
    rep.fail_if(err > c.tolerances.roundtrip, format!("fourier round-trip error {err:e} exceeds {:e}", c.tolerances.roundtrip));
    Ok(rep)
}

fn levy_symbol(c: &RunConfig) -> CliResult<Report> {
    let kernel = LevyKernel::vladimirov_window(c.m, c.alpha, c.kernel_shells).map_err(check_err)?;
    let mut rep = Report::new(&["e", "k_norm", "psi", "minus_k_alpha", "relative_error"]);
    let mut worst = 0.0f64;
    for e in c.shells.0..=c.shells.1 {
        let psi = levy::levy_symbol(&kernel, KNorm::Power(e)).map_err(check_err)?;
        let target = -(c.m as f64).powi(e as i32).powf(c.alpha);
        let rel = (psi - target).abs() / target.abs().max(1.0);
        worst = worst.max(rel);
        rep.rows.push(row![e, (c.m as f64).powi(e as i32), psi, target, rel]);
    }
    rep.fail_if(worst > c.tolerances.symbol, format!("symbol identity error {worst:e} exceeds {:e}", c.tolerances.symbol));
    Ok(rep)
}

fn ctrw_model(c: &RunConfig) -> CliResult<CtrwModel> {
    let cfg = |e: crate::Error| CliError::Config(e.to_string());
    match c.eta {
        Some(eta) => CtrwModel::diffusive(c.m, c.alpha, c.beta, eta).map_err(cfg),
        None => {
            let waiting = if c.beta == 1.0 {
                WaitingTimeModel::exponential(c.lambda)
            } else {
                WaitingTimeModel::mittag_leffler(c.beta, 1.0 / c.lambda)
            }
            .map_err(cfg)?;
            Ok(CtrwModel { waiting, jumps: JumpModel::stable(c.m, c.alpha).map_err(cfg)? })
        }
    }
}

fn ctrw_sim(c: &RunConfig) -> CliResult<Report> {
    let model = ctrw_model(c)?;
    let mut rep = Report::new(&["t", "bin", "count", "frequency", "lower", "upper", "exact"]);
    for &t in &c.times {
        let h = ctrw::simulate(&model, t, c.samples, c.seed).map_err(check_err)?;
        let exact = model.shell_pmf(t, c.shells.0..=c.shells.1).map_err(check_err)?;
        let mut push = |name: String, bin: Bin, exact: f64| {
            let (lo, hi) = h.interval(bin);
            rep.rows.push(row![t, name, h.count(bin) as i64, h.frequency(bin), lo, hi, exact]);
        };
        push("zero".into(), Bin::Zero, exact.zero);
        for (&j, &p) in &exact.shells {
            push(j.to_string(), Bin::Shell(j), p);
        }
        let tv = h.tv_distance(&exact);
        rep.fail_if(tv > c.tolerances.tv, format!("total variation {tv:.4} at t = {t} exceeds {}", c.tolerances.tv));
        rep.fail_if(h.precision_warnings > 0, format!("{} paths lost digit precision at t = {t}", h.precision_warnings));
    }
    Ok(rep)
}

fn solve(c: &RunConfig) -> CliResult<Report> {
    let p = c.params()?;
    let initial = if c.initial == Start::Ball { Initial::UnitBall } else { Initial::PointMass };
    let sol = FractionalSolution::tabulate_window(p, initial, &c.times, c.shells.0, c.shells.1).map_err(check_err)?;
    let mut rep = Report::new(&["t", "j", "u", "shell_mass"]);
    rep.notice = true;
    let m = c.m as f64;
    for (n, &t) in c.times.iter().enumerate() {
        for j in c.shells.0..=c.shells.1 {
            let u = sol.value(n, j);
            rep.rows.push(row![t, j, u, u * m.powi(j as i32) * (1.0 - 1.0 / m)]);
        }
    }
    let defect = sol.max_mass_defect();
    rep.fail_if(defect > c.tolerances.mass, format!("mass defect {defect:e} exceeds {:e}", c.tolerances.mass));
    Ok(rep)
}

fn survival(c: &RunConfig) -> CliResult<Report> {
    let p = c.params()?;
    let mut rep = Report::new(&["t", "S", "lower", "upper", "branch"]);
    rep.notice = true;
    let branch = fractional::Branch::of(c.alpha).name();
    for &t in &c.times {
        let s = fractional::survival(p, t).map_err(check_err)?;
        if t == 0.0 {
            rep.rows.push(row![t, s, 1.0, 1.0, branch]);
            continue;
        }
        let (lo, hi) = fractional::sandwich_bounds(p, t).map_err(check_err)?;
        rep.fail_if(!(lo <= s && s <= hi), format!("sandwich violated at t = {t}: {lo:e} <= {s:e} <= {hi:e} fails"));
        rep.rows.push(row![t, s, lo, hi, branch]);
    }
    Ok(rep)
}

fn selftest(c: &RunConfig) -> CliResult<Report> {
    let mut rep = Report::new(&["check", "value", "tolerance", "status"]);
    let mut add = |name: &str, value: f64, tol: f64| {
        let ok = value <= tol;
        rep.rows.push(row![name, value, tol, if ok { "pass" } else { "fail" }]);
        if !ok {
            rep.failures.push(format!("{name}: {value:e} exceeds {tol:e}"));
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let e = check_err;

    let mut ring = 0.0;
    for _ in 0..200 {
        let mut draw = || {
            let d: Vec<u32> = (0..48).map(|_| rng.random_range(0..6)).collect();
            MadicNumber::from_digits(6, rng.random_range(-4..4), d)
        };
        let (x, y, z) = (draw().map_err(e)?, draw().map_err(e)?, draw().map_err(e)?);
        let lhs = x.mul(&y.add(&z).map_err(e)?).map_err(e)?;
        let rhs = x.mul(&y).map_err(e)?.add(&x.mul(&z).map_err(e)?).map_err(e)?;
        let diff = lhs.sub(&rhs).map_err(e)?;
        if !diff.is_zero() || x.add(&y).map_err(e)? != y.add(&x).map_err(e)? {
            ring += 1.0;
        }
    }
    add("ring laws (violations, m=6)", ring, 0.0);

    let values: Vec<Complex64> = (0..729).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let f = LocallyConstantFunction::new(3, 3, -3, values).map_err(e)?;
    let back = fourier::inverse(&fourier::forward(&f).map_err(e)?).map_err(e)?;
    let rt = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    add("fourier round trip (m=3, 3^6 cells)", rt, 1e-10);

    let kernel = LevyKernel::vladimirov(3, 1.5).map_err(e)?;
    let mut sym = 0.0f64;
    for k in -5..=5 {
        let psi = levy::levy_symbol(&kernel, KNorm::Power(k)).map_err(e)?;
        sym = sym.max((psi + 3f64.powi(k as i32).powf(1.5)).abs());
    }
    add("vladimirov symbol (m=3, alpha=1.5)", sym, 1e-8);

    let w = WaitingTimeModel::mittag_leffler(0.5, 1.0).map_err(e)?;
    let j = JumpModel::stable(3, 1.0).map_err(e)?;
    let mut mw = 0.0f64;
    for _ in 0..100 {
        let k = KNorm::Power(rng.random_range(-6..=6));
        let s = 10f64.powf(rng.random_range(-2.0..2.0));
        let a = ctrw::montroll_weiss(&w, &j, k, s).map_err(e)?;
        let b = ctrw::montroll_weiss_alternative(&w, &j, k, s).map_err(e)?;
        mw = mw.max((a - b).abs() / a.abs().max(1.0));
    }
    add("montroll-weiss forms agree", mw, 1e-12);

    let p = WalkParams::new(3, 1.0, 0.5).map_err(e)?;
    let sol = FractionalSolution::tabulate(p, Initial::PointMass, &[0.5, 1.0, 5.0]).map_err(e)?;
    add("green function mass defect", sol.max_mass_defect(), 1e-6);

    let p1 = WalkParams::new(3, 1.0, 1.0).map_err(e)?;
    let semigroup = LevyKernel::vladimirov(3, 1.0).map_err(e)?;
    let mut red = 0.0f64;
    for g in -2..=4 {
        let a = fractional::indicator_solution(p1, g, 1.0).map_err(e)?;
        let b = levy::evolve_ball_indicator(&semigroup, 0, 1.0, g).map_err(e)?;
        red = red.max((a - b).abs());
    }
    add("beta=1 reduction vs semigroup", red, 1e-8);

    let p2 = WalkParams::new(3, 2.0, 0.5).map_err(e)?;
    let s = fractional::survival(p2, 1e4).map_err(e)?;
    let (lo, hi) = fractional::sandwich_bounds(p2, 1e4).map_err(e)?;
    add("survival sandwich (violation, alpha=2, t=1e4)", (lo - s).max(s - hi).max(0.0), 0.0);

    let lap = fractional::laplace_of_mittag_leffler(0.5, 1.0, 1.0).map_err(e)?;
    add("mittag-leffler laplace identity", (lap - 0.5).abs(), 1e-6);
    let seam = (special::mittag_leffler(0.5, 50.0 - 1e-9).map_err(e)? - special::mittag_leffler(0.5, 50.0).map_err(e)?).abs();
    add("mittag-leffler continuity at y=50", seam, 1e-12);
    Ok(rep)
}

fn destination(config: &RunConfig) -> Option<PathBuf> {
    if config.output.is_some() {
        return config.output.clone();
    }
    let dir = std::env::var_os(OUTPUT_DIR_ENV)?;
    let ext = if config.format == Format::Csv { "csv" } else { "json" };
    Some(PathBuf::from(dir).join(format!("{}.{ext}", config.command.name())))
}

fn execute<I, T>(args: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return Ok(());
            }
            return Err(CliError::Usage(err.to_string()));
        }
    };
    let file = match &cli.options.config {
        Some(path) => Some(
            std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let config = parse_config(cli.command, cli.options, file.as_deref())?;
    let report = run(&config)?;
    let text = report.render(&config);
    match destination(&config) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(&path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => print!("{text}"),
    }
    match report.failures.is_empty() {
        true => Ok(()),
        false => Err(CliError::Check(report.failures.join("; "))),
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match execute(args) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("madic: {err}");
            err.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn options(args: &[&str]) -> (Command, Options) {
        let cli = Cli::try_parse_from(std::iter::once("madic").chain(args.iter().copied())).unwrap();
        (cli.command, cli.options)
    }

    #[test]
    fn flags_set_fields() {
        let (cmd, o) = options(&["survival", "--m", "3", "--alpha", "2", "--beta", "0.5", "--t", "100,1000"]);
        let c = parse_config(cmd, o, None).unwrap();
        assert_eq!((c.m, c.alpha, c.beta), (3, 2.0, 0.5));
        assert_eq!(c.times, vec![100.0, 1000.0]);
        assert_eq!(c.command, Command::Survival);
    }

    #[test]
    fn base_one_is_a_config_error() {
        let (cmd, o) = options(&["survival"]);
        let err = parse_config(cmd, o, Some("m = 1\n")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn flag_overrides_file() {
        let (cmd, o) = options(&["ctrw-sim", "--seed", "7"]);
        let c = parse_config(cmd, o, Some("# comment\nseed = 1\n")).unwrap();
        assert_eq!(c.seed, 7);
        let (cmd, o) = options(&["ctrw-sim"]);
        assert_eq!(parse_config(cmd, o, Some("seed = 1")).unwrap().seed, 1);
    }

    #[test]
    fn unknown_and_malformed_keys() {
        assert_eq!(parse_config_text("colour = red").unwrap_err().exit_code(), 3);
        assert_eq!(parse_config_text("alpha 2").unwrap_err().exit_code(), 3);
        assert_eq!(parse_config_text("alpha = two").unwrap_err().exit_code(), 3);
        let o = parse_config_text("shells = -3, 4\nmass-tol = 1e-3 # inline").unwrap();
        assert_eq!(o.shells, Some((-3, 4)));
        assert_eq!(o.mass_tol, Some(1e-3));
    }

    #[test]
    fn negative_window_flag() {
        let (_, o) = options(&["integrate", "--shells", "-3,2", "--knorm", "-1"]);
        assert_eq!(o.shells, Some((-3, 2)));
        assert_eq!(o.knorm, Some(-1));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["madic"]), 1);
        assert_eq!(main_with_args(["madic", "survival", "--no-such-flag"]), 1);
    }
}
