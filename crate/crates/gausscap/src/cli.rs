//! Command-line front end: single-point evaluation, sweeps, figure-data
//! emission, and oracle validation runs.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::Error;
use crate::fock::{
    attenuate_fock, attenuate_fock_unitary, classical_noise_fock, exchange_entropy_fock,
    gauss_hermite, gaussian_maximality_probe, thermal_fock, trace_norm_fock, vn_entropy,
    FockDensity, OracleChannel,
};
use crate::gaussian_state::{g_function, LogBase};
use crate::onemode::{default_grid, env_entropy_k1, report, OneModeParams, OneModeReport};

const EXIT_OK: i32 = 0;
const EXIT_VALIDATION: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_IO: i32 = 3;

/// Flattened report columns, in the order they are emitted everywhere.
pub const RECORD_COLUMNS: [&str; 17] = [
    "k", "nc", "n", "n_prime", "n0_prime", "d", "lambda1", "lambda2", "h_in", "h_out", "h_exch",
    "c_e", "c1_lower", "gain", "j", "q_g", "q_theta",
];

#[derive(Debug, Parser)]
#[command(name = "gausscap", version, about = "Capacity bounds of one-mode bosonic Gaussian channels")]
struct Cli {
    /// Plain key=value file supplying defaults; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps and figure grids (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    K,
    Nc,
    N,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Preset {
    Quick,
    Full,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every closed-form quantity at one (k, nc, n) point.
    Onemode {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        nc: Option<f64>,
        #[arg(long)]
        n: Option<f64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Emit the data grid behind one of the five standard figures as CSV.
    Figure {
        #[arg(long)]
        id: Option<u8>,
        /// Output path (default figure<id>.csv).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of grid steps.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Sweep one parameter over a linear range, holding the others fixed.
    Sweep {
        #[arg(long, value_enum)]
        param: Option<SweepParam>,
        #[arg(long)]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        nc: Option<f64>,
        #[arg(long)]
        n: Option<f64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Check the closed forms against the truncated-Fock-space oracle.
    Validate {
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, value_enum)]
        preset: Option<Preset>,
    },
}

/// Top-level entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            code
        }
    }
}

struct CliError {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_err(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_IO,
        message: message.into(),
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        usage(e.to_string())
    }
}

fn log_base_from_env() -> Result<LogBase, CliError> {
    match std::env::var("GAUSSCAP_LOG_BASE") {
        Err(_) => Ok(LogBase::Bits),
        Ok(v) if v == "2" => Ok(LogBase::Bits),
        Ok(v) if v == "e" => Ok(LogBase::Nats),
        Ok(v) => Err(usage(format!(
            "GAUSSCAP_LOG_BASE must be \"2\" or \"e\", got {v:?}"
        ))),
    }
}

/// Reads a plain key=value defaults file; '#' starts a comment.
fn read_config(path: &PathBuf) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| io_err(format!("cannot read {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage(format!(
                "{}:{}: expected key=value, got {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Config(HashMap<String, String>);

impl Config {
    fn resolve<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| usage(format!("config key {key} has unparsable value {raw:?}"))),
        }
    }

    fn require<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, CliError> {
        self.resolve(flag, key)?
            .ok_or_else(|| usage(format!("missing required parameter --{key}")))
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let config = Config(match &cli.config {
        Some(path) => read_config(path)?,
        None => HashMap::new(),
    });
    let threads = config.resolve(cli.threads, "threads")?;
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            if t == 0 {
                return Err(usage("--threads must be positive"));
            }
            builder = builder.num_threads(t);
        }
        builder
            .build()
            .map_err(|e| usage(format!("cannot build worker pool: {e}")))?
    };
    match cli.command {
        Command::Onemode { k, nc, n, format } => {
            let k = config.require(k, "k")?;
            let nc = config.resolve(nc, "nc")?.unwrap_or(0.0);
            let n = config.require(n, "n")?;
            let format = resolve_format(&config, format)?;
            cmd_onemode(k, nc, n, format)
        }
        Command::Figure { id, out, steps } => {
            let id = config.require(id, "id")?;
            let out = config
                .resolve(out, "out")?
                .unwrap_or_else(|| PathBuf::from(format!("figure{id}.csv")));
            let steps = config.resolve(steps, "steps")?;
            pool.install(|| cmd_figure(id, &out, steps))
        }
        Command::Sweep {
            param,
            from,
            to,
            steps,
            k,
            nc,
            n,
            format,
        } => {
            let param = match param {
                Some(p) => p,
                None => match config.0.get("param").map(String::as_str) {
                    Some("k") => SweepParam::K,
                    Some("nc") => SweepParam::Nc,
                    Some("n") => SweepParam::N,
                    Some(other) => {
                        return Err(usage(format!("unknown sweep parameter {other:?}")))
                    }
                    None => return Err(usage("missing required parameter --param")),
                },
            };
            let from = config.require(from, "from")?;
            let to = config.require(to, "to")?;
            let steps = config.require(steps, "steps")?;
            let k = config.resolve(k, "k")?;
            let nc = config.resolve(nc, "nc")?;
            let n = config.resolve(n, "n")?;
            let format = resolve_format(&config, format)?;
            pool.install(|| cmd_sweep(param, from, to, steps, k, nc, n, format))
        }
        Command::Validate { cutoff, preset } => {
            let cutoff = config.resolve(cutoff, "cutoff")?.unwrap_or(60);
            let preset = match preset {
                Some(p) => p,
                None => match config.0.get("preset").map(String::as_str) {
                    Some("quick") | None => Preset::Quick,
                    Some("full") => Preset::Full,
                    Some(other) => return Err(usage(format!("unknown preset {other:?}"))),
                },
            };
            pool.install(|| cmd_validate(cutoff, preset))
        }
    }
}

fn resolve_format(config: &Config, flag: Option<Format>) -> Result<Format, CliError> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match config.0.get("format").map(String::as_str) {
        Some("json") => Ok(Format::Json),
        Some("csv") => Ok(Format::Csv),
        Some("text") | None => Ok(Format::Text),
        Some(other) => Err(usage(format!("unknown format {other:?}"))),
    }
}

/// 12 significant digits; infinities as "inf"/"-inf".
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{:.11e}", x)
    }
}

fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig(x).parse().unwrap()
    } else {
        x
    }
}

fn record_values(rep: &OneModeReport) -> [f64; 17] {
    [
        rep.k,
        rep.nc,
        rep.n,
        rep.n_prime,
        rep.n0_prime,
        rep.d,
        rep.lambda_abs[0],
        rep.lambda_abs[1],
        rep.h_in,
        rep.h_out,
        rep.h_exch,
        rep.c_e,
        rep.c1_lower,
        rep.gain,
        rep.j,
        rep.q_g,
        rep.q_theta,
    ]
}

fn record_json(rep: &OneModeReport) -> serde_json::Value {
    let mut obj = serde_json::Map::new();
    for (name, value) in RECORD_COLUMNS.iter().zip(record_values(rep)) {
        let entry = if value.is_finite() {
            // reparse the rendered form so JSON carries the same 12
            // significant digits as the other formats
            serde_json::Number::from_f64(fmt_sig(value).parse().unwrap())
                .map(serde_json::Value::Number)
                .unwrap()
        } else {
            serde_json::Value::String(fmt_sig(value))
        };
        obj.insert((*name).to_string(), entry);
    }
    serde_json::Value::Object(obj)
}

fn csv_row(rep: &OneModeReport) -> String {
    record_values(rep)
        .iter()
        .map(|&v| fmt_sig(v))
        .collect::<Vec<_>>()
        .join(",")
}

fn text_block(rep: &OneModeReport) -> String {
    let mut out = String::new();
    for (name, value) in RECORD_COLUMNS.iter().zip(record_values(rep)) {
        let _ = writeln!(out, "{name} = {}", fmt_sig(value));
    }
    out
}

fn cmd_onemode(k: f64, nc: f64, n: f64, format: Format) -> Result<i32, CliError> {
    let base = log_base_from_env()?;
    let params = OneModeParams::new(k, nc)?;
    let rep = report(params, n)?.in_base(base);
    match format {
        Format::Text => print!("{}", text_block(&rep)),
        Format::Csv => {
            println!("{}", RECORD_COLUMNS.join(","));
            println!("{}", csv_row(&rep));
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("schema".into(), serde_json::json!(1));
            obj.insert("record".into(), record_json(&rep));
            println!("{}", serde_json::Value::Object(obj));
        }
    }
    Ok(EXIT_OK)
}

fn cmd_figure(id: u8, out: &PathBuf, steps: Option<usize>) -> Result<i32, CliError> {
    let mut grid = default_grid(id)?;
    if let Some(s) = steps {
        grid.steps = s;
    }
    let table = crate::onemode::figure_data(id, &grid)?;
    let mut text = table.columns.join(",");
    text.push('\n');
    let rendered: Vec<String> = table
        .rows
        .par_iter()
        .map(|row| {
            row.iter()
                .map(|&v| fmt_sig(v))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    for line in rendered {
        text.push_str(&line);
        text.push('\n');
    }
    std::fs::write(out, text).map_err(|e| io_err(format!("cannot write {}: {e}", out.display())))?;
    println!("wrote {} ({} rows)", out.display(), table.rows.len());
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
    k: Option<f64>,
    nc: Option<f64>,
    n: Option<f64>,
    format: Format,
) -> Result<i32, CliError> {
    if !(from < to) {
        return Err(usage(format!("sweep range [{from}, {to}] is empty")));
    }
    if steps < 2 {
        return Err(usage("sweep needs at least 2 steps"));
    }
    let base = log_base_from_env()?;
    let fixed = |value: Option<f64>, name: &str| {
        value.ok_or_else(|| usage(format!("this sweep needs a fixed --{name}")))
    };
    let (k, nc, n) = match param {
        SweepParam::K => (f64::NAN, nc.unwrap_or(0.0), fixed(n, "n")?),
        SweepParam::Nc => (fixed(k, "k")?, f64::NAN, fixed(n, "n")?),
        SweepParam::N => (fixed(k, "k")?, nc.unwrap_or(0.0), f64::NAN),
    };
    // Parameters are quantized to the 12 digits they will be printed
    // with, so recomputing a row from an emitted file reproduces the
    // derived columns instead of drifting by the rounding of the inputs.
    let (k, nc, n) = (round_sig(k), round_sig(nc), round_sig(n));
    let values: Vec<f64> = (0..steps)
        .map(|i| round_sig(from + (to - from) * i as f64 / (steps - 1) as f64))
        .collect();
    let reports: Result<Vec<OneModeReport>, Error> = values
        .par_iter()
        .map(|&x| {
            let (kk, cc, nn) = match param {
                SweepParam::K => (x, nc, n),
                SweepParam::Nc => (k, x, n),
                SweepParam::N => (k, nc, x),
            };
            Ok(report(OneModeParams::new(kk, cc)?, nn)?.in_base(base))
        })
        .collect();
    let reports = reports?;
    match format {
        Format::Text => {
            for rep in &reports {
                print!("{}\n", text_block(rep));
            }
        }
        Format::Csv => {
            println!("{}", RECORD_COLUMNS.join(","));
            for rep in &reports {
                println!("{}", csv_row(rep));
            }
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("schema".into(), serde_json::json!(1));
            obj.insert(
                "records".into(),
                serde_json::Value::Array(reports.iter().map(record_json).collect()),
            );
            println!("{}", serde_json::Value::Object(obj));
        }
    }
    Ok(EXIT_OK)
}

struct Check {
    name: &'static str,
    achieved: Result<f64, Error>,
    tolerance: f64,
}

fn check(name: &'static str, tolerance: f64, f: impl FnOnce() -> Result<f64, Error>) -> Check {
    Check {
        name,
        achieved: f(),
        tolerance,
    }
}

fn validation_checks(cutoff: usize) -> Vec<Check> {
    let g = |x: f64| g_function(x).unwrap();
    vec![
        check("thermal_entropy_n1", 1e-6, || {
            Ok((vn_entropy(&thermal_fock(1.0, cutoff)?) - g(1.0)).abs())
        }),
        check("attenuator_output_entropy", 1e-4, || {
            let out = attenuate_fock(&thermal_fock(1.0, cutoff)?, 0.8)?;
            Ok((vn_entropy(&out) - g(0.64)).abs())
        }),
        check("kraus_vs_unitary_dilation", 1e-10, || {
            let c = cutoff.min(20);
            let mut m = nalgebra::DMatrix::<num_complex::Complex64>::zeros(c, c);
            let mut p = 0.5;
            for i in 0..9.min(c) {
                m[(i, i)] = num_complex::Complex64::new(p, 0.0);
                p *= 0.5;
            }
            let rho = FockDensity::new(m)?;
            let a = attenuate_fock(&rho, 0.7)?;
            let b = attenuate_fock_unitary(&rho, 0.7)?;
            Ok((a.matrix() - b.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max))
        }),
        check("noise_output_entropy", 1e-4, || {
            let out = classical_noise_fock(&thermal_fock(0.0, cutoff)?, 0.5, 24)?;
            Ok((vn_entropy(&out) - g(0.5)).abs())
        }),
        check("noise_exchange_vs_env_route", 1e-3, || {
            let hx = exchange_entropy_fock(1.0, 0.5, 1.0, cutoff)?;
            Ok((hx - env_entropy_k1(1.0, 0.5)?.entropy).abs())
        }),
        check("attenuator_exchange_entropy", 1e-3, || {
            let hx = exchange_entropy_fock(0.8, 0.0, 1.0, cutoff)?;
            let rep = report(OneModeParams::new(0.8, 0.0)?, 1.0)?;
            Ok((hx - rep.h_exch).abs())
        }),
        check("combined_channel_exchange", 1e-3, || {
            let hx = exchange_entropy_fock(0.5, 0.5, 0.2, cutoff)?;
            let rep = report(OneModeParams::new(0.5, 0.5)?, 0.2)?;
            Ok((hx - rep.h_exch).abs())
        }),
        check("combined_channel_output", 1e-4, || {
            let ch = OracleChannel::new(0.5, 0.5)?;
            let out = ch.apply(&thermal_fock(0.2, cutoff)?)?;
            let rep = report(OneModeParams::new(0.5, 0.5)?, 0.2)?;
            Ok((vn_entropy(&out) - rep.h_out).abs())
        }),
        check("identity_mutual_info", 1e-6, || {
            let ch = OracleChannel::new(1.0, 0.0)?;
            let rho = thermal_fock(1.0, cutoff.min(30))?;
            Ok((ch.mutual_info(&rho)? - 2.0 * g(1.0)).abs())
        }),
        check("trace_norm_transposed_region", 1e-5, || {
            Ok((trace_norm_fock(0.25, cutoff)? - 2.0).abs())
        }),
        check("trace_norm_physical_region", 1e-5, || {
            Ok((trace_norm_fock(3.0, cutoff)? - 1.0).abs())
        }),
        check("quadrature_moments", 1e-9, || {
            let (nodes, weights) = gauss_hermite(24);
            let rootpi = std::f64::consts::PI.sqrt();
            let s0: f64 = weights.iter().sum();
            let s2: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x * x).sum();
            Ok((s0 - rootpi).abs().max((s2 - rootpi / 2.0).abs()))
        }),
    ]
}

fn probe_checks(cutoff: usize) -> Vec<Check> {
    let mut checks = Vec::new();
    for (name, k, nc) in [
        ("maximality_probe_k0.8", 0.8, 0.0),
        ("maximality_probe_k0.6_nc0.3", 0.6, 0.3),
    ] {
        let worst: Result<f64, Error> = (|| {
            let ch = OracleChannel::new(k, nc)?;
            let excesses: Result<Vec<f64>, Error> = (0..20u64)
                .into_par_iter()
                .map(|seed| {
                    let res = gaussian_maximality_probe(&ch, 0.8, seed, cutoff.min(24))?;
                    Ok(res.i_perturbed - res.i_gaussian)
                })
                .collect();
            Ok(excesses?.into_iter().fold(f64::NEG_INFINITY, f64::max))
        })();
        checks.push(Check {
            name,
            achieved: worst,
            tolerance: 1e-6,
        });
    }
    checks
}

fn cmd_validate(cutoff: usize, preset: Preset) -> Result<i32, CliError> {
    let mut checks = validation_checks(cutoff);
    if preset == Preset::Full {
        checks.extend(probe_checks(cutoff));
    }
    let mut failures = 0;
    for c in checks {
        match c.achieved {
            Ok(err) if err <= c.tolerance => {
                println!("PASS {}: error {} within {}", c.name, fmt_sig(err), c.tolerance);
            }
            Ok(err) => {
                failures += 1;
                println!("FAIL {}: error {} exceeds {}", c.name, fmt_sig(err), c.tolerance);
            }
            Err(e) => {
                failures += 1;
                println!("FAIL {}: {e}", c.name);
            }
        }
    }
    if failures == 0 {
        println!("all checks passed");
        Ok(EXIT_OK)
    } else {
        println!("{failures} check(s) failed");
        Ok(EXIT_VALIDATION)
    }
}
