//! Command-line front end.
//!
//! Exit status: 0 success, 1 numerical/domain failure (degenerate input,
//! unresolvable `tau`, malformed sample values), 2 usage error, 3 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog::{self, discrete_derivative, parse_value, Params, TestFunction};
use crate::charfunc::estimate_density_charfunc;
use crate::density::DensityEstimate;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, ScalarField};
use crate::harness::{self, CompareOptions, ComparisonGrid};
use crate::reference::{detect_degenerate, histogram_oracle};
use crate::wave::{estimate_density_wave, TauParameter};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Rows required in a sample file.
pub const MIN_SAMPLE_ROWS: usize = 8;

const PAPER_TAUS: &str = "3e-4,1e-4,5e-5,1e-5";

#[derive(Debug, Parser)]
#[command(
    name = "graddens",
    version,
    about = "Density of a function's derivative from the power spectrum of exp(iS/tau)"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Estimate the derivative density with one method
    Estimate(EstimateArgs),
    /// Run both estimators and report their l1 distance
    Compare(CompareArgs),
    /// l1 distance between the estimators over a list of tau values
    Sweep(SweepArgs),
    /// Time both estimators over a list of grid sizes
    Bench(BenchArgs),
    /// Report the degenerate sets B and C of a catalog function
    Degeneracy(DegeneracyArgs),
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Catalog function (quadratic, sinusoid, exponential, sum_of_sinusoids,
    /// linear_degenerate)
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    function: Option<String>,
    /// CSV with header `x,S` sampled on a uniform grid
    #[arg(long)]
    input: Option<PathBuf>,
    /// Catalog parameter, e.g. `freq=8pi` or `b1=-0.5`; repeatable
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Samples on the catalog function's domain
    #[arg(long, default_value_t = 1 << 15)]
    n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Wave,
    Charfunc,
    Histogram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 1e-4)]
    tau: f64,
    #[arg(long, value_enum, default_value_t = Method::Wave)]
    method: Method,
    /// Histogram bins (histogram method only)
    #[arg(long, default_value_t = 256)]
    bins: usize,
    /// Output CSV (`u,p`); standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = 1e-4)]
    tau: f64,
    /// Bins of the comparison grid over [-pi, pi)
    #[arg(long, default_value_t = 512)]
    bins: usize,
    /// Directory receiving wave.csv and charfunc.csv
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Strictly descending, comma separated
    #[arg(long, default_value = PAPER_TAUS)]
    taus: String,
    #[arg(long, default_value_t = 512)]
    bins: usize,
    /// Output CSV (`tau,l1_error`); standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Ascending powers of two, comma separated
    #[arg(long, default_value = "1024,2048,4096,8192,16384")]
    ns: String,
    #[arg(long, default_value_t = 1e-4)]
    tau: f64,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Output CSV (`n,wave_seconds,charfunc_seconds`); standard output when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DegeneracyArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Query point checked against C
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    u0: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Estimate,
    Compare,
    Sweep,
    Bench,
    Degeneracy,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Catalog { name: String, params: Params },
    File(PathBuf),
}

/// A validated command line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub source: Source,
    pub n: usize,
    /// One value except for `sweep`.
    pub taus: Vec<f64>,
    pub ns: Vec<usize>,
    pub reps: usize,
    pub method: Method,
    pub bins: usize,
    pub u0: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn usage(msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(ErrorKind::ValueValidation, msg)
}

fn parse_list<T: std::str::FromStr>(
    flag: &str,
    text: &str,
) -> std::result::Result<Vec<T>, clap::Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| usage(format!("{flag}: cannot parse `{t}`")))
        })
        .collect()
}

fn source_of(args: &SourceArgs) -> std::result::Result<Source, clap::Error> {
    if let Some(path) = &args.input {
        if !args.params.is_empty() {
            return Err(usage("--param applies to catalog functions, not --input"));
        }
        return Ok(Source::File(path.clone()));
    }
    let name = args.function.clone().unwrap_or_default();
    if !catalog::NAMES.contains(&name.as_str()) {
        return Err(usage(format!(
            "--function: unknown catalog function `{name}` (expected one of {})",
            catalog::NAMES.join(", ")
        )));
    }
    let mut params = Params::new();
    for kv in &args.params {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(format!("--param: expected KEY=VALUE, got `{kv}`")))?;
        let v = parse_value(v).map_err(|e| usage(format!("--param {k}: {e}")))?;
        params.insert(k.trim().to_string(), v);
    }
    Ok(Source::Catalog { name, params })
}

/// Parses and validates `argv` (program name first).
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let config = |command, src: &SourceArgs| -> std::result::Result<RunConfig, clap::Error> {
        if src.n < 3 {
            return Err(usage(format!(
                "--n: need at least 3 samples, got {}",
                src.n
            )));
        }
        Ok(RunConfig {
            command,
            source: source_of(src)?,
            n: src.n,
            taus: Vec::new(),
            ns: Vec::new(),
            reps: 0,
            method: Method::Wave,
            bins: 512,
            u0: 0.0,
            out: None,
            format: Format::Csv,
        })
    };
    let positive = |flag: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(usage(format!("{flag}: must be positive, got {v}")))
        }
    };
    let cfg = match cli.command {
        Cmd::Estimate(a) => RunConfig {
            taus: vec![positive("--tau", a.tau)?],
            method: a.method,
            bins: a.bins,
            out: a.out,
            ..config(CommandKind::Estimate, &a.source)?
        },
        Cmd::Compare(a) => RunConfig {
            taus: vec![positive("--tau", a.tau)?],
            bins: a.bins,
            out: Some(a.out_dir),
            format: a.format,
            ..config(CommandKind::Compare, &a.source)?
        },
        Cmd::Sweep(a) => {
            let taus = parse_list::<f64>("--taus", &a.taus)?;
            for t in &taus {
                positive("--taus", *t)?;
            }
            RunConfig {
                taus,
                bins: a.bins,
                out: a.out,
                ..config(CommandKind::Sweep, &a.source)?
            }
        }
        Cmd::Bench(a) => {
            let cfg = RunConfig {
                taus: vec![positive("--tau", a.tau)?],
                ns: parse_list::<usize>("--ns", &a.ns)?,
                reps: a.reps,
                out: a.out,
                ..config(CommandKind::Bench, &a.source)?
            };
            if matches!(cfg.source, Source::File(_)) {
                return Err(usage(
                    "bench resamples the function at each size; use --function",
                ));
            }
            cfg
        }
        Cmd::Degeneracy(a) => {
            let cfg = RunConfig {
                u0: a.u0,
                format: a.format,
                ..config(CommandKind::Degeneracy, &a.source)?
            };
            if matches!(cfg.source, Source::File(_)) {
                return Err(usage(
                    "degeneracy needs an analytic function; use --function",
                ));
            }
            cfg
        }
    };
    if cfg.bins == 0 {
        return Err(usage("--bins: must be positive"));
    }
    Ok(cfg)
}

/// Samples of `S` from a CSV with header `x,S` and uniformly spaced,
/// increasing `x`. The grid is inferred with the samples at bin midpoints.
pub fn ingest_samples(path: &Path) -> Result<ScalarField> {
    let invalid = |message: String| Error::InvalidInput {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let headers = reader.headers().map_err(|e| Error::csv(path, e))?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["x", "S"] {
        return Err(Error::csv(path, "expected header `x,S`"));
    }
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for row in reader.deserialize::<(f64, f64)>() {
        let (x, v) = row.map_err(|e| Error::csv(path, e))?;
        if !(x.is_finite() && v.is_finite()) {
            return Err(invalid(format!("non-finite value on row {}", xs.len() + 1)));
        }
        xs.push(x);
        values.push(v);
    }
    if xs.len() < MIN_SAMPLE_ROWS {
        return Err(invalid(format!(
            "need at least {MIN_SAMPLE_ROWS} rows, got {}",
            xs.len()
        )));
    }
    let n = xs.len();
    let dx = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    if dx <= 0.0 {
        return Err(invalid("x must be strictly increasing".into()));
    }
    for (i, w) in xs.windows(2).enumerate() {
        if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx {
            return Err(invalid(format!(
                "non-uniform spacing between rows {} and {}: {} vs {}",
                i + 1,
                i + 2,
                w[1] - w[0],
                dx
            )));
        }
    }
    let grid = GridSpec::new(xs[0] - 0.5 * dx, xs[n - 1] + 0.5 * dx, n)?;
    ScalarField::new(grid, values)
}

fn test_function(source: &Source) -> Result<TestFunction> {
    match source {
        Source::Catalog { name, params } => catalog::lookup(name, params),
        Source::File(path) => Err(Error::InvalidInput {
            path: path.clone(),
            message: "an analytic catalog function is required".into(),
        }),
    }
}

fn samples_of(config: &RunConfig) -> Result<ScalarField> {
    match &config.source {
        Source::File(path) => ingest_samples(path),
        Source::Catalog { .. } => {
            let tf = test_function(&config.source)?;
            Ok(catalog::sample(&tf, &tf.grid(config.n)?)?.0)
        }
    }
}

fn source_name(source: &Source) -> String {
    match source {
        Source::Catalog { name, .. } => name.clone(),
        Source::File(path) => path.display().to_string(),
    }
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

#[derive(Serialize)]
struct CompareReport<'a> {
    function: &'a str,
    n: usize,
    tau: f64,
    l1_error: f64,
}

fn run(config: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    match config.command {
        CommandKind::Estimate => {
            let big = samples_of(config)?;
            let density: DensityEstimate = match config.method {
                Method::Wave => estimate_density_wave(&big, TauParameter::new(config.taus[0])?)?,
                Method::Charfunc => estimate_density_charfunc(&discrete_derivative(&big)?)?,
                Method::Histogram => histogram_oracle(&discrete_derivative(&big)?, config.bins)?,
            };
            emit(&density.to_csv_string(), config.out.as_deref(), stdout)
        }
        CommandKind::Compare => {
            let big = samples_of(config)?;
            let opts = CompareOptions {
                grid: ComparisonGrid::over(
                    -std::f64::consts::PI,
                    std::f64::consts::PI,
                    config.bins,
                ),
                ..Default::default()
            };
            let cmp = harness::compare_fields(&big, config.taus[0], &opts)?;
            let dir = config.out.as_deref().unwrap_or(Path::new("."));
            cmp.wave.write_csv(&dir.join("wave.csv"))?;
            cmp.charfunc.write_csv(&dir.join("charfunc.csv"))?;
            let name = source_name(&config.source);
            let text = match config.format {
                Format::Csv => format!("l1_error\n{:.16e}\n", cmp.error),
                Format::Json => {
                    let report = CompareReport {
                        function: &name,
                        n: big.len(),
                        tau: config.taus[0],
                        l1_error: cmp.error,
                    };
                    serde_json::to_string_pretty(&report).expect("plain struct") + "\n"
                }
            };
            emit(&text, None, stdout)
        }
        CommandKind::Sweep => {
            let big = samples_of(config)?;
            let opts = CompareOptions {
                grid: ComparisonGrid::over(
                    -std::f64::consts::PI,
                    std::f64::consts::PI,
                    config.bins,
                ),
                ..Default::default()
            };
            let result =
                harness::tau_sweep_fields(&source_name(&config.source), &big, &config.taus, &opts)?;
            match &config.out {
                Some(path) => harness::export_sweep(&result, path),
                None => {
                    let mut text = String::from("tau,l1_error\n");
                    for (t, e) in result.taus.iter().zip(&result.errors) {
                        text.push_str(&format!("{t:.16e},{e:.16e}\n"));
                    }
                    emit(&text, None, stdout)
                }
            }
        }
        CommandKind::Bench => {
            let tf = test_function(&config.source)?;
            let table = harness::benchmark_scaling(&tf, &config.ns, config.taus[0], config.reps)?;
            match &config.out {
                Some(path) => harness::export_timing(&table, path),
                None => {
                    let mut text = String::from("n,wave_seconds,charfunc_seconds\n");
                    for i in 0..table.ns.len() {
                        text.push_str(&format!(
                            "{},{:.16e},{:.16e}\n",
                            table.ns[i], table.wave_seconds[i], table.charfunc_seconds[i]
                        ));
                    }
                    emit(&text, None, stdout)
                }
            }
        }
        CommandKind::Degeneracy => {
            let tf = test_function(&config.source)?;
            let report = detect_degenerate(&tf, config.u0)?;
            let text = match config.format {
                Format::Json => serde_json::to_string_pretty(&report).expect("plain struct") + "\n",
                Format::Csv => {
                    let mut t = String::from("kind,value\n");
                    for b in &report.b_points {
                        t.push_str(&format!("b_point,{b:.16e}\n"));
                    }
                    for c in &report.c_values {
                        t.push_str(&format!("c_value,{c:.16e}\n"));
                    }
                    t.push_str(&format!("eta,{:.16e}\n", report.eta));
                    t.push_str(&format!("clean,{}\n", report.clean as u8));
                    t
                }
            };
            emit(&text, None, stdout)
        }
    }
}

/// Runs `config`, writing reports to `stdout` and diagnostics to standard
/// error. Returns the process exit status.
pub fn dispatch_to(config: &RunConfig, stdout: &mut dyn Write) -> i32 {
    match run(config, stdout) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_io() {
                EXIT_IO
            } else {
                EXIT_DOMAIN
            }
        }
    }
}

pub fn dispatch(config: &RunConfig) -> i32 {
    dispatch_to(config, &mut std::io::stdout().lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> std::result::Result<RunConfig, clap::Error> {
        parse_args(std::iter::once("graddens").chain(line.split_whitespace()))
    }

    #[test]
    fn estimate_flags() {
        let c = parse("estimate --function sinusoid --tau 1e-5 --n 32768 --out d.csv").unwrap();
        assert_eq!(c.command, CommandKind::Estimate);
        assert_eq!(c.taus, vec![1e-5]);
        assert_eq!(c.n, 1 << 15);
        assert_eq!(c.out, Some(PathBuf::from("d.csv")));
        assert_eq!(
            c.source,
            Source::Catalog {
                name: "sinusoid".into(),
                params: Params::new()
            }
        );
    }

    #[test]
    fn sweep_flags() {
        let c = parse("sweep --function quadratic --taus 3e-4,1e-4,5e-5,1e-5").unwrap();
        assert_eq!(c.command, CommandKind::Sweep);
        assert_eq!(c.taus, vec![3e-4, 1e-4, 5e-5, 1e-5]);
    }

    #[test]
    fn params_accept_pi() {
        let c = parse("estimate --function sinusoid --param freq=8pi").unwrap();
        match c.source {
            Source::Catalog { params, .. } => {
                assert_eq!(params["freq"], 8.0 * std::f64::consts::PI)
            }
            _ => panic!(),
        }
    }

    #[test]
    fn usage_errors() {
        let e = parse("estimate --function sinusoid --input samples.csv").unwrap_err();
        assert_eq!(e.kind(), ErrorKind::ArgumentConflict);
        assert_eq!(e.exit_code(), EXIT_USAGE);
        let e = parse("estimate --function sinusoid --bogus 1").unwrap_err();
        assert_eq!(e.kind(), ErrorKind::UnknownArgument);
        let e = parse("estimate --function sinusoid --tau abc").unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
        let e = parse("sweep --function sinusoid --taus 1e-4,x").unwrap_err();
        assert!(e.to_string().contains("--taus"));
        let e = parse("estimate --function cubic").unwrap_err();
        assert!(e.to_string().contains("--function"));
        let e = parse("estimate --function sinusoid --param freq").unwrap_err();
        assert!(e.to_string().contains("--param"));
        let e = parse("estimate --function sinusoid --tau -1").unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
        assert!(parse("estimate").is_err());
        assert!(parse("bench --input s.csv").is_err());
    }
}
