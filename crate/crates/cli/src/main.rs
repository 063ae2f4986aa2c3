//! Command-line front end: evaluate either critical expansion of the tau
//! function on radial grids, extract the connection constant, run the
//! invariant battery, and emit the benchmark comparison dataset.
//!
//! Complex values enter and leave as "re,im" pairs. Grid points are
//! evaluated in parallel, output is assembled single-threaded in grid
//! order, and every reduction is deterministic, so identical invocations
//! produce identical bytes. PAIN3_THREADS caps the worker count.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical-domain error,
//! 4 tolerance failure in verify.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use pain3_core::connection::{chi_formula, chi_numeric};
use pain3_core::monodromy::MonodromyPoint;
use pain3_core::nekrasov::CoverTime;
use pain3_core::tau_asymptotics::{fourier_kernel_sum, tau_long_unnormalized, LongKernelParams};
use pain3_core::tau_series::{TauShortEval, TruncationSpec};
use pain3_core::verify;
use pain3_core::Error;
use rayon::prelude::*;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

/// Benchmark comparison point and truncations baked into emit-fig1.
const FIG1_SIGMA: Complex64 = Complex64::new(0.12, -0.25);
const FIG1_ETA: Complex64 = Complex64::new(0.23, 0.42);
const FIG1_GRID: Grid = Grid {
    lo: 1.0,
    hi: 12.0,
    n: 200,
};

#[derive(Parser)]
#[command(
    name = "pain3",
    version,
    about = "Tau function of Painleve III(D8): both critical expansions and the \
             connection constant between them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Short-distance expansion of tau on a radial grid
    TauShort(CurveArgs),
    /// Long-distance expansion on a radial grid, in its own normalization
    /// (multiply by the connection constant to match the short one)
    TauLong(CurveArgs),
    /// Connection constant: closed form next to the windowed extraction
    Chi(ChiArgs),
    /// Both expansions, damped by e^(-r^2/16 - nu r) and brought to the
    /// short normalization, with the pointwise relative gap
    Compare(CurveArgs),
    /// Run the invariant battery and report measured errors
    Verify(VerifyArgs),
    /// Emit the benchmark comparison dataset: 200 points over r in [1, 12]
    /// at the pinned benchmark monodromy, CSV schema v1
    EmitFig1(OutputArgs),
}

#[derive(Args)]
struct MonodromyArgs {
    /// First monodromy exponent sigma, as "re,im"
    #[arg(long, value_parser = parse_complex)]
    sigma: Complex64,
    /// Second monodromy exponent eta, as "re,im"
    #[arg(long, value_parser = parse_complex)]
    eta: Complex64,
}

#[derive(Args)]
struct TruncArgs {
    /// Fourier window half-width. In chi and compare it governs the long
    /// sum; the short sum always runs its full window there.
    #[arg(long, default_value_t = 6)]
    n_fourier: usize,
    /// Instanton series order of the short expansion
    #[arg(long, default_value_t = 15)]
    n_inst: usize,
    /// Correction order of the long-distance kernel
    #[arg(long, default_value_t = 4)]
    k_corr: usize,
}

impl TruncArgs {
    fn spec(&self) -> Result<TruncationSpec, Error> {
        TruncationSpec::new(self.n_fourier, self.n_inst, self.k_corr, 1e-5)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    monodromy: MonodromyArgs,
    /// Radial grid as "r_min,r_max,n_points"
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    #[command(flatten)]
    trunc: TruncArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ChiArgs {
    #[command(flatten)]
    monodromy: MonodromyArgs,
    /// Matching window as "r_lo,r_hi"
    #[arg(long, value_parser = parse_window, default_value = "6,10")]
    window: (f64, f64),
    #[command(flatten)]
    trunc: TruncArgs,
    /// Output file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format; this command emits a single JSON record
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Check name, or "all" for the whole battery
    #[arg(long, default_value = "all")]
    suite: String,
    /// Output file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Machine-readable format instead of the text table
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy)]
struct Grid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        let step = if self.n > 1 {
            (self.hi - self.lo) / (self.n - 1) as f64
        } else {
            0.0
        };
        (0..self.n).map(|i| self.lo + step * i as f64).collect()
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"re,im\", got \"{}\"", s));
    }
    let re: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| format!("bad real part \"{}\": {}", parts[0], e))?;
    let im: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| format!("bad imaginary part \"{}\": {}", parts[1], e))?;
    Ok(Complex64::new(re, im))
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected \"r_min,r_max,n_points\", got \"{}\"", s));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| format!("bad r_min \"{}\": {}", parts[0], e))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| format!("bad r_max \"{}\": {}", parts[1], e))?;
    let n: usize = parts[2]
        .trim()
        .parse()
        .map_err(|e| format!("bad n_points \"{}\": {}", parts[2], e))?;
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(format!(
            "grid bounds must satisfy 0 < r_min <= r_max, got ({}, {})",
            lo, hi
        ));
    }
    if n == 0 {
        return Err("n_points must be at least 1".into());
    }
    Ok(Grid { lo, hi, n })
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"r_lo,r_hi\", got \"{}\"", s));
    }
    let lo: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| format!("bad r_lo \"{}\": {}", parts[0], e))?;
    let hi: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| format!("bad r_hi \"{}\": {}", parts[1], e))?;
    Ok((lo, hi))
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{failures} invariant(s) out of tolerance")]
    VerifyFailed { failures: usize },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Validation(_)) => 2,
            CliError::Io { .. } => 2,
            CliError::Core(_) => 3,
            CliError::VerifyFailed { .. } => 4,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::TauShort(args) => run_curve(Expansion::Short, args),
        Command::TauLong(args) => run_curve(Expansion::Long, args),
        Command::Chi(args) => run_chi(args),
        Command::Compare(args) => run_compare(args),
        Command::Verify(args) => run_verify(args),
        Command::EmitFig1(out) => run_fig1(out),
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("PAIN3_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Validation(format!(
            "PAIN3_THREADS must be a positive integer, got \"{}\"",
            raw
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Validation(format!("thread pool: {}", e)))?;
    Ok(())
}

fn write_output(path: &Option<PathBuf>, body: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Io {
            path: p.display().to_string(),
            source: e,
        }),
        None => {
            print!("{}", body);
            Ok(())
        }
    }
}

// ---- tau-short / tau-long ----

enum Expansion {
    Short,
    Long,
}

#[derive(Serialize)]
struct TauRow {
    r: f64,
    t: f64,
    tau: [f64; 2],
    err_estimate: f64,
}

fn run_curve(which: Expansion, args: CurveArgs) -> Result<(), CliError> {
    let spec = args.trunc.spec()?;
    let m = MonodromyPoint::new(args.monodromy.sigma, args.monodromy.eta)?;
    let rows: Vec<TauRow> = match which {
        Expansion::Short => {
            let eval = TauShortEval::new(&m, &spec)?;
            args.grid
                .points()
                .into_par_iter()
                .map(|r| -> Result<TauRow, Error> {
                    let t = CoverTime::positive(r.powi(4) / 4096.0)?;
                    let v = eval.eval(t);
                    Ok(TauRow {
                        r,
                        t: t.abs(),
                        tau: [v.value.re, v.value.im],
                        err_estimate: v.err_estimate,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?
        }
        Expansion::Long => args
            .grid
            .points()
            .into_par_iter()
            .map(|r| -> Result<TauRow, Error> {
                let p = LongKernelParams::for_point(&m, r, &spec)?;
                let v = tau_long_unnormalized(&m, &p)?;
                Ok(TauRow {
                    r,
                    t: r.powi(4) / 4096.0,
                    tau: [v.value.re, v.value.im],
                    err_estimate: v.err_estimate,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?,
    };
    let body = match args.output.format {
        Format::Csv => {
            let mut s = String::from("r,t,re_tau,im_tau,err_estimate\n");
            for row in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.r, row.t, row.tau[0], row.tau[1], row.err_estimate
                ));
            }
            s
        }
        Format::Json => to_json(&rows),
    };
    write_output(&args.output.output, &body)
}

// ---- compare / emit-fig1 ----

#[derive(Serialize)]
struct CompareRow {
    r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    short: [f64; 2],
    long: [f64; 2],
    rel_gap: f64,
}

/// Both curves in the short normalization, damped by e^(-r^2/16 - nu r):
/// the long sum is multiplied by the closed-form connection constant.
fn compare_rows(
    m: &MonodromyPoint,
    grid: Grid,
    spec: &TruncationSpec,
) -> Result<Vec<CompareRow>, Error> {
    let chi = chi_formula(m)?;
    let nu = m.nu();
    let rho = if spec.n_fourier == 0 {
        m.rho().unwrap_or_default()
    } else {
        m.rho_or_err()?
    };
    let short_spec = TruncationSpec {
        n_fourier: TruncationSpec::MAX_FOURIER,
        ..*spec
    };
    let short = TauShortEval::new(m, &short_spec)?;
    grid.points()
        .into_par_iter()
        .map(|r| -> Result<CompareRow, Error> {
            let damp = (-r * r / 16.0 - nu * r).exp();
            let t = CoverTime::positive(r.powi(4) / 4096.0)?;
            let short_v = damp * short.eval(t).value;
            let long_v =
                damp * chi * fourier_kernel_sum(nu, rho, r, spec.k_corr, spec.n_fourier)?.value;
            let scale = short_v.norm().max(long_v.norm());
            let rel_gap = if scale > 0.0 {
                (short_v - long_v).norm() / scale
            } else {
                0.0
            };
            Ok(CompareRow {
                r,
                t: Some(t.abs()),
                short: [short_v.re, short_v.im],
                long: [long_v.re, long_v.im],
                rel_gap,
            })
        })
        .collect()
}

fn render_compare(rows: &[CompareRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let with_t = rows.first().is_some_and(|row| row.t.is_some());
            let mut s = String::from(if with_t {
                "r,t,re_short,im_short,re_long,im_long,rel_gap\n"
            } else {
                "r,re_short,im_short,re_long,im_long,rel_gap\n"
            });
            for row in rows {
                s.push_str(&format!("{},", row.r));
                if let Some(t) = row.t {
                    s.push_str(&format!("{},", t));
                }
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.short[0], row.short[1], row.long[0], row.long[1], row.rel_gap
                ));
            }
            s
        }
        Format::Json => to_json(rows),
    }
}

fn run_compare(args: CurveArgs) -> Result<(), CliError> {
    let spec = args.trunc.spec()?;
    let m = MonodromyPoint::new(args.monodromy.sigma, args.monodromy.eta)?;
    let rows = compare_rows(&m, args.grid, &spec)?;
    write_output(
        &args.output.output,
        &render_compare(&rows, args.output.format),
    )
}

fn run_fig1(out: OutputArgs) -> Result<(), CliError> {
    let m = MonodromyPoint::new(FIG1_SIGMA, FIG1_ETA)?;
    let spec = TruncationSpec::new(2, 15, 4, 1e-5)?;
    let mut rows = compare_rows(&m, FIG1_GRID, &spec)?;
    for row in &mut rows {
        row.t = None;
    }
    write_output(&out.output, &render_compare(&rows, out.format))
}

// ---- chi ----

fn run_chi(args: ChiArgs) -> Result<(), CliError> {
    if args.format == Format::Csv {
        return Err(Error::Validation(
            "chi emits a single JSON record; csv is not available here".into(),
        )
        .into());
    }
    let spec = args.trunc.spec()?;
    let m = MonodromyPoint::new(args.monodromy.sigma, args.monodromy.eta)?;
    let result = chi_numeric(&m, args.window, &spec)?;
    write_output(&args.output, &to_json(&result))
}

// ---- verify ----

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    let reports = verify::run(&args.suite)?;
    let body = match args.format {
        None => verify::render_table(&reports),
        Some(Format::Json) => to_json(&reports),
        Some(Format::Csv) => {
            let mut s = String::from("check,invariant,measured,bound,status\n");
            for rep in &reports {
                for item in &rep.items {
                    s.push_str(&format!(
                        "{},{},{},{},{}\n",
                        rep.name,
                        item.label,
                        item.measured,
                        item.bound,
                        if item.passed { "ok" } else { "fail" }
                    ));
                }
            }
            s
        }
    };
    write_output(&args.output, &body)?;
    let failures = reports
        .iter()
        .flat_map(|r| r.items.iter())
        .filter(|i| !i.passed)
        .count();
    if failures > 0 {
        return Err(CliError::VerifyFailed { failures });
    }
    Ok(())
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain records serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(
            parse_complex("0.12,-0.25").unwrap(),
            Complex64::new(0.12, -0.25)
        );
        assert_eq!(parse_complex(" 1 , 2 ").unwrap(), Complex64::new(1.0, 2.0));
        assert!(parse_complex("0.12").is_err());
        assert!(parse_complex("a,b").is_err());
        assert!(parse_complex("1,2,3").is_err());
    }

    #[test]
    fn grid_parsing_and_points() {
        let g = parse_grid("1,12,200").unwrap();
        assert_eq!((g.lo, g.hi, g.n), (1.0, 12.0, 200));
        let pts = g.points();
        assert_eq!(pts.len(), 200);
        assert_eq!(pts[0], 1.0);
        assert_eq!(*pts.last().unwrap(), 12.0);
        assert_eq!(parse_grid("3,3,1").unwrap().points(), vec![3.0]);
        assert!(parse_grid("0,5,10").is_err());
        assert!(parse_grid("5,4,10").is_err());
        assert!(parse_grid("1,5,0").is_err());
        assert!(parse_grid("1,5").is_err());
    }

    #[test]
    fn exit_codes_by_error_class() {
        assert_eq!(CliError::Core(Error::Validation("x".into())).exit_code(), 2);
        assert_eq!(
            CliError::Core(Error::ZeroOfTau { magnitude: 0.0 }).exit_code(),
            3
        );
        assert_eq!(
            CliError::Core(Error::WindowTooWild {
                spread: 1.0,
                bound: 0.1
            })
            .exit_code(),
            3
        );
        assert_eq!(CliError::VerifyFailed { failures: 2 }.exit_code(), 4);
        assert_eq!(
            CliError::Io {
                path: "x".into(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "gone")
            }
            .exit_code(),
            2
        );
    }

    #[test]
    fn compare_csv_header_tracks_t_column() {
        let with_t = vec![CompareRow {
            r: 2.0,
            t: Some(2.0_f64.powi(4) / 4096.0),
            short: [1.0, 0.0],
            long: [1.0, 0.0],
            rel_gap: 0.0,
        }];
        let csv = render_compare(&with_t, Format::Csv);
        assert!(csv.starts_with("r,t,re_short,"));
        let mut without_t = with_t;
        without_t[0].t = None;
        let csv = render_compare(&without_t, Format::Csv);
        assert!(csv.starts_with("r,re_short,"));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
