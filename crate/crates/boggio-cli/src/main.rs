//! Command-line front end: kernel tables, Dirichlet solves, and the
//! verification suite, with CSV and JSON output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 numerical
//! non-convergence, 64 usage error.

use boggio_core::kernel::{green_tilde_integral, green_tilde_series, BallPoint};
use boggio_core::quadrature::QuadratureSpec;
use boggio_core::solver::{standard_bump, SolutionField, SourceFunction};
use boggio_core::specfun::FracOrder;
use boggio_core::verify::{run_suite, VerifyOptions};
use boggio_core::Error as CoreError;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_VERIFY_FAIL: u8 = 1;
const EXIT_NUMERIC: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "boggio",
    version,
    about = "Green-kernel tables, Dirichlet solves and identity verification on the unit ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the radial profile by both representations on an r-grid.
    GreenEval(GreenEvalArgs),
    /// Tabulate the radial profile on a uniform interior grid.
    ProfileTable(ProfileTableArgs),
    /// Solve the Dirichlet problem for a given source and report u and the
    /// boundary profile u/(1-|x|^2)^s.
    Solve(SolveArgs),
    /// Run named verification checks and report residuals.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Ambient dimension (n >= 1).
    #[arg(long)]
    n: u32,
    /// Operator order s > 0.
    #[arg(long)]
    s: f64,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-11)]
    rel_tol: f64,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-13)]
    abs_tol: f64,
    /// Adaptive-quadrature subdivision budget.
    #[arg(long, default_value_t = 400)]
    max_subdivisions: usize,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout if omitted).
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

impl CommonArgs {
    fn spec(&self) -> QuadratureSpec {
        let mut spec = QuadratureSpec::with_tols(self.rel_tol, self.abs_tol);
        spec.max_subdivisions = self.max_subdivisions;
        spec
    }

    fn order(&self) -> Result<FracOrder, CoreError> {
        if self.n < 1 {
            return Err(CoreError::Domain(format!(
                "dimension must be >= 1, got {}",
                self.n
            )));
        }
        FracOrder::new(self.s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct GreenEvalArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Single radius; omit for a grid.
    #[arg(long)]
    r: Option<f64>,
    /// Grid lower bound.
    #[arg(long, default_value_t = 0.05)]
    r_min: f64,
    /// Grid upper bound.
    #[arg(long, default_value_t = 0.95)]
    r_max: f64,
    /// Grid size.
    #[arg(long, default_value_t = 10)]
    points: usize,
}

#[derive(Args)]
struct ProfileTableArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of interior grid points.
    #[arg(long, default_value_t = 19)]
    points: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Source: constant:<c>, bump:<rho>, or power:<K>.
    #[arg(long)]
    source: String,
    /// Single radius; omit for a grid on [0, 0.95].
    #[arg(long)]
    r: Option<f64>,
    /// Grid size.
    #[arg(long, default_value_t = 10)]
    points: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Restrict parameter sweeps to this dimension.
    #[arg(long)]
    n: Option<u32>,
    /// Restrict parameter sweeps to this order.
    #[arg(long)]
    s: Option<f64>,
    /// Run only the named checks (repeatable).
    #[arg(long)]
    only: Vec<String>,
    /// Full acceptance-scale grids instead of the quick subset.
    #[arg(long)]
    thorough: bool,
    /// Seed for randomized sweeps.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output format (text table or JSON report).
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout if omitted).
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

/// A finished table: versioned header plus numeric rows, rendered as CSV
/// (with `# boggio-kernel v<semver> n=<n> s=<s>` on top) or as JSON with the
/// same schema.
struct Table {
    n: u32,
    s: f64,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

/// 17 significant digits: round-trip exact for f64.
fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

impl Table {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = format!(
                    "# boggio-kernel v{} n={} s={}\n",
                    env!("CARGO_PKG_VERSION"),
                    self.n,
                    self.s
                );
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let header = serde_json::json!({
                    "tool": "boggio-kernel",
                    "version": env!("CARGO_PKG_VERSION"),
                    "n": self.n,
                    "s": self.s,
                });
                let rows: Vec<Vec<serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|&v| {
                                if v.is_finite() {
                                    serde_json::json!(v)
                                } else {
                                    serde_json::json!(v.to_string())
                                }
                            })
                            .collect()
                    })
                    .collect();
                let doc = serde_json::json!({
                    "header": header,
                    "columns": self.columns,
                    "rows": rows,
                });
                let mut out = serde_json::to_string_pretty(&doc).expect("serializable");
                out.push('\n');
                out
            }
        }
    }
}

fn emit(text: &str, output: Option<&std::path::Path>) -> Result<(), String> {
    match output {
        None => {
            print!("{text}");
            std::io::stdout().flush().map_err(|e| e.to_string())
        }
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
    }
}

/// One green-eval row: the profile by both routes, with the documented
/// divergence marker at r = 0 when the profile is unbounded (2s <= n).
fn green_row(r: f64, n: u32, order: FracOrder, spec: &QuadratureSpec) -> Result<Vec<f64>, CoreError> {
    if r == 1.0 {
        return Ok(vec![1.0, 0.0, 0.0, 0.0]);
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(CoreError::Domain(format!("radius {r} outside [0, 1]")));
    }
    if r == 0.0 {
        if 2.0 * order.s <= n as f64 {
            return Ok(vec![0.0, f64::INFINITY, f64::INFINITY, f64::NAN]);
        }
        // Bounded at the origin: rescaling the defining integral to
        // G̃_s(r) = ∫_r^1 (w²-r²)^{s-1} w^{1-n} dw gives G̃_s(0) = 1/(2s-n).
        let v = 1.0 / (2.0 * order.s - n as f64);
        return Ok(vec![0.0, v, v, 0.0]);
    }
    let integral = green_tilde_integral(r, n, order, spec)?;
    let series = green_tilde_series(r, n, order, 1e-13)?;
    Ok(vec![r, integral, series, (integral - series).abs()])
}

fn cmd_green_eval(args: &GreenEvalArgs) -> Result<Table, CoreError> {
    let order = args.common.order()?;
    let spec = args.common.spec();
    let radii: Vec<f64> = match args.r {
        Some(r) => vec![r],
        None => {
            let m = args.points.max(2);
            (0..m)
                .map(|i| args.r_min + (args.r_max - args.r_min) * i as f64 / (m - 1) as f64)
                .collect()
        }
    };
    let rows = radii
        .iter()
        .map(|&r| green_row(r, args.common.n, order, &spec))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table {
        n: args.common.n,
        s: args.common.s,
        columns: vec!["r", "g_integral", "g_series", "abs_delta"],
        rows,
    })
}

fn cmd_profile_table(args: &ProfileTableArgs) -> Result<Table, CoreError> {
    let order = args.common.order()?;
    let spec = args.common.spec();
    let m = args.points.max(1);
    let rows = (1..=m)
        .map(|i| {
            let r = i as f64 / (m + 1) as f64;
            green_row(r, args.common.n, order, &spec)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table {
        n: args.common.n,
        s: args.common.s,
        columns: vec!["r", "g_integral", "g_series", "abs_delta"],
        rows,
    })
}

enum SourceSpec {
    Constant(f64),
    Bump(f64),
    Power(u32),
}

fn parse_source(text: &str) -> Result<SourceSpec, CoreError> {
    let bad = || CoreError::Domain(format!(
        "source must be constant:<c>, bump:<rho> or power:<K>, got '{text}'"
    ));
    let (kind, value) = text.split_once(':').ok_or_else(bad)?;
    match kind {
        "constant" => Ok(SourceSpec::Constant(value.parse().map_err(|_| bad())?)),
        "bump" => {
            let rho: f64 = value.parse().map_err(|_| bad())?;
            if !(rho > 0.0 && rho < 1.0) {
                return Err(CoreError::Domain(format!(
                    "bump radius must lie in (0,1), got {rho}"
                )));
            }
            Ok(SourceSpec::Bump(rho))
        }
        "power" => Ok(SourceSpec::Power(value.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<Table, CoreError> {
    let order = args.common.order()?;
    let n = args.common.n;
    let spec = args.common.spec();
    let radii: Vec<f64> = match args.r {
        Some(r) => {
            if !(0.0..1.0).contains(&r) {
                return Err(CoreError::Domain(format!("radius {r} outside [0, 1)")));
            }
            vec![r]
        }
        None => {
            let m = args.points.max(2);
            (0..m).map(|i| 0.95 * i as f64 / (m - 1) as f64).collect()
        }
    };
    let solve = |field: &SolutionField<Box<dyn Fn(&[f64]) -> f64 + Sync>>| {
        radii
            .iter()
            .map(|&r| {
                let mut c = vec![0.0; n as usize];
                c[0] = r;
                let x = BallPoint::new(c);
                Ok(vec![r, field.eval(&x)?, field.boundary_profile(&x)?])
            })
            .collect::<Result<Vec<_>, CoreError>>()
    };
    let source: SourceFunction<Box<dyn Fn(&[f64]) -> f64 + Sync>> = match parse_source(&args.source)?
    {
        SourceSpec::Constant(c) => SourceFunction::polynomial(Box::new(move |_: &[f64]| c)),
        SourceSpec::Bump(rho) => {
            let bump = standard_bump(rho);
            SourceFunction::bump(Box::new(move |y: &[f64]| bump.eval(y)), rho)
        }
        SourceSpec::Power(k) => {
            let poly = boggio_core::fraclap::fraclap_s_on_power(k, order, n)?;
            SourceFunction::power_profile(Box::new(move |y: &[f64]| {
                poly.eval(y.iter().map(|c| c * c).sum::<f64>().sqrt())
            }))
        }
    };
    let field = SolutionField::new(source, n, order, spec)?;
    Ok(Table {
        n,
        s: args.common.s,
        columns: vec!["r", "u", "u_tilde"],
        rows: solve(&field)?,
    })
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8, CoreError> {
    let opts = VerifyOptions {
        n: args.n,
        s: args.s,
        only: args.only.clone(),
        thorough: args.thorough,
        seed: args.seed,
    };
    let report = run_suite(&opts)?;
    let text = match args.format {
        Format::Json => {
            let mut t = serde_json::to_string_pretty(&report).expect("serializable");
            t.push('\n');
            t
        }
        Format::Csv => report.render_text(),
    };
    emit(&text, args.output.as_deref()).map_err(CoreError::Domain)?;
    Ok(if report.overall_pass() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAIL
    })
}

fn run(cli: &Cli) -> Result<u8, CoreError> {
    match &cli.command {
        Command::GreenEval(args) => {
            let table = cmd_green_eval(args)?;
            emit(&table.render(args.common.format), args.common.output.as_deref())
                .map_err(CoreError::Domain)?;
            Ok(EXIT_OK)
        }
        Command::ProfileTable(args) => {
            let table = cmd_profile_table(args)?;
            emit(&table.render(args.common.format), args.common.output.as_deref())
                .map_err(CoreError::Domain)?;
            Ok(EXIT_OK)
        }
        Command::Solve(args) => {
            let table = cmd_solve(args)?;
            emit(&table.render(args.common.format), args.common.output.as_deref())
                .map_err(CoreError::Domain)?;
            Ok(EXIT_OK)
        }
        Command::Verify(args) => cmd_verify(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
