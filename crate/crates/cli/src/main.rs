use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use stable_tail::report::{
    comparison_table, errmap, fmt_real, json_real, table_json, write_errmap_csv, write_table_csv,
    GridSpec, Spacing,
};
use stable_tail::selfcheck::run_selfcheck;
use stable_tail::threshold::ThresholdResult;
use stable_tail::{
    solve_threshold, Convention, Error, ErrorClass, EvalPolicy, EvalReport, Evaluator, MeshPolicy,
    QuadratureSpec, StableParams,
};

const EXIT_DOMAIN: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

#[derive(Parser)]
#[command(
    name = "stable-tail",
    version,
    about = "Distribution function and density tail of strictly stable laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distribution function at one point.
    Cdf(PointArgs),
    /// Density from its certified tail series.
    PdfTail(PointArgs),
    /// Smallest |x| where the N-term series meets epsilon.
    Threshold(ThresholdArgs),
    /// Series error against a reference over a grid.
    Errmap(ErrmapArgs),
    /// Series and quadrature side by side for several alpha.
    Table(TableArgs),
    /// Run the built-in invariant checks.
    Selfcheck,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct PointArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long)]
    x: f64,
    /// Number of series terms.
    #[arg(long = "n")]
    n_terms: Option<u32>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value = "graded")]
    mesh: MeshPolicy,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long = "n", default_value_t = 30)]
    n_terms: u32,
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    /// `pi` or `alpha`; both are printed when omitted.
    #[arg(long)]
    convention: Option<Convention>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct GridArgs {
    #[arg(long)]
    x_min: f64,
    #[arg(long)]
    x_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, default_value = "log")]
    spacing: Spacing,
}

impl GridArgs {
    fn spec(&self) -> Result<GridSpec, Error> {
        GridSpec::new(self.x_min, self.x_max, self.points, self.spacing)
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ErrmapArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[command(flatten)]
    grid: GridArgs,
    /// Comma-separated term counts.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<u32>,
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    #[arg(long, default_value = "graded")]
    mesh: MeshPolicy,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct TableArgs {
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long = "n", default_value_t = 30)]
    n_terms: u32,
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    /// The uniform mesh reproduces the quadrature breakdown at large x.
    #[arg(long, default_value = "uniform")]
    mesh: MeshPolicy,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    ChecksFailed(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn quad_spec(mesh: MeshPolicy) -> QuadratureSpec {
    QuadratureSpec {
        mesh,
        ..QuadratureSpec::default()
    }
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn point(args: &PointArgs, density: bool, out: &mut impl Write) -> Result<(), Failure> {
    let params = StableParams::new(args.alpha, args.theta, args.lambda)?;
    let defaults = EvalPolicy::default();
    let policy = EvalPolicy {
        n_terms: args.n_terms.unwrap_or(defaults.n_terms),
        epsilon: args.eps.unwrap_or(defaults.epsilon),
        quad_spec: quad_spec(args.mesh),
        ..defaults
    };
    let eval = Evaluator::new(policy)?;
    let r = if density {
        eval.pdf_tail(&params, args.x)?
    } else {
        eval.cdf(&params, args.x)?
    };
    warn_all(&r.warnings);
    match args.format {
        Format::Csv => {
            writeln!(out, "x,alpha,theta,lambda,value,bound_or_estimate,bound_is_rigorous,method,threshold_used")?;
            writeln!(out, "{}", report_csv(&r))?;
        }
        Format::Json => writeln!(out, "{}", report_json(&r))?,
    }
    Ok(())
}

fn report_csv(r: &EvalReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        fmt_real(r.x),
        fmt_real(r.params.alpha()),
        fmt_real(r.params.theta()),
        fmt_real(r.params.lambda()),
        fmt_real(r.value),
        fmt_real(r.bound_or_estimate),
        r.bound_is_rigorous,
        r.method.label(),
        r.threshold_used.map(fmt_real).unwrap_or_default()
    )
}

fn report_json(r: &EvalReport) -> serde_json::Value {
    json!({
        "x": json_real(r.x),
        "alpha": r.params.alpha(),
        "theta": r.params.theta(),
        "lambda": r.params.lambda(),
        "value": json_real(r.value),
        "bound_or_estimate": json_real(r.bound_or_estimate),
        "bound_is_rigorous": r.bound_is_rigorous,
        "method": r.method.label(),
        "threshold_used": r.threshold_used.map(json_real),
        "warnings": r.warnings,
    })
}

fn threshold(args: &ThresholdArgs, out: &mut impl Write) -> Result<(), Failure> {
    let conventions = match args.convention {
        Some(c) => vec![c],
        None => vec![Convention::PiFactorial, Convention::AlphaFactorial],
    };
    let results = conventions
        .into_iter()
        .map(|c| solve_threshold(args.alpha, args.n_terms, args.eps, c))
        .collect::<Result<Vec<ThresholdResult>, Error>>()?;
    match args.format {
        Format::Csv => {
            writeln!(
                out,
                "alpha,n_terms,epsilon,convention,x_eps,iterations,residual"
            )?;
            for r in &results {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    fmt_real(r.alpha),
                    r.n_terms,
                    fmt_real(r.epsilon),
                    r.convention.label(),
                    fmt_real(r.x_eps),
                    r.iterations,
                    fmt_real(r.residual)
                )?;
            }
        }
        Format::Json => {
            let rows: Vec<_> = results
                .iter()
                .map(|r| {
                    json!({
                        "alpha": r.alpha,
                        "n_terms": r.n_terms,
                        "epsilon": r.epsilon,
                        "convention": r.convention.label(),
                        "x_eps": json_real(r.x_eps),
                        "iterations": r.iterations,
                        "residual": json_real(r.residual),
                    })
                })
                .collect();
            writeln!(out, "{}", serde_json::Value::from(rows))?;
        }
    }
    Ok(())
}

fn errmap_cmd(args: &ErrmapArgs, out: &mut impl Write) -> Result<(), Failure> {
    let params = StableParams::standard(args.alpha, args.theta)?;
    let rows = errmap(
        &params,
        &args.grid.spec()?,
        &args.n_list,
        args.eps,
        &quad_spec(args.mesh),
    )?;
    write_errmap_csv(out, &rows)?;
    Ok(())
}

fn table_cmd(args: &TableArgs, out: &mut impl Write) -> Result<(), Failure> {
    let table = comparison_table(
        &args.alphas,
        args.theta,
        &args.grid.spec()?,
        args.n_terms,
        args.eps,
        &quad_spec(args.mesh),
    )?;
    match args.format {
        Format::Csv => {
            write_table_csv(out, &table)?;
            for o in &table.onsets {
                match o.x {
                    Some(x) => eprintln!("divergence onset alpha={}: x={}", o.alpha, fmt_real(x)),
                    None => eprintln!("divergence onset alpha={}: none on this grid", o.alpha),
                }
            }
        }
        Format::Json => writeln!(out, "{}", table_json(&table))?,
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn selfcheck(out: &mut impl Write) -> Result<(), Failure> {
    let checks = run_selfcheck();
    writeln!(out, "check,status,detail")?;
    for c in &checks {
        let status = if c.passed { "pass" } else { "fail" };
        writeln!(out, "{},{},{}", c.name, status, csv_field(&c.detail))?;
    }
    match checks.iter().filter(|c| !c.passed).count() {
        0 => Ok(()),
        n => Err(Failure::ChecksFailed(n)),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    match &cli.command {
        Command::Cdf(a) => point(a, false, &mut out),
        Command::PdfTail(a) => point(a, true, &mut out),
        Command::Threshold(a) => threshold(a, &mut out),
        Command::Errmap(a) => errmap_cmd(a, &mut out),
        Command::Table(a) => table_cmd(a, &mut out),
        Command::Selfcheck => selfcheck(&mut out),
    }?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Domain => EXIT_DOMAIN,
                ErrorClass::Numerical => EXIT_NUMERICAL,
                ErrorClass::Usage => EXIT_USAGE,
            })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: writing output: {e}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::ChecksFailed(n)) => {
            eprintln!("error: {n} self-check(s) failed");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
