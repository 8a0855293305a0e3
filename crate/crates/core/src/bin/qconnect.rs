use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use qconnect::cli::{
    evaluate, exit_code, format_complex, parse_complex, parse_complex_list, truncation_from_env,
    EvalFunction, EvalParams, EXIT_DOMAIN, EXIT_FAIL, EXIT_PASS, EXIT_USAGE,
};
use qconnect::verify::{
    check, default_grid, run_suite, IdentityCheck, IdentityId, IdentityReport, Mutation,
    SUITE_BASES,
};
use qconnect::{QError, QModulus, Truncation};

/// Comma-separated complex literals, kept as one argument value.
#[derive(Clone)]
struct ComplexList(Vec<Complex64>);

fn complex_list(s: &str) -> Result<ComplexList, String> {
    parse_complex_list(s).map(ComplexList)
}

#[derive(Parser)]
#[command(
    name = "qconnect",
    version,
    about = "q-special functions and their connection formulae"
)]
struct Cli {
    /// Tail tolerance for all sums and products (overrides Q_CONNECT_TRUNC_EPS)
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Maximum number of terms per sum
    #[arg(long, global = true)]
    n_max: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one function at a point
    Eval(EvalArgs),
    /// Check one identity over a grid
    Check(CheckArgs),
    /// Check every identity at several bases
    Suite(SuiteArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Aq, Aiq, theta, eq, Eq, rphis, 2f0, 2f0-closed, f-residues or g-borel
    #[arg(value_parser = str::parse::<EvalFunction>)]
    function: EvalFunction,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    q: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    x: Complex64,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda: Option<Complex64>,
    /// Upper parameters of rphis, comma separated
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
    upper: Option<ComplexList>,
    /// Lower parameters of rphis, comma separated
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
    lower: Option<ComplexList>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MutationArg {
    DropOneMinusQ,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_parser = str::parse::<IdentityId>)]
    identity: IdentityId,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    q: Complex64,
    /// Use the default 24-point grid (also used when no grid is given)
    #[arg(long, conflicts_with = "grid")]
    grid_default: bool,
    /// Comma-separated grid points
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
    grid: Option<ComplexList>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    lambda: Option<Complex64>,
    /// Watson parameters a,b,c
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
    abc: Option<ComplexList>,
    #[arg(long)]
    tol: Option<f64>,
    /// Degree of the test polynomial for formal-inverses
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, value_enum, hide = true)]
    mutation: Option<MutationArg>,
    /// Report file
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SuiteArgs {
    /// Comma-separated bases
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true)]
    q: Option<ComplexList>,
    /// Directory receiving one report per check
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

enum Failure {
    Usage(String),
    Q(QError),
    Io(String),
}

impl From<QError> for Failure {
    fn from(e: QError) -> Self {
        Failure::Q(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn truncation(cli: &Cli) -> Result<Truncation, QError> {
    let mut t = truncation_from_env()?;
    if let Some(eps) = cli.eps {
        t = t.with_eps(eps)?;
    }
    if let Some(n) = cli.n_max {
        t = Truncation::new(t.eps, n, t.streak)?;
    }
    Ok(t)
}

fn render(report: &IdentityReport, format: Format) -> Result<String, QError> {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    }
}

fn run_eval(args: &EvalArgs, t: &Truncation) -> Result<i32, Failure> {
    let q = QModulus::new(args.q)?;
    let params = EvalParams {
        lambda: args.lambda,
        upper: args.upper.clone().map(|l| l.0).unwrap_or_default(),
        lower: args.lower.clone().map(|l| l.0).unwrap_or_default(),
    };
    let e = evaluate(args.function, q, args.x, &params, t)?;
    for w in &e.warnings {
        eprintln!("warning: {w}");
    }
    let terms = e.terms.map_or_else(|| "n/a".to_string(), |n| n.to_string());
    println!("{} terms={terms}", format_complex(e.value));
    Ok(EXIT_PASS)
}

fn run_check(args: &CheckArgs, t: &Truncation) -> Result<i32, Failure> {
    let q = QModulus::new(args.q)?;
    let mut spec = IdentityCheck::new(args.identity, q).with_trunc(*t);
    spec = spec.with_grid(match &args.grid {
        Some(g) => g.0.clone(),
        None => default_grid(),
    });
    if let Some(l) = args.lambda {
        spec = spec.with_lambda(l);
    }
    if let Some(ComplexList(abc)) = &args.abc {
        let abc: [Complex64; 3] = abc.as_slice().try_into().map_err(|_| {
            Failure::Usage(format!("--abc needs exactly 3 values, got {}", abc.len()))
        })?;
        spec = spec.with_abc(abc);
    }
    if let Some(tol) = args.tol {
        spec = spec.with_tol(tol);
    }
    if let Some(d) = args.degree {
        spec = spec.with_poly_degree(d);
    }
    if let Some(MutationArg::DropOneMinusQ) = args.mutation {
        spec = spec.with_mutation(Mutation::DropOneMinusQ);
    }
    let report = check(&spec)?;
    if let Some(path) = &args.out {
        fs::write(path, render(&report, args.format)?)?;
    }
    println!("{}", report.summary_line());
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn run_suite_cmd(args: &SuiteArgs, t: &Truncation) -> Result<i32, Failure> {
    let bases = match &args.q {
        Some(list) => list
            .0
            .iter()
            .map(|&q| QModulus::new(q))
            .collect::<Result<Vec<_>, _>>()?,
        None => SUITE_BASES
            .iter()
            .map(|&q| QModulus::real(q))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let config: Vec<IdentityCheck> = bases
        .iter()
        .flat_map(|&q| {
            IdentityId::ALL
                .into_iter()
                .map(move |id| IdentityCheck::new(id, q))
        })
        .map(|c| c.with_trunc(*t))
        .collect();
    let reports = run_suite(&config);
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir)?;
    }
    let mut all = true;
    for (spec, report) in config.iter().zip(&reports) {
        all &= report.pass;
        println!(
            "{:<20} q={:<8} {}",
            spec.id.name(),
            spec.q.to_string(),
            report.summary_line()
        );
        if let Some(dir) = &args.out_dir {
            let ext = match args.format {
                Format::Json => "json",
                Format::Csv => "csv",
            };
            let name = format!("{}_q{}.{ext}", spec.id.name(), spec.q);
            fs::write(dir.join(name), render(report, args.format)?)?;
        }
    }
    Ok(if all { EXIT_PASS } else { EXIT_FAIL })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = truncation(&cli)
        .map_err(Failure::from)
        .and_then(|t| match &cli.command {
            Command::Eval(a) => run_eval(a, &t),
            Command::Check(a) => run_check(a, &t),
            Command::Suite(a) => run_suite_cmd(a, &t),
        });
    let code = match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Q(e)) => {
            let code = exit_code(&e);
            let kind = if code == EXIT_DOMAIN {
                "domain exclusion"
            } else {
                "error"
            };
            eprintln!("{kind}: {e}");
            code
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAIL
        }
    };
    ExitCode::from(code as u8)
}
