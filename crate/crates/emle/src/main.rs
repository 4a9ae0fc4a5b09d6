use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, ValueEnum};
use emle::cli::{run, DataSource, OutputFormat, RunConfig, RunError};
use emle::report::{render_text, Report};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Find the facial set of a log-linear model and fit its extended MLE.
#[derive(Debug, Parser)]
#[command(name = "emle", version)]
#[command(group(ArgGroup::new("source").required(true).args(["data", "dataset"])))]
struct Args {
    /// Delimited table with one column per factor plus the frequency column
    /// named on the left of `~`.
    #[arg(long, value_name = "PATH")]
    data: Option<PathBuf>,
    /// Bundled table: haberman, example3x3x3 or rochdale.
    #[arg(long, value_name = "NAME")]
    dataset: Option<String>,
    /// `freq ~ a*b + c` or generator notation such as `[ab][c]`.
    #[arg(long)]
    formula: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Stop after the facial set; skip the fit.
    #[arg(long)]
    facial_only: bool,
    /// Also run the per-cell LP oracle and compare.
    #[arg(long)]
    oracle_check: bool,
    /// Print the design matrix to stderr.
    #[arg(long)]
    dump_design: bool,
    /// Threshold above which an LP variable counts as positive.
    #[arg(long, value_name = "REAL")]
    tol_lp: Option<f64>,
    /// Relative pivot threshold for rank decisions.
    #[arg(long, value_name = "REAL")]
    tol_rank: Option<f64>,
}

fn emit(report: &Report, format: Format) {
    let body = match format {
        Format::Text => render_text(report),
        Format::Json => serde_json::to_string_pretty(report).expect("report serialises") + "\n",
    };
    // a closed pipe downstream is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(body.as_bytes());
}

fn main() -> ExitCode {
    let args = Args::parse();
    let source = match (args.data, args.dataset) {
        (Some(p), None) => DataSource::File(p),
        (None, Some(n)) => DataSource::Builtin(n),
        _ => unreachable!("clap enforces exactly one source"),
    };
    let config = RunConfig {
        source,
        formula: args.formula,
        format: match args.format {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        },
        facial_only: args.facial_only,
        dump_design: args.dump_design,
        oracle_check: args.oracle_check,
        tol_lp: args.tol_lp,
        tol_rank: args.tol_rank,
    };
    match run(&config) {
        Ok(out) => {
            if let Some(d) = &out.design_dump {
                eprint!("{d}");
            }
            emit(&out.report, args.format);
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let RunError::OracleMismatch(_, report) = &e {
                emit(report, args.format);
            }
            eprintln!("emle: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
