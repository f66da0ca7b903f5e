//! `dimer`: estimate dimer entropy constants from partial-sum series, count
//! dimer coverings of boxes, scan finite-size entropies and run the
//! reproduction checks.
//!
//! Exit codes: 0 success, 1 verification failure, 2 argument error,
//! 3 input parse error, 4 resource budget exceeded.

mod report;

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dimer::count::{brute_force_count, transfer_matrix_count, CountConfig, CountError, STATE_BUDGET_ENV};
use dimer::entropy::{lambda_scan, LambdaSample};
use dimer::estimator::{estimate_report, ErrorPolicy, EstimateReport};
use dimer::lattice::{Boundary, LatticeSpec};
use dimer::series::BSeries;
use dimer::table::{builtin_series, load_series, SeriesFormat, SeriesTable};
use dimer::verify::{run_verification, VerifyReport};
use serde::Serialize;
use serde_json::json;

use crate::report::{csv_table, RunReport};

/// Sites at or below which `--engine auto` uses brute force.
const AUTO_BRUTE_MAX_SITES: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "dimer", version, about = "Dimer entropy estimates and exact dimer-covering counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal-truncation estimate from a partial-sum series.
    Estimate(EstimateArgs),
    /// Exact number of dimer coverings of a box or torus.
    Count(CountArgs),
    /// Finite-size entropies over growing lattices.
    Scan(ScanArgs),
    /// Run the reproduction checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Engine {
    #[default]
    Auto,
    Brute,
    Transfer,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["d", "input"])))]
struct EstimateArgs {
    /// Built-in series for this dimension (2..=5).
    #[arg(long)]
    d: Option<u32>,
    /// Series file (JSON or CSV).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Format of --input; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    /// as-is, double-if-terminal or always-double.
    #[arg(long, default_value = "as-is")]
    policy: ErrorPolicy,
    /// Also print a and b rounded half-to-even to this many decimals.
    #[arg(long)]
    display_digits: Option<u32>,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct CountArgs {
    /// Side lengths, e.g. 8x8 or 4x4x6.
    #[arg(long)]
    dims: String,
    #[arg(long, default_value = "free")]
    boundary: Boundary,
    #[arg(long, value_enum, default_value_t)]
    engine: Engine,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value = "free")]
    boundary: Boundary,
    #[arg(long)]
    max_side: usize,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn args(message: impl ToString) -> Self {
        Failure { code: 2, message: message.to_string() }
    }

    fn parse(message: impl ToString) -> Self {
        Failure { code: 3, message: message.to_string() }
    }

    fn budget(message: impl ToString) -> Self {
        Failure { code: 4, message: message.to_string() }
    }
}

fn count_failure(e: CountError) -> Failure {
    match e {
        CountError::TooLargeForBruteForce { .. } => Failure::budget(e),
        CountError::StateBudgetExceeded { .. } => Failure::budget(format!("{e} (raise it with {STATE_BUDGET_ENV})")),
        CountError::Lattice(_) | CountError::BadBudget(_) => Failure::args(e),
    }
}

/// What a command produced: text for stdout and its exit code.
struct Output {
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let command = std::iter::once("dimer".to_owned()).chain(std::env::args().skip(1)).collect::<Vec<_>>().join(" ");
    let started = Instant::now();
    let result = match cli.command {
        Command::Estimate(a) => estimate(a, command, started),
        Command::Count(a) => count(a, command, started),
        Command::Scan(a) => scan(a, command, started),
        Command::Verify(a) => verify(a, command, started),
    };
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let newline = if out.text.ends_with('\n') { "" } else { "\n" };
            // a closed downstream pipe is not an error of ours
            let _ = write!(stdout, "{}{newline}", out.text).and_then(|()| stdout.flush());
            ExitCode::from(out.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn render<T: Serialize>(
    format: OutputFormat,
    command: String,
    inputs: serde_json::Value,
    results: T,
    started: Instant,
    csv: impl FnOnce(&T) -> String,
) -> String {
    match format {
        OutputFormat::Json => RunReport::new(command, &inputs, results, started.elapsed().as_secs_f64()).to_json(),
        OutputFormat::Csv => csv(&results),
    }
}

fn read_series(args: &EstimateArgs) -> Result<BSeries, Failure> {
    if let Some(d) = args.d {
        return builtin_series(d).map_err(Failure::args);
    }
    let path = args.input.as_ref().expect("clap enforces one source");
    let format = match args.input_format {
        Some(InputFormat::Json) => SeriesFormat::Json,
        Some(InputFormat::Csv) => SeriesFormat::Csv,
        None => SeriesFormat::from_path(path).ok_or_else(|| {
            Failure::args(format!("cannot tell the format of {}; pass --input-format", path.display()))
        })?,
    };
    let file = File::open(path).map_err(|e| Failure::args(format!("{}: {e}", path.display())))?;
    load_series(file, format).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn estimate(args: EstimateArgs, command: String, started: Instant) -> Result<Output, Failure> {
    let series = read_series(&args)?;
    let report = estimate_report(&series, args.policy, args.display_digits).map_err(Failure::parse)?;
    let inputs = json!({
        "command": "estimate",
        "series": series,
        "policy": args.policy,
        "display_digits": args.display_digits,
    });
    let text = render(args.format, command, inputs, report, started, |r: &EstimateReport| {
        let e = &r.estimate;
        let (dd, da, db) = match &r.display {
            Some(d) => (d.digits.to_string(), d.a.to_string(), d.b.to_string()),
            None => Default::default(),
        };
        csv_table(
            &[
                "d",
                "label",
                "policy",
                "g",
                "a",
                "b_raw",
                "b",
                "policy_applied",
                "terminal_pair",
                "display_digits",
                "display_a",
                "display_b",
            ],
            &[vec![
                r.series.dimension().to_string(),
                r.series.label().to_owned(),
                r.policy.to_string(),
                e.g.to_string(),
                e.a.to_string(),
                e.b_raw.to_string(),
                e.b.to_string(),
                serde_json::to_value(e.policy_applied).unwrap().as_str().unwrap().to_owned(),
                e.terminal_pair.to_string(),
                dd,
                da,
                db,
            ]],
        )
    });
    Ok(Output { text, code: 0 })
}

#[derive(Debug, Serialize)]
struct CountResult {
    dims: String,
    boundary: Boundary,
    engine: &'static str,
    sites: usize,
    count: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

fn count(args: CountArgs, command: String, started: Instant) -> Result<Output, Failure> {
    let spec = LatticeSpec::parse_dims(&args.dims, args.boundary).map_err(Failure::args)?;
    let config = CountConfig::from_env().map_err(Failure::args)?;
    let sites = spec.site_count();
    let brute = match args.engine {
        Engine::Auto => sites <= AUTO_BRUTE_MAX_SITES,
        Engine::Brute => true,
        Engine::Transfer => false,
    };
    let (engine, value) =
        if brute { ("brute", brute_force_count(&spec)) } else { ("transfer", transfer_matrix_count(&spec, &config)) };
    let value = value.map_err(count_failure)?;
    let (lambda, note) = if sites % 2 == 1 {
        (None, Some("odd site count"))
    } else if value.is_zero() {
        (None, Some("no perfect matching"))
    } else {
        let s = LambdaSample::from_count(spec.clone(), value.clone()).expect("non-zero count");
        (Some(s.lambda.to_plain(30)), None)
    };
    let result = CountResult {
        dims: spec.dims(),
        boundary: spec.boundary(),
        engine,
        sites,
        count: value.to_string(),
        lambda,
        note,
    };
    let inputs = json!({
        "command": "count",
        "dims": spec.dims(),
        "boundary": spec.boundary(),
        "engine": engine,
        "state_budget_exp": config.state_budget_exp,
    });
    let text = render(args.format, command, inputs, result, started, |r: &CountResult| {
        csv_table(
            &["dims", "boundary", "engine", "sites", "count", "lambda", "note"],
            &[vec![
                r.dims.clone(),
                r.boundary.to_string(),
                r.engine.to_owned(),
                r.sites.to_string(),
                r.count.clone(),
                r.lambda.clone().unwrap_or_default(),
                r.note.unwrap_or_default().to_owned(),
            ]],
        )
    });
    Ok(Output { text, code: 0 })
}

#[derive(Debug, Serialize)]
struct ScanRecord {
    dims: String,
    boundary: Boundary,
    sites: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct ScanResults {
    d: usize,
    boundary: Boundary,
    max_side: usize,
    records: Vec<ScanRecord>,
    skipped: Vec<ScanRecord>,
}

fn scan(args: ScanArgs, command: String, started: Instant) -> Result<Output, Failure> {
    let config = CountConfig::from_env().map_err(Failure::args)?;
    let outcome = lambda_scan(args.d, args.boundary, args.max_side, &config).map_err(Failure::args)?;

    let mut records: Vec<ScanRecord> = outcome
        .samples
        .iter()
        .map(|s| ScanRecord {
            dims: s.spec.dims(),
            boundary: s.boundary,
            sites: s.sites,
            count: Some(s.count.to_string()),
            lambda: Some(s.lambda.to_plain(30)),
            error: None,
        })
        .chain(outcome.errors.iter().map(|e| ScanRecord {
            dims: e.spec.dims(),
            boundary: e.spec.boundary(),
            sites: e.sites,
            count: None,
            lambda: None,
            error: Some(e.reason.clone()),
        }))
        .collect();
    records.sort_by_key(|r| r.sites);
    let skipped = outcome
        .skipped
        .iter()
        .map(|e| ScanRecord {
            dims: e.spec.dims(),
            boundary: e.spec.boundary(),
            sites: e.sites,
            count: None,
            lambda: None,
            error: Some(e.reason.clone()),
        })
        .collect();

    let code = if !outcome.samples.is_empty() {
        0
    } else if !outcome.errors.is_empty() {
        for e in &outcome.errors {
            eprintln!("error: {}: {}", e.spec.dims(), e.reason);
        }
        4
    } else {
        eprintln!("error: no lattices with an even number of sites up to side {}", args.max_side);
        2
    };

    let results = ScanResults { d: args.d, boundary: args.boundary, max_side: args.max_side, records, skipped };
    let inputs = json!({
        "command": "scan",
        "d": args.d,
        "boundary": args.boundary,
        "max_side": args.max_side,
        "state_budget_exp": config.state_budget_exp,
    });
    let text = render(args.format, command, inputs, results, started, |r: &ScanResults| {
        let rows: Vec<Vec<String>> = r
            .records
            .iter()
            .map(|x| (x, "ok"))
            .chain(r.skipped.iter().map(|x| (x, "skipped")))
            .map(|(x, status)| {
                let status = match (&x.error, status) {
                    (Some(_), "ok") => "error",
                    _ => status,
                };
                vec![
                    x.dims.clone(),
                    x.boundary.to_string(),
                    x.sites.to_string(),
                    x.count.clone().unwrap_or_default(),
                    x.lambda.clone().unwrap_or_default(),
                    status.to_owned(),
                    x.error.clone().unwrap_or_default(),
                ]
            })
            .collect();
        csv_table(&["dims", "boundary", "sites", "count", "lambda", "status", "reason"], &rows)
    });
    Ok(Output { text, code })
}

#[derive(Debug, Serialize)]
struct VerifyResults {
    all_passed: bool,
    #[serde(flatten)]
    report: VerifyReport,
}

fn verify(args: VerifyArgs, command: String, started: Instant) -> Result<Output, Failure> {
    let config = CountConfig::from_env().map_err(Failure::args)?;
    let report = run_verification(&SeriesTable::builtin(), &config);
    let code = verify_exit_code(&report);
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {}: {}", c.name, c.detail);
    }
    let results = VerifyResults { all_passed: report.all_passed(), report };
    let inputs = json!({ "command": "verify", "state_budget_exp": config.state_budget_exp });
    let text = render(args.format, command, inputs, results, started, |r: &VerifyResults| {
        let rows: Vec<Vec<String>> = r
            .report
            .checks
            .iter()
            .map(|c| vec![c.name.clone(), if c.passed { "pass" } else { "fail" }.to_owned(), c.detail.clone()])
            .collect();
        csv_table(&["check", "result", "detail"], &rows)
    });
    Ok(Output { text, code })
}

fn verify_exit_code(report: &VerifyReport) -> u8 {
    if report.all_passed() {
        0
    } else {
        1
    }
}
