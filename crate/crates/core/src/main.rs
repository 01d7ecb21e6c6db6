use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use biharm::cli::{
    self, parse_family_args, run_families, CheckOptions, CliError, Format, Manifest, EXIT_MANIFEST,
    EXIT_OK,
};
use biharm::golden;

#[derive(Parser)]
#[command(name = "biharm", version, about = "Biharmonicity checks for Riemannian submersions")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the manifest's criteria over its grid and print a report.
    Check {
        #[arg(long)]
        manifest: PathBuf,
        /// Write the report here instead of the manifest's output path or stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Zero threshold for every criterion.
        #[arg(long)]
        tol: Option<f64>,
        /// Worker threads.
        #[arg(long, env = "BIHARM_JOBS")]
        jobs: Option<usize>,
    },
    /// Emit a warped-product manifest built from Riccati families.
    Families {
        /// I, II or III; repeat once per base coordinate.
        #[arg(long = "case", required = true)]
        cases: Vec<String>,
        #[arg(long = "a", allow_negative_numbers = true)]
        a: Vec<f64>,
        #[arg(long = "b", allow_negative_numbers = true)]
        b: Vec<f64>,
        /// Override a coordinate range, as `var=min:max:count`.
        #[arg(long = "grid")]
        grid: Vec<String>,
        #[arg(long)]
        emit: PathBuf,
    },
    /// Run the built-in worked examples and print a pass/fail table.
    Golden,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn check(
    manifest: PathBuf,
    out: Option<PathBuf>,
    format: Option<Format>,
    tol: Option<f64>,
    jobs: Option<usize>,
) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&manifest)
        .map_err(|e| CliError::Manifest(format!("cannot read {}: {e}", manifest.display())))?;
    let m = Manifest::from_json(&text)?;
    let report = cli::run_check(&m, CheckOptions { tol, jobs })?;
    let format = format
        .or_else(|| m.output.as_ref().and_then(|o| o.format))
        .unwrap_or(Format::Json);
    let text = report.render(format, unix_now())?;
    match out.or_else(|| m.output.as_ref().and_then(|o| o.path.clone()).map(PathBuf::from)) {
        Some(path) => std::fs::write(path, text).map_err(io)?,
        None => print!("{text}"),
    }
    Ok(report.exit_code())
}

fn families(
    cases: Vec<String>,
    a: Vec<f64>,
    b: Vec<f64>,
    grid: Vec<String>,
    emit: PathBuf,
) -> Result<i32, CliError> {
    let specs = parse_family_args(&cases, &a, &b)?;
    let m = run_families(&specs, &grid)?;
    let mut text = serde_json::to_string_pretty(&m).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(emit, text).map_err(io)?;
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Check {
            manifest,
            out,
            format,
            tol,
            jobs,
        } => check(manifest, out, format, tol, jobs),
        Command::Families {
            cases,
            a,
            b,
            grid,
            emit,
        } => families(cases, a, b, grid, emit),
        Command::Golden => {
            let outcomes = golden::run_golden();
            for o in &outcomes {
                println!("{}", o.line());
            }
            Ok(if outcomes.iter().all(|o| o.passed) { EXIT_OK } else { 1 })
        }
    };
    let code = result.unwrap_or_else(|e| {
        eprintln!("biharm: {e}");
        e.exit_code()
    });
    ExitCode::from(u8::try_from(code).unwrap_or(EXIT_MANIFEST as u8))
}
