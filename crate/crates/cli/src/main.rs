use clap::{Parser, ValueEnum};
use qrecon_cli::{load_state, run_suite, CliError, Suite, SuiteConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Batch verification of the N-qubit question-set reconstruction.
///
/// Exit codes: 0 all checks passed, 1 at least one check failed, 2 usage
/// error, 3 unreadable or invalid input state.
#[derive(Parser)]
#[command(name = "qrecon", version)]
struct Args {
    /// Check suite to run
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,

    /// System size; suites outside their defined size reject it
    #[arg(long, default_value_t = 2)]
    n_qubits: usize,

    /// Sample count for stochastic checks (interrogation shots, sampled
    /// states, duality triples)
    #[arg(long, default_value_t = 1000)]
    samples: usize,

    /// Seed for every random draw; reports are deterministic given it
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Residual tolerance for sampled-state checks (structural checks use
    /// their own pinned tolerances)
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,

    /// State file: JSON amplitude array of [re, im] pairs, or a component
    /// object {"n_qubits": N, "components": {"z0": 1.0, ...}}. Used as the
    /// decomposition target and the interrogation prior.
    #[arg(long)]
    state: Option<PathBuf>,

    /// Reject the loaded state unless it is a legal (positive) state
    #[arg(long)]
    require_legal: bool,

    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn run(args: &Args) -> Result<bool, CliError> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    if args.n_qubits == 0 || args.n_qubits > 4 {
        return Err(CliError::Usage(format!(
            "--n-qubits {} outside the supported 1..=4",
            args.n_qubits
        )));
    }
    let state = match &args.state {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            Some(load_state(&text, args.require_legal)?)
        }
        None => None,
    };
    let config = SuiteConfig {
        suite: args.suite,
        n_qubits: args.n_qubits,
        samples: args.samples,
        seed: args.seed,
        tol: args.tol,
        state,
        state_path: args.state.as_ref().map(|p| p.display().to_string()),
    };
    let report = run_suite(&config)?;
    let rendered = match args.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &args.output {
        Some(path) => std::fs::write(path, rendered.as_bytes())
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{rendered}"),
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qrecon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
