//! Suite runner behind the `qrecon` binary: named check suites over the
//! question-set reconstruction, with JSON and fixed-width text reports.
//!
//! Reports are deterministic given the seed: every sampled quantity draws
//! from a stream derived from the configured seed, and serialization uses
//! sorted keys, so two runs with the same configuration emit byte-identical
//! numeric content (the wall-time field is the one exception).

use clap::ValueEnum;
use nalgebra::DVector;
use num_complex::Complex64;
use qrecon_core::bloch::{legality, Legality, LEGALITY_TOL};
use qrecon_core::states::PureStateSample;
use qrecon_core::BlochVector;
use serde_json::json;
use std::fmt;
use thiserror::Error;

pub mod suites;

/// Named check suites, each wiring a fixed list of checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Complementarity graph structure: maximal sets, degrees, pair counts.
    Graph,
    /// Conserved informational quantities on sampled pure states.
    Charges,
    /// Swap generators, their coincidence, closure, and exponentials.
    Generators,
    /// Pure-state characterization, product reduction, seed orbits.
    Purestates,
    /// Probability rule and its duality under evolution.
    Born,
    /// Question decompositions of pure states.
    Decompose,
    /// Single-shot interrogation statistics.
    Interrogate,
    /// Exploratory three-qubit maximal-set information report.
    #[value(name = "conjecture-n3")]
    ConjectureN3,
    /// Union of all suites above.
    All,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Graph => "graph",
            Suite::Charges => "charges",
            Suite::Generators => "generators",
            Suite::Purestates => "purestates",
            Suite::Born => "born",
            Suite::Decompose => "decompose",
            Suite::Interrogate => "interrogate",
            Suite::ConjectureN3 => "conjecture-n3",
            Suite::All => "all",
        };
        write!(f, "{name}")
    }
}

/// Everything a suite run depends on. `state` is the optional user-supplied
/// state: the decomposition target for `decompose`, the prior for
/// `interrogate`; other suites ignore it.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub n_qubits: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub state: Option<BlochVector>,
    pub state_path: Option<String>,
}

/// How a check decides: exact structural equality, a frozen regression
/// value, a toleranced residual, a statistical bound, or a reported value
/// with no pass/fail meaning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Exact,
    Regression,
    Residual,
    Statistical,
    Value,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CheckKind::Exact => "exact",
            CheckKind::Regression => "regression",
            CheckKind::Residual => "residual",
            CheckKind::Statistical => "statistical",
            CheckKind::Value => "value",
        };
        write!(f, "{name}")
    }
}

/// One verified claim. `max_violation` is the worst residual observed, or
/// the reported value itself for [`CheckKind::Value`] rows.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub max_violation: f64,
    pub samples: usize,
    pub kind: CheckKind,
}

impl Check {
    pub fn new(
        name: &'static str,
        passed: bool,
        max_violation: f64,
        samples: usize,
        kind: CheckKind,
    ) -> Self {
        Check {
            name,
            passed,
            max_violation,
            samples,
            kind,
        }
    }
}

/// A finished suite run.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
    pub wall_time_ms: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let checks: Vec<serde_json::Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "passed": c.passed,
                    "max_violation": c.max_violation,
                    "samples": c.samples,
                    "kind": c.kind.to_string(),
                })
            })
            .collect();
        serde_json::to_string_pretty(&json!({
            "suite": self.suite.to_string(),
            "config": {
                "n_qubits": self.config.n_qubits,
                "samples": self.config.samples,
                "seed": self.config.seed,
                "tol": self.config.tol,
                "state": self.config.state_path,
            },
            "checks": checks,
            "wall_time_ms": self.wall_time_ms as u64,
        }))
        .expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "suite: {}  (n_qubits={} samples={} seed={} tol={:.1e})\n",
            self.suite,
            self.config.n_qubits,
            self.config.samples,
            self.config.seed,
            self.config.tol
        );
        out.push_str(&format!(
            "{:<34} {:<6} {:>14} {:>9} {:<11}\n",
            "check", "result", "max_violation", "samples", "kind"
        ));
        for c in &self.checks {
            out.push_str(&format!(
                "{:<34} {:<6} {:>14.6e} {:>9} {:<11}\n",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.max_violation,
                c.samples,
                c.kind.to_string()
            ));
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        out.push_str(&format!(
            "overall: {} ({passed}/{} checks)  wall_time={}ms\n",
            if self.passed() { "pass" } else { "FAIL" },
            self.checks.len(),
            self.wall_time_ms
        ));
        out
    }
}

/// Errors mapped to process exit codes: usage mistakes exit 2, bad input
/// files exit 3 (checks that merely fail exit 1 without an error).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("input: {0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
        }
    }
}

/// Parse a state file: either an amplitude vector as a JSON array of
/// [re, im] pairs (length a power of two), or a component object in the
/// {"n_qubits": N, "components": {label: value}} form.
pub fn load_state(text: &str, require_legal: bool) -> Result<BlochVector, CliError> {
    let doc: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("state file is not JSON: {e}")))?;
    let state = match &doc {
        serde_json::Value::Array(entries) => amplitudes_to_state(entries)?,
        serde_json::Value::Object(_) => BlochVector::from_json(text)
            .map_err(|e| CliError::Input(format!("bad component state: {e}")))?,
        _ => {
            return Err(CliError::Input(
                "state must be an amplitude array or a component object".into(),
            ))
        }
    };
    if require_legal {
        match legality(&state, LEGALITY_TOL) {
            Ok(Legality::Legal) => {}
            Ok(Legality::Illegal { min_eigenvalue }) => {
                return Err(CliError::Input(format!(
                    "state is illegal: minimum density eigenvalue {min_eigenvalue:.3e}"
                )))
            }
            Err(e) => return Err(CliError::Input(format!("legality check failed: {e}"))),
        }
    }
    Ok(state)
}

fn amplitudes_to_state(entries: &[serde_json::Value]) -> Result<BlochVector, CliError> {
    let dim = entries.len();
    let n_qubits = match dim {
        2 => 1,
        4 => 2,
        8 => 3,
        16 => 4,
        _ => {
            return Err(CliError::Input(format!(
                "amplitude vector length {dim} is not a power of two in 2..=16"
            )))
        }
    };
    let mut amplitudes = DVector::zeros(dim);
    for (i, entry) in entries.iter().enumerate() {
        let pair = entry
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| CliError::Input(format!("amplitude {i} must be a [re, im] pair")))?;
        let re = pair[0]
            .as_f64()
            .ok_or_else(|| CliError::Input(format!("amplitude {i}: non-numeric real part")))?;
        let im = pair[1]
            .as_f64()
            .ok_or_else(|| CliError::Input(format!("amplitude {i}: non-numeric imaginary part")))?;
        amplitudes[i] = Complex64::new(re, im);
    }
    let sample = PureStateSample::from_amplitudes(n_qubits, amplitudes)
        .map_err(|e| CliError::Input(format!("bad amplitude state: {e}")))?;
    Ok(sample.bloch().clone())
}

/// Run one suite (or all of them) and time it.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport, CliError> {
    let start = std::time::Instant::now();
    let checks = match config.suite {
        Suite::Graph => suites::graph(config)?,
        Suite::Charges => suites::charges(config)?,
        Suite::Generators => suites::generators(config)?,
        Suite::Purestates => suites::purestates(config)?,
        Suite::Born => suites::born(config)?,
        Suite::Decompose => suites::decompose(config)?,
        Suite::Interrogate => suites::interrogate(config)?,
        Suite::ConjectureN3 => suites::conjecture_n3(config)?,
        Suite::All => {
            let mut all = Vec::new();
            all.extend(suites::graph(config)?);
            all.extend(suites::charges(config)?);
            all.extend(suites::generators(config)?);
            all.extend(suites::purestates(config)?);
            all.extend(suites::born(config)?);
            all.extend(suites::decompose(config)?);
            all.extend(suites::interrogate(config)?);
            all.extend(suites::conjecture_n3(config)?);
            all
        }
    };
    Ok(SuiteReport {
        suite: config.suite,
        config: config.clone(),
        checks,
        wall_time_ms: start.elapsed().as_millis(),
    })
}
