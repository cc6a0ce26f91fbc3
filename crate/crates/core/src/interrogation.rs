//! The question-vector picture: which unit vectors are askable questions,
//! the probability rule, its duality under evolution, and a single-shot
//! interrogation simulator.
//!
//! A unit vector q is a question exactly when q . sigma has a balanced
//! spectrum of +1 and -1: the answer is then one bit with no bias hidden in
//! the operator. Probabilities are affine in the state, y = (1 + q . r) / 2,
//! and agree with the projector trace on the density-matrix side. Evolution
//! moves states forward or pulls questions back, interchangeably.
//!
//! The update rule after an answer is the projective one. Repeatability and
//! preservation of compatible independent answers pin it down only partially;
//! the projective choice is the simplest rule satisfying both, and the tests
//! enforce exactly those two constraints rather than the rule itself.

use crate::bloch::{
    from_density_with, legality, to_density_with, BlochVector, Legality, LEGALITY_TOL,
};
use crate::generators::{EvolutionMatrix, GeneratorsError};
use crate::pauli::{diagonalize, PauliBasis, QuestionIndex};
use crate::questions::Relation;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

/// Tolerance for question-vector validation and orbit deduplication.
pub const QUESTION_TOL: f64 = 1e-9;

/// Slack allowed on a probability before it is reported as out of range.
pub const BORN_SLACK: f64 = 1e-12;

/// Probabilities closer than this to 0 or 1 are treated as certain; the
/// impossible branch is never sampled.
pub const PROBABILITY_GUARD: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum InterrogationError {
    #[error("not a question vector: {0}")]
    NotAQuestion(String),
    #[error("probability {value} outside [0, 1]: illegal question/state pair")]
    BornOutOfRange { value: f64 },
    #[error("prior is not a legal state: minimum density eigenvalue {min_eigenvalue}")]
    IllegalPrior { min_eigenvalue: f64 },
    #[error("size mismatch: expected {expected} qubits, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("operators neither commute nor anticommute: {0}")]
    NoDefiniteRelation(String),
    #[error("bad interrogation script: {0}")]
    BadScript(String),
    #[error(transparent)]
    Pauli(#[from] crate::pauli::PauliError),
    #[error(transparent)]
    Bloch(#[from] crate::bloch::BlochError),
    #[error(transparent)]
    Generators(#[from] GeneratorsError),
}

/// Outcome of the question-vector test.
#[derive(Clone, Debug, PartialEq)]
pub enum IsQuestion {
    Yes,
    No(String),
}

/// Decide whether a component vector is an askable question: unit length and
/// a balanced +/-1 spectrum for the associated operator.
pub fn is_question(
    n_qubits: usize,
    components: &DVector<f64>,
    tol: f64,
) -> Result<IsQuestion, InterrogationError> {
    let expected = QuestionIndex::count(n_qubits);
    if components.len() != expected {
        return Err(InterrogationError::SizeMismatch {
            expected,
            got: components.len(),
        });
    }
    let norm = components.norm();
    if (norm - 1.0).abs() > tol {
        return Ok(IsQuestion::No(format!("|v| = {norm}, need exactly 1")));
    }
    let basis = PauliBasis::new(n_qubits)?;
    let op = basis.combination(components);
    let eig = diagonalize(&op)?;
    let half = basis.dim() / 2;
    let mut plus = 0usize;
    let mut minus = 0usize;
    for &lambda in eig.eigenvalues.iter() {
        if (lambda - 1.0).abs() <= tol {
            plus += 1;
        } else if (lambda + 1.0).abs() <= tol {
            minus += 1;
        } else {
            return Ok(IsQuestion::No(format!(
                "eigenvalue {lambda} is not within {tol} of +1 or -1"
            )));
        }
    }
    if plus != half || minus != half {
        return Ok(IsQuestion::No(format!(
            "unbalanced spectrum: {plus} eigenvalues at +1, {minus} at -1"
        )));
    }
    Ok(IsQuestion::Yes)
}

/// A validated question: unit vector whose operator has a balanced +/-1
/// spectrum. Construction is the only way in, so holders can rely on it.
#[derive(Clone, Debug, PartialEq)]
pub struct QuestionVector {
    n_qubits: usize,
    components: DVector<f64>,
}

impl QuestionVector {
    pub fn new(n_qubits: usize, components: DVector<f64>) -> Result<Self, InterrogationError> {
        match is_question(n_qubits, &components, QUESTION_TOL)? {
            IsQuestion::Yes => Ok(QuestionVector {
                n_qubits,
                components,
            }),
            IsQuestion::No(reason) => Err(InterrogationError::NotAQuestion(reason)),
        }
    }

    /// Validate a state-shaped vector as a question.
    pub fn from_bloch(v: &BlochVector) -> Result<Self, InterrogationError> {
        QuestionVector::new(v.n_qubits(), v.components().clone())
    }

    /// The basis question testing one Pauli string directly.
    pub fn basis(q: &QuestionIndex) -> Self {
        let mut v = BlochVector::zeros(q.n_qubits());
        v.set(q, 1.0);
        QuestionVector {
            n_qubits: q.n_qubits(),
            components: v.components().clone(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn components(&self) -> &DVector<f64> {
        &self.components
    }

    /// View the same components as a state vector, e.g. to evolve them or to
    /// ask how the question performs on itself as a preparation.
    pub fn as_bloch(&self) -> BlochVector {
        BlochVector::new(self.n_qubits, self.components.clone()).expect("length already checked")
    }

    /// q . sigma
    pub fn operator(&self, basis: &PauliBasis) -> DMatrix<Complex64> {
        basis.combination(&self.components)
    }

    /// (1 + a q . sigma) / 2 for answer a = +/-1.
    pub fn projector(&self, basis: &PauliBasis, answer: i8) -> DMatrix<Complex64> {
        let dim = basis.dim();
        let mut p = self.operator(basis) * Complex64::new(0.5 * f64::from(answer), 0.0);
        for i in 0..dim {
            p[(i, i)] += Complex64::new(0.5, 0.0);
        }
        p
    }

    /// Push the question through an evolution; the image is revalidated.
    pub fn evolve(&self, t: &EvolutionMatrix) -> Result<Self, InterrogationError> {
        QuestionVector::from_bloch(&t.apply(&self.as_bloch())?)
    }

    /// Pull the question back through an evolution (the dual action on
    /// questions matching `apply` on states).
    pub fn pull_back(&self, t: &EvolutionMatrix) -> Result<Self, InterrogationError> {
        QuestionVector::from_bloch(&t.apply_transpose(&self.as_bloch())?)
    }
}

/// Probability of answer "yes": y = (1 + q . r) / 2. Out-of-range values are
/// reported, not clamped: they diagnose an illegal pair.
pub fn born(q: &QuestionVector, r: &BlochVector) -> Result<f64, InterrogationError> {
    if q.n_qubits() != r.n_qubits() {
        return Err(InterrogationError::SizeMismatch {
            expected: q.n_qubits(),
            got: r.n_qubits(),
        });
    }
    let y = 0.5 * (1.0 + q.components().dot(r.components()));
    if !(-BORN_SLACK..=1.0 + BORN_SLACK).contains(&y) {
        return Err(InterrogationError::BornOutOfRange { value: y });
    }
    Ok(y)
}

/// The same probability computed on the operator side, tr(P_q rho). Kept as
/// an independent route so the two formulas check each other.
pub fn born_density(q: &QuestionVector, r: &BlochVector) -> Result<f64, InterrogationError> {
    if q.n_qubits() != r.n_qubits() {
        return Err(InterrogationError::SizeMismatch {
            expected: q.n_qubits(),
            got: r.n_qubits(),
        });
    }
    let basis = PauliBasis::new(q.n_qubits())?;
    let rho = to_density_with(&basis, r);
    let p = q.projector(&basis, 1);
    Ok(crate::pauli::trace_product(&p, &rho).re)
}

/// Residuals of the state/question duality under one evolution.
#[derive(Clone, Debug)]
pub struct DualityReport {
    /// y(q | T r)
    pub forward: f64,
    /// y(T^t q | r)
    pub pulled_back: f64,
    /// |forward - pulled_back|
    pub residual: f64,
    /// |y(T q | T r) - y(q | r)|, both sides evolved together
    pub simultaneous_residual: f64,
}

/// Check that evolving the state forward equals pulling the question back,
/// and that evolving both sides changes nothing.
pub fn dual_evolution_check(
    q: &QuestionVector,
    r: &BlochVector,
    t: &EvolutionMatrix,
) -> Result<DualityReport, InterrogationError> {
    let forward = born(q, &t.apply(r)?)?;
    let pulled_back = born(&q.pull_back(t)?, r)?;
    let both = born(&q.evolve(t)?, &t.apply(r)?)?;
    let base = born(q, r)?;
    Ok(DualityReport {
        forward,
        pulled_back,
        residual: (forward - pulled_back).abs(),
        simultaneous_residual: (both - base).abs(),
    })
}

/// Relation of two questions read off their operators: commuting makes them
/// compatible, anticommuting complementary, anything else is an error.
pub fn operator_relation(
    a: &QuestionVector,
    b: &QuestionVector,
    tol: f64,
) -> Result<Relation, InterrogationError> {
    if a.n_qubits() != b.n_qubits() {
        return Err(InterrogationError::SizeMismatch {
            expected: a.n_qubits(),
            got: b.n_qubits(),
        });
    }
    let basis = PauliBasis::new(a.n_qubits())?;
    let oa = a.operator(&basis);
    let ob = b.operator(&basis);
    let prod_ab = &oa * &ob;
    let prod_ba = &ob * &oa;
    let commutator = crate::pauli::max_abs(&(&prod_ab - &prod_ba));
    let anticommutator = crate::pauli::max_abs(&(&prod_ab + &prod_ba));
    match (commutator <= tol, anticommutator <= tol) {
        (true, false) => Ok(Relation::Compatible),
        (false, true) => Ok(Relation::Complementary),
        _ => Err(InterrogationError::NoDefiniteRelation(format!(
            "|[A,B]| = {commutator}, |{{A,B}}| = {anticommutator}"
        ))),
    }
}

/// Transcript of one interrogation run.
#[derive(Clone, Debug)]
pub struct InterrogationRecord {
    pub asked: Vec<QuestionVector>,
    /// +1 for "yes", -1 for "no", in asking order.
    pub answers: Vec<i8>,
    /// The "yes" probability each question had at the moment it was asked.
    pub probabilities: Vec<f64>,
    pub posterior: BlochVector,
}

/// Ask a sequence of questions, sampling each answer and updating the state
/// projectively: rho becomes P rho P / tr(P rho) for the answered branch.
/// Branches with probability below [`PROBABILITY_GUARD`] are never taken.
pub fn interrogate_with(
    prior: &BlochVector,
    questions: &[QuestionVector],
    rng: &mut impl Rng,
) -> Result<InterrogationRecord, InterrogationError> {
    let n = prior.n_qubits();
    if let Legality::Illegal { min_eigenvalue } = legality(prior, LEGALITY_TOL)? {
        return Err(InterrogationError::IllegalPrior { min_eigenvalue });
    }
    for q in questions {
        if q.n_qubits() != n {
            return Err(InterrogationError::SizeMismatch {
                expected: n,
                got: q.n_qubits(),
            });
        }
    }
    let basis = PauliBasis::new(n)?;
    let mut rho = to_density_with(&basis, prior);
    let mut answers = Vec::with_capacity(questions.len());
    let mut probabilities = Vec::with_capacity(questions.len());
    for q in questions {
        let p_plus = q.projector(&basis, 1);
        let p_yes = crate::pauli::trace_product(&p_plus, &rho).re;
        probabilities.push(p_yes);
        let answer: i8 = if p_yes <= PROBABILITY_GUARD {
            -1
        } else if p_yes >= 1.0 - PROBABILITY_GUARD {
            1
        } else {
            if rng.gen_bool(p_yes) {
                1
            } else {
                -1
            }
        };
        let projector = if answer == 1 {
            p_plus
        } else {
            q.projector(&basis, -1)
        };
        let branch_weight = if answer == 1 { p_yes } else { 1.0 - p_yes };
        rho = &projector * rho * &projector / Complex64::new(branch_weight, 0.0);
        answers.push(answer);
    }
    let posterior = from_density_with(&basis, &rho)?;
    Ok(InterrogationRecord {
        asked: questions.to_vec(),
        answers,
        probabilities,
        posterior,
    })
}

/// Seeded convenience wrapper around [`interrogate_with`].
pub fn interrogate(
    prior: &BlochVector,
    questions: &[QuestionVector],
    seed: u64,
) -> Result<InterrogationRecord, InterrogationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    interrogate_with(prior, questions, &mut rng)
}

/// Aggregate of many interrogation runs from the same prior.
#[derive(Clone, Debug)]
pub struct BatchOutcome {
    pub shots: usize,
    /// Per-shot answer records, one inner vector per shot.
    pub answers: Vec<Vec<i8>>,
    /// Fraction of "yes" answers per question position.
    pub yes_frequencies: Vec<f64>,
}

impl BatchOutcome {
    pub fn to_json(&self) -> String {
        json!({
            "shots": self.shots,
            "yes_frequencies": self.yes_frequencies,
            "answers": self.answers,
        })
        .to_string()
    }
}

/// Run the same script many times on one RNG stream and tally the answers.
pub fn interrogate_many(
    prior: &BlochVector,
    questions: &[QuestionVector],
    shots: usize,
    seed: u64,
) -> Result<BatchOutcome, InterrogationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut answers = Vec::with_capacity(shots);
    let mut yes_counts = vec![0usize; questions.len()];
    for _ in 0..shots {
        let record = interrogate_with(prior, questions, &mut rng)?;
        for (i, &a) in record.answers.iter().enumerate() {
            if a == 1 {
                yes_counts[i] += 1;
            }
        }
        answers.push(record.answers);
    }
    let yes_frequencies = yes_counts
        .iter()
        .map(|&c| c as f64 / shots.max(1) as f64)
        .collect();
    Ok(BatchOutcome {
        shots,
        answers,
        yes_frequencies,
    })
}

/// A parsed interrogation script.
#[derive(Clone, Debug)]
pub struct InterrogationScript {
    pub prior: BlochVector,
    pub questions: Vec<QuestionVector>,
    pub shots: usize,
    pub seed: u64,
}

/// Parse {"prior": <state>, "questions": [...], "shots": n, "seed": s}.
/// The prior is a state object; each question is either an index string like
/// "z0" or a state-shaped object validated as a question vector.
pub fn parse_script(text: &str) -> Result<InterrogationScript, InterrogationError> {
    let doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| InterrogationError::BadScript(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| InterrogationError::BadScript("expected an object".into()))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "prior" | "questions" | "shots" | "seed") {
            return Err(InterrogationError::BadScript(format!(
                "unknown key {key:?}"
            )));
        }
    }
    let prior_value = obj
        .get("prior")
        .ok_or_else(|| InterrogationError::BadScript("missing prior".into()))?;
    let prior = BlochVector::from_json(&prior_value.to_string())?;
    let question_values = obj
        .get("questions")
        .and_then(|v| v.as_array())
        .ok_or_else(|| InterrogationError::BadScript("missing questions array".into()))?;
    let mut questions = Vec::with_capacity(question_values.len());
    for value in question_values {
        match value {
            serde_json::Value::String(label) => {
                let q: QuestionIndex = label
                    .parse()
                    .map_err(|_| InterrogationError::BadScript(format!("bad index {label:?}")))?;
                if q.n_qubits() != prior.n_qubits() {
                    return Err(InterrogationError::SizeMismatch {
                        expected: prior.n_qubits(),
                        got: q.n_qubits(),
                    });
                }
                questions.push(QuestionVector::basis(&q));
            }
            serde_json::Value::Object(_) => {
                let v = BlochVector::from_json(&value.to_string())?;
                questions.push(QuestionVector::from_bloch(&v)?);
            }
            other => {
                return Err(InterrogationError::BadScript(format!(
                    "question must be an index string or object, got {other}"
                )));
            }
        }
    }
    let shots = obj.get("shots").and_then(|v| v.as_u64()).unwrap_or(1) as usize;
    let seed = obj.get("seed").and_then(|v| v.as_u64()).unwrap_or(0);
    Ok(InterrogationScript {
        prior,
        questions,
        shots,
        seed,
    })
}
