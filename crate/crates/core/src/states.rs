//! Pure states: sampling, the 21-equation characterization, seed sets,
//! reduction to product form, and question decompositions.
//!
//! At two qubits a state is pure exactly when it is legal and satisfies 21
//! quadratic equations: each of the six pentagons carries one full bit, and
//! each of the 15 swap generators conserves the information of the pentagons
//! it trades. The solutions split into two classes swapped by global negation
//! (the XNOR and XOR conventions for building composite questions); evolution
//! acts transitively on each class and never crosses between them. Every pure
//! state can be rotated to a product form whose z-sector components are all
//! unit, and decomposed there into 2^N - 1 compatible unit question vectors.

use crate::bloch::{legality, BlochVector, Legality, LEGALITY_TOL};
use crate::generators::{
    closed_form_exp, conservation_residual, induced_evolution, random_group_element,
    swap_generator, swap_generators_cached, EvolutionMatrix, GeneratorsError, PENTAGON_PAIRS,
};
use crate::pauli::{diagonalize, Axis, PauliBasis, QuestionIndex};
use crate::questions::pentagon;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::json;
use std::fmt;
use thiserror::Error;

/// Tolerance for the 21 purity residuals and the pure-state norm.
pub const PURITY_TOL: f64 = 1e-9;

/// Tolerance on the product form reached by [`evolve_to_product`]: z-sector
/// components must sit within this of +/-1, all others within it of zero.
pub const PRODUCT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum StatesError {
    #[error("unsupported system size {got}: need 1 <= n_qubits <= {max}")]
    UnsupportedSize { got: usize, max: usize },
    #[error("the 21-equation purity check is defined at 2 qubits, got {0}")]
    NotTwoQubit(usize),
    #[error("not a pure state: {0}")]
    NotPure(String),
    #[error("the XOR convention class is only materialized at 2 qubits, got {0}")]
    XorOnlyTwoQubits(usize),
    #[error("sampled state has |r|^2 = {got}, expected {expected}")]
    BadSampleNorm { got: f64, expected: f64 },
    #[error(transparent)]
    Pauli(#[from] crate::pauli::PauliError),
    #[error(transparent)]
    Questions(#[from] crate::questions::QuestionsError),
    #[error(transparent)]
    Bloch(#[from] crate::bloch::BlochError),
    #[error(transparent)]
    Generators(#[from] GeneratorsError),
}

/// A pure state as amplitudes together with its question-component vector.
#[derive(Clone, Debug)]
pub struct PureStateSample {
    amplitudes: DVector<Complex64>,
    bloch: BlochVector,
}

impl PureStateSample {
    /// Wrap an amplitude vector: normalises, derives the components, and
    /// verifies |r|^2 = 2^N - 1.
    pub fn from_amplitudes(
        n_qubits: usize,
        amplitudes: DVector<Complex64>,
    ) -> Result<Self, StatesError> {
        if !(1..=4).contains(&n_qubits) {
            return Err(StatesError::UnsupportedSize {
                got: n_qubits,
                max: 4,
            });
        }
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(StatesError::BadSampleNorm {
                got: amplitudes.len() as f64,
                expected: dim as f64,
            });
        }
        let norm = amplitudes.norm();
        if norm < 1e-12 {
            return Err(StatesError::NotPure("zero amplitude vector".into()));
        }
        let amplitudes = amplitudes / Complex64::new(norm, 0.0);
        let basis = PauliBasis::new(n_qubits)?;
        let rho = &amplitudes * amplitudes.adjoint();
        let bloch = BlochVector::new(n_qubits, basis.expectations(&rho))?;
        let expected = (dim - 1) as f64;
        let got = bloch.norm_squared();
        if (got - expected).abs() > PURITY_TOL {
            return Err(StatesError::BadSampleNorm { got, expected });
        }
        Ok(PureStateSample { amplitudes, bloch })
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn bloch(&self) -> &BlochVector {
        &self.bloch
    }

    pub fn density(&self) -> DMatrix<Complex64> {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// Draw one state from the rotation-invariant distribution: a normalised
/// vector of independent complex standard normals.
pub fn sample_pure_with(
    n_qubits: usize,
    rng: &mut impl Rng,
) -> Result<PureStateSample, StatesError> {
    if !(1..=4).contains(&n_qubits) {
        return Err(StatesError::UnsupportedSize {
            got: n_qubits,
            max: 4,
        });
    }
    let dim = 1usize << n_qubits;
    let amplitudes = DVector::from_iterator(
        dim,
        (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
    );
    PureStateSample::from_amplitudes(n_qubits, amplitudes)
}

/// Seeded convenience wrapper around [`sample_pure_with`].
pub fn sample_pure(n_qubits: usize, seed: u64) -> Result<PureStateSample, StatesError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_pure_with(n_qubits, &mut rng)
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of the R diagonal pulled into Q.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let ginibre = DMatrix::from_iterator(
        dim,
        dim,
        (0..dim * dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
    );
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / Complex64::new(d.norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Convention for extending single-qubit answers to composite questions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedConvention {
    Xnor,
    Xor,
}

impl fmt::Display for SeedConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedConvention::Xnor => write!(f, "XNOR"),
            SeedConvention::Xor => write!(f, "XOR"),
        }
    }
}

/// The 2^N fully-determined z-sector states of one convention class.
#[derive(Clone, Debug)]
pub struct SeedSet {
    pub convention: SeedConvention,
    pub vectors: Vec<BlochVector>,
}

fn seed_vector(n_qubits: usize, signs: &[f64]) -> BlochVector {
    let mut r = BlochVector::zeros(n_qubits);
    for pos in 0..QuestionIndex::count(n_qubits) {
        let q = QuestionIndex::from_position(n_qubits, pos).expect("in range");
        if q.axes().iter().all(|a| matches!(a, Axis::O | Axis::Z)) {
            let value: f64 = q
                .axes()
                .iter()
                .enumerate()
                .filter(|(_, a)| matches!(a, Axis::Z))
                .map(|(k, _)| signs[k])
                .product();
            r.set(&q, value);
        }
    }
    r
}

/// All product seed states of one convention. Every multipartite z component
/// is the product of the single-qubit signs (XNOR); the XOR class is the
/// global negation, materialized only at two qubits. At two qubits the order
/// follows the solution numbering: r_zz = +1 first.
pub fn seed_states(n_qubits: usize, convention: SeedConvention) -> Result<SeedSet, StatesError> {
    if !(1..=4).contains(&n_qubits) {
        return Err(StatesError::UnsupportedSize {
            got: n_qubits,
            max: 4,
        });
    }
    if convention == SeedConvention::Xor && n_qubits != 2 {
        return Err(StatesError::XorOnlyTwoQubits(n_qubits));
    }
    let sign_rows: Vec<Vec<f64>> = if n_qubits == 2 {
        vec![
            vec![1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
        ]
    } else {
        (0..1usize << n_qubits)
            .map(|code| {
                (0..n_qubits)
                    .map(|k| if code >> k & 1 == 0 { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect()
    };
    let mut vectors: Vec<BlochVector> = sign_rows
        .iter()
        .map(|signs| seed_vector(n_qubits, signs))
        .collect();
    if convention == SeedConvention::Xor {
        for v in &mut vectors {
            let negated = -v.components().clone();
            *v = BlochVector::new(n_qubits, negated)?;
        }
    }
    Ok(SeedSet {
        convention,
        vectors,
    })
}

/// The 21 purity residuals of a two-qubit state: six pentagon equalities
/// I(Pent_a) - 1 and the 15 canonical conservation charges.
#[derive(Clone, Debug)]
pub struct PurityReport {
    /// I(Pent_a) - 1 for a = 1..=6
    pub pentagon_residuals: Vec<f64>,
    /// conservation of pentagon a under swap(a, b), in pair order
    pub conservation_residuals: Vec<f64>,
    pub max_abs_residual: f64,
    pub tol: f64,
    pub passes: bool,
}

/// Evaluate the 21 equations that cut out the pure-state orbit at two qubits.
/// Note they are blind to the convention class: legality separately excludes
/// the globally negated solutions.
pub fn pure_state_check(r: &BlochVector, tol: f64) -> Result<PurityReport, StatesError> {
    if r.n_qubits() != 2 {
        return Err(StatesError::NotTwoQubit(r.n_qubits()));
    }
    let mut pentagon_residuals = Vec::with_capacity(6);
    for a in 1..=6 {
        pentagon_residuals.push(crate::bloch::set_information(r, pentagon(a)?) - 1.0);
    }
    let mut conservation_residuals = Vec::with_capacity(15);
    for (g, &(a, _)) in swap_generators_cached().iter().zip(PENTAGON_PAIRS.iter()) {
        conservation_residuals.push(conservation_residual(r, g, a)?);
    }
    let max_abs_residual = pentagon_residuals
        .iter()
        .chain(conservation_residuals.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(PurityReport {
        pentagon_residuals,
        conservation_residuals,
        max_abs_residual,
        tol,
        passes: max_abs_residual <= tol,
    })
}

/// Composite purity test for any supported size: correct squared length,
/// legality, and (at two qubits) the 21 equations. Beyond two qubits no
/// equation system is available, so length plus legality stands in; the
/// product-form reduction provides a further downstream check.
pub fn is_pure_composite(r: &BlochVector, tol: f64) -> Result<bool, StatesError> {
    let n = r.n_qubits();
    if !(1..=4).contains(&n) {
        return Err(StatesError::UnsupportedSize { got: n, max: 4 });
    }
    let expected = (1usize << n) as f64 - 1.0;
    if (r.norm_squared() - expected).abs() > tol {
        return Ok(false);
    }
    if !matches!(legality(r, LEGALITY_TOL)?, Legality::Legal) {
        return Ok(false);
    }
    if n == 2 && !pure_state_check(r, tol)?.passes {
        return Ok(false);
    }
    Ok(true)
}

/// Rotate a pure state into product form: diagonalise chi = r . sigma with a
/// special unitary and push the conjugation down to the components. The
/// output carries +/-1 exactly on the 2^N - 1 z-sector questions and zero
/// elsewhere (within [`PRODUCT_TOL`]); anything else reports a non-pure input.
pub fn evolve_to_product(r: &BlochVector) -> Result<(BlochVector, EvolutionMatrix), StatesError> {
    let n = r.n_qubits();
    if !(1..=4).contains(&n) {
        return Err(StatesError::UnsupportedSize { got: n, max: 4 });
    }
    let basis = PauliBasis::new(n)?;
    let chi = basis.combination(r.components());
    let eig = diagonalize(&chi)?;
    let v = eig.unitary.adjoint();
    let evolution = induced_evolution(&basis, &v, 0.0)?;
    let product = evolution.apply(r)?;
    for pos in 0..product.len() {
        let value = product.components()[pos];
        let q = QuestionIndex::from_position(n, pos)?;
        if value.abs() > 1.0 + PRODUCT_TOL {
            return Err(StatesError::NotPure(format!(
                "component {q} = {value} exceeds unit magnitude"
            )));
        }
        let z_sector = q.axes().iter().all(|a| matches!(a, Axis::O | Axis::Z));
        if z_sector {
            if (value.abs() - 1.0).abs() > PRODUCT_TOL {
                return Err(StatesError::NotPure(format!(
                    "z-sector component {q} = {value} is not a full bit"
                )));
            }
        } else if value.abs() > PRODUCT_TOL {
            return Err(StatesError::NotPure(format!(
                "residual component {q} = {value} outside the z sector"
            )));
        }
    }
    Ok((product, evolution))
}

/// One way of writing a pure state as a sum of 2^N - 1 mutually compatible
/// unit question vectors.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub target: BlochVector,
    /// Question vectors in the original frame; they sum to `target`.
    pub questions: Vec<BlochVector>,
    /// Diagonal sign patterns of the same questions in the product frame,
    /// e.g. "++--" for the operator diag(1, 1, -1, -1).
    pub patterns: Vec<String>,
}

fn pattern_string(pattern: &[i8]) -> String {
    pattern
        .iter()
        .map(|&s| if s > 0 { '+' } else { '-' })
        .collect()
}

/// Enumerate the balanced sign patterns that answer "yes" on the product
/// state: +1 in slot 0, and exactly 2^{N-1} - 1 more +1 entries. Ordered
/// plus-first, so the z-sector strings come before their reshuffles.
fn candidate_patterns(dim: usize) -> Vec<Vec<i8>> {
    let slots = dim - 1;
    let plus_needed = dim / 2 - 1;
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << slots) {
        if mask.count_ones() as usize != plus_needed {
            continue;
        }
        let mut pattern = Vec::with_capacity(dim);
        pattern.push(1i8);
        for bit in 0..slots {
            pattern.push(if mask >> bit & 1 == 1 { 1 } else { -1 });
        }
        out.push(pattern);
    }
    out.sort_by(|a, b| b.cmp(a));
    out
}

fn decomposition_search(dim: usize) -> Vec<Vec<Vec<i8>>> {
    let candidates = candidate_patterns(dim);
    let need = dim - 1;
    let per_column = dim / 2 - 1;
    let mut chosen: Vec<usize> = Vec::with_capacity(need);
    let mut column_plus = vec![0usize; dim];
    let mut solutions = Vec::new();
    search(
        &candidates,
        0,
        need,
        per_column,
        &mut chosen,
        &mut column_plus,
        &mut solutions,
    );
    solutions
}

fn search(
    candidates: &[Vec<i8>],
    start: usize,
    need: usize,
    per_column: usize,
    chosen: &mut Vec<usize>,
    column_plus: &mut Vec<usize>,
    solutions: &mut Vec<Vec<Vec<i8>>>,
) {
    if chosen.len() == need {
        if column_plus[1..].iter().all(|&c| c == per_column) {
            solutions.push(chosen.iter().map(|&i| candidates[i].clone()).collect());
        }
        return;
    }
    let remaining_picks = need - chosen.len();
    if candidates.len() - start < remaining_picks {
        return;
    }
    for idx in start..candidates.len() {
        let pattern = &candidates[idx];
        let mut feasible = true;
        for (col, &sign) in pattern.iter().enumerate().skip(1) {
            let next = column_plus[col] + usize::from(sign > 0);
            // A column can neither overshoot its quota nor fall so far behind
            // that the remaining picks cannot fill it.
            if next > per_column || per_column - next > remaining_picks - 1 {
                feasible = false;
                break;
            }
        }
        if !feasible {
            continue;
        }
        for (col, &sign) in pattern.iter().enumerate().skip(1) {
            column_plus[col] += usize::from(sign > 0);
        }
        chosen.push(idx);
        search(
            candidates,
            idx + 1,
            need,
            per_column,
            chosen,
            column_plus,
            solutions,
        );
        chosen.pop();
        for (col, &sign) in pattern.iter().enumerate().skip(1) {
            column_plus[col] -= usize::from(sign > 0);
        }
    }
}

/// Find every decomposition of a pure state into 2^N - 1 compatible unit
/// question vectors. The state is first rotated to product form; there the
/// valid questions are the balanced diagonal sign patterns answering "yes",
/// and a set of them works exactly when each non-target diagonal slot
/// receives 2^{N-1} - 1 plus signs. Results are mapped back through the
/// inverse rotation. Deterministic order: plus-first over the patterns.
pub fn decompose_pure(r: &BlochVector) -> Result<Vec<Decomposition>, StatesError> {
    let n = r.n_qubits();
    if !(1..=3).contains(&n) {
        return Err(StatesError::UnsupportedSize { got: n, max: 3 });
    }
    let (_, evolution) = evolve_to_product(r)?;
    let dim = 1usize << n;
    let basis = PauliBasis::new(n)?;
    let mut out = Vec::new();
    for pattern_set in decomposition_search(dim) {
        let mut questions = Vec::with_capacity(pattern_set.len());
        let mut patterns = Vec::with_capacity(pattern_set.len());
        for pattern in &pattern_set {
            let op = DMatrix::from_diagonal(&DVector::from_iterator(
                dim,
                pattern.iter().map(|&s| Complex64::new(f64::from(s), 0.0)),
            ));
            // Coefficients of an operator need tr(D sigma_i) / 2^N; the bare
            // trace is only the coefficient for trace-one density matrices.
            let coefficients = basis.expectations(&op) / dim as f64;
            let product_frame = BlochVector::new(n, coefficients)?;
            questions.push(evolution.apply_transpose(&product_frame)?);
            patterns.push(pattern_string(pattern));
        }
        out.push(Decomposition {
            target: r.clone(),
            questions,
            patterns,
        });
    }
    Ok(out)
}

/// JSON form: one array of sign-pattern strings per decomposition.
pub fn decompositions_to_json(decompositions: &[Decomposition]) -> String {
    let arrays: Vec<serde_json::Value> = decompositions.iter().map(|d| json!(d.patterns)).collect();
    json!(arrays).to_string()
}

/// One verified seed-to-seed transition.
#[derive(Clone, Debug)]
pub struct SeedTransition {
    pub pair: (usize, usize),
    pub from: usize,
    pub to: usize,
    pub residual: f64,
}

/// Evidence that evolution acts transitively on one convention class and
/// never reaches the other.
#[derive(Clone, Debug)]
pub struct OrbitReport {
    pub transitions: Vec<SeedTransition>,
    pub max_transition_residual: f64,
    pub random_elements: usize,
    /// Smallest distance from any evolved seed to any opposite-class seed.
    pub min_distance_to_xor: f64,
}

/// Verify the half-turn exponentials that connect the four seed solutions,
/// then apply random group elements to the seeds and record how close any
/// image ever comes to the opposite convention class. Statistical evidence,
/// not proof.
pub fn orbit_connectivity_demo(
    random_elements: usize,
    seed: u64,
) -> Result<OrbitReport, StatesError> {
    let xnor = seed_states(2, SeedConvention::Xnor)?;
    let xor = seed_states(2, SeedConvention::Xor)?;
    // Half turns named after the pentagon pairs they rotate; the first two
    // entries are the published transitions, the rest complete connectivity.
    let cases: [((usize, usize), usize, usize); 7] = [
        ((3, 5), 1, 4),
        ((4, 6), 1, 3),
        ((3, 5), 2, 3),
        ((4, 6), 2, 4),
        ((1, 5), 1, 4),
        ((2, 6), 1, 3),
        ((1, 2), 1, 2),
    ];
    let mut transitions = Vec::with_capacity(cases.len());
    let mut max_transition_residual: f64 = 0.0;
    for ((a, b), from, to) in cases {
        let g = swap_generator(a, b)?;
        let half_turn = closed_form_exp(&g, std::f64::consts::PI)?;
        let image = half_turn.apply(&xnor.vectors[from - 1])?;
        let diff = image.components() - xnor.vectors[to - 1].components();
        let residual = diff.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        max_transition_residual = max_transition_residual.max(residual);
        transitions.push(SeedTransition {
            pair: (a, b),
            from,
            to,
            residual,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_distance_to_xor = f64::INFINITY;
    for _ in 0..random_elements {
        let element = random_group_element(2, 4, &mut rng)?;
        let start = &xnor.vectors[rng.gen_range(0..xnor.vectors.len())];
        let moved = element.apply(start)?;
        for target in &xor.vectors {
            let dist = (moved.components() - target.components()).norm();
            min_distance_to_xor = min_distance_to_xor.min(dist);
        }
    }
    Ok(OrbitReport {
        transitions,
        max_transition_residual,
        random_elements,
        min_distance_to_xor,
    })
}
