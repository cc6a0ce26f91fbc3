//! Pauli-string kernel.
//!
//! A question about an N-qubit system is indexed by a string of axes, one per
//! qubit, with `0` marking qubits the question ignores. The all-zero string is
//! the identity and is not a question. This module provides the symbolic
//! product algebra on those strings, their matrix representations, and the
//! Hermitian eigensolves the rest of the crate leans on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Matrix sizes stay desk-scale; 4^6 - 1 indices is already past any suite here.
pub const MAX_QUBITS: usize = 6;

/// Absolute tolerance for Hermiticity validation.
pub const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum PauliError {
    #[error("axis strings have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("question index needs 1..={MAX_QUBITS} qubits, got {0}")]
    BadQubitCount(usize),
    #[error("the all-zero axis string is the identity, not a question")]
    IdentityIndex,
    #[error("cannot parse question index from {0:?}")]
    BadLabel(String),
    #[error("position {0} out of range for {1} qubits")]
    BadPosition(usize, usize),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("eigendecomposition failed to reconstruct input (residual {0:.3e})")]
    BadReconstruction(f64),
}

/// Single-qubit axis slot of a question index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    /// Identity slot: the question ignores this qubit.
    O,
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::O, Axis::X, Axis::Y, Axis::Z];

    pub fn as_char(self) -> char {
        match self {
            Axis::O => '0',
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_char(c: char) -> Option<Axis> {
        match c {
            '0' => Some(Axis::O),
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }

    fn digit(self) -> usize {
        match self {
            Axis::O => 0,
            Axis::X => 1,
            Axis::Y => 2,
            Axis::Z => 3,
        }
    }

    fn from_digit(d: usize) -> Axis {
        match d {
            0 => Axis::O,
            1 => Axis::X,
            2 => Axis::Y,
            3 => Axis::Z,
            _ => unreachable!("digit {d} out of range"),
        }
    }

    /// 2x2 matrix of this axis (identity for `O`).
    pub fn matrix(self) -> DMatrix<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Axis::O => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
            Axis::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            Axis::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Axis::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        }
    }
}

/// Phase picked up by a product of Pauli strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn value(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// True for +-i, i.e. the two factors anti-commute.
    pub fn is_imaginary(self) -> bool {
        matches!(self, Phase::PlusI | Phase::MinusI)
    }

    fn quarter_turns(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    fn from_quarter_turns(t: u8) -> Phase {
        match t % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    // Multiplying unit phases adds their quarter turns mod 4.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_quarter_turns(self.quarter_turns() + rhs.quarter_turns())
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::PlusOne => "+1",
            Phase::PlusI => "+i",
            Phase::MinusOne => "-1",
            Phase::MinusI => "-i",
        };
        f.write_str(s)
    }
}

/// Index of one question: an axis per qubit, at least one non-zero.
///
/// The canonical order over all indices of a given length is lexicographic
/// with 0 < x < y < z, which coincides with base-4 numeric order. `position`
/// and `from_position` convert between an index and its rank in that order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuestionIndex {
    axes: Vec<Axis>,
}

impl QuestionIndex {
    pub fn new(axes: Vec<Axis>) -> Result<Self, PauliError> {
        if axes.is_empty() || axes.len() > MAX_QUBITS {
            return Err(PauliError::BadQubitCount(axes.len()));
        }
        if axes.iter().all(|&a| a == Axis::O) {
            return Err(PauliError::IdentityIndex);
        }
        Ok(QuestionIndex { axes })
    }

    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Number of non-zero slots.
    pub fn weight(&self) -> usize {
        self.axes.iter().filter(|&&a| a != Axis::O).count()
    }

    /// Qubit positions (0-based) the question actually touches.
    pub fn support(&self) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != Axis::O)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rank in the canonical order, in 0..4^N-2.
    pub fn position(&self) -> usize {
        let value: usize = self.axes.iter().fold(0, |acc, a| acc * 4 + a.digit());
        value - 1
    }

    pub fn from_position(n_qubits: usize, position: usize) -> Result<Self, PauliError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(PauliError::BadQubitCount(n_qubits));
        }
        let count = 4usize.pow(n_qubits as u32) - 1;
        if position >= count {
            return Err(PauliError::BadPosition(position, n_qubits));
        }
        let mut value = position + 1;
        let mut axes = vec![Axis::O; n_qubits];
        for slot in axes.iter_mut().rev() {
            *slot = Axis::from_digit(value % 4);
            value /= 4;
        }
        Ok(QuestionIndex { axes })
    }

    /// Total number of questions on `n_qubits` qubits.
    pub fn count(n_qubits: usize) -> usize {
        4usize.pow(n_qubits as u32) - 1
    }

    /// 2^N x 2^N matrix of the corresponding Pauli string.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let mut m = self.axes[0].matrix();
        for a in &self.axes[1..] {
            m = m.kronecker(&a.matrix());
        }
        m
    }
}

impl fmt::Display for QuestionIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.axes {
            write!(f, "{}", a.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for QuestionIndex {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, PauliError> {
        let axes: Option<Vec<Axis>> = s.chars().map(Axis::from_char).collect();
        match axes {
            Some(axes) if !axes.is_empty() => {
                QuestionIndex::new(axes).map_err(|_| PauliError::BadLabel(s.to_string()))
            }
            _ => Err(PauliError::BadLabel(s.to_string())),
        }
    }
}

/// Outcome of multiplying two Pauli strings: `phase * sigma(result)`,
/// with `result = None` when the product is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliProduct {
    pub result: Option<QuestionIndex>,
    pub phase: Phase,
}

fn single_product(a: Axis, b: Axis) -> (Axis, Phase) {
    use Axis::*;
    use Phase::*;
    match (a, b) {
        (O, b) => (b, PlusOne),
        (a, O) => (a, PlusOne),
        (a, b) if a == b => (O, PlusOne),
        (X, Y) => (Z, PlusI),
        (Y, Z) => (X, PlusI),
        (Z, X) => (Y, PlusI),
        (Y, X) => (Z, MinusI),
        (Z, Y) => (X, MinusI),
        (X, Z) => (Y, MinusI),
        _ => unreachable!(),
    }
}

/// Axis-wise symbolic product of two Pauli strings.
pub fn symbolic_product(a: &QuestionIndex, b: &QuestionIndex) -> Result<PauliProduct, PauliError> {
    if a.n_qubits() != b.n_qubits() {
        return Err(PauliError::LengthMismatch(a.n_qubits(), b.n_qubits()));
    }
    let mut phase = Phase::PlusOne;
    let mut axes = Vec::with_capacity(a.n_qubits());
    for (&pa, &pb) in a.axes.iter().zip(&b.axes) {
        let (axis, p) = single_product(pa, pb);
        axes.push(axis);
        phase = phase * p;
    }
    let result = if axes.iter().all(|&x| x == Axis::O) {
        None
    } else {
        Some(QuestionIndex { axes })
    };
    Ok(PauliProduct { result, phase })
}

/// Dense stack of all 4^N - 1 Pauli-string matrices in canonical order.
///
/// Built once and shared: density-matrix conversions and evolution-matrix
/// construction touch every basis element repeatedly.
pub struct PauliBasis {
    n_qubits: usize,
    mats: Vec<DMatrix<Complex64>>,
}

impl PauliBasis {
    pub fn new(n_qubits: usize) -> Result<Self, PauliError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(PauliError::BadQubitCount(n_qubits));
        }
        let count = QuestionIndex::count(n_qubits);
        let mats = (0..count)
            .map(|p| {
                QuestionIndex::from_position(n_qubits, p)
                    .expect("position in range")
                    .matrix()
            })
            .collect();
        Ok(PauliBasis { n_qubits, mats })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mat(&self, position: usize) -> &DMatrix<Complex64> {
        &self.mats[position]
    }

    /// Hermitian combination sum_i v[i] * sigma_i.
    pub fn combination(&self, v: &DVector<f64>) -> DMatrix<Complex64> {
        assert_eq!(v.len(), self.len(), "coefficient count mismatch");
        let d = self.dim();
        let mut acc = DMatrix::zeros(d, d);
        for (i, m) in self.mats.iter().enumerate() {
            if v[i] != 0.0 {
                acc += m * Complex64::new(v[i], 0.0);
            }
        }
        acc
    }

    /// Expectation vector r_i = tr(rho sigma_i), real part (imaginary part is
    /// checked by callers where it matters).
    pub fn expectations(&self, rho: &DMatrix<Complex64>) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            self.mats.iter().map(|m| trace_product(rho, m).re),
        )
    }
}

/// tr(a b) without materialising the product.
pub fn trace_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn check_hermitian(m: &DMatrix<Complex64>, tol: f64) -> Result<(), PauliError> {
    if m.nrows() != m.ncols() {
        return Err(PauliError::NotSquare(m.nrows(), m.ncols()));
    }
    let mut dev: f64 = 0.0;
    for j in 0..m.nrows() {
        for k in j..m.ncols() {
            dev = dev.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    if dev > tol {
        return Err(PauliError::NotHermitian(dev));
    }
    Ok(())
}

/// Eigensystem of a Hermitian matrix: real eigenvalues in descending order,
/// eigenvectors as columns of a special unitary.
pub struct Eigensystem {
    pub eigenvalues: DVector<f64>,
    pub unitary: DMatrix<Complex64>,
}

// Cyclic Jacobi rotations for a Hermitian matrix. The QR-based solver in
// nalgebra can silently lose orthogonality on the degenerate spectra that
// question operators always have (+-1, each at multiplicity dim/2); Jacobi
// converges unconditionally and the dimensions here never exceed 16.
fn jacobi_hermitian(sym: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let dim = sym.nrows();
    let mut a = sym.clone();
    let mut v: DMatrix<Complex64> = DMatrix::identity(dim, dim);
    let scale = max_abs(sym).max(1.0);

    for _ in 0..60 {
        let mut off: f64 = 0.0;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[(p, q)];
                let m = apq.norm();
                if m <= 1e-300 {
                    continue;
                }
                let phase = apq / Complex64::new(m, 0.0);
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * m);
                // Smaller root of t^2 - 2 tau t - 1 = 0 keeps the rotation
                // angle below pi/4 and the iteration stable.
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = Complex64::new(1.0 / (1.0 + t * t).sqrt(), 0.0);
                let s_phase = phase.scale(t * c.re);
                for k in 0..dim {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * s_phase.conj();
                    a[(k, q)] = -akp * s_phase + akq * c;
                }
                for k in 0..dim {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * s_phase;
                    a[(q, k)] = -apk * s_phase.conj() + aqk * c;
                }
                for k in 0..dim {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * s_phase.conj();
                    v[(k, q)] = -vkp * s_phase + vkq * c;
                }
            }
        }
        // Keep the iterate exactly self-adjoint against rounding drift.
        a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    }

    let values = DVector::from_iterator(dim, (0..dim).map(|i| a[(i, i)].re));
    (values, v)
}

/// Diagonalise a Hermitian matrix. The returned unitary has determinant 1
/// and reconstructs the input to 1e-10 * dim; anything worse is an error.
pub fn diagonalize(h: &DMatrix<Complex64>) -> Result<Eigensystem, PauliError> {
    check_hermitian(h, HERMITICITY_TOL)?;
    let dim = h.nrows();
    // Symmetrise first so the solver sees an exactly self-adjoint matrix.
    let sym = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let (raw_values, raw_vectors) = jacobi_hermitian(&sym);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| raw_values[b].partial_cmp(&raw_values[a]).unwrap());

    let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&i| raw_values[i]));
    let mut unitary = DMatrix::zeros(dim, dim);
    for (col, &src) in order.iter().enumerate() {
        unitary.set_column(col, &raw_vectors.column(src));
    }

    // Rotate the global phase onto det = 1 so the unitary sits in SU(2^N).
    let det = unitary.clone().determinant();
    let phase = det.arg();
    let correction = Complex64::from_polar(1.0, -phase / dim as f64);
    unitary *= correction;

    let mut recon = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let col = unitary.column(i);
        let scaled = col * Complex64::new(eigenvalues[i], 0.0);
        recon += scaled * col.adjoint();
    }
    let residual = max_abs(&(&recon - h));
    if residual > 1e-10 * dim as f64 {
        return Err(PauliError::BadReconstruction(residual));
    }

    Ok(Eigensystem {
        eigenvalues,
        unitary,
    })
}

/// exp(-i t h) for Hermitian h, through the eigensystem.
pub fn unitary_exp(h: &DMatrix<Complex64>, t: f64) -> Result<DMatrix<Complex64>, PauliError> {
    let eig = diagonalize(h)?;
    let dim = h.nrows();
    let mut u = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let col = eig.unitary.column(i);
        let rot = Complex64::from_polar(1.0, -t * eig.eigenvalues[i]);
        u += (col * rot) * col.adjoint();
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qi(label: &str) -> QuestionIndex {
        label.parse().unwrap()
    }

    #[test]
    fn single_product_matches_numeric_matrices() {
        for &a in &Axis::ALL {
            for &b in &Axis::ALL {
                let (axis, phase) = single_product(a, b);
                let numeric = a.matrix() * b.matrix();
                let symbolic = axis.matrix() * phase.value();
                assert!(max_abs(&(numeric - symbolic)) < 1e-15, "{a:?} * {b:?}");
            }
        }
    }

    #[test]
    fn symbolic_product_matches_numeric_for_all_pairs() {
        for n in 1..=3usize {
            let basis = PauliBasis::new(n).unwrap();
            for i in 0..basis.len() {
                let a = QuestionIndex::from_position(n, i).unwrap();
                for j in 0..basis.len() {
                    let b = QuestionIndex::from_position(n, j).unwrap();
                    let prod = symbolic_product(&a, &b).unwrap();
                    let symbolic = match &prod.result {
                        Some(q) => q.matrix() * prod.phase.value(),
                        None => DMatrix::identity(basis.dim(), basis.dim()) * prod.phase.value(),
                    };
                    let numeric = basis.mat(i) * basis.mat(j);
                    assert!(
                        max_abs(&(numeric - symbolic)) < 1e-12,
                        "{a} * {b} disagrees with matrix product"
                    );
                }
            }
        }
    }

    #[test]
    fn frozen_two_qubit_products() {
        let p = symbolic_product(&qi("xy"), &qi("yx")).unwrap();
        assert_eq!(p.result, Some(qi("zz")));
        assert_eq!(p.phase, Phase::PlusOne);

        let p = symbolic_product(&qi("xx"), &qi("yy")).unwrap();
        assert_eq!(p.result, Some(qi("zz")));
        assert_eq!(p.phase, Phase::MinusOne);

        let p = symbolic_product(&qi("xy"), &qi("xy")).unwrap();
        assert_eq!(p.result, None);
        assert_eq!(p.phase, Phase::PlusOne);
    }

    #[test]
    fn product_of_equal_strings_is_identity() {
        for n in 1..=3usize {
            for pos in 0..QuestionIndex::count(n) {
                let q = QuestionIndex::from_position(n, pos).unwrap();
                let p = symbolic_product(&q, &q).unwrap();
                assert_eq!(p.result, None);
                assert_eq!(p.phase, Phase::PlusOne);
            }
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let err = symbolic_product(&qi("x"), &qi("xx")).unwrap_err();
        assert_eq!(err, PauliError::LengthMismatch(1, 2));
    }

    #[test]
    fn pauli_matrix_pinned_diagonals() {
        let z0 = qi("z0").matrix();
        let expected = [1.0, 1.0, -1.0, -1.0];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(z0[(i, i)], Complex64::new(e, 0.0));
        }
        assert!(z0.iter().enumerate().all(|(k, c)| {
            let (r, q) = (k % 4, k / 4);
            r == q || c.norm() == 0.0
        }));

        let zzz = qi("zzz").matrix();
        let expected = [1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(zzz[(i, i)], Complex64::new(e, 0.0));
        }
    }

    #[test]
    fn pauli_matrices_square_to_identity_scaled_trace() {
        for n in 1..=3usize {
            let dim = 1 << n;
            for pos in 0..QuestionIndex::count(n) {
                let m = QuestionIndex::from_position(n, pos).unwrap().matrix();
                let sq = &m * &m;
                let tr = (0..dim).map(|i| sq[(i, i)].re).sum::<f64>();
                assert!((tr - dim as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trace_orthogonality() {
        for n in 1..=3usize {
            let basis = PauliBasis::new(n).unwrap();
            let dim = basis.dim() as f64;
            for i in 0..basis.len() {
                for j in i..basis.len() {
                    let tr = trace_product(basis.mat(i), basis.mat(j));
                    let expected = if i == j { dim } else { 0.0 };
                    assert!((tr.re - expected).abs() < 1e-12 && tr.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn position_round_trip() {
        for n in 1..=3usize {
            for pos in 0..QuestionIndex::count(n) {
                let q = QuestionIndex::from_position(n, pos).unwrap();
                assert_eq!(q.position(), pos);
                assert_eq!(q.n_qubits(), n);
                let relabelled: QuestionIndex = q.to_string().parse().unwrap();
                assert_eq!(relabelled, q);
            }
        }
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let labels: Vec<String> = (0..QuestionIndex::count(2))
            .map(|p| QuestionIndex::from_position(2, p).unwrap().to_string())
            .collect();
        let mut sorted = labels.clone();
        sorted.sort();
        assert_eq!(labels, sorted);
        assert_eq!(labels[0], "0x");
        assert_eq!(labels[14], "zz");
    }

    #[test]
    fn identity_and_bad_labels_rejected() {
        assert_eq!(
            "00".parse::<QuestionIndex>().unwrap_err(),
            PauliError::BadLabel("00".into())
        );
        assert!("xq".parse::<QuestionIndex>().is_err());
        assert!("".parse::<QuestionIndex>().is_err());
        assert_eq!(
            QuestionIndex::new(vec![]).unwrap_err(),
            PauliError::BadQubitCount(0)
        );
        assert_eq!(
            QuestionIndex::new(vec![Axis::O; 2]).unwrap_err(),
            PauliError::IdentityIndex
        );
    }

    #[test]
    fn phase_multiplication_matches_complex_numbers() {
        let phases = [Phase::PlusOne, Phase::PlusI, Phase::MinusOne, Phase::MinusI];
        for &a in &phases {
            for &b in &phases {
                let prod = (a * b).value();
                let direct = a.value() * b.value();
                assert!((prod - direct).norm() < 1e-15);
            }
        }
    }

    fn random_hermitian(dim: usize, seed: u64) -> DMatrix<Complex64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    }

    #[test]
    fn diagonalize_reconstructs_and_orders() {
        for seed in 0..20u64 {
            for dim in [2usize, 4, 8] {
                let h = random_hermitian(dim, seed * 31 + dim as u64);
                let eig = diagonalize(&h).unwrap();
                for i in 1..dim {
                    assert!(eig.eigenvalues[i - 1] >= eig.eigenvalues[i] - 1e-12);
                }
                let det = eig.unitary.clone().determinant();
                assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-10);
                let gram = &eig.unitary * eig.unitary.adjoint();
                assert!(max_abs(&(gram - DMatrix::identity(dim, dim))) < 1e-10);
            }
        }
    }

    #[test]
    fn diagonalize_rejects_non_hermitian() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(diagonalize(&m), Err(PauliError::NotHermitian(_))));
    }

    #[test]
    fn unitary_exp_is_unitary_and_obeys_group_law() {
        let h = random_hermitian(4, 7);
        let dim = 4;
        let u1 = unitary_exp(&h, 0.3).unwrap();
        let u2 = unitary_exp(&h, 0.9).unwrap();
        let u12 = unitary_exp(&h, 1.2).unwrap();
        assert!(max_abs(&(&u1 * u1.adjoint() - DMatrix::identity(dim, dim))) < 1e-10);
        assert!(max_abs(&(&u1 * &u2 - u12)) < 1e-10);
    }

    #[test]
    fn unitary_exp_single_qubit_rotation() {
        let z = qi("z").matrix();
        let t = 0.37;
        let u = unitary_exp(&z, t).unwrap();
        assert!((u[(0, 0)] - Complex64::from_polar(1.0, -t)).norm() < 1e-12);
        assert!((u[(1, 1)] - Complex64::from_polar(1.0, t)).norm() < 1e-12);
        assert!(u[(0, 1)].norm() < 1e-12 && u[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn basis_combination_and_expectations_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=2usize {
            let basis = PauliBasis::new(n).unwrap();
            let v = DVector::from_fn(basis.len(), |_, _| rng.gen::<f64>() - 0.5);
            let m = basis.combination(&v);
            check_hermitian(&m, 1e-12).unwrap();
            let back = basis.expectations(&m) / basis.dim() as f64;
            assert!((back - &v).amax() < 1e-12);
        }
    }
}
