//! Bloch-vector states and the quadratic information measure.
//!
//! A state of knowledge about N qubits is the vector of biases r_i = 2y_i - 1
//! over all 4^N - 1 questions. Squaring a component gives the information the
//! observer holds about that question in bits; summing over a mutually
//! complementary set can never exceed one bit. Conversion to density matrices
//! pins down which vectors are legal states at all.

use crate::pauli::{check_hermitian, diagonalize, PauliBasis, PauliError, QuestionIndex};
use crate::questions::{
    pentagons, relation, triangles, ComplementaritySet, QuestionsError, Relation,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BlochError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Questions(#[from] QuestionsError),
    #[error("component count {got} does not match 4^{n} - 1 = {want}")]
    BadLength { n: usize, got: usize, want: usize },
    #[error("coefficient count {got} does not match set size {want}")]
    BadRestriction { got: usize, want: usize },
    #[error("state JSON: {0}")]
    BadJson(String),
    #[error("not a pure state: {0}")]
    NotPure(String),
}

/// Expectation-value vector over all questions, in canonical index order.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    n_qubits: usize,
    components: DVector<f64>,
}

impl BlochVector {
    pub fn new(n_qubits: usize, components: DVector<f64>) -> Result<Self, BlochError> {
        let want = QuestionIndex::count(n_qubits);
        if components.len() != want {
            return Err(BlochError::BadLength {
                n: n_qubits,
                got: components.len(),
                want,
            });
        }
        Ok(BlochVector {
            n_qubits,
            components,
        })
    }

    pub fn zeros(n_qubits: usize) -> Self {
        BlochVector {
            n_qubits,
            components: DVector::zeros(QuestionIndex::count(n_qubits)),
        }
    }

    /// Basis vector with 1 at the given question.
    pub fn delta(n_qubits: usize, label: &str) -> Result<Self, BlochError> {
        let q: QuestionIndex = label.parse()?;
        let mut v = Self::zeros(n_qubits);
        if q.n_qubits() != n_qubits {
            return Err(BlochError::BadLength {
                n: n_qubits,
                got: QuestionIndex::count(q.n_qubits()),
                want: QuestionIndex::count(n_qubits),
            });
        }
        v.components[q.position()] = 1.0;
        Ok(v)
    }

    /// Build from sparse (label, value) pairs; unlisted components are zero.
    pub fn from_labeled(n_qubits: usize, entries: &[(&str, f64)]) -> Result<Self, BlochError> {
        let mut v = Self::zeros(n_qubits);
        for (label, value) in entries {
            let q: QuestionIndex = label.parse()?;
            if q.n_qubits() != n_qubits {
                return Err(BlochError::BadJson(format!(
                    "index {label} has {} slots, state has {n_qubits}",
                    q.n_qubits()
                )));
            }
            v.components[q.position()] = *value;
        }
        Ok(v)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn components(&self) -> &DVector<f64> {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut DVector<f64> {
        &mut self.components
    }

    pub fn get(&self, q: &QuestionIndex) -> f64 {
        self.components[q.position()]
    }

    pub fn get_label(&self, label: &str) -> Result<f64, BlochError> {
        let q: QuestionIndex = label.parse()?;
        Ok(self.get(&q))
    }

    pub fn set(&mut self, q: &QuestionIndex, value: f64) {
        self.components[q.position()] = value;
    }

    pub fn norm_squared(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum()
    }

    /// Convex mixture; weights must be non-negative and sum to 1 within 1e-12.
    pub fn mix(parts: &[(f64, &BlochVector)]) -> Result<Self, BlochError> {
        assert!(!parts.is_empty(), "mixture of nothing");
        let n = parts[0].1.n_qubits;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        assert!(
            (total - 1.0).abs() <= 1e-12 && parts.iter().all(|(w, _)| *w >= 0.0),
            "weights must form a convex combination"
        );
        let mut acc = Self::zeros(n);
        for (w, r) in parts {
            assert_eq!(r.n_qubits, n, "mixing states of different sizes");
            acc.components += &r.components * *w;
        }
        Ok(acc)
    }

    /// JSON form {"n_qubits": N, "components": {"zx0": v, ...}}, zeros omitted.
    pub fn to_json(&self) -> String {
        let mut comps = BTreeMap::new();
        for (i, &value) in self.components.iter().enumerate() {
            if value != 0.0 {
                let q = QuestionIndex::from_position(self.n_qubits, i).expect("in range");
                comps.insert(q.to_string(), value);
            }
        }
        let doc = serde_json::json!({ "n_qubits": self.n_qubits, "components": comps });
        serde_json::to_string(&doc).expect("plain map serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, BlochError> {
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| BlochError::BadJson(e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| BlochError::BadJson("expected object".into()))?;
        for key in obj.keys() {
            if key != "n_qubits" && key != "components" {
                return Err(BlochError::BadJson(format!("unknown key {key:?}")));
            }
        }
        let n = obj
            .get("n_qubits")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| BlochError::BadJson("missing integer n_qubits".into()))?
            as usize;
        if n == 0 || n > crate::pauli::MAX_QUBITS {
            return Err(BlochError::BadJson(format!("n_qubits {n} out of range")));
        }
        let mut state = Self::zeros(n);
        let comps = obj
            .get("components")
            .and_then(|v| v.as_object())
            .ok_or_else(|| BlochError::BadJson("missing components object".into()))?;
        for (label, value) in comps {
            let q: QuestionIndex = label
                .parse()
                .map_err(|_| BlochError::BadJson(format!("bad index {label:?}")))?;
            if q.n_qubits() != n {
                return Err(BlochError::BadJson(format!(
                    "index {label:?} has {} slots, state has {n}",
                    q.n_qubits()
                )));
            }
            let value = value
                .as_f64()
                .ok_or_else(|| BlochError::BadJson(format!("non-numeric value at {label:?}")))?;
            state.components[q.position()] = value;
        }
        Ok(state)
    }
}

/// Information bookkeeping for one state.
#[derive(Debug, Clone)]
pub struct InformationReport {
    /// alpha_i = r_i^2 in canonical index order.
    pub per_question: DVector<f64>,
    /// |r|^2, the total information in bits.
    pub total: f64,
    /// Named set contents; for N=2 the six pentagons and twenty triangles.
    pub per_set: Vec<(String, ComplementaritySet, f64)>,
}

impl InformationReport {
    pub fn set_bits(&self, name: &str) -> Option<f64> {
        self.per_set
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, _, b)| *b)
    }
}

/// Information carried by one question set.
pub fn set_information(r: &BlochVector, set: &ComplementaritySet) -> f64 {
    set.members().iter().map(|q| r.get(q).powi(2)).sum()
}

/// Per-question, total, and per-set information of a state.
pub fn information(r: &BlochVector) -> InformationReport {
    let per_question = r.components.map(|c| c * c);
    let total = per_question.sum();
    let mut per_set = Vec::new();
    if r.n_qubits == 2 {
        for (i, p) in pentagons().iter().enumerate() {
            per_set.push((format!("Pent{}", i + 1), p.clone(), set_information(r, p)));
        }
        for (i, t) in triangles().iter().enumerate() {
            per_set.push((format!("Tri{}", i + 1), t.clone(), set_information(r, t)));
        }
    }
    InformationReport {
        per_question,
        total,
        per_set,
    }
}

/// One overfilled complementary set.
#[derive(Debug, Clone)]
pub struct ComplementarityViolation {
    pub set: ComplementaritySet,
    pub content: f64,
    pub excess: f64,
}

/// Report every set whose information exceeds 1 bit by more than `tol`.
pub fn complementarity_check(
    r: &BlochVector,
    sets: &[ComplementaritySet],
    tol: f64,
) -> Vec<ComplementarityViolation> {
    sets.iter()
        .filter_map(|set| {
            let content = set_information(r, set);
            if content > 1.0 + tol {
                Some(ComplementarityViolation {
                    set: set.clone(),
                    content,
                    excess: content - 1.0,
                })
            } else {
                None
            }
        })
        .collect()
}

/// For a two-qubit pure state: the information in question `q` together with
/// the total information in the six questions compatible with `q`. On pure
/// states the bulk determines the boundary: alpha_q = boundary_sum - 1.
pub fn bulk_boundary(r: &BlochVector, q: &QuestionIndex) -> Result<(f64, f64), BlochError> {
    if r.n_qubits != 2 || q.n_qubits() != 2 {
        return Err(BlochError::BadLength {
            n: 2,
            got: r.components.len(),
            want: QuestionIndex::count(2),
        });
    }
    let report = crate::states::pure_state_check(r, crate::states::PURITY_TOL)
        .map_err(|e| BlochError::NotPure(e.to_string()))?;
    if !report.passes {
        return Err(BlochError::NotPure(format!(
            "max residual {:.3e} of the 21 purity equations",
            report.max_abs_residual
        )));
    }
    let alpha_q = r.get(q).powi(2);
    let mut boundary = 0.0;
    for pos in 0..r.components.len() {
        let other = QuestionIndex::from_position(2, pos)?;
        if other == *q {
            continue;
        }
        if relation(q, &other)? == Relation::Compatible {
            boundary += r.components[pos].powi(2);
        }
    }
    Ok((alpha_q, boundary))
}

/// rho = (1 + r . sigma) / 2^N against a prebuilt basis.
pub fn to_density_with(basis: &PauliBasis, r: &BlochVector) -> DMatrix<Complex64> {
    assert_eq!(basis.n_qubits(), r.n_qubits, "basis size mismatch");
    let dim = basis.dim();
    let mut rho = DMatrix::identity(dim, dim);
    rho += basis.combination(&r.components);
    rho / Complex64::new(dim as f64, 0.0)
}

pub fn to_density(r: &BlochVector) -> Result<DMatrix<Complex64>, BlochError> {
    let basis = PauliBasis::new(r.n_qubits)?;
    Ok(to_density_with(&basis, r))
}

/// Inverse map r_i = tr(rho sigma_i); validates Hermiticity and unit trace.
pub fn from_density_with(
    basis: &PauliBasis,
    rho: &DMatrix<Complex64>,
) -> Result<BlochVector, BlochError> {
    check_hermitian(rho, crate::pauli::HERMITICITY_TOL)?;
    let trace: Complex64 = (0..rho.nrows()).map(|i| rho[(i, i)]).sum();
    if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
        return Err(BlochError::BadJson(format!(
            "density trace {trace} is not 1"
        )));
    }
    BlochVector::new(basis.n_qubits(), basis.expectations(rho))
}

pub fn from_density(n_qubits: usize, rho: &DMatrix<Complex64>) -> Result<BlochVector, BlochError> {
    let basis = PauliBasis::new(n_qubits)?;
    from_density_with(&basis, rho)
}

/// Positivity verdict for a Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Legality {
    Legal,
    Illegal { min_eigenvalue: f64 },
}

/// Smallest eigenvalue of the associated density matrix.
pub fn min_density_eigenvalue(r: &BlochVector) -> Result<f64, BlochError> {
    let rho = to_density(r)?;
    let eig = diagonalize(&rho)?;
    Ok(eig.eigenvalues[eig.eigenvalues.len() - 1])
}

/// Legal iff the density matrix is positive semidefinite within `tol`.
pub fn legality(r: &BlochVector, tol: f64) -> Result<Legality, BlochError> {
    let min = min_density_eigenvalue(r)?;
    if min >= -tol {
        Ok(Legality::Legal)
    } else {
        Ok(Legality::Illegal {
            min_eigenvalue: min,
        })
    }
}

/// Default positivity tolerance on the smallest density eigenvalue.
pub const LEGALITY_TOL: f64 = 1e-9;

/// Eigenvalues (descending) of 1 + sum_i r_i sigma_i over a mutually
/// complementary set; they come out as 1 + |r| and 1 - |r|, each present.
pub fn anticommuting_spectrum(
    r_restricted: &[f64],
    set: &ComplementaritySet,
) -> Result<Vec<f64>, BlochError> {
    if r_restricted.len() != set.len() {
        return Err(BlochError::BadRestriction {
            got: r_restricted.len(),
            want: set.len(),
        });
    }
    let members = set.members();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            if relation(&members[i], &members[j])? != Relation::Complementary {
                return Err(QuestionsError::SetNotComplementary(
                    members[i].to_string(),
                    members[j].to_string(),
                )
                .into());
            }
        }
    }
    let n = members[0].n_qubits();
    let dim = 1usize << n;
    let mut s = DMatrix::identity(dim, dim);
    for (coeff, q) in r_restricted.iter().zip(members) {
        s += q.matrix() * Complex64::new(*coeff, 0.0);
    }
    let eig = diagonalize(&s)?;
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// Hand-checkable fixture states shared by tests across the crate.
#[cfg(test)]
pub(crate) mod tests_support {
    use super::BlochVector;

    /// z-sector seed (1,1,1): knows both individual z questions and their
    /// correlation.
    pub(crate) fn seed2() -> BlochVector {
        BlochVector::from_labeled(2, &[("z0", 1.0), ("0z", 1.0), ("zz", 1.0)]).unwrap()
    }

    /// Product state along x for qubit 1 and (y+z)/sqrt(2) for qubit 2;
    /// hand-checkable pure state that is not axis-aligned.
    pub(crate) fn tilted_product() -> BlochVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        BlochVector::from_labeled(
            2,
            &[("x0", 1.0), ("0y", s), ("0z", s), ("xy", s), ("xz", s)],
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::tests_support::{seed2, tilted_product};
    use super::*;
    use approx::assert_abs_diff_eq;

    fn qi(label: &str) -> QuestionIndex {
        label.parse().unwrap()
    }

    #[test]
    fn information_pinned_examples() {
        let report = information(&BlochVector::zeros(2));
        assert_eq!(report.total, 0.0);

        let report = information(&seed2());
        assert_eq!(report.total, 3.0);
        for a in 1..=6 {
            assert_eq!(report.set_bits(&format!("Pent{a}")), Some(1.0));
        }

        let report = information(&tilted_product());
        assert_abs_diff_eq!(report.total, 3.0, epsilon = 1e-12);
        let t19 = report.set_bits("Tri19").unwrap();
        let t20 = report.set_bits("Tri20").unwrap();
        assert_abs_diff_eq!(t19, t20, epsilon = 1e-12);
    }

    #[test]
    fn pentagon_contents_double_count_total() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let v = DVector::from_fn(15, |_, _| rng.gen::<f64>() * 2.0 - 1.0);
            let r = BlochVector::new(2, v).unwrap();
            let report = information(&r);
            let pent_sum: f64 = (1..=6)
                .map(|a| report.set_bits(&format!("Pent{a}")).unwrap())
                .sum();
            // Every question sits in exactly two pentagons.
            assert_abs_diff_eq!(
                pent_sum,
                2.0 * report.total,
                epsilon = 1e-13 * (1.0 + report.total)
            );
        }
    }

    #[test]
    fn complementarity_check_flags_overfull_sets() {
        let all_sets: Vec<ComplementaritySet> = pentagons()
            .iter()
            .chain(triangles().iter())
            .cloned()
            .collect();

        assert!(complementarity_check(&seed2(), &all_sets, 1e-9).is_empty());
        assert!(complementarity_check(&tilted_product(), &all_sets, 1e-9).is_empty());

        let bad = BlochVector::from_labeled(2, &[("x0", 1.0), ("y0", 1.0)]).unwrap();
        let violations = complementarity_check(&bad, &all_sets, 1e-9);
        let tri19 = triangles()[18].clone();
        let hit = violations
            .iter()
            .find(|v| v.set == tri19)
            .expect("Tri19 must be flagged");
        assert_abs_diff_eq!(hit.excess, 1.0, epsilon = 1e-12);
        // Pent5 contains both x1 and y1, so it is overfull too; nothing else is.
        assert_eq!(violations.len(), 2);
    }

    #[test]
    fn compatible_pairs_are_not_complementarity_sets() {
        let err = ComplementaritySet::new(vec![qi("x0"), qi("0x")], false).unwrap_err();
        assert!(matches!(err, QuestionsError::SetNotComplementary(_, _)));
    }

    #[test]
    fn density_round_trip_and_pinned_matrices() {
        let rho = to_density(&BlochVector::zeros(2)).unwrap();
        assert!(
            crate::pauli::max_abs(&(rho - DMatrix::identity(4, 4) * Complex64::new(0.25, 0.0)))
                < 1e-15
        );

        let rho = to_density(&seed2()).unwrap();
        let mut expected = DMatrix::zeros(4, 4);
        expected[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(crate::pauli::max_abs(&(rho - expected)) < 1e-15);

        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3usize {
            let basis = PauliBasis::new(n).unwrap();
            for _ in 0..20 {
                let v = DVector::from_fn(QuestionIndex::count(n), |_, _| {
                    (rng.gen::<f64>() * 2.0 - 1.0) * 0.3
                });
                let r = BlochVector::new(n, v).unwrap();
                let rho = to_density_with(&basis, &r);
                let back = from_density_with(&basis, &rho).unwrap();
                assert!((back.components() - r.components()).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn legality_boundary_cases() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ill = BlochVector::from_labeled(2, &[("x0", s), ("0x", s)]).unwrap();
        match legality(&ill, LEGALITY_TOL).unwrap() {
            Legality::Illegal { min_eigenvalue } => {
                assert_abs_diff_eq!(min_eigenvalue, (1.0 - 2.0f64.sqrt()) / 4.0, epsilon = 1e-12);
            }
            Legality::Legal => panic!("equal-weight x1+x2 vector must be illegal"),
        }

        let boundary =
            BlochVector::from_labeled(2, &[("x0", s), ("0x", s), ("xx", 2.0f64.sqrt() - 1.0)])
                .unwrap();
        let min = min_density_eigenvalue(&boundary).unwrap();
        assert!(
            (-1e-9..=1e-6).contains(&min),
            "boundary state min eigenvalue {min}"
        );
        assert_eq!(legality(&boundary, LEGALITY_TOL).unwrap(), Legality::Legal);

        // Unit vectors supported on one maximal complementary set are legal.
        for set in pentagons().iter().chain(triangles().iter()) {
            let mut r = BlochVector::zeros(2);
            let scale = 1.0 / (set.len() as f64).sqrt();
            for q in set.members() {
                r.set(q, scale);
            }
            assert_eq!(legality(&r, LEGALITY_TOL).unwrap(), Legality::Legal);
        }
    }

    #[test]
    fn anticommuting_spectrum_pinned() {
        let tri19 = &triangles()[18];
        let spec = anticommuting_spectrum(&[1.0, 0.0, 0.0], tri19).unwrap();
        assert_eq!(spec.len(), 4);
        assert_abs_diff_eq!(spec[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec[2], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec[3], 0.0, epsilon = 1e-12);

        let spec = anticommuting_spectrum(&[0.0, 0.0, 0.0], tri19).unwrap();
        for v in spec {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        }

        let pent1 = &pentagons()[0];
        let c = 1.2 / (5.0f64).sqrt();
        let spec = anticommuting_spectrum(&[c; 5], pent1).unwrap();
        assert_abs_diff_eq!(spec[spec.len() - 1], -0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(spec[0], 2.2, epsilon = 1e-12);

        // General |r|: both values 1 +- |r| present, nothing else.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for set in pentagons().iter().chain(triangles().iter()) {
            let coeffs: Vec<f64> = (0..set.len())
                .map(|_| rng.gen::<f64>() * 2.0 - 1.0)
                .collect();
            let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
            let spec = anticommuting_spectrum(&coeffs, set).unwrap();
            for v in &spec {
                let hi = (v - (1.0 + norm)).abs();
                let lo = (v - (1.0 - norm)).abs();
                assert!(hi.min(lo) < 1e-10, "eigenvalue {v} off the 1 +- |r| pair");
            }
            assert!(spec.iter().any(|v| (v - (1.0 + norm)).abs() < 1e-10));
            assert!(spec.iter().any(|v| (v - (1.0 - norm)).abs() < 1e-10));
        }

        let err = anticommuting_spectrum(&[1.0], tri19).unwrap_err();
        assert!(matches!(err, BlochError::BadRestriction { .. }));
    }

    #[test]
    fn mixing_cannot_raise_per_question_information() {
        // Strictness needs differing components; Haar-free stand-ins with all
        // components distinct do the job.
        let r1 = seed2();
        let r2 = tilted_product();
        for lambda in [0.25, 0.5, 0.75] {
            let mixed = BlochVector::mix(&[(lambda, &r1), (1.0 - lambda, &r2)]).unwrap();
            let a = information(&r1).per_question;
            let b = information(&r2).per_question;
            let m = information(&mixed).per_question;
            for i in 0..m.len() {
                let cap = a[i].max(b[i]);
                assert!(m[i] <= cap + 1e-12);
                if cap > 0.0 && (a[i] - b[i]).abs() > 1e-12 {
                    assert!(m[i] < cap, "component {i}: {} !< {cap}", m[i]);
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let r = seed2();
        let json = r.to_json();
        let back = BlochVector::from_json(&json).unwrap();
        assert_eq!(back, r);

        let back = BlochVector::from_json(r#"{"n_qubits":2,"components":{"zz":0.5}}"#).unwrap();
        assert_eq!(back.get(&qi("zz")), 0.5);
        assert_eq!(back.norm_squared(), 0.25);

        assert!(BlochVector::from_json(r#"{"n_qubits":2,"components":{"qq":1}}"#).is_err());
        assert!(BlochVector::from_json(r#"{"n_qubits":2,"components":{"zzz":1}}"#).is_err());
        assert!(BlochVector::from_json(r#"{"n_qubits":2}"#).is_err());
        assert!(BlochVector::from_json(r#"{"n_qubits":0,"components":{}}"#).is_err());
        assert!(BlochVector::from_json(r#"{"n_qubits":2,"components":{},"extra":1}"#).is_err());
    }
}
