//! The check catalogues behind each suite name. Check names are globally
//! unique so the `all` suite is a plain concatenation.

use crate::{Check, CheckKind, CliError, SuiteConfig};
use nalgebra::DVector;
use qrecon_core::bloch::{
    complementarity_check, legality, min_density_eigenvalue, set_information, Legality,
    LEGALITY_TOL,
};
use qrecon_core::generators::{
    closed_form_exp, coincidence_sign_table, generic_exp, induced_evolution, lie_closure_check,
    random_group_element, sign_derivation_replay, swap_generators_cached, von_neumann_consistency,
};
use qrecon_core::interrogation as interr;
use qrecon_core::interrogation::QuestionVector;
use qrecon_core::pauli::PauliBasis;
use qrecon_core::questions::{
    complementary_pair_count, degree_profile, maximal_complementary_sets, pentagons, triangles,
    TRIANGLE_IDENTITY_PAIRS,
};
use qrecon_core::states::{
    decompose_pure, evolve_to_product, haar_unitary, orbit_connectivity_demo, pure_state_check,
    sample_pure_with, seed_states, SeedConvention, PRODUCT_TOL,
};
use qrecon_core::{BlochVector, QuestionIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Frozen three-qubit maximal-set census: total count and per-size counts.
const N3_CENSUS: (usize, [(usize, usize); 3]) = (2640, [(3, 336), (5, 2016), (7, 288)]);

/// Frozen three-qubit decomposition count (regression value, not a claim
/// from outside this artifact).
const N3_DECOMPOSITION_COUNT: usize = 11205;

/// The permutation-image pattern that must appear among N=3 decompositions.
const N3_WITNESS_PATTERN: &str = "+++-+---";

fn rng_for(cfg: &SuiteConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt)
}

fn require_two_qubits(cfg: &SuiteConfig, suite: &str) -> Result<(), CliError> {
    if cfg.n_qubits != 2 {
        return Err(CliError::Usage(format!(
            "suite {suite} is defined at n_qubits = 2, got {}",
            cfg.n_qubits
        )));
    }
    Ok(())
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("check construction failed: {e}"))
}

fn sample_two_qubit_pure(rng: &mut ChaCha8Rng) -> Result<BlochVector, CliError> {
    Ok(sample_pure_with(2, rng).map_err(internal)?.bloch().clone())
}

/// Legal but generally mixed two-qubit state: a random convex mixture of two
/// pure samples.
fn sample_mixture(rng: &mut ChaCha8Rng) -> Result<BlochVector, CliError> {
    let a = sample_two_qubit_pure(rng)?;
    let b = sample_two_qubit_pure(rng)?;
    let lambda: f64 = rng.gen_range(0.0..=1.0);
    BlochVector::mix(&[(lambda, &a), (1.0 - lambda, &b)]).map_err(internal)
}

pub fn graph(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    match cfg.n_qubits {
        2 => {
            let sets = maximal_complementary_sets(2).map_err(internal)?;
            let five: Vec<_> = sets.iter().filter(|s| s.len() == 5).collect();
            let three: Vec<_> = sets.iter().filter(|s| s.len() == 3).collect();

            let pentagon_hit = |labels: Vec<String>| {
                pentagons().iter().any(|p| {
                    let mut mine = p.labels();
                    mine.sort();
                    let mut theirs = labels.clone();
                    theirs.sort();
                    mine == theirs
                })
            };
            let five_ok = five.len() == 6
                && five.iter().all(|s| pentagon_hit(s.labels()))
                && sets.len() == 26;
            let triangle_hit = |labels: Vec<String>| {
                triangles().iter().any(|t| {
                    let mut mine = t.labels();
                    mine.sort();
                    let mut theirs = labels.clone();
                    theirs.sort();
                    mine == theirs
                })
            };
            let three_ok = three.len() == 20 && three.iter().all(|s| triangle_hit(s.labels()));

            let profile = degree_profile(2).map_err(internal)?;
            let degree_ok = profile
                .iter()
                .all(|(_, compat, compl)| *compat == 6 && *compl == 8);
            let pairs = complementary_pair_count(2).map_err(internal)?;

            Ok(vec![
                Check::new(
                    "pentagon-sets",
                    five_ok,
                    f64::from(u8::from(!five_ok)),
                    1,
                    CheckKind::Exact,
                ),
                Check::new(
                    "triangle-sets",
                    three_ok,
                    f64::from(u8::from(!three_ok)),
                    1,
                    CheckKind::Exact,
                ),
                Check::new(
                    "degree-profile",
                    degree_ok,
                    f64::from(u8::from(!degree_ok)),
                    profile.len(),
                    CheckKind::Exact,
                ),
                Check::new(
                    "complementary-pair-count",
                    pairs == 60,
                    (pairs as f64 - 60.0).abs(),
                    1,
                    CheckKind::Exact,
                ),
            ])
        }
        3 => {
            let sets = maximal_complementary_sets(3).map_err(internal)?;
            let census_ok = sets.len() == N3_CENSUS.0
                && N3_CENSUS
                    .1
                    .iter()
                    .all(|&(size, count)| sets.iter().filter(|s| s.len() == size).count() == count);
            Ok(vec![Check::new(
                "maximal-set-census",
                census_ok,
                (sets.len() as f64 - N3_CENSUS.0 as f64).abs(),
                sets.len(),
                CheckKind::Regression,
            )])
        }
        other => Err(CliError::Usage(format!(
            "suite graph is defined for n_qubits in 2..=3, got {other}"
        ))),
    }
}

pub fn charges(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    require_two_qubits(cfg, "charges")?;
    let mut rng = rng_for(cfg, 0x43484745);
    let sets = maximal_complementary_sets(2).map_err(internal)?;

    let mut max_pentagon: f64 = 0.0;
    let mut max_conservation: f64 = 0.0;
    let mut max_evolved: f64 = 0.0;
    let mut max_triangle: f64 = 0.0;
    let mut bound_violations = 0usize;
    let mut max_excess: f64 = 0.0;

    for i in 0..cfg.samples {
        let r = sample_two_qubit_pure(&mut rng)?;
        let report = pure_state_check(&r, cfg.tol).map_err(internal)?;
        for v in &report.pentagon_residuals {
            max_pentagon = max_pentagon.max(v.abs());
        }
        for v in &report.conservation_residuals {
            max_conservation = max_conservation.max(v.abs());
        }

        let t = random_group_element(2, 4, &mut rng).map_err(internal)?;
        let moved = t.apply(&r).map_err(internal)?;
        let evolved = pure_state_check(&moved, cfg.tol).map_err(internal)?;
        max_evolved = max_evolved.max(evolved.max_abs_residual);

        for &(a, b) in &TRIANGLE_IDENTITY_PAIRS {
            let ia = set_information(&r, &triangles()[a - 1]);
            let ib = set_information(&r, &triangles()[b - 1]);
            max_triangle = max_triangle.max((ia - ib).abs());
        }

        // Alternate pure and mixed states for the inequality sweep.
        let legal = if i % 2 == 0 {
            r
        } else {
            sample_mixture(&mut rng)?
        };
        let violations = complementarity_check(&legal, &sets, cfg.tol);
        bound_violations += violations.len();
        for v in violations {
            max_excess = max_excess.max(v.excess);
        }
    }

    Ok(vec![
        Check::new(
            "pentagon-equalities",
            max_pentagon <= cfg.tol,
            max_pentagon,
            cfg.samples,
            CheckKind::Residual,
        ),
        Check::new(
            "conservation-equations",
            max_conservation <= cfg.tol,
            max_conservation,
            cfg.samples,
            CheckKind::Residual,
        ),
        Check::new(
            "evolved-charges",
            max_evolved <= cfg.tol,
            max_evolved,
            cfg.samples,
            CheckKind::Residual,
        ),
        Check::new(
            "triangle-identities",
            max_triangle <= cfg.tol,
            max_triangle,
            cfg.samples,
            CheckKind::Residual,
        ),
        Check::new(
            "complementarity-bounds",
            bound_violations == 0,
            max_excess,
            cfg.samples,
            CheckKind::Residual,
        ),
    ])
}

pub fn generators(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    require_two_qubits(cfg, "generators")?;
    let mut rng = rng_for(cfg, 0x47454e53);

    let table = coincidence_sign_table().map_err(internal)?;
    let max_coincidence = table.iter().fold(0.0f64, |acc, e| acc.max(e.max_deviation));
    let signs_unit = table.iter().all(|e| e.sign.abs() == 1.0);

    let closure = lie_closure_check(2).map_err(internal)?;
    let closure_violation = closure
        .max_expansion_residual
        .max(closure.max_coefficient_deviation);

    let mut max_exp: f64 = 0.0;
    for g in swap_generators_cached() {
        for _ in 0..20 {
            let t = rng.gen_range(-std::f64::consts::TAU..std::f64::consts::TAU);
            let closed = closed_form_exp(g, t).map_err(internal)?;
            let generic = generic_exp(g.matrix(), t).map_err(internal)?;
            let diff = closed.matrix() - generic.matrix();
            max_exp = max_exp.max(diff.iter().fold(0.0f64, |acc, x| acc.max(x.abs())));
        }
    }

    let replay =
        sign_derivation_replay(cfg.samples.min(200), cfg.tol, cfg.seed).map_err(internal)?;
    let replay_ok = replay.survivors == vec![[-1, 1, -1]];

    Ok(vec![
        Check::new(
            "adjoint-swap-coincidence",
            max_coincidence <= 1e-12 && signs_unit,
            max_coincidence,
            15,
            CheckKind::Residual,
        ),
        Check::new(
            "lie-closure",
            closure_violation <= 1e-10,
            closure_violation,
            closure.pairs_checked,
            CheckKind::Residual,
        ),
        Check::new(
            "closed-form-exponential",
            max_exp <= 1e-10,
            max_exp,
            15 * 20,
            CheckKind::Residual,
        ),
        Check::new(
            "sign-replay",
            replay_ok,
            replay.max_survivor_residual,
            replay.assignments_tested,
            CheckKind::Exact,
        ),
    ])
}

pub fn purestates(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    require_two_qubits(cfg, "purestates")?;
    let mut rng = rng_for(cfg, 0x50555245);
    let mut checks = Vec::new();

    for n in [2usize, 3] {
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.samples {
            let s = sample_pure_with(n, &mut rng).map_err(internal)?;
            let (product, _) = evolve_to_product(s.bloch()).map_err(internal)?;
            for pos in 0..product.len() {
                let q = QuestionIndex::from_position(n, pos).map_err(internal)?;
                let z_sector = q
                    .axes()
                    .iter()
                    .all(|a| matches!(a, qrecon_core::Axis::O | qrecon_core::Axis::Z));
                let v = product.components()[pos];
                let deviation = if z_sector {
                    (v.abs() - 1.0).abs()
                } else {
                    v.abs()
                };
                worst = worst.max(deviation);
            }
        }
        let name: &'static str = if n == 2 {
            "evolve-to-product-n2"
        } else {
            "evolve-to-product-n3"
        };
        checks.push(Check::new(
            name,
            worst <= PRODUCT_TOL,
            worst,
            cfg.samples,
            CheckKind::Residual,
        ));
    }

    let orbit = orbit_connectivity_demo(cfg.samples, cfg.seed).map_err(internal)?;
    checks.push(Check::new(
        "seed-transitions",
        orbit.max_transition_residual <= 1e-12,
        orbit.max_transition_residual,
        orbit.transitions.len(),
        CheckKind::Residual,
    ));
    checks.push(Check::new(
        "convention-separation",
        orbit.min_distance_to_xor > 1e-6,
        orbit.min_distance_to_xor,
        orbit.random_elements,
        CheckKind::Statistical,
    ));

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let flat = BlochVector::from_labeled(2, &[("x0", s), ("0x", s)]).map_err(internal)?;
    let flat_illegal = matches!(
        legality(&flat, LEGALITY_TOL).map_err(internal)?,
        Legality::Illegal { .. }
    );
    checks.push(Check::new(
        "legality-boundary-illegal",
        flat_illegal,
        f64::from(u8::from(!flat_illegal)),
        1,
        CheckKind::Exact,
    ));
    let patched = BlochVector::from_labeled(
        2,
        &[("x0", s), ("0x", s), ("xx", std::f64::consts::SQRT_2 - 1.0)],
    )
    .map_err(internal)?;
    let eig = min_density_eigenvalue(&patched).map_err(internal)?;
    let in_window = (-1e-9..=1e-6).contains(&eig);
    let window_violation = if in_window {
        0.0
    } else {
        (eig + 1e-9).min(0.0).abs().max((eig - 1e-6).max(0.0))
    };
    checks.push(Check::new(
        "legality-boundary-eigenvalue",
        in_window,
        window_violation,
        1,
        CheckKind::Residual,
    ));

    let xnor = seed_states(2, SeedConvention::Xnor).map_err(internal)?;
    let xor = seed_states(2, SeedConvention::Xor).map_err(internal)?;
    let mut class_ok = true;
    let mut class_residual: f64 = 0.0;
    for v in &xnor.vectors {
        class_ok &= matches!(
            legality(v, LEGALITY_TOL).map_err(internal)?,
            Legality::Legal
        );
        let report = pure_state_check(v, cfg.tol).map_err(internal)?;
        class_ok &= report.passes;
        class_residual = class_residual.max(report.max_abs_residual);
    }
    for v in &xor.vectors {
        // The negated class satisfies the equations but fails positivity.
        class_ok &= matches!(
            legality(v, LEGALITY_TOL).map_err(internal)?,
            Legality::Illegal { .. }
        );
        let report = pure_state_check(v, cfg.tol).map_err(internal)?;
        class_ok &= report.passes;
        class_residual = class_residual.max(report.max_abs_residual);
    }
    checks.push(Check::new(
        "seed-class-legality",
        class_ok,
        class_residual,
        xnor.vectors.len() + xor.vectors.len(),
        CheckKind::Exact,
    ));

    Ok(checks)
}

pub fn born(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    require_two_qubits(cfg, "born")?;
    let mut rng = rng_for(cfg, 0x424f524e);
    let mut checks = Vec::new();

    // Dual-route agreement at one, two, and three qubits.
    let per_size = cfg.samples.div_ceil(3).max(1);
    let mut max_route: f64 = 0.0;
    for n in [1usize, 2, 3] {
        let basis = PauliBasis::new(n).map_err(internal)?;
        let count = QuestionIndex::count(n);
        for i in 0..per_size {
            let u = haar_unitary(basis.dim(), &mut rng);
            let t = induced_evolution(&basis, &u, 0.0).map_err(internal)?;
            let pos = rng.gen_range(0..count);
            let q_index = QuestionIndex::from_position(n, pos).map_err(internal)?;
            let q = QuestionVector::basis(&q_index)
                .evolve(&t)
                .map_err(internal)?;
            let r = if i % 2 == 0 || n != 2 {
                sample_pure_with(n, &mut rng)
                    .map_err(internal)?
                    .bloch()
                    .clone()
            } else {
                sample_mixture(&mut rng)?
            };
            let direct = interr::born(&q, &r).map_err(internal)?;
            let traced = interr::born_density(&q, &r).map_err(internal)?;
            max_route = max_route.max((direct - traced).abs());
        }
    }
    checks.push(Check::new(
        "born-dual-route",
        max_route <= 1e-12,
        max_route,
        3 * per_size,
        CheckKind::Residual,
    ));

    // Basis table: y = 1 on the matching index, 1/2 otherwise, exactly.
    let mut table_worst: f64 = 0.0;
    for n in [1usize, 2] {
        let count = QuestionIndex::count(n);
        for qi in 0..count {
            let q_index = QuestionIndex::from_position(n, qi).map_err(internal)?;
            let q = QuestionVector::basis(&q_index);
            for ri in 0..count {
                let mut r = BlochVector::zeros(n);
                r.set(&QuestionIndex::from_position(n, ri).map_err(internal)?, 1.0);
                let expected = if qi == ri { 1.0 } else { 0.5 };
                let y = interr::born(&q, &r).map_err(internal)?;
                table_worst = table_worst.max((y - expected).abs());
            }
            let center = interr::born(&q, &BlochVector::zeros(n)).map_err(internal)?;
            table_worst = table_worst.max((center - 0.5).abs());
        }
    }
    checks.push(Check::new(
        "born-basis-table",
        table_worst == 0.0,
        table_worst,
        15 * 15 + 3 * 3 + 18,
        CheckKind::Exact,
    ));

    let mut affine_worst: f64 = 0.0;
    for _ in 0..50 {
        let a = sample_two_qubit_pure(&mut rng)?;
        let b = sample_two_qubit_pure(&mut rng)?;
        let lambda: f64 = rng.gen_range(0.0..=1.0);
        let mixed = BlochVector::mix(&[(lambda, &a), (1.0 - lambda, &b)]).map_err(internal)?;
        let q = QuestionVector::basis(&"yx".parse().map_err(internal)?);
        let direct = interr::born(&q, &mixed).map_err(internal)?;
        let combined = lambda * interr::born(&q, &a).map_err(internal)?
            + (1.0 - lambda) * interr::born(&q, &b).map_err(internal)?;
        affine_worst = affine_worst.max((direct - combined).abs());
    }
    checks.push(Check::new(
        "born-affinity",
        affine_worst <= 1e-14,
        affine_worst,
        50,
        CheckKind::Residual,
    ));

    let mut duality_worst: f64 = 0.0;
    for i in 0..cfg.samples {
        let warmup = random_group_element(2, 4, &mut rng).map_err(internal)?;
        let q = QuestionVector::basis(&"0y".parse().map_err(internal)?)
            .evolve(&warmup)
            .map_err(internal)?;
        let r = if i % 2 == 0 {
            sample_two_qubit_pure(&mut rng)?
        } else {
            sample_mixture(&mut rng)?
        };
        let t = random_group_element(2, 4, &mut rng).map_err(internal)?;
        let report = interr::dual_evolution_check(&q, &r, &t).map_err(internal)?;
        duality_worst = duality_worst
            .max(report.residual)
            .max(report.simultaneous_residual);
    }
    checks.push(Check::new(
        "duality-triples",
        duality_worst <= 1e-12,
        duality_worst,
        cfg.samples,
        CheckKind::Residual,
    ));

    let basis = PauliBasis::new(2).map_err(internal)?;
    let mut hamiltonian_coeffs = DVector::zeros(QuestionIndex::count(2));
    for v in hamiltonian_coeffs.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    let correlator = basis.combination(BlochVector::delta(2, "xx").map_err(internal)?.components());
    let generic = basis.combination(&hamiltonian_coeffs);
    let mut derivative_worst: f64 = 0.0;
    for h in [correlator, generic] {
        let report = von_neumann_consistency(&h, 0.37, cfg.seed).map_err(internal)?;
        derivative_worst = derivative_worst
            .max(report.derivative_residual)
            .max(report.density_residual);
    }
    checks.push(Check::new(
        "von-neumann-consistency",
        derivative_worst <= 1e-6,
        derivative_worst,
        2,
        CheckKind::Residual,
    ));

    Ok(checks)
}

pub fn decompose(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    let mut rng = rng_for(cfg, 0x4445434f);
    let mut checks = Vec::new();

    let target_for = |n: usize, rng: &mut ChaCha8Rng| -> Result<BlochVector, CliError> {
        if let Some(state) = &cfg.state {
            if state.n_qubits() == n {
                return Ok(state.clone());
            }
        }
        Ok(sample_pure_with(n, rng).map_err(internal)?.bloch().clone())
    };

    let expectations: [(usize, usize, &'static str); 3] = [
        (1, 1, "decomposition-count-n1"),
        (2, 1, "decomposition-count-n2"),
        (3, N3_DECOMPOSITION_COUNT, "decomposition-count-n3"),
    ];
    let mut n3_decompositions = None;
    let mut validity_worst: f64 = 0.0;
    for (n, expected, name) in expectations {
        let target = target_for(n, &mut rng)?;
        let decompositions = decompose_pure(&target)
            .map_err(|e| CliError::Input(format!("decomposition target at {n} qubits: {e}")))?;
        let count = decompositions.len();
        checks.push(Check::new(
            name,
            count == expected,
            (count as f64 - expected as f64).abs(),
            count,
            if n == 3 {
                CheckKind::Regression
            } else {
                CheckKind::Exact
            },
        ));
        let spot: Vec<usize> = match count {
            0 => vec![],
            1 => vec![0],
            _ => vec![0, count - 1],
        };
        for idx in spot {
            validity_worst =
                validity_worst.max(decomposition_deviation(&decompositions[idx], &target)?);
        }
        if n == 3 {
            n3_decompositions = Some(decompositions);
        }
    }

    let witness_found = n3_decompositions
        .as_ref()
        .map(|ds| {
            ds.iter()
                .any(|d| d.patterns.iter().any(|p| p == N3_WITNESS_PATTERN))
        })
        .unwrap_or(false);
    checks.push(Check::new(
        "decomposition-witness-n3",
        witness_found,
        f64::from(u8::from(!witness_found)),
        1,
        CheckKind::Exact,
    ));
    checks.push(Check::new(
        "decomposition-validity",
        validity_worst <= cfg.tol,
        validity_worst,
        5,
        CheckKind::Residual,
    ));

    Ok(checks)
}

/// Worst deviation of one decomposition from its contract: members sum to
/// the target, have unit norm, commute pairwise, and answer "yes" surely.
fn decomposition_deviation(
    d: &qrecon_core::Decomposition,
    target: &BlochVector,
) -> Result<f64, CliError> {
    let n = target.n_qubits();
    let basis = PauliBasis::new(n).map_err(internal)?;
    let mut worst: f64 = 0.0;
    let mut sum = DVector::zeros(target.len());
    let operators: Vec<_> = d
        .questions
        .iter()
        .map(|q| basis.combination(q.components()))
        .collect();
    for (q, op) in d.questions.iter().zip(operators.iter()) {
        worst = worst.max((q.norm_squared() - 1.0).abs());
        worst = worst.max((q.components().dot(target.components()) - 1.0).abs());
        sum += q.components();
        for other in operators.iter() {
            let comm = op * other - other * op;
            worst = worst.max(qrecon_core::pauli::max_abs(&comm));
        }
    }
    let diff = sum - target.components();
    worst = worst.max(diff.iter().fold(0.0f64, |acc, v| acc.max(v.abs())));
    Ok(worst)
}

pub fn interrogate(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    require_two_qubits(cfg, "interrogate")?;
    let mut rng = rng_for(cfg, 0x494e5452);
    let prior = cfg.state.clone().unwrap_or_else(|| BlochVector::zeros(2));
    let q = |label: &str| -> Result<QuestionVector, CliError> {
        Ok(QuestionVector::basis(&label.parse().map_err(internal)?))
    };
    let mut checks = Vec::new();

    let z1 = q("z0")?;
    let expected = interr::born(&z1, &prior).map_err(internal)?;
    let outcome =
        interr::interrogate_many(&prior, std::slice::from_ref(&z1), cfg.samples, cfg.seed)
            .map_err(|e| CliError::Input(format!("interrogation prior rejected: {e}")))?;
    let sigma = (expected * (1.0 - expected) / cfg.samples as f64).sqrt();
    let deviation = (outcome.yes_frequencies[0] - expected).abs();
    checks.push(Check::new(
        "frequency-consistency",
        deviation <= 3.0 * sigma.max(f64::EPSILON),
        deviation,
        cfg.samples,
        CheckKind::Statistical,
    ));

    // x1 answered, wiped by y1, asked again: the repeat is a fresh coin flip.
    let script = [q("x0")?, q("y0")?, q("x0")?];
    let outcome = interr::interrogate_many(&prior, &script, cfg.samples, cfg.seed ^ 1)
        .map_err(|e| CliError::Input(format!("interrogation prior rejected: {e}")))?;
    let wipe_sigma = (0.25 / cfg.samples as f64).sqrt();
    let wipe_deviation = (outcome.yes_frequencies[2] - 0.5).abs();
    checks.push(Check::new(
        "complementarity-wipe",
        wipe_deviation <= 3.0 * wipe_sigma,
        wipe_deviation,
        cfg.samples,
        CheckKind::Statistical,
    ));

    let full_z = [q("z0")?, q("0z")?, q("zz")?];
    let seeds = seed_states(2, SeedConvention::Xnor).map_err(internal)?;
    let runs = cfg.samples.min(200);
    let mut worst_posterior: f64 = 0.0;
    let mut all_ok = true;
    for i in 0..runs {
        let record = interr::interrogate(&prior, &full_z, cfg.seed ^ (0x100 + i as u64))
            .map_err(|e| CliError::Input(format!("interrogation prior rejected: {e}")))?;
        let report = pure_state_check(&record.posterior, cfg.tol).map_err(internal)?;
        all_ok &= report.passes;
        worst_posterior = worst_posterior.max(report.max_abs_residual);
        all_ok &= seeds
            .vectors
            .iter()
            .any(|v| (v.components() - record.posterior.components()).norm() < 1e-9);
    }
    checks.push(Check::new(
        "full-z-posterior",
        all_ok,
        worst_posterior,
        runs,
        CheckKind::Residual,
    ));

    let mut repeat_ok = true;
    for _ in 0..runs {
        let r = sample_two_qubit_pure(&mut rng)?;
        let t = random_group_element(2, 4, &mut rng).map_err(internal)?;
        let moved = q("zx")?.evolve(&t).map_err(internal)?;
        let record =
            interr::interrogate_with(&r, &[moved.clone(), moved], &mut rng).map_err(internal)?;
        repeat_ok &= record.answers[0] == record.answers[1];
    }
    checks.push(Check::new(
        "repeatability",
        repeat_ok,
        f64::from(u8::from(!repeat_ok)),
        runs,
        CheckKind::Exact,
    ));

    Ok(checks)
}

pub fn conjecture_n3(cfg: &SuiteConfig) -> Result<Vec<Check>, CliError> {
    let mut rng = rng_for(cfg, 0x434f4e4a);
    let sets = maximal_complementary_sets(3).map_err(internal)?;
    let census_ok = sets.len() == N3_CENSUS.0
        && N3_CENSUS
            .1
            .iter()
            .all(|&(size, count)| sets.iter().filter(|s| s.len() == size).count() == count);
    let mut checks = vec![Check::new(
        "maximal-set-census-n3",
        census_ok,
        (sets.len() as f64 - N3_CENSUS.0 as f64).abs(),
        sets.len(),
        CheckKind::Regression,
    )];

    // Exploratory rows: the information each maximal set carries on random
    // pure states, aggregated per set size. Always "pass"; the numbers are
    // the payload.
    let sizes = [3usize, 5, 7];
    let mut mins = [f64::INFINITY; 3];
    let mut maxs = [f64::NEG_INFINITY; 3];
    let mut sums = [0.0f64; 3];
    let mut counts = [0usize; 3];
    for _ in 0..cfg.samples {
        let s = sample_pure_with(3, &mut rng).map_err(internal)?;
        for set in &sets {
            let info = set_information(s.bloch(), set);
            let slot = sizes
                .iter()
                .position(|&k| k == set.len())
                .expect("census sizes");
            mins[slot] = mins[slot].min(info);
            maxs[slot] = maxs[slot].max(info);
            sums[slot] += info;
            counts[slot] += 1;
        }
    }
    let names: [[&'static str; 3]; 3] = [
        [
            "set-info-size3-min",
            "set-info-size3-max",
            "set-info-size3-mean",
        ],
        [
            "set-info-size5-min",
            "set-info-size5-max",
            "set-info-size5-mean",
        ],
        [
            "set-info-size7-min",
            "set-info-size7-max",
            "set-info-size7-mean",
        ],
    ];
    for slot in 0..3 {
        let mean = sums[slot] / counts[slot].max(1) as f64;
        for (name, value) in names[slot].iter().zip([mins[slot], maxs[slot], mean]) {
            checks.push(Check::new(
                name,
                true,
                value,
                counts[slot],
                CheckKind::Value,
            ));
        }
    }
    Ok(checks)
}
