use nlvn_core::linalg::{partial_trace, partial_transpose_matrix, unitary_conjugate_exp};
use nlvn_core::observables::{
    complementarity_propositions, oscillator_eigenfunction, oscillator_eigenfunctions, position_density,
    ppt_is_positive, proposition_deviation, proposition_probability, purify, reduced_eigenvalue_curves,
    reduced_eigenvalue_mismatch, trapezoid, uncertainty_bound, uncertainty_report, von_neumann_entropy,
    OscillatorBasis, Proposition,
};
use nlvn_core::solutions::{
    mutation3, switching_functions, two_species_closed_form, two_species_example, uncertainty_bound_closed_form,
    MutationParams, Organism, SwitchingProfile,
};
use nlvn_core::{CompositeLayout, DensityState, OperatorMatrix, C64};
use proptest::prelude::*;

const SQRT5: f64 = 2.236_067_977_499_79;

fn species_one(t: f64, profile: SwitchingProfile) -> DensityState {
    let cfg = two_species_example(profile);
    cfg.reduced(&two_species_closed_form(t, profile).unwrap(), 0).unwrap()
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[test]
fn entropy_examples() {
    let pure = DensityState::pure(&[C64::new(0.0, 1.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
    assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-15);
    let mixed = DensityState::new(OperatorMatrix::identity(2).scale_real(0.5)).unwrap();
    assert!((von_neumann_entropy(&mixed).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);

    let o = Organism;
    let rho = o.solution(0.0).unwrap();
    let s2 = von_neumann_entropy(&partial_trace(&rho, &o.layout(), o.particle_factor(2).unwrap()).unwrap()).unwrap();
    let d = (26.0 + 2.0 * 105f64.sqrt()).sqrt() / 40.0;
    assert!((d - 0.170_467).abs() < 1e-6);
    let expected = -(0.5 + d) * (0.5 + d).ln() - (0.5 - d) * (0.5 - d).ln();
    assert!((s2 - expected).abs() < 1e-12);
    assert!((s2 - 0.633_848_065).abs() < 1e-9);
}

#[test]
fn organism_entropy_symmetries() {
    let o = Organism;
    let whole0 = von_neumann_entropy(&o.solution(0.0).unwrap()).unwrap();
    for t in grid(0.1, 6.0, 12) {
        let s = |t: f64| {
            let rho = o.solution(t).unwrap();
            von_neumann_entropy(&partial_trace(&rho, &o.layout(), o.particle_factor(2).unwrap()).unwrap()).unwrap()
        };
        assert!((s(t) - s(-t)).abs() < 1e-10);
        assert!((von_neumann_entropy(&o.solution(t).unwrap()).unwrap() - whole0).abs() < 1e-10);
    }
}

#[test]
fn reduced_curve_examples() {
    let r = reduced_eigenvalue_curves(0.0);
    assert_eq!(r.particle1, (0.5, 0.5));
    let late = reduced_eigenvalue_curves(40.0);
    let gap = (15f64.sqrt() - 7f64.sqrt()) / 20.0;
    assert!((gap - 0.06136).abs() < 1e-5);
    assert!((late.particle1.0 - (0.5 - gap)).abs() < 1e-15);
    assert!((late.particle2.0 - 0.5).abs() < 1e-15 && (late.particle2.1 - 0.5).abs() < 1e-15);
    for t in [-7.0, -2.0, 0.0, 0.5, 2.0, 9.0] {
        assert!(reduced_eigenvalue_mismatch(t).unwrap() < 1e-10);
    }
}

#[test]
fn ppt_examples() {
    let a = DensityState::new(OperatorMatrix::from_real_rows([[0.6, 0.2], [0.2, 0.4]])).unwrap();
    let b = DensityState::pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
    let product = DensityState::new(nlvn_core::linalg::tensor_product(a.matrix(), b.matrix())).unwrap();
    let layout = CompositeLayout::qubits(2);
    assert!(ppt_is_positive(&product, &layout).unwrap().positive);

    let o = Organism;
    for t in [-5.0, -1.0, 0.0, 1.0, 5.0] {
        let report = ppt_is_positive(&o.solution(t).unwrap(), &o.layout()).unwrap();
        assert!(report.positive, "t = {t}: {report:?}");
    }

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let singlet = DensityState::pure(&[z, C64::new(s, 0.0), C64::new(-s, 0.0), z]).unwrap();
    let report = ppt_is_positive(&singlet, &layout).unwrap();
    assert!(!report.positive);
    assert!((report.min_eigenvalue + 0.5).abs() < 1e-12);

    assert!(ppt_is_positive(&singlet, &CompositeLayout::new(vec![4]).unwrap()).is_err());
    assert!(ppt_is_positive(&singlet, &CompositeLayout::new(vec![2, 3]).unwrap()).is_err());
}

/// Coefficients `e_k` of `det(λ − A) = Σ (−1)^k e_k λ^{n−k}` by Faddeev–LeVerrier.
fn elementary_symmetric(a: &OperatorMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut m = OperatorMatrix::identity(n);
    let mut coeffs = vec![1.0];
    for k in 1..=n {
        let am = a.try_mul(&m).unwrap();
        let c = -am.trace() / k as f64;
        coeffs.push(if k % 2 == 0 { c.re } else { -c.re });
        m = &am + &OperatorMatrix::identity(n).scale(c);
    }
    coeffs
}

fn random_two_qubit_mixture(seed: &[f64]) -> DensityState {
    let mut acc = OperatorMatrix::zeros(4);
    for (k, chunk) in seed.chunks(9).enumerate() {
        let psi: Vec<C64> = (0..4).map(|i| C64::new(chunk[2 * i], chunk[2 * i + 1])).collect();
        let w = 0.2 + chunk[8].abs() + 0.1 * k as f64;
        acc = &acc + &OperatorMatrix::outer(&psi, &psi).scale_real(w);
    }
    DensityState::new(acc).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ppt_agrees_with_characteristic_polynomial(raw in proptest::collection::vec(-1.0f64..1.0, 27)) {
        let rho = random_two_qubit_mixture(&raw);
        let layout = CompositeLayout::qubits(2);
        let report = ppt_is_positive(&rho, &layout).unwrap();
        let n = rho.normalized();
        let pt = partial_transpose_matrix(n.matrix(), &layout, 1).unwrap();
        // a Hermitian matrix is positive semidefinite iff every e_k ≥ 0
        let e = elementary_symmetric(&pt);
        let oracle = e.iter().all(|&x| x >= -1e-12);
        if report.min_eigenvalue.abs() > 1e-6 {
            prop_assert_eq!(report.positive, oracle);
        }
    }

    #[test]
    fn purification_round_trip(dim in 1usize..=8, raw in proptest::collection::vec(-1.0f64..1.0, 128)) {
        let m = OperatorMatrix::from_fn(dim, |r, c| C64::new(raw[r * dim + c], raw[64 + r * dim + c]));
        let rho = DensityState::new(m.try_mul(&m.adjoint()).unwrap().scale_real(3.0)).unwrap();
        let p = purify(&rho).unwrap();
        let back = p.reduced().unwrap();
        prop_assert!(back.matrix().max_abs_diff(rho.normalized().matrix()) <= 1e-12);
        let norm: f64 = p.vector.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn probability_is_unitarily_invariant(s in -5.0f64..5.0, t in -10.0f64..10.0) {
        let profile = SwitchingProfile::new(0.0, 0.0);
        let rho = species_one(t, profile);
        let (p, _) = complementarity_propositions();
        let h = OperatorMatrix::from_real_rows([
            [0.3, 1.0, 0.0, -0.2],
            [1.0, -0.4, 0.5, 0.0],
            [0.0, 0.5, 1.2, 0.7],
            [-0.2, 0.0, 0.7, 0.1],
        ]);
        let rho_u = unitary_conjugate_exp(&h, s, &rho).unwrap();
        let pu = Proposition::new(
            unitary_conjugate_exp(&h, s, &DensityState::new(p.projector().clone()).unwrap()).unwrap().into_matrix(),
        )
        .unwrap();
        let a = proposition_probability(&p, &rho).unwrap();
        let b = proposition_probability(&pu, &rho_u).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn position_density_is_nonnegative(raw in proptest::collection::vec(-1.0f64..1.0, 32), k in 0usize..4) {
        let m = OperatorMatrix::from_fn(4, |r, c| C64::new(raw[r * 4 + c], raw[16 + r * 4 + c]));
        let rho = DensityState::new(m.try_mul(&m.adjoint()).unwrap()).unwrap();
        let p = position_density(&rho, &OscillatorBasis::default_grid(k)).unwrap();
        prop_assert!(p.iter().all(|&v| v >= -1e-12));
    }
}

#[test]
fn purification_examples() {
    let psi = [C64::new(0.0, 0.6), C64::new(0.8, 0.0)];
    let p = purify(&DensityState::pure(&psi).unwrap()).unwrap();
    // |e₀⟩ ⊗ |φ⟩ up to a phase
    let overlap: C64 = p.vector[..2].iter().zip(&psi).map(|(a, b)| b.conj() * a).sum();
    assert!((overlap.norm() - 1.0).abs() < 1e-12);
    // zero eigenvalues carry O(1e-16) rounding, whose square root survives
    assert!(p.vector[2..].iter().all(|z| z.norm() < 1e-7));

    let mixed = DensityState::new(OperatorMatrix::identity(2).scale_real(0.5)).unwrap();
    let p = purify(&mixed).unwrap();
    let entropy = von_neumann_entropy(&p.reduced().unwrap()).unwrap();
    assert!((entropy - std::f64::consts::LN_2).abs() < 1e-12);
    assert!(von_neumann_entropy(&p.state().unwrap()).unwrap().abs() < 1e-12);

    let seed = Organism.seed();
    let p = purify(&seed).unwrap();
    assert_eq!(p.vector.len(), 16);
    assert!(p.reduced().unwrap().matrix().max_abs_diff(seed.normalized().matrix()) < 1e-12);
}

#[test]
fn proposition_examples() {
    let rho = species_one(0.0, SwitchingProfile::new(0.0, 0.0));
    let id = Proposition::new(OperatorMatrix::identity(4)).unwrap();
    assert!((proposition_probability(&id, &rho).unwrap() - 1.0).abs() < 1e-15);
    assert!(Proposition::new(OperatorMatrix::identity(2).scale_real(0.5)).is_err());
    assert_eq!(proposition_deviation(1.0), 0.0);
    assert!((proposition_deviation(0.5) - 0.5).abs() < 1e-15);
}

#[test]
fn probabilities_follow_switching_functions() {
    let profile = SwitchingProfile::new(0.0, 0.0);
    let (p, p1) = complementarity_propositions();
    let norm = 15.0 + SQRT5;
    let mut last = f64::NEG_INFINITY;
    for t in grid(-60.0, 60.0, 121) {
        let rho = species_one(t, profile);
        let sf = switching_functions(t, profile);
        let prob = proposition_probability(&p, &rho).unwrap();
        let prob1 = proposition_probability(&p1, &rho).unwrap();
        assert!((prob - (9.0 + SQRT5 + 8.0 * sf.f / 3.0) / (4.0 * norm)).abs() < 1e-14);
        assert!((prob1 - (15.0 + SQRT5 + 8.0 * sf.f1 / 3.0) / (4.0 * norm)).abs() < 1e-14);
        assert!(prob >= last - 1e-15);
        last = prob;
    }
    let early = proposition_probability(&p, &species_one(-200.0, profile)).unwrap();
    let late = proposition_probability(&p, &species_one(200.0, profile)).unwrap();
    assert!((late - early - 2.0 / (3.0 * norm)).abs() < 1e-12);
    let e1 = proposition_probability(&p1, &species_one(-200.0, profile)).unwrap();
    let l1 = proposition_probability(&p1, &species_one(200.0, profile)).unwrap();
    let mid1 = proposition_probability(&p1, &species_one(0.0, profile)).unwrap();
    assert!((e1 - l1).abs() < 1e-12 && mid1 > e1 + 1e-3);
}

#[test]
fn uncertainty_examples() {
    let a = Proposition::new(OperatorMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 1.0])).unwrap();
    let b = Proposition::new(OperatorMatrix::from_real_diagonal(&[0.0, 0.0, 1.0, 1.0])).unwrap();
    let rho = species_one(0.3, SwitchingProfile::new(0.0, 0.0));
    assert_eq!(uncertainty_bound(&a, &b, &rho).unwrap(), 0.0);

    let (p, p1) = complementarity_propositions();
    for (t0, t1) in [(0.0, 0.0), (-10.0, 5.0), (20.0, 0.0)] {
        let profile = SwitchingProfile::new(t0, t1);
        for t in grid(-60.0, 60.0, 61) {
            let report = uncertainty_report(&p, &p1, &species_one(t, profile)).unwrap();
            assert!((report.bound - uncertainty_bound_closed_form(t, profile)).abs() < 1e-14);
            assert!(report.holds(0.0), "{report:?}");
        }
    }
    let profile = SwitchingProfile::new(0.0, 0.0);
    assert!(uncertainty_bound(&p, &p1, &species_one(-60.0, profile)).unwrap() < 1e-6);
    let limit = SQRT5 / (12.0 * (15.0 + SQRT5));
    assert!((limit - (15.0 * SQRT5 - 5.0) / 2640.0).abs() < 1e-15);
    assert!((limit - 0.010_811_0).abs() < 1e-7);
    assert!((uncertainty_bound(&p, &p1, &species_one(80.0, profile)).unwrap() - limit).abs() < 1e-8);
}

#[test]
fn oscillator_values_and_orthonormality() {
    assert!((oscillator_eigenfunction(0, 0.0).unwrap() - 0.751_125_5).abs() < 1e-7);
    assert_eq!(oscillator_eigenfunction(1, 0.0).unwrap(), 0.0);
    assert!(oscillator_eigenfunction(200, 1.0).unwrap().is_finite());
    assert!(oscillator_eigenfunction(201, 1.0).is_err());
    let xs = grid(-12.0, 12.0, 24_001);
    let table: Vec<Vec<f64>> = xs.iter().map(|&x| oscillator_eigenfunctions(5, x).unwrap()).collect();
    for n in 0..=5 {
        for m in 0..=5 {
            let ys: Vec<f64> = table.iter().map(|row| row[n] * row[m]).collect();
            let integral = trapezoid(&xs, &ys);
            let expected = if n == m { 1.0 } else { 0.0 };
            assert!((integral - expected).abs() < 1e-8, "({n}, {m}): {integral}");
        }
    }
}

#[test]
fn position_density_examples() {
    let ground = DensityState::pure(&[C64::new(1.0, 0.0)]).unwrap();
    let basis = OscillatorBasis::default_grid(0);
    let p = position_density(&ground, &basis).unwrap();
    for (x, v) in basis.x_grid().iter().zip(&p) {
        let expected = (-x * x).exp() / std::f64::consts::PI.sqrt();
        assert!((v - expected).abs() < 1e-14);
    }
    let params = MutationParams::critical();
    for t in [-50.0, 0.0, 12.0] {
        let rho = mutation3(&params, t).unwrap();
        let density = position_density(&rho, &basis).unwrap();
        assert!((trapezoid(basis.x_grid(), &density) - 1.0).abs() < 1e-6);
    }
    assert!(position_density(&ground, &OscillatorBasis::default_grid(201)).is_err());
    assert!(OscillatorBasis::uniform(0, 1.0, -1.0, 10).is_err());
}

#[test]
fn mutation_density_has_three_regimes() {
    let params = MutationParams::critical();
    let basis = OscillatorBasis::default_grid(0);
    let density = |t: f64| position_density(&mutation3(&params, t).unwrap(), &basis).unwrap();
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    for t in [-60.0, -50.0, 41.0, 55.0] {
        assert!(diff(&density(t), &density(t + 1.0)) < 1e-3, "t = {t}");
    }
    assert!(diff(&density(-40.0), &density(40.0)) > 0.05);
    assert!(diff(&density(-15.0), &density(15.0)) > 0.05);
}
