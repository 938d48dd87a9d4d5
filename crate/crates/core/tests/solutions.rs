use nlvn_core::feedback::{residual, DEFAULT_FD_STEP};
use nlvn_core::linalg::{partial_trace, unitary_conjugate_exp};
use nlvn_core::solutions::{
    darboux_dress, delta_a, lax_covariance_check, multispecies_seed, multispecies_solution, mutation3,
    mutation3_via_construction, switching_functions, two_species_closed_form, two_species_example, DarbouxParameters,
    MultiSpeciesConfig, MutationParams, Organism, SwitchingProfile,
};
use nlvn_core::{DensityState, FeedbackPolynomial, OperatorMatrix, C64};
use proptest::prelude::*;

const SQRT5: f64 = 2.236_067_977_499_79;

fn sample_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn spectra_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn delta_examples() {
    let o = Organism;
    let rho = o.seed();
    assert_eq!(delta_a(&rho, &FeedbackPolynomial::linear(), 1.0), OperatorMatrix::zeros(4));
    let d = delta_a(&rho, &FeedbackPolynomial::square(), 5.0);
    assert!(d.max_abs_diff(&OperatorMatrix::from_real_diagonal(&[-4.5, -4.5, -2.5, -2.5])) < 1e-13);
    assert!(d.commutes_with(&o.hamiltonian(), 1e-12));
    assert!(!d.is_multiple_of_identity(1e-12));

    let cfg = two_species_example(SwitchingProfile::new(0.0, 0.0));
    let seed = multispecies_seed(&cfg).unwrap();
    let d = delta_a(&seed, &FeedbackPolynomial::square(), cfg.a);
    assert!(d.max_abs_diff(&cfg.expected_delta()) < 1e-13);
    assert!(d.commutes_with(&cfg.hamiltonian(), 1e-12));
}

#[test]
fn common_eigenvector_leaves_seed_untouched() {
    let seed = DensityState::new(OperatorMatrix::from_real_diagonal(&[0.5, 0.3, 0.2])).unwrap();
    let h = OperatorMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]);
    let chi = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
    let params = DarbouxParameters::new(C64::new(0.3, -1.0), 0.7, chi).unwrap();
    let f = FeedbackPolynomial::square();
    for t in [-2.0, 0.0, 1.5] {
        let out = darboux_dress(&seed, &h, &f, &params, t).unwrap();
        let evolved = unitary_conjugate_exp(&h, 0.7 * t, &seed).unwrap();
        assert!(out.matrix().max_abs_diff(evolved.matrix()) < 1e-14);
    }
    let report =
        lax_covariance_check(|t| unitary_conjugate_exp(&h, 0.7 * t, &seed), &h, &f, &params, &[-1.0, 0.0, 2.0]);
    assert!(report.failures.is_empty());
    for s in &report.samples {
        assert!((s.residual - s.seed_residual).abs() < 1e-12);
    }
}

#[test]
fn organism_by_dressing() {
    let o = Organism;
    let times = sample_times(-10.0, 10.0, 21);
    let h = o.hamiltonian();
    let report = lax_covariance_check(|t| o.linear_solution(t), &h, &o.feedback(), &o.darboux_parameters(), &times);
    assert!(report.passes(1e-6, 1e-10), "{report:?}");
    let z = report.lax_eigenvalue.unwrap();
    assert!((z - C64::new(2.5, 0.5)).norm() < 1e-12);
    for &t in &[-3.0, 0.0, 1.7] {
        let dressed = darboux_dress(&o.seed(), &h, &o.feedback(), &o.darboux_parameters(), t).unwrap();
        assert!(dressed.matrix().max_abs_diff(o.solution(t).unwrap().matrix()) < 1e-10);
    }
}

#[test]
fn organism_closed_form_properties() {
    let o = Organism;
    let (s7, s15) = (7f64.sqrt(), 15f64.sqrt());
    let seed_spectrum = [(5.0 - s15) / 2.0, (5.0 - s7) / 2.0, (5.0 + s7) / 2.0, (5.0 + s15) / 2.0];
    for t in sample_times(-10.0, 10.0, 41) {
        let rho = o.solution(t).unwrap();
        assert!(spectra_close(&rho.spectrum(), &seed_spectrum, 1e-10), "t = {t}");
        assert!((rho.trace() - 10.0).abs() < 1e-12);
    }
    for t in [-2.0, 0.0, 2.0] {
        let rho = o.solution(t).unwrap().normalized();
        for particle in [1, 2] {
            let (lo, hi) = o.reduced_eigenvalues(particle, t).unwrap();
            let s = partial_trace(&rho, &o.layout(), o.particle_factor(particle).unwrap()).unwrap().spectrum();
            assert!((s[0] - lo).abs() < 1e-10 && (s[1] - hi).abs() < 1e-10);
        }
    }
}

#[test]
fn organism_tails_decay_at_sech_and_tanh_rates() {
    let o = Organism;
    let fit = |ts: &[f64], ys: &[f64]| {
        let n = ts.len() as f64;
        let (mt, my) = (ts.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let cov: f64 = ts.iter().zip(ys).map(|(t, y)| (t - mt) * (y - my)).sum();
        let var: f64 = ts.iter().map(|t| (t - mt) * (t - mt)).sum();
        cov / var
    };
    let ts = sample_times(2.0, 8.0, 25);
    for (sign, limit) in [(1.0, o.asymptote_future()), (-1.0, o.asymptote_past())] {
        let mut full = Vec::new();
        let mut diag = Vec::new();
        for &t in &ts {
            let d = o.interaction_state(sign * t).unwrap().matrix() - limit.matrix();
            full.push(d.frobenius_norm().ln());
            let dd: f64 = d.diagonal().iter().map(|z| z.norm_sqr()).sum();
            diag.push(dd.sqrt().ln());
        }
        assert!((fit(&ts, &full) + 2.0).abs() < 0.02, "{}", fit(&ts, &full));
        assert!((fit(&ts, &diag) + 4.0).abs() < 0.02, "{}", fit(&ts, &diag));
    }
}

#[test]
fn mutation_family_properties() {
    let h0 = MutationParams::critical_strength();
    assert!((h0 - (15.0 + SQRT5) / (5.0 + SQRT5)).abs() < 1e-15);
    for h in [h0 / 2.0, h0, 2.0 * h0] {
        let p = MutationParams::new(h, 1.0, 0);
        let spectrum0 = mutation3(&p, 0.0).unwrap().spectrum();
        for t in sample_times(-50.0, 50.0, 21) {
            let rho = mutation3(&p, t).unwrap();
            let r = residual(|s| mutation3(&p, s), &p.hamiltonian(), &p.feedback(), t, DEFAULT_FD_STEP).unwrap();
            assert!(r < 1e-6, "h = {h}, t = {t}: {r}");
            assert!((rho.trace() - 1.0).abs() < 1e-14);
            assert!(spectra_close(&rho.spectrum(), &spectrum0, 1e-10));
        }
    }
}

#[test]
fn mutation_matches_general_construction() {
    for h in [0.7, MutationParams::critical_strength(), 4.0] {
        let p = MutationParams::new(h, 1.3, 0);
        let d = p.construction().unwrap();
        for t in [-20.0, -2.0, 0.0, 3.0, 25.0] {
            let a = mutation3(&p, t).unwrap();
            let b = mutation3_via_construction(&p, t).unwrap();
            let (a, b) = (a.matrix(), b.matrix());
            for i in 0..3 {
                assert!((a[(i, i)] - b[(i, i)]).norm() < 1e-12);
            }
            assert!((a[(0, 2)] - b[(0, 2)]).norm() < 1e-12);
            assert!((a[(0, 1)].norm() - b[(0, 1)].norm()).abs() < 1e-12);
            assert!((a[(1, 2)].norm() - b[(1, 2)].norm()).abs() < 1e-12);
            assert!((a[(0, 1)] * a[(1, 2)] - b[(0, 1)] * b[(1, 2)]).norm() < 1e-12);
            let r = residual(|s| d.at(s), &p.hamiltonian(), &p.feedback(), t, DEFAULT_FD_STEP).unwrap();
            assert!(r < 1e-6);
        }
    }
}

#[test]
fn switching_duration_closed_form() {
    // with α = 1, |ξ|² ∝ sech²(γt)
    let asech = |y: f64| (1.0 / y + (1.0 / (y * y) - 1.0).sqrt()).ln();
    let h0 = MutationParams::critical_strength();
    for h in [h0 / 2.0, h0, 2.0 * h0] {
        let p = MutationParams::new(h, 1.0, 0);
        let expected = (asech(0.1f64.sqrt()) - asech(0.9f64.sqrt())) / p.gamma();
        assert!((p.fall_time(0.9, 0.1).unwrap() - expected).abs() < 1e-9 * expected);
    }
    let shifted = MutationParams::new(h0, 3.0, 0);
    assert!((shifted.peak_time().unwrap() - 3f64.ln() / shifted.gamma()).abs() < 1e-12);
    assert!(MutationParams::new(0.0, 1.0, 0).fall_time(0.9, 0.1).is_err());
}

#[test]
fn multispecies_seed_matches_listed_entries() {
    let cfg = two_species_example(SwitchingProfile::new(0.0, 0.0));
    let seed = multispecies_seed(&cfg).unwrap();
    let m = seed.matrix();
    let basis = cfg.basis();
    let at = |n1: usize, n2: usize| basis.iter().position(|&b| b == (n1, n2)).unwrap();
    // ρ₀(0) on (|1,0⟩, |2,0⟩, |3,0⟩), ρ₁(0) on (|0,1⟩, |1,1⟩, |2,1⟩)
    for (lo, mid, hi) in [(at(1, 0), at(2, 0), at(3, 0)), (at(0, 1), at(1, 1), at(2, 1))] {
        assert_eq!(m[(lo, lo)].re, 2.5);
        assert_eq!(m[(hi, hi)].re, 2.5);
        assert!((m[(mid, mid)].re - (5.0 + SQRT5) / 2.0).abs() < 1e-15);
        assert_eq!(m[(lo, hi)].re, -1.5);
        assert_eq!(m[(hi, lo)].re, -1.5);
    }
    assert!((seed.trace() - (15.0 + SQRT5)).abs() < 1e-13);
    assert!(seed.spectrum()[0] >= -1e-12);
}

#[test]
fn positivity_window() {
    let ok = |a: f64, b: f64, m: usize| {
        MultiSpeciesConfig::new(a, b, m, 1, 0, vec![C64::new(1.0, 0.0)], vec![C64::new(1.0, 0.0)], 0.5).is_ok()
    };
    assert!(ok(5.0, -4.0, 1));
    assert!(ok(5.0, -5.0, 1));
    assert!(!ok(5.0, -5.5, 1));
    assert!(!ok(5.0, 0.5, 1));
    assert!(!ok(5.0, -4.0, 2));
    assert!(
        MultiSpeciesConfig::new(5.0, -4.0, 1, 1, 1, vec![C64::new(1.0, 0.0)], vec![C64::new(1.0, 0.0)], 0.5).is_err()
    );
}

#[test]
fn ansatz_vectors_share_eigenvalue() {
    let cfg = two_species_example(SwitchingProfile::new(0.0, 0.0));
    let seed = cfg.seed().unwrap();
    let op = seed.matrix() - &cfg.hamiltonian().scale(C64::new(0.0, 1.0));
    let z = cfg.lax_eigenvalue();
    let root = (cfg.a * cfg.a + 4.0 * (cfg.b - 1.0)).sqrt();
    assert!((z - C64::new((cfg.a + root) / 2.0, -2.0)).norm() < 1e-14);
    for j in 0..=cfg.l {
        let (p1, p2) = cfg.ansatz_vectors(j);
        for v in [p1, p2] {
            let lhs = op.apply(&v);
            for (x, y) in lhs.iter().zip(&v) {
                assert!((x - z * y).norm() < 1e-13);
            }
        }
    }
}

#[test]
fn worked_example_matches_closed_form() {
    for (t0, t1) in [(0.0, 0.0), (150.0, 0.0), (0.0, 150.0), (-3.0, 7.5)] {
        let profile = SwitchingProfile::new(t0, t1);
        let cfg = two_species_example(profile);
        assert!(cfg.is_tuned());
        let sol = cfg.dressing().unwrap();
        for t in [-20.0, -1.0, 0.0, 4.0, 20.0, 160.0] {
            let a = sol.at(t).unwrap();
            let b = two_species_closed_form(t, profile).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10, "({t0}, {t1}) at {t}");
        }
        for t in [-20.0, 0.0, 20.0] {
            let r = residual(
                |s| two_species_closed_form(s, profile),
                &cfg.hamiltonian(),
                &cfg.feedback(),
                t,
                DEFAULT_FD_STEP,
            )
            .unwrap();
            assert!(r < 1e-6);
        }
    }
}

#[test]
fn general_multispecies_member_solves_its_equation() {
    let alphas = vec![C64::new(0.4, 0.2), C64::new(-0.1, 0.9), C64::new(1.0, 0.0)];
    let betas = vec![C64::new(0.3, 0.0), C64::new(0.0, -1.2), C64::new(0.5, 0.5)];
    let cfg = MultiSpeciesConfig::new(6.0, -3.5, 1, 3, 2, alphas, betas, 0.6).unwrap();
    assert!(!cfg.is_tuned());
    let sol = cfg.dressing().unwrap();
    let d0 = cfg.seed().unwrap().matrix().diagonal();
    let spectrum0 = cfg.seed().unwrap().spectrum();
    for t in [-6.0, -1.0, 0.0, 2.5, 8.0] {
        let r = residual(|s| sol.at(s), &cfg.hamiltonian(), &cfg.feedback(), t, DEFAULT_FD_STEP).unwrap();
        assert!(r < 1e-6, "t = {t}: {r}");
        let rho = sol.at(t).unwrap();
        assert!(spectra_close(&rho.spectrum(), &spectrum0, 1e-10));
        let d = rho.matrix().diagonal();
        let d_start = multispecies_solution(&cfg, -6.0).unwrap().matrix().diagonal();
        for (x, y) in d.iter().zip(&d_start) {
            assert!((x - y).norm() < 1e-10);
        }
        assert!((rho.trace() - d0.iter().map(|z| z.re).sum::<f64>()).abs() < 1e-12);
    }
}

#[test]
fn frozen_switching_without_level_one_component() {
    let profile = SwitchingProfile::new(0.0, 0.0);
    let mut cfg = two_species_example(profile);
    cfg.betas = vec![C64::new(0.0, 0.0); 2];
    let sol = cfg.dressing().unwrap();
    let reference = sol.at(0.0).unwrap();
    for t in [-30.0, -2.0, 5.0, 40.0] {
        assert!(sol.at(t).unwrap().matrix().max_abs_diff(reference.matrix()) < 1e-12);
    }
}

#[test]
fn species_reductions() {
    let profile = SwitchingProfile::new(0.0, 0.0);
    let cfg = two_species_example(profile);
    let rho = two_species_closed_form(1.0, profile).unwrap();
    let first = cfg.reduced(&rho, 0).unwrap();
    let second = cfg.reduced(&rho, 1).unwrap();
    assert_eq!(first.dim(), 4);
    assert_eq!(second.dim(), 2);
    let d = first.matrix().diagonal();
    assert!((d[0].re - 2.5).abs() < 1e-14 && (d[3].re - 2.5).abs() < 1e-14);
    assert!((d[1].re - (5.0 + SQRT5 / 2.0)).abs() < 1e-14 && (d[2].re - (5.0 + SQRT5 / 2.0)).abs() < 1e-14);
    assert!(first.matrix()[(0, 3)].norm() < 1e-15);
    let s = second.matrix().diagonal();
    assert!((s[0].re - (15.0 + SQRT5) / 2.0).abs() < 1e-13 && (s[1].re - (15.0 + SQRT5) / 2.0).abs() < 1e-13);
    let sf = switching_functions(1.0, profile);
    let c = C64::new(2.0, -SQRT5) / 3.0;
    assert!((first.matrix()[(0, 1)] - c * sf.f1).norm() < 1e-14);
    assert!((first.matrix()[(1, 2)] - (c * sf.f0 + C64::new(0.0, sf.f1))).norm() < 1e-14);
    assert!((second.matrix()[(0, 1)] - (c * sf.f1 + C64::new(0.0, sf.f0))).norm() < 1e-14);
}

#[test]
fn switching_function_examples() {
    let p = SwitchingProfile::new(2.0, -1.0);
    let early = switching_functions(-1e3, p);
    assert!(early.f < 1e-200 && early.f0 < 1e-100 && early.f1 < 1e-100);
    let late = switching_functions(1e3, p);
    assert!((late.f - 1.0).abs() < 1e-15 && late.f0 < 1e-100 && late.f1 < 1e-100);
    let equal = switching_functions(4.0, SwitchingProfile::new(4.0, 4.0));
    for v in [equal.f, equal.f0, equal.f1] {
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }
}

proptest! {
    #[test]
    fn switching_identity(t in -200.0f64..200.0, t0 in -200.0f64..200.0, t1 in -200.0f64..200.0) {
        let s = switching_functions(t, SwitchingProfile::new(t0, t1));
        prop_assert!((s.f0 * s.f0 + s.f1 * s.f1 - s.f * (1.0 - s.f)).abs() <= 1e-12);
        for v in [s.f, s.f0, s.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn dressing_keeps_trace(t in -50.0f64..50.0, alpha in 0.1f64..4.0) {
        let p = MutationParams::new(MutationParams::critical_strength(), alpha, 1);
        let d = p.construction().unwrap();
        let rho = d.at(t).unwrap();
        prop_assert!((rho.trace() - d.seed0().trace()).abs() <= 1e-12);
    }
}
