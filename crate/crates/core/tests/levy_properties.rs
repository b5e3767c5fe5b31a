use std::sync::Arc;

use edm_pareto::families::{bessel_rw_family, gamma_family, harmonic_poisson_family, Family};
use edm_pareto::levy::{
    cumulant_from_tail, cumulant_truncated, estimate_ell, scale, tail_from_measure, tilt, FiniteAtoms, LevyMeasure,
    TailFunction,
};
use proptest::prelude::*;

fn builtins() -> Vec<Family<f64>> {
    vec![gamma_family(), harmonic_poisson_family(), bessel_rw_family()]
}

/// Bound constant for `|k_ε − k| ≤ C ε ln(1/ε)`, fixed from the gamma family
/// where `|k_ε − k| ≈ θε`.
const TRUNCATION_C: f64 = 1.0;

#[test]
fn truncated_cumulant_converges_like_eps_log_eps() {
    for fam in builtins() {
        let full = TailFunction::from_measure(fam.levy());
        for &theta in &[0.5, 1.0, 5.0] {
            let k = cumulant_from_tail(&full, theta).unwrap();
            for e in 3..=8 {
                let eps = 10f64.powi(-e);
                let ke = cumulant_truncated(fam.levy(), theta, eps).unwrap();
                let bound = TRUNCATION_C * eps * (1.0 / eps).ln();
                assert!(
                    (ke - k).abs() < bound,
                    "{} θ={theta} ε={eps}: |{ke} − {k}| ≥ {bound}",
                    fam.name()
                );
                assert!(ke >= k - 1e-12, "truncation must not overshoot");
            }
        }
    }
}

#[test]
fn tilted_tail_identity() {
    for fam in builtins() {
        for &theta0 in &[0.5, 2.0] {
            let tilted = tilt(fam.levy(), theta0).unwrap();
            for &x in &[1e-4, 1e-2, 1.0] {
                let lhs = tail_from_measure(&tilted, x).unwrap();
                let rhs = cumulant_truncated(fam.levy(), theta0, x).unwrap() + tail_from_measure(fam.levy(), x).unwrap();
                assert!(
                    (lhs - rhs).abs() < 1e-8,
                    "{} θ₀={theta0} x={x}: {lhs} vs {rhs}",
                    fam.name()
                );
            }
        }
    }
}

#[test]
fn cumulant_shapes() {
    for fam in builtins() {
        fam.cumulant().check_shape().unwrap_or_else(|e| panic!("{}: {e}", fam.name()));
        fam.tail().check_invariants().unwrap_or_else(|e| panic!("{}: {e}", fam.name()));
    }
}

#[test]
fn cumulant_is_linear_in_the_measure() {
    for fam in builtins() {
        let base = TailFunction::from_measure(fam.levy());
        for &c in &[0.5, 2.0, 3.0] {
            let scaled = TailFunction::from_measure(&scale(fam.levy(), c).unwrap());
            for &theta in &[0.5, 5.0] {
                let a = cumulant_from_tail(&scaled, theta).unwrap();
                let b = c * cumulant_from_tail(&base, theta).unwrap();
                assert!((a - b).abs() <= 1e-9 * b.abs(), "{} c={c}: {a} vs {b}", fam.name());
            }
        }
    }
}

/// Tilting adds `k_x(θ₀) → k(θ₀)` to the tail, so the fitted index moves by
/// exactly the fit of `k_x(θ₀)/(−ln x)`, which vanishes as the window shrinks.
#[test]
fn tilting_only_shifts_the_fitted_index_by_the_cumulant_offset() {
    for fam in builtins() {
        let plain = estimate_ell(&TailFunction::from_measure(fam.levy())).unwrap();
        for &theta0 in &[0.5, 2.0] {
            let tilted = estimate_ell(&TailFunction::from_measure(&tilt(fam.levy(), theta0).unwrap())).unwrap();
            let offset: f64 = (10..=30)
                .map(|j| {
                    let x = 2f64.powi(-j);
                    cumulant_truncated(fam.levy(), theta0, x).unwrap() / (j as f64 * 2f64.ln())
                })
                .sum::<f64>()
                / 21.0;
            assert!(
                (tilted.ell - plain.ell - offset).abs() < 1e-8,
                "{} θ₀={theta0}: {} − {} vs {offset}",
                fam.name(),
                tilted.ell,
                plain.ell
            );
            let k0 = fam.cumulant().eval(theta0).unwrap();
            assert!(offset <= 0.0 && offset >= k0 / (10.0 * 2f64.ln()) - 1e-12);
        }
    }
}

#[test]
fn slow_log_index_of_builtins() {
    let tolerances = [0.05, 0.1, 0.1];
    for (fam, tol) in builtins().into_iter().zip(tolerances) {
        let fit = estimate_ell(fam.tail()).unwrap();
        assert!((fit.ell - 1.0).abs() < tol, "{}: {fit:?}", fam.name());
        for &c in &[0.5, 2.0, 3.0] {
            let fit_c = estimate_ell(fam.scaled(c).unwrap().tail()).unwrap();
            assert!((fit_c.ell - c).abs() < tol * c, "{} c={c}: {fit_c:?}", fam.name());
        }
    }
}

#[test]
fn f32_measures_work() {
    let nu = LevyMeasure::<f32>::from_density(|x| (-x).exp() / x, (0.0, f32::INFINITY)).unwrap();
    let g = tail_from_measure(&nu, 0.01f32).unwrap();
    assert!((g - 4.037_929_6).abs() < 1e-4, "{g}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_atom_tails_are_monotone(
        atoms in prop::collection::vec((1e-6f64..10.0, 1e-3f64..5.0), 1..40),
        x in 1e-7f64..20.0,
        dx in 0.0f64..5.0,
    ) {
        let src = FiniteAtoms::new(atoms.clone()).unwrap();
        let nu = LevyMeasure::from_atoms_checked(
            Arc::new(src),
            &edm_pareto::levy::MeasureChecks { integrability_bound: 1e12, unbounded_margin: 0.0 },
        ).unwrap();
        let g1 = tail_from_measure(&nu, x).unwrap();
        let g2 = tail_from_measure(&nu, x + dx).unwrap();
        prop_assert!(g2 <= g1);
        let direct: f64 = atoms.iter().filter(|a| a.0 > x).map(|a| a.1).sum();
        prop_assert!((g1 - direct).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn truncated_atomic_cumulant_decreases_to_full(
        atoms in prop::collection::vec((1e-6f64..10.0, 1e-3f64..5.0), 1..40),
        theta in 0.0f64..50.0,
        eps in 1e-7f64..1.0,
    ) {
        let src: Arc<dyn edm_pareto::levy::AtomSource<f64>> = Arc::new(FiniteAtoms::new(atoms).unwrap());
        let nu = LevyMeasure::from_atoms_checked(
            src.clone(),
            &edm_pareto::levy::MeasureChecks { integrability_bound: 1e12, unbounded_margin: 0.0 },
        ).unwrap();
        let ke = cumulant_truncated(&nu, theta, eps).unwrap();
        let ke_half = cumulant_truncated(&nu, theta, eps / 2.0).unwrap();
        let k = src.partial_cumulant(theta, 0.0).unwrap();
        prop_assert!(ke_half <= ke + 1e-12);
        prop_assert!(k <= ke_half + 1e-12);
        prop_assert!(k <= 0.0);
    }

    #[test]
    fn tilt_identity_for_atoms(
        atoms in prop::collection::vec((1e-4f64..10.0, 1e-3f64..5.0), 1..30),
        theta0 in 0.01f64..5.0,
        x in 1e-5f64..5.0,
    ) {
        let src = FiniteAtoms::new(atoms).unwrap();
        let nu = LevyMeasure::from_atoms_checked(
            Arc::new(src),
            &edm_pareto::levy::MeasureChecks { integrability_bound: 1e12, unbounded_margin: 0.0 },
        ).unwrap();
        let lhs = tail_from_measure(&tilt(&nu, theta0).unwrap(), x).unwrap();
        let rhs = cumulant_truncated(&nu, theta0, x).unwrap() + tail_from_measure(&nu, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }
}
