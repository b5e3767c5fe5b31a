use approx::assert_relative_eq;
use edm_pareto::families::{bessel_rw_family, gamma_family, harmonic_poisson_family, sample_ln_streams, EdmModel, Family};
use edm_pareto::levy::{estimate_ell, log_asymptote};
use edm_pareto::limits::{
    density_u, density_u_cdf, density_u_cdf_tabulated, density_u_table, eas_value, ks_against_pareto, lt_limit_curve,
    transform_ln_sample, ParetoLaw,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn builtins() -> Vec<Family<f64>> {
    vec![gamma_family(), harmonic_poisson_family(), bessel_rw_family()]
}

const U: [f64; 3] = [1.5, 2.0, 4.0];

#[test]
fn laplace_limit_is_pareto_and_free_of_theta0() {
    for fam in builtins() {
        let curves: Vec<_> = [0.0, 1.0]
            .iter()
            .map(|&theta0| lt_limit_curve(&fam, theta0, &U, &[1e-3, 1e-1]).unwrap())
            .collect();
        for c in &curves {
            for (ui, &u) in U.iter().enumerate() {
                let fine = (c.value(0, ui) - 1.0 / u).abs();
                let coarse = (c.value(1, ui) - 1.0 / u).abs();
                assert!(fine < 0.02 && fine < coarse, "{} θ₀={} u={u}: {fine} vs {coarse}", c.family, c.theta0);
                assert!(c.value(0, ui) > 0.0 && c.value(0, ui) <= 1.0);
            }
        }
        for ui in 0..U.len() {
            assert!((curves[0].value(0, ui) - curves[1].value(0, ui)).abs() < 0.02);
        }
    }
}

#[test]
fn below_one_the_limit_is_one() {
    for fam in builtins() {
        for &theta0 in &[0.0, 1.0] {
            let c = lt_limit_curve(&fam, theta0, &[0.5], &[1e-3]).unwrap();
            assert!((0.999..=1.0).contains(&c.value(0, 0)), "{} {}", fam.name(), c.value(0, 0));
            assert!(!c.cells[0][0].extrapolated);
        }
    }
}

#[test]
fn at_one_the_limit_tends_to_one() {
    for fam in builtins() {
        let c = lt_limit_curve(&fam, 1.0, &[1.0], &[1e-1, 1e-2, 1e-3]).unwrap();
        let gaps: Vec<f64> = (0..3).map(|i| 1.0 - c.value(i, 0)).collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 2e-3, "{gaps:?}");
    }
}

#[test]
fn gamma_cells_match_closed_form() {
    let c = lt_limit_curve(&gamma_family::<f64>(), 0.0, &[2.0], &[0.1, 0.01]).unwrap();
    assert_relative_eq!(c.value(0, 0), (1.0 + 2f64.powi(10)).powf(-0.1), max_relative = 1e-13);
    assert_relative_eq!(c.value(1, 0), 0.5, max_relative = 1e-15);
}

#[test]
fn ks_distance_shrinks_with_dispersion() {
    let law = ParetoLaw::new(1.0).unwrap();
    let mut last = f64::INFINITY;
    for &t in &[0.5, 0.2, 0.1, 0.05, 0.02] {
        let model = EdmModel::new(gamma_family::<f64>(), 0.0, t).unwrap();
        let u = transform_ln_sample(&sample_ln_streams(&model, 100_000, 42).unwrap(), t).unwrap();
        let ks = ks_against_pareto(&u, &law, t, 42).unwrap().ks;
        assert!(ks < last, "t={t}: {ks} ≥ {last}");
        last = ks;
    }
    assert!(last < 0.03);
}

#[test]
fn transformed_gamma_median() {
    let model = EdmModel::new(gamma_family::<f64>(), 0.0, 0.05).unwrap();
    let mut u = transform_ln_sample(&sample_ln_streams(&model, 100_000, 5).unwrap(), 0.05).unwrap();
    u.sort_by(f64::total_cmp);
    assert!((u[50_000] - 2.0).abs() < 0.1, "{}", u[50_000]);
}

#[test]
fn exact_pareto_sample_passes_ks() {
    let law = ParetoLaw::new(1.0).unwrap();
    let u = law.sample(100_000, &mut ChaCha8Rng::seed_from_u64(9));
    assert!(ks_against_pareto(&u, &law, 1.0, 9).unwrap().ks < 0.006);
}

#[test]
fn density_of_u_is_normalised() {
    for &t in &[1.0, 0.5, 0.1] {
        let total: f64 = density_u_cdf(t, 1.0, f64::MAX.sqrt()).unwrap();
        assert!((total - 1.0).abs() < 1e-5, "t={t}: {total}");
    }
}

#[test]
fn density_of_u_two_paths() {
    let table = density_u_table(1.0, 1.0).unwrap();
    for &u0 in &[0.5, 2.0] {
        let quad = density_u_cdf(1.0f64, 1.0, u0).unwrap();
        let tab = density_u_cdf_tabulated(&table, 1.0, u0).unwrap();
        assert!((quad - tab).abs() < 1e-6, "u₀={u0}: {quad} vs {tab}");
    }
}

#[test]
fn density_of_u_approaches_pareto() {
    let sup = |t: f64| {
        let table = density_u_table(t, 1.0).unwrap();
        (0..=190)
            .map(|i| 1.0 + i as f64 / 10.0)
            .map(|u| (density_u_cdf_tabulated(&table, t, u).unwrap() - (1.0 - 1.0 / u)).abs())
            .fold(0.0, f64::max)
    };
    let (a, b, c) = (sup(1.0), sup(0.5), sup(0.1));
    assert!(a > b && b > c, "{a} {b} {c}");
}

#[test]
fn density_of_u_matches_change_of_variables() {
    let f1 = EdmModel::new(bessel_rw_family::<f64>(), 0.0, 0.5).unwrap();
    for &u in &[0.7f64, 1.3, 3.0] {
        let t = 0.5;
        let y = u.powf(-1.0 / t);
        let direct = edm_pareto::families::edm_density(&f1, y).unwrap() * y / (t * u);
        assert_relative_eq!(density_u(t, 1.0, u).unwrap().value, direct, max_relative = 1e-12);
    }
}

#[test]
fn cumulant_slope_matches_fitted_index() {
    for fam in builtins() {
        let ell = estimate_ell(fam.tail()).unwrap().ell;
        let ratio = log_asymptote(fam.cumulant(), 1e8).unwrap() / -ell;
        assert!((0.95..=1.05).contains(&ratio), "{}: {ratio}", fam.name());
    }
    assert_relative_eq!(log_asymptote(gamma_family::<f64>().cumulant(), std::f64::consts::E).unwrap(), -(1.0 + std::f64::consts::E).ln(), max_relative = 1e-14);
}

#[test]
fn eas_values() {
    assert_relative_eq!(eas_value(1.0, 1e4).unwrap(), -1.062_670_394_533_713, max_relative = 1e-11);
    assert_relative_eq!(eas_value(1.0, 1e8).unwrap(), -1.031_335_197_266_856_5, max_relative = 1e-11);
    for &eta in &[0.5, 2.0] {
        assert_relative_eq!(eas_value(eta, 1e8).unwrap(), eas_value(1.0, 1e8).unwrap(), max_relative = 1e-12);
    }
    let far = eas_value(1.0f64, 1e300).unwrap();
    assert!((far + 1.0).abs() < 1e-3);
}
