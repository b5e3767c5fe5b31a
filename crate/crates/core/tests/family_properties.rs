use approx::assert_relative_eq;
use edm_pareto::families::{
    bessel_rw_family, edm_cdf, edm_laplace, gamma_family, harmonic_poisson_family, sample_ln_streams, BesselCdf,
    EdmModel, Family, FamilyKind,
};
use edm_pareto::levy::{estimate_ell, scale, TailFunction};
use edm_pareto::limits::ks_statistic;
use edm_pareto::quadrature::{log_from_zero, QuadConfig};
use edm_pareto::real::ln_add_exp;
use edm_pareto::special_fn::{confluent_half, confluent_half_series};

fn builtins() -> Vec<Family<f64>> {
    vec![gamma_family(), harmonic_poisson_family(), bessel_rw_family()]
}

fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn laplace_at_zero_is_one() {
    for fam in builtins() {
        assert_eq!(fam.laplace(0.0).unwrap(), 1.0);
        assert_eq!(fam.cumulant().eval(0.0).unwrap(), 0.0);
    }
}

#[test]
fn convolution_semigroup() {
    let (t, s) = (0.3, 0.7);
    for fam in builtins() {
        for &theta0 in &[0.0, 1.0] {
            let part = |d: f64, seed| sample_ln_streams(&EdmModel::new(fam.clone(), theta0, d).unwrap(), 10_000, seed);
            let a = part(t, 101).unwrap();
            let b = part(s, 202).unwrap();
            let ln_sums: Vec<f64> = a.iter().zip(&b).map(|(&x, &y)| ln_add_exp(x, y)).collect();
            let whole = EdmModel::new(fam.clone(), theta0, t + s).unwrap();
            let ks = match fam.kind() {
                FamilyKind::Gamma => ks_statistic(&ln_sums, |l: f64| edm_cdf(&whole, l.exp()).unwrap()).unwrap(),
                FamilyKind::BesselRandomWalk => {
                    let table = BesselCdf::for_model(&whole).unwrap();
                    ks_statistic(&ln_sums, |l| table.cdf_ln(l).unwrap()).unwrap()
                }
                _ => two_sample_ks(&ln_sums, &sample_ln_streams(&whole, 100_000, 303).unwrap()),
            };
            assert!(ks < 0.02, "{} θ₀={theta0}: KS {ks}", fam.name());
        }
    }
}

#[test]
fn laplace_transform_matches_monte_carlo() {
    for fam in builtins() {
        for &theta0 in &[0.0, 1.0] {
            for &t in &[0.5, 1.0] {
                let model = EdmModel::new(fam.clone(), theta0, t).unwrap();
                let ln_y = sample_ln_streams(&model, 100_000, 17).unwrap();
                for &s in &[0.5, 1.0, 2.0] {
                    let w: Vec<f64> = ln_y.iter().map(|&l| (-s * l.exp()).exp()).collect();
                    let n = w.len() as f64;
                    let mean = w.iter().sum::<f64>() / n;
                    let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                    let se = (var / n).sqrt();
                    let exact = edm_laplace(&model, s).unwrap();
                    assert!(
                        (mean - exact).abs() < 3.0 * se,
                        "{} θ₀={theta0} t={t} s={s}: {mean} vs {exact} (se {se})",
                        fam.name()
                    );
                }
            }
        }
    }
}

/// `∫₀^x f(y) g(x−y) dy` with `f(y) = e^{−2y}/√(πy)`, `g(y) = 1/√(πy)`.
fn km_convolution(x: f64) -> f64 {
    let cfg = QuadConfig::default();
    let pi = std::f64::consts::PI;
    let near_zero = |y: f64| (-2.0 * y).exp() / (pi * (y * (x - y)).sqrt());
    let near_x = |z: f64| (-2.0 * (x - z)).exp() / (pi * (z * (x - z)).sqrt());
    log_from_zero(&near_zero, x / 2.0, &cfg).unwrap().value + log_from_zero(&near_x, x / 2.0, &cfg).unwrap().value
}

#[test]
fn confluent_levy_density_is_a_convolution() {
    for &x in &[0.1, 1.0, 5.0] {
        let conv = km_convolution(x);
        assert_relative_eq!(conv, confluent_half(x).unwrap(), max_relative = 1e-8);
        assert_relative_eq!(conv, confluent_half_series(x).unwrap(), max_relative = 1e-8);
    }
}

#[test]
fn bessel_cumulant_derivative_factorises() {
    let k = bessel_rw_family::<f64>().cumulant().clone();
    for &theta in &[0.5, 1.0, 2.0, 5.0] {
        let h = 1e-5 * theta;
        let fd = (k.eval(theta + h).unwrap() - k.eval(theta - h).unwrap()) / (2.0 * h);
        let exact = -1.0 / (theta * (theta + 2.0)).sqrt();
        assert_relative_eq!(fd, exact, max_relative = 1e-6);
    }
    let h = 1e-5;
    let fd = (k.eval(2.0 + h).unwrap() - k.eval(2.0 - h).unwrap()) / (2.0 * h);
    assert_relative_eq!(fd, -0.353_553_390_593_273_8, max_relative = 1e-8);
}

#[test]
fn scaling_the_measure_scales_the_index() {
    for fam in builtins() {
        for &c in &[0.5, 2.0] {
            let est = estimate_ell(&TailFunction::from_measure(&scale(fam.levy(), c).unwrap())).unwrap();
            assert!((est.ell - c).abs() < 0.1 * c, "{} c={c}: {}", fam.name(), est.ell);
            let via_family = estimate_ell(fam.scaled(c).unwrap().tail()).unwrap();
            assert_relative_eq!(via_family.ell, est.ell, max_relative = 1e-9);
        }
    }
}

#[test]
fn frozen_laplace_values() {
    let g = EdmModel::new(gamma_family::<f64>(), 0.0, 0.1).unwrap();
    assert_relative_eq!(edm_laplace(&g, 1024.0).unwrap(), 1025f64.powf(-0.1), max_relative = 1e-14);
    let b = EdmModel::new(bessel_rw_family::<f64>(), 1.0, 1.0).unwrap();
    let expected = (3.0 - 8f64.sqrt()) / (2.0 - 3f64.sqrt());
    assert_relative_eq!(edm_laplace(&b, 1.0).unwrap(), expected, max_relative = 1e-13);
    let h = EdmModel::new(harmonic_poisson_family::<f64>(), 0.0, 1.0).unwrap();
    assert_relative_eq!(edm_laplace(&h, 5.0).unwrap(), (-2.764_096_826_037_299_f64).exp(), max_relative = 1e-10);
}
