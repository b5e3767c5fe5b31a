//! The Pareto limit of `Y_t^{−t}` as `t → 0`: the Laplace-transform limit,
//! the limit law, Kolmogorov–Smirnov diagnostics and the density of
//! `U = Y_t^{−t}` for the Bessel family.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::families::{bessel_rw_family, BesselCdf, EdmModel, Family};
use crate::quadrature::{adaptive, log_from_zero, semi_infinite, QuadConfig};
use crate::real::{ln_add_exp, lit, Real};
use crate::special_fn::ln_bessel_i_scaled_of_ln;

/// Pareto law `F₀(u) = 1 − u^{−ℓ}` on `u ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParetoLaw<T> {
    ell: T,
}

impl<T: Real> ParetoLaw<T> {
    pub fn new(ell: T) -> Result<Self> {
        if !(ell > T::zero()) || ell.is_infinite() {
            return Err(Error::invalid(format!("Pareto index must be positive, got {ell}")));
        }
        Ok(ParetoLaw { ell })
    }

    pub fn ell(&self) -> T {
        self.ell
    }

    pub fn cdf(&self, u: T) -> T {
        if u.is_nan() {
            return u;
        }
        if u <= T::one() {
            return T::zero();
        }
        -(-self.ell * u.ln()).exp_m1()
    }

    /// `(1 − p)^{−1/ℓ}`.
    pub fn quantile(&self, p: T) -> Result<T> {
        if !(p >= T::zero() && p < T::one()) {
            return Err(Error::invalid(format!("quantile needs 0 <= p < 1, got {p}")));
        }
        Ok((-(-p).ln_1p() / self.ell).exp())
    }

    /// `n` draws `V^{−1/ℓ}`, `V` uniform on `(0, 1]`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<T> {
        (0..n)
            .map(|_| {
                let v: f64 = 1.0 - rng.random::<f64>();
                (-lit::<T>(v).ln() / self.ell).exp()
            })
            .collect()
    }
}

pub fn pareto_cdf<T: Real>(law: &ParetoLaw<T>, u: T) -> T {
    law.cdf(u)
}

/// Geometric grid `2^{j/4}`, `j = −8..=16`.
pub fn default_u_grid<T: Real>() -> Vec<T> {
    (-8..=16).map(|j| lit(2f64.powf(j as f64 / 4.0))).collect()
}

/// One `(t, u)` cell of the Laplace-transform limit table.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCell<T> {
    pub t: T,
    pub u: T,
    /// `(L(θ₀ + u^{1/t}) / L(θ₀))^t`; `NaN` when `failure` is set
    pub value: T,
    /// `min(1, u^{−ℓ})`
    pub target: T,
    pub abs_error: T,
    /// `k` came from the `−ℓ ln θ` extrapolation
    pub extrapolated: bool,
    pub failure: Option<String>,
}

/// Limit table over `t_grid × u_grid`, rows by `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCurve<T> {
    pub family: String,
    pub theta0: T,
    pub ell: T,
    pub t_grid: Vec<T>,
    pub u_grid: Vec<T>,
    pub cells: Vec<Vec<LimitCell<T>>>,
}

impl<T: Real> LimitCurve<T> {
    pub fn value(&self, ti: usize, ui: usize) -> T {
        self.cells[ti][ui].value
    }

    pub fn target(&self, ui: usize) -> T {
        self.cells[0][ui].target
    }
}

fn check_grid<T: Real>(name: &str, grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid(format!("{name} is empty")));
    }
    if grid.iter().any(|&v| !(v > T::zero()) || v.is_infinite()) {
        return Err(Error::invalid(format!("{name} must hold finite positive values")));
    }
    Ok(())
}

/// Evaluates `exp(t (k(θ₀ + u^{1/t}) − k(θ₀)))` on every cell, working with
/// `ln θ = ln u / t`. Cells needing the log-asymptote extrapolation are
/// flagged; cells that fail carry the error text.
pub fn lt_limit_curve<T: Real>(family: &Family<T>, theta0: T, u_grid: &[T], t_grid: &[T]) -> Result<LimitCurve<T>> {
    check_grid("u grid", u_grid)?;
    check_grid("t grid", t_grid)?;
    if !(theta0 >= T::zero()) || theta0.is_infinite() {
        return Err(Error::invalid(format!("theta0 must be finite and >= 0, got {theta0}")));
    }
    let ell = family.ell().ell;
    let k0 = family.cumulant().eval(theta0)?;
    let ln_theta0 = theta0.ln();
    let jobs: Vec<(usize, usize)> = (0..t_grid.len())
        .flat_map(|i| (0..u_grid.len()).map(move |j| (i, j)))
        .collect();
    let cells: Vec<LimitCell<T>> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let (t, u) = (t_grid[i], u_grid[j]);
            let target = if u < T::one() { T::one() } else { (-ell * u.ln()).exp() };
            let ln_shift = u.ln() / t;
            let ln_theta = if theta0 > T::zero() {
                ln_add_exp(ln_theta0, ln_shift)
            } else {
                ln_shift
            };
            match family.cumulant_at_ln(ln_theta) {
                Ok(k) => {
                    let value = (t * (k.value - k0)).exp();
                    LimitCell {
                        t,
                        u,
                        value,
                        target,
                        abs_error: (value - target).abs(),
                        extrapolated: k.extrapolated,
                        failure: None,
                    }
                }
                Err(e) => LimitCell {
                    t,
                    u,
                    value: T::nan(),
                    target,
                    abs_error: T::nan(),
                    extrapolated: false,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut it = cells.into_iter();
    for _ in 0..t_grid.len() {
        rows.push(it.by_ref().take(u_grid.len()).collect());
    }
    Ok(LimitCurve {
        family: family.name().to_string(),
        theta0,
        ell,
        t_grid: t_grid.to_vec(),
        u_grid: u_grid.to_vec(),
        cells: rows,
    })
}

/// `y ↦ y^{−t}`; zero, negative or non-finite entries are rejected.
pub fn transform_sample<T: Real>(sample: &[T], t: T) -> Result<Vec<T>> {
    check_t(t)?;
    sample
        .iter()
        .map(|&y| {
            if !(y > T::zero()) || y.is_infinite() {
                return Err(Error::invalid(format!("transform needs finite y > 0, got {y}")));
            }
            Ok((-t * y.ln()).exp())
        })
        .collect()
}

/// `ln y ↦ y^{−t}` for samples held in log form.
pub fn transform_ln_sample<T: Real>(ln_sample: &[T], t: T) -> Result<Vec<T>> {
    check_t(t)?;
    ln_sample
        .iter()
        .map(|&l| {
            if !l.is_finite() {
                return Err(Error::invalid(format!("transform needs finite ln y, got {l}")));
            }
            Ok((-t * l).exp())
        })
        .collect()
}

fn check_t<T: Real>(t: T) -> Result<()> {
    if !(t > T::zero()) || t.is_infinite() {
        return Err(Error::invalid(format!("t must be finite and > 0, got {t}")));
    }
    Ok(())
}

/// Kolmogorov–Smirnov distance of one sample from the Pareto limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsReport<T> {
    pub t: T,
    pub n: usize,
    pub ks: T,
    pub seed: u64,
}

/// `max_i max(i/n − F(x_(i)), F(x_(i)) − (i−1)/n)` over the sorted sample.
pub fn ks_statistic<T: Real>(sample: &[T], cdf: impl Fn(T) -> T) -> Result<T> {
    if sample.is_empty() {
        return Err(Error::invalid("KS statistic needs a non-empty sample"));
    }
    if sample.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("KS statistic needs a sample without NaN"));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let n = lit::<T>(sorted.len() as f64);
    let mut d = T::zero();
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let above = lit::<T>((i + 1) as f64) / n - f;
        let below = f - lit::<T>(i as f64) / n;
        d = d.max(above).max(below);
    }
    Ok(d)
}

/// KS distance of `U`-values from `law`; `t` and `seed` are carried for the record.
pub fn ks_against_pareto<T: Real>(transformed: &[T], law: &ParetoLaw<T>, t: T, seed: u64) -> Result<KsReport<T>> {
    let ks = ks_statistic(transformed, |u| law.cdf(u))?;
    Ok(KsReport {
        t,
        n: transformed.len(),
        ks,
        seed,
    })
}

/// Density value of `U`, with its logarithm and an underflow flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityU<T> {
    pub value: T,
    pub ln_value: T,
    pub underflow: bool,
}

/// Density of `U = Y^{−t}` when `Y` has density `(a/y) e^{−y} I_a(y)`,
/// `a = tℓ`: `g(u) = ℓ u^{−1} e^{−y} I_a(y)` with `y = u^{−1/t}`.
pub fn density_u<T: Real>(t: T, ell: T, u: T) -> Result<DensityU<T>> {
    check_t(t)?;
    if !(ell > T::zero()) || ell.is_infinite() {
        return Err(Error::invalid(format!("index must be positive, got {ell}")));
    }
    if !(u > T::zero()) || u.is_infinite() {
        return Err(Error::invalid(format!("density of U needs finite u > 0, got {u}")));
    }
    let ln_u = u.ln();
    let ln_y = -ln_u / t;
    let ln_value = ell.ln() - ln_u + ln_bessel_i_scaled_of_ln(t * ell, ln_y)?;
    let value = ln_value.exp();
    Ok(DensityU {
        value,
        ln_value,
        underflow: value == T::zero() && ln_value > T::neg_infinity(),
    })
}

/// The closed form `ℓ t² u^{2t+1} e^{−1/u^t} I_{tℓ}(1/u^t)` as printed; kept
/// for comparison only, since it is not the density of `U`.
pub fn printed_density_u<T: Real>(t: T, ell: T, u: T) -> Result<T> {
    check_t(t)?;
    if !(u > T::zero()) {
        return Err(Error::invalid("printed density needs u > 0"));
    }
    let ln_u = u.ln();
    let ln_w = -t * ln_u;
    let ln = ell.ln() + lit::<T>(2.0) * t.ln() + (lit::<T>(2.0) * t + T::one()) * ln_u
        + ln_bessel_i_scaled_of_ln(t * ell, ln_w)?;
    Ok(ln.exp())
}

/// `P(U ≤ u₀)` by quadrature of [`density_u`].
pub fn density_u_cdf<T: Real>(t: T, ell: T, u0: T) -> Result<T> {
    let cfg = QuadConfig::default().with_rel_tol(lit(1e-11));
    let trap = crate::quadrature::Trap::new();
    let g = |u: T| trap.catch(density_u(t, ell, u).map(|d| d.value));
    Ok(trap.finish(log_from_zero(&g, u0, &cfg))?.value)
}

/// `P(U ≤ u₀) = P(Y ≥ u₀^{−1/t})` from the tabulated Bessel CDF.
pub fn density_u_cdf_tabulated<T: Real>(table: &BesselCdf<T>, t: T, u0: T) -> Result<T> {
    check_t(t)?;
    if !(u0 > T::zero()) {
        return Err(Error::invalid("CDF of U needs u0 > 0"));
    }
    table.survival_ln(-u0.ln() / t)
}

/// Tabulated CDF of `Y ~ (a/y) e^{−y} I_a(y)`, `a = tℓ`, for use with
/// [`density_u_cdf_tabulated`].
pub fn density_u_table<T: Real>(t: T, ell: T) -> Result<BesselCdf<T>> {
    check_t(t)?;
    let model = EdmModel::new(bessel_rw_family::<T>(), T::zero(), t * ell)?;
    BesselCdf::for_model(&model)
}

/// `(1/ln θ) · θ ∫_0^η e^{−θx} ln x dx`
/// `= (1/ln θ) ∫_0^{ηθ} e^{−v} ln v dv − (1 − e^{−ηθ})`, which tends to `−1`.
pub fn eas_value<T: Real>(eta: T, theta: T) -> Result<T> {
    if !(eta > T::zero()) || eta.is_infinite() {
        return Err(Error::invalid("eta must be finite and > 0"));
    }
    if !(theta > T::one()) || theta.is_infinite() {
        return Err(Error::invalid("theta must be finite and > 1"));
    }
    let cfg = QuadConfig::default().with_rel_tol(lit(1e-12));
    let f = |v: T| (-v).exp() * v.ln();
    let upper = eta * theta;
    let integral = if upper <= T::one() {
        log_from_zero(&f, upper, &cfg)?.value
    } else {
        let near = log_from_zero(&f, T::one(), &cfg)?.value;
        let far = if upper > lit(700.0) {
            semi_infinite(&f, T::one(), T::one(), &cfg)?.value
        } else {
            adaptive(&f, T::one(), upper, &cfg)?.value
        };
        near + far
    };
    Ok(integral / theta.ln() + (-upper).exp_m1())
}
