//! Pareto-based approximation of a small-dispersion EDM member:
//! `P(Y_t ≤ y) ≈ min(1, y^{tℓ})`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::families::{sample_ln_streams, EdmModel, Family, FamilyKind};
use crate::real::{lit, Real};
use crate::special_fn::reg_lower_incomplete_gamma_ln_x;

fn check<T: Real>(ell: T, t: T) -> Result<()> {
    if !(ell > T::zero()) || ell.is_infinite() {
        return Err(Error::invalid(format!("index must be finite and > 0, got {ell}")));
    }
    if !(t > T::zero()) || t.is_infinite() {
        return Err(Error::invalid(format!("t must be finite and > 0, got {t}")));
    }
    Ok(())
}

/// `min(1, y^{tℓ})`, the CDF of `U^{−1/t}` with `U ~ Pareto(ℓ)`.
pub fn approx_cdf<T: Real>(ell: T, t: T, y: T) -> Result<T> {
    if !(y >= T::zero()) {
        return Err(Error::invalid(format!("approximate CDF needs y >= 0, got {y}")));
    }
    if y == T::zero() {
        check(ell, t)?;
        return Ok(T::zero());
    }
    Ok(approx_cdf_ln(ell, t, y.ln())?)
}

/// [`approx_cdf`] at `y = e^{ln_y}`.
pub fn approx_cdf_ln<T: Real>(ell: T, t: T, ln_y: T) -> Result<T> {
    check(ell, t)?;
    if ln_y >= T::zero() {
        return Ok(T::one());
    }
    Ok((t * ell * ln_y).exp())
}

/// `p^{1/(tℓ)}`.
pub fn approx_quantile<T: Real>(ell: T, t: T, p: T) -> Result<T> {
    Ok(approx_quantile_ln(ell, t, p)?.exp())
}

/// `ln p / (tℓ)`.
pub fn approx_quantile_ln<T: Real>(ell: T, t: T, p: T) -> Result<T> {
    check(ell, t)?;
    if !(p > T::zero() && p <= T::one()) {
        return Err(Error::invalid(format!("quantile needs 0 < p <= 1, got {p}")));
    }
    Ok(p.ln() / (t * ell))
}

/// `n` draws of `ln Y = −ln U / t`, `U ~ Pareto(ℓ)`.
pub fn approx_sampler_ln<T: Real, R: Rng + ?Sized>(ell: T, t: T, n: usize, rng: &mut R) -> Result<Vec<T>> {
    check(ell, t)?;
    Ok((0..n)
        .map(|_| {
            let v: f64 = 1.0 - rng.random::<f64>();
            lit::<T>(v).ln() / (t * ell)
        })
        .collect())
}

/// `n` draws of `U^{−1/t}`, `U ~ Pareto(ℓ)`.
pub fn approx_sampler<T: Real, R: Rng + ?Sized>(ell: T, t: T, n: usize, rng: &mut R) -> Result<Vec<T>> {
    Ok(approx_sampler_ln(ell, t, n, rng)?.into_iter().map(|v| v.exp()).collect())
}

/// Source of the reference CDF in an [`ApproxReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApproxMethod {
    ExactCdf,
    MonteCarlo,
}

impl ApproxMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            ApproxMethod::ExactCdf => "exact-cdf",
            ApproxMethod::MonteCarlo => "monte-carlo",
        }
    }
}

/// Reference and approximate CDFs on a grid in `y ∈ (0, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxReport<T> {
    pub family: String,
    pub t: T,
    pub theta0: T,
    pub ell: T,
    pub method: ApproxMethod,
    /// Monte Carlo sample size, zero for the exact CDF
    pub n: usize,
    pub seed: u64,
    /// `ln y` of each grid point
    pub ln_grid: Vec<T>,
    pub reference: Vec<T>,
    pub approx: Vec<T>,
    pub sup_cdf_error: T,
}

/// Grid points: the approximation's quantiles at `p = i/200` and
/// `y = 1 + j/50` up to `2`, as `ln y`.
pub fn approx_grid<T: Real>(ell: T, t: T) -> Result<Vec<T>> {
    let mut grid = Vec::with_capacity(250);
    for i in 1..=200 {
        grid.push(approx_quantile_ln(ell, t, lit::<T>(i as f64 / 200.0))?);
    }
    for j in 1..=50 {
        grid.push(lit::<T>(1.0 + j as f64 / 50.0).ln());
    }
    Ok(grid)
}

/// Sup-distance between `P(Y_t ≤ y)` and [`approx_cdf`] over [`approx_grid`].
/// Gamma uses the incomplete gamma function; other families use `n`
/// Monte Carlo draws from `seed`.
pub fn approx_error<T: Real>(family: &Family<T>, theta0: T, t: T, n: usize, seed: u64) -> Result<ApproxReport<T>> {
    let model = EdmModel::new(family.clone(), theta0, t)?;
    let ell = family.ell().ell;
    let ln_grid = approx_grid(ell, t)?;
    let (method, reference, n) = if family.kind() == FamilyKind::Gamma {
        let shape = model.effective_t();
        let ln_rate = (T::one() + theta0).ln();
        let reference = ln_grid
            .iter()
            .map(|&l| reg_lower_incomplete_gamma_ln_x(shape, l + ln_rate))
            .collect::<Result<Vec<T>>>()?;
        (ApproxMethod::ExactCdf, reference, 0)
    } else {
        let mut draws = sample_ln_streams(&model, n, seed)?;
        draws.sort_by(|a, b| a.partial_cmp(b).expect("log draws are never NaN"));
        let total = lit::<T>(n as f64);
        let reference = ln_grid
            .iter()
            .map(|&l| lit::<T>(draws.partition_point(|&d| d <= l) as f64) / total)
            .collect();
        (ApproxMethod::MonteCarlo, reference, n)
    };
    let approx = ln_grid
        .iter()
        .map(|&l| approx_cdf_ln(ell, t, l))
        .collect::<Result<Vec<T>>>()?;
    let sup_cdf_error = reference
        .iter()
        .zip(&approx)
        .fold(T::zero(), |m, (&r, &a)| m.max((r - a).abs()));
    Ok(ApproxReport {
        family: family.name().to_string(),
        t,
        theta0,
        ell,
        method,
        n,
        seed,
        ln_grid,
        reference,
        approx,
        sup_cdf_error,
    })
}
