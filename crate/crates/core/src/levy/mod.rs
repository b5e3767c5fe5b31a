//! Lévy measures of pure-jump subordinators and the conversions between the
//! measure `ν`, its tail `G(x) = ν((x, ∞))` and the cumulant
//! `k(θ) = −∫ (1 − e^{−θx}) ν(dx)`.

mod atoms;
mod cumulant;
mod measure;
mod tail;

pub use atoms::{AtomSource, FiniteAtoms, HarmonicAtoms, Remainder, ATOM_CAP};
pub use cumulant::{CumulantFunction, CumulantMethod, UNBOUNDED_THRESHOLD};
pub use measure::{DensityFn, LevyMeasure, MeasureChecks};
pub use tail::TailFunction;

use measure::Repr;

use crate::error::{Error, Result};
use crate::quadrature::{log_from_zero, log_range, log_upward, semi_infinite, QuadConfig, Trap};
use crate::real::{lit, Real};

/// First and last `j` of the fit grid `x = 2^{−j}`.
pub const FIT_RANGE: (i32, i32) = (10, 30);

/// Slow-log index `ℓ` with `G(x) ~ −ℓ ln x` as `x → 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowLogIndex<T> {
    pub ell: T,
    /// `(x_min, x_max)` of the fit grid
    pub fit_window: (T, T),
    /// RMS of `G(x)/(−ln x) − ℓ` over the grid
    pub residual: T,
}

impl<T: Real> SlowLogIndex<T> {
    /// Analytically known index; residual zero.
    pub fn exact(ell: T) -> Self {
        SlowLogIndex {
            ell,
            fit_window: fit_window(),
            residual: T::zero(),
        }
    }

    pub fn scaled(&self, c: T) -> Self {
        SlowLogIndex {
            ell: self.ell * c,
            fit_window: self.fit_window,
            residual: self.residual * c,
        }
    }
}

fn fit_window<T: Real>() -> (T, T) {
    (lit(2f64.powi(-FIT_RANGE.1)), lit(2f64.powi(-FIT_RANGE.0)))
}

fn quad_config<T: Real>() -> QuadConfig<T> {
    QuadConfig::default()
}

/// `ν((x, ∞))`.
pub fn tail_from_measure<T: Real>(nu: &LevyMeasure<T>, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::invalid("tail needs x > 0"));
    }
    match &nu.repr {
        Repr::Atoms(src) => src.tail(x),
        Repr::Tail(g) => g.eval(x),
        Repr::Density { support, .. } => {
            if x >= support.1 {
                return Ok(T::zero());
            }
            let f = |y: T| nu.density(y).unwrap_or_else(T::nan);
            Ok(log_upward(&f, x, &quad_config())?.value)
        }
    }
}

/// `∫_{v0}^∞ e^{−v} G(v/θ) dv`, for `θ > 0`.
fn damped_tail_integral<T: Real>(g: &TailFunction<T>, theta: T, v0: T) -> Result<T> {
    let cfg = quad_config();
    let trap = Trap::new();
    let h = |v: T| {
        let e = (-v).exp();
        if e == T::zero() {
            return T::zero();
        }
        e * trap.catch(g.eval(v / theta))
    };
    let split = T::one();
    let result = if v0 >= split {
        semi_infinite(&h, v0, T::one(), &cfg).map(|e| e.value)
    } else {
        let near = if v0 == T::zero() {
            log_from_zero(&h, split, &cfg)
        } else {
            log_range(&h, v0, split, &cfg)
        };
        near.and_then(|a| Ok(a.value + semi_infinite(&h, split, T::one(), &cfg)?.value))
    };
    trap.finish(result)
}

/// `k(θ) = −θ ∫_0^∞ e^{−θx} G(x) dx`, split at `x = 1/θ`; exactly `0` at `θ = 0`.
///
/// Atomic tails are summed in closed form instead.
pub fn cumulant_from_tail<T: Real>(g: &TailFunction<T>, theta: T) -> Result<T> {
    if !(theta >= T::zero()) || theta.is_infinite() {
        return Err(Error::invalid(format!("cumulant needs finite theta >= 0, got {theta}")));
    }
    if theta == T::zero() {
        return Ok(T::zero());
    }
    if let tail::TailEval::Atomic(src) = &g.eval {
        return src.partial_cumulant(theta, T::zero());
    }
    Ok(-damped_tail_integral(g, theta, T::zero())?)
}

/// `k_ε(θ) = (e^{−θε} − 1) G(ε) − θ ∫_ε^∞ e^{−θx} G(x) dx`, which increases to
/// `k(θ)` as `ε → 0`.
pub fn cumulant_truncated<T: Real>(nu: &LevyMeasure<T>, theta: T, epsilon: T) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(Error::invalid("truncation needs epsilon > 0"));
    }
    if !(theta >= T::zero()) || theta.is_infinite() {
        return Err(Error::invalid(format!("cumulant needs finite theta >= 0, got {theta}")));
    }
    if theta == T::zero() {
        return Ok(T::zero());
    }
    if let Some(src) = nu.atoms() {
        return src.partial_cumulant(theta, epsilon);
    }
    let g = TailFunction::from_measure(nu);
    truncated_from_tail(&g, theta, epsilon)
}

fn truncated_from_tail<T: Real>(g: &TailFunction<T>, theta: T, epsilon: T) -> Result<T> {
    let boundary = (-theta * epsilon).exp_m1() * g.eval(epsilon)?;
    Ok(boundary - damped_tail_integral(g, theta, theta * epsilon)?)
}

/// Tail of the tilted measure through `G_{θ₀}(x) = k_x(θ₀) + G(x)`.
pub(crate) fn tilted_tail<T: Real>(g: &TailFunction<T>, theta0: T) -> TailFunction<T> {
    let g = g.clone();
    let known = g.known_index();
    let tilted = TailFunction::from_fallible(move |x| Ok(truncated_from_tail(&g, theta0, x)? + g.eval(x)?));
    match known {
        Some(ell) => tilted.with_known_index(ell),
        None => tilted,
    }
}

/// `ν_{θ₀}(dx) = e^{−θ₀x} ν(dx)`.
pub fn tilt<T: Real>(nu: &LevyMeasure<T>, theta0: T) -> Result<LevyMeasure<T>> {
    if !(theta0 > T::zero()) || theta0.is_infinite() {
        return Err(Error::invalid(format!("tilt needs finite theta0 > 0, got {theta0}")));
    }
    nu.tilted(theta0)
}

/// `c·ν`.
pub fn scale<T: Real>(nu: &LevyMeasure<T>, c: T) -> Result<LevyMeasure<T>> {
    nu.scaled(c)
}

/// Least-squares constant fit of `G(2^{−j}) / (j ln 2)`, `j = 10..=30`.
pub fn estimate_ell<T: Real>(g: &TailFunction<T>) -> Result<SlowLogIndex<T>> {
    let (first, last) = FIT_RANGE;
    let ln2 = lit::<T>(2f64.ln());
    let mut ratios = Vec::with_capacity((last - first + 1) as usize);
    for j in first..=last {
        let x = lit::<T>(2f64.powi(-j));
        let r = g.eval(x)? / (lit::<T>(j as f64) * ln2);
        if !(r > T::zero()) || r.is_infinite() {
            return Err(Error::TailNotLogRegular(format!(
                "G(2^-{j}) / ({j} ln 2) = {r} is not positive"
            )));
        }
        ratios.push(r);
    }
    let n = lit::<T>(ratios.len() as f64);
    let ell = ratios.iter().fold(T::zero(), |s, &r| s + r) / n;
    let residual = (ratios.iter().fold(T::zero(), |s, &r| s + (r - ell) * (r - ell)) / n).sqrt();
    if residual > lit::<T>(0.5) * ell {
        return Err(Error::TailNotLogRegular(format!(
            "ratios G(x)/(-ln x) vary too much: estimate {ell}, residual {residual}"
        )));
    }
    if let Some(known) = g.known_index() {
        if (known - ell).abs() > lit::<T>(3.0) * residual {
            return Err(Error::TailNotLogRegular(format!(
                "known index {known} is not within 3 residuals ({residual}) of the estimate {ell}"
            )));
        }
    }
    Ok(SlowLogIndex {
        ell,
        fit_window: fit_window(),
        residual,
    })
}

/// `k(θ) / ln θ`, which tends to `−ℓ`.
pub fn log_asymptote<T: Real>(k: &CumulantFunction<T>, theta: T) -> Result<T> {
    if !(theta > T::one()) {
        return Err(Error::invalid("log asymptote needs theta > 1"));
    }
    Ok(k.eval(theta)? / theta.ln())
}
