//! Modified Bessel function of the first kind, `I_ν(x)`, real order `ν ≥ 0`.
//!
//! Log scale is the primary representation: the ascending series is summed
//! relative to its leading term `(x/2)^ν / Γ(ν+1)`, and the Hankel expansion
//! is carried in the exponentially scaled form `e^{−x} I_ν(x)`.

use crate::error::{Error, Result};
use crate::real::{lit, Real};

use super::gamma::ln_gamma;
use super::SeriesEvalPolicy;

const SERIES_LIMIT: f64 = 30.0;
const RESCALE: f64 = 1e250;

/// `ln I_ν(x)`; `−∞` at `x = 0` for `ν > 0`.
pub fn ln_bessel_i<T: Real>(order: T, x: T) -> Result<T> {
    Ok(ln_bessel_i_scaled(order, x)? + x)
}

/// `ln(e^{−x} I_ν(x))`.
pub fn ln_bessel_i_scaled<T: Real>(order: T, x: T) -> Result<T> {
    check(order, x)?;
    if x == T::zero() {
        return Ok(if order == T::zero() { T::zero() } else { T::neg_infinity() });
    }
    let policy = SeriesEvalPolicy::default();
    if x > lit(SERIES_LIMIT) {
        if let Some(v) = hankel_scaled(order, x, &policy) {
            return Ok(v);
        }
    }
    Ok(ln_series(order, x, &policy)? - x)
}

/// `ln(e^{−x} I_ν(x))` given `ln x`, usable when `x` under- or overflows.
pub fn ln_bessel_i_scaled_of_ln<T: Real>(order: T, ln_x: T) -> Result<T> {
    if ln_x.is_nan() {
        return Err(Error::invalid("Bessel I needs a finite ln x"));
    }
    if ln_x < lit(-650.0) {
        check(order, T::zero())?;
        // only the leading term survives
        return Ok(order * (ln_x - lit::<T>(2.0).ln()) - ln_gamma(order + T::one()));
    }
    if ln_x > lit(650.0) {
        check(order, T::one())?;
        // 1/x is zero at working precision
        return Ok(-lit::<T>(0.5) * ((lit::<T>(2.0) * T::PI()).ln() + ln_x));
    }
    ln_bessel_i_scaled(order, ln_x.exp())
}

/// `I_ν(x)` in linear scale; overflow is an error directing to the log form.
pub fn bessel_i<T: Real>(order: T, x: T) -> Result<T> {
    let ln = ln_bessel_i(order, x)?;
    if ln > T::max_ln() {
        return Err(Error::Overflow(format!(
            "I_{}({}) exceeds the scalar range; use ln_bessel_i",
            order.as_f64(),
            x.as_f64()
        )));
    }
    Ok(ln.exp())
}

/// `e^{−x} I_ν(x)` in linear scale.
pub fn bessel_i_scaled<T: Real>(order: T, x: T) -> Result<T> {
    Ok(ln_bessel_i_scaled(order, x)?.exp())
}

fn check<T: Real>(order: T, x: T) -> Result<()> {
    if !(order >= T::zero()) || order.is_infinite() {
        return Err(Error::invalid("Bessel I needs a finite order >= 0"));
    }
    if !(x >= T::zero()) {
        return Err(Error::invalid("Bessel I needs x >= 0"));
    }
    Ok(())
}

/// `ln I_ν(x)` from `Σ (x/2)^{2n+ν} / (n! Γ(n+ν+1))`.
fn ln_series<T: Real>(order: T, x: T, policy: &SeriesEvalPolicy<T>) -> Result<T> {
    let half = x * lit(0.5);
    let lead = order * half.ln() - ln_gamma(order + T::one());
    let q = half * half;
    let rescale = lit::<T>(RESCALE);
    let mut term = T::one();
    let mut sum = T::one();
    let mut shift = T::zero();
    for n in 1..policy.max_terms() {
        let nf = lit::<T>(n as f64);
        term = term * q / (nf * (nf + order));
        sum = sum + term;
        if sum > rescale {
            sum = sum / rescale;
            term = term / rescale;
            shift = shift + rescale.ln();
        }
        if nf > half && term <= policy.rel_tol() * sum {
            return Ok(lead + sum.ln() + shift);
        }
    }
    Err(Error::SeriesNotConverged {
        what: "Bessel I ascending series",
        max_terms: policy.max_terms(),
    })
}

/// Hankel expansion `e^{−x} I_ν(x) ≈ (2πx)^{−1/2} Σ (−1)^k a_k(ν)/x^k`.
///
/// Returns `None` when the terms stop decreasing before reaching tolerance.
fn hankel_scaled<T: Real>(order: T, x: T, policy: &SeriesEvalPolicy<T>) -> Option<T> {
    let mu = lit::<T>(4.0) * order * order;
    let mut term = T::one();
    let mut sum = T::one();
    let mut last = T::infinity();
    for k in 1..200 {
        let odd = lit::<T>((2 * k - 1) as f64);
        term = -term * (mu - odd * odd) / (lit::<T>(8.0 * k as f64) * x);
        if term == T::zero() {
            break;
        }
        let mag = term.abs();
        if mag > last {
            return None;
        }
        sum = sum + term;
        if mag <= policy.rel_tol() * sum.abs() {
            break;
        }
        last = mag;
        if k == 199 {
            return None;
        }
    }
    if !(sum > T::zero()) {
        return None;
    }
    Some(sum.ln() - lit::<T>(0.5) * (lit::<T>(2.0) * T::PI() * x).ln())
}
