use crate::error::{Error, Result};
use crate::real::{lit, Real};

use super::SeriesEvalPolicy;

/// Exponential integral `E₁(x) = ∫_x^∞ e^{−y}/y dy` for `x > 0`.
pub fn exp_integral_e1<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::invalid("E1 needs x > 0"));
    }
    if x <= T::one() {
        Ok(ein(x)? - x.ln() - T::euler_gamma())
    } else {
        Ok(e1_fraction(x)? * (-x).exp())
    }
}

/// `e^x E₁(x)`, finite for every `x > 0`.
pub fn exp_integral_e1_scaled<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::invalid("E1 needs x > 0"));
    }
    if x <= T::one() {
        Ok(exp_integral_e1(x)? * x.exp())
    } else {
        e1_fraction(x)
    }
}

/// Entire exponential integral `Ein(z) = ∫_0^z (1 − e^{−w})/w dw`.
pub fn ein<T: Real>(z: T) -> Result<T> {
    if z == T::zero() {
        return Ok(T::zero());
    }
    if z.is_infinite() && z > T::zero() {
        return Ok(T::infinity());
    }
    if z > T::one() {
        return Ok(exp_integral_e1(z)? + z.ln() + T::euler_gamma());
    }
    let policy = SeriesEvalPolicy::<T>::default();
    // Σ_{k≥1} (−1)^{k+1} z^k / (k · k!)
    let mut power = T::one();
    let mut sum = T::zero();
    for k in 1..policy.max_terms() {
        let kf = lit::<T>(k as f64);
        power = -power * z / kf;
        let term = -power / kf;
        sum = sum + term;
        if term.abs() <= policy.rel_tol() * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNotConverged {
        what: "Ein series",
        max_terms: policy.max_terms(),
    })
}

/// Continued fraction for `e^x E₁(x)`, `x > 1`.
fn e1_fraction<T: Real>(x: T) -> Result<T> {
    let policy = SeriesEvalPolicy::<T>::default();
    let tiny = T::min_positive_value() / T::epsilon();
    let mut b = x + T::one();
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..policy.max_terms() {
        let i = lit::<T>(i as f64);
        let an = -i * i;
        b = b + lit(2.0);
        d = T::one() / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h = h * del;
        if (del - T::one()).abs() < policy.rel_tol() {
            return Ok(h);
        }
    }
    Err(Error::SeriesNotConverged {
        what: "E1 continued fraction",
        max_terms: policy.max_terms(),
    })
}
