use crate::error::{Error, Result};
use crate::real::{lit, Real};

use super::SeriesEvalPolicy;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Γ(x)|` by the Lanczos approximation (g = 7), with reflection below 1/2.
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x < lit(0.5) {
        let pi = T::PI();
        let s = (pi * x).sin().abs();
        return (pi / s).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut a = lit::<T>(LANCZOS[0]);
    let t = x + lit(LANCZOS_G + 0.5);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + lit::<T>(c) / (x + lit(i as f64));
    }
    lit::<T>(0.5) * (lit::<T>(2.0) * T::PI()).ln() + (x + lit(0.5)) * t.ln() - t + a.ln()
}

/// `Γ(x)` for `x > 0`.
pub fn gamma<T: Real>(x: T) -> T {
    ln_gamma(x).exp()
}

/// Regularized lower incomplete gamma `P(s, x) = γ(s, x)/Γ(s)`.
///
/// Series below `x = s + 1`, Lentz continued fraction for the complement above.
pub fn reg_lower_incomplete_gamma<T: Real>(s: T, x: T) -> Result<T> {
    check(s, x)?;
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(T::one());
    }
    if x < s + T::one() {
        lower_series(s, x)
    } else {
        Ok(T::one() - upper_fraction(s, x)?)
    }
}

/// Regularized upper incomplete gamma `Q(s, x) = 1 − P(s, x)`.
pub fn reg_upper_incomplete_gamma<T: Real>(s: T, x: T) -> Result<T> {
    check(s, x)?;
    if x == T::zero() {
        return Ok(T::one());
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    if x < s + T::one() {
        Ok(T::one() - lower_series(s, x)?)
    } else {
        upper_fraction(s, x)
    }
}

/// `P(s, x)` given `ln x`; stays accurate when `x` itself underflows.
pub fn reg_lower_incomplete_gamma_ln_x<T: Real>(s: T, ln_x: T) -> Result<T> {
    if ln_x > lit(-600.0) {
        return reg_lower_incomplete_gamma(s, ln_x.exp());
    }
    if !(s > T::zero()) {
        return Err(Error::invalid("incomplete gamma needs s > 0"));
    }
    // x is negligible next to 1: P(s, x) = x^s / Γ(s + 1) · (1 + O(x))
    Ok((s * ln_x - ln_gamma(s + T::one())).exp())
}

fn check<T: Real>(s: T, x: T) -> Result<()> {
    if !(s > T::zero()) {
        return Err(Error::invalid("incomplete gamma needs s > 0"));
    }
    if !(x >= T::zero()) {
        return Err(Error::invalid("incomplete gamma needs x >= 0"));
    }
    Ok(())
}

fn prefactor<T: Real>(s: T, x: T) -> T {
    (s * x.ln() - x - ln_gamma(s)).exp()
}

fn lower_series<T: Real>(s: T, x: T) -> Result<T> {
    let policy = SeriesEvalPolicy::<T>::default();
    let mut ap = s;
    let mut del = T::one() / s;
    let mut sum = del;
    for _ in 0..policy.max_terms() {
        ap = ap + T::one();
        del = del * x / ap;
        sum = sum + del;
        if del.abs() < sum.abs() * policy.rel_tol() {
            return Ok((sum * prefactor(s, x)).min(T::one()));
        }
    }
    Err(Error::SeriesNotConverged {
        what: "lower incomplete gamma series",
        max_terms: policy.max_terms(),
    })
}

fn upper_fraction<T: Real>(s: T, x: T) -> Result<T> {
    let policy = SeriesEvalPolicy::<T>::default();
    let tiny = T::min_positive_value() / T::epsilon();
    let mut b = x + T::one() - s;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..policy.max_terms() {
        let i = lit::<T>(i as f64);
        let an = -i * (i - s);
        b = b + lit(2.0);
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let del = d * c;
        h = h * del;
        if (del - T::one()).abs() < policy.rel_tol() {
            return Ok((prefactor(s, x) * h).max(T::zero()));
        }
    }
    Err(Error::SeriesNotConverged {
        what: "upper incomplete gamma continued fraction",
        max_terms: policy.max_terms(),
    })
}
