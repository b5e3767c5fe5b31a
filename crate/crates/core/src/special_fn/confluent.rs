//! `₁F₁(1/2; 1; −2x)`, the Lévy-density factor of the Bessel random-walk
//! family.

use crate::error::{Error, Result};
use crate::real::{lit, Real};

use super::SeriesEvalPolicy;

const SERIES_LIMIT: f64 = 20.0;
const ASYMPTOTIC_LIMIT: f64 = 1000.0;
const MAX_NODES: usize = 1 << 24;

/// `₁F₁(1/2; 1; −2x)` for `x ≥ 0`; series up to `x = 20`, integral form up to
/// `x = 1000`, asymptotic expansion above.
pub fn confluent_half<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::invalid("confluent_half needs x >= 0"));
    }
    if x <= lit(SERIES_LIMIT) {
        confluent_half_series(x)
    } else if x <= lit(ASYMPTOTIC_LIMIT) {
        confluent_half_integral(x)
    } else {
        confluent_half_asymptotic(x)
    }
}

/// `(2πx)^{−1/2} Σ ((1/2)_n)² / (n! (2x)^n)`, summed to its smallest term.
fn confluent_half_asymptotic<T: Real>(x: T) -> Result<T> {
    let policy = SeriesEvalPolicy::<T>::default();
    let z = x + x;
    let half = lit::<T>(0.5);
    let mut term = T::one();
    let mut sum = T::one();
    for n in 0..policy.max_terms() {
        let nf = lit::<T>(n as f64);
        let next = term * (half + nf) * (half + nf) / ((nf + T::one()) * z);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum = sum + term;
        if term.abs() <= policy.rel_tol() * sum {
            break;
        }
    }
    Ok(sum / (T::PI() * z).sqrt())
}

/// Series path: Kummer's transformation `₁F₁(a; b; z) = e^z ₁F₁(b−a; b; −z)`
/// turns the alternating series into `e^{−2x} Σ (1/2)_n (2x)^n / (n!)²`, with
/// `(a)_{n+1} = (a+n)(a)_n`.
pub fn confluent_half_series<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::invalid("confluent_half needs x >= 0"));
    }
    let policy = SeriesEvalPolicy::<T>::default();
    let z = x + x;
    let half = lit::<T>(0.5);
    let mut term = T::one();
    let mut sum = T::one();
    for n in 0..policy.max_terms() {
        let nf = lit::<T>(n as f64);
        let next = nf + T::one();
        term = term * (half + nf) * z / (next * next);
        sum = sum + term;
        if nf > z && term <= policy.rel_tol() * sum {
            return Ok(sum * (-z).exp());
        }
    }
    Err(Error::SeriesNotConverged {
        what: "confluent 1F1(1/2;1;-2x) series",
        max_terms: policy.max_terms(),
    })
}

/// Integral path: `(1/π) ∫_0^1 e^{−2xt} / √(t(1−t)) dt` by Gauss–Chebyshev
/// quadrature, which absorbs both endpoint singularities. With
/// `t = (1 + cos φ)/2` the integrand becomes `exp(−2x cos²(φ/2))`; nodes are
/// doubled until successive sums agree.
pub fn confluent_half_integral<T: Real>(x: T) -> Result<T> {
    if !(x >= T::zero()) {
        return Err(Error::invalid("confluent_half needs x >= 0"));
    }
    let tol = SeriesEvalPolicy::<T>::default().rel_tol() * lit(4.0);
    let mut nodes = 64usize;
    let mut previous = chebyshev_sum(x, nodes);
    while nodes < MAX_NODES {
        nodes *= 2;
        let current = chebyshev_sum(x, nodes);
        if (current - previous).abs() <= tol * current.abs() {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::SeriesNotConverged {
        what: "confluent 1F1(1/2;1;-2x) Gauss-Chebyshev sum",
        max_terms: MAX_NODES,
    })
}

fn chebyshev_sum<T: Real>(x: T, nodes: usize) -> T {
    let n = lit::<T>(nodes as f64);
    let two_x = x + x;
    let mut sum = T::zero();
    for k in 1..=nodes {
        let phi = lit::<T>((2 * k - 1) as f64) * T::PI() / (lit::<T>(2.0) * n);
        let c = (phi * lit(0.5)).cos();
        sum = sum + (-two_x * c * c).exp();
    }
    sum / n
}
