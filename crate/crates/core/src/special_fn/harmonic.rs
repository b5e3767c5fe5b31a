use crate::real::{lit, Real};

const DIRECT_LIMIT: u64 = 256;

/// `H_n = Σ_{k=1}^n 1/k`; direct sum for small `n`, Euler–Maclaurin above.
pub fn harmonic_number<T: Real>(n: u64) -> T {
    if n <= DIRECT_LIMIT {
        // summed smallest-first
        return (1..=n).rev().fold(T::zero(), |s, k| s + T::one() / lit(k as f64));
    }
    harmonic_asymptotic(lit(n as f64))
}

/// `H_⌊n⌋` for a real `n ≥ 0`, valid past the range of `u64`.
pub fn harmonic_number_real<T: Real>(n: T) -> T {
    let n = n.floor();
    if n < T::one() {
        return T::zero();
    }
    if n <= lit(DIRECT_LIMIT as f64) {
        return harmonic_number(n.to_u64().unwrap_or(0));
    }
    harmonic_asymptotic(n)
}

fn harmonic_asymptotic<T: Real>(n: T) -> T {
    let inv = T::one() / n;
    let inv2 = inv * inv;
    n.ln() + T::euler_gamma() + lit::<T>(0.5) * inv
        - inv2 * (lit::<T>(1.0 / 12.0) - inv2 * (lit::<T>(1.0 / 120.0) - inv2 * lit::<T>(1.0 / 252.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_values() {
        assert_eq!(harmonic_number::<f64>(0), 0.0);
        assert_eq!(harmonic_number::<f64>(1), 1.0);
        assert_relative_eq!(harmonic_number::<f64>(6), 2.45, max_relative = 1e-15);
    }

    #[test]
    fn asymptotic_joins_direct_sum() {
        let direct: f64 = (1..=1000u64).rev().map(|k| 1.0 / k as f64).sum();
        assert_relative_eq!(harmonic_number::<f64>(1000), direct, max_relative = 1e-15);
        assert_relative_eq!(harmonic_number_real(1000.7f64), direct, max_relative = 1e-15);
        assert_relative_eq!(harmonic_number_real(1e30f64), 1e30f64.ln() + 0.577_215_664_901_532_9, max_relative = 1e-15);
    }
}
