//! Special functions used by the concrete families: log-gamma and the
//! regularized incomplete gamma, the exponential integral, harmonic numbers,
//! modified Bessel `I_ν` of real order, and `₁F₁(1/2; 1; −2x)`.
//!
//! Every series stops on a term-ratio test and treats hitting its term cap as
//! an error.

mod bessel;
mod confluent;
mod expint;
mod gamma;
mod harmonic;

pub use bessel::{bessel_i, bessel_i_scaled, ln_bessel_i, ln_bessel_i_scaled, ln_bessel_i_scaled_of_ln};
pub use confluent::{confluent_half, confluent_half_integral, confluent_half_series};
pub use expint::{ein, exp_integral_e1, exp_integral_e1_scaled};
pub use gamma::{
    gamma, ln_gamma, reg_lower_incomplete_gamma, reg_lower_incomplete_gamma_ln_x,
    reg_upper_incomplete_gamma,
};
pub use harmonic::{harmonic_number, harmonic_number_real};

use crate::error::{Error, Result};
use crate::real::{attainable_tol, lit, Real};

/// Stopping rule shared by the series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEvalPolicy<T> {
    max_terms: usize,
    rel_tol: T,
}

impl<T: Real> SeriesEvalPolicy<T> {
    pub fn new(max_terms: usize, rel_tol: T) -> Result<Self> {
        if max_terms < 50 {
            return Err(Error::invalid("series policy needs max_terms >= 50"));
        }
        if !(rel_tol > T::zero() && rel_tol <= lit(1e-12)) {
            return Err(Error::invalid("series policy needs 0 < rel_tol <= 1e-12"));
        }
        Ok(SeriesEvalPolicy { max_terms, rel_tol })
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// The requested tolerance, raised to what the scalar type can resolve.
    pub fn rel_tol(&self) -> T {
        attainable_tol(self.rel_tol)
    }
}

impl<T: Real> Default for SeriesEvalPolicy<T> {
    fn default() -> Self {
        SeriesEvalPolicy {
            max_terms: 10_000,
            rel_tol: lit(1e-16),
        }
    }
}
