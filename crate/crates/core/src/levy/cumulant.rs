use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::{lit, Real};

use super::cumulant_from_tail;
use super::tail::TailFunction;

type CumulantFn<T> = Arc<dyn Fn(T) -> Result<T> + Send + Sync>;

/// How a [`CumulantFunction`] is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CumulantMethod {
    ClosedForm,
    QuadratureFromTail,
    Series,
}

impl CumulantMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CumulantMethod::ClosedForm => "closed-form",
            CumulantMethod::QuadratureFromTail => "quadrature-from-tail",
            CumulantMethod::Series => "series",
        }
    }
}

/// Value below which `k(10^12)` must fall for the cumulant to count as
/// unbounded below.
pub const UNBOUNDED_THRESHOLD: f64 = -2.0;

/// Cumulant `k(θ) = −∫ (1 − e^{−θx}) ν(dx)`, `θ ≥ 0`.
#[derive(Clone)]
pub struct CumulantFunction<T: Real> {
    eval: CumulantFn<T>,
    /// `ln θ ↦ k(θ)`, valid for every `ln θ`
    ln_eval: Option<CumulantFn<T>>,
    method: CumulantMethod,
}

impl<T: Real> fmt::Debug for CumulantFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CumulantFunction")
            .field("method", &self.method)
            .field("log_argument_form", &self.ln_eval.is_some())
            .finish()
    }
}

impl<T: Real> CumulantFunction<T> {
    /// Closed form `k`, optionally with a form in `ln θ` valid past overflow.
    pub fn closed_form<K>(k: K) -> Self
    where
        K: Fn(T) -> T + Send + Sync + 'static,
    {
        CumulantFunction {
            eval: Arc::new(move |theta| Ok(k(theta))),
            ln_eval: None,
            method: CumulantMethod::ClosedForm,
        }
    }

    pub fn with_log_form<K>(mut self, k_of_ln: K) -> Self
    where
        K: Fn(T) -> Result<T> + Send + Sync + 'static,
    {
        self.ln_eval = Some(Arc::new(k_of_ln));
        self
    }

    /// `k` through `−θ ∫ e^{−θx} G(x) dx`; atomic tails are summed directly.
    pub fn from_tail(tail: TailFunction<T>) -> Self {
        let method = if tail.is_atomic() {
            CumulantMethod::Series
        } else {
            CumulantMethod::QuadratureFromTail
        };
        let ln_eval: Option<CumulantFn<T>> = match &tail.eval {
            super::tail::TailEval::Atomic(src) => {
                let src = src.clone();
                Some(Arc::new(move |ln_theta| src.cumulant_ln(ln_theta)))
            }
            _ => None,
        };
        CumulantFunction {
            eval: Arc::new(move |theta| cumulant_from_tail(&tail, theta)),
            ln_eval,
            method,
        }
    }

    pub fn method(&self) -> CumulantMethod {
        self.method
    }

    pub fn has_log_form(&self) -> bool {
        self.ln_eval.is_some()
    }

    /// `k(θ)`; exactly `0` at `θ = 0`.
    pub fn eval(&self, theta: T) -> Result<T> {
        if !(theta >= T::zero()) || theta.is_infinite() {
            return Err(Error::invalid(format!("cumulant needs finite theta >= 0, got {theta}")));
        }
        if theta == T::zero() {
            return Ok(T::zero());
        }
        (self.eval)(theta)
    }

    /// `k(e^{ln θ})`, or `None` when `θ` overflows and no log form exists.
    pub fn eval_ln(&self, ln_theta: T) -> Result<Option<T>> {
        if ln_theta.is_nan() {
            return Err(Error::invalid("cumulant needs a finite ln theta"));
        }
        if ln_theta == T::neg_infinity() {
            return Ok(Some(T::zero()));
        }
        if let Some(f) = &self.ln_eval {
            return f(ln_theta).map(Some);
        }
        if ln_theta < T::max_ln() - lit(1.0) {
            return self.eval(ln_theta.exp()).map(Some);
        }
        Ok(None)
    }

    /// `c·k`.
    pub fn scaled(&self, c: T) -> Self {
        let eval = self.eval.clone();
        let ln_eval = self.ln_eval.clone();
        CumulantFunction {
            eval: Arc::new(move |theta| Ok(c * eval(theta)?)),
            ln_eval: ln_eval.map(|f| -> CumulantFn<T> { Arc::new(move |l| Ok(c * f(l)?)) }),
            method: self.method,
        }
    }

    /// Checks on `θ = 2^j`, `j = 0..=30`, that `k` is non-increasing and
    /// convex (chord slopes non-decreasing), and that `k(10^12)` lies below
    /// [`UNBOUNDED_THRESHOLD`].
    pub fn check_shape(&self) -> Result<()> {
        let grid: Vec<T> = (0..=30).map(|j| lit(2f64.powi(j))).collect();
        let values = grid.iter().map(|&th| self.eval(th)).collect::<Result<Vec<T>>>()?;
        let slack = lit::<T>(1e-12);
        for (j, w) in values.windows(2).enumerate() {
            if w[1] > w[0] + slack * w[0].abs().max(T::one()) {
                return Err(Error::InvalidMeasure(format!("k increases between 2^{j} and 2^{}", j + 1)));
            }
        }
        let slopes: Vec<T> = values
            .windows(2)
            .zip(grid.windows(2))
            .map(|(v, th)| (v[1] - v[0]) / (th[1] - th[0]))
            .collect();
        for (j, m) in slopes.windows(2).enumerate() {
            if m[1] < m[0] - lit::<T>(1e-9) * m[0].abs() {
                return Err(Error::InvalidMeasure(format!("k is not convex around 2^{}", j + 1)));
            }
        }
        let far = self.eval(lit(1e12))?;
        if !(far < lit(UNBOUNDED_THRESHOLD)) {
            return Err(Error::InvalidMeasure(format!(
                "k(1e12) = {far} is not below {UNBOUNDED_THRESHOLD}"
            )));
        }
        Ok(())
    }
}
