use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::{log_from_zero, log_range, log_upward, QuadConfig};
use crate::real::{lit, Real};

use super::atoms::AtomSource;
use super::tail::TailFunction;

/// Lévy density `x ↦ ν(dx)/dx`.
pub type DensityFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Construction-time checks on a Lévy measure.
#[derive(Debug, Clone, Copy)]
pub struct MeasureChecks<T> {
    /// Upper bound accepted for `∫ min(1, x) ν(dx)`.
    pub integrability_bound: T,
    /// Required gap `G(2^{−30}) − G(2^{−10})`.
    pub unbounded_margin: T,
}

impl<T: Real> Default for MeasureChecks<T> {
    fn default() -> Self {
        MeasureChecks {
            integrability_bound: lit(1e12),
            unbounded_margin: T::one(),
        }
    }
}

/// Lévy measure of a pure-jump subordinator on `(0, ∞)`.
#[derive(Clone)]
pub struct LevyMeasure<T: Real> {
    pub(crate) repr: Repr<T>,
}

#[derive(Clone)]
pub(crate) enum Repr<T: Real> {
    /// `scale · e^{−tilt·x} · f(x)` on `support`
    Density {
        f: DensityFn<T>,
        scale: T,
        tilt: T,
        support: (T, T),
    },
    Atoms(Arc<dyn AtomSource<T>>),
    Tail(TailFunction<T>),
}

impl<T: Real> fmt::Debug for LevyMeasure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Density {
                scale, tilt, support, ..
            } => f
                .debug_struct("LevyMeasure::Density")
                .field("scale", scale)
                .field("tilt", tilt)
                .field("support", support)
                .finish(),
            Repr::Atoms(src) => f.debug_tuple("LevyMeasure::Atoms").field(src).finish(),
            Repr::Tail(g) => f.debug_tuple("LevyMeasure::Tail").field(g).finish(),
        }
    }
}

impl<T: Real> LevyMeasure<T> {
    /// Measure with density `f` on `support = (lo, hi)`, `0 ≤ lo < hi ≤ ∞`.
    pub fn from_density<F>(f: F, support: (T, T)) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        Self::from_density_checked(f, support, &MeasureChecks::default())
    }

    pub fn from_density_checked<F>(f: F, support: (T, T), checks: &MeasureChecks<T>) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        let (lo, hi) = support;
        if !(lo >= T::zero() && hi > lo) {
            return Err(Error::InvalidMeasure(format!(
                "support ({lo}, {hi}) must satisfy 0 <= lo < hi"
            )));
        }
        if lo > lit(1e-9) {
            return Err(Error::InvalidMeasure(format!(
                "support starts at {lo}; an unbounded measure needs mass accumulating at 0"
            )));
        }
        let nu = LevyMeasure {
            repr: Repr::Density {
                f: Arc::new(f),
                scale: T::one(),
                tilt: T::zero(),
                support,
            },
        };
        nu.validate(checks)?;
        Ok(nu)
    }

    /// Purely atomic measure.
    pub fn from_atoms(source: Arc<dyn AtomSource<T>>) -> Result<Self> {
        Self::from_atoms_checked(source, &MeasureChecks::default())
    }

    pub fn from_atoms_checked(source: Arc<dyn AtomSource<T>>, checks: &MeasureChecks<T>) -> Result<Self> {
        let nu = LevyMeasure {
            repr: Repr::Atoms(source),
        };
        nu.validate(checks)?;
        Ok(nu)
    }

    /// Measure known only through its tail `G`.
    pub fn from_tail(tail: TailFunction<T>) -> Result<Self> {
        Self::from_tail_checked(tail, &MeasureChecks::default())
    }

    pub fn from_tail_checked(tail: TailFunction<T>, checks: &MeasureChecks<T>) -> Result<Self> {
        let nu = LevyMeasure {
            repr: Repr::Tail(tail),
        };
        nu.validate(checks)?;
        Ok(nu)
    }

    pub(crate) fn density_unchecked(f: DensityFn<T>, support: (T, T)) -> Self {
        LevyMeasure {
            repr: Repr::Density {
                f,
                scale: T::one(),
                tilt: T::zero(),
                support,
            },
        }
    }

    pub(crate) fn atoms_unchecked(source: Arc<dyn AtomSource<T>>) -> Self {
        LevyMeasure {
            repr: Repr::Atoms(source),
        }
    }

    /// Density at `x`, or `None` for measures without one.
    pub fn density(&self, x: T) -> Option<T> {
        match &self.repr {
            Repr::Density {
                f,
                scale,
                tilt,
                support,
            } => {
                if x <= support.0 || x >= support.1 {
                    return Some(T::zero());
                }
                let base = f(x);
                if base == T::zero() {
                    return Some(T::zero());
                }
                let damp = if *tilt == T::zero() { T::one() } else { (-*tilt * x).exp() };
                Some(*scale * damp * base)
            }
            _ => None,
        }
    }

    pub fn has_density(&self) -> bool {
        matches!(self.repr, Repr::Density { .. })
    }

    /// Atom source for purely atomic measures.
    pub fn atoms(&self) -> Option<&Arc<dyn AtomSource<T>>> {
        match &self.repr {
            Repr::Atoms(src) => Some(src),
            _ => None,
        }
    }

    pub fn support(&self) -> (T, T) {
        match &self.repr {
            Repr::Density { support, .. } => *support,
            _ => (T::zero(), T::infinity()),
        }
    }

    /// `c·ν`; no revalidation since scaling preserves both checks qualitatively.
    pub fn scaled(&self, c: T) -> Result<Self> {
        if !(c > T::zero() && c.is_finite()) {
            return Err(Error::invalid("scale factor must be positive and finite"));
        }
        let repr = match &self.repr {
            Repr::Density {
                f,
                scale,
                tilt,
                support,
            } => Repr::Density {
                f: f.clone(),
                scale: *scale * c,
                tilt: *tilt,
                support: *support,
            },
            Repr::Atoms(src) => Repr::Atoms(src.scaled(c)),
            Repr::Tail(g) => Repr::Tail(g.scaled(c)),
        };
        Ok(LevyMeasure { repr })
    }

    /// `e^{−θ₀x} ν(dx)`.
    pub(crate) fn tilted(&self, theta0: T) -> Result<Self> {
        let repr = match &self.repr {
            Repr::Density {
                f,
                scale,
                tilt,
                support,
            } => Repr::Density {
                f: f.clone(),
                scale: *scale,
                tilt: *tilt + theta0,
                support: *support,
            },
            Repr::Atoms(src) => Repr::Atoms(src.tilted(theta0)),
            Repr::Tail(g) => Repr::Tail(super::tilted_tail(g, theta0)),
        };
        Ok(LevyMeasure { repr })
    }

    fn validate(&self, checks: &MeasureChecks<T>) -> Result<()> {
        let cfg = QuadConfig::default().with_rel_tol(lit(1e-8));
        let (near, far, gap) = match &self.repr {
            Repr::Density { .. } => {
                let f = |x: T| self.density(x).unwrap_or_else(T::nan);
                let xf = |x: T| x * f(x);
                let near = log_from_zero(&xf, T::one(), &cfg).map_err(integrability)?.value;
                let far = log_upward(&f, T::one(), &cfg).map_err(integrability)?.value;
                let gap = log_range(&f, lit(2f64.powi(-30)), lit(2f64.powi(-10)), &cfg)?.value;
                (near, far, gap)
            }
            Repr::Atoms(src) => {
                let gap = src.tail(lit(2f64.powi(-30)))? - src.tail(lit(2f64.powi(-10)))?;
                (src.capped_mean(), T::zero(), gap)
            }
            Repr::Tail(_) => {
                // ∫_0^1 x ν(dx) = ∫_0^1 (G(x) − G(1)) dx
                let g = TailFunction::from_measure(self);
                let g1 = g.eval(T::one())?;
                let trap = crate::quadrature::Trap::new();
                let h = |x: T| trap.catch(g.eval(x)) - g1;
                let near = trap.finish(log_from_zero(&h, T::one(), &cfg)).map_err(integrability)?.value;
                let gap = g.eval(lit(2f64.powi(-30)))? - g.eval(lit(2f64.powi(-10)))?;
                (near, g1, gap)
            }
        };
        let total = near + far;
        if !(total.is_finite() && total <= checks.integrability_bound) {
            return Err(Error::InvalidMeasure(format!(
                "integral of min(1,x) against the measure is {} (bound {})",
                total, checks.integrability_bound
            )));
        }
        if !(gap >= checks.unbounded_margin) {
            return Err(Error::InvalidMeasure(format!(
                "measure looks bounded: G(2^-30) - G(2^-10) = {} < margin {}",
                gap, checks.unbounded_margin
            )));
        }
        Ok(())
    }
}

fn integrability(e: Error) -> Error {
    Error::InvalidMeasure(format!("integral of min(1,x) against the measure failed: {e}"))
}
