use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::{lit, Real};

use super::atoms::AtomSource;
use super::measure::{LevyMeasure, Repr};
use super::tail_from_measure;

type TailFn<T> = Arc<dyn Fn(T) -> Result<T> + Send + Sync>;

/// Lévy tail `G(x) = ν((x, ∞))`, optionally with an analytically known
/// slow-log index.
#[derive(Clone)]
pub struct TailFunction<T: Real> {
    pub(crate) eval: TailEval<T>,
    known_index: Option<T>,
}

#[derive(Clone)]
pub(crate) enum TailEval<T: Real> {
    Function(TailFn<T>),
    Atomic(Arc<dyn AtomSource<T>>),
}

impl<T: Real> fmt::Debug for TailFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.eval {
            TailEval::Function(_) => "function",
            TailEval::Atomic(_) => "atomic",
        };
        f.debug_struct("TailFunction")
            .field("kind", &kind)
            .field("known_index", &self.known_index)
            .finish()
    }
}

impl<T: Real> TailFunction<T> {
    /// Tail from a closed form.
    pub fn new<F>(g: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        Self::from_fallible(move |x| Ok(g(x)))
    }

    pub fn from_fallible<F>(g: F) -> Self
    where
        F: Fn(T) -> Result<T> + Send + Sync + 'static,
    {
        TailFunction {
            eval: TailEval::Function(Arc::new(g)),
            known_index: None,
        }
    }

    /// `x ↦ ν((x, ∞))`: exact sums for atoms, quadrature for densities.
    pub fn from_measure(nu: &LevyMeasure<T>) -> Self {
        match &nu.repr {
            Repr::Atoms(src) => TailFunction {
                eval: TailEval::Atomic(src.clone()),
                known_index: None,
            },
            Repr::Tail(g) => g.clone(),
            Repr::Density { .. } => {
                let nu = nu.clone();
                Self::from_fallible(move |x| tail_from_measure(&nu, x))
            }
        }
    }

    pub fn with_known_index(mut self, ell: T) -> Self {
        self.known_index = Some(ell);
        self
    }

    pub fn known_index(&self) -> Option<T> {
        self.known_index
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.eval, TailEval::Atomic(_))
    }

    pub fn eval(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(Error::invalid("tail needs x > 0"));
        }
        match &self.eval {
            TailEval::Function(g) => g(x),
            TailEval::Atomic(src) => src.tail(x),
        }
    }

    /// `c·G`, with the known index scaled alike.
    pub fn scaled(&self, c: T) -> Self {
        let eval = match &self.eval {
            TailEval::Function(g) => {
                let g = g.clone();
                TailEval::Function(Arc::new(move |x| Ok(c * g(x)?)))
            }
            TailEval::Atomic(src) => TailEval::Atomic(src.scaled(c)),
        };
        TailFunction {
            eval,
            known_index: self.known_index.map(|l| l * c),
        }
    }

    /// Checks `G ≥ 0`, non-increasing and vanishing at infinity on the
    /// points `2^j`, `j = −30..=40`.
    pub fn check_invariants(&self) -> Result<()> {
        let mut previous: Option<(T, T)> = None;
        let mut at_one = T::zero();
        for j in -30..=40 {
            let x = lit::<T>(2f64.powi(j));
            let g = self.eval(x)?;
            if !(g >= T::zero()) || g.is_infinite() {
                return Err(Error::InvalidMeasure(format!("G({x}) = {g} is not a finite non-negative value")));
            }
            if let Some((px, pg)) = previous {
                let slack = lit::<T>(1e-9) * pg.abs() + lit(1e-14);
                if g > pg + slack {
                    return Err(Error::InvalidMeasure(format!(
                        "G increases between {px} and {x}: {pg} -> {g}"
                    )));
                }
            }
            if j == 0 {
                at_one = g;
            }
            previous = Some((x, g));
        }
        let (_, last) = previous.expect("grid is non-empty");
        if last > lit::<T>(1e-4) * at_one.max(T::one()) {
            return Err(Error::InvalidMeasure(format!("G(2^40) = {last} does not vanish")));
        }
        Ok(())
    }
}
