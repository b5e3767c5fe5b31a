//! Purely atomic Lévy measures.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::{lit, Real};
use crate::special_fn::{ein, exp_integral_e1, harmonic_number_real};

/// Most atoms an explicit rule may enumerate.
pub const ATOM_CAP: usize = 10_000_000;

/// A Lévy measure concentrated on countably many atoms.
///
/// Implementations may summarise far-out atoms (those accumulating at `0`)
/// by a continuum `c·e^{−θ₀x} dx/x` on `(0, edge)`; see [`AtomSource::remainder`].
pub trait AtomSource<T: Real>: Debug + Send + Sync {
    /// `ν((x, ∞))`.
    fn tail(&self, x: T) -> Result<T>;

    /// `−Σ_{loc > ε} mass·(1 − e^{−θ·loc})`; `ε = 0` gives the full cumulant.
    fn partial_cumulant(&self, theta: T, eps: T) -> Result<T>;

    /// `k(θ)` given `ln θ`, for `θ` beyond the scalar range.
    fn cumulant_ln(&self, ln_theta: T) -> Result<T>;

    /// Atoms carried explicitly, as `(location, mass)`.
    fn explicit_atoms(&self) -> Vec<(T, T)>;

    /// Continuum standing in for the atoms beyond the explicit ones.
    fn remainder(&self) -> Option<Remainder<T>>;

    fn tilted(&self, theta0: T) -> Arc<dyn AtomSource<T>>;

    fn scaled(&self, c: T) -> Arc<dyn AtomSource<T>>;

    /// `∫ min(1, x) ν(dx)`.
    fn capped_mean(&self) -> T {
        let atoms = self
            .explicit_atoms()
            .iter()
            .rev()
            .fold(T::zero(), |s, &(l, m)| s + m * l.min(T::one()));
        let rest = match self.remainder() {
            // ∫_0^a c e^{−θx} dx
            Some(r) if r.tilt > T::zero() => r.coefficient * (-(-r.tilt * r.edge).exp_m1()) / r.tilt,
            Some(r) => r.coefficient * r.edge,
            None => T::zero(),
        };
        atoms + rest
    }
}

/// The measure `coefficient · e^{−tilt·x} dx/x` on `(0, edge)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Remainder<T> {
    pub edge: T,
    pub coefficient: T,
    pub tilt: T,
}

/// `ν = c Σ_{n≥1} e^{−θ₀/n} (1/n) δ_{1/n}`, the Lévy measure of `Σ X_n/n` with
/// independent `X_n ~ Poisson(1/n)`.
///
/// Atoms `n ≤ direct_terms` are summed exactly; the rest are replaced by the
/// midpoint continuum `c e^{−θ₀x} dx/x` on `(0, 1/(N + 1/2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicAtoms<T> {
    direct_terms: usize,
    scale: T,
    tilt: T,
}

impl<T: Real> HarmonicAtoms<T> {
    pub const DEFAULT_TERMS: usize = 1_000_000;

    pub fn new(direct_terms: usize) -> Result<Self> {
        if direct_terms == 0 {
            return Err(Error::invalid("harmonic atoms need at least one direct term"));
        }
        if direct_terms > ATOM_CAP {
            return Err(Error::TruncationCap {
                required: direct_terms,
                cap: ATOM_CAP,
            });
        }
        Ok(HarmonicAtoms {
            direct_terms,
            scale: T::one(),
            tilt: T::zero(),
        })
    }

    pub fn direct_terms(&self) -> usize {
        self.direct_terms
    }

    fn edge(&self) -> T {
        T::one() / (lit::<T>(self.direct_terms as f64) + lit(0.5))
    }

    fn mass(&self, n: usize) -> T {
        let nf = lit::<T>(n as f64);
        let base = T::one() / nf;
        if self.tilt == T::zero() {
            self.scale * base
        } else {
            self.scale * base * (-self.tilt / nf).exp()
        }
    }

    /// Number of atoms at locations strictly above `x`, as a real.
    fn count_above(x: T) -> T {
        (T::one() / x).ceil() - T::one()
    }

    /// `∫_b^a (e^{−θ₀x} − e^{−(θ₀+θ)x}) dx/x` for `0 ≤ b ≤ a`.
    fn continuum_cumulant(&self, theta: T, a: T, b: T) -> Result<T> {
        let hi = self.tilt + theta;
        let upper = ein(hi * a)? - ein(self.tilt * a)?;
        let lower = if b == T::zero() {
            T::zero()
        } else {
            ein(hi * b)? - ein(self.tilt * b)?
        };
        Ok(upper - lower)
    }
}

impl<T: Real> AtomSource<T> for HarmonicAtoms<T> {
    fn tail(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(Error::invalid("tail needs x > 0"));
        }
        let m = Self::count_above(x);
        if m < T::one() {
            return Ok(T::zero());
        }
        if self.tilt == T::zero() {
            return Ok(self.scale * harmonic_number_real(m));
        }
        let n_direct = lit::<T>(self.direct_terms as f64);
        let upto = m.min(n_direct).to_usize().unwrap_or(self.direct_terms);
        let mut sum = T::zero();
        for n in (1..=upto).rev() {
            sum = sum + self.mass(n);
        }
        if m > n_direct {
            // Σ_{N<n≤M} e^{−θ₀/n}/n ≈ ∫_{N+½}^{M+½} e^{−θ₀/y} dy/y
            let lo = self.tilt / (m + lit(0.5));
            let hi = self.tilt / (n_direct + lit(0.5));
            sum = sum + self.scale * (exp_integral_e1(lo)? - exp_integral_e1(hi)?);
        }
        Ok(sum)
    }

    fn partial_cumulant(&self, theta: T, eps: T) -> Result<T> {
        if !(theta >= T::zero()) || !(eps >= T::zero()) {
            return Err(Error::invalid("partial cumulant needs theta >= 0 and eps >= 0"));
        }
        if theta == T::zero() {
            return Ok(T::zero());
        }
        let m = if eps == T::zero() {
            T::infinity()
        } else {
            Self::count_above(eps)
        };
        let n_direct = lit::<T>(self.direct_terms as f64);
        let upto = if m < n_direct {
            m.to_usize().unwrap_or(0)
        } else {
            self.direct_terms
        };
        let mut sum = T::zero();
        for n in (1..=upto).rev() {
            let nf = lit::<T>(n as f64);
            sum = sum + self.mass(n) * (-(-theta / nf).exp_m1());
        }
        if m > n_direct {
            let b = if m.is_infinite() {
                T::zero()
            } else {
                T::one() / (m + lit(0.5))
            };
            sum = sum + self.scale * self.continuum_cumulant(theta, self.edge(), b)?;
        }
        Ok(-sum)
    }

    fn cumulant_ln(&self, ln_theta: T) -> Result<T> {
        if ln_theta < T::max_ln() - lit(2.0) {
            return self.partial_cumulant(ln_theta.exp(), T::zero());
        }
        // every e^{−θ/n} with n ≤ N has underflowed
        let mut weights = T::zero();
        for n in (1..=self.direct_terms).rev() {
            weights = weights + self.mass(n);
        }
        let edge = self.edge();
        // Ein(z) = ln z + γ + E₁(z) with E₁(z) = 0 at this size
        let ein_hi = ln_theta + edge.ln() + T::euler_gamma();
        let continuum = ein_hi - ein(self.tilt * edge)?;
        Ok(-(weights + self.scale * continuum))
    }

    fn explicit_atoms(&self) -> Vec<(T, T)> {
        (1..=self.direct_terms)
            .map(|n| (T::one() / lit(n as f64), self.mass(n)))
            .collect()
    }

    fn remainder(&self) -> Option<Remainder<T>> {
        Some(Remainder {
            edge: self.edge(),
            coefficient: self.scale,
            tilt: self.tilt,
        })
    }

    fn tilted(&self, theta0: T) -> Arc<dyn AtomSource<T>> {
        Arc::new(HarmonicAtoms {
            tilt: self.tilt + theta0,
            ..*self
        })
    }

    fn scaled(&self, c: T) -> Arc<dyn AtomSource<T>> {
        Arc::new(HarmonicAtoms {
            scale: self.scale * c,
            ..*self
        })
    }
}

/// A finite list of atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAtoms<T> {
    /// sorted by decreasing location
    atoms: Vec<(T, T)>,
    /// `cumulative[i]` = total mass of `atoms[..i]`
    cumulative: Vec<T>,
}

impl<T: Real> FiniteAtoms<T> {
    pub fn new(mut atoms: Vec<(T, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("atom list is empty".into()));
        }
        if atoms.len() > ATOM_CAP {
            return Err(Error::TruncationCap {
                required: atoms.len(),
                cap: ATOM_CAP,
            });
        }
        for &(loc, mass) in &atoms {
            if !(loc > T::zero() && loc.is_finite()) || !(mass > T::zero() && mass.is_finite()) {
                return Err(Error::InvalidMeasure(format!(
                    "atom ({}, {}) needs positive finite location and mass",
                    loc, mass
                )));
            }
        }
        atoms.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite locations"));
        let mut cumulative = Vec::with_capacity(atoms.len() + 1);
        cumulative.push(T::zero());
        let mut acc = T::zero();
        for &(_, m) in &atoms {
            acc = acc + m;
            cumulative.push(acc);
        }
        Ok(FiniteAtoms { atoms, cumulative })
    }

    /// Atoms from index rules `n ↦ location(n)`, `n ↦ mass(n)` for `n = 1..=count`.
    pub fn from_rule<L, M>(count: usize, location: L, mass: M) -> Result<Self>
    where
        L: Fn(usize) -> T,
        M: Fn(usize) -> T,
    {
        if count > ATOM_CAP {
            return Err(Error::TruncationCap {
                required: count,
                cap: ATOM_CAP,
            });
        }
        Self::new((1..=count).map(|n| (location(n), mass(n))).collect())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn above(&self, x: T) -> usize {
        self.atoms.partition_point(|&(loc, _)| loc > x)
    }

    fn mapped(&self, f: impl Fn(T, T) -> T) -> Self {
        let atoms = self.atoms.iter().map(|&(l, m)| (l, f(l, m))).collect();
        // masses stay positive and finite under tilting and positive scaling
        FiniteAtoms::new(atoms).expect("mapped atoms remain valid")
    }
}

impl<T: Real> AtomSource<T> for FiniteAtoms<T> {
    fn tail(&self, x: T) -> Result<T> {
        if !(x > T::zero()) {
            return Err(Error::invalid("tail needs x > 0"));
        }
        Ok(self.cumulative[self.above(x)])
    }

    fn partial_cumulant(&self, theta: T, eps: T) -> Result<T> {
        if !(theta >= T::zero()) || !(eps >= T::zero()) {
            return Err(Error::invalid("partial cumulant needs theta >= 0 and eps >= 0"));
        }
        let upto = if eps == T::zero() { self.atoms.len() } else { self.above(eps) };
        let sum = self.atoms[..upto]
            .iter()
            .rev()
            .fold(T::zero(), |s, &(l, m)| s - m * (-theta * l).exp_m1());
        Ok(-sum)
    }

    fn cumulant_ln(&self, ln_theta: T) -> Result<T> {
        let sum = self.atoms.iter().rev().fold(T::zero(), |s, &(l, m)| {
            let z = (ln_theta + l.ln()).exp();
            s - m * (-z).exp_m1()
        });
        Ok(-sum)
    }

    fn explicit_atoms(&self) -> Vec<(T, T)> {
        self.atoms.clone()
    }

    fn remainder(&self) -> Option<Remainder<T>> {
        None
    }

    fn tilted(&self, theta0: T) -> Arc<dyn AtomSource<T>> {
        Arc::new(self.mapped(|l, m| m * (-theta0 * l).exp()))
    }

    fn scaled(&self, c: T) -> Arc<dyn AtomSource<T>> {
        Arc::new(self.mapped(|_, m| m * c))
    }
}
