//! The concrete EDM families: gamma, harmonic Poisson sum, Bessel random
//! walk, and families generated by a user-supplied Lévy measure.

mod bessel_cdf;
mod sampler;

pub use bessel_cdf::BesselCdf;
pub use sampler::{sample, sample_ln, sample_ln_streams, sample_streams, EdmSampler, STREAM_CHUNK};

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::levy::{
    estimate_ell, AtomSource, CumulantFunction, CumulantMethod, FiniteAtoms, HarmonicAtoms, LevyMeasure,
    SlowLogIndex, TailFunction,
};
use crate::real::{lit, Real};
use crate::special_fn::{
    confluent_half, exp_integral_e1, ln_bessel_i_scaled, ln_gamma, reg_lower_incomplete_gamma,
};

/// Largest `θ` at which quadrature-backed cumulants are evaluated; beyond it
/// `k(θ) ≈ k(θ_max) − ℓ (ln θ − ln θ_max)`.
pub const THETA_MAX: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Gamma,
    HarmonicPoisson,
    BesselRandomWalk,
    User,
}

/// An infinitely divisible base law `μ` with everything derived from its
/// Lévy measure. The natural-parameter domain is `[0, ∞)` and the Jorgensen
/// set is `(0, ∞)`.
#[derive(Clone)]
pub struct Family<T: Real> {
    kind: FamilyKind,
    name: String,
    scale: T,
    levy: LevyMeasure<T>,
    tail: TailFunction<T>,
    cumulant: CumulantFunction<T>,
    ell: SlowLogIndex<T>,
}

impl<T: Real> fmt::Debug for Family<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Family")
            .field("name", &self.name)
            .field("scale", &self.scale)
            .field("cumulant", &self.cumulant)
            .field("ell", &self.ell)
            .finish()
    }
}

/// A cumulant value, flagged when it came from the log-asymptote extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantValue<T> {
    pub value: T,
    pub extrapolated: bool,
}

fn ln1p_exp<T: Real>(l: T) -> T {
    if l > T::zero() {
        l + (-l).exp().ln_1p()
    } else {
        l.exp().ln_1p()
    }
}

/// `L(θ) = 1/(1+θ)`, `ν(dx) = e^{−x} dx/x`, `G = E₁`, `ℓ = 1`.
pub fn gamma_family<T: Real>() -> Family<T> {
    let levy = LevyMeasure::density_unchecked(
        Arc::new(|x: T| (-x).exp() / x),
        (T::zero(), T::infinity()),
    );
    let tail = TailFunction::from_fallible(exp_integral_e1).with_known_index(T::one());
    let cumulant = CumulantFunction::closed_form(|theta: T| -theta.ln_1p()).with_log_form(|l: T| Ok(-ln1p_exp(l)));
    Family {
        kind: FamilyKind::Gamma,
        name: "gamma".into(),
        scale: T::one(),
        levy,
        tail,
        cumulant,
        ell: SlowLogIndex::exact(T::one()),
    }
}

/// Law of `Σ_{n≥1} X_n / n` with independent `X_n ~ Poisson(1/n)`:
/// `ν = Σ (1/n) δ_{1/n}`, `G(x) = H_{⌊1/x⌋}`, `ℓ = 1`.
pub fn harmonic_poisson_family<T: Real>() -> Family<T> {
    harmonic_poisson_family_with(HarmonicAtoms::<T>::DEFAULT_TERMS).expect("default truncation is within the cap")
}

/// As [`harmonic_poisson_family`] with `direct_terms` atoms summed explicitly.
pub fn harmonic_poisson_family_with<T: Real>(direct_terms: usize) -> Result<Family<T>> {
    let source: Arc<dyn AtomSource<T>> = Arc::new(HarmonicAtoms::new(direct_terms)?);
    let levy = LevyMeasure::atoms_unchecked(source);
    let tail = TailFunction::from_measure(&levy).with_known_index(T::one());
    let cumulant = CumulantFunction::from_tail(tail.clone());
    Ok(Family {
        kind: FamilyKind::HarmonicPoisson,
        name: "harmonic".into(),
        scale: T::one(),
        levy,
        tail,
        cumulant,
        ell: SlowLogIndex::exact(T::one()),
    })
}

/// `L(θ) = θ + 1 − √(θ² + 2θ)`, `ν(dx) = ₁F₁(1/2; 1; −2x) dx/x`, `ℓ = 1`;
/// `μ_t` has density `(t/x) e^{−x} I_t(x)`.
pub fn bessel_rw_family<T: Real>() -> Family<T> {
    let levy = LevyMeasure::density_unchecked(
        Arc::new(|x: T| confluent_half(x).unwrap_or_else(|_| T::nan()) / x),
        (T::zero(), T::infinity()),
    );
    let tail = TailFunction::from_measure(&levy).with_known_index(T::one());
    let cumulant = CumulantFunction::closed_form(|theta: T| -(theta + (theta * (theta + lit(2.0))).sqrt()).ln_1p())
        .with_log_form(|l: T| {
            if l > T::zero() {
                let e = (-l).exp();
                Ok(-(l + (T::one() + e + (T::one() + e + e).sqrt()).ln()))
            } else {
                let th = l.exp();
                Ok(-(th + (th * (th + lit(2.0))).sqrt()).ln_1p())
            }
        });
    Family {
        kind: FamilyKind::BesselRandomWalk,
        name: "bessel".into(),
        scale: T::one(),
        levy,
        tail,
        cumulant,
        ell: SlowLogIndex::exact(T::one()),
    }
}

/// Family generated by a Lévy density. `cumulant` defaults to quadrature of
/// the tail; `known_ell`, when given, must agree with the fitted index.
pub fn user_density_family<T, F>(
    name: &str,
    density: F,
    support: (T, T),
    cumulant: Option<CumulantFunction<T>>,
    known_ell: Option<T>,
) -> Result<Family<T>>
where
    T: Real,
    F: Fn(T) -> T + Send + Sync + 'static,
{
    let levy = LevyMeasure::from_density(density, support)?;
    user_family(name, levy, cumulant, known_ell)
}

/// Family generated by a finite list of atoms.
pub fn user_atoms_family<T: Real>(
    name: &str,
    atoms: FiniteAtoms<T>,
    cumulant: Option<CumulantFunction<T>>,
    known_ell: Option<T>,
) -> Result<Family<T>> {
    let levy = LevyMeasure::from_atoms(Arc::new(atoms))?;
    user_family(name, levy, cumulant, known_ell)
}

fn user_family<T: Real>(
    name: &str,
    levy: LevyMeasure<T>,
    cumulant: Option<CumulantFunction<T>>,
    known_ell: Option<T>,
) -> Result<Family<T>> {
    if let Some(ell) = known_ell {
        if !(ell > T::zero() && ell.is_finite()) {
            return Err(Error::invalid(format!("known index must be positive, got {ell}")));
        }
    }
    let mut tail = TailFunction::from_measure(&levy);
    if let Some(ell) = known_ell {
        tail = tail.with_known_index(ell);
    }
    let fitted = estimate_ell(&tail)?;
    let ell = match known_ell {
        Some(ell) => SlowLogIndex { ell, ..fitted },
        None => fitted,
    };
    let cumulant = cumulant.unwrap_or_else(|| CumulantFunction::from_tail(tail.clone()));
    Ok(Family {
        kind: FamilyKind::User,
        name: name.to_string(),
        scale: T::one(),
        levy,
        tail,
        cumulant,
        ell,
    })
}

impl<T: Real> Family<T> {
    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Factor `c` of the Lévy measure `c·ν` relative to the base family.
    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn levy(&self) -> &LevyMeasure<T> {
        &self.levy
    }

    pub fn tail(&self) -> &TailFunction<T> {
        &self.tail
    }

    pub fn cumulant(&self) -> &CumulantFunction<T> {
        &self.cumulant
    }

    pub fn ell(&self) -> &SlowLogIndex<T> {
        &self.ell
    }

    /// `L(θ) = e^{k(θ)}`.
    pub fn laplace(&self, theta: T) -> Result<T> {
        Ok(self.cumulant.eval(theta)?.exp())
    }

    /// The family with Lévy measure `c·ν`: `k ↦ c k`, `ℓ ↦ c ℓ`, and
    /// `μ_t ↦ μ_{ct}`.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Ok(Family {
            kind: self.kind,
            name: self.name.clone(),
            scale: self.scale * c,
            levy: self.levy.scaled(c)?,
            tail: self.tail.scaled(c),
            cumulant: self.cumulant.scaled(c),
            ell: self.ell.scaled(c),
        })
    }

    /// `k(e^{ln θ})`, extrapolated along `−ℓ ln θ` past the evaluable range.
    pub fn cumulant_at_ln(&self, ln_theta: T) -> Result<CumulantValue<T>> {
        let ln_max = lit::<T>(THETA_MAX).ln();
        let direct = match self.cumulant.method() {
            _ if self.cumulant.has_log_form() => true,
            CumulantMethod::ClosedForm => ln_theta < T::max_ln() - T::one(),
            _ => ln_theta <= ln_max,
        };
        if direct {
            if let Some(value) = self.cumulant.eval_ln(ln_theta)? {
                return Ok(CumulantValue {
                    value,
                    extrapolated: false,
                });
            }
        }
        let anchor = self.cumulant.eval(lit(THETA_MAX))?;
        Ok(CumulantValue {
            value: anchor - self.ell.ell * (ln_theta - ln_max),
            extrapolated: true,
        })
    }
}

/// A member `P(θ₀, t, μ_t)` of the exponential dispersion model of a family.
#[derive(Debug, Clone)]
pub struct EdmModel<T: Real> {
    family: Family<T>,
    theta0: T,
    t: T,
}

impl<T: Real> EdmModel<T> {
    pub fn new(family: Family<T>, theta0: T, t: T) -> Result<Self> {
        if !(theta0 >= T::zero()) || theta0.is_infinite() {
            return Err(Error::invalid(format!("theta0 must be finite and >= 0, got {theta0}")));
        }
        if !(t > T::zero()) || t.is_infinite() {
            return Err(Error::invalid(format!("dispersion t must be finite and > 0, got {t}")));
        }
        Ok(EdmModel { family, theta0, t })
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn theta0(&self) -> T {
        self.theta0
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// Dispersion of the equivalent member of the unscaled family, `c·t`.
    pub fn effective_t(&self) -> T {
        self.family.scale * self.t
    }

    /// `t·k(θ₀)`, the log-normaliser of the tilt.
    fn ln_laplace_at_theta0(&self) -> Result<T> {
        Ok(self.t * self.family.cumulant.eval(self.theta0)?)
    }
}

/// `ln (L(θ₀+s)/L(θ₀))^t`.
pub fn edm_ln_laplace<T: Real>(model: &EdmModel<T>, s: T) -> Result<T> {
    if !(s >= T::zero()) || s.is_infinite() {
        return Err(Error::invalid(format!("Laplace argument must be finite and >= 0, got {s}")));
    }
    if s == T::zero() {
        return Ok(T::zero());
    }
    let k = model.family.cumulant();
    Ok(model.t * (k.eval(model.theta0 + s)? - k.eval(model.theta0)?))
}

/// `(L(θ₀+s)/L(θ₀))^t = exp(t (k(θ₀+s) − k(θ₀)))`.
pub fn edm_laplace<T: Real>(model: &EdmModel<T>, s: T) -> Result<T> {
    Ok(edm_ln_laplace(model, s)?.exp())
}

/// Log-density of `P(θ₀, t, μ_t)` at `x > 0`; gamma and Bessel families only.
pub fn edm_ln_density<T: Real>(model: &EdmModel<T>, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::invalid("density needs x > 0"));
    }
    let a = model.effective_t();
    match model.family.kind {
        FamilyKind::Gamma => {
            let rate = T::one() + model.theta0;
            Ok(a * rate.ln() + (a - T::one()) * x.ln() - rate * x - ln_gamma(a))
        }
        FamilyKind::BesselRandomWalk => {
            if x.is_infinite() {
                return Ok(T::neg_infinity());
            }
            Ok(a.ln() - x.ln() + ln_bessel_i_scaled(a, x)? - model.theta0 * x - model.ln_laplace_at_theta0()?)
        }
        _ => Err(Error::DensityUnavailable {
            family: model.family.name.clone(),
        }),
    }
}

/// Density of `P(θ₀, t, μ_t)`; gamma and Bessel families only.
pub fn edm_density<T: Real>(model: &EdmModel<T>, x: T) -> Result<T> {
    Ok(edm_ln_density(model, x)?.exp())
}

/// `P(Y ≤ y)`; exact for gamma, tabulated for Bessel (build a [`BesselCdf`]
/// once when evaluating many points).
pub fn edm_cdf<T: Real>(model: &EdmModel<T>, y: T) -> Result<T> {
    if !(y >= T::zero()) {
        return Err(Error::invalid("CDF needs y >= 0"));
    }
    match model.family.kind {
        FamilyKind::Gamma => reg_lower_incomplete_gamma(model.effective_t(), (T::one() + model.theta0) * y),
        FamilyKind::BesselRandomWalk => {
            if y == T::zero() {
                return Ok(T::zero());
            }
            BesselCdf::for_model(model)?.cdf_ln(y.ln())
        }
        _ => Err(Error::DensityUnavailable {
            family: model.family.name.clone(),
        }),
    }
}
