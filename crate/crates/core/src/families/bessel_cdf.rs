//! Tabulated distribution function of the Bessel random-walk EDM member,
//! worked in `s = ln y`.

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, segments_upward, QuadConfig, Trap};
use crate::real::{lit, Real};
use crate::special_fn::{ln_bessel_i_scaled_of_ln, ln_gamma};

use super::{EdmModel, FamilyKind};

const NODES: usize = 2048;
const QUANTILE_EDGE: f64 = 1e-8;
const SERIES_TOP: f64 = 2.0;
const PROBABILITY_TOL: f64 = 1e-10;
const MAX_MARCH: usize = 4000;

/// CDF of `e^{−θ₀y} (a/y) e^{−y} I_a(y) / L(θ₀)^a`, tabulated on 2048 nodes
/// uniform in `ln y` spanning quantiles `1e−8 .. 1 − 1e−8`.
///
/// Below `y = 2` the CDF is the termwise integral of the Bessel series;
/// between nodes it is the node value plus a local quadrature of the density.
#[derive(Debug, Clone)]
pub struct BesselCdf<T> {
    order: T,
    tilt: T,
    /// `ln L(θ₀)^{−a}`
    ln_norm: T,
    series_top: T,
    s: Vec<T>,
    cdf: Vec<T>,
    pdf: Vec<T>,
}

impl<T: Real> BesselCdf<T> {
    pub fn for_model(model: &EdmModel<T>) -> Result<Self> {
        if model.family().kind() != FamilyKind::BesselRandomWalk {
            return Err(Error::invalid("Bessel CDF needs the bessel family"));
        }
        Self::new(model.effective_t(), model.theta0(), -model.ln_laplace_at_theta0()?)
    }

    /// `ln_norm = −a ln L(θ₀)`.
    pub(crate) fn new(order: T, tilt: T, ln_norm: T) -> Result<Self> {
        if !(order > T::zero()) || order.is_infinite() {
            return Err(Error::invalid("Bessel CDF needs a positive order"));
        }
        let rate = T::one() + tilt;
        let series_top = lit::<T>(SERIES_TOP).min(lit::<T>(20.0) / rate).ln();
        let mut table = BesselCdf {
            order,
            tilt,
            ln_norm,
            series_top,
            s: Vec::new(),
            cdf: Vec::new(),
            pdf: Vec::new(),
        };
        table.tabulate()?;
        Ok(table)
    }

    fn cfg() -> QuadConfig<T> {
        QuadConfig::default().with_rel_tol(lit(1e-12)).with_abs_tol(lit(1e-17))
    }

    /// Density of `ln Y` at `s`.
    pub fn ln_pdf(&self, s: T) -> Result<T> {
        let mut v = self.order.ln() + self.ln_norm + ln_bessel_i_scaled_of_ln(self.order, s)?;
        if self.tilt > T::zero() {
            v = v - self.tilt * s.exp();
        }
        Ok(v)
    }

    fn pdf_at(&self, s: T) -> Result<T> {
        Ok(self.ln_pdf(s)?.exp())
    }

    /// `ln F(e^s)` from the termwise-integrated series, for `s ≤ ln 2`.
    fn ln_cdf_series(&self, s: T) -> Result<T> {
        let a = self.order;
        let ln2 = lit::<T>(2f64.ln());
        let lead = self.ln_norm + a * (s - ln2) - ln_gamma(a + T::one());
        if s < lit(-650.0) {
            return Ok(lead);
        }
        let y = s.exp();
        let z = (T::one() + self.tilt) * y;
        let q = (y * lit(0.5)) * (y * lit(0.5));
        let tol = lit::<T>(1e-17);
        let mut coef = T::one();
        let mut sum = T::zero();
        for n in 0..500 {
            let nf = lit::<T>(n as f64);
            if n > 0 {
                coef = coef * q / (nf * (nf + a));
            }
            let term = coef * a * lower_gamma_series(a + nf + nf, z)?;
            sum = sum + term;
            if term <= tol * sum {
                return Ok(lead - z + sum.ln());
            }
        }
        Err(Error::SeriesNotConverged {
            what: "Bessel CDF series",
            max_terms: 500,
        })
    }

    fn integrate(&self, lo: T, hi: T) -> Result<T> {
        let trap = Trap::new();
        let f = |s: T| trap.catch(self.pdf_at(s));
        Ok(trap.finish(adaptive(&f, lo, hi, &Self::cfg()))?.value)
    }

    /// `P(ln Y > s)` by direct quadrature of the upper tail.
    fn upper_tail(&self, s: T) -> Result<T> {
        let trap = Trap::new();
        let f = |s: T| trap.catch(self.pdf_at(s));
        Ok(trap.finish(segments_upward(&f, s, s, &Self::cfg()))?.value)
    }

    fn tabulate(&mut self) -> Result<()> {
        let edge = lit::<T>(QUANTILE_EDGE);
        let ln_edge = edge.ln();
        let top = self.series_top;
        let ln_top = self.ln_cdf_series(top)?;
        let s_lo = if ln_top <= ln_edge {
            top
        } else {
            self.series_root(ln_edge, top, ln_top)?
        };
        // march upward in unit steps until the survival drops below the edge
        let mut s_hi = top;
        let mut f_hi = ln_top.exp();
        let mut steps = 0;
        while T::one() - f_hi > edge {
            f_hi = f_hi + self.integrate(s_hi, s_hi + T::one())?;
            s_hi = s_hi + T::one();
            steps += 1;
            if steps > MAX_MARCH {
                return Err(Error::Tabulation(format!(
                    "upper quantile not reached by ln y = {s_hi} (F = {f_hi})"
                )));
            }
        }
        let h = (s_hi - s_lo) / lit((NODES - 1) as f64);
        let mut s = Vec::with_capacity(NODES);
        let mut cdf = Vec::with_capacity(NODES);
        let mut pdf = Vec::with_capacity(NODES);
        let mut prev: Option<(T, T)> = None;
        for i in 0..NODES {
            let si = if i == NODES - 1 { s_hi } else { s_lo + h * lit(i as f64) };
            let fi = if si <= top {
                self.ln_cdf_series(si)?.exp()
            } else {
                let (ps, pf) = match prev {
                    Some((ps, pf)) if ps >= top => (ps, pf),
                    _ => (top, ln_top.exp()),
                };
                pf + self.integrate(ps, si)?
            };
            prev = Some((si, fi));
            s.push(si);
            cdf.push(fi.min(T::one()));
            pdf.push(self.pdf_at(si)?);
        }
        let last = *cdf.last().expect("nodes");
        let total = last + self.upper_tail(s_hi)?;
        if (total - T::one()).abs() > lit(1e-9) {
            return Err(Error::Tabulation(format!(
                "tabulated mass {total} differs from 1 by more than 1e-9"
            )));
        }
        self.s = s;
        self.cdf = cdf;
        self.pdf = pdf;
        Ok(())
    }

    /// Solves `ln F(s) = target` below `top` by bisection on the series.
    fn series_root(&self, target: T, top: T, ln_top: T) -> Result<T> {
        let mut hi = top;
        let mut span = (ln_top - target) / self.order + T::one();
        let mut lo = top - span;
        while self.ln_cdf_series(lo)? > target {
            span = span + span;
            lo = top - span;
            if !lo.is_finite() {
                return Err(Error::Tabulation("lower quantile not bracketed".into()));
            }
        }
        for _ in 0..200 {
            let mid = lit::<T>(0.5) * (lo + hi);
            if self.ln_cdf_series(mid)? > target {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= lit::<T>(1e-13) * (T::one() + mid.abs()) {
                break;
            }
        }
        Ok(lit::<T>(0.5) * (lo + hi))
    }

    pub fn order(&self) -> T {
        self.order
    }

    /// Node abscissae `ln y` and CDF values.
    pub fn nodes(&self) -> (&[T], &[T]) {
        (&self.s, &self.cdf)
    }

    fn from_node(&self, s: T) -> Result<T> {
        let (first, last) = (self.s[0], self.s[NODES - 1]);
        debug_assert!(s >= first && s <= last);
        let h = (last - first) / lit((NODES - 1) as f64);
        let i = ((s - first) / h).floor().to_usize().unwrap_or(0).min(NODES - 1);
        let (mut base_s, mut base_f) = (self.s[i], self.cdf[i]);
        if base_s < self.series_top {
            base_s = self.series_top;
            base_f = self.ln_cdf_series(base_s)?.exp();
        }
        Ok(base_f + self.integrate(base_s, s)?)
    }

    /// `P(Y ≤ e^s)`.
    pub fn cdf_ln(&self, s: T) -> Result<T> {
        if s.is_nan() {
            return Err(Error::invalid("CDF needs a number"));
        }
        if s <= self.series_top {
            return Ok(self.ln_cdf_series(s)?.exp());
        }
        if s >= self.s[NODES - 1] {
            return Ok(T::one() - self.upper_tail(s)?);
        }
        Ok(self.from_node(s)?.min(T::one()))
    }

    /// `P(Y > e^s)`, accurate in the far upper tail.
    pub fn survival_ln(&self, s: T) -> Result<T> {
        if s >= self.s[NODES - 1] {
            return self.upper_tail(s);
        }
        Ok((T::one() - self.cdf_ln(s)?).max(T::zero()))
    }

    /// `ln y` with `P(Y ≤ y) = p`, to `1e−10` in probability.
    pub fn quantile_ln(&self, p: T) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::invalid(format!("quantile needs 0 < p < 1, got {p}")));
        }
        if p <= self.cdf[0] {
            return self.lower_quantile(p);
        }
        if p >= self.cdf[NODES - 1] {
            return self.upper_quantile(p);
        }
        let j = self.cdf.partition_point(|&f| f <= p) - 1;
        let guess = self.hermite_inverse(j, p);
        let (mut lo, mut hi) = (self.s[j], self.s[j + 1]);
        let mut s = guess;
        let tol = lit::<T>(PROBABILITY_TOL);
        for _ in 0..60 {
            let f = self.cdf_ln(s)? - p;
            if f.abs() <= tol {
                return Ok(s);
            }
            if f > T::zero() {
                hi = s;
            } else {
                lo = s;
            }
            let step = f / self.pdf_at(s)?;
            let next = s - step;
            s = if next > lo && next < hi && step.is_finite() {
                next
            } else {
                lit::<T>(0.5) * (lo + hi)
            };
            if hi - lo <= T::epsilon() * (T::one() + s.abs()) * lit(4.0) {
                return Ok(s);
            }
        }
        Ok(s)
    }

    /// Inverts the monotone cubic Hermite interpolant on cell `j` by bisection.
    fn hermite_inverse(&self, j: usize, p: T) -> T {
        let (s0, s1) = (self.s[j], self.s[j + 1]);
        let (f0, f1) = (self.cdf[j], self.cdf[j + 1]);
        let h = s1 - s0;
        let delta = (f1 - f0) / h;
        let (mut m0, mut m1) = (self.pdf[j], self.pdf[j + 1]);
        if delta <= T::zero() {
            return lit::<T>(0.5) * (s0 + s1);
        }
        let (alpha, beta) = (m0 / delta, m1 / delta);
        let r2 = alpha * alpha + beta * beta;
        if r2 > lit(9.0) {
            let tau = lit::<T>(3.0) / r2.sqrt();
            m0 = m0 * tau;
            m1 = m1 * tau;
        }
        let eval = |u: T| {
            let u2 = u * u;
            let u3 = u2 * u;
            let h00 = lit::<T>(2.0) * u3 - lit::<T>(3.0) * u2 + T::one();
            let h10 = u3 - lit::<T>(2.0) * u2 + u;
            let h01 = lit::<T>(-2.0) * u3 + lit::<T>(3.0) * u2;
            let h11 = u3 - u2;
            h00 * f0 + h10 * h * m0 + h01 * f1 + h11 * h * m1
        };
        let (mut lo, mut hi) = (T::zero(), T::one());
        for _ in 0..60 {
            let mid = lit::<T>(0.5) * (lo + hi);
            if eval(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        s0 + h * lit::<T>(0.5) * (lo + hi)
    }

    fn lower_quantile(&self, p: T) -> Result<T> {
        let target = p.ln();
        let top = self.s[0].min(self.series_top);
        let ln_top = self.ln_cdf_series(top)?;
        if target >= ln_top {
            return Ok(top);
        }
        self.series_root(target, top, ln_top)
    }

    fn upper_quantile(&self, p: T) -> Result<T> {
        let target = T::one() - p;
        let mut lo = self.s[NODES - 1];
        let mut width = T::one();
        let mut hi = lo + width;
        while self.upper_tail(hi)? > target {
            lo = hi;
            width = width + width;
            hi = hi + width;
            if !hi.is_finite() || width > lit(1e4) {
                return Err(Error::Tabulation(format!("upper quantile {p} not bracketed")));
            }
        }
        for _ in 0..200 {
            let mid = lit::<T>(0.5) * (lo + hi);
            if self.upper_tail(mid)? > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= lit::<T>(1e-12) * (T::one() + mid.abs()) {
                break;
            }
        }
        Ok(lit::<T>(0.5) * (lo + hi))
    }
}

/// `S(b, z) = Σ_k z^k / (b (b+1) ⋯ (b+k))`, so that `γ(b, z) = z^b e^{−z} S(b, z)`.
fn lower_gamma_series<T: Real>(b: T, z: T) -> Result<T> {
    let mut term = T::one() / b;
    let mut sum = term;
    for k in 1..2000 {
        term = term * z / (b + lit(k as f64));
        sum = sum + term;
        if term <= lit::<T>(1e-17) * sum && lit::<T>(k as f64) > z {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNotConverged {
        what: "lower incomplete gamma series",
        max_terms: 2000,
    })
}
