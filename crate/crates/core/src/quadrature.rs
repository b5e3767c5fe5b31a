//! Adaptive Gauss–Kronrod quadrature with the variable changes the Lévy
//! integrals need: exponential maps for `[a, ∞)` and logarithmic segments for
//! integrands with logarithmic or algebraic behaviour at `0` and `∞`.

use crate::error::{Error, Result};
use crate::real::{attainable_tol, lit, Real};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_010_846_398,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Width of one logarithmic segment, in units of `ln x`.
const LOG_SEGMENT: f64 = 1.0;
/// Logarithmic segments allowed before an improper end is declared divergent.
const MAX_LOG_SEGMENTS: usize = 1500;

/// Tolerances and budget for adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        QuadConfig {
            rel_tol: attainable_tol(lit(1e-10)),
            abs_tol: lit(1e-14),
            max_intervals: 2000,
        }
    }
}

impl<T: Real> QuadConfig<T> {
    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = attainable_tol(rel_tol);
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn target(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Result of a quadrature: value, error estimate and integrand evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

impl<T: Real> Estimate<T> {
    fn zero() -> Self {
        Estimate {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        }
    }

    fn add(self, other: Self) -> Self {
        Estimate {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

/// 21-point Kronrod rule with embedded 10-point Gauss error estimate on `[a, b]`.
///
/// Returns `(value, error_estimate)`; the error estimate follows QUADPACK's
/// `qk21` scaling.
pub fn gauss_kronrod<T, F>(f: &F, a: T, b: T) -> (T, T)
where
    T: Real,
    F: Fn(T) -> T,
{
    let half = lit::<T>(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let fc = f(center);
    let mut kronrod = fc * lit(WGK[10]);
    let mut gauss = T::zero();
    let mut abs_sum = kronrod.abs();
    let mut f1 = [T::zero(); 10];
    let mut f2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half_len * lit(XGK[j]);
        let v1 = f(center - dx);
        let v2 = f(center + dx);
        f1[j] = v1;
        f2[j] = v2;
        let w = lit::<T>(WGK[j]);
        kronrod = kronrod + w * (v1 + v2);
        abs_sum = abs_sum + w * (v1.abs() + v2.abs());
        if j % 2 == 1 {
            gauss = gauss + lit::<T>(WG[j / 2]) * (v1 + v2);
        }
    }
    let mean = kronrod * half;
    let mut asc = lit::<T>(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        asc = asc + lit::<T>(WGK[j]) * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }
    let value = kronrod * half_len;
    let abs_sum = abs_sum * abs_half;
    let asc = asc * abs_half;
    let mut err = ((kronrod - gauss) * half_len).abs();
    if asc != T::zero() && err != T::zero() {
        let scale = (lit::<T>(200.0) * err / asc).powf(lit(1.5));
        err = asc * scale.min(T::one());
    }
    let round_off = lit::<T>(50.0) * T::epsilon() * abs_sum;
    if abs_sum > T::min_positive_value() / (lit::<T>(50.0) * T::epsilon()) {
        err = err.max(round_off);
    }
    (value, err)
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// Globally adaptive bisection on `[a, b]`.
///
/// Fails with [`Error::QuadratureNotConverged`] (carrying the partial value)
/// when the interval budget runs out, and with [`Error::DivergentIntegral`]
/// when the integrand produces non-finite values.
pub fn adaptive<T, F>(f: &F, a: T, b: T, cfg: &QuadConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok(Estimate::zero());
    }
    let (value, error) = gauss_kronrod(f, a, b);
    let mut evaluations = 21;
    check_finite(value, a, b)?;
    let mut panels = vec![Panel { a, b, value, error }];
    let mut total = value;
    let mut total_err = error;
    loop {
        if total_err <= cfg.target(total) {
            return Ok(Estimate {
                value: total,
                error: total_err,
                evaluations,
            });
        }
        if panels.len() >= cfg.max_intervals {
            return Err(not_converged(a, b, total, total_err));
        }
        let worst = panels
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, p)| {
                if p.error > acc.1 {
                    (i, p.error)
                } else {
                    acc
                }
            })
            .0;
        let p = panels.swap_remove(worst);
        let mid = lit::<T>(0.5) * (p.a + p.b);
        let width = (p.b - p.a).abs();
        if width <= lit::<T>(100.0) * T::epsilon() * p.a.abs().max(p.b.abs()) {
            // panel width at roundoff level
            return Err(not_converged(a, b, total, total_err));
        }
        let (lv, le) = gauss_kronrod(f, p.a, mid);
        let (rv, re) = gauss_kronrod(f, mid, p.b);
        evaluations += 42;
        check_finite(lv + rv, p.a, p.b)?;
        total = total - p.value + lv + rv;
        total_err = total_err - p.error + le + re;
        panels.push(Panel {
            a: p.a,
            b: mid,
            value: lv,
            error: le,
        });
        panels.push(Panel {
            a: mid,
            b: p.b,
            value: rv,
            error: re,
        });
        // resum occasionally to keep cancellation noise out of the totals
        if panels.len() % 64 == 0 {
            total = panels.iter().fold(T::zero(), |s, p| s + p.value);
            total_err = panels.iter().fold(T::zero(), |s, p| s + p.error);
        }
    }
}

/// `∫_a^∞ f(x) dx` through `x = a − ln(1 − u)/rate`, `u ∈ [0, 1)`.
///
/// `rate` should match the integrand's exponential decay rate; the transformed
/// integrand is then bounded.
pub fn semi_infinite<T, F>(f: &F, a: T, rate: T, cfg: &QuadConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(rate > T::zero()) {
        return Err(Error::invalid("semi-infinite quadrature needs a positive rate"));
    }
    let g = |u: T| {
        let one_minus = T::one() - u;
        if one_minus <= T::zero() {
            return T::zero();
        }
        let x = a - one_minus.ln() / rate;
        if x.is_infinite() {
            return T::zero();
        }
        let fx = f(x);
        if fx == T::zero() {
            T::zero()
        } else {
            fx / (rate * one_minus)
        }
    };
    adaptive(&g, T::zero(), T::one(), cfg)
}

/// `∫_a^b f(x) dx` for `0 < a < b` computed in the variable `s = ln x`.
pub fn log_range<T, F>(f: &F, a: T, b: T, cfg: &QuadConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(a > T::zero() && b >= a) {
        return Err(Error::invalid("log-range quadrature needs 0 < a <= b"));
    }
    let g = |s: T| {
        let x = s.exp();
        f(x) * x
    };
    adaptive(&g, a.ln(), b.ln(), cfg)
}

/// `∫_{s0}^{∞} g(s) ds` as a sum of unit segments, stopped when a geometric
/// remainder estimate falls below the tolerance. `settle` is the abscissa past
/// which stopping is permitted.
pub fn segments_upward<T, F>(g: &F, s0: T, settle: T, cfg: &QuadConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    segment_walk(g, s0, settle, T::one(), cfg, "s → +∞")
}

/// `∫_{-∞}^{s0} g(s) ds` as a sum of unit segments walking downward.
pub fn segments_downward<T, F>(g: &F, s0: T, settle: T, cfg: &QuadConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    segment_walk(g, s0, settle, -T::one(), cfg, "s → −∞")
}

fn segment_walk<T, F>(
    g: &F,
    s0: T,
    settle: T,
    direction: T,
    cfg: &QuadConfig<T>,
    region: &str,
) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let width = lit::<T>(LOG_SEGMENT) * direction;
    let mut acc: Estimate<T> = Estimate::zero();
    let mut previous: Option<T> = None;
    let mut start = s0;
    for _ in 0..MAX_LOG_SEGMENTS {
        let end = start + width;
        let seg_cfg = QuadConfig {
            abs_tol: cfg.abs_tol.max(lit::<T>(0.01) * cfg.rel_tol * acc.value.abs()),
            ..*cfg
        };
        let (lo, hi) = if direction > T::zero() { (start, end) } else { (end, start) };
        let seg = adaptive(g, lo, hi, &seg_cfg)?;
        acc = acc.add(seg);
        let past_settle = if direction > T::zero() { end >= settle } else { end <= settle };
        let mag = seg.value.abs();
        if past_settle {
            let remainder = match previous {
                Some(prev) if prev > T::zero() => {
                    let ratio = mag / prev;
                    if ratio < lit(0.9) {
                        Some(mag * ratio / (T::one() - ratio))
                    } else {
                        None
                    }
                }
                Some(_) if mag == T::zero() => Some(T::zero()),
                _ => None,
            };
            if let Some(rem) = remainder {
                if rem <= lit::<T>(0.1) * cfg.target(acc.value) {
                    return Ok(acc);
                }
            }
        }
        previous = Some(mag);
        start = end;
    }
    Err(Error::DivergentIntegral {
        region: format!(
            "{region}: no decay after {MAX_LOG_SEGMENTS} logarithmic segments (partial value {:e})",
            acc.value.as_f64()
        ),
    })
}

/// `∫_a^∞ f(x) dx` for `a > 0`, integrating `f(e^s) e^s` over unit segments in
/// `s = ln x`. Suited to integrands with algebraic tails.
pub fn log_upward<T, F>(f: &F, a: T, cfg: &QuadConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(a > T::zero()) {
        return Err(Error::invalid("log-upward quadrature needs a > 0"));
    }
    let g = |s: T| {
        let x = s.exp();
        if x.is_infinite() {
            // still walking at the edge of the scalar range
            return T::nan();
        }
        f(x) * x
    };
    segments_upward(&g, a.ln(), T::zero(), cfg).map_err(|e| match e {
        Error::DivergentIntegral { .. } => Error::DivergentIntegral {
            region: "x → ∞ (integrand too heavy at infinity)".into(),
        },
        other => other,
    })
}

/// `∫_0^b f(x) dx` for `b > 0`, integrating `f(e^s) e^s` over unit segments
/// walking toward `s = −∞`. Handles logarithmic and weak algebraic
/// singularities at `0`; a non-integrable one is reported as divergent.
pub fn log_from_zero<T, F>(f: &F, b: T, cfg: &QuadConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(b > T::zero()) {
        return Err(Error::invalid("log-from-zero quadrature needs b > 0"));
    }
    let g = |s: T| {
        let x = s.exp();
        if x == T::zero() {
            return T::nan();
        }
        f(x) * x
    };
    segments_downward(&g, b.ln(), b.ln(), cfg).map_err(|e| match e {
        Error::DivergentIntegral { .. } => Error::DivergentIntegral {
            region: "x → 0⁺ (integrand too heavy near zero)".into(),
        },
        other => other,
    })
}

fn check_finite<T: Real>(value: T, a: T, b: T) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::DivergentIntegral {
            region: format!("[{:e}, {:e}] (non-finite integrand)", a.as_f64(), b.as_f64()),
        })
    }
}

fn not_converged<T: Real>(a: T, b: T, partial: T, error: T) -> Error {
    Error::QuadratureNotConverged {
        lower: a.as_f64(),
        upper: b.as_f64(),
        partial: partial.as_f64(),
        error: error.as_f64(),
    }
}

/// Carries the first error raised inside an infallible integrand.
///
/// The integrand returns `NaN` after a failure; [`Trap::finish`] then reports
/// the original error instead of the quadrature's divergence diagnosis.
pub(crate) struct Trap {
    first: std::cell::RefCell<Option<Error>>,
}

impl Trap {
    pub(crate) fn new() -> Self {
        Trap {
            first: std::cell::RefCell::new(None),
        }
    }

    pub(crate) fn catch<T: Real>(&self, r: Result<T>) -> T {
        match r {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.first.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                T::nan()
            }
        }
    }

    pub(crate) fn finish<V>(&self, r: Result<V>) -> Result<V> {
        match self.first.borrow_mut().take() {
            Some(e) => Err(e),
            None => r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_is_exact_for_polynomials() {
        let (v, _) = gauss_kronrod(&|x: f64| x.powi(7) - 3.0 * x * x, -1.0, 2.0);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert_relative_eq!(v, exact, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let cfg = QuadConfig::default();
        let r = adaptive(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn semi_infinite_exponential() {
        let cfg = QuadConfig::default();
        let r = semi_infinite(&|x: f64| (-2.0 * x).exp(), 1.0, 2.0, &cfg).unwrap();
        assert_relative_eq!(r.value, (-2.0f64).exp() / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn log_upward_algebraic_tail() {
        let cfg = QuadConfig::default();
        let r = log_upward(&|x: f64| x.powf(-1.5), 0.25, &cfg).unwrap();
        assert_relative_eq!(r.value, 4.0, max_relative = 1e-9);
    }

    #[test]
    fn log_from_zero_log_singularity() {
        let cfg = QuadConfig::default();
        let r = log_from_zero(&|x: f64| -x.ln(), 1.0, &cfg).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn log_from_zero_reports_divergence() {
        let cfg = QuadConfig::default();
        let err = log_from_zero(&|x: f64| 1.0 / x, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::DivergentIntegral { .. }));
    }

    #[test]
    fn budget_exhaustion_carries_partial_value() {
        let cfg = QuadConfig {
            max_intervals: 3,
            ..QuadConfig::default()
        };
        let err = adaptive(&|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &cfg).unwrap_err();
        match err {
            Error::QuadratureNotConverged { partial, .. } => assert!(partial > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn works_in_single_precision() {
        let cfg = QuadConfig::<f32>::default();
        let r = semi_infinite(&|x: f32| (-x).exp(), 0.0, 1.0, &cfg).unwrap();
        assert_relative_eq!(r.value, 1.0f32, max_relative = 1e-5);
    }
}
