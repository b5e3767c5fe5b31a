use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::levy::Remainder;
use crate::real::{lit, Real};

use super::{BesselCdf, EdmModel, FamilyKind};

/// Draws per independently seeded stream in [`sample_streams`].
pub const STREAM_CHUNK: usize = 4096;

/// Prepared sampler for one EDM member; draws are produced as `ln Y`.
#[derive(Debug, Clone)]
pub struct EdmSampler<T: Real> {
    kind: Kind<T>,
}

#[derive(Debug, Clone)]
enum Kind<T: Real> {
    Gamma { shape: f64, ln_rate: f64 },
    Compound(CompoundPoisson),
    Bessel(Box<BesselCdf<T>>),
}

/// Poisson number of jumps among weighted atoms, plus the small jumps of a
/// `τ e^{−θx} dx/x` continuum on `(0, edge)`.
#[derive(Debug, Clone)]
struct CompoundPoisson {
    locations: Vec<f64>,
    cumulative: Vec<f64>,
    continuum: Option<Continuum>,
}

#[derive(Debug, Clone, Copy)]
struct Continuum {
    ln_edge: f64,
    edge: f64,
    tau: f64,
    tilt: f64,
}

impl<T: Real> EdmSampler<T> {
    pub fn new(model: &EdmModel<T>) -> Result<Self> {
        let family = model.family();
        let kind = match family.kind() {
            FamilyKind::Gamma => Kind::Gamma {
                shape: model.effective_t().as_f64(),
                ln_rate: (T::one() + model.theta0()).ln().as_f64(),
            },
            FamilyKind::BesselRandomWalk => Kind::Bessel(Box::new(BesselCdf::for_model(model)?)),
            _ => match family.levy().atoms() {
                Some(src) => {
                    let tilted = if model.theta0() > T::zero() {
                        src.tilted(model.theta0())
                    } else {
                        src.clone()
                    };
                    Kind::Compound(CompoundPoisson::new(
                        &tilted.explicit_atoms(),
                        tilted.remainder(),
                        model.t(),
                    )?)
                }
                None => {
                    return Err(Error::SamplerUnavailable {
                        family: family.name().to_string(),
                    })
                }
            },
        };
        Ok(EdmSampler { kind })
    }

    /// One draw of `ln Y`; `−∞` encodes `Y = 0`, possible only for finite atom lists.
    pub fn draw_ln<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<T> {
        let v = match &self.kind {
            Kind::Gamma { shape, ln_rate } => ln_gamma_variate(*shape, rng) - ln_rate,
            Kind::Compound(cp) => cp.draw_ln(rng),
            Kind::Bessel(tab) => {
                let p = open_unit(rng);
                return tab.quantile_ln(lit(p));
            }
        };
        Ok(lit(v))
    }
}

fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// `ln G` for `G ~ Gamma(shape, 1)`; small shapes via `G = G_{a+1} U^{1/a}`.
fn ln_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape >= 1.0 {
        let g = Gamma::new(shape, 1.0).expect("positive shape");
        return g.sample(rng).ln();
    }
    let g = Gamma::new(shape + 1.0, 1.0).expect("positive shape");
    g.sample(rng).ln() + open_unit(rng).ln() / shape
}

impl CompoundPoisson {
    fn new<T: Real>(atoms: &[(T, T)], remainder: Option<Remainder<T>>, t: T) -> Result<Self> {
        let mut locations = Vec::with_capacity(atoms.len());
        let mut cumulative = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        // smallest masses first keeps the running sum accurate
        for &(loc, mass) in atoms.iter().rev() {
            acc += (t * mass).as_f64();
            locations.push(loc.as_f64());
            cumulative.push(acc);
        }
        if !(acc.is_finite()) {
            return Err(Error::invalid("atom masses do not sum to a finite rate"));
        }
        let continuum = remainder.map(|r| Continuum {
            ln_edge: r.edge.as_f64().ln(),
            edge: r.edge.as_f64(),
            tau: (t * r.coefficient).as_f64(),
            tilt: r.tilt.as_f64(),
        });
        Ok(CompoundPoisson {
            locations,
            cumulative,
            continuum,
        })
    }

    fn draw_ln<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let rate = self.cumulative.last().copied().unwrap_or(0.0);
        let mut big = 0.0;
        if rate > 0.0 {
            let k = Poisson::new(rate).expect("positive rate").sample(rng) as u64;
            for _ in 0..k {
                let target = rng.random::<f64>() * rate;
                let i = self.cumulative.partition_point(|&c| c <= target).min(self.locations.len() - 1);
                big += self.locations[i];
            }
        }
        let small = self.continuum.map(|c| c.draw_ln(rng));
        match small {
            None => {
                if big > 0.0 {
                    big.ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Some(ln_small) if big > 0.0 => big.ln() + (ln_small - big.ln()).exp().ln_1p(),
            Some(ln_small) => ln_small,
        }
    }
}

impl Continuum {
    /// Jumps of `τ dx/x` on `(0, 1)` in decreasing order are
    /// `x_{k+1} = x_k U^{1/τ}`; each is kept with probability `e^{−θ·edge·x}`.
    fn draw_ln<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut ln_x = 0.0;
        let mut lead: Option<f64> = None;
        let mut rel_sum = 0.0;
        loop {
            ln_x += open_unit(rng).ln() / self.tau;
            let keep = self.tilt == 0.0 || rng.random::<f64>() < (-self.tilt * self.edge * ln_x.exp()).exp();
            if !keep {
                continue;
            }
            match lead {
                None => {
                    lead = Some(ln_x);
                    rel_sum = 1.0;
                }
                Some(l) => {
                    let r = (ln_x - l).exp();
                    rel_sum += r;
                    if r < 1e-17 * rel_sum {
                        break;
                    }
                }
            }
            if ln_x < -745.0 && lead.is_some() {
                break;
            }
        }
        self.ln_edge + lead.expect("loop exits after a kept jump") + rel_sum.ln()
    }
}

/// `n` draws of `ln Y` from one stream.
pub fn sample_ln<T: Real, R: Rng + ?Sized>(model: &EdmModel<T>, n: usize, rng: &mut R) -> Result<Vec<T>> {
    let sampler = EdmSampler::new(model)?;
    (0..n).map(|_| sampler.draw_ln(rng)).collect()
}

/// `n` draws of `Y` from one stream.
pub fn sample<T: Real, R: Rng + ?Sized>(model: &EdmModel<T>, n: usize, rng: &mut R) -> Result<Vec<T>> {
    Ok(sample_ln(model, n, rng)?.into_iter().map(|v| v.exp()).collect())
}

/// `n` draws of `ln Y`, generated in parallel chunks of [`STREAM_CHUNK`]; chunk
/// `i` uses the ChaCha8 stream `i` of `seed`, so the result depends only on
/// `(model, n, seed)`.
pub fn sample_ln_streams<T: Real>(model: &EdmModel<T>, n: usize, seed: u64) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::invalid("sample size must be at least 1"));
    }
    let sampler = EdmSampler::new(model)?;
    let chunks = n.div_ceil(STREAM_CHUNK);
    let parts: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let len = STREAM_CHUNK.min(n - i * STREAM_CHUNK);
            (0..len).map(|_| sampler.draw_ln(&mut rng)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

/// `n` draws of `Y`; see [`sample_ln_streams`].
pub fn sample_streams<T: Real>(model: &EdmModel<T>, n: usize, seed: u64) -> Result<Vec<T>> {
    Ok(sample_ln_streams(model, n, seed)?.into_iter().map(|v| v.exp()).collect())
}
