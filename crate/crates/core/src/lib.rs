//! Infinitely divisible exponential dispersion models on `(0, ∞)` and the
//! Pareto limit of `Y_t^{−t}` as the dispersion `t` tends to zero.
//!
//! Everything is generic over the scalar through [`Real`]; the `*64` and
//! `*32` aliases fix it.

pub mod approximation;
pub mod error;
pub mod families;
pub mod levy;
pub mod limits;
pub mod quadrature;
pub mod real;
pub mod special_fn;

pub use error::{Error, Result};
pub use real::Real;

pub type LevyMeasure64 = levy::LevyMeasure<f64>;
pub type LevyMeasure32 = levy::LevyMeasure<f32>;
pub type TailFunction64 = levy::TailFunction<f64>;
pub type TailFunction32 = levy::TailFunction<f32>;
pub type CumulantFunction64 = levy::CumulantFunction<f64>;
pub type CumulantFunction32 = levy::CumulantFunction<f32>;
pub type Family64 = families::Family<f64>;
pub type Family32 = families::Family<f32>;
pub type EdmModel64 = families::EdmModel<f64>;
pub type EdmModel32 = families::EdmModel<f32>;
pub type ParetoLaw64 = limits::ParetoLaw<f64>;
pub type ParetoLaw32 = limits::ParetoLaw<f32>;
