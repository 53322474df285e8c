//! Iteration-time schedules for rodeo-algorithm ground-state projection.
//!
//! Energies are measured in units of the spectral gap Δ and times in units of
//! `T₀ = 2π/Δ`, so an iteration of duration `τ` accumulates `ζ = x τ` phase
//! counts on a component at energy ratio `x` and multiplies its weight by
//! `cos²(π ζ)`.
//!
//! The closed-form layer is generic over [`scalar::Real`] (`f32` or `f64`);
//! optimisation, simulation and file formats work in `f64`. The aliases at the
//! crate root fix the scalar to `f64`.

// `!(a > b)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod formats;
pub mod profile;
pub mod projection;
pub mod qsim;
pub mod quadrature;
pub mod rng;
pub mod rra;
pub mod scalar;
pub mod schedule;
pub mod search;
pub mod spectrum;
pub mod superiter;
pub mod units;
pub mod wam;

pub use error::{Result, RodeoError};
pub use profile::SuppressionProfile;
pub use rng::StreamId;

pub type Schedule = schedule::Schedule<f64>;
pub type DiscreteSpectrum = spectrum::DiscreteSpectrum<f64>;
pub type ExcitedComponent = spectrum::ExcitedComponent<f64>;
pub type EnergyRatio = units::EnergyRatio<f64>;
pub type TimeRatio = units::TimeRatio<f64>;
pub type PhaseCount = units::PhaseCount<f64>;
pub type SuperIteration = superiter::SuperIteration<f64>;
pub type SuperSchedule = superiter::SuperSchedule<f64>;
pub type BesselProfile = superiter::BesselProfile<f64>;
