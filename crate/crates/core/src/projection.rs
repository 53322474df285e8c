//! Probability bookkeeping for consecutive successful iterations.

use crate::error::{Result, RodeoError};
use crate::profile::SuppressionProfile;
use crate::scalar::Real;
use crate::schedule::Schedule;
use crate::spectrum::DiscreteSpectrum;
use crate::units::TimeRatio;

/// Ground-state probability after the excited components have been suppressed
/// by an overall factor `overall_suppression` (`S_E`):
/// `P_g / (P_g + (1 − P_g) S_E)`.
pub fn ground_state_probability<T: Real>(p_g_initial: T, overall_suppression: T) -> Result<T> {
    if !(p_g_initial > T::zero() && p_g_initial <= T::one()) {
        return Err(RodeoError::domain(format!(
            "initial ground probability must lie in (0, 1], got {p_g_initial}"
        )));
    }
    if !(overall_suppression >= T::zero() && overall_suppression.is_finite()) {
        return Err(RodeoError::domain(format!(
            "overall suppression must be non-negative, got {overall_suppression}"
        )));
    }
    Ok(p_g_initial / (p_g_initial + (T::one() - p_g_initial) * overall_suppression))
}

/// Weighted average of the profile over the excited components only (`S_E`).
pub fn overall_excited_suppression<T: Real, P: SuppressionProfile<T> + ?Sized>(
    spectrum: &DiscreteSpectrum<T>,
    profile: &P,
) -> Result<T> {
    let total = spectrum.excited_weight();
    if !(total > T::zero()) {
        return Err(RodeoError::domain("spectrum has no excited weight"));
    }
    let weighted = spectrum
        .excited()
        .iter()
        .fold(T::zero(), |acc, c| acc + c.w * profile.suppression(c.x));
    Ok(weighted / total)
}

/// Probability that every iteration succeeds: `|α_g|² + Σ_c s(x_c) |α_c|²`.
pub fn success_probability<T: Real, P: SuppressionProfile<T> + ?Sized>(
    spectrum: &DiscreteSpectrum<T>,
    profile: &P,
) -> T {
    spectrum
        .excited()
        .iter()
        .fold(spectrum.ground_weight(), |acc, c| {
            acc + c.w * profile.suppression(c.x)
        })
}

/// Expected net running time including restarts, `T_tot / |α_g|²`.
///
/// Assumes the surviving excited weight is negligible.
pub fn expected_total_time<T: Real>(
    schedule: &Schedule<T>,
    ground_weight: T,
) -> Result<TimeRatio<T>> {
    if !(ground_weight > T::zero() && ground_weight <= T::one()) {
        return Err(RodeoError::domain(format!(
            "ground weight must lie in (0, 1], got {ground_weight}"
        )));
    }
    TimeRatio::new(schedule.total() / ground_weight)
}
