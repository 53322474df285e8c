//! Suppression profiles: the suppression factor as a function of energy ratio.

use crate::scalar::{cos2_pi, Real};
use crate::schedule::Schedule;
use crate::units::{EnergyRatio, TimeRatio};

/// A suppression factor `s(x)` evaluable at any energy ratio `x ≥ 0`.
///
/// Implementations built from rodeo iterations satisfy `s(0) = 1` and
/// `0 ≤ s ≤ 1`.
pub trait SuppressionProfile<T: Real> {
    fn suppression(&self, x: T) -> T;

    /// Points in `[lo, hi]` where the profile vanishes exactly, ascending.
    fn zeros_in(&self, lo: T, hi: T) -> Vec<T>;

    /// An upper bound on `s(y)` valid for every `y ≥ x`, if one is known in
    /// closed form. Must be non-increasing in `x`.
    fn tail_bound(&self, _x: T) -> Option<T> {
        None
    }
}

impl<T: Real, P: SuppressionProfile<T> + ?Sized> SuppressionProfile<T> for &P {
    fn suppression(&self, x: T) -> T {
        (**self).suppression(x)
    }

    fn zeros_in(&self, lo: T, hi: T) -> Vec<T> {
        (**self).zeros_in(lo, hi)
    }

    fn tail_bound(&self, x: T) -> Option<T> {
        (**self).tail_bound(x)
    }
}

/// Suppression of one iteration of duration `tau` on a component at `x`: `cos²(π x τ)`.
pub fn single_iteration_suppression<T: Real>(x: EnergyRatio<T>, tau: TimeRatio<T>) -> T {
    cos2_pi(x.get() * tau.get())
}

/// Product of single-iteration suppressions over the whole schedule.
pub fn schedule_suppression<T: Real>(schedule: &Schedule<T>, x: EnergyRatio<T>) -> T {
    schedule.suppression(x.get())
}

impl<T: Real> SuppressionProfile<T> for Schedule<T> {
    fn suppression(&self, x: T) -> T {
        Schedule::suppression(self, x)
    }

    fn zeros_in(&self, lo: T, hi: T) -> Vec<T> {
        let half = T::lit(0.5);
        let mut zeros = Vec::new();
        for &tau in self.times() {
            // x = (k + 1/2) / τ
            let first = (lo * tau - half).ceil().max(T::zero());
            let mut k = first;
            loop {
                let x = (k + half) / tau;
                if x > hi {
                    break;
                }
                if x >= lo {
                    zeros.push(x);
                }
                k = k + T::one();
            }
        }
        sort_dedup(&mut zeros);
        zeros
    }
}

/// A profile with the same value everywhere. Mostly useful as a reference case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantProfile<T>(pub T);

impl<T: Real> SuppressionProfile<T> for ConstantProfile<T> {
    fn suppression(&self, _x: T) -> T {
        self.0
    }

    /// A constant profile has no isolated zeros; an identically-zero one is
    /// reported as having none as well.
    fn zeros_in(&self, _lo: T, _hi: T) -> Vec<T> {
        Vec::new()
    }

    fn tail_bound(&self, _x: T) -> Option<T> {
        Some(self.0)
    }
}

/// Wraps a closure as a profile with no known zeros.
pub struct FnProfile<F>(pub F);

impl<T: Real, F: Fn(T) -> T> SuppressionProfile<T> for FnProfile<F> {
    fn suppression(&self, x: T) -> T {
        (self.0)(x)
    }

    fn zeros_in(&self, _lo: T, _hi: T) -> Vec<T> {
        Vec::new()
    }
}

pub(crate) fn sort_dedup<T: Real>(v: &mut Vec<T>) {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite zeros"));
    v.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * b.abs().max(T::one()) * T::lit(8.0));
}
