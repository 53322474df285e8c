//! Dimensionless energy, time and phase quantities.
//!
//! Energies are measured in units of the gap Δ and times in units of the
//! period T₀ of the lowest excitation, so the phase count of a component is
//! simply `ζ = x · τ` with no factors of 2π or ħ.

use crate::error::{Result, RodeoError};
use crate::scalar::Real;

macro_rules! ratio_newtype {
    ($(#[$meta:meta])* $name:ident, $what:literal, $positive:expr) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
        pub struct $name<T>(T);

        impl<T: Real> $name<T> {
            pub fn new(value: T) -> Result<Self> {
                if !value.is_finite() {
                    return Err(RodeoError::domain(format!("{} must be finite, got {value}", $what)));
                }
                let ok = if $positive { value > T::zero() } else { value >= T::zero() };
                if !ok {
                    return Err(RodeoError::domain(format!(
                        "{} must be {}, got {value}",
                        $what,
                        if $positive { "positive" } else { "non-negative" }
                    )));
                }
                Ok(Self(value))
            }

            #[inline]
            pub fn get(self) -> T {
                self.0
            }
        }
    };
}

ratio_newtype!(
    /// Energy above the ground state in units of Δ (`x = E/Δ`).
    EnergyRatio,
    "energy ratio",
    false
);

ratio_newtype!(
    /// Time in units of T₀ (`τ = T/T₀`).
    TimeRatio,
    "time ratio",
    true
);

ratio_newtype!(
    /// Number of phase periods accumulated, `ζ = x · τ`.
    PhaseCount,
    "phase count",
    false
);

impl<T: Real> EnergyRatio<T> {
    /// The ground state, `x = 0`.
    pub fn ground() -> Self {
        Self(T::zero())
    }

    /// Whether this energy is admissible for an excited component (`x ≥ 1`).
    pub fn is_excited(self) -> bool {
        self.0 >= T::one()
    }
}

impl<T: Real> PhaseCount<T> {
    pub fn of(x: EnergyRatio<T>, tau: TimeRatio<T>) -> Self {
        Self(x.0 * tau.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_values() {
        assert!(TimeRatio::new(0.0_f64).is_err());
        assert!(TimeRatio::new(-1.0_f64).is_err());
        assert!(TimeRatio::new(f64::INFINITY).is_err());
        assert!(EnergyRatio::new(f64::NAN).is_err());
        assert!(EnergyRatio::new(-0.1_f64).is_err());
        assert!(EnergyRatio::new(0.0_f64).is_ok());
        assert!(PhaseCount::new(-1e-9_f64).is_err());
    }

    #[test]
    fn phase_is_product() {
        let x = EnergyRatio::new(2.5_f64).unwrap();
        let t = TimeRatio::new(0.4_f64).unwrap();
        assert_eq!(PhaseCount::of(x, t).get(), 1.0);
        assert!(x.is_excited());
        assert!(!EnergyRatio::new(0.5_f32).unwrap().is_excited());
    }
}
