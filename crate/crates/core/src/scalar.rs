//! Floating-point scalar abstraction shared by the closed-form layer.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar type used by the suppression formulas: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Running products of cos² factors below this value are continued in log space.
    const LOG_SPACE_THRESHOLD: Self;
    /// Below this |z|, `sin z / z` is evaluated from its Taylor series.
    const SINC_SERIES_CUTOFF: Self;

    /// Converts an `f64` literal. Panics only if the value is not representable at all.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }
}

impl Real for f64 {
    const LOG_SPACE_THRESHOLD: Self = 1e-300;
    const SINC_SERIES_CUTOFF: Self = 1e-4;
}

impl Real for f32 {
    const LOG_SPACE_THRESHOLD: Self = 1e-35;
    const SINC_SERIES_CUTOFF: Self = 1e-2;
}

/// `cos²(π ζ)` with the argument reduced to the nearest integer first, so that
/// half-integers give exactly 0 and integers exactly 1.
#[inline]
pub fn cos2_pi<T: Real>(zeta: T) -> T {
    let r = zeta - zeta.round();
    let s = (T::PI() * (T::lit(0.5) - r.abs())).sin();
    s * s
}

/// `sin²(π ζ)` with the same argument reduction as [`cos2_pi`].
#[inline]
pub fn sin2_pi<T: Real>(zeta: T) -> T {
    let r = zeta - zeta.round();
    let s = (T::PI() * r).sin();
    s * s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_trig_hits_exact_values() {
        assert_eq!(cos2_pi(0.5_f64), 0.0);
        assert_eq!(cos2_pi(7.5_f64), 0.0);
        assert_eq!(cos2_pi(3.0_f64), 1.0);
        assert_eq!(sin2_pi(12.0_f64), 0.0);
        assert_eq!(cos2_pi(0.5_f32), 0.0);
    }

    #[test]
    fn reduced_trig_matches_naive_form() {
        for i in 0..200 {
            let z = i as f64 * 0.0731 + 0.013;
            let naive = (std::f64::consts::PI * z).cos().powi(2);
            assert!((cos2_pi(z) - naive).abs() < 1e-13, "z={z}");
            let naive = (std::f64::consts::PI * z).sin().powi(2);
            assert!((sin2_pi(z) - naive).abs() < 1e-13, "z={z}");
        }
    }
}
