//! Super iterations: ladders of iterations with times T/2, T/4, … whose
//! combined suppression is the squared spherical Bessel function j₀²(πζ).

use serde::{Deserialize, Serialize};

use crate::error::{Result, RodeoError};
use crate::profile::{sort_dedup, SuppressionProfile};
use crate::scalar::{cos2_pi, sin2_pi, Real};
use crate::schedule::Schedule;
use crate::units::TimeRatio;

/// Default number of rungs per super iteration.
pub const DEFAULT_DEPTH: u32 = 32;

/// Leading time of the single optimised super iteration, used by [`max_valid_energy`].
pub const SINGLE_SUPER_LEADING_TIME: f64 = 0.8129;

/// `j₀(z) = sin z / z`, with the series `1 − z²/6 + z⁴/120` near the origin.
pub fn spherical_j0<T: Real>(z: T) -> T {
    if z.abs() < T::SINC_SERIES_CUTOFF {
        let z2 = z * z;
        T::one() - z2 / T::lit(6.0) + z2 * z2 / T::lit(120.0)
    } else {
        z.sin() / z
    }
}

/// Suppression of an infinite-depth super iteration at phase count `ζ`:
/// `j₀²(πζ) = (sin πζ / πζ)²`. Vanishes exactly at positive integers.
pub fn super_suppression<T: Real>(zeta: T) -> T {
    let z = T::PI() * zeta;
    if z.abs() < T::SINC_SERIES_CUTOFF {
        let j = spherical_j0(z);
        return j * j;
    }
    sin2_pi(zeta) / (z * z)
}

/// Suppression of a super iteration truncated to `depth` rungs,
/// `∏_{k=1}^{N} cos²(πζ/2^k)`, evaluated as `j₀²(πζ) / j₀²(πζ/2^N)`.
pub fn truncated_super_suppression<T: Real>(zeta: T, depth: u32) -> T {
    let scale = T::lit(2.0).powi(depth as i32);
    let inner = zeta / scale;
    let den = sin2_pi(inner);
    if den == T::zero() {
        // ζ is a multiple of 2^N: every cos² factor is exactly one
        return T::one();
    }
    let z = T::PI() * zeta;
    if z.abs() < T::SINC_SERIES_CUTOFF {
        let a = spherical_j0(z);
        let b = spherical_j0(z / scale);
        return (a * a) / (b * b);
    }
    sin2_pi(zeta) / (scale * scale * den)
}

/// The same truncated product evaluated factor by factor. Slower; kept as a
/// reference route for the ratio form.
pub fn truncated_super_suppression_product<T: Real>(zeta: T, depth: u32) -> T {
    let mut p = T::one();
    let mut z = zeta;
    for _ in 0..depth {
        z = z * T::lit(0.5);
        p = p * cos2_pi(z);
    }
    p
}

/// Highest energy ratio for which a single truncated super iteration with
/// leading time `leading_time` keeps the tabulated worst-case bound:
/// `(2^N − 1.430) / leading_time`.
pub fn max_valid_energy<T: Real>(depth: u32, leading_time: T) -> T {
    (T::lit(2.0).powi(depth as i32) - T::lit(1.430)) / leading_time
}

/// One super iteration: nominal duration `base_time` (twice its leading rung)
/// and `depth` rungs `base_time/2, …, base_time/2^depth`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SuperIteration<T> {
    pub base_time: T,
    pub depth: u32,
}

impl<T: Real> SuperIteration<T> {
    pub fn new(base_time: T, depth: u32) -> Result<Self> {
        TimeRatio::new(base_time)?;
        if depth == 0 {
            return Err(RodeoError::usage(
                "super iteration depth must be at least 1",
            ));
        }
        Ok(Self { base_time, depth })
    }

    pub fn rung_times(&self) -> impl Iterator<Item = T> + '_ {
        let mut t = self.base_time;
        (0..self.depth).map(move |_| {
            t = t * T::lit(0.5);
            t
        })
    }

    /// Actual running time, `base_time · (1 − 2^{-depth})`.
    pub fn expanded_time(&self) -> T {
        self.base_time * (T::one() - T::lit(0.5).powi(self.depth as i32))
    }

    pub fn suppression(&self, x: T) -> T {
        truncated_super_suppression(x * self.base_time, self.depth)
    }
}

/// Ordered list of super iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawSuperSchedule<T>",
    into = "RawSuperSchedule<T>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + Deserialize<'de>"
    )
)]
pub struct SuperSchedule<T> {
    supers: Vec<SuperIteration<T>>,
    total: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
struct RawSuperSchedule<T> {
    supers: Vec<SuperIteration<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    total: Option<T>,
}

impl<T: Real> TryFrom<RawSuperSchedule<T>> for SuperSchedule<T> {
    type Error = RodeoError;

    fn try_from(raw: RawSuperSchedule<T>) -> Result<Self> {
        let s = SuperSchedule::new(raw.supers)?;
        if let Some(total) = raw.total {
            if (total - s.total).abs() > T::lit(1e-9) * s.total.max(T::one()) {
                return Err(RodeoError::usage(format!(
                    "super schedule total {total} does not match {}",
                    s.total
                )));
            }
        }
        Ok(s)
    }
}

impl<T: Real> From<SuperSchedule<T>> for RawSuperSchedule<T> {
    fn from(s: SuperSchedule<T>) -> Self {
        Self {
            total: Some(s.total),
            supers: s.supers,
        }
    }
}

impl<T: Real> SuperSchedule<T> {
    pub fn new(supers: Vec<SuperIteration<T>>) -> Result<Self> {
        if supers.is_empty() {
            return Err(RodeoError::usage(
                "super schedule must contain at least one super iteration",
            ));
        }
        for s in &supers {
            SuperIteration::new(s.base_time, s.depth)?;
        }
        let total = supers
            .iter()
            .fold(T::zero(), |acc, s| acc + s.expanded_time());
        Ok(Self { supers, total })
    }

    /// All super iterations share `depth`.
    pub fn from_base_times(base_times: &[T], depth: u32) -> Result<Self> {
        Self::new(
            base_times
                .iter()
                .map(|&b| SuperIteration {
                    base_time: b,
                    depth,
                })
                .collect(),
        )
    }

    pub fn supers(&self) -> &[SuperIteration<T>] {
        &self.supers
    }

    /// Exact running time of the expansion.
    pub fn total(&self) -> T {
        self.total
    }

    /// Sum of base times (the infinite-depth running time).
    pub fn nominal_total(&self) -> T {
        self.supers
            .iter()
            .fold(T::zero(), |acc, s| acc + s.base_time)
    }

    pub fn base_times(&self) -> Vec<T> {
        self.supers.iter().map(|s| s.base_time).collect()
    }

    pub fn iteration_count(&self) -> usize {
        self.supers.iter().map(|s| s.depth as usize).sum()
    }

    /// Flat schedule listing every rung in order.
    pub fn expand(&self) -> Schedule<T> {
        let times = self.supers.iter().flat_map(|s| s.rung_times()).collect();
        Schedule::new(times).expect("rungs of a valid super schedule are positive")
    }

    /// The same base times at infinite depth.
    pub fn exact_profile(&self) -> BesselProfile<T> {
        BesselProfile::new(self.base_times()).expect("valid base times")
    }
}

impl<T: Real> SuppressionProfile<T> for SuperSchedule<T> {
    fn suppression(&self, x: T) -> T {
        self.supers
            .iter()
            .fold(T::one(), |acc, s| acc * s.suppression(x))
    }

    /// Zeros of a depth-N rung ladder at base time b: `x = m / b` for positive
    /// integers m not divisible by 2^N.
    fn zeros_in(&self, lo: T, hi: T) -> Vec<T> {
        let mut zeros = Vec::new();
        for s in &self.supers {
            let period = T::lit(2.0).powi(s.depth as i32);
            let mut m = (lo * s.base_time).ceil().max(T::one());
            loop {
                let x = m / s.base_time;
                if x > hi {
                    break;
                }
                if x >= lo && (m % period) != T::zero() {
                    zeros.push(x);
                }
                m = m + T::one();
            }
        }
        sort_dedup(&mut zeros);
        zeros
    }
}

/// Product of infinite-depth super-iteration suppressions `∏_k j₀²(π x b_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselProfile<T> {
    base_times: Vec<T>,
}

impl<T: Real> BesselProfile<T> {
    pub fn new(base_times: Vec<T>) -> Result<Self> {
        if base_times.is_empty() {
            return Err(RodeoError::usage("profile needs at least one base time"));
        }
        for &b in &base_times {
            TimeRatio::new(b)?;
        }
        Ok(Self { base_times })
    }

    pub fn base_times(&self) -> &[T] {
        &self.base_times
    }

    pub fn min_base_time(&self) -> T {
        self.base_times.iter().copied().fold(T::infinity(), T::min)
    }

    /// The same profile with every base time multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            base_times: self.base_times.iter().map(|&b| b * factor).collect(),
        }
    }

    pub fn with_depth(&self, depth: u32) -> Result<SuperSchedule<T>> {
        SuperSchedule::from_base_times(&self.base_times, depth)
    }
}

impl<T: Real> SuppressionProfile<T> for BesselProfile<T> {
    fn suppression(&self, x: T) -> T {
        self.base_times
            .iter()
            .fold(T::one(), |acc, &b| acc * super_suppression(x * b))
    }

    fn zeros_in(&self, lo: T, hi: T) -> Vec<T> {
        let mut zeros = Vec::new();
        for &b in &self.base_times {
            let mut m = (lo * b).ceil().max(T::one());
            loop {
                let x = m / b;
                if x > hi {
                    break;
                }
                if x >= lo {
                    zeros.push(x);
                }
                m = m + T::one();
            }
        }
        sort_dedup(&mut zeros);
        zeros
    }

    /// `∏_k 1/(π x b_k)²`, valid for `x > 0` since `j₀² ≤ 1/z²`.
    fn tail_bound(&self, x: T) -> Option<T> {
        if !(x > T::zero()) {
            return None;
        }
        Some(self.base_times.iter().fold(T::one(), |acc, &b| {
            let z = T::PI() * x * b;
            acc * (T::one() / (z * z)).min(T::one())
        }))
    }
}
