use serde::{Deserialize, Serialize};

use crate::error::{Result, RodeoError};
use crate::scalar::{cos2_pi, Real};
use crate::units::TimeRatio;

/// Ordered iteration times in units of T₀.
///
/// Always nonempty with strictly positive, finite entries; `total` is the sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawSchedule<T>",
    into = "RawSchedule<T>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + Deserialize<'de>"
    )
)]
pub struct Schedule<T> {
    times: Vec<T>,
    total: T,
}

#[derive(Serialize, Deserialize)]
struct RawSchedule<T> {
    times: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    total: Option<T>,
}

impl<T: Real> TryFrom<RawSchedule<T>> for Schedule<T> {
    type Error = RodeoError;

    fn try_from(raw: RawSchedule<T>) -> Result<Self> {
        let schedule = Schedule::new(raw.times)?;
        if let Some(total) = raw.total {
            let tol = T::lit(1e-9) * schedule.total.max(T::one());
            if (total - schedule.total).abs() > tol {
                return Err(RodeoError::usage(format!(
                    "schedule total {total} does not match sum of times {}",
                    schedule.total
                )));
            }
        }
        Ok(schedule)
    }
}

impl<T: Real> From<Schedule<T>> for RawSchedule<T> {
    fn from(s: Schedule<T>) -> Self {
        RawSchedule {
            total: Some(s.total),
            times: s.times,
        }
    }
}

impl<T: Real> Schedule<T> {
    pub fn new(times: Vec<T>) -> Result<Self> {
        if times.is_empty() {
            return Err(RodeoError::usage(
                "schedule must contain at least one iteration",
            ));
        }
        for &t in &times {
            TimeRatio::new(t)?;
        }
        let total = times.iter().fold(T::zero(), |acc, &t| acc + t);
        Ok(Self { times, total })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn total(&self) -> T {
        self.total
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Runs `self` then `other`.
    pub fn concat(&self, other: &Schedule<T>) -> Schedule<T> {
        let mut times = self.times.clone();
        times.extend_from_slice(&other.times);
        Schedule {
            times,
            total: self.total + other.total,
        }
    }

    /// Every time multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: T) -> Result<Schedule<T>> {
        Schedule::new(self.times.iter().map(|&t| t * factor).collect())
    }

    /// Suppression `∏ cos²(π x τ_j)` of a component at energy ratio `x`.
    ///
    /// The product is formed directly until it drops below
    /// [`Real::LOG_SPACE_THRESHOLD`], after which the remaining factors are
    /// accumulated as logarithms.
    pub fn suppression(&self, x: T) -> T {
        let mut product = T::one();
        let mut log_acc: Option<T> = None;
        for &t in &self.times {
            let f = cos2_pi(x * t);
            if f == T::zero() {
                return T::zero();
            }
            match log_acc.as_mut() {
                Some(acc) => *acc = *acc + f.ln(),
                None => {
                    product = product * f;
                    if product < T::LOG_SPACE_THRESHOLD {
                        log_acc = Some(product.ln());
                    }
                }
            }
        }
        match log_acc {
            Some(acc) => acc.exp(),
            None => product,
        }
    }

    /// Natural log of the suppression, summed factor by factor; `-inf` at an exact zero.
    pub fn log_suppression(&self, x: T) -> T {
        self.times
            .iter()
            .fold(T::zero(), |acc, &t| acc + cos2_pi(x * t).ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rejected() {
        let err = Schedule::<f64>::new(vec![]).unwrap_err();
        assert!(matches!(err, RodeoError::Usage(_)));
        assert!(Schedule::new(vec![1.0, 0.0]).is_err());
        assert!(Schedule::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn examples() {
        let s = Schedule::new(vec![1.0_f64]).unwrap();
        assert_eq!(s.suppression(2.0), 1.0);
        let s = Schedule::new(vec![1.0_f64, 0.5]).unwrap();
        assert_eq!(s.suppression(1.0), 0.0);
        let s = Schedule::new(vec![0.8129_f64]).unwrap();
        let want = (std::f64::consts::PI * 1.3 * 0.8129).cos().powi(2);
        assert!((s.suppression(1.3) - want).abs() < 1e-14);
        assert!((want - (0.05677 * std::f64::consts::PI).cos().powi(2)).abs() < 1e-4);
    }

    #[test]
    fn deep_products_survive_underflow() {
        // 600 factors of cos²(π/3) = 1/4 → 4^-600 ≈ 2.4e-361, below f64 normal range.
        let s = Schedule::new(vec![1.0_f64; 600]).unwrap();
        let log = s.log_suppression(1.0 / 3.0);
        assert!((log + 600.0 * 4f64.ln()).abs() < 1e-9);
        // log-space fallback keeps the product from collapsing early
        let s = Schedule::new(vec![1.0_f64; 400]).unwrap();
        let direct = s.suppression(1.0 / 3.0);
        assert!(direct == 0.0 || (direct.ln() + 400.0 * 4f64.ln()).abs() < 1e-6);
        let s = Schedule::new(vec![1.0_f64; 200]).unwrap();
        let v = s.suppression(1.0 / 3.0);
        assert!((v.ln() + 200.0 * 4f64.ln()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn json_round_trip_and_total_check() {
        let s = Schedule::new(vec![0.5_f64, 0.25]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"times":[0.5,0.25],"total":0.75}"#);
        let back: Schedule<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<Schedule<f64>>(r#"{"times":[0.5],"total":2}"#).is_err());
        assert!(serde_json::from_str::<Schedule<f64>>(r#"{"times":[]}"#).is_err());
    }
}
