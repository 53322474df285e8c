use serde::{Deserialize, Serialize};

use crate::error::{Result, RodeoError};
use crate::scalar::Real;

/// One excited component: energy ratio `x ≥ 1` and probability weight `w = |α_c|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcitedComponent<T> {
    pub x: T,
    pub w: T,
}

/// Ground-state weight plus a discrete list of excited components.
///
/// Weights are non-negative and sum to one; every excited energy is at least Δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawSpectrum<T>",
    into = "RawSpectrum<T>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + Deserialize<'de>"
    )
)]
pub struct DiscreteSpectrum<T> {
    ground_weight: T,
    excited: Vec<ExcitedComponent<T>>,
}

#[derive(Serialize, Deserialize)]
struct RawSpectrum<T> {
    ground_weight: T,
    excited: Vec<ExcitedComponent<T>>,
}

impl<T: Real> TryFrom<RawSpectrum<T>> for DiscreteSpectrum<T> {
    type Error = RodeoError;

    fn try_from(raw: RawSpectrum<T>) -> Result<Self> {
        DiscreteSpectrum::new(raw.ground_weight, raw.excited)
    }
}

impl<T: Real> From<DiscreteSpectrum<T>> for RawSpectrum<T> {
    fn from(s: DiscreteSpectrum<T>) -> Self {
        RawSpectrum {
            ground_weight: s.ground_weight,
            excited: s.excited,
        }
    }
}

impl<T: Real> DiscreteSpectrum<T> {
    pub fn new(ground_weight: T, excited: Vec<ExcitedComponent<T>>) -> Result<Self> {
        if !(ground_weight.is_finite() && ground_weight >= T::zero()) {
            return Err(RodeoError::domain(format!(
                "ground weight {ground_weight} invalid"
            )));
        }
        let mut sum = ground_weight;
        for c in &excited {
            if !(c.w.is_finite() && c.w >= T::zero()) {
                return Err(RodeoError::domain(format!("weight {} invalid", c.w)));
            }
            if !(c.x.is_finite() && c.x >= T::one()) {
                return Err(RodeoError::domain(format!(
                    "excited energy ratio {} is below the gap",
                    c.x
                )));
            }
            sum = sum + c.w;
        }
        let n = T::from_usize(excited.len() + 1).unwrap_or_else(T::one);
        let tol = T::lit(1e-12).max(T::lit(16.0) * T::epsilon() * n);
        if (sum - T::one()).abs() > tol {
            return Err(RodeoError::domain(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self {
            ground_weight,
            excited,
        })
    }

    /// Builds a spectrum from arbitrary non-negative weights, normalising them to one.
    pub fn normalized(ground_weight: T, excited: Vec<ExcitedComponent<T>>) -> Result<Self> {
        let sum = excited.iter().fold(ground_weight, |acc, c| acc + c.w);
        if !(sum > T::zero()) {
            return Err(RodeoError::domain("total weight must be positive"));
        }
        let excited = excited
            .into_iter()
            .map(|c| ExcitedComponent {
                x: c.x,
                w: c.w / sum,
            })
            .collect();
        Self::new(ground_weight / sum, excited)
    }

    pub fn ground_weight(&self) -> T {
        self.ground_weight
    }

    pub fn excited(&self) -> &[ExcitedComponent<T>] {
        &self.excited
    }

    pub fn excited_weight(&self) -> T {
        self.excited.iter().fold(T::zero(), |acc, c| acc + c.w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(x: f64, w: f64) -> ExcitedComponent<f64> {
        ExcitedComponent { x, w }
    }

    #[test]
    fn validation() {
        assert!(DiscreteSpectrum::new(0.5, vec![comp(1.0, 0.5)]).is_ok());
        assert!(DiscreteSpectrum::new(0.5, vec![comp(0.9, 0.5)]).is_err());
        assert!(DiscreteSpectrum::new(0.5, vec![comp(2.0, 0.4)]).is_err());
        assert!(DiscreteSpectrum::new(0.5, vec![comp(2.0, -0.1), comp(3.0, 0.6)]).is_err());
        assert!(DiscreteSpectrum::new(1.0, vec![]).is_ok());
    }

    #[test]
    fn json_shape() {
        let s: DiscreteSpectrum<f64> =
            serde_json::from_str(r#"{"ground_weight":0.25,"excited":[{"x":1.5,"w":0.75}]}"#)
                .unwrap();
        assert_eq!(s.ground_weight(), 0.25);
        assert_eq!(s.excited()[0], comp(1.5, 0.75));
        assert!(serde_json::from_str::<DiscreteSpectrum<f64>>(
            r#"{"ground_weight":0.25,"excited":[{"x":1.5,"w":0.5}]}"#
        )
        .is_err());
    }
}
