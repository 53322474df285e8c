//! The random rodeo algorithm: iteration times drawn from a half-normal
//! distribution, its ensemble statistics and their fluctuations.
//!
//! Throughout, `zeta` is the phase count per iteration measured with the mean
//! iteration time (`ζ = x · T̄`), and `zeta_tot = n · zeta`.

mod geometric;
mod montecarlo;
mod separatrix;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, RodeoError};
use crate::scalar::Real;
use crate::units::TimeRatio;

pub use geometric::{geometric_log_integral, rra_geometric_mean};
pub use montecarlo::{
    fraction_below, monte_carlo_log_suppressions, monte_carlo_statistics, sample_schedule,
    MonteCarloSummary,
};
pub use separatrix::{
    best_over_continuous_n, min_time_for_mean_suppression, separatrix_fit_for, solve_separatrix,
    SeparatrixFit,
};

/// `π³ ζ²`, the exponent shared by all closed forms.
#[inline]
fn decay<T: Real>(zeta: T) -> T {
    let pi = T::PI();
    pi * pi * pi * zeta * zeta
}

#[inline]
fn pow_n<T: Real>(base: T, n: T) -> T {
    (n * base.ln()).exp()
}

fn as_real<T: Real>(n: u32) -> T {
    T::from_u32(n).expect("iteration count representable")
}

/// Ensemble mean of the suppression after `n` iterations:
/// `2^{-n} (1 + e^{-π³ζ²})^n`.
pub fn rra_mean_per_iteration<T: Real>(zeta: T, n: u32) -> T {
    let per = T::lit(0.5) * (T::one() + (-decay(zeta)).exp());
    pow_n(per, as_real(n))
}

/// The ensemble mean in terms of the total phase count: `ζ = ζ_tot / n`.
pub fn rra_mean_total<T: Real>(zeta_tot: T, n: u32) -> T {
    if n == 0 {
        return T::one();
    }
    rra_mean_per_iteration(zeta_tot / as_real(n), n)
}

/// Root-mean-square suppression:
/// `(3/8)^{n/2} (1 + e^{-4π³ζ²}/3 + 4e^{-π³ζ²}/3)^{n/2}`.
pub fn rra_rms<T: Real>(zeta: T, n: u32) -> T {
    let a = decay(zeta);
    let three = T::lit(3.0);
    let inner = T::one() + (-T::lit(4.0) * a).exp() / three + T::lit(4.0) * (-a).exp() / three;
    pow_n(T::lit(0.375) * inner, as_real::<T>(n) * T::lit(0.5))
}

/// Ratio of the standard deviation to the mean of the suppression.
pub fn rra_sigma_over_mean<T: Real>(zeta: T, n: u32) -> T {
    let a = decay(zeta);
    let three = T::lit(3.0);
    let e1 = (-a).exp();
    let num = T::one() + (-T::lit(4.0) * a).exp() / three + T::lit(4.0) * e1 / three;
    let den = (T::one() + e1) * (T::one() + e1);
    let growth = T::lit(1.5) * num / den;
    let radicand = (as_real::<T>(n) * growth.ln()).exp_m1();
    radicand.max(T::zero()).sqrt()
}

/// The three ensemble statistics of the suppression factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Geometric,
    Arithmetic,
    Rms,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [Statistic::Geometric, Statistic::Arithmetic, Statistic::Rms];

    /// Log of the statistic contributed by one iteration at phase count `zeta`;
    /// the n-iteration statistic is `exp(n · g(ζ))`.
    pub fn log_per_iteration(self, zeta: f64) -> Result<f64> {
        Ok(match self {
            Statistic::Arithmetic => rra_mean_per_iteration(zeta, 1).ln(),
            Statistic::Rms => rra_rms(zeta, 2).ln() * 0.5,
            Statistic::Geometric => geometric_log_integral(zeta)?,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Geometric => "geometric",
            Statistic::Arithmetic => "arithmetic",
            Statistic::Rms => "rms",
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = RodeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(Statistic::Geometric),
            "arithmetic" | "mean" => Ok(Statistic::Arithmetic),
            "rms" => Ok(Statistic::Rms),
            other => Err(RodeoError::usage(format!("unknown statistic '{other}'"))),
        }
    }
}

/// Arithmetic mean, geometric mean, RMS and σ/mean at fixed `(ζ, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStatistics {
    pub zeta: f64,
    pub n: u32,
    pub arithmetic_mean: f64,
    pub geometric_mean: f64,
    pub rms: f64,
    pub sigma_over_mean: f64,
}

impl EnsembleStatistics {
    pub fn closed_form(zeta: f64, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(RodeoError::usage("n must be at least 1"));
        }
        if !(zeta >= 0.0 && zeta.is_finite()) {
            return Err(RodeoError::domain(format!(
                "zeta must be non-negative, got {zeta}"
            )));
        }
        Ok(Self {
            zeta,
            n,
            arithmetic_mean: rra_mean_per_iteration(zeta, n),
            geometric_mean: rra_geometric_mean(zeta, n)?,
            rms: rra_rms(zeta, n),
            sigma_over_mean: rra_sigma_over_mean(zeta, n),
        })
    }
}

/// Half-normal iteration times with mean `mean_time`.
///
/// The scale of the underlying normal is `mean_time · √(π/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfNormalTimeDistribution {
    mean_time: f64,
}

impl HalfNormalTimeDistribution {
    pub fn new(mean_time: f64) -> Result<Self> {
        TimeRatio::new(mean_time)?;
        Ok(Self { mean_time })
    }

    pub fn mean_time(&self) -> f64 {
        self.mean_time
    }

    pub fn scale(&self) -> f64 {
        self.mean_time * std::f64::consts::FRAC_PI_2.sqrt()
    }

    pub fn rms_time(&self) -> f64 {
        self.scale()
    }

    /// Density at `t ≥ 0`.
    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let s = self.scale();
        (2.0 / std::f64::consts::PI).sqrt() / s * (-0.5 * (t / s).powi(2)).exp()
    }
}

impl Distribution<f64> for HalfNormalTimeDistribution {
    /// Never returns exactly zero.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let z: f64 = StandardNormal.sample(rng);
            let t = z.abs() * self.scale();
            if t > 0.0 {
                return t;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_examples() {
        assert_eq!(rra_mean_per_iteration(0.0_f64, 3), 1.0);
        assert!((rra_mean_per_iteration(50.0_f64, 6) - 0.015625).abs() < 1e-9);
        let want = 0.5 * (1.0 + (-std::f64::consts::PI.powi(3) * 0.04).exp());
        assert!((rra_mean_per_iteration(0.2_f64, 1) - want).abs() < 1e-15);
        assert!((want - 0.64466).abs() < 1e-4);
        assert_eq!(rra_mean_total(0.0_f64, 7), 1.0);
    }

    #[test]
    fn rms_examples() {
        for n in 1..10 {
            assert!((rra_rms(0.0_f64, n) - 1.0).abs() < 1e-14);
        }
        assert!((rra_rms(40.0_f64, 2) - 0.375).abs() < 1e-9);
    }

    #[test]
    fn sigma_ratio_examples() {
        assert_eq!(rra_sigma_over_mean(0.0_f64, 5), 0.0);
        let v = rra_sigma_over_mean(30.0_f64, 20);
        assert!((v / 1.5f64.powi(10) - 1.0).abs() < 0.01, "{v}");
        let (z, n) = (2.0_f64, 8);
        let m = rra_mean_per_iteration(z, n);
        let r = rra_rms(z, n);
        let via = ((r * r) / (m * m) - 1.0).sqrt();
        assert!((rra_sigma_over_mean(z, n) - via).abs() < 1e-12 * via.max(1.0));
    }

    #[test]
    fn sigma_ratio_grows_with_n() {
        for &z in &[1.0_f64, 1.5, 3.0, 10.0] {
            for n in 1..60 {
                assert!(rra_sigma_over_mean(z, n + 1) > rra_sigma_over_mean(z, n));
            }
        }
    }

    #[test]
    fn half_normal_scale() {
        let d = HalfNormalTimeDistribution::new(1.0).unwrap();
        assert!((d.scale() - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-15);
        assert!(HalfNormalTimeDistribution::new(0.0).is_err());
        // density integrates to one and has mean one
        let q = crate::quadrature::TanhSinh::default();
        let (mass, _) = q.integrate(0.0, 15.0, |n| d.pdf(n.x)).unwrap();
        let (mean, _) = q.integrate(0.0, 15.0, |n| n.x * d.pdf(n.x)).unwrap();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f32_closed_forms() {
        let a = rra_mean_per_iteration(0.3_f32, 4) as f64;
        let b = rra_mean_per_iteration(0.3_f64, 4);
        assert!((a - b).abs() < 1e-6);
    }
}
