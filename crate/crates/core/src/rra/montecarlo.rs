use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RodeoError};
use crate::rng::StreamId;
use crate::scalar::cos2_pi;
use crate::schedule::Schedule;

use super::{EnsembleStatistics, HalfNormalTimeDistribution};

/// `n` independent half-normal iteration times drawn from `stream`.
pub fn sample_schedule(
    n: u32,
    dist: &HalfNormalTimeDistribution,
    stream: StreamId,
) -> Result<Schedule<f64>> {
    if n == 0 {
        return Err(RodeoError::usage("n must be at least 1"));
    }
    let mut rng = stream.rng();
    Schedule::new(draw_times(&mut rng, n, dist).collect())
}

fn draw_times<'a, R: Rng>(
    rng: &'a mut R,
    n: u32,
    dist: &'a HalfNormalTimeDistribution,
) -> impl Iterator<Item = f64> + 'a {
    (0..n).map(move |_| dist.sample(rng))
}

/// Empirical statistics of the suppression at fixed `ζ` over random schedules,
/// with standard errors and the sample median.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub stats: EnsembleStatistics,
    pub trials: u64,
    pub median: f64,
    pub mean_std_error: f64,
    pub rms_std_error: f64,
    /// Standard error of the mean of `ln s` (the log of the geometric mean).
    pub log_mean_std_error: f64,
    /// Sample skewness of `ln s`.
    pub log_skewness: f64,
}

/// Samples `trials` mean-one half-normal schedules of length `n`, trial `i`
/// drawing from stream `(seed, i)`, and evaluates `ln s` at phase count `zeta`.
pub fn monte_carlo_log_suppressions(zeta: f64, n: u32, trials: u64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 || trials == 0 {
        return Err(RodeoError::usage("n and trials must be at least 1"));
    }
    if !(zeta >= 0.0 && zeta.is_finite()) {
        return Err(RodeoError::domain(format!(
            "zeta must be non-negative, got {zeta}"
        )));
    }
    let dist = HalfNormalTimeDistribution::new(1.0)?;
    Ok((0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = StreamId::new(seed, i).rng();
            draw_times(&mut rng, n, &dist)
                .map(|t| cos2_pi(zeta * t).ln())
                .sum()
        })
        .collect())
}

pub fn monte_carlo_statistics(
    zeta: f64,
    n: u32,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloSummary> {
    let logs = monte_carlo_log_suppressions(zeta, n, trials, seed)?;
    let count = logs.len() as f64;

    let mean = |f: &dyn Fn(f64) -> f64| logs.iter().map(|&l| f(l)).sum::<f64>() / count;
    let var = |f: &dyn Fn(f64) -> f64, m: f64| {
        if logs.len() < 2 {
            0.0
        } else {
            logs.iter().map(|&l| (f(l) - m).powi(2)).sum::<f64>() / (count - 1.0)
        }
    };

    let s_mean = mean(&|l| l.exp());
    let s_var = var(&|l| l.exp(), s_mean);
    let s2_mean = mean(&|l| (2.0 * l).exp());
    let s2_var = var(&|l| (2.0 * l).exp(), s2_mean);
    let log_mean = mean(&|l| l);
    let log_var = if log_mean.is_finite() {
        var(&|l| l, log_mean)
    } else {
        f64::NAN
    };
    let log_skewness = if log_var > 0.0 {
        let m3 = logs.iter().map(|&l| (l - log_mean).powi(3)).sum::<f64>() / count;
        let m2 = logs.iter().map(|&l| (l - log_mean).powi(2)).sum::<f64>() / count;
        m3 / m2.powf(1.5)
    } else {
        0.0
    };

    let rms = s2_mean.sqrt();
    let stats = EnsembleStatistics {
        zeta,
        n,
        arithmetic_mean: s_mean,
        geometric_mean: log_mean.exp(),
        rms,
        sigma_over_mean: if s_mean > 0.0 {
            s_var.sqrt() / s_mean
        } else {
            0.0
        },
    };
    Ok(MonteCarloSummary {
        stats,
        trials,
        median: median(logs).exp(),
        mean_std_error: (s_var / count).sqrt(),
        rms_std_error: if rms > 0.0 {
            (s2_var / count).sqrt() / (2.0 * rms)
        } else {
            0.0
        },
        log_mean_std_error: (log_var / count).sqrt(),
        log_skewness,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    let len = v.len();
    let mid = len / 2;
    let cmp = |a: &f64, b: &f64| a.total_cmp(b);
    let (_, upper, _) = v.select_nth_unstable_by(mid, cmp);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

/// Fraction of the energy-ratio grid where the schedule suppresses below `threshold`.
pub fn fraction_below(schedule: &Schedule<f64>, grid: &[f64], threshold: f64) -> f64 {
    if grid.is_empty() {
        return 0.0;
    }
    let hits = grid
        .iter()
        .filter(|&&x| schedule.suppression(x) < threshold)
        .count();
    hits as f64 / grid.len() as f64
}
