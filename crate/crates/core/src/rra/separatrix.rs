use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RodeoError};
use crate::search::{bisect, golden_min};

use super::Statistic;

/// Exponential envelope `exp(−β ζ_tot)` reached at `n = α ζ_tot`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparatrixFit {
    pub alpha: f64,
    pub beta: f64,
}

impl SeparatrixFit {
    pub fn envelope(&self, zeta_tot: f64) -> f64 {
        (-self.beta * zeta_tot).exp()
    }
}

/// Search range for α (iterations per unit ζ_tot) in the generic minimisation.
const ALPHA_RANGE: (f64, f64) = (0.5, 20.0);

/// Stationarity condition of `n log((1 + e^{−π³ζ_tot²/n²})/2)` in `α = n/ζ_tot`:
/// `log((1 + e^{−c})/2) + 2c / (1 + e^{c}) = 0` with `c = π³/α²`.
fn arithmetic_residual(alpha: f64) -> f64 {
    let c = std::f64::consts::PI.powi(3) / (alpha * alpha);
    (0.5 * (1.0 + (-c).exp())).ln() + 2.0 * c / (1.0 + c.exp())
}

/// Separatrix of the arithmetic-mean suppression, by bisection on `[3, 6]`.
pub fn solve_separatrix() -> Result<SeparatrixFit> {
    let alpha = bisect(arithmetic_residual, 3.0, 6.0, 1e-15, 1e-12, 200)?;
    let c = std::f64::consts::PI.powi(3) / (alpha * alpha);
    let beta = -alpha * (0.5 * (1.0 + (-c).exp())).ln();
    Ok(SeparatrixFit { alpha, beta })
}

/// Separatrix for any of the three statistics: minimises `α · g(1/α)` over α,
/// where `g` is the per-iteration log statistic.
pub fn separatrix_fit_for(statistic: Statistic) -> Result<SeparatrixFit> {
    if statistic == Statistic::Arithmetic {
        return solve_separatrix();
    }
    let failure = RefCell::new(None);
    let objective = |alpha: f64| match statistic.log_per_iteration(1.0 / alpha) {
        Ok(g) => alpha * g,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::INFINITY
        }
    };
    let (alpha, value) = golden_min(objective, ALPHA_RANGE.0, ALPHA_RANGE.1, 1e-9);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if alpha <= ALPHA_RANGE.0 + 1e-6 || alpha >= ALPHA_RANGE.1 - 1e-6 {
        return Err(RodeoError::numeric(format!(
            "separatrix minimum for {} hit the search boundary at α = {alpha}",
            statistic.name()
        )));
    }
    Ok(SeparatrixFit {
        alpha,
        beta: -value,
    })
}

/// Smallest value of the statistic at fixed `zeta_tot` with `n` treated as a
/// continuous variable. Returns `(n, value)`.
pub fn best_over_continuous_n(statistic: Statistic, zeta_tot: f64) -> Result<(f64, f64)> {
    if !(zeta_tot > 0.0 && zeta_tot.is_finite()) {
        return Err(RodeoError::domain(format!(
            "zeta_tot must be positive, got {zeta_tot}"
        )));
    }
    let failure = RefCell::new(None);
    let objective = |n: f64| match statistic.log_per_iteration(zeta_tot / n) {
        Ok(g) => n * g,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::INFINITY
        }
    };
    let (n, log_value) = golden_min(
        objective,
        ALPHA_RANGE.0 * zeta_tot,
        ALPHA_RANGE.1 * zeta_tot,
        1e-9 * zeta_tot,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((n, log_value.exp()))
}

/// Total time (units of T₀) below which no iteration count brings the mean
/// suppression of every component with `x ≥ 1` down to `target`: `−ln(S)/β`.
pub fn min_time_for_mean_suppression(target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(RodeoError::domain(format!(
            "target suppression must lie in (0, 1), got {target}"
        )));
    }
    Ok(-target.ln() / solve_separatrix()?.beta)
}
