//! Tanh-sinh (double exponential) quadrature for integrands with endpoint
//! singularities.
//!
//! The integrand receives the abscissa together with its distances to both
//! interval ends. Near an endpoint those distances are far more accurate than
//! `x - a` computed in floating point, which is what makes logarithmic
//! singularities such as `log sin²(π ζ u)` integrable to full precision.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Result, RodeoError};

/// Abscissae beyond |t| = T_MAX contribute below ~1e-35 of the interval length.
const T_MAX: f64 = 4.0;
const MAX_LEVEL: u32 = 12;
const MIN_LEVEL: u32 = 3;

#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for TanhSinh {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-15,
        }
    }
}

/// Point passed to the integrand.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub x: f64,
    /// `x - a`, computed without cancellation.
    pub from_left: f64,
    /// `b - x`, computed without cancellation.
    pub from_right: f64,
}

impl TanhSinh {
    pub fn new(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over `[a, b]`, returning the estimate and the last level difference.
    pub fn integrate<F>(&self, a: f64, b: f64, f: F) -> Result<(f64, f64)>
    where
        F: Fn(Node) -> f64,
    {
        if !(a.is_finite() && b.is_finite()) || b < a {
            return Err(RodeoError::domain(format!("bad interval [{a}, {b}]")));
        }
        if a == b {
            return Ok((0.0, 0.0));
        }
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);

        // one evaluation at t (both signs when t > 0), weighted by dx/dt
        let eval_pair = |t: f64| -> f64 {
            let u = FRAC_PI_2 * t.sinh();
            let cosh_u = u.cosh();
            let weight = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
            if t == 0.0 {
                return weight
                    * f(Node {
                        x: mid,
                        from_left: half,
                        from_right: half,
                    });
            }
            // 1 - tanh(u), accurate for large u
            let comp = (-u).exp() / cosh_u;
            let near = half * comp;
            if near <= 0.0 || weight == 0.0 {
                return 0.0;
            }
            let far = 2.0 * half - near;
            let right = f(Node {
                x: b - near,
                from_left: far,
                from_right: near,
            });
            let left = f(Node {
                x: a + near,
                from_left: near,
                from_right: far,
            });
            weight * (left + right)
        };

        let mut h = 1.0;
        let mut sum = eval_pair(0.0);
        let mut k = 1;
        while k as f64 * h <= T_MAX {
            sum += eval_pair(k as f64 * h);
            k += 1;
        }
        let mut estimate = half * h * sum;
        let mut diff = f64::INFINITY;
        for level in 1..=MAX_LEVEL {
            h *= 0.5;
            let mut k = 1;
            while k as f64 * h <= T_MAX {
                sum += eval_pair(k as f64 * h);
                k += 2;
            }
            let next = half * h * sum;
            diff = (next - estimate).abs();
            estimate = next;
            if !estimate.is_finite() {
                return Err(RodeoError::numeric("tanh-sinh produced a non-finite value"));
            }
            if level >= MIN_LEVEL && diff <= self.rel_tol * estimate.abs() + self.abs_tol {
                return Ok((estimate, diff));
            }
        }
        Err(RodeoError::numeric(format!(
            "tanh-sinh did not converge on [{a}, {b}]: estimate {estimate}, last change {diff}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_smooth() {
        let q = TanhSinh::default();
        let (v, _) = q.integrate(0.0, 2.0, |n| n.x * n.x).unwrap();
        assert!((v - 8.0 / 3.0).abs() < 1e-13);
        let (v, _) = q
            .integrate(0.0, std::f64::consts::PI, |n| n.x.sin())
            .unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn log_endpoint_singularity() {
        // ∫₀¹ ln u du = -1
        let q = TanhSinh::default();
        let (v, _) = q.integrate(0.0, 1.0, |n| n.from_left.ln()).unwrap();
        assert!((v + 1.0).abs() < 1e-12, "{v}");
        // ∫₀^{1} ln sin²(π u) du = -2 ln 2, singular at both ends
        let (v, _) = q
            .integrate(0.0, 1.0, |n| {
                let d = n.from_left.min(n.from_right);
                (std::f64::consts::PI * d).sin().powi(2).ln()
            })
            .unwrap();
        assert!((v + 2.0 * 2f64.ln()).abs() < 1e-11, "{v}");
    }

    #[test]
    fn inverse_sqrt_singularity() {
        let q = TanhSinh::default();
        let (v, _) = q.integrate(0.0, 1.0, |n| 1.0 / n.from_left.sqrt()).unwrap();
        assert!((v - 2.0).abs() < 1e-10, "{v}");
    }
}
