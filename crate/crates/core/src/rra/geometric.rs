use crate::error::{Result, RodeoError};
use crate::quadrature::TanhSinh;

use super::HalfNormalTimeDistribution;

/// Tail of the half-normal beyond this many scale units is dropped.
const TAIL_SCALES: f64 = 10.0;

/// `∫ log cos²(π T ζ) p(T) dT` over the mean-one half-normal density.
///
/// The domain is split at every zero `T_k = (k + 1/2)/ζ` of the cosine and
/// each piece is integrated by tanh-sinh, evaluating the logarithm through
/// the distance to the nearest zero so the endpoint singularities stay exact.
pub fn geometric_log_integral(zeta: f64) -> Result<f64> {
    if !(zeta >= 0.0 && zeta.is_finite()) {
        return Err(RodeoError::domain(format!(
            "zeta must be non-negative, got {zeta}"
        )));
    }
    if zeta == 0.0 {
        return Ok(0.0);
    }
    let dist = HalfNormalTimeDistribution::new(1.0)?;
    let end = TAIL_SCALES * dist.scale();
    let quad = TanhSinh::new(1e-11);
    let pi_zeta = std::f64::consts::PI * zeta;

    let mut edges = vec![(0.0, false)];
    let mut k = 0u64;
    loop {
        let t = (k as f64 + 0.5) / zeta;
        if t >= end {
            break;
        }
        edges.push((t, true));
        k += 1;
    }
    edges.push((end, false));

    let mut total = 0.0;
    for pair in edges.windows(2) {
        let ((a, a_zero), (b, b_zero)) = (pair[0], pair[1]);
        let (piece, _) = quad.integrate(a, b, |node| {
            let log_cos2 = match (a_zero, b_zero) {
                (true, true) => log_sin2(pi_zeta * node.from_left.min(node.from_right)),
                (true, false) => log_sin2(pi_zeta * node.from_left),
                (false, true) => log_sin2(pi_zeta * node.from_right),
                (false, false) => (pi_zeta * node.x).cos().powi(2).ln(),
            };
            log_cos2 * dist.pdf(node.x)
        })?;
        total += piece;
    }
    Ok(total)
}

#[inline]
fn log_sin2(arg: f64) -> f64 {
    let s = arg.sin();
    (s * s).ln()
}

/// Geometric mean of the suppression after `n` iterations, `exp(n · I(ζ))`.
pub fn rra_geometric_mean(zeta: f64, n: u32) -> Result<f64> {
    Ok((n as f64 * geometric_log_integral(zeta)?).exp())
}
