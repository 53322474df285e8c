//! Monotone upper envelopes of suppression profiles and the bounds on `S_E`
//! they give when part of the spectrum is known.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RodeoError};
use crate::formats::csv_string;
use crate::profile::SuppressionProfile;
use crate::projection::overall_excited_suppression;
use crate::search::golden_max;
use crate::spectrum::DiscreteSpectrum;
use crate::wam::{WamTable, GRID_POINTS_PER_UNIT};

/// Least non-increasing majorant `s^UB(x) = sup_{y ≥ x} s(y)` of a profile.
///
/// Breakpoints carry the right-to-left running maximum of the samples, with
/// every local maximum of the profile among them. Between consecutive
/// breakpoints the profile has no interior maximum, so
/// `s^UB(x) = max(s(x), s^UB(next breakpoint))` there. Interior points of flat
/// ledges are dropped. If the profile has an analytic tail bound, the last
/// breakpoint carries it and the envelope extends to infinity.
#[derive(Debug, Clone)]
pub struct MonotoneEnvelope<P> {
    profile: P,
    breakpoints: Vec<(f64, f64)>,
    x_max: f64,
    unbounded_right: bool,
}

impl<P: SuppressionProfile<f64>> MonotoneEnvelope<P> {
    pub fn profile(&self) -> &P {
        &self.profile
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn x_min(&self) -> f64 {
        self.breakpoints[0].0
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn covers(&self, x: f64) -> bool {
        x >= self.x_min() && (x <= self.x_max || self.unbounded_right)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        if !self.covers(x) {
            return Err(RodeoError::domain(format!(
                "x = {x} outside envelope domain [{}, {}]",
                self.x_min(),
                if self.unbounded_right {
                    f64::INFINITY
                } else {
                    self.x_max
                }
            )));
        }
        let i = self.breakpoints.partition_point(|&(b, _)| b <= x) - 1;
        let (bx, bv) = self.breakpoints[i];
        if bx == x {
            return Ok(bv);
        }
        match self.breakpoints.get(i + 1) {
            Some(&(_, next)) => Ok(self.profile.suppression(x).min(bv).max(next)),
            None if x > self.x_max => Ok(self.profile.tail_bound(x).map_or(bv, |t| t.min(bv))),
            None => Ok(self.profile.suppression(x).min(bv)),
        }
    }

    /// The envelope at its left edge, i.e. the maximum over the whole domain.
    pub fn max_value(&self) -> f64 {
        self.breakpoints[0].1
    }

    /// CSV with columns `x,s_ub`, one line per breakpoint.
    pub fn to_csv(&self) -> Result<String> {
        let rows: Vec<Vec<f64>> = self.breakpoints.iter().map(|&(x, s)| vec![x, s]).collect();
        csv_string(&["x".to_owned(), "s_ub".to_owned()], &rows)
    }
}

/// Envelope sampled on the optimizer grid with every local maximum refined
/// and inserted.
pub fn monotone_envelope<P>(profile: P, x_min: f64, x_max: f64) -> Result<MonotoneEnvelope<P>>
where
    P: SuppressionProfile<f64> + Sync,
{
    monotone_envelope_with_density(profile, x_min, x_max, GRID_POINTS_PER_UNIT)
}

pub fn monotone_envelope_with_density<P>(
    profile: P,
    x_min: f64,
    x_max: f64,
    points_per_unit: f64,
) -> Result<MonotoneEnvelope<P>>
where
    P: SuppressionProfile<f64> + Sync,
{
    if !(x_min >= 1.0 && x_min < x_max && x_max.is_finite()) {
        return Err(RodeoError::domain(format!(
            "envelope needs 1 <= x_min < x_max, got [{x_min}, {x_max}]"
        )));
    }
    if !(points_per_unit > 0.0) {
        return Err(RodeoError::usage("grid density must be positive"));
    }
    let cells = ((x_max - x_min) * points_per_unit).ceil().max(2.0) as usize;
    let h = (x_max - x_min) / cells as f64;
    let grid: Vec<f64> = (0..=cells)
        .map(|i| {
            if i == cells {
                x_max
            } else {
                x_min + i as f64 * h
            }
        })
        .collect();
    let values: Vec<f64> = grid.par_iter().map(|&x| profile.suppression(x)).collect();

    let refined: Vec<(f64, f64)> = (1..grid.len() - 1)
        .into_par_iter()
        .filter(|&i| values[i] >= values[i - 1] && values[i] >= values[i + 1] && values[i] > 0.0)
        .map(|i| golden_max(|x| profile.suppression(x), grid[i - 1], grid[i + 1], 1e-12))
        .collect();

    let mut samples: Vec<(f64, f64)> = grid.into_iter().zip(values).collect();
    samples.extend(refined);
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    samples.dedup_by(|b, a| a.0 == b.0);

    let tail = profile.tail_bound(x_max);
    let mut running = tail.unwrap_or(0.0);
    let mut envelope: Vec<(f64, f64)> = samples
        .into_iter()
        .rev()
        .map(|(x, s)| {
            running = running.max(s);
            (x, running)
        })
        .collect();
    envelope.reverse();

    // keep both ends of every ledge
    let mut breakpoints: Vec<(f64, f64)> = Vec::with_capacity(envelope.len());
    for (i, &(x, s)) in envelope.iter().enumerate() {
        let same_before = i > 0 && envelope[i - 1].1 == s;
        let same_after = envelope.get(i + 1).is_some_and(|n| n.1 == s);
        if !(same_before && same_after) {
            breakpoints.push((x, s));
        }
    }
    Ok(MonotoneEnvelope {
        profile,
        breakpoints,
        x_max,
        unbounded_right: tail.is_some(),
    })
}

/// Partial knowledge of the spectrum: a fraction `f` of the excited weight
/// sits at energy ratios of at least `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSpectralInfo {
    f: f64,
    x0: f64,
}

impl PartialSpectralInfo {
    pub fn new(f: f64, x0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(RodeoError::domain(format!(
                "fraction f must lie in [0, 1], got {f}"
            )));
        }
        if !(x0 >= 1.0 && x0.is_finite()) {
            return Err(RodeoError::domain(format!(
                "x0 must be at least 1, got {x0}"
            )));
        }
        Ok(Self { f, x0 })
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }
}

/// `(1 − f) s^UB(1) + f s^UB(x0)`, which never exceeds `s^UB(1) = Q`.
pub fn partial_info_bound<P: SuppressionProfile<f64>>(
    envelope: &MonotoneEnvelope<P>,
    info: PartialSpectralInfo,
) -> Result<f64> {
    let at_gap = envelope.value(1.0)?;
    let at_x0 = envelope.value(info.x0)?;
    Ok((1.0 - info.f) * at_gap + info.f * at_x0)
}

/// Machine-readable result of a partial-information bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub f: f64,
    pub x0: f64,
    pub bound: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub schedule_id: String,
}

/// Exact `S_E` of each table row, scanned by increasing total time; returns the
/// first row index meeting `S_E ≤ threshold` together with its `S_E`.
pub fn exact_se_from_table(
    spectrum: &DiscreteSpectrum<f64>,
    table: &WamTable,
    threshold: f64,
) -> Result<(usize, f64)> {
    if table.rows.is_empty() {
        return Err(RodeoError::usage("schedule table is empty"));
    }
    let profiles = table.profiles()?;
    let mut order: Vec<usize> = (0..table.rows.len()).collect();
    order.sort_by(|&a, &b| {
        table.rows[a]
            .total_time
            .total_cmp(&table.rows[b].total_time)
    });
    let mut best = (usize::MAX, f64::INFINITY);
    for i in order {
        let se = overall_excited_suppression(spectrum, &profiles[i])?;
        if se <= threshold {
            return Ok((i, se));
        }
        if se < best.1 {
            best = (i, se);
        }
    }
    Err(RodeoError::ThresholdNotMet {
        threshold,
        best: best.1,
        best_row: best.0,
    })
}
