//! The Whac-a-Mole optimizer: repeatedly place a super-iteration zero on the
//! worst suppression peak above Δ, then shrink all times so that the edge
//! `x = 1` is no worse than the remaining peaks.
//!
//! Whacks are applied to unscaled base times whose first entry is 1, so the
//! profile always vanishes at `x = 1`. The shrink factor λ of each cycle
//! only affects the reported times and is not carried into later cycles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RodeoError};
use crate::formats::{csv_string, read_csv};
use crate::profile::SuppressionProfile;
use crate::search::{bisect, golden_max};
use crate::superiter::{BesselProfile, SuperSchedule};

/// Grid density of the peak scan, in points per unit of `x`.
pub const GRID_POINTS_PER_UNIT: f64 = 2.0e4;
const CANDIDATES: usize = 5;
const REFINE_TOL: f64 = 1e-10;
const RESCALE_BRACKET: (f64, f64) = (0.7, 1.0);
const RESCALE_STEP: f64 = 1e-5;

/// A local maximum of a suppression profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub location: f64,
    pub value: f64,
}

/// Global maximum of `profile` on `[x_min, x_max]`: a dense grid scan, then
/// golden-section refinement around the best few grid maxima. Ties go to the
/// smaller `x`.
pub fn find_worst_peak<P>(profile: &P, x_min: f64, x_max: f64) -> Result<Peak>
where
    P: SuppressionProfile<f64> + Sync + ?Sized,
{
    if !(x_min < x_max && x_min.is_finite() && x_max.is_finite()) {
        return Err(RodeoError::domain(format!(
            "peak search needs x_min < x_max, got [{x_min}, {x_max}]"
        )));
    }
    let cells = ((x_max - x_min) * GRID_POINTS_PER_UNIT).ceil().max(2.0) as usize;
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

    let mut maxima: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let left = i == 0 || values[i] >= values[i - 1];
            let right = i + 1 == grid.len() || values[i] >= values[i + 1];
            left && right
        })
        .collect();
    maxima.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    maxima.truncate(CANDIDATES);

    let mut best = Peak {
        location: x_min,
        value: values[0],
    };
    let mut candidates: Vec<Peak> = maxima
        .into_iter()
        .map(|i| {
            let lo = grid[i.saturating_sub(1)];
            let hi = grid[(i + 1).min(grid.len() - 1)];
            let (x, v) = golden_max(|x| profile.suppression(x), lo, hi, REFINE_TOL);
            if v >= values[i] {
                Peak {
                    location: x,
                    value: v,
                }
            } else {
                Peak {
                    location: grid[i],
                    value: values[i],
                }
            }
        })
        .collect();
    candidates.sort_by(|a, b| a.location.total_cmp(&b.location));
    for c in candidates {
        if c.value > best.value {
            best = c;
        }
    }
    Ok(best)
}

/// Worst peak of a Bessel-product profile over all `x ≥ 1`.
///
/// The scan starts on `[1, 4 / min b]` and doubles the upper end until the
/// analytic tail bound beyond it falls below the peak found.
pub fn worst_peak_above_gap(profile: &BesselProfile<f64>) -> Result<Peak> {
    let mut x_max = (4.0 / profile.min_base_time()).max(2.0);
    loop {
        let peak = find_worst_peak(profile, 1.0, x_max)?;
        let tail = profile.tail_bound(x_max).unwrap_or(f64::INFINITY);
        if tail < peak.value || peak.value == 0.0 && tail == 0.0 {
            return Ok(peak);
        }
        if x_max > 1e6 {
            return Err(RodeoError::numeric(
                "peak search failed to bound the profile tail",
            ));
        }
        x_max *= 2.0;
    }
}

/// One row of the optimizer table: cycle count, worst-case suppression, total
/// time and the (rescaled) base time of every super iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WamRow {
    pub n: usize,
    #[serde(rename = "Q")]
    pub q: f64,
    pub total_time: f64,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WamTable {
    pub rows: Vec<WamRow>,
}

impl WamTable {
    pub fn to_csv(&self) -> Result<String> {
        let width = self.rows.iter().map(|r| r.times.len()).max().unwrap_or(0);
        let mut header: Vec<String> = ["n", "Q", "total_time"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend((1..=width).map(|k| format!("t{k}")));
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![r.n as f64, r.q, r.total_time];
                v.extend(&r.times);
                v
            })
            .collect();
        let text = csv_string(&header, &rows)?;
        // the row index is an integer column
        Ok(text
            .lines()
            .enumerate()
            .map(|(i, line)| match (i, line.split_once(',')) {
                (0, _) | (_, None) => format!("{line}\n"),
                (_, Some((n, rest))) => {
                    let n: f64 = n.parse().unwrap_or(f64::NAN);
                    format!("{},{rest}\n", n as usize)
                }
            })
            .collect())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let (header, rows) = read_csv(text)?;
        if header.len() < 3 || header[0] != "n" || header[1] != "Q" || header[2] != "total_time" {
            return Err(RodeoError::usage(
                "table header must start with n,Q,total_time",
            ));
        }
        let rows =
            rows.into_iter()
                .map(|row| {
                    let cell = |i: usize| {
                        row.get(i).copied().flatten().ok_or_else(|| {
                            RodeoError::usage(format!("table row missing column {i}"))
                        })
                    };
                    let n = cell(0)?;
                    if n < 1.0 || n.fract() != 0.0 {
                        return Err(RodeoError::usage(format!("bad row count {n}")));
                    }
                    let n = n as usize;
                    let times = (0..n).map(|k| cell(3 + k)).collect::<Result<Vec<_>>>()?;
                    Ok(WamRow {
                        n,
                        q: cell(1)?,
                        total_time: cell(2)?,
                        times,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        Ok(Self { rows })
    }

    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Ok(serde_json::from_str(text)?)
        } else {
            Self::from_csv(text)
        }
    }

    /// Profiles of every row at infinite depth.
    pub fn profiles(&self) -> Result<Vec<BesselProfile<f64>>> {
        self.rows
            .iter()
            .map(|r| BesselProfile::new(r.times.clone()))
            .collect()
    }
}

/// Optimizer state after some number of cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WamState {
    depth: u32,
    bases: Vec<f64>,
    scale: f64,
    peak: Peak,
    history: Vec<WamRow>,
}

impl WamState {
    /// Cycle one before rescaling: a single super iteration of base time 1.
    pub fn initial(depth: u32) -> Result<Self> {
        Self::from_bases(vec![1.0], depth)
    }

    /// A state built from unscaled base times; the first must be 1 so that the
    /// profile vanishes at the gap.
    pub fn from_bases(bases: Vec<f64>, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(RodeoError::usage("depth must be at least 1"));
        }
        if bases.first() != Some(&1.0) {
            return Err(RodeoError::usage("the first base time must be 1"));
        }
        let peak = worst_peak_above_gap(&BesselProfile::new(bases.clone())?)?;
        Ok(Self {
            depth,
            bases,
            scale: 1.0,
            peak,
            history: Vec::new(),
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn unscaled_base_times(&self) -> &[f64] {
        &self.bases
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Base times after rescaling.
    pub fn times(&self) -> Vec<f64> {
        self.bases.iter().map(|&b| b * self.scale).collect()
    }

    pub fn total_time(&self) -> f64 {
        self.scale * self.bases.iter().sum::<f64>()
    }

    pub fn profile(&self) -> BesselProfile<f64> {
        BesselProfile::new(self.times()).expect("positive base times")
    }

    pub fn super_schedule(&self) -> Result<SuperSchedule<f64>> {
        SuperSchedule::from_base_times(&self.times(), self.depth)
    }

    /// The worst suppression above the gap, located in the rescaled frame.
    pub fn worst(&self) -> Peak {
        Peak {
            location: self.peak.location / self.scale,
            value: self.peak.value,
        }
    }

    /// Rows recorded by [`rescale_to_equalize`], one per cycle.
    pub fn history(&self) -> &[WamRow] {
        &self.history
    }

    pub fn table(&self) -> WamTable {
        WamTable {
            rows: self.history.clone(),
        }
    }
}

/// Appends a super iteration whose first zero sits on the current worst peak,
/// then relocates the worst peak.
pub fn whack(state: &WamState) -> Result<WamState> {
    let x = state.peak.location;
    if !(x >= 1.0) {
        return Err(RodeoError::numeric(format!(
            "worst peak at x = {x} lies below the gap"
        )));
    }
    let mut bases = state.bases.clone();
    bases.push(1.0 / x);
    let peak = worst_peak_above_gap(&BesselProfile::new(bases.clone())?)?;
    Ok(WamState {
        depth: state.depth,
        bases,
        scale: 1.0,
        peak,
        history: state.history.clone(),
    })
}

/// Finds the largest `λ ≤ 1` at which the unscaled profile climbs back to the
/// worst peak value `Q`, so that after multiplying every time by `λ` the
/// suppression at `x = 1` equals `Q`. Records the resulting table row.
pub fn rescale_to_equalize(state: &WamState) -> Result<(f64, WamState)> {
    let profile = BesselProfile::new(state.bases.clone())?;
    let q = state.peak.value;
    let lambda = if q <= 0.0 {
        1.0
    } else {
        let gap = |y: f64| profile.suppression(y) - q;
        let (lo, hi) = RESCALE_BRACKET;
        let steps = ((hi - lo) / RESCALE_STEP).round() as usize;
        let crossing = (1..=steps)
            .map(|k| hi - k as f64 * RESCALE_STEP)
            .find(|&y| gap(y) >= 0.0)
            .ok_or_else(|| {
                RodeoError::numeric(format!(
                    "no rescale factor in [{lo}, {hi}] reaches Q = {q:e}"
                ))
            })?;
        let right = (crossing + RESCALE_STEP).min(hi);
        bisect(gap, crossing, right, 1e-13, 0.0, 200)?
    };
    let mut next = state.clone();
    next.scale = lambda;
    next.history.push(WamRow {
        n: next.bases.len(),
        q,
        total_time: next.total_time(),
        times: next.times(),
    });
    Ok((lambda, next))
}

/// Runs `cycles` whack-and-rescale cycles starting from one super iteration.
pub fn wam_optimize(cycles: usize, depth: u32) -> Result<WamState> {
    if cycles == 0 {
        return Err(RodeoError::usage("cycles must be at least 1"));
    }
    let (_, mut state) = rescale_to_equalize(&WamState::initial(depth)?)?;
    for _ in 1..cycles {
        state = rescale_to_equalize(&whack(&state)?)?.1;
    }
    Ok(state)
}

/// `Q = max_{x ≥ 1} s(x)` for the optimized schedule.
pub fn worst_case_bound(state: &WamState) -> f64 {
    state.peak.value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{ConstantProfile, FnProfile};

    #[test]
    fn single_super_peak() {
        let p = BesselProfile::new(vec![1.0]).unwrap();
        let peak = find_worst_peak(&p, 1.0, 50.0).unwrap();
        assert!((peak.location - 1.43029).abs() < 1e-4, "{peak:?}");
        assert!((peak.value - 0.047190).abs() < 1e-5, "{peak:?}");
        // first nontrivial root of tan θ = θ
        let theta = std::f64::consts::PI * peak.location;
        assert!((theta.tan() - theta).abs() < 1e-6);
    }

    #[test]
    fn flat_and_tied_profiles() {
        let peak = find_worst_peak(&ConstantProfile(0.0), 1.0, 3.0).unwrap();
        assert_eq!(peak.value, 0.0);
        assert_eq!(peak.location, 1.0);
        let two_humps = FnProfile(|x: f64| (std::f64::consts::PI * x).sin().powi(2));
        let peak = find_worst_peak(&two_humps, 0.0, 2.0).unwrap();
        assert!((peak.location - 0.5).abs() < 1e-6, "{peak:?}");
        assert!(find_worst_peak(&two_humps, 2.0, 1.0).is_err());
    }

    #[test]
    fn whack_places_a_zero() {
        let state = WamState::initial(32).unwrap();
        let next = whack(&state).unwrap();
        assert!((next.bases[1] - 0.69916).abs() < 1e-5);
        let p = BesselProfile::new(next.bases.clone()).unwrap();
        assert!(p.suppression(state.peak.location) < 1e-20);
        assert!(next.peak.value < state.peak.value);
        assert!((next.peak.value - 8.508e-4).abs() < 0.05 * 8.508e-4);

        let mut forced = WamState::initial(32).unwrap();
        forced.peak.location = 2.0;
        let w = whack(&forced).unwrap();
        assert_eq!(w.bases[1], 0.5);
        assert!(
            BesselProfile::new(w.bases.clone())
                .unwrap()
                .suppression(2.0)
                < 1e-20
        );
    }

    #[test]
    fn first_rescale() {
        let (lambda, state) = rescale_to_equalize(&WamState::initial(32).unwrap()).unwrap();
        assert!((lambda - 0.8129).abs() < 2e-3);
        let q = state.worst().value;
        assert!((state.profile().suppression(1.0) - q).abs() < 1e-9 * q);
        let mut zero = WamState::initial(32).unwrap();
        zero.peak.value = 0.0;
        assert_eq!(rescale_to_equalize(&zero).unwrap().0, 1.0);
    }

    #[test]
    fn two_cycles() {
        let state = wam_optimize(2, 32).unwrap();
        let t = state.times();
        assert!(
            (t[0] - 0.9361).abs() < 2e-3 && (t[1] - 0.6545).abs() < 2e-3,
            "{t:?}"
        );
        assert_eq!(state.history().len(), 2);
        assert!(wam_optimize(0, 32).is_err());
    }

    #[test]
    fn table_csv_round_trip() {
        let table = wam_optimize(3, 32).unwrap().table();
        let csv = table.to_csv().unwrap();
        assert!(csv.starts_with("n,Q,total_time,t1,t2,t3\n1,"));
        assert_eq!(WamTable::parse(&csv).unwrap(), table);
        let json = serde_json::to_string(&table).unwrap();
        assert!(json.contains("\"Q\""));
        assert_eq!(WamTable::parse(&json).unwrap(), table);
    }
}
