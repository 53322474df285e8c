//! Named pass/fail checks behind `rodeo verify`.

use clap::ValueEnum;
use num_complex::Complex64;
use rand::Rng;
use rodeo_core::bounds::{monotone_envelope, partial_info_bound, PartialSpectralInfo};
use rodeo_core::qsim::{
    apply_iteration, dense_generator_circuit, iteration_circuit, suppression_via_simulation,
    verify_reduced_density, PhysicalState,
};
use rodeo_core::rra::{separatrix_fit_for, Statistic};
use rodeo_core::superiter::{
    max_valid_energy, truncated_super_suppression, truncated_super_suppression_product,
    BesselProfile, SINGLE_SUPER_LEADING_TIME,
};
use rodeo_core::wam::{find_worst_peak, wam_optimize, WamTable};
use rodeo_core::{Schedule, StreamId};
use serde::Serialize;

const GOLDEN: &str = include_str!("../golden/wam_table.csv");
const RANDOM_CASES: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Group {
    Qsim,
    Golden,
    Super,
    Bounds,
    Separatrix,
}

impl Group {
    const ALL: [Group; 5] = [
        Group::Qsim,
        Group::Golden,
        Group::Super,
        Group::Bounds,
        Group::Separatrix,
    ];
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn within(name: &str, err: f64, tol: f64) -> Self {
        Self::new(
            name,
            err <= tol,
            format!("max error {err:.3e} (tolerance {tol:.1e})"),
        )
    }

    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} {}: {}\n", self.name, self.detail)
    }
}

pub fn run(only: &[Group], golden: Option<&str>, seed: u64) -> Vec<CheckResult> {
    let groups: &[Group] = if only.is_empty() { &Group::ALL } else { only };
    let mut out = Vec::new();
    for g in Group::ALL.iter().filter(|g| groups.contains(g)) {
        match g {
            Group::Qsim => out.extend(qsim_checks(seed)),
            Group::Golden => out.extend(golden_checks(golden.unwrap_or(GOLDEN))),
            Group::Super => out.extend(super_checks(seed)),
            Group::Bounds => out.extend(bound_checks()),
            Group::Separatrix => out.extend(separatrix_checks()),
        }
    }
    out
}

fn qsim_checks(seed: u64) -> Vec<CheckResult> {
    let mut err_p: f64 = 0.0;
    let mut err_amp: f64 = 0.0;
    let mut err_rho: f64 = 0.0;
    let mut err_ground: f64 = 0.0;
    let mut err_dense: f64 = 0.0;
    let mut err_sup: f64 = 0.0;
    let mut failures = Vec::new();

    for case in 0..RANDOM_CASES {
        let stream = StreamId::new(seed, case);
        let mut rng = stream.rng();
        let dim = rng.random_range(1..=8);
        let len = rng.random_range(1..=6);
        let times: Vec<f64> = (0..len).map(|_| rng.random_range(0.05..2.0)).collect();
        let state = match PhysicalState::random(dim, 0.05, 6.0, StreamId::new(seed ^ 0x5eed, case))
        {
            Ok(s) => s,
            Err(e) => {
                failures.push(format!("case {case}: {e}"));
                continue;
            }
        };
        let schedule = Schedule::new(times.clone()).expect("positive times");

        let mut current = state.clone();
        let mut p_all = 1.0;
        let mut ok = true;
        for &t in &times {
            match apply_iteration(&current, t) {
                Ok(out) => {
                    p_all *= out.success_probability;
                    match out.post_success {
                        Some(next) => current = next,
                        None => ok = false,
                    }
                }
                Err(e) => {
                    failures.push(format!("case {case}: {e}"));
                    ok = false;
                }
            }
            if !ok {
                break;
            }
        }
        let p: f64 = state
            .energies()
            .iter()
            .zip(state.amplitudes())
            .map(|(&x, a)| a.norm_sqr() * schedule.suppression(x))
            .sum();
        err_p = err_p.max((p_all - p).abs());
        if ok {
            let amps: Vec<Complex64> = state
                .energies()
                .iter()
                .zip(state.amplitudes())
                .map(|(&x, &a)| {
                    times.iter().fold(a, |acc, &t| {
                        let phi = -2.0 * std::f64::consts::PI * x * t;
                        acc * (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, phi)) * 0.5
                    })
                })
                .collect();
            if let Ok(want) = PhysicalState::normalized(state.energies().to_vec(), amps) {
                err_amp = err_amp.max(current.distance_up_to_phase(&want));
            }
            for c in 1..state.dim() {
                if let Ok(sim) = suppression_via_simulation(&state, &schedule, c) {
                    err_sup = err_sup.max((sim - schedule.suppression(state.energies()[c])).abs());
                }
            }
        }

        match verify_reduced_density(&state, times[0]) {
            Ok(check) => {
                err_rho = err_rho.max(check.residual);
                err_ground = err_ground.max(check.ground_weight_error);
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
        let a = iteration_circuit(&state, times[0]);
        match dense_generator_circuit(&state, times[0]) {
            Ok(b) => {
                let d = a
                    .amplitudes()
                    .iter()
                    .zip(b.amplitudes())
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                err_dense = err_dense.max(d);
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }

    let mut out = vec![
        CheckResult::within("qsim.success_probability", err_p, 1e-12),
        CheckResult::within("qsim.post_selected_amplitudes", err_amp, 1e-12),
        CheckResult::within("qsim.reduced_density", err_rho, 1e-12),
        CheckResult::within("qsim.ground_conservation", err_ground, 1e-12),
        CheckResult::within("qsim.dense_generator", err_dense, 1e-12),
        CheckResult::within("qsim.simulated_suppression", err_sup, 1e-10),
    ];
    if !failures.is_empty() {
        out.push(CheckResult::new("qsim.errors", false, failures.join("; ")));
    }
    out
}

fn golden_checks(text: &str) -> Vec<CheckResult> {
    let golden = match WamTable::parse(text) {
        Ok(t) if !t.rows.is_empty() && t.rows.len() <= 12 => t,
        Ok(t) => {
            return vec![CheckResult::new(
                "golden.parse",
                false,
                format!("expected 1 to 12 rows, found {}", t.rows.len()),
            )]
        }
        Err(e) => return vec![CheckResult::new("golden.parse", false, e.to_string())],
    };
    let state = match wam_optimize(golden.rows.len(), 32) {
        Ok(s) => s,
        Err(e) => return vec![CheckResult::new("golden.optimize", false, e.to_string())],
    };
    let mut out = vec![CheckResult::new(
        "golden.parse",
        true,
        format!("{} rows", golden.rows.len()),
    )];
    for (want, got) in golden.rows.iter().zip(state.history()) {
        let name = format!("golden.row{}", want.n);
        if want.n != got.n || want.times.len() != got.times.len() {
            out.push(CheckResult::new(
                name,
                false,
                format!("row shape {} vs {}", want.n, got.n),
            ));
            continue;
        }
        let dt = want
            .times
            .iter()
            .zip(&got.times)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let dtot = (want.total_time - got.total_time).abs();
        let dq = (got.q / want.q - 1.0).abs();
        let passed = dt <= 2e-3 && dtot <= 5e-3 && dq <= 0.05;
        out.push(CheckResult::new(
            name,
            passed,
            format!("times {dt:.1e} (2e-3), total {dtot:.1e} (5e-3), Q rel {dq:.1e} (5e-2)"),
        ));
    }
    out
}

fn super_checks(seed: u64) -> Vec<CheckResult> {
    let profile = BesselProfile::new(vec![1.0]).expect("unit base time");
    let peak = find_worst_peak(&profile, 1.0, 50.0);
    let peak_check = match peak {
        Ok(p) => CheckResult::new(
            "super.single_peak",
            (p.value - 4.719e-2).abs() <= 1e-4 && (p.location - 1.43029).abs() <= 1e-3,
            format!("max {:.5e} at x = {:.5}", p.value, p.location),
        ),
        Err(e) => CheckResult::new("super.single_peak", false, e.to_string()),
    };
    let mut rng = StreamId::new(seed, 1 << 40).rng();
    let err = (0..1000)
        .map(|_| {
            let z = rng.random_range(0.0..1e3);
            let n = rng.random_range(1..=40);
            let d: f64 =
                truncated_super_suppression(z, n) - truncated_super_suppression_product(z, n);
            d.abs()
        })
        .fold(0.0, f64::max);
    let emax = max_valid_energy(15, SINGLE_SUPER_LEADING_TIME);
    vec![
        peak_check,
        CheckResult::within("super.ratio_form", err, 1e-10),
        CheckResult::new(
            "super.emax15",
            (40308.0..=40309.0).contains(&emax),
            format!("{emax:.3}"),
        ),
    ]
}

fn bound_checks() -> Vec<CheckResult> {
    let envelope = wam_optimize(3, 32).and_then(|s| monotone_envelope(s.profile(), 1.0, 60.0));
    let envelope = match envelope {
        Ok(e) => e,
        Err(err) => return vec![CheckResult::new("bounds.envelope", false, err.to_string())],
    };
    [(0.99, 3.0, 5.591e-7), (0.9999, 8.0, 1.194e-8)]
        .iter()
        .map(|&(f, x0, want)| {
            let name = format!("bounds.partial_f{f}_x{x0}");
            match PartialSpectralInfo::new(f, x0).and_then(|i| partial_info_bound(&envelope, i)) {
                Ok(b) => CheckResult::new(name, (b / want - 1.0).abs() <= 0.02, format!("{b:.4e}")),
                Err(e) => CheckResult::new(name, false, e.to_string()),
            }
        })
        .collect()
}

fn separatrix_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    match separatrix_fit_for(Statistic::Arithmetic) {
        Ok(fit) => {
            out.push(CheckResult::new(
                "separatrix.arithmetic",
                (fit.alpha - 4.271).abs() <= 1e-3 && (fit.beta - 2.244).abs() <= 1e-3,
                format!("alpha {:.5}, beta {:.5}", fit.alpha, fit.beta),
            ));
        }
        Err(e) => out.push(CheckResult::new(
            "separatrix.arithmetic",
            false,
            e.to_string(),
        )),
    }
    match separatrix_fit_for(Statistic::Rms) {
        Ok(fit) => out.push(CheckResult::new(
            "separatrix.rms",
            (fit.beta - 1.637).abs() <= 1e-3,
            format!("beta {:.5}", fit.beta),
        )),
        Err(e) => out.push(CheckResult::new("separatrix.rms", false, e.to_string())),
    }
    out
}
