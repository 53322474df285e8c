//! Exact statevector simulation of rodeo iterations with one ancilla qubit.
//!
//! The Hamiltonian is diagonal in the working basis, so controlled evolution
//! for time `τ` multiplies the amplitude at energy ratio `x` by
//! `e^{−i 2π x τ}`. The composite vector stores the ancilla-up block first,
//! then the ancilla-down block.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RodeoError};
use crate::rng::StreamId;
use crate::schedule::Schedule;
use crate::spectrum::DiscreteSpectrum;

/// Largest basis for statevector paths.
pub const MAX_STATE_DIM: usize = 1 << 14;
/// Largest basis for dense density-matrix and matrix-exponential checks.
pub const MAX_DENSE_DIM: usize = 64;
/// Branches less likely than this are not normalised.
pub const NEGLIGIBLE_BRANCH: f64 = 1e-14;

const NORM_TOL: f64 = 1e-12;

/// Amplitudes over energy eigenstates; entry 0 is the ground state at `x = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState", into = "RawState")]
pub struct PhysicalState {
    energies: Vec<f64>,
    amplitudes: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawState {
    energies: Vec<f64>,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<RawState> for PhysicalState {
    type Error = RodeoError;

    fn try_from(raw: RawState) -> Result<Self> {
        let amplitudes = raw
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        PhysicalState::new(raw.energies, amplitudes)
    }
}

impl From<PhysicalState> for RawState {
    fn from(s: PhysicalState) -> Self {
        RawState {
            energies: s.energies,
            amplitudes: s.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

fn squared_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

impl PhysicalState {
    pub fn new(energies: Vec<f64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::unchecked_norm(energies, amplitudes)?;
        let norm = squared_norm(&state.amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(RodeoError::domain(format!(
                "state norm² is {norm}, expected 1"
            )));
        }
        Ok(state)
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(energies: Vec<f64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut state = Self::unchecked_norm(energies, amplitudes)?;
        let norm = squared_norm(&state.amplitudes).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(RodeoError::domain("cannot normalise a zero state"));
        }
        for a in &mut state.amplitudes {
            *a /= norm;
        }
        Ok(state)
    }

    fn unchecked_norm(energies: Vec<f64>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if energies.len() != amplitudes.len() {
            return Err(RodeoError::usage(format!(
                "{} energies but {} amplitudes",
                energies.len(),
                amplitudes.len()
            )));
        }
        if energies.is_empty() || energies.len() > MAX_STATE_DIM {
            return Err(RodeoError::usage(format!(
                "state dimension must lie in 1..={MAX_STATE_DIM}, got {}",
                energies.len()
            )));
        }
        if energies[0] != 0.0 {
            return Err(RodeoError::domain(
                "the first energy must be the ground state at 0",
            ));
        }
        if energies.iter().any(|e| !e.is_finite()) || energies.windows(2).any(|w| w[0] > w[1]) {
            return Err(RodeoError::domain("energies must be finite and ascending"));
        }
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(RodeoError::domain("amplitudes must be finite"));
        }
        Ok(Self {
            energies,
            amplitudes,
        })
    }

    /// Real non-negative amplitudes `√w` for a ground weight and excited components.
    pub fn from_spectrum(spectrum: &DiscreteSpectrum<f64>) -> Result<Self> {
        let mut parts: Vec<(f64, f64)> = spectrum.excited().iter().map(|c| (c.x, c.w)).collect();
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        parts.insert(0, (0.0, spectrum.ground_weight()));
        let (energies, amps): (Vec<f64>, Vec<Complex64>) = parts
            .into_iter()
            .map(|(x, w)| (x, Complex64::new(w.sqrt(), 0.0)))
            .unzip();
        Self::normalized(energies, amps)
    }

    /// Random state with excited energies uniform in `[x_lo, x_hi)` and
    /// complex amplitudes with components uniform in `[−1, 1)`, normalised.
    pub fn random(dim: usize, x_lo: f64, x_hi: f64, stream: StreamId) -> Result<Self> {
        if !(x_lo > 0.0 && x_lo < x_hi) {
            return Err(RodeoError::domain(format!(
                "bad energy range [{x_lo}, {x_hi})"
            )));
        }
        let mut rng = stream.rng();
        let mut energies: Vec<f64> = (1..dim).map(|_| rng.random_range(x_lo..x_hi)).collect();
        energies.sort_by(f64::total_cmp);
        energies.insert(0, 0.0);
        let amplitudes = (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Self::normalized(energies, amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn ground_amplitude(&self) -> Complex64 {
        self.amplitudes[0]
    }

    pub fn ground_weight(&self) -> f64 {
        self.amplitudes[0].norm_sqr()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn overlap_modulus(&self, other: &PhysicalState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    /// Largest componentwise difference after removing the relative global phase.
    pub fn distance_up_to_phase(&self, other: &PhysicalState) -> f64 {
        let inner: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| b.conj() * a)
            .sum();
        let phase = if inner.norm() > 0.0 {
            inner / inner.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max)
    }

    fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::normalized(self.energies.clone(), amplitudes)
    }
}

/// Ancilla ⊗ physical statevector, up block first.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    amplitudes: Vec<Complex64>,
}

impl CompositeState {
    /// Ancilla up, physical system in `state`.
    pub fn prepare(state: &PhysicalState) -> Self {
        let mut amplitudes = state.amplitudes.clone();
        amplitudes.resize(2 * state.dim(), Complex64::new(0.0, 0.0));
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn up(&self) -> &[Complex64] {
        &self.amplitudes[..self.amplitudes.len() / 2]
    }

    pub fn down(&self) -> &[Complex64] {
        &self.amplitudes[self.amplitudes.len() / 2..]
    }

    pub fn norm_sqr(&self) -> f64 {
        squared_norm(&self.amplitudes)
    }

    /// Hadamard on the ancilla.
    pub fn hadamard(&mut self) {
        let d = self.amplitudes.len() / 2;
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (up, down) = self.amplitudes.split_at_mut(d);
        for (u, w) in up.iter_mut().zip(down.iter_mut()) {
            let (a, b) = (*u, *w);
            *u = (a + b) * r;
            *w = (a - b) * r;
        }
    }

    /// Evolution for time `tau` applied only to the ancilla-up block.
    pub fn controlled_evolution(&mut self, energies: &[f64], tau: f64) {
        let d = self.amplitudes.len() / 2;
        for (a, &x) in self.amplitudes[..d].iter_mut().zip(energies) {
            *a *= phase(x * tau);
        }
    }
}

/// `e^{−i 2π ζ}` with the argument reduced modulo one.
fn phase(zeta: f64) -> Complex64 {
    let r = zeta - zeta.round();
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * r)
}

/// Hadamard, controlled evolution, Hadamard: the circuit of one iteration before measurement.
pub fn iteration_circuit(state: &PhysicalState, tau: f64) -> CompositeState {
    let mut c = CompositeState::prepare(state);
    c.hadamard();
    c.controlled_evolution(&state.energies, tau);
    c.hadamard();
    c
}

/// The same unitary built as `exp(−i 2π τ P₊ ⊗ H)`, where `P₊` projects the
/// ancilla onto the up state of the x basis; dense matrix exponential.
pub fn dense_generator_circuit(state: &PhysicalState, tau: f64) -> Result<CompositeState> {
    let d = state.dim();
    if d > MAX_DENSE_DIM {
        return Err(RodeoError::usage(format!(
            "dense check limited to dim <= {MAX_DENSE_DIM}"
        )));
    }
    let half = Complex64::new(0.5, 0.0);
    let scale = Complex64::new(0.0, -2.0 * std::f64::consts::PI * tau);
    let generator = DMatrix::<Complex64>::from_fn(2 * d, 2 * d, |i, j| {
        if i % d != j % d {
            return Complex64::new(0.0, 0.0);
        }
        // P₊ = ½ [[1, 1], [1, 1]] in the up/down basis
        half * state.energies[i % d] * scale
    });
    let unitary = generator.exp();
    let initial = CompositeState::prepare(state);
    let v = nalgebra::DVector::from_column_slice(&initial.amplitudes);
    Ok(CompositeState {
        amplitudes: (unitary * v).iter().copied().collect(),
    })
}

/// Measurement statistics and post-measurement states of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub success_probability: f64,
    /// Absent when the success branch has probability below [`NEGLIGIBLE_BRANCH`].
    pub post_success: Option<PhysicalState>,
    /// Absent when the failure branch has probability below [`NEGLIGIBLE_BRANCH`].
    pub post_failure: Option<PhysicalState>,
}

pub fn apply_iteration(state: &PhysicalState, tau: f64) -> Result<IterationOutcome> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(RodeoError::domain(format!(
            "iteration time must be positive, got {tau}"
        )));
    }
    let c = iteration_circuit(state, tau);
    let p_up = squared_norm(c.up());
    let p_down = squared_norm(c.down());
    let branch = |block: &[Complex64], p: f64| -> Result<Option<PhysicalState>> {
        if p < NEGLIGIBLE_BRANCH {
            Ok(None)
        } else {
            state.with_amplitudes(block.to_vec()).map(Some)
        }
    };
    Ok(IterationOutcome {
        success_probability: p_up.clamp(0.0, 1.0),
        post_success: branch(c.up(), p_up)?,
        post_failure: branch(c.down(), p_down)?,
    })
}

/// Closed-form success-branch amplitudes `α_c (1 + e^{−i2πζ_c}) / 2`, unnormalised.
pub fn success_branch_closed_form(state: &PhysicalState, tau: f64) -> Vec<Complex64> {
    state
        .energies
        .iter()
        .zip(&state.amplitudes)
        .map(|(&x, &a)| a * (Complex64::new(1.0, 0.0) + phase(x * tau)) * 0.5)
        .collect()
}

/// Closed-form failure-branch amplitudes `−i e^{−iπζ_c} sin(πζ_c) α_c`, unnormalised.
pub fn failure_branch_closed_form(state: &PhysicalState, tau: f64) -> Vec<Complex64> {
    state
        .energies
        .iter()
        .zip(&state.amplitudes)
        .map(|(&x, &a)| {
            let zeta = x * tau;
            let r = zeta - zeta.round();
            let s = (std::f64::consts::PI * r).sin();
            a * Complex64::new(0.0, -1.0)
                * phase(0.5 * zeta)
                * s
                * if zeta.round() as i64 % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
        })
        .collect()
}

/// Residuals of the reduced density-matrix decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedDensityCheck {
    /// Frobenius norm of `Tr_anc ρ − (P^s ρ^s + P^u ρ^u)`.
    pub residual: f64,
    /// `|ρ_00 − |α_g|²|` for the reduced matrix.
    pub ground_weight_error: f64,
}

/// Builds the full density matrix of the circuit output, traces out the
/// ancilla, and compares with the closed-form success/failure mixture.
pub fn verify_reduced_density(state: &PhysicalState, tau: f64) -> Result<ReducedDensityCheck> {
    let d = state.dim();
    if d > MAX_DENSE_DIM {
        return Err(RodeoError::usage(format!(
            "density check limited to dim <= {MAX_DENSE_DIM}"
        )));
    }
    let c = iteration_circuit(state, tau);
    let v = nalgebra::DVector::from_column_slice(c.amplitudes());
    let rho = &v * v.adjoint();
    let reduced = rho.view((0, 0), (d, d)) + rho.view((d, d), (d, d));

    let projector = |amps: Vec<Complex64>| {
        let u = nalgebra::DVector::from_vec(amps);
        &u * u.adjoint()
    };
    // the unnormalised outer products already carry the branch probabilities
    let mixture = projector(success_branch_closed_form(state, tau))
        + projector(failure_branch_closed_form(state, tau));
    Ok(ReducedDensityCheck {
        residual: (reduced.clone() - mixture).norm(),
        ground_weight_error: (reduced[(0, 0)].re - state.ground_weight()).abs(),
    })
}

/// Result of running a schedule with sampled ancilla measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub success: bool,
    pub final_state: PhysicalState,
    /// One entry per measured iteration; `true` is the up (success) outcome.
    pub record: Vec<bool>,
}

/// Applies the schedule, sampling every measurement; stops at the first failure.
pub fn run_trajectory(
    state: &PhysicalState,
    schedule: &Schedule<f64>,
    stream: StreamId,
) -> Result<Trajectory> {
    let mut rng = stream.rng();
    let mut current = state.clone();
    let mut record = Vec::with_capacity(schedule.len());
    for &tau in schedule.times() {
        let outcome = apply_iteration(&current, tau)?;
        let u: f64 = rng.random();
        let passed = u < outcome.success_probability;
        match (passed, outcome.post_success, outcome.post_failure) {
            (true, Some(next), _) | (false, Some(next), None) => {
                record.push(true);
                current = next;
            }
            (_, _, Some(failed)) => {
                record.push(false);
                return Ok(Trajectory {
                    success: false,
                    final_state: failed,
                    record,
                });
            }
            (_, None, None) => {
                return Err(RodeoError::numeric("both measurement branches vanished"));
            }
        }
    }
    Ok(Trajectory {
        success: true,
        final_state: current,
        record,
    })
}

/// Fraction of `trials` trajectories that pass every iteration; trial `i`
/// uses stream `(seed, i)`.
pub fn empirical_success_rate(
    state: &PhysicalState,
    schedule: &Schedule<f64>,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(RodeoError::usage("trials must be at least 1"));
    }
    let flags = (0..trials)
        .into_par_iter()
        .map(|i| run_trajectory(state, schedule, StreamId::new(seed, i)).map(|t| t.success))
        .collect::<Result<Vec<bool>>>()?;
    Ok(flags.iter().filter(|&&s| s).count() as f64 / trials as f64)
}

/// State after every iteration succeeds.
pub fn post_selected_state(
    state: &PhysicalState,
    schedule: &Schedule<f64>,
) -> Result<PhysicalState> {
    let mut current = state.clone();
    for (k, &tau) in schedule.times().iter().enumerate() {
        current = apply_iteration(&current, tau)?
            .post_success
            .ok_or_else(|| {
                RodeoError::DegenerateBranch(format!("success branch vanishes at iteration {k}"))
            })?;
    }
    Ok(current)
}

/// Suppression of `component` measured from the simulation as the change in
/// its squared amplitude ratio to the ground state.
pub fn suppression_via_simulation(
    state: &PhysicalState,
    schedule: &Schedule<f64>,
    component: usize,
) -> Result<f64> {
    if component == 0 || component >= state.dim() {
        return Err(RodeoError::domain(format!(
            "component {component} is not an excited index of a {}-dim state",
            state.dim()
        )));
    }
    let before = state.amplitudes[component].norm_sqr() / state.ground_weight();
    if !(before > 0.0 && before.is_finite()) {
        return Err(RodeoError::domain(
            "ground and component amplitudes must be nonzero",
        ));
    }
    let post = post_selected_state(state, schedule)?;
    let g = post.ground_weight();
    if g == 0.0 {
        return Err(RodeoError::DegenerateBranch(
            "ground amplitude vanished".into(),
        ));
    }
    Ok(post.amplitudes[component].norm_sqr() / g / before)
}
