//! Time evolution: unitary propagators for closed dynamics, Lindblad
//! evolution with relaxation and dephasing, and Bloch-sphere trajectories.
//!
//! The integrator is a piecewise-constant midpoint exponential: the
//! Hamiltonian is sampled at the midpoint of each uniform step and
//! exponentiated exactly, so every step is exactly unitary (closed) or
//! exactly completely positive (open, by Strang-splitting the dissipator
//! around the unitary step). The scheme is second order in the step size.

use nalgebra::{DMatrix, Matrix2, Matrix3, Vector2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat;
use crate::model::{SystemModel, ThreeLevelModel};
use crate::pulse::Pulse;

/// Default number of integration steps; resolves every pulse in this crate's
/// operating range with a comfortable convergence margin.
pub const DEFAULT_STEPS: usize = 2048;

/// Minimum accepted step count.
pub const MIN_STEPS: usize = 64;

/// Tolerance on the step-doubling check when it is requested.
pub const CONVERGENCE_TOL: f64 = 1e-4;

/// Rotating frame a result is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Frame co-rotating with the (chirped) drive; the frame of the
    /// rotating-frame Hamiltonian.
    DriveRotating,
    /// Frame rotating at the qubit frequency; differs from the drive frame by
    /// a z-rotation by the accumulated detuning phase.
    QubitRotating,
}

/// Markovian decoherence parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub t1: f64,
    pub t2: f64,
    /// Gaussian readout noise on measured expectation values.
    pub readout_sigma: f64,
}

/// Default readout noise, sigma(P1) of a well-averaged dispersive readout.
pub const DEFAULT_READOUT_SIGMA: f64 = 0.003;

impl NoiseModel {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        if !(t1.is_finite() && t1 > 0.0 && t2.is_finite() && t2 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "decoherence times must be positive and finite, got t1 = {t1}, t2 = {t2}"
            )));
        }
        if t2 > 2.0 * t1 {
            return Err(Error::InvalidInput(format!(
                "unphysical noise model: t2 = {t2} exceeds 2 t1 = {}",
                2.0 * t1
            )));
        }
        Ok(Self { t1, t2, readout_sigma: DEFAULT_READOUT_SIGMA })
    }

    pub fn with_readout_sigma(mut self, sigma: f64) -> Self {
        self.readout_sigma = sigma;
        self
    }

    /// Pure dephasing rate `1/t2 - 1/(2 t1)`, non-negative by construction.
    pub fn gamma_phi(&self) -> f64 {
        (1.0 / self.t2 - 0.5 / self.t1).max(0.0)
    }
}

/// Propagation controls.
#[derive(Debug, Clone, Copy)]
pub struct PropagateOptions {
    pub steps: usize,
    /// Store the operator at every grid point.
    pub record_trajectory: bool,
    /// Re-run at doubled resolution and fail if the result moved by more than
    /// [`CONVERGENCE_TOL`].
    pub verify_convergence: bool,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self { steps: DEFAULT_STEPS, record_trajectory: false, verify_convergence: false }
    }
}

impl PropagateOptions {
    pub fn with_steps(steps: usize) -> Self {
        Self { steps, ..Self::default() }
    }

    pub fn recording(mut self) -> Self {
        self.record_trajectory = true;
        self
    }

    pub fn checked(mut self) -> Self {
        self.verify_convergence = true;
        self
    }
}

/// What a stored trajectory point contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryKind {
    /// Propagators U(t, -T/2).
    Unitary,
    /// Density matrices rho(t).
    Density,
}

/// Time-ordered operator samples plus the frame phase at each sample.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub times: Vec<f64>,
    /// Accumulated detuning phase phi(t) on the integration grid.
    pub frame_phases: Vec<f64>,
    pub operators: Vec<DMatrix<C64>>,
}

/// Result of a propagation run.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub frame: Frame,
    pub kind: TrajectoryKind,
    /// Final propagator (closed) or final density matrix (open).
    pub final_operator: DMatrix<C64>,
    pub trajectory: Option<Trajectory>,
    /// Total accumulated detuning phase phi(T/2).
    pub total_frame_phase: f64,
    pub steps: usize,
}

impl PropagationResult {
    /// Final U as a 2x2 matrix; fails for other dimensions or open results.
    pub fn final_unitary2(&self) -> Result<Matrix2<C64>> {
        if self.kind != TrajectoryKind::Unitary {
            return Err(Error::InvalidInput("result does not hold a unitary".into()));
        }
        if self.final_operator.nrows() != 2 {
            return Err(Error::UnsupportedDimension {
                dim: self.final_operator.nrows(),
                op: "final_unitary2",
            });
        }
        Ok(Matrix2::from_fn(|r, c| self.final_operator[(r, c)]))
    }
}

#[inline]
fn midpoints(duration: f64, steps: usize) -> impl Iterator<Item = f64> {
    let dt = duration / steps as f64;
    let start = -0.5 * duration;
    (0..steps).map(move |k| start + (k as f64 + 0.5) * dt)
}

/// Closed two-level evolution over a sub-window `[t0, t1]` of the pulse.
pub(crate) fn evolve_two_level_window(
    pulse: &Pulse,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Matrix2<C64> {
    let dt = (t1 - t0) / steps as f64;
    let mut u = Matrix2::identity();
    for k in 0..steps {
        let t = t0 + (k as f64 + 0.5) * dt;
        let s = pulse.sample_unchecked(t);
        u = mat::expi_two_level(s.rabi, s.detuning, dt) * u;
    }
    u
}

/// Closed two-level evolution over the full window.
pub(crate) fn evolve_two_level(pulse: &Pulse, steps: usize) -> Matrix2<C64> {
    evolve_two_level_window(pulse, -pulse.half_window(), pulse.half_window(), steps)
}

pub(crate) fn evolve_three_level(
    pulse: &Pulse,
    model: &ThreeLevelModel,
    steps: usize,
) -> Result<Matrix3<C64>> {
    let dt = pulse.duration / steps as f64;
    let mut u = Matrix3::identity();
    for t in midpoints(pulse.duration, steps) {
        let s = pulse.sample_unchecked(t);
        let h = crate::model::hamiltonian_3lvl(&s, model)?;
        u = mat::expi_hermitian3(&h, dt) * u;
    }
    Ok(u)
}

/// Excited-state population `|<1|U|0>|^2` of a two-level propagator.
#[inline]
pub fn transfer_probability(u: &Matrix2<C64>) -> f64 {
    u[(0, 1)].norm_sqr()
}

/// Level populations after starting from the ground state, three-level.
#[inline]
pub fn populations3(u: &Matrix3<C64>) -> [f64; 3] {
    [u[(0, 0)].norm_sqr(), u[(1, 0)].norm_sqr(), u[(2, 0)].norm_sqr()]
}

/// Integrate `dU/dt = -i H(t) U` across the pulse window.
///
/// The default step count is converged for every pulse family in this crate's
/// operating range: doubling it moves the result by less than 1e-8 in
/// Frobenius norm. With [`PropagateOptions::verify_convergence`] the doubling
/// comparison actually runs and a drift above [`CONVERGENCE_TOL`] is an error.
pub fn propagate_unitary(
    pulse: &Pulse,
    model: &SystemModel,
    opts: &PropagateOptions,
) -> Result<PropagationResult> {
    check_steps(opts.steps)?;
    let result = match model {
        SystemModel::TwoLevel(_) => propagate_closed_2(pulse, opts),
        SystemModel::ThreeLevel(m) => propagate_closed_3(pulse, m, opts)?,
    };
    if opts.verify_convergence {
        let fine = PropagateOptions { steps: opts.steps * 2, ..Default::default() };
        let refined = match model {
            SystemModel::TwoLevel(_) => propagate_closed_2(pulse, &fine),
            SystemModel::ThreeLevel(m) => propagate_closed_3(pulse, m, &fine)?,
        };
        let delta = (&refined.final_operator - &result.final_operator).norm();
        if delta > CONVERGENCE_TOL {
            return Err(Error::NotConverged {
                steps: opts.steps,
                delta,
                tol: CONVERGENCE_TOL,
            });
        }
    }
    Ok(result)
}

fn check_steps(steps: usize) -> Result<()> {
    if steps < MIN_STEPS {
        return Err(Error::InvalidInput(format!(
            "steps = {steps} below the minimum of {MIN_STEPS}"
        )));
    }
    Ok(())
}

fn propagate_closed_2(pulse: &Pulse, opts: &PropagateOptions) -> PropagationResult {
    let steps = opts.steps;
    let dt = pulse.duration / steps as f64;
    let mut u = Matrix2::identity();
    let mut phi = 0.0;
    let mut trajectory = opts.record_trajectory.then(|| Trajectory {
        kind: TrajectoryKind::Unitary,
        times: Vec::with_capacity(steps + 1),
        frame_phases: Vec::with_capacity(steps + 1),
        operators: Vec::with_capacity(steps + 1),
    });
    if let Some(tr) = trajectory.as_mut() {
        tr.times.push(-pulse.half_window());
        tr.frame_phases.push(0.0);
        tr.operators.push(to_dmatrix2(&u));
    }
    for (k, t) in midpoints(pulse.duration, steps).enumerate() {
        let s = pulse.sample_unchecked(t);
        u = mat::expi_two_level(s.rabi, s.detuning, dt) * u;
        phi += s.detuning * dt;
        if let Some(tr) = trajectory.as_mut() {
            tr.times.push(-pulse.half_window() + (k + 1) as f64 * dt);
            tr.frame_phases.push(phi);
            tr.operators.push(to_dmatrix2(&u));
        }
    }
    PropagationResult {
        frame: Frame::DriveRotating,
        kind: TrajectoryKind::Unitary,
        final_operator: to_dmatrix2(&u),
        trajectory,
        total_frame_phase: phi,
        steps,
    }
}

fn propagate_closed_3(
    pulse: &Pulse,
    model: &ThreeLevelModel,
    opts: &PropagateOptions,
) -> Result<PropagationResult> {
    let steps = opts.steps;
    let dt = pulse.duration / steps as f64;
    let mut u = Matrix3::identity();
    let mut phi = 0.0;
    let mut trajectory = opts.record_trajectory.then(|| Trajectory {
        kind: TrajectoryKind::Unitary,
        times: Vec::with_capacity(steps + 1),
        frame_phases: Vec::with_capacity(steps + 1),
        operators: Vec::with_capacity(steps + 1),
    });
    if let Some(tr) = trajectory.as_mut() {
        tr.times.push(-pulse.half_window());
        tr.frame_phases.push(0.0);
        tr.operators.push(to_dmatrix3(&u));
    }
    for (k, t) in midpoints(pulse.duration, steps).enumerate() {
        let s = pulse.sample_unchecked(t);
        let h = crate::model::hamiltonian_3lvl(&s, model)?;
        u = mat::expi_hermitian3(&h, dt) * u;
        phi += s.detuning * dt;
        if let Some(tr) = trajectory.as_mut() {
            tr.times.push(-pulse.half_window() + (k + 1) as f64 * dt);
            tr.frame_phases.push(phi);
            tr.operators.push(to_dmatrix3(&u));
        }
    }
    Ok(PropagationResult {
        frame: Frame::DriveRotating,
        kind: TrajectoryKind::Unitary,
        final_operator: to_dmatrix3(&u),
        trajectory,
        total_frame_phase: phi,
        steps,
    })
}

/// Exact action of the relaxation/dephasing dissipator over a time `tau`,
/// in the (|1>, |0>) ordering.
#[inline]
fn dissipate(rho: &mut Matrix2<C64>, tau: f64, gamma1: f64, inv_t2: f64) {
    let decay = (-gamma1 * tau).exp();
    let coh = (-inv_t2 * tau).exp();
    let pe = rho[(0, 0)];
    rho[(0, 0)] = pe * decay;
    rho[(1, 1)] += pe * (1.0 - decay);
    rho[(0, 1)] *= coh;
    rho[(1, 0)] *= coh;
}

/// Integrate the Lindblad master equation with a lowering operator at rate
/// `1/t1` and pure dephasing at rate `gamma_phi`, Strang-split around the
/// midpoint-exponential unitary step. Two-level only.
pub fn propagate_open(
    pulse: &Pulse,
    model: &SystemModel,
    noise: &NoiseModel,
    initial: &Matrix2<C64>,
    opts: &PropagateOptions,
) -> Result<PropagationResult> {
    if model.dim() != 2 {
        return Err(Error::UnsupportedDimension { dim: model.dim(), op: "propagate_open" });
    }
    check_steps(opts.steps)?;
    let run = |steps: usize, record: bool| -> PropagationResult {
        let dt = pulse.duration / steps as f64;
        let gamma1 = 1.0 / noise.t1;
        let inv_t2 = 1.0 / noise.t2;
        let mut rho = *initial;
        let mut phi = 0.0;
        let mut trajectory = record.then(|| Trajectory {
            kind: TrajectoryKind::Density,
            times: Vec::with_capacity(steps + 1),
            frame_phases: Vec::with_capacity(steps + 1),
            operators: Vec::with_capacity(steps + 1),
        });
        if let Some(tr) = trajectory.as_mut() {
            tr.times.push(-pulse.half_window());
            tr.frame_phases.push(0.0);
            tr.operators.push(to_dmatrix2(&rho));
        }
        for (k, t) in midpoints(pulse.duration, steps).enumerate() {
            let s = pulse.sample_unchecked(t);
            let u = mat::expi_two_level(s.rabi, s.detuning, dt);
            dissipate(&mut rho, 0.5 * dt, gamma1, inv_t2);
            rho = u * rho * u.adjoint();
            dissipate(&mut rho, 0.5 * dt, gamma1, inv_t2);
            phi += s.detuning * dt;
            if let Some(tr) = trajectory.as_mut() {
                tr.times.push(-pulse.half_window() + (k + 1) as f64 * dt);
                tr.frame_phases.push(phi);
                tr.operators.push(to_dmatrix2(&rho));
            }
        }
        PropagationResult {
            frame: Frame::DriveRotating,
            kind: TrajectoryKind::Density,
            final_operator: to_dmatrix2(&rho),
            trajectory,
            total_frame_phase: phi,
            steps,
        }
    };
    let result = run(opts.steps, opts.record_trajectory);
    if opts.verify_convergence {
        let refined = run(opts.steps * 2, false);
        let delta = (&refined.final_operator - &result.final_operator).norm();
        if delta > CONVERGENCE_TOL {
            return Err(Error::NotConverged { steps: opts.steps, delta, tol: CONVERGENCE_TOL });
        }
    }
    Ok(result)
}

/// The gate unitary in the qubit-rotating frame: the drive-frame propagator
/// followed by the z-rotation through the accumulated detuning phase. For
/// detunings odd in `t` the phase vanishes and the frames agree.
pub fn gate_unitary(pulse: &Pulse, steps: usize) -> Result<Matrix2<C64>> {
    check_steps(steps)?;
    let dt = pulse.duration / steps as f64;
    let mut u = Matrix2::identity();
    let mut phi = 0.0;
    for t in midpoints(pulse.duration, steps) {
        let s = pulse.sample_unchecked(t);
        u = mat::expi_two_level(s.rabi, s.detuning, dt) * u;
        phi += s.detuning * dt;
    }
    Ok(mat::rot_z(phi) * u)
}

/// A single-qubit gate realized by a pulse: closed or Lindblad-noisy, with a
/// drive carrier phase (which sets the rotation-axis angle) and an amplitude
/// miscalibration factor.
#[derive(Debug, Clone)]
pub struct GateChannel {
    pub pulse: Pulse,
    pub noise: Option<NoiseModel>,
    pub steps: usize,
    /// Carrier phase alpha: the realized gate is `A U A^dag` with
    /// `A = exp(i alpha sigma_z / 2)`.
    pub drive_phase: f64,
    /// Multiplies the envelope amplitude; 1.0 is a calibrated drive.
    pub amplitude_scale: f64,
}

impl GateChannel {
    pub fn unitary(pulse: Pulse, steps: usize) -> Self {
        Self { pulse, noise: None, steps, drive_phase: 0.0, amplitude_scale: 1.0 }
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn with_drive_phase(mut self, alpha: f64) -> Self {
        self.drive_phase = alpha;
        self
    }

    pub fn with_amplitude_scale(mut self, scale: f64) -> Self {
        self.amplitude_scale = scale;
        self
    }

    fn scaled_pulse(&self) -> Pulse {
        if self.amplitude_scale == 1.0 {
            self.pulse.clone()
        } else {
            Pulse {
                duration: self.pulse.duration,
                envelope: self
                    .pulse
                    .envelope
                    .with_peak(self.pulse.envelope.peak() * self.amplitude_scale),
                detuning: self.pulse.detuning.clone(),
            }
        }
    }

    /// The realized qubit-frame unitary, ignoring decoherence.
    pub fn realized_unitary(&self) -> Result<Matrix2<C64>> {
        let base = gate_unitary(&self.scaled_pulse(), self.steps)?;
        let a = mat::rot_z(-self.drive_phase);
        Ok(a * base * a.adjoint())
    }

    /// Apply the channel to a density matrix (qubit frame in, qubit frame out).
    pub fn apply(&self, rho: &Matrix2<C64>) -> Result<Matrix2<C64>> {
        let a = mat::rot_z(-self.drive_phase);
        match &self.noise {
            None => {
                let u = self.realized_unitary()?;
                Ok(u * rho * u.adjoint())
            }
            Some(noise) => {
                let pulse = self.scaled_pulse();
                let rho_in = a.adjoint() * rho * a;
                let result = propagate_open(
                    &pulse,
                    &SystemModel::TwoLevel(crate::model::TwoLevelModel::closed()),
                    noise,
                    &rho_in,
                    &PropagateOptions::with_steps(self.steps),
                )?;
                let rho_d = Matrix2::from_fn(|r, c| result.final_operator[(r, c)]);
                let rz = mat::rot_z(result.total_frame_phase);
                let rho_q = rz * rho_d * rz.adjoint();
                Ok(a * rho_q * a.adjoint())
            }
        }
    }
}

/// One point of a Bloch trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub time: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

fn bloch_of_state(psi: &Vector2<C64>) -> (f64, f64, f64) {
    let cross = psi[0].conj() * psi[1];
    (2.0 * cross.re, 2.0 * cross.im, psi[0].norm_sqr() - psi[1].norm_sqr())
}

fn bloch_of_density(rho: &DMatrix<C64>) -> (f64, f64, f64) {
    let r01 = rho[(0, 1)];
    (2.0 * r01.re, -2.0 * r01.im, (rho[(0, 0)] - rho[(1, 1)]).re)
}

/// Bloch components `<sigma_x>, <sigma_y>, <sigma_z>` along a stored
/// trajectory, starting from the ground state for unitary trajectories.
///
/// `frame` selects the drive-rotating frame the propagation ran in or the
/// qubit-rotating frame, which is reached by rotating about z through the
/// accumulated detuning phase. The two frames coincide at t = -T/2, and for
/// odd detunings also at t = +T/2. Two-level only.
pub fn bloch_trajectory(result: &PropagationResult, frame: Frame) -> Result<Vec<BlochPoint>> {
    let trajectory = result
        .trajectory
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("no trajectory stored; record one first".into()))?;
    let dim = result.final_operator.nrows();
    if dim != 2 {
        return Err(Error::UnsupportedDimension { dim, op: "bloch_trajectory" });
    }
    let ground = Vector2::new(mat::ZERO, mat::ONE);
    let mut out = Vec::with_capacity(trajectory.times.len());
    for ((&t, &phi), op) in trajectory
        .times
        .iter()
        .zip(&trajectory.frame_phases)
        .zip(&trajectory.operators)
    {
        let (x, y, z) = match trajectory.kind {
            TrajectoryKind::Unitary => {
                let u = Matrix2::from_fn(|r, c| op[(r, c)]);
                bloch_of_state(&(u * ground))
            }
            TrajectoryKind::Density => bloch_of_density(op),
        };
        let (x, y) = match frame {
            Frame::DriveRotating => (x, y),
            Frame::QubitRotating => {
                let (s, c) = phi.sin_cos();
                (c * x - s * y, s * x + c * y)
            }
        };
        out.push(BlochPoint { time: t, x, y, z });
    }
    Ok(out)
}

fn to_dmatrix2(m: &Matrix2<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(2, 2, |r, c| m[(r, c)])
}

fn to_dmatrix3(m: &Matrix3<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(3, 3, |r, c| m[(r, c)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eigenframe, TwoLevelModel};
    use crate::pulse::{DetuningProfile, Envelope};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{PI, TAU};

    fn two_level() -> SystemModel {
        SystemModel::TwoLevel(TwoLevelModel::closed())
    }

    fn rect_pulse(omega: f64, delta: f64) -> Pulse {
        Pulse::new(
            1.0,
            Envelope::rectangular(omega),
            DetuningProfile::constant(delta),
        )
    }

    fn sg_chirp(omega_units: f64, delta_max_units: f64, offset_units: f64) -> Pulse {
        Pulse::new(
            1.0,
            Envelope::super_gaussian(omega_units * TAU, 1.0),
            DetuningProfile::linear_chirp(delta_max_units * TAU, offset_units * TAU),
        )
    }

    #[test]
    fn resonant_pi_pulse_transfers() {
        let result =
            propagate_unitary(&rect_pulse(PI, 0.0), &two_level(), &Default::default()).unwrap();
        let u = result.final_unitary2().unwrap();
        assert_abs_diff_eq!(transfer_probability(&u), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn detuned_rabi_matches_closed_form() {
        // constant H: the midpoint exponential is exact at any step count
        for &(omega, delta) in &[(PI, 0.0), (2.0, 3.0), (5.5, -1.3), (TAU, 0.5)] {
            let u = propagate_unitary(
                &rect_pulse(omega, delta),
                &two_level(),
                &PropagateOptions::with_steps(64),
            )
            .unwrap()
            .final_unitary2()
            .unwrap();
            let r = omega.hypot(delta);
            let expected = omega * omega / (r * r) * (0.5 * r).sin().powi(2);
            assert_abs_diff_eq!(transfer_probability(&u), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn paper_scale_chirp_transfer() {
        let u = propagate_unitary(&sg_chirp(2.5, 10.8, 0.0), &two_level(), &Default::default())
            .unwrap()
            .final_unitary2()
            .unwrap();
        assert!(transfer_probability(&u) > 0.999);
    }

    #[test]
    fn unitarity_preserved_along_trajectory() {
        let opts = PropagateOptions::default().recording();
        let result = propagate_unitary(&sg_chirp(2.5, 10.8, 0.0), &two_level(), &opts).unwrap();
        let tr = result.trajectory.unwrap();
        for op in &tr.operators {
            let u = Matrix2::from_fn(|r, c| op[(r, c)]);
            assert!(mat::unitarity_residual2(&u) < 1e-9);
        }
    }

    #[test]
    fn composition_of_half_windows() {
        let pulse = sg_chirp(2.5, 10.8, 0.0);
        let full = evolve_two_level(&pulse, 2048);
        let first = evolve_two_level_window(&pulse, -0.5, 0.0, 1024);
        let second = evolve_two_level_window(&pulse, 0.0, 0.5, 1024);
        assert!((second * first - full).norm() < 1e-9);
    }

    #[test]
    fn second_order_convergence() {
        let pulse = sg_chirp(2.5, 10.8, 0.0);
        let reference = evolve_two_level(&pulse, 1 << 16);
        let err = |steps: usize| (evolve_two_level(&pulse, steps) - reference).norm();
        let e1 = err(512);
        let e2 = err(1024);
        let e3 = err(2048);
        assert!(e1 / e2 > 3.5, "first halving gained only {:.2}x", e1 / e2);
        assert!(e2 / e3 > 3.5, "second halving gained only {:.2}x", e2 / e3);
    }

    #[test]
    fn default_steps_are_converged_for_paper_scale_pulses() {
        for pulse in [
            sg_chirp(2.5, 10.8, 0.0),
            sg_chirp(5.0, 12.0, 0.3),
            rect_pulse(TAU, 1.64 * TAU),
        ] {
            let coarse = evolve_two_level(&pulse, DEFAULT_STEPS);
            let fine = evolve_two_level(&pulse, 2 * DEFAULT_STEPS);
            let delta = (fine - coarse).norm();
            assert!(delta < 1e-8, "doubling moved the result by {delta:.2e}");
        }
    }

    #[test]
    fn convergence_check_flags_coarse_grids() {
        // a violent chirp at the minimum step count is far from converged
        let pulse = sg_chirp(8.0, 400.0, 0.0);
        let err = propagate_unitary(
            &pulse,
            &two_level(),
            &PropagateOptions::with_steps(64).checked(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotConverged { .. }));
        assert!(propagate_unitary(
            &pulse,
            &two_level(),
            &PropagateOptions::with_steps(1 << 14).checked()
        )
        .is_ok());
        // and too few steps are rejected outright
        assert!(matches!(
            propagate_unitary(&pulse, &two_level(), &PropagateOptions::with_steps(32)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn free_decay_and_dephasing() {
        let noise = NoiseModel::new(7.0, 5.0).unwrap();
        let silent = Pulse::new(
            1.0,
            Envelope::rectangular(0.0),
            DetuningProfile::constant(0.0),
        );
        let excited = Matrix2::new(mat::ONE, mat::ZERO, mat::ZERO, mat::ZERO);
        let rho = propagate_open(&silent, &two_level(), &noise, &excited, &Default::default())
            .unwrap()
            .final_operator;
        assert_relative_eq!(rho[(0, 0)].re, (-1.0_f64 / 7.0).exp(), max_relative = 1e-12);

        let half = mat::re(0.5);
        let plus = Matrix2::new(half, half, half, half);
        let rho = propagate_open(&silent, &two_level(), &noise, &plus, &Default::default())
            .unwrap()
            .final_operator;
        assert_relative_eq!(rho[(0, 1)].norm(), 0.5 * (-1.0_f64 / 5.0).exp(), max_relative = 1e-12);
    }

    #[test]
    fn open_evolution_preserves_trace_and_hermiticity() {
        let noise = NoiseModel::new(58.333, 41.667).unwrap();
        let pulse = sg_chirp(2.5, 10.8, 0.0);
        let ground = Matrix2::new(mat::ZERO, mat::ZERO, mat::ZERO, mat::ONE);
        let result = propagate_open(
            &pulse,
            &two_level(),
            &noise,
            &ground,
            &PropagateOptions::default().recording(),
        )
        .unwrap();
        for op in &result.trajectory.unwrap().operators {
            let trace = (op[(0, 0)] + op[(1, 1)]).re;
            assert!((trace - 1.0).abs() < 1e-9);
            let herm = (op - op.adjoint()).norm();
            assert!(herm < 1e-12);
            // positivity: eigenvalues of a 2x2 Hermitian matrix
            let half_tr = 0.5 * trace;
            let det = (op[(0, 0)] * op[(1, 1)] - op[(0, 1)] * op[(1, 0)]).re;
            let disc = (half_tr * half_tr - det).max(0.0).sqrt();
            assert!(half_tr - disc > -1e-9);
        }
        assert!(propagate_open(
            &pulse,
            &SystemModel::ThreeLevel(
                crate::model::ThreeLevelModel::transmon(TwoLevelModel::closed(), TAU).unwrap()
            ),
            &noise,
            &ground,
            &Default::default()
        )
        .is_err());
    }

    /// Regression anchor for the decoherence loss of a pi pulse with the
    /// experiment-scale timing: T = 120 ns gates against T1 = 7 us and
    /// T2 = 5 us, i.e. t1 = 58.333 and t2 = 41.667 in units of the gate time.
    #[test]
    fn pi_pulse_decoherence_loss() {
        let noise = NoiseModel::new(7e-6 / 120e-9, 5e-6 / 120e-9).unwrap();
        let pulse = rect_pulse(PI, 0.0);
        let ground = Matrix2::new(mat::ZERO, mat::ZERO, mat::ZERO, mat::ONE);
        let rho = propagate_open(&pulse, &two_level(), &noise, &ground, &Default::default())
            .unwrap()
            .final_operator;
        let loss = 1.0 - rho[(0, 0)].re;
        assert!((0.015..0.045).contains(&loss), "loss per gate {loss}");
        // frozen from this integrator at default resolution
        assert_relative_eq!(loss, 0.016372, max_relative = 1e-3);
    }

    #[test]
    fn bloch_ground_state_is_south_pole() {
        let result = propagate_unitary(
            &rect_pulse(0.0, 0.0),
            &two_level(),
            &PropagateOptions::default().recording(),
        )
        .unwrap();
        for p in bloch_trajectory(&result, Frame::QubitRotating).unwrap() {
            assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(p.y, 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(p.z, -1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn frames_coincide_at_window_edges_for_odd_detuning() {
        let result = propagate_unitary(
            &sg_chirp(2.5, 10.8, 0.0),
            &two_level(),
            &PropagateOptions::default().recording(),
        )
        .unwrap();
        let drive = bloch_trajectory(&result, Frame::DriveRotating).unwrap();
        let qubit = bloch_trajectory(&result, Frame::QubitRotating).unwrap();
        for (d, q) in [(&drive[0], &qubit[0]), (drive.last().unwrap(), qubit.last().unwrap())] {
            assert_abs_diff_eq!(d.x, q.x, epsilon = 1e-9);
            assert_abs_diff_eq!(d.y, q.y, epsilon = 1e-9);
        }
        // mid-pulse the frames differ
        let mid = drive.len() / 3;
        let dx = (drive[mid].x - qubit[mid].x).abs() + (drive[mid].y - qubit[mid].y).abs();
        assert!(dx > 1e-3);
    }

    #[test]
    fn chirp_trajectory_follows_adiabatic_path() {
        // strong drive: the drive-frame trajectory hugs the lower eigenstate
        let pulse = sg_chirp(8.0, 40.0, 0.0);
        let result = propagate_unitary(
            &pulse,
            &two_level(),
            &PropagateOptions::default().recording(),
        )
        .unwrap();
        let points = bloch_trajectory(&result, Frame::DriveRotating).unwrap();
        let mut worst = 0.0_f64;
        for p in &points {
            let s = pulse.sample(p.time.clamp(-0.5, 0.5)).unwrap();
            let frame = eigenframe(&s).unwrap();
            // Bloch vector of |E_-> in the (|1>, |0>) ordering
            let theta = frame.mixing_angle;
            let (ax, az) = (-(2.0 * theta).sin(), -(2.0 * theta).cos());
            let dist =
                ((p.x - ax).powi(2) + p.y.powi(2) + (p.z - az).powi(2)).sqrt();
            worst = worst.max(dist);
        }
        assert!(worst < 0.2, "max Bloch distance from adiabatic path: {worst}");
    }

    #[test]
    fn bloch_rejects_three_level_and_missing_trajectory() {
        let m = SystemModel::ThreeLevel(
            crate::model::ThreeLevelModel::transmon(TwoLevelModel::closed(), 20.0 * TAU).unwrap(),
        );
        let result = propagate_unitary(
            &sg_chirp(2.5, 10.8, 0.0),
            &m,
            &PropagateOptions::default().recording(),
        )
        .unwrap();
        assert!(matches!(
            bloch_trajectory(&result, Frame::DriveRotating),
            Err(Error::UnsupportedDimension { .. })
        ));
        let no_tr =
            propagate_unitary(&sg_chirp(2.5, 10.8, 0.0), &two_level(), &Default::default())
                .unwrap();
        assert!(bloch_trajectory(&no_tr, Frame::DriveRotating).is_err());
    }

    #[test]
    fn gate_unitary_matches_rabi_rotation() {
        // resonant rectangular pulse with area pi/2: exp(-i pi/4 sigma_x)
        let u = gate_unitary(&rect_pulse(0.5 * PI, 0.0), 512).unwrap();
        let expected = Matrix2::new(
            mat::re((0.25 * PI).cos()),
            mat::re((0.25 * PI).sin()) * -mat::I,
            mat::re((0.25 * PI).sin()) * -mat::I,
            mat::re((0.25 * PI).cos()),
        );
        assert!((u - expected).norm() < 1e-10);
    }

    #[test]
    fn drive_phase_rotates_gate_axis() {
        // pi pulse about x, phase-shifted by -pi/2, becomes a pi pulse about y
        let gate = GateChannel::unitary(rect_pulse(PI, 0.0), 512).with_drive_phase(-0.5 * PI);
        let u = gate.realized_unitary().unwrap();
        let expected = mat::sigma_y() * -mat::I;
        assert!((u - expected).norm() < 1e-10);
    }

    #[test]
    fn noisy_channel_reduces_to_unitary_when_noise_vanishes() {
        let pulse = sg_chirp(2.5, 10.8, 0.0);
        let ground = Matrix2::new(mat::ZERO, mat::ZERO, mat::ZERO, mat::ONE);
        let clean = GateChannel::unitary(pulse.clone(), 1024).apply(&ground).unwrap();
        let weak = GateChannel::unitary(pulse, 1024)
            .with_noise(NoiseModel::new(1e9, 1e9).unwrap())
            .apply(&ground)
            .unwrap();
        assert!((clean - weak).norm() < 1e-6);
    }
}
