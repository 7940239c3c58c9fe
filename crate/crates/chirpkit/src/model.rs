//! Physical parameters and closed-form structure: Hamiltonians, the
//! instantaneous eigensystem, and the phase connecting rotating frames.
//!
//! Everything here works in angular-frequency units with hbar = 1. The
//! conventional dimensionless setup takes the pulse duration as the time
//! unit, so the reference Rabi frequency is `omega_2pi = 2 pi`.
//!
//! Basis ordering: two-level matrices use (|1>, |0>), excited state first,
//! with |1> = (1, 0)^T and |0> = (0, 1)^T. Three-level matrices use the
//! natural ladder ordering (|0>, |1>, |2>). Both conventions are fixed here
//! and in [`crate::mat`]; do not mix them.

use nalgebra::{Matrix2, Matrix3, Vector2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{Error, Result};
use crate::mat::{re, ZERO};
use crate::pulse::Pulse;

/// Reference Rabi frequency `2 pi / T`: the resonant amplitude that performs a
/// full 2 pi rotation in a pulse of duration `T`.
#[inline]
pub fn omega_2pi(duration: f64) -> f64 {
    TAU / duration
}

/// Time and frequency scale of a simulation run.
///
/// The product `omega_2pi() * duration()` is `2 pi` exactly; all frequencies
/// inside the crate are angular, and conversions to cyclic units happen only
/// at the CLI boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitsConvention {
    duration: f64,
}

impl UnitsConvention {
    pub fn new(duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidInput(format!(
                "pulse duration must be positive and finite, got {duration}"
            )));
        }
        Ok(Self { duration })
    }

    /// Dimensionless convention: T = 1, omega_2pi = 2 pi.
    pub fn dimensionless() -> Self {
        Self { duration: 1.0 }
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn omega_2pi(&self) -> f64 {
        omega_2pi(self.duration)
    }
}

/// A driven qubit: transition frequency plus optional decoherence times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelModel {
    /// Qubit transition frequency (angular). In the dimensionless rotating
    /// frame this is conventionally zero.
    pub qubit_frequency: f64,
    /// Relaxation time T1.
    pub t1: Option<f64>,
    /// Total dephasing time T2.
    pub t2: Option<f64>,
}

impl TwoLevelModel {
    pub fn new(qubit_frequency: f64, t1: Option<f64>, t2: Option<f64>) -> Result<Self> {
        if !qubit_frequency.is_finite() {
            return Err(Error::InvalidInput("qubit frequency must be finite".into()));
        }
        for (name, v) in [("t1", t1), ("t2", t2)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "{name} must be positive and finite, got {v}"
                    )));
                }
            }
        }
        // physicality of the pure-dephasing rate: 1/t2 - 1/(2 t1) >= 0
        if let (Some(t1), Some(t2)) = (t1, t2) {
            if t2 > 2.0 * t1 {
                return Err(Error::InvalidInput(format!(
                    "unphysical decoherence times: t2 = {t2} exceeds 2 t1 = {}",
                    2.0 * t1
                )));
            }
        }
        Ok(Self { qubit_frequency, t1, t2 })
    }

    /// Closed two-level system in the rotating frame (qubit frequency 0).
    pub fn closed() -> Self {
        Self { qubit_frequency: 0.0, t1: None, t2: None }
    }
}

/// Transmon-like three-level extension of [`TwoLevelModel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeLevelModel {
    pub base: TwoLevelModel,
    /// Anharmonicity E_C (angular): the 1-2 transition sits at
    /// `f_12 = f_01 - E_C` by construction.
    pub anharmonicity: f64,
    /// Ratio of the 1-2 and 0-1 transition dipole moments,
    /// `lambda = Omega_12 / Omega_01`. There is no direct 0-2 coupling.
    pub dipole_ratio: f64,
}

/// Transmon asymptotic dipole ratio, the worst case for cross-coupling.
pub const TRANSMON_DIPOLE_RATIO: f64 = -std::f64::consts::SQRT_2;

impl ThreeLevelModel {
    pub fn new(base: TwoLevelModel, anharmonicity: f64, dipole_ratio: f64) -> Result<Self> {
        if !(anharmonicity.is_finite() && anharmonicity > 0.0) {
            return Err(Error::InvalidInput(format!(
                "anharmonicity must be positive and finite, got {anharmonicity}"
            )));
        }
        if !dipole_ratio.is_finite() {
            return Err(Error::InvalidInput("dipole ratio must be finite".into()));
        }
        Ok(Self { base, anharmonicity, dipole_ratio })
    }

    /// Transmon defaults: `lambda = -sqrt(2)`.
    pub fn transmon(base: TwoLevelModel, anharmonicity: f64) -> Result<Self> {
        Self::new(base, anharmonicity, TRANSMON_DIPOLE_RATIO)
    }
}

/// Either system the propagator can evolve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SystemModel {
    TwoLevel(TwoLevelModel),
    ThreeLevel(ThreeLevelModel),
}

impl SystemModel {
    pub fn dim(&self) -> usize {
        match self {
            SystemModel::TwoLevel(_) => 2,
            SystemModel::ThreeLevel(_) => 3,
        }
    }
}

/// The control field at one instant.
///
/// `detuning` is the instantaneous detuning
/// `Delta(t) = omega_d(t) - omega_q + t * d(omega_d)/dt`, and
/// `drive_frequency` stores the drive frequency relative to the qubit,
/// `omega_d(t) - omega_q`, so the core never needs the absolute carrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSample {
    pub time: f64,
    /// Rabi amplitude Omega(t) >= 0 (angular).
    pub rabi: f64,
    /// Instantaneous detuning Delta(t) (angular).
    pub detuning: f64,
    /// Drive frequency offset omega_d(t) - omega_q (angular).
    pub drive_frequency: f64,
}

/// Rotating-frame qubit Hamiltonian
/// `H = (1/2) [[-Delta, Omega], [Omega, Delta]]` in the (|1>, |0>) ordering.
pub fn hamiltonian_2lvl(sample: &ControlSample) -> Result<Matrix2<C64>> {
    let (omega, delta) = (sample.rabi, sample.detuning);
    if !(omega.is_finite() && delta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite control sample: Omega = {omega}, Delta = {delta}"
        )));
    }
    Ok(Matrix2::new(
        re(-0.5 * delta),
        re(0.5 * omega),
        re(0.5 * omega),
        re(0.5 * delta),
    ))
}

/// Detunings of the drive relative to the 0-1 and 1-2 transitions, in the
/// transition-minus-drive convention used by the ladder Hamiltonian:
/// `Delta_01 = -Delta` and `Delta_12 = Delta_01 - E_C`.
///
/// The sign is fixed by a brute-force lab-frame derivation (see the
/// `three_level_sign_convention_vs_lab_frame` test): with this choice the
/// two-photon 0-2 resonance sits at `Delta = -E_C/2`, i.e. the drive halfway
/// between the 0-1 and 1-2 transitions, as it must for a negative-anharmonicity
/// ladder.
#[inline]
pub fn ladder_detunings(delta: f64, anharmonicity: f64) -> (f64, f64) {
    let delta_01 = -delta;
    (delta_01, delta_01 - anharmonicity)
}

/// Rotating-frame three-level Hamiltonian in the (|0>, |1>, |2>) ordering:
///
/// ```text
///       [ -Delta_01   Omega_01/2      0       ]
///   H = [ Omega_01/2      0       Omega_12/2  ]
///       [     0       Omega_12/2   Delta_12   ]
/// ```
///
/// with `Omega_12 = lambda * Omega_01`, `(Delta_01, Delta_12)` from
/// [`ladder_detunings`], and exactly zero 0-2 coupling.
pub fn hamiltonian_3lvl(sample: &ControlSample, model: &ThreeLevelModel) -> Result<Matrix3<C64>> {
    let (omega, delta) = (sample.rabi, sample.detuning);
    if !(omega.is_finite() && delta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite control sample: Omega = {omega}, Delta = {delta}"
        )));
    }
    let (delta_01, delta_12) = ladder_detunings(delta, model.anharmonicity);
    let g01 = re(0.5 * omega);
    let g12 = re(0.5 * model.dipole_ratio * omega);
    Ok(Matrix3::new(
        re(-delta_01),
        g01,
        ZERO,
        g01,
        ZERO,
        g12,
        ZERO,
        g12,
        re(delta_12),
    ))
}

/// Instantaneous eigensystem of the two-level Hamiltonian.
///
/// `E_pm = +/- (1/2) sqrt(Omega^2 + Delta^2)`, and the mixing angle satisfies
/// `tan(Theta) = (sqrt(Omega^2 + Delta^2) + Delta) / Omega` with
/// `Theta in [0, pi/2]`. Eigenvectors in the (|1>, |0>) ordering:
/// `|E-> = (-sin Theta, cos Theta)^T`, `|E+> = (cos Theta, sin Theta)^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenFrame {
    pub energy_minus: f64,
    pub energy_plus: f64,
    /// Mixing angle Theta in [0, pi/2].
    pub mixing_angle: f64,
    pub eigvec_minus: Vector2<C64>,
    pub eigvec_plus: Vector2<C64>,
}

/// Diagonalize the instantaneous two-level Hamiltonian.
///
/// Requires `Omega >= 0` (any drive phase is absorbed into the frame) and a
/// non-degenerate point `(Omega, Delta) != (0, 0)`.
pub fn eigenframe(sample: &ControlSample) -> Result<EigenFrame> {
    let (omega, delta) = (sample.rabi, sample.detuning);
    if !(omega.is_finite() && delta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite control sample: Omega = {omega}, Delta = {delta}"
        )));
    }
    if omega < 0.0 {
        return Err(Error::InvalidInput(format!(
            "eigenframe requires Omega >= 0, got {omega}"
        )));
    }
    let r = omega.hypot(delta);
    if r == 0.0 {
        return Err(Error::DegenerateSpectrum { t: sample.time });
    }
    // Numerically stable form of atan((r + Delta)/Omega): the half-angle of
    // atan2(Omega, -Delta) covers [0, pi/2] without cancellation.
    let theta = 0.5 * f64::atan2(omega, -delta);
    let (s, c) = theta.sin_cos();
    Ok(EigenFrame {
        energy_minus: -0.5 * r,
        energy_plus: 0.5 * r,
        mixing_angle: theta,
        eigvec_minus: Vector2::new(re(-s), re(c)),
        eigvec_plus: Vector2::new(re(c), re(s)),
    })
}

/// Phase `phi(t) = integral of Delta from -T/2 to t` connecting the
/// drive-rotating frame to the qubit-rotating frame.
///
/// The integral is a midpoint sum on the same uniform grid the propagator
/// uses (`steps` intervals across the full window), so frame conversions are
/// consistent between the two code paths. For any detuning odd in `t` the
/// grid is symmetric and `phi(T/2) = 0` holds exactly.
pub fn frame_phase(pulse: &Pulse, t: f64, steps: usize) -> Result<f64> {
    let half = 0.5 * pulse.duration;
    if !t.is_finite() || t < -half - 1e-12 * pulse.duration || t > half + 1e-12 * pulse.duration {
        return Err(Error::OutOfWindow { t, lo: -half, hi: half });
    }
    let t = t.clamp(-half, half);
    let dt = pulse.duration / steps as f64;
    let whole = (((t + half) / dt).floor() as usize).min(steps);
    let mut phi = 0.0;
    for k in 0..whole {
        let mid = -half + (k as f64 + 0.5) * dt;
        phi += pulse.detuning.detuning(mid, pulse.duration) * dt;
    }
    let t_k = -half + whole as f64 * dt;
    let w = t - t_k;
    if w > 1e-15 * pulse.duration {
        phi += pulse.detuning.detuning(t_k + 0.5 * w, pulse.duration) * w;
    }
    Ok(phi)
}
