//! chirpkit: design, simulation, and optimization of phase/frequency-modulated
//! control pulses for driven two- and three-level quantum systems.
//!
//! The crate covers the full workflow for robust single-qubit control with
//! frequency-modulated drives:
//!
//! - [`model`]: rotating-frame Hamiltonians, the instantaneous eigensystem,
//!   and the phase connecting the drive- and qubit-rotating frames.
//! - [`pulse`]: envelope and detuning families (rectangular / super-Gaussian /
//!   Gaussian, constant / linear chirp / Fourier series) and IQ synthesis.
//! - [`propagate`]: unitary and Lindblad time evolution plus Bloch
//!   trajectories.
//! - [`optimize`]: amplitude-robust rotation design by gradient descent on an
//!   amplitude-averaged Frobenius cost, and interpolation of pulse families.
//! - [`tomo`]: Pauli decompositions, simulated quantum process tomography,
//!   and gate fidelities.
//! - [`analysis`]: parameter-sweep maps, adiabatic-basis traces, the
//!   adiabaticity criterion, the asymptotic avoided-crossing oracle, and
//!   randomized benchmarking.
//! - [`cli`]: the batch front-end behind the `chirpkit` binary (configuration
//!   files, CSV/JSON artifacts).
//!
//! Conventions: hbar = 1 and every frequency is angular. Simulations are
//! usually run dimensionless with the pulse duration as the time unit, so the
//! reference amplitude for a full revolution is `omega_2pi = 2 pi`; cyclic
//! units (MHz, GS/s) appear only at the CLI boundary. Two-level matrices
//! order the basis (|1>, |0>), excited state first; three-level matrices use
//! (|0>, |1>, |2>).
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release --example transfer_map            # population-transfer robustness map
//! cargo run --release --example robustness_scan         # amplitude/detuning line scans
//! cargo run --release --example bloch_trajectory        # trajectory in both rotating frames
//! cargo run --release --example rectangular_fringes     # interference stripes + phase rule
//! cargo run --release --example lz_asymptotics          # sweep-rate oracle vs simulation
//! cargo run --release --example three_level_spectrum    # leakage vs drive detuning
//! cargo run --release --example envelope_comparison     # Gaussian vs super-Gaussian
//! cargo run --release --example robust_rotations        # optimize the rotation family
//! cargo run --release --example rotation_interpolation  # arbitrary angles by interpolation
//! cargo run --release --example qpt_amplitude_sweep     # process matrices across a plateau
//! cargo run --release --example randomized_benchmarking # decay-fit gate benchmarking
//! cargo run --release --example export_waveform         # IQ samples for an AWG
//! ```
//!
//! The thin `chirpkit` binary drives the same library from configuration
//! files; see the README for the command list.

pub mod analysis;
pub mod cli;
mod error;
pub(crate) mod mat;
pub mod model;
pub mod optimize;
pub mod propagate;
pub mod pulse;
pub mod tomo;

pub use error::{Error, Result};
