//! Pulse families: amplitude envelopes, detuning profiles, time sampling,
//! and IQ waveform synthesis.
//!
//! A [`Pulse`] is defined on the symmetric window `t in [-T/2, T/2]`. All
//! frequencies are angular. Detuning profiles state both the instantaneous
//! detuning `Delta(t)` and the drive-frequency offset `omega_d(t) - omega_q`;
//! the two are tied by `Delta = (omega_d - omega_q) + t * d(omega_d)/dt`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::model::ControlSample;

/// Width parameter of the super-Gaussian envelope `exp(-(t/tau)^4)`, chosen
/// so the amplitude at the window edges is 1% of the peak:
/// `tau = T / (2 (ln 100)^{1/4}) ~= 0.3413 T`.
pub fn super_gaussian_tau(duration: f64) -> f64 {
    duration / (2.0 * (100.0_f64.ln()).powf(0.25))
}

/// Width of the Gaussian envelope `exp(-(t/tau)^2)` with the same 1%-at-edges
/// convention as [`super_gaussian_tau`]: `tau = T / (2 sqrt(ln 100))`.
pub fn gaussian_tau(duration: f64) -> f64 {
    duration / (2.0 * (100.0_f64.ln()).sqrt())
}

/// Envelope kind selector for sweep APIs and configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    Rectangular,
    SuperGaussian,
    Gaussian,
}

/// Amplitude envelope `Omega(t) >= 0` on `[-T/2, T/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    Rectangular { peak: f64 },
    SuperGaussian { peak: f64, tau: f64 },
    Gaussian { peak: f64, tau: f64 },
}

impl Envelope {
    pub fn rectangular(peak: f64) -> Self {
        assert!(peak >= 0.0, "envelope peak must be non-negative");
        Envelope::Rectangular { peak }
    }

    /// Super-Gaussian with the edge convention of [`super_gaussian_tau`].
    pub fn super_gaussian(peak: f64, duration: f64) -> Self {
        assert!(peak >= 0.0, "envelope peak must be non-negative");
        Envelope::SuperGaussian { peak, tau: super_gaussian_tau(duration) }
    }

    /// Gaussian with the edge convention of [`gaussian_tau`].
    pub fn gaussian(peak: f64, duration: f64) -> Self {
        assert!(peak >= 0.0, "envelope peak must be non-negative");
        Envelope::Gaussian { peak, tau: gaussian_tau(duration) }
    }

    pub fn of_kind(kind: EnvelopeKind, peak: f64, duration: f64) -> Self {
        match kind {
            EnvelopeKind::Rectangular => Envelope::rectangular(peak),
            EnvelopeKind::SuperGaussian => Envelope::super_gaussian(peak, duration),
            EnvelopeKind::Gaussian => Envelope::gaussian(peak, duration),
        }
    }

    pub fn kind(&self) -> EnvelopeKind {
        match self {
            Envelope::Rectangular { .. } => EnvelopeKind::Rectangular,
            Envelope::SuperGaussian { .. } => EnvelopeKind::SuperGaussian,
            Envelope::Gaussian { .. } => EnvelopeKind::Gaussian,
        }
    }

    pub fn peak(&self) -> f64 {
        match *self {
            Envelope::Rectangular { peak }
            | Envelope::SuperGaussian { peak, .. }
            | Envelope::Gaussian { peak, .. } => peak,
        }
    }

    /// Same shape with a different peak amplitude.
    pub fn with_peak(&self, peak: f64) -> Self {
        assert!(peak >= 0.0, "envelope peak must be non-negative");
        let mut out = self.clone();
        match &mut out {
            Envelope::Rectangular { peak: p }
            | Envelope::SuperGaussian { peak: p, .. }
            | Envelope::Gaussian { peak: p, .. } => *p = peak,
        }
        out
    }

    /// Omega(t).
    #[inline]
    pub fn amplitude(&self, t: f64) -> f64 {
        match *self {
            Envelope::Rectangular { peak } => peak,
            Envelope::SuperGaussian { peak, tau } => {
                let x = t / tau;
                peak * (-(x * x * x * x)).exp()
            }
            Envelope::Gaussian { peak, tau } => {
                let x = t / tau;
                peak * (-(x * x)).exp()
            }
        }
    }

    /// Analytic d(Omega)/dt, used by the adiabaticity criterion.
    #[inline]
    pub fn amplitude_derivative(&self, t: f64) -> f64 {
        match *self {
            Envelope::Rectangular { .. } => 0.0,
            Envelope::SuperGaussian { peak, tau } => {
                let x = t / tau;
                let x3 = x * x * x;
                peak * (-(x3 * x)).exp() * (-4.0 * x3 / tau)
            }
            Envelope::Gaussian { peak, tau } => {
                let x = t / tau;
                peak * (-(x * x)).exp() * (-2.0 * x / tau)
            }
        }
    }

    /// Area under the envelope over `[-T/2, T/2]` (composite Simpson rule;
    /// accurate to well below 1e-12 relative for the built-in shapes).
    pub fn area(&self, duration: f64) -> f64 {
        if let Envelope::Rectangular { peak } = *self {
            return peak * duration;
        }
        let n = 4096; // even
        let h = duration / n as f64;
        let mut acc = self.amplitude(-0.5 * duration) + self.amplitude(0.5 * duration);
        for k in 1..n {
            let t = -0.5 * duration + k as f64 * h;
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * self.amplitude(t);
        }
        acc * h / 3.0
    }
}

/// Rescale `envelope` so its area matches `reference`'s, preserving shape.
pub fn normalize_area(envelope: &Envelope, reference: &Envelope, duration: f64) -> Result<Envelope> {
    let area = envelope.area(duration);
    if area <= 0.0 || !area.is_finite() {
        return Err(Error::InvalidInput(format!(
            "cannot area-normalize an envelope with area {area}"
        )));
    }
    let target = reference.area(duration);
    Ok(envelope.with_peak(envelope.peak() * target / area))
}

/// Detuning profile `Delta(t)`, including a static offset `delta` that models
/// a drive-frequency error `omega_d - omega_q` common to all kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DetuningProfile {
    Constant { offset: f64 },
    /// `Delta(t) = 2 Delta_max t / T + offset`; the drive frequency itself is
    /// modulated at half that slope, `omega_d = omega_q + Delta_max t / T +
    /// offset`, because the instantaneous detuning picks up the chirp-rate
    /// term `t * d(omega_d)/dt`.
    LinearChirp { delta_max: f64, offset: f64 },
    /// `omega_d = omega_q + sum_k a_k sin(k t') + offset` with
    /// `t' = 2 pi t / T`, so
    /// `Delta(t) = sum_k a_k [sin(k t') + k t' cos(k t')] + offset`.
    /// With zero offset the detuning is odd in `t`.
    Fourier { coefficients: Vec<f64>, offset: f64 },
}

impl DetuningProfile {
    pub fn constant(offset: f64) -> Self {
        DetuningProfile::Constant { offset }
    }

    pub fn linear_chirp(delta_max: f64, offset: f64) -> Self {
        DetuningProfile::LinearChirp { delta_max, offset }
    }

    pub fn fourier(coefficients: Vec<f64>, offset: f64) -> Self {
        DetuningProfile::Fourier { coefficients, offset }
    }

    pub fn offset(&self) -> f64 {
        match self {
            DetuningProfile::Constant { offset }
            | DetuningProfile::LinearChirp { offset, .. }
            | DetuningProfile::Fourier { offset, .. } => *offset,
        }
    }

    pub fn with_offset(&self, offset: f64) -> Self {
        let mut out = self.clone();
        match &mut out {
            DetuningProfile::Constant { offset: d }
            | DetuningProfile::LinearChirp { offset: d, .. }
            | DetuningProfile::Fourier { offset: d, .. } => *d = offset,
        }
        out
    }

    /// Instantaneous detuning Delta(t).
    #[inline]
    pub fn detuning(&self, t: f64, duration: f64) -> f64 {
        match self {
            DetuningProfile::Constant { offset } => *offset,
            DetuningProfile::LinearChirp { delta_max, offset } => {
                2.0 * delta_max * t / duration + offset
            }
            DetuningProfile::Fourier { coefficients, offset } => {
                let tp = TAU * t / duration;
                let mut acc = *offset;
                for (i, a) in coefficients.iter().enumerate() {
                    let k = (i + 1) as f64;
                    let (s, c) = (k * tp).sin_cos();
                    acc += a * (s + k * tp * c);
                }
                acc
            }
        }
    }

    /// Analytic d(Delta)/dt.
    #[inline]
    pub fn detuning_derivative(&self, t: f64, duration: f64) -> f64 {
        match self {
            DetuningProfile::Constant { .. } => 0.0,
            DetuningProfile::LinearChirp { delta_max, .. } => 2.0 * delta_max / duration,
            DetuningProfile::Fourier { coefficients, .. } => {
                let tp = TAU * t / duration;
                let mut acc = 0.0;
                for (i, a) in coefficients.iter().enumerate() {
                    let k = (i + 1) as f64;
                    let (s, c) = (k * tp).sin_cos();
                    acc += a * k * (2.0 * c - k * tp * s);
                }
                acc * TAU / duration
            }
        }
    }

    /// Drive-frequency offset `omega_d(t) - omega_q`.
    #[inline]
    pub fn drive_offset(&self, t: f64, duration: f64) -> f64 {
        match self {
            DetuningProfile::Constant { offset } => *offset,
            DetuningProfile::LinearChirp { delta_max, offset } => delta_max * t / duration + offset,
            DetuningProfile::Fourier { coefficients, offset } => {
                let tp = TAU * t / duration;
                let mut acc = *offset;
                for (i, a) in coefficients.iter().enumerate() {
                    let k = (i + 1) as f64;
                    acc += a * (k * tp).sin();
                }
                acc
            }
        }
    }

    /// Analytic d(omega_d)/dt.
    #[inline]
    pub fn drive_offset_derivative(&self, t: f64, duration: f64) -> f64 {
        match self {
            DetuningProfile::Constant { .. } => 0.0,
            DetuningProfile::LinearChirp { delta_max, .. } => delta_max / duration,
            DetuningProfile::Fourier { coefficients, .. } => {
                let tp = TAU * t / duration;
                let mut acc = 0.0;
                for (i, a) in coefficients.iter().enumerate() {
                    let k = (i + 1) as f64;
                    acc += a * k * (k * tp).cos();
                }
                acc * TAU / duration
            }
        }
    }
}

/// A complete control-field description: duration, envelope, detuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub duration: f64,
    pub envelope: Envelope,
    pub detuning: DetuningProfile,
}

impl Pulse {
    pub fn new(duration: f64, envelope: Envelope, detuning: DetuningProfile) -> Self {
        assert!(
            duration.is_finite() && duration > 0.0,
            "pulse duration must be positive and finite"
        );
        Pulse { duration, envelope, detuning }
    }

    pub fn half_window(&self) -> f64 {
        0.5 * self.duration
    }

    /// Evaluate the closed forms at `t`; pure and deterministic.
    pub fn sample(&self, t: f64) -> Result<ControlSample> {
        let half = self.half_window();
        if !t.is_finite() || t < -half || t > half {
            return Err(Error::OutOfWindow { t, lo: -half, hi: half });
        }
        Ok(self.sample_unchecked(t))
    }

    /// Sampling without the window check, for integrators that generate their
    /// own in-window grids.
    #[inline]
    pub(crate) fn sample_unchecked(&self, t: f64) -> ControlSample {
        ControlSample {
            time: t,
            rabi: self.envelope.amplitude(t),
            detuning: self.detuning.detuning(t, self.duration),
            drive_frequency: self.detuning.drive_offset(t, self.duration),
        }
    }
}

/// See [`Pulse::sample`].
pub fn sample_pulse(pulse: &Pulse, t: f64) -> Result<ControlSample> {
    pulse.sample(t)
}

/// Baseband IQ pair realizing a pulse on an IQ mixer:
/// `I + iQ = Omega(t) exp(i (omega_d(t) - omega_LO) t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IQWaveform {
    /// Samples per unit time.
    pub sample_rate: f64,
    /// LO frequency relative to the qubit, `omega_LO - omega_q` (angular).
    pub lo_frequency: f64,
    pub i_samples: Vec<f64>,
    pub q_samples: Vec<f64>,
}

impl IQWaveform {
    pub fn len(&self) -> usize {
        self.i_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i_samples.is_empty()
    }

    /// Sample instants, starting at -T/2 and spaced by 1/sample_rate.
    pub fn times(&self, duration: f64) -> impl Iterator<Item = f64> + '_ {
        let dt = 1.0 / self.sample_rate;
        let start = -0.5 * duration;
        (0..self.len()).map(move |k| start + k as f64 * dt)
    }
}

/// Sample the IQ pair for `pulse` at `sample_rate`, with the local oscillator
/// offset `lo_offset = omega_LO - omega_q`.
///
/// Amplitudes are in the caller's scale; no hardware calibration is applied.
/// Fails with [`Error::Aliasing`] if `|omega_d - omega_LO|` reaches the
/// Nyquist angular frequency `pi * sample_rate` anywhere in the window.
pub fn synthesize_iq(pulse: &Pulse, lo_offset: f64, sample_rate: f64) -> Result<IQWaveform> {
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::InvalidInput(format!(
            "sample rate must be positive and finite, got {sample_rate}"
        )));
    }
    let n = (pulse.duration * sample_rate).ceil() as usize;
    if n < 16 {
        return Err(Error::InvalidInput(format!(
            "sample_rate * duration = {} yields only {n} samples; at least 16 required",
            pulse.duration * sample_rate
        )));
    }
    let nyquist = PI * sample_rate;
    let dt = 1.0 / sample_rate;
    let start = -pulse.half_window();
    let mut i_samples = Vec::with_capacity(n);
    let mut q_samples = Vec::with_capacity(n);
    for k in 0..n {
        let t = (start + k as f64 * dt).min(pulse.half_window());
        let s = pulse.sample_unchecked(t);
        let if_freq = s.drive_frequency - lo_offset;
        if if_freq.abs() >= nyquist {
            return Err(Error::Aliasing { t, frequency: if_freq.abs(), nyquist });
        }
        let (sin, cos) = (if_freq * t).sin_cos();
        i_samples.push(s.rabi * cos);
        q_samples.push(s.rabi * sin);
    }
    Ok(IQWaveform { sample_rate, lo_frequency: lo_offset, i_samples, q_samples })
}
