//! Heterodyne detection chain: beat-note synthesis, boxcar IQ demodulation and
//! phase-histogram accumulation.
//!
//! Sign convention: a field `A·e^{iφ}` produces the difference current
//! `A·cos(2π f t + φ)`, and demodulation returns `φ`. Time runs continuously
//! across windows (`t_n = n / f_s`), so the local oscillator phase is shared by
//! synthesis and demodulation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{wrap_degrees, PhaseHistogram};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BeatNoteConfig {
    pub intermediate_frequency_mhz: f64,
    pub sample_rate_msps: f64,
    pub window_us: f64,
    /// Amplitude signal-to-noise ratio per window, defined so that the phase
    /// standard deviation for small noise is `1/snr` radians. `None` means a
    /// noiseless trace.
    pub snr: Option<f64>,
    /// Field magnitude the SNR refers to. Defaults to the magnitude of the
    /// field being synthesized.
    pub reference_amplitude: Option<f64>,
    pub seed: u64,
}

impl Default for BeatNoteConfig {
    fn default() -> Self {
        Self {
            intermediate_frequency_mhz: 1.0,
            sample_rate_msps: 50.0,
            window_us: 10.0,
            snr: None,
            reference_amplitude: None,
            seed: 0,
        }
    }
}

impl BeatNoteConfig {
    pub fn validate(&self) -> Result<()> {
        let f = self.intermediate_frequency_mhz;
        let fs = self.sample_rate_msps;
        if !(f.is_finite() && f > 0.0 && fs.is_finite() && fs > 0.0 && self.window_us.is_finite()) {
            return Err(Error::Config("beat-note frequencies and window must be finite and positive".into()));
        }
        if fs <= 2.0 * f {
            return Err(Error::Config(format!(
                "sample rate {fs} MS/s does not exceed twice the intermediate frequency {f} MHz"
            )));
        }
        if self.window_us * f < 5.0 {
            return Err(Error::Config(format!(
                "window of {} µs holds fewer than 5 periods at {f} MHz",
                self.window_us
            )));
        }
        if let Some(snr) = self.snr {
            if !(snr.is_finite() && snr > 0.0) {
                return Err(Error::Config("snr must be finite and positive".into()));
            }
        }
        if let Some(r) = self.reference_amplitude {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::Config("reference amplitude must be finite and non-negative".into()));
            }
        }
        Ok(())
    }

    pub fn samples_per_window(&self) -> usize {
        (self.window_us * self.sample_rate_msps).round() as usize
    }

    /// The window does not hold a whole number of IF periods, so the boxcar
    /// filter leaks the `2f` term into I and Q.
    pub fn leaks(&self) -> bool {
        let periods = self.samples_per_window() as f64 * self.intermediate_frequency_mhz / self.sample_rate_msps;
        (periods - periods.round()).abs() > 1e-9
    }

    /// Standard deviation of the additive noise per sample for a field of
    /// magnitude `field_amplitude`.
    pub fn noise_sigma(&self, field_amplitude: f64) -> Result<f64> {
        let Some(snr) = self.snr else {
            return Ok(0.0);
        };
        let reference = self.reference_amplitude.unwrap_or(field_amplitude);
        if reference == 0.0 {
            return Err(Error::Config(
                "a zero field needs an explicit reference_amplitude to set the noise level".into(),
            ));
        }
        let n = self.samples_per_window() as f64;
        Ok(reference * n.sqrt() / (snr * 2f64.sqrt()))
    }

    fn omega(&self) -> f64 {
        2.0 * PI * self.intermediate_frequency_mhz / self.sample_rate_msps
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub t_us: Vec<f64>,
    pub current: Vec<f64>,
}

/// In-phase and quadrature accumulators of one window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IQSample {
    pub window: usize,
    pub i: f64,
    pub q: f64,
    pub samples: usize,
}

impl IQSample {
    pub fn amplitude(&self) -> f64 {
        2.0 * self.i.hypot(self.q) / self.samples as f64
    }

    /// Phase in `(−π, π]`.
    pub fn phase(&self) -> f64 {
        let phase = (-self.q).atan2(self.i);
        if phase <= -PI {
            phase + 2.0 * PI
        } else {
            phase
        }
    }

    pub fn phase_deg(&self) -> f64 {
        self.phase().to_degrees()
    }

    pub fn field(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude(), self.phase())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Demodulated {
    pub windows: Vec<IQSample>,
    /// See [`BeatNoteConfig::leaks`].
    pub leakage_warning: bool,
}

impl Demodulated {
    pub fn phases_deg(&self) -> Vec<f64> {
        self.windows.iter().map(IQSample::phase_deg).collect()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.windows.iter().map(IQSample::amplitude).collect()
    }
}

/// Difference-current trace for `windows` consecutive windows.
pub fn synthesize(field: Complex64, config: &BeatNoteConfig, windows: usize) -> Result<Trace> {
    config.validate()?;
    let per_window = config.samples_per_window();
    let sigma = config.noise_sigma(field.norm())?;
    let omega = config.omega();
    let (amplitude, phase) = (field.norm(), field.arg());
    let chunks: Vec<Vec<f64>> = (0..windows)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(w as u64);
            (0..per_window)
                .map(|k| {
                    let n = (w * per_window + k) as f64;
                    let clean = amplitude * (omega * n + phase).cos();
                    if sigma > 0.0 {
                        clean + sigma * rng.sample::<f64, _>(StandardNormal)
                    } else {
                        clean
                    }
                })
                .collect()
        })
        .collect();
    let current: Vec<f64> = chunks.into_iter().flatten().collect();
    let t_us = (0..current.len()).map(|n| n as f64 / config.sample_rate_msps).collect();
    Ok(Trace { t_us, current })
}

/// Boxcar IQ demodulation of consecutive whole windows; a trailing partial
/// window is ignored.
pub fn demodulate(trace: &[f64], config: &BeatNoteConfig) -> Result<Demodulated> {
    config.validate()?;
    let per_window = config.samples_per_window();
    if trace.len() < per_window {
        return Err(Error::Config(format!(
            "trace of {} samples is shorter than one window ({per_window})",
            trace.len()
        )));
    }
    let omega = config.omega();
    let windows = trace
        .par_chunks_exact(per_window)
        .enumerate()
        .map(|(w, chunk)| {
            let (mut i, mut q) = (0.0, 0.0);
            for (k, x) in chunk.iter().enumerate() {
                let arg = omega * (w * per_window + k) as f64;
                i += x * arg.cos();
                q += x * arg.sin();
            }
            IQSample {
                window: w,
                i,
                q,
                samples: per_window,
            }
        })
        .collect();
    Ok(Demodulated {
        windows,
        leakage_warning: config.leaks(),
    })
}

/// Recovered per-window phases (degrees) for a constant field.
pub fn phase_stream(field: Complex64, config: &BeatNoteConfig, windows: usize) -> Result<Vec<f64>> {
    let trace = synthesize(field, config, windows)?;
    Ok(demodulate(&trace.current, config)?.phases_deg())
}

/// What the phases are referenced to.
#[derive(Clone, Copy, Debug)]
pub enum PhaseReference<'a> {
    /// Sample-by-sample reference stream of the same length.
    Stream(&'a [f64]),
    Scalar(f64),
}

/// Histogram of `phase − reference`, wrapped to one turn.
pub fn accumulate_histogram(phases_deg: &[f64], reference: PhaseReference<'_>, bins: usize) -> Result<PhaseHistogram> {
    if phases_deg.is_empty() {
        return Err(Error::EmptyHistogram);
    }
    let mut histogram = PhaseHistogram::new(bins)?;
    match reference {
        PhaseReference::Stream(r) => {
            if r.len() != phases_deg.len() {
                return Err(Error::Config(format!(
                    "{} phases against {} reference phases",
                    phases_deg.len(),
                    r.len()
                )));
            }
            phases_deg.iter().zip(r).for_each(|(p, r)| histogram.add(wrap_degrees(p - r)));
        }
        PhaseReference::Scalar(r) => phases_deg.iter().for_each(|p| histogram.add(wrap_degrees(p - r))),
    }
    Ok(histogram)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noisy(snr: f64, seed: u64) -> BeatNoteConfig {
        BeatNoteConfig {
            snr: Some(snr),
            seed,
            ..BeatNoteConfig::default()
        }
    }

    #[test]
    fn noiseless_unit_field_is_a_cosine() {
        let config = BeatNoteConfig::default();
        let trace = synthesize(Complex64::new(1.0, 0.0), &config, 1).unwrap();
        for (t, x) in trace.t_us.iter().zip(&trace.current) {
            assert!((x - (2.0 * PI * t).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn minus_ninety_degrees_is_a_quarter_period_delay() {
        let config = BeatNoteConfig::default();
        let delayed = synthesize(Complex64::new(0.0, -1.0), &config, 1).unwrap();
        // the IF period is 1 µs
        for (t, x) in delayed.t_us.iter().zip(&delayed.current) {
            assert!((x - (2.0 * PI * (t - 0.25)).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_field_noise_variance() {
        let config = BeatNoteConfig {
            reference_amplitude: Some(1.0),
            ..noisy(10.0, 5)
        };
        let expected = config.noise_sigma(0.0).unwrap().powi(2);
        let trace = synthesize(Complex64::new(0.0, 0.0), &config, 2000).unwrap();
        assert_eq!(trace.current.len(), 1_000_000);
        let n = trace.current.len() as f64;
        let mean = trace.current.iter().sum::<f64>() / n;
        let var = trace.current.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var / expected - 1.0).abs() < 0.05);
        assert!(synthesize(Complex64::new(0.0, 0.0), &noisy(10.0, 5), 1).is_err());
    }

    #[test]
    fn noiseless_roundtrip_on_a_grid() {
        let config = BeatNoteConfig::default();
        for a in 1..=20 {
            let amplitude = 0.05 * a as f64;
            for p in 0..36 {
                let phase = -PI + (p as f64 + 0.5) * 2.0 * PI / 36.0;
                let demod = demodulate(&synthesize(Complex64::from_polar(amplitude, phase), &config, 1).unwrap().current, &config)
                    .unwrap();
                let w = demod.windows[0];
                assert!(((w.amplitude() - amplitude) / amplitude).abs() < 1e-9);
                assert!((w.phase() - phase).abs() < 1e-6);
                assert!(w.phase() > -PI && w.phase() <= PI);
            }
        }
    }

    #[test]
    fn phase_noise_matches_inverse_snr() {
        let snr = 10.0;
        let phases = phase_stream(Complex64::from_polar(1.0, 0.4), &noisy(snr, 11), 10_000).unwrap();
        let n = phases.len() as f64;
        let mean = phases.iter().sum::<f64>() / n;
        let std = (phases.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let expected = (1.0 / snr).to_degrees();
        assert!((std / expected - 1.0).abs() < 0.2, "{std} vs {expected}");
        // unbiased within three standard errors
        assert!((mean - 0.4f64.to_degrees()).abs() < 3.0 * std / n.sqrt());
    }

    #[test]
    fn halving_the_field_halves_the_amplitude() {
        let config = BeatNoteConfig {
            reference_amplitude: Some(1.0),
            ..noisy(50.0, 2)
        };
        let mean_amp = |a: f64| {
            let trace = synthesize(Complex64::from_polar(a, 1.0), &config, 2000).unwrap();
            let d = demodulate(&trace.current, &config).unwrap();
            let phase = d.phases_deg().iter().sum::<f64>() / 2000.0;
            (d.amplitudes().iter().sum::<f64>() / 2000.0, phase)
        };
        let (full, p_full) = mean_amp(1.0);
        let (half, p_half) = mean_amp(0.5);
        assert!((half / full - 0.5).abs() < 0.01);
        assert!((p_full - p_half).abs() < 0.5);
    }

    #[test]
    fn determinism_and_leakage_flag() {
        let a = synthesize(Complex64::new(0.3, 0.2), &noisy(5.0, 9), 3).unwrap();
        let b = synthesize(Complex64::new(0.3, 0.2), &noisy(5.0, 9), 3).unwrap();
        assert_eq!(a, b);
        let odd = BeatNoteConfig {
            window_us: 10.1,
            ..BeatNoteConfig::default()
        };
        assert!(odd.leaks());
        assert!(demodulate(&a.current, &odd).unwrap().leakage_warning);
        assert!(!BeatNoteConfig::default().leaks());
    }

    #[test]
    fn invalid_configs() {
        let nyquist = BeatNoteConfig {
            sample_rate_msps: 2.0,
            ..BeatNoteConfig::default()
        };
        assert!(synthesize(Complex64::new(1.0, 0.0), &nyquist, 1).is_err());
        let short = BeatNoteConfig {
            window_us: 2.0,
            ..BeatNoteConfig::default()
        };
        assert!(short.validate().is_err());
        assert!(demodulate(&[0.0; 10], &BeatNoteConfig::default()).is_err());
    }

    #[test]
    fn histograms_of_referenced_phases() {
        let phases = [10.0, -170.0, 95.0];
        let h = accumulate_histogram(&phases, PhaseReference::Stream(&phases), 36).unwrap();
        assert_eq!(h.counts()[h.bin_of(0.0)], 3);
        let shifted: Vec<f64> = phases.iter().map(|p| p + 30.0).collect();
        let h = accumulate_histogram(&shifted, PhaseReference::Stream(&phases), 36).unwrap();
        assert_eq!(h.counts()[h.bin_of(30.0)], 3);
        assert_eq!(h.mode(), Some(30.0));
        assert!(matches!(
            accumulate_histogram(&[], PhaseReference::Scalar(0.0), 36),
            Err(Error::EmptyHistogram)
        ));
        assert!(accumulate_histogram(&phases, PhaseReference::Stream(&phases[..2]), 36).is_err());
    }
}
