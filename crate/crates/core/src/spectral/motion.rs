//! Phenomenological ensemble for residual emitter motion.
//!
//! Each sample scales every coupling that touches an emitter by a fraction
//! drawn from a truncated Gaussian and shifts every emitter frequency by a
//! Gaussian jitter. Spectra are averaged as complex amplitudes, which is what a
//! phase-sensitive detector integrating over many motional states records.
//!
//! The default parameters are a calibration, not a measurement: they reduce the
//! 150° single-atom phase swing of the motionless atom–cavity model to about
//! 140°.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sweep, ComplexSpectrum};
use crate::error::{Error, Result};
use crate::network::{ModeNetwork, ProbeGrid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotionEnsemble {
    /// Mean coupling as a fraction of the nominal (maximal) coupling.
    pub coupling_mean: f64,
    pub coupling_std: f64,
    /// Truncation interval `(coupling_min, coupling_max]`, inside `[0, 1]`.
    pub coupling_min: f64,
    pub coupling_max: f64,
    /// Standard deviation of the emitter frequency jitter, MHz.
    pub stark_jitter_mhz: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for MotionEnsemble {
    fn default() -> Self {
        Self {
            coupling_mean: 0.80,
            coupling_std: 0.10,
            coupling_min: 0.5,
            coupling_max: 1.0,
            stark_jitter_mhz: 1.0,
            samples: 512,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionSample {
    pub coupling_scale: f64,
    pub frequency_shift: f64,
}

impl MotionEnsemble {
    /// Degenerate ensemble: one sample at full coupling and no jitter.
    pub fn motionless() -> Self {
        Self {
            coupling_mean: 1.0,
            coupling_std: 0.0,
            coupling_min: 0.0,
            coupling_max: 1.0,
            stark_jitter_mhz: 0.0,
            samples: 1,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.coupling_mean,
            self.coupling_std,
            self.coupling_min,
            self.coupling_max,
            self.stark_jitter_mhz,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("motion ensemble parameters must be finite".into()));
        }
        if !(0.0 <= self.coupling_min && self.coupling_min < self.coupling_max && self.coupling_max <= 1.0) {
            return Err(Error::Config(format!(
                "coupling bounds ({}, {}] must lie within [0, 1]",
                self.coupling_min, self.coupling_max
            )));
        }
        if !(self.coupling_min < self.coupling_mean && self.coupling_mean <= self.coupling_max) {
            return Err(Error::Config(format!(
                "coupling mean {} outside ({}, {}]",
                self.coupling_mean, self.coupling_min, self.coupling_max
            )));
        }
        if self.coupling_std < 0.0 || self.stark_jitter_mhz < 0.0 {
            return Err(Error::Config("standard deviations must be non-negative".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("motion ensemble needs at least one sample".into()));
        }
        Ok(())
    }

    /// Sample `index`, drawn from its own stream so that samples can be
    /// evaluated in any order.
    pub fn sample(&self, index: usize) -> MotionSample {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let coupling_scale = if self.coupling_std == 0.0 {
            self.coupling_mean
        } else {
            loop {
                let z: f64 = rng.sample(StandardNormal);
                let candidate = self.coupling_mean + self.coupling_std * z;
                if candidate > self.coupling_min && candidate <= self.coupling_max {
                    break candidate;
                }
            }
        };
        let z: f64 = rng.sample(StandardNormal);
        MotionSample {
            coupling_scale,
            frequency_shift: self.stark_jitter_mhz * z,
        }
    }

    pub fn apply(&self, network: &ModeNetwork, sample: &MotionSample) -> ModeNetwork {
        let mut out = network.clone();
        out.scale_emitter_couplings(sample.coupling_scale);
        out.shift_emitter_frequencies(sample.frequency_shift);
        out
    }

    /// Mean over the ensemble of `evaluate(sample network)`; every call must
    /// return vectors of the same length.
    pub fn average<F>(&self, network: &ModeNetwork, evaluate: F) -> Result<Vec<Complex64>>
    where
        F: Fn(&ModeNetwork) -> Result<Vec<Complex64>> + Sync,
    {
        self.validate()?;
        let per_sample: Vec<Vec<Complex64>> = (0..self.samples)
            .into_par_iter()
            .map(|k| evaluate(&self.apply(network, &self.sample(k))))
            .collect::<Result<_>>()?;
        let len = per_sample[0].len();
        if per_sample.iter().any(|v| v.len() != len) {
            return Err(Error::Config("ensemble evaluations returned different lengths".into()));
        }
        // summed in sample order so the result does not depend on scheduling
        let mut mean = vec![Complex64::new(0.0, 0.0); len];
        for values in &per_sample {
            for (m, v) in mean.iter_mut().zip(values) {
                *m += v;
            }
        }
        let scale = 1.0 / self.samples as f64;
        mean.iter_mut().for_each(|m| *m *= scale);
        Ok(mean)
    }
}

/// Complex-amplitude spectrum averaged over the motion ensemble.
pub fn motion_average(network: &ModeNetwork, grid: &ProbeGrid, ensemble: &MotionEnsemble) -> Result<ComplexSpectrum> {
    let n = network.len();
    let points = grid.points();
    let flat = ensemble.average(network, |sample| {
        let spectrum = sweep(sample, grid)?;
        Ok((0..n).flat_map(|m| spectrum.amplitudes(m).to_vec()).collect())
    })?;
    let amplitudes = flat.chunks(points).map(<[Complex64]>::to_vec).collect();
    ComplexSpectrum::new(*grid, network.labels().map(str::to_string).collect(), amplitudes)
}
