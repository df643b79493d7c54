//! Spectra, resonance poles, antiresonance zeros and ensemble averaging.

mod detect;
mod lossy;
mod motion;
mod poles;

pub use detect::{detect_antiresonances_numeric, DetectOptions, DetectedZero};
pub use lossy::{
    lossy_component_from_spectra, lossy_component_identify, DriveWidths, LossyVerdict,
    DEFAULT_AMBIGUITY_TOLERANCE,
};
pub use motion::{motion_average, MotionEnsemble, MotionSample};
pub use poles::{antiresonances, resonances, AntiresonanceZero, ResonancePole, DEGENERACY_TOLERANCE};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{build_dynamical_matrix, solve_response, ModeNetwork, ProbeGrid};

/// Complex steady-state amplitudes of every mode over a probe grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSpectrum {
    grid: ProbeGrid,
    labels: Vec<String>,
    /// `amplitudes[mode][point]`
    amplitudes: Vec<Vec<Complex64>>,
}

impl ComplexSpectrum {
    pub fn new(grid: ProbeGrid, labels: Vec<String>, amplitudes: Vec<Vec<Complex64>>) -> Result<Self> {
        if labels.len() != amplitudes.len() {
            return Err(Error::InvalidGrid(format!(
                "{} labels for {} amplitude channels",
                labels.len(),
                amplitudes.len()
            )));
        }
        if let Some(bad) = amplitudes.iter().find(|ch| ch.len() != grid.points()) {
            return Err(Error::InvalidGrid(format!(
                "channel has {} points, grid has {}",
                bad.len(),
                grid.points()
            )));
        }
        Ok(Self {
            grid,
            labels,
            amplitudes,
        })
    }

    pub fn grid(&self) -> &ProbeGrid {
        &self.grid
    }

    pub fn probes(&self) -> Vec<f64> {
        self.grid.values()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mode_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    pub fn amplitudes(&self, mode: usize) -> &[Complex64] {
        &self.amplitudes[mode]
    }

    pub fn channel(&self, label: &str) -> Result<&[Complex64]> {
        Ok(self.amplitudes(self.mode_index(label)?))
    }

    pub fn magnitude(&self, mode: usize) -> Vec<f64> {
        self.amplitudes[mode].iter().map(|a| a.norm()).collect()
    }

    /// `|a|²`, the excitation of the mode.
    pub fn excitation(&self, mode: usize) -> Vec<f64> {
        self.amplitudes[mode].iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn magnitude_db(&self, mode: usize) -> Vec<f64> {
        self.amplitudes[mode].iter().map(|a| 20.0 * a.norm().log10()).collect()
    }

    pub fn wrapped_phase(&self, mode: usize) -> Vec<f64> {
        self.amplitudes[mode].iter().map(|a| a.arg()).collect()
    }

    /// Unwrapped phase in radians, anchored so that the first grid point lies
    /// in `(−3π/2, π/2]`. A scan that starts far red of an isolated cavity
    /// therefore starts near `−π` and rises towards `0`.
    pub fn phase_unwrapped(&self, mode: usize) -> Vec<f64> {
        anchor_phase(unwrap_phase(&self.wrapped_phase(mode)))
    }
}

/// Sequential phase unwrapping with a jump threshold of π.
///
/// The grid must be fine enough that the true phase change between
/// neighbouring samples stays below π.
pub fn unwrap_phase(wrapped: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(wrapped.len());
    for (i, &p) in wrapped.iter().enumerate() {
        if i == 0 {
            out.push(p);
            continue;
        }
        let mut jump = p - wrapped[i - 1];
        if jump.abs() > PI {
            jump -= 2.0 * PI * (jump / (2.0 * PI)).round();
        }
        out.push(out[i - 1] + jump);
    }
    out
}

pub(crate) fn anchor_phase(mut phases: Vec<f64>) -> Vec<f64> {
    if let Some(&first) = phases.first() {
        let mut shift = 0.0;
        while first + shift > PI / 2.0 {
            shift -= 2.0 * PI;
        }
        while first + shift <= -1.5 * PI {
            shift += 2.0 * PI;
        }
        if shift != 0.0 {
            phases.iter_mut().for_each(|p| *p += shift);
        }
    }
    phases
}

/// Steady state at every grid point.
pub fn sweep(network: &ModeNetwork, grid: &ProbeGrid) -> Result<ComplexSpectrum> {
    if network.driven_indices().is_empty() {
        return Err(Error::NoDrive);
    }
    let per_point: Vec<Vec<Complex64>> = grid
        .values()
        .into_par_iter()
        .map(|probe| {
            solve_response(build_dynamical_matrix(network, probe), network.drive(), probe)
                .map(|a| a.iter().copied().collect())
        })
        .collect::<Result<_>>()?;
    let n = network.len();
    let amplitudes = (0..n)
        .map(|mode| per_point.iter().map(|point| point[mode]).collect())
        .collect();
    ComplexSpectrum::new(*grid, network.labels().map(str::to_string).collect(), amplitudes)
}
