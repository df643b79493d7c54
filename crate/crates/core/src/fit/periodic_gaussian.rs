//! Phase histograms and the wrapped (periodic) Gaussian fitted to them.

use serde::{Deserialize, Serialize};

use super::nlls::{data_points, fit_nlls, FitOptions};
use super::FitReport;
use crate::error::{Error, Result};

/// Histogram over one full turn of phase, in degrees.
///
/// Bin `k` is centred on `−180 + k·w` with `w = 360/bins`, so the edges run
/// from `−180 − w/2` to `180 − w/2`. A phase difference of exactly zero (or of
/// any multiple of `w`) lands in the middle of a bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseHistogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    /// Report counts divided by the largest count.
    pub normalize_to_max: bool,
}

impl PhaseHistogram {
    pub fn new(bins: usize) -> Result<Self> {
        if bins < 2 {
            return Err(Error::Config("a phase histogram needs at least 2 bins".into()));
        }
        let w = 360.0 / bins as f64;
        let edges = (0..=bins).map(|k| -180.0 - 0.5 * w + k as f64 * w).collect();
        Ok(Self {
            edges,
            counts: vec![0; bins],
            normalize_to_max: false,
        })
    }

    /// Histogram with given counts, bins laid out as in [`PhaseHistogram::new`].
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        let mut histogram = Self::new(counts.len())?;
        histogram.counts = counts;
        Ok(histogram)
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        360.0 / self.bins() as f64
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        -180.0 + k as f64 * self.bin_width()
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        (0..self.bins()).map(|k| self.bin_center(k)).collect()
    }

    pub fn bin_of(&self, phase_deg: f64) -> usize {
        let w = self.bin_width();
        let shifted = (phase_deg + 180.0 + 0.5 * w).rem_euclid(360.0);
        ((shifted / w).floor() as usize).min(self.bins() - 1)
    }

    pub fn add(&mut self, phase_deg: f64) {
        if phase_deg.is_finite() {
            let k = self.bin_of(phase_deg);
            self.counts[k] += 1;
        }
    }

    /// Counts, or counts over the maximum count when `normalize_to_max` is set.
    pub fn values(&self) -> Vec<f64> {
        let max = self.counts.iter().copied().max().unwrap_or(0);
        self.counts
            .iter()
            .map(|&c| {
                if self.normalize_to_max && max > 0 {
                    c as f64 / max as f64
                } else {
                    c as f64
                }
            })
            .collect()
    }

    /// Centre of the fullest bin (the first one on ties).
    pub fn mode(&self) -> Option<f64> {
        let max = *self.counts.iter().max()?;
        (max > 0).then(|| self.bin_center(self.counts.iter().position(|&c| c == max).unwrap()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicGaussianFit {
    /// Degrees in `[−180, 180)`.
    pub mean: f64,
    /// Standard deviation, degrees.
    pub width: f64,
    pub amplitude: f64,
    pub mean_error: f64,
    pub width_error: f64,
    pub residual_norm: f64,
    pub iterations: usize,
}

impl PeriodicGaussianFit {
    pub fn report(&self) -> FitReport {
        FitReport::new(
            "periodic-gaussian",
            &["mean", "width", "amplitude"],
            &[self.mean, self.width, self.amplitude],
            &[self.mean_error, self.width_error, f64::NAN],
            self.residual_norm,
            self.iterations,
            true,
        )
    }
}

/// `A·Σ_{k=−2..2} exp(−(φ − μ + 360k)²/(2σ²))`, parameters `[A, μ, σ]`.
pub fn periodic_gaussian(phi: f64, p: &[f64]) -> f64 {
    let sigma = p[2];
    (-2..=2)
        .map(|k| {
            let d = phi - p[1] + 360.0 * k as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .sum::<f64>()
        * p[0]
}

pub fn wrap_degrees(phase: f64) -> f64 {
    (phase + 180.0).rem_euclid(360.0) - 180.0
}

pub fn fit_periodic_gaussian(histogram: &PhaseHistogram) -> Result<PeriodicGaussianFit> {
    let total = histogram.total();
    if total < 10 {
        return Err(Error::InvalidFitInput(format!("histogram holds {total} events, at least 10 needed")));
    }
    let counts = histogram.counts();
    if counts.iter().all(|&c| c == counts[0]) {
        return Err(Error::NonIdentifiable("all bins are equal".into()));
    }
    let resolution = histogram.bin_width() / 12f64.sqrt();
    let centers = histogram.bin_centers();

    let occupied: Vec<usize> = (0..counts.len()).filter(|&k| counts[k] > 0).collect();
    if occupied.len() == 1 {
        let k = occupied[0];
        return Ok(PeriodicGaussianFit {
            mean: wrap_degrees(centers[k]),
            width: resolution,
            amplitude: counts[k] as f64,
            mean_error: resolution,
            width_error: 0.0,
            residual_norm: 0.0,
            iterations: 0,
        });
    }

    // circular moments for the starting point
    let (mut c, mut s) = (0.0, 0.0);
    for (&n, &phi) in counts.iter().zip(&centers) {
        c += n as f64 * phi.to_radians().cos();
        s += n as f64 * phi.to_radians().sin();
    }
    let resultant = (c * c + s * s).sqrt() / total as f64;
    let mean0 = s.atan2(c).to_degrees();
    let sigma0 = if resultant > 0.0 {
        (-2.0 * resultant.ln()).sqrt().to_degrees().clamp(resolution, 180.0)
    } else {
        180.0
    };
    let max0 = counts.iter().copied().max().unwrap_or(0) as f64;

    // Poisson variance of each count, floored at one event for empty bins
    let y: Vec<f64> = counts.iter().map(|&n| n as f64).collect();
    let sigma: Vec<f64> = counts.iter().map(|&n| (n.max(1) as f64).sqrt()).collect();
    let data = data_points(&centers, &y, Some(&sigma))?;
    let fit = fit_nlls(periodic_gaussian, &[max0, mean0, sigma0], &data, &FitOptions::default())?;
    let p = &fit.parameters;
    Ok(PeriodicGaussianFit {
        mean: wrap_degrees(p[1]),
        width: p[2].abs(),
        amplitude: p[0],
        mean_error: fit.standard_errors[1],
        width_error: fit.standard_errors[2],
        residual_norm: fit.residual_norm,
        iterations: fit.iterations,
    })
}
