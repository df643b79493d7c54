//! Linear ac-Stark calibration of the emitter detuning against trap power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarkCalibration {
    /// MHz per nW.
    pub slope: f64,
    /// Emitter–resonator detuning at zero power, MHz.
    pub intercept: f64,
    /// `(power_nw, detuning_mhz)`
    pub points: Vec<(f64, f64)>,
    /// Measured minus fitted detuning at each point, MHz.
    pub residuals: Vec<f64>,
}

impl StarkCalibration {
    pub fn power_to_detuning(&self, power_nw: f64) -> f64 {
        self.slope * power_nw + self.intercept
    }

    /// Inverse of [`power_to_detuning`](Self::power_to_detuning). Not finite if
    /// the slope is zero.
    pub fn detuning_to_power(&self, detuning_mhz: f64) -> f64 {
        (detuning_mhz - self.intercept) / self.slope
    }
}

/// Unweighted straight-line fit through `(power_nw, detuning_mhz)` points.
pub fn stark_calibration(points: &[(f64, f64)]) -> Result<StarkCalibration> {
    stark_calibration_weighted(points, None)
}

/// Straight-line fit with optional weights (`1/σ²` on the detuning).
pub fn stark_calibration_weighted(points: &[(f64, f64)], weights: Option<&[f64]>) -> Result<StarkCalibration> {
    if points.len() < 2 {
        return Err(Error::InvalidFitInput("calibration needs at least two points".into()));
    }
    if points.iter().any(|(p, d)| !(p.is_finite() && d.is_finite())) {
        return Err(Error::InvalidFitInput("calibration points must be finite".into()));
    }
    let w: Vec<f64> = match weights {
        Some(w) if w.len() != points.len() => {
            return Err(Error::InvalidFitInput(format!("{} weights for {} points", w.len(), points.len())))
        }
        Some(w) if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) => {
            return Err(Error::InvalidFitInput("weights must be finite and positive".into()))
        }
        Some(w) => w.to_vec(),
        None => vec![1.0; points.len()],
    };

    let sw: f64 = w.iter().sum();
    let mean_p = points.iter().zip(&w).map(|((p, _), w)| w * p).sum::<f64>() / sw;
    let mean_d = points.iter().zip(&w).map(|((_, d), w)| w * d).sum::<f64>() / sw;
    let spp: f64 = points.iter().zip(&w).map(|((p, _), w)| w * (p - mean_p).powi(2)).sum();
    let spd: f64 = points
        .iter()
        .zip(&w)
        .map(|((p, d), w)| w * (p - mean_p) * (d - mean_d))
        .sum();
    let scale = points.iter().map(|(p, _)| p.abs()).fold(0.0, f64::max);
    if spp <= (1e-12 * scale).powi(2) * sw {
        return Err(Error::RankDeficient);
    }
    let slope = spd / spp;
    let intercept = mean_d - slope * mean_p;
    let residuals = points.iter().map(|(p, d)| d - (slope * p + intercept)).collect();
    Ok(StarkCalibration {
        slope,
        intercept,
        points: points.to_vec(),
        residuals,
    })
}

pub fn power_to_detuning(calibration: &StarkCalibration, power_nw: f64) -> f64 {
    calibration.power_to_detuning(power_nw)
}

pub fn detuning_to_power(calibration: &StarkCalibration, detuning_mhz: f64) -> f64 {
    calibration.detuning_to_power(detuning_mhz)
}
