//! Least-squares engine and the phase-profile, phase-histogram and Stark
//! calibration estimators built on it.

mod arctan;
mod nlls;
mod periodic_gaussian;
mod stark;

pub use arctan::{arctan_model, fit_arctan_phase, ArctanFitResult, FitWindow};
pub use nlls::{data_points, fit_nlls, DataPoint, FitOptions, FitResult, IterationRecord};
pub use periodic_gaussian::{
    fit_periodic_gaussian, periodic_gaussian, wrap_degrees, PeriodicGaussianFit, PhaseHistogram,
};
pub use stark::{
    detuning_to_power, power_to_detuning, stark_calibration, stark_calibration_weighted, StarkCalibration,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Serializable summary of any fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: String,
    pub parameters: BTreeMap<String, f64>,
    /// `null` where no error is available.
    pub standard_errors: BTreeMap<String, Option<f64>>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitReport {
    pub fn new(
        model: &str,
        names: &[&str],
        values: &[f64],
        errors: &[f64],
        residual_norm: f64,
        iterations: usize,
        converged: bool,
    ) -> Self {
        Self {
            model: model.to_string(),
            parameters: names.iter().map(|n| n.to_string()).zip(values.iter().copied()).collect(),
            standard_errors: names
                .iter()
                .map(|n| n.to_string())
                .zip(errors.iter().map(|e| e.is_finite().then_some(*e)))
                .collect(),
            residual_norm,
            iterations,
            converged,
        }
    }
}
