use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{build_dynamical_matrix, ModeNetwork};

/// Eigenvalues closer than this (MHz, in both center and width) are merged.
pub const DEGENERACY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonancePole {
    #[serde(rename = "center_mhz")]
    pub center: f64,
    #[serde(rename = "half_width_mhz")]
    pub half_width: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntiresonanceZero {
    pub drive_label: String,
    #[serde(rename = "center_mhz")]
    pub center: f64,
    #[serde(rename = "half_width_mhz")]
    pub half_width: f64,
    pub multiplicity: usize,
}

/// Poles of the response: eigenvalues `λ` of the dynamical matrix at probe 0.
/// A pole sits where `probe + λ` vanishes, so `center = −Re λ` and
/// `half_width = Im λ`.
fn poles_of(matrix: DMatrix<Complex64>) -> Result<Vec<(f64, f64, usize)>> {
    let n = matrix.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let eigenvalues = matrix
        .eigenvalues()
        .ok_or_else(|| Error::Eigen(format!("Schur decomposition of a {n}×{n} matrix did not converge")))?;
    let mut features: Vec<(f64, f64)> = eigenvalues.iter().map(|l| (-l.re, l.im)).collect();
    if features.iter().any(|(c, w)| !(c.is_finite() && w.is_finite())) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    features.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut merged: Vec<(f64, f64, usize)> = Vec::with_capacity(features.len());
    for (center, width) in features {
        match merged.iter_mut().find(|(c, w, _)| {
            (c - center).abs() <= DEGENERACY_TOLERANCE && (w - width).abs() <= DEGENERACY_TOLERANCE
        }) {
            Some(entry) => entry.2 += 1,
            None => merged.push((center, width, 1)),
        }
    }
    Ok(merged)
}

/// Resonances of the network. They do not depend on the drive vector.
pub fn resonances(network: &ModeNetwork) -> Result<Vec<ResonancePole>> {
    Ok(poles_of(build_dynamical_matrix(network, 0.0))?
        .into_iter()
        .map(|(center, half_width, multiplicity)| ResonancePole {
            center,
            half_width,
            multiplicity,
        })
        .collect())
}

/// Antiresonances seen on the driven node: the resonances of the network with
/// the driven node's row and column removed.
pub fn antiresonances(network: &ModeNetwork, drive_label: &str) -> Result<Vec<AntiresonanceZero>> {
    let driven = network.index_of(drive_label)?;
    let full = build_dynamical_matrix(network, 0.0);
    let reduced = full.remove_row(driven).remove_column(driven);
    Ok(poles_of(reduced)?
        .into_iter()
        .map(|(center, half_width, multiplicity)| AntiresonanceZero {
            drive_label: drive_label.to_string(),
            center,
            half_width,
            multiplicity,
        })
        .collect())
}
