//! Locating the lossiest component by driving each node in turn.
//!
//! The network's resonance widths average over all components whatever is
//! driven, but the antiresonances only carry the undriven components. Driving
//! the lossy node removes it from the antiresonances, which then become
//! markedly narrower.

use serde::{Deserialize, Serialize};

use super::{antiresonances, detect_antiresonances_numeric, ComplexSpectrum, DetectOptions};
use crate::error::{Error, Result};
use crate::network::ModeNetwork;

/// Relative gap below which two mean widths count as indistinguishable.
pub const DEFAULT_AMBIGUITY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveWidths {
    pub drive_label: String,
    /// Antiresonance half-widths, repeated according to multiplicity.
    pub half_widths_mhz: Vec<f64>,
    pub mean_half_width_mhz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossyVerdict {
    pub label: String,
    pub table: Vec<DriveWidths>,
}

/// Drive each candidate node (all nodes when `candidates` is `None`) and pick
/// the one whose antiresonances are narrowest on average.
pub fn lossy_component_identify(
    network: &ModeNetwork,
    candidates: Option<&[String]>,
    tolerance: f64,
) -> Result<LossyVerdict> {
    let labels: Vec<String> = match candidates {
        Some(list) => list.to_vec(),
        None => network.labels().map(str::to_string).collect(),
    };
    if labels.len() < 2 || network.len() < 2 {
        return Err(Error::InvalidNetwork(
            "lossy-component search needs at least two drivable nodes".into(),
        ));
    }
    let table = labels
        .iter()
        .map(|label| {
            let zeros = antiresonances(network, label)?;
            let widths = zeros
                .iter()
                .flat_map(|z| std::iter::repeat_n(z.half_width, z.multiplicity))
                .collect();
            Ok(drive_widths(label, widths))
        })
        .collect::<Result<Vec<_>>>()?;
    verdict(table, tolerance)
}

/// Same criterion, with widths measured on spectra. Each entry pairs the drive
/// label with the spectrum recorded while driving that node.
pub fn lossy_component_from_spectra(
    spectra: &[(String, ComplexSpectrum)],
    options: &DetectOptions,
    tolerance: f64,
) -> Result<LossyVerdict> {
    if spectra.len() < 2 {
        return Err(Error::InvalidNetwork(
            "lossy-component search needs spectra for at least two drive nodes".into(),
        ));
    }
    let table = spectra
        .iter()
        .map(|(label, spectrum)| {
            let zeros = detect_antiresonances_numeric(spectrum, label, options)?;
            if zeros.is_empty() {
                return Err(Error::InvalidNetwork(format!(
                    "no antiresonance found while driving `{label}`"
                )));
            }
            Ok(drive_widths(label, zeros.iter().map(|z| z.zero.half_width).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    verdict(table, tolerance)
}

fn drive_widths(label: &str, half_widths_mhz: Vec<f64>) -> DriveWidths {
    let mean_half_width_mhz = if half_widths_mhz.is_empty() {
        f64::NAN
    } else {
        half_widths_mhz.iter().sum::<f64>() / half_widths_mhz.len() as f64
    };
    DriveWidths {
        drive_label: label.to_string(),
        half_widths_mhz,
        mean_half_width_mhz,
    }
}

fn verdict(table: Vec<DriveWidths>, tolerance: f64) -> Result<LossyVerdict> {
    let mut order: Vec<&DriveWidths> = table.iter().filter(|d| d.mean_half_width_mhz.is_finite()).collect();
    if order.len() < 2 {
        return Err(Error::InvalidNetwork("fewer than two drives produced antiresonances".into()));
    }
    order.sort_by(|a, b| a.mean_half_width_mhz.total_cmp(&b.mean_half_width_mhz));
    let (best, runner_up) = (order[0], order[1]);
    if runner_up.mean_half_width_mhz - best.mean_half_width_mhz <= tolerance * best.mean_half_width_mhz {
        return Err(Error::AmbiguousLossyComponent {
            first: best.drive_label.clone(),
            second: runner_up.drive_label.clone(),
            first_width: best.mean_half_width_mhz,
            second_width: runner_up.mean_half_width_mhz,
        });
    }
    let label = best.drive_label.clone();
    Ok(LossyVerdict { label, table })
}
