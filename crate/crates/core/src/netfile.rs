//! JSON network file.
//!
//! ```json
//! {
//!   "modes": [
//!     { "label": "cavity", "kind": "resonator", "frequency_mhz": 0.0, "decay_mhz": 1.5 },
//!     { "label": "atom",   "kind": "emitter",   "frequency_mhz": -3.0, "decay_mhz": 3.0 }
//!   ],
//!   "couplings": [ { "a": "cavity", "b": "atom", "g_mhz": 16.0 } ],
//!   "drive": [ { "label": "cavity", "re": 1.0, "im": 0.0 } ]
//! }
//! ```
//!
//! Each coupling is listed once; listing the same pair twice is accepted only
//! when both entries carry the same value. Self couplings are rejected. The
//! `drive` array may be empty or omitted for networks that are only used with
//! per-node driving.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Mode, ModeKind, ModeNetwork};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub modes: Vec<ModeEntry>,
    #[serde(default)]
    pub couplings: Vec<CouplingEntry>,
    #[serde(default)]
    pub drive: Vec<DriveEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub label: String,
    pub kind: ModeKind,
    pub frequency_mhz: f64,
    pub decay_mhz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingEntry {
    pub a: String,
    pub b: String,
    pub g_mhz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveEntry {
    pub label: String,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl NetworkFile {
    pub fn into_network(self) -> Result<ModeNetwork> {
        let modes: Vec<Mode> = self
            .modes
            .into_iter()
            .map(|m| Mode::new(m.label, m.kind, m.frequency_mhz, m.decay_mhz))
            .collect();
        let n = modes.len();
        let index = |label: &str| {
            modes
                .iter()
                .position(|m| m.label == label)
                .ok_or_else(|| Error::UnknownMode(label.to_string()))
        };

        let mut couplings = DMatrix::<f64>::zeros(n, n);
        let mut assigned = DMatrix::<bool>::from_element(n, n, false);
        for entry in &self.couplings {
            let (i, j) = (index(&entry.a)?, index(&entry.b)?);
            if i == j {
                return Err(Error::InvalidNetwork(format!("self coupling on `{}`", entry.a)));
            }
            if assigned[(i, j)] && couplings[(i, j)] != entry.g_mhz {
                return Err(Error::InvalidNetwork(format!(
                    "asymmetric coupling between `{}` and `{}`: {} vs {}",
                    entry.a, entry.b, couplings[(i, j)], entry.g_mhz
                )));
            }
            couplings[(i, j)] = entry.g_mhz;
            couplings[(j, i)] = entry.g_mhz;
            assigned[(i, j)] = true;
            assigned[(j, i)] = true;
        }

        let mut drive = DVector::<Complex64>::zeros(n);
        for entry in &self.drive {
            drive[index(&entry.label)?] += Complex64::new(entry.re, entry.im);
        }
        ModeNetwork::new(modes, couplings, drive)
    }

    pub fn from_network(network: &ModeNetwork) -> Self {
        let modes = network
            .modes()
            .iter()
            .map(|m| ModeEntry {
                label: m.label.clone(),
                kind: m.kind,
                frequency_mhz: m.frequency,
                decay_mhz: m.decay,
            })
            .collect();
        let g = network.couplings();
        let mut couplings = Vec::new();
        for i in 0..network.len() {
            for j in (i + 1)..network.len() {
                if g[(i, j)] != 0.0 {
                    couplings.push(CouplingEntry {
                        a: network.modes()[i].label.clone(),
                        b: network.modes()[j].label.clone(),
                        g_mhz: g[(i, j)],
                    });
                }
            }
        }
        let drive = network
            .drive()
            .iter()
            .zip(network.modes())
            .filter(|(d, _)| d.norm() > 0.0)
            .map(|(d, m)| DriveEntry {
                label: m.label.clone(),
                re: d.re,
                im: d.im,
            })
            .collect();
        Self {
            modes,
            couplings,
            drive,
        }
    }
}

pub fn parse_network(json: &str) -> Result<ModeNetwork> {
    let file: NetworkFile = serde_json::from_str(json).map_err(|e| Error::Parse {
        what: "network file".into(),
        message: e.to_string(),
    })?;
    file.into_network()
}

pub fn load_network(path: &Path) -> Result<ModeNetwork> {
    let text = fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    parse_network(&text)
}

pub fn network_to_json(network: &ModeNetwork) -> Result<String> {
    Ok(serde_json::to_string_pretty(&NetworkFile::from_network(network))?)
}
