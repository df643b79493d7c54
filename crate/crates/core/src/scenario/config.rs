use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::FitWindow;
use crate::heterodyne::BeatNoteConfig;
use crate::netfile::load_network;
use crate::network::{ModeNetwork, ProbeGrid};
use crate::oracle::{JCParams, DEFAULT_ETA_OVER_KAPPA};
use crate::spectral::MotionEnsemble;

pub const ATOM_CAVITY_PRESET: &str = "atom-cavity";
/// Older spelling of the same preset, still accepted.
const ATOM_CAVITY_ALIAS: &str = "paper-atom-cavity";

/// Scenario file. Every section is optional; relative paths are resolved
/// against the directory holding the file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: Option<String>,
    pub network: NetworkSource,
    /// Node to drive. Defaults to the network's single driven node.
    pub drive: Option<String>,
    pub grid: GridConfig,
    pub motion: MotionConfig,
    pub scan2d: Scan2dConfig,
    pub stark: StarkConfig,
    pub oracle: OracleConfig,
    pub heterodyne: HeterodyneConfig,
    pub output_dir: Option<PathBuf>,
    /// Overrides the seeds of the motion ensemble and the detector noise.
    pub seed: Option<u64>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkSource {
    File { file: PathBuf },
    Preset(PresetConfig),
}

impl Default for NetworkSource {
    fn default() -> Self {
        NetworkSource::Preset(PresetConfig::default())
    }
}

/// Single atom in a single cavity mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PresetConfig {
    pub preset: String,
    pub g_mhz: f64,
    pub gamma_mhz: f64,
    pub kappa_mhz: f64,
    pub delta_ac_mhz: f64,
}

impl Default for PresetConfig {
    fn default() -> Self {
        Self {
            preset: ATOM_CAVITY_PRESET.to_string(),
            g_mhz: 16.0,
            gamma_mhz: 3.0,
            kappa_mhz: 1.5,
            delta_ac_mhz: -3.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start_mhz: f64,
    pub stop_mhz: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            start_mhz: -25.0,
            stop_mhz: 25.0,
            points: 501,
        }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<ProbeGrid> {
        ProbeGrid::new(self.start_mhz, self.stop_mhz, self.points)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotionConfig {
    pub enabled: bool,
    #[serde(flatten)]
    pub ensemble: MotionEnsemble,
}

/// Either an explicit list of values or an evenly spaced range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Values(Vec<f64>),
    Range(GridConfig),
}

impl AxisSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            AxisSpec::Values(v) if v.is_empty() => Err(Error::Config("empty value list".into())),
            AxisSpec::Values(v) if v.iter().any(|x| !x.is_finite()) => Err(Error::Config("non-finite value".into())),
            AxisSpec::Values(v) => Ok(v.clone()),
            AxisSpec::Range(g) => Ok(g.grid()?.values()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scan2dConfig {
    /// Emitter whose frequency (the atom–cavity detuning) is stepped.
    pub emitter: String,
    pub delta_ac_mhz: AxisSpec,
}

impl Default for Scan2dConfig {
    fn default() -> Self {
        Self {
            emitter: "atom".into(),
            delta_ac_mhz: AxisSpec::Range(GridConfig {
                start_mhz: -20.0,
                stop_mhz: 20.0,
                points: 41,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StarkConfig {
    pub emitter: String,
    /// `(power_nw, delta_ac_mhz)` pairs.
    pub calibration_points: Vec<(f64, f64)>,
    pub power_start_nw: f64,
    pub power_stop_nw: f64,
    pub points: usize,
    /// Probe frequency relative to the cavity, MHz.
    pub probe_mhz: f64,
    pub window: FitWindow,
}

impl Default for StarkConfig {
    fn default() -> Self {
        Self {
            emitter: "atom".into(),
            calibration_points: vec![(1400.0, 12.0), (950.0, -5.0), (700.0, -14.0)],
            power_start_nw: 450.0,
            power_stop_nw: 1700.0,
            points: 251,
            probe_mhz: 0.0,
            window: FitWindow::CentralHalfSwing,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub params: JCParams,
    /// Drive amplitudes in units of κ, strictly descending.
    pub eta_over_kappa: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            params: JCParams {
                eta: 0.0,
                ..JCParams::default()
            },
            eta_over_kappa: DEFAULT_ETA_OVER_KAPPA.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeterodyneConfig {
    pub beat: BeatNoteConfig,
    pub windows: usize,
    pub bins: usize,
    pub probes: AxisSpec,
}

impl Default for HeterodyneConfig {
    fn default() -> Self {
        Self {
            beat: BeatNoteConfig {
                snr: Some(5.0),
                ..BeatNoteConfig::default()
            },
            windows: 1000,
            bins: 36,
            probes: AxisSpec::Range(GridConfig {
                start_mhz: -24.0,
                stop_mhz: 24.0,
                points: 25,
            }),
        }
    }
}

impl ScenarioConfig {
    pub fn parse(json: &str, base_dir: &Path) -> Result<Self> {
        let mut config: ScenarioConfig = serde_json::from_str(json).map_err(|e| Error::Parse {
            what: "scenario config".into(),
            message: e.to_string(),
        })?;
        config.base_dir = base_dir.to_path_buf();
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// The network with the configured drive applied.
    pub fn network(&self) -> Result<ModeNetwork> {
        let network = match &self.network {
            NetworkSource::File { file } => load_network(&self.resolve(file))?,
            NetworkSource::Preset(p) => {
                if p.preset != ATOM_CAVITY_PRESET && p.preset != ATOM_CAVITY_ALIAS {
                    return Err(Error::Config(format!(
                        "unknown preset `{}` (available: {ATOM_CAVITY_PRESET})",
                        p.preset
                    )));
                }
                ModeNetwork::atom_cavity(p.g_mhz, p.gamma_mhz, p.kappa_mhz, p.delta_ac_mhz)?
            }
        };
        match &self.drive {
            Some(label) => network.driven_only_at(label),
            None => Ok(network),
        }
    }

    pub fn drive_label(&self, network: &ModeNetwork) -> Result<String> {
        network
            .single_driven_label()
            .map(str::to_string)
            .ok_or_else(|| Error::Config("exactly one node must be driven; set `drive`".into()))
    }

    pub fn motion(&self) -> Option<MotionEnsemble> {
        self.motion.enabled.then(|| {
            let ensemble = self.motion.ensemble.clone();
            match self.seed {
                Some(seed) => ensemble.with_seed(seed),
                None => ensemble,
            }
        })
    }

    pub fn beat(&self) -> BeatNoteConfig {
        let mut beat = self.heterodyne.beat.clone();
        if let Some(seed) = self.seed {
            beat.seed = seed;
        }
        beat
    }
}
