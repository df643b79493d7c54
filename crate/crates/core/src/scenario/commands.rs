use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::fit::{
    fit_arctan_phase, fit_periodic_gaussian, stark_calibration, wrap_degrees, ArctanFitResult, FitReport,
    PeriodicGaussianFit, StarkCalibration,
};
use crate::heterodyne::{accumulate_histogram, phase_stream, PhaseReference};
use crate::io::{write_csv, write_json, write_spectrum_csv};
use crate::network::{steady_state, Mode, ModeNetwork};
use crate::oracle::{lindblad_steady_state, linear_limit_check, JCParams, LinearLimitReport};
use crate::spectral::{
    anchor_phase, antiresonances, detect_antiresonances_numeric, lossy_component_identify, motion_average,
    resonances, sweep, unwrap_phase, AntiresonanceZero, ComplexSpectrum, DetectOptions, DetectedZero,
    DriveWidths, ResonancePole, DEFAULT_AMBIGUITY_TOLERANCE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Scan2d,
    StarkScan,
    Characterize,
    OracleCheck,
    HeterodyneDemo,
}

/// Files written by a command and a human-readable summary.
#[derive(Clone, Debug, Default)]
pub struct CommandReport {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

impl CommandReport {
    fn file(&mut self, path: PathBuf) -> &Path {
        self.files.push(path);
        self.files.last().unwrap()
    }
}

pub fn run(command: Command, config: &ScenarioConfig, out_dir: &Path) -> Result<CommandReport> {
    fs::create_dir_all(out_dir).map_err(|source| Error::File {
        path: out_dir.to_path_buf(),
        source,
    })?;
    match command {
        Command::Spectrum => cmd_spectrum(config, out_dir),
        Command::Scan2d => cmd_scan2d(config, out_dir),
        Command::StarkScan => cmd_stark_scan(config, out_dir),
        Command::Characterize => cmd_characterize(config, out_dir),
        Command::OracleCheck => cmd_oracle_check(config, out_dir),
        Command::HeterodyneDemo => cmd_heterodyne_demo(config, out_dir),
    }
}

fn spectrum_of(network: &ModeNetwork, config: &ScenarioConfig, grid: &crate::network::ProbeGrid) -> Result<ComplexSpectrum> {
    match config.motion() {
        Some(ensemble) => motion_average(network, grid, &ensemble),
        None => sweep(network, grid),
    }
}

/// Driven-node amplitude at a single probe frequency, motion-averaged when
/// the scenario enables it.
fn amplitude_at(network: &ModeNetwork, config: &ScenarioConfig, driven: usize, probe: f64) -> Result<Complex64> {
    let evaluate = |net: &ModeNetwork| Ok(vec![steady_state(net, probe)?.amplitudes[driven]]);
    match config.motion() {
        Some(ensemble) => Ok(ensemble.average(network, evaluate)?[0]),
        None => Ok(evaluate(network)?[0]),
    }
}

fn degrees(phases: &[f64]) -> Vec<f64> {
    phases.iter().map(|p| p.to_degrees()).collect()
}

#[derive(Serialize)]
struct SpectrumFeatures {
    drive_label: String,
    motion_averaged: bool,
    resonances: Vec<ResonancePole>,
    antiresonances: Vec<AntiresonanceZero>,
    numeric_antiresonances: Vec<DetectedZero>,
}

pub fn cmd_spectrum(config: &ScenarioConfig, out: &Path) -> Result<CommandReport> {
    let network = config.network()?;
    let drive = config.drive_label(&network)?;
    let grid = config.grid.grid()?;
    let spectrum = spectrum_of(&network, config, &grid)?;
    let features = SpectrumFeatures {
        resonances: resonances(&network)?,
        antiresonances: antiresonances(&network, &drive)?,
        numeric_antiresonances: detect_antiresonances_numeric(&spectrum, &drive, &DetectOptions::default())?,
        motion_averaged: config.motion.enabled,
        drive_label: drive,
    };

    let mut report = CommandReport::default();
    write_spectrum_csv(report.file(out.join("spectrum.csv")), &spectrum)?;
    write_json(report.file(out.join("features.json")), &features)?;

    let s = &mut report.summary;
    writeln!(s, "driven node: {}", features.drive_label).ok();
    writeln!(s, "{:<16}{:>14}{:>16}{:>6}", "feature", "center_mhz", "half_width_mhz", "mult").ok();
    for p in &features.resonances {
        writeln!(s, "{:<16}{:>14.6}{:>16.6}{:>6}", "resonance", p.center, p.half_width, p.multiplicity).ok();
    }
    for z in &features.antiresonances {
        writeln!(s, "{:<16}{:>14.6}{:>16.6}{:>6}", "antiresonance", z.center, z.half_width, z.multiplicity).ok();
    }
    for z in &features.numeric_antiresonances {
        let flag = if z.at_boundary { " (grid edge)" } else { "" };
        writeln!(s, "{:<16}{:>14.6}{:>16.6}{:>6}{flag}", "numeric zero", z.zero.center, z.zero.half_width, 1).ok();
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scan2dRow {
    pub delta_ac_mhz: f64,
    /// Algebraic antiresonance nearest the emitter frequency.
    pub antiresonance_mhz: Option<f64>,
    /// Numeric zero nearest the emitter frequency.
    pub numeric_center_mhz: Option<f64>,
    /// Numeric center within one grid step of the emitter frequency.
    pub tracks_diagonal: bool,
}

#[derive(Serialize)]
struct Scan2dReport {
    emitter: String,
    grid_step_mhz: f64,
    rows: Vec<Scan2dRow>,
    all_rows_track_diagonal: bool,
    max_abs_phase_deg: f64,
}

pub fn cmd_scan2d(config: &ScenarioConfig, out: &Path) -> Result<CommandReport> {
    let base = config.network()?;
    let drive = config.drive_label(&base)?;
    let driven = base.index_of(&drive)?;
    let emitter = &config.scan2d.emitter;
    base.index_of(emitter)?;
    let grid = config.grid.grid()?;
    let detunings = config.scan2d.delta_ac_mhz.values()?;
    let step = grid.step();
    let probes = grid.values();

    let rows: Vec<(Scan2dRow, Vec<f64>)> = detunings
        .par_iter()
        .map(|&delta_ac| {
            let mut network = base.clone();
            network.set_frequency(emitter, delta_ac)?;
            let spectrum = spectrum_of(&network, config, &grid)?;
            let phase = degrees(&spectrum.phase_unwrapped(driven));
            let nearest = |centers: Vec<f64>| centers.into_iter().min_by(|a, b| (a - delta_ac).abs().total_cmp(&(b - delta_ac).abs()));
            let algebraic = nearest(antiresonances(&network, &drive)?.iter().map(|z| z.center).collect());
            let numeric = nearest(
                detect_antiresonances_numeric(&spectrum, &drive, &DetectOptions::default())?
                    .iter()
                    .map(|z| z.zero.center)
                    .collect(),
            );
            let row = Scan2dRow {
                delta_ac_mhz: delta_ac,
                antiresonance_mhz: algebraic,
                numeric_center_mhz: numeric,
                tracks_diagonal: numeric.is_some_and(|c| (c - delta_ac).abs() <= step),
            };
            Ok((row, phase))
        })
        .collect::<Result<_>>()?;

    let max_abs_phase_deg = rows.iter().flat_map(|(_, p)| p.iter().map(|v| v.abs())).fold(0.0, f64::max);
    let mut report = CommandReport::default();
    let header = ["delta_ac_mhz", "delta_pc_mhz", "phase_deg"].map(String::from);
    let surface = rows.iter().flat_map(|(row, phase)| {
        probes
            .iter()
            .zip(phase)
            .map(move |(p, v)| vec![row.delta_ac_mhz, *p, *v])
    });
    write_csv(report.file(out.join("scan2d.csv")), &header, surface)?;
    let summary = Scan2dReport {
        emitter: emitter.clone(),
        grid_step_mhz: step,
        all_rows_track_diagonal: rows.iter().all(|(r, _)| r.tracks_diagonal),
        max_abs_phase_deg,
        rows: rows.into_iter().map(|(r, _)| r).collect(),
    };
    write_json(report.file(out.join("scan2d_centers.json")), &summary)?;

    let s = &mut report.summary;
    writeln!(s, "{:>14}{:>18}{:>18}{:>8}", "delta_ac_mhz", "antiresonance_mhz", "numeric_mhz", "track").ok();
    for r in &summary.rows {
        let show = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        writeln!(
            s,
            "{:>14.4}{:>18}{:>18}{:>8}",
            r.delta_ac_mhz,
            show(r.antiresonance_mhz),
            show(r.numeric_center_mhz),
            if r.tracks_diagonal { "yes" } else { "no" }
        )
        .ok();
    }
    writeln!(s, "max |phase| = {:.3} deg", summary.max_abs_phase_deg).ok();
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct StarkScanResult {
    pub calibration: StarkCalibration,
    pub powers_nw: Vec<f64>,
    pub delta_ac_mhz: Vec<f64>,
    pub phase_deg: Vec<f64>,
    /// Fit against the calibrated detuning axis.
    pub fit: ArctanFitResult,
    /// Trap power at the fitted center.
    pub center_power_nw: f64,
    pub motion_averaged: bool,
}

/// Phase of the driven node at a fixed probe while the emitter is Stark-tuned
/// across the configured power range, and its arctangent fit.
pub fn stark_scan(config: &ScenarioConfig) -> Result<StarkScanResult> {
    let base = config.network()?;
    let drive = config.drive_label(&base)?;
    let driven = base.index_of(&drive)?;
    let stark = &config.stark;
    base.index_of(&stark.emitter)?;
    let calibration = stark_calibration(&stark.calibration_points)?;
    let powers = crate::network::ProbeGrid::new(stark.power_start_nw, stark.power_stop_nw, stark.points)
        .map_err(|e| Error::Config(format!("power range: {e}")))?
        .values();
    let delta_ac: Vec<f64> = powers.iter().map(|p| calibration.power_to_detuning(*p)).collect();
    let wrapped = delta_ac
        .par_iter()
        .map(|&d| {
            let mut network = base.clone();
            network.set_frequency(&stark.emitter, d)?;
            Ok(amplitude_at(&network, config, driven, stark.probe_mhz)?.arg())
        })
        .collect::<Result<Vec<f64>>>()?;
    let phase_deg = degrees(&anchor_phase(unwrap_phase(&wrapped)));
    let fit = fit_arctan_phase(&delta_ac, &phase_deg, None, stark.window)?;
    Ok(StarkScanResult {
        center_power_nw: calibration.detuning_to_power(fit.center),
        calibration,
        powers_nw: powers,
        delta_ac_mhz: delta_ac,
        phase_deg,
        fit,
        motion_averaged: config.motion.enabled,
    })
}

pub fn cmd_stark_scan(config: &ScenarioConfig, out: &Path) -> Result<CommandReport> {
    let result = stark_scan(config)?;
    let mut report = CommandReport::default();
    let header = ["power_nw", "delta_ac_mhz", "phase_deg"].map(String::from);
    let rows = (0..result.powers_nw.len()).map(|i| vec![result.powers_nw[i], result.delta_ac_mhz[i], result.phase_deg[i]]);
    write_csv(report.file(out.join("stark_scan.csv")), &header, rows)?;

    #[derive(Serialize)]
    struct Output<'a> {
        result: &'a StarkScanResult,
        report: FitReport,
    }
    write_json(
        report.file(out.join("stark_fit.json")),
        &Output {
            result: &result,
            report: result.fit.report(),
        },
    )?;
    let f = &result.fit;
    let s = &mut report.summary;
    writeln!(
        s,
        "calibration: {:.6} MHz/nW, intercept {:.3} MHz",
        result.calibration.slope, result.calibration.intercept
    )
    .ok();
    writeln!(s, "observed swing  {:8.3} deg", f.observed_swing).ok();
    writeln!(s, "fitted swing    {:8.3} ± {:.3} deg", f.swing, f.swing_error).ok();
    writeln!(s, "width           {:8.4} ± {:.4} MHz", f.width, f.width_error).ok();
    writeln!(s, "center          {:8.4} ± {:.4} MHz ({:.1} nW)", f.center, f.center_error, result.center_power_nw).ok();
    if f.poorly_conditioned {
        writeln!(s, "warning: phase is not monotonic across the central region").ok();
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct DriveTable {
    pub drive_label: String,
    pub resonances: Vec<ResonancePole>,
    pub antiresonances: Vec<AntiresonanceZero>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Characterization {
    pub drives: Vec<DriveTable>,
    /// Pole tables serialize identically for every drive.
    pub poles_identical: bool,
    pub width_table: Vec<DriveWidths>,
    pub lossy_component: Option<String>,
    /// The two indistinguishable candidates when no verdict is possible.
    pub ambiguous_between: Option<(String, String)>,
}

pub fn characterize(network: &ModeNetwork) -> Result<(Characterization, Option<Error>)> {
    if network.len() < 2 {
        return Err(Error::InvalidNetwork("characterization needs at least two nodes".into()));
    }
    let drives = network
        .labels()
        .map(|label| {
            let driven = network.driven_only_at(label)?;
            Ok(DriveTable {
                drive_label: label.to_string(),
                resonances: resonances(&driven)?,
                antiresonances: antiresonances(&driven, label)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = serde_json::to_string(&drives[0].resonances)?;
    let poles_identical = drives
        .iter()
        .map(|d| serde_json::to_string(&d.resonances))
        .collect::<std::result::Result<Vec<_>, _>>()?
        .iter()
        .all(|s| *s == first);

    let (width_table, lossy_component, ambiguous_between, error) =
        match lossy_component_identify(network, None, DEFAULT_AMBIGUITY_TOLERANCE) {
            Ok(v) => (v.table, Some(v.label), None, None),
            Err(e @ Error::AmbiguousLossyComponent { .. }) => {
                let Error::AmbiguousLossyComponent { first, second, .. } = &e else { unreachable!() };
                let pair = (first.clone(), second.clone());
                let table = drives
                    .iter()
                    .map(|d| {
                        let widths: Vec<f64> = d
                            .antiresonances
                            .iter()
                            .flat_map(|z| std::iter::repeat_n(z.half_width, z.multiplicity))
                            .collect();
                        DriveWidths {
                            drive_label: d.drive_label.clone(),
                            mean_half_width_mhz: widths.iter().sum::<f64>() / widths.len().max(1) as f64,
                            half_widths_mhz: widths,
                        }
                    })
                    .collect();
                (table, None, Some(pair), Some(e))
            }
            Err(e) => return Err(e),
        };
    Ok((
        Characterization {
            drives,
            poles_identical,
            width_table,
            lossy_component,
            ambiguous_between,
        },
        error,
    ))
}

pub fn cmd_characterize(config: &ScenarioConfig, out: &Path) -> Result<CommandReport> {
    let network = config.network()?;
    let (result, ambiguity) = characterize(&network)?;
    let mut report = CommandReport::default();
    write_json(report.file(out.join("characterize.json")), &result)?;
    let s = &mut report.summary;
    writeln!(s, "{:<12}{:>14}{:>16}{:>6}", "drive", "zero_mhz", "half_width_mhz", "mult").ok();
    for d in &result.drives {
        for z in &d.antiresonances {
            writeln!(s, "{:<12}{:>14.6}{:>16.6}{:>6}", d.drive_label, z.center, z.half_width, z.multiplicity).ok();
        }
    }
    writeln!(s, "pole tables identical across drives: {}", result.poles_identical).ok();
    for row in &result.width_table {
        writeln!(s, "mean zero half-width driving {:<10} {:.6} MHz", row.drive_label, row.mean_half_width_mhz).ok();
    }
    match (&result.lossy_component, ambiguity) {
        (Some(label), _) => {
            writeln!(s, "lossy component: {label}").ok();
        }
        (None, Some(error)) => return Err(error),
        (None, None) => {}
    }
    if !result.poles_identical {
        return Err(Error::CheckFailed("pole tables differ between drives".into()));
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct BunchingComparison {
    pub eta: f64,
    pub antiresonance_probe_mhz: f64,
    pub antiresonance_g2: f64,
    pub normal_mode_probes_mhz: Vec<f64>,
    pub normal_mode_g2: Vec<f64>,
    /// Antiresonance g²(0) over the larger normal-mode value.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub linear_limit: LinearLimitReport,
    pub bunching: BunchingComparison,
    pub pass: bool,
}

pub fn oracle_check(config: &ScenarioConfig) -> Result<OracleCheck> {
    let base = &config.oracle.params;
    let etas: Vec<f64> = config.oracle.eta_over_kappa.iter().map(|x| x * base.kappa).collect();
    let linear_limit = linear_limit_check(base, &etas)?;
    let eta = *etas.last().expect("checked non-empty");

    // probe frequencies relative to the cavity; the emitter sits at Δpc − Δpa
    let delta_ac = base.delta_pc - base.delta_pa;
    let at = |probe: f64| -> Result<f64> {
        Ok(lindblad_steady_state(&JCParams {
            eta,
            delta_pc: probe,
            delta_pa: probe - delta_ac,
            ..base.clone()
        })?
        .g2_zero)
    };
    let network = ModeNetwork::atom_cavity(base.g, base.gamma, base.kappa, delta_ac)?;
    let normal_mode_probes: Vec<f64> = resonances(&network)?.iter().map(|p| p.center).collect();
    let normal_mode_g2 = normal_mode_probes.iter().map(|&p| at(p)).collect::<Result<Vec<_>>>()?;
    let antiresonance_g2 = at(delta_ac)?;
    let ratio = antiresonance_g2 / normal_mode_g2.iter().copied().fold(f64::MIN_POSITIVE, f64::max);

    let pass = linear_limit.monotone && linear_limit.smallest_eta_deviation < 1e-3 && linear_limit.all_states_valid;
    Ok(OracleCheck {
        linear_limit,
        bunching: BunchingComparison {
            eta,
            antiresonance_probe_mhz: delta_ac,
            antiresonance_g2,
            normal_mode_probes_mhz: normal_mode_probes,
            normal_mode_g2,
            ratio,
        },
        pass,
    })
}

pub fn cmd_oracle_check(config: &ScenarioConfig, out: &Path) -> Result<CommandReport> {
    let check = oracle_check(config)?;
    let mut report = CommandReport::default();
    write_json(report.file(out.join("oracle_check.json")), &check)?;
    let s = &mut report.summary;
    writeln!(s, "{:>12}{:>16}{:>12}{:>8}", "eta", "deviation", "g2(0)", "cutoff").ok();
    for p in &check.linear_limit.points {
        writeln!(s, "{:>12.5}{:>16.3e}{:>12.4}{:>8}", p.eta, p.deviation, p.g2_zero, p.cutoff).ok();
    }
    let b = &check.bunching;
    writeln!(s, "g2(0) at antiresonance {:.6}, at normal modes {:?}", b.antiresonance_g2, b.normal_mode_g2).ok();
    writeln!(s, "ratio {:.3}", b.ratio).ok();
    writeln!(s, "{}", if check.pass { "PASS" } else { "FAIL" }).ok();
    if !check.pass {
        return Err(Error::CheckFailed(format!(
            "linear limit: monotone={}, deviation at smallest drive {:.3e}, valid states={}",
            check.linear_limit.monotone, check.linear_limit.smallest_eta_deviation, check.linear_limit.all_states_valid
        )));
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct HeterodyneFrequency {
    pub probe_mhz: f64,
    /// Phase of the system field relative to the empty-cavity field, degrees.
    pub model_phase_deg: f64,
    pub histogram_mode_deg: f64,
    pub fit: PeriodicGaussianFit,
    pub counts: Vec<u64>,
    pub normalized: Vec<f64>,
    pub system_phases_deg: Vec<f64>,
    pub reference_phases_deg: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeterodyneDemo {
    pub bin_centers_deg: Vec<f64>,
    pub frequencies: Vec<HeterodyneFrequency>,
}

/// Per probe frequency: phase streams for the system and for the bare driven
/// mode, the referenced histogram and its periodic-Gaussian fit.
pub fn heterodyne_demo(config: &ScenarioConfig) -> Result<HeterodyneDemo> {
    let network = config.network()?;
    let drive = config.drive_label(&network)?;
    let driven = network.index_of(&drive)?;
    let bare = &network.modes()[driven];
    let empty = ModeNetwork::from_modes(vec![Mode::new(bare.label.clone(), bare.kind, bare.frequency, bare.decay)])?
        .with_drive(&bare.label, network.drive()[driven])?;
    let h = &config.heterodyne;
    if h.windows == 0 {
        return Err(Error::Config("heterodyne demo needs at least one window".into()));
    }
    let beat = config.beat();
    beat.validate()?;
    let probes = h.probes.values()?;

    let frequencies = probes
        .par_iter()
        .enumerate()
        .map(|(k, &probe)| {
            let system = amplitude_at(&network, config, driven, probe)?;
            let reference = steady_state(&empty, probe)?.amplitudes[0];
            let stream_seed = |s: u64| beat.seed.wrapping_add((2 * k as u64 + s).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut system_beat = beat.clone();
            system_beat.seed = stream_seed(0);
            let mut reference_beat = beat.clone();
            reference_beat.seed = stream_seed(1);
            let system_phases = phase_stream(system, &system_beat, h.windows)?;
            let reference_phases = phase_stream(reference, &reference_beat, h.windows)?;
            let mut histogram = accumulate_histogram(&system_phases, PhaseReference::Stream(&reference_phases), h.bins)?;
            histogram.normalize_to_max = true;
            let fit = fit_periodic_gaussian(&histogram)?;
            Ok(HeterodyneFrequency {
                probe_mhz: probe,
                model_phase_deg: wrap_degrees((system / reference).arg().to_degrees()),
                histogram_mode_deg: histogram.mode().unwrap_or(f64::NAN),
                fit,
                counts: histogram.counts().to_vec(),
                normalized: histogram.values(),
                system_phases_deg: system_phases,
                reference_phases_deg: reference_phases,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HeterodyneDemo {
        bin_centers_deg: crate::fit::PhaseHistogram::new(h.bins)?.bin_centers(),
        frequencies,
    })
}

pub fn cmd_heterodyne_demo(config: &ScenarioConfig, out: &Path) -> Result<CommandReport> {
    let demo = heterodyne_demo(config)?;
    let mut report = CommandReport::default();

    let header = ["probe_mhz", "bin_center_deg", "count", "normalized"].map(String::from);
    let rows = demo.frequencies.iter().flat_map(|f| {
        demo.bin_centers_deg
            .iter()
            .zip(f.counts.iter().zip(&f.normalized))
            .map(move |(c, (n, v))| vec![f.probe_mhz, *c, *n as f64, *v])
    });
    write_csv(report.file(out.join("heterodyne_histograms.csv")), &header, rows)?;

    let header = [
        "probe_mhz",
        "model_phase_deg",
        "histogram_mode_deg",
        "fitted_mean_deg",
        "mean_error_deg",
        "width_deg",
    ]
    .map(String::from);
    let rows = demo.frequencies.iter().map(|f| {
        vec![
            f.probe_mhz,
            f.model_phase_deg,
            f.histogram_mode_deg,
            f.fit.mean,
            f.fit.mean_error,
            f.fit.width,
        ]
    });
    write_csv(report.file(out.join("heterodyne_fits.csv")), &header, rows)?;

    let header = ["probe_mhz", "window", "system_phase_deg", "reference_phase_deg"].map(String::from);
    let rows = demo.frequencies.iter().flat_map(|f| {
        (0..f.system_phases_deg.len()).map(move |w| vec![f.probe_mhz, w as f64, f.system_phases_deg[w], f.reference_phases_deg[w]])
    });
    write_csv(report.file(out.join("heterodyne_phases.csv")), &header, rows)?;

    let s = &mut report.summary;
    writeln!(s, "{:>10}{:>12}{:>12}{:>12}{:>10}", "probe_mhz", "model_deg", "mode_deg", "fit_deg", "err_deg").ok();
    for f in &demo.frequencies {
        writeln!(
            s,
            "{:>10.3}{:>12.3}{:>12.3}{:>12.3}{:>10.3}",
            f.probe_mhz, f.model_phase_deg, f.histogram_mode_deg, f.fit.mean, f.fit.mean_error
        )
        .ok();
    }
    Ok(report)
}
