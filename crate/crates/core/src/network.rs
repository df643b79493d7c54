//! Network data model and the driven, damped coupled-mode steady state.
//!
//! All frequencies and rates are ω/2π in MHz. A mode with frequency `ω_j` and
//! amplitude decay rate `Γ_j`, coupled to its neighbours through the real
//! symmetric matrix `G`, obeys in the frame rotating at the probe frequency
//! `ω_p`
//!
//! ```text
//! (ω_p − ω_j + iΓ_j)·a_j − Σ_k G_jk·a_k = η_j
//! ```
//!
//! so the steady state solves `M·a = η` with the dynamical matrix `M` built by
//! [`build_dynamical_matrix`]. The off-diagonal sign is a convention: the
//! driven node's amplitude does not depend on it.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    /// Two-level emitter (atom, qubit) treated in the weak-excitation limit.
    Emitter,
    /// Harmonic mode (cavity, resonator).
    Resonator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub label: String,
    pub kind: ModeKind,
    /// Bare frequency relative to the global reference, MHz.
    pub frequency: f64,
    /// Amplitude half-width, MHz (γ for emitters, κ for resonators).
    pub decay: f64,
}

impl Mode {
    pub fn new(label: impl Into<String>, kind: ModeKind, frequency: f64, decay: f64) -> Self {
        Self {
            label: label.into(),
            kind,
            frequency,
            decay,
        }
    }

    pub fn emitter(label: impl Into<String>, frequency: f64, decay: f64) -> Self {
        Self::new(label, ModeKind::Emitter, frequency, decay)
    }

    pub fn resonator(label: impl Into<String>, frequency: f64, decay: f64) -> Self {
        Self::new(label, ModeKind::Resonator, frequency, decay)
    }
}

/// A validated network: modes, symmetric coupling matrix and complex drive.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeNetwork {
    modes: Vec<Mode>,
    couplings: DMatrix<f64>,
    drive: DVector<Complex64>,
}

impl ModeNetwork {
    pub fn new(modes: Vec<Mode>, couplings: DMatrix<f64>, drive: DVector<Complex64>) -> Result<Self> {
        let network = Self {
            modes,
            couplings,
            drive,
        };
        network.validate()?;
        Ok(network)
    }

    /// Uncoupled, undriven network over `modes`.
    pub fn from_modes(modes: Vec<Mode>) -> Result<Self> {
        let n = modes.len();
        Self::new(modes, DMatrix::zeros(n, n), DVector::zeros(n))
    }

    /// Single atom in a single cavity mode, cavity driven with unit amplitude.
    ///
    /// The cavity sits at the frequency origin, so probe coordinates are
    /// probe–cavity detunings and the atom frequency is `delta_ac`.
    pub fn atom_cavity(g: f64, gamma: f64, kappa: f64, delta_ac: f64) -> Result<Self> {
        Self::from_modes(vec![
            Mode::resonator("cavity", 0.0, kappa),
            Mode::emitter("atom", delta_ac, gamma),
        ])?
        .with_coupling("cavity", "atom", g)?
        .with_drive("cavity", Complex64::new(1.0, 0.0))
    }

    /// Empty cavity with unit drive.
    pub fn empty_cavity(kappa: f64) -> Result<Self> {
        Self::from_modes(vec![Mode::resonator("cavity", 0.0, kappa)])?
            .with_drive("cavity", Complex64::new(1.0, 0.0))
    }

    pub fn with_coupling(mut self, a: &str, b: &str, g: f64) -> Result<Self> {
        let i = self.index_of(a)?;
        let j = self.index_of(b)?;
        if i == j {
            return Err(Error::InvalidNetwork(format!("self coupling on `{a}`")));
        }
        if !g.is_finite() {
            return Err(Error::InvalidNetwork(format!("non-finite coupling {a}–{b}")));
        }
        self.couplings[(i, j)] = g;
        self.couplings[(j, i)] = g;
        Ok(self)
    }

    pub fn with_drive(mut self, label: &str, amplitude: Complex64) -> Result<Self> {
        let i = self.index_of(label)?;
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return Err(Error::InvalidNetwork(format!("non-finite drive on `{label}`")));
        }
        self.drive[i] = amplitude;
        Ok(self)
    }

    /// Copy of this network with unit drive on `label` and nothing else.
    pub fn driven_only_at(&self, label: &str) -> Result<Self> {
        let i = self.index_of(label)?;
        let mut out = self.clone();
        out.drive.fill(Complex64::new(0.0, 0.0));
        out.drive[i] = Complex64::new(1.0, 0.0);
        Ok(out)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }

    pub fn drive(&self) -> &DVector<Complex64> {
        &self.drive
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.modes.iter().map(|m| m.label.as_str())
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| Error::UnknownMode(label.to_string()))
    }

    /// Indices of the nonzero drive entries.
    pub fn driven_indices(&self) -> Vec<usize> {
        self.drive
            .iter()
            .enumerate()
            .filter(|(_, d)| d.norm() > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Label of the single driven node, if exactly one node is driven.
    pub fn single_driven_label(&self) -> Option<&str> {
        match self.driven_indices().as_slice() {
            [i] => Some(self.modes[*i].label.as_str()),
            _ => None,
        }
    }

    pub fn set_frequency(&mut self, label: &str, frequency: f64) -> Result<()> {
        if !frequency.is_finite() {
            return Err(Error::InvalidNetwork(format!("non-finite frequency for `{label}`")));
        }
        let i = self.index_of(label)?;
        self.modes[i].frequency = frequency;
        Ok(())
    }

    /// Multiply every coupling that touches an emitter by `scale`.
    pub fn scale_emitter_couplings(&mut self, scale: f64) {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if self.modes[i].kind == ModeKind::Emitter || self.modes[j].kind == ModeKind::Emitter {
                    self.couplings[(i, j)] *= scale;
                }
            }
        }
    }

    /// Shift every emitter frequency by `shift` MHz.
    pub fn shift_emitter_frequencies(&mut self, shift: f64) {
        for mode in self.modes.iter_mut().filter(|m| m.kind == ModeKind::Emitter) {
            mode.frequency += shift;
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.modes.len();
        if n == 0 {
            return Err(Error::InvalidNetwork("network has no modes".into()));
        }
        if self.couplings.nrows() != n || self.couplings.ncols() != n {
            return Err(Error::InvalidNetwork(format!(
                "coupling matrix is {}×{} but the network has {n} modes",
                self.couplings.nrows(),
                self.couplings.ncols()
            )));
        }
        if self.drive.len() != n {
            return Err(Error::InvalidNetwork(format!(
                "drive vector has {} entries but the network has {n} modes",
                self.drive.len()
            )));
        }
        let mut seen = HashSet::new();
        for mode in &self.modes {
            if mode.label.is_empty() {
                return Err(Error::InvalidNetwork("empty mode label".into()));
            }
            if !seen.insert(mode.label.as_str()) {
                return Err(Error::InvalidNetwork(format!("duplicate label `{}`", mode.label)));
            }
            if !mode.frequency.is_finite() {
                return Err(Error::InvalidNetwork(format!("non-finite frequency for `{}`", mode.label)));
            }
            if !(mode.decay > 0.0 && mode.decay.is_finite()) {
                return Err(Error::InvalidNetwork(format!(
                    "decay of `{}` must be positive, got {}",
                    mode.label, mode.decay
                )));
            }
        }
        for i in 0..n {
            if self.couplings[(i, i)] != 0.0 {
                return Err(Error::InvalidNetwork(format!(
                    "self coupling on `{}`",
                    self.modes[i].label
                )));
            }
            for j in 0..i {
                let (gij, gji) = (self.couplings[(i, j)], self.couplings[(j, i)]);
                if !gij.is_finite() || gij != gji {
                    return Err(Error::InvalidNetwork(format!(
                        "coupling between `{}` and `{}` is not symmetric ({gij} vs {gji})",
                        self.modes[i].label, self.modes[j].label
                    )));
                }
            }
        }
        if self.drive.iter().any(|d| !(d.re.is_finite() && d.im.is_finite())) {
            return Err(Error::InvalidNetwork("non-finite drive entry".into()));
        }
        Ok(())
    }
}

/// Uniform grid of probe frequencies, MHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeGrid {
    start: f64,
    stop: f64,
    points: usize,
}

impl ProbeGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite()) || start >= stop {
            return Err(Error::InvalidGrid(format!("need finite start < stop, got [{start}, {stop}]")));
        }
        if points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {points}")));
        }
        Ok(Self { start, stop, points })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn stop(&self) -> f64 {
        self.stop
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        (self.stop - self.start) / (self.points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.stop
        } else {
            self.start + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }
}

/// Steady-state amplitudes of every mode at one probe frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub probe: f64,
    pub amplitudes: Vec<Complex64>,
}

/// `M[j][j] = (probe − ω_j) + iΓ_j`, `M[j][k] = −G_jk`.
pub fn build_dynamical_matrix(network: &ModeNetwork, probe: f64) -> DMatrix<Complex64> {
    let n = network.len();
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            let mode = &network.modes[j];
            Complex64::new(probe - mode.frequency, mode.decay)
        } else {
            Complex64::new(-network.couplings[(j, k)], 0.0)
        }
    })
}

/// Solve `M·a = drive` by LU with partial pivoting.
pub(crate) fn solve_response(
    matrix: DMatrix<Complex64>,
    drive: &DVector<Complex64>,
    probe: f64,
) -> Result<DVector<Complex64>> {
    let solution = matrix
        .lu()
        .solve(drive)
        .ok_or(Error::SingularResponse { probe })?;
    if solution.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
        Ok(solution)
    } else {
        Err(Error::SingularResponse { probe })
    }
}

pub fn steady_state(network: &ModeNetwork, probe: f64) -> Result<SteadyState> {
    if network.driven_indices().is_empty() {
        return Err(Error::NoDrive);
    }
    let amplitudes = solve_response(build_dynamical_matrix(network, probe), &network.drive, probe)?;
    Ok(SteadyState {
        probe,
        amplitudes: amplitudes.iter().copied().collect(),
    })
}

/// Cavity field of a driven atom–cavity pair in the weak-excitation limit:
/// `η(Δpa + iγ) / ((Δpa + iγ)(Δpc + iκ) − g²)`.
pub fn closed_form_two_mode(
    delta_pa: f64,
    delta_pc: f64,
    gamma: f64,
    kappa: f64,
    g: f64,
    eta: f64,
) -> Complex64 {
    let atom = Complex64::new(delta_pa, gamma);
    let cavity = Complex64::new(delta_pc, kappa);
    eta * atom / (atom * cavity - g * g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_resonator_matrix() {
        let net = ModeNetwork::empty_cavity(1.5).unwrap();
        let m = build_dynamical_matrix(&net, 0.0);
        assert_eq!(m.shape(), (1, 1));
        assert_eq!(m[(0, 0)], c(0.0, 1.5));
    }

    #[test]
    fn atom_cavity_matrix() {
        let net = ModeNetwork::atom_cavity(16.0, 3.0, 1.5, 0.0).unwrap();
        let m = build_dynamical_matrix(&net, 0.0);
        assert_eq!(m[(0, 0)], c(0.0, 1.5));
        assert_eq!(m[(0, 1)], c(-16.0, 0.0));
        assert_eq!(m[(1, 0)], c(-16.0, 0.0));
        assert_eq!(m[(1, 1)], c(0.0, 3.0));
    }

    #[test]
    fn determinant_matches_closed_form_denominator() {
        let (g, gamma, kappa, delta_ac) = (16.0, 3.0, 1.5, -2.0);
        let net = ModeNetwork::atom_cavity(g, gamma, kappa, delta_ac).unwrap();
        for k in 0..10 {
            let probe = -37.0 + 7.3 * k as f64;
            let m = build_dynamical_matrix(&net, probe);
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let expected = c(probe - delta_ac, gamma) * c(probe, kappa) - g * g;
            assert_relative_eq!(det.re, expected.re, max_relative = 1e-14);
            assert_relative_eq!(det.im, expected.im, max_relative = 1e-14, epsilon = 1e-12);
        }
    }

    #[test]
    fn empty_cavity_on_resonance() {
        let net = ModeNetwork::empty_cavity(1.5).unwrap();
        let a = steady_state(&net, 0.0).unwrap().amplitudes[0];
        assert_relative_eq!(a.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(a.im, -1.0 / 1.5, max_relative = 1e-15);
    }

    #[test]
    fn nominal_parameters_on_resonance() {
        let net = ModeNetwork::atom_cavity(16.0, 3.0, 1.5, 0.0).unwrap();
        let a = steady_state(&net, 0.0).unwrap().amplitudes[0];
        // 3i / (−3·1.5 − 256)
        let expected = c(0.0, 3.0) / c(-4.5 - 256.0, 0.0);
        assert_relative_eq!(a.im, expected.im, max_relative = 1e-14);
        assert!(a.re.abs() < 1e-16);
        assert_relative_eq!(a.norm(), 1.152e-2, max_relative = 1e-3);
        assert_relative_eq!(a.arg(), -std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn decoupled_atom_leaves_cavity_alone() {
        let coupled = ModeNetwork::atom_cavity(0.0, 3.0, 1.5, 4.0).unwrap();
        let empty = ModeNetwork::empty_cavity(1.5).unwrap();
        for probe in [-20.0, -1.0, 0.0, 2.5, 19.0] {
            let a = steady_state(&coupled, probe).unwrap().amplitudes[0];
            let b = steady_state(&empty, probe).unwrap().amplitudes[0];
            assert_relative_eq!(a.re, b.re, max_relative = 1e-14);
            assert_relative_eq!(a.im, b.im, max_relative = 1e-14);
        }
    }

    #[test]
    fn closed_form_numerator_at_atom_resonance() {
        let a = closed_form_two_mode(0.0, 2.0, 3.0, 1.5, 16.0, 1.0);
        let denominator = c(0.0, 3.0) * c(2.0, 1.5) - 256.0;
        assert_relative_eq!(a.norm(), 3.0 / denominator.norm(), max_relative = 1e-14);
    }

    #[test]
    fn closed_form_vanishes_for_huge_coupling() {
        let small = closed_form_two_mode(1.0, 1.0, 3.0, 1.5, 1e6, 1.0).norm();
        assert!(small < 1e-11);
    }

    #[test]
    fn normal_mode_maxima_near_plus_minus_g() {
        // symmetric scan Δpa = Δpc = Δ, brute-force local maxima on a fine grid
        let values: Vec<(f64, f64)> = (0..=8000)
            .map(|i| {
                let d = -40.0 + 0.01 * i as f64;
                (d, closed_form_two_mode(d, d, 3.0, 1.5, 16.0, 1.0).norm())
            })
            .collect();
        let maxima: Vec<f64> = values
            .windows(3)
            .filter(|w| w[1].1 > w[0].1 && w[1].1 > w[2].1)
            .map(|w| w[1].0)
            .collect();
        assert_eq!(maxima.len(), 2, "{maxima:?}");
        assert!((maxima[0] + 16.0).abs() < 0.5);
        assert!((maxima[1] - 16.0).abs() < 0.5);
    }

    #[test]
    fn rejects_bad_networks() {
        let modes = vec![Mode::resonator("a", 0.0, 1.0), Mode::emitter("b", 0.0, 1.0)];
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(matches!(
            ModeNetwork::new(modes.clone(), asym, DVector::zeros(2)),
            Err(Error::InvalidNetwork(_))
        ));
        let wrong_dim = DMatrix::zeros(3, 3);
        assert!(ModeNetwork::new(modes.clone(), wrong_dim, DVector::zeros(2)).is_err());
        let diag = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(ModeNetwork::new(modes.clone(), diag, DVector::zeros(2)).is_err());
        let dup = vec![Mode::resonator("a", 0.0, 1.0), Mode::emitter("a", 0.0, 1.0)];
        assert!(ModeNetwork::from_modes(dup).is_err());
        assert!(ModeNetwork::from_modes(vec![Mode::resonator("a", 0.0, 0.0)]).is_err());
        assert!(ModeNetwork::from_modes(modes).unwrap().with_coupling("a", "a", 1.0).is_err());
    }

    #[test]
    fn undriven_network_is_rejected_for_response() {
        let net = ModeNetwork::from_modes(vec![Mode::resonator("a", 0.0, 1.0)]).unwrap();
        assert!(matches!(steady_state(&net, 0.0), Err(Error::NoDrive)));
    }

    #[test]
    fn singular_matrix_reports_probe() {
        let m = DMatrix::from_element(2, 2, c(1.0, 0.0));
        let b = DVector::from_element(2, c(1.0, 0.0));
        assert!(matches!(
            solve_response(m, &b, 4.0),
            Err(Error::SingularResponse { probe }) if probe == 4.0
        ));
    }

    #[test]
    fn grid_validation() {
        assert!(ProbeGrid::new(1.0, 1.0, 5).is_err());
        assert!(ProbeGrid::new(0.0, 1.0, 1).is_err());
        let grid = ProbeGrid::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(grid.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
