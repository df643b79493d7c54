//! Antiresonances located directly on a computed (or measured) spectrum.
//!
//! Candidates are local minima of the driven node's log-magnitude whose
//! prominence exceeds a threshold. Each candidate is then refined with a local
//! complex rational model of the response,
//!
//! ```text
//! a(x)·(1 + d₁t + d₂t²) ≈ n₀ + n₁t,    t = x − x_min
//! ```
//!
//! whose numerator root `x_min − n₀/n₁ = center − i·half_width` is the zero.
//! The magnitude minimum alone is biased by the sloping background of nearby
//! poles; the rational model absorbs that background.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AntiresonanceZero, ComplexSpectrum};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectOptions {
    /// Minimum dip depth relative to the lower of the two neighbouring peaks, dB.
    pub prominence_db: f64,
    /// Half-size of the refinement window in units of the initial width estimate.
    pub window_widths: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self {
            prominence_db: 3.0,
            window_widths: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectedZero {
    pub zero: AntiresonanceZero,
    /// Parabolic-interpolated position of the log-magnitude minimum, MHz.
    pub magnitude_minimum: f64,
    /// Half the probe span over which the phase falls by π/2 around the dip.
    pub phase_span_half_width: Option<f64>,
    pub prominence_db: f64,
    /// The dip or its refinement window touches the edge of the grid.
    pub at_boundary: bool,
}

pub fn detect_antiresonances_numeric(
    spectrum: &ComplexSpectrum,
    drive_label: &str,
    options: &DetectOptions,
) -> Result<Vec<DetectedZero>> {
    let mode = spectrum.mode_index(drive_label)?;
    if spectrum.labels().len() < 2 {
        return Ok(Vec::new());
    }
    let x = spectrum.probes();
    let amplitudes = spectrum.amplitudes(mode);
    let db = spectrum.magnitude_db(mode);
    let phase = spectrum.phase_unwrapped(mode);
    let n = x.len();
    let step = spectrum.grid().step();

    let mut found = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(db[i] < db[i - 1] && db[i] <= db[i + 1]) {
            continue;
        }
        let prominence = prominence(&db, i);
        if prominence < options.prominence_db {
            continue;
        }

        let (y0, y1, y2) = (db[i - 1], db[i], db[i + 1]);
        let curvature = y0 - 2.0 * y1 + y2;
        let offset = if curvature > 0.0 { 0.5 * (y0 - y2) / curvature } else { 0.0 };
        let magnitude_minimum = x[i] + offset.clamp(-0.5, 0.5) * step;

        let phase_span = phase_span_half_width(&x, &phase, i);
        let initial_width = phase_span
            .or_else(|| curvature_width(amplitudes, i, step))
            .unwrap_or(step)
            .max(step);

        let half_window = (options.window_widths * initial_width).max(2.0 * step);
        let mut lo = i.saturating_sub((half_window / step).ceil() as usize);
        let mut hi = (i + (half_window / step).ceil() as usize).min(n - 1);
        let mut clipped = i < (half_window / step).ceil() as usize || hi == n - 1;
        while hi - lo + 1 < 5 {
            if lo > 0 {
                lo -= 1;
            } else if hi < n - 1 {
                hi += 1;
            } else {
                break;
            }
            clipped = clipped || lo == 0 || hi == n - 1;
        }

        let (center, half_width) = rational_zero(&x[lo..=hi], &amplitudes[lo..=hi], magnitude_minimum, initial_width)
            .filter(|(c, w)| *w > 0.0 && (c - magnitude_minimum).abs() <= half_window)
            .unwrap_or((magnitude_minimum, initial_width));

        let at_boundary = clipped
            || i == 1
            || i == n - 2
            || center - x[0] < step
            || x[n - 1] - center < step;

        found.push(DetectedZero {
            zero: AntiresonanceZero {
                drive_label: drive_label.to_string(),
                center,
                half_width,
                multiplicity: 1,
            },
            magnitude_minimum,
            phase_span_half_width: phase_span,
            prominence_db: prominence,
            at_boundary,
        });
    }
    Ok(found)
}

/// Depth of the minimum at `i` below the lower of the highest points reached
/// on either side before the curve drops below `y[i]` again.
///
/// A side that rises all the way to the edge of the grid has no known peak and
/// is ignored, so a dip cut off by the grid edge is judged by its other side.
fn prominence(y: &[f64], i: usize) -> f64 {
    let side = |values: &mut dyn Iterator<Item = &f64>| -> (f64, bool) {
        let mut peak = y[i];
        let mut previous = y[i];
        let mut falling_seen = false;
        for &v in values {
            if v < y[i] {
                return (peak, true);
            }
            falling_seen |= v < previous;
            previous = v;
            peak = peak.max(v);
        }
        (peak, falling_seen)
    };
    let (left, left_known) = side(&mut y[..i].iter().rev());
    let (right, right_known) = side(&mut y[i + 1..].iter());
    let reference = match (left_known, right_known) {
        (true, false) => left,
        (false, true) => right,
        _ => left.min(right),
    };
    reference - y[i]
}

fn phase_span_half_width(x: &[f64], phase: &[f64], i: usize) -> Option<f64> {
    let target_left = phase[i] + FRAC_PI_4;
    let target_right = phase[i] - FRAC_PI_4;
    let left = (1..=i).rev().find_map(|j| {
        let (a, b) = (phase[j - 1], phase[j]);
        (a >= target_left && b < target_left).then(|| x[j - 1] + (a - target_left) / (a - b) * (x[j] - x[j - 1]))
    })?;
    let right = (i..x.len() - 1).find_map(|j| {
        let (a, b) = (phase[j], phase[j + 1]);
        (a > target_right && b <= target_right).then(|| x[j] + (a - target_right) / (a - b) * (x[j + 1] - x[j]))
    })?;
    Some(0.5 * (right - left))
}

/// Width from the curvature of `|a|²`, which near an isolated zero behaves as
/// `K·((x − c)² + w²)`.
fn curvature_width(a: &[Complex64], i: usize, step: f64) -> Option<f64> {
    let (p0, p1, p2) = (a[i - 1].norm_sqr(), a[i].norm_sqr(), a[i + 1].norm_sqr());
    let curvature = (p0 - 2.0 * p1 + p2) / (step * step);
    let w = (2.0 * p1 / curvature).sqrt();
    (curvature > 0.0 && w.is_finite()).then_some(w)
}

fn rational_zero(x: &[f64], a: &[Complex64], origin: f64, scale: f64) -> Option<(f64, f64)> {
    let rows = x.len();
    let one = Complex64::new(1.0, 0.0);
    let design = DMatrix::from_fn(rows, 4, |r, c| {
        let t = Complex64::new((x[r] - origin) / scale, 0.0);
        match c {
            0 => one,
            1 => t,
            2 => -a[r] * t,
            _ => -a[r] * t * t,
        }
    });
    let rhs = DVector::from_iterator(rows, a.iter().copied());
    let solution = design.svd(true, true).solve(&rhs, 1e-300).ok()?;
    let root = -solution[0] / solution[1];
    let zero = origin + root.re * scale;
    let width = -root.im * scale;
    (zero.is_finite() && width.is_finite()).then_some((zero, width))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{ModeNetwork, ProbeGrid};
    use crate::spectral::{antiresonances, sweep};

    #[test]
    fn finds_the_atom_cavity_antiresonance() {
        let net = ModeNetwork::atom_cavity(16.0, 3.0, 1.5, -3.0).unwrap();
        let grid = ProbeGrid::new(-25.0, 25.0, 501).unwrap();
        let spectrum = sweep(&net, &grid).unwrap();
        let zeros = detect_antiresonances_numeric(&spectrum, "cavity", &DetectOptions::default()).unwrap();
        assert_eq!(zeros.len(), 1);
        let z = &zeros[0];
        assert!((z.zero.center + 3.0).abs() < grid.step());
        assert!((z.zero.half_width - 3.0).abs() < 0.3);
        assert!(!z.at_boundary);
        assert!(z.prominence_db > 20.0);

        let algebraic = &antiresonances(&net, "cavity").unwrap()[0];
        assert!((z.zero.center - algebraic.center).abs() < grid.step());
    }

    #[test]
    fn empty_cavity_has_no_zeros() {
        let net = ModeNetwork::empty_cavity(1.5).unwrap();
        let spectrum = sweep(&net, &ProbeGrid::new(-20.0, 20.0, 201).unwrap()).unwrap();
        assert!(detect_antiresonances_numeric(&spectrum, "cavity", &DetectOptions::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn zero_follows_the_stark_shifted_atom() {
        let net = ModeNetwork::atom_cavity(16.0, 3.0, 1.5, 12.0).unwrap();
        let grid = ProbeGrid::new(-30.0, 30.0, 601).unwrap();
        let spectrum = sweep(&net, &grid).unwrap();
        let zeros = detect_antiresonances_numeric(&spectrum, "cavity", &DetectOptions::default()).unwrap();
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0].zero.center - 12.0).abs() < grid.step());
    }

    #[test]
    fn dip_at_the_grid_edge_is_flagged() {
        let net = ModeNetwork::atom_cavity(16.0, 3.0, 1.5, 0.0).unwrap();
        let grid = ProbeGrid::new(-0.3, 20.0, 204).unwrap();
        let spectrum = sweep(&net, &grid).unwrap();
        let zeros = detect_antiresonances_numeric(&spectrum, "cavity", &DetectOptions::default()).unwrap();
        assert_eq!(zeros.len(), 1);
        assert!(zeros[0].at_boundary);
    }

    #[test]
    fn shallow_dips_are_rejected_by_prominence() {
        let net = ModeNetwork::atom_cavity(16.0, 3.0, 1.5, 0.0).unwrap();
        let spectrum = sweep(&net, &ProbeGrid::new(-25.0, 25.0, 251).unwrap()).unwrap();
        let strict = DetectOptions {
            prominence_db: 200.0,
            ..DetectOptions::default()
        };
        assert!(detect_antiresonances_numeric(&spectrum, "cavity", &strict).unwrap().is_empty());
    }
}
