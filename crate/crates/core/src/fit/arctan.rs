//! Arctangent model for a phase profile across a single isolated zero or pole:
//!
//! ```text
//! φ(x) = offset − (swing/π)·atan((x − center)/width)
//! ```
//!
//! with phases in degrees. `width` is the scale parameter of the arctangent,
//! which for the phase of `(x − c) + iw` is the half-width of the feature.

use serde::{Deserialize, Serialize};

use super::nlls::{data_points, fit_nlls, FitOptions, FitResult};
use super::FitReport;
use crate::error::{Error, Result};

/// Which points enter the fit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitWindow {
    /// Every point.
    Full,
    /// Points whose phase lies within a quarter of the observed peak-to-trough
    /// range of the midpoint, i.e. the central half of the swing. The wings of
    /// a measured profile carry the neighbouring normal modes and are not
    /// arctangent-shaped.
    #[default]
    CentralHalfSwing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArctanFitResult {
    pub center: f64,
    /// Always positive.
    pub width: f64,
    /// Asymptotic phase change of the fitted arctangent, degrees. Positive when
    /// the phase falls with increasing `x`.
    pub swing: f64,
    /// Peak-to-trough range of the data, degrees.
    pub observed_swing: f64,
    pub offset: f64,
    pub center_error: f64,
    pub width_error: f64,
    pub swing_error: f64,
    pub offset_error: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    pub points_used: usize,
    /// The phase is not monotonic across the central region; the fit may be
    /// poorly conditioned.
    pub poorly_conditioned: bool,
}

impl ArctanFitResult {
    pub fn report(&self) -> FitReport {
        FitReport::new(
            "arctan",
            &["offset", "swing", "center", "width"],
            &[self.offset, self.swing, self.center, self.width],
            &[self.offset_error, self.swing_error, self.center_error, self.width_error],
            self.residual_norm,
            self.iterations,
            true,
        )
    }
}

pub fn arctan_model(x: f64, p: &[f64]) -> f64 {
    p[0] - p[1] / std::f64::consts::PI * ((x - p[2]) / p[3]).atan()
}

/// Fit the arctangent model to `(x, phase_deg)`, with optional one-sigma phase
/// uncertainties. `x` must be strictly monotonic.
pub fn fit_arctan_phase(
    x: &[f64],
    phase_deg: &[f64],
    sigma_deg: Option<&[f64]>,
    window: FitWindow,
) -> Result<ArctanFitResult> {
    let all = data_points(x, phase_deg, sigma_deg)?;
    if all.len() < 6 {
        return Err(Error::InvalidFitInput(format!("arctangent fit needs at least 6 points, got {}", all.len())));
    }
    let increasing = x.windows(2).all(|w| w[1] > w[0]);
    let decreasing = x.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidFitInput("abscissa must be strictly monotonic".into()));
    }
    if all.iter().any(|d| !(d.x.is_finite() && d.y.is_finite())) {
        return Err(Error::InvalidFitInput("non-finite data".into()));
    }

    let max = phase_deg.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = phase_deg.iter().copied().fold(f64::INFINITY, f64::min);
    let observed_swing = max - min;
    let mid = 0.5 * (max + min);
    if observed_swing == 0.0 {
        return Err(Error::InvalidFitInput("phase is constant".into()));
    }
    let central: Vec<usize> = (0..x.len())
        .filter(|&i| (phase_deg[i] - mid).abs() <= 0.25 * observed_swing)
        .collect();

    // steepest descent of the phase along the axis
    let steepest = (1..x.len())
        .max_by(|&a, &b| {
            let slope = |i: usize| ((phase_deg[i] - phase_deg[i - 1]) / (x[i] - x[i - 1])).abs();
            slope(a).total_cmp(&slope(b))
        })
        .expect("at least six points");
    let center0 = 0.5 * (x[steepest] + x[steepest - 1]);
    let falling = (phase_deg[steepest] - phase_deg[steepest - 1]) / (x[steepest] - x[steepest - 1]) < 0.0;
    let (lo, hi) = central
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| (lo.min(x[i]), hi.max(x[i])));
    let step = (x[1] - x[0]).abs();
    let width0 = (0.5 * (hi - lo)).max(step);
    let swing0 = if falling { observed_swing } else { -observed_swing };

    let poorly_conditioned = {
        let slopes: Vec<f64> = central.windows(2).map(|w| phase_deg[w[1]] - phase_deg[w[0]]).collect();
        let adjacent = central.windows(2).all(|w| w[1] == w[0] + 1);
        !adjacent || !(slopes.iter().all(|s| *s < 0.0) || slopes.iter().all(|s| *s > 0.0))
    };

    let data: Vec<_> = match window {
        FitWindow::Full => all,
        FitWindow::CentralHalfSwing => central.iter().map(|&i| all[i]).collect(),
    };
    if data.len() < 6 {
        return Err(Error::InvalidFitInput(format!(
            "only {} points in the fit window; refine the axis sampling",
            data.len()
        )));
    }

    let fit: FitResult = fit_nlls(arctan_model, &[mid, swing0, center0, width0], &data, &FitOptions::default())?;
    let p = &fit.parameters;
    let e = &fit.standard_errors;
    // (swing, width) and (−swing, −width) describe the same curve
    let (swing, width) = if p[3] < 0.0 { (-p[1], -p[3]) } else { (p[1], p[3]) };
    Ok(ArctanFitResult {
        center: p[2],
        width,
        swing,
        observed_swing,
        offset: p[0],
        center_error: e[2],
        width_error: e[3],
        swing_error: e[1],
        offset_error: e[0],
        residual_norm: fit.residual_norm,
        iterations: fit.iterations,
        points_used: data.len(),
        poorly_conditioned,
    })
}
