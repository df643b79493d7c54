//! Damped Gauss–Newton (Levenberg–Marquardt) least squares.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Relative parameter step below which the iteration may stop.
    pub step_tolerance: f64,
    /// Relative cost change below which the iteration may stop.
    pub cost_tolerance: f64,
    pub initial_damping: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            step_tolerance: 1e-10,
            cost_tolerance: 1e-10,
            initial_damping: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub cost: f64,
    pub damping: f64,
    pub step_norm: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub parameters: Vec<f64>,
    pub covariance: DMatrix<f64>,
    pub standard_errors: Vec<f64>,
    /// Weighted sum of squared residuals.
    pub cost: f64,
    /// `sqrt(cost)`
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
}

/// A data point with an optional weight (`1/σ²`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataPoint {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
}

pub fn data_points(x: &[f64], y: &[f64], sigma: Option<&[f64]>) -> Result<Vec<DataPoint>> {
    if x.len() != y.len() {
        return Err(Error::InvalidFitInput(format!("{} abscissae for {} values", x.len(), y.len())));
    }
    if let Some(s) = sigma {
        if s.len() != x.len() {
            return Err(Error::InvalidFitInput(format!("{} uncertainties for {} values", s.len(), x.len())));
        }
        if s.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidFitInput("uncertainties must be finite and positive".into()));
        }
    }
    Ok((0..x.len())
        .map(|i| DataPoint {
            x: x[i],
            y: y[i],
            weight: sigma.map_or(1.0, |s| 1.0 / (s[i] * s[i])),
        })
        .collect())
}

/// Minimise `Σ wᵢ (yᵢ − f(xᵢ, p))²` from `initial`.
///
/// The Jacobian is taken by central differences. The covariance is
/// `(JᵀWJ)⁻¹`, scaled by the reduced χ² when every weight is 1 (the data then
/// carry no absolute uncertainty).
pub fn fit_nlls<F>(model: F, initial: &[f64], data: &[DataPoint], options: &FitOptions) -> Result<FitResult>
where
    F: Fn(f64, &[f64]) -> f64,
{
    let n = initial.len();
    let m = data.len();
    if n == 0 {
        return Err(Error::InvalidFitInput("no parameters".into()));
    }
    if m < n {
        return Err(Error::InvalidFitInput(format!("{m} points for {n} parameters")));
    }
    if data.iter().any(|d| !(d.x.is_finite() && d.y.is_finite() && d.weight.is_finite() && d.weight > 0.0)) {
        return Err(Error::InvalidFitInput("data must be finite with positive weights".into()));
    }
    if initial.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidFitInput("initial parameters must be finite".into()));
    }

    let sqrt_w: Vec<f64> = data.iter().map(|d| d.weight.sqrt()).collect();
    let residuals = |p: &[f64]| -> DVector<f64> {
        DVector::from_iterator(m, data.iter().zip(&sqrt_w).map(|(d, s)| s * (d.y - model(d.x, p))))
    };
    let jacobian = |p: &[f64]| -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(m, n);
        let mut probe = p.to_vec();
        for k in 0..n {
            let h = f64::EPSILON.cbrt() * p[k].abs().max(1.0);
            probe[k] = p[k] + h;
            let up = residuals(&probe);
            probe[k] = p[k] - h;
            let down = residuals(&probe);
            probe[k] = p[k];
            jac.set_column(k, &((up - down) / (2.0 * h)));
        }
        jac
    };
    let noise_floor = 1e-26 * data.iter().map(|d| d.weight * d.y * d.y).sum::<f64>().max(f64::MIN_POSITIVE);

    let mut params = initial.to_vec();
    let mut r = residuals(&params);
    let mut cost = r.norm_squared();
    if !cost.is_finite() {
        return Err(Error::InvalidFitInput("model is not finite at the initial parameters".into()));
    }
    let mut damping = options.initial_damping;
    let mut trace = Vec::new();
    let mut converged = cost == 0.0;
    let mut iterations = 0;

    while !converged && iterations < options.max_iterations {
        iterations += 1;
        let jac = jacobian(&params);
        let jtj = jac.transpose() * &jac;
        let gradient = jac.transpose() * &r;
        let max_diag = (0..n).map(|k| jtj[(k, k)]).fold(0.0, f64::max);
        if max_diag == 0.0 {
            return Err(Error::RankDeficient);
        }

        let mut augmented = jtj.clone();
        for k in 0..n {
            augmented[(k, k)] += damping * jtj[(k, k)].max(1e-12 * max_diag);
        }
        let Some(chol) = augmented.cholesky() else {
            damping *= 10.0;
            trace.push(IterationRecord {
                iteration: iterations,
                cost,
                damping,
                step_norm: 0.0,
                accepted: false,
            });
            continue;
        };
        let step = chol.solve(&(-gradient));
        let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
        let trial_r = residuals(&trial);
        let trial_cost = trial_r.norm_squared();

        let param_norm = params.iter().map(|p| p * p).sum::<f64>().sqrt();
        let relative_step = step.norm() / (param_norm + f64::EPSILON);
        let accepted = trial_cost.is_finite() && trial_cost <= cost;
        let relative_change = (cost - trial_cost).abs() / cost.max(f64::MIN_POSITIVE);
        trace.push(IterationRecord {
            iteration: iterations,
            cost: if accepted { trial_cost } else { cost },
            damping,
            step_norm: step.norm(),
            accepted,
        });

        if accepted {
            params = trial;
            r = trial_r;
            cost = trial_cost;
            damping = (damping / 10.0).max(1e-12);
        } else {
            damping *= 10.0;
        }
        let settled = relative_step < options.step_tolerance
            && (relative_change < options.cost_tolerance || cost <= noise_floor);
        converged = cost == 0.0 || settled;
    }

    if !converged {
        return Err(Error::NonConvergence { iterations, trace });
    }

    let jac = jacobian(&params);
    let jtj = jac.transpose() * &jac;
    let singular_values = jtj.clone().svd(false, false).singular_values;
    let largest = singular_values.max();
    let smallest = singular_values.min();
    if smallest.is_nan() || smallest <= 1e-13 * largest {
        return Err(Error::RankDeficient);
    }
    let inverse = jtj.cholesky().ok_or(Error::RankDeficient)?.inverse();
    let unit_weights = data.iter().all(|d| d.weight == 1.0);
    let scale = if unit_weights && m > n { cost / (m - n) as f64 } else { 1.0 };
    let covariance = inverse * scale;
    let standard_errors = (0..n).map(|k| covariance[(k, k)].max(0.0).sqrt()).collect();

    Ok(FitResult {
        parameters: params,
        covariance,
        standard_errors,
        cost,
        residual_norm: cost.sqrt(),
        iterations,
        converged,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exponential(x: f64, p: &[f64]) -> f64 {
        p[0] * (-p[1] * x).exp() + p[2]
    }

    #[test]
    fn recovers_exact_generating_parameters() {
        let truth = [2.5, 0.7, -0.3];
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = x.iter().map(|&x| exponential(x, &truth)).collect();
        let data = data_points(&x, &y, None).unwrap();
        let fit = fit_nlls(exponential, &[1.0, 1.5, 0.0], &data, &FitOptions::default()).unwrap();
        for (p, t) in fit.parameters.iter().zip(truth) {
            assert!(((p - t) / t).abs() < 1e-6, "{p} vs {t}");
        }
        assert!(fit.converged);
    }

    #[test]
    fn collinear_line_is_exact() {
        let data = data_points(&[1.0, 2.0, 4.0], &[3.0, 5.0, 9.0], None).unwrap();
        let fit = fit_nlls(|x, p| p[0] * x + p[1], &[0.0, 0.0], &data, &FitOptions::default()).unwrap();
        assert!((fit.parameters[0] - 2.0).abs() < 1e-10);
        assert!((fit.parameters[1] - 1.0).abs() < 1e-10);
        assert!(fit.residual_norm < 1e-9);
    }

    #[test]
    fn matches_brute_force_grid_minimum() {
        // y = a·x + a²·x², noisy; the single-parameter cost is scanned on a fine grid
        let x: Vec<f64> = (0..25).map(|i| -1.0 + i as f64 / 12.0).collect();
        let wiggle = [0.03, -0.02, 0.05, -0.04, 0.01];
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, &x)| 1.3 * x + 1.69 * x * x + wiggle[i % 5])
            .collect();
        let model = |x: f64, p: &[f64]| p[0] * x + p[0] * p[0] * x * x;
        let cost = |a: f64| x.iter().zip(&y).map(|(&x, &y)| (y - model(x, &[a])).powi(2)).sum::<f64>();
        let step = 1e-5;
        let best = (0..200_001)
            .map(|k| 0.5 + k as f64 * step)
            .min_by(|a, b| cost(*a).total_cmp(&cost(*b)))
            .unwrap();
        let data = data_points(&x, &y, None).unwrap();
        let fit = fit_nlls(model, &[1.0], &data, &FitOptions::default()).unwrap();
        assert!((fit.parameters[0] - best).abs() <= step);
    }

    #[test]
    fn accepted_costs_never_increase() {
        let truth = [2.5, 0.7, -0.3];
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, &x)| exponential(x, &truth) + 0.01 * ((i * 7 % 11) as f64 - 5.0))
            .collect();
        let data = data_points(&x, &y, None).unwrap();
        let fit = fit_nlls(exponential, &[5.0, 3.0, 1.0], &data, &FitOptions::default()).unwrap();
        let costs: Vec<f64> = fit.trace.iter().filter(|t| t.accepted).map(|t| t.cost).collect();
        assert!(costs.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn degenerate_parameters_are_rank_deficient() {
        let data = data_points(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.1], None).unwrap();
        let result = fit_nlls(|x, p| (p[0] + p[1]) * x, &[0.5, 0.5], &data, &FitOptions::default());
        assert!(matches!(result, Err(Error::RankDeficient)));
    }

    #[test]
    fn iteration_cap_reports_trace() {
        let x: Vec<f64> = (0..40).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = x.iter().map(|&x| exponential(x, &[2.5, 0.7, -0.3]) + 0.01 * x.sin()).collect();
        let data = data_points(&x, &y, None).unwrap();
        let options = FitOptions {
            max_iterations: 2,
            ..FitOptions::default()
        };
        match fit_nlls(exponential, &[1.0, 1.5, 0.0], &data, &options) {
            Err(Error::NonConvergence { iterations, trace }) => {
                assert_eq!(iterations, 2);
                assert_eq!(trace.len(), 2);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        let data = data_points(&[1.0], &[1.0], None).unwrap();
        assert!(fit_nlls(|x, p| p[0] * x + p[1], &[0.0, 0.0], &data, &FitOptions::default()).is_err());
        assert!(data_points(&[1.0, 2.0], &[1.0], None).is_err());
        assert!(data_points(&[1.0], &[1.0], Some(&[0.0])).is_err());
    }
}
