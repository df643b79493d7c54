//! Exact steady state of the driven, damped Jaynes–Cummings system on a
//! truncated photon-number basis.
//!
//! In the frame rotating at the probe frequency
//!
//! ```text
//! H = −Δpc a†a − Δpa σ†σ + g(a†σ + σ†a) + η(a + a†)
//! ```
//!
//! with collapse operators `√(2κ)·a` and `√(2γ)·σ` (κ and γ are amplitude
//! decay rates). Basis state `|n, s⟩` has index `2n + s`. For weak drive `⟨a⟩`
//! tends to the linear two-mode amplitude.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::closed_form_two_mode;

/// Relative change of the mean photon number accepted between two cutoffs.
pub const CUTOFF_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JCParams {
    pub g: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub delta_pa: f64,
    pub delta_pc: f64,
    pub eta: f64,
    /// Starting photon cutoff; raised until the photon number converges.
    pub cutoff: usize,
    pub max_cutoff: usize,
}

impl Default for JCParams {
    fn default() -> Self {
        Self {
            g: 16.0,
            gamma: 3.0,
            kappa: 1.5,
            delta_pa: 0.0,
            delta_pc: 0.0,
            eta: 0.015,
            cutoff: 4,
            max_cutoff: 24,
        }
    }
}

impl JCParams {
    pub fn validate(&self) -> Result<()> {
        let values = [self.g, self.gamma, self.kappa, self.delta_pa, self.delta_pc, self.eta];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidOracleParams("parameters must be finite".into()));
        }
        if self.gamma <= 0.0 || self.kappa <= 0.0 {
            return Err(Error::InvalidOracleParams("decay rates must be positive".into()));
        }
        if self.eta < 0.0 {
            return Err(Error::InvalidOracleParams("drive amplitude must be non-negative".into()));
        }
        if self.cutoff < 1 || self.max_cutoff <= self.cutoff {
            return Err(Error::InvalidOracleParams(format!(
                "need 1 ≤ cutoff ({}) < max_cutoff ({})",
                self.cutoff, self.max_cutoff
            )));
        }
        Ok(())
    }

    /// Amplitude predicted by the linear coupled-mode model.
    pub fn linear_field(&self) -> Complex64 {
        closed_form_two_mode(self.delta_pa, self.delta_pc, self.gamma, self.kappa, self.g, self.eta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityChecks {
    /// Largest entry of `|ρ − ρ†|`.
    pub hermiticity_error: f64,
    /// `|Tr ρ − 1|`
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityChecks {
    pub fn is_valid(&self) -> bool {
        self.hermiticity_error < 1e-10 && self.trace_error < 1e-12 && self.min_eigenvalue > -1e-10
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub field: Complex64,
    pub dipole: Complex64,
    pub photons: f64,
    pub g2_zero: f64,
    /// Cutoff of the reported solve.
    pub cutoff: usize,
    /// Relative change of the photon number from the previous cutoff.
    pub cutoff_delta: f64,
    pub checks: DensityChecks,
}

/// Steady-state density matrix at a fixed cutoff.
pub fn steady_state_density(params: &JCParams, cutoff: usize) -> Result<DMatrix<Complex64>> {
    let d = 2 * (cutoff + 1);
    let zero = Complex64::new(0.0, 0.0);
    let mut a = DMatrix::from_element(d, d, zero);
    let mut sigma = DMatrix::from_element(d, d, zero);
    for n in 0..=cutoff {
        for s in 0..2 {
            if n > 0 {
                a[(2 * (n - 1) + s, 2 * n + s)] = Complex64::new((n as f64).sqrt(), 0.0);
            }
        }
        sigma[(2 * n, 2 * n + 1)] = Complex64::new(1.0, 0.0);
    }
    let ad = a.adjoint();
    let sd = sigma.adjoint();
    let c = |x: f64| Complex64::new(x, 0.0);
    let h = (&ad * &a) * c(-params.delta_pc)
        + (&sd * &sigma) * c(-params.delta_pa)
        + (&ad * &sigma + &sd * &a) * c(params.g)
        + (&a + &ad) * c(params.eta);

    let identity = DMatrix::<Complex64>::identity(d, d);
    let i = Complex64::new(0.0, 1.0);
    // row-major vectorisation: vec(AρB) = (A ⊗ Bᵀ)·vec(ρ)
    let mut liouvillian = (h.kronecker(&identity) - identity.kronecker(&h.transpose())) * (-i);
    for (op, rate) in [(&a, 2.0 * params.kappa), (&sigma, 2.0 * params.gamma)] {
        let opd = op.adjoint();
        let n = &opd * op;
        liouvillian += (op.kronecker(&op.map(|z| z.conj())) - n.kronecker(&identity) * c(0.5)
            - identity.kronecker(&n.transpose()) * c(0.5))
            * c(rate);
    }
    // replace the first equation by the trace condition
    let dim = d * d;
    for col in 0..dim {
        liouvillian[(0, col)] = zero;
    }
    for k in 0..d {
        liouvillian[(0, k * d + k)] = c(1.0);
    }
    let mut rhs = nalgebra::DVector::from_element(dim, zero);
    rhs[0] = c(1.0);
    let solution = liouvillian
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidOracleParams("Liouvillian steady-state system is singular".into()))?;
    Ok(DMatrix::from_row_slice(d, d, solution.as_slice()))
}

pub fn density_checks(rho: &DMatrix<Complex64>) -> DensityChecks {
    let hermiticity_error = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let trace_error = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
    let hermitian = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let min_eigenvalue = hermitian.symmetric_eigenvalues().min();
    DensityChecks {
        hermiticity_error,
        trace_error,
        min_eigenvalue,
    }
}

struct Observables {
    field: Complex64,
    dipole: Complex64,
    photons: f64,
    pairs: f64,
}

fn observables(rho: &DMatrix<Complex64>) -> Observables {
    let d = rho.nrows();
    let cutoff = d / 2 - 1;
    let mut field = Complex64::new(0.0, 0.0);
    let mut dipole = Complex64::new(0.0, 0.0);
    let (mut photons, mut pairs) = (0.0, 0.0);
    for n in 0..=cutoff {
        for s in 0..2 {
            let k = 2 * n + s;
            let population = rho[(k, k)].re;
            photons += n as f64 * population;
            pairs += (n * n.saturating_sub(1)) as f64 * population;
            if n > 0 {
                // Tr(ρa) = Σ ρ_{k,k−2}·√n
                field += rho[(k, k - 2)] * (n as f64).sqrt();
            }
        }
        // Tr(ρσ) = Σ ρ_{(n,1),(n,0)}
        dipole += rho[(2 * n + 1, 2 * n)];
    }
    Observables {
        field,
        dipole,
        photons,
        pairs,
    }
}

/// Steady state with the cutoff raised until the mean photon number changes by
/// less than [`CUTOFF_TOLERANCE`] (relative) between consecutive cutoffs.
pub fn lindblad_steady_state(params: &JCParams) -> Result<OracleResult> {
    params.validate()?;
    let mut cutoff = params.cutoff;
    let mut previous = steady_state_density(params, cutoff)?;
    let mut previous_obs = observables(&previous);
    loop {
        let rho = steady_state_density(params, cutoff + 1)?;
        let obs = observables(&rho);
        let delta = if obs.photons == 0.0 && previous_obs.photons == 0.0 {
            0.0
        } else {
            (obs.photons - previous_obs.photons).abs() / obs.photons.abs().max(f64::MIN_POSITIVE)
        };
        if delta < CUTOFF_TOLERANCE {
            if obs.photons <= 0.0 {
                return Err(Error::UndefinedG2);
            }
            return Ok(OracleResult {
                field: obs.field,
                dipole: obs.dipole,
                photons: obs.photons,
                g2_zero: obs.pairs / (obs.photons * obs.photons),
                cutoff: cutoff + 1,
                cutoff_delta: delta,
                checks: density_checks(&rho),
            });
        }
        if cutoff + 1 >= params.max_cutoff {
            return Err(Error::CutoffNonConvergence {
                cutoff_low: cutoff,
                cutoff_high: cutoff + 1,
                photons_low: previous_obs.photons,
                photons_high: obs.photons,
            });
        }
        cutoff += 1;
        previous = rho;
        previous_obs = observables(&previous);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearLimitPoint {
    pub eta: f64,
    pub oracle_field: Complex64,
    pub linear_field: Complex64,
    /// `|⟨a⟩_oracle − ⟨a⟩_linear| / |⟨a⟩_linear|`
    pub deviation: f64,
    pub g2_zero: f64,
    pub cutoff: usize,
    pub checks: DensityChecks,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearLimitReport {
    pub base: JCParams,
    pub points: Vec<LinearLimitPoint>,
    /// Deviation never grows as η decreases (up to solver noise).
    pub monotone: bool,
    pub smallest_eta_deviation: f64,
    pub all_states_valid: bool,
}

/// Default drive ladder in units of κ.
pub const DEFAULT_ETA_OVER_KAPPA: [f64; 4] = [0.3, 0.1, 0.03, 0.01];

/// Compare the oracle with the linear model for each drive amplitude in
/// `etas`, which must be listed in descending order.
pub fn linear_limit_check(base: &JCParams, etas: &[f64]) -> Result<LinearLimitReport> {
    if etas.is_empty() {
        return Err(Error::InvalidOracleParams("no drive amplitudes given".into()));
    }
    if etas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidOracleParams("drive amplitudes must be strictly descending".into()));
    }
    let points = etas
        .par_iter()
        .map(|&eta| {
            let params = JCParams { eta, ..base.clone() };
            let result = lindblad_steady_state(&params)?;
            let linear = params.linear_field();
            let deviation = if linear.norm() == 0.0 {
                result.field.norm()
            } else {
                (result.field - linear).norm() / linear.norm()
            };
            Ok(LinearLimitPoint {
                eta,
                oracle_field: result.field,
                linear_field: linear,
                deviation,
                g2_zero: result.g2_zero,
                cutoff: result.cutoff,
                checks: result.checks,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = points
        .windows(2)
        .all(|w| w[1].deviation <= w[0].deviation * (1.0 + 1e-6) + 1e-12);
    Ok(LinearLimitReport {
        base: base.clone(),
        smallest_eta_deviation: points.last().map_or(f64::NAN, |p| p.deviation),
        all_states_valid: points.iter().all(|p| p.checks.is_valid()),
        monotone,
        points,
    })
}
