use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::bounds::Family;

use super::{Estimator, Ladder, WindowUpdate};

/// Outcome of a simulated estimation experiment.
///
/// Curves are indexed by `phi_grid`. Iterative runs leave the curves empty
/// and fill `iterative` instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub state: String,
    pub prior: String,
    pub estimator: Estimator,
    pub phi_grid: Vec<f64>,
    /// `⟨φ_est⟩_φ - φ`, errors taken on the interval centred at `φ`.
    pub bias_curve: Vec<f64>,
    pub rmse_local_curve: Vec<f64>,
    /// `∂⟨φ_est⟩_φ/∂φ` by finite differences along the grid.
    pub slope_curve: Vec<f64>,
    /// Local precision `P_φ`.
    pub precision_curve: Vec<f64>,
    /// Prior-averaged RMSE from draws with `φ` sampled from the prior.
    pub rmse_average: f64,
    /// Monte Carlo standard error of `rmse_average`.
    pub rmse_average_se: f64,
    /// `√(Σ ℘(φ_i) Δφ RMSE_φi²)` from the local curves, with its standard
    /// error. Absent for iterative runs.
    pub rmse_quadrature: Option<f64>,
    pub rmse_quadrature_se: Option<f64>,
    /// Plug-in mutual information between `φ` and the estimate.
    pub mutual_info_nats: f64,
    pub trials_per_phi: usize,
    pub average_trials: usize,
    pub total_resources_n: f64,
    pub seed: u64,
    pub iterative: Option<IterativeSummary>,
}

/// Extra figures for the bit-by-bit scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterativeSummary {
    pub family: Family,
    pub ladder: Ladder,
    pub window_update: WindowUpdate,
    pub m_bits: u32,
    pub copies: u32,
    /// `2π / 2^{m+1}`.
    pub target_resolution: f64,
    /// `π √(M / 3n)`.
    pub scaling_target: f64,
    /// `rmse_average / scaling_target`.
    pub resolution_ratio: f64,
    /// 95% bootstrap interval for `rmse_average`.
    pub rmse_ci95: (f64, f64),
    pub bootstrap_resamples: usize,
}

impl EstimationReport {
    /// Curves as CSV: `phi,bias,rmse_local,slope,precision`.
    pub fn write_curves_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "phi,bias,rmse_local,slope,precision")?;
        for i in 0..self.phi_grid.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.phi_grid[i], self.bias_curve[i], self.rmse_local_curve[i], self.slope_curve[i], self.precision_curve[i]
            )?;
        }
        Ok(())
    }
}
