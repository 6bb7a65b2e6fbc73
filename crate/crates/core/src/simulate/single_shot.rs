use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circular::wrap_pi;
use crate::error::{Error, Result};
use crate::infotheory::{mutual_information, JointHistogram, PriorDistribution};
use crate::rng::RandomStream;
use crate::states::{mean_total_photons, ProbeState};

use super::{EstimationReport, OutcomeModel, TAG_AVERAGE, TAG_LOCAL};

/// Fewest trials per grid point accepted by [`run_single_shot`].
pub const MIN_TRIALS: usize = 1000;

const CHUNK: usize = 1 << 14;

/// Map from a raw outcome to a phase estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    /// The measured phase itself.
    Canonical,
    /// The outcome unwrapped onto the fringe containing `reference`:
    /// `reference + wrap(k(x - reference))/k` for fringe order `k`.
    FringeResolved { reference: f64 },
    /// Ignores the data.
    Constant { value: f64 },
}

impl Estimator {
    #[inline]
    pub fn estimate(&self, raw: f64, fringe_order: u64) -> f64 {
        match *self {
            Estimator::Canonical => raw,
            Estimator::FringeResolved { reference } => {
                let k = fringe_order.max(1) as f64;
                reference + wrap_pi(k * (raw - reference)) / k
            }
            Estimator::Constant { value } => value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleShotConfig {
    /// Draws per grid point; the prior-averaged pass uses
    /// `trials × phi_grid` draws.
    pub trials: usize,
    pub phi_grid: usize,
    /// Bins per axis of the mutual-information histogram.
    pub bins: usize,
    pub seed: u64,
    pub estimator: Estimator,
}

impl Default for SingleShotConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            phi_grid: 64,
            bins: 64,
            seed: 0,
            estimator: Estimator::Canonical,
        }
    }
}

/// Single-shot experiment with the default grid, bins and raw estimator.
pub fn run_single_shot(
    state: &ProbeState,
    prior: &PriorDistribution,
    trials: usize,
    phi_grid: usize,
    seed: u64,
) -> Result<EstimationReport> {
    let config = SingleShotConfig {
        trials,
        phi_grid,
        seed,
        ..SingleShotConfig::default()
    };
    run_single_shot_with(state, prior, &config)
}

struct LocalStats {
    mean_err: f64,
    mean_sq: f64,
    mean_quartic: f64,
}

/// One canonical-phase measurement per trial, estimated without using the
/// prior.
///
/// Two passes share the same model:
///
/// - local: `trials` draws at each grid point, errors wrapped about the true
///   `φ`, giving bias, `RMSE_φ`, slope and precision curves;
/// - average: `φ` drawn from the prior for every draw, giving the averaged
///   RMSE and the joint histogram for mutual information.
pub fn run_single_shot_with(
    state: &ProbeState,
    prior: &PriorDistribution,
    config: &SingleShotConfig,
) -> Result<EstimationReport> {
    prior.validate()?;
    if config.trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "{} trials per grid point; at least {MIN_TRIALS} are needed",
            config.trials
        )));
    }
    if config.phi_grid == 0 || config.bins < 2 {
        return Err(Error::InvalidParameter("need at least one grid point and two histogram bins".into()));
    }
    let model = OutcomeModel::new(state)?;
    let k = model.fringe_order();
    let estimator = config.estimator;

    let (lo, width) = prior.support();
    let grid: Vec<f64> = if width > 0.0 {
        (0..config.phi_grid)
            .map(|i| lo + (i as f64 + 0.5) * width / config.phi_grid as f64)
            .collect()
    } else {
        vec![lo]
    };

    let trials = config.trials;
    let local: Vec<LocalStats> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &phi)| {
            let mut stream = RandomStream::tagged(config.seed, TAG_LOCAL, i as u64);
            let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
            for _ in 0..trials {
                let e = wrap_pi(estimator.estimate(model.sample(phi, &mut stream), k) - phi);
                let e2 = e * e;
                s1 += e;
                s2 += e2;
                s4 += e2 * e2;
            }
            let t = trials as f64;
            LocalStats {
                mean_err: s1 / t,
                mean_sq: s2 / t,
                mean_quartic: s4 / t,
            }
        })
        .collect();

    let bias: Vec<f64> = local.iter().map(|s| s.mean_err).collect();
    let rmse_local: Vec<f64> = local.iter().map(|s| s.mean_sq.sqrt()).collect();
    let slope = slope_curve(&grid, &bias, width >= TAU);
    let precision: Vec<f64> = grid
        .iter()
        .zip(&local)
        .zip(&slope)
        .map(|((&phi, s), &sl)| local_precision(phi, sl, s.mean_err, s.mean_sq))
        .collect();

    let weights: Vec<f64> = {
        let raw: Vec<f64> = match prior {
            PriorDistribution::Tabulated { .. } => grid.iter().map(|&p| prior.density(p)).collect(),
            _ => vec![1.0; grid.len()],
        };
        let total: f64 = raw.iter().sum();
        raw.iter().map(|w| w / total).collect()
    };
    let mse_q: f64 = weights.iter().zip(&local).map(|(w, s)| w * s.mean_sq).sum();
    let mse_q_var: f64 = weights
        .iter()
        .zip(&local)
        .map(|(w, s)| w * w * (s.mean_quartic - s.mean_sq * s.mean_sq) / trials as f64)
        .sum();
    let rmse_quadrature = mse_q.sqrt();

    let total = trials * grid.len().max(config.phi_grid);
    let center = lo + width / 2.0;
    let bins = config.bins;
    let n_chunks = total.div_ceil(CHUNK);
    let partials: Vec<(f64, f64, JointHistogram)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut stream = RandomStream::tagged(config.seed, TAG_AVERAGE, c as u64);
            let draws = CHUNK.min(total - c * CHUNK);
            let mut hist = JointHistogram::new(bins, bins);
            let (mut s2, mut s4) = (0.0, 0.0);
            for _ in 0..draws {
                let phi = prior.sample(&mut stream);
                let est = estimator.estimate(model.sample(phi, &mut stream), k);
                let e = wrap_pi(est - phi);
                s2 += e * e;
                s4 += e * e * e * e;
                let pb = if width > 0.0 { bin((phi - lo) / width, bins) } else { 0 };
                let eb = bin((wrap_pi(est - center) + PI) / TAU, bins);
                hist.add(pb, eb);
            }
            (s2, s4, hist)
        })
        .collect();
    let mut hist = JointHistogram::new(bins, bins);
    let (mut s2, mut s4) = (0.0, 0.0);
    for (a, b, h) in &partials {
        s2 += a;
        s4 += b;
        hist.merge(h);
    }
    let n = total as f64;
    let mse = s2 / n;
    let rmse_average = mse.sqrt();
    let mse_se = ((s4 / n - mse * mse).max(0.0) / n).sqrt();

    Ok(EstimationReport {
        state: state.to_string(),
        prior: prior.to_string(),
        estimator,
        phi_grid: grid,
        bias_curve: bias,
        rmse_local_curve: rmse_local,
        slope_curve: slope,
        precision_curve: precision,
        rmse_average,
        rmse_average_se: se_of_root(mse_se, rmse_average),
        rmse_quadrature: Some(rmse_quadrature),
        rmse_quadrature_se: Some(se_of_root(mse_q_var.sqrt(), rmse_quadrature)),
        mutual_info_nats: mutual_information(&hist),
        trials_per_phi: trials,
        average_trials: total,
        total_resources_n: mean_total_photons(state)?,
        seed: config.seed,
        iterative: None,
    })
}

#[inline]
fn bin(frac: f64, bins: usize) -> usize {
    ((frac * bins as f64).floor().max(0.0) as usize).min(bins - 1)
}

// delta method: se(√x) = se(x) / (2√x)
fn se_of_root(se: f64, root: f64) -> f64 {
    if root > 0.0 {
        se / (2.0 * root)
    } else {
        0.0
    }
}

/// `∂⟨φ_est⟩/∂φ = 1 + ∂bias/∂φ` by finite differences: central inside the
/// grid, wrapping around for a full-circle grid and one-sided at the ends
/// otherwise.
fn slope_curve(grid: &[f64], bias: &[f64], periodic: bool) -> Vec<f64> {
    let g = grid.len();
    if g < 2 {
        return vec![f64::NAN; g];
    }
    let h = grid[1] - grid[0];
    (0..g)
        .map(|i| {
            let d = if periodic {
                (bias[(i + 1) % g] - bias[(i + g - 1) % g]) / (2.0 * h)
            } else if i == 0 {
                (bias[1] - bias[0]) / h
            } else if i == g - 1 {
                (bias[g - 1] - bias[g - 2]) / h
            } else {
                (bias[i + 1] - bias[i - 1]) / (2.0 * h)
            };
            1.0 + d
        })
        .collect()
}

/// `P_φ = √E[(φ_est/|s| - φ)²]` with `φ_est = φ + e`.
fn local_precision(phi: f64, slope: f64, mean_err: f64, mean_sq: f64) -> f64 {
    let inv = 1.0 / slope.abs();
    let a = inv - 1.0;
    (phi * phi * a * a + 2.0 * phi * a * mean_err * inv + mean_sq * inv * inv)
        .max(0.0)
        .sqrt()
}
