use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circular::wrap_pi;
use crate::error::{Error, Result};
use crate::states::ProbeState;

use super::{Estimator, OutcomeModel};

// quadrature cells per half fringe
const CELLS_PER_HALF_FRINGE: usize = 64;
const GAUSS_NODES: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GAUSS_WEIGHTS: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lo..=self.hi).contains(&x)
    }
}

/// Interval centre and fringe order the estimate is unwrapped with. The raw
/// estimator is read on the interval centred at `phi0`.
fn unwrapping(estimator: Estimator, fringe_order: u64, phi0: f64) -> Option<(f64, u64)> {
    match estimator {
        Estimator::Canonical => Some((phi0, 1)),
        Estimator::FringeResolved { reference } => Some((reference, fringe_order.max(1))),
        Estimator::Constant { .. } => None,
    }
}

/// `⟨φ_est⟩_φ` by quadrature over the outcome density.
///
/// The estimate jumps at fringe boundaries, so the integration cells are
/// aligned with them and each cell uses 4-point Gauss-Legendre.
pub fn mean_estimate(model: &OutcomeModel, estimator: Estimator, phi0: f64, phi: f64) -> f64 {
    let Some((reference, k)) = unwrapping(estimator, model.fringe_order(), phi0) else {
        return estimator.estimate(0.0, 1);
    };
    let kf = k as f64;
    let cells = 2 * k as usize * CELLS_PER_HALF_FRINGE;
    let h = 2.0 * PI / cells as f64;
    let start = reference - PI;
    let mut acc = 0.0;
    for c in 0..cells {
        let mid = start + (c as f64 + 0.5) * h;
        for (t, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
            let x = mid + 0.5 * h * t;
            let est = reference + wrap_pi(kf * (x - reference)) / kf;
            acc += w * 0.5 * h * est * model.density(x, phi);
        }
    }
    acc
}

/// Largest interval around `phi0` on which `|∂⟨φ_est⟩/∂φ - 1| ≤ tolerance`,
/// for the estimate unwrapped onto the fringe at `phi0`. `None` when the
/// condition already fails at `phi0`.
pub fn locally_unbiased_region(state: &ProbeState, phi0: f64, tolerance: f64) -> Result<Option<Interval>> {
    let model = OutcomeModel::new(state)?;
    locally_unbiased_region_with(&model, Estimator::FringeResolved { reference: phi0 }, phi0, tolerance)
}

pub fn locally_unbiased_region_with(
    model: &OutcomeModel,
    estimator: Estimator,
    phi0: f64,
    tolerance: f64,
) -> Result<Option<Interval>> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tolerance} must be positive")));
    }
    let k = unwrapping(estimator, model.fringe_order(), phi0).map_or(1, |(_, k)| k) as f64;
    let h = 1e-3 / k;
    let ok = |phi: f64| {
        let s = (mean_estimate(model, estimator, phi0, phi + h) - mean_estimate(model, estimator, phi0, phi - h)) / (2.0 * h);
        (s - 1.0).abs() <= tolerance
    };
    if !ok(phi0) {
        return Ok(None);
    }
    let step = PI / (64.0 * k);
    let edge = |dir: f64| {
        let mut t = 0.0;
        loop {
            let next = t + step;
            if next >= PI {
                return PI;
            }
            if !ok(phi0 + dir * next) {
                let (mut good, mut bad) = (t, next);
                while bad - good > 1e-10 {
                    let mid = 0.5 * (good + bad);
                    if ok(phi0 + dir * mid) {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
                return good;
            }
            t = next;
        }
    };
    Ok(Some(Interval {
        lo: phi0 - edge(-1.0),
        hi: phi0 + edge(1.0),
    }))
}
