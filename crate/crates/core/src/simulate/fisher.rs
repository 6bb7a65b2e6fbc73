use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::states::ProbeState;

use super::OutcomeModel;

pub const MIN_FISHER_DELTA: f64 = 1e-4;
pub const MAX_FISHER_DELTA: f64 = 1e-2;

// points where the outcome density is below this are skipped
const DENSITY_FLOOR: f64 = 1e-14;

/// Classical Fisher information of the canonical phase outcome at `phi`.
///
/// `∂p/∂φ` is a central difference with step `delta`; the integral over
/// outcomes is the rectangle rule on the model's sampling grid.
pub fn fisher_information(state: &ProbeState, phi: f64, delta: f64) -> Result<f64> {
    fisher_information_of(&OutcomeModel::new(state)?, phi, delta)
}

pub fn fisher_information_of(model: &OutcomeModel, phi: f64, delta: f64) -> Result<f64> {
    if !(MIN_FISHER_DELTA..=MAX_FISHER_DELTA).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step {delta} outside [{MIN_FISHER_DELTA}, {MAX_FISHER_DELTA}]"
        )));
    }
    let j = model.sampling_grid_size();
    let w = TAU / j as f64;
    let mut f = 0.0;
    for i in 0..j {
        let x = w * i as f64;
        let p = model.density(x, phi);
        if p < DENSITY_FLOOR {
            continue;
        }
        let dp = (model.density(x, phi + delta) - model.density(x, phi - delta)) / (2.0 * delta);
        f += w * dp * dp / p;
    }
    Ok(f)
}
