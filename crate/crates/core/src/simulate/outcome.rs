use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::circular::wrap_tau;
use crate::error::{Error, Result};
use crate::phasedist::{ecs_relative_density, grid_size, trig_sum_grid, AmplitudeVector, PhaseDistribution, PhaseSampler};
use crate::rng::RandomStream;
use crate::states::{IntegerDistribution, ProbeState};

const MAX_SAMPLING_GRID: usize = 1 << 22;

#[derive(Debug, Clone)]
enum Kind {
    Noon { n: u64 },
    Ecs { alpha: f64, fringe_scale: f64 },
    /// `(1/2π)|Σ_d b_d e^{idu}|²`
    Amplitudes { b: Vec<Complex64> },
}

/// Outcome statistics of the canonical phase measurement on a probe state.
///
/// The outcome `x ∈ [0, 2π)` has density `base(x - φ)` at phase shift `φ`:
///
/// - NOON: relative phase `θ₁ - θ₂`, `base(u) = (1 + cos nu)/2π`.
/// - ECS: relative phase, closed form with a peak at `u = 0` on a uniform
///   background.
/// - Coherent pair and single coherent state: canonical phase of the shifted
///   mode, read against the known phase of the reference beam.
#[derive(Debug, Clone)]
pub struct OutcomeModel {
    kind: Kind,
    fringe_order: u64,
    degree: usize,
    sampler: PhaseSampler,
}

impl OutcomeModel {
    pub fn new(state: &ProbeState) -> Result<Self> {
        state.validate()?;
        match state {
            ProbeState::Noon { n } => Ok(Self::build(Kind::Noon { n: *n }, *n, *n as usize)),
            ProbeState::Ecs { alpha } => Self::ecs_scaled(*alpha, 1.0),
            ProbeState::CoherentPair { alpha } | ProbeState::SingleCoherent { alpha } => {
                // only |a_m|² matters up to a common phase e^{i·offset·u},
                // so the amplitudes start at the first retained eigenvalue
                let p = IntegerDistribution::poisson(alpha * alpha)?;
                let b: Vec<Complex64> = p.probs().iter().map(|q| Complex64::new(q.sqrt(), 0.0)).collect();
                Ok(Self::from_coeffs(b))
            }
            ProbeState::Multicomponent { .. } => Err(Error::Unsupported(
                "single-shot measurement of a multicomponent probe; use the iterative scheme".into(),
            )),
        }
    }

    /// Canonical phase measurement of an arbitrary single-mode state, read
    /// against a known reference.
    pub fn from_amplitudes(amplitudes: &AmplitudeVector) -> Self {
        Self::from_coeffs(amplitudes.coeffs().to_vec())
    }

    fn from_coeffs(b: Vec<Complex64>) -> Self {
        let degree = b.len() - 1;
        Self::build(Kind::Amplitudes { b }, 1, degree)
    }

    /// ECS model whose fringe frequency is scaled by `fringe_scale`; `1.0` is
    /// the physical state.
    pub(crate) fn ecs_scaled(alpha: f64, fringe_scale: f64) -> Result<Self> {
        let degree = IntegerDistribution::poisson(alpha * alpha)?.max_eigenvalue() as usize;
        Ok(Self::build(Kind::Ecs { alpha, fringe_scale }, 1, degree))
    }

    fn build(kind: Kind, fringe_order: u64, degree: usize) -> Self {
        let j = sampling_grid(degree);
        let values: Vec<f64> = match &kind {
            Kind::Amplitudes { b } => {
                let conj: Vec<Complex64> = b.iter().map(|c| c.conj()).collect();
                trig_sum_grid(&conj, j).iter().map(|s| s.norm_sqr() / TAU).collect()
            }
            _ => (0..j).map(|i| base_density(&kind, TAU * i as f64 / j as f64)).collect(),
        };
        Self {
            sampler: PhaseSampler::from_values(&values),
            kind,
            fringe_order,
            degree,
        }
    }

    /// Number of fringes per 2π of the outcome density; estimates are only
    /// defined modulo `2π / fringe_order`.
    pub fn fringe_order(&self) -> u64 {
        self.fringe_order
    }

    /// Trigonometric degree of the density.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Density of `x - φ`.
    pub fn base_density(&self, u: f64) -> f64 {
        base_density(&self.kind, u)
    }

    /// Outcome density at `x` given shift `phi`.
    pub fn density(&self, x: f64, phi: f64) -> f64 {
        base_density(&self.kind, x - phi)
    }

    /// Outcome density tabulated on the standard grid.
    pub fn distribution(&self, phi: f64) -> Result<PhaseDistribution> {
        PhaseDistribution::from_fn(self.degree, |x| self.density(x, phi))
    }

    /// Grid used for sampling and for Fisher-information quadrature.
    pub fn sampling_grid_size(&self) -> usize {
        sampling_grid(self.degree)
    }

    /// One outcome in `[0, 2π)` at shift `phi`.
    #[inline]
    pub fn sample(&self, phi: f64, stream: &mut RandomStream) -> f64 {
        wrap_tau(self.sampler.sample(stream) + phi)
    }
}

fn sampling_grid(degree: usize) -> usize {
    let fine = (16 * (degree + 1)).next_power_of_two().min(MAX_SAMPLING_GRID);
    fine.max(grid_size(degree))
}

fn base_density(kind: &Kind, u: f64) -> f64 {
    match kind {
        Kind::Noon { n } => (1.0 + (*n as f64 * u).cos()) / TAU,
        Kind::Ecs { alpha, fringe_scale } => ecs_relative_density(*alpha, u, *fringe_scale),
        Kind::Amplitudes { b } => {
            let z = Complex64::from_polar(1.0, u);
            let s = b.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
            s.norm_sqr() / TAU
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasedist::{canonical_phase, ecs_relative_phase};

    #[test]
    fn ecs_model_matches_closed_form() {
        let m = OutcomeModel::new(&ProbeState::ecs(2.0).unwrap()).unwrap();
        let d = m.distribution(1.0).unwrap();
        let c = ecs_relative_phase(2.0, 1.0).unwrap();
        assert!(d.sup_distance(&c).unwrap() < 1e-14);
    }

    #[test]
    fn coherent_model_is_canonical_phase_read_backwards() {
        let m = OutcomeModel::new(&ProbeState::single_coherent(3.0).unwrap()).unwrap();
        let psi = AmplitudeVector::coherent(3.0).unwrap().phase_shifted(0.4);
        let c = canonical_phase(&psi).unwrap();
        for i in (0..c.len()).step_by(5) {
            let theta = c.theta(i);
            // mode phase θ corresponds to outcome x = -θ
            assert!((c.values()[i] - m.density(-theta, 0.4)).abs() < 1e-12);
        }
    }

    #[test]
    fn samples_follow_the_noon_fringes() {
        let m = OutcomeModel::new(&ProbeState::noon(3).unwrap()).unwrap();
        let mut s = RandomStream::new(2, 0);
        let n = 50_000;
        let phi = 0.9;
        let c: f64 = (0..n).map(|_| (3.0 * (m.sample(phi, &mut s) - phi)).cos()).sum::<f64>() / n as f64;
        // E[cos nu] = 1/2 under (1 + cos nu)/2π
        assert!((c - 0.5).abs() < 0.01, "{c}");
    }

    #[test]
    fn multicomponent_is_unsupported() {
        let s: ProbeState = "multi:[cohpair:alpha=1 x2]".parse().unwrap();
        assert!(matches!(OutcomeModel::new(&s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn large_coherent_amplitudes_are_cheap() {
        let m = OutcomeModel::new(&ProbeState::coherent_pair(300.0).unwrap()).unwrap();
        assert!(m.degree() < 10_000);
        let mut s = RandomStream::new(4, 0);
        let x: f64 = (0..2000).map(|_| crate::circular::wrap_pi(m.sample(0.0, &mut s)).powi(2)).sum::<f64>() / 2000.0;
        let expected = 1.0 / (4.0 * 300.0 * 300.0);
        assert!((x - expected).abs() / expected < 0.15, "{x}");
    }
}
