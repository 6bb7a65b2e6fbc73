//! Canonical phase distributions on a uniform grid over `[0, 2π)`.
//!
//! Relative-phase outcomes of two-mode states are reported as `θ₁ - θ₂`,
//! which places the peak of a phase-shifted ECS at `+φ`.

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::circular::{wrap_pi, wrap_tau};
use crate::error::{Error, Result};
use crate::oracle;
use crate::rng::RandomStream;
use crate::states::{generator_distribution, Generator, IntegerDistribution, ProbeState};

const DUST_MASS: f64 = 1e-10;
const NORM_TOL: f64 = 1e-9;

/// Grid size for a trig polynomial of the given degree: the next power of
/// two at or above `2·degree + 2`, and never below 512.
pub fn grid_size(degree: usize) -> usize {
    (2 * degree + 2).next_power_of_two().max(512)
}

/// Density samples at `θ_j = 2πj/J`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution {
    values: Vec<f64>,
    degree: usize,
}

impl PhaseDistribution {
    /// Wraps grid values, clamping negative round-off. Fails if the negative
    /// part or the normalisation error is more than round-off.
    pub fn new(mut values: Vec<f64>, degree: usize) -> Result<Self> {
        let j = values.len();
        if j < 2 * degree + 2 {
            return Err(Error::InvalidDistribution(format!("{j} grid points cannot resolve degree {degree}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite density value".into()));
        }
        let step = TAU / j as f64;
        let dust: f64 = values.iter().filter(|&&v| v < 0.0).map(|v| -v * step).sum();
        if dust >= DUST_MASS {
            return Err(Error::InvalidDistribution(format!("negative density mass {dust:e}")));
        }
        if dust > 0.0 {
            values.iter_mut().for_each(|v| *v = v.max(0.0));
        }
        let integral = values.iter().sum::<f64>() * step;
        if (integral - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(integral));
        }
        if dust > 0.0 {
            values.iter_mut().for_each(|v| *v /= integral);
        }
        Ok(Self { values, degree })
    }

    /// Tabulates `f` on the default grid for `degree`.
    pub fn from_fn(degree: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let j = grid_size(degree);
        let values = (0..j).map(|i| f(TAU * i as f64 / j as f64)).collect();
        Self::new(values, degree)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        TAU / self.values.len() as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.step()
    }

    /// Rectangle-rule integral, exact for trig polynomials the grid resolves.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.step()
    }

    /// Linear interpolation between grid points.
    pub fn density_at(&self, theta: f64) -> f64 {
        let j = self.values.len();
        let x = wrap_tau(theta) / self.step();
        let i = (x.floor() as usize).min(j - 1);
        let t = x - i as f64;
        self.values[i] * (1.0 - t) + self.values[(i + 1) % j] * t
    }

    /// Grid point of the highest density.
    pub fn argmax(&self) -> f64 {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        self.theta(i)
    }

    /// Direction of the first trigonometric moment, in `(-π, π]`.
    pub fn circular_mean(&self) -> f64 {
        let (s, c) = self
            .values
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(s, c), (i, &v)| {
                let t = self.theta(i);
                (s + v * t.sin(), c + v * t.cos())
            });
        s.atan2(c)
    }

    /// `∫ wrap(θ - center)² p(θ) dθ` with deviations on `(-π, π]`.
    pub fn variance_about(&self, center: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| v * wrap_pi(self.theta(i) - center).powi(2))
            .sum::<f64>()
            * self.step()
    }

    /// Total-variation distance `½∫|p - q|` to a density evaluated on this
    /// grid.
    pub fn total_variation_to(&self, q: impl Fn(f64) -> f64) -> f64 {
        0.5 * self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v - q(self.theta(i))).abs())
            .sum::<f64>()
            * self.step()
    }

    /// Largest pointwise difference; the grids must match.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::InvalidParameter(format!(
                "grid sizes differ: {} vs {}",
                self.values.len(),
                other.values.len()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// CSV with a `theta,density` header and 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "theta,density")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.11e},{:.11e}", self.theta(i), v)?;
        }
        Ok(())
    }
}

/// Single-mode Fock amplitudes `⟨m|ψ⟩`, `m = 0, 1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    coeffs: Vec<Complex64>,
}

impl AmplitudeVector {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if coeffs.is_empty() || !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Coherent state `|α⟩` for real `α ≥ 0`: square roots of the truncated
    /// Poisson PMF, which stays accurate where `e^{-α²/2}` underflows.
    pub fn coherent(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidState(format!("coherent amplitude {alpha}")));
        }
        let p = IntegerDistribution::poisson(alpha * alpha)?;
        let mut c = vec![Complex64::new(0.0, 0.0); p.offset() as usize];
        c.extend(p.probs().iter().map(|q| Complex64::new(q.sqrt(), 0.0)));
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `e^{-iNφ}|ψ⟩`.
    pub fn phase_shifted(&self, phi: f64) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c * Complex64::from_polar(1.0, -(m as f64) * phi))
                .collect(),
        }
    }
}

/// `Σ_d c_d e^{-i d θ_j}` at `θ_j = 2πj/J` for `j = 0..J`, by FFT.
pub(crate) fn trig_sum_grid(coeffs: &[Complex64], j: usize) -> Vec<Complex64> {
    assert!(coeffs.len() <= j, "grid too coarse for the coefficients");
    let mut buf = vec![Complex64::new(0.0, 0.0); j];
    buf[..coeffs.len()].copy_from_slice(coeffs);
    FftPlanner::new().plan_fft_forward(j).process(&mut buf);
    buf
}

/// `p(θ) = (1/2π)|Σ_m c_m e^{-imθ}|²` on the grid for degree `L - 1`.
pub fn canonical_phase(amplitudes: &AmplitudeVector) -> Result<PhaseDistribution> {
    let c = amplitudes.coeffs();
    let degree = c.len() - 1;
    let values = trig_sum_grid(c, grid_size(degree))
        .iter()
        .map(|s| s.norm_sqr() / TAU)
        .collect();
    PhaseDistribution::new(values, degree)
}

/// Trig degree needed for the ECS relative-phase density.
fn ecs_degree(alpha: f64) -> Result<usize> {
    Ok(IntegerDistribution::poisson(alpha * alpha)?.max_eigenvalue() as usize)
}

/// ECS relative-phase density
/// `[1 + e^{-α²(1 - cos u)} cos(α² sin u)] / (2π(1 + e^{-α²}))`, `u = x - φ`.
pub fn ecs_relative_phase(alpha: f64, phi: f64) -> Result<PhaseDistribution> {
    ecs_relative_phase_scaled(alpha, phi, 1.0)
}

pub(crate) fn ecs_relative_density(alpha: f64, u: f64, fringe_scale: f64) -> f64 {
    let a2 = alpha * alpha;
    let fringe = (-a2 * (1.0 - u.cos())).exp() * (fringe_scale * a2 * u.sin()).cos();
    (1.0 + fringe) / (TAU * (1.0 + (-a2).exp()))
}

/// Closed form with the fringe frequency scaled; `1.0` is the true density.
/// Other values deliberately break it (used to test the verifier).
pub(crate) fn ecs_relative_phase_scaled(alpha: f64, phi: f64, fringe_scale: f64) -> Result<PhaseDistribution> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidState(format!("ECS amplitude {alpha}")));
    }
    let degree = ecs_degree(alpha)?;
    let j = grid_size(degree);
    let mut values: Vec<f64> = (0..j)
        .map(|i| ecs_relative_density(alpha, TAU * i as f64 / j as f64 - phi, fringe_scale))
        .collect();
    if fringe_scale != 1.0 {
        let integral = values.iter().sum::<f64>() * TAU / j as f64;
        values.iter_mut().for_each(|v| *v /= integral);
    }
    PhaseDistribution::new(values, degree)
}

/// Two-mode amplitudes `c[m1][m2]` in a square Fock box.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeAmplitudes {
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl TwoModeAmplitudes {
    /// `coeffs` is row-major in `m1` with stride `cutoff + 1`.
    pub fn new(cutoff: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != (cutoff + 1) * (cutoff + 1) {
            return Err(Error::InvalidParameter(format!("{} amplitudes for cutoff {cutoff}", coeffs.len())));
        }
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { cutoff, coeffs })
    }

    pub fn ecs(alpha: f64) -> Result<Self> {
        let cutoff = oracle::fock_cutoff(alpha);
        let c = oracle::ecs_fock_amplitudes(alpha, cutoff);
        Self::new(cutoff, c.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `e^{-iN₂φ}` applied to the second mode.
    pub fn phase_shifted(&self, phi: f64) -> Self {
        let stride = self.cutoff + 1;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(1.0, -((k % stride) as f64) * phi))
            .collect();
        Self {
            cutoff: self.cutoff,
            coeffs,
        }
    }

    /// Density of `x = θ₁ - θ₂` under joint canonical phase measurement.
    ///
    /// Integrating the joint density over the common phase leaves
    /// `p(x) = (1/2π) Σ_N |Σ_{m1+m2=N} c_{m1,m2} e^{-i m1 x}|²`.
    pub fn relative_phase(&self) -> Result<PhaseDistribution> {
        let stride = self.cutoff + 1;
        let j = grid_size(self.cutoff);
        let mut values = vec![0.0; j];
        let rot: Vec<Complex64> = (0..j).map(|i| Complex64::from_polar(1.0, -TAU * i as f64 / j as f64)).collect();
        for total in 0..=2 * self.cutoff {
            let lo = total.saturating_sub(self.cutoff);
            let hi = total.min(self.cutoff);
            let terms: Vec<(usize, Complex64)> = (lo..=hi)
                .map(|m1| (m1, self.coeffs[m1 * stride + (total - m1)]))
                .filter(|(_, c)| c.norm_sqr() > 0.0)
                .collect();
            if terms.is_empty() {
                continue;
            }
            for (i, v) in values.iter_mut().enumerate() {
                let s: Complex64 = terms.iter().map(|&(m1, c)| c * rot[i].powu(m1 as u32)).sum();
                *v += s.norm_sqr() / TAU;
            }
        }
        PhaseDistribution::new(values, self.cutoff)
    }
}

/// Largest amplitude accepted by [`relative_phase_bruteforce`].
pub const BRUTEFORCE_MAX_ALPHA: f64 = 6.0;

/// ECS relative-phase density built from truncated Fock amplitudes rather
/// than the closed form. Slow; for cross-checks only.
pub fn relative_phase_bruteforce(alpha: f64, phi: f64) -> Result<PhaseDistribution> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidState(format!("ECS amplitude {alpha}")));
    }
    if alpha > BRUTEFORCE_MAX_ALPHA {
        return Err(Error::InvalidParameter(format!(
            "brute-force construction is limited to alpha <= {BRUTEFORCE_MAX_ALPHA}"
        )));
    }
    TwoModeAmplitudes::ecs(alpha)?.phase_shifted(phi).relative_phase()
}

/// `|⟨ψ|e^{-iGφ}|ψ⟩|²` from the generator PMF.
///
/// Eigenvalues are centred on the mean before taking the characteristic
/// function so that `1 - overlap` keeps full relative precision at small φ.
pub fn overlap(state: &ProbeState, generator: Generator, phi: f64) -> Result<f64> {
    Ok(overlap_from_pmf(&generator_distribution(state, generator)?, phi))
}

pub fn overlap_from_pmf(dist: &IntegerDistribution, phi: f64) -> f64 {
    1.0 - overlap_loss(dist, phi)
}

/// `1 - overlap`, computed without cancellation.
pub fn overlap_loss(dist: &IntegerDistribution, phi: f64) -> f64 {
    let mu = dist.mean();
    let s: f64 = dist.probs().iter().sum();
    let (a, b) = dist.support().fold((0.0, 0.0), |(a, b), (m, p)| {
        let x = (m as f64 - mu) * phi;
        // 1 - cos x = 2 sin²(x/2)
        (a + p * 2.0 * (0.5 * x).sin().powi(2), b + p * x.sin())
    });
    let (a, b) = (a / s, b / s);
    (2.0 * a - a * a - b * b).clamp(0.0, 1.0)
}

/// Inverse-CDF sampler over a [`PhaseDistribution`]: trapezoid masses per
/// grid cell, uniform within a cell.
#[derive(Debug, Clone)]
pub struct PhaseSampler {
    cdf: Vec<f64>,
    step: f64,
}

impl PhaseSampler {
    pub fn new(dist: &PhaseDistribution) -> Self {
        Self::from_values(dist.values())
    }

    /// Sampler over non-negative values on a uniform periodic grid.
    pub(crate) fn from_values(v: &[f64]) -> Self {
        let j = v.len();
        let mut cdf = Vec::with_capacity(j);
        let mut acc = 0.0;
        for i in 0..j {
            acc += 0.5 * (v[i] + v[(i + 1) % j]);
            cdf.push(acc);
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Self {
            cdf,
            step: TAU / j as f64,
        }
    }

    /// One draw in `[0, 2π)`.
    #[inline]
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        let u = stream.uniform();
        let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        let lo = if i == 0 { 0.0 } else { self.cdf[i - 1] };
        let width = self.cdf[i] - lo;
        let frac = if width > 0.0 { ((u - lo) / width).clamp(0.0, 1.0) } else { 0.5 };
        wrap_tau((i as f64 + frac) * self.step)
    }
}

/// One draw from `dist`. Builds a [`PhaseSampler`] each call; reuse a
/// sampler when drawing repeatedly.
pub fn sample_phase(dist: &PhaseDistribution, stream: &mut RandomStream) -> f64 {
    PhaseSampler::new(dist).sample(stream)
}

/// Antipodal background level of the ECS relative-phase density.
pub fn ecs_background_level(alpha: f64) -> f64 {
    ecs_relative_density(alpha, PI, 1.0)
}
