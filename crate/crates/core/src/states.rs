//! Probe states and the distributions of their phase-shift generators.
//!
//! Every supported probe state is pure and built from two-mode (or
//! single-mode) Fock and coherent components, so the statistics that the
//! bounds need reduce to a probability mass function over the integer
//! eigenvalues of the generator.
//!
//! Two generators are supported and the caller always picks one:
//!
//! - [`Generator::N2`]: photon number of the second (phase-shifted) mode of
//!   each component, the interferometric setting for a single ECS or NOON
//!   state.
//! - [`Generator::NTotal`]: total photon number of every mode, used when a
//!   multicomponent probe is treated as one resource.
//!
//! Nonlinear generators `N^k` share the PMF of `N` with relabelled support,
//! see [`GeneratorOptions::power`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{parse_error, split_kind, Params};

/// Smallest accepted ECS amplitude. Below it the state degenerates to a
/// two-mode vacuum-like superposition with vanishing photon number.
pub const MIN_ECS_ALPHA: f64 = 1e-3;

/// Default largest generator eigenvalue a distribution may carry.
pub const DEFAULT_EIGENVALUE_CEILING: u64 = 1_000_000;

/// Relative tail mass discarded when truncating a Poisson PMF.
pub const POISSON_TAIL_TOL: f64 = 1e-15;

/// Largest truncation mass an [`IntegerDistribution`] may record.
pub const MAX_TRUNCATION_MASS: f64 = 1e-9;

const NORMALIZATION_TOL: f64 = 1e-12;

// per-side tail trimmed after each convolution step of a multicomponent state
const CONVOLUTION_TRIM: f64 = 1e-17;

/// Probability mass function over consecutive integer eigenvalues
/// `offset, offset + 1, ...`.
///
/// `truncation_mass` is an upper bound on the probability dropped by tail
/// cutoffs; `sum(probs) + truncation_mass` equals one to within `1e-12`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegerDistribution {
    offset: i64,
    probs: Vec<f64>,
    truncation_mass: f64,
}

impl IntegerDistribution {
    pub fn new(offset: i64, probs: Vec<f64>, truncation_mass: f64) -> Result<Self> {
        let d = Self {
            offset,
            probs,
            truncation_mass,
        };
        d.check()?;
        Ok(d)
    }

    fn check(&self) -> Result<()> {
        if self.probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some(p) = self.probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("probability {p} is not a finite non-negative number")));
        }
        if !(0.0..=MAX_TRUNCATION_MASS).contains(&self.truncation_mass) {
            return Err(Error::InvalidDistribution(format!(
                "truncation mass {} outside [0, {MAX_TRUNCATION_MASS}]",
                self.truncation_mass
            )));
        }
        let total = self.probs.iter().sum::<f64>() + self.truncation_mass;
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("total mass {total} differs from 1")));
        }
        Ok(())
    }

    pub fn point_mass(m: i64) -> Self {
        Self {
            offset: m,
            probs: vec![1.0],
            truncation_mass: 0.0,
        }
    }

    /// Poisson PMF with mean `lambda`, truncated on both sides once the
    /// discarded relative mass falls below [`POISSON_TAIL_TOL`].
    ///
    /// Terms are generated by the ratio recurrence outward from the mode and
    /// normalised at the end, so no factorials or gamma functions are
    /// evaluated and nothing underflows for large means.
    pub fn poisson(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("Poisson mean {lambda} must be finite and non-negative")));
        }
        if lambda == 0.0 {
            return Ok(Self::point_mass(0));
        }
        let tol = POISSON_TAIL_TOL;
        let mode = lambda.floor() as usize;

        let mut right = vec![1.0_f64];
        let mut sum = 1.0;
        let mut k = mode;
        let right_tail = loop {
            if (k + 1) as f64 > lambda {
                let r = lambda / (k + 1) as f64;
                let bound = right[right.len() - 1] * r / (1.0 - r);
                if bound < tol * sum {
                    break bound;
                }
            }
            let next = right[right.len() - 1] * lambda / (k + 1) as f64;
            right.push(next);
            sum += next;
            k += 1;
        };

        let mut left = Vec::new();
        let mut k = mode;
        let mut w = 1.0;
        let left_tail = loop {
            if k == 0 {
                break 0.0;
            }
            let r = k as f64 / lambda;
            if r < 1.0 {
                let bound = w * r / (1.0 - r);
                if bound < tol * sum {
                    break bound;
                }
            }
            w *= r;
            left.push(w);
            sum += w;
            k -= 1;
        };

        let truncation = (left_tail + right_tail) / sum;
        let scale = (1.0 - truncation) / sum;
        let offset = (mode - left.len()) as i64;
        let probs: Vec<f64> = left.iter().rev().chain(right.iter()).map(|w| w * scale).collect();
        Self::new(offset, probs, truncation)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn max_eigenvalue(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    /// Probability of eigenvalue `m` (zero outside the stored support).
    pub fn prob(&self, m: i64) -> f64 {
        usize::try_from(m - self.offset)
            .ok()
            .and_then(|i| self.probs.get(i).copied())
            .unwrap_or(0.0)
    }

    /// `(eigenvalue, probability)` pairs over the stored support.
    pub fn support(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.offset + i as i64, p))
    }

    /// Mean, conditioned on the retained support.
    pub fn mean(&self) -> f64 {
        let (s, m1) = self
            .probs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(s, m1), (i, &p)| (s + p, m1 + i as f64 * p));
        self.offset as f64 + m1 / s
    }

    /// Variance, two-pass around the mean.
    pub fn variance(&self) -> f64 {
        let s: f64 = self.probs.iter().sum();
        let mu = self.mean() - self.offset as f64;
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| p * (i as f64 - mu).powi(2))
            .sum::<f64>()
            / s
    }

    /// Distribution of the sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &Self, ceiling: u64) -> Result<Self> {
        let max = self.max_eigenvalue() + other.max_eigenvalue();
        if max > ceiling as i64 {
            return Err(Error::EigenvalueCeiling {
                max: max as u64,
                ceiling,
            });
        }
        let mut probs = vec![0.0; self.probs.len() + other.probs.len() - 1];
        for (i, &a) in self.probs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.probs.iter().enumerate() {
                probs[i + j] += a * b;
            }
        }
        let t = self.truncation_mass + other.truncation_mass - self.truncation_mass * other.truncation_mass;
        Ok(Self {
            offset: self.offset + other.offset,
            probs,
            truncation_mass: t,
        })
    }

    /// Drop leading and trailing entries whose cumulative mass stays below
    /// `eps` per side, moving it into the truncation mass.
    fn trim_tails(&mut self, eps: f64) {
        let mut lo = 0;
        let mut acc = 0.0;
        while lo + 1 < self.probs.len() && acc + self.probs[lo] < eps {
            acc += self.probs[lo];
            lo += 1;
        }
        let mut hi = self.probs.len();
        let mut acc_hi = 0.0;
        while hi > lo + 1 && acc_hi + self.probs[hi - 1] < eps {
            acc_hi += self.probs[hi - 1];
            hi -= 1;
        }
        if lo > 0 || hi < self.probs.len() {
            self.probs.truncate(hi);
            self.probs.drain(..lo);
            self.offset += lo as i64;
            self.truncation_mass += acc + acc_hi;
        }
    }

    /// Relabel eigenvalues `m -> m^k`, the PMF of the generator `G^k`.
    /// Entropy is unchanged; the variance is not.
    pub fn relabel_power(&self, k: u32, ceiling: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("generator power must be at least 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        if self.offset < 0 {
            return Err(Error::InvalidParameter("power relabelling needs non-negative eigenvalues".into()));
        }
        let top = (self.max_eigenvalue() as u64)
            .checked_pow(k)
            .filter(|&t| t <= ceiling)
            .ok_or(Error::EigenvalueCeiling {
                max: u64::MAX,
                ceiling,
            })?;
        let base = (self.offset as u64).pow(k);
        let mut probs = vec![0.0; (top - base + 1) as usize];
        for (m, p) in self.support() {
            probs[((m as u64).pow(k) - base) as usize] = p;
        }
        Ok(Self {
            offset: base as i64,
            probs,
            truncation_mass: self.truncation_mass,
        })
    }
}

/// Phase-shift generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Photon number of the second mode of every component.
    N2,
    /// Total photon number over all modes.
    NTotal,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::N2 => "n2",
            Generator::NTotal => "ntotal",
        })
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n2" => Ok(Generator::N2),
            "ntotal" | "n" => Ok(Generator::NTotal),
            _ => Err(parse_error(s, "expected n2 or ntotal")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorOptions {
    /// Use `G^power` instead of `G`.
    pub power: u32,
    pub eigenvalue_ceiling: u64,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        Self {
            power: 1,
            eigenvalue_ceiling: DEFAULT_EIGENVALUE_CEILING,
        }
    }
}

/// A pure probe state.
///
/// Two-mode states put the phase shift on mode 2:
///
/// - `Noon`: `(|n,0⟩ + |0,n⟩)/√2`
/// - `Ecs`: `(|α,0⟩ + |0,α⟩)/√(2(1+e^{-α²}))`
/// - `CoherentPair`: `|α⟩|α⟩`
/// - `SingleCoherent`: `|α⟩` on one mode, which is also "mode 2"
/// - `Multicomponent`: tensor product of `copies` of each part
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeState {
    Noon { n: u64 },
    Ecs { alpha: f64 },
    CoherentPair { alpha: f64 },
    SingleCoherent { alpha: f64 },
    Multicomponent { parts: Vec<Component> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub state: ProbeState,
    pub copies: u32,
}

fn check_alpha(alpha: f64, min: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= min && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidState(format!("amplitude {alpha} must be finite and at least {min}")))
    }
}

impl ProbeState {
    pub fn noon(n: u64) -> Result<Self> {
        let s = ProbeState::Noon { n };
        s.validate()?;
        Ok(s)
    }

    pub fn ecs(alpha: f64) -> Result<Self> {
        let s = ProbeState::Ecs { alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn coherent_pair(alpha: f64) -> Result<Self> {
        let s = ProbeState::CoherentPair { alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn single_coherent(alpha: f64) -> Result<Self> {
        let s = ProbeState::SingleCoherent { alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn multicomponent(parts: Vec<Component>) -> Result<Self> {
        let s = ProbeState::Multicomponent { parts };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProbeState::Noon { n } if *n == 0 => Err(Error::InvalidState("NOON photon number must be at least 1".into())),
            ProbeState::Noon { .. } => Ok(()),
            ProbeState::Ecs { alpha } => check_alpha(*alpha, MIN_ECS_ALPHA),
            ProbeState::CoherentPair { alpha } | ProbeState::SingleCoherent { alpha } => check_alpha(*alpha, 0.0),
            ProbeState::Multicomponent { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidState("multicomponent state needs at least one part".into()));
                }
                for part in parts {
                    if part.copies == 0 {
                        return Err(Error::InvalidState("component copies must be at least 1".into()));
                    }
                    if matches!(part.state, ProbeState::Multicomponent { .. }) {
                        return Err(Error::InvalidState("multicomponent states cannot be nested".into()));
                    }
                    part.state.validate()?;
                }
                Ok(())
            }
        }
    }
}

/// Generator PMF with default options (power 1, ceiling 10⁶).
pub fn generator_distribution(state: &ProbeState, generator: Generator) -> Result<IntegerDistribution> {
    generator_distribution_with(state, generator, &GeneratorOptions::default())
}

pub fn generator_distribution_with(
    state: &ProbeState,
    generator: Generator,
    options: &GeneratorOptions,
) -> Result<IntegerDistribution> {
    state.validate()?;
    let base = base_distribution(state, generator, options.eigenvalue_ceiling)?;
    if base.max_eigenvalue() > options.eigenvalue_ceiling as i64 {
        return Err(Error::EigenvalueCeiling {
            max: base.max_eigenvalue() as u64,
            ceiling: options.eigenvalue_ceiling,
        });
    }
    base.relabel_power(options.power, options.eigenvalue_ceiling)
}

fn base_distribution(state: &ProbeState, generator: Generator, ceiling: u64) -> Result<IntegerDistribution> {
    match (state, generator) {
        (ProbeState::Noon { n }, Generator::N2) => {
            if *n > ceiling {
                return Err(Error::EigenvalueCeiling { max: *n, ceiling });
            }
            let mut probs = vec![0.0; *n as usize + 1];
            probs[0] = 0.5;
            probs[*n as usize] = 0.5;
            IntegerDistribution::new(0, probs, 0.0)
        }
        (ProbeState::Noon { n }, Generator::NTotal) => Ok(IntegerDistribution::point_mass(*n as i64)),
        (ProbeState::Ecs { alpha }, g) => ecs_distribution(*alpha, g),
        (ProbeState::CoherentPair { alpha }, Generator::N2) | (ProbeState::SingleCoherent { alpha }, _) => {
            IntegerDistribution::poisson(alpha * alpha)
        }
        (ProbeState::CoherentPair { alpha }, Generator::NTotal) => IntegerDistribution::poisson(2.0 * alpha * alpha),
        (ProbeState::Multicomponent { parts }, g) => {
            let mut acc = IntegerDistribution::point_mass(0);
            for part in parts {
                let d = base_distribution(&part.state, g, ceiling)?;
                for _ in 0..part.copies {
                    acc = acc.convolve(&d, ceiling)?;
                    acc.trim_tails(CONVOLUTION_TRIM);
                }
            }
            Ok(acc)
        }
    }
}

/// ECS generator PMF from the Poisson PMF `p̃` of a single coherent mode:
///
/// - `N2`: `p_m = (p̃_m + δ_{m0}(1 + 2p̃_0)) / (2(1 + e^{-α²}))`
/// - `NTotal`: `p_m = (p̃_m + δ_{m0} p̃_0) / (1 + e^{-α²})`
///
/// The Fock states `|m,0⟩` and `|0,m⟩` are orthogonal for `m > 0`; the
/// vacuum amplitudes of the two branches add coherently.
fn ecs_distribution(alpha: f64, generator: Generator) -> Result<IntegerDistribution> {
    let a2 = alpha * alpha;
    let vacuum = (-a2).exp();
    let poisson = IntegerDistribution::poisson(a2)?;
    let (norm, extra) = match generator {
        Generator::N2 => (2.0 * (1.0 + vacuum), 1.0 + 2.0 * vacuum),
        Generator::NTotal => (1.0 + vacuum, vacuum),
    };
    let top = poisson.max_eigenvalue() as usize;
    let mut probs = vec![0.0; top + 1];
    for (m, p) in poisson.support() {
        probs[m as usize] = p / norm;
    }
    probs[0] += extra / norm;
    IntegerDistribution::new(0, probs, poisson.truncation_mass() / norm)
}

/// Total mean photon number `⟨N_1 + N_2⟩` over all modes.
pub fn mean_total_photons(state: &ProbeState) -> Result<f64> {
    state.validate()?;
    Ok(match state {
        ProbeState::Noon { n } => *n as f64,
        ProbeState::Ecs { alpha } => {
            let a2 = alpha * alpha;
            a2 / (1.0 + (-a2).exp())
        }
        ProbeState::CoherentPair { alpha } => 2.0 * alpha * alpha,
        ProbeState::SingleCoherent { alpha } => alpha * alpha,
        ProbeState::Multicomponent { parts } => parts
            .iter()
            .map(|p| mean_total_photons(&p.state).map(|n| n * f64::from(p.copies)))
            .sum::<Result<f64>>()?,
    })
}

/// `(ΔG)²`. Single components use the exact PMF; multicomponent states add
/// component variances.
pub fn generator_variance(state: &ProbeState, generator: Generator) -> Result<f64> {
    state.validate()?;
    match state {
        ProbeState::Multicomponent { parts } => parts
            .iter()
            .map(|p| generator_variance(&p.state, generator).map(|v| v * f64::from(p.copies)))
            .sum(),
        _ => Ok(generator_distribution(state, generator)?.variance()),
    }
}

impl fmt::Display for ProbeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeState::Noon { n } => write!(f, "noon:n={n}"),
            ProbeState::Ecs { alpha } => write!(f, "ecs:alpha={alpha}"),
            ProbeState::CoherentPair { alpha } => write!(f, "cohpair:alpha={alpha}"),
            ProbeState::SingleCoherent { alpha } => write!(f, "single:alpha={alpha}"),
            ProbeState::Multicomponent { parts } => {
                f.write_str("multi:[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{} x{}", p.state, p.copies)?;
                }
                f.write_str("]")
            }
        }
    }
}

impl FromStr for ProbeState {
    type Err = Error;

    /// Parses `noon:n=5`, `ecs:alpha=2.0`, `cohpair:alpha=2.0`,
    /// `single:alpha=1.5` and `multi:[cohpair:alpha=0.5 x4, noon:n=2 x8]`.
    fn from_str(input: &str) -> Result<Self> {
        let (kind, rest) = split_kind(input);
        let state = match kind.to_ascii_lowercase().as_str() {
            "multi" => {
                let inner = rest
                    .strip_prefix('[')
                    .and_then(|r| r.strip_suffix(']'))
                    .ok_or_else(|| parse_error(input, "expected multi:[part xK, ...]"))?;
                let parts = inner
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|item| parse_component(input, item))
                    .collect::<Result<Vec<_>>>()?;
                ProbeState::Multicomponent { parts }
            }
            k @ ("noon" | "ecs" | "cohpair" | "single") => {
                let mut params = Params::parse(input, rest)?;
                let s = if k == "noon" {
                    ProbeState::Noon {
                        n: params.required_u64("n")?,
                    }
                } else {
                    let alpha = params.required_f64("alpha")?;
                    match k {
                        "ecs" => ProbeState::Ecs { alpha },
                        "cohpair" => ProbeState::CoherentPair { alpha },
                        _ => ProbeState::SingleCoherent { alpha },
                    }
                };
                params.finish()?;
                s
            }
            _ => return Err(parse_error(input, format!("unknown state kind {kind:?}"))),
        };
        state.validate()?;
        Ok(state)
    }
}

fn parse_component(input: &str, item: &str) -> Result<Component> {
    let (spec, copies) = match item.rsplit_once(char::is_whitespace) {
        Some((spec, last)) if last.starts_with('x') => {
            let copies = last[1..]
                .parse::<u32>()
                .map_err(|_| parse_error(input, format!("bad copy count {last:?}")))?;
            (spec.trim(), copies)
        }
        _ => (item, 1),
    };
    if spec.starts_with("multi") {
        return Err(Error::InvalidState("multicomponent states cannot be nested".into()));
    }
    Ok(Component {
        state: spec.parse()?,
        copies,
    })
}
