//! Entropies, priors over the phase shift, and plug-in mutual information.
//!
//! All logarithms are natural, so entropies are in nats and `e^H` of a
//! uniform prior of width `W` is `W` itself.

use std::f64::consts::{E, LN_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circular::wrap_tau;
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::states::IntegerDistribution;
use crate::syntax::{parse_error, split_kind, Params};

/// Prior density `℘(φ)` of the phase shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriorDistribution {
    /// Uniform on `[center - width/2, center + width/2)`, taken mod 2π.
    Uniform { center: f64, width: f64 },
    /// Phase known exactly. Its differential entropy is `-∞`.
    Delta { phi0: f64 },
    /// Density samples on `θ_j = 2πj/J`, normalised so the periodic
    /// trapezoid rule integrates to one.
    Tabulated { values: Vec<f64> },
}

impl PriorDistribution {
    /// Uniform over the whole circle.
    pub fn full() -> Self {
        PriorDistribution::Uniform { center: PI, width: TAU }
    }

    pub fn uniform(center: f64, width: f64) -> Result<Self> {
        let p = PriorDistribution::Uniform { center, width };
        p.validate()?;
        Ok(p)
    }

    pub fn delta(phi0: f64) -> Result<Self> {
        let p = PriorDistribution::Delta { phi0 };
        p.validate()?;
        Ok(p)
    }

    /// Tabulated prior; the values are rescaled to unit integral.
    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidPrior("tabulated density needs at least two finite non-negative values".into()));
        }
        let integral = values.iter().sum::<f64>() * TAU / values.len() as f64;
        if integral <= 0.0 {
            return Err(Error::InvalidPrior("tabulated density has zero mass".into()));
        }
        let p = PriorDistribution::Tabulated {
            values: values.iter().map(|v| v / integral).collect(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PriorDistribution::Uniform { center, width } => {
                if !center.is_finite() || !(width.is_finite() && *width > 0.0 && *width <= TAU * (1.0 + 1e-12)) {
                    return Err(Error::InvalidPrior(format!("uniform prior needs finite center and width in (0, 2π], got width {width}")));
                }
            }
            PriorDistribution::Delta { phi0 } => {
                if !phi0.is_finite() {
                    return Err(Error::InvalidPrior("delta prior location must be finite".into()));
                }
            }
            PriorDistribution::Tabulated { values } => {
                let integral = values.iter().sum::<f64>() * TAU / values.len().max(1) as f64;
                if values.len() < 2 || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || (integral - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidPrior(format!("tabulated density integrates to {integral}")));
                }
            }
        }
        Ok(())
    }

    /// Density at `phi` (mod 2π). The delta prior reports zero everywhere.
    pub fn density(&self, phi: f64) -> f64 {
        match self {
            PriorDistribution::Uniform { center, width } => {
                if *width >= TAU || wrap_tau(phi - center + width / 2.0) < *width {
                    1.0 / width
                } else {
                    0.0
                }
            }
            PriorDistribution::Delta { .. } => 0.0,
            PriorDistribution::Tabulated { values } => {
                let j = values.len();
                let x = wrap_tau(phi) / TAU * j as f64;
                let i = (x.floor() as usize).min(j - 1);
                let t = x - i as f64;
                values[i] * (1.0 - t) + values[(i + 1) % j] * t
            }
        }
    }

    /// Interval `(start, width)` outside which the density vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            PriorDistribution::Uniform { center, width } => (center - width / 2.0, *width),
            PriorDistribution::Delta { phi0 } => (*phi0, 0.0),
            PriorDistribution::Tabulated { .. } => (0.0, TAU),
        }
    }

    /// Draw one phase shift.
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        match self {
            PriorDistribution::Uniform { center, width } => center - width / 2.0 + width * stream.uniform(),
            PriorDistribution::Delta { phi0 } => *phi0,
            PriorDistribution::Tabulated { values } => {
                // cell masses from the trapezoid rule, uniform within a cell
                let j = values.len();
                let cells: Vec<f64> = (0..j).map(|i| 0.5 * (values[i] + values[(i + 1) % j])).collect();
                let total: f64 = cells.iter().sum();
                let mut u = stream.uniform() * total;
                for (i, &c) in cells.iter().enumerate() {
                    if u < c {
                        return (i as f64 + u / c) * TAU / j as f64;
                    }
                    u -= c;
                }
                TAU * (1.0 - 0.5 / j as f64)
            }
        }
    }
}

impl Default for PriorDistribution {
    fn default() -> Self {
        Self::full()
    }
}

impl fmt::Display for PriorDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriorDistribution::Uniform { center, width } => write!(f, "uniform:center={center},width={width}"),
            PriorDistribution::Delta { phi0 } => write!(f, "delta:phi0={phi0}"),
            PriorDistribution::Tabulated { values } => write!(f, "tabulated:points={}", values.len()),
        }
    }
}

impl FromStr for PriorDistribution {
    type Err = Error;

    /// Parses `uniform`, `uniform:width=W`, `uniform:center=c,width=W` and
    /// `delta:phi0=x`. A uniform prior without `center` is centred on π.
    fn from_str(input: &str) -> Result<Self> {
        let (kind, rest) = split_kind(input);
        let mut params = Params::parse(input, rest)?;
        let prior = match kind.to_ascii_lowercase().as_str() {
            "uniform" => {
                let width = params.f64("width")?.unwrap_or(TAU);
                let center = params.f64("center")?.unwrap_or(PI);
                PriorDistribution::Uniform { center, width }
            }
            "delta" => PriorDistribution::Delta {
                phi0: params.required_f64("phi0")?,
            },
            _ => return Err(parse_error(input, format!("unknown prior kind {kind:?}"))),
        };
        params.finish()?;
        prior.validate()?;
        Ok(prior)
    }
}

/// Counts of `(φ bin, estimate bin)` pairs, row-major by φ bin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointHistogram {
    bins_phi: usize,
    bins_est: usize,
    counts: Vec<u64>,
    total: u64,
}

impl JointHistogram {
    pub fn new(bins_phi: usize, bins_est: usize) -> Self {
        assert!(bins_phi > 0 && bins_est > 0, "histogram needs at least one bin per axis");
        Self {
            bins_phi,
            bins_est,
            counts: vec![0; bins_phi * bins_est],
            total: 0,
        }
    }

    pub fn from_counts(bins_phi: usize, bins_est: usize, counts: Vec<u64>) -> Result<Self> {
        if bins_phi == 0 || bins_est == 0 || counts.len() != bins_phi * bins_est {
            return Err(Error::InvalidParameter(format!(
                "{} counts do not fill a {bins_phi}x{bins_est} histogram",
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        Ok(Self {
            bins_phi,
            bins_est,
            counts,
            total,
        })
    }

    pub fn add(&mut self, phi_bin: usize, est_bin: usize) {
        self.counts[phi_bin * self.bins_est + est_bin] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        assert_eq!((self.bins_phi, self.bins_est), (other.bins_phi, other.bins_est));
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn bins_phi(&self) -> usize {
        self.bins_phi
    }

    pub fn bins_est(&self) -> usize {
        self.bins_est
    }

    pub fn count(&self, phi_bin: usize, est_bin: usize) -> u64 {
        self.counts[phi_bin * self.bins_est + est_bin]
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// `-Σ p ln p` in nats, with `0 ln 0 = 0`.
///
/// Mass dropped by truncation is ignored; for a truncation mass `t` the
/// error is at most about `60 t` nats.
pub fn shannon_entropy(dist: &IntegerDistribution) -> f64 {
    dist.probs().iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// Differential entropy of the prior. A delta prior gives `-∞`, so that
/// `e^{H}` vanishes.
pub fn prior_entropy(prior: &PriorDistribution) -> f64 {
    match prior {
        PriorDistribution::Uniform { width, .. } => width.ln(),
        PriorDistribution::Delta { .. } => f64::NEG_INFINITY,
        PriorDistribution::Tabulated { values } => {
            let dx = TAU / values.len() as f64;
            values.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln() * dx).sum()
        }
    }
}

/// Plug-in estimate of the mutual information of a joint histogram.
/// Histograms with a single occupied row or column give exactly zero.
pub fn mutual_information(hist: &JointHistogram) -> f64 {
    if hist.total == 0 {
        return 0.0;
    }
    let mut rows = vec![0u64; hist.bins_phi];
    let mut cols = vec![0u64; hist.bins_est];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, col) in cols.iter_mut().enumerate() {
            let c = hist.count(i, j);
            *row += c;
            *col += c;
        }
    }
    if rows.iter().filter(|&&r| r > 0).count() <= 1 || cols.iter().filter(|&&c| c > 0).count() <= 1 {
        return 0.0;
    }
    let t = hist.total as f64;
    let mut mi = 0.0;
    for (i, &row) in rows.iter().enumerate() {
        for (j, &col) in cols.iter().enumerate() {
            let c = hist.count(i, j);
            if c > 0 {
                let c = c as f64;
                mi += c / t * (c * t / (row as f64 * col as f64)).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Entropy of a Gaussian of variance `v + 1/12`, the largest entropy an
/// integer-valued distribution of variance `v` can have (to this order).
pub fn max_entropy_bound(variance: f64) -> f64 {
    0.5 * (2.0 * PI * E * (variance + 1.0 / 12.0)).ln()
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{generator_distribution, Generator, ProbeState};
    use proptest::prelude::*;

    #[test]
    fn two_point_entropy() {
        let d = IntegerDistribution::new(0, vec![0.5, 0.5], 0.0).unwrap();
        assert!((shannon_entropy(&d) - LN_2).abs() < 1e-15);
    }

    // log-space Poisson terms summed directly over a generous range
    fn poisson_entropy_oracle(lambda: f64) -> f64 {
        let mut h = 0.0;
        let mut ln_fact = 0.0;
        for m in 0..2000 {
            if m > 0 {
                ln_fact += (m as f64).ln();
            }
            let ln_p = -lambda + m as f64 * lambda.ln() - ln_fact;
            h -= ln_p.exp() * ln_p;
        }
        h
    }

    #[test]
    fn poisson_entropy_near_gaussian() {
        let p = IntegerDistribution::poisson(100.0).unwrap();
        let h = shannon_entropy(&p);
        assert!((h - poisson_entropy_oracle(100.0)).abs() < 1e-11);
        let gauss = 0.5 * (2.0 * PI * E * 100.0).ln();
        assert!((h - gauss).abs() / gauss < 0.01, "{h} vs {gauss}");
    }

    #[test]
    fn ecs_entropy_half_gaussian_plus_bit() {
        let d = generator_distribution(&ProbeState::ecs(10.0).unwrap(), Generator::N2).unwrap();
        let h = shannon_entropy(&d);
        let approx = 0.25 * (2.0 * PI * E * 100.0).ln() + LN_2;
        assert!((h - approx).abs() / approx < 0.02, "{h} vs {approx}");
    }

    #[test]
    fn prior_entropies() {
        assert!((prior_entropy(&PriorDistribution::full()) - TAU.ln()).abs() < 1e-15);
        assert!((prior_entropy(&PriorDistribution::full()) - 1.8379).abs() < 1e-4);
        assert_eq!(prior_entropy(&PriorDistribution::delta(1.0).unwrap()), f64::NEG_INFINITY);
        assert_eq!(prior_entropy(&PriorDistribution::delta(1.0).unwrap()).exp(), 0.0);
        let narrow = PriorDistribution::uniform(0.0, PI / 8.0).unwrap();
        assert!((prior_entropy(&narrow) + 0.9348).abs() < 1e-4);
        let flat = PriorDistribution::tabulated(vec![3.0; 64]).unwrap();
        assert!((prior_entropy(&flat) - TAU.ln()).abs() < 1e-12);
    }

    #[test]
    fn prior_parsing() {
        assert_eq!("uniform".parse::<PriorDistribution>().unwrap(), PriorDistribution::full());
        let p: PriorDistribution = "uniform:center=0,width=0.75".parse().unwrap();
        assert_eq!(p, PriorDistribution::Uniform { center: 0.0, width: 0.75 });
        let d: PriorDistribution = "delta:phi0=1.0".parse().unwrap();
        assert_eq!(d, PriorDistribution::Delta { phi0: 1.0 });
        for bad in ["uniform:width=7", "uniform:width=0", "delta", "gauss:sigma=1", "uniform:width=1,foo=2"] {
            assert!(bad.parse::<PriorDistribution>().is_err(), "{bad}");
        }
        let round: PriorDistribution = p.to_string().parse().unwrap();
        assert_eq!(round, p);
    }

    #[test]
    fn uniform_density_and_sampling() {
        let p = PriorDistribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(p.density(0.4), 1.0);
        assert_eq!(p.density(TAU - 0.4), 1.0);
        assert_eq!(p.density(1.0), 0.0);
        let mut s = RandomStream::new(3, 0);
        for _ in 0..1000 {
            let x = p.sample(&mut s);
            assert!((-0.5..0.5).contains(&x));
        }
    }

    #[test]
    fn tabulated_sampling_follows_density() {
        let values: Vec<f64> = (0..128).map(|j| 1.0 + (TAU * j as f64 / 128.0).cos()).collect();
        let p = PriorDistribution::tabulated(values).unwrap();
        let mut s = RandomStream::new(5, 0);
        let n = 40_000;
        let mean_cos: f64 = (0..n).map(|_| p.sample(&mut s).cos()).sum::<f64>() / n as f64;
        // E[cos] = 1/2 for density (1 + cos)/2π
        assert!((mean_cos - 0.5).abs() < 0.02, "{mean_cos}");
    }

    #[test]
    fn mutual_information_extremes() {
        let ind = JointHistogram::from_counts(16, 16, vec![7; 256]).unwrap();
        assert_eq!(mutual_information(&ind), 0.0);
        let mut diag = JointHistogram::new(8, 8);
        for i in 0..8 {
            for _ in 0..5 {
                diag.add(i, i);
            }
        }
        assert!((mutual_information(&diag) - 8f64.ln()).abs() < 1e-12);
        let mut single = JointHistogram::new(4, 4);
        single.add(2, 1);
        single.add(2, 3);
        assert_eq!(mutual_information(&single), 0.0);
        assert_eq!(mutual_information(&JointHistogram::new(3, 3)), 0.0);
    }

    #[test]
    fn max_entropy_values() {
        assert!((max_entropy_bound(0.0) - 0.1765).abs() < 1e-4);
        let direct = 0.5 * (2.0 * PI * E * (100.0 + 1.0 / 12.0)).ln();
        assert_eq!(max_entropy_bound(100.0), direct);
        assert!((nats_to_bits(LN_2) - 1.0).abs() < 1e-15);
    }

    fn any_state() -> impl Strategy<Value = ProbeState> {
        prop_oneof![
            (1u64..60).prop_map(|n| ProbeState::Noon { n }),
            (0.01f64..8.0).prop_map(|alpha| ProbeState::Ecs { alpha }),
            (0.01f64..8.0).prop_map(|alpha| ProbeState::CoherentPair { alpha }),
            (0.01f64..8.0).prop_map(|alpha| ProbeState::SingleCoherent { alpha }),
        ]
    }

    proptest! {
        #[test]
        fn entropy_below_max_entropy(state in any_state(), total in any::<bool>()) {
            let g = if total { Generator::NTotal } else { Generator::N2 };
            let d = generator_distribution(&state, g).unwrap();
            let h = shannon_entropy(&d);
            prop_assert!(h >= 0.0);
            prop_assert!(h <= max_entropy_bound(d.variance()) + 1e-12);
        }

        #[test]
        fn entropy_invariant_under_relabelling(alpha in 0.05f64..3.0, k in 2u32..4) {
            let d = generator_distribution(&ProbeState::SingleCoherent { alpha }, Generator::N2).unwrap();
            let r = d.relabel_power(k, 1_000_000).unwrap();
            prop_assert!((shannon_entropy(&d) - shannon_entropy(&r)).abs() < 1e-14);
        }

        #[test]
        fn mutual_information_is_bounded(
            bp in 1usize..6,
            be in 1usize..6,
            seed in any::<u64>(),
        ) {
            let mut s = RandomStream::new(seed, 0);
            let counts: Vec<u64> = (0..bp * be).map(|_| s.index(5) as u64).collect();
            let h = JointHistogram::from_counts(bp, be, counts).unwrap();
            let mi = mutual_information(&h);
            prop_assert!(mi >= 0.0);
            prop_assert!(mi <= (bp.min(be) as f64).ln() + 1e-12);
        }
    }
}
