//! Closed-form lower bounds on phase-estimation error.
//!
//! Degenerate inputs (a generator with zero spread, zero Fisher information)
//! give `f64::INFINITY` rather than an error, so parameter sweeps that touch
//! such points still complete.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infotheory::shannon_entropy;
use crate::states::{generator_distribution, mean_total_photons, Generator, ProbeState, MIN_ECS_ALPHA};

/// `RMSE_φ ≥ 1/(2ΔG)` for locally unbiased estimates.
pub fn helstrom_holevo_bound(delta_g: f64) -> f64 {
    if delta_g > 0.0 {
        0.5 / delta_g
    } else {
        f64::INFINITY
    }
}

/// `√(b² + (∂⟨φ_est⟩/∂φ)² / (4ΔG²))` for an estimate with bias `b`.
pub fn helstrom_biased_bound(bias: f64, bias_slope: f64, delta_g: f64) -> f64 {
    if delta_g > 0.0 {
        (bias * bias + bias_slope * bias_slope / (4.0 * delta_g * delta_g)).sqrt()
    } else if bias_slope == 0.0 {
        bias.abs()
    } else {
        f64::INFINITY
    }
}

/// `(2πe)^{-1/2} e^{H(φ)} e^{-H(G)}`. A prior entropy of `-∞` gives zero.
pub fn entropic_bound(prior_entropy: f64, entropy_g: f64) -> f64 {
    (prior_entropy - entropy_g).exp() / (2.0 * PI * E).sqrt()
}

/// `1/√(2πe[(ΔG)² + 1/12])`, at the normalisation of a uniform prior over
/// the full circle.
pub fn variance_entropic_bound(delta_g: f64) -> f64 {
    1.0 / (2.0 * PI * E * (delta_g * delta_g + 1.0 / 12.0)).sqrt()
}

/// `e^{H(φ)} / (√(2πe³)(⟨N⟩ + 1))`, which holds for any generator `N^k`.
pub fn nonlinear_heisenberg_bound(mean_n: f64, prior_entropy: f64) -> f64 {
    prior_entropy.exp() / ((2.0 * PI * E.powi(3)).sqrt() * (mean_n + 1.0))
}

/// `1/√F`.
pub fn cramer_rao_from_fisher(fisher: f64) -> f64 {
    if fisher > 0.0 {
        1.0 / fisher.sqrt()
    } else {
        f64::INFINITY
    }
}

/// Probe families compared across photon numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Entangled coherent state.
    Ecs,
    /// Product of two coherent states.
    Coh,
    Noon,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Ecs, Family::Coh, Family::Noon];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Ecs => "ecs",
            Family::Coh => "coh",
            Family::Noon => "noon",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ecs" => Ok(Family::Ecs),
            "coh" | "cohpair" | "coherent" => Ok(Family::Coh),
            "noon" => Ok(Family::Noon),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected ecs, coh or noon".into(),
            }),
        }
    }
}

/// Large-`n` form of the entropic bound for each family:
///
/// - ECS: `e^H / (2(2πe)^{3/4} n^{1/4})`
/// - COH: `e^H / (πe√(2n))`
/// - NOON: `e^H / √(8πe)`, independent of `n`
pub fn asymptotic_bound(family: Family, n: f64, prior_entropy: f64) -> f64 {
    let scale = prior_entropy.exp();
    match family {
        Family::Ecs => scale / (2.0 * (2.0 * PI * E).powf(0.75) * n.powf(0.25)),
        Family::Coh => scale / (PI * E * (2.0 * n).sqrt()),
        Family::Noon => scale / (8.0 * PI * E).sqrt(),
    }
}

/// Solve `n = α²/(1 + e^{-α²})` for the ECS amplitude by bisection.
pub fn ecs_alpha_for_mean(n: f64) -> Result<f64> {
    let mean = |a: f64| a * a / (1.0 + (-a * a).exp());
    let mut lo = MIN_ECS_ALPHA;
    let mut hi = n.sqrt() + 1.0;
    if !(n.is_finite() && n >= mean(lo)) {
        return Err(Error::InvalidParameter(format!("no ECS has mean photon number {n}")));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) < n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Family member with total mean photon number `n`. NOON needs integer `n`.
pub fn family_state(family: Family, n: f64) -> Result<ProbeState> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidParameter(format!("mean photon number {n} must be positive")));
    }
    match family {
        Family::Ecs => ProbeState::ecs(ecs_alpha_for_mean(n)?),
        Family::Coh => ProbeState::coherent_pair((n / 2.0).sqrt()),
        Family::Noon => {
            let k = n.round();
            if (n - k).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("NOON photon number {n} is not an integer")));
            }
            ProbeState::noon(k as u64)
        }
    }
}

/// Bounds for one state, each paired with a note on how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub family: Option<Family>,
    /// Total mean photon number.
    pub n: f64,
    pub alpha: Option<f64>,
    pub delta_g: f64,
    pub entropy_g: f64,
    pub cr_bound: f64,
    pub entropic_bound: f64,
    pub variance_entropic_bound: f64,
    pub asymptotic_bound: Option<f64>,
    pub labels: Vec<(String, String)>,
}

/// Bounds for `state` under generator `generator`, with prior entropy
/// `prior_entropy` in nats.
pub fn state_bound_report(state: &ProbeState, generator: Generator, prior_entropy: f64) -> Result<BoundReport> {
    let dist = generator_distribution(state, generator)?;
    let delta_g = dist.variance().sqrt();
    let entropy_g = shannon_entropy(&dist);
    let alpha = match state {
        ProbeState::Ecs { alpha } | ProbeState::CoherentPair { alpha } | ProbeState::SingleCoherent { alpha } => Some(*alpha),
        _ => None,
    };
    let labels = [
        ("n", "exact mean total photon number"),
        ("delta_g", "standard deviation of the exact generator PMF"),
        ("entropy_g", "Shannon entropy of the exact generator PMF, nats"),
        ("cr_bound", "1/(2 delta_g)"),
        ("entropic_bound", "exp(H(phi) - H(G)) / sqrt(2 pi e)"),
        ("variance_entropic_bound", "1/sqrt(2 pi e (delta_g^2 + 1/12)), full-circle prior"),
    ];
    Ok(BoundReport {
        family: None,
        n: mean_total_photons(state)?,
        alpha,
        delta_g,
        entropy_g,
        cr_bound: helstrom_holevo_bound(delta_g),
        entropic_bound: entropic_bound(prior_entropy, entropy_g),
        variance_entropic_bound: variance_entropic_bound(delta_g),
        asymptotic_bound: None,
        labels: labels.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
    })
}

/// Bounds for the member of `family` with mean photon number `n`, using
/// `G = N₂`.
pub fn bound_report(family: Family, n: f64, prior_entropy: f64) -> Result<BoundReport> {
    let state = family_state(family, n)?;
    let mut report = state_bound_report(&state, Generator::N2, prior_entropy)?;
    report.family = Some(family);
    report.asymptotic_bound = Some(asymptotic_bound(family, n, prior_entropy));
    report
        .labels
        .push(("asymptotic_bound".into(), format!("large-n closed form for {family}")));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infotheory::max_entropy_bound;
    use crate::states::{generator_variance, Component};
    use proptest::prelude::*;
    use std::f64::consts::{LN_2, TAU};

    const H2PI: f64 = 1.8378770664093453;

    #[test]
    fn helstrom_values() {
        assert!((helstrom_holevo_bound(2.5) - 0.2).abs() < 1e-15);
        let coh = generator_variance(&ProbeState::coherent_pair(5.0).unwrap(), Generator::N2).unwrap();
        assert!((helstrom_holevo_bound(coh.sqrt()) - 0.1).abs() < 1e-9);
        assert_eq!(helstrom_holevo_bound(0.0), f64::INFINITY);
        // m copies: bound falls as 1/√m
        let one = ProbeState::coherent_pair(1.0).unwrap();
        let four = ProbeState::multicomponent(vec![Component { state: one.clone(), copies: 4 }]).unwrap();
        let b1 = helstrom_holevo_bound(generator_variance(&one, Generator::N2).unwrap().sqrt());
        let b4 = helstrom_holevo_bound(generator_variance(&four, Generator::N2).unwrap().sqrt());
        assert!((b1 / b4 - 2.0).abs() < 1e-9);
    }

    #[test]
    fn biased_values() {
        assert!((helstrom_biased_bound(0.0, 1.0, 3.0) - helstrom_holevo_bound(3.0)).abs() < 1e-15);
        assert_eq!(helstrom_biased_bound(0.3, 0.0, 3.0), 0.3);
        assert!((helstrom_biased_bound(0.1, 0.5, 5.0) - 0.0125_f64.sqrt()).abs() < 1e-15);
        assert!((helstrom_biased_bound(0.1, 0.5, 5.0) - 0.1118).abs() < 1e-4);
    }

    #[test]
    fn entropic_values() {
        let noon = entropic_bound(TAU.ln(), LN_2);
        assert!((noon - TAU / (2.0 * (TAU * E).sqrt())).abs() < 1e-15);
        assert!((noon - 0.7603).abs() < 5e-4);
        assert!((noon / TAU - 0.121).abs() < 5e-4);
        assert_eq!(entropic_bound(f64::NEG_INFINITY, 3.0), 0.0);
    }

    #[test]
    fn variance_entropic_values() {
        assert!((variance_entropic_bound(0.0) - 0.8382).abs() < 1e-4);
        let v = variance_entropic_bound(10.0);
        assert!((v - 1.0 / (10.0 * (TAU * E).sqrt())).abs() / v < 5e-3);
        assert!((v - 0.02419).abs() < 1e-5);
    }

    #[test]
    fn nonlinear_values() {
        assert!((nonlinear_heisenberg_bound(9.0, H2PI) - 0.0559).abs() < 1e-4);
        assert!((nonlinear_heisenberg_bound(0.0, H2PI) - 0.5593).abs() < 1e-4);
        assert_eq!(nonlinear_heisenberg_bound(3.0, f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn asymptotic_values() {
        let ecs = asymptotic_bound(Family::Ecs, 100.0, H2PI);
        assert!((ecs - 0.1182).abs() < 5e-4, "{ecs}");
        assert!((ecs / TAU * 100f64.powf(0.25) - 0.060).abs() < 5e-4);
        let coh = asymptotic_bound(Family::Coh, 100.0, H2PI);
        assert!((coh - 0.0520).abs() < 5e-4, "{coh}");
        assert!((coh / TAU * 10.0 - 0.083).abs() < 5e-4);
        for n in [1.0, 7.0, 1000.0] {
            assert!((asymptotic_bound(Family::Noon, n, H2PI) - 0.7603).abs() < 5e-4);
        }
    }

    #[test]
    fn fisher_values() {
        assert_eq!(cramer_rao_from_fisher(100.0), 0.1);
        assert_eq!(cramer_rao_from_fisher(0.0), f64::INFINITY);
        let dg = 1.7;
        assert!((cramer_rao_from_fisher(4.0 * dg * dg) - helstrom_holevo_bound(dg)).abs() < 1e-15);
    }

    #[test]
    fn ecs_exact_entropic_near_asymptote() {
        let r = bound_report(Family::Ecs, 100.0, H2PI).unwrap();
        assert!((r.entropic_bound - 0.1182).abs() < 1e-3);
        let asym = r.asymptotic_bound.unwrap();
        assert!((r.entropic_bound - asym).abs() / asym < 0.05);
    }

    #[test]
    fn ecs_inversion() {
        for n in [0.01, 0.5, 2.0, 10.0, 400.0] {
            let a = ecs_alpha_for_mean(n).unwrap();
            let back = mean_total_photons(&ProbeState::ecs(a).unwrap()).unwrap();
            assert!((back - n).abs() < 1e-9 * n.max(1.0), "{n}");
        }
        assert!(ecs_alpha_for_mean(0.0).is_err());
    }

    #[test]
    fn family_states() {
        assert_eq!(family_state(Family::Coh, 8.0).unwrap(), ProbeState::CoherentPair { alpha: 2.0 });
        assert_eq!(family_state(Family::Noon, 5.0).unwrap(), ProbeState::Noon { n: 5 });
        assert!(family_state(Family::Noon, 2.5).is_err());
        assert!("xyz".parse::<Family>().is_err());
    }

    #[test]
    fn orderings_for_moderate_n() {
        for n in [10.0, 20.0, 50.0, 100.0] {
            let e = bound_report(Family::Ecs, n, H2PI).unwrap();
            let c = bound_report(Family::Coh, n, H2PI).unwrap();
            assert!(c.entropic_bound < e.entropic_bound, "{n}");
            assert!(e.cr_bound < c.cr_bound, "{n}");
        }
    }

    #[test]
    fn asymptotic_monotonicity() {
        let mut prev = f64::INFINITY;
        for i in 1..50 {
            let b = asymptotic_bound(Family::Ecs, i as f64 * 3.0, H2PI);
            assert!(b < prev);
            prev = b;
        }
    }

    proptest! {
        #[test]
        fn entropic_dominates_variance_bound(family in prop_oneof![Just(Family::Ecs), Just(Family::Coh), Just(Family::Noon)], n in 1u32..300) {
            let r = bound_report(family, f64::from(n), H2PI).unwrap();
            prop_assert!(r.entropy_g <= max_entropy_bound(r.delta_g * r.delta_g) + 1e-12);
            prop_assert!(r.entropic_bound >= r.variance_entropic_bound - 1e-10);
            prop_assert!(r.cr_bound >= 0.0 && r.entropic_bound >= 0.0);
        }
    }
}
