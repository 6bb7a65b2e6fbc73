//! Self-checks comparing closed forms against independent constructions,
//! entropy approximations against exact sums, and the expected orderings of
//! the bounds. Everything here is deterministic and takes a few seconds.

use std::f64::consts::{E, LN_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bounds::{asymptotic_bound, bound_report, entropic_bound, variance_entropic_bound, Family};
use crate::error::Result;
use crate::infotheory::{max_entropy_bound, shannon_entropy};
use crate::oracle;
use crate::phasedist::{ecs_relative_phase_scaled, overlap_loss, relative_phase_bruteforce, PhaseDistribution};
use crate::simulate::{fisher_information, locally_unbiased_region};
use crate::states::{generator_distribution, generator_variance, Generator, IntegerDistribution, ProbeState};

/// One named comparison of a measured value with its target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub target: String,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target: format!("<= {limit:e}"),
            passed: measured <= limit,
        }
    }

    fn near(name: impl Into<String>, measured: f64, target: f64, rel: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            target: format!("{target:.6} within {:.1}%", rel * 100.0),
            passed: ((measured - target) / target).abs() <= rel,
        }
    }

    fn holds(name: impl Into<String>, measured: f64, target: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            measured,
            target: target.into(),
            passed,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: measured {:.6e}, target {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.target
        )
    }
}

/// Options for [`run_checks_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Perturb the ECS closed form so the oracle comparisons must fail.
    pub mutate: bool,
}

pub fn run_checks() -> Result<Vec<Check>> {
    run_checks_with(VerifyOptions::default())
}

pub fn run_checks_with(options: VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let fringe_scale = if options.mutate { 1.001 } else { 1.0 };
    let h2pi = TAU.ln();

    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let d = generator_distribution(&ProbeState::ecs(alpha)?, Generator::N2)?;
        let fock = oracle::ecs_n2_pmf_fock(alpha);
        let len = fock.len().max(d.len());
        let sup = (0..len)
            .map(|m| (d.prob(m as i64) - fock.get(m).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max);
        checks.push(Check::at_most(format!("ECS N2 PMF vs Fock expansion, alpha={alpha}"), sup, 1e-12));
    }

    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let mut worst = 0.0_f64;
        for phi in [0.0, 1.0, PI] {
            let closed = ecs_relative_phase_scaled(alpha, phi, fringe_scale)?;
            let brute = relative_phase_bruteforce(alpha, phi)?;
            worst = worst.max(sup_on_common_grid(&closed, &brute));
        }
        checks.push(Check::at_most(format!("relative phase closed form vs brute force, alpha={alpha}"), worst, 1e-8));
    }

    for n in [1, 2, 5, 20] {
        let h = shannon_entropy(&generator_distribution(&ProbeState::noon(n)?, Generator::N2)?);
        checks.push(Check::at_most(format!("NOON n={n} entropy minus ln 2"), (h - LN_2).abs(), 1e-12));
    }
    let noon = entropic_bound(h2pi, LN_2);
    checks.push(Check::at_most("NOON entropic bound vs 0.7603", (noon - 0.7603).abs(), 5e-4));

    let poisson = shannon_entropy(&IntegerDistribution::poisson(100.0)?);
    checks.push(Check::near("Poisson(100) entropy vs Gaussian", poisson, 0.5 * (2.0 * PI * E * 100.0).ln(), 0.01));
    let ecs10 = shannon_entropy(&generator_distribution(&ProbeState::ecs(10.0)?, Generator::N2)?);
    checks.push(Check::near(
        "ECS alpha=10 entropy vs half-Gaussian plus one bit",
        ecs10,
        0.25 * (2.0 * PI * E * 100.0).ln() + LN_2,
        0.02,
    ));

    for family in [Family::Ecs, Family::Coh] {
        for n in [25.0, 100.0, 400.0] {
            let r = bound_report(family, n, h2pi)?;
            let tol = if n >= 400.0 { 0.015 } else { 0.05 };
            checks.push(Check::near(
                format!("{family} exact entropic bound vs asymptote, n={n}"),
                r.entropic_bound,
                asymptotic_bound(family, n, h2pi),
                tol,
            ));
        }
    }

    for n in [10.0, 20.0, 50.0, 100.0] {
        let ecs = bound_report(Family::Ecs, n, h2pi)?;
        let coh = bound_report(Family::Coh, n, h2pi)?;
        checks.push(Check::holds(
            format!("n={n}: entropic COH < ECS and CR ECS < COH"),
            coh.entropic_bound / ecs.entropic_bound,
            "< 1 with CR ordering reversed",
            coh.entropic_bound < ecs.entropic_bound && ecs.cr_bound < coh.cr_bound,
        ));
    }
    for n in [1.0, 2.0, 4.0] {
        let ecs = bound_report(Family::Ecs, n, h2pi)?;
        let coh = bound_report(Family::Coh, n, h2pi)?;
        let rel = (ecs.entropic_bound - coh.entropic_bound).abs() / coh.entropic_bound;
        checks.push(Check::at_most(format!("n={n}: relative gap of ECS and COH entropic bounds"), rel, 0.15));
    }

    for state in [ProbeState::ecs(3.0)?, ProbeState::noon(6)?] {
        let dist = generator_distribution(&state, Generator::N2)?;
        let v = dist.variance();
        let rem = |phi: f64| (overlap_loss(&dist, phi) - phi * phi * v).abs();
        let ratio = rem(5e-3) / rem(1e-2);
        checks.push(Check::holds(
            format!("{state}: quartic remainder ratio of the overlap"),
            ratio,
            "1/16 within a factor 2",
            (1.0 / 32.0..=1.0 / 8.0).contains(&ratio),
        ));
    }

    let fisher_states = [
        ProbeState::noon(1)?,
        ProbeState::noon(8)?,
        ProbeState::ecs(10.0)?,
        ProbeState::coherent_pair(50f64.sqrt())?,
    ];
    for state in &fisher_states {
        let f = fisher_information(state, 1.0, 1e-3)?;
        let q = 4.0 * generator_variance(state, Generator::N2)?;
        checks.push(Check::at_most(format!("{state}: Fisher information over 4 var(G)"), f / q, 1.0 + 1e-3));
    }
    let f4 = fisher_information(&ProbeState::coherent_pair(4.0)?, 1.0, 1e-3)?;
    checks.push(Check::near("cohpair alpha=4 Fisher information", f4, 64.0, 0.1));

    for state in [ProbeState::ecs(2.0)?, ProbeState::coherent_pair(3.0)?, ProbeState::noon(7)?] {
        let d = generator_distribution(&state, Generator::N2)?;
        let h = shannon_entropy(&d);
        let dg = d.variance().sqrt();
        checks.push(Check::holds(
            format!("{state}: entropy below max-entropy value"),
            h,
            format!("<= {:.6}", max_entropy_bound(dg * dg)),
            h <= max_entropy_bound(dg * dg) + 1e-12
                && entropic_bound(h2pi, h) >= variance_entropic_bound(dg) - 1e-10,
        ));
    }

    let w8 = locally_unbiased_region(&ProbeState::noon(8)?, 1.0, 0.1)?.map_or(0.0, |r| r.width());
    let w16 = locally_unbiased_region(&ProbeState::noon(16)?, 1.0, 0.1)?.map_or(0.0, |r| r.width());
    checks.push(Check::holds(
        "locally unbiased width NOON n=16 over n=8",
        w16 / w8,
        "< 1",
        w16 < w8 && w16 > 0.0,
    ));

    Ok(checks)
}

/// Sup distance after putting both densities on the finer of the two grids.
fn sup_on_common_grid(a: &PhaseDistribution, b: &PhaseDistribution) -> f64 {
    if a.len() == b.len() {
        return a.sup_distance(b).unwrap_or(f64::INFINITY);
    }
    let j = a.len().max(b.len());
    (0..j)
        .map(|i| {
            let t = TAU * i as f64 / j as f64;
            (a.density_at(t) - b.density_at(t)).abs()
        })
        .fold(0.0, f64::max)
}
