//! # qmetro
//!
//! Phase-estimation bounds for bosonic probe states, and Monte Carlo
//! experiments that measure how close real estimators come to them.
//!
//! The crate contrasts two families of limits on estimating a phase shift
//! `φ` generated by an operator `G` with integer eigenvalues:
//!
//! - **Local (Cramér-Rao) bounds**: `RMSE_φ ≥ 1/√F ≥ 1/(2ΔG)`. These only
//!   constrain locally unbiased estimates.
//! - **Entropic bounds** on the prior-averaged error:
//!   `RMSE ≥ (2πe)^{-1/2} e^{H(φ)} e^{-H(G)}`, valid for any estimate.
//!
//! NOON states have a large `ΔG` but `H(G) = ln 2`, so the two disagree
//! about how the error scales with photon number. Entangled coherent states
//! sit in between. The [`simulate`] module runs canonical-phase measurements
//! to show which bound the achievable error actually follows.
//!
//! ## Modules
//!
//! - [`states`]: probe states and their generator-eigenvalue distributions.
//! - [`infotheory`]: entropies, priors and plug-in mutual information.
//! - [`phasedist`]: canonical and relative phase distributions, overlaps,
//!   sampling.
//! - [`bounds`]: closed-form bounds and the per-family bound tables.
//! - [`simulate`]: single-shot and iterative estimation experiments.
//! - [`verify`]: self-checks comparing closed forms with brute-force oracles.
//!
//! All logarithms are natural (nats) and all angles are radians.

pub mod bounds;
pub mod circular;
mod error;
pub mod infotheory;
pub mod oracle;
pub mod phasedist;
pub mod rng;
pub mod simulate;
pub mod states;
mod syntax;
pub mod verify;

pub use bounds::{BoundReport, Family};
pub use error::{Error, Result};
pub use infotheory::{JointHistogram, PriorDistribution};
pub use phasedist::{AmplitudeVector, PhaseDistribution, PhaseSampler};
pub use rng::RandomStream;
pub use simulate::{EstimationReport, Estimator, IterativeConfig, SingleShotConfig, WindowUpdate};
pub use states::{Component, Generator, IntegerDistribution, ProbeState};
