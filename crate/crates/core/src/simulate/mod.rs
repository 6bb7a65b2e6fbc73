//! Monte Carlo phase-estimation experiments.
//!
//! Each probe state is measured with the canonical (relative) phase
//! measurement described by an [`OutcomeModel`]. The model is phase
//! covariant: the outcome density at shift `φ` is the density at zero
//! translated by `φ`, so a single sampling table serves every `φ`.
//!
//! Work is split into units (a grid point, a chunk of draws, a trial of the
//! iterative scheme), each with its own [`RandomStream`](crate::RandomStream).
//! Units run in parallel and their partial results are combined in index
//! order, so reports do not depend on the thread count.

mod fisher;
mod iterative;
mod outcome;
mod region;
mod report;
mod single_shot;

pub use fisher::{fisher_information, fisher_information_of, MAX_FISHER_DELTA, MIN_FISHER_DELTA};
pub use iterative::{
    iterative_generator_entropy, iterative_state, run_iterative, total_resources, IterativeConfig, Ladder, WindowUpdate,
};
pub use outcome::OutcomeModel;
pub use region::{locally_unbiased_region, locally_unbiased_region_with, mean_estimate, Interval};
pub use report::{EstimationReport, IterativeSummary};
pub use single_shot::{run_single_shot, run_single_shot_with, Estimator, SingleShotConfig, MIN_TRIALS};

// stream families; the tag sits in the top byte of the stream index
pub(crate) const TAG_LOCAL: u8 = 1;
pub(crate) const TAG_AVERAGE: u8 = 2;
pub(crate) const TAG_ITERATIVE: u8 = 3;
pub(crate) const TAG_BOOTSTRAP: u8 = 4;
