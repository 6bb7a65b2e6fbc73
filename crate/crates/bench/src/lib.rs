//! Fixtures shared by the benchmarks.

use qmetro::ProbeState;

/// One probe of each kind at roughly 100 photons.
pub fn probes() -> Vec<(&'static str, ProbeState)> {
    vec![
        ("noon_100", ProbeState::noon(100).unwrap()),
        ("ecs_10", ProbeState::ecs(10.0).unwrap()),
        ("cohpair_7", ProbeState::coherent_pair(50f64.sqrt()).unwrap()),
    ]
}
