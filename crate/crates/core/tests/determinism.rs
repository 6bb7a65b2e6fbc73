use qmetro::simulate::{run_iterative, run_single_shot};
use qmetro::{Family, IterativeConfig, PriorDistribution, ProbeState};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn single_shot_ignores_thread_count() {
    let state = ProbeState::ecs(2.0).unwrap();
    let prior = PriorDistribution::full();
    let run = || run_single_shot(&state, &prior, 2000, 16, 11).unwrap();
    let a = in_pool(1, run);
    let b = in_pool(4, run);
    assert_eq!(a, b);
    let c = run_single_shot(&state, &prior, 2000, 16, 12).unwrap();
    assert_ne!(a.rmse_average, c.rmse_average);
}

#[test]
fn iterative_ignores_thread_count() {
    let config = IterativeConfig {
        family: Family::Noon,
        m_bits: 4,
        copies: 3,
        trials: 300,
        seed: 5,
        ..IterativeConfig::default()
    };
    let a = in_pool(1, || run_iterative(&config).unwrap());
    let b = in_pool(3, || run_iterative(&config).unwrap());
    assert_eq!(a, b);
}
