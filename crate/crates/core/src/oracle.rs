//! Independent reference computations in the two-mode Fock basis.
//!
//! These expand states amplitude by amplitude instead of using the closed
//! forms in [`crate::states`] and [`crate::phasedist`], and exist so that the
//! closed forms can be cross-checked by tests and by `verify`.

/// Fock amplitudes `e^{-α²/2} α^m / √m!` of a real coherent state for
/// `m = 0..=cutoff`, by the ratio recurrence.
pub fn coherent_amplitudes(alpha: f64, cutoff: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(cutoff + 1);
    let mut x = (-0.5 * alpha * alpha).exp();
    a.push(x);
    for m in 1..=cutoff {
        x *= alpha / (m as f64).sqrt();
        a.push(x);
    }
    a
}

/// Photon-number cutoff past which coherent amplitudes of `alpha` are
/// negligible in double precision.
pub fn fock_cutoff(alpha: f64) -> usize {
    let a2 = alpha * alpha;
    (a2 + 12.0 * alpha + 30.0).ceil() as usize
}

/// Two-mode amplitudes `c[m1][m2]` of the ECS, flattened row-major with
/// stride `cutoff + 1`.
pub fn ecs_fock_amplitudes(alpha: f64, cutoff: usize) -> Vec<f64> {
    let a = coherent_amplitudes(alpha, cutoff);
    let norm = 1.0 / (2.0 * (1.0 + (-alpha * alpha).exp())).sqrt();
    let stride = cutoff + 1;
    let mut c = vec![0.0; stride * stride];
    for (m, &am) in a.iter().enumerate() {
        c[m * stride] += norm * am; // |m⟩|0⟩
        c[m] += norm * am; // |0⟩|m⟩
    }
    c
}

/// Distribution of `N_2` for the ECS by squaring Fock amplitudes and summing
/// over `m1`.
pub fn ecs_n2_pmf_fock(alpha: f64) -> Vec<f64> {
    let cutoff = fock_cutoff(alpha);
    let stride = cutoff + 1;
    let c = ecs_fock_amplitudes(alpha, cutoff);
    (0..stride)
        .map(|m2| (0..stride).map(|m1| c[m1 * stride + m2].powi(2)).sum())
        .collect()
}

/// `⟨N_1 + N_2⟩` of the ECS from its Fock amplitudes.
pub fn ecs_mean_total_fock(alpha: f64) -> f64 {
    let cutoff = fock_cutoff(alpha);
    let stride = cutoff + 1;
    let c = ecs_fock_amplitudes(alpha, cutoff);
    let mut n = 0.0;
    for m1 in 0..stride {
        for m2 in 0..stride {
            n += (m1 + m2) as f64 * c[m1 * stride + m2].powi(2);
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitudes_are_normalized() {
        for alpha in [0.5, 2.0, 6.0] {
            let a = coherent_amplitudes(alpha, fock_cutoff(alpha));
            let s: f64 = a.iter().map(|x| x * x).sum();
            assert!((s - 1.0).abs() < 1e-13);
            let p = ecs_n2_pmf_fock(alpha);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
    }
}
