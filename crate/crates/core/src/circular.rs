//! Angle wrapping and circular statistics.

use std::f64::consts::{PI, TAU};

/// Wrap into `(-π, π]`.
#[inline]
pub fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Wrap into `[0, 2π)`.
#[inline]
pub fn wrap_tau(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// Wrap `x` into the fringe interval `(-π/k, π/k]`.
#[inline]
pub fn wrap_fringe(x: f64, k: u64) -> f64 {
    let k = k.max(1) as f64;
    wrap_pi(k * x) / k
}

/// Direction of the mean resultant vector, in `(-π, π]`.
pub fn circular_mean(angles: &[f64]) -> f64 {
    let (s, c) = angles
        .iter()
        .fold((0.0, 0.0), |(s, c), &a| (s + a.sin(), c + a.cos()));
    s.atan2(c)
}

/// Mean squared deviation of `angles` from `center`, deviations wrapped to
/// `(-π, π]`.
pub fn variance_about(angles: &[f64], center: f64) -> f64 {
    if angles.is_empty() {
        return f64::NAN;
    }
    angles.iter().map(|&a| wrap_pi(a - center).powi(2)).sum::<f64>() / angles.len() as f64
}

/// Circular median: the sample angle minimising the summed arc distance to
/// all samples. Ties resolve to the earliest sample.
pub fn circular_median(angles: &[f64]) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for &candidate in angles {
        let cost: f64 = angles.iter().map(|&a| wrap_pi(a - candidate).abs()).sum();
        match best {
            Some((c, _)) if c <= cost => {}
            _ => best = Some((cost, candidate)),
        }
    }
    best.map(|(_, a)| wrap_pi(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping_ranges() {
        assert_eq!(wrap_pi(PI), PI);
        assert!((wrap_pi(-PI) - PI).abs() < 1e-15);
        assert!((wrap_pi(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_tau(-1e-300), 0.0);
        assert!((wrap_tau(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!((wrap_fringe(0.5, 8) - (0.5 - TAU / 8.0)).abs() < 1e-12);
        assert_eq!(wrap_fringe(0.3, 8), 0.3);
    }

    #[test]
    fn median_across_the_cut() {
        let xs = [PI - 0.1, -PI + 0.05, PI - 0.02, -PI + 0.2, PI - 0.3];
        let m = circular_median(&xs).unwrap();
        assert!((wrap_pi(m - PI)).abs() < 0.11, "{m}");
        assert!(circular_median(&[]).is_none());
    }

    #[test]
    fn mean_and_variance() {
        let xs = [0.1, -0.1, 0.2, -0.2];
        assert!(circular_mean(&xs).abs() < 1e-15);
        assert!((variance_about(&xs, 0.0) - 0.025).abs() < 1e-15);
    }
}
