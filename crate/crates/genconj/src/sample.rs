//! Deterministic low-discrepancy sampling (Halton sequences).
//!
//! All stochastic-looking checks in this crate draw from these sequences so
//! that reports are reproducible bit for bit. A `seed` merely offsets the
//! starting index of the sequence.

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut inv = 0.0;
    let mut f = 1.0 / base as f64;
    while n > 0 {
        inv += f * (n % base) as f64;
        n /= base;
        f /= base as f64;
    }
    inv
}

/// Halton point in `[0,1)^dim` at index `i` (1-based internally).
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    (0..dim).map(|d| radical_inverse(i + 1, PRIMES[d % PRIMES.len()])).collect()
}

/// `count` Halton points scaled into the box `[lo, hi]`, starting at `seed`.
pub fn points_in_box(lo: &[f64], hi: &[f64], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let dim = lo.len();
    (0..count)
        .map(|k| {
            let u = halton(seed + k as u64, dim);
            (0..dim).map(|d| lo[d] + u[d] * (hi[d] - lo[d])).collect()
        })
        .collect()
}

/// `count` points in the closed ball `B(center, radius)` via rejection from
/// the bounding cube. Deterministic; only suitable for small dimensions.
pub fn points_in_ball(center: &[f64], radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let dim = center.len();
    let mut out = Vec::with_capacity(count);
    let mut i = seed;
    while out.len() < count && i < seed + 100 * count as u64 + 1000 {
        let u = halton(i, dim);
        let p: Vec<f64> = (0..dim).map(|d| 2.0 * u[d] - 1.0).collect();
        if p.iter().map(|t| t * t).sum::<f64>() <= 1.0 {
            out.push((0..dim).map(|d| center[d] + radius * p[d]).collect());
        }
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_is_deterministic_and_in_unit_cube() {
        let a = halton(17, 3);
        let b = halton(17, 3);
        assert_eq!(a, b);
        assert!(a.iter().all(|t| (0.0..1.0).contains(t)));
    }

    #[test]
    fn ball_points_stay_in_ball() {
        let pts = points_in_ball(&[1.0, -2.0], 0.5, 50, 0);
        assert_eq!(pts.len(), 50);
        for p in pts {
            let d = ((p[0] - 1.0).powi(2) + (p[1] + 2.0).powi(2)).sqrt();
            assert!(d <= 0.5 + 1e-12);
        }
    }
}
