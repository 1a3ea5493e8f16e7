//! Oscillation of a 1-Lipschitz coloring on a finite set.

use super::MetricsError;

/// Lipschitz slack.
pub const LIPSCHITZ_TOL: f64 = 1e-9;

/// `max_{x, y} d_K(c(x), c(y))` over `points`, after checking
/// `d_K(c(x), c(y)) <= d(x, y)` for every pair.
pub fn oscillation<P, K>(
    points: &[P],
    dist: impl Fn(&P, &P) -> f64,
    color: impl Fn(&P) -> K,
    target_dist: impl Fn(&K, &K) -> f64,
) -> Result<f64, MetricsError> {
    let colors: Vec<K> = points.iter().map(&color).collect();
    let mut osc = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let dk = target_dist(&colors[i], &colors[j]);
            let d = dist(&points[i], &points[j]);
            if dk > d + LIPSCHITZ_TOL {
                return Err(MetricsError::LipschitzViolation(format!("points {i} and {j}: {dk} > {d}")));
            }
            osc = osc.max(dk);
        }
    }
    Ok(osc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn l2(a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn examples() {
        let pts = vec![vec![1.0, 0.0], vec![2.0, 0.0]];
        let abs = |a: &f64, b: &f64| (a - b).abs();
        assert_eq!(oscillation(&pts, l2, |_| 0.5, abs).unwrap(), 0.0);
        let norm = |x: &Vec<f64>| x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_eq!(oscillation(&pts, l2, norm, abs).unwrap(), 1.0);
        let doubled = |x: &Vec<f64>| 2.0 * norm(x);
        assert!(matches!(oscillation(&pts, l2, doubled, abs), Err(MetricsError::LipschitzViolation(_))));
    }

    #[test]
    fn zero_oscillation_is_monochromatic() {
        // finite colorings into the discrete {0,1}-metric, points at distance 1
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.gen_range(1..8);
            let table: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let pts: Vec<usize> = (0..n).collect();
            let discrete = |a: &u8, b: &u8| if a == b { 0.0 } else { 1.0 };
            let osc = oscillation(&pts, |a, b| if a == b { 0.0 } else { 1.0 }, |&i| table[i], discrete).unwrap();
            assert_eq!(osc == 0.0, table.iter().all(|&c| c == table[0]));
        }
    }
}
