use rand::seq::SliceRandom;
use rand::Rng;

use crate::{Error, Result};

/// Stratum of `x` when `[lo, hi]` is cut into `n` equal-width cells. The upper
/// bound belongs to the last cell.
pub fn stratum_index(x: f64, lo: f64, hi: f64, n: usize) -> usize {
    let t = (x - lo) / (hi - lo) * n as f64;
    (t.floor().max(0.0) as usize).min(n - 1)
}

pub fn check_bounds(bounds: &[(f64, f64)]) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::InvalidArgument("bounds must cover at least one dimension".into()));
    }
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "degenerate bounds in dimension {i}: [{lo}, {hi}]"
            )));
        }
    }
    Ok(())
}

/// Latin hypercube design of `n` points inside `bounds`.
///
/// Every dimension is split into `n` equal strata; each stratum receives
/// exactly one point, placed uniformly inside it, and strata are paired across
/// dimensions by independent random permutations.
pub fn lhs_sample<R: Rng + ?Sized>(
    n: usize,
    bounds: &[(f64, f64)],
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InvalidArgument("lhs needs at least one point".into()));
    }
    check_bounds(bounds)?;
    let mut points = vec![vec![0.0; bounds.len()]; n];
    let mut strata: Vec<usize> = (0..n).collect();
    for (j, &(lo, hi)) in bounds.iter().enumerate() {
        strata.shuffle(rng);
        for (point, &cell) in points.iter_mut().zip(&strata) {
            let u: f64 = rng.random();
            let mut x = lo + (cell as f64 + u) / n as f64 * (hi - lo);
            x = x.clamp(lo, hi);
            // Rounding can push a point across a cell edge; walk it back.
            while stratum_index(x, lo, hi, n) > cell {
                x = x.next_down();
            }
            while stratum_index(x, lo, hi, n) < cell {
                x = x.next_up();
            }
            point[j] = x;
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng as SeededRng;
    use rand::SeedableRng;

    fn occupancy(points: &[Vec<f64>], bounds: &[(f64, f64)]) -> Vec<Vec<usize>> {
        let n = points.len();
        bounds
            .iter()
            .enumerate()
            .map(|(j, &(lo, hi))| {
                let mut counts = vec![0; n];
                for p in points {
                    counts[stratum_index(p[j], lo, hi, n)] += 1;
                }
                counts
            })
            .collect()
    }

    #[test]
    fn four_points_one_per_quarter() {
        let mut rng = SeededRng::seed_from_u64(3);
        let pts = lhs_sample(4, &[(0.0, 1.0)], &mut rng).unwrap();
        let mut cells: Vec<usize> = pts.iter().map(|p| (p[0] * 4.0).floor() as usize).collect();
        cells.sort();
        assert_eq!(cells, vec![0, 1, 2, 3]);
    }

    #[test]
    fn single_point_inside_box() {
        let bounds = [(-2.0, 3.0), (10.0, 11.0)];
        let mut rng = SeededRng::seed_from_u64(5);
        let pts = lhs_sample(1, &bounds, &mut rng).unwrap();
        assert_eq!(pts.len(), 1);
        for (x, (lo, hi)) in pts[0].iter().zip(bounds) {
            assert!(*x >= lo && *x <= hi);
        }
    }

    #[test]
    fn hundred_by_six_occupancy_all_ones() {
        let bounds: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 2.0 * i as f64 + 1.0)).collect();
        let mut rng = SeededRng::seed_from_u64(99);
        let pts = lhs_sample(100, &bounds, &mut rng).unwrap();
        for counts in occupancy(&pts, &bounds) {
            assert!(counts.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let b = [(0.0, 1.0), (0.0, 1.0)];
        let a = lhs_sample(10, &b, &mut SeededRng::seed_from_u64(1)).unwrap();
        let c = lhs_sample(10, &b, &mut SeededRng::seed_from_u64(1)).unwrap();
        let d = lhs_sample(10, &b, &mut SeededRng::seed_from_u64(2)).unwrap();
        assert_eq!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn rejects_degenerate_input() {
        let mut rng = SeededRng::seed_from_u64(0);
        assert!(lhs_sample(3, &[(1.0, 1.0)], &mut rng).is_err());
        assert!(lhs_sample(3, &[(2.0, 1.0)], &mut rng).is_err());
        assert!(lhs_sample(0, &[(0.0, 1.0)], &mut rng).is_err());
        assert!(lhs_sample(3, &[], &mut rng).is_err());
    }
}
