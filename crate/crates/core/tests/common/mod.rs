#![allow(dead_code)]

use ediscovery::datagen::{enforce_realizable, gaussian_mixture, GaussianConfig};
use ediscovery::lp::{LinearProgram, LpStatus};
use ediscovery::rng::rng_from_seed;
use ediscovery::{Instance, Label};
use rand::Rng;
use rand_distr::StandardNormal;

/// Indices of the points that are not convex combinations of the points
/// with different coordinates, one feasibility program per point.
pub fn brute_force_extreme(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            let others: Vec<&Vec<f64>> = points.iter().filter(|p| **p != points[i]).collect();
            if others.is_empty() {
                return true;
            }
            let mut lp = LinearProgram::new(others.len());
            lp.equal(vec![1.0; others.len()], 1.0).unwrap();
            for l in 0..points[i].len() {
                lp.equal(others.iter().map(|p| p[l]).collect(), points[i][l]).unwrap();
            }
            matches!(lp.solve().unwrap(), LpStatus::Infeasible)
        })
        .collect()
}

/// A point set of size `n` in dimension `d`. Every third set is drawn on a
/// small integer grid with duplicates and boundary points, the rest are
/// Gaussian with a few exact copies.
pub fn random_point_set(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    if seed.is_multiple_of(3) {
        return (0..n).map(|_| (0..d).map(|_| f64::from(rng.random_range(-3i32..=3))).collect()).collect();
    }
    let mut pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()).collect();
    for _ in 0..n / 10 {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        pts[a] = pts[b].clone();
    }
    pts
}

/// A realizable Gaussian instance with `n` documents in dimension `d`.
pub fn random_realizable(n: usize, d: usize, seed: u64) -> Instance {
    let mut rng = rng_from_seed(seed);
    let ratio = rng.random_range(0.1..0.5);
    let separation = rng.random_range(1.0..4.0);
    let gen = GaussianConfig::new(n, d, ratio, seed).with_separation(separation);
    enforce_realizable(&gaussian_mixture::<f64>(&gen).unwrap(), 1e-2).unwrap()
}

/// One positive at (2, 0) against negatives at the origin and around it.
pub fn worked_example() -> Instance {
    Instance::from_rows(
        vec![vec![2.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0], vec![-1.0, 0.0]],
        vec![Label::Positive, Label::Negative, Label::Negative, Label::Negative, Label::Negative],
    )
    .unwrap()
}
