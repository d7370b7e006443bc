//! Lloyd's k-means with seeded farthest-point initialization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FixError, Result};

pub const MAX_ITERATIONS: usize = 100;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest center; ties go to the lowest index.
fn nearest(point: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best_d {
            best_d = d;
            best = j;
        }
    }
    best
}

/// The first center is a seeded uniform pick; each further center is the
/// point farthest from all chosen centers (lowest index on ties).
pub fn farthest_point_init(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut min_d: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let mut far = 0;
        for (i, &d) in min_d.iter().enumerate() {
            if d > min_d[far] {
                far = i;
            }
        }
        let c = points[far].clone();
        for (m, p) in min_d.iter_mut().zip(points) {
            *m = m.min(sq_dist(p, &c));
        }
        centers.push(c);
    }
    centers
}

/// Cluster label per point, in `0..k`.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(FixError::param("k", "must be at least 1"));
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(FixError::arg("points differ in dimension"));
    }
    let k = k.min(points.len());
    let mut centers = farthest_point_init(points, k, seed);
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
    for _ in 0..MAX_ITERATIONS {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        for ((center, sum), &n) in centers.iter_mut().zip(sums).zip(&counts) {
            // Empty clusters keep their previous center.
            if n > 0 {
                *center = sum.into_iter().map(|s| s / n as f64).collect();
            }
        }
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
        if next == labels {
            break;
        }
        labels = next;
    }
    Ok(labels)
}

/// Within-cluster sum of squared distances to cluster means.
pub fn inertia(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let dim = points.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    let means: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &n)| s.into_iter().map(|v| v / n.max(1) as f64).collect())
        .collect();
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| sq_dist(p, &means[l]))
        .sum()
}
