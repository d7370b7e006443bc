//! Quickshift mode-seeking superpixels on single-channel rasters.
//!
//! Each pixel is a point `(row, col, ratio · intensity)`. After an optional
//! Gaussian pre-smoothing, a Parzen density with bandwidth `kernel_size` is
//! estimated over a `3 · kernel_size` window; every pixel then links to the
//! nearest pixel of higher density in that window unless it is farther than
//! `max_dist`. Trees of links are the segments.

use crate::error::{FixError, Result};
use crate::massmaps::MassMap;
use crate::mask::{FeatureMask, GroupSet};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuickshiftParams {
    pub kernel_size: f64,
    pub max_dist: f64,
    /// Pre-smoothing standard deviation in pixels; 0 disables it.
    pub sigma: f64,
    /// Weight of the intensity channel against pixel distance.
    pub ratio: f64,
}

impl Default for QuickshiftParams {
    fn default() -> Self {
        Self {
            kernel_size: 5.0,
            max_dist: 10.0,
            sigma: 0.2,
            ratio: 1.0,
        }
    }
}

impl QuickshiftParams {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("kernel_size", self.kernel_size, false),
            ("max_dist", self.max_dist, false),
            ("sigma", self.sigma, true),
            ("ratio", self.ratio, true),
        ];
        for (name, v, zero_ok) in checks {
            let ok = v.is_finite() && (v > 0.0 || (zero_ok && v == 0.0));
            if !ok {
                return Err(FixError::param(name, format!("invalid value {v}")));
            }
        }
        Ok(())
    }
}

/// Maps an out-of-range index back into `0..n` by mirroring about the edges
/// (`d c b a | a b c d | d c b a`).
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut i = i.rem_euclid(period);
    if i >= n {
        i = period - i - 1;
    }
    i as usize
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (4.0 * sigma + 0.5) as isize;
    let weights: Vec<f64> = (-radius..=radius)
        .map(|x| (-0.5 * (x * x) as f64 / (sigma * sigma)).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Separable Gaussian blur with mirrored borders.
pub fn gaussian_smooth(map: &MassMap, sigma: f64) -> Vec<f64> {
    let (h, w) = (map.height(), map.width());
    if sigma <= 0.0 {
        return map.pixels().to_vec();
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    let mut rows_done = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            rows_done[r * w + c] = kernel
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * map.at(r, reflect(c as isize + k as isize - radius, w)))
                .sum();
        }
    }
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            out[r * w + c] = kernel
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * rows_done[reflect(r as isize + k as isize - radius, h) * w + c])
                .sum();
        }
    }
    out
}

/// Segment label per pixel, numbered by first appearance in row-major order.
pub fn quickshift_labels(map: &MassMap, params: &QuickshiftParams) -> Result<Vec<usize>> {
    params.validate()?;
    let (h, w) = (map.height(), map.width());
    let values: Vec<f64> = gaussian_smooth(map, params.sigma)
        .into_iter()
        .map(|v| v * params.ratio)
        .collect();
    let window = (3.0 * params.kernel_size).ceil() as usize;
    let inv_two_k2 = 1.0 / (2.0 * params.kernel_size * params.kernel_size);

    let sq_dist = |a: usize, b: usize| -> f64 {
        let (ra, ca) = ((a / w) as f64, (a % w) as f64);
        let (rb, cb) = ((b / w) as f64, (b % w) as f64);
        let dv = values[a] - values[b];
        (ra - rb).powi(2) + (ca - cb).powi(2) + dv * dv
    };
    let neighbours = |p: usize| {
        let (r, c) = (p / w, p % w);
        let rows = r.saturating_sub(window)..(r + window + 1).min(h);
        rows.flat_map(move |rr| {
            let cols = c.saturating_sub(window)..(c + window + 1).min(w);
            cols.map(move |cc| rr * w + cc)
        })
    };

    let density: Vec<f64> = (0..h * w)
        .map(|p| neighbours(p).map(|q| (-sq_dist(p, q) * inv_two_k2).exp()).sum())
        .collect();

    // Exact density ties are broken by pixel index so that links always
    // point to a strictly larger (density, index) pair and cannot cycle.
    let higher = |q: usize, p: usize| density[q] > density[p] || (density[q] == density[p] && q > p);
    let max_sq = params.max_dist * params.max_dist;
    let mut parent: Vec<usize> = (0..h * w)
        .map(|p| {
            let mut best = p;
            let mut best_d = f64::INFINITY;
            for q in neighbours(p) {
                if higher(q, p) {
                    let d = sq_dist(p, q);
                    if d < best_d {
                        best_d = d;
                        best = q;
                    }
                }
            }
            if best_d > max_sq {
                p
            } else {
                best
            }
        })
        .collect();

    loop {
        let next: Vec<usize> = parent.iter().map(|&q| parent[q]).collect();
        if next == parent {
            break;
        }
        parent = next;
    }

    let mut label_of_root = vec![usize::MAX; h * w];
    let mut next_label = 0;
    Ok(parent
        .iter()
        .map(|&root| {
            if label_of_root[root] == usize::MAX {
                label_of_root[root] = next_label;
                next_label += 1;
            }
            label_of_root[root]
        })
        .collect())
}

/// Converts a label image into one mask per label.
pub fn labels_to_groups(labels: &[usize], provenance: &str) -> Result<GroupSet> {
    let d = labels.len();
    let count = labels.iter().max().map_or(0, |m| m + 1);
    let mut masks = vec![FeatureMask::empty(d); count];
    for (i, &l) in labels.iter().enumerate() {
        masks[l].set(i, true);
    }
    GroupSet::from_masks(d, provenance, masks)
}

pub fn quickshift_extract(map: &MassMap, params: &QuickshiftParams) -> Result<GroupSet> {
    labels_to_groups(&quickshift_labels(map, params)?, "quickshift")
}
