use crate::error::{FixError, Result};
use crate::mask::{FeatureMask, GroupSet};
use crate::sample::Sample;
use crate::text::EmbeddingTable;

use super::kmeans::kmeans;

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Rescales every column to zero mean and unit variance; constant columns
/// become zero.
fn standardize(rows: &mut [Vec<f64>]) {
    let dim = rows.first().map_or(0, Vec::len);
    for j in 0..dim {
        let column: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let (mean, std) = mean_std(&column);
        for r in rows.iter_mut() {
            r[j] = if std > 0.0 { (r[j] - mean) / std } else { 0.0 };
        }
    }
}

/// Raw-statistics descriptor of each base segment: `(mean, std, size)` of the
/// covered pixel values or fluxes, standardized per column; for text the mean
/// word embedding.
pub fn segment_descriptors(
    sample: &Sample,
    base: &GroupSet,
    embeddings: Option<&EmbeddingTable>,
) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = match sample {
        Sample::Image(map) => base
            .iter()
            .map(|g| {
                let values: Vec<f64> = g.ones().map(|i| map.pixels()[i]).collect();
                let (m, s) = mean_std(&values);
                vec![m, s, values.len() as f64]
            })
            .collect(),
        Sample::Series(curve) => base
            .iter()
            .map(|g| {
                let selected: Vec<f64> = curve.grid().iter().zip(g.bits()).filter(|(_, &b)| b).map(|(t, _)| *t).collect();
                let fluxes: Vec<f64> = curve
                    .observations()
                    .iter()
                    .filter(|o| selected.binary_search_by(|t| t.total_cmp(&o.time)).is_ok())
                    .map(|o| o.flux)
                    .collect();
                let (m, s) = mean_std(&fluxes);
                vec![m, s, g.count() as f64]
            })
            .collect(),
        Sample::Text(text) => {
            let table = embeddings.ok_or_else(|| {
                FixError::config("clustering text segments needs an embedding table")
            })?;
            return base
                .iter()
                .map(|g| table.mean_of(&text.selected_keys(g)?))
                .collect();
        }
    };
    standardize(&mut rows);
    Ok(rows)
}

/// Merges the segments of a base partition whose descriptors share a k-means
/// cluster. `k` is capped at the number of segments. Output masks are ordered
/// by the first segment of each cluster.
pub fn cluster_extract(
    sample: &Sample,
    base: &GroupSet,
    k: usize,
    seed: u64,
    embeddings: Option<&EmbeddingTable>,
) -> Result<GroupSet> {
    if k == 0 {
        return Err(FixError::param("k", "must be at least 1"));
    }
    if !base.is_partition() {
        return Err(FixError::arg("clustering needs a base partition"));
    }
    let descriptors = segment_descriptors(sample, base, embeddings)?;
    let labels = kmeans(&descriptors, k.min(base.len()), seed)?;
    let mut order: Vec<usize> = Vec::new();
    let mut merged: Vec<FeatureMask> = Vec::new();
    for (segment, &label) in base.iter().zip(&labels) {
        match order.iter().position(|&l| l == label) {
            Some(slot) => merged[slot].union_with(segment)?,
            None => {
                order.push(label);
                merged.push(segment.clone());
            }
        }
    }
    GroupSet::from_masks(base.d(), "clustering", merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::kmeans::inertia;
    use crate::extract::patch_extract;
    use crate::massmaps::MassMap;

    /// Cells of a 2x3 patch grid get distinct intensities; cells 0, 1, 3 low
    /// and 2, 4, 5 high.
    fn two_level_map() -> MassMap {
        let cell_value = [0.0, 0.3, 10.0, 0.1, 10.4, 9.7];
        let (h, w) = (4, 6);
        let px = (0..h * w)
            .map(|i| {
                let (r, c) = (i / w, i % w);
                cell_value[(r / 2) * 3 + c / 2] + 0.01 * (i % 2) as f64
            })
            .collect();
        MassMap::new(h, w, px).unwrap()
    }

    #[test]
    fn k_equal_segments_reproduces_base() {
        let map = two_level_map();
        let base = patch_extract(&map, 2, 3).unwrap();
        let out = cluster_extract(&Sample::Image(map), &base, base.len(), 5, None).unwrap();
        let mut a: Vec<String> = base.iter().map(|m| m.to_string()).collect();
        let mut b: Vec<String> = out.iter().map(|m| m.to_string()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn k_one_is_identity() {
        let map = two_level_map();
        let base = patch_extract(&map, 2, 3).unwrap();
        let out = cluster_extract(&Sample::Image(map), &base, 1, 5, None).unwrap();
        assert_eq!(out.masks(), &[FeatureMask::full(24)]);
    }

    #[test]
    fn two_clusters_match_exhaustive_best_split() {
        let map = two_level_map();
        let base = patch_extract(&map, 2, 3).unwrap();
        let sample = Sample::Image(map);
        let desc = segment_descriptors(&sample, &base, None).unwrap();
        // Exhaustive search over all 2-partitions of the 6 segments.
        let n = desc.len();
        let best = (1..(1u32 << (n - 1)))
            .map(|bits| {
                let labels: Vec<usize> = (0..n).map(|i| ((bits >> i) & 1) as usize).collect();
                (inertia(&desc, &labels), labels)
            })
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .unwrap()
            .1;
        let expected: Vec<usize> = vec![0, 0, 1, 0, 1, 1];
        let same = best == expected || best.iter().map(|l| 1 - l).collect::<Vec<_>>() == expected;
        assert!(same, "exhaustive optimum {best:?}");

        let out = cluster_extract(&sample, &base, 2, 1, None).unwrap();
        assert_eq!(out.len(), 2);
        let low = base.masks()[0].clone();
        let mut low_union = low.clone();
        for i in [1, 3] {
            low_union.union_with(&base.masks()[i]).unwrap();
        }
        assert!(out.masks().contains(&low_union));
        assert!(out.is_partition());
    }

    #[test]
    fn rejects_bad_inputs() {
        let map = two_level_map();
        let base = patch_extract(&map, 2, 3).unwrap();
        let sample = Sample::Image(map);
        assert!(matches!(cluster_extract(&sample, &base, 0, 0, None), Err(FixError::Parameter { .. })));
        let mut overlapping = base.clone();
        overlapping.push(FeatureMask::full(24)).unwrap();
        assert!(cluster_extract(&sample, &overlapping, 2, 0, None).is_err());
    }
}
