//! Void/cluster purity scoring for weak-lensing mass maps.
//!
//! A pixel is void when its value is below 0 and cluster when it exceeds
//! `3 σ(x)`, with `σ` the population standard deviation of the whole map. A
//! group scores `purity · ratio`: purity is one minus the two-class
//! entropy (bits) of the void/cluster split among its interpretable pixels,
//! ratio is the fraction of its pixels that are interpretable at all.

use crate::error::{FixError, Result};
use crate::mask::FeatureMask;
use crate::sample::{Modality, Sample};
use crate::scoring::{AlignmentScore, AlignmentScorer};

/// Additive smoothing applied to the void/cluster proportions before the
/// entropy is taken.
pub const PURITY_EPS: f64 = 1e-6;

/// A single-channel raster stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MassMap {
    height: usize,
    width: usize,
    pixels: Vec<f64>,
}

impl MassMap {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(FixError::arg(format!(
                "raster must be at least 1x1, got {height}x{width}"
            )));
        }
        if pixels.len() != height * width {
            return Err(FixError::arg(format!(
                "raster {height}x{width} needs {} values, got {}",
                height * width,
                pixels.len()
            )));
        }
        if let Some(i) = pixels.iter().position(|v| !v.is_finite()) {
            return Err(FixError::arg(format!("non-finite pixel value at index {i}")));
        }
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Pixel count `d = H·W`.
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Population standard deviation over all pixels.
    pub fn std(&self) -> f64 {
        let n = self.pixels.len() as f64;
        let mean = self.pixels.iter().sum::<f64>() / n;
        let var = self.pixels.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        var.sqrt()
    }
}

/// Classification thresholds: void below `void_below`, cluster above
/// `cluster_sigmas · σ(x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub void_below: f64,
    pub cluster_sigmas: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            void_below: 0.0,
            cluster_sigmas: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PixelClassification {
    pub void_mask: FeatureMask,
    pub cluster_mask: FeatureMask,
    pub sigma: f64,
}

pub fn classify_pixels(map: &MassMap, thresholds: Thresholds) -> PixelClassification {
    let sigma = map.std();
    let cluster_cut = thresholds.cluster_sigmas * sigma;
    let void = map.pixels.iter().map(|&v| v < thresholds.void_below).collect();
    // A pixel cannot be both; void wins if thresholds are configured to overlap.
    let cluster = map
        .pixels
        .iter()
        .map(|&v| v > cluster_cut && v >= thresholds.void_below)
        .collect();
    PixelClassification {
        void_mask: FeatureMask::from_bits(void),
        cluster_mask: FeatureMask::from_bits(cluster),
        sigma,
    }
}

/// Fractions `(P_v, P_c)` of the group's pixels that are void / cluster.
pub fn proportions(group: &FeatureMask, class: &PixelClassification) -> Result<(f64, f64)> {
    let n = group.count();
    if n == 0 {
        return Err(FixError::arg("proportions of an empty group"));
    }
    let void = group.intersection_count(&class.void_mask)?;
    let cluster = group.intersection_count(&class.cluster_mask)?;
    Ok((void as f64 / n as f64, cluster as f64 / n as f64))
}

/// Purity from already-computed proportions.
pub fn purity_from_proportions(p_void: f64, p_cluster: f64) -> f64 {
    let v = p_void + PURITY_EPS;
    let c = p_cluster + PURITY_EPS;
    let pv = v / (v + c);
    let pc = c / (v + c);
    let entropy = -(pv * pv.log2() + pc * pc.log2());
    (1.0 - entropy).clamp(0.0, 1.0)
}

pub fn purity(group: &FeatureMask, class: &PixelClassification) -> Result<f64> {
    let (pv, pc) = proportions(group, class)?;
    Ok(purity_from_proportions(pv, pc))
}

/// `purity · ratio` for a group. Empty groups score 0.
pub fn massmap_expert_align(
    group: &FeatureMask,
    class: &PixelClassification,
) -> Result<AlignmentScore> {
    if group.count() == 0 {
        return Ok(AlignmentScore::ZERO);
    }
    let (pv, pc) = proportions(group, class)?;
    Ok(AlignmentScore::from_raw(
        purity_from_proportions(pv, pc) * (pv + pc),
    ))
}

#[derive(Clone, Debug, Default)]
pub struct MassMapScorer {
    pub thresholds: Thresholds,
}

impl AlignmentScorer for MassMapScorer {
    fn name(&self) -> &str {
        "massmaps"
    }

    fn modality(&self) -> Option<Modality> {
        Some(Modality::Image)
    }

    fn score(&self, group: &FeatureMask, sample: &Sample) -> Result<AlignmentScore> {
        let Sample::Image(map) = sample else {
            return Err(FixError::config(format!(
                "massmaps scorer cannot score {} samples",
                sample.modality()
            )));
        };
        if group.len() != map.len() {
            return Err(FixError::arg(format!(
                "mask length {} does not match raster size {}",
                group.len(),
                map.len()
            )));
        }
        let class = classify_pixels(map, self.thresholds);
        massmap_expert_align(group, &class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn classify(values: Vec<f64>) -> PixelClassification {
        let n = values.len();
        classify_pixels(&MassMap::new(1, n, values).unwrap(), Thresholds::default())
    }

    #[test]
    fn all_negative_map_is_void() {
        let c = classify(vec![-1.0; 6]);
        assert_eq!(c.void_mask.count(), 6);
        assert_eq!(c.cluster_mask.count(), 0);
    }

    #[test]
    fn constant_positive_map_is_all_cluster() {
        let c = classify(vec![0.5; 6]);
        assert_eq!(c.sigma, 0.0);
        assert_eq!(c.void_mask.count(), 0);
        assert_eq!(c.cluster_mask.count(), 6);
    }

    #[test]
    fn single_outlier_is_the_only_cluster() {
        // 99 zeros and one large value: mean ≈ v/100, σ ≈ v·√99/100 ≈ 0.0995 v.
        let mut values = vec![0.0; 100];
        values[42] = 10.0;
        let c = classify(values);
        assert_eq!(c.cluster_mask.ones().collect::<Vec<_>>(), vec![42]);
        assert_eq!(c.void_mask.count(), 0);
    }

    #[test]
    fn proportions_by_counting() {
        // 3 void, 1 cluster, 4 neutral among the group's 8 pixels.
        let void = FeatureMask::parse_bitstring("1110000000").unwrap();
        let cluster = FeatureMask::parse_bitstring("0001000000").unwrap();
        let class = PixelClassification {
            void_mask: void,
            cluster_mask: cluster,
            sigma: 1.0,
        };
        let g = FeatureMask::parse_bitstring("1111111100").unwrap();
        assert_eq!(proportions(&g, &class).unwrap(), (0.375, 0.125));
        let s = massmap_expert_align(&g, &class).unwrap().value();
        // P' ≈ (0.75, 0.25) after smoothing; ratio 0.5.
        assert!((purity(&g, &class).unwrap() - 0.188_720_290_588_553_44).abs() < 1e-12);
        assert!((s - 0.094_360_145_294_276_72).abs() < 1e-12);
        assert!(proportions(&FeatureMask::empty(10), &class).is_err());
    }

    #[test]
    fn purity_corner_values() {
        assert!((purity_from_proportions(1.0, 0.0) - 1.0).abs() < 1e-4);
        assert!(purity_from_proportions(0.5, 0.5).abs() < 1e-12);
        assert!(purity_from_proportions(0.2, 0.2).abs() < 1e-12);
    }

    #[test]
    fn neutral_group_scores_exactly_zero() {
        let c = classify(vec![0.1, 0.1, 0.1, 0.1, 9.0, -1.0]);
        let g = FeatureMask::parse_bitstring("111100").unwrap();
        assert_eq!(massmap_expert_align(&g, &c).unwrap().value(), 0.0);
    }

    #[test]
    fn empty_group_scores_zero() {
        let c = classify(vec![-1.0, 1.0]);
        assert_eq!(
            massmap_expert_align(&FeatureMask::empty(2), &c).unwrap().value(),
            0.0
        );
    }

    fn map_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
        (2usize..40).prop_flat_map(|n| {
            (
                proptest::collection::vec(-3.0f64..6.0, n),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        #[test]
        fn score_components_in_unit_interval((values, bits) in map_strategy()) {
            let n = values.len();
            let c = classify(values);
            let g = FeatureMask::from_bits(bits);
            prop_assume!(g.count() > 0);
            let p = purity(&g, &c).unwrap();
            let (pv, pc) = proportions(&g, &c).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((0.0..=1.0).contains(&(pv + pc)));
            let s = massmap_expert_align(&g, &c).unwrap().value();
            prop_assert!((0.0..=1.0).contains(&s));
            prop_assert_eq!(g.len(), n);
        }

        #[test]
        fn purity_symmetric_in_labels(v in 0usize..20, c in 0usize..20, neutral in 0usize..20) {
            prop_assume!(v + c + neutral > 0);
            let n = (v + c + neutral) as f64;
            let a = purity_from_proportions(v as f64 / n, c as f64 / n);
            let b = purity_from_proportions(c as f64 / n, v as f64 / n);
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn positive_rescaling_keeps_score((values, bits) in map_strategy(), k in -4i32..5) {
            let scale = 2f64.powi(k);
            let g = FeatureMask::from_bits(bits);
            let a = classify(values.clone());
            let b = classify(values.iter().map(|v| v * scale).collect());
            prop_assert_eq!(&a.void_mask, &b.void_mask);
            prop_assert_eq!(&a.cluster_mask, &b.cluster_mask);
            prop_assert_eq!(
                massmap_expert_align(&g, &a).unwrap(),
                massmap_expert_align(&g, &b).unwrap()
            );
        }

        #[test]
        fn adding_neutral_pixel_never_helps(v in 0usize..10, c in 0usize..10, neutral in 0usize..10) {
            prop_assume!(v + c + neutral > 0);
            let score = |neutral: usize| {
                let n = (v + c + neutral) as f64;
                let (pv, pc) = (v as f64 / n, c as f64 / n);
                purity_from_proportions(pv, pc) * (pv + pc)
            };
            prop_assert!(score(neutral + 1) <= score(neutral));
        }
    }
}
