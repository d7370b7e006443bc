use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FixError, Result};
use crate::massmaps::MassMap;
use crate::mask::{FeatureMask, GroupSet};
use crate::sample::Sample;
use crate::supernova::LightCurve;

use super::GroupMaximum;

fn feature_count(sample: &Sample) -> Result<usize> {
    match sample.feature_count() {
        0 => Err(FixError::arg("sample has no features")),
        d => Ok(d),
    }
}

/// One group holding every feature.
pub fn identity_extract(sample: &Sample) -> Result<GroupSet> {
    let d = feature_count(sample)?;
    GroupSet::from_masks(d, "identity", [FeatureMask::full(d)])
}

/// Uniform random partition into `min(max_groups, d)` nonempty groups.
pub fn random_extract(sample: &Sample, gm: &GroupMaximum, seed: u64) -> Result<GroupSet> {
    let d = feature_count(sample)?;
    let k = gm.max_groups.min(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(&mut rng);
    let mut masks = vec![FeatureMask::empty(d); k];
    // The first k shuffled features seed one group each so none is empty.
    for (slot, &i) in order.iter().enumerate() {
        let g = if slot < k { slot } else { rng.gen_range(0..k) };
        masks[g].set(i, true);
    }
    GroupSet::from_masks(d, "random", masks)
}

/// Splits `0..len` into `parts` runs of `len / parts`, the last run taking
/// the remainder.
fn split(len: usize, parts: usize) -> Vec<(usize, usize)> {
    let base = len / parts;
    (0..parts)
        .map(|p| {
            let start = p * base;
            let end = if p + 1 == parts { len } else { start + base };
            (start, end)
        })
        .collect()
}

/// `rows × cols` rectangular cells in row-major order.
pub fn patch_extract(map: &MassMap, rows: usize, cols: usize) -> Result<GroupSet> {
    if rows == 0 || cols == 0 {
        return Err(FixError::param("grid", format!("must be positive, got {rows}x{cols}")));
    }
    if rows > map.height() {
        return Err(FixError::param(
            "rows",
            format!("{rows} exceeds raster height {}", map.height()),
        ));
    }
    if cols > map.width() {
        return Err(FixError::param(
            "cols",
            format!("{cols} exceeds raster width {}", map.width()),
        ));
    }
    let (h, w) = (map.height(), map.width());
    let mut set = GroupSet::new(h * w, "patch");
    for &(r0, r1) in &split(h, rows) {
        for &(c0, c1) in &split(w, cols) {
            let idx = (r0..r1).flat_map(|r| (c0..c1).map(move |c| r * w + c));
            set.push(FeatureMask::from_indices(h * w, idx)?)?;
        }
    }
    Ok(set)
}

/// Consecutive runs of `width` grid timestamps; the last may be shorter.
pub fn slice_extract(curve: &LightCurve, width: usize) -> Result<GroupSet> {
    if width == 0 {
        return Err(FixError::param("width", "must be at least 1"));
    }
    let d = curve.grid().len();
    if d == 0 {
        return Err(FixError::arg("light curve has no timestamps"));
    }
    let starts = (0..d).step_by(width);
    GroupSet::from_masks(
        d,
        "slice",
        starts
            .map(|s| FeatureMask::from_indices(d, s..(s + width).min(d)))
            .collect::<Result<Vec<_>>>()?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::supernova::Observation;

    fn map(h: usize, w: usize) -> MassMap {
        MassMap::new(h, w, vec![0.0; h * w]).unwrap()
    }

    fn curve(n: usize) -> LightCurve {
        LightCurve::new(
            (0..n)
                .map(|t| Observation {
                    time: t as f64,
                    band: "g".into(),
                    flux: 0.0,
                    flux_err: 1.0,
                })
                .collect(),
            Vec::new(),
        )
        .unwrap()
    }

    #[test]
    fn identity_examples() {
        let g = identity_extract(&Sample::Image(map(66, 66))).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.masks()[0].count(), 4356);
        let g = identity_extract(&Sample::Series(curve(5))).unwrap();
        assert_eq!(g.masks()[0].to_string(), "11111");
    }

    #[test]
    fn random_group_counts() {
        let gm = GroupMaximum::massmaps();
        let g = random_extract(&Sample::Image(map(66, 66)), &gm, 7).unwrap();
        assert_eq!(g.len(), 25);
        assert!(g.is_partition());
        assert!(g.iter().all(|m| m.count() > 0));

        let g = random_extract(&Sample::Series(curve(40)), &GroupMaximum::supernova(), 7).unwrap();
        assert_eq!(g.len(), 9);

        // Capped at d.
        let g = random_extract(&Sample::Series(curve(4)), &GroupMaximum::politeness(), 1).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.iter().all(|m| m.count() == 1));
    }

    #[test]
    fn random_is_seeded() {
        let x = Sample::Image(map(10, 10));
        let gm = GroupMaximum::massmaps();
        assert_eq!(random_extract(&x, &gm, 3).unwrap(), random_extract(&x, &gm, 3).unwrap());
        assert_ne!(random_extract(&x, &gm, 3).unwrap(), random_extract(&x, &gm, 4).unwrap());
    }

    #[test]
    fn patch_examples() {
        let g = patch_extract(&map(64, 64), 8, 8).unwrap();
        assert_eq!(g.len(), 64);
        assert!(g.iter().all(|m| m.count() == 64));

        let g = patch_extract(&map(66, 66), 8, 8).unwrap();
        assert_eq!(g.len(), 64);
        assert!(g.is_partition());
        let sizes: Vec<usize> = g.iter().map(FeatureMask::count).collect();
        assert_eq!(sizes[0], 64);
        assert_eq!(sizes[7], 8 * 10);
        assert_eq!(sizes[63], 10 * 10);

        let g = patch_extract(&map(4, 4), 2, 2).unwrap();
        assert_eq!(g.masks()[0].to_string(), "1100110000000000");
        assert_eq!(g.masks()[3].to_string(), "0000000000110011");

        assert!(matches!(patch_extract(&map(4, 4), 5, 2), Err(FixError::Parameter { name, .. }) if name == "rows"));
        assert!(patch_extract(&map(4, 4), 0, 2).is_err());
    }

    #[test]
    fn slice_examples() {
        assert_eq!(slice_extract(&curve(20), 5).unwrap().len(), 4);
        let g = slice_extract(&curve(23), 10).unwrap();
        let sizes: Vec<usize> = g.iter().map(FeatureMask::count).collect();
        assert_eq!(sizes, vec![10, 10, 3]);
        let g = slice_extract(&curve(7), 15).unwrap();
        assert_eq!(g.masks(), &[FeatureMask::full(7)]);
    }
}
