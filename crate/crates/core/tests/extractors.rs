mod common;

use common::*;
use fixscore::extract::{
    cluster_extract, patch_extract, quickshift_extract, slice_extract, text_extract, Granularity,
    QuickshiftParams,
};
use fixscore::{ExtractContext, ExtractorKind, FeatureMask, GroupMaximum, MassMap, Sample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx(seed: u64, table: Option<&fixscore::EmbeddingTable>) -> ExtractContext<'_> {
    ExtractContext {
        seed,
        group_maximum: GroupMaximum::new(4, 1.5).unwrap(),
        embeddings: table,
    }
}

fn kinds(specs: &[&str]) -> Vec<ExtractorKind> {
    specs.iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn image_extractors_partition_random_rasters() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let specs = kinds(&[
        "identity",
        "random",
        "random:3",
        "patch:2x3",
        "patch",
        "quickshift",
        "quickshift:kernel=1,max_dist=3,sigma=0,ratio=4",
        "clustering:k=3,base=quickshift:kernel=1,max_dist=3,ratio=4",
        "clustering:base=patch:3x3",
    ]);
    for case in 0..60 {
        let map = random_map(&mut rng, 12);
        let (h, w) = (map.height(), map.width());
        let sample = Sample::Image(map);
        for k in &specs {
            let oversized = |r: usize, c: usize| r > h || c > w;
            let grid = match k {
                ExtractorKind::Patch { rows, cols } => Some((*rows, *cols)),
                ExtractorKind::Clustering { base, .. } => match base.as_ref() {
                    ExtractorKind::Patch { rows, cols } => Some((*rows, *cols)),
                    _ => None,
                },
                _ => None,
            };
            if let Some((r, c)) = grid.filter(|&(r, c)| oversized(r, c)) {
                assert!(k.extract(&sample, &ctx(case, None)).is_err(), "{k}: {r}x{c} grid on {h}x{w}");
                continue;
            }
            let set = k.extract(&sample, &ctx(case, None)).unwrap();
            assert_partition(&set, &format!("{k} case {case}"));
        }
    }
}

#[test]
fn series_extractors_partition_random_curves() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let specs = kinds(&["identity", "random", "slice", "slice:1", "slice:10", "clustering:k=2,base=slice:2"]);
    for case in 0..100 {
        let sample = Sample::Series(random_series(&mut rng, 20));
        for k in &specs {
            let set = k.extract(&sample, &ctx(case, None)).unwrap();
            assert_partition(&set, &format!("{k} case {case}"));
        }
    }
}

#[test]
fn text_extractors_partition_random_texts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let table = random_table(&mut rng, VOCAB, 4);
    let specs = kinds(&[
        "identity",
        "random",
        "words",
        "phrases",
        "sentences",
        "clustering:k=2,base=phrases",
    ]);
    for case in 0..100 {
        let sample = Sample::Text(random_text(&mut rng, 15));
        for k in &specs {
            let set = k.extract(&sample, &ctx(case, Some(&table))).unwrap();
            assert_partition(&set, &format!("{k} case {case}"));
        }
    }
}

#[test]
fn same_seed_same_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let px = (0..256).map(|_| rng.gen_range(-1.0..3.0)).collect();
    let map = Sample::Image(MassMap::new(16, 16, px).unwrap());
    for spec in ["random", "clustering:k=3,base=patch:4x4"] {
        let k: ExtractorKind = spec.parse().unwrap();
        let a = k.extract(&map, &ctx(77, None)).unwrap();
        let b = k.extract(&map, &ctx(77, None)).unwrap();
        assert_eq!(a.masks(), b.masks(), "{spec}");
    }
    let k: ExtractorKind = "random".parse().unwrap();
    let big = Sample::Image(MassMap::new(16, 16, vec![0.0; 256]).unwrap());
    let a = k.extract(&big, &ctx(1, None)).unwrap();
    let b = k.extract(&big, &ctx(2, None)).unwrap();
    assert_ne!(a.masks(), b.masks());
}

#[test]
fn random_uses_the_group_maximum() {
    let big = Sample::Image(MassMap::new(30, 30, vec![0.0; 900]).unwrap());
    let k = ExtractorKind::Random { max_groups: None };
    for (gm, want) in [
        (GroupMaximum::massmaps(), 25),
        (GroupMaximum::supernova(), 9),
        (GroupMaximum::politeness(), 40),
    ] {
        let c = ExtractContext { seed: 5, group_maximum: gm, embeddings: None };
        assert_eq!(k.extract(&big, &c).unwrap().len(), want);
    }
    let tiny = Sample::Image(MassMap::new(1, 3, vec![0.0; 3]).unwrap());
    let c = ExtractContext { seed: 5, group_maximum: GroupMaximum::massmaps(), embeddings: None };
    assert_eq!(k.extract(&tiny, &c).unwrap().len(), 3);
}

#[test]
fn patch_remainders_go_to_the_last_cells() {
    let map = MassMap::new(66, 66, vec![0.0; 66 * 66]).unwrap();
    let set = patch_extract(&map, 8, 8).unwrap();
    assert_eq!(set.len(), 64);
    let sizes: Vec<usize> = set.iter().map(FeatureMask::count).collect();
    assert_eq!(sizes[0], 64);
    assert_eq!(sizes[7], 8 * 10);
    assert_eq!(sizes[63], 10 * 10);
    assert!(patch_extract(&map, 0, 8).is_err());
    assert!(patch_extract(&MassMap::new(4, 4, vec![0.0; 16]).unwrap(), 2, 2)
        .unwrap()
        .iter()
        .all(|g| g.count() == 4));
}

#[test]
fn slice_remainder_is_short() {
    let obs = (0..23)
        .map(|t| fixscore::Observation { time: t as f64, band: "g".into(), flux: 0.0, flux_err: 1.0 })
        .collect();
    let curve = fixscore::LightCurve::new(obs, vec![]).unwrap();
    let sizes: Vec<usize> = slice_extract(&curve, 10).unwrap().iter().map(FeatureMask::count).collect();
    assert_eq!(sizes, vec![10, 10, 3]);
    assert_eq!(slice_extract(&curve, 40).unwrap().len(), 1);
}

#[test]
fn words_are_singletons_and_phrases_split_at_punctuation() {
    let t = fixscore::TokenizedText::from_raw("en", "a b, c d.");
    let words = text_extract(&t, Granularity::Words).unwrap();
    assert_eq!(words.len(), 4);
    assert!(words.iter().all(|g| g.count() == 1));
    let phrases = text_extract(&t, Granularity::Phrases).unwrap();
    let shown: Vec<String> = phrases.iter().map(ToString::to_string).collect();
    assert_eq!(shown, vec!["1100", "0011"]);
    assert_eq!(text_extract(&t, Granularity::Sentences).unwrap().len(), 1);
}

#[test]
fn constant_raster_quickshift_is_a_partition() {
    let map = MassMap::new(10, 10, vec![1.0; 100]).unwrap();
    let set = quickshift_extract(&map, &QuickshiftParams::default()).unwrap();
    assert_partition(&set, "constant");
    assert!(set.len() <= 4);
}

#[test]
fn clustering_with_one_cluster_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let map = random_map(&mut rng, 10);
    let base = patch_extract(&map, 2, 2).unwrap();
    let sample = Sample::Image(map);
    let one = cluster_extract(&sample, &base, 1, 3, None).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one.masks()[0].count(), sample.feature_count());
    let all = cluster_extract(&sample, &base, base.len(), 3, None).unwrap();
    let mut a: Vec<String> = all.iter().map(ToString::to_string).collect();
    let mut b: Vec<String> = base.iter().map(ToString::to_string).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn extractor_modality_mismatch_is_a_usage_error() {
    let k: ExtractorKind = "patch".parse().unwrap();
    let text = Sample::Text(fixscore::TokenizedText::from_raw("en", "a b"));
    let err = k.extract(&text, &ctx(0, None)).unwrap_err();
    assert!(err.is_usage(), "{err}");
}
