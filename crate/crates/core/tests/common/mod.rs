#![allow(dead_code)]

use fixscore::error::Result;
use fixscore::{AlignmentScore, AlignmentScorer, FeatureMask, GroupSet, MassMap, Modality, Sample};
use rand::Rng;

/// A sample of `d` features whose content no test scorer looks at.
pub fn blank_sample(d: usize) -> Sample {
    Sample::Image(MassMap::new(1, d, vec![0.0; d]).unwrap())
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic pseudo-random score in `[floor, 1]` for each distinct mask.
pub fn hashed_score(bits: &[bool], salt: u64, floor: f64) -> f64 {
    let mut h = salt;
    for (i, &b) in bits.iter().enumerate() {
        if b {
            h = splitmix(h ^ (i as u64 + 1));
        }
    }
    h = splitmix(h ^ bits.len() as u64);
    floor + (1.0 - floor) * ((h >> 11) as f64 / (1u64 << 53) as f64)
}

/// Scores each mask by hashing its bits.
pub struct HashScorer {
    pub salt: u64,
    pub floor: f64,
}

impl AlignmentScorer for HashScorer {
    fn name(&self) -> &str {
        "hash"
    }

    fn modality(&self) -> Option<Modality> {
        None
    }

    fn score(&self, group: &FeatureMask, _: &Sample) -> Result<AlignmentScore> {
        Ok(AlignmentScore::from_raw(hashed_score(group.bits(), self.salt, self.floor)))
    }
}

/// Double loop over features and groups with no caching.
pub fn naive_fix_score(d: usize, groups: &[Vec<bool>], score: impl Fn(&[bool]) -> f64) -> f64 {
    let mut total = 0.0;
    for i in 0..d {
        let mut sum = 0.0;
        let mut count = 0usize;
        for g in groups {
            if g[i] {
                sum += score(g);
                count += 1;
            }
        }
        total += if count == 0 { 0.0 } else { sum / count as f64 };
    }
    total / d as f64
}

pub fn naive_iou(a: &[bool], b: &[bool]) -> f64 {
    let inter = a.iter().zip(b).filter(|(x, y)| **x && **y).count();
    let union = a.iter().zip(b).filter(|(x, y)| **x || **y).count();
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn naive_explicit(g: &[bool], annotations: &[Vec<bool>]) -> f64 {
    annotations.iter().map(|a| naive_iou(g, a)).fold(0.0, f64::max)
}

pub fn random_bits(rng: &mut impl Rng, d: usize, p: f64) -> Vec<bool> {
    (0..d).map(|_| rng.gen_bool(p)).collect()
}

/// `k` nonempty masks over `d` features that together cover every feature.
pub fn random_cover(rng: &mut impl Rng, d: usize, k: usize) -> Vec<Vec<bool>> {
    let p = rng.gen_range(0.05..0.6);
    let mut masks: Vec<Vec<bool>> = (0..k).map(|_| random_bits(rng, d, p)).collect();
    for i in 0..d {
        if !masks.iter().any(|m| m[i]) {
            let j = rng.gen_range(0..k);
            masks[j][i] = true;
        }
    }
    for m in masks.iter_mut() {
        if !m.iter().any(|&b| b) {
            let i = rng.gen_range(0..d);
            m[i] = true;
        }
    }
    masks
}

pub fn group_set(d: usize, masks: &[Vec<bool>]) -> GroupSet {
    GroupSet::from_masks(d, "test", masks.iter().cloned().map(FeatureMask::from_bits)).unwrap()
}

pub fn assert_partition(set: &GroupSet, context: &str) {
    let d = set.d();
    let mut seen = vec![0usize; d];
    for g in set {
        assert!(g.count() > 0, "{context}: empty group");
        for i in g.ones() {
            seen[i] += 1;
        }
    }
    assert!(
        seen.iter().all(|&c| c == 1),
        "{context}: not a partition (coverage {seen:?})"
    );
}

pub const VOCAB: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta", "iota", "kappa", "lambda", "mu",
];
const PUNCT: &[&str] = &["", "", "", "", ",", ".", ";", "!", "?", ":"];

pub fn random_map(rng: &mut impl Rng, max_side: usize) -> MassMap {
    let h = rng.gen_range(1..=max_side);
    let w = rng.gen_range(1..=max_side);
    let levels = rng.gen_range(1..=4);
    let px = (0..h * w)
        .map(|_| rng.gen_range(0..levels) as f64 * 1.5 + rng.gen_range(-0.3..0.3))
        .collect();
    MassMap::new(h, w, px).unwrap()
}

pub fn random_series(rng: &mut impl Rng, max_points: usize) -> fixscore::LightCurve {
    let n = rng.gen_range(1..=max_points);
    let obs = (0..n)
        .map(|_| fixscore::Observation {
            time: rng.gen_range(0..60) as f64,
            band: ["g", "r", "i"][rng.gen_range(0..3)].to_string(),
            flux: rng.gen_range(-10.0..10.0),
            flux_err: rng.gen_range(0.0..2.0),
        })
        .collect();
    let empty = (0..rng.gen_range(0..=3)).map(|k| 100.0 + k as f64).collect();
    fixscore::LightCurve::new(obs, empty).unwrap()
}

pub fn random_text(rng: &mut impl Rng, max_words: usize) -> fixscore::TokenizedText {
    let n = rng.gen_range(1..=max_words);
    let raw: Vec<String> = (0..n)
        .map(|_| {
            let w = VOCAB[rng.gen_range(0..VOCAB.len())];
            format!("{w}{}", PUNCT[rng.gen_range(0..PUNCT.len())])
        })
        .collect();
    fixscore::TokenizedText::from_raw("en", &raw.join(" "))
}

pub fn random_table(rng: &mut impl Rng, words: &[&str], dim: usize) -> fixscore::EmbeddingTable {
    let mut t = fixscore::EmbeddingTable::new(dim);
    for w in words {
        t.insert(w, (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    }
    t
}

/// Score of the all-pixels group of a mass map, from first principles.
pub fn massmap_whole_map_score(px: &[f64]) -> f64 {
    let n = px.len() as f64;
    let mean = px.iter().sum::<f64>() / n;
    let sigma = (px.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let void = px.iter().filter(|&&v| v < 0.0).count() as f64 / n;
    let cluster = px.iter().filter(|&&v| v > 3.0 * sigma).count() as f64 / n;
    let (a, b) = (void + 1e-6, cluster + 1e-6);
    let (qv, qc) = (a / (a + b), b / (a + b));
    let entropy = -(qv * qv.log2() + qc * qc.log2());
    (1.0 - entropy) * (void + cluster)
}

// Light-curve brute-force references.

pub const BANDS: [&str; 2] = ["g", "r"];

/// Up to `max_points` observations on half-day times, plus a few empty times.
pub fn random_curve(rng: &mut impl Rng, max_points: usize) -> fixscore::LightCurve {
    let n = rng.gen_range(1..=max_points);
    let observations = (0..n)
        .map(|_| fixscore::Observation {
            time: rng.gen_range(0..40) as f64 * 0.5,
            band: BANDS[rng.gen_range(0..BANDS.len())].to_string(),
            flux: rng.gen_range(-5.0..5.0),
            flux_err: if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..3.0) },
        })
        .collect();
    let empty = (0..rng.gen_range(0..=2))
        .map(|_| rng.gen_range(0..40) as f64 * 0.5 + 0.25)
        .collect();
    fixscore::LightCurve::new(observations, empty).unwrap()
}

pub fn selected_points<'a>(curve: &'a fixscore::LightCurve, mask: &[bool], band: &str) -> Vec<&'a fixscore::Observation> {
    let grid = curve.grid();
    curve
        .observations()
        .iter()
        .filter(|o| o.band == band)
        .filter(|o| {
            let gi = grid.iter().position(|&t| t == o.time).unwrap();
            mask[gi]
        })
        .collect()
}

pub fn brute_p(points: &[&fixscore::Observation], eps: f64) -> f64 {
    let m = points.len();
    if m == 0 {
        return 0.0;
    }
    if m == 1 {
        return 1.0;
    }
    let n = m as f64;
    let st: f64 = points.iter().map(|o| o.time).sum();
    let sy: f64 = points.iter().map(|o| o.flux).sum();
    let stt: f64 = points.iter().map(|o| o.time * o.time).sum();
    let sty: f64 = points.iter().map(|o| o.time * o.flux).sum();
    let (slope, intercept) = if points.iter().all(|o| o.time == points[0].time) {
        (0.0, sy / n)
    } else {
        let slope = (n * sty - st * sy) / (n * stt - st * st);
        (slope, (sy - slope * st) / n)
    };
    let hits = points
        .iter()
        .filter(|o| {
            let r = (slope * o.time + intercept - o.flux).abs();
            r <= eps * o.flux_err + 1e-9 * (1.0 + o.flux.abs())
        })
        .count();
    hits as f64 / n
}

pub fn brute_d(curve: &fixscore::LightCurve, mask: &[bool], points: &[&fixscore::Observation], window: f64, step: f64) -> f64 {
    let selected: Vec<f64> = curve
        .grid()
        .iter()
        .zip(mask)
        .filter(|(_, &b)| b)
        .map(|(t, _)| *t)
        .collect();
    if selected.is_empty() || points.is_empty() {
        return 0.0;
    }
    let start = selected[0];
    let end = *selected.last().unwrap();
    let count = ((end - start) / step).floor().max(1.0) as usize;
    let mut hit = 0;
    for i in 0..count {
        let lo = start + step * i as f64;
        if points.iter().any(|o| lo <= o.time && o.time <= lo + window) {
            hit += 1;
        }
    }
    hit as f64 / count as f64
}

