//! Deterministic synthetic corpora for smoke tests and demos.
//!
//! Layout written by [`write_corpus`]:
//!
//! ```text
//! image/NNN.txt                 mass-map-like rasters (implicit)
//! explicit/NNN.txt, NNN.rle     label rasters with annotated regions
//! series/NNN.csv                three-band light curves
//! text/corpus.tsv               language<TAB>text records
//! text/embeddings.tsv, text/lexicon.txt, text/anchors.txt
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::io::{format_groups, format_raster, format_series, write_string};
use crate::error::Result;
use crate::mask::{FeatureMask, GroupSet};
use crate::massmaps::MassMap;
use crate::supernova::{LightCurve, Observation};

pub const MAP_SIDE: usize = 24;

/// Smooth background with a few bright peaks and broad negative troughs.
pub fn synth_massmap(rng: &mut impl Rng, side: usize) -> MassMap {
    let mut px = vec![0.0; side * side];
    let mut add_blob = |amp: f64, width: f64, r0: f64, c0: f64| {
        for (i, v) in px.iter_mut().enumerate() {
            let (r, c) = ((i / side) as f64, (i % side) as f64);
            let d2 = (r - r0).powi(2) + (c - c0).powi(2);
            *v += amp * (-d2 / (2.0 * width * width)).exp();
        }
    };
    let s = side as f64;
    for _ in 0..rng.gen_range(2..=4) {
        add_blob(rng.gen_range(3.0..6.0), rng.gen_range(0.8..1.6), rng.gen_range(0.0..s), rng.gen_range(0.0..s));
    }
    for _ in 0..rng.gen_range(2..=3) {
        add_blob(-rng.gen_range(0.6..1.2), rng.gen_range(3.0..5.0), rng.gen_range(0.0..s), rng.gen_range(0.0..s));
    }
    let offset = rng.gen_range(0.1..0.3);
    for v in px.iter_mut() {
        *v += offset + rng.gen_range(-0.15..0.15);
    }
    MassMap::new(side, side, px).expect("finite synthetic raster")
}

/// A label raster with two rectangles on a background, and the three regions
/// as annotated masks.
pub fn synth_labeled(rng: &mut impl Rng, side: usize) -> (MassMap, GroupSet) {
    let mut labels = vec![0usize; side * side];
    for label in 1..=2 {
        let h = rng.gen_range(3..side / 2);
        let w = rng.gen_range(3..side / 2);
        let r0 = rng.gen_range(0..side - h);
        let c0 = rng.gen_range(0..side - w);
        for r in r0..r0 + h {
            for c in c0..c0 + w {
                labels[r * side + c] = label;
            }
        }
    }
    let px = labels
        .iter()
        .map(|&l| l as f64 * 2.0 + rng.gen_range(-0.2..0.2))
        .collect();
    let names = ["background", "organ", "tool"];
    let mut set = GroupSet::new(side * side, "annotation");
    for (label, name) in names.iter().enumerate() {
        let mask = FeatureMask::from_bits(labels.iter().map(|&l| l == label).collect());
        if mask.count() > 0 {
            set.push_labeled(mask, Some(name.to_string())).expect("same d");
        }
    }
    (MassMap::new(side, side, px).expect("finite raster"), set)
}

/// Three bands sampled on a 3-day cadence with one or two flux humps.
pub fn synth_light_curve(rng: &mut impl Rng) -> LightCurve {
    let cadence = 3.0;
    let steps = 31;
    let humps: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=2))
        .map(|_| (rng.gen_range(10.0..80.0), rng.gen_range(5.0..15.0), rng.gen_range(20.0..60.0)))
        .collect();
    let mut observations = Vec::new();
    for (b, band) in ["g", "r", "i"].iter().enumerate() {
        let scale = 1.0 - 0.2 * b as f64;
        for k in 0..steps {
            if rng.gen_bool(0.4) {
                continue;
            }
            let t = 60000.0 + cadence * k as f64;
            let signal: f64 = humps
                .iter()
                .map(|&(t0, w, a)| a * scale * (-(t - 60000.0 - t0).powi(2) / (2.0 * w * w)).exp())
                .sum();
            let flux_err = rng.gen_range(0.5..2.0);
            let noise = flux_err * rng.gen_range(-1.5..1.5);
            observations.push(Observation {
                time: t,
                band: band.to_string(),
                flux: signal + noise,
                flux_err,
            });
        }
    }
    let empty: Vec<f64> = (0..rng.gen_range(0..=2))
        .map(|k| 60000.0 + cadence * (steps + k) as f64)
        .collect();
    LightCurve::new(observations, empty).expect("finite synthetic curve")
}

const POLITE: &[(&str, &[&str])] = &[
    ("Gratitude", &["thanks", "thank", "grateful", "appreciate"]),
    ("Please", &["please", "kindly"]),
    ("Apology", &["sorry", "apologize", "regret"]),
    ("Greeting", &["hello", "hi", "welcome"]),
];
const POLITE_ES: &[(&str, &[&str])] = &[
    ("Gratitud", &["gracias", "agradezco"]),
    ("Disculpa", &["perdon", "disculpe"]),
];
const NEUTRAL: &[&str] = &[
    "the", "report", "meeting", "tomorrow", "we", "can", "send", "file", "code", "review", "today",
    "you", "i", "will", "check", "it", "again", "later", "is", "ready",
];
const NEUTRAL_ES: &[&str] = &["el", "informe", "manana", "enviar", "codigo", "hoy", "listo"];
const ANCHORS: &[(&str, &[&str])] = &[
    ("PV", &["happy", "pleased", "delighted", "excited", "satisfied"]),
    ("NV", &["miserable", "frustrated", "sad", "depressed", "afraid"]),
    ("HA", &["astonished", "alarmed", "angry", "afraid", "excited"]),
    ("LA", &["tired", "sleepy", "calm", "satisfied", "depressed"]),
];

pub const EMBED_DIM: usize = 8;

fn jitter(rng: &mut impl Rng, base: &[f64], amount: f64) -> Vec<f64> {
    base.iter().map(|v| v + rng.gen_range(-amount..amount)).collect()
}

fn random_vec(rng: &mut impl Rng) -> Vec<f64> {
    (0..EMBED_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

/// Embedding table, lexicon and anchors files plus `n` text records.
pub fn synth_text(rng: &mut impl Rng, n: usize) -> (String, String, String, String) {
    let mut embeddings = String::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut emit = |out: &mut String, word: &str, v: Vec<f64>| {
        if seen.insert(word.to_string()) {
            let _ = writeln!(out, "{word}\t{}", fmt_vec(&v));
        }
    };
    for (_, words) in POLITE.iter().chain(POLITE_ES) {
        let center = random_vec(rng);
        for w in *words {
            let v = jitter(rng, &center, 0.15);
            emit(&mut embeddings, w, v);
        }
    }
    for w in NEUTRAL.iter().chain(NEUTRAL_ES) {
        let v = random_vec(rng);
        emit(&mut embeddings, w, v);
    }
    // Emotion anchors on a rough circle in the first two dimensions.
    let angle = |name: &str| match name {
        "PV" => 0.0,
        "HA" => PI / 2.0,
        "NV" => PI,
        _ => 1.5 * PI,
    };
    for (pole, words) in ANCHORS {
        let mut base = vec![0.0; EMBED_DIM];
        base[0] = angle(pole).cos();
        base[1] = angle(pole).sin();
        for w in *words {
            let v = jitter(rng, &base, 0.1);
            emit(&mut embeddings, w, v);
        }
    }

    let mut lexicon = String::new();
    for (cat, words) in POLITE {
        let _ = writeln!(lexicon, "{cat}: {}", words.join(", "));
    }
    for (cat, words) in POLITE_ES {
        let _ = writeln!(lexicon, "es/{cat}: {}", words.join(", "));
    }
    let mut anchors = String::new();
    for (pole, words) in ANCHORS {
        let _ = writeln!(anchors, "{pole}: {}", words.join(", "));
    }

    let emotion_words: Vec<&str> = ANCHORS.iter().flat_map(|(_, w)| w.iter().copied()).collect();
    let mut corpus = String::new();
    for i in 0..n {
        let spanish = i % 5 == 4;
        let (polite, neutral): (Vec<&str>, &[&str]) = if spanish {
            (POLITE_ES.iter().flat_map(|(_, w)| w.iter().copied()).collect(), NEUTRAL_ES)
        } else {
            (POLITE.iter().flat_map(|(_, w)| w.iter().copied()).collect(), NEUTRAL)
        };
        let len = rng.gen_range(5..=12);
        let mut words = Vec::with_capacity(len);
        for k in 0..len {
            let roll: f64 = rng.gen();
            let w = if roll < 0.3 {
                polite[rng.gen_range(0..polite.len())]
            } else if roll < 0.45 && !spanish {
                emotion_words[rng.gen_range(0..emotion_words.len())]
            } else {
                neutral[rng.gen_range(0..neutral.len())]
            };
            let punct = if k + 1 == len {
                "."
            } else if rng.gen_bool(0.15) {
                ","
            } else if rng.gen_bool(0.08) {
                "."
            } else {
                ""
            };
            words.push(format!("{w}{punct}"));
        }
        let _ = writeln!(corpus, "{}\t{}", if spanish { "es" } else { "en" }, words.join(" "));
    }
    (corpus, embeddings, lexicon, anchors)
}

/// Writes `n` samples per modality under `dir`.
pub fn write_corpus(dir: &Path, seed: u64, n: usize) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        let map = synth_massmap(&mut rng, MAP_SIDE);
        write_string(&dir.join(format!("image/{i:03}.txt")), &format_raster(&map))?;
    }
    for i in 0..n {
        let (map, annotations) = synth_labeled(&mut rng, 16);
        write_string(&dir.join(format!("explicit/{i:03}.txt")), &format_raster(&map))?;
        write_string(&dir.join(format!("explicit/{i:03}.rle")), &format_groups(&annotations))?;
    }
    for i in 0..n {
        let curve = synth_light_curve(&mut rng);
        write_string(&dir.join(format!("series/{i:03}.csv")), &format_series(&curve))?;
    }
    let (corpus, embeddings, lexicon, anchors) = synth_text(&mut rng, n);
    write_string(&dir.join("text/corpus.tsv"), &corpus)?;
    write_string(&dir.join("text/embeddings.tsv"), &embeddings)?;
    write_string(&dir.join("text/lexicon.txt"), &lexicon)?;
    write_string(&dir.join("text/anchors.txt"), &anchors)?;
    Ok(())
}
