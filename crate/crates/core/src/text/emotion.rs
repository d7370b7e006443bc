//! Emotion scoring on the valence–arousal circumplex.
//!
//! Four anchor means (positive/negative valence, high/low arousal) define two
//! axes in embedding space. Each axis is normalized and its coordinate scaled
//! by half the anchor distance, so the anchors land on `(±1, 0)` and `(0, ±1)`.
//! A word is projected onto both axes and the skew between them is removed
//! with `cos θ`. A group scores `tanh(exp(-signal · relatedness))`, which is
//! at most `tanh(1)`.

use crate::error::{FixError, Result};
use crate::mask::FeatureMask;
use crate::sample::{Modality, Sample};
use crate::scoring::{AlignmentScore, AlignmentScorer};

use super::{dot, norm, EmbeddingTable, TokenizedText};

/// Anchor word lists for the four circumplex poles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorWords {
    pub positive_valence: Vec<String>,
    pub negative_valence: Vec<String>,
    pub high_arousal: Vec<String>,
    pub low_arousal: Vec<String>,
}

fn words(list: &[&str]) -> Vec<String> {
    list.iter().map(|w| w.to_string()).collect()
}

impl Default for AnchorWords {
    /// Russell's circumplex emotions nearest each pole.
    fn default() -> Self {
        Self {
            positive_valence: words(&["happy", "pleased", "delighted", "excited", "satisfied"]),
            negative_valence: words(&["miserable", "frustrated", "sad", "depressed", "afraid"]),
            high_arousal: words(&["astonished", "alarmed", "angry", "afraid", "excited"]),
            low_arousal: words(&["tired", "sleepy", "calm", "satisfied", "depressed"]),
        }
    }
}

impl AnchorWords {
    /// Every anchor word, pole by pole.
    pub fn all(&self) -> impl Iterator<Item = &String> {
        self.positive_valence
            .iter()
            .chain(&self.negative_valence)
            .chain(&self.high_arousal)
            .chain(&self.low_arousal)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CircumplexAxes {
    pub v_pos: Vec<f64>,
    pub v_neg: Vec<f64>,
    pub a_high: Vec<f64>,
    pub a_low: Vec<f64>,
    /// Unit valence direction.
    pub valence: Vec<f64>,
    /// Unit arousal direction.
    pub arousal: Vec<f64>,
    pub v_middle: Vec<f64>,
    pub a_middle: Vec<f64>,
    /// Half the distance between the valence anchors.
    pub valence_scale: f64,
    /// Half the distance between the arousal anchors.
    pub arousal_scale: f64,
    pub cos_theta: f64,
}

const DEGENERATE_TOL: f64 = 1e-12;

fn axis(pos: &[f64], neg: &[f64], name: &str) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let raw: Vec<f64> = pos.iter().zip(neg).map(|(p, n)| p - n).collect();
    let len = norm(&raw);
    if !(len > DEGENERATE_TOL) {
        return Err(FixError::DegenerateAxes(format!(
            "{name} anchors coincide"
        )));
    }
    let unit = raw.iter().map(|v| v / len).collect();
    let middle = pos.iter().zip(neg).map(|(p, n)| (p + n) / 2.0).collect();
    Ok((unit, middle, len / 2.0))
}

impl CircumplexAxes {
    /// Builds axes from the four anchor means directly.
    pub fn from_anchor_means(
        v_pos: Vec<f64>,
        v_neg: Vec<f64>,
        a_high: Vec<f64>,
        a_low: Vec<f64>,
    ) -> Result<Self> {
        let dim = v_pos.len();
        if [&v_neg, &a_high, &a_low].iter().any(|v| v.len() != dim) {
            return Err(FixError::arg("anchor vectors differ in dimension"));
        }
        let (valence, v_middle, valence_scale) = axis(&v_pos, &v_neg, "valence")?;
        let (arousal, a_middle, arousal_scale) = axis(&a_high, &a_low, "arousal")?;
        let cos_theta = dot(&valence, &arousal);
        if cos_theta.abs() >= 1.0 - 1e-9 {
            return Err(FixError::DegenerateAxes(
                "valence and arousal axes are parallel".into(),
            ));
        }
        Ok(Self {
            v_pos,
            v_neg,
            a_high,
            a_low,
            valence,
            arousal,
            v_middle,
            a_middle,
            valence_scale,
            arousal_scale,
            cos_theta,
        })
    }

    pub fn dim(&self) -> usize {
        self.valence.len()
    }
}

pub fn build_axes(table: &EmbeddingTable, anchors: &AnchorWords) -> Result<CircumplexAxes> {
    CircumplexAxes::from_anchor_means(
        table.mean_of(&anchors.positive_valence)?,
        table.mean_of(&anchors.negative_valence)?,
        table.mean_of(&anchors.high_arousal)?,
        table.mean_of(&anchors.low_arousal)?,
    )
}

/// Valence/arousal coordinates of `vec` with the axis skew removed.
pub fn project(vec: &[f64], axes: &CircumplexAxes) -> Result<(f64, f64)> {
    if vec.len() != axes.dim() {
        return Err(FixError::arg(format!(
            "vector of dimension {} projected onto {}-dimensional axes",
            vec.len(),
            axes.dim()
        )));
    }
    let centered_dot = |middle: &[f64], dir: &[f64]| -> f64 {
        vec.iter()
            .zip(middle)
            .zip(dir)
            .map(|((x, m), d)| (x - m) * d)
            .sum()
    };
    let xv = centered_dot(&axes.v_middle, &axes.valence) / axes.valence_scale;
    let xa = centered_dot(&axes.a_middle, &axes.arousal) / axes.arousal_scale;
    Ok((xv - xa * axes.cos_theta, xa - xv * axes.cos_theta))
}

fn projections(
    group: &FeatureMask,
    text: &TokenizedText,
    axes: &CircumplexAxes,
    table: &EmbeddingTable,
) -> Result<Vec<(f64, f64)>> {
    text.selected_keys(group)?
        .iter()
        .map(|k| project(table.get(k)?, axes))
        .collect()
}

fn signal_of(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    points
        .iter()
        .map(|(v, a)| (v.hypot(*a) - 1.0).abs())
        .sum::<f64>()
        / n
}

fn relatedness_of(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mut total = 0.0;
    for (vi, ai) in points {
        for (vj, aj) in points {
            total += (vi - vj).hypot(ai - aj);
        }
    }
    total / (n * n)
}

/// Mean distance of the projected group words to the unit circle.
pub fn signal(
    group: &FeatureMask,
    text: &TokenizedText,
    axes: &CircumplexAxes,
    table: &EmbeddingTable,
) -> Result<f64> {
    let points = projections(group, text, axes, table)?;
    if points.is_empty() {
        return Err(FixError::arg("signal of an empty group"));
    }
    Ok(signal_of(&points))
}

/// Mean pairwise distance over all ordered pairs of projected group words,
/// self-pairs included. Empty groups give 0.
pub fn relatedness(
    group: &FeatureMask,
    text: &TokenizedText,
    axes: &CircumplexAxes,
    table: &EmbeddingTable,
) -> Result<f64> {
    let points = projections(group, text, axes, table)?;
    if points.is_empty() {
        return Ok(0.0);
    }
    Ok(relatedness_of(&points))
}

/// `tanh(exp(-signal · relatedness))` from the two components.
pub fn emotion_score(signal: f64, relatedness: f64) -> f64 {
    (-signal * relatedness).exp().tanh()
}

/// Empty groups score 0.
pub fn emotion_expert_align(
    group: &FeatureMask,
    text: &TokenizedText,
    axes: &CircumplexAxes,
    table: &EmbeddingTable,
) -> Result<AlignmentScore> {
    let points = projections(group, text, axes, table)?;
    if points.is_empty() {
        return Ok(AlignmentScore::ZERO);
    }
    Ok(AlignmentScore::from_raw(emotion_score(
        signal_of(&points),
        relatedness_of(&points),
    )))
}

#[derive(Clone, Debug)]
pub struct EmotionScorer {
    table: std::sync::Arc<EmbeddingTable>,
    axes: CircumplexAxes,
}

impl EmotionScorer {
    pub fn new(table: std::sync::Arc<EmbeddingTable>, anchors: &AnchorWords) -> Result<Self> {
        let axes = build_axes(&table, anchors)?;
        Ok(Self { table, axes })
    }

    pub fn axes(&self) -> &CircumplexAxes {
        &self.axes
    }
}

impl AlignmentScorer for EmotionScorer {
    fn name(&self) -> &str {
        "emotion"
    }

    fn modality(&self) -> Option<Modality> {
        Some(Modality::Text)
    }

    fn score(&self, group: &FeatureMask, sample: &Sample) -> Result<AlignmentScore> {
        let Sample::Text(text) = sample else {
            return Err(FixError::config(format!(
                "emotion scorer cannot score {} samples",
                sample.modality()
            )));
        };
        emotion_expert_align(group, text, &self.axes, &self.table)
    }
}
