//! Group-level alignment scores and their aggregation over features.
//!
//! `feature_align` averages the scores of every group covering one feature
//! (0 for an uncovered feature) and `fix_score` averages that over all `d`
//! features. Explicit alignment against annotated masks is the best IoU.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{FixError, Result};
use crate::mask::{FeatureMask, GroupSet};
use crate::sample::{Modality, Sample};

/// A score in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct AlignmentScore(f64);

impl AlignmentScore {
    pub const ZERO: AlignmentScore = AlignmentScore(0.0);
    pub const ONE: AlignmentScore = AlignmentScore(1.0);

    /// Wraps a raw scorer output, clamping into `[0, 1]`. NaN and values
    /// beyond rounding error are logged; NaN maps to 0.
    pub fn from_raw(value: f64) -> Self {
        if value.is_nan() {
            log::warn!("alignment score is NaN; using 0");
            return Self(0.0);
        }
        if !(-1e-9..=1.0 + 1e-9).contains(&value) {
            log::warn!("alignment score {value} outside [0, 1]; clamping");
        }
        Self(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<AlignmentScore> for f64 {
    fn from(s: AlignmentScore) -> f64 {
        s.0
    }
}

/// Computes `ExpertAlign(group, sample)`. Implementations must be pure.
pub trait AlignmentScorer: Send + Sync {
    fn name(&self) -> &str;

    /// The sample modality this scorer understands, or `None` if it works on
    /// any modality.
    fn modality(&self) -> Option<Modality>;

    fn score(&self, group: &FeatureMask, sample: &Sample) -> Result<AlignmentScore>;
}

pub fn check_compatible(scorer: &dyn AlignmentScorer, modality: Modality) -> Result<()> {
    match scorer.modality() {
        Some(m) if m != modality => Err(FixError::config(format!(
            "scorer `{}` expects {m} samples, got {modality}",
            scorer.name()
        ))),
        _ => Ok(()),
    }
}

/// The masks of `groups` that contain feature `i`, in order and with
/// duplicates.
pub fn covering_groups(i: usize, groups: &GroupSet) -> Result<GroupSet> {
    if i >= groups.d() {
        return Err(FixError::arg(format!(
            "feature index {i} out of range for d = {}",
            groups.d()
        )));
    }
    GroupSet::from_masks(
        groups.d(),
        groups.provenance.clone(),
        groups.iter().filter(|g| g.get(i)).cloned(),
    )
}

fn check_sample(groups: &GroupSet, sample: &Sample, scorer: &dyn AlignmentScorer) -> Result<()> {
    check_compatible(scorer, sample.modality())?;
    let d = sample.feature_count();
    if groups.d() != d {
        return Err(FixError::arg(format!(
            "group set over d = {} does not match sample with d = {d}",
            groups.d()
        )));
    }
    Ok(())
}

/// Mean score of the groups covering feature `i`; 0 if none does.
pub fn feature_align(
    i: usize,
    groups: &GroupSet,
    sample: &Sample,
    scorer: &dyn AlignmentScorer,
) -> Result<AlignmentScore> {
    check_sample(groups, sample, scorer)?;
    let covering = covering_groups(i, groups)?;
    if covering.is_empty() {
        return Ok(AlignmentScore::ZERO);
    }
    let mut sum = 0.0;
    for g in &covering {
        sum += scorer.score(g, sample)?.value();
    }
    Ok(AlignmentScore::from_raw(sum / covering.len() as f64))
}

/// Scores every group of `groups` once per distinct mask.
pub fn group_scores(
    groups: &GroupSet,
    sample: &Sample,
    scorer: &dyn AlignmentScorer,
) -> Result<Vec<AlignmentScore>> {
    check_sample(groups, sample, scorer)?;
    let mut cache: HashMap<&FeatureMask, AlignmentScore> = HashMap::new();
    groups
        .iter()
        .map(|g| {
            if let Some(&s) = cache.get(g) {
                return Ok(s);
            }
            let s = scorer.score(g, sample)?;
            cache.insert(g, s);
            Ok(s)
        })
        .collect()
}

/// Mean over all features of [`feature_align`].
pub fn fix_score(
    groups: &GroupSet,
    sample: &Sample,
    scorer: &dyn AlignmentScorer,
) -> Result<AlignmentScore> {
    let d = sample.feature_count();
    if d == 0 {
        return Err(FixError::arg("sample has no features (d = 0)"));
    }
    let scores = group_scores(groups, sample, scorer)?;
    Ok(aggregate(groups, &scores))
}

/// Aggregates precomputed per-group scores. `scores[k]` belongs to the k-th
/// mask of `groups`.
pub fn aggregate(groups: &GroupSet, scores: &[AlignmentScore]) -> AlignmentScore {
    let d = groups.d();
    let mut sum = vec![0.0f64; d];
    let mut count = vec![0usize; d];
    for (g, s) in groups.iter().zip(scores) {
        for i in g.ones() {
            sum[i] += s.value();
            count[i] += 1;
        }
    }
    let total: f64 = sum
        .iter()
        .zip(&count)
        .map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
        .sum();
    AlignmentScore::from_raw(total / d as f64)
}

/// Intersection over union of the selected features. Two empty masks give 0.
pub fn iou(a: &FeatureMask, b: &FeatureMask) -> Result<AlignmentScore> {
    let inter = a.intersection_count(b)?;
    let union = a.union_count(b)?;
    if union == 0 {
        return Ok(AlignmentScore::ZERO);
    }
    Ok(AlignmentScore::from_raw(inter as f64 / union as f64))
}

/// Best IoU of `group` against the annotated masks.
pub fn explicit_expert_align(group: &FeatureMask, annotations: &GroupSet) -> Result<AlignmentScore> {
    if annotations.is_empty() {
        return Err(FixError::config("no annotated expert features to align against"));
    }
    let mut best = AlignmentScore::ZERO;
    for g in annotations {
        let s = iou(group, g)?;
        if s > best {
            best = s;
        }
    }
    Ok(best)
}

/// Explicit alignment against one sample's annotated masks. The annotations
/// are looked up per sample, so one scorer instance belongs to one sample.
#[derive(Clone, Debug)]
pub struct ExplicitScorer {
    annotations: GroupSet,
}

impl ExplicitScorer {
    pub fn new(annotations: GroupSet) -> Result<Self> {
        if annotations.is_empty() {
            return Err(FixError::config("no annotated expert features to align against"));
        }
        Ok(Self { annotations })
    }

    pub fn annotations(&self) -> &GroupSet {
        &self.annotations
    }
}

impl AlignmentScorer for ExplicitScorer {
    fn name(&self) -> &str {
        "explicit"
    }

    fn modality(&self) -> Option<Modality> {
        None
    }

    fn score(&self, group: &FeatureMask, _sample: &Sample) -> Result<AlignmentScore> {
        explicit_expert_align(group, &self.annotations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::massmaps::MassMap;

    fn mask(s: &str) -> FeatureMask {
        FeatureMask::parse_bitstring(s).unwrap()
    }

    fn set(masks: &[&str]) -> GroupSet {
        let d = masks.first().map_or(0, |m| m.len());
        GroupSet::from_masks(d, "test", masks.iter().map(|m| mask(m))).unwrap()
    }

    fn sample(d: usize) -> Sample {
        Sample::Image(MassMap::new(1, d, vec![0.0; d]).unwrap())
    }

    /// Scores masks from a fixed table keyed by bit string.
    struct Table(Vec<(&'static str, f64)>);

    impl AlignmentScorer for Table {
        fn name(&self) -> &str {
            "table"
        }
        fn modality(&self) -> Option<Modality> {
            None
        }
        fn score(&self, group: &FeatureMask, _: &Sample) -> Result<AlignmentScore> {
            let key = group.to_string();
            let v = self.0.iter().find(|(k, _)| *k == key).map_or(0.0, |e| e.1);
            Ok(AlignmentScore::from_raw(v))
        }
    }

    #[test]
    fn covering_groups_examples() {
        let g = set(&["1100", "0110"]);
        assert_eq!(covering_groups(0, &g).unwrap().masks(), &[mask("1100")]);
        assert_eq!(covering_groups(1, &g).unwrap().len(), 2);
        assert!(covering_groups(3, &g).unwrap().is_empty());
        assert!(covering_groups(4, &g).is_err());
    }

    #[test]
    fn covering_groups_keeps_duplicates() {
        let g = set(&["1100", "1100", "0011"]);
        assert_eq!(covering_groups(0, &g).unwrap().len(), 2);
    }

    #[test]
    fn feature_align_examples() {
        let scorer = Table(vec![("1100", 0.5), ("0110", 1.0)]);
        let g = set(&["1100", "0110"]);
        let x = sample(4);
        assert_eq!(feature_align(3, &g, &x, &scorer).unwrap().value(), 0.0);
        assert_eq!(feature_align(0, &g, &x, &scorer).unwrap().value(), 0.5);
        assert_eq!(feature_align(1, &g, &x, &scorer).unwrap().value(), 0.75);
    }

    #[test]
    fn fix_score_hand_evaluation() {
        let scorer = Table(vec![("1100", 0.5), ("0110", 1.0)]);
        let g = set(&["1100", "0110"]);
        let s = fix_score(&g, &sample(4), &scorer).unwrap().value();
        assert!((s - 0.5625).abs() < 1e-15);
    }

    #[test]
    fn fix_score_of_empty_set_is_zero() {
        let g = GroupSet::new(4, "none");
        assert_eq!(fix_score(&g, &sample(4), &Table(vec![])).unwrap().value(), 0.0);
    }

    #[test]
    fn fix_score_rejects_empty_sample() {
        let g = GroupSet::new(0, "none");
        let x = Sample::Text(crate::text::TokenizedText::new("en", Vec::new()));
        assert!(matches!(
            fix_score(&g, &x, &Table(vec![])),
            Err(FixError::Argument(_))
        ));
    }

    #[test]
    fn fix_score_rejects_modality_mismatch() {
        let scorer = crate::massmaps::MassMapScorer::default();
        let x = Sample::Text(crate::text::TokenizedText::from_raw("en", "a b"));
        let g = GroupSet::new(2, "none");
        assert!(matches!(fix_score(&g, &x, &scorer), Err(FixError::Config(_))));
    }

    #[test]
    fn theorem_one_small_case() {
        let star = set(&["1100", "0111"]);
        let scorer = ExplicitScorer::new(star.clone()).unwrap();
        assert_eq!(fix_score(&star, &sample(4), &scorer).unwrap().value(), 1.0);
    }

    #[test]
    fn iou_examples() {
        assert_eq!(iou(&mask("0110"), &mask("0110")).unwrap().value(), 1.0);
        assert_eq!(iou(&mask("1100"), &mask("0011")).unwrap().value(), 0.0);
        assert_eq!(iou(&mask("1110"), &mask("0111")).unwrap().value(), 0.5);
        assert_eq!(iou(&mask("0000"), &mask("0000")).unwrap().value(), 0.0);
        assert!(iou(&mask("01"), &mask("011")).is_err());
    }

    #[test]
    fn explicit_align_examples() {
        let star = set(&["111000", "000111"]);
        assert_eq!(explicit_expert_align(&mask("000111"), &star).unwrap().value(), 1.0);
        let disjoint = set(&["110000", "001100"]);
        assert_eq!(explicit_expert_align(&mask("000011"), &disjoint).unwrap().value(), 0.0);
        // IoU 0.5 with the first member, disjoint from the second.
        let star = set(&["110000", "000011"]);
        assert_eq!(explicit_expert_align(&mask("111100"), &star).unwrap().value(), 0.5);
        assert!(matches!(
            explicit_expert_align(&mask("1"), &GroupSet::new(1, "none")),
            Err(FixError::Config(_))
        ));
    }

    #[test]
    fn clamping() {
        assert_eq!(AlignmentScore::from_raw(-0.2).value(), 0.0);
        assert_eq!(AlignmentScore::from_raw(1.5).value(), 1.0);
        assert_eq!(AlignmentScore::from_raw(f64::NAN).value(), 0.0);
    }
}
