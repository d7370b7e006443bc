use crate::error::{FixError, Result};
use crate::mask::FeatureMask;
use crate::sample::{Modality, Sample};
use crate::scoring::{AlignmentScore, AlignmentScorer};

use super::{cosine, EmbeddingTable, TokenizedText};

/// Named word categories, e.g. `Gratitude: thanks, thank, grateful`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    categories: Vec<(String, Vec<String>)>,
}

impl Lexicon {
    pub fn new(categories: Vec<(String, Vec<String>)>) -> Result<Self> {
        if categories.is_empty() {
            return Err(FixError::arg("lexicon has no categories"));
        }
        if let Some((name, _)) = categories.iter().find(|(_, words)| words.is_empty()) {
            return Err(FixError::arg(format!("lexicon category `{name}` is empty")));
        }
        Ok(Self { categories })
    }

    pub fn categories(&self) -> &[(String, Vec<String>)] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }
}

/// One mean embedding per lexicon category, in category order.
#[derive(Clone, Debug, PartialEq)]
pub struct Centroids {
    pub names: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn build_centroids(lexicon: &Lexicon, table: &EmbeddingTable) -> Result<Centroids> {
    let mut names = Vec::with_capacity(lexicon.len());
    let mut vectors = Vec::with_capacity(lexicon.len());
    for (name, words) in lexicon.categories() {
        names.push(name.clone());
        vectors.push(table.mean_of(words)?);
    }
    Ok(Centroids { names, vectors })
}

/// Best mean cosine of the group's words to a single centroid, unclamped.
/// Lies in `[-1, 1]`.
pub fn politeness_raw(
    group: &FeatureMask,
    text: &TokenizedText,
    centroids: &Centroids,
    table: &EmbeddingTable,
) -> Result<f64> {
    let keys = text.selected_keys(group)?;
    if keys.is_empty() {
        return Err(FixError::arg("politeness score of an empty group"));
    }
    let embeddings = keys
        .iter()
        .map(|k| table.get(k))
        .collect::<Result<Vec<_>>>()?;
    let n = embeddings.len() as f64;
    let best = centroids
        .vectors
        .iter()
        .map(|c| embeddings.iter().map(|e| cosine(e, c)).sum::<f64>() / n)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best)
}

/// [`politeness_raw`] clamped into `[0, 1]`; empty groups score 0.
pub fn politeness_expert_align(
    group: &FeatureMask,
    text: &TokenizedText,
    centroids: &Centroids,
    table: &EmbeddingTable,
) -> Result<AlignmentScore> {
    if group.count() == 0 {
        return Ok(AlignmentScore::ZERO);
    }
    politeness_raw(group, text, centroids, table).map(AlignmentScore::from_raw)
}

/// Scores text against per-language lexicon centroids. A lexicon registered
/// under `*` is used for languages without their own.
#[derive(Clone, Debug)]
pub struct PolitenessScorer {
    table: std::sync::Arc<EmbeddingTable>,
    by_language: std::collections::BTreeMap<String, Centroids>,
}

pub const ANY_LANGUAGE: &str = "*";

impl PolitenessScorer {
    pub fn new(
        table: std::sync::Arc<EmbeddingTable>,
        lexicons: &std::collections::BTreeMap<String, Lexicon>,
    ) -> Result<Self> {
        if lexicons.is_empty() {
            return Err(FixError::config("politeness scorer needs at least one lexicon"));
        }
        let by_language = lexicons
            .iter()
            .map(|(lang, lex)| Ok((lang.clone(), build_centroids(lex, &table)?)))
            .collect::<Result<_>>()?;
        Ok(Self { table, by_language })
    }

    pub fn centroids_for(&self, language: &str) -> Result<&Centroids> {
        self.by_language
            .get(language)
            .or_else(|| self.by_language.get(ANY_LANGUAGE))
            .ok_or_else(|| FixError::config(format!("no lexicon for language `{language}`")))
    }
}

impl AlignmentScorer for PolitenessScorer {
    fn name(&self) -> &str {
        "politeness"
    }

    fn modality(&self) -> Option<Modality> {
        Some(Modality::Text)
    }

    fn score(&self, group: &FeatureMask, sample: &Sample) -> Result<AlignmentScore> {
        let Sample::Text(text) = sample else {
            return Err(FixError::config(format!(
                "politeness scorer cannot score {} samples",
                sample.modality()
            )));
        };
        let centroids = self.centroids_for(text.language())?;
        politeness_expert_align(group, text, centroids, &self.table)
    }
}
