//! Scores how well groups of low-level features (pixels, timestamps, words)
//! align with expert knowledge.
//!
//! A sample's `d` features are covered by a [`GroupSet`] of boolean masks.
//! Each group gets an expert-alignment score in `[0, 1]` from an
//! [`AlignmentScorer`]; [`fix_score`] averages, per feature, the scores of the
//! groups covering it and then averages over features.
//!
//! ```
//! use fixscore::{fix_score, ExplicitScorer, FeatureMask, GroupSet, MassMap, Sample};
//!
//! let sample = Sample::Image(MassMap::new(1, 4, vec![0.0; 4]).unwrap());
//! let expert = GroupSet::from_masks(4, "annotation", [
//!     FeatureMask::parse_bitstring("1100").unwrap(),
//!     FeatureMask::parse_bitstring("0011").unwrap(),
//! ]).unwrap();
//! let scorer = ExplicitScorer::new(expert.clone()).unwrap();
//! assert_eq!(fix_score(&expert, &sample, &scorer).unwrap().value(), 1.0);
//! ```

pub mod cli;
pub mod error;
pub mod extract;
pub mod harness;
pub mod mask;
pub mod massmaps;
pub mod sample;
pub mod scoring;
pub mod supernova;
pub mod text;

pub use error::{FixError, Result};
pub use extract::{ExtractContext, ExtractorKind, GroupMaximum};
pub use mask::{FeatureMask, GroupSet};
pub use massmaps::{MassMap, MassMapScorer};
pub use sample::{Modality, Sample};
pub use scoring::{fix_score, AlignmentScore, AlignmentScorer, ExplicitScorer};
pub use supernova::{ConsistencyParams, LightCurve, Observation, SupernovaScorer};
pub use text::{EmbeddingTable, EmotionScorer, PolitenessScorer, TokenizedText};
