use crate::error::{FixError, Result};
use crate::mask::{FeatureMask, GroupSet};
use crate::text::TokenizedText;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Granularity {
    Words,
    /// Split after `, ; : . ! ? —`.
    Phrases,
    /// Split after `. ! ?`.
    Sentences,
}

const PHRASE_BREAKS: &[char] = &[',', ';', ':', '.', '!', '?', '—'];
const SENTENCE_BREAKS: &[char] = &['.', '!', '?'];

/// True if the punctuation trailing `word` contains a break character.
fn ends_with_break(word: &str, breaks: &[char]) -> bool {
    word.chars()
        .rev()
        .take_while(|c| !c.is_alphanumeric())
        .any(|c| breaks.contains(&c))
}

pub fn text_extract(text: &TokenizedText, granularity: Granularity) -> Result<GroupSet> {
    let d = text.len();
    if d == 0 {
        return Err(FixError::arg("text has no words"));
    }
    let breaks = match granularity {
        Granularity::Words => {
            return GroupSet::from_masks(
                d,
                "words",
                (0..d).map(|i| FeatureMask::from_indices(d, [i])).collect::<Result<Vec<_>>>()?,
            );
        }
        Granularity::Phrases => PHRASE_BREAKS,
        Granularity::Sentences => SENTENCE_BREAKS,
    };
    let mut set = GroupSet::new(d, "text");
    let mut start = 0;
    for (i, word) in text.words().iter().enumerate() {
        if ends_with_break(word, breaks) || i + 1 == d {
            set.push(FeatureMask::from_indices(d, start..=i)?)?;
            start = i + 1;
        }
    }
    Ok(set)
}
