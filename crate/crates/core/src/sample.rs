use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::FixError;
use crate::massmaps::MassMap;
use crate::supernova::LightCurve;
use crate::text::TokenizedText;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Image,
    Series,
    Text,
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modality::Image => "image",
            Modality::Series => "series",
            Modality::Text => "text",
        })
    }
}

impl FromStr for Modality {
    type Err = FixError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "image" => Ok(Modality::Image),
            "series" => Ok(Modality::Series),
            "text" => Ok(Modality::Text),
            other => Err(FixError::param(
                "modality",
                format!("unknown modality `{other}` (expected image, series or text)"),
            )),
        }
    }
}

/// One input `x`. Its feature count `d` is the number of pixels, grid
/// timestamps or words.
#[derive(Clone, Debug)]
pub enum Sample {
    Image(MassMap),
    Series(LightCurve),
    Text(TokenizedText),
}

impl Sample {
    pub fn modality(&self) -> Modality {
        match self {
            Sample::Image(_) => Modality::Image,
            Sample::Series(_) => Modality::Series,
            Sample::Text(_) => Modality::Text,
        }
    }

    pub fn feature_count(&self) -> usize {
        match self {
            Sample::Image(m) => m.len(),
            Sample::Series(c) => c.grid().len(),
            Sample::Text(t) => t.len(),
        }
    }
}

impl From<MassMap> for Sample {
    fn from(m: MassMap) -> Self {
        Sample::Image(m)
    }
}

impl From<LightCurve> for Sample {
    fn from(c: LightCurve) -> Self {
        Sample::Series(c)
    }
}

impl From<TokenizedText> for Sample {
    fn from(t: TokenizedText) -> Self {
        Sample::Text(t)
    }
}
