//! Unsupervised baseline extractors producing group sets from samples.
//!
//! Extractors are named by a short spec string, e.g. `patch:8x8`, `slice:10`,
//! `random:25`, `quickshift:kernel=5,max_dist=10,sigma=0.2` or
//! `clustering:k=6,base=quickshift`.

use std::fmt;
use std::str::FromStr;

use crate::error::{FixError, Result};
use crate::mask::GroupSet;
use crate::sample::{Modality, Sample};
use crate::text::EmbeddingTable;

mod basic;
pub mod cluster;
pub mod kmeans;
pub mod quickshift;
mod text;

pub use basic::{identity_extract, patch_extract, random_extract, slice_extract};
pub use cluster::cluster_extract;
pub use quickshift::{quickshift_extract, QuickshiftParams};
pub use text::{text_extract, Granularity};

/// Upper bound on the number of groups a random baseline may produce:
/// `ceil(scaling · expert_count)` unless a setting pins it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupMaximum {
    pub expert_count: usize,
    pub scaling: f64,
    pub max_groups: usize,
}

pub const DEFAULT_SCALING: f64 = 1.5;

impl GroupMaximum {
    pub fn new(expert_count: usize, scaling: f64) -> Result<Self> {
        if !(scaling.is_finite() && scaling > 0.0) {
            return Err(FixError::param("scaling", format!("must be positive, got {scaling}")));
        }
        let max_groups = (scaling * expert_count as f64).ceil() as usize;
        if max_groups == 0 {
            return Err(FixError::param("experts", "group maximum must be at least 1"));
        }
        Ok(Self {
            expert_count,
            scaling,
            max_groups,
        })
    }

    pub fn with_max_groups(mut self, max_groups: usize) -> Result<Self> {
        if max_groups == 0 {
            return Err(FixError::param("max", "group maximum must be at least 1"));
        }
        self.max_groups = max_groups;
        Ok(self)
    }

    /// 7 local maxima + 7 local minima, rounded up to 25.
    pub fn massmaps() -> Self {
        Self {
            expert_count: 14,
            scaling: DEFAULT_SCALING,
            max_groups: 25,
        }
    }

    /// Up to 3 humps with a peak and a trough each: 6 expert features.
    pub fn supernova() -> Self {
        Self {
            expert_count: 6,
            scaling: DEFAULT_SCALING,
            max_groups: 9,
        }
    }

    /// 26 lexical categories, rounded up to 40.
    pub fn politeness() -> Self {
        Self {
            expert_count: 26,
            scaling: DEFAULT_SCALING,
            max_groups: 40,
        }
    }

    /// Same category count as politeness.
    pub fn emotion() -> Self {
        Self::politeness()
    }

    /// Preset for a scorer name, if one exists.
    pub fn for_scorer(name: &str) -> Option<Self> {
        match name {
            "massmaps" => Some(Self::massmaps()),
            "supernova" => Some(Self::supernova()),
            "politeness" => Some(Self::politeness()),
            "emotion" => Some(Self::emotion()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExtractorKind {
    Identity,
    /// Random partition; `max_groups` overrides the setting's group maximum.
    Random { max_groups: Option<usize> },
    Patch { rows: usize, cols: usize },
    Slice { width: usize },
    Text(Granularity),
    Quickshift(QuickshiftParams),
    /// k-means merge of a base partition; `k` defaults to the group maximum.
    Clustering { k: Option<usize>, base: Box<ExtractorKind> },
}

impl ExtractorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExtractorKind::Identity => "identity",
            ExtractorKind::Random { .. } => "random",
            ExtractorKind::Patch { .. } => "patch",
            ExtractorKind::Slice { .. } => "slice",
            ExtractorKind::Text(Granularity::Words) => "words",
            ExtractorKind::Text(Granularity::Phrases) => "phrases",
            ExtractorKind::Text(Granularity::Sentences) => "sentences",
            ExtractorKind::Quickshift(_) => "quickshift",
            ExtractorKind::Clustering { .. } => "clustering",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, ExtractorKind::Random { .. } | ExtractorKind::Clustering { .. })
    }

    /// Modality the extractor is restricted to, if any.
    pub fn modality(&self) -> Option<Modality> {
        match self {
            ExtractorKind::Patch { .. } | ExtractorKind::Quickshift(_) => Some(Modality::Image),
            ExtractorKind::Slice { .. } => Some(Modality::Series),
            ExtractorKind::Text(_) => Some(Modality::Text),
            ExtractorKind::Clustering { base, .. } => base.modality(),
            ExtractorKind::Identity | ExtractorKind::Random { .. } => None,
        }
    }

    /// Default base partition for clustering on a modality.
    pub fn default_base(modality: Modality) -> ExtractorKind {
        match modality {
            Modality::Image => ExtractorKind::Quickshift(QuickshiftParams::default()),
            Modality::Series => ExtractorKind::Slice { width: 5 },
            Modality::Text => ExtractorKind::Text(Granularity::Words),
        }
    }

    pub fn check_modality(&self, modality: Modality) -> Result<()> {
        match self.modality() {
            Some(m) if m != modality => Err(FixError::config(format!(
                "extractor `{}` works on {m} samples, not {modality}",
                self.name()
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ExtractorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractorKind::Random { max_groups: Some(n) } => write!(f, "random:{n}"),
            ExtractorKind::Patch { rows, cols } => write!(f, "patch:{rows}x{cols}"),
            ExtractorKind::Slice { width } => write!(f, "slice:{width}"),
            ExtractorKind::Quickshift(p) => write!(
                f,
                "quickshift:kernel={},max_dist={},sigma={},ratio={}",
                p.kernel_size, p.max_dist, p.sigma, p.ratio
            ),
            ExtractorKind::Clustering { k, base } => {
                f.write_str("clustering:")?;
                if let Some(k) = k {
                    write!(f, "k={k},")?;
                }
                match base.as_ref() {
                    ExtractorKind::Quickshift(p) if *p == QuickshiftParams::default() => {
                        f.write_str("base=quickshift")
                    }
                    other => write!(f, "base={other}"),
                }
            }
            other => f.write_str(other.name()),
        }
    }
}

fn parse_num<T: FromStr>(name: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| FixError::param(name, format!("cannot parse `{value}`")))
}

fn positive(name: &str, value: usize) -> Result<usize> {
    if value == 0 {
        return Err(FixError::param(name, "must be at least 1"));
    }
    Ok(value)
}

/// Splits `a=1,b=2` into pairs.
fn key_values(params: &str) -> Result<Vec<(&str, &str)>> {
    params
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| FixError::param(p.trim(), "expected key=value"))
        })
        .collect()
}

impl FromStr for ExtractorKind {
    type Err = FixError;

    fn from_str(spec: &str) -> Result<Self> {
        let (kind, params) = match spec.split_once(':') {
            Some((k, p)) => (k.trim(), Some(p.trim())),
            None => (spec.trim(), None),
        };
        let no_params = |kind: ExtractorKind| match params {
            Some(p) if !p.is_empty() => Err(FixError::param(
                kind.name(),
                format!("takes no parameters, got `{p}`"),
            )),
            _ => Ok(kind),
        };
        match kind {
            "identity" => no_params(ExtractorKind::Identity),
            "words" => no_params(ExtractorKind::Text(Granularity::Words)),
            "phrases" => no_params(ExtractorKind::Text(Granularity::Phrases)),
            "sentences" => no_params(ExtractorKind::Text(Granularity::Sentences)),
            "random" => {
                let max_groups = match params {
                    None | Some("") => None,
                    Some(p) if !p.contains('=') => Some(positive("max", parse_num("max", p)?)?),
                    Some(p) => {
                        let mut max = None;
                        for (k, v) in key_values(p)? {
                            match k {
                                "max" => max = Some(positive("max", parse_num(k, v)?)?),
                                other => {
                                    return Err(FixError::param(other, "unknown random parameter"))
                                }
                            }
                        }
                        max
                    }
                };
                Ok(ExtractorKind::Random { max_groups })
            }
            "patch" => {
                let (rows, cols) = match params {
                    None | Some("") => (8, 8),
                    Some(p) => {
                        let (r, c) = p
                            .split_once(['x', 'X'])
                            .ok_or_else(|| FixError::param("grid", format!("expected RxC, got `{p}`")))?;
                        (
                            positive("rows", parse_num("rows", r)?)?,
                            positive("cols", parse_num("cols", c)?)?,
                        )
                    }
                };
                Ok(ExtractorKind::Patch { rows, cols })
            }
            "slice" => {
                let width = match params {
                    None | Some("") => 5,
                    Some(p) => positive("width", parse_num("width", p.trim_start_matches("width="))?)?,
                };
                Ok(ExtractorKind::Slice { width })
            }
            "quickshift" => {
                let mut qp = QuickshiftParams::default();
                for (k, v) in key_values(params.unwrap_or(""))? {
                    match k {
                        "kernel" | "kernel_size" => qp.kernel_size = parse_num(k, v)?,
                        "max_dist" => qp.max_dist = parse_num(k, v)?,
                        "sigma" => qp.sigma = parse_num(k, v)?,
                        "ratio" => qp.ratio = parse_num(k, v)?,
                        other => return Err(FixError::param(other, "unknown quickshift parameter")),
                    }
                }
                qp.validate()?;
                Ok(ExtractorKind::Quickshift(qp))
            }
            "clustering" => {
                let mut k = None;
                let mut base = None;
                // `base=` takes the rest of the spec, since the base may carry
                // its own comma-separated parameters.
                let params = params.unwrap_or("");
                let (own, base_spec) = match params.find("base=") {
                    Some(at) => (params[..at].trim_end_matches(','), Some(&params[at + 5..])),
                    None => (params, None),
                };
                if let Some(v) = base_spec {
                    let b: ExtractorKind = v.parse()?;
                    if matches!(b, ExtractorKind::Clustering { .. } | ExtractorKind::Random { .. }) {
                        return Err(FixError::param("base", "must be a deterministic base partition"));
                    }
                    base = Some(b);
                }
                for (key, v) in key_values(own)? {
                    match key {
                        "k" => k = Some(positive("k", parse_num("k", v)?)?),
                        other => return Err(FixError::param(other, "unknown clustering parameter")),
                    }
                }
                let base = base.ok_or_else(|| FixError::param("base", "clustering needs base=<extractor>"))?;
                Ok(ExtractorKind::Clustering {
                    k,
                    base: Box::new(base),
                })
            }
            other => Err(FixError::param(
                "extractor",
                format!("unknown extractor `{other}`"),
            )),
        }
    }
}

/// Per-sample inputs an extractor may need besides the sample itself.
#[derive(Clone, Copy, Debug)]
pub struct ExtractContext<'a> {
    pub seed: u64,
    pub group_maximum: GroupMaximum,
    pub embeddings: Option<&'a EmbeddingTable>,
}

impl ExtractorKind {
    pub fn extract(&self, sample: &Sample, ctx: &ExtractContext<'_>) -> Result<GroupSet> {
        self.check_modality(sample.modality())?;
        let mut set = match self {
            ExtractorKind::Identity => identity_extract(sample)?,
            ExtractorKind::Random { max_groups } => {
                let gm = match max_groups {
                    Some(n) => ctx.group_maximum.with_max_groups(*n)?,
                    None => ctx.group_maximum,
                };
                random_extract(sample, &gm, ctx.seed)?
            }
            ExtractorKind::Patch { rows, cols } => match sample {
                Sample::Image(map) => patch_extract(map, *rows, *cols)?,
                _ => unreachable!("modality checked"),
            },
            ExtractorKind::Slice { width } => match sample {
                Sample::Series(curve) => slice_extract(curve, *width)?,
                _ => unreachable!("modality checked"),
            },
            ExtractorKind::Text(granularity) => match sample {
                Sample::Text(text) => text_extract(text, *granularity)?,
                _ => unreachable!("modality checked"),
            },
            ExtractorKind::Quickshift(params) => match sample {
                Sample::Image(map) => quickshift_extract(map, params)?,
                _ => unreachable!("modality checked"),
            },
            ExtractorKind::Clustering { k, base } => {
                let base_groups = base.extract(sample, ctx)?;
                let k = k.unwrap_or(ctx.group_maximum.max_groups);
                cluster_extract(sample, &base_groups, k, ctx.seed, ctx.embeddings)?
            }
        };
        set.provenance = self.to_string();
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_maximum_presets() {
        assert_eq!(GroupMaximum::massmaps().max_groups, 25);
        assert_eq!(GroupMaximum::supernova().max_groups, 9);
        assert_eq!(GroupMaximum::new(6, 1.5).unwrap().max_groups, 9);
        assert_eq!(GroupMaximum::politeness().max_groups, 40);
        assert!(GroupMaximum::new(0, 1.5).is_err());
    }

    #[test]
    fn parse_specs() {
        assert_eq!("patch:8x8".parse::<ExtractorKind>().unwrap(), ExtractorKind::Patch { rows: 8, cols: 8 });
        assert_eq!("patch".parse::<ExtractorKind>().unwrap(), ExtractorKind::Patch { rows: 8, cols: 8 });
        assert_eq!("slice:10".parse::<ExtractorKind>().unwrap(), ExtractorKind::Slice { width: 10 });
        assert_eq!(
            "random:25".parse::<ExtractorKind>().unwrap(),
            ExtractorKind::Random { max_groups: Some(25) }
        );
        assert_eq!("random".parse::<ExtractorKind>().unwrap(), ExtractorKind::Random { max_groups: None });
        let q: ExtractorKind = "quickshift:kernel=3,sigma=0".parse().unwrap();
        assert_eq!(
            q,
            ExtractorKind::Quickshift(QuickshiftParams {
                kernel_size: 3.0,
                sigma: 0.0,
                ..Default::default()
            })
        );
        let c: ExtractorKind = "clustering:k=4,base=patch".parse().unwrap();
        assert_eq!(c.to_string(), "clustering:k=4,base=patch:8x8");
        let c: ExtractorKind = "clustering:k=3,base=quickshift:kernel=3,sigma=0".parse().unwrap();
        assert_eq!(c.to_string().parse::<ExtractorKind>().unwrap(), c);
    }

    #[test]
    fn bad_specs_name_the_parameter() {
        for (spec, name) in [
            ("patch:0x8", "rows"),
            ("patch:8", "grid"),
            ("slice:abc", "width"),
            ("quickshift:kernel=-1", "kernel_size"),
            ("quickshift:foo=1", "foo"),
            ("clustering:k=2", "base"),
            ("nonsense", "extractor"),
            ("identity:3", "identity"),
        ] {
            match spec.parse::<ExtractorKind>() {
                Err(FixError::Parameter { name: n, .. }) => assert_eq!(n, name, "{spec}"),
                other => panic!("{spec}: {other:?}"),
            }
        }
    }

    #[test]
    fn display_roundtrips() {
        for spec in ["identity", "random:9", "patch:4x2", "slice:15", "phrases", "clustering:k=3,base=words", "clustering:base=patch:4x4", "clustering:k=2,base=quickshift"] {
            let k: ExtractorKind = spec.parse().unwrap();
            assert_eq!(k.to_string(), spec);
            assert_eq!(k.to_string().parse::<ExtractorKind>().unwrap(), k);
        }
    }
}
