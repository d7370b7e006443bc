//! Dataset loading, dataset-level evaluation, bootstrap and reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{FixError, Result};
use crate::extract::{ExtractContext, ExtractorKind, GroupMaximum, DEFAULT_SCALING};
use crate::mask::GroupSet;
use crate::sample::{Modality, Sample};
use crate::scoring::{check_compatible, fix_score, AlignmentScorer, ExplicitScorer};
use crate::text::EmbeddingTable;

pub mod bootstrap;
pub mod io;
pub mod report;
pub mod synth;

pub use bootstrap::{bootstrap_std, DEFAULT_ITERS};
pub use report::{write_report, EvalReport, SampleScore};

#[derive(Clone, Debug)]
pub struct SampleRecord {
    pub id: String,
    pub sample: Sample,
    /// Annotated expert features, present in explicit mode.
    pub annotations: Option<GroupSet>,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub modality: Modality,
    pub records: Vec<SampleRecord>,
    /// Word embeddings for text datasets.
    pub embeddings: Option<Arc<EmbeddingTable>>,
}

impl Dataset {
    pub fn new(modality: Modality, records: Vec<SampleRecord>) -> Result<Self> {
        if let Some(r) = records.iter().find(|r| r.sample.modality() != modality) {
            return Err(FixError::config(format!(
                "sample `{}` is {}, dataset is {modality}",
                r.id,
                r.sample.modality()
            )));
        }
        let annotated = records.iter().filter(|r| r.annotations.is_some()).count();
        if annotated != 0 && annotated != records.len() {
            return Err(FixError::config(format!(
                "{annotated} of {} samples have annotations; explicit mode needs all",
                records.len()
            )));
        }
        for r in &records {
            if let Some(a) = &r.annotations {
                if a.d() != r.sample.feature_count() {
                    return Err(FixError::config(format!(
                        "annotations of `{}` cover {} features, sample has {}",
                        r.id,
                        a.d(),
                        r.sample.feature_count()
                    )));
                }
                if a.is_empty() {
                    return Err(FixError::config(format!("annotations of `{}` are empty", r.id)));
                }
            }
        }
        Ok(Self {
            modality,
            records,
            embeddings: None,
        })
    }

    pub fn with_embeddings(mut self, table: Arc<EmbeddingTable>) -> Result<Self> {
        for r in &self.records {
            if let Sample::Text(t) = &r.sample {
                table.check_covers(t)?;
            }
        }
        self.embeddings = Some(table);
        Ok(self)
    }

    /// True when samples carry annotated expert features.
    pub fn is_explicit(&self) -> bool {
        self.records.first().is_some_and(|r| r.annotations.is_some())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

fn files_with_extension(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| FixError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| FixError::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn sample_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn load_file_records(
    path: &Path,
    ext: &str,
    parse: impl Fn(&Path) -> Result<Sample>,
) -> Result<Vec<SampleRecord>> {
    let files = if path.is_dir() {
        files_with_extension(path, ext)?
    } else {
        vec![path.to_path_buf()]
    };
    files
        .iter()
        .map(|f| {
            let sample = parse(f)?;
            let companion = io::annotation_path(f);
            let annotations = if companion.is_file() {
                Some(io::load_groups(&companion, sample.feature_count())?)
            } else {
                None
            };
            Ok(SampleRecord {
                id: sample_id(f),
                sample,
                annotations,
            })
        })
        .collect()
}

/// Loads a dataset. Rasters (`*.txt`) and series (`*.csv`) come from a
/// directory of sample files, or a single file; a sibling `<stem>.rle` holds
/// that sample's annotations. Text comes from one corpus file.
pub fn load_dataset(path: &Path, modality: Modality) -> Result<Dataset> {
    if !path.exists() {
        return Err(FixError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
        ));
    }
    let records = match modality {
        Modality::Image => load_file_records(path, "txt", |f| Ok(Sample::Image(io::load_raster(f)?)))?,
        Modality::Series => load_file_records(path, "csv", |f| Ok(Sample::Series(io::load_series(f)?)))?,
        Modality::Text => {
            let text = io::read_to_string(path)?;
            io::parse_text_corpus(path, &text)?
                .into_iter()
                .map(|(line, t)| SampleRecord {
                    id: format!("line{line}"),
                    sample: Sample::Text(t),
                    annotations: None,
                })
                .collect()
        }
    };
    if records.is_empty() {
        return Err(FixError::config(format!("no {modality} samples found in {}", path.display())));
    }
    Dataset::new(modality, records)
}

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub seed: u64,
    pub bootstrap_iters: usize,
    pub workers: usize,
    /// Extra entries copied into the report's config snapshot.
    pub snapshot: BTreeMap<String, String>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            bootstrap_iters: DEFAULT_ITERS,
            workers: 1,
            snapshot: BTreeMap::new(),
        }
    }
}

/// Seed for sample `index`, independent of evaluation order.
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Group maximum used when no scorer preset applies.
pub fn default_group_maximum(modality: Modality) -> GroupMaximum {
    match modality {
        Modality::Image => GroupMaximum::massmaps(),
        Modality::Series => GroupMaximum::supernova(),
        Modality::Text => GroupMaximum::politeness(),
    }
}

/// Extracts groups for every sample and scores them. Explicit datasets are
/// scored against their annotations and ignore `scorer`; implicit datasets
/// need one.
pub fn evaluate(
    ds: &Dataset,
    scorer: Option<&dyn AlignmentScorer>,
    extractor: &ExtractorKind,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    extractor.check_modality(ds.modality)?;
    let explicit = ds.is_explicit();
    let scorer_name = if explicit {
        "explicit".to_string()
    } else {
        let s = scorer.ok_or_else(|| {
            FixError::config("dataset has no annotations; an implicit scorer is required")
        })?;
        check_compatible(s, ds.modality)?;
        s.name().to_string()
    };
    if ds.is_empty() {
        return Err(FixError::arg("dataset has no samples"));
    }
    let implicit_gm = GroupMaximum::for_scorer(&scorer_name)
        .unwrap_or_else(|| default_group_maximum(ds.modality));

    let score_one = |(index, record): (usize, &SampleRecord)| -> Result<SampleScore> {
        let (explicit_scorer, gm) = match &record.annotations {
            Some(a) if explicit => (
                Some(ExplicitScorer::new(a.clone())?),
                GroupMaximum::new(a.len(), DEFAULT_SCALING)?,
            ),
            _ => (None, implicit_gm),
        };
        let ctx = ExtractContext {
            seed: sample_seed(opts.seed, index),
            group_maximum: gm,
            embeddings: ds.embeddings.as_deref(),
        };
        let groups = extractor.extract(&record.sample, &ctx)?;
        let active: &dyn AlignmentScorer = match &explicit_scorer {
            Some(e) => e,
            None => scorer.expect("checked above"),
        };
        let s = fix_score(&groups, &record.sample, active)?;
        Ok(SampleScore {
            id: record.id.clone(),
            fix_score: s.value(),
            groups: groups.len(),
        })
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| FixError::config(format!("cannot start worker pool: {e}")))?;
    let samples: Vec<SampleScore> = pool.install(|| {
        ds.records
            .par_iter()
            .enumerate()
            .map(score_one)
            .collect::<Result<Vec<_>>>()
    })?;

    let values: Vec<f64> = samples.iter().map(|s| s.fix_score).collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let boot_std = bootstrap_std(&values, opts.bootstrap_iters, opts.seed)?;

    let mut config = opts.snapshot.clone();
    config.insert("modality".into(), ds.modality.to_string());
    config.insert("extractor".into(), extractor.to_string());
    config.insert("scorer".into(), scorer_name.clone());
    config.insert("seed".into(), opts.seed.to_string());
    config.insert("bootstrap_iters".into(), opts.bootstrap_iters.to_string());
    if !explicit {
        config.insert("group_maximum".into(), implicit_gm.max_groups.to_string());
    }

    Ok(EvalReport {
        extractor: extractor.to_string(),
        scorer: scorer_name,
        seed: opts.seed,
        mean,
        boot_std,
        samples,
        config,
    })
}
