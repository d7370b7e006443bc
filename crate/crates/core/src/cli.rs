//! Command-line front end: `extract`, `score`, `evaluate`, `bootstrap` and
//! `synth`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::error::{FixError, Result};
use crate::extract::{ExtractContext, ExtractorKind, GroupMaximum, DEFAULT_SCALING};
use crate::harness::report::{format_tsv, load_records, render_table};
use crate::harness::{self, io, Dataset, EvalOptions};
use crate::massmaps::{MassMapScorer, Thresholds};
use crate::sample::Modality;
use crate::scoring::{aggregate, group_scores, AlignmentScorer, ExplicitScorer};
use crate::supernova::{ConsistencyParams, SupernovaScorer};
use crate::text::{AnchorWords, EmbeddingTable, EmotionScorer, PolitenessScorer};

const AFTER_HELP: &str = "\
Extractors (--extractor SPEC):
  identity                        all features in one group
  random[:N]                      uniform random partition into at most N groups
                                  (default N: the scorer's group maximum)
  patch[:RxC]                     image grid of R x C cells (default 8x8)
  slice[:W]                       series windows of W timestamps (default 5; 10 and 15 are common)
  words | phrases | sentences     text units
  quickshift[:kernel=5,max_dist=10,sigma=0.2,ratio=1]
                                  image superpixels (defaults shown)
  clustering:base=SPEC[,k=K]      k-means over the segments of a base extractor
                                  (default K: the scorer's group maximum)

Scorers (--scorer):
  massmaps     void < 0, cluster > 3 sigma          group maximum 25
  supernova    eps=1, window=10, step=5             group maximum 9
  politeness   needs --embeddings and --lexicon     group maximum 40
  emotion      needs --embeddings, optional --anchors   group maximum 40
  explicit     best IoU against annotated masks     group maximum ceil(1.5 x annotations)
  Group maximum scaling is 1.5 x the expert-feature count.

Settings come from defaults, then --config (`key = value` lines), then flags.
Scorer parameters (eps, window, step, void_below, cluster_sigmas) are set with
--set key=value or in the config file.

Exit status: 0 success, 1 data error, 2 usage error.";

#[derive(Parser, Debug)]
#[command(
    name = "fixscore",
    version,
    about = "Score feature groups by their alignment with expert knowledge",
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract groups from every sample and print them as run-length masks.
    Extract(Common),
    /// Score one sample's groups: per-group alignment and the overall score.
    Score(Common),
    /// Evaluate extractors over a dataset and print a TSV report.
    Evaluate(Common),
    /// Bootstrap the standard deviation of the mean of a list of scores.
    Bootstrap(Common),
    /// Write a synthetic corpus for every modality.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Sample file, sample directory, text corpus, or score list.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// image | series | text (inferred from the file extension when omitted).
    #[arg(long)]
    modality: Option<String>,
    /// massmaps | supernova | politeness | emotion | explicit.
    #[arg(long)]
    scorer: Option<String>,
    /// Extractor spec; repeat for several report rows.
    #[arg(long = "extractor", short = 'e')]
    extractors: Vec<String>,
    /// Seed for random extractors, clustering and bootstrap.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (TSV reports also get a `.json` record file).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// `key = value` settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default 1).
    #[arg(long)]
    workers: Option<usize>,
    /// Bootstrap resamples (default 1000).
    #[arg(long)]
    iters: Option<usize>,
    /// Word embeddings: `word<TAB>v1 v2 ...`.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Politeness lexicon: `[lang/]category: w1, w2, ...`.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Emotion anchors: `PV|NV|HA|LA: w1, w2, ...`.
    #[arg(long)]
    anchors: Option<PathBuf>,
    /// Groups file for `score`.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// Annotated masks; enables explicit scoring.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Override a setting: `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Print an aligned table instead of TSV.
    #[arg(long)]
    table: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Output directory.
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Samples per modality.
    #[arg(long, default_value_t = 30)]
    count: usize,
}

const KEYS: &[&str] = &[
    "input",
    "modality",
    "scorer",
    "extractor",
    "seed",
    "out",
    "workers",
    "iters",
    "embeddings",
    "lexicon",
    "anchors",
    "groups",
    "annotations",
    "eps",
    "window",
    "step",
    "void_below",
    "cluster_sigmas",
];

/// Flag, config and default values merged with flag > config > default.
#[derive(Debug, Default)]
struct Settings {
    values: BTreeMap<String, String>,
    extractors: Vec<String>,
}

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(FixError::config(format!("unknown setting `{key}`")))
    }
}

impl Settings {
    fn resolve(c: &Common) -> Result<Self> {
        let mut s = Settings::default();
        if let Some(path) = &c.config {
            let text = io::read_to_string(path)?;
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    FixError::config(format!("{}:{}: expected `key = value`", path.display(), i + 1))
                })?;
                s.put(k.trim(), v.trim(), true)?;
            }
        }
        for kv in &c.sets {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| FixError::config(format!("--set expects key=value, got `{kv}`")))?;
            s.put(k.trim(), v.trim(), false)?;
        }
        let paths = [
            ("input", &c.input),
            ("out", &c.out),
            ("embeddings", &c.embeddings),
            ("lexicon", &c.lexicon),
            ("anchors", &c.anchors),
            ("groups", &c.groups),
            ("annotations", &c.annotations),
        ];
        for (k, v) in paths {
            if let Some(p) = v {
                s.values.insert(k.into(), p.display().to_string());
            }
        }
        let others = [
            ("modality", c.modality.clone()),
            ("scorer", c.scorer.clone()),
            ("seed", c.seed.map(|v| v.to_string())),
            ("workers", c.workers.map(|v| v.to_string())),
            ("iters", c.iters.map(|v| v.to_string())),
        ];
        for (k, v) in others {
            if let Some(v) = v {
                s.values.insert(k.into(), v);
            }
        }
        if !c.extractors.is_empty() {
            s.extractors = c.extractors.clone();
        }
        Ok(s)
    }

    /// Config files may list `extractor` several times; `--set` replaces.
    fn put(&mut self, key: &str, value: &str, accumulate: bool) -> Result<()> {
        check_key(key)?;
        if key == "extractor" {
            if !accumulate {
                self.extractors.clear();
            }
            self.extractors.push(value.to_string());
        } else {
            self.values.insert(key.to_string(), value.to_string());
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| FixError::param(key, format!("cannot parse `{v}`")))
            })
            .transpose()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    fn require_path(&self, key: &str, why: &str) -> Result<PathBuf> {
        self.path(key)
            .ok_or_else(|| FixError::config(format!("--{key} is required {why}")))
    }

    fn seed(&self) -> Result<Option<u64>> {
        self.parse("seed")
    }

    fn require_seed(&self, why: &str) -> Result<u64> {
        self.seed()?
            .ok_or_else(|| FixError::config(format!("--seed is required {why}")))
    }

    fn modality(&self, input: &Path) -> Result<Modality> {
        if let Some(m) = self.get("modality") {
            return m.parse();
        }
        match input.extension().and_then(|e| e.to_str()) {
            Some("txt") => Ok(Modality::Image),
            Some("csv") => Ok(Modality::Series),
            Some("tsv") => Ok(Modality::Text),
            _ => Err(FixError::config(format!(
                "cannot infer the modality of {}; pass --modality",
                input.display()
            ))),
        }
    }

    fn extractor_kinds(&self) -> Result<Vec<ExtractorKind>> {
        if self.extractors.is_empty() {
            return Ok(vec![ExtractorKind::Identity]);
        }
        self.extractors.iter().map(|s| s.parse()).collect()
    }

    /// Everything that shaped the run except input location and threading.
    fn snapshot(&self) -> BTreeMap<String, String> {
        self.values
            .iter()
            .filter(|(k, _)| !matches!(k.as_str(), "out" | "workers" | "config"))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

fn default_scorer(modality: Modality) -> &'static str {
    match modality {
        Modality::Image => "massmaps",
        Modality::Series => "supernova",
        Modality::Text => "politeness",
    }
}

fn load_embeddings(s: &Settings) -> Result<Option<Arc<EmbeddingTable>>> {
    s.path("embeddings")
        .map(|p| io::load_embeddings(&p).map(Arc::new))
        .transpose()
}

fn build_scorer(
    name: &str,
    s: &Settings,
    embeddings: Option<&Arc<EmbeddingTable>>,
) -> Result<Box<dyn AlignmentScorer>> {
    let need_embeddings = || {
        embeddings
            .cloned()
            .ok_or_else(|| FixError::config(format!("--embeddings is required by the {name} scorer")))
    };
    Ok(match name {
        "massmaps" => {
            let d = Thresholds::default();
            Box::new(MassMapScorer {
                thresholds: Thresholds {
                    void_below: s.parse("void_below")?.unwrap_or(d.void_below),
                    cluster_sigmas: s.parse("cluster_sigmas")?.unwrap_or(d.cluster_sigmas),
                },
            })
        }
        "supernova" => {
            let d = ConsistencyParams::default();
            let params = ConsistencyParams {
                eps: s.parse("eps")?.unwrap_or(d.eps),
                window: s.parse("window")?.unwrap_or(d.window),
                step: s.parse("step")?.unwrap_or(d.step),
            };
            params.validate()?;
            Box::new(SupernovaScorer { params })
        }
        "politeness" => {
            let table = need_embeddings()?;
            let lexicon = s.require_path("lexicon", "by the politeness scorer")?;
            Box::new(PolitenessScorer::new(table, &io::load_lexicons(&lexicon)?)?)
        }
        "emotion" => {
            let table = need_embeddings()?;
            let anchors = match s.path("anchors") {
                Some(p) => io::load_anchors(&p)?,
                None => AnchorWords::default(),
            };
            Box::new(EmotionScorer::new(table, &anchors)?)
        }
        "explicit" => {
            return Err(FixError::config(
                "the explicit scorer needs annotations (--annotations or `<stem>.rle` files)",
            ))
        }
        other => return Err(FixError::param("scorer", format!("unknown scorer `{other}`"))),
    })
}

/// Loads the dataset named by `input`, attaching embeddings when given.
fn load_input(s: &Settings) -> Result<(Dataset, Option<Arc<EmbeddingTable>>)> {
    let input = s.require_path("input", "")?;
    let modality = s.modality(&input)?;
    let mut ds = harness::load_dataset(&input, modality)?;
    let embeddings = load_embeddings(s)?;
    if let Some(t) = &embeddings {
        ds = ds.with_embeddings(t.clone())?;
    }
    Ok((ds, embeddings))
}

fn check_seeded(s: &Settings, kinds: &[ExtractorKind]) -> Result<u64> {
    match kinds.iter().find(|k| k.is_stochastic()) {
        Some(k) => s.require_seed(&format!("by the stochastic extractor `{k}`")),
        None => Ok(s.seed()?.unwrap_or(0)),
    }
}

fn cmd_extract(s: &Settings, out: &mut dyn Write) -> Result<()> {
    let (ds, _) = load_input(s)?;
    let kinds = s.extractor_kinds()?;
    let [kind] = kinds.as_slice() else {
        return Err(FixError::config("extract takes exactly one --extractor"));
    };
    kind.check_modality(ds.modality)?;
    let seed = check_seeded(s, &kinds)?;
    let scorer = s.get("scorer").unwrap_or(default_scorer(ds.modality));
    let preset =
        GroupMaximum::for_scorer(scorer).unwrap_or_else(|| harness::default_group_maximum(ds.modality));
    let mut text = String::new();
    for (index, record) in ds.records.iter().enumerate() {
        let group_maximum = match &record.annotations {
            Some(a) => GroupMaximum::new(a.len(), DEFAULT_SCALING)?,
            None => preset,
        };
        let ctx = ExtractContext {
            seed: harness::sample_seed(seed, index),
            group_maximum,
            embeddings: ds.embeddings.as_deref(),
        };
        let groups = kind.extract(&record.sample, &ctx)?;
        text.push_str(&format!("# {} d={} groups={}\n", record.id, groups.d(), groups.len()));
        text.push_str(&io::format_groups(&groups));
    }
    emit(s, &text, out)
}

fn cmd_score(s: &Settings, out: &mut dyn Write) -> Result<()> {
    let (ds, embeddings) = load_input(s)?;
    let [record] = ds.records.as_slice() else {
        return Err(FixError::config(format!(
            "score needs a single sample; input holds {}",
            ds.len()
        )));
    };
    let d = record.sample.feature_count();
    let groups = io::load_groups(&s.require_path("groups", "by score")?, d)?;
    let annotations = match s.path("annotations") {
        Some(p) => Some(io::load_groups(&p, d)?),
        None => record.annotations.clone(),
    };
    let scorer: Box<dyn AlignmentScorer> = match (s.get("scorer"), annotations) {
        (None | Some("explicit"), Some(a)) => Box::new(ExplicitScorer::new(a)?),
        (name, _) => build_scorer(name.unwrap_or(default_scorer(ds.modality)), s, embeddings.as_ref())?,
    };
    let scores = group_scores(&groups, &record.sample, scorer.as_ref())?;
    let mut text = String::from("group\tlabel\tsize\texpert_align\n");
    for (i, (g, v)) in groups.iter().zip(&scores).enumerate() {
        let label = groups.label(i).unwrap_or("-");
        text.push_str(&format!("{i}\t{label}\t{}\t{}\n", g.count(), v.value()));
    }
    text.push_str(&format!("fixscore\t{}\n", aggregate(&groups, &scores).value()));
    emit(s, &text, out)
}

fn cmd_evaluate(s: &Settings, table: bool, out: &mut dyn Write) -> Result<()> {
    let (ds, embeddings) = load_input(s)?;
    let kinds = s.extractor_kinds()?;
    for k in &kinds {
        k.check_modality(ds.modality)?;
    }
    let seed = check_seeded(s, &kinds)?;
    let scorer = if ds.is_explicit() {
        None
    } else {
        let name = s.get("scorer").unwrap_or(default_scorer(ds.modality));
        Some(build_scorer(name, s, embeddings.as_ref())?)
    };
    let opts = EvalOptions {
        seed,
        bootstrap_iters: s.parse("iters")?.unwrap_or(harness::DEFAULT_ITERS),
        workers: s.parse("workers")?.unwrap_or(1),
        snapshot: s.snapshot(),
    };
    let reports = kinds
        .iter()
        .map(|k| harness::evaluate(&ds, scorer.as_deref(), k, &opts))
        .collect::<Result<Vec<_>>>()?;
    if let Some(path) = s.path("out") {
        harness::write_report(&reports, &path)?;
    }
    let text = if table {
        render_table(&reports)
    } else {
        format_tsv(&reports)
    };
    out.write_all(text.as_bytes())
        .map_err(|e| FixError::io("<stdout>", e))
}

fn cmd_bootstrap(s: &Settings, out: &mut dyn Write) -> Result<()> {
    let input = s.require_path("input", "")?;
    let seed = s.require_seed("by bootstrap")?;
    let iters = s.parse("iters")?.unwrap_or(harness::DEFAULT_ITERS);
    let text = if input.extension().is_some_and(|e| e == "json") {
        let mut reports = load_records(&input)?;
        for r in &mut reports {
            let values: Vec<f64> = r.samples.iter().map(|x| x.fix_score).collect();
            r.boot_std = harness::bootstrap_std(&values, iters, seed)?;
            r.seed = seed;
        }
        format_tsv(&reports)
    } else {
        let raw = io::read_to_string(&input)?;
        let mut values = Vec::new();
        for (i, line) in raw.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let v: f64 = t.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| FixError::Parse {
                path: input.clone(),
                line: i + 1,
                message: format!("expected a finite score, got `{t}`"),
            })?;
            values.push(v);
        }
        let std = harness::bootstrap_std(&values, iters, seed)?;
        format!("n\tmean\tboot_std\n{}\t{}\t{std}\n", values.len(), values.iter().sum::<f64>() / values.len().max(1) as f64)
    };
    emit(s, &text, out)
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let seed = a
        .seed
        .ok_or_else(|| FixError::config("--seed is required by synth"))?;
    if a.count == 0 {
        return Err(FixError::param("count", "must be at least 1"));
    }
    harness::synth::write_corpus(&a.out, seed, a.count)
}

/// Writes to `--out` when set, otherwise to `out`.
fn emit(s: &Settings, text: &str, out: &mut dyn Write) -> Result<()> {
    match s.path("out") {
        Some(p) => io::write_string(&p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| FixError::io("<stdout>", e)),
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Extract(c) => cmd_extract(&Settings::resolve(&c)?, out),
        Command::Score(c) => cmd_score(&Settings::resolve(&c)?, out),
        Command::Evaluate(c) => cmd_evaluate(&Settings::resolve(&c)?, c.table, out),
        Command::Bootstrap(c) => cmd_bootstrap(&Settings::resolve(&c)?, out),
        Command::Synth(a) => cmd_synth(&a),
    }
}

/// Runs the tool with explicit output streams and returns the exit status.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

/// Runs the tool on the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    // Unlocked handles: worker threads may log to stderr meanwhile.
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}
