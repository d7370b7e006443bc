//! Text file formats.
//!
//! * raster: header `H W`, then `H` lines of `W` whitespace-separated values.
//! * groups / annotations: one mask per line, optionally `label<TAB>` first,
//!   then run lengths alternating zeros and ones, starting with zeros.
//! * series: CSV with header `time,band,flux,flux_err`; a row with only a
//!   time declares a timestamp without data.
//! * text corpus: `language<TAB>raw text` per line.
//! * embeddings: `word<TAB>v1 v2 ... ve` per line.
//! * lexicon: `[language/]category: w1, w2, ...` per line.
//! * anchors: `PV|NV|HA|LA: w1, w2, ...` per line.
//!
//! Blank lines and lines starting with `#` are ignored everywhere except in
//! CSV files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{FixError, Result};
use crate::mask::{FeatureMask, GroupSet};
use crate::massmaps::MassMap;
use crate::supernova::{LightCurve, Observation};
use crate::text::politeness::ANY_LANGUAGE;
use crate::text::{AnchorWords, EmbeddingTable, Lexicon, TokenizedText};

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| FixError::io(path, e))
}

pub(crate) fn write_string(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| FixError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| FixError::io(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> FixError {
    FixError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Non-blank, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
}

fn parse_finite(path: &Path, line: usize, field: &str, what: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("{what}: cannot parse `{field}`")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("{what}: non-finite value `{field}`")));
    }
    Ok(v)
}

pub fn parse_raster(path: &Path, text: &str) -> Result<MassMap> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing `H W` header"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let [h, w] = dims.as_slice() else {
        return Err(parse_err(path, hl, "header must be `H W`"));
    };
    let parse_dim = |s: &str, name: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(parse_err(path, hl, format!("{name} must be a positive integer, got `{s}`"))),
        }
    };
    let (h, w) = (parse_dim(h, "height")?, parse_dim(w, "width")?);
    let mut pixels = Vec::with_capacity(h * w);
    let mut rows = 0;
    for (ln, line) in lines {
        if rows == h {
            return Err(parse_err(path, ln, format!("more than {h} rows")));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != w {
            return Err(parse_err(path, ln, format!("expected {w} values, got {}", fields.len())));
        }
        for (col, f) in fields.iter().enumerate() {
            pixels.push(parse_finite(path, ln, f, &format!("column {}", col + 1))?);
        }
        rows += 1;
    }
    if rows != h {
        return Err(parse_err(path, text.lines().count(), format!("expected {h} rows, got {rows}")));
    }
    MassMap::new(h, w, pixels)
}

pub fn load_raster(path: &Path) -> Result<MassMap> {
    parse_raster(path, &read_to_string(path)?)
}

pub fn format_raster(map: &MassMap) -> String {
    let mut out = format!("{} {}\n", map.height(), map.width());
    for r in 0..map.height() {
        let row: Vec<String> = (0..map.width()).map(|c| map.at(r, c).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_groups(path: &Path, text: &str, d: usize) -> Result<GroupSet> {
    let mut set = GroupSet::new(d, path.display().to_string());
    for (ln, line) in content_lines(text) {
        let (label, runs) = match line.split_once('\t') {
            Some((l, r)) => (Some(l.trim().to_string()), r),
            None => (None, line),
        };
        let runs = runs
            .split_whitespace()
            .map(|r| {
                r.parse::<usize>()
                    .map_err(|_| parse_err(path, ln, format!("invalid run length `{r}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let total: usize = runs.iter().sum();
        if total != d {
            return Err(parse_err(path, ln, format!("run lengths sum to {total}, expected {d}")));
        }
        set.push_labeled(FeatureMask::from_runs(&runs), label)?;
    }
    Ok(set)
}

pub fn load_groups(path: &Path, d: usize) -> Result<GroupSet> {
    parse_groups(path, &read_to_string(path)?, d)
}

pub fn format_groups(set: &GroupSet) -> String {
    let mut out = String::new();
    for (i, m) in set.iter().enumerate() {
        if let Some(label) = set.label(i) {
            out.push_str(label);
            out.push('\t');
        }
        let runs: Vec<String> = m.to_runs().iter().map(usize::to_string).collect();
        out.push_str(&runs.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_series(path: &Path, text: &str) -> Result<LightCurve> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    let expected = ["time", "band", "flux", "flux_err"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(parse_err(path, 1, format!("header must be `{}`", expected.join(","))));
    }
    let mut observations = Vec::new();
    let mut empty_times = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let ln = record.position().map_or(0, |p| p.line() as usize);
        let field = |i: usize| record.get(i).unwrap_or("");
        let time = parse_finite(path, ln, field(0), "time")?;
        if (1..4).all(|i| field(i).is_empty()) {
            empty_times.push(time);
            continue;
        }
        if record.len() != 4 {
            return Err(parse_err(path, ln, format!("expected 4 fields, got {}", record.len())));
        }
        let band = field(1);
        if band.is_empty() {
            return Err(parse_err(path, ln, "empty band"));
        }
        let flux = parse_finite(path, ln, field(2), "flux")?;
        let flux_err = parse_finite(path, ln, field(3), "flux_err")?;
        if flux_err < 0.0 {
            return Err(parse_err(path, ln, "flux_err must be non-negative"));
        }
        observations.push(Observation {
            time,
            band: band.to_string(),
            flux,
            flux_err,
        });
    }
    LightCurve::new(observations, empty_times)
}

pub fn load_series(path: &Path) -> Result<LightCurve> {
    parse_series(path, &read_to_string(path)?)
}

pub fn format_series(curve: &LightCurve) -> String {
    let mut out = String::from("time,band,flux,flux_err\n");
    let mut with_data: Vec<f64> = curve.observations().iter().map(|o| o.time).collect();
    with_data.sort_by(f64::total_cmp);
    for o in curve.observations() {
        let _ = writeln!(out, "{},{},{},{}", o.time, o.band, o.flux, o.flux_err);
    }
    for t in curve.grid() {
        if with_data.binary_search_by(|x| x.total_cmp(t)).is_err() {
            let _ = writeln!(out, "{t},,,");
        }
    }
    out
}

pub fn parse_text_corpus(path: &Path, text: &str) -> Result<Vec<(usize, TokenizedText)>> {
    content_lines(text)
        .map(|(ln, line)| {
            let (lang, raw) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(path, ln, "expected `language<TAB>text`"))?;
            let t = TokenizedText::from_raw(lang.trim(), raw);
            if t.is_empty() {
                return Err(parse_err(path, ln, "record has no words"));
            }
            Ok((ln, t))
        })
        .collect()
}

pub fn parse_embeddings(path: &Path, text: &str) -> Result<EmbeddingTable> {
    let mut table: Option<EmbeddingTable> = None;
    for (ln, line) in content_lines(text) {
        let (word, rest) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(path, ln, "expected `word<TAB>values`"))?;
        let values = rest
            .split_whitespace()
            .enumerate()
            .map(|(i, f)| parse_finite(path, ln, f, &format!("component {}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(parse_err(path, ln, "embedding has no components"));
        }
        let t = table.get_or_insert_with(|| EmbeddingTable::new(values.len()));
        t.insert(word, values)
            .map_err(|e| parse_err(path, ln, e.to_string()))?;
    }
    table.ok_or_else(|| parse_err(path, 1, "embedding file is empty"))
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable> {
    parse_embeddings(path, &read_to_string(path)?)
}

fn word_list(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(str::to_string)
        .collect()
}

/// `category: w1, w2` lines; a `lang/` prefix on the category assigns it to
/// that language, otherwise to every language.
pub fn parse_lexicons(path: &Path, text: &str) -> Result<BTreeMap<String, Lexicon>> {
    let mut by_lang: BTreeMap<String, Vec<(String, Vec<String>)>> = BTreeMap::new();
    for (ln, line) in content_lines(text) {
        let (name, words) = line
            .split_once(':')
            .ok_or_else(|| parse_err(path, ln, "expected `category: words`"))?;
        let (lang, category) = match name.split_once('/') {
            Some((l, c)) => (l.trim(), c.trim()),
            None => (ANY_LANGUAGE, name.trim()),
        };
        let words = word_list(words);
        if words.is_empty() {
            return Err(parse_err(path, ln, format!("category `{category}` has no words")));
        }
        by_lang
            .entry(lang.to_string())
            .or_default()
            .push((category.to_string(), words));
    }
    if by_lang.is_empty() {
        return Err(parse_err(path, 1, "lexicon file is empty"));
    }
    by_lang
        .into_iter()
        .map(|(lang, cats)| Ok((lang, Lexicon::new(cats)?)))
        .collect()
}

pub fn load_lexicons(path: &Path) -> Result<BTreeMap<String, Lexicon>> {
    parse_lexicons(path, &read_to_string(path)?)
}

pub fn parse_anchors(path: &Path, text: &str) -> Result<AnchorWords> {
    let mut lists: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (ln, line) in content_lines(text) {
        let (name, words) = line
            .split_once(':')
            .ok_or_else(|| parse_err(path, ln, "expected `PV|NV|HA|LA: words`"))?;
        let key = match name.trim().to_ascii_uppercase().as_str() {
            "PV" | "POSITIVE_VALENCE" => "PV",
            "NV" | "NEGATIVE_VALENCE" => "NV",
            "HA" | "HIGH_AROUSAL" => "HA",
            "LA" | "LOW_AROUSAL" => "LA",
            other => return Err(parse_err(path, ln, format!("unknown anchor `{other}`"))),
        };
        let words = word_list(words);
        if words.is_empty() {
            return Err(parse_err(path, ln, format!("anchor `{key}` has no words")));
        }
        lists.insert(key, words);
    }
    let mut take = |k: &str| {
        lists
            .remove(k)
            .ok_or_else(|| parse_err(path, 0, format!("missing anchor `{k}`")))
    };
    Ok(AnchorWords {
        positive_valence: take("PV")?,
        negative_valence: take("NV")?,
        high_arousal: take("HA")?,
        low_arousal: take("LA")?,
    })
}

pub fn load_anchors(path: &Path) -> Result<AnchorWords> {
    parse_anchors(path, &read_to_string(path)?)
}

/// Companion annotation file of a sample file: same stem, `.rle` extension.
pub fn annotation_path(sample: &Path) -> PathBuf {
    sample.with_extension("rle")
}
