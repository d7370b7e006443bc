use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::io::{read_to_string, write_string};
use crate::error::{FixError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleScore {
    pub id: String,
    pub fix_score: f64,
    pub groups: usize,
}

/// One extractor/scorer row: per-sample scores with their mean and bootstrap
/// standard deviation, plus the configuration that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub extractor: String,
    pub scorer: String,
    pub seed: u64,
    pub mean: f64,
    pub boot_std: f64,
    pub samples: Vec<SampleScore>,
    pub config: BTreeMap<String, String>,
}

impl EvalReport {
    pub fn n(&self) -> usize {
        self.samples.len()
    }
}

pub const TSV_HEADER: &str = "extractor\tscorer\tmean\tboot_std\tn\tseed";

/// Tab-separated summary, one row per report. Floats use the shortest
/// representation that round-trips.
pub fn format_tsv(reports: &[EvalReport]) -> String {
    let mut out = String::from(TSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.extractor,
            r.scorer,
            r.mean,
            r.boot_std,
            r.n(),
            r.seed
        );
    }
    out
}

/// Summary rows parsed back from [`format_tsv`] output.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub extractor: String,
    pub scorer: String,
    pub mean: f64,
    pub boot_std: f64,
    pub n: usize,
    pub seed: u64,
}

pub fn parse_tsv(path: &Path, text: &str) -> Result<Vec<TableRow>> {
    let err = |line: usize, message: String| FixError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TSV_HEADER => {}
        _ => return Err(err(1, format!("header must be `{TSV_HEADER}`"))),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 6 {
                return Err(err(i + 1, format!("expected 6 columns, got {}", f.len())));
            }
            let num = |s: &str, what: &str| -> Result<f64> {
                s.parse().map_err(|_| err(i + 1, format!("{what}: cannot parse `{s}`")))
            };
            Ok(TableRow {
                extractor: f[0].to_string(),
                scorer: f[1].to_string(),
                mean: num(f[2], "mean")?,
                boot_std: num(f[3], "boot_std")?,
                n: f[4].parse().map_err(|_| err(i + 1, format!("n: cannot parse `{}`", f[4])))?,
                seed: f[5].parse().map_err(|_| err(i + 1, format!("seed: cannot parse `{}`", f[5])))?,
            })
        })
        .collect()
}

/// Column-aligned table for terminals.
pub fn render_table(reports: &[EvalReport]) -> String {
    let rows: Vec<[String; 5]> = reports
        .iter()
        .map(|r| {
            [
                r.extractor.clone(),
                r.scorer.clone(),
                format!("{:.4}", r.mean),
                format!("{:.4}", r.boot_std),
                r.n().to_string(),
            ]
        })
        .collect();
    let header = ["extractor", "scorer", "mean", "boot_std", "n"].map(String::from);
    let widths: Vec<usize> = (0..5)
        .map(|j| rows.iter().chain([&header]).map(|r| r[j].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (c, w))| if j < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Writes the TSV summary to `path` and the full records as JSON next to it
/// (`<path>.json`).
pub fn write_report(reports: &[EvalReport], path: &Path) -> Result<()> {
    write_string(path, &format_tsv(reports))?;
    write_records(reports, &records_path(path))
}

pub fn records_path(tsv: &Path) -> std::path::PathBuf {
    let mut name = tsv.as_os_str().to_owned();
    name.push(".json");
    name.into()
}

pub fn write_records(reports: &[EvalReport], path: &Path) -> Result<()> {
    let mut json = serde_json::to_string_pretty(reports)?;
    json.push('\n');
    write_string(path, &json)
}

pub fn load_records(path: &Path) -> Result<Vec<EvalReport>> {
    Ok(serde_json::from_str(&read_to_string(path)?)?)
}
