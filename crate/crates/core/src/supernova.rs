//! Linear-consistency scoring for multi-band light curves.
//!
//! Masks index a per-sample timestamp grid: the sorted union of all
//! observation times plus any declared timestamps without data. For every
//! band, the group's selected observations are fit with an OLS line; `p` is
//! the fraction whose fitted flux lies within `eps · flux_err` of the
//! observed flux and `d` the fraction of sliding windows over the group's time
//! span that contain at least one selected observation. The group scores the
//! best `p · d` over bands.

use crate::error::{FixError, Result};
use crate::mask::FeatureMask;
use crate::sample::{Modality, Sample};
use crate::scoring::{AlignmentScore, AlignmentScorer};

#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    /// Modified Julian days.
    pub time: f64,
    pub band: String,
    pub flux: f64,
    pub flux_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LightCurve {
    observations: Vec<Observation>,
    /// Grid position of each observation's timestamp.
    grid_index: Vec<usize>,
    grid: Vec<f64>,
    bands: Vec<String>,
}

impl LightCurve {
    /// Builds a curve from observations plus extra timestamps that carry no
    /// data but still occupy a grid position.
    pub fn new(observations: Vec<Observation>, empty_times: Vec<f64>) -> Result<Self> {
        for (i, o) in observations.iter().enumerate() {
            if !o.time.is_finite() || !o.flux.is_finite() || !o.flux_err.is_finite() {
                return Err(FixError::arg(format!("observation {i} has a non-finite value")));
            }
            if o.flux_err < 0.0 {
                return Err(FixError::arg(format!("observation {i} has negative flux error")));
            }
        }
        if let Some(t) = empty_times.iter().find(|t| !t.is_finite()) {
            return Err(FixError::arg(format!("non-finite timestamp {t}")));
        }
        let mut grid: Vec<f64> = observations
            .iter()
            .map(|o| o.time)
            .chain(empty_times)
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let grid_index = observations
            .iter()
            .map(|o| grid.partition_point(|&t| t < o.time))
            .collect();
        let mut bands: Vec<String> = observations.iter().map(|o| o.band.clone()).collect();
        bands.sort();
        bands.dedup();
        Ok(Self {
            observations,
            grid_index,
            grid,
            bands,
        })
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    /// Sorted distinct timestamps; the mask domain.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Distinct band identifiers in sorted order.
    pub fn bands(&self) -> &[String] {
        &self.bands
    }

    fn check_mask(&self, group: &FeatureMask) -> Result<()> {
        if group.len() != self.grid.len() {
            return Err(FixError::arg(format!(
                "mask length {} does not match timestamp grid of {}",
                group.len(),
                self.grid.len()
            )));
        }
        Ok(())
    }

    /// Observations in `band` whose timestamp is selected by `group`.
    pub fn selected<'a>(
        &'a self,
        group: &'a FeatureMask,
        band: &'a str,
    ) -> impl Iterator<Item = &'a Observation> + 'a {
        self.observations
            .iter()
            .zip(&self.grid_index)
            .filter(move |(o, &gi)| o.band == band && group.get(gi))
            .map(|(o, _)| o)
    }

    /// First and last selected grid timestamps.
    pub fn selected_span(&self, group: &FeatureMask) -> Option<(f64, f64)> {
        let mut ones = group.ones();
        let first = ones.next()?;
        let last = ones.last().unwrap_or(first);
        Some((self.grid[first], self.grid[last]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsistencyParams {
    /// Multiplier on the flux error defining the acceptance band.
    pub eps: f64,
    /// Window length λ in days.
    pub window: f64,
    /// Window step τ in days.
    pub step: f64,
}

impl Default for ConsistencyParams {
    fn default() -> Self {
        Self {
            eps: 1.0,
            window: 10.0,
            step: 5.0,
        }
    }
}

impl ConsistencyParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("eps", self.eps), ("window", self.window), ("step", self.step)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(FixError::param(name, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Ordinary least squares `flux ≈ slope · time + intercept`.
pub fn fit_line(times: &[f64], fluxes: &[f64]) -> Result<(f64, f64)> {
    if times.len() != fluxes.len() {
        return Err(FixError::arg("times and fluxes differ in length"));
    }
    if times.len() < 2 {
        return Err(FixError::arg("line fit needs at least two points"));
    }
    let n = times.len() as f64;
    let t_mean = times.iter().sum::<f64>() / n;
    let y_mean = fluxes.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (t, y) in times.iter().zip(fluxes) {
        sxx += (t - t_mean) * (t - t_mean);
        sxy += (t - t_mean) * (y - y_mean);
    }
    if sxx == 0.0 {
        return Err(FixError::arg("line fit needs at least two distinct times"));
    }
    let slope = sxy / sxx;
    Ok((slope, y_mean - slope * t_mean))
}

/// Roundoff allowance when comparing fitted and observed flux.
fn within_band(fitted: f64, observed: f64, half_width: f64) -> bool {
    (fitted - observed).abs() <= half_width + 1e-9 * (1.0 + observed.abs())
}

fn fraction_consistent(points: &[&Observation], eps: f64) -> f64 {
    match points.len() {
        0 => 0.0,
        1 => 1.0,
        m => {
            let times: Vec<f64> = points.iter().map(|o| o.time).collect();
            let fluxes: Vec<f64> = points.iter().map(|o| o.flux).collect();
            // All points at one time: the least-squares line is flat at the mean.
            let (slope, intercept) = fit_line(&times, &fluxes)
                .unwrap_or((0.0, fluxes.iter().sum::<f64>() / m as f64));
            let hits = points
                .iter()
                .filter(|o| within_band(slope * o.time + intercept, o.flux, eps * o.flux_err))
                .count();
            hits as f64 / m as f64
        }
    }
}

fn fraction_windows_hit(points: &[&Observation], span: (f64, f64), window: f64, step: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let (start, end) = span;
    let n = (((end - start) / step).floor() as usize).max(1);
    let hits = (0..n)
        .filter(|&i| {
            let lo = start + i as f64 * step;
            let hi = lo + window;
            points.iter().any(|o| o.time >= lo && o.time <= hi)
        })
        .count();
    hits as f64 / n as f64
}

/// Fraction of the group's observations in `band` that lie on their own
/// least-squares line within `eps · flux_err`.
pub fn linear_fraction(
    group: &FeatureMask,
    curve: &LightCurve,
    band: &str,
    eps: f64,
) -> Result<f64> {
    curve.check_mask(group)?;
    let points: Vec<&Observation> = curve.selected(group, band).collect();
    Ok(fraction_consistent(&points, eps))
}

/// Fraction of windows `[start + iτ, start + iτ + λ]`, `i < N`, over the
/// group's selected time span that contain an observation in `band`, with
/// `N = max(1, ⌊(end - start) / τ⌋)`.
pub fn density_fraction(
    group: &FeatureMask,
    curve: &LightCurve,
    band: &str,
    window: f64,
    step: f64,
) -> Result<f64> {
    curve.check_mask(group)?;
    let Some(span) = curve.selected_span(group) else {
        return Ok(0.0);
    };
    let points: Vec<&Observation> = curve.selected(group, band).collect();
    Ok(fraction_windows_hit(&points, span, window, step))
}

/// Best `p · d` over bands. Empty groups and groups selecting only empty
/// timestamps score 0.
pub fn supernova_expert_align(
    group: &FeatureMask,
    curve: &LightCurve,
    params: &ConsistencyParams,
) -> Result<AlignmentScore> {
    params.validate()?;
    curve.check_mask(group)?;
    let Some(span) = curve.selected_span(group) else {
        return Ok(AlignmentScore::ZERO);
    };
    let mut best = 0.0f64;
    for band in curve.bands() {
        let points: Vec<&Observation> = curve.selected(group, band).collect();
        if points.is_empty() {
            continue;
        }
        let p = fraction_consistent(&points, params.eps);
        let d = fraction_windows_hit(&points, span, params.window, params.step);
        best = best.max(p * d);
    }
    Ok(AlignmentScore::from_raw(best))
}

#[derive(Clone, Debug, Default)]
pub struct SupernovaScorer {
    pub params: ConsistencyParams,
}

impl AlignmentScorer for SupernovaScorer {
    fn name(&self) -> &str {
        "supernova"
    }

    fn modality(&self) -> Option<Modality> {
        Some(Modality::Series)
    }

    fn score(&self, group: &FeatureMask, sample: &Sample) -> Result<AlignmentScore> {
        let Sample::Series(curve) = sample else {
            return Err(FixError::config(format!(
                "supernova scorer cannot score {} samples",
                sample.modality()
            )));
        };
        supernova_expert_align(group, curve, &self.params)
    }
}
