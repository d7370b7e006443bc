//! Binary feature masks and ordered collections of them.
//!
//! A [`FeatureMask`] selects a subset of the `d` low-level features of one
//! sample (pixels, timestamps or words). A [`GroupSet`] is an ordered list of
//! masks over the same sample; order and duplicates are preserved because the
//! aggregation counts covering groups with multiplicity.

use std::fmt;

use crate::error::{FixError, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FeatureMask {
    bits: Vec<bool>,
}

impl FeatureMask {
    /// All-zero mask over `d` features.
    pub fn empty(d: usize) -> Self {
        Self {
            bits: vec![false; d],
        }
    }

    /// All-ones mask over `d` features.
    pub fn full(d: usize) -> Self {
        Self {
            bits: vec![true; d],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Mask with the given feature indices set. Indices must be `< d`.
    pub fn from_indices(d: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = Self::empty(d);
        for i in indices {
            if i >= d {
                return Err(FixError::arg(format!(
                    "feature index {i} out of range for d = {d}"
                )));
            }
            mask.bits[i] = true;
        }
        Ok(mask)
    }

    /// Parses a string of `0`/`1` characters, e.g. `"1100"`.
    pub fn parse_bitstring(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(FixError::arg(format!("invalid mask character `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }

    /// Number of low-level features `d`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Cardinality: number of selected features.
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Indices of the selected features in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(FixError::arg(format!(
                "mask length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    pub fn intersection_count(&self, other: &Self) -> Result<usize> {
        self.check_len(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| **a && **b)
            .count())
    }

    pub fn union_count(&self, other: &Self) -> Result<usize> {
        self.check_len(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| **a || **b)
            .count())
    }

    /// In-place union with `other`.
    pub fn union_with(&mut self, other: &Self) -> Result<()> {
        self.check_len(other)?;
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
        Ok(())
    }

    /// Run-length encoding: alternating run lengths starting with a run of
    /// zeros (which may be 0 long).
    pub fn to_runs(&self) -> Vec<usize> {
        let mut runs = Vec::new();
        let mut current = false;
        let mut len = 0;
        for &b in &self.bits {
            if b == current {
                len += 1;
            } else {
                runs.push(len);
                current = b;
                len = 1;
            }
        }
        runs.push(len);
        runs
    }

    pub fn from_runs(runs: &[usize]) -> Self {
        let mut bits = Vec::with_capacity(runs.iter().sum());
        let mut value = false;
        for &len in runs {
            bits.extend(std::iter::repeat(value).take(len));
            value = !value;
        }
        Self { bits }
    }
}

impl fmt::Debug for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeatureMask({self})")
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// An ordered collection of masks over one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSet {
    d: usize,
    groups: Vec<FeatureMask>,
    labels: Vec<Option<String>>,
    /// Name of the extractor or annotation source that produced the set.
    pub provenance: String,
}

impl GroupSet {
    pub fn new(d: usize, provenance: impl Into<String>) -> Self {
        Self {
            d,
            groups: Vec::new(),
            labels: Vec::new(),
            provenance: provenance.into(),
        }
    }

    pub fn from_masks(
        d: usize,
        provenance: impl Into<String>,
        masks: impl IntoIterator<Item = FeatureMask>,
    ) -> Result<Self> {
        let mut set = Self::new(d, provenance);
        for m in masks {
            set.push(m)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, mask: FeatureMask) -> Result<()> {
        self.push_labeled(mask, None)
    }

    pub fn push_labeled(&mut self, mask: FeatureMask, label: Option<String>) -> Result<()> {
        if mask.len() != self.d {
            return Err(FixError::arg(format!(
                "mask of length {} added to a group set over d = {}",
                mask.len(),
                self.d
            )));
        }
        self.groups.push(mask);
        self.labels.push(label);
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn masks(&self) -> &[FeatureMask] {
        &self.groups
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).and_then(|l| l.as_deref())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FeatureMask> {
        self.groups.iter()
    }

    /// True when every feature is covered by at least one mask.
    pub fn covers_all(&self) -> bool {
        (0..self.d).all(|i| self.groups.iter().any(|g| g.get(i)))
    }

    /// True when the masks are pairwise disjoint and jointly cover every
    /// feature.
    pub fn is_partition(&self) -> bool {
        let mut seen = vec![0u32; self.d];
        for g in &self.groups {
            for i in g.ones() {
                seen[i] += 1;
            }
        }
        seen.iter().all(|&c| c == 1)
    }
}

impl<'a> IntoIterator for &'a GroupSet {
    type Item = &'a FeatureMask;
    type IntoIter = std::slice::Iter<'a, FeatureMask>;

    fn into_iter(self) -> Self::IntoIter {
        self.groups.iter()
    }
}
