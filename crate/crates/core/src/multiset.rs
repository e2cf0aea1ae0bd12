//! Finite multisets with sparse storage.
//!
//! A multiset maps elements to positive counts; an element with count zero is
//! simply absent. Two multisets over different carrier sets that agree on all
//! non-zero counts are therefore equal, which is what we want when markings,
//! steps and pre/postsets are combined freely.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How [`Multiset::combine`] merges two counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    /// Pointwise maximum.
    Union,
    /// Pointwise minimum.
    Intersection,
    /// Pointwise sum.
    Sum,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multiset<X: Ord> {
    entries: BTreeMap<X, u64>,
}

impl<X: Ord> Default for Multiset<X> {
    fn default() -> Self {
        Multiset {
            entries: BTreeMap::new(),
        }
    }
}

impl<X: Ord + Clone> Multiset<X> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: X) -> Self {
        Self::with_count(x, 1)
    }

    pub fn with_count(x: X, count: u64) -> Self {
        let mut m = Self::new();
        m.insert(x, count);
        m
    }

    /// Builds a multiset from `(element, count)` pairs; repeated elements add up.
    pub fn from_counts<I: IntoIterator<Item = (X, u64)>>(pairs: I) -> Self {
        let mut m = Self::new();
        for (x, k) in pairs {
            m.insert(x, k);
        }
        m
    }

    /// Adds `count` copies of `x`.
    ///
    /// Panics if the count would overflow `u64`; use [`Multiset::try_insert`]
    /// to get an error instead.
    pub fn insert(&mut self, x: X, count: u64) {
        self.try_insert(x, count).expect("multiset count overflow")
    }

    pub fn try_insert(&mut self, x: X, count: u64) -> Result<()> {
        if count == 0 {
            return Ok(());
        }
        let slot = self.entries.entry(x).or_insert(0);
        *slot = slot.checked_add(count).ok_or(Error::Overflow)?;
        Ok(())
    }

    /// Removes up to `count` copies of `x` (monus on a single element).
    pub fn remove(&mut self, x: &X, count: u64) {
        if let Some(slot) = self.entries.get_mut(x) {
            if *slot <= count {
                self.entries.remove(x);
            } else {
                *slot -= count;
            }
        }
    }

    pub fn count(&self, x: &X) -> u64 {
        self.entries.get(x).copied().unwrap_or(0)
    }

    /// `x ∈ A` iff `A(x) > 0`.
    pub fn contains(&self, x: &X) -> bool {
        self.entries.contains_key(x)
    }

    /// Cardinality: the sum of all counts.
    pub fn len(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Elements with non-zero count, in ascending order.
    pub fn support(&self) -> impl Iterator<Item = &X> + '_ {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&X, u64)> + '_ {
        self.entries.iter().map(|(x, &k)| (x, k))
    }

    pub fn combine(&self, other: &Self, kind: Combine) -> Self {
        match kind {
            Combine::Union => self.union(other),
            Combine::Intersection => self.intersection(other),
            Combine::Sum => self.sum(other),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, &k) in &other.entries {
            let slot = out.entries.entry(x.clone()).or_insert(0);
            *slot = (*slot).max(k);
        }
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .filter_map(|(x, &k)| {
                let m = k.min(other.count(x));
                (m > 0).then(|| (x.clone(), m))
            })
            .collect();
        Multiset { entries }
    }

    /// Pointwise sum. Panics on overflow.
    pub fn sum(&self, other: &Self) -> Self {
        self.try_sum(other).expect("multiset count overflow")
    }

    pub fn try_sum(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (x, &k) in &other.entries {
            out.try_insert(x.clone(), k)?;
        }
        Ok(out)
    }

    /// Pointwise monus: `max(A(x) - B(x), 0)`.
    pub fn difference(&self, other: &Self) -> Self {
        let entries = self
            .entries
            .iter()
            .filter_map(|(x, &k)| {
                let d = k.saturating_sub(other.count(x));
                (d > 0).then(|| (x.clone(), d))
            })
            .collect();
        Multiset { entries }
    }

    /// `k · A`. Panics on overflow.
    pub fn scale(&self, k: u64) -> Self {
        self.try_scale(k).expect("multiset count overflow")
    }

    pub fn try_scale(&self, k: u64) -> Result<Self> {
        if k == 0 {
            return Ok(Self::new());
        }
        let mut entries = BTreeMap::new();
        for (x, &c) in &self.entries {
            entries.insert(x.clone(), c.checked_mul(k).ok_or(Error::Overflow)?);
        }
        Ok(Multiset { entries })
    }

    /// Image under `f`: each output count is the sum of the counts mapped onto it.
    pub fn image<Y: Ord + Clone, F: FnMut(&X) -> Y>(&self, mut f: F) -> Multiset<Y> {
        let mut out = Multiset::new();
        for (x, &k) in &self.entries {
            out.insert(f(x), k);
        }
        out
    }

    /// `A ⊆ B`: pointwise `≤`.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.entries.iter().all(|(x, &k)| k <= other.count(x))
    }

    /// `A ↾ Y`, keeping multiplicities for the elements that satisfy `keep`.
    pub fn restrict<F: FnMut(&X) -> bool>(&self, mut keep: F) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|(x, _)| keep(x))
            .map(|(x, &k)| (x.clone(), k))
            .collect();
        Multiset { entries }
    }

    /// Largest `k` with `k · self ⊆ other`; `None` when `self` is empty.
    pub fn max_multiple_within(&self, other: &Self) -> Option<u64> {
        self.entries.iter().map(|(x, &k)| other.count(x) / k).min()
    }
}

impl<X: Ord + Clone> FromIterator<X> for Multiset<X> {
    fn from_iter<I: IntoIterator<Item = X>>(iter: I) -> Self {
        Self::from_counts(iter.into_iter().map(|x| (x, 1)))
    }
}

impl<X: Ord + fmt::Display> fmt::Display for Multiset<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Order by rendered identifier, not by `Ord` on X.
        let mut items: Vec<(String, u64)> = self.entries.iter().map(|(x, &k)| (x.to_string(), k)).collect();
        items.sort();
        write_entries(f, items.iter().map(|(s, k)| (s.as_str(), *k)))
    }
}

impl<X: Ord + fmt::Debug> fmt::Debug for Multiset<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

/// Writes `{x:2, y:1}` for the given entries, in the given order.
pub(crate) fn write_entries<'a, W: fmt::Write>(w: &mut W, items: impl Iterator<Item = (&'a str, u64)>) -> fmt::Result {
    w.write_char('{')?;
    for (i, (name, k)) in items.enumerate() {
        if i > 0 {
            w.write_str(", ")?;
        }
        write!(w, "{name}:{k}")?;
    }
    w.write_char('}')
}
