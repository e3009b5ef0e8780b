//! Labeled multilinear functionals `(p, w) ↦ value`.
//!
//! Keys are stored orbit-canonically: `(p, w)` and its image under any
//! simultaneous column relabeling of `p` and `w` are the same entry.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::family::{orbit_rep_with_word, FamilyTag};
use crate::npoly::Q;
use crate::partition::Partition;
use crate::poset::FamilyIndex;

/// Element identifier.
pub type Label = String;

/// Orbit-canonical key.
pub type Key = (Partition, Vec<Label>);

/// Shared storage for moment and cumulant tables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabeledTable {
    alphabet: BTreeSet<Label>,
    entries: BTreeMap<Key, Q>,
}

impl LabeledTable {
    pub fn new<I: IntoIterator<Item = S>, S: Into<Label>>(alphabet: I) -> Self {
        LabeledTable {
            alphabet: alphabet.into_iter().map(Into::into).collect(),
            entries: BTreeMap::new(),
        }
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in canonical key order.
    pub fn iter(&self) -> impl Iterator<Item = (&Key, &Q)> {
        self.entries.iter()
    }

    /// Levels `k` that carry at least one entry.
    pub fn levels(&self) -> BTreeSet<usize> {
        self.entries.keys().map(|(p, _)| p.k()).collect()
    }

    fn check_word(&self, p: &Partition, word: &[Label]) -> Result<()> {
        if word.len() != p.k() {
            return Err(Error::SizeMismatch {
                left: p.k(),
                right: word.len(),
            });
        }
        if let Some(bad) = word.iter().find(|l| !self.alphabet.contains(*l)) {
            return Err(Error::InvalidArgument(alloc::format!(
                "label {bad:?} not in alphabet"
            )));
        }
        Ok(())
    }

    pub fn canonical_key(p: &Partition, word: &[Label]) -> Result<Key> {
        orbit_rep_with_word(p, word)
    }

    /// Sets an entry; zero values are stored too (they mark coverage).
    pub fn insert(&mut self, p: &Partition, word: &[Label], value: Q) -> Result<()> {
        self.check_word(p, word)?;
        let key = Self::canonical_key(p, word)?;
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn get(&self, p: &Partition, word: &[Label]) -> Result<Option<&Q>> {
        if p.k() == 0 && word.is_empty() {
            return Ok(self.entries.get(&(Partition::empty(), Vec::new())));
        }
        let key = Self::canonical_key(p, word)?;
        Ok(self.entries.get(&key))
    }

    pub fn get_or_err(&self, p: &Partition, word: &[Label]) -> Result<Q> {
        self.get(p, word)?
            .cloned()
            .ok_or_else(|| Error::MissingEntry(alloc::format!("{p:?} with word {word:?}")))
    }

    /// Distinct canonical words at level `k`.
    pub fn words_at(&self, k: usize) -> BTreeSet<Vec<Label>> {
        self.entries
            .keys()
            .filter(|(p, _)| p.k() == k)
            .map(|(_, w)| w.clone())
            .collect()
    }

    /// Values over the members of `fam` for the fixed word `w`.
    pub fn vector_for_word(&self, fam: &FamilyIndex, w: &[Label]) -> Result<Vec<Q>> {
        fam.members().iter().map(|p| self.get_or_err(p, w)).collect()
    }

    /// Same as [`vector_for_word`](Self::vector_for_word) with absent entries read as zero.
    pub fn vector_for_word_or_zero(&self, fam: &FamilyIndex, w: &[Label]) -> Result<Vec<Q>> {
        fam.members()
            .iter()
            .map(|p| Ok(self.get(p, w)?.cloned().unwrap_or_else(Q::zero)))
            .collect()
    }

    pub fn store_vector(&mut self, fam: &FamilyIndex, w: &[Label], values: Vec<Q>) -> Result<()> {
        for (p, v) in fam.members().iter().zip(values) {
            self.insert(p, w, v)?;
        }
        Ok(())
    }
}

/// `m_p(a_{w_1}, …, a_{w_k})`, with `m_∅ = 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MomentTable {
    pub inner: LabeledTable,
}

impl MomentTable {
    pub fn new<I: IntoIterator<Item = S>, S: Into<Label>>(alphabet: I) -> Self {
        MomentTable {
            inner: LabeledTable::new(alphabet),
        }
    }

    pub fn insert(&mut self, p: &Partition, word: &[Label], value: Q) -> Result<()> {
        self.inner.insert(p, word, value)
    }

    pub fn get(&self, p: &Partition, word: &[Label]) -> Result<Q> {
        if p.k() == 0 {
            return Ok(Q::one());
        }
        self.inner.get_or_err(p, word)
    }
}

/// `κ^A_p(a_{w_1}, …, a_{w_k})` for `p ∈ A_k`; absent in-family entries are
/// missing, out-of-family entries are zero by definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CumulantTable {
    pub tag: FamilyTag,
    pub inner: LabeledTable,
}

impl CumulantTable {
    pub fn new<I: IntoIterator<Item = S>, S: Into<Label>>(tag: FamilyTag, alphabet: I) -> Self {
        CumulantTable {
            tag,
            inner: LabeledTable::new(alphabet),
        }
    }

    pub fn insert(&mut self, p: &Partition, word: &[Label], value: Q) -> Result<()> {
        if !self.tag.contains(p) {
            return Err(Error::InvalidArgument(alloc::format!(
                "{p:?} is not in family {}",
                self.tag
            )));
        }
        self.inner.insert(p, word, value)
    }

    /// The value, zero outside the family, `1` on the empty partition.
    pub fn get(&self, p: &Partition, word: &[Label]) -> Result<Q> {
        if p.k() == 0 {
            return Ok(Q::one());
        }
        if !self.tag.contains(p) {
            return Ok(Q::zero());
        }
        self.inner.get_or_err(p, word)
    }
}

/// Converts a slice of `&str` into an owned word.
pub fn word(labels: &[&str]) -> Vec<Label> {
    labels.iter().map(|s| String::from(*s)).collect()
}

/// `k` copies of one label.
pub fn constant_word(label: &str, k: usize) -> Vec<Label> {
    (0..k).map(|_| String::from(label)).collect()
}
