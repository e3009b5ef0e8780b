//! Partitions of the point set `{1..k} ∪ {1'..k'}`.
//!
//! Points are totally ordered as `1 < 1' < 2 < 2' < …`. A partition is stored
//! as a restricted-growth label vector over that order, so two partitions are
//! equal exactly when their label vectors are equal, and blocks come out
//! ordered by their least point.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported number of columns.
pub const MAX_K: usize = 64;

/// A point of the diagram: column `col` (1-based), top row (`primed == false`)
/// or bottom row (`primed == true`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub col: usize,
    pub primed: bool,
}

impl Point {
    pub const fn top(col: usize) -> Self {
        Point { col, primed: false }
    }

    pub const fn bottom(col: usize) -> Self {
        Point { col, primed: true }
    }

    #[inline]
    pub(crate) fn index(self) -> usize {
        2 * (self.col - 1) + self.primed as usize
    }

    #[inline]
    pub(crate) fn from_index(i: usize) -> Self {
        Point {
            col: i / 2 + 1,
            primed: i % 2 == 1,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.primed {
            write!(f, "{}'", self.col)
        } else {
            write!(f, "{}", self.col)
        }
    }
}

/// A set partition of the `2k` points, in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition {
    k: usize,
    labels: Vec<u8>,
}

/// Block counts and irreducibility flags of a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stats {
    pub nc: usize,
    pub cycles: usize,
    pub irreducible: bool,
    pub weakly_irreducible: bool,
    pub exclusive_irreducible: bool,
}

impl Partition {
    /// Builds a partition from arbitrary block labels indexed by point index.
    /// Labels are renumbered in order of first appearance.
    pub(crate) fn from_raw_labels<I: IntoIterator<Item = usize>>(k: usize, raw: I) -> Self {
        let mut map: Vec<(usize, u8)> = Vec::new();
        let mut labels = Vec::with_capacity(2 * k);
        for r in raw {
            let l = match map.iter().find(|(x, _)| *x == r) {
                Some(&(_, l)) => l,
                None => {
                    let l = map.len() as u8;
                    map.push((r, l));
                    l
                }
            };
            labels.push(l);
        }
        debug_assert_eq!(labels.len(), 2 * k);
        Partition { k, labels }
    }

    /// Builds a partition from restricted-growth labels already in canonical form.
    pub(crate) fn from_canonical_labels(k: usize, labels: Vec<u8>) -> Self {
        debug_assert_eq!(labels.len(), 2 * k);
        Partition { k, labels }
    }

    /// Canonicalizes a collection of blocks covering the `2k` points.
    pub fn from_blocks<B: AsRef<[Point]>>(k: usize, blocks: &[B]) -> Result<Self> {
        if k > MAX_K {
            return Err(Error::Capacity {
                what: "columns",
                value: k as u128,
                cap: MAX_K as u128,
            });
        }
        let mut raw = vec![usize::MAX; 2 * k];
        for (b, block) in blocks.iter().enumerate() {
            let block = block.as_ref();
            if block.is_empty() {
                return Err(Error::MalformedPartition("empty block".into()));
            }
            for &pt in block {
                if pt.col == 0 || pt.col > k {
                    return Err(Error::MalformedPartition(alloc::format!(
                        "point {pt} outside 1..{k}"
                    )));
                }
                let i = pt.index();
                if raw[i] != usize::MAX {
                    return Err(Error::MalformedPartition(alloc::format!(
                        "point {pt} appears twice"
                    )));
                }
                raw[i] = b;
            }
        }
        if let Some(i) = raw.iter().position(|&r| r == usize::MAX) {
            return Err(Error::MalformedPartition(alloc::format!(
                "point {} not covered",
                Point::from_index(i)
            )));
        }
        Ok(Self::from_raw_labels(k, raw))
    }

    /// Partition with one block per equivalence class of `key(point)`.
    pub fn from_fn<F: FnMut(Point) -> usize>(k: usize, mut key: F) -> Self {
        Self::from_raw_labels(k, (0..2 * k).map(|i| key(Point::from_index(i))))
    }

    /// The empty partition of zero columns.
    pub fn empty() -> Self {
        Partition {
            k: 0,
            labels: Vec::new(),
        }
    }

    /// `id_k = {{i, i'}}`.
    pub fn identity(k: usize) -> Self {
        Self::from_fn(k, |p| p.col)
    }

    /// `0_k`, the single block.
    pub fn zero(k: usize) -> Self {
        Self::from_fn(k, |_| 0)
    }

    /// `1_k`, all singletons.
    pub fn singletons(k: usize) -> Self {
        Self::from_fn(k, |p| p.index())
    }

    /// The permutation `σ` as the partition `{{i, σ(i)'}}`; `images[i-1] = σ(i)`, 1-based.
    pub fn from_permutation(images: &[usize]) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &s in images {
            if s == 0 || s > k || seen[s - 1] {
                return Err(Error::InvalidArgument(alloc::format!(
                    "not a permutation of 1..{k}"
                )));
            }
            seen[s - 1] = true;
        }
        let mut raw = vec![0usize; 2 * k];
        for (i, &s) in images.iter().enumerate() {
            raw[2 * i] = i;
            raw[2 * (s - 1) + 1] = i;
        }
        Ok(Self::from_raw_labels(k, raw))
    }

    /// Transposition `(i, j) = {{i, j'}, {j, i'}}` with identity elsewhere.
    pub fn transposition(k: usize, i: usize, j: usize) -> Result<Self> {
        check_pair(k, i, j)?;
        let mut images: Vec<usize> = (1..=k).collect();
        images.swap(i - 1, j - 1);
        Self::from_permutation(&images)
    }

    /// Weyl contraction `[i, j] = {{i, j}, {i', j'}}` with identity elsewhere.
    pub fn weyl(k: usize, i: usize, j: usize) -> Result<Self> {
        check_pair(k, i, j)?;
        Ok(Self::from_fn(k, |p| {
            if p.col == i || p.col == j {
                if p.primed {
                    usize::MAX - 1
                } else {
                    usize::MAX
                }
            } else {
                p.col
            }
        }))
    }

    /// The full cycle `σ(i) = i + 1 mod k`.
    pub fn cycle(k: usize) -> Self {
        let images: Vec<usize> = (1..=k).map(|i| i % k + 1).collect();
        Self::from_permutation(&images).expect("cycle is a permutation")
    }

    /// Number of columns.
    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub(crate) fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Block label of a point (blocks numbered by least point, from 0).
    #[inline]
    pub fn block_of(&self, pt: Point) -> usize {
        self.labels[pt.index()] as usize
    }

    /// Number of blocks.
    pub fn nc(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    /// Blocks in canonical order, each listing unprimed points then primed points, ascending.
    pub fn blocks(&self) -> Vec<Vec<Point>> {
        let mut out: Vec<Vec<Point>> = vec![Vec::new(); self.nc()];
        for primed in [false, true] {
            for col in 1..=self.k {
                let pt = Point { col, primed };
                out[self.block_of(pt)].push(pt);
            }
        }
        out
    }

    /// `σ` with `images[i-1] = σ(i)` when the partition is a permutation.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        if self.nc() != self.k {
            return None;
        }
        let mut images = vec![0usize; self.k];
        for block in self.blocks() {
            match block.as_slice() {
                [a, b] if !a.primed && b.primed => images[a.col - 1] = b.col,
                _ => return None,
            }
        }
        Some(images)
    }

    /// Column groups of `p ∨ id_k`, each ascending, ordered by least column.
    pub fn cycle_columns(&self) -> Vec<Vec<usize>> {
        let joined = self.join_unchecked(&Partition::identity(self.k));
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); joined.nc()];
        for col in 1..=self.k {
            out[joined.block_of(Point::top(col))].push(col);
        }
        out
    }

    /// `nc(p ∨ id_k)`.
    pub fn cycles(&self) -> usize {
        let mut dsu = Dsu::new(self.nc());
        for col in 1..=self.k {
            dsu.union(
                self.block_of(Point::top(col)),
                self.block_of(Point::bottom(col)),
            );
        }
        dsu.count()
    }

    pub fn stats(&self) -> Stats {
        let nc = self.nc();
        let cycles = self.cycles();
        let groups = self.cycle_columns();
        let extracts: Vec<Partition> = groups
            .iter()
            .map(|g| self.extract_columns_unchecked(g))
            .collect();
        let id1 = Partition::identity(1);
        let non_id = extracts.iter().filter(|e| **e != id1).count();
        let weakly_irreducible = self.k > 0 && non_id <= 1;
        let exclusive_irreducible = (0..extracts.len()).any(|c0| {
            extracts
                .iter()
                .enumerate()
                .all(|(c, e)| c == c0 || e.nc() == 1)
        });
        Stats {
            nc,
            cycles,
            irreducible: cycles == 1,
            weakly_irreducible,
            exclusive_irreducible,
        }
    }

    /// `p ⊴ q`: every block of `self` lies inside a block of `q`.
    pub fn is_finer_than(&self, q: &Partition) -> bool {
        if self.k != q.k {
            return false;
        }
        let mut image = vec![u8::MAX; self.nc()];
        for (a, b) in self.labels.iter().zip(&q.labels) {
            let slot = &mut image[*a as usize];
            if *slot == u8::MAX {
                *slot = *b;
            } else if *slot != *b {
                return false;
            }
        }
        true
    }

    pub(crate) fn join_unchecked(&self, q: &Partition) -> Partition {
        let n = 2 * self.k;
        let mut dsu = Dsu::new(n);
        link_blocks(&mut dsu, &self.labels, 0);
        link_blocks(&mut dsu, &q.labels, 0);
        Partition::from_raw_labels(self.k, (0..n).map(|i| dsu.find(i)))
    }

    pub(crate) fn extract_columns_unchecked(&self, cols: &[usize]) -> Partition {
        let raw: Vec<usize> = cols
            .iter()
            .flat_map(|&c| {
                [
                    self.block_of(Point::top(c)),
                    self.block_of(Point::bottom(c)),
                ]
            })
            .collect();
        Partition::from_raw_labels(cols.len(), raw)
    }
}

/// Canonical form of a disjoint cover of the `2k` points.
pub fn canonicalize<B: AsRef<[Point]>>(raw_blocks: &[B], k: usize) -> Result<Partition> {
    Partition::from_blocks(k, raw_blocks)
}

fn check_pair(k: usize, i: usize, j: usize) -> Result<()> {
    if i == j || i == 0 || j == 0 || i > k || j > k {
        return Err(Error::InvalidArgument(alloc::format!(
            "need distinct columns in 1..{k}, got ({i}, {j})"
        )));
    }
    Ok(())
}

/// Unions the points of each block of `labels`, offset by `offset` in the forest.
pub(crate) fn link_blocks(dsu: &mut Dsu, labels: &[u8], offset: usize) {
    let mut first = [usize::MAX; 256];
    for (i, &l) in labels.iter().enumerate() {
        let f = &mut first[l as usize];
        if *f == usize::MAX {
            *f = i + offset;
        } else {
            dsu.union(*f, i + offset);
        }
    }
}

/// Small union-find.
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in self.blocks() {
            f.write_str("{")?;
            for (i, pt) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{pt}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 0 {
            return f.write_str("∅");
        }
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses the text form `{1 2'}{2 1'}`. The empty string is the empty partition.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut blocks: Vec<Vec<Point>> = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let inner_start = rest
                .strip_prefix('{')
                .ok_or_else(|| Error::Parse(alloc::format!("expected '{{' at {rest:?}")))?;
            let close = inner_start
                .find('}')
                .ok_or_else(|| Error::Parse("unterminated block".to_string()))?;
            let mut block = Vec::new();
            for tok in inner_start[..close].split_whitespace() {
                let (num, primed) = match tok.strip_suffix('\'') {
                    Some(n) => (n, true),
                    None => (tok, false),
                };
                let col: usize = num
                    .parse()
                    .map_err(|_| Error::Parse(alloc::format!("bad point {tok:?}")))?;
                if col == 0 {
                    return Err(Error::Parse("columns start at 1".into()));
                }
                block.push(Point { col, primed });
            }
            if block.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            blocks.push(block);
            rest = inner_start[close + 1..].trim_start();
        }
        let k = blocks
            .iter()
            .flatten()
            .map(|p| p.col)
            .max()
            .unwrap_or(0);
        Partition::from_blocks(k, &blocks)
    }
}

impl Partition {
    /// Canonical text form, same as `Display`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(spec: &[(usize, bool)]) -> Vec<Point> {
        spec.iter().map(|&(col, primed)| Point { col, primed }).collect()
    }

    #[test]
    fn canonical_reorder() {
        let p = Partition::from_blocks(
            2,
            &[pts(&[(2, false), (2, true)]), pts(&[(1, false), (1, true)])],
        )
        .unwrap();
        assert_eq!(p, Partition::identity(2));
        assert_eq!(p.to_string(), "{1 1'}{2 2'}");
    }

    #[test]
    fn five_column_example_keeps_blocks() {
        let p: Partition = "{1 2 3' 5}{1' 2'}{3}{4 4'}{5'}".parse().unwrap();
        assert_eq!(p.k(), 5);
        assert_eq!(p.nc(), 5);
        assert_eq!(p.to_string(), "{1 2 5 3'}{1' 2'}{3}{4 4'}{5'}");
        let again: Partition = p.to_string().parse().unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn overlap_and_gap_rejected() {
        let dup = Partition::from_blocks(1, &[pts(&[(1, false)]), pts(&[(1, false)])]);
        assert!(matches!(dup, Err(Error::MalformedPartition(_))));
        let gap = Partition::from_blocks(1, &[pts(&[(1, false)])]);
        assert!(matches!(gap, Err(Error::MalformedPartition(_))));
        assert!("{1 1'}{".parse::<Partition>().is_err());
        assert!("{0}".parse::<Partition>().is_err());
    }

    #[test]
    fn named_partitions() {
        assert_eq!(Partition::transposition(2, 1, 2).unwrap().to_string(), "{1 2'}{2 1'}");
        assert_eq!(Partition::weyl(2, 1, 2).unwrap().to_string(), "{1 2}{1' 2'}");
        assert_eq!(Partition::zero(2).to_string(), "{1 2 1' 2'}");
        assert_eq!(Partition::singletons(1).to_string(), "{1}{1'}");
        assert_eq!(Partition::cycle(3).as_permutation(), Some(vec![2, 3, 1]));
        assert_eq!(Partition::weyl(2, 1, 2).unwrap().as_permutation(), None);
    }

    #[test]
    fn stats_examples() {
        let s = Partition::transposition(2, 1, 2).unwrap().stats();
        assert_eq!((s.nc, s.cycles, s.irreducible), (2, 1, true));
        let s = Partition::identity(3).stats();
        assert_eq!((s.nc, s.cycles, s.irreducible), (3, 3, false));
        assert!(s.weakly_irreducible);
        let s = Partition::zero(2).stats();
        assert_eq!((s.nc, s.cycles, s.irreducible), (1, 1, true));
        // (1,2) ⊗ (3,4): two non-trivial cycles.
        let p = Partition::from_permutation(&[2, 1, 4, 3]).unwrap();
        assert!(!p.stats().weakly_irreducible);
        assert!(!p.stats().exclusive_irreducible);
        // (1,2) ⊗ 0_1: the second cycle extracts to 0_1.
        let q: Partition = "{1 2'}{2 1'}{3 3'}".parse().unwrap();
        assert!(q.stats().weakly_irreducible);
        let r: Partition = "{1 2'}{2 1'}{3}{3'}".parse().unwrap();
        assert!(!r.stats().weakly_irreducible);
        assert!(!r.stats().exclusive_irreducible);
    }

    #[test]
    fn finer_relation() {
        let id = Partition::identity(2);
        assert!(id.is_finer_than(&Partition::zero(2)));
        assert!(!Partition::zero(2).is_finer_than(&id));
        assert!(Partition::singletons(2).is_finer_than(&id));
    }
}
