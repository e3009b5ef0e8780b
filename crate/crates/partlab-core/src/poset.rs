//! Indexed families with cached block statistics and order relations.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::family::{enumerate_family, FamilyTag};
use crate::partition::Partition;

/// `nc(p ∨ q)` without allocating; both label vectors of equal length ≤ 128.
pub(crate) fn join_nc(a: &[u8], b: &[u8]) -> usize {
    let n = a.len();
    let mut parent = [0u8; 128];
    for (i, slot) in parent.iter_mut().enumerate().take(n) {
        *slot = i as u8;
    }
    fn find(parent: &mut [u8; 128], mut x: usize) -> usize {
        while parent[x] as usize != x {
            parent[x] = parent[parent[x] as usize];
            x = parent[x] as usize;
        }
        x
    }
    let mut first_a = [u8::MAX; 128];
    let mut first_b = [u8::MAX; 128];
    let mut comps = n;
    for i in 0..n {
        for (first, l) in [(&mut first_a, a[i]), (&mut first_b, b[i])] {
            let f = &mut first[l as usize];
            if *f == u8::MAX {
                *f = i as u8;
            } else {
                let (ra, rb) = (find(&mut parent, *f as usize), find(&mut parent, i));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb) as u8;
                    comps -= 1;
                }
            }
        }
    }
    comps
}

/// A family `A_k` with positions, `nc`, `cycles` and `2 d(id, ·)` cached.
#[derive(Clone, Debug)]
pub struct FamilyIndex {
    k: usize,
    tag: FamilyTag,
    members: Vec<Partition>,
    index: BTreeMap<Partition, usize>,
    nc: Vec<usize>,
    cycles: Vec<usize>,
    h2: Vec<i64>,
}

impl FamilyIndex {
    pub fn new(k: usize, tag: FamilyTag) -> Result<Self> {
        Ok(Self::from_members(k, tag, enumerate_family(k, tag)?))
    }

    /// Wraps an explicit list of partitions of the same size.
    pub fn from_members(k: usize, tag: FamilyTag, members: Vec<Partition>) -> Self {
        let index = members
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let nc: Vec<usize> = members.iter().map(|p| p.nc()).collect();
        let cycles: Vec<usize> = members.iter().map(|p| p.cycles()).collect();
        let h2 = members
            .iter()
            .zip(nc.iter().zip(&cycles))
            .map(|(_, (&n, &c))| (k + n) as i64 - 2 * c as i64)
            .collect();
        FamilyIndex {
            k,
            tag,
            members,
            index,
            nc,
            cycles,
            h2,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tag(&self) -> FamilyTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Partition] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &Partition {
        &self.members[i]
    }

    pub fn position(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn position_or_err(&self, p: &Partition) -> Result<usize> {
        self.position(p)
            .ok_or_else(|| Error::MissingEntry(alloc::format!("{p:?} not in {}_{}", self.tag, self.k)))
    }

    pub fn nc(&self, i: usize) -> usize {
        self.nc[i]
    }

    pub fn cycles(&self, i: usize) -> usize {
        self.cycles[i]
    }

    /// `nc(p_i ∨ p_j)`.
    pub fn join_nc(&self, i: usize, j: usize) -> usize {
        join_nc(self.members[i].labels(), self.members[j].labels())
    }

    /// `p_i ≤ p_j` in the geodesic order.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        if self.h2[i] > self.h2[j] {
            return false;
        }
        let d2 = (self.nc[i] + self.nc[j]) as i64 - 2 * self.join_nc(i, j) as i64;
        self.h2[i] + d2 == self.h2[j]
    }

    /// `2 df(p_i, p_j)`.
    pub fn twice_defect(&self, i: usize, j: usize) -> i64 {
        let d2 = (self.nc[i] + self.nc[j]) as i64 - 2 * self.join_nc(i, j) as i64;
        self.h2[i] + d2 - self.h2[j]
    }

    /// `2 d(id, p_i)`.
    pub fn twice_height(&self, i: usize) -> i64 {
        self.h2[i]
    }

    /// For each `j`, the `i` with `p_i ≤ p_j` (including `j`), ascending.
    pub fn geodesic_down_sets(&self) -> Vec<Vec<usize>> {
        (0..self.len())
            .map(|j| (0..self.len()).filter(|&i| self.leq(i, j)).collect())
            .collect()
    }

    /// For each `i`, the `j` with `p_i ⊴ p_j` (including `i`), ascending.
    pub fn coarsenings(&self) -> Vec<Vec<usize>> {
        (0..self.len())
            .map(|i| {
                (0..self.len())
                    .filter(|&j| self.nc[j] <= self.nc[i] && self.members[i].is_finer_than(&self.members[j]))
                    .collect()
            })
            .collect()
    }

    /// Indices sorted by increasing `2 d(id, ·)`, a linear extension of `≤`.
    pub fn by_height(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.h2[i], i));
        order
    }
}
