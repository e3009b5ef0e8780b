//! Diagram operations: transpose, join, composition, tensor, extraction,
//! insertion, flip, kernels and column relabeling.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::partition::{link_blocks, Dsu, Partition, Point};

fn same_k(p: &Partition, q: &Partition) -> Result<()> {
    if p.k() != q.k() {
        return Err(Error::SizeMismatch {
            left: p.k(),
            right: q.k(),
        });
    }
    Ok(())
}

impl Partition {
    /// Swaps `i ↔ i'` in every block.
    pub fn transpose(&self) -> Partition {
        Partition::from_fn(self.k(), |pt| {
            self.block_of(Point {
                col: pt.col,
                primed: !pt.primed,
            })
        })
    }

    /// Finest common coarsening `p ∨ q`.
    pub fn join(&self, q: &Partition) -> Result<Partition> {
        same_k(self, q)?;
        Ok(self.join_unchecked(q))
    }

    /// Composition `p ∘ q` and the number `κ` of components lost in the middle row.
    ///
    /// The primed row of `p` is glued to the unprimed row of `q`; the result keeps
    /// the unprimed row of `p` and the primed row of `q`. With this orientation
    /// `ρ_N(p) ρ_N(q) = N^κ ρ_N(p ∘ q)`.
    pub fn compose(&self, q: &Partition) -> Result<(Partition, usize)> {
        same_k(self, q)?;
        Ok(self.compose_unchecked(q))
    }

    pub(crate) fn compose_unchecked(&self, q: &Partition) -> (Partition, usize) {
        let k = self.k();
        // Nodes: 0..k top of p, k..2k middle, 2k..3k bottom of q.
        let node_p = |i: usize| -> usize {
            let pt = Point::from_index(i);
            if pt.primed {
                k + pt.col - 1
            } else {
                pt.col - 1
            }
        };
        let node_q = |i: usize| -> usize {
            let pt = Point::from_index(i);
            if pt.primed {
                2 * k + pt.col - 1
            } else {
                k + pt.col - 1
            }
        };
        let mut dsu = Dsu::new(3 * k);
        let mut first = [usize::MAX; 256];
        for (i, &l) in self.labels().iter().enumerate() {
            let n = node_p(i);
            let f = &mut first[l as usize];
            if *f == usize::MAX {
                *f = n;
            } else {
                dsu.union(*f, n);
            }
        }
        let mut first = [usize::MAX; 256];
        for (i, &l) in q.labels().iter().enumerate() {
            let n = node_q(i);
            let f = &mut first[l as usize];
            if *f == usize::MAX {
                *f = n;
            } else {
                dsu.union(*f, n);
            }
        }
        let mut outer = vec![false; 3 * k];
        for c in 0..k {
            let a = dsu.find(c);
            outer[a] = true;
            let b = dsu.find(2 * k + c);
            outer[b] = true;
        }
        let mut kappa = 0;
        let mut seen = vec![false; 3 * k];
        for m in k..2 * k {
            let r = dsu.find(m);
            if !outer[r] && !seen[r] {
                seen[r] = true;
                kappa += 1;
            }
        }
        let raw = (0..2 * k).map(|i| {
            let pt = Point::from_index(i);
            if pt.primed {
                dsu.find(2 * k + pt.col - 1)
            } else {
                dsu.find(pt.col - 1)
            }
        });
        (Partition::from_raw_labels(k, raw), kappa)
    }

    /// `p ⊗ q`: `q` placed to the right of `p`.
    pub fn tensor(&self, q: &Partition) -> Partition {
        let off = self.nc();
        let raw = self
            .labels()
            .iter()
            .map(|&l| l as usize)
            .chain(q.labels().iter().map(|&l| l as usize + off));
        Partition::from_raw_labels(self.k() + q.k(), raw)
    }

    /// Restriction to a symmetric point set, relabeled order-preservingly.
    pub fn extract(&self, points: &[Point]) -> Result<Partition> {
        let mut cols: Vec<usize> = Vec::new();
        for pt in points {
            if pt.col == 0 || pt.col > self.k() {
                return Err(Error::InvalidArgument(alloc::format!(
                    "point {pt} outside 1..{}",
                    self.k()
                )));
            }
            let twin = Point {
                col: pt.col,
                primed: !pt.primed,
            };
            if !points.contains(&twin) {
                return Err(Error::InvalidArgument(alloc::format!(
                    "point set not symmetric: {pt} without {twin}"
                )));
            }
            cols.push(pt.col);
        }
        cols.sort_unstable();
        cols.dedup();
        Ok(self.extract_columns_unchecked(&cols))
    }

    /// Restriction to whole columns (1-based, any order; sorted internally).
    pub fn extract_columns(&self, cols: &[usize]) -> Result<Partition> {
        let mut cols = cols.to_vec();
        cols.sort_unstable();
        cols.dedup();
        if cols.iter().any(|&c| c == 0 || c > self.k()) {
            return Err(Error::InvalidArgument("column out of range".into()));
        }
        Ok(self.extract_columns_unchecked(&cols))
    }

    /// Left and right parts: extraction to columns `1..=k1` and to the rest.
    pub fn split_at(&self, k1: usize) -> Result<(Partition, Partition)> {
        if k1 > self.k() {
            return Err(Error::InvalidArgument(alloc::format!(
                "split point {k1} > {}",
                self.k()
            )));
        }
        let left: Vec<usize> = (1..=k1).collect();
        let right: Vec<usize> = (k1 + 1..=self.k()).collect();
        Ok((
            self.extract_columns_unchecked(&left),
            self.extract_columns_unchecked(&right),
        ))
    }

    /// `Ins^l_{(i_1..i_k)}(p)`: `p` placed at the given columns, identity elsewhere.
    pub fn insert(&self, l: usize, positions: &[usize]) -> Result<Partition> {
        if positions.len() != self.k() {
            return Err(Error::InvalidArgument(alloc::format!(
                "need {} positions, got {}",
                self.k(),
                positions.len()
            )));
        }
        if positions.windows(2).any(|w| w[0] >= w[1])
            || positions.iter().any(|&i| i == 0 || i > l)
        {
            return Err(Error::InvalidArgument(
                "positions must be increasing within 1..l".into(),
            ));
        }
        let mut slot = vec![usize::MAX; l + 1];
        for (j, &i) in positions.iter().enumerate() {
            slot[i] = j + 1;
        }
        let base = self.nc();
        Ok(Partition::from_fn(l, |pt| match slot[pt.col] {
            usize::MAX => base + pt.col,
            j => self.block_of(Point {
                col: j,
                primed: pt.primed,
            }),
        }))
    }

    /// Swaps `i ↔ i'` for the columns `i > k1`.
    pub fn flip(&self, k1: usize) -> Result<Partition> {
        if k1 > self.k() {
            return Err(Error::InvalidArgument(alloc::format!(
                "flip index {k1} > {}",
                self.k()
            )));
        }
        Ok(Partition::from_fn(self.k(), |pt| {
            if pt.col > k1 {
                self.block_of(Point {
                    col: pt.col,
                    primed: !pt.primed,
                })
            } else {
                self.block_of(pt)
            }
        }))
    }

    /// `Ker(n_1, n_1', …, n_k, n_k')`: points share a block iff their indices agree.
    pub fn kernel(tuple: &[u64]) -> Result<Partition> {
        if tuple.len() % 2 != 0 {
            return Err(Error::InvalidArgument(
                "index tuple must have even length".into(),
            ));
        }
        let k = tuple.len() / 2;
        let mut dsu = Dsu::new(tuple.len());
        for i in 0..tuple.len() {
            for j in 0..i {
                if tuple[i] == tuple[j] {
                    dsu.union(i, j);
                    break;
                }
            }
        }
        Ok(Partition::from_raw_labels(
            k,
            (0..tuple.len()).map(|i| dsu.find(i)),
        ))
    }

    /// Moves column `c` to column `perm[c-1]` (1-based), both rows together.
    ///
    /// A moment is unchanged when the same relabeling is applied to its word,
    /// which is how the orbit of `(p, w)` under `S_k` is realized.
    pub fn permute_columns(&self, perm: &[usize]) -> Partition {
        debug_assert_eq!(perm.len(), self.k());
        let mut inv = vec![0usize; self.k()];
        for (c, &t) in perm.iter().enumerate() {
            inv[t - 1] = c + 1;
        }
        Partition::from_fn(self.k(), |pt| {
            self.block_of(Point {
                col: inv[pt.col - 1],
                primed: pt.primed,
            })
        })
    }
}

/// `p_1 ∨ … ` over several partitions of the same size, via one forest.
pub(crate) fn join_all(parts: &[&Partition]) -> Partition {
    let k = parts[0].k();
    let mut dsu = Dsu::new(2 * k);
    for p in parts {
        link_blocks(&mut dsu, p.labels(), 0);
    }
    Partition::from_raw_labels(k, (0..2 * k).map(|i| dsu.find(i)))
}
