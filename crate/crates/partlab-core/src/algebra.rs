//! The algebra `C[P_k(N)]`, the tensor representation `ρ_N`, and Gram solves.
//!
//! Products follow `p · q = N^κ (p ∘ q)`. The trace pairing is
//! `Tr ρ_N(p) ρ_N(ᵗq) = N^{nc(p ∨ q)}`, so the Gram matrix of a family only
//! involves joins.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::family::FamilyTag;
use crate::npoly::{NPoly, Q};
use crate::partition::{Partition, Point};
use crate::poset::FamilyIndex;

/// `Σ x_p p` with Laurent-polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionVector {
    k: usize,
    terms: BTreeMap<Partition, NPoly>,
}

impl PartitionVector {
    pub fn zero(k: usize) -> Self {
        PartitionVector {
            k,
            terms: BTreeMap::new(),
        }
    }

    /// The unit `id_k`.
    pub fn unit(k: usize) -> Self {
        Self::basis(Partition::identity(k))
    }

    pub fn basis(p: Partition) -> Self {
        let mut v = Self::zero(p.k());
        v.terms.insert(p, NPoly::one());
        v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, p: &Partition) -> NPoly {
        self.terms.get(p).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &NPoly)> {
        self.terms.iter()
    }

    /// Adds `c · p`.
    pub fn add_term(&mut self, p: Partition, c: &NPoly) -> Result<()> {
        if p.k() != self.k {
            return Err(Error::SizeMismatch {
                left: self.k,
                right: p.k(),
            });
        }
        let slot = self.terms.entry(p.clone()).or_default();
        *slot = &*slot + c;
        if slot.is_zero() {
            self.terms.remove(&p);
        }
        Ok(())
    }

    pub fn add(&self, other: &PartitionVector) -> Result<PartitionVector> {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &NPoly) -> PartitionVector {
        let mut out = PartitionVector::zero(self.k);
        for (p, x) in &self.terms {
            let y = x * c;
            if !y.is_zero() {
                out.terms.insert(p.clone(), y);
            }
        }
        out
    }

    /// Bilinear extension of `p · q = N^κ (p ∘ q)`.
    pub fn mul(&self, other: &PartitionVector) -> Result<PartitionVector> {
        if self.k != other.k {
            return Err(Error::SizeMismatch {
                left: self.k,
                right: other.k,
            });
        }
        let mut out = PartitionVector::zero(self.k);
        for (p, x) in &self.terms {
            for (q, y) in &other.terms {
                let (r, kappa) = p.compose_unchecked(q);
                out.add_term(r, &(x * y).shift(kappa as i32))?;
            }
        }
        Ok(out)
    }

    /// Coefficients at a fixed integer `N`.
    pub fn eval(&self, n: u64) -> BTreeMap<Partition, Q> {
        self.terms
            .iter()
            .map(|(p, c)| (p.clone(), c.eval(n)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

/// `N^{nc(p ∨ q)}`.
pub fn gram_entry(p: &Partition, q: &Partition) -> Result<NPoly> {
    Ok(NPoly::n_pow(p.join(q)?.nc() as i32))
}

/// Default cap on `N^k` for explicit matrices.
pub const RHO_DIM_CAP: u64 = 1_000_000;
/// Default cap on the number of stored entries of an explicit matrix.
pub const RHO_NNZ_CAP: u64 = 50_000_000;

/// `ρ_N(p)` as a sorted list of its unit entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRho {
    pub dim: usize,
    /// `(row, col)` pairs, sorted.
    pub entries: Vec<(u32, u32)>,
}

impl SparseRho {
    pub fn trace(&self) -> u64 {
        self.entries.iter().filter(|(r, c)| r == c).count() as u64
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.dim * self.dim];
        for &(r, c) in &self.entries {
            out[r as usize * self.dim + c as usize] += 1;
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &SparseRho) -> SparseRho {
        let dim = self.dim * other.dim;
        let mut entries = Vec::with_capacity(self.entries.len() * other.entries.len());
        for &(r1, c1) in &self.entries {
            for &(r2, c2) in &other.entries {
                entries.push((
                    r1 * other.dim as u32 + r2,
                    c1 * other.dim as u32 + c2,
                ));
            }
        }
        entries.sort_unstable();
        SparseRho { dim, entries }
    }
}

/// Explicit `ρ_N(p)`: entry `(I_out, I_in)` is 1 iff `p ⊴ Ker(I)`.
///
/// Row index is `Σ_j i_j N^{k−j}` over the unprimed points, column index the
/// same over the primed points, with values `0..N`.
pub fn rho_matrix(p: &Partition, n: u64) -> Result<SparseRho> {
    let k = p.k();
    let dim = checked_pow(n, k as u32, RHO_DIM_CAP, "N^k")?;
    let nnz = checked_pow(n, p.nc() as u32, RHO_NNZ_CAP, "N^nc")?;
    let blocks = p.nc();
    let mut values = vec![0u64; blocks];
    let mut entries = Vec::with_capacity(nnz as usize);
    for _ in 0..nnz {
        let mut row = 0u64;
        let mut col = 0u64;
        for c in 1..=k {
            row = row * n + values[p.block_of(Point::top(c))];
            col = col * n + values[p.block_of(Point::bottom(c))];
        }
        entries.push((row as u32, col as u32));
        for v in values.iter_mut() {
            *v += 1;
            if *v < n {
                break;
            }
            *v = 0;
        }
    }
    entries.sort_unstable();
    Ok(SparseRho {
        dim: dim as usize,
        entries,
    })
}

fn checked_pow(n: u64, e: u32, cap: u64, what: &'static str) -> Result<u64> {
    let v = (n as u128).checked_pow(e).unwrap_or(u128::MAX);
    if v > cap as u128 {
        return Err(Error::Capacity {
            what,
            value: v,
            cap: cap as u128,
        });
    }
    Ok(v as u64)
}

/// Coefficients `c` with `Σ_p c_p N^{nc(p ∨ p')} = traces(p')` for all `p' ∈ A_k`.
///
/// For `A = P` the Gram matrix factors as `Z D Zᵀ` with `Z` the zeta matrix of
/// refinement and `D = diag((N)_{nc(q)})`, since `ρ_N(p)` is the sum of the
/// exclusive pieces `ρ_N(q^c)`, `q ⊵ p`, which are pairwise orthogonal. Other
/// families use fraction-free elimination.
pub fn gram_solve(
    k: usize,
    tag: FamilyTag,
    traces: &BTreeMap<Partition, Q>,
    n: u64,
) -> Result<BTreeMap<Partition, Q>> {
    let fam = FamilyIndex::new(k, tag)?;
    let t = collect_traces(&fam, traces)?;
    let c = if tag == FamilyTag::P {
        solve_p_mobius(&fam, &t, n)?
    } else {
        solve_bareiss(&fam, &t, n)?
    };
    Ok(fam.members().iter().cloned().zip(c).collect())
}

/// Same system over an explicit list of partitions, always by elimination.
pub fn gram_solve_basis(
    basis: &[Partition],
    traces: &BTreeMap<Partition, Q>,
    n: u64,
) -> Result<BTreeMap<Partition, Q>> {
    let k = basis.first().map_or(0, |p| p.k());
    let fam = FamilyIndex::from_members(k, FamilyTag::P, basis.to_vec());
    let t = collect_traces(&fam, traces)?;
    let c = solve_bareiss(&fam, &t, n)?;
    Ok(fam.members().iter().cloned().zip(c).collect())
}

/// Solves through the `Z D Zᵀ` factorization; `fam` must be all of `P_k`.
pub fn gram_solve_indexed(fam: &FamilyIndex, t: &[Q], n: u64) -> Result<Vec<Q>> {
    if t.len() != fam.len() {
        return Err(Error::InvalidArgument(alloc::format!(
            "trace vector has {} entries, family has {}",
            t.len(),
            fam.len()
        )));
    }
    if fam.tag() == FamilyTag::P {
        solve_p_mobius(fam, t, n)
    } else {
        solve_bareiss(fam, t, n)
    }
}

fn collect_traces(fam: &FamilyIndex, traces: &BTreeMap<Partition, Q>) -> Result<Vec<Q>> {
    if traces.len() != fam.len() {
        return Err(Error::InvalidArgument(alloc::format!(
            "trace vector has {} entries, family has {}",
            traces.len(),
            fam.len()
        )));
    }
    fam.members()
        .iter()
        .map(|p| {
            traces
                .get(p)
                .cloned()
                .ok_or_else(|| Error::MissingEntry(alloc::format!("trace for {p:?}")))
        })
        .collect()
}

fn falling(n: u64, m: usize) -> BigInt {
    (0..m as u64).fold(BigInt::one(), |acc, j| {
        if j >= n {
            BigInt::zero()
        } else {
            acc * BigInt::from(n - j)
        }
    })
}

fn solve_p_mobius(fam: &FamilyIndex, t: &[Q], n: u64) -> Result<Vec<Q>> {
    let len = fam.len();
    let up = fam.coarsenings();
    // Coarser partitions have fewer blocks; sweep by nc.
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by_key(|&i| fam.nc(i));
    // u = Z^{-1} t, coarsest first.
    let mut u: Vec<Q> = vec![Q::zero(); len];
    for &p in &order {
        let mut acc = t[p].clone();
        for &q in &up[p] {
            if q != p {
                acc -= &u[q];
            }
        }
        u[p] = acc;
    }
    // v = D^{-1} u.
    for i in 0..len {
        let f = falling(n, fam.nc(i));
        if f.is_zero() {
            return Err(Error::SingularGram {
                n,
                k: fam.k(),
                family: fam.tag(),
            });
        }
        u[i] = &u[i] / Q::from_integer(f);
    }
    // Zᵀ c = v, finest first.
    let mut c: Vec<Q> = vec![Q::zero(); len];
    for &q in order.iter().rev() {
        c[q] = u[q].clone();
    }
    for &q in order.iter().rev() {
        let cq = c[q].clone();
        for &r in &up[q] {
            if r != q {
                c[r] -= &cq;
            }
        }
    }
    Ok(c)
}

fn solve_bareiss(fam: &FamilyIndex, t: &[Q], n: u64) -> Result<Vec<Q>> {
    let len = fam.len();
    let nn = BigInt::from(n);
    let mut a: Vec<Vec<BigInt>> = (0..len)
        .map(|i| {
            (0..len)
                .map(|j| num_traits::pow(nn.clone(), fam.join_nc(i, j)))
                .collect()
        })
        .collect();
    let lcm = t
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    for (row, x) in a.iter_mut().zip(t) {
        row.push((x * Q::from_integer(lcm.clone())).to_integer());
    }
    let x = bareiss_solve(a).ok_or(Error::SingularGram {
        n,
        k: fam.k(),
        family: fam.tag(),
    })?;
    let l = Q::from_integer(lcm);
    Ok(x.into_iter().map(|v| v / &l).collect())
}

/// Fraction-free elimination on an augmented integer matrix `[A | b]`.
/// Returns `None` when `A` is singular.
pub fn bareiss_solve(mut a: Vec<Vec<BigInt>>) -> Option<Vec<Q>> {
    let n = a.len();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let mut x: Vec<Q> = vec![Q::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Q::from_integer(a[i][n].clone());
        for j in i + 1..n {
            acc -= Q::from_integer(a[i][j].clone()) * &x[j];
        }
        x[i] = acc / Q::from_integer(a[i][i].clone());
    }
    debug_assert!(x.iter().all(|v| !v.denom().is_negative()));
    Some(x)
}
