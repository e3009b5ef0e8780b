//! Distance, geodesic order, and the factorization sets used by the free
//! sum and product laws.

use alloc::vec::Vec;

use num_rational::Ratio;

use crate::diagram::join_all;
use crate::error::{Error, Result};
use crate::family::{enumerate_family, FamilyTag};
use crate::partition::Partition;
use crate::poset::FamilyIndex;

/// Half-integers, stored exactly.
pub type Half = Ratio<i64>;

/// How `p` sits relative to `q`; see [`compare`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderReport {
    /// `d(p, q)`.
    pub distance: Half,
    /// `d(id, p) + d(p, q) − d(id, q)`, zero exactly when `p ≤ q`.
    pub defect: Half,
    /// Geodesic order `p ≤ q`.
    pub leq: bool,
    /// `p ⊴ q`: `q` is coarser than `p`.
    pub coarser: bool,
    /// `p ⊣ q`: `p` is coarser than `q` with the same number of cycles.
    pub coarser_compatible: bool,
    /// `p ⊐ q`: `p` is finer than `q` with the same `nc − cycles`.
    pub finer_compatible: bool,
}

/// `2 d(p, q) = nc(p) + nc(q) − 2 nc(p ∨ q)`.
pub(crate) fn twice_distance(p: &Partition, q: &Partition) -> i64 {
    (p.nc() + q.nc()) as i64 - 2 * p.join_unchecked(q).nc() as i64
}

/// `2 d(id_k, p) = k + nc(p) − 2 cycles(p)`.
pub(crate) fn twice_height(p: &Partition) -> i64 {
    (p.k() + p.nc()) as i64 - 2 * p.cycles() as i64
}

/// `d(p, q) = (nc(p) + nc(q))/2 − nc(p ∨ q)`.
pub fn distance(p: &Partition, q: &Partition) -> Result<Half> {
    check(p, q)?;
    Ok(Half::new(twice_distance(p, q), 2))
}

/// `d(id_k, p)`.
pub fn height(p: &Partition) -> Half {
    Half::new(twice_height(p), 2)
}

/// Nonnegative defect of `p` on a geodesic from `id_k` to `q`.
pub fn defect(p: &Partition, q: &Partition) -> Result<Half> {
    check(p, q)?;
    Ok(Half::new(twice_defect(p, q), 2))
}

pub(crate) fn twice_defect(p: &Partition, q: &Partition) -> i64 {
    twice_height(p) + twice_distance(p, q) - twice_height(q)
}

/// `p ≤ q` in the geodesic order.
pub fn leq(p: &Partition, q: &Partition) -> bool {
    p.k() == q.k() && twice_defect(p, q) == 0
}

/// Full report of `p` against `q`.
pub fn compare(p: &Partition, q: &Partition) -> Result<OrderReport> {
    check(p, q)?;
    let d2 = twice_distance(p, q);
    let df2 = twice_height(p) + d2 - twice_height(q);
    let finer = p.is_finer_than(q);
    let coarser_than = q.is_finer_than(p);
    Ok(OrderReport {
        distance: Half::new(d2, 2),
        defect: Half::new(df2, 2),
        leq: df2 == 0,
        coarser: finer,
        coarser_compatible: coarser_than && p.cycles() == q.cycles(),
        finer_compatible: finer
            && p.nc() as i64 - p.cycles() as i64 == q.nc() as i64 - q.cycles() as i64,
    })
}

fn check(p: &Partition, q: &Partition) -> Result<()> {
    if p.k() != q.k() {
        return Err(Error::SizeMismatch {
            left: p.k(),
            right: q.k(),
        });
    }
    Ok(())
}

/// One element of `F₂(p)`: `p1 = extract(p, I)`, `p2 = extract(p, I^c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub p1: Partition,
    pub p2: Partition,
    /// Columns of `I`, ascending.
    pub columns: Vec<usize>,
}

/// `F₂(p)`: `I` ranges over unions of cycles of `p`.
pub fn splittings(p: &Partition) -> Vec<Splitting> {
    let cycles = p.cycle_columns();
    let n = cycles.len();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let mut inside: Vec<usize> = Vec::new();
        let mut outside: Vec<usize> = Vec::new();
        for (c, cols) in cycles.iter().enumerate() {
            if mask >> c & 1 == 1 {
                inside.extend_from_slice(cols);
            } else {
                outside.extend_from_slice(cols);
            }
        }
        inside.sort_unstable();
        outside.sort_unstable();
        out.push(Splitting {
            p1: p.extract_columns_unchecked(&inside),
            p2: p.extract_columns_unchecked(&outside),
            columns: inside,
        });
    }
    out
}

/// `τ = (1, k+1)(2, k+2)…(k, 2k)` in `P_{2k}`.
pub fn tau(k: usize) -> Partition {
    let images: Vec<usize> = (1..=2 * k).map(|i| if i <= k { i + k } else { i - k }).collect();
    Partition::from_permutation(&images).expect("tau is a permutation")
}

/// All `(p1, p2)` with `p1 ∘ p2 = p` and `p1 ⊗ p2 ≤ (p ⊗ id_k) ∘ τ`.
///
/// Candidates are drawn from `p1 ≤ p` and `p2 ≤ ᵗp1 ∘ p`; the tests check
/// this pruning against brute force over `P_k × P_k`.
pub fn product_index_set(p: &Partition) -> Result<Vec<(Partition, Partition)>> {
    let k = p.k();
    let all = enumerate_family(k, FamilyTag::P)?;
    let target = p.tensor(&Partition::identity(k)).compose_unchecked(&tau(k)).0;
    let mut out = Vec::new();
    for p1 in all.iter().filter(|x| leq(x, p)) {
        let (r, _) = p1.transpose().compose_unchecked(p);
        for p2 in all.iter().filter(|x| leq(x, &r)) {
            if p1.compose_unchecked(p2).0 == *p && leq(&p1.tensor(p2), &target) {
                out.push((p1.clone(), p2.clone()));
            }
        }
    }
    Ok(out)
}

/// [`product_index_set`] for every member of a family closed under `ᵗp1 ∘ p`,
/// as index pairs; `down[j]` lists the `i` with `p_i ≤ p_j`.
pub fn product_index_sets(fam: &FamilyIndex, down: &[Vec<usize>]) -> Result<Vec<Vec<(usize, usize)>>> {
    let k = fam.k();
    let t = tau(k);
    let id = Partition::identity(k);
    let mut out = Vec::with_capacity(fam.len());
    for (j, p) in fam.members().iter().enumerate() {
        let target = p.tensor(&id).compose_unchecked(&t).0;
        let mut set = Vec::new();
        for &i in &down[j] {
            let p1 = fam.get(i);
            let (r, _) = p1.transpose().compose_unchecked(p);
            let ri = fam.position_or_err(&r)?;
            for &l in &down[ri] {
                let p2 = fam.get(l);
                if p1.compose_unchecked(p2).0 == *p && leq(&p1.tensor(p2), &target) {
                    set.push((i, l));
                }
            }
        }
        out.push(set);
    }
    Ok(out)
}

/// All `(p1, p2)` with `p1 ⊗ p2 ≤ (p ⊗ id_k) ∘ τ`; the summation set of
/// `m_p(ab)` in terms of cumulants of `a` and `b`.
pub fn product_geodesic_set(p: &Partition) -> Result<Vec<(Partition, Partition)>> {
    let k = p.k();
    let all = enumerate_family(k, FamilyTag::P)?;
    let target = p.tensor(&Partition::identity(k)).compose_unchecked(&tau(k)).0;
    let mut out = Vec::new();
    for p1 in &all {
        for p2 in &all {
            if leq(&p1.tensor(p2), &target) {
                out.push((p1.clone(), p2.clone()));
            }
        }
    }
    Ok(out)
}

/// Brute-force version of [`product_index_set`] over all of `P_k × P_k`.
pub fn product_index_set_exhaustive(p: &Partition) -> Result<Vec<(Partition, Partition)>> {
    let k = p.k();
    let all = enumerate_family(k, FamilyTag::P)?;
    let target = p.tensor(&Partition::identity(k)).compose_unchecked(&tau(k)).0;
    let mut out = Vec::new();
    for p1 in &all {
        for p2 in &all {
            if p1.compose_unchecked(p2).0 == *p && leq(&p1.tensor(p2), &target) {
                out.push((p1.clone(), p2.clone()));
            }
        }
    }
    Ok(out)
}

/// `p ∨ q ∨ …`.
pub fn join_many(parts: &[&Partition]) -> Result<Partition> {
    let Some(first) = parts.first() else {
        return Err(Error::InvalidArgument("empty join".into()));
    };
    for q in parts {
        check(first, q)?;
    }
    Ok(join_all(parts))
}
