//! Moment, cumulant and exclusive-moment transforms, restriction and
//! extension between families, and invariance checks.
//!
//! Relations, for `p ∈ A_k`:
//!
//! * `m_p = Σ_{p' ∈ A, p' ≤ p} κ_{p'}` (geodesic order);
//! * `m_p = Σ_{p' ⊣ p} m_{p'^c}` (coarser, same cycle count);
//! * `m_{p^c} = Σ_{p' ⊐ p} κ_{p'}` (finer, same `nc − cycles`).
//!
//! Strict `p' < p` forces `d(id, p') < d(id, p)`, so every triangular sweep
//! runs in order of height.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::family::FamilyTag;
use crate::npoly::Q;
use crate::partition::Partition;
use crate::poset::FamilyIndex;
use crate::table::{CumulantTable, Key, Label, LabeledTable, MomentTable};

/// A family with the relations needed by the transforms.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub fam: FamilyIndex,
    /// `down[q]`: all `p ≤ q` in the family.
    pub down: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl Lattice {
    pub fn new(k: usize, tag: FamilyTag) -> Result<Self> {
        let fam = FamilyIndex::new(k, tag)?;
        let down = fam.geodesic_down_sets();
        let order = fam.by_height();
        Ok(Lattice { fam, down, order })
    }

    /// `κ` from `m` by the triangular sweep.
    pub fn moments_to_cumulants(&self, m: &[Q]) -> Vec<Q> {
        let mut kappa: Vec<Q> = vec![Q::zero(); m.len()];
        for &q in &self.order {
            let mut acc = m[q].clone();
            for &p in &self.down[q] {
                if p != q {
                    acc -= &kappa[p];
                }
            }
            kappa[q] = acc;
        }
        kappa
    }

    pub fn cumulants_to_moments(&self, kappa: &[Q]) -> Vec<Q> {
        self.down
            .iter()
            .map(|ds| ds.iter().fold(Q::zero(), |acc, &p| acc + &kappa[p]))
            .collect()
    }
}

/// `P_k` with the exclusive-moment relations.
#[derive(Clone, Debug)]
pub struct ExclusiveLattice {
    pub fam: FamilyIndex,
    /// `coarse[p]`: all `p' ⊣ p` (coarser, same cycles), including `p`.
    pub coarse: Vec<Vec<usize>>,
    order: Vec<usize>,
}

impl ExclusiveLattice {
    pub fn new(k: usize) -> Result<Self> {
        let fam = FamilyIndex::new(k, FamilyTag::P)?;
        let coarse = fam
            .coarsenings()
            .into_iter()
            .enumerate()
            .map(|(p, ups)| {
                ups.into_iter()
                    .filter(|&q| fam.cycles(q) == fam.cycles(p))
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..fam.len()).collect();
        order.sort_by_key(|&i| (fam.nc(i), i));
        Ok(ExclusiveLattice { fam, coarse, order })
    }

    pub fn to_exclusive(&self, m: &[Q]) -> Vec<Q> {
        let mut ex: Vec<Q> = vec![Q::zero(); m.len()];
        // Coarser partitions have fewer blocks.
        for &p in &self.order {
            let mut acc = m[p].clone();
            for &q in &self.coarse[p] {
                if q != p {
                    acc -= &ex[q];
                }
            }
            ex[p] = acc;
        }
        ex
    }

    pub fn from_exclusive(&self, ex: &[Q]) -> Vec<Q> {
        self.coarse
            .iter()
            .map(|ups| ups.iter().fold(Q::zero(), |acc, &q| acc + &ex[q]))
            .collect()
    }
}

/// Applies `f` to every (level, word) vector of `table` over `A_k`.
fn per_word<F>(table: &LabeledTable, tag: FamilyTag, mut f: F) -> Result<()>
where
    F: FnMut(usize, &[Label], &FamilyIndex) -> Result<()>,
{
    for k in table.levels() {
        if k == 0 {
            continue;
        }
        let fam = FamilyIndex::new(k, tag)?;
        for w in table.words_at(k) {
            f(k, &w, &fam)?;
        }
    }
    Ok(())
}

/// `κ^A` from moments on `A_k` for every level and word present.
pub fn moments_to_cumulants(m: &MomentTable, tag: FamilyTag) -> Result<CumulantTable> {
    let mut out = CumulantTable::new(tag, m.inner.alphabet().iter().cloned());
    let mut lattices: Vec<Option<Lattice>> = Vec::new();
    per_word(&m.inner, tag, |k, w, _| {
        let lat = cached(&mut lattices, k, tag)?;
        let mv = m.inner.vector_for_word(&lat.fam, w)?;
        out.inner.store_vector(&lat.fam, w, lat.moments_to_cumulants(&mv))
    })?;
    Ok(out)
}

/// Moments on `A_k` from `κ^A`.
pub fn cumulants_to_moments(kappa: &CumulantTable) -> Result<MomentTable> {
    let tag = kappa.tag;
    let mut out = MomentTable::new(kappa.inner.alphabet().iter().cloned());
    let mut lattices: Vec<Option<Lattice>> = Vec::new();
    per_word(&kappa.inner, tag, |k, w, _| {
        let lat = cached(&mut lattices, k, tag)?;
        let kv = kappa.inner.vector_for_word(&lat.fam, w)?;
        out.inner.store_vector(&lat.fam, w, lat.cumulants_to_moments(&kv))
    })?;
    Ok(out)
}

fn cached(cache: &mut Vec<Option<Lattice>>, k: usize, tag: FamilyTag) -> Result<&Lattice> {
    if cache.len() <= k {
        cache.resize(k + 1, None);
    }
    if cache[k].is_none() {
        cache[k] = Some(Lattice::new(k, tag)?);
    }
    Ok(cache[k].as_ref().unwrap())
}

/// Direction of [`exclusive_transform`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    ToExclusive,
    FromExclusive,
}

/// Moments ↔ exclusive moments over `P_k`.
///
/// For `tag ≠ P` and `ToExclusive`, the input moments on `A_k` are first
/// extended to `P_k` by the natural extension. For `FromExclusive`, the input
/// is an exclusive table over `P_k` and the result is restricted to `A_k`.
pub fn exclusive_transform(m: &MomentTable, tag: FamilyTag, dir: Direction) -> Result<MomentTable> {
    let source = match (dir, tag) {
        (Direction::ToExclusive, t) if t != FamilyTag::P => {
            restrict_extend(m, tag, FamilyTag::P)?
        }
        _ => m.clone(),
    };
    let mut out = MomentTable::new(m.inner.alphabet().iter().cloned());
    for k in source.inner.levels() {
        if k == 0 {
            continue;
        }
        let lat = ExclusiveLattice::new(k)?;
        for w in source.inner.words_at(k) {
            let v = source.inner.vector_for_word(&lat.fam, &w)?;
            let r = match dir {
                Direction::ToExclusive => lat.to_exclusive(&v),
                Direction::FromExclusive => lat.from_exclusive(&v),
            };
            out.inner.store_vector(&lat.fam, &w, r)?;
        }
    }
    if dir == Direction::FromExclusive && tag != FamilyTag::P {
        return restrict_extend(&out, FamilyTag::P, tag);
    }
    Ok(out)
}

/// `m_{p^c} = Σ_{p' ∈ A, p' ⊐ p} κ_{p'}`.
pub fn cumulants_to_exclusive(kappa: &CumulantTable, p: &Partition, word: &[Label]) -> Result<Q> {
    let fam = FamilyIndex::new(p.k(), kappa.tag)?;
    let defect = p.nc() as i64 - p.cycles() as i64;
    let mut acc = Q::zero();
    for (i, q) in fam.members().iter().enumerate() {
        if q.is_finer_than(p) && fam.nc(i) as i64 - fam.cycles(i) as i64 == defect {
            acc += kappa.get(q, word)?;
        }
    }
    Ok(acc)
}

/// Restriction (`to ⊂ from`) forgets keys; extension (`from ⊂ to`) sets
/// `m_p = Σ_{p' ∈ from, p' ≤ p} κ^{from}_{p'}` for `p ∈ to`.
pub fn restrict_extend(m: &MomentTable, from: FamilyTag, to: FamilyTag) -> Result<MomentTable> {
    if from == to {
        return Ok(m.clone());
    }
    if to.is_subfamily_of(from) {
        let mut out = MomentTable::new(m.inner.alphabet().iter().cloned());
        for ((p, w), v) in m.inner.iter() {
            if to.contains(p) {
                out.insert(p, w, v.clone())?;
            }
        }
        return Ok(out);
    }
    if !from.is_subfamily_of(to) {
        return Err(Error::InvalidArgument(alloc::format!(
            "families {from} and {to} are not nested"
        )));
    }
    let kappa = moments_to_cumulants(m, from)?;
    let extended = extend_cumulants(&kappa, to)?;
    cumulants_to_moments(&extended)
}

/// Zero-fills a cumulant table to a larger family.
pub fn extend_cumulants(kappa: &CumulantTable, to: FamilyTag) -> Result<CumulantTable> {
    if !kappa.tag.is_subfamily_of(to) {
        return Err(Error::InvalidArgument(alloc::format!(
            "cannot extend {} cumulants to {to}",
            kappa.tag
        )));
    }
    let mut out = CumulantTable::new(to, kappa.inner.alphabet().iter().cloned());
    per_word(&kappa.inner, to, |_, w, fam| {
        for p in fam.members() {
            out.insert(p, w, kappa.get(p, w)?)?;
        }
        Ok(())
    })?;
    Ok(out)
}

/// Outcome of [`invariance_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub invariant: bool,
    pub witness: Option<Key>,
}

/// `G(A₂)`-invariance of a `P`-cumulant table: `κ_p = 0` off `A₂`, and `κ` on
/// `A₂` agrees with the `A₂`-cumulants of the restricted moments.
pub fn invariance_check(kappa: &CumulantTable, tag2: FamilyTag) -> Result<InvarianceReport> {
    if kappa.tag != FamilyTag::P {
        return Err(Error::InvalidArgument("invariance_check needs P-cumulants".into()));
    }
    for ((p, w), v) in kappa.inner.iter() {
        if !tag2.contains(p) && !v.is_zero() {
            return Ok(InvarianceReport {
                invariant: false,
                witness: Some((p.clone(), w.clone())),
            });
        }
    }
    let m = cumulants_to_moments(kappa)?;
    let restricted = restrict_extend(&m, FamilyTag::P, tag2)?;
    let k2 = moments_to_cumulants(&restricted, tag2)?;
    for ((p, w), v) in k2.inner.iter() {
        if kappa.get(p, w)? != *v {
            return Ok(InvarianceReport {
                invariant: false,
                witness: Some((p.clone(), w.clone())),
            });
        }
    }
    Ok(InvarianceReport {
        invariant: true,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::npoly::{q, qi};
    use crate::table::constant_word;

    fn a(k: usize) -> Vec<Label> {
        constant_word("a", k)
    }

    fn generic_moments(k: usize) -> MomentTable {
        let mut m = MomentTable::new(["a"]);
        for (i, p) in crate::family::enumerate_family(k, FamilyTag::P).unwrap().iter().enumerate() {
            m.insert(p, &a(k), q(2 * i as i64 + 3, (i % 5) as i64 + 1)).unwrap();
        }
        m
    }

    #[test]
    fn level_one_and_two_examples() {
        let mut m = MomentTable::new(["a"]);
        let id1 = Partition::identity(1);
        let one1 = Partition::singletons(1);
        m.insert(&id1, &a(1), qi(3)).unwrap();
        m.insert(&one1, &a(1), qi(5)).unwrap();
        let kappa = moments_to_cumulants(&m, FamilyTag::P).unwrap();
        assert_eq!(kappa.get(&id1, &a(1)).unwrap(), qi(3));

        let ex = exclusive_transform(&m, FamilyTag::P, Direction::ToExclusive).unwrap();
        assert_eq!(ex.get(&id1, &a(1)).unwrap(), qi(3));
        assert_eq!(ex.get(&one1, &a(1)).unwrap(), qi(2));
        assert_eq!(cumulants_to_exclusive(&kappa, &one1, &a(1)).unwrap(), qi(2));

        let m2 = generic_moments(2);
        let kappa2 = moments_to_cumulants(&m2, FamilyTag::P).unwrap();
        let id2 = Partition::identity(2);
        let z2 = Partition::zero(2);
        let t = Partition::transposition(2, 1, 2).unwrap();
        let g = |p: &Partition| m2.get(p, &a(2)).unwrap();
        assert_eq!(kappa2.get(&z2, &a(2)).unwrap(), g(&z2) - g(&id2));
        assert_eq!(kappa2.get(&t, &a(2)).unwrap(), g(&t) - g(&z2));
    }

    #[test]
    fn round_trips_p2_p3() {
        for k in 1..=3 {
            let m = generic_moments(k);
            let kappa = moments_to_cumulants(&m, FamilyTag::P).unwrap();
            assert_eq!(cumulants_to_moments(&kappa).unwrap(), m);
            let ex = exclusive_transform(&m, FamilyTag::P, Direction::ToExclusive).unwrap();
            assert_eq!(exclusive_transform(&ex, FamilyTag::P, Direction::FromExclusive).unwrap(), m);
        }
    }

    #[test]
    fn s_cumulants_extended_to_p() {
        let mut kappa = CumulantTable::new(FamilyTag::S, ["a"]);
        let id2 = Partition::identity(2);
        let t = Partition::transposition(2, 1, 2).unwrap();
        kappa.insert(&id2, &a(2), qi(2)).unwrap();
        kappa.insert(&t, &a(2), qi(7)).unwrap();
        let ext = extend_cumulants(&kappa, FamilyTag::P).unwrap();
        assert_eq!(ext.get(&Partition::zero(2), &a(2)).unwrap(), qi(0));
        let m = cumulants_to_moments(&ext).unwrap();
        assert_eq!(m.get(&t, &a(2)).unwrap(), qi(9));
        assert_eq!(m.get(&Partition::zero(2), &a(2)).unwrap(), qi(2));
    }

    #[test]
    fn extension_at_level_one() {
        let mut m = MomentTable::new(["a"]);
        m.insert(&Partition::identity(1), &a(1), q(5, 2)).unwrap();
        let ext = restrict_extend(&m, FamilyTag::S, FamilyTag::P).unwrap();
        assert_eq!(ext.get(&Partition::singletons(1), &a(1)).unwrap(), q(5, 2));
        let back = restrict_extend(&ext, FamilyTag::P, FamilyTag::S).unwrap();
        assert_eq!(back, m);
        assert!(restrict_extend(&m, FamilyTag::H, FamilyTag::Bs).is_err());
    }

    #[test]
    fn invariance_examples() {
        let mut kappa = CumulantTable::new(FamilyTag::P, ["a"]);
        for p in crate::family::enumerate_family(2, FamilyTag::P).unwrap() {
            let v = if p == Partition::zero(2) { qi(1) } else { qi(0) };
            kappa.insert(&p, &a(2), v).unwrap();
        }
        let r = invariance_check(&kappa, FamilyTag::S).unwrap();
        assert!(!r.invariant);
        assert_eq!(r.witness.unwrap().0, Partition::zero(2));
    }
}
