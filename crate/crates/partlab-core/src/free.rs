//! Free sum and product laws, and the product axiom of tracial moments.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::family::FamilyTag;
use crate::npoly::Q;
use crate::order::{leq, product_geodesic_set, product_index_sets, splittings};
use crate::partition::Partition;
use crate::poset::FamilyIndex;
use crate::table::{CumulantTable, Label, MomentTable};

fn sub_word(w: &[Label], cols: &[usize]) -> Vec<Label> {
    cols.iter().map(|&c| w[c - 1].clone()).collect()
}

fn complement(k: usize, cols: &[usize]) -> Vec<usize> {
    (1..=k).filter(|c| !cols.contains(c)).collect()
}

fn all_words(a: &CumulantTable, b: &CumulantTable) -> BTreeMap<usize, BTreeSet<Vec<Label>>> {
    let mut out: BTreeMap<usize, BTreeSet<Vec<Label>>> = BTreeMap::new();
    for t in [&a.inner, &b.inner] {
        for k in t.levels() {
            out.entry(k).or_default().extend(t.words_at(k));
        }
    }
    out
}

/// `κ_p(a + b) = Σ_{(p1, p2, I) ∈ F₂(p)} κ_{p1}(a|_I) κ_{p2}(b|_{I^c})`, letter
/// `x` standing for `a_x + b_x`.
pub fn free_sum(ka: &CumulantTable, kb: &CumulantTable) -> Result<CumulantTable> {
    if ka.tag != kb.tag {
        return Err(Error::InvalidArgument(alloc::format!(
            "tag mismatch: {} vs {}",
            ka.tag,
            kb.tag
        )));
    }
    let alphabet: BTreeSet<Label> = ka.inner.alphabet().union(kb.inner.alphabet()).cloned().collect();
    let mut out = CumulantTable::new(ka.tag, alphabet);
    for (k, words) in all_words(ka, kb) {
        if k == 0 {
            continue;
        }
        let fam = FamilyIndex::new(k, ka.tag)?;
        for w in words {
            for p in fam.members() {
                let mut acc = Q::zero();
                for s in splittings(p) {
                    let rest = complement(k, &s.columns);
                    let x = ka.get(&s.p1, &sub_word(&w, &s.columns))?;
                    if x.is_zero() {
                        continue;
                    }
                    acc += x * kb.get(&s.p2, &sub_word(&w, &rest))?;
                }
                out.insert(p, &w, acc)?;
            }
        }
    }
    Ok(out)
}

/// Which side of the product law to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMode {
    /// `κ_p(ab) = Σ_{p1 ∘ p2 = p, p1 ⊗ p2 ≤ (p ⊗ id)τ} κ_{p1}(a) κ_{p2}(b)`.
    CumulantForm,
    /// `m_p(ab) = Σ_{p1 ≤ p} κ_{p1}(a) m_{ᵗp1 ∘ p}(b)`.
    MomentForm,
}

/// Second operand or result of [`free_product`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductTable {
    Cumulants(CumulantTable),
    Moments(MomentTable),
}

/// Free product of `a` and `b`, with letter `x` standing for `a_x b_x`.
pub fn free_product(ka: &CumulantTable, b: &ProductTable, mode: ProductMode) -> Result<ProductTable> {
    match (mode, b) {
        (ProductMode::CumulantForm, ProductTable::Cumulants(kb)) => {
            if ka.tag != kb.tag {
                return Err(Error::InvalidArgument("tag mismatch".into()));
            }
            let alphabet: BTreeSet<Label> =
                ka.inner.alphabet().union(kb.inner.alphabet()).cloned().collect();
            let mut out = CumulantTable::new(ka.tag, alphabet);
            for (k, words) in all_words(ka, kb) {
                if k == 0 {
                    continue;
                }
                let fam = FamilyIndex::new(k, ka.tag)?;
                let down = fam.geodesic_down_sets();
                let sets = product_index_sets(&fam, &down)?;
                for w in words {
                    for (p, set) in fam.members().iter().zip(&sets) {
                        let mut acc = Q::zero();
                        for &(i, l) in set {
                            let x = ka.get(fam.get(i), &w)?;
                            if !x.is_zero() {
                                acc += x * kb.get(fam.get(l), &w)?;
                            }
                        }
                        out.insert(p, &w, acc)?;
                    }
                }
            }
            Ok(ProductTable::Cumulants(out))
        }
        (ProductMode::MomentForm, ProductTable::Moments(mb)) => {
            let alphabet: BTreeSet<Label> =
                ka.inner.alphabet().union(mb.inner.alphabet()).cloned().collect();
            let mut out = MomentTable::new(alphabet);
            for k in ka.inner.levels() {
                if k == 0 {
                    continue;
                }
                let fam = FamilyIndex::new(k, ka.tag)?;
                for w in ka.inner.words_at(k) {
                    for (j, p) in fam.members().iter().enumerate() {
                        let mut acc = Q::zero();
                        for (i, p1) in fam.members().iter().enumerate() {
                            if !fam.leq(i, j) {
                                continue;
                            }
                            let x = ka.get(p1, &w)?;
                            if x.is_zero() {
                                continue;
                            }
                            let (r, _) = p1.transpose().compose_unchecked(p);
                            acc += x * mb.get(&r, &w)?;
                        }
                        out.insert(p, &w, acc)?;
                    }
                }
            }
            Ok(ProductTable::Moments(out))
        }
        _ => Err(Error::InvalidArgument(
            "operand kind does not match product mode".into(),
        )),
    }
}

/// `m_p(ab) = Σ_{p1 ⊗ p2 ≤ (p ⊗ id)τ} κ_{p1}(a) κ_{p2}(b)` for one key.
pub fn free_product_moment_from_cumulants(
    ka: &CumulantTable,
    kb: &CumulantTable,
    p: &Partition,
    w: &[Label],
) -> Result<Q> {
    let mut acc = Q::zero();
    for (p1, p2) in product_geodesic_set(p)? {
        let x = ka.get(&p1, w)?;
        if !x.is_zero() {
            acc += x * kb.get(&p2, w)?;
        }
    }
    Ok(acc)
}

/// The partition `Ins^n_i(p) ∘ σ` that turns a moment of products into a
/// moment of the individual factors; `lens[j]` is the number of factors in
/// argument `j`.
///
/// Within each group of consecutive columns `σ` sends column `x` to `x − 1`
/// and the first column to the last, so that `m_{id_1}(a_1 a_2 a_3)` becomes
/// the trace of `a_1 a_2 a_3` in that order.
pub fn product_expansion(p: &Partition, lens: &[usize]) -> Result<Partition> {
    if lens.len() != p.k() {
        return Err(Error::SizeMismatch {
            left: p.k(),
            right: lens.len(),
        });
    }
    if lens.iter().any(|&n| n == 0) {
        return Err(Error::InvalidArgument("empty product".into()));
    }
    let n: usize = lens.iter().sum();
    let mut starts = Vec::with_capacity(lens.len());
    let mut images = Vec::with_capacity(n);
    let mut pos = 1;
    for &len in lens {
        starts.push(pos);
        for x in pos..pos + len {
            images.push(if x == pos { pos + len - 1 } else { x - 1 });
        }
        pos += len;
    }
    let ins = p.insert(n, &starts)?;
    let sigma = Partition::from_permutation(&images)?;
    Ok(ins.compose_unchecked(&sigma).0)
}

/// `m_p(Π a^{(1)}, …, Π a^{(k)})` through the product axiom.
pub fn expand_products(m: &MomentTable, p: &Partition, products: &[Vec<Label>]) -> Result<Q> {
    let lens: Vec<usize> = products.iter().map(Vec::len).collect();
    let q = product_expansion(p, &lens)?;
    let flat: Vec<Label> = products.iter().flatten().cloned().collect();
    m.get(&q, &flat)
}

/// `p1 ≤ p` within a family, for callers that hold no index.
pub fn below(p: &Partition, tag: FamilyTag) -> Result<Vec<Partition>> {
    Ok(crate::family::enumerate_family(p.k(), tag)?
        .into_iter()
        .filter(|q| leq(q, p))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::npoly::qi;
    use crate::table::constant_word;
    use alloc::vec;

    fn a(k: usize) -> Vec<Label> {
        constant_word("a", k)
    }

    fn table(values: &[(Partition, i64)], tag: FamilyTag) -> CumulantTable {
        let mut t = CumulantTable::new(tag, ["a"]);
        for (p, v) in values {
            t.insert(p, &a(p.k()), qi(*v)).unwrap();
        }
        t
    }

    fn p2(tag: FamilyTag, f: impl Fn(usize) -> i64) -> Vec<(Partition, i64)> {
        let mut out: Vec<(Partition, i64)> = Vec::new();
        for k in 1..=2 {
            for (i, p) in crate::family::enumerate_family(k, tag).unwrap().into_iter().enumerate() {
                out.push((p, f(10 * k + i)));
            }
        }
        out
    }

    #[test]
    fn free_sum_examples() {
        let ta = table(&p2(FamilyTag::P, |i| (i as i64 % 7) - 3), FamilyTag::P);
        let tb = table(&p2(FamilyTag::P, |i| (i as i64 % 5) + 1), FamilyTag::P);
        let s = free_sum(&ta, &tb).unwrap();
        let t = Partition::transposition(2, 1, 2).unwrap();
        let id1 = Partition::identity(1);
        let id2 = Partition::identity(2);
        let g = |x: &CumulantTable, p: &Partition| x.get(p, &a(p.k())).unwrap();
        assert_eq!(g(&s, &t), g(&ta, &t) + g(&tb, &t));
        assert_eq!(
            g(&s, &id2),
            g(&ta, &id2) + g(&tb, &id2) + qi(2) * g(&ta, &id1) * g(&tb, &id1)
        );
        let zero = table(&p2(FamilyTag::P, |_| 0), FamilyTag::P);
        assert_eq!(free_sum(&ta, &zero).unwrap(), ta);
    }

    #[test]
    fn expansion_shapes() {
        let id1 = Partition::identity(1);
        // m_{id_1}(ab) = m_{(1,2)}(a, b).
        assert_eq!(
            product_expansion(&id1, &[2]).unwrap(),
            Partition::transposition(2, 1, 2).unwrap()
        );
        // Singleton products leave p unchanged.
        let x: Partition = "{1 2 2'}{1'}".parse().unwrap();
        assert_eq!(product_expansion(&x, &[1, 1]).unwrap(), x);
        assert!(product_expansion(&x, &[1]).is_err());
    }

    type Mat = Vec<Vec<i64>>;

    fn matmul(a: &Mat, b: &Mat) -> Mat {
        let n = a.len();
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|l| a[i][l] * b[l][j]).sum()).collect())
            .collect()
    }

    // N^{cycles(p)} m_p(M_1, …, M_k) as a block-value sum.
    fn block_sum(p: &Partition, ms: &[&Mat]) -> i64 {
        let n = ms[0].len();
        let k = p.k();
        let nc = p.nc();
        let top: Vec<usize> = (1..=k).map(|c| p.block_of(Point::top(c))).collect();
        let bot: Vec<usize> = (1..=k).map(|c| p.block_of(Point::bottom(c))).collect();
        let mut vals = vec![0usize; nc];
        let mut total = 0;
        loop {
            total += (0..k).map(|j| ms[j][vals[top[j]]][vals[bot[j]]]).product::<i64>();
            let mut i = 0;
            while i < nc {
                vals[i] += 1;
                if vals[i] < n {
                    break;
                }
                vals[i] = 0;
                i += 1;
            }
            if i == nc {
                return total;
            }
        }
    }

    fn moment(p: &Partition, ms: &[&Mat]) -> Q {
        let n = ms[0].len() as i64;
        Q::new(block_sum(p, ms).into(), num_bigint::BigInt::from(n.pow(p.cycles() as u32)))
    }

    use crate::partition::Point;

    #[test]
    fn cycle_orientation_gives_ordered_trace() {
        let m1 = vec![vec![1, 2], vec![0, 3]];
        let m2 = vec![vec![2, -1], vec![1, 1]];
        let m3 = vec![vec![0, 1], vec![4, -2]];
        let q = product_expansion(&Partition::identity(1), &[3]).unwrap();
        let prod = matmul(&matmul(&m1, &m2), &m3);
        let tr = prod[0][0] + prod[1][1];
        assert_eq!(moment(&q, &[&m1, &m2, &m3]), crate::npoly::q(tr, 2));
        let rev = matmul(&matmul(&m3, &m2), &m1);
        assert_ne!(tr, rev[0][0] + rev[1][1]);
    }

    #[test]
    fn product_axiom_on_integer_matrices() {
        let mats: Vec<Mat> = vec![
            vec![vec![1, 2], vec![0, 3]],
            vec![vec![2, -1], vec![1, 1]],
            vec![vec![0, 1], vec![4, -2]],
            vec![vec![-1, 3], vec![2, 5]],
        ];
        for k in 1..=2 {
            for p in crate::family::enumerate_family(k, FamilyTag::P).unwrap() {
                let shapes: &[&[usize]] = if k == 1 { &[&[2], &[3]] } else { &[&[2, 1], &[1, 2], &[2, 2]] };
                for lens in shapes {
                    let mut used = 0;
                    let mut factors: Vec<&Mat> = Vec::new();
                    let mut products: Vec<Mat> = Vec::new();
                    for &len in lens.iter() {
                        let group: Vec<&Mat> = (0..len).map(|i| &mats[(used + i) % 4]).collect();
                        used += len;
                        products.push(group.iter().skip(1).fold(group[0].clone(), |a, b| matmul(&a, b)));
                        factors.extend(group);
                    }
                    let q = product_expansion(&p, lens).unwrap();
                    let lhs = moment(&p, &products.iter().collect::<Vec<_>>());
                    assert_eq!(lhs, moment(&q, &factors), "p = {p}, lens = {lens:?}");
                }
            }
        }
    }
}

