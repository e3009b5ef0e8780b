//! Tensor factorization of moments and cumulants.

use alloc::vec::Vec;

use crate::error::Result;
use crate::family::FamilyTag;
use crate::poset::FamilyIndex;
use crate::table::{CumulantTable, Key, Label, LabeledTable, MomentTable};

fn first_failure<F>(t: &LabeledTable, tag: FamilyTag, kmax: usize, mut value: F) -> Result<Option<Key>>
where
    F: FnMut(&crate::partition::Partition, &[Label]) -> Result<crate::npoly::Q>,
{
    let levels: Vec<usize> = t.levels().into_iter().filter(|&k| k >= 1 && k < kmax).collect();
    for &k1 in &levels {
        for &k2 in &levels {
            if k1 + k2 > kmax {
                continue;
            }
            let f1 = FamilyIndex::new(k1, tag)?;
            let f2 = FamilyIndex::new(k2, tag)?;
            for w1 in t.words_at(k1) {
                for w2 in t.words_at(k2) {
                    let w: Vec<Label> = w1.iter().chain(&w2).cloned().collect();
                    for p1 in f1.members() {
                        let a = value(p1, &w1)?;
                        for p2 in f2.members() {
                            let p = p1.tensor(p2);
                            if value(&p, &w)? != &a * value(p2, &w2)? {
                                return LabeledTable::canonical_key(&p, &w).map(Some);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// First key where `m_{p1⊗p2}(w1 w2) ≠ m_{p1}(w1) m_{p2}(w2)`, for total size
/// at most `kmax`.
pub fn moment_factorization_failure(m: &MomentTable, tag: FamilyTag, kmax: usize) -> Result<Option<Key>> {
    first_failure(&m.inner, tag, kmax, |p, w| m.get(p, w))
}

/// Same test on cumulants.
pub fn cumulant_factorization_failure(kappa: &CumulantTable, kmax: usize) -> Result<Option<Key>> {
    first_failure(&kappa.inner, kappa.tag, kmax, |p, w| kappa.get(p, w))
}

/// `(moment route, cumulant route)`; the two always agree on complete tables.
pub fn is_deterministic(m: &MomentTable, tag: FamilyTag, kmax: usize) -> Result<(bool, bool)> {
    let kappa = crate::transform::moments_to_cumulants(m, tag)?;
    Ok((
        moment_factorization_failure(m, tag, kmax)?.is_none(),
        cumulant_factorization_failure(&kappa, kmax)?.is_none(),
    ))
}
