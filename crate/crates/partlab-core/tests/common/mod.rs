#![allow(dead_code)]

use partlab_core::npoly::q;
use partlab_core::table::{constant_word, CumulantTable, Label};
use partlab_core::{enumerate_family, FamilyTag, Partition, Point, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cumulants of one letter on `A_1..A_kmax`, small random rationals.
pub fn random_single(label: &str, kmax: usize, tag: FamilyTag, seed: u64) -> CumulantTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = CumulantTable::new(tag, [label]);
    for k in 1..=kmax {
        for p in enumerate_family(k, tag).unwrap() {
            let sign = if rng.random_bool(0.5) { -1 } else { 1 };
            let v = q(sign * rng.random_range(1..=3), rng.random_range(1..=4));
            t.insert(&p, &constant_word(label, k), v).unwrap();
        }
    }
    t
}

fn links(p: &Partition, w: &[Label], first: &str) -> bool {
    let mut seen = vec![(false, false); p.nc()];
    for c in 1..=p.k() {
        for pt in [Point::top(c), Point::bottom(c)] {
            let b = p.block_of(pt);
            if w[c - 1] == first {
                seen[b].0 = true;
            } else {
                seen[b].1 = true;
            }
        }
    }
    seen.iter().any(|&(x, y)| x && y)
}

/// All words of length `k` over two letters.
pub fn words2(a: &str, b: &str, k: usize) -> Vec<Vec<Label>> {
    (0..1u32 << k)
        .map(|bits| {
            (0..k)
                .map(|i| Label::from(if bits >> i & 1 == 1 { b } else { a }))
                .collect()
        })
        .collect()
}

/// Joint cumulants of two free letters: mixed cumulants vanish on linking
/// partitions and factor over the two column sets otherwise.
pub fn free_joint(ka: &CumulantTable, a: &str, kb: &CumulantTable, b: &str, kmax: usize) -> CumulantTable {
    let tag = ka.tag;
    let mut out = CumulantTable::new(tag, [a, b]);
    for k in 1..=kmax {
        for p in enumerate_family(k, tag).unwrap() {
            for w in words2(a, b, k) {
                let v = if links(&p, &w, a) {
                    Q::from_integer(0.into())
                } else {
                    let c1: Vec<usize> = (1..=k).filter(|&c| w[c - 1] == a).collect();
                    let c2: Vec<usize> = (1..=k).filter(|&c| w[c - 1] == b).collect();
                    let x = ka.get(&p.extract_columns(&c1).unwrap(), &constant_word(a, c1.len())).unwrap();
                    let y = kb.get(&p.extract_columns(&c2).unwrap(), &constant_word(b, c2.len())).unwrap();
                    x * y
                };
                out.insert(&p, &w, v).unwrap();
            }
        }
    }
    out
}

/// Entries at levels `≤ kmax`.
pub fn truncate(t: &CumulantTable, kmax: usize) -> CumulantTable {
    let mut out = CumulantTable::new(t.tag, t.inner.alphabet().iter().cloned());
    for ((p, w), v) in t.inner.iter() {
        if p.k() <= kmax {
            out.insert(p, w, v.clone()).unwrap();
        }
    }
    out
}
