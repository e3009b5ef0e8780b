mod common;

use std::collections::BTreeSet;

use common::{free_joint, random_single, truncate, words2};
use partlab_core::free::{
    expand_products, free_product, free_product_moment_from_cumulants, free_sum, ProductMode, ProductTable,
};
use partlab_core::freeness::freeness_check;
use partlab_core::table::{constant_word, word, CumulantTable, Label, MomentTable};
use partlab_core::transform::{cumulants_to_moments, moments_to_cumulants};
use partlab_core::npoly::qi;
use partlab_core::{enumerate_family, FamilyTag, Partition};

fn set(x: &str) -> BTreeSet<Label> {
    [Label::from(x)].into_iter().collect()
}

struct Pair {
    ka: CumulantTable,
    kb: CumulantTable,
    joint: MomentTable,
}

fn pair(kmax: usize, seed: u64) -> Pair {
    let ka = random_single("a", kmax, FamilyTag::P, seed);
    let kb = random_single("b", kmax, FamilyTag::P, seed + 1);
    let joint = cumulants_to_moments(&free_joint(&ka, "a", &kb, "b", kmax)).unwrap();
    Pair { ka, kb, joint }
}

fn single_moments(k: &CumulantTable) -> MomentTable {
    cumulants_to_moments(k).unwrap()
}

// Moments of the letter c = ab read off the joint table.
fn product_moments(joint: &MomentTable, kmax: usize) -> MomentTable {
    let mut out = MomentTable::new(["c"]);
    for k in 1..=kmax {
        for p in enumerate_family(k, FamilyTag::P).unwrap() {
            let prods: Vec<Vec<Label>> = (0..k).map(|_| word(&["a", "b"])).collect();
            let v = expand_products(joint, &p, &prods).unwrap();
            out.insert(&p, &constant_word("c", k), v).unwrap();
        }
    }
    out
}

fn relabel(t: &CumulantTable, to: &str) -> CumulantTable {
    let mut out = CumulantTable::new(t.tag, [to]);
    for ((p, w), v) in t.inner.iter() {
        out.insert(p, &constant_word(to, w.len()), v.clone()).unwrap();
    }
    out
}

#[test]
fn product_forms_match_the_joint_table() {
    let Pair { ka, kb, joint } = pair(4, 11);
    let direct = product_moments(&joint, 2);
    let (ka, kb) = (truncate(&ka, 2), truncate(&kb, 2));

    let kb_as_a = relabel(&kb, "a");
    let mb = single_moments(&kb_as_a);
    let ProductTable::Moments(mform) = free_product(&ka, &ProductTable::Moments(mb), ProductMode::MomentForm).unwrap()
    else {
        panic!("moment form returns moments")
    };
    let ProductTable::Cumulants(cform) =
        free_product(&ka, &ProductTable::Cumulants(kb_as_a.clone()), ProductMode::CumulantForm).unwrap()
    else {
        panic!("cumulant form returns cumulants")
    };
    let cform_m = cumulants_to_moments(&cform).unwrap();
    for k in 1..=2 {
        for p in enumerate_family(k, FamilyTag::P).unwrap() {
            let w = constant_word("a", k);
            let want = direct.get(&p, &constant_word("c", k)).unwrap();
            assert_eq!(mform.get(&p, &w).unwrap(), want, "moment form at {p}");
            assert_eq!(cform_m.get(&p, &w).unwrap(), want, "cumulant form at {p}");
            assert_eq!(
                free_product_moment_from_cumulants(&ka, &kb_as_a, &p, &w).unwrap(),
                want,
                "geodesic form at {p}"
            );
        }
    }
}

#[test]
fn three_term_expansion() {
    let Pair { ka, kb, .. } = pair(2, 5);
    let mb = single_moments(&relabel(&kb, "a"));
    let ProductTable::Moments(m) = free_product(&ka, &ProductTable::Moments(mb.clone()), ProductMode::MomentForm).unwrap()
    else {
        panic!()
    };
    let w = constant_word("a", 2);
    let t = Partition::transposition(2, 1, 2).unwrap();
    let (id, zero) = (Partition::identity(2), Partition::zero(2));
    let want = ka.get(&id, &w).unwrap() * mb.get(&t, &w).unwrap()
        + ka.get(&zero, &w).unwrap() * mb.get(&zero, &w).unwrap()
        + ka.get(&t, &w).unwrap() * mb.get(&id, &w).unwrap();
    assert_eq!(m.get(&t, &w).unwrap(), want);
    let id1 = Partition::identity(1);
    let w1 = constant_word("a", 1);
    assert_eq!(m.get(&id1, &w1).unwrap(), ka.get(&id1, &w1).unwrap() * mb.get(&id1, &w1).unwrap());
}

#[test]
fn unit_leaves_moments_unchanged() {
    let Pair { kb, .. } = pair(2, 3);
    let mut unit = CumulantTable::new(FamilyTag::P, ["a"]);
    for k in 1..=2 {
        for p in enumerate_family(k, FamilyTag::P).unwrap() {
            let v = if p == Partition::identity(k) { 1 } else { 0 };
            unit.insert(&p, &constant_word("a", k), qi(v)).unwrap();
        }
    }
    let mb = single_moments(&relabel(&kb, "a"));
    let ProductTable::Moments(m) = free_product(&unit, &ProductTable::Moments(mb.clone()), ProductMode::MomentForm).unwrap()
    else {
        panic!()
    };
    assert_eq!(m, mb);
}

#[test]
fn free_sum_matches_joint_table() {
    // κ(a + b) from the joint table by multilinearity.
    let Pair { ka, kb, joint } = pair(3, 21);
    let s = free_sum(&relabel(&ka, "x"), &relabel(&kb, "x")).unwrap();
    let ms = cumulants_to_moments(&s).unwrap();
    for k in 1..=3 {
        for p in enumerate_family(k, FamilyTag::P).unwrap() {
            let total = words2("a", "b", k)
                .iter()
                .map(|w| joint.get(&p, w).unwrap())
                .fold(qi(0), |x, y| x + y);
            assert_eq!(ms.get(&p, &constant_word("x", k)).unwrap(), total, "{p}");
        }
    }
}

#[test]
fn p_free_pair_is_not_s_free() {
    let Pair { ka, kb, joint } = pair(4, 7);
    let w2 = constant_word("a", 2);
    let z = Partition::zero(2);
    assert!(ka.get(&z, &w2).unwrap() * kb.get(&z, &constant_word("b", 2)).unwrap() != qi(0));
    let p = freeness_check(&joint, &set("a"), &set("b"), FamilyTag::P, 4).unwrap();
    assert!(p.free && p.routes_agree, "{p:?}");
    let s = freeness_check(&joint, &set("a"), &set("b"), FamilyTag::S, 4).unwrap();
    assert!(!s.free && s.routes_agree, "{s:?}");
    let (wp, ww) = s.witness.unwrap();
    assert_eq!(wp.k(), 4);
    assert!(wp.as_permutation().is_some());
    let s3 = freeness_check(&joint, &set("a"), &set("b"), FamilyTag::S, 3).unwrap();
    assert!(s3.free, "S-freeness holds below level 4: {s3:?}");
    eprintln!("S witness: {wp} on {ww:?}");
}

#[test]
fn a_letter_is_not_free_from_its_copy() {
    // a and a' are the same element.
    let ka = random_single("a", 2, FamilyTag::P, 9);
    let ma = cumulants_to_moments(&ka).unwrap();
    let mut m = MomentTable::new(["a", "c"]);
    for k in 1..=2 {
        for p in enumerate_family(k, FamilyTag::P).unwrap() {
            for w in words2("a", "c", k) {
                m.insert(&p, &w, ma.get(&p, &constant_word("a", k)).unwrap()).unwrap();
            }
        }
    }
    let r = freeness_check(&m, &set("a"), &set("c"), FamilyTag::P, 2).unwrap();
    assert!(!r.free && r.routes_agree);
    let kappa = moments_to_cumulants(&m, FamilyTag::P).unwrap();
    assert_ne!(kappa.get(&Partition::identity(2), &word(&["a", "c"])).unwrap(), qi(0));
}
