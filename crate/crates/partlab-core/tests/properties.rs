mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::{random_single, truncate};
use partlab_core::deterministic::{cumulant_factorization_failure, is_deterministic, moment_factorization_failure};
use partlab_core::free::{free_product, free_sum, ProductMode, ProductTable};
use partlab_core::npoly::{q, qi};
use partlab_core::table::{constant_word, CumulantTable, MomentTable};
use partlab_core::transform::{
    cumulants_to_moments, exclusive_transform, moments_to_cumulants, restrict_extend, Direction,
};
use partlab_core::{
    canonicalize, enumerate_family, gram_solve, orbit_rep, rho_matrix, FamilyTag, Partition, Point, Q,
};

fn partition(max_k: usize) -> impl Strategy<Value = Partition> {
    (1..=max_k).prop_flat_map(|k| {
        prop::collection::vec(0..2 * k, 2 * k)
            .prop_map(move |raw| Partition::from_fn(k, |pt| raw[2 * (pt.col - 1) + pt.primed as usize]))
    })
}

fn pair_of_size(k: usize) -> impl Strategy<Value = (Partition, Partition)> {
    let one = move || {
        prop::collection::vec(0..2 * k, 2 * k)
            .prop_map(move |raw| Partition::from_fn(k, |pt| raw[2 * (pt.col - 1) + pt.primed as usize]))
    };
    (one(), one())
}

fn triple_of_size(k: usize) -> impl Strategy<Value = (Partition, Partition, Partition)> {
    (pair_of_size(k), pair_of_size(k)).prop_map(|((a, b), (c, _))| (a, b, c))
}

fn rational() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_and_block_round_trips(p in partition(5)) {
        let text = p.to_text();
        prop_assert_eq!(&text.parse::<Partition>().unwrap(), &p);
        let blocks = p.blocks();
        let again = canonicalize(&blocks, p.k()).unwrap();
        prop_assert_eq!(&again, &p);
        prop_assert_eq!(canonicalize(&again.blocks(), p.k()).unwrap(), again);
    }

    #[test]
    fn transpose_is_an_involution(p in partition(5)) {
        prop_assert_eq!(p.transpose().transpose(), p);
    }

    #[test]
    fn composition_identities((a, b, c) in triple_of_size(4)) {
        let (ab, k1) = a.compose(&b).unwrap();
        let (abc, k2) = ab.compose(&c).unwrap();
        let (bc, k3) = b.compose(&c).unwrap();
        let (abc2, k4) = a.compose(&bc).unwrap();
        prop_assert_eq!(&abc, &abc2);
        prop_assert_eq!(k1 + k2, k3 + k4);
        let (t, kt) = b.transpose().compose(&a.transpose()).unwrap();
        prop_assert_eq!(t, ab.transpose());
        prop_assert_eq!(kt, k1);
    }

    #[test]
    fn stats_add_over_tensor((a, b) in pair_of_size(3)) {
        let t = a.tensor(&b);
        prop_assert_eq!(t.nc(), a.nc() + b.nc());
        prop_assert_eq!(t.cycles(), a.cycles() + b.cycles());
        let (l, r) = t.split_at(a.k()).unwrap();
        prop_assert_eq!(l, a);
        prop_assert_eq!(r, b);
    }

    #[test]
    fn orbit_rep_is_a_class_function(p in partition(5), seed in any::<u64>()) {
        let k = p.k();
        let mut perm: Vec<usize> = (1..=k).collect();
        let mut s = seed;
        for i in (1..k).rev() {
            let j = (s % (i as u64 + 1)) as usize;
            perm.swap(i, j);
            s /= i as u64 + 1;
        }
        prop_assert_eq!(orbit_rep(&p.permute_columns(&perm)).unwrap(), orbit_rep(&p).unwrap());
    }

    #[test]
    fn flip_is_an_involution(p in partition(5), k1 in 0usize..=5) {
        let k1 = k1.min(p.k());
        prop_assert_eq!(p.flip(k1).unwrap().flip(k1).unwrap(), p);
    }

    #[test]
    fn kernel_blocks_match_values(values in prop::collection::vec(1u64..4, 2..=8)) {
        let values = if values.len() % 2 == 1 { values[1..].to_vec() } else { values };
        let p = Partition::kernel(&values).unwrap();
        let k = values.len() / 2;
        for a in 0..2 * k {
            for b in 0..2 * k {
                let pa = Point { col: a / 2 + 1, primed: a % 2 == 1 };
                let pb = Point { col: b / 2 + 1, primed: b % 2 == 1 };
                prop_assert_eq!(p.block_of(pa) == p.block_of(pb), values[a] == values[b]);
            }
        }
    }

    #[test]
    fn transforms_round_trip(values in prop::collection::vec(rational(), 2 + 15 + 203)) {
        let mut m = MomentTable::new(["a"]);
        let mut it = values.into_iter();
        for k in 1..=3 {
            for p in enumerate_family(k, FamilyTag::P).unwrap() {
                m.insert(&p, &constant_word("a", k), it.next().unwrap()).unwrap();
            }
        }
        for tag in [FamilyTag::P, FamilyTag::S, FamilyTag::B] {
            let restricted = restrict_extend(&m, FamilyTag::P, tag).unwrap();
            let back = cumulants_to_moments(&moments_to_cumulants(&restricted, tag).unwrap()).unwrap();
            prop_assert_eq!(&back, &restricted);
        }
        let ex = exclusive_transform(&m, FamilyTag::P, Direction::ToExclusive).unwrap();
        prop_assert_eq!(exclusive_transform(&ex, FamilyTag::P, Direction::FromExclusive).unwrap(), m);
    }

    #[test]
    fn gram_solve_recovers_coefficients(cs in prop::collection::vec(-5i64..=5, 15), tag_i in 0usize..3) {
        let tag = [FamilyTag::P, FamilyTag::B, FamilyTag::S][tag_i];
        let n = 4u64;
        let fam = enumerate_family(2, tag).unwrap();
        let mut dense = vec![0i64; 16 * 16];
        let mut want = BTreeMap::new();
        for (p, &c) in fam.iter().zip(&cs) {
            for (r, col) in rho_matrix(p, n).unwrap().entries {
                dense[r as usize * 16 + col as usize] += c;
            }
            want.insert(p.clone(), qi(c));
        }
        let traces: BTreeMap<Partition, Q> = fam
            .iter()
            .map(|p| {
                let t: i64 = rho_matrix(p, n).unwrap().entries.iter()
                    .map(|&(r, c)| dense[r as usize * 16 + c as usize]).sum();
                (p.clone(), qi(t))
            })
            .collect();
        prop_assert_eq!(gram_solve(2, tag, &traces, n).unwrap(), want);
    }
}

// κ_p = Π over cycles c of α^{nc(p|c)} β^{|c|}: multiplicative across tensor products.
fn deterministic_single(label: &str, kmax: usize, alpha: Q, beta: Q) -> CumulantTable {
    let mut t = CumulantTable::new(FamilyTag::P, [label]);
    for k in 1..=kmax {
        for p in enumerate_family(k, FamilyTag::P).unwrap() {
            let mut v = qi(1);
            for cols in p.cycle_columns() {
                let e = p.extract_columns(&cols).unwrap();
                for _ in 0..e.nc() {
                    v *= &alpha;
                }
                for _ in 0..cols.len() {
                    v *= &beta;
                }
            }
            t.insert(&p, &constant_word(label, k), v).unwrap();
        }
    }
    t
}

#[test]
fn determinism_routes_agree_on_p2_tensor_p2() {
    let det = cumulants_to_moments(&deterministic_single("a", 4, q(1, 2), q(-2, 3))).unwrap();
    assert_eq!(is_deterministic(&det, FamilyTag::P, 4).unwrap(), (true, true));
    let generic = cumulants_to_moments(&random_single("a", 4, FamilyTag::P, 3)).unwrap();
    let (m, c) = is_deterministic(&generic, FamilyTag::P, 4).unwrap();
    assert!(!m && !c);
    // Break factorization only at one P₂⊗P₂ key.
    let mut kappa = deterministic_single("a", 4, q(1, 2), q(-2, 3));
    let z = Partition::zero(2);
    let key = z.tensor(&z);
    kappa.insert(&key, &constant_word("a", 4), qi(7)).unwrap();
    let m = cumulants_to_moments(&kappa).unwrap();
    assert!(cumulant_factorization_failure(&kappa, 4).unwrap().is_some());
    assert!(moment_factorization_failure(&m, FamilyTag::P, 4).unwrap().is_some());
    assert!(moment_factorization_failure(&m, FamilyTag::P, 3).unwrap().is_none());
}

#[test]
fn free_operations_keep_determinism() {
    let a = deterministic_single("x", 3, q(1, 2), q(3, 2));
    let b = deterministic_single("x", 3, q(-1, 3), q(2, 1));
    let s = free_sum(&a, &b).unwrap();
    assert!(cumulant_factorization_failure(&s, 3).unwrap().is_none());
    let ProductTable::Cumulants(p) =
        free_product(&a, &ProductTable::Cumulants(b.clone()), ProductMode::CumulantForm).unwrap()
    else {
        panic!()
    };
    assert!(cumulant_factorization_failure(&p, 3).unwrap().is_none());
    let ProductTable::Moments(pm) =
        free_product(&truncate(&a, 3), &ProductTable::Moments(cumulants_to_moments(&b).unwrap()), ProductMode::MomentForm)
            .unwrap()
    else {
        panic!()
    };
    assert!(moment_factorization_failure(&pm, FamilyTag::P, 3).unwrap().is_none());
}

#[test]
fn point_order_is_canonical() {
    let p: Partition = "{1 2'}{2 1'}".parse().unwrap();
    assert_eq!(p.blocks()[0], vec![Point::top(1), Point::bottom(2)]);
}
