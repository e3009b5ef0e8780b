//! Exact oracles for the finite-N observables.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use partlab::moments::{
    block_sum, classical_bridge, classical_cumulants, cumulants_from_traces, entry_moment_prediction,
    exclusive_block_sum, exclusive_moment, finite_cumulants, p_moment, trace_pairing_c, trace_pairing_q, Entry,
    MatrixFamily, Mode, Value,
};
use partlab::wick::{expected_trace_pairing, Slot};
use partlab::{CMatrix, Matrix, QMatrix, C64};
use partlab_core::npoly::{q, qi, qpow};
use partlab_core::table::word;
use partlab_core::{enumerate_family, rho_matrix, FamilyTag, Partition, Point, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_int_matrix(n: usize, rng: &mut ChaCha8Rng) -> QMatrix {
    Matrix::from_fn(n, |_, _| qi(rng.random_range(-4..=4)))
}

/// `Tr[(M_1 ⊗ … ⊗ M_k) ρ_N(ᵗp)]` from the explicit sparse matrix.
fn dense_trace(p: &Partition, mats: &[&QMatrix], n: usize) -> Q {
    let rho = rho_matrix(&p.transpose(), n as u64).unwrap();
    let k = p.k();
    let digits = |mut x: u32| {
        let mut d = vec![0usize; k];
        for j in (0..k).rev() {
            d[j] = x as usize % n;
            x /= n as u32;
        }
        d
    };
    let mut total = Q::zero();
    for &(r, c) in &rho.entries {
        let (r, c) = (digits(r), digits(c));
        let mut prod = Q::one();
        for j in 0..k {
            prod *= mats[j].get(c[j], r[j]);
        }
        total += prod;
    }
    total
}

#[test]
fn block_sum_matches_the_dense_tensor_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=4usize {
        for k in 1..=3usize {
            let mats: Vec<QMatrix> = (0..k).map(|_| random_int_matrix(n, &mut rng)).collect();
            let refs: Vec<&QMatrix> = mats.iter().collect();
            for p in enumerate_family(k, FamilyTag::P).unwrap() {
                assert_eq!(block_sum(&p, &refs, u128::MAX).unwrap(), dense_trace(&p, &refs, n), "{p} N={n}");
            }
        }
    }
}

#[test]
fn permutation_moments_are_products_of_normalized_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 3;
    for k in 1..=4usize {
        let mats: Vec<QMatrix> = (0..k).map(|_| random_int_matrix(n, &mut rng)).collect();
        let refs: Vec<&QMatrix> = mats.iter().collect();
        let cmats: Vec<CMatrix> = mats.iter().map(QMatrix::to_complex).collect();
        let crefs: Vec<&CMatrix> = cmats.iter().collect();
        for s in enumerate_family(k, FamilyTag::S).unwrap() {
            let brute = block_sum(&s, &refs, u128::MAX).unwrap();
            assert_eq!(trace_pairing_q(&s, &refs, u128::MAX).unwrap(), brute, "{s}");
            let z = trace_pairing_c(&s, &crefs, u128::MAX).unwrap();
            let b = num_traits::ToPrimitive::to_f64(&brute).unwrap();
            assert!((z - C64::new(b, 0.0)).norm() < 1e-9 * (1.0 + b.abs()), "{s}");
        }
    }
    // m_{(1,2,3)}: the product of the three letters in cyclic order, read off directly.
    let a = random_int_matrix(n, &mut rng);
    let b = random_int_matrix(n, &mut rng);
    let c = random_int_matrix(n, &mut rng);
    let fam = MatrixFamily::new(n, 0)
        .with("a", Entry::Exact(a.clone()))
        .unwrap()
        .with("b", Entry::Exact(b.clone()))
        .unwrap()
        .with("c", Entry::Exact(c.clone()))
        .unwrap();
    let orders = [a.mul_naive(&b).mul_naive(&c).trace(), a.mul_naive(&c).mul_naive(&b).trace()];
    let sigma = Partition::cycle(3);
    let m = p_moment(&fam, &sigma, &word(&["a", "b", "c"]), Mode::Exact).unwrap();
    let want: Vec<Value> = orders.iter().map(|t| Value::Exact(t / qi(n as i64))).collect();
    assert!(want.contains(&m));
}

#[test]
fn exclusive_moments_recombine_with_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 3;
    let m = random_int_matrix(n, &mut rng);
    let fam = MatrixFamily::new(n, 0).with("m", Entry::Exact(m.clone())).unwrap();
    let w1 = word(&["m"]);
    let get = |v: Value| v.exact().unwrap().clone();
    let full = get(p_moment(&fam, &Partition::singletons(1), &w1, Mode::Exact).unwrap());
    let off = get(exclusive_moment(&fam, &Partition::singletons(1), &w1, Mode::Exact).unwrap());
    let diag = get(exclusive_moment(&fam, &Partition::identity(1), &w1, Mode::Exact).unwrap());
    assert_eq!(full, off + diag);

    // m_p = Σ_{p' coarser than p} N^{cycles(p') − cycles(p)} m_{p'^c}.
    let mats: Vec<QMatrix> = (0..3).map(|_| random_int_matrix(n, &mut rng)).collect();
    let refs: Vec<&QMatrix> = mats.iter().collect();
    let all = enumerate_family(3, FamilyTag::P).unwrap();
    for p in &all {
        let mut sum = Q::zero();
        for pp in all.iter().filter(|pp| p.is_finer_than(pp) && pp.nc() <= n) {
            sum += exclusive_block_sum(pp, &refs, u128::MAX).unwrap();
        }
        assert_eq!(sum, block_sum(p, &refs, u128::MAX).unwrap(), "{p}");
    }
}

fn random_family(n: usize, k: usize, seed: u64) -> (MatrixFamily, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fam = MatrixFamily::new(n, 0);
    let mut w = Vec::new();
    for j in 0..k {
        let l = format!("m{j}");
        fam.insert(&l, Entry::Exact(random_int_matrix(n, &mut rng))).unwrap();
        w.push(l);
    }
    (fam, w)
}

#[test]
fn cumulants_resynthesize_the_moments() {
    for (k, tag) in [(2, FamilyTag::P), (2, FamilyTag::B), (3, FamilyTag::S), (2, FamilyTag::H), (2, FamilyTag::Bs)] {
        let n = 2 * k;
        let (fam, w) = random_family(n, k, 40 + k as u64);
        let kappa = finite_cumulants(&fam, k, tag, &w).unwrap();
        let mats = fam.exact_word(&w).unwrap();
        for p in enumerate_family(k, tag).unwrap() {
            // t_p = Σ_{p'} κ_{p'} N^{nc(p ∨ p') − nc(p') + cycles(p')}.
            let mut t = Q::zero();
            for (pp, v) in &kappa {
                let e = p.join(pp).unwrap().nc() as i32 - pp.nc() as i32 + pp.cycles() as i32;
                t += v * qpow(&qi(n as i64), e);
            }
            assert_eq!(t, block_sum(&p, &mats, u128::MAX).unwrap(), "{tag:?} {p}");
        }
    }
}

#[test]
fn cumulant_examples() {
    let n = 4;
    let fam = MatrixFamily::new(n, 0).with("j", Entry::Exact(partlab::matrix::j_matrix_q(n))).unwrap();
    let kappa = finite_cumulants(&fam, 1, FamilyTag::P, &word(&["j"])).unwrap();
    assert_eq!(kappa[&Partition::identity(1)], qi(0));
    assert_eq!(kappa[&Partition::singletons(1)], qi(1));

    // The GUE mean tensor E[M ⊗ M] = ρ_N((1,2)) through the Wick-averaged traces.
    let gue = Slot::Gaussian { source: 0, epsilon: 1, beta: 2, variance: q(1, n as i64) };
    let slots = [gue.clone(), gue];
    let traces: BTreeMap<Partition, Q> = enumerate_family(2, FamilyTag::P)
        .unwrap()
        .into_iter()
        .map(|p| {
            let t = expected_trace_pairing(&p, &slots, n, u128::MAX).unwrap();
            (p, t)
        })
        .collect();
    let kappa = cumulants_from_traces(2, FamilyTag::P, &traces, n).unwrap();
    let t12 = Partition::transposition(2, 1, 2).unwrap();
    for (p, v) in &kappa {
        assert_eq!(*v, if *p == t12 { qi(1) } else { qi(0) }, "{p}");
    }
}

/// `E[Π_j (M_j)_{n_j n_j'}]` read directly from the matrices.
fn direct_entry(mats: &[&QMatrix], tuple: &[u64]) -> Q {
    mats.iter().enumerate().fold(Q::one(), |acc, (j, m)| {
        acc * m.get(tuple[2 * j] as usize - 1, tuple[2 * j + 1] as usize - 1)
    })
}

#[test]
fn entry_predictions_for_polynomials_in_id_and_j() {
    for n in [4usize, 8] {
        let j = partlab::matrix::j_matrix_q(n);
        let id = QMatrix::identity(n);
        let poly = Matrix::from_fn(n, |r, c| qi(3) * id.get(r, c) - qi(2) * j.get(r, c));
        let fam = MatrixFamily::new(n, 0)
            .with("j", Entry::Exact(j))
            .unwrap()
            .with("p", Entry::Exact(poly))
            .unwrap();
        let w = word(&["j", "p"]);
        let kappa = finite_cumulants(&fam, 2, FamilyTag::P, &w).unwrap();
        let mats = fam.exact_word(&w).unwrap();
        let one = finite_cumulants(&fam, 1, FamilyTag::P, &word(&["j"])).unwrap();
        assert_eq!(entry_moment_prediction(&one, FamilyTag::P, &[1, 1], n).unwrap(), q(1, n as i64));
        for tuple in [[1u64, 1, 1, 1], [1, 2, 2, 1], [1, 1, 2, 2], [1, 2, 3, 4], [2, 2, 2, 3], [4, 1, 3, 1]] {
            assert_eq!(
                entry_moment_prediction(&kappa, FamilyTag::P, &tuple, n).unwrap(),
                direct_entry(&mats, &tuple),
                "N={n} {tuple:?}"
            );
        }
    }
}

/// Classical cumulants by Möbius inversion over set partitions:
/// `c_n = Σ_π (−1)^{|π|−1} (|π|−1)! Π_{B ∈ π} m_{|B|}`.
fn mobius_cumulant(m: &[Q], n: usize) -> Q {
    fn parts(n: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &out {
                let blocks = p.iter().copied().max().map_or(0, |x| x + 1);
                for b in 0..=blocks {
                    let mut q = p.clone();
                    q.push(b);
                    next.push(q);
                }
            }
            out = next;
        }
        out
    }
    let mut total = Q::zero();
    for p in parts(n) {
        let blocks = p.iter().copied().max().unwrap() + 1;
        let mut term = if blocks % 2 == 1 { Q::one() } else { -Q::one() };
        for f in 1..blocks {
            term *= qi(f as i64);
        }
        for b in 0..blocks {
            term *= &m[p.iter().filter(|&&x| x == b).count() - 1];
        }
        total += term;
    }
    total
}

#[test]
fn classical_bridge_matches_the_moment_cumulant_oracle() {
    let bern = vec![q(1, 2); 4];
    let want = [q(1, 2), q(1, 4), qi(0), q(-1, 8)];
    for k in 1..=4 {
        assert_eq!(mobius_cumulant(&bern, k), want[k - 1]);
        assert_eq!(classical_bridge(&bern, k, 8).unwrap(), want[k - 1], "k = {k}");
    }
    assert_eq!(classical_cumulants(&bern), want.to_vec());
    let gauss: Vec<Q> = [1, 2, 4, 10].iter().map(|&x| qi(x)).collect(); // N(1, 1)
    for k in 1..=4 {
        assert_eq!(classical_bridge(&gauss, k, 2 * k).unwrap(), mobius_cumulant(&gauss, k));
    }
    assert!(classical_bridge(&bern, 4, 7).is_err());
}

#[test]
fn budget_is_enforced() {
    let (fam, w) = random_family(4, 3, 1);
    let fam = fam.with_budget(100);
    let err = p_moment(&fam, &Partition::singletons(3), &w, Mode::Exact).unwrap_err();
    assert!(matches!(err, partlab::Error::Budget { .. }));
}

#[test]
fn unknown_labels_and_size_mismatches() {
    let (fam, _) = random_family(3, 1, 1);
    assert!(matches!(
        p_moment(&fam, &Partition::identity(1), &word(&["zz"]), Mode::Exact),
        Err(partlab::Error::UnknownLabel(_))
    ));
    assert!(p_moment(&fam, &Partition::identity(2), &word(&["m0"]), Mode::Exact).is_err());
    let mut f = MatrixFamily::new(3, 0);
    assert!(f.insert("x", Entry::Exact(QMatrix::identity(2))).is_err());
    f.insert("x", Entry::Exact(QMatrix::identity(3))).unwrap();
    assert!(f.insert("x", Entry::Exact(QMatrix::identity(3))).is_err());
}

#[test]
fn point_convention_is_row_top() {
    // M = E_{12}: only the tuple (1, 2) carries mass; {1}{1'} sums every entry.
    let m = Matrix::from_fn(2, |r, c| if (r, c) == (0, 1) { qi(1) } else { qi(0) });
    let p = Partition::from_fn(1, |pt: Point| pt.primed as usize);
    assert_eq!(block_sum(&p, &[&m], u128::MAX).unwrap(), qi(1));
    assert_eq!(block_sum(&Partition::identity(1), &[&m], u128::MAX).unwrap(), qi(0));
}
