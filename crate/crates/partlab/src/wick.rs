//! Two-species pairings and the matricial Wick formula.

use num_traits::{One, Zero};
use partlab_core::npoly::{qi, NPoly};
use partlab_core::{Partition, PartitionVector, Point, Q};

use crate::error::{invalid, Result};
use crate::matrix::{QMatrix, Matrix};
use crate::moments::block_sum;

/// Transposition `(i, j)` or Weyl contraction `[i, j]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Species {
    T,
    W,
}

/// A perfect matching of `{1..n}` with each pair tagged `T` or `W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingTwoSpecies {
    n: usize,
    pairs: Vec<(usize, usize, Species)>,
}

impl PairingTwoSpecies {
    pub fn new(n: usize, pairs: Vec<(usize, usize, Species)>) -> Result<Self> {
        if n % 2 != 0 {
            return invalid("a perfect matching needs an even number of points");
        }
        let mut seen = vec![false; n + 1];
        for &(i, j, _) in &pairs {
            if i == j || i == 0 || j == 0 || i > n || j > n || seen[i] || seen[j] {
                return invalid(format!("pairs do not form a perfect matching of 1..{n}"));
            }
            seen[i] = true;
            seen[j] = true;
        }
        if pairs.len() * 2 != n {
            return invalid("pairs do not cover every point");
        }
        let mut pairs: Vec<_> = pairs.into_iter().map(|(i, j, s)| (i.min(j), i.max(j), s)).collect();
        pairs.sort();
        Ok(PairingTwoSpecies { n, pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize, Species)] {
        &self.pairs
    }

    pub fn count(&self, s: Species) -> usize {
        self.pairs.iter().filter(|p| p.2 == s).count()
    }

    /// `b_π`: the product of `(i, j)` over `T` pairs and `[i, j]` over `W` pairs.
    pub fn brauer_element(&self) -> Partition {
        let mut key = vec![0usize; 2 * self.n];
        let slot = |pt: Point| 2 * (pt.col - 1) + pt.primed as usize;
        for (b, &(i, j, s)) in self.pairs.iter().enumerate() {
            let (x, y) = match s {
                Species::T => ((Point::top(i), Point::bottom(j)), (Point::top(j), Point::bottom(i))),
                Species::W => ((Point::top(i), Point::top(j)), (Point::bottom(i), Point::bottom(j))),
            };
            key[slot(x.0)] = 2 * b;
            key[slot(x.1)] = 2 * b;
            key[slot(y.0)] = 2 * b + 1;
            key[slot(y.1)] = 2 * b + 1;
        }
        Partition::from_fn(self.n, |pt| key[slot(pt)])
    }
}

/// Perfect matchings of `{1..n}`, each pair listed `(min, max)`.
pub fn perfect_matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let first = free.remove(0);
        for idx in 0..free.len() {
            let partner = free.remove(idx);
            cur.push((first, partner));
            rec(free, cur, out);
            cur.pop();
            free.insert(idx, partner);
        }
        free.insert(0, first);
    }
    let mut out = Vec::new();
    if n % 2 == 0 {
        rec(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    }
    out
}

/// All pairings of `{1..n}`: one species for `β = 2`, both for `β = 1`.
pub fn two_species_pairings(n: usize, beta: u8) -> Result<Vec<PairingTwoSpecies>> {
    if beta != 1 && beta != 2 {
        return invalid("beta must be 1 or 2");
    }
    let mut out = Vec::new();
    for m in perfect_matchings(n) {
        let choices: u32 = if beta == 1 { 1 << m.len() } else { 1 };
        for mask in 0..choices {
            let pairs = m
                .iter()
                .enumerate()
                .map(|(b, &(i, j))| (i, j, if mask >> b & 1 == 1 { Species::W } else { Species::T }))
                .collect();
            out.push(PairingTwoSpecies::new(n, pairs)?);
        }
    }
    Ok(out)
}

/// `E[M_1 ⊗ … ⊗ M_k] = Σ_π ε^{#T_π} Π_{(i,j) ∈ π} C(M_i, M_j) ρ_N(b_π)` for a
/// centered Gaussian family with covariance matrix `C`.
pub fn wick_tensor(k: usize, epsilon: i8, beta: u8, covariance: &[Vec<Q>]) -> Result<PartitionVector> {
    if epsilon != 1 && epsilon != -1 {
        return invalid("epsilon must be ±1");
    }
    if covariance.len() != k || covariance.iter().any(|r| r.len() != k) {
        return invalid(format!("covariance must be {k}×{k}"));
    }
    for i in 0..k {
        for j in 0..k {
            if covariance[i][j] != covariance[j][i] {
                return invalid("covariance must be symmetric");
            }
        }
    }
    let mut out = PartitionVector::zero(k);
    for pi in two_species_pairings(k, beta)? {
        let mut c = if epsilon == -1 && pi.count(Species::T) % 2 == 1 { -Q::one() } else { Q::one() };
        for &(i, j, _) in pi.pairs() {
            c *= &covariance[i - 1][j - 1];
        }
        if !c.is_zero() {
            out.add_term(pi.brauer_element(), &NPoly::constant(c))?;
        }
    }
    Ok(out)
}

/// One letter of a word averaged by the Wick formula.
#[derive(Clone, Debug)]
pub enum Slot<'a> {
    Fixed(&'a QMatrix),
    /// A centered Gaussian matrix with `E[M ⊗ M] = v (ε ρ((1,2)) + (2 − β) ρ([1,2]))`;
    /// slots with the same `source` hold the same matrix, distinct sources
    /// are independent.
    Gaussian { source: usize, epsilon: i8, beta: u8, variance: Q },
}

/// `E[t_p]` for a word of deterministic and Gaussian letters: each pairing
/// of Gaussian slots merges their indices as `b_π` does, so the expectation
/// is a sum of block sums over `p ∨ b̃_π` with the Gaussian slots replaced by
/// the all-ones matrix.
pub fn expected_trace_pairing(p: &Partition, slots: &[Slot<'_>], n: usize, budget: u128) -> Result<Q> {
    if slots.len() != p.k() {
        return invalid(format!("word has {} letters, partition has k = {}", slots.len(), p.k()));
    }
    let ones = Matrix::from_fn(n, |_, _| Q::one());
    let mut gauss = Vec::new();
    let mut mats = Vec::with_capacity(slots.len());
    for (j, s) in slots.iter().enumerate() {
        match s {
            Slot::Fixed(m) => {
                if m.n() != n {
                    return invalid(format!("letter {} is {}×{}, N = {n}", j + 1, m.n(), m.n()));
                }
                mats.push(*m);
            }
            Slot::Gaussian { epsilon, beta, .. } => {
                if (*epsilon != 1 && *epsilon != -1) || (*beta != 1 && *beta != 2) {
                    return invalid("Gaussian letters need ε = ±1 and β ∈ {1, 2}");
                }
                gauss.push(j + 1);
                mats.push(&ones);
            }
        }
    }
    let params = |col: usize| match &slots[col - 1] {
        Slot::Gaussian { source, epsilon, beta, variance } => (*source, *epsilon, *beta, variance),
        Slot::Fixed(_) => unreachable!("only Gaussian slots are paired"),
    };
    let k = p.k();
    let mut total = Q::zero();
    for pi in two_species_pairings(gauss.len(), 1)? {
        let mut c = Q::one();
        for &(i, j, sp) in pi.pairs() {
            let (a, b) = (gauss[i - 1], gauss[j - 1]);
            let (src_a, eps, beta, var) = params(a);
            if src_a != params(b).0 {
                c = Q::zero();
                break;
            }
            match sp {
                Species::T => c *= var * qi(eps as i64),
                Species::W => c *= var * qi(2 - beta as i64),
            }
        }
        if c.is_zero() {
            continue;
        }
        // Singletons on deterministic columns, the b_π blocks on Gaussian ones.
        let slot = |pt: Point| 2 * (pt.col - 1) + pt.primed as usize;
        let mut key: Vec<usize> = (0..2 * k).map(|x| 2 * k + x).collect();
        for (b, &(i, j, sp)) in pi.pairs().iter().enumerate() {
            let (a, bcol) = (gauss[i - 1], gauss[j - 1]);
            let (x, y) = match sp {
                Species::T => ((Point::top(a), Point::bottom(bcol)), (Point::top(bcol), Point::bottom(a))),
                Species::W => ((Point::top(a), Point::top(bcol)), (Point::bottom(a), Point::bottom(bcol))),
            };
            key[slot(x.0)] = 2 * b;
            key[slot(x.1)] = 2 * b;
            key[slot(y.0)] = 2 * b + 1;
            key[slot(y.1)] = 2 * b + 1;
        }
        let merged = p.join(&Partition::from_fn(k, |pt| key[slot(pt)]))?;
        total += c * block_sum(&merged, &mats, budget)?;
    }
    Ok(total)
}
