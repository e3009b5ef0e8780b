//! `p`-moments, exclusive moments and finite-dimensional cumulants of
//! concrete matrix families.
//!
//! Everything is computed from trace pairings
//! `t_p = Tr[(M_1 ⊗ … ⊗ M_k) ρ_N(ᵗp)] = Σ_{assignments to blocks of p} Π_j (M_j)_{i_j, i_j'}`,
//! so `m_p = N^{−cycles(p)} t_p` and `ρ_N` is never materialized. Conjugating
//! the tensor by `g^{⊗k}` leaves every `t_p` unchanged because `ρ_N(p)`
//! commutes with the tensor action, so invariant families need no Haar
//! averaging before the Gram solve.

use std::collections::BTreeMap;
use std::ops::{AddAssign, Mul};

use num_traits::{One, ToPrimitive, Zero};
use partlab_core::npoly::{qi, qpow};
use partlab_core::table::Label;
use partlab_core::{enumerate_family, gram_solve, FamilyTag, Partition, Point, Q};

use crate::ensemble::{sample_kind, Kind, Law};
use crate::error::{invalid, Error, Result};
use crate::estimate::{run_samples, sample_rng, ComplexEstimate, Estimate, McConfig};
use crate::matrix::{CMatrix, Matrix, QMatrix, C64};

/// Default cap on the number of elementary operations of one evaluation.
pub const DEFAULT_BUDGET: u128 = 4_000_000_000;

/// Scalars the block sums run over.
pub trait Scalar: Clone + Zero + One + for<'a> Mul<&'a Self, Output = Self> + for<'a> AddAssign<&'a Self> {}
impl<T> Scalar for T where T: Clone + Zero + One + for<'a> Mul<&'a T, Output = T> + for<'a> AddAssign<&'a T> {}

fn check_budget(what: &str, needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        return Err(Error::Budget { what: what.to_string(), needed, budget });
    }
    Ok(())
}

fn block_sum_cost(p: &Partition, n: usize) -> u128 {
    (n as u128).saturating_pow(p.nc() as u32).saturating_mul(p.k().max(1) as u128)
}

fn check_shapes<T: Clone + Zero>(p: &Partition, mats: &[&Matrix<T>]) -> Result<usize> {
    if mats.len() != p.k() {
        return invalid(format!("word has {} letters, partition has k = {}", mats.len(), p.k()));
    }
    let n = mats.first().map_or(1, |m| m.n());
    if mats.iter().any(|m| m.n() != n) {
        return invalid("matrices of different sizes");
    }
    Ok(n)
}

fn sum_over_assignments<T: Scalar>(p: &Partition, mats: &[&Matrix<T>], injective: bool) -> T {
    let k = p.k();
    let nc = p.nc();
    let n = mats.first().map_or(1, |m| m.n());
    let top: Vec<usize> = (1..=k).map(|c| p.block_of(Point::top(c))).collect();
    let bot: Vec<usize> = (1..=k).map(|c| p.block_of(Point::bottom(c))).collect();
    if k == 0 {
        return T::one();
    }
    if injective && nc > n {
        return T::zero();
    }
    let mut vals = vec![0usize; nc];
    let mut total = T::zero();
    loop {
        let distinct = !injective || {
            let mut seen = vec![false; n];
            vals.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        };
        if distinct {
            let mut prod = mats[0].get(vals[top[0]], vals[bot[0]]).clone();
            for j in 1..k {
                prod = prod * mats[j].get(vals[top[j]], vals[bot[j]]);
            }
            total += &prod;
        }
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

/// `t_p = Σ_{assignments to the blocks of p} Π_j (M_j)_{i_j, i_j'}`.
pub fn block_sum<T: Scalar>(p: &Partition, mats: &[&Matrix<T>], budget: u128) -> Result<T> {
    let n = check_shapes(p, mats)?;
    check_budget("block sum", block_sum_cost(p, n), budget)?;
    Ok(sum_over_assignments(p, mats, false))
}

/// The same sum restricted to assignments with distinct values per block.
pub fn exclusive_block_sum<T: Scalar>(p: &Partition, mats: &[&Matrix<T>], budget: u128) -> Result<T> {
    let n = check_shapes(p, mats)?;
    if p.nc() > n {
        return invalid(format!("nc(p) = {} exceeds N = {n}", p.nc()));
    }
    check_budget("exclusive block sum", block_sum_cost(p, n), budget)?;
    Ok(sum_over_assignments(p, mats, true))
}

/// Columns of each cycle of a permutation partition, in product order: the
/// column after `j` is the one whose top point meets the bottom point of `j`.
pub fn cycle_order(p: &Partition) -> Option<Vec<Vec<usize>>> {
    p.as_permutation()?;
    let k = p.k();
    let mut next = vec![0usize; k + 1];
    for j in 1..=k {
        let b = p.block_of(Point::bottom(j));
        next[j] = (1..=k).find(|&c| p.block_of(Point::top(c)) == b)?;
    }
    let mut seen = vec![false; k + 1];
    let mut out = Vec::new();
    for start in 1..=k {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            cyc.push(j);
            j = next[j];
        }
        out.push(cyc);
    }
    Some(out)
}

/// `t_σ = Π_cycles Tr(M_{c_1} M_{c_2} ⋯)` for a permutation partition.
fn permutation_trace_c(p: &Partition, mats: &[&CMatrix]) -> Option<C64> {
    let cycles = cycle_order(p)?;
    let mut total = C64::one();
    for cyc in cycles {
        let tr = match cyc.len() {
            1 => mats[cyc[0] - 1].trace(),
            _ => {
                let mut acc = mats[cyc[0] - 1].clone();
                for &c in &cyc[1..cyc.len() - 1] {
                    acc = acc.mul(mats[c - 1]);
                }
                acc.trace_product(mats[cyc[cyc.len() - 1] - 1])
            }
        };
        total *= tr;
    }
    Some(total)
}

fn permutation_trace_q(p: &Partition, mats: &[&QMatrix]) -> Option<Q> {
    let cycles = cycle_order(p)?;
    let mut total = Q::one();
    for cyc in cycles {
        let mut acc = mats[cyc[0] - 1].clone();
        for &c in &cyc[1..] {
            acc = acc.mul_naive(mats[c - 1]);
        }
        total *= acc.trace();
    }
    Some(total)
}

/// `t_p` for complex matrices, through matrix products when `p` is a permutation.
pub fn trace_pairing_c(p: &Partition, mats: &[&CMatrix], budget: u128) -> Result<C64> {
    let n = check_shapes(p, mats)?;
    if p.as_permutation().is_some() {
        check_budget("trace product", (p.k() as u128) * (n as u128).pow(3), budget)?;
        return Ok(permutation_trace_c(p, mats).expect("permutation"));
    }
    block_sum(p, mats, budget)
}

/// `t_p` for exact matrices.
pub fn trace_pairing_q(p: &Partition, mats: &[&QMatrix], budget: u128) -> Result<Q> {
    let n = check_shapes(p, mats)?;
    if p.as_permutation().is_some() {
        check_budget("trace product", (p.k() as u128) * (n as u128).pow(3), budget)?;
        return Ok(permutation_trace_q(p, mats).expect("permutation"));
    }
    block_sum(p, mats, budget)
}

fn n_pow(n: usize, e: i64) -> Q {
    qpow(&qi(n as i64), e as i32)
}

/// One letter of a [`MatrixFamily`].
#[derive(Clone, Debug, PartialEq)]
pub enum Entry {
    /// A deterministic matrix with exact entries.
    Exact(QMatrix),
    /// A deterministic floating-point matrix.
    Fixed(CMatrix),
    /// A random matrix, redrawn for every sample.
    Random(Kind),
}

/// Labeled `N × N` matrices sharing one sample stream.
#[derive(Clone, Debug)]
pub struct MatrixFamily {
    n: usize,
    seed: u64,
    budget: u128,
    entries: BTreeMap<Label, Entry>,
}

impl MatrixFamily {
    pub fn new(n: usize, seed: u64) -> Self {
        MatrixFamily { n, seed, budget: DEFAULT_BUDGET, entries: BTreeMap::new() }
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn insert(&mut self, label: &str, entry: Entry) -> Result<()> {
        let n = match &entry {
            Entry::Exact(m) => m.n(),
            Entry::Fixed(m) => m.n(),
            Entry::Random(k) => {
                k.validate()?;
                self.n
            }
        };
        if n != self.n {
            return invalid(format!("{label}: matrix is {n}×{n}, family has N = {}", self.n));
        }
        if self.entries.insert(label.to_string(), entry).is_some() {
            return invalid(format!("duplicate label {label:?}"));
        }
        Ok(())
    }

    pub fn with(mut self, label: &str, entry: Entry) -> Result<Self> {
        self.insert(label, entry)?;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn budget(&self) -> u128 {
        self.budget
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.entries.keys()
    }

    fn entry(&self, l: &str) -> Result<&Entry> {
        self.entries.get(l).ok_or_else(|| Error::UnknownLabel(l.to_string()))
    }

    pub fn is_exact(&self) -> bool {
        self.entries.values().all(|e| matches!(e, Entry::Exact(_)))
    }

    /// The exact matrices of `word`.
    pub fn exact_word(&self, word: &[Label]) -> Result<Vec<&QMatrix>> {
        word.iter()
            .map(|l| match self.entry(l)? {
                Entry::Exact(m) => Ok(m),
                _ => invalid(format!("{l}: exact mode needs an exact deterministic matrix")),
            })
            .collect()
    }

    /// Draws sample `index` of every letter, in label order.
    pub fn sample(&self, index: u64) -> Result<BTreeMap<Label, CMatrix>> {
        self.sample_with_seed(self.seed, index)
    }

    /// Sample `index` of the stream of `seed` instead of the family's own.
    pub fn sample_with_seed(&self, seed: u64, index: u64) -> Result<BTreeMap<Label, CMatrix>> {
        let mut rng = sample_rng(seed, index);
        self.entries
            .iter()
            .map(|(l, e)| {
                let m = match e {
                    Entry::Exact(m) => m.to_complex(),
                    Entry::Fixed(m) => m.clone(),
                    Entry::Random(kind) => sample_kind(kind, self.n, &mut rng)?,
                };
                Ok((l.clone(), m))
            })
            .collect()
    }

    fn check_word(&self, p: &Partition, word: &[Label]) -> Result<()> {
        if word.len() != p.k() {
            return invalid(format!("word has {} letters, partition has k = {}", word.len(), p.k()));
        }
        for l in word {
            self.entry(l)?;
        }
        Ok(())
    }
}

/// Exact evaluation or Monte Carlo.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Mc(McConfig),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Q),
    Mc(ComplexEstimate),
}

impl Value {
    pub fn exact(&self) -> Option<&Q> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Mc(_) => None,
        }
    }

    pub fn estimate(&self) -> Option<&ComplexEstimate> {
        match self {
            Value::Exact(_) => None,
            Value::Mc(e) => Some(e),
        }
    }
}

fn word_refs<'a>(sample: &'a BTreeMap<Label, CMatrix>, word: &[Label]) -> Vec<&'a CMatrix> {
    word.iter().map(|l| &sample[l]).collect()
}

/// Monte Carlo estimates of a statistic of the word matrices, one value per sample.
pub fn mc_word<F>(family: &MatrixFamily, word: &[Label], cfg: &McConfig, f: F) -> Result<Vec<C64>>
where
    F: Fn(&[&CMatrix]) -> Result<C64> + Sync,
{
    for l in word {
        family.entry(l)?;
    }
    let fam = MatrixFamily { seed: cfg.seed, ..family.clone() };
    run_samples(cfg, |_, s| {
        let sample = fam.sample(s)?;
        f(&word_refs(&sample, word))
    })
}

fn to_estimate(values: &[C64]) -> ComplexEstimate {
    let mut e = ComplexEstimate::default();
    values.iter().for_each(|z| e.push(*z));
    e
}

/// `m_p(M_{w_1}, …, M_{w_k}) = N^{−cycles(p)} t_p`.
pub fn p_moment(family: &MatrixFamily, p: &Partition, word: &[Label], mode: Mode) -> Result<Value> {
    family.check_word(p, word)?;
    let scale = n_pow(family.n, -(p.cycles() as i64));
    match mode {
        Mode::Exact => {
            let mats = family.exact_word(word)?;
            Ok(Value::Exact(trace_pairing_q(p, &mats, family.budget)? * scale))
        }
        Mode::Mc(cfg) => {
            let s = scale.to_f64().unwrap_or(f64::NAN);
            let vals = mc_word(family, word, &cfg, |m| Ok(trace_pairing_c(p, m, family.budget)? * s))?;
            Ok(Value::Mc(to_estimate(&vals)))
        }
    }
}

/// `m_{p^c} = N^{−cycles(p)} Σ_{injective assignments} Π_j (M_j)_{i_j, i_j'}`.
pub fn exclusive_moment(family: &MatrixFamily, p: &Partition, word: &[Label], mode: Mode) -> Result<Value> {
    family.check_word(p, word)?;
    if p.nc() > family.n {
        return invalid(format!("nc(p) = {} exceeds N = {}", p.nc(), family.n));
    }
    let scale = n_pow(family.n, -(p.cycles() as i64));
    match mode {
        Mode::Exact => {
            let mats = family.exact_word(word)?;
            Ok(Value::Exact(exclusive_block_sum(p, &mats, family.budget)? * scale))
        }
        Mode::Mc(cfg) => {
            let s = scale.to_f64().unwrap_or(f64::NAN);
            let vals = mc_word(family, word, &cfg, |m| Ok(exclusive_block_sum(p, m, family.budget)? * s))?;
            Ok(Value::Mc(to_estimate(&vals)))
        }
    }
}

fn check_gram_size(k: usize, n: usize) -> Result<()> {
    if n < 2 * k {
        return invalid(format!("finite cumulants need N ≥ 2k (N = {n}, k = {k})"));
    }
    Ok(())
}

/// Cumulants from trace pairings: `Σ_p c_p N^{nc(p ∨ p')} = t_{p'}`, then
/// `κ_p = c_p N^{nc(p) − cycles(p)}`.
pub fn cumulants_from_traces(
    k: usize,
    tag: FamilyTag,
    traces: &BTreeMap<Partition, Q>,
    n: usize,
) -> Result<BTreeMap<Partition, Q>> {
    let c = gram_solve(k, tag, traces, n as u64)?;
    Ok(c.into_iter()
        .map(|(p, v)| {
            let e = p.nc() as i64 - p.cycles() as i64;
            let kappa = v * n_pow(n, e);
            (p, kappa)
        })
        .collect())
}

/// Exact finite-dimensional `A`-cumulants of a deterministic word.
pub fn finite_cumulants(family: &MatrixFamily, k: usize, tag: FamilyTag, word: &[Label]) -> Result<BTreeMap<Partition, Q>> {
    check_gram_size(k, family.n)?;
    let mats = family.exact_word(word)?;
    if mats.len() != k {
        return invalid(format!("word has {} letters, k = {k}", mats.len()));
    }
    let mut traces = BTreeMap::new();
    for p in enumerate_family(k, tag)? {
        let t = trace_pairing_q(&p, &mats, family.budget)?;
        traces.insert(p, t);
    }
    cumulants_from_traces(k, tag, &traces, family.n)
}

/// Rows of the linear map from trace pairings to cumulants, in family order.
pub fn cumulant_map(k: usize, tag: FamilyTag, n: usize) -> Result<(Vec<Partition>, Vec<Vec<f64>>)> {
    check_gram_size(k, n)?;
    let fam = enumerate_family(k, tag)?;
    let mut rows = Vec::with_capacity(fam.len());
    // G is symmetric, so row p of G^{-1} solves G x = e_p.
    for p in &fam {
        let unit: BTreeMap<Partition, Q> =
            fam.iter().map(|q| (q.clone(), if q == p { Q::one() } else { Q::zero() })).collect();
        let x = gram_solve(k, tag, &unit, n as u64)?;
        let scale = n_pow(n, p.nc() as i64 - p.cycles() as i64);
        rows.push(fam.iter().map(|q| (&x[q] * &scale).to_f64().unwrap_or(f64::NAN)).collect());
    }
    Ok((fam, rows))
}

/// Monte Carlo finite-dimensional cumulants, estimated per partition.
pub fn finite_cumulants_mc(
    family: &MatrixFamily,
    k: usize,
    tag: FamilyTag,
    word: &[Label],
    cfg: &McConfig,
) -> Result<BTreeMap<Partition, ComplexEstimate>> {
    let (fam, rows) = cumulant_map(k, tag, family.n)?;
    for l in word {
        family.entry(l)?;
    }
    if word.len() != k {
        return invalid(format!("word has {} letters, k = {k}", word.len()));
    }
    let sampler = MatrixFamily { seed: cfg.seed, ..family.clone() };
    let per_sample: Vec<Vec<C64>> = run_samples(cfg, |_, s| {
        let sample = sampler.sample(s)?;
        let mats = word_refs(&sample, word);
        let t: Vec<C64> = fam.iter().map(|q| trace_pairing_c(q, &mats, family.budget)).collect::<Result<_>>()?;
        Ok(rows.iter().map(|r| r.iter().zip(&t).map(|(a, b)| b * a).sum()).collect())
    })?;
    Ok(fam
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut e = ComplexEstimate::default();
            per_sample.iter().for_each(|v| e.push(v[i]));
            (p, e)
        })
        .collect())
}

/// `E[(M_1)_{n_1 n_1'} ⋯ (M_k)_{n_k n_k'}] = Σ_{p ∈ A_k, p ⊴ Ker(n)} N^{−(nc(p) − cycles(p))} κ_p`.
pub fn entry_moment_prediction(
    kappa: &BTreeMap<Partition, Q>,
    tag: FamilyTag,
    tuple: &[u64],
    n: usize,
) -> Result<Q> {
    let ker = Partition::kernel(tuple)?;
    let mut total = Q::zero();
    for p in enumerate_family(ker.k(), tag)? {
        if !p.is_finer_than(&ker) {
            continue;
        }
        let v = kappa
            .get(&p)
            .ok_or_else(|| Error::Core(partlab_core::Error::MissingEntry(format!("κ at {p}"))))?;
        total += v * n_pow(n, -(p.nc() as i64 - p.cycles() as i64));
    }
    Ok(total)
}

/// Set partitions of `0..n` as block lists.
fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::<Vec<usize>>::new()];
    for i in 0..n {
        let mut next = Vec::new();
        for part in &out {
            for b in 0..part.len() {
                let mut q = part.clone();
                q[b].push(i);
                next.push(q);
            }
            let mut q = part.clone();
            q.push(vec![i]);
            next.push(q);
        }
        out = next;
    }
    out
}

/// `E[t_p]` for `D = diag(X_1, …, X_l)` with iid entries of the given moments:
/// indices are constant on cycles, so the sum runs over groupings of cycles.
pub fn diagonal_iid_trace(p: &Partition, moments: &[Q], l: usize) -> Result<Q> {
    let lens: Vec<usize> = p.cycle_columns().iter().map(Vec::len).collect();
    if lens.iter().sum::<usize>() > moments.len() {
        return invalid(format!("law needs {} moments, {} given", p.k(), moments.len()));
    }
    let mut total = Q::zero();
    for part in set_partitions(lens.len()) {
        if part.len() > l {
            continue;
        }
        let falling = (0..part.len()).fold(Q::one(), |acc, j| acc * qi((l - j) as i64));
        let prod = part.iter().fold(Q::one(), |acc, g| {
            let m: usize = g.iter().map(|&c| lens[c]).sum();
            acc * &moments[m - 1]
        });
        total += falling * prod;
    }
    Ok(total)
}

/// `κ_{0_k}` of the expected tensor of an iid diagonal family at `N = l`.
pub fn classical_bridge(moments: &[Q], k: usize, l: usize) -> Result<Q> {
    if l < 2 * k {
        return invalid(format!("the Gram matrix of P_{k} is singular below N = 2k (l = {l})"));
    }
    if moments.len() < k {
        return invalid(format!("law needs {k} moments, {} given", moments.len()));
    }
    let mut traces = BTreeMap::new();
    for p in enumerate_family(k, FamilyTag::P)? {
        let t = diagonal_iid_trace(&p, moments, l)?;
        traces.insert(p, t);
    }
    let c = gram_solve(k, FamilyTag::P, &traces, l as u64)?;
    // nc(0_k) = cycles(0_k) = 1, so κ_{0_k} = c_{0_k}.
    Ok(c[&Partition::zero(k)].clone())
}

/// Monte Carlo version of [`classical_bridge`] from sampled diagonals.
pub fn classical_bridge_mc(law: &Law, k: usize, l: usize, cfg: &McConfig) -> Result<Estimate> {
    if l < 2 * k {
        return invalid(format!("the Gram matrix of P_{k} is singular below N = 2k (l = {l})"));
    }
    let fam = enumerate_family(k, FamilyTag::P)?;
    let zero = Partition::zero(k);
    let unit: BTreeMap<Partition, Q> =
        fam.iter().map(|q| (q.clone(), if *q == zero { Q::one() } else { Q::zero() })).collect();
    let x = gram_solve(k, FamilyTag::P, &unit, l as u64)?;
    let weights: Vec<(Vec<usize>, f64)> = fam
        .iter()
        .map(|q| {
            let lens = q.cycle_columns().iter().map(Vec::len).collect();
            (lens, x[q].to_f64().unwrap_or(f64::NAN))
        })
        .collect();
    let vals = run_samples(cfg, |rng, _| {
        let d: Vec<f64> = (0..l).map(|_| law.sample(rng)).collect();
        let power: Vec<f64> = (0..=k).map(|m| d.iter().map(|x| x.powi(m as i32)).sum()).collect();
        Ok(weights.iter().map(|(lens, w)| w * lens.iter().map(|&m| power[m]).product::<f64>()).sum())
    })?;
    Ok(Estimate::from_samples(vals))
}

/// Classical cumulants `c_1..c_k` from moments by
/// `m_n = Σ_{j=1}^{n} C(n−1, j−1) c_j m_{n−j}`.
pub fn classical_cumulants(moments: &[Q]) -> Vec<Q> {
    let k = moments.len();
    let m = |j: usize| if j == 0 { Q::one() } else { moments[j - 1].clone() };
    let mut c: Vec<Q> = Vec::with_capacity(k);
    for n in 1..=k {
        let mut rest = Q::zero();
        let mut binom = Q::one();
        for j in 1..n {
            rest += &binom * &c[j - 1] * m(n - j);
            binom = binom * qi((n - j) as i64) / qi(j as i64);
        }
        c.push(m(n) - rest);
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use partlab_core::npoly::q;
    use partlab_core::table::word;

    fn qm(rows: &[&[i64]]) -> QMatrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()).unwrap()
    }

    fn family_of(label: &str, m: QMatrix) -> MatrixFamily {
        MatrixFamily::new(m.n(), 0).with(label, Entry::Exact(m)).unwrap()
    }

    #[test]
    fn moment_examples() {
        let n = 3;
        let id = family_of("i", QMatrix::identity(n));
        let id1 = Partition::identity(1);
        assert_eq!(p_moment(&id, &id1, &word(&["i"]), Mode::Exact).unwrap(), Value::Exact(qi(1)));
        let d = family_of("m", qm(&[&[1, 0], &[0, 2]]));
        let t = Partition::transposition(2, 1, 2).unwrap();
        assert_eq!(p_moment(&d, &t, &word(&["m", "m"]), Mode::Exact).unwrap(), Value::Exact(q(5, 2)));
        let a = family_of("m", qm(&[&[1, 2], &[-3, 4]]));
        let w = Partition::weyl(2, 1, 2).unwrap();
        // (1/N) Σ_{a,b} M_ab².
        assert_eq!(p_moment(&a, &w, &word(&["m", "m"]), Mode::Exact).unwrap(), Value::Exact(q(30, 2)));
    }

    #[test]
    fn exclusive_examples() {
        let id = family_of("i", QMatrix::identity(4));
        let w = word(&["i"]);
        let ones = Partition::singletons(1);
        let id1 = Partition::identity(1);
        assert_eq!(exclusive_moment(&id, &ones, &w, Mode::Exact).unwrap(), Value::Exact(qi(0)));
        assert_eq!(exclusive_moment(&id, &id1, &w, Mode::Exact).unwrap(), Value::Exact(qi(1)));
        let small = family_of("i", QMatrix::identity(1));
        assert!(exclusive_moment(&small, &ones, &w, Mode::Exact).is_err());
    }

    #[test]
    fn cumulants_of_identity_and_j() {
        let n = 4;
        let id = family_of("i", QMatrix::identity(n));
        let k = finite_cumulants(&id, 1, FamilyTag::P, &word(&["i"])).unwrap();
        assert_eq!(k[&Partition::identity(1)], qi(1));
        assert_eq!(k[&Partition::singletons(1)], qi(0));
        let j = family_of("j", crate::matrix::j_matrix_q(n));
        let k = finite_cumulants(&j, 1, FamilyTag::P, &word(&["j"])).unwrap();
        assert_eq!(k[&Partition::identity(1)], qi(0));
        assert_eq!(k[&Partition::singletons(1)], qi(1));
        assert!(finite_cumulants(&family_of("j", crate::matrix::j_matrix_q(1)), 1, FamilyTag::P, &word(&["j"])).is_err());
    }

    #[test]
    fn entry_predictions_for_j_and_identity() {
        for n in [4usize, 8] {
            let j = family_of("j", crate::matrix::j_matrix_q(n));
            let k = finite_cumulants(&j, 1, FamilyTag::P, &word(&["j"])).unwrap();
            assert_eq!(entry_moment_prediction(&k, FamilyTag::P, &[1, 1], n).unwrap(), q(1, n as i64));
            assert_eq!(entry_moment_prediction(&k, FamilyTag::P, &[1, 2], n).unwrap(), q(1, n as i64));
            let id = family_of("i", QMatrix::identity(n));
            let k = finite_cumulants(&id, 1, FamilyTag::P, &word(&["i"])).unwrap();
            assert_eq!(entry_moment_prediction(&k, FamilyTag::P, &[1, 1], n).unwrap(), qi(1));
            assert_eq!(entry_moment_prediction(&k, FamilyTag::P, &[1, 2], n).unwrap(), qi(0));
        }
    }

    #[test]
    fn budget_guard() {
        let f = MatrixFamily::new(3, 0).with("i", Entry::Exact(QMatrix::identity(3))).unwrap().with_budget(10);
        let p = Partition::singletons(2);
        let err = p_moment(&f, &p, &word(&["i", "i"]), Mode::Exact).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn bridge_small_cases() {
        let bern = vec![q(1, 2); 4];
        assert_eq!(classical_bridge(&bern, 2, 4).unwrap(), q(1, 4));
        assert_eq!(classical_bridge(&bern, 3, 6).unwrap(), qi(0));
        let constant = vec![qi(3), qi(9), qi(27)];
        assert_eq!(classical_bridge(&constant, 2, 4).unwrap(), qi(0));
        assert_eq!(classical_bridge(&constant, 3, 7).unwrap(), qi(0));
        assert!(classical_bridge(&bern, 3, 5).is_err());
    }

    #[test]
    fn cycle_order_of_a_three_cycle() {
        let c = Partition::cycle(3);
        let order = cycle_order(&c).unwrap();
        assert_eq!(order.len(), 1);
        assert_eq!(order[0].len(), 3);
        assert!(cycle_order(&Partition::zero(2)).is_none());
    }
}
