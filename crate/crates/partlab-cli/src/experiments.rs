//! The numerical experiments shared by `simulate` and `verify`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, ToPrimitive, Zero};
use partlab::ensemble::{sample_kind, Field, Kind};
use partlab::estimate::{run_range, sample_rng, Estimate, McConfig};
use partlab::moments::{cumulant_map, trace_pairing_c, DEFAULT_BUDGET};
use partlab::process::{gaussian_approximant, unitary_bm_path, ApproxClass};
use partlab::wick::{expected_trace_pairing, wick_tensor, Slot};
use partlab::{CMatrix, QMatrix, C64};
use partlab_core::free::free_sum;
use partlab_core::freeness::freeness_check;
use partlab_core::npoly::{q, qi, qpow};
use partlab_core::spectral::{exp_boxplus, r_transform};
use partlab_core::table::{constant_word, CumulantTable, Label};
use partlab_core::transform::{cumulants_to_moments, Lattice};
use partlab_core::{enumerate_family, FamilyTag, Partition, Point, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

/// `Tr X^j` for `j = 1..=kmax`, using `Tr X^{a+b} = Tr(X^a X^b)`.
pub fn power_traces(x: &CMatrix, kmax: usize) -> Vec<C64> {
    let half = kmax.div_ceil(2).max(1);
    let mut pows = vec![x.clone()];
    while pows.len() < half {
        let next = pows.last().unwrap().mul(x);
        pows.push(next);
    }
    (1..=kmax)
        .map(|j| {
            if j <= half {
                pows[j - 1].trace()
            } else {
                pows[half - 1].trace_product(&pows[j - half - 1])
            }
        })
        .collect()
}

/// `Re m_{(1..k)} = Re Tr(X^k)/N`, `k = 1..=kmax`, over samples of `kind`.
pub fn cycle_moments_mc(kind: &Kind, n: usize, kmax: usize, cfg: &McConfig) -> Result<Vec<Estimate>> {
    cfg.validate()?;
    let rows = run_range(cfg, 0..cfg.samples, |rng, _| {
        let x = sample_kind(kind, n, rng)?;
        Ok(power_traces(&x, kmax).into_iter().map(|z| z.re / n as f64).collect::<Vec<f64>>())
    })?;
    Ok(columns(&rows, kmax))
}

fn columns(rows: &[Vec<f64>], width: usize) -> Vec<Estimate> {
    (0..width).map(|j| Estimate::from_samples(rows.iter().map(|r| r[j]))).collect()
}

/// `Re Tr(U_t^k)/N` along unitary Brownian paths: one entry per checkpoint,
/// each holding `k = 1..=kmax`.
pub fn unitary_bm_mc(
    n: usize,
    field: Field,
    t: f64,
    steps: usize,
    checkpoints: &[usize],
    kmax: usize,
    cfg: &McConfig,
) -> Result<Vec<Vec<Estimate>>> {
    cfg.validate()?;
    let rows = run_range(cfg, 0..cfg.samples, |rng, _| {
        let path = unitary_bm_path(n, field, t, steps, checkpoints, rng)?;
        Ok(path
            .iter()
            .flat_map(|u| power_traces(u, kmax).into_iter().map(|z| z.re / n as f64))
            .collect::<Vec<f64>>())
    })?;
    let flat = columns(&rows, kmax * checkpoints.len());
    Ok(flat.chunks(kmax).map(|c| c.to_vec()).collect())
}

/// The worst entry of a Monte Carlo tensor against its prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorCheck {
    /// `max |mean − prediction| / stderr` over entries.
    pub max_ratio: f64,
    /// Index values `(i_1, i_1', …, i_k, i_k')` of the worst entry.
    pub worst: Vec<u64>,
    pub estimate: C64,
    pub prediction: f64,
    pub stderr: f64,
    pub entries: usize,
}

const TENSOR_CAP: usize = 1 << 20;
const WICK_CHUNK: u64 = 4000;

/// `E[M^{⊗k}]` of a Gaussian ensemble by the pairing sum, entry by entry in
/// the digit order `(i_1, i_1', …, i_k, i_k')`, first digit most significant.
pub fn wick_prediction(field: Field, n: usize, k: usize) -> Result<Vec<f64>> {
    let size = tensor_size(n, k)?;
    let beta = if field == Field::Complex { 2 } else { 1 };
    let cov = vec![vec![q(1, n as i64); k]; k];
    let synth = wick_tensor(k, 1, beta, &cov)?;
    let terms: Vec<(Partition, f64)> = synth
        .terms()
        .map(|(p, c)| (p.clone(), c.eval(n as u64).to_f64().unwrap_or(f64::NAN)))
        .collect();
    let mut out = vec![0.0; size];
    let mut tuple = vec![0u64; 2 * k];
    for (e, slot) in out.iter_mut().enumerate() {
        digits(e, n, &mut tuple);
        let ker = Partition::kernel(&tuple)?;
        *slot = terms.iter().filter(|(p, _)| p.is_finer_than(&ker)).map(|(_, c)| c).sum();
    }
    Ok(out)
}

fn tensor_size(n: usize, k: usize) -> Result<usize> {
    match n.checked_pow(2 * k as u32) {
        Some(s) if s <= TENSOR_CAP => Ok(s),
        _ => Err(partlab::Error::Budget {
            what: "entry tensor".into(),
            needed: (n as u128).saturating_pow(2 * k as u32),
            budget: TENSOR_CAP as u128,
        }
        .into()),
    }
}

fn digits(mut e: usize, n: usize, out: &mut [u64]) {
    for d in out.iter_mut().rev() {
        *d = (e % n) as u64;
        e /= n;
    }
}

/// Mean of `M^{⊗k}` over samples of a Gaussian ensemble against the pairing
/// sum. Sums are reduced chunk by chunk in index order.
pub fn wick_mc(field: Field, n: usize, k: usize, cfg: &McConfig) -> Result<TensorCheck> {
    cfg.validate()?;
    let size = tensor_size(n, k)?;
    let prediction = wick_prediction(field, n, k)?;
    let kind = if field == Field::Complex { Kind::Gue } else { Kind::Goe };
    let chunks = cfg.samples.div_ceil(WICK_CHUNK);
    let chunk_cfg = McConfig { samples: chunks, ..*cfg };
    let partial = run_range(&chunk_cfg, 0..chunks, |_, c| {
        let mut acc = vec![[0.0f64; 4]; size];
        let mut tensor = vec![C64::zero(); size];
        let end = ((c + 1) * WICK_CHUNK).min(cfg.samples);
        for s in c * WICK_CHUNK..end {
            let m = sample_kind(&kind, n, &mut sample_rng(cfg.seed, s))?;
            kron_power(m.data(), k, &mut tensor);
            for (a, z) in acc.iter_mut().zip(&tensor) {
                a[0] += z.re;
                a[1] += z.im;
                a[2] += z.re * z.re;
                a[3] += z.im * z.im;
            }
        }
        Ok(acc)
    })?;
    let mut total = vec![[0.0f64; 4]; size];
    for part in partial {
        for (t, a) in total.iter_mut().zip(part) {
            for i in 0..4 {
                t[i] += a[i];
            }
        }
    }
    let s = cfg.samples as f64;
    let se = |sum: f64, sumsq: f64| -> f64 {
        if cfg.samples < 2 {
            return f64::NAN;
        }
        (((sumsq - sum * sum / s) / (s - 1.0)).max(0.0) / s).sqrt()
    };
    let mut best = TensorCheck {
        max_ratio: -1.0,
        worst: Vec::new(),
        estimate: C64::zero(),
        prediction: 0.0,
        stderr: 0.0,
        entries: size,
    };
    let mut tuple = vec![0u64; 2 * k];
    for (e, a) in total.iter().enumerate() {
        let mean = C64::new(a[0] / s, a[1] / s);
        let err = se(a[0], a[2]).hypot(se(a[1], a[3]));
        let dev = (mean - prediction[e]).norm();
        let ratio = if err > 0.0 {
            dev / err
        } else if dev < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        if ratio > best.max_ratio {
            digits(e, n, &mut tuple);
            best = TensorCheck {
                max_ratio: ratio,
                worst: tuple.clone(),
                estimate: mean,
                prediction: prediction[e],
                stderr: err,
                entries: size,
            };
        }
    }
    Ok(best)
}

/// `entries^{⊗k}` of a row-major matrix: index `(e_1, …, e_k)` in base `n²`.
fn kron_power(entries: &[C64], k: usize, out: &mut [C64]) {
    let m = entries.len();
    out[..m].copy_from_slice(entries);
    let mut len = m;
    for _ in 1..k {
        for i in (0..len).rev() {
            let x = out[i];
            for (j, y) in entries.iter().enumerate() {
                out[i * m + j] = x * y;
            }
        }
        len *= m;
    }
}

/// Mixed `S`-cumulants of `(a, D, a, D)` with `a` GUE of variance `1/N` and
/// `D` diagonal with the entries of `pattern` repeated, two ways: the
/// finite-dimensional (Gram) cumulants and the lattice cumulants of the
/// finite-N moment table.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedCumulants {
    pub n: usize,
    /// `max |κ_σ|` of the Gram cumulants over permutations with a cycle
    /// meeting both letters.
    pub gram_max: f64,
    /// The same maximum for the lattice cumulants, and where it is attained.
    pub lattice_max: f64,
    pub argmax: Partition,
}

fn mixes(p: &Partition, is_a: &[bool]) -> bool {
    p.cycle_columns().iter().any(|c| {
        let a = c.iter().filter(|&&col| is_a[col - 1]).count();
        a > 0 && a < c.len()
    })
}

pub fn mixed_cumulants(n: usize, pattern: &[Q]) -> Result<MixedCumulants> {
    if pattern.is_empty() {
        return Err(CliError::Input("empty diagonal pattern".into()));
    }
    let d: QMatrix = QMatrix::diagonal(&(0..n).map(|i| pattern[i % pattern.len()].clone()).collect::<Vec<_>>());
    let g = Slot::Gaussian { source: 0, epsilon: 1, beta: 2, variance: q(1, n as i64) };
    let slots = [g.clone(), Slot::Fixed(&d), g, Slot::Fixed(&d)];
    let fam = enumerate_family(4, FamilyTag::S)?;
    let mut traces = BTreeMap::new();
    let mut moments = Vec::with_capacity(fam.len());
    for s in &fam {
        let t = expected_trace_pairing(s, &slots, n, DEFAULT_BUDGET)?;
        moments.push(&t / qpow(&qi(n as i64), s.cycles() as i32));
        traces.insert(s.clone(), t);
    }
    let gram = partlab::moments::cumulants_from_traces(4, FamilyTag::S, &traces, n)?;
    let lattice = Lattice::new(4, FamilyTag::S)?.moments_to_cumulants(&moments);
    let is_a = [true, false, true, false];
    let abs = |v: &Q| v.abs().to_f64().unwrap_or(f64::NAN);
    let gram_max = gram.iter().filter(|(p, _)| mixes(p, &is_a)).map(|(_, v)| abs(v)).fold(0.0, f64::max);
    let mut best = (0.0f64, Partition::identity(4));
    for (p, v) in fam.iter().zip(&lattice) {
        if mixes(p, &is_a) && abs(v) > best.0 {
            best = (abs(v), p.clone());
        }
    }
    Ok(MixedCumulants { n, gram_max, lattice_max: best.0, argmax: best.1 })
}

/// Monte Carlo `P_2` cumulants `κ_p(H, H)` of a Gaussian approximant.
pub fn approximant_cumulants_mc(
    class: ApproxClass,
    n: usize,
    t: f64,
    cfg: &McConfig,
    budget: u128,
) -> Result<Vec<(Partition, Estimate)>> {
    cfg.validate()?;
    let (fam, rows) = cumulant_map(2, FamilyTag::P, n)?;
    let per = run_range(cfg, 0..cfg.samples, |rng, _| {
        let h = gaussian_approximant(class, n, t, rng.random::<u64>())?;
        let traces: Vec<C64> =
            fam.iter().map(|p| trace_pairing_c(p, &[&h, &h], budget)).collect::<partlab::Result<_>>()?;
        Ok(rows.iter().map(|r| r.iter().zip(&traces).map(|(a, b)| (b * a).re).sum::<f64>()).collect::<Vec<f64>>())
    })?;
    Ok(fam.into_iter().zip(columns(&per, rows.len())).collect())
}

/// Least squares `y ≈ a + b x`: `(a, b, R²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (a, b, r2)
}

/// One letter's cumulants on `A_1..A_kmax`: small nonzero rationals, except
/// that level one is zero when `centered`.
pub fn random_table(label: &str, kmax: usize, tag: FamilyTag, seed: u64, centered: bool) -> Result<CumulantTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = CumulantTable::new(tag, [label]);
    for k in 1..=kmax {
        for p in enumerate_family(k, tag)? {
            let sign = if rng.random_bool(0.5) { -1 } else { 1 };
            let v = q(sign * rng.random_range(1..=3), rng.random_range(1..=4));
            let v = if centered && k == 1 { Q::zero() } else { v };
            t.insert(&p, &constant_word(label, k), v)?;
        }
    }
    Ok(t)
}

/// `κ_p(n^{−1/2}(a_1 + … + a_n))` for free copies against `e^{⊞R_2(a)}(p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CltRow {
    pub partition: Partition,
    pub value: Q,
    pub prediction: Q,
}

impl CltRow {
    pub fn error(&self) -> f64 {
        (&self.value - &self.prediction).abs().to_f64().unwrap_or(f64::NAN)
    }
}

/// Rows for every `p ∈ P_1..P_kmax` after `doublings` free doublings.
pub fn clt_rows(kappa: &CumulantTable, label: &str, kmax: usize, doublings: u32) -> Result<Vec<CltRow>> {
    if doublings % 2 == 1 {
        return Err(CliError::Input("an even number of doublings keeps the rescaling rational".into()));
    }
    let r2 = r_transform(kappa, label)?.restrict_grade(2);
    let mut sum = kappa.clone();
    for _ in 0..doublings {
        sum = free_sum(&sum, &sum)?;
    }
    let mut rows = Vec::new();
    for k in 1..=kmax {
        // n^{−k/2} with n = 2^doublings.
        let scale = qpow(&q(1, 2), (doublings as usize * k / 2) as i32);
        for p in enumerate_family(k, kappa.tag)? {
            let value = sum.get(&p, &constant_word(label, k))? * &scale;
            let prediction = exp_boxplus(&r2, &Q::one(), &p)?;
            rows.push(CltRow { partition: p, value, prediction });
        }
    }
    Ok(rows)
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

fn words2(a: &str, b: &str, k: usize) -> Vec<Vec<Label>> {
    (0..1u32 << k)
        .map(|bits| (0..k).map(|i| Label::from(if bits >> i & 1 == 1 { b } else { a })).collect())
        .collect()
}

/// Joint cumulants of two formally free letters: zero on partitions linking
/// the letters, the product of the two restrictions otherwise.
pub fn free_joint(ka: &CumulantTable, a: &str, kb: &CumulantTable, b: &str, kmax: usize) -> Result<CumulantTable> {
    let mut out = CumulantTable::new(ka.tag, [a, b]);
    for k in 1..=kmax {
        for p in enumerate_family(k, ka.tag)? {
            for w in words2(a, b, k) {
                let v = if links(&p, &w, a) {
                    Q::zero()
                } else {
                    let c1: Vec<usize> = (1..=k).filter(|&c| w[c - 1] == a).collect();
                    let c2: Vec<usize> = (1..=k).filter(|&c| w[c - 1] == b).collect();
                    ka.get(&p.extract_columns(&c1)?, &constant_word(a, c1.len()))?
                        * kb.get(&p.extract_columns(&c2)?, &constant_word(b, c2.len()))?
                };
                out.insert(&p, &w, v)?;
            }
        }
    }
    Ok(out)
}

/// Freeness verdicts for a formal `P`-free pair up to level four.
#[derive(Clone, Debug, PartialEq)]
pub struct NegativeFreeness {
    /// `κ_{0_2}(a) κ_{0_2}(b)`.
    pub obstruction: Q,
    pub p_free: bool,
    pub s_free: bool,
    pub s_free_below_four: bool,
    pub routes_agree: bool,
    pub witness: Option<(Partition, Vec<Label>)>,
}

pub fn negative_freeness(seed: u64) -> Result<NegativeFreeness> {
    let ka = random_table("a", 4, FamilyTag::P, seed, false)?;
    let kb = random_table("b", 4, FamilyTag::P, seed.wrapping_add(1), false)?;
    let joint = cumulants_to_moments(&free_joint(&ka, "a", &kb, "b", 4)?)?;
    let z = Partition::zero(2);
    let obstruction = ka.get(&z, &constant_word("a", 2))? * kb.get(&z, &constant_word("b", 2))?;
    let set = |l: &str| BTreeSet::from([Label::from(l)]);
    let p = freeness_check(&joint, &set("a"), &set("b"), FamilyTag::P, 4)?;
    let s = freeness_check(&joint, &set("a"), &set("b"), FamilyTag::S, 4)?;
    let s3 = freeness_check(&joint, &set("a"), &set("b"), FamilyTag::S, 3)?;
    Ok(NegativeFreeness {
        obstruction,
        p_free: p.free,
        s_free: s.free,
        s_free_below_four: s3.free,
        routes_agree: p.routes_agree && s.routes_agree,
        witness: s.witness,
    })
}

/// The entries of `J_N` against the finite-cumulant entry formula, over all
/// index tuples at level `k`. Returns the number of tuples checked and the
/// first mismatch.
pub fn jn_entry_check(n: usize, k: usize) -> Result<(usize, Option<Vec<u64>>)> {
    let j = partlab::matrix::j_matrix_q(n);
    let fam = partlab::moments::MatrixFamily::new(n, 0).with("j", partlab::moments::Entry::Exact(j.clone()))?;
    let kappa = partlab::moments::finite_cumulants(&fam, k, FamilyTag::P, &constant_word("j", k))?;
    let total = n.pow(2 * k as u32);
    let mut tuple = vec![0u64; 2 * k];
    for e in 0..total {
        digits(e, n, &mut tuple);
        let want = (0..k).fold(Q::one(), |acc, c| acc * j.get(tuple[2 * c] as usize, tuple[2 * c + 1] as usize));
        let got = partlab::moments::entry_moment_prediction(&kappa, FamilyTag::P, &tuple, n)?;
        if got != want {
            return Ok((e + 1, Some(tuple)));
        }
    }
    Ok((total, None))
}

/// `E[(J_N)_{11}]` from the entry formula.
pub fn jn_first_entry(n: usize) -> Result<Q> {
    let j = partlab::matrix::j_matrix_q(n);
    let fam = partlab::moments::MatrixFamily::new(n, 0).with("j", partlab::moments::Entry::Exact(j))?;
    let kappa = partlab::moments::finite_cumulants(&fam, 1, FamilyTag::P, &constant_word("j", 1))?;
    Ok(partlab::moments::entry_moment_prediction(&kappa, FamilyTag::P, &[0, 0], n)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_traces_match_repeated_products() {
        let m = CMatrix::from_fn(3, |i, j| C64::new((i + 2 * j) as f64 - 2.0, i as f64 - j as f64));
        let mut p = m.clone();
        for (j, t) in power_traces(&m, 5).into_iter().enumerate() {
            assert!((t - p.trace()).norm() < 1e-9, "power {}", j + 1);
            p = p.mul(&m);
        }
    }

    #[test]
    fn kron_power_order() {
        let e = [C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0), C64::new(5.0, 0.0)];
        let mut out = vec![C64::zero(); 16];
        kron_power(&e, 2, &mut out);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(out[a * 4 + b], e[a] * e[b]);
            }
        }
    }

    #[test]
    fn gue_second_order_prediction() {
        // E[M_ij M_ji] = 1/N, every other pair of entries is uncorrelated.
        let n = 3;
        let pred = wick_prediction(Field::Complex, n, 2).unwrap();
        let mut t = vec![0u64; 4];
        for (e, v) in pred.iter().enumerate() {
            digits(e, n, &mut t);
            let want = if t[0] == t[3] && t[1] == t[2] { 1.0 / 3.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-15, "{t:?}");
        }
    }

    #[test]
    fn fit_of_exact_line() {
        let (a, b, r2) = linear_fit(&[1.0, 2.0, 3.0], &[1.0, 3.0, 5.0]);
        assert!((a + 1.0).abs() < 1e-12 && (b - 2.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gram_mixed_cumulants_vanish_and_lattice_ones_decay() {
        let pattern = [qi(0), qi(1), qi(2), qi(5)];
        let a = mixed_cumulants(8, &pattern).unwrap();
        let b = mixed_cumulants(16, &pattern).unwrap();
        assert_eq!((a.gram_max, b.gram_max), (0.0, 0.0));
        // Frozen from the exact computation: 21/128 at N = 8, a quarter of it at N = 16.
        assert_eq!(a.lattice_max, 21.0 / 128.0);
        assert_eq!(b.lattice_max, a.lattice_max / 4.0);
    }
}
