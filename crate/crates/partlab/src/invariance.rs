//! How far a family is from strong invariance: the spread of expected entry
//! products over index tuples sharing a kernel.

use std::collections::BTreeMap;

use num_traits::Zero;
use partlab_core::table::Label;
use partlab_core::{enumerate_family, FamilyTag, Partition, Point};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::estimate::{run_range, McConfig};
use crate::matrix::{CMatrix, C64};
use crate::moments::MatrixFamily;

const CHUNK: u64 = 256;

/// Per kernel class `p`: `N^{nc(p) − cycles(p)} sup_{Ker I = Ker I' = p} |E[L_I] − E[L_I']|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InvarianceEntry {
    pub discrepancy: f64,
    /// The scaled largest standard error of a single `E[L_I]`; zero for
    /// deterministic families.
    pub noise: f64,
    pub tuples: usize,
}

/// Tuples `(i_1, i_1', …, i_k, i_k')` whose kernel is exactly `p`, as values per point.
fn tuples_with_kernel(p: &Partition, n: usize) -> Vec<Vec<usize>> {
    let nc = p.nc();
    let k = p.k();
    let blocks: Vec<usize> = (1..=k)
        .flat_map(|c| [p.block_of(Point::top(c)), p.block_of(Point::bottom(c))])
        .collect();
    let mut out = Vec::new();
    let mut vals = vec![0usize; nc];
    let mut used = vec![false; n];
    fn rec(b: usize, vals: &mut [usize], used: &mut [bool], blocks: &[usize], out: &mut Vec<Vec<usize>>) {
        if b == vals.len() {
            out.push(blocks.iter().map(|&x| vals[x]).collect());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                vals[b] = v;
                rec(b + 1, vals, used, blocks, out);
                used[v] = false;
            }
        }
    }
    rec(0, &mut vals, &mut used, &blocks, &mut out);
    out
}

fn entry_product(mats: &[&CMatrix], t: &[usize]) -> C64 {
    mats.iter().enumerate().fold(C64::new(1.0, 0.0), |acc, (j, m)| acc * m.get(t[2 * j], t[2 * j + 1]))
}

/// Strong-invariance discrepancies of `word` per kernel class of `P_k` with
/// at most `N` blocks. Deterministic families use a single exact sample.
pub fn strong_invariance_diagnostic(
    family: &MatrixFamily,
    k: usize,
    word: &[Label],
    cfg: &McConfig,
) -> Result<BTreeMap<Partition, InvarianceEntry>> {
    if word.len() != k {
        return invalid(format!("word has {} letters, k = {k}", word.len()));
    }
    cfg.validate()?;
    let n = family.n();
    let classes: Vec<(Partition, Vec<Vec<usize>>)> = enumerate_family(k, FamilyTag::P)?
        .into_iter()
        .filter(|p| p.nc() <= n)
        .map(|p| {
            let t = tuples_with_kernel(&p, n);
            (p, t)
        })
        .collect();
    let total: u128 = classes.iter().map(|(_, t)| t.len() as u128).sum();
    let pairs: u128 = classes.iter().map(|(_, t)| (t.len() as u128).pow(2)).sum();
    let cost = (total * cfg.samples as u128).max(pairs);
    if cost > family.budget() {
        return Err(Error::Budget { what: "invariance diagnostic".into(), needed: cost, budget: family.budget() });
    }
    let samples = if family.is_exact() { 1 } else { cfg.samples };
    let sampler = family.clone();
    let mut sum = vec![C64::zero(); total as usize];
    let mut sumsq = vec![0.0f64; total as usize];
    let mut start = 0;
    while start < samples {
        let end = (start + CHUNK).min(samples);
        let chunk = run_range(cfg, start..end, |_, s| {
            let sample = sampler.sample_with_seed(cfg.seed, s)?;
            let mats: Vec<&CMatrix> = word.iter().map(|l| &sample[l]).collect();
            Ok(classes.iter().flat_map(|(_, ts)| ts.iter().map(|t| entry_product(&mats, t))).collect::<Vec<C64>>())
        })?;
        for row in chunk {
            for (i, z) in row.into_iter().enumerate() {
                sum[i] += z;
                sumsq[i] += z.norm_sqr();
            }
        }
        start = end;
    }
    let s = samples as f64;
    let mut out = BTreeMap::new();
    let mut offset = 0;
    for (p, ts) in &classes {
        let scale = (n as f64).powi(p.nc() as i32 - p.cycles() as i32);
        let means: Vec<C64> = (offset..offset + ts.len()).map(|i| sum[i] / s).collect();
        let mut sup = 0.0f64;
        for a in 0..means.len() {
            for b in a + 1..means.len() {
                sup = sup.max((means[a] - means[b]).norm());
            }
        }
        let noise = if samples < 2 {
            0.0
        } else {
            (offset..offset + ts.len())
                .map(|i| {
                    let var = ((sumsq[i] - sum[i].norm_sqr() / s) / (s - 1.0)).max(0.0);
                    (var / s).sqrt()
                })
                .fold(0.0, f64::max)
        };
        out.insert(p.clone(), InvarianceEntry { discrepancy: scale * sup, noise: scale * noise, tuples: ts.len() });
        offset += ts.len();
    }
    Ok(out)
}
