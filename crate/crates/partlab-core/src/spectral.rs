//! Linear forms on partition classes: R-transforms, generators and the
//! additive and multiplicative exponentials built from them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::family::{orbit_rep, permutations};
use crate::npoly::Q;
use crate::order::leq;
use crate::partition::Partition;
use crate::table::CumulantTable;

/// Which classes an infinitesimal character may charge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportRule {
    Any,
    /// One cycle; the additive case.
    Irreducible,
    /// `id ⊗ p'` with `p'` irreducible, up to columns; the multiplicative case.
    WeaklyIrreducible,
}

impl SupportRule {
    pub fn allows(self, p: &Partition) -> bool {
        match self {
            SupportRule::Any => true,
            SupportRule::Irreducible => p.stats().irreducible,
            SupportRule::WeaklyIrreducible => p.stats().weakly_irreducible,
        }
    }
}

/// A graded map from column-relabeling classes to rationals. Classes not
/// set read as zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralForm {
    values: BTreeMap<Partition, Q>,
    pub is_character: bool,
    pub is_infinitesimal_character: bool,
    pub support: SupportRule,
}

impl Default for SpectralForm {
    fn default() -> Self {
        SpectralForm::new()
    }
}

impl SpectralForm {
    pub fn new() -> Self {
        SpectralForm {
            values: BTreeMap::new(),
            is_character: false,
            is_infinitesimal_character: false,
            support: SupportRule::Any,
        }
    }

    /// An infinitesimal character whose values must respect `support`.
    pub fn infinitesimal(support: SupportRule) -> Self {
        SpectralForm {
            is_infinitesimal_character: true,
            support,
            ..SpectralForm::new()
        }
    }

    /// Sets the value on the class of `p`.
    pub fn set(&mut self, p: &Partition, value: Q) -> Result<()> {
        if self.is_infinitesimal_character && !value.is_zero() && !self.support.allows(p) {
            return Err(Error::InvalidArgument(alloc::format!(
                "{p:?} is outside the support of an infinitesimal character ({:?})",
                self.support
            )));
        }
        self.values.insert(orbit_rep(p)?, value);
        Ok(())
    }

    pub fn get(&self, p: &Partition) -> Result<Q> {
        if self.values.is_empty() {
            return Ok(Q::zero());
        }
        Ok(self.values.get(&orbit_rep(p)?).cloned().unwrap_or_else(Q::zero))
    }

    /// Class representatives with their values, in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &Q)> {
        self.values.iter()
    }

    pub fn max_k(&self) -> usize {
        self.values.keys().map(Partition::k).max().unwrap_or(0)
    }

    /// Every partition of size `k` whose class has a nonzero value.
    pub fn support_at(&self, k: usize) -> Result<Vec<(Partition, Q)>> {
        let reps: Vec<(&Partition, &Q)> = self
            .values
            .iter()
            .filter(|(p, v)| p.k() == k && !v.is_zero())
            .collect();
        if reps.is_empty() {
            return Ok(Vec::new());
        }
        if k > crate::family::ORBIT_CAP {
            return Err(Error::Capacity {
                what: "orbit size",
                value: k as u128,
                cap: crate::family::ORBIT_CAP as u128,
            });
        }
        let perms = permutations(k);
        let mut out = Vec::new();
        for (rep, v) in reps {
            let orbit: BTreeSet<Partition> = perms.iter().map(|s| rep.permute_columns(s)).collect();
            out.extend(orbit.into_iter().map(|p| (p, v.clone())));
        }
        Ok(out)
    }
}

impl SpectralForm {
    /// `R_i`: the grade-`i` part, zero elsewhere.
    pub fn restrict_grade(&self, i: usize) -> SpectralForm {
        SpectralForm {
            values: self
                .values
                .iter()
                .filter(|(p, _)| p.k() == i)
                .map(|(p, v)| (p.clone(), v.clone()))
                .collect(),
            is_character: false,
            is_infinitesimal_character: false,
            support: SupportRule::Any,
        }
    }
}

/// `R(a)`: the cumulants of the constant word `a … a`, one grade per level.
pub fn r_transform(kappa: &CumulantTable, label: &str) -> Result<SpectralForm> {
    let mut phi = SpectralForm::new();
    for ((p, w), v) in kappa.inner.iter() {
        if w.iter().all(|l| l == label) {
            phi.set(p, v.clone())?;
        }
    }
    Ok(phi)
}

/// Set partitions of `0..n` as restricted-growth strings.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut rg = alloc::vec![0usize; n];
    fn rec(i: usize, max: usize, rg: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == rg.len() {
            out.push(rg.clone());
            return;
        }
        for v in 0..=max + 1 {
            rg[i] = v;
            rec(i + 1, max.max(v), rg, out);
        }
    }
    if n == 0 {
        out.push(Vec::new());
    } else {
        rec(1, 0, &mut rg, &mut out);
    }
    out
}

/// `(e^{⊞tφ})(p)`: the sum over groupings of the cycles of `p` of
/// `Π_groups t·φ(p restricted to the group's columns)`.
pub fn exp_boxplus(phi: &SpectralForm, t: &Q, p: &Partition) -> Result<Q> {
    let cycles = p.cycle_columns();
    let mut total = Q::zero();
    for rg in set_partitions(cycles.len()) {
        let groups = rg.iter().copied().max().map_or(0, |m| m + 1);
        let mut term = Q::from_integer(1.into());
        for g in 0..groups {
            let mut cols: Vec<usize> = rg
                .iter()
                .enumerate()
                .filter(|(_, &x)| x == g)
                .flat_map(|(i, _)| cycles[i].iter().copied())
                .collect();
            cols.sort_unstable();
            let v = phi.get(&p.extract_columns(&cols)?)?;
            if v.is_zero() {
                term = Q::zero();
                break;
            }
            term *= t * v;
        }
        total += term;
    }
    Ok(total)
}

/// Moments `m_q(t)` of the multiplicative exponential at each time of a grid.
#[derive(Clone, Debug)]
pub struct BoxtimesSolution {
    pub times: Vec<Q>,
    /// States of the closed system; targets come first.
    pub states: Vec<Partition>,
    /// `values[i][j] = m_{states[j]}(times[i])`.
    pub values: Vec<Vec<f64>>,
    /// Sum of the per-step Taylor truncation bounds.
    pub truncation_bound: f64,
}

impl BoxtimesSolution {
    pub fn get(&self, time_index: usize, p: &Partition) -> Option<f64> {
        let j = self.states.iter().position(|s| s == p)?;
        Some(self.values[time_index][j])
    }
}

/// Default tolerance of [`boxtimes_evolution`].
pub const BOXTIMES_TOLERANCE: f64 = 1e-12;
const TAYLOR_CAP: usize = 200;

/// Solves `d/dt m_q = Σ_{p1 ≤ q} φ(p1) m_{ᵗp1 ∘ q}` with `m_q(0) = 1` on all of `P_k`.
pub fn boxtimes_evolution(phi: &SpectralForm, k: usize, t_grid: &[Q]) -> Result<BoxtimesSolution> {
    let targets = crate::family::enumerate_family(k, crate::family::FamilyTag::P)?;
    boxtimes_evolution_from(phi, &targets, t_grid, BOXTIMES_TOLERANCE)
}

/// Same system restricted to the states reachable from `targets`.
pub fn boxtimes_evolution_from(
    phi: &SpectralForm,
    targets: &[Partition],
    t_grid: &[Q],
    tol: f64,
) -> Result<BoxtimesSolution> {
    let mut supports: BTreeMap<usize, Vec<(Partition, f64)>> = BTreeMap::new();
    let mut states: Vec<Partition> = Vec::new();
    let mut index: BTreeMap<Partition, usize> = BTreeMap::new();
    for q in targets {
        if !index.contains_key(q) {
            index.insert(q.clone(), states.len());
            states.push(q.clone());
        }
    }
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut next = 0;
    while next < states.len() {
        let q = states[next].clone();
        let k = q.k();
        if !supports.contains_key(&k) {
            let s = phi
                .support_at(k)?
                .into_iter()
                .map(|(p, v)| (p, v.to_f64().unwrap_or(f64::NAN)))
                .collect();
            supports.insert(k, s);
        }
        let mut row = Vec::new();
        for (p1, v) in &supports[&k] {
            if !leq(p1, &q) {
                continue;
            }
            let (r, _) = p1.transpose().compose_unchecked(&q);
            let j = *index.entry(r.clone()).or_insert_with(|| {
                states.push(r);
                states.len() - 1
            });
            row.push((j, *v));
        }
        rows.push(row);
        next += 1;
    }

    let lip = rows
        .iter()
        .map(|r| r.iter().map(|(_, v)| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let apply = |v: &[f64]| -> Vec<f64> {
        rows.iter()
            .map(|r| r.iter().map(|&(j, c)| c * v[j]).sum())
            .collect()
    };

    let mut order: Vec<usize> = (0..t_grid.len()).collect();
    order.sort_by(|&a, &b| t_grid[a].cmp(&t_grid[b]));
    if let Some(&first) = order.first() {
        if t_grid[first] < Q::zero() {
            return Err(Error::InvalidArgument("negative time".into()));
        }
    }
    let t_max = order
        .last()
        .map(|&i| t_grid[i].to_f64().unwrap_or(0.0))
        .unwrap_or(0.0);
    let mut state = alloc::vec![1.0f64; states.len()];
    let mut now = 0.0f64;
    let mut bound = 0.0f64;
    let mut values = alloc::vec![Vec::new(); t_grid.len()];
    for &ti in &order {
        let target = t_grid[ti].to_f64().unwrap_or(0.0);
        while now < target {
            let h = if lip > 0.0 { (0.5 / lip).min(target - now) } else { target - now };
            let step_tol = if t_max > 0.0 { tol * h / t_max } else { tol };
            let norm = state.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let mut term = state.clone();
            let mut sum = state.clone();
            let mut j = 0usize;
            let mut mag = 1.0f64; // (hL)^j / j!
            loop {
                j += 1;
                term = apply(&term);
                for x in term.iter_mut() {
                    *x *= h / j as f64;
                }
                for (s, x) in sum.iter_mut().zip(&term) {
                    *s += x;
                }
                mag *= h * lip / j as f64;
                let ratio = h * lip / (j + 2) as f64;
                let rem = norm * mag * h * lip / (j + 1) as f64 / (1.0 - ratio);
                if rem <= step_tol {
                    bound += rem;
                    break;
                }
                if j >= TAYLOR_CAP {
                    return Err(Error::NoConvergence {
                        tolerance: tol,
                        iterations: j,
                    });
                }
            }
            state = sum;
            now += h;
        }
        values[ti] = state.clone();
    }
    Ok(BoxtimesSolution {
        times: t_grid.to_vec(),
        states,
        values,
        truncation_bound: bound,
    })
}
