//! The acceptance battery: twelve criteria, each reporting what it measured.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::{ToPrimitive, Zero};
use partlab::ensemble::{Field, Group, Kind};
use partlab::estimate::McConfig;
use partlab::moments::{block_sum, classical_bridge, classical_cumulants, mc_word, p_moment, Entry, MatrixFamily, Mode};
use partlab::process::{generator_spectral_form, unitary_bm_moment, GeneratorKind, LevyTriplet};
use partlab::QMatrix;
use partlab_core::npoly::{q, qi, qpow};
use partlab_core::spectral::boxtimes_evolution_from;
use partlab_core::table::{constant_word, word};
use partlab_core::transform::{ExclusiveLattice, Lattice};
use partlab_core::{enumerate_family, gram_entry, rho_matrix, FamilyTag, Partition, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{config_err, Result};
use crate::experiments::{
    clt_rows, cycle_moments_mc, jn_entry_check, jn_first_entry, linear_fit, mixed_cumulants, negative_freeness,
    random_table, unitary_bm_mc, wick_mc,
};
use crate::scenarios::free_poisson_prediction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Exact,
    Mc,
    All,
}

impl Level {
    fn exact(self) -> bool {
        self != Level::Mc
    }

    fn mc(self) -> bool {
        self != Level::Exact
    }
}

impl std::str::FromStr for Level {
    type Err = crate::error::CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Level::Exact),
            "mc" => Ok(Level::Mc),
            "all" => Ok(Level::All),
            other => Err(crate::error::CliError::Input(format!("unknown level {other:?}"))),
        }
    }
}

pub type ComposeFn = fn(&Partition, &Partition) -> partlab_core::Result<(Partition, usize)>;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub level: Level,
    /// Replaces every Monte Carlo sample count.
    pub samples: Option<u64>,
    pub seed: u64,
    pub threads: usize,
    /// The composition under test in the representation criterion.
    pub compose: ComposeFn,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { level: Level::All, samples: None, seed: 2024, threads: 0, compose: Partition::compose }
    }
}

impl VerifyOptions {
    fn mc(&self, default_samples: u64, stream: u64) -> McConfig {
        McConfig::new(self.samples.unwrap_or(default_samples), self.seed.wrapping_add(stream)).with_threads(self.threads)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    /// Which parts ran: `exact`, `mc` or both.
    pub parts: &'static str,
    pub pass: bool,
    pub measured: String,
    /// A documented reason why this criterion is expected to fail.
    pub known_deviation: Option<&'static str>,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifySummary {
    pub level: Level,
    pub seed: u64,
    pub results: Vec<CriterionResult>,
}

impl VerifySummary {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    /// Failures without a documented deviation.
    pub fn unexpected_failures(&self) -> Vec<&CriterionResult> {
        self.results.iter().filter(|r| !r.pass && r.known_deviation.is_none()).collect()
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "representation and Gram exactness"),
    (2, "transform round trips on P_4"),
    (3, "graph-moment oracle"),
    (4, "semicircle moments"),
    (5, "unitary Brownian motion"),
    (6, "Wick formula"),
    (7, "classical-cumulant bridge"),
    (8, "free Poisson"),
    (9, "entry moments"),
    (10, "freeness scaling"),
    (11, "central limit"),
    (12, "negative freeness"),
];

const CLT_DEVIATION: &str = "with R_1 = 0 the P_3 cumulants of the rescaled n-fold free sum are κ_p/√n, not O(1/n); \
the 8/n bound at n = 256 holds only for tables with |κ_p| ≤ 1/2 on P_3";

/// Runs every criterion with a part at `opts.level`, in order.
pub fn verify_suite(opts: &VerifyOptions) -> Result<VerifySummary> {
    if opts.level.mc() && opts.samples == Some(0) {
        return config_err("/samples", "samples must be positive");
    }
    let mut results = Vec::new();
    for (id, _) in CRITERIA {
        if let Some(r) = run_criterion(id, opts)? {
            results.push(r);
        }
    }
    Ok(VerifySummary { level: opts.level, seed: opts.seed, results })
}

/// One criterion, or `None` when it has no part at the requested level.
pub fn run_criterion(id: u8, opts: &VerifyOptions) -> Result<Option<CriterionResult>> {
    if opts.level.mc() && opts.samples == Some(0) {
        return config_err("/samples", "samples must be positive");
    }
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown");
    let (ex, mc) = (opts.level.exact(), opts.level.mc());
    let start = Instant::now();
    let outcome: Option<(bool, String, &'static str)> = match id {
        1 if ex => Some(with_parts(representation(opts.compose)?, "exact")),
        2 if ex => Some(with_parts(round_trips(opts.seed)?, "exact")),
        3 if ex => Some(with_parts(graph_oracle(opts.seed)?, "exact")),
        4 if mc => Some(with_parts(semicircle(opts)?, "mc")),
        5 => Some(unitary_bm(opts)?),
        6 if mc => Some(with_parts(wick(opts)?, "mc")),
        7 if ex => Some(with_parts(bridge()?, "exact")),
        8 => Some(free_poisson(opts)?),
        9 => Some(entries(opts)?),
        10 if ex => Some(with_parts(freeness_scaling()?, "exact")),
        11 if ex => Some(with_parts(clt(opts.seed)?, "exact")),
        12 if ex => Some(with_parts(negative(opts.seed)?, "exact")),
        _ => None,
    };
    Ok(outcome.map(|(pass, measured, parts)| CriterionResult {
        id,
        name,
        parts,
        pass,
        measured,
        known_deviation: if id == 11 { Some(CLT_DEVIATION) } else { None },
        seconds: start.elapsed().as_secs_f64(),
    }))
}

fn with_parts((pass, measured): (bool, String), parts: &'static str) -> (bool, String, &'static str) {
    (pass, measured, parts)
}

/// Rows of `ρ(p)` as sorted column lists.
fn csr(entries: &[(u32, u32)], dim: usize) -> Vec<Vec<u32>> {
    let mut rows = vec![Vec::new(); dim];
    for &(r, c) in entries {
        rows[r as usize].push(c);
    }
    rows
}

fn representation(compose: ComposeFn) -> Result<(bool, String)> {
    let mut pairs = 0usize;
    for n in [4u64, 6] {
        for k in 1..=3usize {
            let ps = enumerate_family(k, FamilyTag::P)?;
            let rhos: Vec<_> = ps.iter().map(|p| rho_matrix(p, n)).collect::<partlab_core::Result<_>>()?;
            let index: BTreeMap<&Partition, usize> = ps.iter().enumerate().map(|(i, p)| (p, i)).collect();
            let dim = rhos[0].dim;
            let rows: Vec<Vec<Vec<u32>>> = rhos.iter().map(|r| csr(&r.entries, dim)).collect();
            let mut acc = vec![0u64; dim];
            let mut touched: Vec<u32> = Vec::new();
            for (i, p) in ps.iter().enumerate() {
                for (j, qq) in ps.iter().enumerate() {
                    pairs += 1;
                    let (r, kappa) = compose(p, qq)?;
                    let scale = n.pow(kappa as u32);
                    let Some(&ri) = index.get(&r) else {
                        return Ok((false, format!("{p} ∘ {qq}: composite {r} is not in P_{k}")));
                    };
                    let want = &rows[ri];
                    // ρ(p)ρ(q), row by row.
                    for a in 0..dim {
                        for &mid in &rows[i][a] {
                            for &b in &rows[j][mid as usize] {
                                if acc[b as usize] == 0 {
                                    touched.push(b);
                                }
                                acc[b as usize] += 1;
                            }
                        }
                        touched.sort_unstable();
                        let ok = touched.len() == want[a].len()
                            && touched.iter().zip(&want[a]).all(|(&b, &w)| b == w && acc[b as usize] == scale);
                        let ok = ok || (touched.is_empty() && want[a].is_empty());
                        for &b in &touched {
                            acc[b as usize] = 0;
                        }
                        touched.clear();
                        if !ok {
                            return Ok((false, format!("ρ({p})ρ({qq}) ≠ N^{kappa} ρ({r}) at N = {n}, row {a}")));
                        }
                    }
                    // Tr ρ(p) ρ(ᵗq) = N^{nc(p ∨ q)}.
                    let tq = rho_matrix(&qq.transpose(), n)?;
                    let tq_rows = csr(&tq.entries, dim);
                    let tr = rhos[i].entries.iter().filter(|&&(a, b)| tq_rows[b as usize].binary_search(&a).is_ok()).count();
                    let want = gram_entry(p, qq)?.eval(n);
                    if Q::from_integer((tr as i64).into()) != want {
                        return Ok((false, format!("Tr ρ({p})ρ(ᵗ{qq}) = {tr} ≠ {want} at N = {n}")));
                    }
                }
            }
        }
    }
    Ok((true, format!("{pairs} ordered pairs over P_1..P_3 at N = 4, 6: products and traces exact")))
}

fn random_rationals(len: usize, rng: &mut ChaCha8Rng) -> Vec<Q> {
    (0..len).map(|_| q(rng.random_range(-9..=9), rng.random_range(1..=7))).collect()
}

fn round_trips(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lattice = Lattice::new(4, FamilyTag::P)?;
    let exclusive = ExclusiveLattice::new(4)?;
    let len = enumerate_family(4, FamilyTag::P)?.len();
    let mut trials = 0;
    for _ in 0..3 {
        let m = random_rationals(len, &mut rng);
        let checks = [
            ("m → κ → m", lattice.cumulants_to_moments(&lattice.moments_to_cumulants(&m))),
            ("κ → m → κ", lattice.moments_to_cumulants(&lattice.cumulants_to_moments(&m))),
            ("m → exclusive → m", exclusive.from_exclusive(&exclusive.to_exclusive(&m))),
            ("exclusive → m → exclusive", exclusive.to_exclusive(&exclusive.from_exclusive(&m))),
        ];
        for (what, back) in checks {
            trials += 1;
            if back != m {
                let at = back.iter().zip(&m).position(|(a, b)| a != b).unwrap_or(0);
                return Ok((false, format!("{what} differs at index {at} of {len}")));
            }
        }
    }
    Ok((true, format!("{trials} round trips over the {len} partitions of P_4, exact")))
}

/// Dense `Tr[(M_1 ⊗ … ⊗ M_k) ρ(ᵗp)]`.
fn dense_trace(p: &Partition, mats: &[&QMatrix], n: usize) -> Result<Q> {
    let k = mats.len();
    let dim = n.pow(k as u32);
    let digit = |x: usize, j: usize| (x / n.pow((k - 1 - j) as u32)) % n;
    let mut tensor = vec![Q::zero(); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let mut v = Q::from_integer(1.into());
            for (j, m) in mats.iter().enumerate() {
                v *= m.get(digit(r, j), digit(c, j));
            }
            tensor[r * dim + c] = v;
        }
    }
    let rho = rho_matrix(&p.transpose(), n as u64)?;
    Ok(rho.entries.iter().fold(Q::zero(), |acc, &(a, b)| acc + &tensor[b as usize * dim + a as usize]))
}

fn graph_oracle(seed: u64) -> Result<(bool, String)> {
    let n = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3);
    let mats: Vec<QMatrix> = (0..3).map(|_| QMatrix::from_fn(n, |_, _| qi(rng.random_range(-3..=3)))).collect();
    let fam = MatrixFamily::new(n, 0)
        .with("a", Entry::Exact(mats[0].clone()))?
        .with("b", Entry::Exact(mats[1].clone()))?
        .with("c", Entry::Exact(mats[2].clone()))?;
    let mut count = 0;
    for k in 1..=3 {
        let w = word(&["a", "b", "c"][..k]);
        let refs: Vec<&QMatrix> = mats[..k].iter().collect();
        for p in enumerate_family(k, FamilyTag::P)? {
            count += 1;
            let oracle = dense_trace(&p, &refs, n)?;
            let scale = qpow(&qi(n as i64), -(p.cycles() as i32));
            let got = p_moment(&fam, &p, &w, Mode::Exact)?;
            let bs = block_sum(&p, &refs, u128::MAX)?;
            if got.exact() != Some(&(&oracle * &scale)) || bs != oracle {
                return Ok((false, format!("{p}: block sum {bs}, dense oracle {oracle}")));
            }
        }
    }
    Ok((true, format!("{count} partitions of P_1..P_3, random integer matrices, N = 4: equal")))
}

fn semicircle(opts: &VerifyOptions) -> Result<(bool, String)> {
    let est = cycle_moments_mc(&Kind::Gue, 300, 6, &opts.mc(200, 4))?;
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, want) in [(2, 1.0), (4, 2.0), (6, 5.0)] {
        let e = &est[k - 1];
        let err = (e.mean() - want).abs();
        let tol = (4.0 * e.stderr()).max(0.05);
        pass &= err <= tol;
        parts.push(format!("k={k}: {:.4}±{:.4} (|Δ| {:.4} ≤ {:.4})", e.mean(), e.stderr(), err, tol));
    }
    Ok((pass, format!("N = 300: {}", parts.join("; "))))
}

fn unitary_bm(opts: &VerifyOptions) -> Result<(bool, String, &'static str)> {
    let ts = [0.5, 1.0, 2.0];
    let mut pass = true;
    let mut measured = Vec::new();
    if opts.level.exact() {
        let phi = generator_spectral_form(&GeneratorKind::BmUnitary { field: Field::Complex }, 6)?;
        let targets: Vec<Partition> = (1..=6).map(Partition::cycle).collect();
        let grid = [q(1, 2), qi(1), qi(2)];
        let sol = boxtimes_evolution_from(&phi, &targets, &grid, 1e-13)?;
        let mut worst = 0.0f64;
        for (i, &t) in ts.iter().enumerate() {
            for k in 1..=6 {
                let got = sol.get(i, &Partition::cycle(k)).unwrap_or(f64::NAN);
                let d = (got - unitary_bm_moment(k, t)).abs();
                worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
            }
        }
        pass &= worst < 1e-8;
        measured.push(format!("ODE max |Δ| {worst:.2e}"));
    }
    if opts.level.mc() {
        let est = unitary_bm_mc(128, Field::Complex, 2.0, 200, &[50, 100, 200], 6, &opts.mc(200, 5))?;
        let mut worst = (f64::NEG_INFINITY, String::new());
        for (i, &t) in ts.iter().enumerate() {
            for k in 1..=6 {
                let e = &est[i][k - 1];
                let slack = 4.0 * e.stderr() + 0.02 - (e.mean() - unitary_bm_moment(k, t)).abs();
                pass &= slack >= 0.0;
                if -slack > worst.0 {
                    worst = (-slack, format!("t={t} k={k}: {:.4}±{:.4} vs {:.4}", e.mean(), e.stderr(), unitary_bm_moment(k, t)));
                }
            }
        }
        measured.push(format!("MC N = 128 tightest {}", worst.1));
    }
    let parts = match (opts.level.exact(), opts.level.mc()) {
        (true, true) => "exact+mc",
        (true, false) => "exact",
        _ => "mc",
    };
    Ok((pass, measured.join("; "), parts))
}

fn wick(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (field, name, stream) in [(Field::Complex, "GUE", 6), (Field::Real, "GOE", 7)] {
        let c = wick_mc(field, 4, 4, &opts.mc(100_000, stream))?;
        pass &= c.max_ratio < 5.0;
        parts.push(format!("{name} max |Δ|/stderr {:.3} at {:?}", c.max_ratio, c.worst));
    }
    Ok((pass, format!("{} entries each: {}", 4usize.pow(8), parts.join("; "))))
}

fn bridge() -> Result<(bool, String)> {
    let moments = vec![q(1, 2); 4];
    let frozen = [q(1, 2), q(1, 4), qi(0), q(-1, 8)];
    let classical = classical_cumulants(&moments);
    let mut got = Vec::new();
    for k in 1..=4 {
        got.push(classical_bridge(&moments, k, 8)?);
    }
    let pass = got == classical && got.as_slice() == frozen;
    let text: Vec<String> = got.iter().map(|x| x.to_string()).collect();
    Ok((pass, format!("κ_(0_k), k = 1..4, l = 8: [{}]", text.join(", "))))
}

fn free_poisson(opts: &VerifyOptions) -> Result<(bool, String, &'static str)> {
    let mut pass = true;
    let mut measured = Vec::new();
    if opts.level.exact() {
        let got: Vec<Q> = (1..=4).map(|k| free_poisson_prediction(&qi(1), k)).collect::<Result<_>>()?;
        pass &= got == [qi(1), qi(2), qi(5), qi(14)];
        let text: Vec<String> = got.iter().map(|x| x.to_string()).collect();
        measured.push(format!("exp_boxplus moments [{}]", text.join(", ")));
    }
    if opts.level.mc() {
        let kind = Kind::LevyAdditive { triplet: LevyTriplet::additive(1.0, 0.0, vec![(1.0, 1.0)]), t: 1.0, steps: 1 };
        let est = cycle_moments_mc(&kind, 200, 4, &opts.mc(200, 8))?;
        let mut parts = Vec::new();
        for (k, want) in [(1, 1.0), (2, 2.0), (3, 5.0), (4, 14.0)] {
            let e = &est[k - 1];
            pass &= (e.mean() - want).abs() <= 4.0 * e.stderr() + 0.1;
            parts.push(format!("{:.3}±{:.3}", e.mean(), e.stderr()));
        }
        measured.push(format!("MC N = 200 [{}]", parts.join(", ")));
    }
    let parts = match (opts.level.exact(), opts.level.mc()) {
        (true, true) => "exact+mc",
        (true, false) => "exact",
        _ => "mc",
    };
    Ok((pass, measured.join("; "), parts))
}

fn entries(opts: &VerifyOptions) -> Result<(bool, String, &'static str)> {
    let mut pass = true;
    let mut measured = Vec::new();
    if opts.level.exact() {
        let mut tuples = 0;
        for n in [4usize, 8] {
            pass &= jn_first_entry(n)? == q(1, n as i64);
            for k in 1..=2 {
                let (count, bad) = jn_entry_check(n, k)?;
                tuples += count;
                if let Some(t) = bad {
                    pass = false;
                    measured.push(format!("J_{n} mismatch at {t:?}"));
                }
            }
        }
        measured.push(format!("E[(J_N)_11] = 1/N for N = 4, 8; {tuples} tuples of J_N exact"));
    }
    if opts.level.mc() {
        let kind: Kind = Kind::Conjugated(Group::U, Box::new("diag-iid:bernoulli:1/2".parse()?));
        let fam = MatrixFamily::new(4, 0).with("m", Entry::Random(kind))?;
        let vals = mc_word(&fam, &constant_word("m", 2), &opts.mc(20_000, 9), |m| Ok(*m[0].get(0, 0) * *m[1].get(0, 1)))?;
        let mut e = partlab::estimate::ComplexEstimate::default();
        vals.iter().for_each(|z| e.push(*z));
        let ok = e.mean().norm() < 4.0 * e.stderr();
        pass &= ok;
        measured.push(format!("|E[M_11 M_12]| = {:.2e} vs 4·stderr {:.2e}", e.mean().norm(), 4.0 * e.stderr()));
    }
    let parts = match (opts.level.exact(), opts.level.mc()) {
        (true, true) => "exact+mc",
        (true, false) => "exact",
        _ => "mc",
    };
    Ok((pass, measured.join("; "), parts))
}

fn freeness_scaling() -> Result<(bool, String)> {
    let pattern = [qi(0), qi(1), qi(2), qi(5)];
    let ms: Vec<_> = [8usize, 16, 32].iter().map(|&n| mixed_cumulants(n, &pattern)).collect::<Result<_>>()?;
    let gram_zero = ms.iter().all(|m| m.gram_max == 0.0);
    let monotone = ms.windows(2).all(|w| w[1].lattice_max < w[0].lattice_max);
    let x: Vec<f64> = ms.iter().map(|m| 1.0 / m.n as f64).collect();
    let y: Vec<f64> = ms.iter().map(|m| m.lattice_max).collect();
    let (_, b, r2) = linear_fit(&x, &y);
    let values: Vec<String> = y.iter().map(|v| format!("{v:.5}")).collect();
    Ok((
        gram_zero && monotone && r2 > 0.9,
        format!(
            "Gram mixed cumulants {}; lattice mixed max |κ| at N = 8, 16, 32: [{}], slope {b:.3}, R² {r2:.4}",
            if gram_zero { "exactly 0" } else { "nonzero" },
            values.join(", ")
        ),
    ))
}

fn clt(seed: u64) -> Result<(bool, String)> {
    let n = 256.0f64;
    let table = random_table("a", 3, FamilyTag::P, seed ^ 0xc1, true)?;
    let rows = clt_rows(&table, "a", 3, 8)?;
    let worst = |k: usize| {
        rows.iter()
            .filter(|r| r.partition.k() == k)
            .map(|r| (r.error(), r.partition.clone()))
            .fold((0.0f64, Partition::identity(k)), |a, b| if b.0 > a.0 { b } else { a })
    };
    let (e2, _) = worst(2);
    let (e3, p3) = worst(3);
    let scaled = e3 * n.sqrt();
    let kappa = table.get(&p3, &constant_word("a", 3))?.to_f64().unwrap_or(f64::NAN).abs();
    let bound = 8.0 / n;
    Ok((
        e2 <= bound && e3 <= bound,
        format!(
            "n = 256, bound 8/n = {bound}: P_2 max error {e2:e}; P_3 max error {e3:.5} at {p3} (·√n = {scaled:.4}, |κ_p| = {kappa:.4})"
        ),
    ))
}

fn negative(seed: u64) -> Result<(bool, String)> {
    let r = negative_freeness(seed ^ 0x12)?;
    let witness_cycle = r.witness.as_ref().is_some_and(|(p, _)| p.k() == 4 && p.as_permutation().is_some() && p.cycles() == 1);
    let pass = !r.obstruction.is_zero() && r.p_free && !r.s_free && r.s_free_below_four && r.routes_agree && witness_cycle;
    let witness = match &r.witness {
        Some((p, w)) => format!("{p} on {}", w.join("")),
        None => "none".into(),
    };
    Ok((
        pass,
        format!(
            "κ_(0_2)(a)κ_(0_2)(b) = {}; P-free {}, S-free {} (S-free below level 4 {}), witness {witness}",
            r.obstruction, r.p_free, r.s_free, r.s_free_below_four
        ),
    ))
}

/// One line per criterion.
pub fn format_line(r: &CriterionResult) -> String {
    let status = match (r.pass, r.known_deviation.is_some()) {
        (true, _) => "PASS",
        (false, true) => "FAIL (known deviation)",
        (false, false) => "FAIL",
    };
    format!("criterion {:>2} [{}] {}: {status} ({:.1}s) {}", r.id, r.parts, r.name, r.seconds, r.measured)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn off_by_one(p: &Partition, q: &Partition) -> partlab_core::Result<(Partition, usize)> {
        let (r, k) = p.compose(q)?;
        Ok((r, k + 1))
    }

    #[test]
    fn tampered_composition_is_caught_with_a_pair() {
        let (pass, measured) = representation(off_by_one).unwrap();
        assert!(!pass);
        assert!(measured.contains(" ∘ ") || measured.contains("ρ("), "{measured}");
    }

    #[test]
    fn zero_samples_is_a_config_error() {
        let opts = VerifyOptions { level: Level::Mc, samples: Some(0), ..VerifyOptions::default() };
        assert!(matches!(verify_suite(&opts), Err(crate::error::CliError::Config { .. })));
    }

    #[test]
    fn dense_oracle_on_a_permutation() {
        // Tr(AB) for the transposition-free cycle ordering of two letters.
        let a = QMatrix::from_fn(2, |i, j| qi((i * 2 + j) as i64));
        let b = QMatrix::from_fn(2, |i, j| qi((i + 3 * j) as i64 - 1));
        let s = Partition::cycle(2);
        let t = dense_trace(&s, &[&a, &b], 2).unwrap();
        let ab = a.mul_naive(&b).trace();
        let ba = b.mul_naive(&a).trace();
        assert!(t == ab || t == ba);
    }
}
