//! Predictor-against-simulation scenarios.

use std::path::Path;

use num_traits::{ToPrimitive, Zero};
use partlab::ensemble::{Field, Kind};
use partlab::estimate::McConfig;
use partlab::moments::{classical_bridge, classical_bridge_mc, classical_cumulants, mc_word, Entry, MatrixFamily};
use partlab::process::{
    free_poisson_moment, generator_spectral_form, noncrossing_pairings, unitary_bm_moment, GeneratorKind, LevyMode,
};
use partlab::invariance::strong_invariance_diagnostic;
use partlab_core::free::below;
use partlab_core::npoly::q;
use partlab_core::spectral::{boxtimes_evolution_from, exp_boxplus};
use partlab_core::table::{constant_word, Label};
use partlab_core::{orbit_rep, FamilyTag, Partition, Q};

use serde::Serialize;

use crate::config::{Resolved, Scenario};
use crate::error::{config_err, CliError, Result};
use crate::experiments::{
    approximant_cumulants_mc, cycle_moments_mc, jn_entry_check, jn_first_entry, linear_fit, mixed_cumulants,
    unitary_bm_mc, wick_mc,
};
use crate::report::{write_reports, Key, ResultRecord, Summary, Tolerance, Written};

fn f(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn q_of(x: f64, path: &str) -> Result<Q> {
    match Q::from_float(x) {
        Some(v) => Ok(v),
        None => config_err(path, format!("{x} is not finite")),
    }
}

fn mc(r: &Resolved) -> McConfig {
    McConfig::new(r.samples, r.seed()).with_threads(r.threads)
}

/// Runs the configured scenario and returns its records in a fixed order.
pub fn run_experiment(r: &Resolved) -> Result<Vec<ResultRecord>> {
    match r.scenario {
        Scenario::Semicircle => semicircle(r),
        Scenario::UnitaryBm => unitary_bm(r),
        Scenario::Wick => wick(r),
        Scenario::FreePoisson => free_poisson(r),
        Scenario::FreenessScaling => freeness_scaling(r),
        Scenario::Entries => entries(r),
        Scenario::ClassicalBridge => bridge(r),
        Scenario::GaussianApprox => gaussian_approx(r),
        Scenario::StrongInvariance => strong_invariance(r),
    }
}

/// Runs the scenario and writes `<scenario>.csv` and `<scenario>.json`
/// (or the configured paths, relative to `out_dir`).
pub fn simulate(r: &Resolved, out_dir: &Path) -> Result<(Summary, Written)> {
    let records = run_experiment(r)?;
    let summary = Summary::new(r.scenario.name(), r.seed, records);
    let csv = out_dir.join(r.output.csv.clone().unwrap_or_else(|| format!("{}.csv", r.scenario).into()));
    let json = out_dir.join(r.output.json.clone().unwrap_or_else(|| format!("{}.json", r.scenario).into()));
    let written = write_reports(&summary, &csv, &json)?;
    Ok((summary, written))
}

fn semicircle(r: &Resolved) -> Result<Vec<ResultRecord>> {
    let name = r.scenario.name();
    let (label, kind) = r.family.iter().next().expect("validated");
    let kmax = *r.ks.iter().max().expect("validated");
    let mut out = Vec::new();
    for &n in &r.ns {
        let est = cycle_moments_mc(kind, n, kmax, &mc(r))?;
        for &k in &r.ks {
            let e = &est[k - 1];
            let key = Key::new("mc", k, Partition::cycle(k), n).note(format!("{label}: {kind}"));
            out.push(ResultRecord::judge(name, key, e.mean(), e.stderr(), f(&noncrossing_pairings(k)), &r.tolerance));
        }
    }
    Ok(out)
}

fn unitary_bm(r: &Resolved) -> Result<Vec<ResultRecord>> {
    let name = r.scenario.name();
    if r.ts.is_empty() {
        return config_err("/t", "must not be empty");
    }
    let kmax = *r.ks.iter().max().expect("validated");
    let grid: Vec<Q> = r.ts.iter().enumerate().map(|(i, &t)| q_of(t, &format!("/t/{i}"))).collect::<Result<_>>()?;
    let phi = generator_spectral_form(&GeneratorKind::BmUnitary { field: r.field }, kmax)?;
    let targets: Vec<Partition> = r.ks.iter().map(|&k| Partition::cycle(k)).collect();
    let ode = boxtimes_evolution_from(&phi, &targets, &grid, 1e-13)?;
    let mut out = Vec::new();
    let ode_tol = Tolerance::max(0.0, 1e-8);
    for (i, &t) in r.ts.iter().enumerate() {
        for &k in &r.ks {
            let got = ode.get(i, &Partition::cycle(k)).unwrap_or(f64::NAN);
            let key = Key::new("ode", k, Partition::cycle(k), 0).at(t);
            out.push(ResultRecord::judge(name, key, got, 0.0, unitary_bm_moment(k, t), &ode_tol));
        }
    }
    // One path per sample up to the largest time, observed at each grid time.
    let t_end = r.ts.iter().copied().fold(0.0, f64::max);
    let mut checkpoints = Vec::new();
    for (i, &t) in r.ts.iter().enumerate() {
        let c = if t_end > 0.0 { t / t_end * r.steps as f64 } else { 0.0 };
        if (c - c.round()).abs() > 1e-9 {
            return config_err(&format!("/t/{i}"), format!("time {t} does not fall on the step grid"));
        }
        checkpoints.push(c.round() as usize);
    }
    for &n in &r.ns {
        let est = unitary_bm_mc(n, r.field, t_end, r.steps, &checkpoints, kmax, &mc(r))?;
        for (i, &t) in r.ts.iter().enumerate() {
            for &k in &r.ks {
                let e = &est[i][k - 1];
                let key = Key::new("mc", k, Partition::cycle(k), n).at(t).note(format!("{} steps to t = {t_end}", r.steps));
                out.push(ResultRecord::judge(name, key, e.mean(), e.stderr(), unitary_bm_moment(k, t), &r.tolerance));
            }
        }
    }
    Ok(out)
}

fn wick(r: &Resolved) -> Result<Vec<ResultRecord>> {
    let name = r.scenario.name();
    let mut out = Vec::new();
    for (label, kind) in &r.family {
        let field = if matches!(kind, Kind::Gue) { Field::Complex } else { Field::Real };
        for &n in &r.ns {
            for &k in &r.ks {
                let c = wick_mc(field, n, k, &mc(r))?;
                let ker = Partition::kernel(&c.worst)?;
                let dev = (c.estimate - c.prediction).norm();
                let key = Key::new("mc-worst-entry", k, &ker, n).note(format!(
                    "{label}: entry {:?} of {}, im {:?}, ratio {:.3}",
                    c.worst, c.entries, c.estimate.im, c.max_ratio
                ));
                let mut rec = ResultRecord::judge(name, key, c.estimate.re, c.stderr, c.prediction, &r.tolerance);
                rec.abs_error = dev;
                rec.pass = dev <= rec.tolerance;
                out.push(rec);
            }
        }
    }
    Ok(out)
}

fn free_poisson(r: &Resolved) -> Result<Vec<ResultRecord>> {
    let name = r.scenario.name();
    if r.triplet.mode != LevyMode::Additive {
        return config_err("/triplet/mode", "the free Poisson scenario takes an additive triplet");
    }
    let kmax = *r.ks.iter().max().expect("validated");
    let phi = generator_spectral_form(&GeneratorKind::LevyAdditive(r.triplet.clone()), kmax)?;
    // (η, 0, λδ_1) with η = λ is the free Poisson law of rate λt.
    let lambda = match r.triplet.atoms.as_slice() {
        [(x, w)] if *x == 1.0 && r.triplet.a == 0.0 && r.triplet.eta == *w => Some(*w),
        _ => None,
    };
    let mut out = Vec::new();
    for (i, &t) in r.ts.iter().enumerate() {
        let tq = q_of(t, &format!("/t/{i}"))?;
        let mut predictions = Vec::new();
        for &k in &r.ks {
            let m: Q = below(&Partition::cycle(k), FamilyTag::S)?
                .iter()
                .map(|s| exp_boxplus(&phi, &tq, s))
                .collect::<partlab_core::Result<Vec<Q>>>()?
                .into_iter()
                .fold(Q::zero(), |a, b| a + b);
            if let Some(l) = lambda {
                let want = free_poisson_moment(k, &(q_of(l, "/triplet")? * &tq));
                let key = Key::new("exact", k, Partition::cycle(k), 0).at(t).note("exp_boxplus against noncrossing sum");
                out.push(ResultRecord::judge(name, key, f(&m), 0.0, f(&want), &Tolerance::exact()));
            }
            predictions.push(f(&m));
        }
        let kind = Kind::LevyAdditive { triplet: r.triplet.clone(), t, steps: r.steps };
        for &n in &r.ns {
            let est = cycle_moments_mc(&kind, n, kmax, &mc(r))?;
            for (j, &k) in r.ks.iter().enumerate() {
                let e = &est[k - 1];
                let key = Key::new("mc", k, Partition::cycle(k), n).at(t);
                out.push(ResultRecord::judge(name, key, e.mean(), e.stderr(), predictions[j], &r.tolerance));
            }
        }
    }
    Ok(out)
}

fn freeness_scaling(r: &Resolved) -> Result<Vec<ResultRecord>> {
    let name = r.scenario.name();
    let mut ns = r.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut out = Vec::new();
    let mut lattice = Vec::new();
    for &n in &ns {
        if n < 8 {
            return config_err("/N", "the level-four Gram matrix needs N ≥ 8");
        }
        let m = mixed_cumulants(n, &r.diagonal)?;
        let key = Key::new("gram-mixed", 4, &m.argmax, n).note("max |κ| of the finite-dimensional mixed cumulants");
        out.push(ResultRecord::judge(name, key, m.gram_max, 0.0, 0.0, &Tolerance::exact()));
        lattice.push(m);
    }
    // Monotone decrease: each value against the one at the previous N.
    for (i, m) in lattice.iter().enumerate() {
        let prev = if i == 0 { m.lattice_max } else { lattice[i - 1].lattice_max };
        let key = Key::new("lattice-mixed", 4, &m.argmax, m.n)
            .note("max |κ| of the lattice cumulants of the moment table; must not exceed the previous N");
        let mut rec = ResultRecord::judge(name, key, m.lattice_max, 0.0, prev, &Tolerance::exact());
        rec.abs_error = (m.lattice_max - prev).max(0.0);
        rec.pass = rec.abs_error <= rec.tolerance;
        out.push(rec);
    }
    if lattice.len() >= 2 {
        let x: Vec<f64> = lattice.iter().map(|m| 1.0 / m.n as f64).collect();
        let y: Vec<f64> = lattice.iter().map(|m| m.lattice_max).collect();
        let (a, b, r2) = linear_fit(&x, &y);
        let key = Key::new("fit-r2", 4, "", 0).note(format!("max |κ| ≈ {a:?} + {b:?}/N"));
        out.push(ResultRecord::judge(name, key, r2, 0.0, 1.0, &r.tolerance));
    }
    Ok(out)
}

fn entries(r: &Resolved) -> Result<Vec<ResultRecord>> {
    let name = r.scenario.name();
    let mut out = Vec::new();
    for &n in &r.ns {
        let got = jn_first_entry(n)?;
        let key = Key::new("exact", 1, Partition::identity(1), n).note("E[(J_N)_11] from the entry formula");
        out.push(ResultRecord::judge(name, key, f(&got), 0.0, 1.0 / n as f64, &Tolerance::exact()));
        for &k in &r.ks {
            if n < 2 * k {
                continue;
            }
            let (checked, bad) = jn_entry_check(n, k)?;
            let note = match &bad {
                None => format!("all {checked} index tuples of J_N"),
                Some(t) => format!("mismatch at {t:?}"),
            };
            let key = Key::new("exact-tuples", k, "", n).note(note);
            out.push(ResultRecord::judge(name, key, bad.is_some() as u8 as f64, 0.0, 0.0, &Tolerance::exact()));
        }
    }
    let (label, kind) = r.family.iter().next().expect("validated");
    let word: Vec<Label> = constant_word(label, 2);
    for &n in &r.ns {
        let fam = MatrixFamily::new(n, r.seed()).with_budget(r.budget).with(label, Entry::Random(kind.clone()))?;
        let vals = mc_word(&fam, &word, &mc(r), |m| Ok(*m[0].get(0, 0) * *m[1].get(0, 1)))?;
        let mut e = partlab::estimate::ComplexEstimate::default();
        vals.iter().for_each(|z| e.push(*z));
        let ker = Partition::kernel(&[0, 0, 0, 1])?;
        let key = Key::new("mc", 2, &ker, n).note(format!("|E[M_11 M_12]| for {kind}"));
        out.push(ResultRecord::judge(name, key, e.mean().norm(), e.stderr(), 0.0, &r.tolerance));
    }
    Ok(out)
}

fn bridge(r: &Resolved) -> Result<Vec<ResultRecord>> {
    let name = r.scenario.name();
    let kmax = *r.ks.iter().max().expect("validated");
    let moments = r.law.moments(kmax);
    let classical = classical_cumulants(&moments);
    let mut out = Vec::new();
    for &l in &r.ns {
        for &k in &r.ks {
            let got = classical_bridge(&moments, k, l)?;
            let key = Key::new("exact", k, Partition::zero(k), l).note(format!("{:?}; classical cumulant {}", r.law, classical[k - 1]));
            let mut rec = ResultRecord::judge(name, key, f(&got), 0.0, f(&classical[k - 1]), &Tolerance::exact());
            rec.pass = got == classical[k - 1];
            out.push(rec);
            if r.seed.is_some() && r.samples > 0 {
                let e = classical_bridge_mc(&r.law, k, l, &mc(r))?;
                let key = Key::new("mc", k, Partition::zero(k), l);
                out.push(ResultRecord::judge(name, key, e.mean(), e.stderr(), f(&classical[k - 1]), &r.tolerance));
            }
        }
    }
    Ok(out)
}

fn gaussian_approx(r: &Resolved) -> Result<Vec<ResultRecord>> {
    let name = r.scenario.name();
    let t = r.ts.first().copied().unwrap_or(1.0);
    let mut out = Vec::new();
    for &class in &r.classes {
        let rep = orbit_rep(&class.partition())?;
        for &n in &r.ns {
            for (p, e) in approximant_cumulants_mc(class, n, t, &mc(r), r.budget)? {
                let want = if orbit_rep(&p)? == rep || class.residual().as_ref() == Some(&p) { t } else { 0.0 };
                let key = Key::new("mc", 2, &p, n).at(t).note(format!("construction for {}", class.text()));
                out.push(ResultRecord::judge(name, key, e.mean(), e.stderr(), want, &r.tolerance));
            }
        }
    }
    Ok(out)
}

fn strong_invariance(r: &Resolved) -> Result<Vec<ResultRecord>> {
    let name = r.scenario.name();
    let first = r.family.keys().next().expect("validated").clone();
    let mut out = Vec::new();
    for &n in &r.ns {
        let mut fam = MatrixFamily::new(n, r.seed()).with_budget(r.budget);
        for (label, kind) in &r.family {
            fam.insert(label, Entry::Random(kind.clone()))?;
        }
        for &k in &r.ks {
            let word = match &r.word {
                Some(w) if w.len() == k => w.clone(),
                Some(_) => continue,
                None => constant_word(&first, k),
            };
            let diag = strong_invariance_diagnostic(&fam, k, &word, &mc(r))?;
            for (p, e) in diag {
                let key = Key::new("discrepancy", k, &p, n).note(format!("{} tuples, word {word:?}", e.tuples));
                out.push(ResultRecord::judge(name, key, e.discrepancy, e.noise, 0.0, &r.tolerance));
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Input("no level matches the length of the configured word".into()));
    }
    Ok(out)
}

/// `Σ_{σ ≤ (1..k)} e^{⊞φ}(σ)` for the triplet `(λ, 0, λδ_1)` at time one.
pub fn free_poisson_prediction(lambda: &Q, k: usize) -> Result<Q> {
    let l = lambda.to_f64().unwrap_or(f64::NAN);
    let phi = generator_spectral_form(
        &GeneratorKind::LevyAdditive(partlab::process::LevyTriplet::additive(l, 0.0, vec![(1.0, l)])),
        k,
    )?;
    let mut m = Q::zero();
    for s in below(&Partition::cycle(k), FamilyTag::S)? {
        m += exp_boxplus(&phi, &q(1, 1), &s)?;
    }
    Ok(m)
}

/// A predicted value, computed without sampling.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub scenario: String,
    pub k: usize,
    pub partition: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub t: Option<f64>,
    pub prediction: f64,
    /// The exact rational value when there is one.
    pub exact: Option<String>,
    pub note: String,
}

impl Prediction {
    fn new(r: &Resolved, k: usize, partition: impl ToString, n: usize, t: Option<f64>, value: f64) -> Self {
        Prediction {
            scenario: r.scenario.name().into(),
            k,
            partition: partition.to_string(),
            n,
            t,
            prediction: value,
            exact: None,
            note: String::new(),
        }
    }

    fn rational(mut self, x: &Q) -> Self {
        self.exact = Some(x.to_string());
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// The predictor side of a scenario. Nothing is sampled.
pub fn predict(r: &Resolved) -> Result<Vec<Prediction>> {
    let kmax = *r.ks.iter().max().expect("validated");
    let mut out = Vec::new();
    match r.scenario {
        Scenario::Semicircle => {
            for &k in &r.ks {
                let c = noncrossing_pairings(k);
                out.push(Prediction::new(r, k, Partition::cycle(k), 0, None, f(&c)).rational(&c));
            }
        }
        Scenario::UnitaryBm => {
            let grid: Vec<Q> = r.ts.iter().enumerate().map(|(i, &t)| q_of(t, &format!("/t/{i}"))).collect::<Result<_>>()?;
            let phi = generator_spectral_form(&GeneratorKind::BmUnitary { field: r.field }, kmax)?;
            let targets: Vec<Partition> = r.ks.iter().map(|&k| Partition::cycle(k)).collect();
            let ode = boxtimes_evolution_from(&phi, &targets, &grid, 1e-13)?;
            for (i, &t) in r.ts.iter().enumerate() {
                for &k in &r.ks {
                    let v = ode.get(i, &Partition::cycle(k)).unwrap_or(f64::NAN);
                    out.push(Prediction::new(r, k, Partition::cycle(k), 0, Some(t), v).note("boxtimes evolution"));
                }
            }
        }
        Scenario::Wick => {
            for (label, kind) in &r.family {
                let field = if matches!(kind, Kind::Gue) { Field::Complex } else { Field::Real };
                for &n in &r.ns {
                    for &k in &r.ks {
                        // Entries depend only on the kernel of the index tuple.
                        let tensor = crate::experiments::wick_prediction(field, n, k)?;
                        let mut by_kernel = std::collections::BTreeMap::new();
                        let mut tuple = vec![0u64; 2 * k];
                        for (e, &v) in tensor.iter().enumerate() {
                            if v != 0.0 {
                                let mut x = e;
                                for d in tuple.iter_mut().rev() {
                                    *d = (x % n) as u64;
                                    x /= n;
                                }
                                by_kernel.entry(Partition::kernel(&tuple)?).or_insert(v);
                            }
                        }
                        for (p, v) in by_kernel {
                            out.push(Prediction::new(r, k, p, n, None, v).note(format!("{label}: entry with this kernel")));
                        }
                    }
                }
            }
        }
        Scenario::FreePoisson => {
            let phi = generator_spectral_form(&GeneratorKind::LevyAdditive(r.triplet.clone()), kmax)?;
            for (i, &t) in r.ts.iter().enumerate() {
                let tq = q_of(t, &format!("/t/{i}"))?;
                for &k in &r.ks {
                    let mut m = Q::zero();
                    for s in below(&Partition::cycle(k), FamilyTag::S)? {
                        m += exp_boxplus(&phi, &tq, &s)?;
                    }
                    out.push(Prediction::new(r, k, Partition::cycle(k), 0, Some(t), f(&m)).rational(&m));
                }
            }
        }
        Scenario::FreenessScaling => {
            for &n in &r.ns {
                if n < 8 {
                    return config_err("/N", "the level-four Gram matrix needs N ≥ 8");
                }
                let m = mixed_cumulants(n, &r.diagonal)?;
                out.push(Prediction::new(r, 4, &m.argmax, n, None, m.gram_max).note("max |κ|, finite-dimensional mixed cumulants"));
                out.push(Prediction::new(r, 4, &m.argmax, n, None, m.lattice_max).note("max |κ|, lattice mixed cumulants"));
            }
        }
        Scenario::Entries => {
            for &n in &r.ns {
                let v = jn_first_entry(n)?;
                out.push(Prediction::new(r, 1, Partition::identity(1), n, None, f(&v)).rational(&v).note("E[(J_N)_11]"));
                let ker = Partition::kernel(&[0, 0, 0, 1])?;
                out.push(Prediction::new(r, 2, ker, n, None, 0.0).note("E[M_11 M_12] for an invariant family"));
            }
        }
        Scenario::ClassicalBridge => {
            let moments = r.law.moments(kmax);
            for &l in &r.ns {
                for &k in &r.ks {
                    let v = classical_bridge(&moments, k, l)?;
                    out.push(Prediction::new(r, k, Partition::zero(k), l, None, f(&v)).rational(&v));
                }
            }
        }
        Scenario::GaussianApprox => {
            let t = r.ts.first().copied().unwrap_or(1.0);
            for &class in &r.classes {
                let rep = orbit_rep(&class.partition())?;
                for &n in &r.ns {
                    out.push(Prediction::new(r, 2, rep.clone(), n, Some(t), t).note("the class of the construction"));
                    if let Some(p) = class.residual() {
                        out.push(Prediction::new(r, 2, p, n, Some(t), t).note("residual charge of the construction"));
                    }
                }
            }
        }
        Scenario::StrongInvariance => {
            for &n in &r.ns {
                for &k in &r.ks {
                    out.push(Prediction::new(r, k, "", n, None, 0.0).note("discrepancy vanishes for every partition"));
                }
            }
        }
    }
    Ok(out)
}
