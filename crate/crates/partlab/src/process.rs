//! Matrix Brownian motions and Lévy processes: samplers, generators and
//! closed-form reference moments.

use std::f64::consts::PI;

use num_traits::{Signed, ToPrimitive, Zero};
use partlab_core::npoly::{qi, qpow};
use partlab_core::spectral::{SpectralForm, SupportRule};
use partlab_core::{orbit_rep, Partition, Q};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ensemble::{gaussian_field, unit_vector, Field, Kind};
use crate::error::{invalid, Error, Result};
use crate::matrix::{CMatrix, C64};

/// Largest number of time steps a single path may take.
pub const MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LevyMode {
    Additive,
    Multiplicative,
}

/// `(η, a, ρ)` in the additive case, `(arg ω, b, ν)` in the multiplicative
/// one. Jump measures are finite sums of atoms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevyTriplet {
    pub mode: LevyMode,
    /// `η`, or the angle `arg ω`.
    pub eta: f64,
    /// `a`, or `b`.
    pub a: f64,
    /// `(location, weight)`; angles in `[−π, π]` in the multiplicative case.
    #[serde(default)]
    pub atoms: Vec<(f64, f64)>,
}

impl LevyTriplet {
    pub fn additive(eta: f64, a: f64, atoms: Vec<(f64, f64)>) -> Self {
        LevyTriplet { mode: LevyMode::Additive, eta, a, atoms }
    }

    pub fn multiplicative(arg_omega: f64, b: f64, atoms: Vec<(f64, f64)>) -> Self {
        LevyTriplet { mode: LevyMode::Multiplicative, eta: arg_omega, a: b, atoms }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.eta.is_finite() || !self.a.is_finite() || self.a < 0.0 {
            return invalid("drift must be finite and diffusion nonnegative");
        }
        for &(x, w) in &self.atoms {
            if !x.is_finite() || !w.is_finite() || w < 0.0 {
                return invalid(format!("bad atom ({x}, {w})"));
            }
            if x == 0.0 && w > 0.0 {
                return invalid("the jump measure charges the identity");
            }
            if self.mode == LevyMode::Multiplicative && x.abs() > PI {
                return invalid(format!("angle {x} outside [−π, π]"));
            }
        }
        Ok(())
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    fn integral(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * f(x)).sum()
    }

    fn draw_atom(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u = rng.random::<f64>() * self.mass();
        let mut acc = 0.0;
        for &(x, w) in &self.atoms {
            acc += w;
            if u < acc {
                return x;
            }
        }
        self.atoms.iter().rev().find(|a| a.1 > 0.0).map_or(0.0, |a| a.0)
    }
}

fn poisson(mean: f64, rng: &mut ChaCha8Rng) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| Error::InvalidArgument(format!("Poisson rate {mean}: {e}")))?;
    Ok(d.sample(rng) as u64)
}

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 {
        return invalid("steps must be at least 1");
    }
    if steps > MAX_STEPS {
        return Err(Error::Budget { what: "time steps".into(), needed: steps as u128, budget: MAX_STEPS as u128 });
    }
    Ok(())
}

/// Endpoint of a process kind at size `n`.
pub fn sample_process_rng(kind: &Kind, n: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    match kind {
        Kind::BmAdditive { epsilon, field, t } => Ok(gaussian_field(n, *epsilon, *field, t / n as f64, rng)),
        Kind::BmUnitary { field, t, steps } => {
            check_steps(*steps)?;
            Ok(unitary_bm_path(n, *field, *t, *steps, &[*steps], rng)?.remove(0))
        }
        Kind::LevyAdditive { triplet, t, steps } => {
            check_steps(*steps)?;
            levy_additive(triplet, n, *t, rng)
        }
        Kind::LevyMult { triplet, t, steps } => {
            check_steps(*steps)?;
            levy_multiplicative(triplet, n, *t, *steps, rng)
        }
        other => invalid(format!("{other} is not a process kind")),
    }
}

/// `U_{j+1} = exp(X_j) U_j` with `X_j` skew-Hermitian (antisymmetric over
/// the reals) of covariance `(Δ/N)(−(1,2) + (2−β)[1,2])`. Returns `U` after
/// each step listed in `checkpoints`.
pub fn unitary_bm_path(
    n: usize,
    field: Field,
    t: f64,
    steps: usize,
    checkpoints: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CMatrix>> {
    check_steps(steps)?;
    if let Some(&c) = checkpoints.iter().find(|&&c| c > steps) {
        return invalid(format!("checkpoint {c} after the last step {steps}"));
    }
    let dt = t / steps as f64;
    let mut u = CMatrix::identity(n);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut want: Vec<(usize, usize)> = checkpoints.iter().copied().enumerate().map(|(i, c)| (c, i)).collect();
    want.sort_unstable();
    let mut slots: Vec<Option<CMatrix>> = vec![None; checkpoints.len()];
    let mut next = 0;
    while next < want.len() && want[next].0 == 0 {
        slots[want[next].1] = Some(u.clone());
        next += 1;
    }
    for step in 1..=steps {
        let x = gaussian_field(n, -1, field, dt / n as f64, rng);
        u = x.expm_normal().mul(&u);
        while next < want.len() && want[next].0 == step {
            slots[want[next].1] = Some(u.clone());
            next += 1;
        }
    }
    out.extend(slots.into_iter().map(|s| s.expect("checkpoint filled")));
    Ok(out)
}

/// `X_t = (η − ∫_{|x|≤1} x ρ) t Id + √a H_t + Σ_{jumps} x v v*`, the jumps
/// arriving at rate `N|ρ|` with `v` uniform on the unit sphere of `C^N`.
fn levy_additive(tr: &LevyTriplet, n: usize, t: f64, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    let drift = tr.eta - tr.integral(|x| if x.abs() <= 1.0 { x } else { 0.0 });
    let mut x = if tr.a > 0.0 {
        gaussian_field(n, 1, Field::Complex, tr.a * t / n as f64, rng)
    } else {
        CMatrix::zeros(n)
    };
    for i in 0..n {
        x.set(i, i, x.get(i, i) + drift * t);
    }
    let jumps = poisson(n as f64 * tr.mass() * t, rng)?;
    for _ in 0..jumps {
        let size = tr.draw_atom(rng);
        let v = unit_vector(n, Field::Complex, rng);
        x.rank_one_update(C64::new(size, 0.0), &v, &v);
    }
    Ok(x)
}

/// Per step `Δ`: the central phase `exp(i(arg ω − ∫ sin θ ν)Δ)`, a unitary
/// Brownian increment of variance `bΔ`, then the rotations `e^{iθ}` along
/// uniform unit vectors arriving at rate `N|ν|`.
fn levy_multiplicative(tr: &LevyTriplet, n: usize, t: f64, steps: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    let dt = t / steps as f64;
    let phase = C64::from_polar(1.0, (tr.eta - tr.integral(f64::sin)) * dt);
    let mut u = CMatrix::identity(n);
    for _ in 0..steps {
        u = u.scale(phase);
        if tr.a > 0.0 {
            let x = gaussian_field(n, -1, Field::Complex, tr.a * dt / n as f64, rng);
            u = x.expm_normal().mul(&u);
        }
        let jumps = poisson(n as f64 * tr.mass() * dt, rng)?;
        for _ in 0..jumps {
            let theta = tr.draw_atom(rng);
            let v = unit_vector(n, Field::Complex, rng);
            // U ← (Id + (e^{iθ} − 1) v v*) U
            let w: Vec<C64> = (0..n).map(|j| (0..n).map(|i| v[i].conj() * u.get(i, j)).sum()).collect();
            u.rank_one_update(C64::from_polar(1.0, theta) - 1.0, &v, &w.iter().map(|z| z.conj()).collect::<Vec<_>>());
        }
    }
    Ok(u)
}

/// The processes with a known generator.
#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorKind {
    BmAdditive { epsilon: i8, field: Field },
    BmUnitary { field: Field },
    LevyAdditive(LevyTriplet),
    LevyMult(LevyTriplet),
}

fn to_q(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("{x} is not finite")))
}

/// `id_{k−m} ⊗ c`-type class with `c` a partition of the last `m` columns.
fn pad(c: &Partition, k: usize) -> Result<Partition> {
    Ok(Partition::identity(k - c.k()).tensor(c))
}

/// The limiting generator `R(G)` of a process, on classes of size `≤ kmax`.
pub fn generator_spectral_form(kind: &GeneratorKind, kmax: usize) -> Result<SpectralForm> {
    match kind {
        GeneratorKind::BmAdditive { epsilon, field } => {
            if *epsilon != 1 && *epsilon != -1 {
                return invalid("epsilon must be ±1");
            }
            let mut f = SpectralForm::infinitesimal(SupportRule::Irreducible);
            if kmax >= 2 {
                f.set(&Partition::transposition(2, 1, 2)?, qi(*epsilon as i64))?;
                f.set(&Partition::weyl(2, 1, 2)?, qi(2 - field.beta()))?;
            }
            Ok(f)
        }
        GeneratorKind::BmUnitary { field } => {
            let mut f = SpectralForm::infinitesimal(SupportRule::WeaklyIrreducible);
            for k in 1..=kmax {
                f.set(&Partition::identity(k), Q::new((-(k as i64)).into(), 2.into()))?;
                if k >= 2 {
                    f.set(&pad(&Partition::transposition(2, 1, 2)?, k)?, qi(-1))?;
                    f.set(&pad(&Partition::weyl(2, 1, 2)?, k)?, qi(2 - field.beta()))?;
                }
            }
            Ok(f)
        }
        GeneratorKind::LevyAdditive(tr) => {
            tr.validate()?;
            if tr.mode != LevyMode::Additive {
                return invalid("expected an additive triplet");
            }
            let mut f = SpectralForm::infinitesimal(SupportRule::Irreducible);
            for k in 1..=kmax {
                let v = match k {
                    1 => tr.eta + tr.integral(|x| if x.abs() > 1.0 { x } else { 0.0 }),
                    2 => tr.a + tr.integral(|x| x * x),
                    _ => tr.integral(|x| x.powi(k as i32)),
                };
                f.set(&Partition::cycle(k), exact_levy_value(tr, k, v)?)?;
            }
            Ok(f)
        }
        GeneratorKind::LevyMult(tr) => {
            tr.validate()?;
            if tr.mode != LevyMode::Multiplicative {
                return invalid("expected a multiplicative triplet");
            }
            let mut f = SpectralForm::infinitesimal(SupportRule::WeaklyIrreducible);
            let real_part = -tr.a / 2.0 + tr.integral(|th| th.cos() - 1.0);
            if tr.eta.abs() > 1e-12 {
                return invalid("the generator has a nonzero imaginary part on id_k (arg ω ≠ 0)");
            }
            for k in 1..=kmax {
                f.set(&Partition::identity(k), to_q(k as f64 * real_part)?)?;
                for m in 2..=k {
                    let z: C64 = tr.atoms.iter().map(|&(th, w)| (C64::from_polar(1.0, th) - 1.0).powu(m as u32) * w).sum();
                    if z.im.abs() > 1e-12 {
                        return invalid(format!("∫(ζ − 1)^{m} ν is not real"));
                    }
                    let mut v = z.re;
                    if m == 2 {
                        v -= tr.a;
                    }
                    f.set(&pad(&Partition::cycle(m), k)?, to_q(v)?)?;
                }
            }
            Ok(f)
        }
    }
}

/// Additive Lévy values are exact when drift, diffusion and atoms are
/// dyadic, which covers every triplet written with finite decimals of `f64`.
fn exact_levy_value(tr: &LevyTriplet, k: usize, fallback: f64) -> Result<Q> {
    let atom = |f: &dyn Fn(&Q) -> Q| -> Result<Q> {
        let mut s = Q::zero();
        for &(x, w) in &tr.atoms {
            s += to_q(w)? * f(&to_q(x)?);
        }
        Ok(s)
    };
    let one = qi(1);
    let v = match k {
        1 => to_q(tr.eta)? + atom(&|x: &Q| if x.abs() > one { x.clone() } else { Q::zero() })?,
        2 => to_q(tr.a)? + atom(&|x: &Q| x * x)?,
        _ => atom(&|x: &Q| qpow(x, k as i32))?,
    };
    debug_assert!((v.to_f64().unwrap_or(f64::NAN) - fallback).abs() <= 1e-9 * (1.0 + fallback.abs()));
    Ok(v)
}

/// Classes of `P_2` up to relabeling of the two columns, each with the
/// Gaussian construction whose generator has dual form `p*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ApproxClass {
    /// `{1,1'}{2,2'}`: `B·Id`.
    Id2,
    /// `{1,1',2,2'}`: independent diagonal entries.
    Zero2,
    /// All singletons: `B·J_N`.
    One2,
    /// `[1,2]`: iid real entries over `√N`.
    Weyl,
    /// `(1,2)`: Hermitian Brownian motion.
    Transposition,
    /// `{1,2}{1'}{2'}`: `H_ij = B^{(i)}/N`.
    RowBlock,
    /// `{1',2'}{1}{2}`: `H_ij = B^{(j)}/N`.
    ColumnBlock,
    /// `{1,2'}{2}{1'}`.
    Cross,
    /// `{1,1',2'}{2}`.
    Triple,
    /// `{1,1',2}{2'}`, the transpose of [`ApproxClass::Triple`].
    TripleTransposed,
    /// `{1,1'}{2}{2'}`: `B_1(Id + J) − iB_2 Id − iB_3 J`.
    IdSingletons,
}

pub const APPROX_CLASSES: [ApproxClass; 11] = [
    ApproxClass::Id2,
    ApproxClass::Zero2,
    ApproxClass::One2,
    ApproxClass::Weyl,
    ApproxClass::Transposition,
    ApproxClass::RowBlock,
    ApproxClass::ColumnBlock,
    ApproxClass::Cross,
    ApproxClass::Triple,
    ApproxClass::TripleTransposed,
    ApproxClass::IdSingletons,
];

impl ApproxClass {
    /// A representative partition, in text form.
    pub fn text(self) -> &'static str {
        match self {
            ApproxClass::Id2 => "{1 1'}{2 2'}",
            ApproxClass::Zero2 => "{1 1' 2 2'}",
            ApproxClass::One2 => "{1}{1'}{2}{2'}",
            ApproxClass::Weyl => "{1 2}{1' 2'}",
            ApproxClass::Transposition => "{1 2'}{2 1'}",
            ApproxClass::RowBlock => "{1 2}{1'}{2'}",
            ApproxClass::ColumnBlock => "{1' 2'}{1}{2}",
            ApproxClass::Cross => "{1 2'}{2}{1'}",
            ApproxClass::Triple => "{1 1' 2'}{2}",
            ApproxClass::TripleTransposed => "{1 1' 2}{2'}",
            ApproxClass::IdSingletons => "{1 1'}{2}{2'}",
        }
    }

    pub fn partition(self) -> Partition {
        self.text().parse().expect("valid class representative")
    }

    /// The partition outside the class that the construction also charges
    /// with cumulant `t` at every `N`: the diagonal part of the two triple
    /// constructions leaks into `B^{(j)}/N` (or its transpose).
    pub fn residual(self) -> Option<Partition> {
        match self {
            ApproxClass::Triple => Some(ApproxClass::ColumnBlock.partition()),
            ApproxClass::TripleTransposed => Some(ApproxClass::RowBlock.partition()),
            _ => None,
        }
    }

    /// The class containing `p`.
    pub fn of(p: &Partition) -> Result<ApproxClass> {
        if p.k() != 2 {
            return invalid("Gaussian approximants exist for classes of P_2 only");
        }
        let rep = orbit_rep(p)?;
        for c in APPROX_CLASSES {
            if orbit_rep(&c.partition())? == rep {
                return Ok(c);
            }
        }
        invalid(format!("no construction for {p}"))
    }
}

/// `H_t` of the construction for `class`, a linear image of the normals
/// drawn from `z`, each of variance `t`.
pub fn gaussian_approximant_with(class: ApproxClass, n: usize, t: f64, z: &mut dyn FnMut() -> f64) -> CMatrix {
    let s = t.sqrt();
    let nf = n as f64;
    let re = |x: f64| C64::new(x, 0.0);
    let mut draw = |count: usize| -> Vec<f64> { (0..count).map(|_| s * z()).collect() };
    match class {
        ApproxClass::Id2 => {
            let b = draw(1)[0];
            CMatrix::from_fn(n, |i, j| if i == j { re(b) } else { C64::zero() })
        }
        ApproxClass::Zero2 => {
            let b = draw(n);
            CMatrix::from_fn(n, |i, j| if i == j { re(b[i]) } else { C64::zero() })
        }
        ApproxClass::One2 => {
            let b = draw(1)[0];
            CMatrix::from_fn(n, |_, _| re(b / nf))
        }
        ApproxClass::Weyl => {
            let b = draw(n * n);
            CMatrix::from_fn(n, |i, j| re(b[i * n + j] / nf.sqrt()))
        }
        ApproxClass::Transposition => {
            let mut h = CMatrix::zeros(n);
            for i in 0..n {
                h.set(i, i, re(draw(1)[0] / nf.sqrt()));
                for j in i + 1..n {
                    let v = draw(2);
                    let x = C64::new(v[0], v[1]) / (2.0 * nf).sqrt();
                    h.set(i, j, x);
                    h.set(j, i, x.conj());
                }
            }
            h
        }
        ApproxClass::RowBlock => {
            let b = draw(n);
            CMatrix::from_fn(n, |i, _| re(b[i] / nf))
        }
        ApproxClass::ColumnBlock => {
            let b = draw(n);
            CMatrix::from_fn(n, |_, j| re(b[j] / nf))
        }
        ApproxClass::Cross => {
            let (b1, b2, b3) = (draw(n), draw(n), draw(n));
            CMatrix::from_fn(n, |i, j| C64::new(b1[i] + b1[j], -b2[i] - b3[j]) / nf)
        }
        ApproxClass::Triple | ApproxClass::TripleTransposed => {
            let (b1, b2) = (draw(n), draw(n));
            let h = CMatrix::from_fn(n, |i, j| {
                let d = if i == j { C64::new(b1[i], -b2[i]) } else { C64::zero() };
                d + re(b1[j] / nf)
            });
            if class == ApproxClass::Triple {
                h
            } else {
                h.transpose()
            }
        }
        ApproxClass::IdSingletons => {
            let b = draw(3);
            CMatrix::from_fn(n, |i, j| {
                let d = if i == j { C64::new(b[0], -b[1]) } else { C64::zero() };
                d + C64::new(b[0], -b[2]) / nf
            })
        }
    }
}

/// One sample of the approximant for `class` at time `t`.
pub fn gaussian_approximant(class: ApproxClass, n: usize, t: f64, seed: u64) -> Result<CMatrix> {
    if n == 0 || !(t >= 0.0) {
        return invalid("need N ≥ 1 and t ≥ 0");
    }
    let mut rng = crate::estimate::sample_rng(seed, 0);
    Ok(gaussian_approximant_with(class, n, t, &mut || rng.sample(StandardNormal)))
}

/// Closed-form limits of `m_{(1..k)}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    /// Semicircle law of variance one.
    Semicircle,
    /// Unitary Brownian motion at time `t`.
    UnitaryBm { t: f64 },
    /// Free Poisson law of rate `λ` and jump size one.
    FreePoisson { lambda: Q },
}

#[derive(Clone, Debug, PartialEq)]
pub enum RefValue {
    Exact(Q),
    Real(f64),
}

impl RefValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            RefValue::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            RefValue::Real(x) => *x,
        }
    }
}

fn binomial(n: u64, k: u64) -> Q {
    if k > n {
        return Q::zero();
    }
    (0..k).fold(qi(1), |acc, i| acc * qi((n - i) as i64) / qi((i + 1) as i64))
}

/// `#PNC_k`: noncrossing pairings of `k` points.
pub fn noncrossing_pairings(k: usize) -> Q {
    if k % 2 == 1 {
        return Q::zero();
    }
    let m = (k / 2) as u64;
    binomial(2 * m, m) / qi(m as i64 + 1)
}

/// `Σ_{π ∈ NC(k)} λ^{#π} = Σ_b N(k, b) λ^b` with Narayana numbers.
pub fn free_poisson_moment(k: usize, lambda: &Q) -> Q {
    let k64 = k as u64;
    (1..=k64).fold(Q::zero(), |acc, b| {
        acc + binomial(k64, b) * binomial(k64, b - 1) / qi(k as i64) * qpow(lambda, b as i32)
    })
}

/// `e^{−kt/2} Σ_{l<k} (−t)^l/l! · k^{l−1} · C(k, l+1)`.
pub fn unitary_bm_moment(k: usize, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let kf = k as f64;
    let mut sum = 0.0;
    let mut fact = 1.0;
    for l in 0..k {
        if l > 0 {
            fact *= l as f64;
        }
        let c = binomial(k as u64, l as u64 + 1).to_f64().unwrap_or(f64::NAN);
        sum += (-t).powi(l as i32) / fact * kf.powi(l as i32 - 1) * c;
    }
    (-kf * t / 2.0).exp() * sum
}

pub fn reference_moment(which: &Reference, k: usize) -> Result<RefValue> {
    if k == 0 {
        return invalid("k must be at least 1");
    }
    Ok(match which {
        Reference::Semicircle => RefValue::Exact(noncrossing_pairings(k)),
        Reference::UnitaryBm { t } => RefValue::Real(unitary_bm_moment(k, *t)),
        Reference::FreePoisson { lambda } => RefValue::Exact(free_poisson_moment(k, lambda)),
    })
}
