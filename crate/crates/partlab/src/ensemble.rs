//! Sample specifications and the samplers behind them.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_traits::{One, ToPrimitive, Zero};
use partlab_core::Q;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::estimate::sample_rng;
use crate::matrix::{CMatrix, C64};
use crate::process::{self, LevyTriplet};

/// Scalar field of a Gaussian or group-valued ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// `β`: 1 over the reals, 2 over the complexes.
    pub fn beta(self) -> i64 {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }
}

impl FromStr for Field {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "real" | "R" => Ok(Field::Real),
            "complex" | "C" => Ok(Field::Complex),
            other => invalid(format!("unknown field {other:?}")),
        }
    }
}

/// Groups with a Haar sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Group {
    U,
    O,
    S,
    H,
    B,
}

impl FromStr for Group {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "U" => Ok(Group::U),
            "O" => Ok(Group::O),
            "S" => Ok(Group::S),
            "H" => Ok(Group::H),
            "B" => Ok(Group::B),
            other => invalid(format!("unsupported group {other:?}")),
        }
    }
}

/// A real law given exactly, for diagonal iid ensembles.
#[derive(Clone, Debug, PartialEq)]
pub enum Law {
    Bernoulli(Q),
    Constant(Q),
    Normal { mean: Q, var: Q },
    /// `(location, weight)` pairs with weights summing to one.
    Atoms(Vec<(Q, Q)>),
}

fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: i64 = num.parse().map_err(|_| Error::InvalidArgument(format!("bad rational {s:?}")))?;
    let d: i64 = den.parse().map_err(|_| Error::InvalidArgument(format!("bad rational {s:?}")))?;
    if d == 0 {
        return invalid(format!("zero denominator in {s:?}"));
    }
    Ok(partlab_core::npoly::q(n, d))
}

fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl Law {
    /// `E[X^j]` for `j = 1..=k`.
    pub fn moments(&self, k: usize) -> Vec<Q> {
        (1..=k).map(|j| self.moment(j)).collect()
    }

    pub fn moment(&self, j: usize) -> Q {
        match self {
            Law::Bernoulli(p) => p.clone(),
            Law::Constant(c) => partlab_core::npoly::qpow(c, j as i32),
            Law::Atoms(atoms) => atoms
                .iter()
                .map(|(x, w)| w * partlab_core::npoly::qpow(x, j as i32))
                .fold(Q::zero(), |a, b| a + b),
            Law::Normal { mean, var } => {
                // E[(μ + σZ)^j] = Σ_i C(j, 2i) μ^{j−2i} σ^{2i} (2i−1)!!
                let mut total = Q::zero();
                let mut binom = Q::one();
                let mut dfact = Q::one();
                for i in 0..=j / 2 {
                    if i > 0 {
                        let (a, b) = ((j - 2 * i + 2) as i64, (j - 2 * i + 1) as i64);
                        binom = binom * partlab_core::npoly::qi(a * b) / partlab_core::npoly::qi((2 * i * (2 * i - 1)) as i64);
                        dfact *= partlab_core::npoly::qi(2 * i as i64 - 1);
                    }
                    total += &binom
                        * partlab_core::npoly::qpow(mean, (j - 2 * i) as i32)
                        * partlab_core::npoly::qpow(var, i as i32)
                        * &dfact;
                }
                total
            }
        }
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Law::Bernoulli(p) => f64::from(rng.random::<f64>() < to_f64(p)),
            Law::Constant(c) => to_f64(c),
            Law::Normal { mean, var } => to_f64(mean) + to_f64(var).sqrt() * rng.sample::<f64, _>(StandardNormal),
            Law::Atoms(atoms) => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (x, w) in atoms {
                    acc += to_f64(w);
                    if u < acc {
                        return to_f64(x);
                    }
                }
                atoms.last().map_or(0.0, |(x, _)| to_f64(x))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Law::Bernoulli(p) if *p < Q::zero() || *p > Q::one() => invalid("Bernoulli parameter outside [0, 1]"),
            Law::Normal { var, .. } if *var < Q::zero() => invalid("negative variance"),
            Law::Atoms(atoms) => {
                if atoms.iter().any(|(_, w)| *w < Q::zero()) {
                    return invalid("negative atom weight");
                }
                let total = atoms.iter().fold(Q::zero(), |a, (_, w)| a + w);
                if total != Q::one() {
                    return invalid("atom weights must sum to 1");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for Law {
    type Err = Error;
    /// `bernoulli:p`, `const:c`, `normal:mean,var`, `atoms:x@w;x@w`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let law = match name.trim() {
            "bernoulli" => Law::Bernoulli(parse_q(args)?),
            "const" => Law::Constant(parse_q(args)?),
            "normal" => {
                let (m, v) = args.split_once(',').ok_or_else(|| Error::InvalidArgument("normal:mean,var".into()))?;
                Law::Normal { mean: parse_q(m)?, var: parse_q(v)? }
            }
            "atoms" => Law::Atoms(
                args.split(';')
                    .map(|a| {
                        let (x, w) = a.split_once('@').ok_or_else(|| Error::InvalidArgument(format!("bad atom {a:?}")))?;
                        Ok((parse_q(x)?, parse_q(w)?))
                    })
                    .collect::<Result<_>>()?,
            ),
            other => return invalid(format!("unknown law {other:?}")),
        };
        law.validate()?;
        Ok(law)
    }
}

/// What a [`SampleSpec`] draws.
#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    /// Hermitian Gaussian, `E[M ⊗ M] = ρ((1,2))/N`.
    Gue,
    /// Real symmetric Gaussian, `E[M ⊗ M] = (ρ((1,2)) + ρ([1,2]))/N`.
    Goe,
    /// Real antisymmetric Gaussian, `E[M ⊗ M] = (ρ([1,2]) − ρ((1,2)))/N`.
    AntisymGaussian,
    Haar(Group),
    DiagIid(Law),
    /// `J_N`, every entry `1/N`.
    Jn,
    Const(CMatrix),
    /// `g M g*` with `g` Haar in `group`, independent of `M`.
    Conjugated(Group, Box<Kind>),
    BmAdditive { epsilon: i8, field: Field, t: f64 },
    BmUnitary { field: Field, t: f64, steps: usize },
    LevyAdditive { triplet: LevyTriplet, t: f64, steps: usize },
    LevyMult { triplet: LevyTriplet, t: f64, steps: usize },
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Gue => write!(f, "gue"),
            Kind::Goe => write!(f, "goe"),
            Kind::AntisymGaussian => write!(f, "antisym-gaussian"),
            Kind::Haar(g) => write!(f, "haar:{g:?}"),
            Kind::DiagIid(l) => write!(f, "diag-iid:{l:?}"),
            Kind::Jn => write!(f, "jn"),
            Kind::Const(m) => write!(f, "const:{}x{}", m.n(), m.n()),
            Kind::Conjugated(g, k) => write!(f, "conj:{g:?}:{k}"),
            Kind::BmAdditive { epsilon, field, t } => write!(f, "bm-additive:{epsilon},{field:?},{t}"),
            Kind::BmUnitary { field, t, steps } => write!(f, "bm-unitary:{field:?},{t},{steps}"),
            Kind::LevyAdditive { t, steps, .. } => write!(f, "levy-additive:{t},{steps}"),
            Kind::LevyMult { t, steps, .. } => write!(f, "levy-mult:{t},{steps}"),
        }
    }
}

impl FromStr for Kind {
    type Err = Error;
    /// The textual kinds; `const` and the Lévy kinds need structured input.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let nums = |rest: &str| -> Vec<String> { rest.split(',').map(|x| x.trim().to_string()).collect() };
        let float = |x: &str| -> Result<f64> {
            x.parse().map_err(|_| Error::InvalidArgument(format!("bad number {x:?} in {s:?}")))
        };
        let kind = match head {
            "gue" => Kind::Gue,
            "goe" => Kind::Goe,
            "antisym-gaussian" => Kind::AntisymGaussian,
            "jn" => Kind::Jn,
            "haar" => Kind::Haar(rest.parse()?),
            "diag-iid" => Kind::DiagIid(rest.parse()?),
            "conj" => {
                let (g, inner) = rest.split_once(':').ok_or_else(|| Error::InvalidArgument("conj:<group>:<kind>".into()))?;
                Kind::Conjugated(g.parse()?, Box::new(inner.parse()?))
            }
            "bm-additive" => {
                let a = nums(rest);
                if a.len() != 3 {
                    return invalid("bm-additive:<epsilon>,<field>,<t>");
                }
                let epsilon: i8 = a[0].parse().map_err(|_| Error::InvalidArgument("epsilon must be ±1".into()))?;
                Kind::BmAdditive { epsilon, field: a[1].parse()?, t: float(&a[2])? }
            }
            "bm-unitary" => {
                let a = nums(rest);
                if a.len() != 3 {
                    return invalid("bm-unitary:<field>,<t>,<steps>");
                }
                let steps = a[2].parse().map_err(|_| Error::InvalidArgument("steps must be an integer".into()))?;
                Kind::BmUnitary { field: a[0].parse()?, t: float(&a[1])?, steps }
            }
            other => return invalid(format!("unknown or structured kind {other:?}")),
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl Kind {
    pub fn validate(&self) -> Result<()> {
        match self {
            Kind::BmAdditive { epsilon, t, .. } => {
                if *epsilon != 1 && *epsilon != -1 {
                    return invalid("epsilon must be ±1");
                }
                if !(*t >= 0.0) {
                    return invalid("time must be nonnegative");
                }
            }
            Kind::BmUnitary { t, steps, .. } => {
                if *steps == 0 {
                    return invalid("steps must be at least 1");
                }
                if !(*t >= 0.0) {
                    return invalid("time must be nonnegative");
                }
            }
            Kind::LevyAdditive { triplet, t, steps } | Kind::LevyMult { triplet, t, steps } => {
                if *steps == 0 {
                    return invalid("steps must be at least 1");
                }
                if !(*t >= 0.0) {
                    return invalid("time must be nonnegative");
                }
                triplet.validate()?;
                let want = if matches!(self, Kind::LevyAdditive { .. }) {
                    process::LevyMode::Additive
                } else {
                    process::LevyMode::Multiplicative
                };
                if triplet.mode != want {
                    return invalid("triplet mode does not match the process kind");
                }
            }
            Kind::Conjugated(_, inner) => inner.validate()?,
            Kind::DiagIid(l) => l.validate()?,
            _ => {}
        }
        Ok(())
    }

    /// Whether every sample is the same matrix.
    pub fn is_deterministic(&self) -> bool {
        matches!(self, Kind::Jn | Kind::Const(_) | Kind::DiagIid(Law::Constant(_)))
    }
}

/// A labeled ensemble with its size and seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpec {
    pub kind: Kind,
    pub n: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(kind: Kind, n: usize, seed: u64) -> Result<Self> {
        kind.validate()?;
        if n == 0 {
            return invalid("N must be positive");
        }
        if let Kind::Const(m) = &kind {
            if m.n() != n {
                return invalid(format!("constant matrix is {}×{}, N = {n}", m.n(), m.n()));
            }
        }
        Ok(SampleSpec { kind, n, seed })
    }

    /// Sample number `index` of the stream.
    pub fn sample(&self, index: u64) -> Result<CMatrix> {
        sample_kind(&self.kind, self.n, &mut sample_rng(self.seed, index))
    }
}

/// One draw of `kind` at size `n`.
pub fn sample_kind(kind: &Kind, n: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    let s = 1.0 / n as f64;
    Ok(match kind {
        Kind::Gue => gaussian_field(n, 1, Field::Complex, s, rng),
        Kind::Goe => gaussian_field(n, 1, Field::Real, s, rng),
        Kind::AntisymGaussian => gaussian_field(n, -1, Field::Real, s, rng),
        Kind::Haar(g) => haar_sample_rng(*g, n, rng)?,
        Kind::DiagIid(law) => {
            let d: Vec<C64> = (0..n).map(|_| C64::new(law.sample(rng), 0.0)).collect();
            CMatrix::diagonal(&d)
        }
        Kind::Jn => CMatrix::from_fn(n, |_, _| C64::new(s, 0.0)),
        Kind::Const(m) => m.clone(),
        Kind::Conjugated(g, inner) => {
            let m = sample_kind(inner, n, rng)?;
            let u = haar_sample_rng(*g, n, rng)?;
            u.mul(&m).mul(&u.adjoint())
        }
        Kind::BmAdditive { epsilon, field, t } => gaussian_field(n, *epsilon, *field, t / n as f64, rng),
        Kind::BmUnitary { .. } | Kind::LevyAdditive { .. } | Kind::LevyMult { .. } => {
            process::sample_process_rng(kind, n, rng)?
        }
    })
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Gaussian matrix with `E[M ⊗ M] = s (ε ρ((1,2)) + (2 − β) ρ([1,2]))`.
///
/// `ε = 1` gives Hermitian (symmetric) matrices, `ε = −1` skew-Hermitian
/// (antisymmetric) ones.
pub fn gaussian_field(n: usize, epsilon: i8, field: Field, s: f64, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut m = CMatrix::zeros(n);
    let sd = s.sqrt();
    let sign = f64::from(epsilon);
    for i in 0..n {
        match (field, epsilon) {
            (Field::Complex, 1) => m.set(i, i, C64::new(sd * normal(rng), 0.0)),
            (Field::Complex, _) => m.set(i, i, C64::new(0.0, sd * normal(rng))),
            (Field::Real, 1) => m.set(i, i, C64::new(2f64.sqrt() * sd * normal(rng), 0.0)),
            (Field::Real, _) => {}
        }
        for j in i + 1..n {
            let z = match field {
                Field::Complex => C64::new(normal(rng), normal(rng)) * (sd / 2f64.sqrt()),
                Field::Real => C64::new(sd * normal(rng), 0.0),
            };
            let z = if epsilon == 1 || field == Field::Real { z } else { z * C64::i() };
            m.set(i, j, z);
            m.set(j, i, z.conj() * sign);
        }
    }
    m
}

/// A Haar unitary vector of `K^n`.
pub fn unit_vector(n: usize, field: Field, rng: &mut ChaCha8Rng) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| match field {
                Field::Complex => C64::new(normal(rng), normal(rng)),
                Field::Real => C64::new(normal(rng), 0.0),
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

fn orthonormalize(g: DMatrix<C64>) -> CMatrix {
    let n = g.nrows();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    CMatrix::from_fn(n, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::one() };
        q[(i, j)] * phase
    })
}

fn permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// One Haar sample of `group` at size `n`, from stream 0 of `seed`.
pub fn haar_sample(group: Group, n: usize, seed: u64) -> Result<CMatrix> {
    haar_sample_rng(group, n, &mut sample_rng(seed, 0))
}

pub fn haar_sample_rng(group: Group, n: usize, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    if n == 0 {
        return invalid("N must be positive");
    }
    Ok(match group {
        Group::U => orthonormalize(DMatrix::from_fn(n, n, |_, _| C64::new(normal(rng), normal(rng)))),
        Group::O => orthonormalize(DMatrix::from_fn(n, n, |_, _| C64::new(normal(rng), 0.0))),
        Group::S => {
            let p = permutation(n, rng);
            CMatrix::from_fn(n, |i, j| if p[i] == j { C64::one() } else { C64::zero() })
        }
        Group::H => {
            let p = permutation(n, rng);
            let signs: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
            CMatrix::from_fn(n, |i, j| if p[i] == j { C64::new(signs[i], 0.0) } else { C64::zero() })
        }
        Group::B => {
            if n < 2 {
                return invalid("the bistochastic group needs N ≥ 2");
            }
            let o = orthonormalize(DMatrix::from_fn(n - 1, n - 1, |_, _| C64::new(normal(rng), 0.0)));
            // Householder reflection exchanging e_1 and the normalized all-ones vector.
            let e = 1.0 / (n as f64).sqrt();
            let mut w = vec![-e; n];
            w[0] += 1.0;
            let ww: f64 = w.iter().map(|x| x * x).sum();
            let h = CMatrix::from_fn(n, |i, j| {
                let id = if i == j { 1.0 } else { 0.0 };
                C64::new(id - 2.0 * w[i] * w[j] / ww, 0.0)
            });
            let block = CMatrix::from_fn(n, |i, j| match (i, j) {
                (0, 0) => C64::one(),
                (0, _) | (_, 0) => C64::zero(),
                _ => *o.get(i - 1, j - 1),
            });
            h.mul(&block).mul(&h)
        }
    })
}
