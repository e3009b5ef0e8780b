//! Laurent polynomials in the dimension symbol `N` with rational coefficients.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rationals used throughout.
pub type Q = BigRational;

/// `q(n, d) = n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `x^e` for integer `e`, exact.
pub fn qpow(x: &Q, e: i32) -> Q {
    let mut acc = Q::one();
    let base = if e < 0 { x.recip() } else { x.clone() };
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

/// `Σ c_e N^e`, zero coefficients never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct NPoly {
    terms: BTreeMap<i32, Q>,
}

impl NPoly {
    pub fn zero() -> Self {
        NPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, Q::one())
    }

    /// `c N^e`.
    pub fn monomial(e: i32, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        NPoly { terms }
    }

    /// `N^e`.
    pub fn n_pow(e: i32) -> Self {
        Self::monomial(e, Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(0, c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i32) -> Q {
        self.terms.get(&e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Q)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    fn add_term(&mut self, e: i32, c: Q) {
        let slot = self.terms.entry(e).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        NPoly {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Multiplies by `N^e`.
    pub fn shift(&self, e: i32) -> Self {
        NPoly {
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
        }
    }

    /// Value at a positive integer `N`.
    pub fn eval(&self, n: u64) -> Q {
        let base = Q::from_integer(BigInt::from(n));
        self.terms
            .iter()
            .fold(Q::zero(), |acc, (e, c)| acc + c * qpow(&base, *e))
    }
}

impl Add for &NPoly {
    type Output = NPoly;
    fn add(self, rhs: &NPoly) -> NPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &NPoly {
    type Output = NPoly;
    fn sub(self, rhs: &NPoly) -> NPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &NPoly {
    type Output = NPoly;
    fn neg(self) -> NPoly {
        NPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Mul for &NPoly {
    type Output = NPoly;
    fn mul(self, rhs: &NPoly) -> NPoly {
        let mut out = NPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        alloc::format!("{}", c.numer())
    } else {
        alloc::format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for NPoly {
    /// Ascending exponents, e.g. `2*N^-1 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let var = match *e {
                0 => String::new(),
                1 => String::from("N"),
                e => alloc::format!("N^{e}"),
            };
            if var.is_empty() {
                f.write_str(&fmt_q(&mag))?;
            } else if mag.is_one() {
                f.write_str(&var)?;
            } else {
                write!(f, "{}*{}", fmt_q(&mag), var)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn display_format() {
        let p = &NPoly::monomial(-1, qi(2)) + &NPoly::one();
        assert_eq!(p.to_string(), "2*N^-1 + 1");
        assert_eq!(NPoly::zero().to_string(), "0");
        let r = &NPoly::n_pow(1) - &NPoly::monomial(2, q(3, 2));
        assert_eq!(r.to_string(), "N - 3/2*N^2");
        assert_eq!((-&NPoly::n_pow(-2)).to_string(), "-N^-2");
    }

    #[test]
    fn ring_and_eval() {
        let a = &NPoly::n_pow(1) + &NPoly::one();
        let b = &NPoly::n_pow(-1) - &NPoly::one();
        let ab = &a * &b;
        assert_eq!(ab.eval(3), q(4, 3) * q(-2, 1));
        assert!((&ab - &ab).is_zero());
        assert_eq!(a.shift(2).eval(2), qi(12));
    }
}
