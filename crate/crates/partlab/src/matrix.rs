//! Dense square matrices over `Q`, `f64` or `C64`, with complex products
//! delegated to a packed GEMM kernel.

use std::io::{BufRead, Read, Write};

use num_complex::Complex64;
use num_traits::{One, Zero};
use partlab_core::Q;

use crate::error::{invalid, Error, Result};

pub type C64 = Complex64;

/// A row-major `N × N` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type CMatrix = Matrix<C64>;
pub type QMatrix = Matrix<Q>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> T>(n: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("matrix rows must all have length N");
        }
        Ok(Matrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_vec(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return invalid(format!("{} entries for a {n}×{n} matrix", data.len()));
        }
        Ok(Matrix { n, data })
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Matrix::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = v.clone();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn map<U: Clone + Zero, F: FnMut(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.n, |i, j| self.get(j, i).clone())
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + for<'a> std::ops::Mul<&'a T, Output = T>,
{
    /// Schoolbook product, for exact scalars.
    pub fn mul_naive(&self, other: &Self) -> Self {
        let n = self.n;
        Matrix::from_fn(n, |i, j| {
            (0..n).fold(T::zero(), |acc, l| acc + self.get(i, l).clone() * other.get(l, j))
        })
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }
}

/// `J_N`: every entry `1/N`.
pub fn j_matrix_q(n: usize) -> QMatrix {
    let v = partlab_core::npoly::q(1, n as i64);
    Matrix::from_fn(n, |_, _| v.clone())
}

impl QMatrix {
    pub fn to_complex(&self) -> CMatrix {
        use num_traits::ToPrimitive;
        self.map(|x| C64::new(x.to_f64().unwrap_or(f64::NAN), 0.0))
    }
}

impl CMatrix {
    pub fn from_real(n: usize, re: &[f64]) -> Result<Self> {
        Matrix::from_vec(n, re.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// `self · other` through the packed complex kernel.
    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.n);
        self.mul_into(other, &mut out);
        out
    }

    pub fn mul_into(&self, other: &CMatrix, out: &mut CMatrix) {
        let n = self.n;
        assert_eq!(other.n, n);
        assert_eq!(out.n, n);
        if n == 0 {
            return;
        }
        let s = n as isize;
        // Complex64 is `repr(C)` with fields (re, im), the layout of [f64; 2].
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                n,
                n,
                n,
                [1.0, 0.0],
                self.data.as_ptr() as *const [f64; 2],
                s,
                1,
                other.data.as_ptr() as *const [f64; 2],
                s,
                1,
                [0.0, 0.0],
                out.data.as_mut_ptr() as *mut [f64; 2],
                s,
                1,
            );
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out.add_scaled(other, C64::one());
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out.add_scaled(other, -C64::one());
        out
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &CMatrix, c: C64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn scale(&self, c: C64) -> CMatrix {
        self.map(|x| x * c)
    }

    pub fn adjoint(&self) -> CMatrix {
        Matrix::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> C64 {
        let n = self.n;
        let mut acc = C64::zero();
        for i in 0..n {
            for l in 0..n {
                acc += self.data[i * n + l] * other.data[l * n + i];
            }
        }
        acc
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest column sum of moduli.
    pub fn norm1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `‖U U* − Id‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        self.mul(&self.adjoint()).max_abs_diff(&CMatrix::identity(self.n))
    }

    /// `self += α u v*`.
    pub fn rank_one_update(&mut self, alpha: C64, u: &[C64], v: &[C64]) {
        let n = self.n;
        for i in 0..n {
            let a = alpha * u[i];
            let row = &mut self.data[i * n..(i + 1) * n];
            for (x, vj) in row.iter_mut().zip(v) {
                *x += a * vj.conj();
            }
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// `e^A` by scaling and squaring around a Paterson–Stockmeyer Taylor
    /// polynomial.
    pub fn expm(&self) -> CMatrix {
        self.expm_with_norm(self.norm1())
    }

    /// [`CMatrix::expm`] for a normal matrix, sized from a power-iteration
    /// estimate of the spectral norm with a safety factor of 1.5.
    pub fn expm_normal(&self) -> CMatrix {
        let est = self.spectral_norm_estimate(12);
        self.expm_with_norm((1.5 * est).min(self.norm1()))
    }

    fn spectral_norm_estimate(&self, iters: usize) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        // Deterministic start vector with no symmetry.
        let mut v: Vec<C64> = (0..n).map(|i| C64::new(1.0 + (i as f64 * 0.618).fract(), 0.0)).collect();
        let mut lambda = 0.0;
        for _ in 0..iters {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|z| *z /= norm);
            let w: Vec<C64> = (0..n)
                .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
                .collect();
            lambda = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v = w;
        }
        lambda
    }

    fn expm_with_norm(&self, theta: f64) -> CMatrix {
        let n = self.n;
        let mut s = 0u32;
        let mut t = theta;
        while t > 0.5 {
            t /= 2.0;
            s += 1;
        }
        let x = self.scale(C64::new(0.5f64.powi(s as i32), 0.0));
        // Degree m with t^{m+1}/(m+1)! below 1e-17.
        let mut m = 1usize;
        let mut term = t;
        while term / (m as f64 + 1.0) * t > 1e-17 && m < 30 {
            m += 1;
            term = term * t / m as f64;
        }
        let coeffs: Vec<f64> = {
            let mut c = vec![1.0; m + 1];
            for j in 1..=m {
                c[j] = c[j - 1] / j as f64;
            }
            c
        };
        let r = ((m + 1) as f64).sqrt().ceil() as usize;
        let mut powers = vec![CMatrix::identity(n), x.clone()];
        for j in 2..=r {
            let next = powers[j - 1].mul(&x);
            powers.push(next);
        }
        let block = |j: usize| -> CMatrix {
            let mut b = CMatrix::zeros(n);
            for i in 0..r {
                let idx = j * r + i;
                if idx <= m {
                    b.add_scaled(&powers[i], C64::new(coeffs[idx], 0.0));
                }
            }
            b
        };
        let qmax = m / r;
        let mut p = block(qmax);
        let mut tmp = CMatrix::zeros(n);
        for j in (0..qmax).rev() {
            p.mul_into(&powers[r], &mut tmp);
            std::mem::swap(&mut p, &mut tmp);
            p.add_scaled(&block(j), C64::one());
        }
        for _ in 0..s {
            p.mul_into(&p.clone(), &mut tmp);
            std::mem::swap(&mut p, &mut tmp);
        }
        p
    }
}

fn format_c64(z: &C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:e}{}{:e}i", z.re, sign, z.im.abs())
}

fn parse_c64(s: &str) -> Result<C64> {
    let s = s.trim();
    let body = s
        .strip_suffix('i')
        .ok_or_else(|| Error::Format(format!("entry {s:?} lacks the imaginary suffix")))?;
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(|| Error::Format(format!("entry {s:?} is not of the form re+imi")))?;
    let re: f64 = body[..split].parse().map_err(|_| Error::Format(format!("bad real part in {s:?}")))?;
    let im: f64 = body[split..].parse().map_err(|_| Error::Format(format!("bad imaginary part in {s:?}")))?;
    Ok(C64::new(re, im))
}

/// Row-major CSV with entries written `re+imi`.
pub fn write_csv<W: Write>(m: &CMatrix, mut w: W) -> Result<()> {
    for i in 0..m.n() {
        let row: Vec<String> = (0..m.n()).map(|j| format_c64(m.get(i, j))).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<CMatrix> {
    let mut rows = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(line.split(',').map(parse_c64).collect::<Result<Vec<_>>>()?);
    }
    Matrix::from_rows(rows)
}

const PALB_MAGIC: &[u8; 4] = b"PALB";
const PALB_VERSION: u32 = 1;

/// Binary layout: magic `PALB`, version `u32`, `N` as `u64`, then `N²`
/// pairs of little-endian `f64` (re, im) in row-major order.
pub fn write_palb<W: Write>(m: &CMatrix, mut w: W) -> Result<()> {
    w.write_all(PALB_MAGIC)?;
    w.write_all(&PALB_VERSION.to_le_bytes())?;
    w.write_all(&(m.n() as u64).to_le_bytes())?;
    for z in m.data() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_palb<R: Read>(mut r: R) -> Result<CMatrix> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != PALB_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let version = u32::from_le_bytes(b4);
    if version != PALB_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        r.read_exact(&mut b8)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        data.push(C64::new(re, f64::from_le_bytes(b8)));
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes", rest.len())));
    }
    Matrix::from_vec(n, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> CMatrix {
        CMatrix::from_fn(n, |i, j| C64::new((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i + 2 * j) as f64 % 3.0 - 1.0))
    }

    #[test]
    fn gemm_matches_schoolbook() {
        for n in [1, 2, 5, 17] {
            let a = sample(n);
            let b = a.adjoint().scale(C64::new(0.5, -1.0));
            assert!(a.mul(&b).max_abs_diff(&a.mul_naive(&b)) < 1e-12);
        }
    }

    #[test]
    fn expm_of_diagonal_and_nilpotent() {
        let d = CMatrix::diagonal(&[C64::new(0.0, 1.0), C64::new(-3.0, 0.0), C64::new(2.5, 0.5)]);
        let e = d.expm();
        for i in 0..3 {
            assert!((e.get(i, i) - d.get(i, i).exp()).norm() < 1e-12 * d.get(i, i).exp().norm().max(1.0));
        }
        let mut nil = CMatrix::zeros(2);
        nil.set(0, 1, C64::new(4.0, 0.0));
        let e = nil.expm();
        assert!((e.get(0, 1) - C64::new(4.0, 0.0)).norm() < 1e-13);
        assert!((e.get(0, 0) - C64::one()).norm() < 1e-13);
    }

    #[test]
    fn exponential_of_skew_hermitian_is_unitary() {
        let a = sample(12);
        let h = a.add(&a.adjoint()).scale(C64::new(0.0, 0.3));
        assert!(h.expm().unitarity_defect() < 1e-12);
        assert!(h.expm_normal().unitarity_defect() < 1e-12);
        assert!(h.expm().max_abs_diff(&h.expm_normal()) < 1e-11);
    }

    #[test]
    fn csv_and_binary_round_trip() {
        let m = sample(4).scale(C64::new(0.1, 1e-7));
        let mut buf = Vec::new();
        write_csv(&m, &mut buf).unwrap();
        assert_eq!(read_csv(buf.as_slice()).unwrap(), m);
        let mut bin = Vec::new();
        write_palb(&m, &mut bin).unwrap();
        assert_eq!(&bin[..4], b"PALB");
        assert_eq!(read_palb(bin.as_slice()).unwrap(), m);
        bin.push(0);
        assert!(read_palb(bin.as_slice()).is_err());
    }

    #[test]
    fn complex_entry_syntax() {
        assert_eq!(parse_c64("1.5e-3-2e4i").unwrap(), C64::new(1.5e-3, -2e4));
        assert_eq!(parse_c64("-1+0i").unwrap(), C64::new(-1.0, 0.0));
        assert!(parse_c64("1+2").is_err());
    }
}
