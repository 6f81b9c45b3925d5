//! Dense complex matrices and the few decompositions the simulator needs.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest dimension for which dense propagators are built.
pub const DENSE_LIMIT: usize = 4096;

/// Row-major dense complex matrix. Operators are square; isometries and
/// blocks of state vectors may be rectangular.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a square matrix from real row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, n, |r, c| Complex64::new(rows[r][c], 0.0))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, d) in diag.iter().enumerate() {
            m[(k, k)] = *d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Dimension of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        Self::from_fn(rows, cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let gram = if self.cols <= self.rows {
            self.adjoint().matmul(self).expect("shapes agree")
        } else {
            self.matmul(&self.adjoint()).expect("shapes agree")
        };
        let (values, _) = hermitian_eigen(&gram);
        values.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self - &self.adjoint()).max_abs()
    }

    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let p = self.adjoint().matmul(self).expect("square");
        (&p - &Self::identity(self.rows)).max_abs()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() < tol
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)].norm() <= tol))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

/// Eigenvalues (ascending is not guaranteed) and eigenvectors as columns.
/// The input is assumed Hermitian.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.rows();
    let dm = DMatrix::from_fn(n, n, |r, c| m[(r, c)]);
    let eig = dm.symmetric_eigen();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, c)]);
    (eig.eigenvalues.iter().cloned().collect(), vectors)
}

/// exp(i·angle·G) for Hermitian G.
pub fn propagator(generator: &ComplexMatrix, angle: f64) -> Result<ComplexMatrix> {
    if !generator.is_square() {
        return Err(Error::NotSquare { rows: generator.rows(), cols: generator.cols() });
    }
    let herm = generator.hermiticity_error();
    if herm >= 1e-12 {
        return Err(Error::NotHermitian(herm));
    }
    let n = generator.dim();
    if n > DENSE_LIMIT {
        return Err(Error::DimensionOverflow { dim: n, limit: DENSE_LIMIT });
    }
    if generator.is_diagonal(0.0) {
        let diag: Vec<Complex64> =
            (0..n).map(|k| Complex64::from_polar(1.0, angle * generator[(k, k)].re)).collect();
        return Ok(ComplexMatrix::from_diagonal(&diag));
    }
    let (values, vectors) = hermitian_eigen(generator);
    let phases: Vec<Complex64> = values.iter().map(|l| Complex64::from_polar(1.0, angle * l)).collect();
    let scaled = ComplexMatrix::from_fn(n, n, |r, c| vectors[(r, c)] * phases[c]);
    scaled.matmul(&vectors.adjoint())
}

/// Kronecker product of a list of factors, slot 0 leftmost.
pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    factors.iter().fold(ComplexMatrix::identity(1), |acc, f| acc.kron(f))
}

/// Places `op` at `slot` with identities elsewhere.
pub fn embed(op: &ComplexMatrix, slot: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    if slot >= dims.len() {
        return Err(Error::SlotOutOfRange { index: slot, len: dims.len() });
    }
    if !op.is_square() || op.rows() != dims[slot] {
        return Err(Error::DimensionMismatch { expected: dims[slot], actual: op.rows() });
    }
    let total: usize = dims.iter().product();
    if total > DENSE_LIMIT {
        return Err(Error::DimensionOverflow { dim: total, limit: DENSE_LIMIT });
    }
    let factors: Vec<ComplexMatrix> = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| if k == slot { op.clone() } else { ComplexMatrix::identity(d) })
        .collect();
    Ok(kron_all(&factors))
}

/// Places an operator on several slots at once. `op` acts on the tensor
/// product of `slots` in the listed order, identities elsewhere.
pub fn embed_multi(op: &ComplexMatrix, slots: &[usize], dims: &[usize]) -> Result<ComplexMatrix> {
    for (k, &s) in slots.iter().enumerate() {
        if s >= dims.len() {
            return Err(Error::SlotOutOfRange { index: s, len: dims.len() });
        }
        if slots[..k].contains(&s) {
            return Err(Error::InvalidParameter(format!("slot {s} listed twice")));
        }
    }
    let sub: usize = slots.iter().map(|&s| dims[s]).product();
    if !op.is_square() || op.rows() != sub {
        return Err(Error::DimensionMismatch { expected: sub, actual: op.rows() });
    }
    let total: usize = dims.iter().product();
    if total > DENSE_LIMIT {
        return Err(Error::DimensionOverflow { dim: total, limit: DENSE_LIMIT });
    }
    let digits_of = |mut idx: usize| {
        let mut d = vec![0usize; dims.len()];
        for k in (0..dims.len()).rev() {
            d[k] = idx % dims[k];
            idx /= dims[k];
        }
        d
    };
    let sub_index = |d: &[usize]| slots.iter().fold(0, |acc, &s| acc * dims[s] + d[s]);
    let mut out = ComplexMatrix::zeros(total, total);
    for c in 0..total {
        let dc = digits_of(c);
        let sc = sub_index(&dc);
        for r in 0..total {
            let dr = digits_of(r);
            if (0..dims.len()).any(|k| !slots.contains(&k) && dr[k] != dc[k]) {
                continue;
            }
            out[(r, c)] = op[(sub_index(&dr), sc)];
        }
    }
    Ok(out)
}

/// Overlap of `u` with `v` up to a global phase: |tr(v†u)|/dim and arg tr(v†u).
/// The phase is reported as 0 when the overlap vanishes.
pub fn phase_fidelity(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<(f64, f64)> {
    if u.rows() != v.rows() || u.cols() != v.cols() {
        return Err(Error::DimensionMismatch { expected: v.rows(), actual: u.rows() });
    }
    let t: Complex64 = u.data().iter().zip(v.data()).map(|(a, b)| b.conj() * a).sum();
    let fid = t.norm() / u.rows() as f64;
    let phase = if fid > 1e-12 { t.arg() } else { 0.0 };
    Ok((fid, phase))
}

/// Distance between `u` and `v` after removing the best global phase,
/// measured in the spectral norm.
pub fn phase_aligned_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    let (_, phase) = phase_fidelity(u, v)?;
    let aligned = v.scale(Complex64::from_polar(1.0, phase));
    Ok((u - &aligned).spectral_norm())
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut x = a % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}
