//! Angular-momentum matrices in the m-basis ordered +s, s−1, …, −s.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn label(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinRep {
    pub two_s: u32,
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
}

impl SpinRep {
    pub fn dim(&self) -> usize {
        self.two_s as usize + 1
    }

    pub fn s(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn axis(&self, axis: Axis) -> &ComplexMatrix {
        match axis {
            Axis::X => &self.sx,
            Axis::Y => &self.sy,
            Axis::Z => &self.sz,
        }
    }

    /// m quantum number of basis index k.
    pub fn m(&self, k: usize) -> f64 {
        m_value(self.two_s, k)
    }
}

pub fn m_value(two_s: u32, k: usize) -> f64 {
    two_s as f64 / 2.0 - k as f64
}

pub fn spin_operators(two_s: u32) -> Result<SpinRep> {
    if two_s < 1 {
        return Err(Error::InvalidSpin(two_s));
    }
    let d = two_s as usize + 1;
    let s = two_s as f64 / 2.0;
    // raising operator: S+ |m⟩ = sqrt(s(s+1) − m(m+1)) |m+1⟩, and |m+1⟩ sits one index up
    let mut sp = ComplexMatrix::zeros(d, d);
    for k in 1..d {
        let m = m_value(two_s, k);
        sp[(k - 1, k)] = Complex64::new((s * (s + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm).scale(Complex64::new(0.5, 0.0));
    let sy = (&sp - &sm).scale(Complex64::new(0.0, -0.5));
    let sz = ComplexMatrix::from_fn(d, d, |r, c| {
        if r == c {
            Complex64::new(m_value(two_s, r), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(SpinRep { two_s, sx, sy, sz })
}
