//! Compilation of pulse sequences to propagators.
//!
//! Each element becomes one of three operator forms: a diagonal phase
//! (all-z generators and free evolution), a product of single-spin
//! exponentials (generators without bilinear terms) or a dense matrix.
//! The first two are applied in place without forming the full matrix.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{embed, propagator, ComplexMatrix, DENSE_LIMIT};
use crate::pulse::generator::Resolved;
use crate::pulse::sequence::{PulseElement, PulseSequence};
use crate::register::Register;
use crate::spin::{m_value, spin_operators};

pub(crate) enum Op {
    Diagonal(Vec<Complex64>),
    Local(Vec<(usize, ComplexMatrix)>),
    Dense(ComplexMatrix),
}

fn diagonal_phases(reg: &Register, resolved: &Resolved, angle: f64) -> Vec<Complex64> {
    let dims = reg.dims();
    let slots = reg.slots();
    let mut local_diag: Vec<Vec<f64>> = dims.iter().map(|&d| vec![0.0; d]).collect();
    for (k, m) in &resolved.local {
        for (d, v) in local_diag[*k].iter_mut().enumerate() {
            *v = m[(d, d)].re;
        }
    }
    let mut out = Vec::with_capacity(reg.dim());
    let mut digits = vec![0usize; dims.len()];
    for _ in 0..reg.dim() {
        let mut lambda: f64 = digits.iter().enumerate().map(|(k, &d)| local_diag[k][d]).sum();
        for b in &resolved.bilinear {
            lambda += b.coeff * m_value(slots[b.left].two_s, digits[b.left]) * m_value(slots[b.right].two_s, digits[b.right]);
        }
        out.push(Complex64::from_polar(1.0, angle * lambda));
        // odometer increment, last slot fastest
        for k in (0..dims.len()).rev() {
            digits[k] += 1;
            if digits[k] < dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    out
}

fn dense_generator(reg: &Register, resolved: &Resolved) -> Result<ComplexMatrix> {
    let dim = reg.dim();
    if dim > DENSE_LIMIT {
        return Err(Error::DimensionOverflow { dim, limit: DENSE_LIMIT });
    }
    let dims = reg.dims();
    let mut g = ComplexMatrix::zeros(dim, dim);
    for (k, m) in &resolved.local {
        g = &g + &embed(m, *k, dims)?;
    }
    for b in &resolved.bilinear {
        let l = spin_operators(reg.slots()[b.left].two_s)?;
        let r = spin_operators(reg.slots()[b.right].two_s)?;
        let el = embed(l.axis(b.left_axis), b.left, dims)?;
        let er = embed(r.axis(b.right_axis), b.right, dims)?;
        g = &g + &(&el * &er).scale(Complex64::new(b.coeff, 0.0));
    }
    Ok(g)
}

pub(crate) fn element_op(el: &PulseElement, reg: &Register) -> Result<Option<Op>> {
    match el {
        PulseElement::Rotation { generator, angle } => {
            let resolved = generator.resolve(reg)?;
            if resolved.is_diagonal() {
                return Ok(Some(Op::Diagonal(diagonal_phases(reg, &resolved, *angle))));
            }
            if resolved.bilinear.is_empty() {
                let factors = resolved
                    .local
                    .iter()
                    .map(|(k, m)| Ok((*k, propagator(m, *angle)?)))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(Some(Op::Local(factors)));
            }
            let g = dense_generator(reg, &resolved)?;
            Ok(Some(Op::Dense(propagator(&g, *angle)?)))
        }
        PulseElement::FreeEvolution { duration_us } => {
            let energies = reg.energies()?;
            let phases = energies.iter().map(|e| Complex64::from_polar(1.0, -TAU * duration_us * e)).collect();
            Ok(Some(Op::Diagonal(phases)))
        }
        PulseElement::Block(_) => Ok(None),
    }
}

/// Applies a single-slot unitary to the row index of a row-major block
/// of `ncols` columns.
fn apply_local(data: &mut [Complex64], ncols: usize, dims: &[usize], slot: usize, u: &ComplexMatrix) {
    let d = dims[slot];
    let inner: usize = dims[slot + 1..].iter().product();
    let outer: usize = dims[..slot].iter().product();
    let mut buf = vec![Complex64::new(0.0, 0.0); d * ncols];
    for hi in 0..outer {
        for lo in 0..inner {
            let row = |a: usize| ((hi * d + a) * inner + lo) * ncols;
            for v in buf.iter_mut() {
                *v = Complex64::new(0.0, 0.0);
            }
            for a in 0..d {
                let out = &mut buf[a * ncols..(a + 1) * ncols];
                for b in 0..d {
                    let coef = u[(a, b)];
                    if coef.norm_sqr() == 0.0 {
                        continue;
                    }
                    let src = &data[row(b)..row(b) + ncols];
                    for (o, s) in out.iter_mut().zip(src) {
                        *o += coef * s;
                    }
                }
            }
            for a in 0..d {
                data[row(a)..row(a) + ncols].copy_from_slice(&buf[a * ncols..(a + 1) * ncols]);
            }
        }
    }
}

fn apply_op(op: &Op, reg: &Register, data: &mut [Complex64], ncols: usize) -> Result<()> {
    match op {
        Op::Diagonal(phases) => {
            for (r, p) in phases.iter().enumerate() {
                for v in &mut data[r * ncols..(r + 1) * ncols] {
                    *v *= p;
                }
            }
        }
        Op::Local(factors) => {
            for (slot, u) in factors {
                apply_local(data, ncols, reg.dims(), *slot, u);
            }
        }
        Op::Dense(u) => {
            let block = ComplexMatrix::from_vec(reg.dim(), ncols, data.to_vec())?;
            data.copy_from_slice(u.matmul(&block)?.data());
        }
    }
    Ok(())
}

/// Left-multiplies a row-major `dim × ncols` block by the sequence's propagator.
pub fn apply_sequence(seq: &PulseSequence, reg: &Register, data: &mut [Complex64], ncols: usize) -> Result<()> {
    if data.len() != reg.dim() * ncols {
        return Err(Error::DimensionMismatch { expected: reg.dim() * ncols, actual: data.len() });
    }
    for el in seq.elements.iter().rev() {
        match el {
            PulseElement::Block(inner) => apply_sequence(inner, reg, data, ncols)?,
            other => {
                if let Some(op) = element_op(other, reg)? {
                    apply_op(&op, reg, data, ncols)?;
                }
            }
        }
    }
    if seq.global_phase != 0.0 {
        let p = Complex64::from_polar(1.0, seq.global_phase);
        for v in data.iter_mut() {
            *v *= p;
        }
    }
    Ok(())
}

/// Applies the sequence to each column of `states` (dim × k).
pub fn apply_to_states(seq: &PulseSequence, reg: &Register, states: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut data = states.data().to_vec();
    apply_sequence(seq, reg, &mut data, states.cols())?;
    ComplexMatrix::from_vec(states.rows(), states.cols(), data)
}

/// The full propagator of a sequence.
pub fn compile(seq: &PulseSequence, reg: &Register) -> Result<ComplexMatrix> {
    let dim = reg.dim();
    if dim > DENSE_LIMIT {
        return Err(Error::DimensionOverflow { dim, limit: DENSE_LIMIT });
    }
    let mut m = ComplexMatrix::identity(dim);
    apply_sequence(seq, reg, m.data_mut(), dim)?;
    Ok(m)
}
