//! Logical simulator of globally addressed cellular-automaton operations on
//! an alternating A/B qubit chain.
//!
//! Cell 0 is the most significant bit of a basis index. End cells condition
//! on their single neighbour, so f = 2 never fires there.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ONE, ZERO};
use crate::system::{parse_pattern, pattern_string, Species};
use crate::verify::{parse_angle, pauli_x};

#[derive(Clone, Debug, PartialEq)]
pub struct QcaState {
    species: Vec<Species>,
    amplitudes: Vec<Complex64>,
}

fn check_alternating(species: &[Species]) -> Result<()> {
    if species.is_empty() {
        return Err(Error::InvalidPattern("empty chain".into()));
    }
    if species.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidPattern(pattern_string(species)));
    }
    Ok(())
}

impl QcaState {
    /// A computational basis state; `bits[k]` is cell k.
    pub fn basis(species: &[Species], bits: &[u8]) -> Result<Self> {
        check_alternating(species)?;
        if bits.len() != species.len() || bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParameter(format!("basis pattern {bits:?} does not fit {} cells", species.len())));
        }
        if species.len() > 24 {
            return Err(Error::DimensionOverflow { dim: species.len(), limit: 24 });
        }
        let mut amplitudes = vec![ZERO; 1 << species.len()];
        amplitudes[bits_to_index(bits)] = ONE;
        Ok(Self { species: species.to_vec(), amplitudes })
    }

    pub fn from_amplitudes(species: &[Species], amplitudes: Vec<Complex64>) -> Result<Self> {
        check_alternating(species)?;
        if amplitudes.len() != 1 << species.len() {
            return Err(Error::DimensionMismatch { expected: 1 << species.len(), actual: amplitudes.len() });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("state norm {norm} is not 1")));
        }
        Ok(Self { species: species.to_vec(), amplitudes })
    }

    /// Parses a chain pattern and a bit string such as "BAB" and "101".
    pub fn parse(pattern: &str, bits: &str) -> Result<Self> {
        let species = parse_pattern(pattern)?;
        let bits = bits
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidParameter(format!("bit string '{bits}' must contain only 0 and 1"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::basis(&species, &bits)
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn n_cells(&self) -> usize {
        self.species.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The basis pattern when the state is a basis state up to phase.
    pub fn as_basis(&self) -> Option<Vec<u8>> {
        let (idx, a) = self.amplitudes.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
        ((a.norm() - 1.0).abs() < 1e-9).then(|| index_to_bits(idx, self.n_cells()))
    }
}

impl fmt::Display for QcaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n_cells();
        let mut first = true;
        for (idx, a) in self.amplitudes.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let bits: String = index_to_bits(idx, n).iter().map(|b| char::from(b'0' + b)).collect();
            write!(f, "({:.6}{:+.6}i)|{bits}⟩", a.re, a.im)?;
        }
        Ok(())
    }
}

pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub fn index_to_bits(idx: usize, n: usize) -> Vec<u8> {
    (0..n).map(|k| ((idx >> (n - 1 - k)) & 1) as u8).collect()
}

/// Â_f^U or B̂_f^U.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalOpSpec {
    pub target: Species,
    pub f: u8,
    pub u: ComplexMatrix,
}

impl GlobalOpSpec {
    pub fn new(target: Species, f: u8, u: ComplexMatrix) -> Result<Self> {
        if f > 2 {
            return Err(Error::InvalidParameter(format!("neighbour sum f = {f} must be 0, 1 or 2")));
        }
        if u.rows() != 2 || u.cols() != 2 {
            return Err(Error::NotSquare { rows: u.rows(), cols: u.cols() });
        }
        if u.unitarity_error() > 1e-12 {
            return Err(Error::InvalidParameter("U is not unitary".into()));
        }
        Ok(Self { target, f, u })
    }

    pub fn not(target: Species, f: u8) -> Result<Self> {
        Self::new(target, f, pauli_x())
    }
}

fn neighbour_sum(idx: usize, n: usize, cell: usize) -> u8 {
    let bit = |k: usize| ((idx >> (n - 1 - k)) & 1) as u8;
    let left = if cell > 0 { bit(cell - 1) } else { 0 };
    let right = if cell + 1 < n { bit(cell + 1) } else { 0 };
    left + right
}

fn apply_cell(amps: &mut [Complex64], n: usize, cell: usize, op: &GlobalOpSpec) {
    let mask = 1usize << (n - 1 - cell);
    for i0 in 0..amps.len() {
        if i0 & mask != 0 || neighbour_sum(i0, n, cell) != op.f {
            continue;
        }
        let i1 = i0 | mask;
        let (a0, a1) = (amps[i0], amps[i1]);
        amps[i0] = op.u[(0, 0)] * a0 + op.u[(0, 1)] * a1;
        amps[i1] = op.u[(1, 0)] * a0 + op.u[(1, 1)] * a1;
    }
}

/// Applies the conditional U to every cell of the target species.
pub fn apply_global(state: &QcaState, op: &GlobalOpSpec) -> QcaState {
    let cells: Vec<usize> = (0..state.n_cells()).filter(|&k| state.species[k] == op.target).collect();
    apply_global_ordered(state, op, &cells).expect("cells come from the chain")
}

/// As [`apply_global`], visiting target cells in the given order.
pub fn apply_global_ordered(state: &QcaState, op: &GlobalOpSpec, order: &[usize]) -> Result<QcaState> {
    let n = state.n_cells();
    let mut amps = state.amplitudes.clone();
    for &cell in order {
        if cell >= n || state.species[cell] != op.target {
            return Err(Error::InvalidParameter(format!("cell {cell} is not a {} cell", op.target)));
        }
        apply_cell(&mut amps, n, cell, op);
    }
    Ok(QcaState { species: state.species.clone(), amplitudes: amps })
}

/// The 2^n × 2^n matrix of a global operation on a chain.
pub fn global_op_matrix(species: &[Species], op: &GlobalOpSpec) -> Result<ComplexMatrix> {
    let n = species.len();
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for c in 0..dim {
        let s = apply_global(&QcaState::basis(species, &index_to_bits(c, n))?, op);
        for (r, a) in s.amplitudes.iter().enumerate() {
            m[(r, c)] = *a;
        }
    }
    Ok(m)
}

/// Â₁ then B̂₁ with U = X: one step of data movement.
pub fn move_step(state: &QcaState) -> QcaState {
    let a = apply_global(state, &GlobalOpSpec::not(Species::A, 1).expect("X is unitary"));
    apply_global(&a, &GlobalOpSpec::not(Species::B, 1).expect("X is unitary"))
}

/// Reference rule for NOT-type operations on basis patterns.
pub fn classical_ca_oracle(species: &[Species], bits: &[u8], op: &GlobalOpSpec) -> Result<Vec<u8>> {
    if (&op.u - &pauli_x()).max_abs() > 1e-12 {
        return Err(Error::InvalidParameter("classical oracle needs U = X".into()));
    }
    if bits.len() != species.len() {
        return Err(Error::DimensionMismatch { expected: species.len(), actual: bits.len() });
    }
    let n = bits.len();
    Ok((0..n)
        .map(|k| {
            let left = if k > 0 { bits[k - 1] } else { 0 };
            let right = if k + 1 < n { bits[k + 1] } else { 0 };
            if species[k] == op.target && left + right == op.f {
                bits[k] ^ 1
            } else {
                bits[k]
            }
        })
        .collect())
}

/// Single-qubit gate by name: X, Z, H, T, P(φ) or I.
pub fn named_gate(name: &str) -> Result<ComplexMatrix> {
    let t = name.trim();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let upper = t.to_ascii_uppercase();
    let phase = |phi: f64| ComplexMatrix::from_diagonal(&[ONE, Complex64::from_polar(1.0, phi)]);
    Ok(match upper.as_str() {
        "I" => ComplexMatrix::identity(2),
        "X" => pauli_x(),
        "Z" => phase(std::f64::consts::PI),
        "H" => ComplexMatrix::from_real_rows(&[&[h, h], &[h, -h]]),
        "T" => phase(std::f64::consts::FRAC_PI_4),
        _ => match upper.strip_prefix("P(").and_then(|r| r.strip_suffix(')')) {
            Some(arg) => phase(parse_angle(arg)?),
            None => return Err(Error::UnknownGate(t.to_string())),
        },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    Global(GlobalOpSpec),
    Move,
}

/// Parses a program of `global <species> <f> <gate>` and `move` lines.
/// Blank lines and `#` comments are ignored.
pub fn parse_program(text: &str) -> Result<Vec<Instruction>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: n + 1, message };
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["move"] => out.push(Instruction::Move),
            ["global", sp, f, gate @ ..] if !gate.is_empty() => {
                let species: Species = sp.parse().map_err(|e: Error| err(e.to_string()))?;
                let f: u8 = f.parse().map_err(|_| err(format!("bad neighbour sum '{f}'")))?;
                let u = named_gate(&gate.join("")).map_err(|e| err(e.to_string()))?;
                out.push(Instruction::Global(GlobalOpSpec::new(species, f, u).map_err(|e| err(e.to_string()))?));
            }
            _ => return Err(err(format!("expected 'global <species> <f> <gate>' or 'move', got '{line}'"))),
        }
    }
    Ok(out)
}

pub fn run_program(state: &QcaState, program: &[Instruction]) -> QcaState {
    program.iter().fold(state.clone(), |s, ins| match ins {
        Instruction::Global(op) => apply_global(&s, op),
        Instruction::Move => move_step(&s),
    })
}
