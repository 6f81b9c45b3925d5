//! Logical encodings, gate verification up to a global phase and the
//! brute-force logical oracles the verification runs against.
//!
//! Logical |0⟩ is the highest-m state of the encoding pair, |1⟩ the lowest.
//! Logical qubits are ordered by slot, the first qubit most significant.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{embed_multi, phase_fidelity, ComplexMatrix, ONE, ZERO};
use crate::pulse::compile::apply_to_states;
use crate::pulse::sequence::PulseSequence;
use crate::register::Register;

/// A qubit stored in two levels of one spin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitEncoding {
    pub name: &'static str,
    pub physical_dim: usize,
    pub zero: usize,
    pub one: usize,
}

impl QubitEncoding {
    pub fn new(name: &'static str, physical_dim: usize, zero: usize, one: usize) -> Result<Self> {
        if zero == one || zero >= physical_dim || one >= physical_dim {
            return Err(Error::InvalidParameter(format!(
                "encoding {name}: levels ({zero}, {one}) invalid for dimension {physical_dim}"
            )));
        }
        Ok(Self { name, physical_dim, zero, one })
    }

    /// Both levels of a spin-1/2.
    pub fn nuclear() -> Self {
        Self { name: "nuclear", physical_dim: 2, zero: 0, one: 1 }
    }

    /// Both levels of a spin-1/2 electron.
    pub fn half() -> Self {
        Self { name: "half", physical_dim: 2, zero: 0, one: 1 }
    }

    /// m = ±1/2 of a spin-3/2.
    pub fn inner() -> Self {
        Self { name: "inner", physical_dim: 4, zero: 1, one: 2 }
    }

    /// m = ±3/2 of a spin-3/2.
    pub fn outer() -> Self {
        Self { name: "outer", physical_dim: 4, zero: 0, one: 3 }
    }

    /// m = ±s of a spin two_s/2.
    pub fn highlow(two_s: u32) -> Self {
        Self { name: "highlow", physical_dim: two_s as usize + 1, zero: 0, one: two_s as usize }
    }

    pub fn level(&self, bit: usize) -> usize {
        if bit == 0 {
            self.zero
        } else {
            self.one
        }
    }
}

/// How one slot of a register enters the logical space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotEncoding {
    Qubit(QubitEncoding),
    /// Held in a fixed basis level, e.g. an electron bus at its ground state.
    Fixed { dim: usize, index: usize },
}

impl SlotEncoding {
    pub fn dim(&self) -> usize {
        match self {
            SlotEncoding::Qubit(q) => q.physical_dim,
            SlotEncoding::Fixed { dim, .. } => *dim,
        }
    }
}

impl From<QubitEncoding> for SlotEncoding {
    fn from(q: QubitEncoding) -> Self {
        SlotEncoding::Qubit(q)
    }
}

pub fn qubits(encs: &[QubitEncoding]) -> Vec<SlotEncoding> {
    encs.iter().copied().map(SlotEncoding::from).collect()
}

fn qubit_count(encs: &[SlotEncoding]) -> usize {
    encs.iter().filter(|e| matches!(e, SlotEncoding::Qubit(_))).count()
}

/// Physical basis index of each logical basis state.
pub fn encoded_indices(encs: &[SlotEncoding]) -> Vec<usize> {
    let k = qubit_count(encs);
    (0..1usize << k)
        .map(|logical| {
            let mut q = 0;
            encs.iter().fold(0, |acc, e| match e {
                SlotEncoding::Qubit(enc) => {
                    let bit = (logical >> (k - 1 - q)) & 1;
                    q += 1;
                    acc * enc.physical_dim + enc.level(bit)
                }
                SlotEncoding::Fixed { dim, index } => acc * dim + index,
            })
        })
        .collect()
}

/// The physical_dim × 2^k isometry whose columns are the encoded logical basis states.
pub fn encoding_isometry(encs: &[SlotEncoding]) -> Result<ComplexMatrix> {
    for e in encs {
        if let SlotEncoding::Fixed { dim, index } = e {
            if index >= dim {
                return Err(Error::InvalidParameter(format!("fixed level {index} outside dimension {dim}")));
            }
        }
    }
    let dim: usize = encs.iter().map(|e| e.dim()).product();
    let idx = encoded_indices(encs);
    let mut e = ComplexMatrix::zeros(dim, idx.len());
    for (c, &r) in idx.iter().enumerate() {
        e[(r, c)] = ONE;
    }
    Ok(e)
}

fn check_register(reg: &Register, encs: &[SlotEncoding]) -> Result<()> {
    if encs.len() != reg.dims().len() {
        return Err(Error::DimensionMismatch { expected: reg.dims().len(), actual: encs.len() });
    }
    for (e, &d) in encs.iter().zip(reg.dims()) {
        if e.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: e.dim() });
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Normal,
    Inverted,
    NotApplicable,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Normal => "normal",
            Polarity::Inverted => "inverted",
            Polarity::NotApplicable => "n/a",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub name: String,
    pub branch: String,
    pub fidelity: f64,
    pub leakage: f64,
    pub phase: f64,
    pub polarity: Polarity,
    pub pass: bool,
    pub tolerance: f64,
}

impl VerificationReport {
    fn new(fidelity: f64, leakage: f64, phase: f64, polarity: Polarity, tolerance: f64) -> Self {
        Self {
            name: String::new(),
            branch: String::new(),
            fidelity,
            leakage,
            phase,
            polarity,
            pass: 1.0 - fidelity < tolerance && leakage < tolerance,
            tolerance,
        }
    }

    pub fn labeled(mut self, name: impl Into<String>, branch: impl Into<String>) -> Self {
        self.name = name.into();
        self.branch = branch.into();
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<28} {:<3} fid={:.12} leak={:.2e} phase={:+.6} polarity={:<8} {}",
            self.name,
            self.branch,
            self.fidelity,
            self.leakage,
            self.phase,
            self.polarity,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Verification from the image U·E of the encoded basis.
fn report_from_image(ue: &ComplexMatrix, e: &ComplexMatrix, target: &ComplexMatrix, tol: f64) -> Result<VerificationReport> {
    if target.rows() != e.cols() || !target.is_square() {
        return Err(Error::DimensionMismatch { expected: e.cols(), actual: target.rows() });
    }
    let m = e.adjoint().matmul(ue)?;
    let outside = ue - &e.matmul(&m)?;
    let (fidelity, phase) = phase_fidelity(&m, target)?;
    let polarity = if target.rows() == 4 {
        match logical_profile(&m, 0, 1, tol)?.polarity {
            Polarity::NotApplicable => logical_profile(&m, 1, 0, tol)?.polarity,
            p => p,
        }
    } else {
        Polarity::NotApplicable
    };
    Ok(VerificationReport::new(fidelity, outside.spectral_norm(), phase, polarity, tol))
}

/// Compares a compiled sequence with a logical target on the encoded subspace.
pub fn verify_gate(
    seq: &PulseSequence,
    reg: &Register,
    encs: &[SlotEncoding],
    target: &ComplexMatrix,
    tol: f64,
) -> Result<VerificationReport> {
    check_register(reg, encs)?;
    let e = encoding_isometry(encs)?;
    let ue = apply_to_states(seq, reg, &e)?;
    Ok(report_from_image(&ue, &e, target, tol)?.labeled(seq.name.clone().unwrap_or_default(), ""))
}

/// As [`verify_gate`] for an already compiled unitary.
pub fn verify_unitary(
    u: &ComplexMatrix,
    encs: &[SlotEncoding],
    target: &ComplexMatrix,
    tol: f64,
) -> Result<VerificationReport> {
    let e = encoding_isometry(encs)?;
    if u.cols() != e.rows() {
        return Err(Error::DimensionMismatch { expected: e.rows(), actual: u.cols() });
    }
    let ue = u.matmul(&e)?;
    report_from_image(&ue, &e, target, tol)
}

/// Checks that every encoded basis state is sent to `image(state)` up to a
/// phase of its own.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternReport {
    /// Smallest |⟨image(j)|U|j⟩| over basis states.
    pub min_overlap: f64,
    /// arg⟨image(j)|U|j⟩ per logical basis state.
    pub phases: Vec<f64>,
    /// Largest norm of a column's part outside its expected image.
    pub leakage: f64,
    pub pass: bool,
}

pub fn verify_pattern(
    seq: &PulseSequence,
    reg: &Register,
    encs: &[SlotEncoding],
    image: impl Fn(usize) -> usize,
    tol: f64,
) -> Result<PatternReport> {
    check_register(reg, encs)?;
    let e = encoding_isometry(encs)?;
    let idx = encoded_indices(encs);
    let ue = apply_to_states(seq, reg, &e)?;
    let mut min_overlap: f64 = 1.0;
    let mut leakage: f64 = 0.0;
    let mut phases = Vec::with_capacity(idx.len());
    for j in 0..idx.len() {
        let row = idx[image(j)];
        let amp = ue[(row, j)];
        min_overlap = min_overlap.min(amp.norm());
        phases.push(amp.arg());
        let rest: f64 = (0..ue.rows()).filter(|&r| r != row).map(|r| ue[(r, j)].norm_sqr()).sum();
        leakage = leakage.max(rest.sqrt());
    }
    Ok(PatternReport { min_overlap, phases, leakage, pass: 1.0 - min_overlap < tol && leakage < tol })
}

/// The operator a two-qubit gate induces on its target for each control value.
#[derive(Clone, Debug)]
pub struct ConditionalProfile {
    /// Target operator for control = 0 and control = 1.
    pub blocks: [ComplexMatrix; 2],
    /// Largest amplitude connecting different control values.
    pub off_block: f64,
    pub polarity: Polarity,
}

fn is_multiple_of(m: &ComplexMatrix, v: &ComplexMatrix, tol: f64) -> bool {
    phase_fidelity(m, v).map(|(f, _)| 1.0 - f < tol).unwrap_or(false)
}

/// Profile of a 4×4 logical matrix with the given control and target qubits.
pub fn logical_profile(m: &ComplexMatrix, control: usize, target: usize, tol: f64) -> Result<ConditionalProfile> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, actual: m.rows() });
    }
    if control > 1 || target > 1 || control == target {
        return Err(Error::InvalidParameter("control and target must be the two distinct qubits 0 and 1".into()));
    }
    let index = |c: usize, t: usize| if control == 0 { 2 * c + t } else { 2 * t + c };
    let block = |c: usize| ComplexMatrix::from_fn(2, 2, |r, k| m[(index(c, r), index(c, k))]);
    let mut off_block: f64 = 0.0;
    for c in 0..2 {
        for t in 0..2 {
            for t2 in 0..2 {
                off_block = off_block.max(m[(index(1 - c, t2), index(c, t))].norm());
            }
        }
    }
    let blocks = [block(0), block(1)];
    let id = ComplexMatrix::identity(2);
    let x = pauli_x();
    let polarity = if off_block > tol {
        Polarity::NotApplicable
    } else if is_multiple_of(&blocks[0], &id, tol) && is_multiple_of(&blocks[1], &x, tol) {
        Polarity::Normal
    } else if is_multiple_of(&blocks[0], &x, tol) && is_multiple_of(&blocks[1], &id, tol) {
        Polarity::Inverted
    } else {
        Polarity::NotApplicable
    };
    Ok(ConditionalProfile { blocks, off_block, polarity })
}

/// Profile of a physical unitary on two encoded qubits given by slot index.
pub fn conditional_profile(
    u: &ComplexMatrix,
    control_slot: usize,
    target_slot: usize,
    encs: &[SlotEncoding],
    tol: f64,
) -> Result<ConditionalProfile> {
    if qubit_count(encs) != 2 {
        return Err(Error::InvalidParameter("conditional profile needs exactly two encoded qubits".into()));
    }
    let qubit_of = |slot: usize| -> Result<usize> {
        match encs.get(slot) {
            Some(SlotEncoding::Qubit(_)) => Ok(encs[..slot].iter().filter(|e| matches!(e, SlotEncoding::Qubit(_))).count()),
            _ => Err(Error::SlotOutOfRange { index: slot, len: encs.len() }),
        }
    };
    let (c, t) = (qubit_of(control_slot)?, qubit_of(target_slot)?);
    let e = encoding_isometry(encs)?;
    let m = e.adjoint().matmul(&u.matmul(&e)?)?;
    logical_profile(&m, c, t, tol)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

/// exp(iθS_x) on a spin-1/2.
pub fn x_rotation(theta: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    ComplexMatrix::from_fn(2, 2, |r, k| if r == k { Complex64::new(c, 0.0) } else { Complex64::new(0.0, s) })
}

/// Named logical gates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LogicalGate {
    Identity,
    X,
    Z,
    Phase(f64),
    /// Qubit 0 controls X on qubit 1.
    Cnot,
    Swap,
    /// Qubit 0 controls e^{−iθ/2}·exp(iθS_x) on qubit 1; equals CNOT at θ = π.
    CondX(f64),
}

impl LogicalGate {
    pub fn oracle(self, k: usize) -> Result<ComplexMatrix> {
        target_oracle(self, k)
    }
}

impl FromStr for LogicalGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let upper = t.to_ascii_uppercase();
        let arg = |prefix: &str| -> Option<Result<f64>> {
            let rest = upper.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(parse_angle(rest))
        };
        Ok(match upper.as_str() {
            "I" | "IDENTITY" => LogicalGate::Identity,
            "X" | "NOT" => LogicalGate::X,
            "Z" => LogicalGate::Z,
            "CNOT" => LogicalGate::Cnot,
            "SWAP" => LogicalGate::Swap,
            _ => {
                if let Some(a) = arg("PHASE").or_else(|| arg("P")) {
                    LogicalGate::Phase(a?)
                } else if let Some(a) = arg("CONDX").or_else(|| arg("CONDITIONAL-X")) {
                    LogicalGate::CondX(a?)
                } else {
                    return Err(Error::UnknownGate(t.to_string()));
                }
            }
        })
    }
}

/// Parses an angle such as `pi/4`, `-3pi/2`, `0.25` or `π`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim().to_ascii_lowercase().replace('π', "pi").replace(' ', "");
    let bad = || Error::InvalidParameter(format!("cannot parse angle '{text}'"));
    if let Some(pos) = t.find("pi") {
        let (num, rest) = (&t[..pos], &t[pos + 2..]);
        let coeff = match num.trim_end_matches('*') {
            "" | "+" => 1.0,
            "-" => -1.0,
            n => n.parse::<f64>().map_err(|_| bad())?,
        };
        let den = match rest {
            "" => 1.0,
            r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
        };
        Ok(coeff * PI / den)
    } else {
        t.parse::<f64>().map_err(|_| bad())
    }
}

/// A single-qubit unitary controlled by one qubit of a k-qubit register.
pub fn logical_controlled(control: usize, target: usize, u: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    let mut cu = ComplexMatrix::identity(4);
    for r in 0..2 {
        for c in 0..2 {
            cu[(2 + r, 2 + c)] = u[(r, c)];
        }
    }
    embed_multi(&cu, &[control, target], &vec![2; k])
}

/// The exact logical matrix of a named gate on k qubits. Single-qubit gates
/// act on every qubit; two-qubit gates act on qubits 0 and 1.
pub fn target_oracle(gate: LogicalGate, k: usize) -> Result<ComplexMatrix> {
    if k == 0 || k > 4 {
        return Err(Error::InvalidParameter(format!("oracle qubit count {k} outside 1..=4")));
    }
    let dim = 1usize << k;
    let bit = |x: usize, q: usize| (x >> (k - 1 - q)) & 1;
    let single = |f: &dyn Fn(usize, usize) -> Complex64| -> ComplexMatrix {
        ComplexMatrix::from_fn(dim, dim, |r, c| (0..k).fold(ONE, |acc, q| acc * f(bit(r, q), bit(c, q))))
    };
    let two = k >= 2;
    let need_two = || Error::InvalidParameter("two-qubit gate needs k ≥ 2".into());
    Ok(match gate {
        LogicalGate::Identity => ComplexMatrix::identity(dim),
        LogicalGate::X => single(&|r, c| if r != c { ONE } else { ZERO }),
        LogicalGate::Z => single(&|r, c| if r != c { ZERO } else if r == 0 { ONE } else { -ONE }),
        LogicalGate::Phase(phi) => {
            single(&|r, c| if r != c { ZERO } else if r == 0 { ONE } else { Complex64::from_polar(1.0, phi) })
        }
        LogicalGate::Cnot => {
            if !two {
                return Err(need_two());
            }
            let flip = |x: usize| if bit(x, 0) == 1 { x ^ (1 << (k - 2)) } else { x };
            ComplexMatrix::from_fn(dim, dim, |r, c| if r == flip(c) { ONE } else { ZERO })
        }
        LogicalGate::Swap => {
            if !two {
                return Err(need_two());
            }
            let swap = |x: usize| {
                let (a, b) = (bit(x, 0), bit(x, 1));
                let cleared = x & !(0b11 << (k - 2));
                cleared | (b << (k - 1)) | (a << (k - 2))
            };
            ComplexMatrix::from_fn(dim, dim, |r, c| if r == swap(c) { ONE } else { ZERO })
        }
        LogicalGate::CondX(theta) => {
            if !two {
                return Err(need_two());
            }
            let u = x_rotation(theta).scale(Complex64::from_polar(1.0, -theta / 2.0));
            logical_controlled(0, 1, &u, k)?
        }
    })
}

/// Writes reports as CSV with a stable column order.
pub fn write_reports<W: Write>(out: W, reports: &[VerificationReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["name", "branch", "fidelity", "leakage", "phase", "polarity", "pass"])?;
    for r in reports {
        w.write_record([
            r.name.clone(),
            r.branch.clone(),
            format!("{}", r.fidelity),
            format!("{}", r.leakage),
            format!("{}", r.phase),
            r.polarity.to_string(),
            r.pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::phase_aligned_distance;

    #[test]
    fn nuclear_isometry_is_identity() {
        let e = encoding_isometry(&qubits(&[QubitEncoding::nuclear()])).unwrap();
        assert_eq!(e, ComplexMatrix::identity(2));
    }

    #[test]
    fn inner_isometry_selects_half_levels() {
        let e = encoding_isometry(&qubits(&[QubitEncoding::inner()])).unwrap();
        assert_eq!((e.rows(), e.cols()), (4, 2));
        assert_eq!(e[(1, 0)], ONE);
        assert_eq!(e[(2, 1)], ONE);
    }

    #[test]
    fn isometry_is_isometric() {
        let e = encoding_isometry(&qubits(&[QubitEncoding::inner(), QubitEncoding::nuclear()])).unwrap();
        assert_eq!(e.rows(), 8);
        assert_eq!(e.adjoint().matmul(&e).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn invalid_encoding_rejected() {
        assert!(QubitEncoding::new("bad", 2, 1, 1).is_err());
        assert!(QubitEncoding::new("bad", 2, 0, 2).is_err());
        assert!(encoding_isometry(&[SlotEncoding::Fixed { dim: 2, index: 2 }]).is_err());
    }

    #[test]
    fn oracle_permutations() {
        let cnot = target_oracle(LogicalGate::Cnot, 2).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 1.0, 0.0],
        ]);
        assert_eq!(cnot, expect);
        let swap = target_oracle(LogicalGate::Swap, 2).unwrap();
        assert_eq!(swap[(1, 2)], ONE);
        assert_eq!(swap[(0, 0)], ONE);
        let cx = target_oracle(LogicalGate::CondX(PI), 2).unwrap();
        assert!((&cx - &cnot).max_abs() < 1e-15);
        assert!(target_oracle(LogicalGate::Cnot, 1).is_err());
    }

    #[test]
    fn profile_of_cnot_and_cz() {
        let cnot = target_oracle(LogicalGate::Cnot, 2).unwrap();
        let p = logical_profile(&cnot, 0, 1, 1e-9).unwrap();
        assert_eq!(p.polarity, Polarity::Normal);
        let cz = logical_controlled(0, 1, &target_oracle(LogicalGate::Z, 1).unwrap(), 2).unwrap();
        let p = logical_profile(&cz, 0, 1, 1e-9).unwrap();
        assert_eq!(p.polarity, Polarity::NotApplicable);
        assert!(phase_aligned_distance(&p.blocks[1], &target_oracle(LogicalGate::Z, 1).unwrap()).unwrap() < 1e-15);
        let mut anti = ComplexMatrix::zeros(4, 4);
        for (r, c) in [(1, 0), (0, 1), (2, 2), (3, 3)] {
            anti[(r, c)] = ONE;
        }
        assert_eq!(logical_profile(&anti, 0, 1, 1e-9).unwrap().polarity, Polarity::Inverted);
    }

    #[test]
    fn empty_sequence_verifies_as_identity() {
        let reg = Register::molecule(1, 3).unwrap();
        let encs = qubits(&[QubitEncoding::nuclear(), QubitEncoding::inner()]);
        let r = verify_gate(&PulseSequence::empty(), &reg, &encs, &ComplexMatrix::identity(4), 1e-9).unwrap();
        assert!(r.pass);
        assert!(r.leakage == 0.0 && (r.fidelity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn angles_parse() {
        assert!((parse_angle("pi/4").unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((parse_angle("-3pi/2").unwrap() + 1.5 * PI).abs() < 1e-15);
        assert!((parse_angle("π").unwrap() - PI).abs() < 1e-15);
        assert!((parse_angle("0.5").unwrap() - 0.5).abs() < 1e-15);
        assert!(parse_angle("pie").is_err());
        assert_eq!("P(pi/4)".parse::<LogicalGate>().unwrap(), LogicalGate::Phase(PI / 4.0));
        assert!("Q".parse::<LogicalGate>().is_err());
    }

    #[test]
    fn csv_has_stable_header() {
        let mut buf = Vec::new();
        write_reports(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,branch,fidelity,leakage,phase,polarity,pass\n");
    }
}
