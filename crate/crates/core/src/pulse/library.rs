//! Named pulse sequences.
//!
//! Sign branches: `Branch::Upper` takes the upper sign of every correlated
//! ± pair and `Branch::Lower` the lower one.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use crate::error::{Error, Result};
use crate::pulse::generator::{Generator, Sites};
use crate::pulse::sequence::{PulseElement as E, PulseSequence};
use crate::register::Role;
use crate::spin::Axis;
use crate::system::Species;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Branch::Upper => "+",
            Branch::Lower => "-",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// I controls S
    IS,
    /// S controls I
    SI,
}

/// Every catalog entry with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Entry {
    CnotHalf { control: Species, branch: Branch },
    CnotInnerAB,
    CnotInnerBA { branch: Branch },
    CnotOuterIS { branch: Branch },
    CnotOuterSI { branch: Branch },
    CnotInnerIS { branch: Branch },
    CnotInnerSI { branch: Branch },
    SwapInner,
    SwapOuter,
    CondX { control: Species, target: Species, delta: f64 },
    Xi { delta: f64 },
    A2U { theta: f64 },
    A2UAsPrinted { theta: f64 },
    A1U { theta: f64 },
    A0U { theta: f64 },
    F1Tag,
    F2Tag,
    F0Tag,
    CtrlUEuler { alpha: f64, beta: f64, gamma: f64, delta: f64 },
    CnotParity { a: u32, b: u32, direction: Direction },
    SwapHighLow { a: u32, b: u32 },
}

impl Entry {
    pub fn name(&self) -> &'static str {
        match self {
            Entry::CnotHalf { .. } => "CNOT_HALF",
            Entry::CnotInnerAB => "CNOT_INNER_AB",
            Entry::CnotInnerBA { .. } => "CNOT_INNER_BA",
            Entry::CnotOuterIS { .. } => "CNOT_OUTER_IS",
            Entry::CnotOuterSI { .. } => "CNOT_OUTER_SI",
            Entry::CnotInnerIS { .. } => "CNOT_INNER_IS",
            Entry::CnotInnerSI { .. } => "CNOT_INNER_SI",
            Entry::SwapInner => "SWAP_INNER",
            Entry::SwapOuter => "SWAP_OUTER",
            Entry::CondX { .. } => "COND_X",
            Entry::Xi { .. } => "XI",
            Entry::A2U { .. } => "A2_U",
            Entry::A2UAsPrinted { .. } => "A2_U_AS_PRINTED",
            Entry::A1U { .. } => "A1_U",
            Entry::A0U { .. } => "A0_U",
            Entry::F1Tag => "F1_TAG",
            Entry::F2Tag => "F2_TAG",
            Entry::F0Tag => "F0_TAG",
            Entry::CtrlUEuler { .. } => "CTRL_U_EULER",
            Entry::CnotParity { .. } => "CNOT_PARITY",
            Entry::SwapHighLow { .. } => "SWAP_HIGHLOW",
        }
    }

    pub fn branch(&self) -> Option<Branch> {
        match *self {
            Entry::CnotHalf { branch, .. }
            | Entry::CnotInnerBA { branch }
            | Entry::CnotOuterIS { branch }
            | Entry::CnotOuterSI { branch }
            | Entry::CnotInnerIS { branch }
            | Entry::CnotInnerSI { branch } => Some(branch),
            _ => None,
        }
    }

    pub fn with_branch(&self, b: Branch) -> Entry {
        let mut e = *self;
        match &mut e {
            Entry::CnotHalf { branch, .. }
            | Entry::CnotInnerBA { branch }
            | Entry::CnotOuterIS { branch }
            | Entry::CnotOuterSI { branch }
            | Entry::CnotInnerIS { branch }
            | Entry::CnotInnerSI { branch } => *branch = b,
            _ => {}
        }
        e
    }

    pub fn sequence(&self) -> Result<PulseSequence> {
        let seq = match *self {
            Entry::CnotHalf { control, branch } => cnot_half(control, branch),
            Entry::CnotInnerAB => cnot_inner_ab(),
            Entry::CnotInnerBA { branch } => cnot_inner_ba(branch),
            Entry::CnotOuterIS { branch } | Entry::CnotInnerIS { branch } => hyperfine_cnot_is(branch, Sites::All),
            Entry::CnotOuterSI { branch } => cnot_outer_si(branch, Sites::All),
            Entry::CnotInnerSI { branch } => cnot_inner_si(branch, Sites::All),
            Entry::SwapInner => swap_inner(Sites::All),
            Entry::SwapOuter => swap_outer(Sites::All),
            Entry::CondX { control, target, delta } => cond_x(control, target, delta),
            Entry::Xi { delta } => xi(delta),
            Entry::A2U { theta } => a2_u(theta),
            Entry::A2UAsPrinted { theta } => a2_u_as_printed(theta),
            Entry::A1U { theta } => a1_u(theta),
            Entry::A0U { theta } => a0_u(theta),
            Entry::F1Tag => f1_tag(),
            Entry::F2Tag => f2_tag(),
            Entry::F0Tag => f0_tag(),
            Entry::CtrlUEuler { alpha, beta, gamma, delta } => ctrl_u_euler(alpha, beta, gamma, delta),
            Entry::CnotParity { a, b, direction } => cnot_parity(a, b, direction)?,
            Entry::SwapHighLow { a, b } => swap_highlow(a, b)?,
        };
        let label = match self.branch() {
            Some(b) => format!("{}({})", self.name(), b.label()),
            None => self.name().to_string(),
        };
        Ok(seq.named(label))
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn s(sp: Species, axis: Axis) -> Generator {
    Generator::s(sp, axis)
}

fn zsum() -> Generator {
    s(Species::A, Axis::Z) + s(Species::B, Axis::Z)
}

/// Looks up an entry by name with positional numeric parameters.
pub fn library(name: &str, params: &[f64]) -> Result<PulseSequence> {
    let p = |k: usize| {
        params.get(k).copied().ok_or_else(|| Error::InvalidParameter(format!("{name} needs parameter #{}", k + 1)))
    };
    let branch = || if params.first().copied().unwrap_or(1.0) < 0.0 { Branch::Lower } else { Branch::Upper };
    let entry = match name {
        "CNOT_HALF" => Entry::CnotHalf { control: Species::A, branch: branch() },
        "CNOT_HALF_BA" => Entry::CnotHalf { control: Species::B, branch: branch() },
        "CNOT_INNER_AB" => Entry::CnotInnerAB,
        "CNOT_INNER_BA" => Entry::CnotInnerBA { branch: branch() },
        "CNOT_OUTER_IS" => Entry::CnotOuterIS { branch: branch() },
        "CNOT_OUTER_SI" => Entry::CnotOuterSI { branch: branch() },
        "CNOT_INNER_IS" => Entry::CnotInnerIS { branch: branch() },
        "CNOT_INNER_SI" => Entry::CnotInnerSI { branch: branch() },
        "SWAP_INNER" => Entry::SwapInner,
        "SWAP_OUTER" => Entry::SwapOuter,
        "COND_X" => Entry::CondX { control: Species::B, target: Species::A, delta: p(0)? },
        "XI" => Entry::Xi { delta: p(0)? },
        "A2_U" => Entry::A2U { theta: p(0)? },
        "A2_U_AS_PRINTED" => Entry::A2UAsPrinted { theta: p(0)? },
        "A1_U" => Entry::A1U { theta: p(0)? },
        "A0_U" => Entry::A0U { theta: p(0)? },
        "F1_TAG" => Entry::F1Tag,
        "F2_TAG" => Entry::F2Tag,
        "F0_TAG" => Entry::F0Tag,
        "CTRL_U_EULER" => Entry::CtrlUEuler { alpha: p(0)?, beta: p(1)?, gamma: p(2)?, delta: p(3)? },
        "CNOT_PARITY" | "CNOT_PARITY_SI" => {
            let direction = if name.ends_with("_SI") { Direction::SI } else { Direction::IS };
            Entry::CnotParity { a: p(0)? as u32, b: p(1)? as u32, direction }
        }
        "SWAP_HIGHLOW" => Entry::SwapHighLow { a: p(0)? as u32, b: p(1)? as u32 },
        other => return Err(Error::UnknownEntry(other.to_string())),
    };
    entry.sequence()
}

/// Spin-1/2 CNOT between electrons; the other species is the target.
pub fn cnot_half(control: Species, branch: Branch) -> PulseSequence {
    let t = control.other();
    let sg = branch.sign();
    PulseSequence::new(
        vec![
            E::minus(s(t, Axis::Y)),
            E::rot(zsum(), -sg * FRAC_PI_2),
            E::rot(Generator::dipolar_zz(), sg * FRAC_PI_2),
            E::plus(s(t, Axis::Y)),
        ],
        sg * FRAC_PI_4,
    )
}

/// Inner-qubit CNOT with A controlling B.
pub fn cnot_inner_ab() -> PulseSequence {
    PulseSequence::new(
        vec![
            E::plus(s(Species::B, Axis::Y)),
            E::minus(zsum()),
            E::plus(Generator::dipolar_zz()),
            E::minus(s(Species::B, Axis::Y)),
        ],
        FRAC_PI_4,
    )
}

/// Inner-qubit CNOT with B controlling A; only the phase carries a branch.
pub fn cnot_inner_ba(branch: Branch) -> PulseSequence {
    PulseSequence::new(
        vec![
            E::plus(s(Species::A, Axis::Y)),
            E::minus(zsum()),
            E::plus(Generator::dipolar_zz()),
            E::minus(s(Species::A, Axis::Y)),
        ],
        branch.sign() * FRAC_PI_4,
    )
}

fn nuc(sites: Sites, axis: Axis) -> Generator {
    Generator::spin(Role::Nuclear, sites, axis)
}

fn el(sites: Sites, axis: Axis) -> Generator {
    Generator::spin(Role::Electron, sites, axis)
}

/// Global electron and nuclear pulses, hyperfine coupling on `coupled` only.
fn hyperfine_parts(coupled: Sites) -> (impl Fn(Axis) -> Generator, impl Fn(Axis) -> Generator, Generator, Generator) {
    let i = |a| nuc(Sites::All, a);
    let sv = |a| el(Sites::All, a);
    let zs = el(Sites::All, Axis::Z) + nuc(Sites::All, Axis::Z);
    (i, sv, zs, Generator::hyperfine_zz(coupled))
}

/// Hyperfine CNOT with the nucleus controlling (outer and inner forms coincide).
pub fn hyperfine_cnot_is(branch: Branch, coupled: Sites) -> PulseSequence {
    let (_, sv, zs, zz) = hyperfine_parts(coupled);
    let sg = branch.sign();
    PulseSequence::new(
        vec![E::plus(sv(Axis::Y)), E::rot(zs, -sg * FRAC_PI_2), E::rot(zz, sg * FRAC_PI_2), E::minus(sv(Axis::Y))],
        sg * FRAC_PI_4,
    )
}

/// Hyperfine CNOT with the outer electron qubit controlling the nucleus.
pub fn cnot_outer_si(branch: Branch, coupled: Sites) -> PulseSequence {
    let (i, _, zs, zz) = hyperfine_parts(coupled);
    let sg = branch.sign();
    PulseSequence::new(
        vec![E::plus(i(Axis::Y)), E::rot(zs, sg * FRAC_PI_2), E::rot(zz, sg * FRAC_PI_2), E::minus(i(Axis::Y))],
        sg * FRAC_PI_4,
    )
}

/// Hyperfine CNOT with the inner electron qubit controlling the nucleus.
pub fn cnot_inner_si(branch: Branch, coupled: Sites) -> PulseSequence {
    let (i, _, zs, zz) = hyperfine_parts(coupled);
    let sg = branch.sign();
    PulseSequence::new(
        vec![E::minus(i(Axis::Y)), E::rot(zs, -sg * FRAC_PI_2), E::rot(zz, sg * FRAC_PI_2), E::plus(i(Axis::Y))],
        sg * FRAC_PI_4,
    )
}

/// Nuclear to inner-electron SWAP; the coupling acts only on `coupled` molecules.
pub fn swap_inner(coupled: Sites) -> PulseSequence {
    let (i, sv, _, zz) = hyperfine_parts(coupled);
    PulseSequence::new(
        vec![
            E::plus(i(Axis::Y)),
            E::plus(zz.clone()),
            E::plus(sv(Axis::Y) - i(Axis::Y)),
            E::plus(sv(Axis::X) - i(Axis::X)),
            E::plus(zz.clone()),
            E::plus(i(Axis::X) - sv(Axis::X)),
            E::plus(zz),
            E::plus(i(Axis::Y)),
        ],
        -FRAC_PI_4,
    )
}

/// Nuclear to outer-electron SWAP.
pub fn swap_outer(coupled: Sites) -> PulseSequence {
    let (i, sv, _, zz) = hyperfine_parts(coupled);
    PulseSequence::new(
        vec![
            E::minus(i(Axis::Y)),
            E::plus(zz.clone()),
            E::plus(-i(Axis::Y) - sv(Axis::Y)),
            E::plus(-i(Axis::X) - sv(Axis::X)),
            E::plus(zz.clone()),
            E::plus(sv(Axis::X) + i(Axis::X)),
            E::plus(zz),
            E::minus(i(Axis::Y)),
        ],
        3.0 * FRAC_PI_4,
    )
}

fn cond_x_elements(control: Species, target: Species, delta: f64) -> Vec<E> {
    let z = Generator::per_bond(target, Role::Electron, Axis::Z) + Generator::per_bond(control, Role::Electron, Axis::Z)
        - Generator::dipolar_zz();
    vec![E::plus(s(target, Axis::Y)), E::rot(z, -delta / 2.0), E::minus(s(target, Axis::Y))]
}

/// Conditional X_δ = exp(iδS_x) on `target`, fired by each neighbouring
/// `control` electron in its lower-m state. Single-spin z terms are summed
/// per bond, so on a target with two neighbours the result is the square
/// of the pair conditional.
pub fn cond_x(control: Species, target: Species, delta: f64) -> PulseSequence {
    PulseSequence::new(cond_x_elements(control, target, delta), delta / 2.0)
}

/// Ξ(B,A;X_δ): the pair conditional applied globally to an A with two B neighbours.
pub fn xi(delta: f64) -> PulseSequence {
    PulseSequence::new(cond_x_elements(Species::B, Species::A, delta), delta)
        .named(format!("Ξ({})", crate::pulse::sequence::fmt_angle(delta)))
}

fn za(angle: f64) -> E {
    E::rot(s(Species::A, Axis::Z), angle)
}

fn xb(angle: f64) -> E {
    E::rot(s(Species::B, Axis::X), angle)
}

/// {Z^A_{−π/2}}·Ξ(±π)·{Z^A_{π/2}}
fn twirl(sign: f64) -> PulseSequence {
    PulseSequence::new(vec![za(-FRAC_PI_2), xi(sign * PI).as_block(), za(FRAC_PI_2)], 0.0).named(if sign > 0.0 {
        "M"
    } else {
        "M⁻¹"
    })
}

/// exp(iθS_x) on A iff both neighbours are set.
pub fn a2_u(theta: f64) -> PulseSequence {
    PulseSequence::new(
        vec![
            E::rot(Generator::per_bond(Species::B, Role::Electron, Axis::Z), theta / 4.0),
            xi(theta / 4.0).as_block(),
            twirl(-1.0).as_block(),
            xi(theta / 4.0).as_block(),
            twirl(1.0).as_block(),
        ],
        0.0,
    )
}

/// The two-neighbour sequence exactly as printed, with δ = θ/2.
pub fn a2_u_as_printed(theta: f64) -> PulseSequence {
    let d = theta / 2.0;
    let xa = |a: f64| E::rot(s(Species::A, Axis::X), a);
    PulseSequence::new(
        vec![
            xi(d).as_block(),
            xa(FRAC_PI_2 - d),
            za(-FRAC_PI_2),
            xi(PI).as_block(),
            za(-FRAC_PI_2),
            xa(FRAC_PI_2 - d),
            xi(d).as_block(),
        ],
        0.0,
    )
}

/// exp(iθS_x) on A iff exactly one neighbour is set.
pub fn a1_u(theta: f64) -> PulseSequence {
    PulseSequence::new(
        vec![xi(theta / 2.0).as_block(), twirl(1.0).as_block(), xi(-theta / 2.0).as_block(), twirl(-1.0).as_block()],
        0.0,
    )
}

/// exp(iθS_x) on A iff no neighbour is set.
pub fn a0_u(theta: f64) -> PulseSequence {
    PulseSequence::new(vec![xb(-PI), a2_u(theta).named("A2_U").as_block(), xb(PI)], 0.0)
}

/// f=1 tag: Ξ(B,A;NOT).
pub fn f1_tag() -> PulseSequence {
    PulseSequence::new(vec![xi(PI).as_block()], 0.0)
}

/// f=2 tag built from three Ξ(√NOT).
pub fn f2_tag() -> PulseSequence {
    let x = || xi(FRAC_PI_2).as_block();
    PulseSequence::new(vec![x(), za(-FRAC_PI_2), x(), za(-FRAC_PI_2), x()], 3.0 * FRAC_PI_4)
}

/// f=0 tag: flip every B, apply the f=2 tag, flip back.
pub fn f0_tag() -> PulseSequence {
    PulseSequence::new(vec![xb(-PI), f2_tag().named("F2_TAG").as_block(), xb(PI)], 0.0)
}

/// R_z(θ) = exp(−iθI_z) on every nucleus.
fn rz(theta: f64) -> E {
    E::rot(nuc(Sites::All, Axis::Z), -theta)
}

/// R_y(θ) = exp(−iθI_y) on every nucleus.
fn ry(theta: f64) -> E {
    E::rot(nuc(Sites::All, Axis::Y), -theta)
}

pub fn euler_d(beta: f64, gamma: f64) -> Vec<E> {
    vec![rz(beta), ry(gamma / 2.0)]
}

pub fn euler_e(beta: f64, gamma: f64, delta: f64) -> Vec<E> {
    vec![ry(-gamma / 2.0), rz(-(delta + beta) / 2.0)]
}

pub fn euler_f(beta: f64, delta: f64) -> Vec<E> {
    vec![rz((delta - beta) / 2.0)]
}

/// X_π on every electron; maps the inner qubit onto itself with m → −m.
fn electron_flip(sign: f64) -> E {
    E::rot(el(Sites::All, Axis::X), sign * PI)
}

/// D·C·E·C·F between electron flips, so the nucleus receives
/// R_z(β)R_y(γ)R_z(δ) when the inner electron is at m = +1/2.
pub fn controlled_u_core(beta: f64, gamma: f64, delta: f64) -> PulseSequence {
    let cnot = cnot_inner_si(Branch::Upper, Sites::All).named("CNOT_INNER_SI");
    let mut els = vec![electron_flip(-1.0)];
    els.extend(euler_d(beta, gamma));
    els.push(cnot.as_block());
    els.extend(euler_e(beta, gamma, delta));
    els.push(cnot.as_block());
    els.extend(euler_f(beta, delta));
    els.push(electron_flip(1.0));
    PulseSequence::new(els, 0.0).named("C(S,I;U)")
}

/// exp(iα S_z) on every electron.
pub fn phase_fix(alpha: f64) -> PulseSequence {
    PulseSequence::new(vec![E::rot(el(Sites::All, Axis::Z), alpha)], 0.0).named("phase-fix")
}

/// Controlled e^{iα}R_z(β)R_y(γ)R_z(δ) on every nucleus, fired by the
/// inner electron at m = +1/2.
pub fn ctrl_u_euler(alpha: f64, beta: f64, gamma: f64, delta: f64) -> PulseSequence {
    PulseSequence::new(vec![phase_fix(alpha).as_block(), controlled_u_core(beta, gamma, delta).as_block()], 0.0)
}

/// Highest/lowest-weight CNOT between spins a/2 (I) and b/2 (S), chosen
/// by the parities of ⌊a/2⌋ and ⌊b/2⌋.
pub fn cnot_parity(a: u32, b: u32, direction: Direction) -> Result<PulseSequence> {
    if a.is_multiple_of(2) || b.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("CNOT_PARITY needs odd a and b, got ({a}, {b})")));
    }
    let (alpha_odd, beta_odd) = ((a / 2) % 2 == 1, (b / 2) % 2 == 1);
    // (sign of the outer y pulse, sign of the z pulse) per parity class
    let ((y_is, z_is), (y_si, z_si)) = match (alpha_odd, beta_odd) {
        (false, false) => ((-1.0, -1.0), (-1.0, -1.0)),
        (true, true) => ((-1.0, 1.0), (-1.0, 1.0)),
        (true, false) => ((1.0, 1.0), (1.0, -1.0)),
        (false, true) => ((1.0, -1.0), (1.0, 1.0)),
    };
    let (i, sv, zs, zz) = hyperfine_parts(Sites::All);
    let (target, y, z) = match direction {
        Direction::IS => (sv(Axis::Y), y_is, z_is),
        Direction::SI => (i(Axis::Y), y_si, z_si),
    };
    Ok(PulseSequence::new(
        vec![
            E::rot(target.clone(), y * FRAC_PI_2),
            E::rot(zs, z * FRAC_PI_2),
            E::plus(zz),
            E::rot(target, -y * FRAC_PI_2),
        ],
        FRAC_PI_4,
    ))
}

/// SWAP between the highest/lowest-weight qubits of spins a/2 and b/2.
pub fn swap_highlow(a: u32, b: u32) -> Result<PulseSequence> {
    let is = cnot_parity(a, b, Direction::IS)?.named("C(I,S)");
    let si = cnot_parity(a, b, Direction::SI)?.named("C(S,I)");
    Ok(PulseSequence::new(vec![is.as_block(), si.as_block(), is.as_block()], 0.0))
}

/// Every catalog entry at representative parameters, both branches where the
/// sequence carries one.
pub fn catalog_entries() -> Vec<Entry> {
    let mut out = Vec::new();
    for branch in [Branch::Upper, Branch::Lower] {
        out.push(Entry::CnotHalf { control: Species::A, branch });
        out.push(Entry::CnotHalf { control: Species::B, branch });
    }
    out.push(Entry::CnotInnerAB);
    for branch in [Branch::Upper, Branch::Lower] {
        out.push(Entry::CnotInnerBA { branch });
    }
    for branch in [Branch::Upper, Branch::Lower] {
        out.push(Entry::CnotOuterIS { branch });
        out.push(Entry::CnotOuterSI { branch });
        out.push(Entry::CnotInnerIS { branch });
        out.push(Entry::CnotInnerSI { branch });
    }
    out.extend([
        Entry::SwapInner,
        Entry::SwapOuter,
        Entry::CondX { control: Species::B, target: Species::A, delta: FRAC_PI_2 },
        Entry::Xi { delta: PI },
        Entry::A2U { theta: PI },
        Entry::A2UAsPrinted { theta: PI },
        Entry::A1U { theta: PI },
        Entry::A0U { theta: PI },
        Entry::F1Tag,
        Entry::F2Tag,
        Entry::F0Tag,
        Entry::CtrlUEuler { alpha: 0.0, beta: 0.0, gamma: PI, delta: 0.0 },
        Entry::CnotParity { a: 1, b: 3, direction: Direction::IS },
        Entry::CnotParity { a: 1, b: 3, direction: Direction::SI },
        Entry::SwapHighLow { a: 1, b: 11 },
    ]);
    out
}
