//! Verification suites over the sequence library, and the catalog dump.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{embed_multi, kron_all, phase_fidelity, ComplexMatrix, ONE, ZERO};
use crate::pulse::compile::compile;
use crate::pulse::library::{self, catalog_entries, Branch, Direction, Entry};
use crate::pulse::sequence::{fmt_angle, PulseSequence};
use crate::qca::{global_op_matrix, GlobalOpSpec};
use crate::register::Register;
use crate::system::Species;
use crate::verify::{
    conditional_profile, logical_controlled, pauli_x, qubits, verify_gate, verify_pattern, verify_unitary,
    x_rotation, LogicalGate, Polarity, QubitEncoding, SlotEncoding, VerificationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Cnot,
    Swap,
    Parity,
    Xi,
    Tag,
    CtrlU,
}

impl Suite {
    pub const PARTS: [Suite; 6] = [Suite::Cnot, Suite::Swap, Suite::Parity, Suite::Xi, Suite::Tag, Suite::CtrlU];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Cnot => "cnot",
            Suite::Swap => "swap",
            Suite::Parity => "parity",
            Suite::Xi => "xi",
            Suite::Tag => "tag",
            Suite::CtrlU => "ctrl-u",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::All].iter().chain(Suite::PARTS.iter()).copied().find(|x| x.name() == s.trim()).ok_or_else(|| {
            Error::InvalidParameter(format!("unknown suite '{s}', expected all|cnot|swap|parity|xi|tag|ctrl-u"))
        })
    }
}

/// One verification case, possibly run on both sign branches.
#[derive(Clone, Debug)]
pub struct CaseResult {
    pub name: String,
    pub reports: Vec<VerificationReport>,
    /// Index into `reports` of the canonical branch, if any branch passes.
    pub canonical: Option<usize>,
}

impl CaseResult {
    fn single(report: VerificationReport) -> Self {
        let canonical = report.pass.then_some(0);
        Self { name: report.name.clone(), reports: vec![report], canonical }
    }

    /// Canonical branch: a passing one with the smallest residual phase.
    fn branches(name: &str, reports: Vec<VerificationReport>) -> Self {
        let canonical = reports
            .iter()
            .enumerate()
            .filter(|(_, r)| r.pass)
            .min_by(|a, b| a.1.phase.abs().total_cmp(&b.1.phase.abs()))
            .map(|(k, _)| k);
        Self { name: name.to_string(), reports, canonical }
    }

    pub fn pass(&self) -> bool {
        self.canonical.is_some()
    }

    pub fn canonical_report(&self) -> Option<&VerificationReport> {
        self.canonical.map(|k| &self.reports[k])
    }
}

fn reverse_cnot() -> ComplexMatrix {
    logical_controlled(1, 0, &pauli_x(), 2).expect("two qubits")
}

fn both_branches(
    label: &str,
    entry: Entry,
    reg: &Register,
    encs: &[SlotEncoding],
    target: &ComplexMatrix,
    tol: f64,
) -> Result<CaseResult> {
    let mut reports = Vec::new();
    for b in [Branch::Upper, Branch::Lower] {
        let e = entry.with_branch(b);
        reports.push(verify_gate(&e.sequence()?, reg, encs, target, tol)?.labeled(label, b.label()));
    }
    Ok(CaseResult::branches(label, reports))
}

/// The ideal-interval CNOT cases.
pub fn cnot_suite(tol: f64) -> Result<Vec<CaseResult>> {
    let cnot = LogicalGate::Cnot.oracle(2)?;
    let rcnot = reverse_cnot();
    let half_pair = Register::electrons(&[Species::A, Species::B], 1)?;
    let half = qubits(&[QubitEncoding::half(), QubitEncoding::half()]);
    let spin32_pair = Register::electrons(&[Species::A, Species::B], 3)?;
    let inner2 = qubits(&[QubitEncoding::inner(), QubitEncoding::inner()]);
    let mol = Register::molecule(1, 3)?;
    let n_inner = qubits(&[QubitEncoding::nuclear(), QubitEncoding::inner()]);
    let n_outer = qubits(&[QubitEncoding::nuclear(), QubitEncoding::outer()]);

    let mut out = vec![
        both_branches(
            "CNOT_HALF(A→B)",
            Entry::CnotHalf { control: Species::A, branch: Branch::Upper },
            &half_pair,
            &half,
            &cnot,
            tol,
        )?,
        both_branches(
            "CNOT_HALF(B→A)",
            Entry::CnotHalf { control: Species::B, branch: Branch::Upper },
            &half_pair,
            &half,
            &rcnot,
            tol,
        )?,
        CaseResult::single(
            verify_gate(&library::cnot_inner_ab(), &spin32_pair, &inner2, &cnot, tol)?.labeled("CNOT_INNER_AB", ""),
        ),
        both_branches("CNOT_INNER_BA", Entry::CnotInnerBA { branch: Branch::Upper }, &spin32_pair, &inner2, &rcnot, tol)?,
        both_branches("CNOT_OUTER_IS", Entry::CnotOuterIS { branch: Branch::Upper }, &mol, &n_outer, &cnot, tol)?,
        both_branches("CNOT_INNER_IS", Entry::CnotInnerIS { branch: Branch::Upper }, &mol, &n_inner, &cnot, tol)?,
        both_branches("CNOT_OUTER_SI", Entry::CnotOuterSI { branch: Branch::Upper }, &mol, &n_outer, &rcnot, tol)?,
        both_branches("CNOT_INNER_SI", Entry::CnotInnerSI { branch: Branch::Upper }, &mol, &n_inner, &rcnot, tol)?,
    ];
    out.push(CaseResult::single(inner_outer_identity(tol)?));
    Ok(out)
}

/// The inner CNOT read with an outer-encoded control acts as a CNOT with
/// inverted control polarity.
pub fn inner_outer_identity(tol: f64) -> Result<VerificationReport> {
    let reg = Register::electrons(&[Species::A, Species::B], 3)?;
    let encs = qubits(&[QubitEncoding::outer(), QubitEncoding::inner()]);
    let u = compile(&library::cnot_inner_ab(), &reg)?;
    let profile = conditional_profile(&u, 0, 1, &encs, tol)?;
    let anti = logical_controlled(0, 1, &pauli_x(), 2)?.matmul(&kron_all(&[pauli_x(), ComplexMatrix::identity(2)]))?;
    let anti = kron_all(&[pauli_x(), ComplexMatrix::identity(2)]).matmul(&anti)?;
    let mut r = verify_unitary(&u, &encs, &anti, tol)?.labeled("CNOT_INNER_AB[outer ctrl]", "");
    r.polarity = profile.polarity;
    r.pass = r.pass && profile.polarity == Polarity::Inverted;
    Ok(r)
}

pub fn swap_suite(tol: f64) -> Result<Vec<CaseResult>> {
    let swap = LogicalGate::Swap.oracle(2)?;
    let mol = Register::molecule(1, 3)?;
    Ok(vec![
        CaseResult::single(
            verify_gate(&library::swap_inner(crate::pulse::Sites::All), &mol, &qubits(&[QubitEncoding::nuclear(), QubitEncoding::inner()]), &swap, tol)?
                .labeled("SWAP_INNER", ""),
        ),
        CaseResult::single(
            verify_gate(&library::swap_outer(crate::pulse::Sites::All), &mol, &qubits(&[QubitEncoding::nuclear(), QubitEncoding::outer()]), &swap, tol)?
                .labeled("SWAP_OUTER", ""),
        ),
    ])
}

/// Spin pairs covering all four parity classes.
pub const PARITY_PAIRS: [(u32, u32); 6] = [(1, 3), (3, 3), (1, 5), (3, 5), (1, 7), (1, 11)];

pub fn parity_suite(tol: f64) -> Result<Vec<CaseResult>> {
    let cnot = LogicalGate::Cnot.oracle(2)?;
    let rcnot = reverse_cnot();
    let swap = LogicalGate::Swap.oracle(2)?;
    let mut out = Vec::new();
    for (a, b) in PARITY_PAIRS {
        let reg = Register::new(&[(Species::A, Some(a), Some(b))])?;
        let encs = qubits(&[QubitEncoding::highlow(a), QubitEncoding::highlow(b)]);
        for (dir, target, tag) in [(Direction::IS, &cnot, "IS"), (Direction::SI, &rcnot, "SI")] {
            let seq = library::cnot_parity(a, b, dir)?;
            let label = format!("CNOT_PARITY_{tag}({a},{b})");
            out.push(CaseResult::single(verify_gate(&seq, &reg, &encs, target, tol)?.labeled(label, "")));
        }
    }
    let reg = Register::new(&[(Species::A, Some(1), Some(11))])?;
    let encs = qubits(&[QubitEncoding::highlow(1), QubitEncoding::highlow(11)]);
    out.push(CaseResult::single(
        verify_gate(&library::swap_highlow(1, 11)?, &reg, &encs, &swap, tol)?.labeled("SWAP_HIGHLOW(1,11)", ""),
    ));
    Ok(out)
}

fn bab() -> [Species; 3] {
    [Species::B, Species::A, Species::B]
}

/// C(B,A;X_δ) on an isolated pair, embedded on both bonds of a B–A–B trimer.
pub fn xi_oracle(delta: f64) -> Result<ComplexMatrix> {
    let pair = Register::electrons(&[Species::B, Species::A], 1)?;
    let c = compile(&library::cond_x(Species::B, Species::A, delta), &pair)?;
    let dims = [2, 2, 2];
    embed_multi(&c, &[0, 1], &dims)?.matmul(&embed_multi(&c, &[2, 1], &dims)?)
}

/// exp(iθS_x) on the A of a B–A–B trimer iff its neighbour sum is f.
pub fn neighbour_oracle(f: u8, theta: f64) -> Result<ComplexMatrix> {
    global_op_matrix(&bab(), &GlobalOpSpec::new(Species::A, f, x_rotation(theta))?)
}

pub fn xi_suite(tol: f64) -> Result<Vec<CaseResult>> {
    let trimer = Register::electrons(&bab(), 1)?;
    let encs = qubits(&[QubitEncoding::half(); 3]);
    let mut out = Vec::new();
    for delta in [FRAC_PI_2, PI] {
        let u = compile(&library::xi(delta), &trimer)?;
        let r = verify_unitary(&u, &encs, &xi_oracle(delta)?, tol)?;
        out.push(CaseResult::single(r.labeled(format!("XI({})", fmt_angle(delta)), "")));
    }
    for theta in [FRAC_PI_2, PI] {
        for (f, name, seq) in [
            (2, "A2_U", library::a2_u(theta)),
            (1, "A1_U", library::a1_u(theta)),
            (0, "A0_U", library::a0_u(theta)),
        ] {
            let r = verify_gate(&seq, &trimer, &encs, &neighbour_oracle(f, theta)?, tol)?;
            out.push(CaseResult::single(r.labeled(format!("{name}({})", fmt_angle(theta)), "")));
        }
    }
    Ok(out)
}

/// Logical image of a B–A–B basis state under a flip of A when its neighbour sum is f.
pub fn tag_image(f: u8) -> impl Fn(usize) -> usize {
    move |x: usize| {
        let sum = ((x >> 2) & 1) + (x & 1);
        if sum == f as usize {
            x ^ 0b010
        } else {
            x
        }
    }
}

pub fn tag_sequence_entry(f: u8) -> Result<PulseSequence> {
    match f {
        0 => Ok(library::f0_tag()),
        1 => Ok(library::f1_tag()),
        2 => Ok(library::f2_tag()),
        _ => Err(Error::InvalidParameter(format!("tag needs f in 0..=2, got {f}"))),
    }
}

/// Flip patterns of the electronic tags on an inner-encoded B–A–B trimer.
pub fn tag_suite(tol: f64) -> Result<Vec<CaseResult>> {
    let trimer = Register::electrons(&bab(), 3)?;
    let encs = qubits(&[QubitEncoding::inner(); 3]);
    let mut out = Vec::new();
    for f in [1u8, 2, 0] {
        let seq = tag_sequence_entry(f)?;
        let p = verify_pattern(&seq, &trimer, &encs, tag_image(f), tol)?;
        let report = VerificationReport {
            name: format!("F{f}_TAG pattern"),
            branch: String::new(),
            fidelity: p.min_overlap,
            leakage: p.leakage,
            phase: 0.0,
            polarity: Polarity::NotApplicable,
            pass: p.pass,
            tolerance: tol,
        };
        out.push(CaseResult::single(report));
    }
    Ok(out)
}

/// e^{iα}R_z(β)R_y(γ)R_z(δ) with R_a(θ) = exp(−iθσ_a/2).
pub fn euler_unitary(alpha: f64, beta: f64, gamma: f64, delta: f64) -> ComplexMatrix {
    let rz = |t: f64| ComplexMatrix::from_diagonal(&[Complex64::from_polar(1.0, -t / 2.0), Complex64::from_polar(1.0, t / 2.0)]);
    let (c, s) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    let ry = ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]);
    rz(beta).matmul(&ry).and_then(|m| m.matmul(&rz(delta))).expect("2×2").scale(Complex64::from_polar(1.0, alpha))
}

/// Controlled U on the nucleus of a (nuclear, electron) molecule, fired by
/// the electron's logical 0.
pub fn ctrl_u_oracle(u: &ComplexMatrix) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (nr, nc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        // electron logical 0: U on the nucleus; electron logical 1: identity
        m[(2 * nr, 2 * nc)] = u[(nr, nc)];
        m[(2 * nr + 1, 2 * nc + 1)] = if nr == nc { ONE } else { ZERO };
    }
    m
}

/// Deterministic Euler angle samples.
pub fn euler_samples(n: usize, seed: u64) -> Vec<[f64; 4]> {
    // splitmix64, enough for spreading test angles
    let mut state = seed;
    let mut next = || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..n).map(|_| [0.0; 4].map(|_| (2.0 * next() - 1.0) * PI)).collect()
}

pub fn ctrl_u_suite(tol: f64) -> Result<Vec<CaseResult>> {
    let mol = Register::molecule(1, 3)?;
    let encs = qubits(&[QubitEncoding::nuclear(), QubitEncoding::inner()]);
    let mut out = Vec::new();
    let mut angles = vec![[0.0, 0.0, PI, 0.0], [0.0, 0.0, 0.0, 0.0]];
    angles.extend(euler_samples(6, 7));
    for [a, b, g, d] in angles {
        let seq = library::ctrl_u_euler(a, b, g, d);
        let target = ctrl_u_oracle(&euler_unitary(a, b, g, d));
        let label = format!("CTRL_U_EULER({a:.3},{b:.3},{g:.3},{d:.3})");
        out.push(CaseResult::single(verify_gate(&seq, &mol, &encs, &target, tol)?.labeled(label, "")));
    }
    for (k, [_, b, g, d]) in euler_samples(4, 11).into_iter().enumerate() {
        let mut els = library::euler_d(b, g);
        els.extend(library::euler_e(b, g, d));
        els.extend(library::euler_f(b, d));
        let nuc = Register::new(&[(Species::A, Some(1), None)])?;
        let u = compile(&PulseSequence::new(els, 0.0), &nuc)?;
        let r = verify_unitary(&u, &qubits(&[QubitEncoding::nuclear()]), &ComplexMatrix::identity(2), tol)?;
        out.push(CaseResult::single(r.labeled(format!("DEF=I #{k}"), "")));
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, tol: f64) -> Result<Vec<CaseResult>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    Ok(match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::PARTS {
                all.extend(run_suite(s, tol)?);
            }
            all
        }
        Suite::Cnot => cnot_suite(tol)?,
        Suite::Swap => swap_suite(tol)?,
        Suite::Parity => parity_suite(tol)?,
        Suite::Xi => xi_suite(tol)?,
        Suite::Tag => tag_suite(tol)?,
        Suite::CtrlU => ctrl_u_suite(tol)?,
    })
}

/// Plain-text listing of every catalog entry: name, notation, canonical
/// branch and global phase.
pub fn catalog_dump(tol: f64) -> Result<String> {
    let cnots = cnot_suite(tol)?;
    let canonical = |name: &str| -> Option<String> {
        cnots
            .iter()
            .find(|c| c.name.starts_with(name))
            .and_then(|c| c.canonical_report())
            .map(|r| r.branch.clone())
    };
    let mut out = String::new();
    for entry in catalog_entries() {
        let seq = entry.sequence()?;
        let branch = match entry.branch() {
            None => "-".to_string(),
            Some(b) => {
                let key = match entry {
                    Entry::CnotHalf { control: Species::B, .. } => "CNOT_HALF(B".to_string(),
                    Entry::CnotHalf { .. } => "CNOT_HALF(A".to_string(),
                    _ => entry.name().to_string(),
                };
                let canon = canonical(&key).unwrap_or_default();
                if canon == b.label() {
                    format!("{} (canonical)", b.label())
                } else {
                    b.label().to_string()
                }
            }
        };
        writeln!(
            out,
            "{}\tbranch={}\tphase={}\t{}",
            seq.name.as_deref().unwrap_or(entry.name()),
            branch,
            fmt_angle(seq.total_phase()),
            seq.notation()
        )
        .expect("writing to a String");
    }
    Ok(out)
}

/// |tr(v†u)|/dim as an error 1 − fidelity.
pub fn fidelity_error(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    Ok(1.0 - phase_fidelity(u, v)?.0)
}
