//! The nuclear-electron global operation: swap the B nuclear qubits onto
//! their electrons, tag the A electrons whose neighbour sum is f, swap back,
//! apply the controlled U to every nucleus, then undo the tagging.
//!
//! Stages are kept in time order. The phase fix is applied directly after
//! the controlled U, while the tags are still set, because only then does it
//! distinguish tagged from untagged molecules.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{phase_fidelity, ComplexMatrix, ONE, ZERO};
use crate::pulse::compile::apply_sequence;
use crate::pulse::decouple::decoupled_coupling_cycles;
use crate::pulse::generator::{Generator, Sites, Term};
use crate::pulse::library::{self, Branch};
use crate::pulse::sequence::{PulseElement, PulseSequence};
use crate::qca::{apply_global, index_to_bits, named_gate, GlobalOpSpec, QcaState};
use crate::register::{Register, Role};
use crate::spin::Axis;
use crate::system::{ChainSpec, Species};
use crate::verify::parse_angle;

/// The single-qubit gate of a global operation.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub label: String,
    pub u: ComplexMatrix,
}

impl GateSpec {
    pub fn new(label: impl Into<String>, u: ComplexMatrix) -> Result<Self> {
        if u.rows() != 2 || u.cols() != 2 || u.unitarity_error() > 1e-10 {
            return Err(Error::InvalidParameter("gate must be a 2×2 unitary".into()));
        }
        Ok(Self { label: label.into(), u })
    }

    /// X, Z, H, T, P(φ), I or euler(α,β,γ,δ).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let lower = t.to_ascii_lowercase();
        if let Some(args) = lower.strip_prefix("euler(").and_then(|r| r.strip_suffix(')')) {
            let v = args.split(',').map(parse_angle).collect::<Result<Vec<f64>>>()?;
            if let [a, b, g, d] = v[..] {
                return Self::new(t, euler_matrix(a, b, g, d));
            }
            return Err(Error::InvalidParameter(format!("euler() needs four angles, got '{t}'")));
        }
        Self::new(t, named_gate(t)?)
    }

    pub fn euler(&self) -> [f64; 4] {
        zyz_decompose(&self.u)
    }

    /// Exactly the NOT gate, which the pipeline realizes with a single CNOT.
    pub fn is_not(&self) -> bool {
        (&self.u - &crate::verify::pauli_x()).max_abs() < 1e-12
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// e^{iα}R_z(β)R_y(γ)R_z(δ) with R_a(θ) = exp(−iθσ_a/2).
pub fn euler_matrix(alpha: f64, beta: f64, gamma: f64, delta: f64) -> ComplexMatrix {
    let (c, s) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    let e = |t: f64| Complex64::from_polar(1.0, t);
    let p = e(alpha);
    let m = [
        [e(-(beta + delta) / 2.0) * c, -e((delta - beta) / 2.0) * s],
        [e((beta - delta) / 2.0) * s, e((beta + delta) / 2.0) * c],
    ];
    ComplexMatrix::from_fn(2, 2, |r, k| p * m[r][k])
}

/// (α, β, γ, δ) with U = e^{iα}R_z(β)R_y(γ)R_z(δ).
pub fn zyz_decompose(u: &ComplexMatrix) -> [f64; 4] {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let alpha = det.arg() / 2.0;
    let v = u.scale(Complex64::from_polar(1.0, -alpha));
    let (a, b) = (v[(0, 0)], v[(1, 0)]);
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let sum = if a.norm() > 1e-12 { -2.0 * a.arg() } else { 0.0 };
    let diff = if b.norm() > 1e-12 { 2.0 * b.arg() } else { 0.0 };
    [alpha, (sum + diff) / 2.0, gamma, (sum - diff) / 2.0]
}

/// The electronic tag for neighbour sum f.
pub fn tag_sequence(f: u8) -> Result<PulseSequence> {
    Ok(match f {
        0 => library::f0_tag().named("F0_TAG"),
        1 => library::f1_tag().named("F1_TAG"),
        2 => library::f2_tag().named("F2_TAG"),
        _ => return Err(Error::InvalidParameter(format!("f must be 0, 1 or 2, got {f}"))),
    })
}

/// Controlled U on every nucleus, fired by an inner electron at m = +1/2,
/// without the phase fix.
pub fn controlled_u_sequence(gate: &GateSpec) -> PulseSequence {
    if gate.is_not() {
        let flip = |sign: f64| PulseElement::rot(Generator::spin(Role::Electron, Sites::All, Axis::X), sign * PI);
        let cnot = library::cnot_inner_si(Branch::Upper, Sites::All).named("CNOT_INNER_SI");
        return PulseSequence::new(vec![flip(-1.0), cnot.as_block(), flip(1.0)], 0.0).named("C(S,I;X)");
    }
    let [_, b, g, d] = gate.euler();
    library::controlled_u_core(b, g, d)
}

/// The α the phase fix must supply after [`controlled_u_sequence`]. The NOT
/// path is already an exact controlled X and needs none.
pub fn phase_fix_angle(gate: &GateSpec) -> f64 {
    if gate.is_not() {
        0.0
    } else {
        gate.euler()[0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    SwapInB,
    Tag,
    SwapOutB,
    ControlledU,
    PhaseFix,
    UndoSwapInB,
    UndoTag,
    UndoSwapOutB,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::SwapInB => "swap-in-B",
            Stage::Tag => "tag",
            Stage::SwapOutB => "swap-out-B",
            Stage::ControlledU => "controlled-U-all",
            Stage::PhaseFix => "phase-fix",
            Stage::UndoSwapInB => "undo-swap-in-B",
            Stage::UndoTag => "undo-tag",
            Stage::UndoSwapOutB => "undo-swap-out-B",
        }
    }
}

/// How the hyperfine coupling intervals of the B swaps are realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingMode {
    Ideal,
    /// Refocused free evolution with scaling factor m split into `cycles`.
    Decoupled { m: u32, cycles: u32 },
}

#[derive(Clone, Debug)]
pub struct PipelineProgram {
    pub f: u8,
    pub gate: GateSpec,
    /// Stages in the order they are applied.
    pub stages: Vec<(Stage, PulseSequence)>,
    /// Coupling intervals, counting each refocused block as one.
    pub coupling_intervals: usize,
}

/// The coupling-interval count the cycle-time estimate assumes.
pub const NOMINAL_COUPLING_INTERVALS: usize = 15;

impl PipelineProgram {
    /// The whole program as one written product (last stage leftmost).
    pub fn sequence(&self) -> PulseSequence {
        PulseSequence::new(self.stages.iter().rev().map(|(_, s)| s.as_block()).collect(), 0.0)
            .named(format!("P(f={}, {})", self.f, self.gate))
    }

    /// The stages up to and including the ones named, as a written product.
    pub fn prefix(&self, last: Stage) -> PulseSequence {
        let n = self.stages.iter().position(|(s, _)| *s == last).map_or(self.stages.len(), |k| k + 1);
        PulseSequence::new(self.stages[..n].iter().rev().map(|(_, s)| s.as_block()).collect(), 0.0)
    }

    pub fn stage(&self, which: Stage) -> Option<&PulseSequence> {
        self.stages.iter().find(|(s, _)| *s == which).map(|(_, s)| s)
    }

}

/// Swaps every B nuclear qubit onto its inner electron. A molecules are left
/// with [I_y^A] after the selective [−S_y^A] removes their [S_y^A].
pub fn swap_in_b(mode: CouplingMode) -> Result<PulseSequence> {
    let swap = library::swap_inner(Sites::Species(Species::B));
    let swap = match mode {
        CouplingMode::Ideal => swap,
        CouplingMode::Decoupled { m, cycles } => {
            let block = decoupled_coupling_cycles(m, Species::B, cycles)?;
            substitute_b_couplings(&swap, &block)
        }
    };
    Ok(PulseSequence::new(
        vec![PulseElement::minus(Generator::s(Species::B.other(), Axis::Y)), swap.named("SWAP_INNER^B").as_block()],
        0.0,
    )
    .named("B_in"))
}

fn is_b_hyperfine_interval(el: &PulseElement) -> bool {
    match el {
        PulseElement::Rotation { generator, angle } => {
            (angle - FRAC_PI_2).abs() < 1e-12
                && matches!(
                    generator.terms.as_slice(),
                    [Term::Hyperfine { coeff, sites: Sites::Species(Species::B), nuclear: Axis::Z, electron: Axis::Z }]
                        if (*coeff - 2.0).abs() < 1e-12
                )
        }
        _ => false,
    }
}

fn substitute_b_couplings(seq: &PulseSequence, block: &PulseSequence) -> PulseSequence {
    let elements = seq
        .elements
        .iter()
        .map(|el| match el {
            PulseElement::Block(inner) => substitute_b_couplings(inner, block).as_block(),
            e if is_b_hyperfine_interval(e) => block.as_block(),
            e => e.clone(),
        })
        .collect();
    PulseSequence { name: seq.name.clone(), elements, global_phase: seq.global_phase }
}

fn check_chain(f: u8, spec: &ChainSpec) -> Result<()> {
    if spec.pattern.len() < 2 {
        return Err(Error::InvalidParameter("pipeline needs at least two sites".into()));
    }
    if f > 2 {
        return Err(Error::InvalidParameter(format!("f must be 0, 1 or 2, got {f}")));
    }
    let ends = [spec.pattern[0], spec.pattern[spec.pattern.len() - 1]];
    if f != 1 && ends.contains(&Species::A) {
        return Err(Error::InvalidParameter(format!(
            "the f={f} tag assumes two B neighbours; chain ends with an A cell, use a pattern with B at both ends"
        )));
    }
    Ok(())
}

pub fn build_global_pulse_program(f: u8, gate: &GateSpec, spec: &ChainSpec, mode: CouplingMode) -> Result<PipelineProgram> {
    check_chain(f, spec)?;
    let ideal_b_in = swap_in_b(CouplingMode::Ideal)?;
    let b_in = swap_in_b(mode)?;
    let b_out = b_in.inverse().named("B_out");
    let tag = tag_sequence(f)?;
    let alpha = phase_fix_angle(gate);
    let stages = vec![
        (Stage::SwapInB, b_in.clone()),
        (Stage::Tag, tag.clone()),
        (Stage::SwapOutB, b_out.clone()),
        (Stage::ControlledU, controlled_u_sequence(gate)),
        (Stage::PhaseFix, library::phase_fix(alpha)),
        (Stage::UndoSwapInB, b_in),
        (Stage::UndoTag, tag.inverse()),
        (Stage::UndoSwapOutB, b_out),
    ];
    let coupling_intervals = stages
        .iter()
        .map(|(stage, seq)| match stage {
            Stage::SwapInB | Stage::SwapOutB | Stage::UndoSwapInB | Stage::UndoSwapOutB => ideal_b_in.coupling_intervals(),
            _ => seq.coupling_intervals(),
        })
        .sum();
    Ok(PipelineProgram { f, gate: gate.clone(), stages, coupling_intervals })
}

/// Electron level index of m = −1/2 for a spin two_s/2.
fn bus_level(two_s: u32) -> usize {
    (two_s as usize).div_ceil(2)
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub f: u8,
    pub gate: String,
    pub fidelity: f64,
    /// Smallest probability that the electron bus ends at m = −1/2.
    pub bus_overlap: f64,
    /// Smallest overlap of the state after the forward stages with the
    /// expected tagged state, nuclei untouched.
    pub tag_overlap: f64,
    pub duration_ns: f64,
    pub coupling_intervals: usize,
    /// Logical gates (each GLOBAL_OPS_PER_LOGICAL_GATE global operations of
    /// this duration) per T₂.
    pub figure_of_merit: u64,
}

impl PipelineReport {
    pub fn coupling_count_matches(&self) -> bool {
        self.coupling_intervals == NOMINAL_COUPLING_INTERVALS
    }
}

impl fmt::Display for PipelineReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f={} gate={} fidelity={:.12} bus={:.12} tag={:.12} duration={:.1}ns couplings={}{} fom={}",
            self.f,
            self.gate,
            self.fidelity,
            self.bus_overlap,
            self.tag_overlap,
            self.duration_ns,
            self.coupling_intervals,
            if self.coupling_count_matches() { "" } else { " (nominal 15)" },
            self.figure_of_merit
        )
    }
}

/// Nuclear basis inputs with every electron at m = −1/2: physical indices.
fn input_indices(reg: &Register) -> Vec<usize> {
    let n = reg.n_sites();
    (0..1usize << n)
        .map(|x| {
            let bits = index_to_bits(x, n);
            let digits: Vec<usize> = reg
                .slots()
                .iter()
                .map(|s| match s.role {
                    Role::Nuclear => bits[s.site] as usize,
                    Role::Electron => bus_level(s.two_s),
                })
                .collect();
            reg.index_of(&digits)
        })
        .collect()
}

/// Applies `seq` to each input basis column, in parallel over chunks of columns.
fn propagate(seq: &PulseSequence, reg: &Register, inputs: &[usize]) -> Result<Vec<Vec<Complex64>>> {
    let threads = rayon::current_num_threads().max(1);
    let chunk = inputs.len().div_ceil(threads).max(1);
    let dim = reg.dim();
    let chunks: Vec<Vec<Vec<Complex64>>> = inputs
        .par_chunks(chunk)
        .map(|cols| {
            let k = cols.len();
            let mut data = vec![ZERO; dim * k];
            for (c, &idx) in cols.iter().enumerate() {
                data[idx * k + c] = ONE;
            }
            apply_sequence(seq, reg, &mut data, k)?;
            Ok((0..k).map(|c| (0..dim).map(|r| data[r * k + c]).collect()).collect())
        })
        .collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Simulates a program on the chain and compares it with the logical global operation.
pub fn run_pipeline(program: &PipelineProgram, spec: &ChainSpec, model: &DurationModel) -> Result<PipelineReport> {
    let reg = Register::chain(spec)?;
    if reg.n_sites() > 6 {
        return Err(Error::DimensionOverflow { dim: reg.dim(), limit: 1 << 18 });
    }
    let n = reg.n_sites();
    let inputs = input_indices(&reg);
    let outputs = propagate(&program.sequence(), &reg, &inputs)?;

    let op = GlobalOpSpec::new(Species::A, program.f, program.gate.u.clone())?;
    let dim_l = 1usize << n;
    let mut target = ComplexMatrix::zeros(dim_l, dim_l);
    let mut got = ComplexMatrix::zeros(dim_l, dim_l);
    for c in 0..dim_l {
        let s = apply_global(&QcaState::basis(&spec.pattern, &index_to_bits(c, n))?, &op);
        for (r, a) in s.amplitudes().iter().enumerate() {
            target[(r, c)] = *a;
            got[(r, c)] = outputs[c][inputs[r]];
        }
    }
    let (fidelity, _) = phase_fidelity(&got, &target)?;

    let electron_slots: Vec<(usize, usize)> = reg
        .slots()
        .iter()
        .enumerate()
        .filter(|(_, s)| s.role == Role::Electron)
        .map(|(k, s)| (k, bus_level(s.two_s)))
        .collect();
    let on_bus: Vec<bool> = (0..reg.dim())
        .map(|i| {
            let d = reg.digits(i);
            electron_slots.iter().all(|&(k, lvl)| d[k] == lvl)
        })
        .collect();
    let bus_overlap = outputs
        .iter()
        .map(|v| v.iter().zip(&on_bus).filter(|(_, &b)| b).map(|(a, _)| a.norm_sqr()).sum::<f64>())
        .fold(1.0, f64::min);

    let tag_overlap = tag_check(program, &reg, spec, &inputs)?;
    let seq = program.sequence();
    let duration_ns = sequence_duration(&seq, model);
    Ok(PipelineReport {
        f: program.f,
        gate: program.gate.label.clone(),
        fidelity,
        bus_overlap,
        tag_overlap,
        duration_ns,
        coupling_intervals: program.coupling_intervals,
        figure_of_merit: figure_of_merit(logical_gate_time_s(duration_ns), model.t2_seconds).unwrap_or(0),
    })
}

/// After swap-in, tag and swap-out every nucleus must be back in its input
/// state (the leftover [I_y^A] has cancelled) and each A electron must sit at
/// m = +1/2 exactly when its neighbour sum is f.
fn tag_check(program: &PipelineProgram, reg: &Register, spec: &ChainSpec, inputs: &[usize]) -> Result<f64> {
    let forward = program.prefix(Stage::SwapOutB);
    let outputs = propagate(&forward, reg, inputs)?;
    let n = reg.n_sites();
    let mut worst: f64 = 1.0;
    for (x, v) in outputs.iter().enumerate() {
        let bits = index_to_bits(x, n);
        let digits: Vec<usize> = reg
            .slots()
            .iter()
            .map(|s| match s.role {
                Role::Nuclear => bits[s.site] as usize,
                Role::Electron => {
                    let left = if s.site > 0 { bits[s.site - 1] } else { 0 };
                    let right = if s.site + 1 < n { bits[s.site + 1] } else { 0 };
                    let tagged = spec.pattern[s.site] == Species::A && left + right == program.f;
                    // m = +1/2 sits one level above the bus level
                    bus_level(s.two_s) - tagged as usize
                }
            })
            .collect();
        worst = worst.min(v[reg.index_of(&digits)].norm());
    }
    Ok(worst)
}

/// Durations per element class, in ns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DurationModel {
    pub coupling_interval_ns: f64,
    pub selective_electron_pulse_ns: f64,
    pub hard_nuclear_pulse_ns: f64,
    pub t2_seconds: f64,
}

impl Default for DurationModel {
    fn default() -> Self {
        Self { coupling_interval_ns: 50.0, selective_electron_pulse_ns: 20.0, hard_nuclear_pulse_ns: 0.0, t2_seconds: 1.0 }
    }
}

impl DurationModel {
    pub fn validate(&self) -> Result<()> {
        let v = [self.coupling_interval_ns, self.selective_electron_pulse_ns, self.hard_nuclear_pulse_ns, self.t2_seconds];
        if v.iter().any(|x| !(*x >= 0.0)) {
            return Err(Error::InvalidParameter("durations must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Total duration in ns. Coupling intervals take coupling_interval_ns per
/// π/2 of angle, free evolution its own length, any other pulse touching an
/// electron the selective electron time and nuclear-only pulses the hard
/// pulse time.
pub fn sequence_duration(seq: &PulseSequence, model: &DurationModel) -> f64 {
    let mut t = 0.0;
    seq.for_each_leaf(&mut |el| {
        t += match el {
            PulseElement::FreeEvolution { duration_us } => duration_us.abs() * 1e3,
            PulseElement::Rotation { generator, angle } => {
                if generator.has_bilinear() {
                    angle.abs() / FRAC_PI_2 * model.coupling_interval_ns
                } else if generator.involves(Role::Electron) {
                    model.selective_electron_pulse_ns
                } else {
                    model.hard_nuclear_pulse_ns
                }
            }
            PulseElement::Block(_) => 0.0,
        };
    });
    t
}

/// Number of gate operations that fit in T₂.
pub fn figure_of_merit(gate_time_s: f64, t2_seconds: f64) -> Result<u64> {
    if !(gate_time_s > 0.0) {
        return Err(Error::InvalidParameter(format!("gate time must be positive, got {gate_time_s}")));
    }
    // the small relative slack keeps exact ratios such as 1 s / 30 μs from
    // flooring one short
    Ok((t2_seconds / gate_time_s * (1.0 + 1e-12)).floor() as u64)
}

/// Global operations per logical gate in the cellular-automaton scheme.
pub const GLOBAL_OPS_PER_LOGICAL_GATE: usize = 30;

/// Logical gate time in seconds for a global operation of the given length.
pub fn logical_gate_time_s(global_op_ns: f64) -> f64 {
    GLOBAL_OPS_PER_LOGICAL_GATE as f64 * global_op_ns * 1e-9
}
