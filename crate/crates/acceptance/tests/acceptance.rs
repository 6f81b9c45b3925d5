//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs with a plain `main` so the report is printed under `cargo test`
//! without `--nocapture`. Oracles are written out here by hand rather than
//! taken from the library.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use endo_qca::linalg::{phase_fidelity, wrap_angle, ComplexMatrix};
use endo_qca::pipeline::{
    build_global_pulse_program, figure_of_merit, run_pipeline, CouplingMode, DurationModel, GateSpec,
    GLOBAL_OPS_PER_LOGICAL_GATE,
};
use endo_qca::pulse::decouple::{block_error, decoupled_coupling, effective_coupling_mhz, free_time_us};
use endo_qca::pulse::library::{self, Branch, Direction};
use endo_qca::pulse::{apply_to_states, compile, PulseSequence, Sites};
use endo_qca::qca::{apply_global, classical_ca_oracle, move_step, GlobalOpSpec, QcaState};
use endo_qca::spectra::{signed_transitions, transition_lines, SpectrumKind};
use endo_qca::verify::{
    conditional_profile, qubits, verify_gate, verify_pattern, verify_unitary, Polarity, QubitEncoding,
    VerificationReport,
};
use endo_qca::{ChainSpec, Register, Role, Species, SpeciesConstants};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

// ---- hand-written oracles ------------------------------------------------

/// Permutation matrix of a map on basis indices.
fn permutation(dim: usize, image: impl Fn(usize) -> usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for c in 0..dim {
        m[(image(c), c)] = ONE;
    }
    m
}

/// Two-qubit CNOT, qubit 0 is the most significant bit.
fn cnot(control: usize, target: usize) -> ComplexMatrix {
    permutation(4, |x| {
        let bit = |q: usize| (x >> (1 - q)) & 1;
        if bit(control) == 1 {
            x ^ (1 << (1 - target))
        } else {
            x
        }
    })
}

fn swap() -> ComplexMatrix {
    permutation(4, |x| ((x & 1) << 1) | (x >> 1))
}

/// exp(iθσ_x/2).
fn exp_i_sx(theta: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = Complex64::new(c, 0.0);
    m[(1, 1)] = Complex64::new(c, 0.0);
    m[(0, 1)] = Complex64::new(0.0, s);
    m[(1, 0)] = Complex64::new(0.0, s);
    m
}

/// U on the middle of three qubits when the outer two sum to f.
fn middle_conditional(f: usize, u: &ComplexMatrix) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(8, 8);
    for c in 0..8 {
        let (l, a, r) = (c >> 2, (c >> 1) & 1, c & 1);
        if l + r == f {
            for a2 in 0..2 {
                m[((l << 2) | (a2 << 1) | r, c)] = u[(a2, a)];
            }
        } else {
            m[(c, c)] = ONE;
        }
    }
    m
}

/// e^{iα} R_z(β) R_y(γ) R_z(δ) with R_a(θ) = exp(−iθσ_a/2).
fn euler(alpha: f64, beta: f64, gamma: f64, delta: f64) -> ComplexMatrix {
    let e = |t: f64| Complex64::from_polar(1.0, t);
    let (c, s) = ((gamma / 2.0).cos(), (gamma / 2.0).sin());
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = e(alpha - (beta + delta) / 2.0) * c;
    m[(0, 1)] = -e(alpha - (beta - delta) / 2.0) * s;
    m[(1, 0)] = e(alpha + (beta - delta) / 2.0) * s;
    m[(1, 1)] = e(alpha + (beta + delta) / 2.0) * c;
    m
}

/// Nucleus (first qubit) gets U when the electron (second qubit) is 0.
fn controlled_on_electron_zero(u: &ComplexMatrix) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for r in 0..2 {
        for c in 0..2 {
            m[(2 * r, 2 * c)] = u[(r, c)];
        }
        m[(2 * r + 1, 2 * r + 1)] = ONE;
    }
    m
}

fn random_su2(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    // uniform on the 3-sphere via normalised Gaussian quadruple
    let mut q = [0.0f64; 4];
    loop {
        for x in q.iter_mut() {
            let (u1, u2): (f64, f64) = (rng.gen_range(1e-12..1.0), rng.gen());
            *x = (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
        }
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            q.iter_mut().for_each(|x| *x /= n);
            break;
        }
    }
    let a = Complex64::new(q[0], q[1]);
    let b = Complex64::new(q[2], q[3]);
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = a;
    m[(0, 1)] = -b.conj();
    m[(1, 0)] = b;
    m[(1, 1)] = a.conj();
    m
}

fn err(r: &VerificationReport) -> f64 {
    1.0 - r.fidelity
}

// ---- criteria --------------------------------------------------------------

fn spin_half_cnots() -> Outcome {
    let start = Instant::now();
    let reg = Register::electrons(&[Species::A, Species::B], 1).unwrap();
    let encs = qubits(&[QubitEncoding::half(), QubitEncoding::half()]);
    let mut pass = true;
    let mut notes = Vec::new();
    for (control, target) in [(Species::A, cnot(0, 1)), (Species::B, cnot(1, 0))] {
        let mut best: Option<(f64, f64, f64)> = None;
        for b in [Branch::Upper, Branch::Lower] {
            let seq = library::cnot_half(control, b);
            let stated = seq.global_phase;
            let r = verify_gate(&seq, &reg, &encs, &target, 1e-10).unwrap();
            // the bare pulse product differs from CNOT by the stated phase
            let mut bare = seq.clone();
            bare.global_phase = 0.0;
            let raw = verify_gate(&bare, &reg, &encs, &target, 1e-10).unwrap();
            let ok = err(&r) < 1e-10
                && r.leakage < 1e-10
                && (stated.abs() - FRAC_PI_4).abs() < 1e-12
                && wrap_angle(raw.phase + stated).abs() < 1e-10;
            if ok && best.is_none_or(|x| err(&r) < x.0) {
                best = Some((err(&r), r.leakage, stated));
            }
        }
        match best {
            Some((e, l, p)) => notes.push(format!("control {control}: err {e:.1e} leak {l:.1e} phase {p:+.4}")),
            None => {
                pass = false;
                notes.push(format!("control {control}: no branch passes"));
            }
        }
    }
    let t = start.elapsed();
    pass &= t < Duration::from_secs(1);
    outcome(pass, format!("{}; {:.0?}", notes.join(", "), t))
}

fn spin32_cnot_identities() -> Outcome {
    let pair = Register::electrons(&[Species::A, Species::B], 3).unwrap();
    let inner2 = qubits(&[QubitEncoding::inner(), QubitEncoding::inner()]);
    let mol = Register::molecule(1, 3).unwrap();
    let n_inner = qubits(&[QubitEncoding::nuclear(), QubitEncoding::inner()]);
    let n_outer = qubits(&[QubitEncoding::nuclear(), QubitEncoding::outer()]);
    let (fwd, rev) = (cnot(0, 1), cnot(1, 0));

    let best = |f: &dyn Fn(Branch) -> PulseSequence, reg: &Register, encs, target: &ComplexMatrix| {
        [Branch::Upper, Branch::Lower]
            .into_iter()
            .map(|b| {
                let r = verify_gate(&f(b), reg, encs, target, 1e-9).unwrap();
                err(&r).max(r.leakage)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let cases: Vec<(&str, f64)> = vec![
        ("INNER_AB", {
            let r = verify_gate(&library::cnot_inner_ab(), &pair, &inner2, &fwd, 1e-9).unwrap();
            err(&r).max(r.leakage)
        }),
        ("INNER_BA", best(&library::cnot_inner_ba, &pair, &inner2, &rev)),
        ("OUTER_IS", best(&|b| library::hyperfine_cnot_is(b, Sites::All), &mol, &n_outer, &fwd)),
        ("INNER_IS", best(&|b| library::hyperfine_cnot_is(b, Sites::All), &mol, &n_inner, &fwd)),
        ("OUTER_SI", best(&|b| library::cnot_outer_si(b, Sites::All), &mol, &n_outer, &rev)),
        ("INNER_SI", best(&|b| library::cnot_inner_si(b, Sites::All), &mol, &n_inner, &rev)),
    ];
    let mut pass = cases.iter().all(|(_, e)| *e < 1e-9);
    let worst = cases.iter().map(|c| c.1).fold(0.0, f64::max);

    // the inner CNOT read with an outer control: CNOT with the control inverted
    let u = compile(&library::cnot_inner_ab(), &pair).unwrap();
    let outer_ctrl = qubits(&[QubitEncoding::outer(), QubitEncoding::inner()]);
    let profile = conditional_profile(&u, 0, 1, &outer_ctrl, 1e-9).unwrap();
    let anti = permutation(4, |x| if x >> 1 == 0 { x ^ 1 } else { x });
    let r = verify_unitary(&u, &outer_ctrl, &anti, 1e-9).unwrap();
    pass &= profile.polarity == Polarity::Inverted && err(&r) < 1e-9 && r.leakage < 1e-9;
    outcome(
        pass,
        format!("worst error {worst:.1e} over {} cases; outer control polarity {}, err {:.1e}", cases.len(), profile.polarity, err(&r)),
    )
}

fn swaps() -> Outcome {
    let mol = Register::molecule(1, 3).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, seq, enc, phase) in [
        ("SWAP_INNER", library::swap_inner(Sites::All), QubitEncoding::inner(), -FRAC_PI_4),
        ("SWAP_OUTER", library::swap_outer(Sites::All), QubitEncoding::outer(), 3.0 * FRAC_PI_4),
    ] {
        let r = verify_gate(&seq, &mol, &qubits(&[QubitEncoding::nuclear(), enc]), &swap(), 1e-9).unwrap();
        // with the stated phase included the residual phase must vanish
        let ok = err(&r) < 1e-9 && r.leakage < 1e-9 && (seq.total_phase() - phase).abs() < 1e-12 && r.phase.abs() < 1e-9;
        pass &= ok;
        notes.push(format!("{name} err {:.1e} phase {:+.4}", err(&r), seq.total_phase()));
    }
    outcome(pass, notes.join(", "))
}

/// Embeds a two-qubit operator acting on (control, target) qubits of three.
fn embed_pair(op: &ComplexMatrix, control: usize, target: usize) -> ComplexMatrix {
    let bit = |x: usize, q: usize| (x >> (2 - q)) & 1;
    let mut m = ComplexMatrix::zeros(8, 8);
    for r in 0..8 {
        for c in 0..8 {
            let spectator = (0..3).filter(|&q| q != control && q != target).all(|q| bit(r, q) == bit(c, q));
            if spectator {
                let pr = (bit(r, control) << 1) | bit(r, target);
                let pc = (bit(c, control) << 1) | bit(c, target);
                m[(r, c)] = op[(pr, pc)];
            }
        }
    }
    m
}

fn xi_construction() -> Outcome {
    let trimer = Register::electrons(&[Species::B, Species::A, Species::B], 1).unwrap();
    let pair = Register::electrons(&[Species::B, Species::A], 1).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for delta in [FRAC_PI_2, PI] {
        let xi = compile(&library::xi(delta), &trimer).unwrap();
        let c = compile(&library::cond_x(Species::B, Species::A, delta), &pair).unwrap();
        let squared = embed_pair(&c, 0, 1).matmul(&embed_pair(&c, 2, 1)).unwrap();
        let diff = (&xi - &squared).max_abs();
        // the pair conditional really is a controlled x rotation of angle δ
        let profile = conditional_profile(&c, 0, 1, &qubits(&[QubitEncoding::half(); 2]), 1e-10).unwrap();
        let (fid, _) = phase_fidelity(&profile.blocks[1], &exp_i_sx(delta)).unwrap();
        let (fid_neg, _) = phase_fidelity(&profile.blocks[1], &exp_i_sx(-delta)).unwrap();
        let is_rotation = (1.0 - fid.max(fid_neg)) < 1e-10 && profile.off_block < 1e-10;
        pass &= diff < 1e-10 && is_rotation;
        notes.push(format!("δ={delta:.4}: ‖Ξ − C²‖ {diff:.1e}"));
    }
    outcome(pass, notes.join(", "))
}

fn neighbour_conditionals() -> Outcome {
    let trimer = Register::electrons(&[Species::B, Species::A, Species::B], 1).unwrap();
    let encs = qubits(&[QubitEncoding::half(); 3]);
    let mut worst: f64 = 0.0;
    let mut names = Vec::new();
    for theta in [FRAC_PI_2, PI] {
        for (f, seq) in [(2, library::a2_u(theta)), (1, library::a1_u(theta)), (0, library::a0_u(theta))] {
            let r = verify_gate(&seq, &trimer, &encs, &middle_conditional(f, &exp_i_sx(theta)), 1e-9).unwrap();
            worst = worst.max(err(&r)).max(r.leakage);
            names.push(format!("A{f}"));
        }
    }
    let printed = verify_gate(&library::a2_u_as_printed(FRAC_PI_2), &trimer, &encs, &middle_conditional(2, &exp_i_sx(FRAC_PI_2)), 1e-9)
        .unwrap();
    outcome(
        worst < 1e-9,
        format!("worst error {worst:.1e} over 6 cases; literal transcription of A2 gives fidelity {:.3}", printed.fidelity),
    )
}

fn f2_tag() -> Outcome {
    let trimer = Register::electrons(&[Species::B, Species::A, Species::B], 3).unwrap();
    let encs = qubits(&[QubitEncoding::inner(); 3]);
    let seq = library::f2_tag();
    let flip_if_both = |x: usize| if x & 0b101 == 0b101 { x ^ 0b010 } else { x };
    let p = verify_pattern(&seq, &trimer, &encs, flip_if_both, 1e-9).unwrap();
    let target = 3.0 * FRAC_PI_4;
    let phase_err = p.phases.iter().map(|ph| wrap_angle(ph - target).abs()).fold(0.0, f64::max);
    let oracle = permutation(8, flip_if_both).scale(Complex64::from_polar(1.0, target));
    let u = compile(&seq, &trimer).unwrap();
    let r = verify_unitary(&u, &encs, &oracle, 1e-9).unwrap();
    outcome(
        p.pass && phase_err < 1e-9,
        format!(
            "flip pattern {} (overlap {:.12}, leak {:.1e}); worst phase deviation from 3π/4 {:.4} rad, fidelity vs e^(3iπ/4)·flip {:.4}",
            if p.pass { "ok" } else { "wrong" },
            p.min_overlap,
            p.leakage,
            phase_err,
            r.fidelity
        ),
    )
}

fn parity_family() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut classes = std::collections::BTreeSet::new();
    let mut count = 0;
    for (a, b) in [(1, 3), (3, 3), (1, 5), (3, 5), (1, 7), (1, 11)] {
        let reg = Register::new(&[(Species::A, Some(a), Some(b))]).unwrap();
        let encs = qubits(&[QubitEncoding::highlow(a), QubitEncoding::highlow(b)]);
        for (dir, target) in [(Direction::IS, cnot(0, 1)), (Direction::SI, cnot(1, 0))] {
            let r = verify_gate(&library::cnot_parity(a, b, dir).unwrap(), &reg, &encs, &target, 1e-9).unwrap();
            worst = worst.max(err(&r)).max(r.leakage);
            count += 1;
        }
        // parity of the integer-or-half-integer character of each spin
        classes.insert((a.div_ceil(2) % 2, b.div_ceil(2) % 2));
    }
    let reg = Register::new(&[(Species::A, Some(1), Some(11))]).unwrap();
    let encs = qubits(&[QubitEncoding::highlow(1), QubitEncoding::highlow(11)]);
    let r = verify_gate(&library::swap_highlow(1, 11).unwrap(), &reg, &encs, &swap(), 1e-9).unwrap();
    let swap_err = err(&r).max(r.leakage);
    let t = start.elapsed();
    outcome(
        worst < 1e-9 && swap_err < 1e-9 && classes.len() == 4 && t < Duration::from_secs(30),
        format!("{count} CNOTs worst {worst:.1e}, {} parity classes, SWAP_HIGHLOW(1,11) {swap_err:.1e}; {t:.0?}", classes.len()),
    )
}

fn controlled_u() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let mut angle = || rng.gen_range(-PI..PI);
    let nuc = Register::new(&[(Species::A, Some(1), None)]).unwrap();
    let mut def_err: f64 = 0.0;
    for _ in 0..20 {
        let (b, g, d) = (angle(), angle(), angle());
        let mut els = library::euler_d(b, g);
        els.extend(library::euler_e(b, g, d));
        els.extend(library::euler_f(b, d));
        let u = compile(&PulseSequence::new(els, 0.0), &nuc).unwrap();
        def_err = def_err.max((&u - &ComplexMatrix::identity(2)).max_abs());
    }
    let mol = Register::molecule(1, 3).unwrap();
    let encs = qubits(&[QubitEncoding::nuclear(), QubitEncoding::inner()]);
    let mut cu_err: f64 = 0.0;
    for _ in 0..20 {
        let (a, b, g, d) = (angle(), angle(), angle(), angle());
        let target = controlled_on_electron_zero(&euler(a, b, g, d));
        let r = verify_gate(&library::ctrl_u_euler(a, b, g, d), &mol, &encs, &target, 1e-9).unwrap();
        cu_err = cu_err.max(err(&r)).max(r.leakage);
    }
    outcome(def_err < 1e-10 && cu_err < 1e-9, format!("max |DEF − I| {def_err:.1e}; controlled-U worst error {cu_err:.1e}"))
}

fn decoupling_block() -> Outcome {
    // the surviving error is pure roundoff; below this floor differences
    // between subdivisions carry no information
    const ROUNDOFF: f64 = 1e-12;
    let errors: Vec<f64> = [1, 2, 4, 8].iter().map(|&c| block_error(6, Species::B, c, false).unwrap()).collect();
    let small = errors.iter().all(|&e| e < 1e-3);
    let non_increasing = errors.windows(2).all(|w| w[1] <= w[0].max(ROUNDOFF));
    let t1 = free_time_us(&decoupled_coupling(1, Species::B).unwrap());
    let linear = (1..=8).all(|m| {
        let tm = free_time_us(&decoupled_coupling(m, Species::B).unwrap());
        (tm - m as f64 * t1).abs() < 1e-12 * tm
    });
    let c6 = effective_coupling_mhz(6, Species::B).unwrap();
    let near_20 = (c6 - 20.0).abs() <= 0.2 * 20.0;
    outcome(
        small && non_increasing && linear && near_20,
        format!(
            "errors for 1/2/4/8 subdivisions {}; duration linear in m: {linear}; m=6 coupling {c6:.2} MHz",
            errors.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join("/")
        ),
    )
}

fn pipeline() -> Outcome {
    let start = Instant::now();
    let spec = ChainSpec::new("BAB").unwrap();
    let reg = Register::chain(&spec).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let gates = [
        GateSpec::parse("X").unwrap(),
        GateSpec::parse("Z").unwrap(),
        GateSpec::parse("P(pi/4)").unwrap(),
        GateSpec::new("random", random_su2(&mut rng)).unwrap(),
    ];
    // nuclear basis with every electron at m = −1/2 (level 2 of 4)
    let nuclear_slots: Vec<usize> = (0..3).map(|s| reg.slot_of(s, Role::Nuclear).unwrap()).collect();
    let index = |bits: usize| {
        let mut digits = vec![2usize; reg.dims().len()];
        for (q, &slot) in nuclear_slots.iter().enumerate() {
            digits[slot] = (bits >> (2 - q)) & 1;
        }
        reg.index_of(&digits)
    };
    let mut inputs = ComplexMatrix::zeros(reg.dim(), 8);
    for c in 0..8 {
        inputs[(index(c), c)] = ONE;
    }
    let mut worst_fid: f64 = 0.0;
    let mut worst_bus: f64 = 0.0;
    let mut agree: f64 = 0.0;
    for f in 0..=2u8 {
        for gate in &gates {
            let program = build_global_pulse_program(f, gate, &spec, CouplingMode::Ideal).unwrap();
            let out = apply_to_states(&program.sequence(), &reg, &inputs).unwrap();
            let mut m = ComplexMatrix::zeros(8, 8);
            for c in 0..8 {
                for r in 0..8 {
                    m[(r, c)] = out[(index(r), c)];
                }
            }
            let bus = (0..8).map(|c| (0..8).map(|r| m[(r, c)].norm_sqr()).sum::<f64>()).fold(1.0, f64::min);
            let (fid, _) = phase_fidelity(&m, &middle_conditional(f as usize, &gate.u)).unwrap();
            worst_fid = worst_fid.max(1.0 - fid);
            worst_bus = worst_bus.max(1.0 - bus);
            let report = run_pipeline(&program, &spec, &DurationModel::default()).unwrap();
            agree = agree.max((report.fidelity - fid).abs());
        }
    }
    let t = start.elapsed();
    outcome(
        worst_fid < 1e-8 && worst_bus < 1e-9 && agree < 1e-9 && t < Duration::from_secs(300),
        format!("12 cases, worst fidelity error {worst_fid:.1e}, worst bus loss {worst_bus:.1e}; {t:.1?}"),
    )
}

fn qca_layer() -> Outcome {
    let rule = |species: &[Species], bits: &[u8], target: Species, f: u8| -> Vec<u8> {
        let n = bits.len();
        (0..n)
            .map(|k| {
                let l = if k > 0 { bits[k - 1] } else { 0 };
                let r = if k + 1 < n { bits[k + 1] } else { 0 };
                bits[k] ^ (species[k] == target && l + r == f) as u8
            })
            .collect()
    };
    let mut checked = 0usize;
    let mut mismatches = 0usize;
    for n in 1..=10usize {
        for first in [Species::A, Species::B] {
            let species: Vec<Species> = (0..n).map(|k| if k % 2 == 0 { first } else { first.other() }).collect();
            for target in [Species::A, Species::B] {
                for f in 0..=2u8 {
                    let op = GlobalOpSpec::not(target, f).unwrap();
                    for x in 0..1usize << n {
                        let bits: Vec<u8> = (0..n).map(|k| ((x >> (n - 1 - k)) & 1) as u8).collect();
                        let expected = rule(&species, &bits, target, f);
                        let got = apply_global(&QcaState::basis(&species, &bits).unwrap(), &op).as_basis();
                        let oracle = classical_ca_oracle(&species, &bits, &op).unwrap();
                        if got.as_deref() != Some(expected.as_slice()) || oracle != expected {
                            mismatches += 1;
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let species: Vec<Species> = (0..10).map(|k| if k % 2 == 0 { Species::A } else { Species::B }).collect();
    let mut norm_err: f64 = 0.0;
    for _ in 0..5 {
        let mut amps: Vec<Complex64> = (0..1 << 10).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= n);
        let mut s = QcaState::from_amplitudes(&species, amps).unwrap();
        for _ in 0..4 {
            s = move_step(&s);
            norm_err = norm_err.max((s.norm() - 1.0).abs());
        }
    }
    outcome(
        mismatches == 0 && norm_err < 1e-12,
        format!("{checked} basis cases, {mismatches} mismatches; move_step norm drift {norm_err:.1e}"),
    )
}

fn spectra() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for (c, split) in [(SpeciesConstants::nitrogen(), 21.2), (SpeciesConstants::phosphorus(), 138.4)] {
        let esr = transition_lines(&c, 2.0, SpectrumKind::Esr).unwrap();
        let nmr = transition_lines(&c, 2.0, SpectrumKind::Nmr).unwrap();
        let esr_split = esr[1].frequency_mhz - esr[0].frequency_mhz;
        let center = (esr[0].frequency_mhz + esr[1].frequency_mhz) / 2.0;
        // absolute line positions fold where −ν_N + A·m_S changes sign, so
        // the even spacing is checked on the signed transition energies
        let signed = signed_transitions(&c, 2.0, SpectrumKind::Nmr);
        let spacing_ok = signed.windows(2).all(|w| (w[1] - w[0] - c.hyperfine).abs() < 1e-9);
        let mut folded: Vec<f64> = signed.iter().map(|v| v.abs()).collect();
        folded.sort_by(f64::total_cmp);
        let positions_ok = folded.iter().zip(&nmr).all(|(v, l)| (v - l.frequency_mhz).abs() < 1e-9);
        pass &= esr.len() == 2 && (esr_split - split).abs() < 1e-9 && (center - 56_000.0).abs() < 1e-9;
        pass &= nmr.len() == 4 && spacing_ok && positions_ok;
        notes.push(format!(
            "{}: ESR split {esr_split:.9} MHz at {center:.3} MHz, NMR at {} MHz",
            c.species,
            nmr.iter().map(|l| format!("{:.1}", l.frequency_mhz)).collect::<Vec<_>>().join("/")
        ));
    }
    outcome(pass, notes.join("; "))
}

fn timing() -> Outcome {
    let spec = ChainSpec::new("BAB").unwrap();
    let program = build_global_pulse_program(1, &GateSpec::parse("X").unwrap(), &spec, CouplingMode::Ideal).unwrap();
    let couplings = program.coupling_intervals;
    let global_op_us = couplings as f64 * 50.0 * 1e-3;
    let logical_us = GLOBAL_OPS_PER_LOGICAL_GATE as f64 * global_op_us;
    let fom = figure_of_merit(30e-6, 1.0).unwrap();
    let pass = couplings == 15
        && (global_op_us - 1.0).abs() <= 0.3
        && (logical_us - 30.0).abs() <= 0.3 * 30.0
        && fom == 33_333
        && (10_000..=34_000).contains(&fom);
    outcome(
        pass,
        format!("{couplings} intervals × 50 ns = {global_op_us:.2} μs; logical gate {logical_us:.1} μs; figure of merit(30 μs, 1 s) = {fom}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("spin-1/2 CNOT sequences", spin_half_cnots),
        ("spin-3/2 inner/outer CNOT identities", spin32_cnot_identities),
        ("SWAP_INNER and SWAP_OUTER", swaps),
        ("Ξ equals the squared pair conditional", xi_construction),
        ("neighbour-conditional rotations A2/A1/A0", neighbour_conditionals),
        ("f=2 tag flips and global phase", f2_tag),
        ("parity CNOT family and SWAP_HIGHLOW", parity_family),
        ("controlled-U Euler construction", controlled_u),
        ("decoupling block", decoupling_block),
        ("end-to-end pipeline on BAB", pipeline),
        ("QCA logical layer", qca_layer),
        ("ESR/NMR spectra", spectra),
        ("timing arithmetic", timing),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (k, (title, run)) in criteria.iter().enumerate() {
        let n = k + 1;
        let o = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            outcome(false, format!("panicked: {}", msg.unwrap_or_default()))
        });
        println!("{} criterion {n:>2}: {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(n);
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
