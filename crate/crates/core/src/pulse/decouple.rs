//! Refocused free evolution that keeps only the hyperfine coupling of one
//! species.
//!
//! One cycle has two sections. In each section two hard nuclear π pulses
//! sit at the fractions (m−1)/(4m) and (3m+1)/(4m), so the nuclear sign is
//! inverted for (m+1)/(2m) of the section and the surviving hyperfine
//! coupling is scaled by −1/m. The other species' electron is flipped at
//! every quarter, the target electron and all nuclei at the section
//! boundaries. Every remaining z term then integrates to zero: Zeeman terms,
//! the other species' hyperfine term and the dipolar coupling. Because all
//! terms are diagonal the cancellation is exact, not first order.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{phase_aligned_distance, wrap_angle};
use crate::pulse::compile::compile;
use crate::pulse::generator::{Generator, Sites};
use crate::pulse::sequence::{PulseElement, PulseSequence};
use crate::register::{Register, Role};
use crate::spin::Axis;
use crate::system::{ChainSpec, Species};

enum Event {
    Wait(f64),
    ElectronPi(Species),
    NuclearPi,
}

/// Free-evolution time (μs) of a block for scaling factor m.
pub fn block_duration_us(m: u32, target: Species) -> f64 {
    m as f64 / (2.0 * target.constants().hyperfine)
}

/// The block producing [+2I_zS_z] on `target` molecules, one refocusing cycle.
pub fn decoupled_coupling(m: u32, target: Species) -> Result<PulseSequence> {
    decoupled_coupling_cycles(m, target, 1)
}

/// As [`decoupled_coupling`] with the total time split into `cycles` repeats.
pub fn decoupled_coupling_cycles(m: u32, target: Species, cycles: u32) -> Result<PulseSequence> {
    scaled_block(m, target, cycles, 1.0)
}

/// Block whose free-evolution intervals are multiplied by `time_scale`;
/// used to read off the effective coupling without phase wrapping.
pub(crate) fn scaled_block(m: u32, target: Species, cycles: u32, time_scale: f64) -> Result<PulseSequence> {
    if m < 1 {
        return Err(Error::InvalidParameter("decoupling factor m must be at least 1".into()));
    }
    if cycles < 1 {
        return Err(Error::InvalidParameter("cycle count must be at least 1".into()));
    }
    let other = target.other();
    let tau = block_duration_us(m, target) * time_scale / cycles as f64;
    let mf = m as f64;
    let gray = [(mf - 1.0) / (4.0 * mf), (3.0 * mf + 1.0) / (4.0 * mf)];

    // (time within the cycle as a fraction of tau, event)
    let mut timeline: Vec<(f64, u8)> = Vec::new();
    const OTHER: u8 = 0;
    const TARGET: u8 = 1;
    const NUCLEI: u8 = 2;
    for section in 0..2 {
        let start = section as f64 * 0.5;
        for g in gray {
            timeline.push((start + 0.5 * g, NUCLEI));
        }
        timeline.push((start + 0.25, OTHER));
        timeline.push((start + 0.5, OTHER));
        timeline.push((start + 0.5, TARGET));
        timeline.push((start + 0.5, NUCLEI));
    }
    timeline.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite times"));

    let mut events = Vec::new();
    for _ in 0..cycles {
        let mut now = 0.0;
        for &(t, what) in &timeline {
            if t > now {
                events.push(Event::Wait((t - now) * tau));
                now = t;
            }
            events.push(match what {
                OTHER => Event::ElectronPi(other),
                TARGET => Event::ElectronPi(target),
                _ => Event::NuclearPi,
            });
        }
    }

    // events are in time order; the written product runs the other way
    let elements = events
        .into_iter()
        .rev()
        .map(|e| match e {
            Event::Wait(t) => PulseElement::FreeEvolution { duration_us: t },
            Event::ElectronPi(s) => PulseElement::rot(Generator::s(s, Axis::X), PI),
            Event::NuclearPi => PulseElement::pi(Role::Nuclear, Sites::All, Axis::X),
        })
        .collect();
    Ok(PulseSequence::new(elements, 0.0).named(format!("D{m}[2I_zS_z^{target}]")))
}

/// Ideal target of a block: [+2I_zS_z] on every `target` molecule.
pub fn ideal_coupling(target: Species) -> PulseSequence {
    PulseSequence::new(vec![PulseElement::plus(Generator::hyperfine_zz(Sites::Species(target)))], 0.0)
}

/// A two-site chain with the target species second.
fn pair_spec(target: Species, include_zeeman: bool) -> Result<ChainSpec> {
    let mut spec = ChainSpec::new(&format!("{}{}", target.other(), target))?;
    spec.include_zeeman = include_zeeman;
    Ok(spec)
}

/// Phase-aligned operator-norm distance between the compiled block and its
/// ideal counterpart on a two-site chain.
pub fn block_error(m: u32, target: Species, cycles: u32, include_zeeman: bool) -> Result<f64> {
    let reg = Register::chain(&pair_spec(target, include_zeeman)?)?;
    let block = compile(&decoupled_coupling_cycles(m, target, cycles)?, &reg)?;
    let ideal = compile(&ideal_coupling(target), &reg)?;
    phase_aligned_distance(&block, &ideal)
}

/// Effective coupling c (MHz) of the block's surviving 2πc·I_zS_z term,
/// read from a shortened block so that no phase wraps.
pub fn effective_coupling_mhz(m: u32, target: Species) -> Result<f64> {
    const SCALE: f64 = 1e-3;
    let reg = Register::chain(&pair_spec(target, false)?)?;
    let block = scaled_block(m, target, 1, SCALE)?;
    let u = compile(&block, &reg)?;
    let slot_i = reg.slot_of(1, Role::Nuclear).expect("target nucleus");
    let slot_s = reg.slot_of(1, Role::Electron).expect("target electron");
    let dims = reg.dims();
    // levels m_I = ±1/2 and m_S = ±1/2 of the target, other site in its first level
    let s_dim = dims[slot_s];
    let phase = |ki: usize, ks: usize| {
        let mut digits = vec![0usize; dims.len()];
        digits[slot_i] = ki;
        digits[slot_s] = ks;
        let idx = reg.index_of(&digits);
        u[(idx, idx)].arg()
    };
    let (up, down) = (s_dim / 2 - 1, s_dim / 2);
    let combo = phase(0, up) - phase(0, down) - phase(1, up) + phase(1, down);
    // the combination equals −2π·c·T·(Δm_I·Δm_S) with both differences 1
    let t = free_time_us(&block);
    Ok((wrap_angle(combo) / (2.0 * PI * t)).abs())
}

/// Total free-evolution time of a sequence in μs.
pub fn free_time_us(seq: &PulseSequence) -> f64 {
    let mut t = 0.0;
    seq.for_each_leaf(&mut |el| {
        if let PulseElement::FreeEvolution { duration_us } = el {
            t += duration_us;
        }
    });
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_m() {
        assert!(decoupled_coupling(0, Species::B).is_err());
        assert!(decoupled_coupling_cycles(1, Species::B, 0).is_err());
    }

    #[test]
    fn duration_is_linear_in_m() {
        let t1 = free_time_us(&decoupled_coupling(1, Species::B).unwrap());
        for m in 2..8 {
            let tm = free_time_us(&decoupled_coupling(m, Species::B).unwrap());
            assert!((tm / t1 - m as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn pulse_count_per_cycle() {
        let seq = decoupled_coupling(3, Species::B).unwrap();
        let mut pulses = 0;
        seq.for_each_leaf(&mut |el| {
            if matches!(el, PulseElement::Rotation { .. }) {
                pulses += 1;
            }
        });
        // per section: 2 gray, 2 other-electron, 1 target-electron, 1 nuclear
        assert_eq!(pulses, 12);
    }
}
