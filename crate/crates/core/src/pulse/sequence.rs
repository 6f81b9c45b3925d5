//! Pulse sequences. Elements are written left to right and applied right to
//! left, so the written product is the matrix product.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use crate::pulse::generator::{Generator, Sites, Term};
use crate::register::Role;
use crate::spin::Axis;

#[derive(Clone, Debug, PartialEq)]
pub enum PulseElement {
    /// exp(i·angle·G)
    Rotation { generator: Generator, angle: f64 },
    /// exp(−2πi·t·H) under the register's free Hamiltonian, t in μs.
    FreeEvolution { duration_us: f64 },
    /// A named sub-sequence, kept whole for notation and its own phase.
    Block(Box<PulseSequence>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    IdealRotation,
    CouplingInterval,
    FreeEvolution,
    SelectivePi,
    Block,
}

impl PulseElement {
    pub fn rot(generator: Generator, angle: f64) -> Self {
        PulseElement::Rotation { generator, angle }
    }

    /// [+G] = exp(iπ/2·G)
    pub fn plus(generator: Generator) -> Self {
        Self::rot(generator, FRAC_PI_2)
    }

    /// [−G] = exp(−iπ/2·G)
    pub fn minus(generator: Generator) -> Self {
        Self::rot(generator, -FRAC_PI_2)
    }

    /// π rotation about `axis` of the addressed spins.
    pub fn pi(role: Role, sites: Sites, axis: Axis) -> Self {
        Self::rot(Generator::spin(role, sites, axis), PI)
    }

    pub fn kind(&self) -> ElementKind {
        match self {
            PulseElement::Rotation { generator, angle } => {
                if generator.has_bilinear() {
                    ElementKind::CouplingInterval
                } else if (angle.abs() - PI).abs() < 1e-12 && !generator.is_z_only() {
                    ElementKind::SelectivePi
                } else {
                    ElementKind::IdealRotation
                }
            }
            PulseElement::FreeEvolution { .. } => ElementKind::FreeEvolution,
            PulseElement::Block(_) => ElementKind::Block,
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            PulseElement::Rotation { generator, angle } => Self::rot(generator.clone(), -angle),
            PulseElement::FreeEvolution { duration_us } => PulseElement::FreeEvolution { duration_us: -duration_us },
            PulseElement::Block(seq) => PulseElement::Block(Box::new(seq.inverse())),
        }
    }
}

impl fmt::Display for PulseElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseElement::Rotation { generator, angle } => {
                if (angle.abs() - FRAC_PI_2).abs() < 1e-12 {
                    // [G'] with G' = sign(angle)·G, so [−S_y] reads as in print
                    let g = (generator.clone() * angle.signum()).to_string();
                    if g.starts_with('-') {
                        write!(f, "[{g}]")
                    } else {
                        write!(f, "[+{g}]")
                    }
                } else if let [Term::Single { coeff, sites, role, axis }] = generator.terms.as_slice() {
                    let sup = match sites {
                        Sites::Species(s) => format!("^{s}"),
                        Sites::One(k) => format!("^{k}"),
                        Sites::All => String::new(),
                    };
                    let r = if *role == Role::Nuclear { "I" } else { "" };
                    write!(f, "{{{}{r}{sup}_{}}}", axis.label().to_ascii_uppercase(), fmt_angle(angle * coeff))
                } else {
                    write!(f, "exp(i{}({generator}))", fmt_angle(*angle))
                }
            }
            PulseElement::FreeEvolution { duration_us } => write!(f, "free({:.4}ns)", duration_us * 1e3),
            PulseElement::Block(seq) => write!(f, "{}", seq.name.as_deref().unwrap_or("block")),
        }
    }
}

/// Angle as a multiple of π where that reads cleanly.
pub fn fmt_angle(a: f64) -> String {
    let r = a / PI;
    for den in [1.0, 2.0, 4.0, 8.0, 3.0, 6.0] {
        let num = r * den;
        if (num - num.round()).abs() < 1e-9 {
            let n = num.round() as i64;
            return match (n, den as i64) {
                (0, _) => "0".into(),
                (1, 1) => "π".into(),
                (-1, 1) => "-π".into(),
                (n, 1) => format!("{n}π"),
                (1, d) => format!("π/{d}"),
                (-1, d) => format!("-π/{d}"),
                (n, d) => format!("{n}π/{d}"),
            };
        }
    }
    format!("{a:.6}")
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PulseSequence {
    pub name: Option<String>,
    pub elements: Vec<PulseElement>,
    pub global_phase: f64,
}

impl PulseSequence {
    pub fn new(elements: Vec<PulseElement>, global_phase: f64) -> Self {
        Self { name: None, elements, global_phase }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The product `self · other`: `other` acts first.
    pub fn then_before(&self, other: &PulseSequence) -> PulseSequence {
        concat(self, other)
    }

    /// The sequence wrapped as a single named element.
    pub fn as_block(&self) -> PulseElement {
        PulseElement::Block(Box::new(self.clone()))
    }

    /// Reverses order and negates every angle and the phase.
    pub fn inverse(&self) -> PulseSequence {
        PulseSequence {
            name: self.name.as_ref().map(|n| format!("{n}⁻¹")),
            elements: self.elements.iter().rev().map(PulseElement::inverse).collect(),
            global_phase: -self.global_phase,
        }
    }

    /// Visits every non-block element, descending into blocks.
    pub fn for_each_leaf(&self, f: &mut impl FnMut(&PulseElement)) {
        for el in &self.elements {
            match el {
                PulseElement::Block(inner) => inner.for_each_leaf(f),
                other => f(other),
            }
        }
    }

    pub fn count_kind(&self, kind: ElementKind) -> usize {
        let mut n = 0;
        self.for_each_leaf(&mut |el| {
            if el.kind() == kind {
                n += 1;
            }
        });
        n
    }

    pub fn coupling_intervals(&self) -> usize {
        self.count_kind(ElementKind::CouplingInterval)
    }

    /// Global phase including that of nested blocks.
    pub fn total_phase(&self) -> f64 {
        self.global_phase
            + self
                .elements
                .iter()
                .map(|el| if let PulseElement::Block(b) = el { b.total_phase() } else { 0.0 })
                .sum::<f64>()
    }

    pub fn notation(&self) -> String {
        let mut s: String = self.elements.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("");
        if self.global_phase != 0.0 {
            let a = fmt_angle(self.global_phase);
            match a.strip_prefix('-') {
                Some(rest) => s.push_str(&format!("·e^(-i{rest})")),
                None => s.push_str(&format!("·e^(i{a})")),
            }
        }
        s
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            write!(f, "{n} = ")?;
        }
        write!(f, "{}", self.notation())
    }
}

/// `s1 · s2` with `s1` leftmost.
pub fn concat(s1: &PulseSequence, s2: &PulseSequence) -> PulseSequence {
    let mut elements = s1.elements.clone();
    elements.extend(s2.elements.iter().cloned());
    PulseSequence { name: None, elements, global_phase: s1.global_phase + s2.global_phase }
}
