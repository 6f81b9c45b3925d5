//! Symbolic generators: weighted sums of single-spin and bilinear spin operators.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::register::{Register, Role};
use crate::spin::{spin_operators, Axis};
use crate::system::Species;

/// Which sites a factor addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sites {
    One(usize),
    Species(Species),
    /// Non-selective (hard) addressing of every site.
    All,
}

impl Sites {
    pub fn matches(self, site: usize, species: Species) -> bool {
        match self {
            Sites::One(k) => k == site,
            Sites::Species(s) => s == species,
            Sites::All => true,
        }
    }

    fn superscript(self) -> String {
        match self {
            Sites::One(k) => format!("^{k}"),
            Sites::Species(s) => format!("^{s}"),
            Sites::All => String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    /// coeff · Σ_sites X_axis, summed over every matching spin.
    Single { coeff: f64, sites: Sites, role: Role, axis: Axis },
    /// coeff · Σ_bonds X_axis on the bond end of the given species. A spin
    /// is therefore weighted by its number of neighbours.
    PerBond { coeff: f64, species: Species, role: Role, axis: Axis },
    /// coeff · Σ_sites I_a S_b on the same molecule.
    Hyperfine { coeff: f64, sites: Sites, nuclear: Axis, electron: Axis },
    /// coeff · Σ_bonds S^A_a S^B_b between neighbouring electrons.
    Dipolar { coeff: f64, a: Axis, b: Axis },
}

impl Term {
    fn coeff(&self) -> f64 {
        match *self {
            Term::Single { coeff, .. }
            | Term::PerBond { coeff, .. }
            | Term::Hyperfine { coeff, .. }
            | Term::Dipolar { coeff, .. } => coeff,
        }
    }

    fn scaled(&self, s: f64) -> Term {
        let mut t = self.clone();
        match &mut t {
            Term::Single { coeff, .. }
            | Term::PerBond { coeff, .. }
            | Term::Hyperfine { coeff, .. }
            | Term::Dipolar { coeff, .. } => *coeff *= s,
        }
        t
    }

    pub fn is_bilinear(&self) -> bool {
        matches!(self, Term::Hyperfine { .. } | Term::Dipolar { .. })
    }

    fn body(&self) -> String {
        match *self {
            Term::Single { sites, role, axis, .. } => format!("{}_{}{}", role.letter(), axis.label(), sites.superscript()),
            Term::PerBond { species, role, axis, .. } => {
                format!("{}_{}^{}(nb)", role.letter(), axis.label(), species)
            }
            Term::Hyperfine { sites, nuclear, electron, .. } => {
                let sup = sites.superscript();
                format!("I_{}{sup}S_{}{sup}", nuclear.label(), electron.label())
            }
            Term::Dipolar { a, b, .. } => format!("S_{}^AS_{}^B", a.label(), b.label()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Generator {
    pub terms: Vec<Term>,
}

impl Generator {
    pub fn term(t: Term) -> Self {
        Self { terms: vec![t] }
    }

    pub fn spin(role: Role, sites: Sites, axis: Axis) -> Self {
        Self::term(Term::Single { coeff: 1.0, sites, role, axis })
    }

    /// Electron operator on every site of a species.
    pub fn s(species: Species, axis: Axis) -> Self {
        Self::spin(Role::Electron, Sites::Species(species), axis)
    }

    /// Nuclear operator on every site of a species.
    pub fn i(species: Species, axis: Axis) -> Self {
        Self::spin(Role::Nuclear, Sites::Species(species), axis)
    }

    /// Non-selective electron operator.
    pub fn s_all(axis: Axis) -> Self {
        Self::spin(Role::Electron, Sites::All, axis)
    }

    /// Hard nuclear operator on every nucleus.
    pub fn i_all(axis: Axis) -> Self {
        Self::spin(Role::Nuclear, Sites::All, axis)
    }

    pub fn per_bond(species: Species, role: Role, axis: Axis) -> Self {
        Self::term(Term::PerBond { coeff: 1.0, species, role, axis })
    }

    /// 2 I_z S_z on the addressed molecules.
    pub fn hyperfine_zz(sites: Sites) -> Self {
        Self::term(Term::Hyperfine { coeff: 2.0, sites, nuclear: Axis::Z, electron: Axis::Z })
    }

    /// 2 S_z^A S_z^B on every bond.
    pub fn dipolar_zz() -> Self {
        Self::term(Term::Dipolar { coeff: 2.0, a: Axis::Z, b: Axis::Z })
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_bilinear(&self) -> bool {
        self.terms.iter().any(Term::is_bilinear)
    }

    pub fn is_z_only(&self) -> bool {
        self.terms.iter().all(|t| match *t {
            Term::Single { axis, .. } | Term::PerBond { axis, .. } => axis == Axis::Z,
            Term::Hyperfine { nuclear, electron, .. } => nuclear == Axis::Z && electron == Axis::Z,
            Term::Dipolar { a, b, .. } => a == Axis::Z && b == Axis::Z,
        })
    }

    pub fn involves(&self, role: Role) -> bool {
        self.terms.iter().any(|t| match *t {
            Term::Single { role: r, .. } | Term::PerBond { role: r, .. } => r == role,
            Term::Hyperfine { .. } => true,
            Term::Dipolar { .. } => role == Role::Electron,
        })
    }

    /// Largest coefficient of a bilinear term, used to scale coupling durations.
    pub fn bilinear_weight(&self) -> f64 {
        self.terms.iter().filter(|t| t.is_bilinear()).map(|t| t.coeff().abs()).fold(0.0, f64::max)
    }

    /// Resolves the symbolic generator on a register.
    pub fn resolve(&self, reg: &Register) -> Result<Resolved> {
        let mut local: Vec<Option<ComplexMatrix>> = vec![None; reg.slots().len()];
        let mut bilinear = Vec::new();
        let mut add_local = |slot: usize, coeff: f64, axis: Axis| -> Result<()> {
            let rep = spin_operators(reg.slots()[slot].two_s)?;
            let op = rep.axis(axis) * coeff;
            local[slot] = Some(match local[slot].take() {
                Some(acc) => &acc + &op,
                None => op,
            });
            Ok(())
        };
        for term in &self.terms {
            let mut hit = false;
            match *term {
                Term::Single { coeff, sites, role, axis } => {
                    for (k, slot) in reg.slots().iter().enumerate() {
                        if slot.role == role && sites.matches(slot.site, reg.species()[slot.site]) {
                            add_local(k, coeff, axis)?;
                            hit = true;
                        }
                    }
                }
                Term::PerBond { coeff, species, role, axis } => {
                    for (l, r) in reg.bonds().collect::<Vec<_>>() {
                        for site in [l, r] {
                            if reg.species()[site] == species {
                                if let Some(k) = reg.slot_of(site, role) {
                                    add_local(k, coeff, axis)?;
                                    hit = true;
                                }
                            }
                        }
                    }
                }
                Term::Hyperfine { coeff, sites, nuclear, electron } => {
                    for site in 0..reg.n_sites() {
                        if !sites.matches(site, reg.species()[site]) {
                            continue;
                        }
                        if let (Some(n), Some(e)) = (reg.slot_of(site, Role::Nuclear), reg.slot_of(site, Role::Electron)) {
                            bilinear.push(Bilinear { coeff, left: n, left_axis: nuclear, right: e, right_axis: electron });
                            hit = true;
                        }
                    }
                }
                Term::Dipolar { coeff, a, b } => {
                    for (l, r) in reg.bonds().collect::<Vec<_>>() {
                        let (sa, sb) = if reg.species()[l] == Species::A { (l, r) } else { (r, l) };
                        if reg.species()[sa] == reg.species()[sb] {
                            continue;
                        }
                        if let (Some(ea), Some(eb)) = (reg.slot_of(sa, Role::Electron), reg.slot_of(sb, Role::Electron)) {
                            bilinear.push(Bilinear { coeff, left: ea, left_axis: a, right: eb, right_axis: b });
                            hit = true;
                        }
                    }
                }
            }
            if !hit {
                return Err(Error::UnresolvedSelector(term.body()));
            }
        }
        let local = local.into_iter().enumerate().filter_map(|(k, m)| m.map(|m| (k, m))).collect();
        Ok(Resolved { local, bilinear })
    }
}

#[derive(Clone, Debug)]
pub struct Bilinear {
    pub coeff: f64,
    pub left: usize,
    pub left_axis: Axis,
    pub right: usize,
    pub right_axis: Axis,
}

/// A generator made concrete on a register: per-slot Hermitian sums and
/// a list of two-slot products.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub local: Vec<(usize, ComplexMatrix)>,
    pub bilinear: Vec<Bilinear>,
}

impl Resolved {
    pub fn is_diagonal(&self) -> bool {
        self.local.iter().all(|(_, m)| m.is_diagonal(0.0))
            && self.bilinear.iter().all(|b| b.left_axis == Axis::Z && b.right_axis == Axis::Z)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let c = t.coeff();
            let sign = if c < 0.0 { "-" } else if k > 0 { "+" } else { "" };
            let mag = c.abs();
            let mag = if (mag - 1.0).abs() < 1e-12 { String::new() } else { fmt_num(mag) };
            write!(f, "{sign}{mag}{}", t.body())?;
        }
        Ok(())
    }
}

fn fmt_num(x: f64) -> String {
    if (x - x.round()).abs() < 1e-12 {
        format!("{}", x.round() as i64)
    } else {
        format!("{x}")
    }
}

impl Add for Generator {
    type Output = Generator;
    fn add(mut self, rhs: Generator) -> Generator {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Sub for Generator {
    type Output = Generator;
    fn sub(self, rhs: Generator) -> Generator {
        self + (-rhs)
    }
}

impl Neg for Generator {
    type Output = Generator;
    fn neg(self) -> Generator {
        self * -1.0
    }
}

impl Mul<f64> for Generator {
    type Output = Generator;
    fn mul(self, rhs: f64) -> Generator {
        Generator { terms: self.terms.iter().map(|t| t.scaled(rhs)).collect() }
    }
}
