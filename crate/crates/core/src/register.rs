//! Spin layout of a simulated system: which spins exist, their sizes and
//! order in the tensor product, and the free Hamiltonian when one is known.
//!
//! Slots are ordered site by site, nuclear spin before electron spin.

use crate::error::{Error, Result};
use crate::spin::m_value;
use crate::system::{chain_terms, ChainSpec, HamiltonianTerms, Species};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Nuclear,
    Electron,
}

impl Role {
    pub fn letter(self) -> char {
        match self {
            Role::Nuclear => 'I',
            Role::Electron => 'S',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub site: usize,
    pub role: Role,
    pub two_s: u32,
}

#[derive(Clone, Debug)]
pub struct Register {
    species: Vec<Species>,
    slots: Vec<Slot>,
    dims: Vec<usize>,
    hamiltonian: Option<HamiltonianTerms>,
}

impl Register {
    /// General constructor: one entry per site with optional nuclear and electron spins.
    pub fn new(sites: &[(Species, Option<u32>, Option<u32>)]) -> Result<Self> {
        let mut slots = Vec::new();
        for (site, &(_, nuc, el)) in sites.iter().enumerate() {
            for (role, two_s) in [(Role::Nuclear, nuc), (Role::Electron, el)] {
                if let Some(two_s) = two_s {
                    if two_s < 1 {
                        return Err(Error::InvalidSpin(two_s));
                    }
                    slots.push(Slot { site, role, two_s });
                }
            }
        }
        if slots.is_empty() {
            return Err(Error::InvalidParameter("register has no spins".into()));
        }
        let dims = slots.iter().map(|s| s.two_s as usize + 1).collect();
        Ok(Self { species: sites.iter().map(|s| s.0).collect(), slots, dims, hamiltonian: None })
    }

    /// Full nuclear ⊗ electron chain with its secular Hamiltonian attached.
    pub fn chain(spec: &ChainSpec) -> Result<Self> {
        let sites: Vec<_> = spec
            .pattern
            .iter()
            .map(|&s| {
                let c = s.constants();
                (s, Some(c.nuclear_two_s), Some(c.electron_two_s))
            })
            .collect();
        let mut reg = Self::new(&sites)?;
        reg.hamiltonian = Some(chain_terms(spec)?);
        Ok(reg)
    }

    /// Electron-only chain with every electron of spin two_s/2.
    pub fn electrons(pattern: &[Species], two_s: u32) -> Result<Self> {
        let sites: Vec<_> = pattern.iter().map(|&s| (s, None, Some(two_s))).collect();
        Self::new(&sites)
    }

    /// A single molecule with nuclear spin two_i/2 and electron spin two_s/2.
    pub fn molecule(two_i: u32, two_s: u32) -> Result<Self> {
        Self::new(&[(Species::A, Some(two_i), Some(two_s))])
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn n_sites(&self) -> usize {
        self.species.len()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn hamiltonian(&self) -> Option<&HamiltonianTerms> {
        self.hamiltonian.as_ref()
    }

    pub fn slot_of(&self, site: usize, role: Role) -> Option<usize> {
        self.slots.iter().position(|s| s.site == site && s.role == role)
    }

    /// Nearest-neighbour bonds (i, i+1).
    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.n_sites()).map(|k| (k - 1, k))
    }

    /// Number of neighbours of a site.
    pub fn coordination(&self, site: usize) -> usize {
        usize::from(site > 0) + usize::from(site + 1 < self.n_sites())
    }

    /// Per-slot digit of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (d, n)| acc * n + d)
    }

    /// Diagonal of the free Hamiltonian (MHz) over the full product basis.
    pub fn energies(&self) -> Result<Vec<f64>> {
        let h = self.hamiltonian.as_ref().ok_or(Error::NoHamiltonian)?;
        let n = self.n_sites();
        let mut out = Vec::with_capacity(self.dim());
        let mut mn = vec![0.0; n];
        let mut me = vec![0.0; n];
        for idx in 0..self.dim() {
            for (slot, d) in self.slots.iter().zip(self.digits(idx)) {
                let m = m_value(slot.two_s, d);
                match slot.role {
                    Role::Nuclear => mn[slot.site] = m,
                    Role::Electron => me[slot.site] = m,
                }
            }
            out.push(h.energy(&mn, &me));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_layout() {
        let reg = Register::chain(&ChainSpec::new("BAB").unwrap()).unwrap();
        assert_eq!(reg.dims(), &[2, 4, 2, 4, 2, 4]);
        assert_eq!(reg.dim(), 512);
        assert_eq!(reg.slot_of(1, Role::Electron), Some(3));
        assert_eq!(reg.coordination(1), 2);
        assert_eq!(reg.coordination(0), 1);
        assert_eq!(reg.bonds().count(), 2);
    }

    #[test]
    fn digits_round_trip() {
        let reg = Register::molecule(1, 3).unwrap();
        for idx in 0..reg.dim() {
            assert_eq!(reg.index_of(&reg.digits(idx)), idx);
        }
    }

    #[test]
    fn electrons_only_has_no_hamiltonian() {
        let reg = Register::electrons(&[Species::A, Species::B], 1).unwrap();
        assert!(matches!(reg.energies(), Err(Error::NoHamiltonian)));
    }
}
