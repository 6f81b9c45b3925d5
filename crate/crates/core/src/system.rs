//! Physical constants, the secular pair Hamiltonian and chain assembly.
//!
//! Energies are in MHz with h = 1, times in μs.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::spin::m_value;

const PLANCK: f64 = 6.626_070_15e-34;
const BOLTZMANN: f64 = 1.380_649e-23;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    /// ¹⁵N@C60
    A,
    /// ³¹P@C60
    B,
}

impl Species {
    pub fn other(self) -> Species {
        match self {
            Species::A => Species::B,
            Species::B => Species::A,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Species::A => 'A',
            Species::B => 'B',
        }
    }

    pub fn constants(self) -> SpeciesConstants {
        match self {
            Species::A => SpeciesConstants::nitrogen(),
            Species::B => SpeciesConstants::phosphorus(),
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Species {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" | "N" | "n" => Ok(Species::A),
            "B" | "b" | "P" | "p" => Ok(Species::B),
            other => Err(Error::InvalidParameter(format!("unknown species {other:?}"))),
        }
    }
}

pub fn parse_pattern(pattern: &str) -> Result<Vec<Species>> {
    let sites: Vec<Species> = pattern
        .trim()
        .chars()
        .map(|c| match c {
            'A' => Ok(Species::A),
            'B' => Ok(Species::B),
            _ => Err(Error::InvalidPattern(pattern.to_string())),
        })
        .collect::<Result<_>>()?;
    if sites.is_empty() || sites.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidPattern(pattern.to_string()));
    }
    Ok(sites)
}

pub fn pattern_string(sites: &[Species]) -> String {
    sites.iter().map(|s| s.letter()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeciesConstants {
    pub species: Species,
    pub name: &'static str,
    /// g_e μ_e in MHz/T
    pub electron_zeeman_per_tesla: f64,
    /// g_N μ_N in MHz/T, signed
    pub nuclear_zeeman_per_tesla: f64,
    /// A in MHz
    pub hyperfine: f64,
    pub electron_two_s: u32,
    pub nuclear_two_s: u32,
}

impl SpeciesConstants {
    pub fn nitrogen() -> Self {
        Self {
            species: Species::A,
            name: "15N@C60",
            electron_zeeman_per_tesla: 28_000.0,
            nuclear_zeeman_per_tesla: -3.05,
            hyperfine: 21.2,
            electron_two_s: 3,
            nuclear_two_s: 1,
        }
    }

    pub fn phosphorus() -> Self {
        Self {
            species: Species::B,
            name: "31P@C60",
            electron_zeeman_per_tesla: 28_000.0,
            nuclear_zeeman_per_tesla: 17.25,
            hyperfine: 138.4,
            electron_two_s: 3,
            nuclear_two_s: 1,
        }
    }

    pub fn electron_zeeman(&self, field_tesla: f64) -> f64 {
        self.electron_zeeman_per_tesla * field_tesla
    }

    pub fn nuclear_zeeman(&self, field_tesla: f64) -> f64 {
        self.nuclear_zeeman_per_tesla * field_tesla
    }

    /// Single-molecule energy g_eμ_eB m_s − g_Nμ_N B m_I + A m_s m_I.
    pub fn energy(&self, field_tesla: f64, m_s: f64, m_i: f64) -> f64 {
        self.electron_zeeman(field_tesla) * m_s - self.nuclear_zeeman(field_tesla) * m_i
            + self.hyperfine * m_s * m_i
    }
}

/// J_D(r, θ) = 50 MHz · |1 − 3cos²θ| / (2 r³), with r in nm, scaled so J_D(1, 0) = 50 MHz.
pub fn dipolar_coupling(r_nm: f64, theta_rad: f64) -> Result<f64> {
    if !(r_nm > 0.0) {
        return Err(Error::InvalidParameter(format!("spacing must be positive, got {r_nm}")));
    }
    let c = theta_rad.cos();
    Ok(50.0 * (1.0 - 3.0 * c * c).abs() / 2.0 / r_nm.powi(3))
}

/// Boltzmann population difference of the electron Zeeman doublet.
pub fn thermal_polarization(temp_kelvin: f64, field_tesla: f64) -> Result<f64> {
    if !(temp_kelvin > 0.0) {
        return Err(Error::InvalidParameter(format!("temperature must be positive, got {temp_kelvin}")));
    }
    let nu_hz = SpeciesConstants::nitrogen().electron_zeeman(field_tesla).abs() * 1e6;
    Ok((PLANCK * nu_hz / (2.0 * BOLTZMANN * temp_kelvin)).tanh())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    pub pattern: Vec<Species>,
    pub field_tesla: f64,
    pub spacing_nm: f64,
    pub dipole_angle_rad: f64,
    pub include_zeeman: bool,
    pub j_override: Option<f64>,
}

impl ChainSpec {
    pub fn new(pattern: &str) -> Result<Self> {
        Ok(Self {
            pattern: parse_pattern(pattern)?,
            field_tesla: 2.0,
            spacing_nm: 1.0,
            dipole_angle_rad: 0.0,
            include_zeeman: false,
            j_override: None,
        })
    }

    pub fn len(&self) -> usize {
        self.pattern.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pattern.is_empty()
    }

    pub fn j_d(&self) -> Result<f64> {
        match self.j_override {
            Some(j) => Ok(j),
            None => dipolar_coupling(self.spacing_nm, self.dipole_angle_rad),
        }
    }

    /// Parses `key=value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pattern = None;
        let mut spec = ChainSpec::new("AB")?;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: n + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = || value.parse::<f64>().map_err(|_| err(format!("{key}: not a number: {value:?}")));
            match key {
                "pattern" => pattern = Some(parse_pattern(value)?),
                "field_tesla" => spec.field_tesla = num()?,
                "spacing_nm" => spec.spacing_nm = num()?,
                "dipole_angle_deg" => spec.dipole_angle_rad = num()?.to_radians(),
                "include_zeeman" => {
                    spec.include_zeeman = value.parse().map_err(|_| err(format!("include_zeeman: not a boolean: {value:?}")))?
                }
                "j_override_mhz" => spec.j_override = if value.is_empty() { None } else { Some(num()?) },
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        spec.pattern = pattern.ok_or(Error::Parse { line: 0, message: "missing pattern".into() })?;
        if !(spec.spacing_nm > 0.0) || spec.field_tesla < 0.0 {
            return Err(Error::InvalidParameter("spacing must be positive and field non-negative".into()));
        }
        Ok(spec)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "pattern={}\nfield_tesla={}\nspacing_nm={}\ndipole_angle_deg={}\ninclude_zeeman={}\n",
            pattern_string(&self.pattern),
            self.field_tesla,
            self.spacing_nm,
            self.dipole_angle_rad.to_degrees(),
            self.include_zeeman
        );
        s.push_str(&format!("j_override_mhz={}\n", self.j_override.map(|j| j.to_string()).unwrap_or_default()));
        s
    }
}

/// One diagonal product in the secular Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiagonalTerm {
    ElectronZeeman { site: usize },
    NuclearZeeman { site: usize },
    Hyperfine { site: usize },
    Dipolar { left: usize, right: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianTerms {
    pub n_sites: usize,
    /// (weight in MHz, product)
    pub terms: Vec<(f64, DiagonalTerm)>,
}

impl HamiltonianTerms {
    /// Energy of the product state with the given per-site quantum numbers.
    pub fn energy(&self, m_nuclear: &[f64], m_electron: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|&(w, t)| {
                w * match t {
                    DiagonalTerm::ElectronZeeman { site } => m_electron[site],
                    DiagonalTerm::NuclearZeeman { site } => m_nuclear[site],
                    DiagonalTerm::Hyperfine { site } => m_electron[site] * m_nuclear[site],
                    DiagonalTerm::Dipolar { left, right } => m_electron[left] * m_electron[right],
                }
            })
            .sum()
    }

    pub fn dipolar_count(&self) -> usize {
        self.terms.iter().filter(|(_, t)| matches!(t, DiagonalTerm::Dipolar { .. })).count()
    }

    pub fn has_zeeman(&self) -> bool {
        self.terms.iter().any(|(w, t)| {
            *w != 0.0 && matches!(t, DiagonalTerm::ElectronZeeman { .. } | DiagonalTerm::NuclearZeeman { .. })
        })
    }

    /// Diagonal of the Hamiltonian in the product basis with slots ordered
    /// nuclear, electron per site, each spin m-ordered from +s down.
    pub fn diagonal(&self, nuclear_two_s: &[u32], electron_two_s: &[u32]) -> Vec<f64> {
        let mut dims = Vec::new();
        for k in 0..self.n_sites {
            dims.push(nuclear_two_s[k] as usize + 1);
            dims.push(electron_two_s[k] as usize + 1);
        }
        let total: usize = dims.iter().product();
        let mut out = Vec::with_capacity(total);
        let mut mn = vec![0.0; self.n_sites];
        let mut me = vec![0.0; self.n_sites];
        for idx in 0..total {
            let mut rem = idx;
            for slot in (0..dims.len()).rev() {
                let digit = rem % dims[slot];
                rem /= dims[slot];
                let site = slot / 2;
                if slot % 2 == 0 {
                    mn[site] = m_value(nuclear_two_s[site], digit);
                } else {
                    me[site] = m_value(electron_two_s[site], digit);
                }
            }
            out.push(self.energy(&mn, &me));
        }
        out
    }
}

fn site_terms(terms: &mut Vec<(f64, DiagonalTerm)>, site: usize, c: &SpeciesConstants, field: f64, zeeman: bool) {
    if zeeman {
        terms.push((c.electron_zeeman(field), DiagonalTerm::ElectronZeeman { site }));
        terms.push((-c.nuclear_zeeman(field), DiagonalTerm::NuclearZeeman { site }));
    }
    terms.push((c.hyperfine, DiagonalTerm::Hyperfine { site }));
}

pub fn pair_terms(a: &SpeciesConstants, b: &SpeciesConstants, field_tesla: f64, j_d: f64, include_zeeman: bool) -> HamiltonianTerms {
    let mut terms = Vec::new();
    site_terms(&mut terms, 0, a, field_tesla, include_zeeman);
    site_terms(&mut terms, 1, b, field_tesla, include_zeeman);
    terms.push((j_d, DiagonalTerm::Dipolar { left: 0, right: 1 }));
    HamiltonianTerms { n_sites: 2, terms }
}

/// The 64-dimensional pair Hamiltonian, slots ordered I^A, S^A, I^B, S^B.
pub fn pair_hamiltonian(
    a: &SpeciesConstants,
    b: &SpeciesConstants,
    field_tesla: f64,
    j_d: f64,
    include_zeeman: bool,
) -> Result<ComplexMatrix> {
    if field_tesla < 0.0 {
        return Err(Error::InvalidParameter("field must be non-negative".into()));
    }
    let terms = pair_terms(a, b, field_tesla, j_d, include_zeeman);
    let diag = terms.diagonal(&[a.nuclear_two_s, b.nuclear_two_s], &[a.electron_two_s, b.electron_two_s]);
    Ok(ComplexMatrix::from_diagonal(&diag.iter().map(|&e| Complex64::new(e, 0.0)).collect::<Vec<_>>()))
}

pub fn chain_terms(spec: &ChainSpec) -> Result<HamiltonianTerms> {
    let j = spec.j_d()?;
    let mut terms = Vec::new();
    for (site, sp) in spec.pattern.iter().enumerate() {
        site_terms(&mut terms, site, &sp.constants(), spec.field_tesla, spec.include_zeeman);
    }
    for left in 0..spec.pattern.len().saturating_sub(1) {
        terms.push((j, DiagonalTerm::Dipolar { left, right: left + 1 }));
    }
    Ok(HamiltonianTerms { n_sites: spec.pattern.len(), terms })
}

/// Symbolic terms, plus the dense matrix for chains of at most four molecules.
pub fn chain_hamiltonian(spec: &ChainSpec) -> Result<(HamiltonianTerms, Option<ComplexMatrix>)> {
    let terms = chain_terms(spec)?;
    let n = spec.pattern.len();
    let matrix = if n <= 4 {
        let nuc: Vec<u32> = spec.pattern.iter().map(|s| s.constants().nuclear_two_s).collect();
        let el: Vec<u32> = spec.pattern.iter().map(|s| s.constants().electron_two_s).collect();
        let diag = terms.diagonal(&nuc, &el);
        Some(ComplexMatrix::from_diagonal(&diag.iter().map(|&e| Complex64::new(e, 0.0)).collect::<Vec<_>>()))
    } else {
        None
    };
    Ok((terms, matrix))
}
