//! ESR and NMR stick spectra of a single endohedral molecule.
//!
//! Frequencies are absolute energy differences (MHz) of the diagonal
//! single-molecule Hamiltonian. Intensities are model-derived: the ladder
//! weight |⟨m+1|S₊|m⟩|² summed over transitions that land on the same line.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spin::m_value;
use crate::system::{Species, SpeciesConstants};

/// Lines closer than this (MHz) are merged.
const MERGE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpectrumKind {
    Esr,
    Nmr,
}

impl fmt::Display for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectrumKind::Esr => "ESR",
            SpectrumKind::Nmr => "NMR",
        })
    }
}

impl FromStr for SpectrumKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ESR" | "EPR" => Ok(SpectrumKind::Esr),
            "NMR" => Ok(SpectrumKind::Nmr),
            other => Err(Error::InvalidParameter(format!("unknown spectrum kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralLine {
    pub frequency_mhz: f64,
    pub intensity: f64,
    pub species: Species,
    pub kind: SpectrumKind,
    /// Driven transitions and the spectator quantum number, e.g.
    /// `m_I=+1/2; m_S -3/2>-1/2 -1/2>+1/2 +1/2>+3/2`.
    pub assignment: String,
}

fn half_label(m: f64) -> String {
    let twice = (2.0 * m).round() as i64;
    if twice % 2 == 0 {
        format!("{:+}", twice / 2)
    } else {
        format!("{twice:+}/2")
    }
}

/// |⟨m+1|S₊|m⟩|² for spin s.
fn ladder_weight(s: f64, m: f64) -> f64 {
    s * (s + 1.0) - m * (m + 1.0)
}

/// Stick lines for one species. Each line is one spectator level of the
/// undriven spin with all of its degenerate driven transitions merged.
pub fn transition_lines(constants: &SpeciesConstants, field_tesla: f64, kind: SpectrumKind) -> Result<Vec<SpectralLine>> {
    if !(field_tesla > 0.0 && field_tesla.is_finite()) {
        return Err(Error::InvalidParameter(format!("field must be positive, got {field_tesla}")));
    }
    let (driven_two_s, spectator_two_s, driven_name, spectator_name) = match kind {
        SpectrumKind::Esr => (constants.electron_two_s, constants.nuclear_two_s, "m_S", "m_I"),
        SpectrumKind::Nmr => (constants.nuclear_two_s, constants.electron_two_s, "m_I", "m_S"),
    };
    let s = driven_two_s as f64 / 2.0;
    let energy = |driven: f64, spectator: f64| match kind {
        SpectrumKind::Esr => constants.energy(field_tesla, driven, spectator),
        SpectrumKind::Nmr => constants.energy(field_tesla, spectator, driven),
    };

    let mut lines: Vec<(f64, f64, Vec<String>)> = Vec::new();
    // spectator levels in ascending m so equal-weight output is stable
    for ks in (0..=spectator_two_s as usize).rev() {
        let spectator = m_value(spectator_two_s, ks);
        let mut groups: Vec<(f64, f64, Vec<String>)> = Vec::new();
        for kd in (1..=driven_two_s as usize).rev() {
            let m = m_value(driven_two_s, kd);
            let freq = (energy(m + 1.0, spectator) - energy(m, spectator)).abs();
            let weight = ladder_weight(s, m);
            let label = format!("{}>{}", half_label(m), half_label(m + 1.0));
            match groups.iter_mut().find(|g| (g.0 - freq).abs() <= MERGE_TOL) {
                Some(g) => {
                    g.1 += weight;
                    g.2.push(label);
                }
                None => groups.push((freq, weight, vec![label])),
            }
        }
        for (freq, weight, labels) in groups {
            let tag = format!("{spectator_name}={}; {driven_name} {}", half_label(spectator), labels.join(" "));
            match lines.iter_mut().find(|l| (l.0 - freq).abs() <= MERGE_TOL) {
                Some(l) => {
                    l.1 += weight;
                    l.2.push(tag);
                }
                None => lines.push((freq, weight, vec![tag])),
            }
        }
    }

    let mut out: Vec<SpectralLine> = lines
        .into_iter()
        .map(|(frequency_mhz, intensity, tags)| SpectralLine {
            frequency_mhz,
            intensity,
            species: constants.species,
            kind,
            assignment: tags.join(" | "),
        })
        .collect();
    sort_lines(&mut out);
    Ok(out)
}

/// Signed transition energies E(m+1) − E(m), one per spectator level in
/// ascending spectator m, for the lowest driven transition. Line positions
/// are their absolute values; the signed values are evenly spaced by A even
/// when some of them are negative and fold over in the absolute spectrum.
pub fn signed_transitions(constants: &SpeciesConstants, field_tesla: f64, kind: SpectrumKind) -> Vec<f64> {
    let (driven_two_s, spectator_two_s) = match kind {
        SpectrumKind::Esr => (constants.electron_two_s, constants.nuclear_two_s),
        SpectrumKind::Nmr => (constants.nuclear_two_s, constants.electron_two_s),
    };
    let m = m_value(driven_two_s, driven_two_s as usize);
    (0..=spectator_two_s as usize)
        .rev()
        .map(|ks| {
            let spectator = m_value(spectator_two_s, ks);
            match kind {
                SpectrumKind::Esr => constants.energy(field_tesla, m + 1.0, spectator) - constants.energy(field_tesla, m, spectator),
                SpectrumKind::Nmr => constants.energy(field_tesla, spectator, m + 1.0) - constants.energy(field_tesla, spectator, m),
            }
        })
        .collect()
}

/// ESR followed by NMR lines of one species, sorted by frequency.
pub fn species_spectrum(constants: &SpeciesConstants, field_tesla: f64) -> Result<Vec<SpectralLine>> {
    let mut lines = transition_lines(constants, field_tesla, SpectrumKind::Esr)?;
    lines.extend(transition_lines(constants, field_tesla, SpectrumKind::Nmr)?);
    sort_lines(&mut lines);
    Ok(lines)
}

fn sort_lines(lines: &mut [SpectralLine]) {
    lines.sort_by(|a, b| a.frequency_mhz.total_cmp(&b.frequency_mhz));
}

pub const SPECTRUM_HEADER: [&str; 5] = ["frequency_mhz", "intensity", "species", "kind", "assignment"];

/// Writes lines as CSV, sorted by frequency ascending.
pub fn write_spectrum<W: Write>(writer: W, lines: &[SpectralLine]) -> Result<()> {
    let mut sorted = lines.to_vec();
    sort_lines(&mut sorted);
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SPECTRUM_HEADER)?;
    for l in &sorted {
        w.write_record([
            l.frequency_mhz.to_string(),
            l.intensity.to_string(),
            l.species.to_string(),
            l.kind.to_string(),
            l.assignment.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum<R: Read>(reader: R) -> Result<Vec<SpectralLine>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().ne(SPECTRUM_HEADER) {
        return Err(Error::Parse { line: 1, message: format!("unexpected header {header:?}") });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let num = |k: usize| {
            rec[k]
                .parse::<f64>()
                .map_err(|e| Error::Parse { line, message: format!("{}: {e}", SPECTRUM_HEADER[k]) })
        };
        out.push(SpectralLine {
            frequency_mhz: num(0)?,
            intensity: num(1)?,
            species: rec[2].parse()?,
            kind: rec[3].parse()?,
            assignment: rec[4].to_string(),
        });
    }
    Ok(out)
}
