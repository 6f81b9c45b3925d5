use endo_qca::spectra::{
    read_spectrum, signed_transitions, species_spectrum, transition_lines, write_spectrum, SpectrumKind, SPECTRUM_HEADER,
};
use endo_qca::SpeciesConstants;
use proptest::prelude::*;

/// Energy of one molecule with the constants written out by hand.
fn energy(a: bool, field: f64, ms: f64, mi: f64) -> f64 {
    let (gamma_n, hyperfine) = if a { (-3.05, 21.2) } else { (17.25, 138.4) };
    28_000.0 * field * ms - gamma_n * field * mi + hyperfine * ms * mi
}

/// All allowed transition frequencies of the driven spin, unmerged.
fn oracle_frequencies(a: bool, field: f64, kind: SpectrumKind) -> Vec<f64> {
    let ms = [-1.5, -0.5, 0.5];
    let mi = [-0.5, 0.5];
    let mut out = Vec::new();
    match kind {
        SpectrumKind::Esr => {
            for &i in &mi {
                for &s in &ms {
                    out.push((energy(a, field, s + 1.0, i) - energy(a, field, s, i)).abs());
                }
            }
        }
        SpectrumKind::Nmr => {
            for s in [-1.5, -0.5, 0.5, 1.5] {
                out.push((energy(a, field, s, 0.5) - energy(a, field, s, -0.5)).abs());
            }
        }
    }
    out
}

fn constants(a: bool) -> SpeciesConstants {
    if a {
        SpeciesConstants::nitrogen()
    } else {
        SpeciesConstants::phosphorus()
    }
}

proptest! {
    #[test]
    fn lines_sit_at_energy_differences(a in any::<bool>(), field in 0.05f64..10.0, esr in any::<bool>()) {
        let kind = if esr { SpectrumKind::Esr } else { SpectrumKind::Nmr };
        let lines = transition_lines(&constants(a), field, kind).unwrap();
        let expected = oracle_frequencies(a, field, kind);
        for f in &expected {
            prop_assert!(lines.iter().any(|l| (l.frequency_mhz - f).abs() < 1e-6));
        }
        for l in &lines {
            prop_assert!(expected.iter().any(|f| (l.frequency_mhz - f).abs() < 1e-6));
        }
        // merging conserves the total transition weight
        let total: f64 = lines.iter().map(|l| l.intensity).sum();
        let per_spectator = if esr { 3.0 + 4.0 + 3.0 } else { 1.0 };
        let spectators = if esr { 2.0 } else { 4.0 };
        prop_assert!((total - per_spectator * spectators).abs() < 1e-9);
    }

    #[test]
    fn signed_lines_are_spaced_by_the_hyperfine_constant(a in any::<bool>(), field in 0.05f64..10.0, esr in any::<bool>()) {
        let kind = if esr { SpectrumKind::Esr } else { SpectrumKind::Nmr };
        let c = constants(a);
        let signed = signed_transitions(&c, field, kind);
        for w in signed.windows(2) {
            prop_assert!((w[1] - w[0] - c.hyperfine).abs() < 1e-6);
        }
    }

    #[test]
    fn csv_round_trip(a in any::<bool>(), field in 0.05f64..10.0) {
        let lines = species_spectrum(&constants(a), field).unwrap();
        let mut buf = Vec::new();
        write_spectrum(&mut buf, &lines).unwrap();
        let back = read_spectrum(buf.as_slice()).unwrap();
        prop_assert_eq!(back.len(), lines.len());
        for (x, y) in lines.iter().zip(&back) {
            prop_assert!((x.frequency_mhz - y.frequency_mhz).abs() < 1e-9);
            prop_assert!((x.intensity - y.intensity).abs() < 1e-9);
            prop_assert_eq!(&x.assignment, &y.assignment);
            prop_assert_eq!(x.kind, y.kind);
        }
    }
}

#[test]
fn nitrogen_esr_at_two_tesla() {
    let lines = transition_lines(&SpeciesConstants::nitrogen(), 2.0, SpectrumKind::Esr).unwrap();
    assert_eq!(lines.len(), 2);
    assert!((lines[0].frequency_mhz - 55_989.4).abs() < 1e-6);
    assert!((lines[1].frequency_mhz - 56_010.6).abs() < 1e-6);
    assert!(lines.iter().all(|l| (l.intensity - 10.0).abs() < 1e-12));

    let mut buf = Vec::new();
    write_spectrum(&mut buf, &lines).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 3);
}

#[test]
fn header_only_file_is_empty_spectrum() {
    let mut buf = Vec::new();
    write_spectrum(&mut buf, &[]).unwrap();
    assert_eq!(String::from_utf8(buf.clone()).unwrap().trim(), SPECTRUM_HEADER.join(","));
    assert!(read_spectrum(buf.as_slice()).unwrap().is_empty());
    assert!(read_spectrum("a,b\n1,2\n".as_bytes()).is_err());
}

#[test]
fn bad_field_is_rejected() {
    assert!(transition_lines(&SpeciesConstants::nitrogen(), 0.0, SpectrumKind::Nmr).is_err());
    assert!(species_spectrum(&SpeciesConstants::phosphorus(), f64::NAN).is_err());
}
