//! `endoqca`: verification suites, spectra, QCA programs, pipeline runs and
//! timing reports.
//!
//! Exit status is 0 when every executed check passes, 1 on a verification
//! failure and 2 on a usage or configuration error.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use endo_qca::pipeline::{
    build_global_pulse_program, figure_of_merit, logical_gate_time_s, run_pipeline, CouplingMode, DurationModel, GateSpec,
    PipelineReport, GLOBAL_OPS_PER_LOGICAL_GATE, NOMINAL_COUPLING_INTERVALS,
};
use endo_qca::qca::{index_to_bits, parse_program, run_program, QcaState};
use endo_qca::spectra::{species_spectrum, write_spectrum};
use endo_qca::suite::{catalog_dump, run_suite, Suite};
use endo_qca::system::{pattern_string, Species};
use endo_qca::verify::write_reports;
use endo_qca::{ChainSpec, SpeciesConstants};

#[derive(Parser, Debug)]
#[command(name = "endoqca", version, about = "Nuclear-electron QCA simulator for endohedral fullerene chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run verification suites of the pulse-sequence library.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// CSV file for every branch report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// ESR and NMR stick spectrum of one species.
    Spectra {
        /// N for ¹⁵N@C60, P for ³¹P@C60.
        #[arg(long)]
        species: Species,
        #[arg(long, default_value_t = 2.0)]
        field_tesla: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Execute a QCA program on a chain of logical cells.
    QcaRun {
        /// Alternating pattern such as BABABA.
        #[arg(long)]
        chain: String,
        #[arg(long)]
        program: PathBuf,
        /// Initial basis bits, one per cell; defaults to all zero.
        #[arg(long)]
        init: Option<String>,
        /// CSV file of nonzero amplitudes.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate one physical global operation at pulse level.
    Pipeline {
        /// Number of sites in a B-first alternating chain.
        #[arg(long, conflicts_with = "chain_spec", required_unless_present = "chain_spec")]
        sites: Option<usize>,
        /// Chain specification file (key = value lines).
        #[arg(long)]
        chain_spec: Option<PathBuf>,
        #[arg(long)]
        f: u8,
        #[arg(long, default_value = "X")]
        gate: String,
        /// Replace the B coupling intervals by refocused blocks with this scaling factor.
        #[arg(long)]
        decouple: Option<u32>,
        #[arg(long, default_value_t = 1, requires = "decouple")]
        cycles: u32,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, default_value_t = 1.0)]
        t2_seconds: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Global-operation and logical-gate timing with the figure of merit.
    Timing {
        #[arg(long, default_value_t = 1.0)]
        t2_seconds: f64,
        #[arg(long, default_value_t = 50.0)]
        coupling_ns: f64,
        #[arg(long, default_value_t = 20.0)]
        electron_pulse_ns: f64,
    },
    /// Print the molecular constants at a given field.
    Constants {
        #[arg(long, default_value_t = 2.0)]
        field_tesla: f64,
    },
    /// List every library sequence with its notation and global phase.
    Catalog {
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

enum Failure {
    Usage(String),
    Check,
}

impl From<endo_qca::Error> for Failure {
    fn from(e: endo_qca::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn check(pass: bool) -> Outcome {
    if pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn positive(name: &str, v: f64) -> Outcome {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{name} must be positive, got {v}")))
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn verify(suite: Suite, tolerance: f64, out: Option<&Path>, format: Format) -> Outcome {
    positive("tolerance", tolerance)?;
    let cases = run_suite(suite, tolerance)?;
    let all: Vec<_> = cases.iter().flat_map(|c| c.reports.iter().cloned()).collect();
    match format {
        Format::Text => {
            for case in &cases {
                match case.canonical_report() {
                    Some(r) => println!("{r}"),
                    None => {
                        for r in &case.reports {
                            println!("{r}");
                        }
                    }
                }
            }
            let passed = cases.iter().filter(|c| c.pass()).count();
            println!("{passed}/{} cases pass", cases.len());
        }
        Format::Csv => write_reports(io::stdout().lock(), &all)?,
    }
    if let Some(path) = out {
        write_reports(create(path)?, &all)?;
    }
    check(cases.iter().all(|c| c.pass()))
}

fn spectra(species: Species, field_tesla: f64, out: Option<&Path>) -> Outcome {
    let lines = species_spectrum(&species.constants(), field_tesla)?;
    for l in &lines {
        println!("{:<3} {:>16.6} MHz  intensity {:>4}  {}", l.kind, l.frequency_mhz, l.intensity, l.assignment);
    }
    if let Some(path) = out {
        write_spectrum(create(path)?, &lines)?;
    }
    Ok(())
}

fn qca_run(chain: &str, program: &Path, init: Option<&str>, out: Option<&Path>) -> Outcome {
    let text = fs::read_to_string(program).map_err(|e| Failure::Usage(format!("{}: {e}", program.display())))?;
    let program = parse_program(&text)?;
    let bits = match init {
        Some(b) => b.to_string(),
        None => "0".repeat(chain.trim().len()),
    };
    let start = QcaState::parse(chain, &bits)?;
    let end = run_program(&start, &program);
    println!("initial: {start}");
    println!("final:   {end}");
    if let Some(path) = out {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["index", "bits", "re", "im"])?;
        for (idx, a) in end.amplitudes().iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            let bits: String = index_to_bits(idx, end.n_cells()).iter().map(|b| char::from(b'0' + b)).collect();
            w.write_record([idx.to_string(), bits, a.re.to_string(), a.im.to_string()])?;
        }
        w.flush()?;
    }
    Ok(())
}

fn write_pipeline_csv(path: &Path, pattern: &str, r: &PipelineReport) -> Outcome {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record([
        "pattern",
        "f",
        "gate",
        "fidelity",
        "bus_overlap",
        "tag_overlap",
        "duration_ns",
        "coupling_intervals",
        "figure_of_merit",
    ])?;
    w.write_record([
        pattern.to_string(),
        r.f.to_string(),
        r.gate.clone(),
        r.fidelity.to_string(),
        r.bus_overlap.to_string(),
        r.tag_overlap.to_string(),
        r.duration_ns.to_string(),
        r.coupling_intervals.to_string(),
        r.figure_of_merit.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn pipeline(
    sites: Option<usize>,
    chain_spec: Option<&Path>,
    f: u8,
    gate: &str,
    decouple: Option<u32>,
    cycles: u32,
    tolerance: f64,
    t2_seconds: f64,
    out: Option<&Path>,
) -> Outcome {
    positive("tolerance", tolerance)?;
    positive("t2-seconds", t2_seconds)?;
    let spec = match (sites, chain_spec) {
        (_, Some(path)) => {
            ChainSpec::parse(&fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?)?
        }
        (Some(n), None) => {
            if n == 0 {
                return Err(Failure::Usage("sites must be at least 1".into()));
            }
            let pattern: String = (0..n).map(|k| if k % 2 == 0 { 'B' } else { 'A' }).collect();
            ChainSpec::new(&pattern)?
        }
        (None, None) => return Err(Failure::Usage("give --sites or --chain-spec".into())),
    };
    let gate = GateSpec::parse(gate)?;
    let mode = match decouple {
        Some(m) => CouplingMode::Decoupled { m, cycles },
        None => CouplingMode::Ideal,
    };
    let model = DurationModel { t2_seconds, ..DurationModel::default() };
    let program = build_global_pulse_program(f, &gate, &spec, mode)?;
    let report = run_pipeline(&program, &spec, &model)?;
    let pattern = pattern_string(&spec.pattern);
    println!("chain {pattern}");
    println!("{report}");
    if let Some(path) = out {
        write_pipeline_csv(path, &pattern, &report)?;
    }
    check(1.0 - report.fidelity < tolerance && 1.0 - report.bus_overlap < tolerance && 1.0 - report.tag_overlap < tolerance)
}

fn timing(t2_seconds: f64, coupling_ns: f64, electron_pulse_ns: f64) -> Outcome {
    positive("t2-seconds", t2_seconds)?;
    let model = DurationModel {
        coupling_interval_ns: coupling_ns,
        selective_electron_pulse_ns: electron_pulse_ns,
        t2_seconds,
        ..DurationModel::default()
    };
    model.validate()?;
    let spec = ChainSpec::new("BAB")?;
    let program = build_global_pulse_program(1, &GateSpec::parse("X")?, &spec, CouplingMode::Ideal)?;
    let couplings = program.coupling_intervals;
    let coupling_only_ns = couplings as f64 * coupling_ns;
    let full_ns = endo_qca::pipeline::sequence_duration(&program.sequence(), &model);

    println!("global operation (f=1, U=X):");
    println!("  coupling intervals      {couplings} (nominal {NOMINAL_COUPLING_INTERVALS})");
    println!("  coupling time           {:.3} us", coupling_only_ns * 1e-3);
    println!("  with selective pulses   {:.3} us", full_ns * 1e-3);
    println!("logical gate ({GLOBAL_OPS_PER_LOGICAL_GATE} global operations):");
    for (label, ns) in [("coupling time", coupling_only_ns), ("with selective pulses", full_ns)] {
        let gate_s = logical_gate_time_s(ns);
        println!(
            "  {label:<22}  {:.2} us  figure of merit {}",
            gate_s * 1e6,
            figure_of_merit(gate_s, t2_seconds)?
        );
    }
    println!("  nominal 1 us operation  30.00 us  figure of merit {}", figure_of_merit(30e-6, t2_seconds)?);
    Ok(())
}

fn fmt_energy(mhz: f64) -> String {
    let s = |v: f64| {
        let t = format!("{v:.3}");
        t.trim_end_matches('0').trim_end_matches('.').to_string()
    };
    if mhz.abs() >= 1000.0 {
        format!("{}GHz", s(mhz / 1000.0))
    } else {
        format!("{}MHz", s(mhz))
    }
}

fn constants(field_tesla: f64) -> Outcome {
    positive("field-tesla", field_tesla)?;
    let a = SpeciesConstants::nitrogen();
    let b = SpeciesConstants::phosphorus();
    let mut out = io::stdout().lock();
    writeln!(out, "{:<28} {:<10} {:>12} {:>12}", format!("B_z={field_tesla}T"), "", format!("A={}", a.name), format!("B={}", b.name))?;
    let rows: [(&str, &str, fn(&SpeciesConstants, f64) -> f64); 3] = [
        ("Electronic Zeeman Energy", "g_e mu_e B", |c, f| c.electron_zeeman(f)),
        ("Nuclear Zeeman Energy", "g_N mu_N B", |c, f| c.nuclear_zeeman(f)),
        ("Hyperfine Coupling Constant", "A", |c, _| c.hyperfine),
    ];
    for (name, symbol, value) in rows {
        writeln!(
            out,
            "{name:<28} {symbol:<10} {:>12} {:>12}",
            fmt_energy(value(&a, field_tesla)),
            fmt_energy(value(&b, field_tesla))
        )?;
    }
    Ok(())
}

fn catalog(tolerance: f64) -> Outcome {
    positive("tolerance", tolerance)?;
    print!("{}", catalog_dump(tolerance)?);
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Verify { suite, tolerance, out, format } => verify(suite, tolerance, out.as_deref(), format),
        Command::Spectra { species, field_tesla, out } => spectra(species, field_tesla, out.as_deref()),
        Command::QcaRun { chain, program, init, out } => qca_run(&chain, &program, init.as_deref(), out.as_deref()),
        Command::Pipeline { sites, chain_spec, f, gate, decouple, cycles, tolerance, t2_seconds, out } => pipeline(
            sites,
            chain_spec.as_deref(),
            f,
            &gate,
            decouple,
            cycles,
            tolerance,
            t2_seconds,
            out.as_deref(),
        ),
        Command::Timing { t2_seconds, coupling_ns, electron_pulse_ns } => timing(t2_seconds, coupling_ns, electron_pulse_ns),
        Command::Constants { field_tesla } => constants(field_tesla),
        Command::Catalog { tolerance } => catalog(tolerance),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors and 0 for --help
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
