//! Command-line front end: reproduce the correlation and spectrum
//! experiments, compile and verify pulse sequences, and inspect the
//! fermion-to-spin mapping.

mod io;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;

use fanosim::nmr::{
    budget_check, compile, embed_circuit, optimize_delays, verify, CompileOptions, Molecule,
    PulseSequence, PulseSimOptions, Refocusing,
};
use fanosim::sim::DEFAULT_NOISE_SEED;
use fanosim::{
    dft, find_peaks, jw_map, jw_state, one_particle_spectrum, oracle_g, run, Circuit,
    ExperimentResult, FermionOp, ModelParams, NoiseSpec, OccupationState, PhaseConvention,
    PulseLevelConfig, RunMode, Spectrum, StateVector, TimeGrid,
};

#[derive(Parser)]
#[command(
    name = "fanosim",
    version,
    about = "Fano-Anderson impurity model on a simulated NMR quantum processor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure the dynamical correlation G(t) over a time grid.
    Correlation(ExperimentArgs),
    /// Measure S(t), Fourier-transform it and report the eigenvalue peaks.
    Spectrum(SpectrumArgs),
    /// Compile a circuit file to a timed pulse sequence.
    Compile(CompileArgs),
    /// Compile a circuit and verify it at the pulse level.
    Verify(VerifyArgs),
    /// Print Jordan-Wigner mappings of mode operators and occupations.
    Jw(JwArgs),
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    /// TOML config file; command-line flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Impurity energy ε.
    #[arg(long)]
    eps: Option<f64>,
    /// Mode energy ε_k0.
    #[arg(long = "eps-k0")]
    eps_k0: Option<f64>,
    /// Impurity-mode coupling V.
    #[arg(long)]
    v: Option<f64>,
    /// First grid point.
    #[arg(long = "t-start")]
    t_start: Option<f64>,
    /// Grid increment Δt.
    #[arg(long)]
    dt: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    steps: Option<usize>,
    /// Execution mode: "ideal" or "pulse".
    #[arg(long)]
    mode: Option<String>,
    /// Molecule description (TOML), required in pulse mode.
    #[arg(long)]
    molecule: Option<PathBuf>,
    /// Gaussian noise standard deviation per measured point.
    #[arg(long = "noise-std")]
    noise_std: Option<f64>,
    /// Noise seed; defaults to the documented reference seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Signal CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit a static SVG plot of the signal.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write exact-diagonalization oracle values instead of running the
    /// circuit pipeline (same CSV schema).
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: ExperimentArgs,
    /// Spectrum CSV output path.
    #[arg(long = "out-spectrum")]
    out_spectrum: Option<PathBuf>,
    /// Emit a static SVG plot of the spectrum.
    #[arg(long = "svg-spectrum")]
    svg_spectrum: Option<PathBuf>,
    /// Number of peaks to report.
    #[arg(long, default_value_t = 2)]
    peaks: usize,
}

#[derive(Args)]
struct CompileArgs {
    /// Circuit file (line-oriented gate format).
    #[arg(long)]
    circuit: PathBuf,
    /// Molecule description (TOML).
    #[arg(long)]
    molecule: PathBuf,
    /// Pulse sequence output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the delay optimizer after compiling.
    #[arg(long)]
    optimize: bool,
    /// RF pulse duration in seconds.
    #[arg(long = "pulse-duration", default_value_t = 1e-3)]
    pulse_duration: f64,
    /// Refocusing scheme: "full" or "target-only".
    #[arg(long, default_value = "full")]
    refocusing: String,
    /// Extra slack per delay segment in seconds.
    #[arg(long, default_value_t = 0.0)]
    padding: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    compile: CompileArgs,
    /// Initial register state as a basis index; defaults to the network
    /// initial state when the molecule carries the full role map, else
    /// |0...0⟩.
    #[arg(long)]
    init: Option<usize>,
}

#[derive(Args)]
struct JwArgs {
    /// Mode operator: "b", "bdag", "c" or "cdag".
    #[arg(long)]
    op: Option<String>,
    /// Conduction-mode index l for c/cdag (mode k_l).
    #[arg(long, default_value_t = 0)]
    k: usize,
    /// Total number of fermionic modes (impurity + ring modes).
    #[arg(long, default_value_t = 2)]
    modes: usize,
    /// Occupied modes, comma-separated (e.g. "1,2,4"), to map a state.
    #[arg(long)]
    occupation: Option<String>,
}

/// Keys of the experiment config file; flags override every one of them.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    eps: Option<f64>,
    eps_k0: Option<f64>,
    v: Option<f64>,
    t_start: Option<f64>,
    dt: Option<f64>,
    steps: Option<usize>,
    mode: Option<String>,
    molecule: Option<PathBuf>,
    noise_std: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
}

struct ResolvedExperiment {
    params: ModelParams,
    grid: TimeGrid,
    mode: RunMode,
    noise_std: f64,
    seed: u64,
    seed_was_explicit: bool,
    out: PathBuf,
    svg: Option<PathBuf>,
    oracle: bool,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = io::read_to_string(p)?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

struct ExperimentDefaults {
    eps: f64,
    eps_k0: f64,
    v: f64,
    t_start: f64,
    dt: f64,
    steps: usize,
    noise_std: f64,
    out: &'static str,
}

const CORRELATION_DEFAULTS: ExperimentDefaults = ExperimentDefaults {
    eps: -8.0,
    eps_k0: -2.0,
    v: 4.0,
    t_start: 0.1,
    dt: 0.1,
    steps: 15,
    noise_std: 0.0,
    out: "correlation.csv",
};

const SPECTRUM_DEFAULTS: ExperimentDefaults = ExperimentDefaults {
    eps: -8.0,
    eps_k0: -2.0,
    v: 0.5,
    t_start: 0.1,
    dt: 0.1,
    steps: 128,
    noise_std: 0.04,
    out: "spectrum_signal.csv",
};

fn resolve(args: &ExperimentArgs, defaults: &ExperimentDefaults) -> Result<ResolvedExperiment> {
    let file = load_file_config(args.config.as_deref())?;
    let eps = args.eps.or(file.eps).unwrap_or(defaults.eps);
    let eps_k0 = args.eps_k0.or(file.eps_k0).unwrap_or(defaults.eps_k0);
    let v = args.v.or(file.v).unwrap_or(defaults.v);
    let t_start = args.t_start.or(file.t_start).unwrap_or(defaults.t_start);
    let dt = args.dt.or(file.dt).unwrap_or(defaults.dt);
    let steps = args.steps.or(file.steps).unwrap_or(defaults.steps);
    if !(dt > 0.0) {
        bail!("time grid requires dt > 0, got {dt}");
    }
    let params = ModelParams::single_mode(eps, eps_k0, v);
    let grid = TimeGrid::new(t_start, dt, steps)?;

    let mode_name = args
        .mode
        .clone()
        .or(file.mode.clone())
        .unwrap_or_else(|| "ideal".to_string());
    let molecule_path = args.molecule.clone().or(file.molecule.clone());
    let mode = match mode_name.as_str() {
        "ideal" => RunMode::Ideal,
        "pulse" => {
            let path = molecule_path
                .as_deref()
                .context("pulse mode requires --molecule")?;
            let molecule = Molecule::from_toml(&io::read_to_string(path)?)
                .with_context(|| format!("parsing molecule {}", path.display()))?;
            RunMode::PulseLevel(Box::new(PulseLevelConfig::new(molecule)))
        }
        other => bail!("unknown mode {other:?} (expected \"ideal\" or \"pulse\")"),
    };

    let noise_std = args
        .noise_std
        .or(file.noise_std)
        .unwrap_or(defaults.noise_std);
    if noise_std < 0.0 {
        bail!("noise standard deviation must be nonnegative, got {noise_std}");
    }
    let seed_was_explicit = args.seed.or(file.seed).is_some();
    let seed = args.seed.or(file.seed).unwrap_or(DEFAULT_NOISE_SEED);

    Ok(ResolvedExperiment {
        params,
        grid,
        mode,
        noise_std,
        seed,
        seed_was_explicit,
        out: args
            .out
            .clone()
            .or(file.out)
            .unwrap_or_else(|| PathBuf::from(defaults.out)),
        svg: args.svg.clone().or(file.svg),
        oracle: args.oracle,
    })
}

fn oracle_series(
    grid: &TimeGrid,
    value: impl Fn(f64) -> Result<Complex64>,
) -> Result<ExperimentResult> {
    let mut points = Vec::new();
    for t in grid.points() {
        points.push(fanosim::ExperimentPoint {
            t,
            value: value(t)?,
            std_re: 0.0,
            std_im: 0.0,
        });
    }
    Ok(ExperimentResult {
        points,
        mode: "ideal".to_string(),
    })
}

fn cmd_correlation(args: &ExperimentArgs) -> Result<()> {
    let cfg = resolve(args, &CORRELATION_DEFAULTS)?;
    if cfg.noise_std > 0.0 {
        bail!("noise injection is only supported by the spectrum experiment");
    }
    let result = if cfg.oracle {
        oracle_series(&cfg.grid, |t| Ok(oracle_g(&cfg.params, t)?))?
    } else {
        fanosim::run_correlation_experiment(&cfg.params, &cfg.grid, &cfg.mode)?
    };
    io::write_atomic(&cfg.out, &result.to_csv())?;
    if let Some(svg) = &cfg.svg {
        io::write_atomic(svg, &fanosim::plot::signal_svg(&result, "G(t)"))?;
    }
    println!(
        "correlation: {} points ({}) -> {}",
        result.points.len(),
        result.mode,
        cfg.out.display()
    );
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<()> {
    let cfg = resolve(&args.common, &SPECTRUM_DEFAULTS)?;
    let convention = PhaseConvention::EigenvalueConsistent;
    let result = if cfg.oracle {
        oracle_series(&cfg.grid, |t| {
            Ok(fanosim::oracle_s(&cfg.params, t, convention)?)
        })?
    } else {
        let noise = if cfg.noise_std > 0.0 {
            if !cfg.seed_was_explicit {
                eprintln!("note: no --seed given, using default seed {}", cfg.seed);
            }
            Some(NoiseSpec {
                std: cfg.noise_std,
                seed: cfg.seed,
            })
        } else {
            None
        };
        fanosim::run_spectrum_experiment(
            &cfg.params,
            &cfg.grid,
            &cfg.mode,
            noise.as_ref(),
            convention,
        )?
    };
    io::write_atomic(&cfg.out, &result.to_csv())?;

    let spectrum: Spectrum = dft(&result)?;
    let out_spectrum = args
        .out_spectrum
        .clone()
        .unwrap_or_else(|| PathBuf::from("spectrum.csv"));
    io::write_atomic(&out_spectrum, &spectrum.to_csv())?;

    let one_particle = one_particle_spectrum(&cfg.params);
    let nyquist = spectrum.nyquist_limit();
    for mu in one_particle.frequencies {
        if mu.abs() >= nyquist {
            eprintln!(
                "warning: eigenvalue {mu:.4} exceeds the Nyquist bound {nyquist:.4} for dt = {}",
                cfg.grid.dt
            );
        }
    }

    let report = find_peaks(&spectrum, args.peaks);
    if report.truncated {
        eprintln!(
            "note: only {} local maxima exist, {} requested",
            report.peaks.len(),
            args.peaks
        );
    }
    println!(
        "spectrum: {} points ({}) -> {}, bins -> {}",
        result.points.len(),
        result.mode,
        cfg.out.display(),
        out_spectrum.display()
    );
    for (k, peak) in report.peaks.iter().enumerate() {
        println!(
            "peak {}: frequency {:+.4} +/- {:.4}, weight {:.4}",
            k + 1,
            peak.frequency,
            peak.resolution,
            peak.weight
        );
    }

    if let Some(svg) = &cfg.svg {
        io::write_atomic(svg, &fanosim::plot::signal_svg(&result, "S(t)"))?;
    }
    if let Some(svg) = &args.svg_spectrum {
        io::write_atomic(
            svg,
            &fanosim::plot::spectrum_svg(&spectrum, Some(&report), "DFT of S(t)"),
        )?;
    }
    Ok(())
}

fn compile_from_args(args: &CompileArgs) -> Result<(Circuit, Molecule, PulseSequence)> {
    let circuit = Circuit::from_text(&io::read_to_string(&args.circuit)?)
        .with_context(|| format!("parsing circuit {}", args.circuit.display()))?;
    let molecule = Molecule::from_toml(&io::read_to_string(&args.molecule)?)
        .with_context(|| format!("parsing molecule {}", args.molecule.display()))?;
    let refocusing = match args.refocusing.as_str() {
        "full" => Refocusing::FullDecoupling,
        "target-only" => Refocusing::TargetPairOnly,
        other => bail!("unknown refocusing scheme {other:?}"),
    };
    let opts = CompileOptions {
        pulse_duration: args.pulse_duration,
        refocusing,
        block_padding: args.padding,
    };
    let mut seq = compile(&circuit, &molecule, &opts)?;
    if args.optimize {
        let (optimized, report) = optimize_delays(&seq, &molecule);
        println!(
            "delay optimization: objective {:.6e} -> {:.6e}",
            report.objective_before, report.objective_after
        );
        seq = optimized;
    }
    Ok((circuit, molecule, seq))
}

fn print_budget(seq: &PulseSequence, molecule: &Molecule) {
    let report = budget_check(seq, molecule);
    println!(
        "budget: {} pulses, {} Ising blocks, duration {:.4} s (min T2* {:.2} s), residual objective {:.3e}",
        report.pulse_count,
        report.ising_blocks,
        report.total_duration,
        report.min_t2,
        seq.residual_coupling_error
    );
    for warning in &report.warnings {
        println!("budget warning: {warning}");
    }
}

fn cmd_compile(args: &CompileArgs) -> Result<()> {
    let (_, molecule, seq) = compile_from_args(args)?;
    match &args.out {
        Some(path) => {
            io::write_atomic(path, &seq.to_text())?;
            println!("sequence -> {}", path.display());
        }
        None => print!("{}", seq.to_text()),
    }
    print_budget(&seq, &molecule);
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let (circuit, molecule, seq) = compile_from_args(&args.compile)?;
    let init = match args.init {
        Some(index) => {
            let dim = 1usize << molecule.n_spins();
            if index >= dim {
                bail!(
                    "init index {index} out of range for {} spins",
                    molecule.n_spins()
                );
            }
            StateVector::basis(molecule.n_spins(), index)
        }
        None => molecule
            .network_initial_state()
            .map(|(state, _)| state)
            .unwrap_or_else(|_| StateVector::basis(molecule.n_spins(), 0)),
    };
    let ideal = run(&embed_circuit(&circuit, &molecule)?, &init)?;
    let outcome = verify(&seq, &molecule, &init, &ideal, &PulseSimOptions::default())?;
    println!("fidelity: {:.12}", outcome.fidelity);
    print_budget(&seq, &molecule);
    Ok(())
}

fn format_ladder(op: FermionOp) -> String {
    let sign = if op.mode % 2 == 0 { "" } else { "-" };
    let mut string = String::new();
    for q in 1..=op.mode {
        string.push_str(&format!("sigma_z^{q} "));
    }
    let ladder = match op.kind {
        fanosim::OpKind::Create => "sigma+",
        fanosim::OpKind::Annihilate => "sigma-",
    };
    format!("{sign}{string}{ladder}^{}", op.mode + 1)
}

fn cmd_jw(args: &JwArgs) -> Result<()> {
    if args.modes == 0 {
        bail!("--modes must be at least 1");
    }
    let mut did_something = false;
    if let Some(op_name) = &args.op {
        let op = match op_name.as_str() {
            "b" => FermionOp::annihilate(0),
            "bdag" => FermionOp::create(0),
            "c" => FermionOp::annihilate(args.k + 1),
            "cdag" => FermionOp::create(args.k + 1),
            other => bail!("unknown operator {other:?} (expected b, bdag, c or cdag)"),
        };
        let mapped = jw_map(op, args.modes)?;
        let name = match (op_name.as_str(), args.k) {
            ("b", _) => "b".to_string(),
            ("bdag", _) => "b+".to_string(),
            ("c", k) => format!("c_k{k}"),
            ("cdag", k) => format!("c+_k{k}"),
            _ => unreachable!(),
        };
        println!("{name} = {}", format_ladder(op));
        println!("expanded (qubits 0-indexed): {mapped}");
        did_something = true;
    }
    if let Some(list) = &args.occupation {
        let modes: Vec<usize> = if list.trim().is_empty() {
            Vec::new()
        } else {
            list.split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .context("parsing --occupation")?
        };
        let occ = OccupationState::new(modes, args.modes)?;
        let (index, sign) = jw_state(&occ);
        let bits: String = (0..args.modes)
            .map(|q| {
                if index & (1 << (args.modes - 1 - q)) != 0 {
                    '1'
                } else {
                    '0'
                }
            })
            .collect();
        let sign_str = if sign >= 0.0 { "+" } else { "-" };
        println!(
            "occupation {:?} -> {sign_str}|{bits}> (basis index {index})",
            occ.occupied()
        );
        did_something = true;
    }
    if !did_something {
        bail!("nothing to do: pass --op and/or --occupation");
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Correlation(args) => cmd_correlation(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Compile(args) => cmd_compile(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Jw(args) => cmd_jw(args),
    }
}
