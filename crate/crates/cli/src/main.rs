//! xvqe — the exciton-model MC-VQE pipeline on the command line.
//!
//! `synth` generates a deterministic ring/stack system file; `build`
//! validates one and summarizes the Hamiltonian; `cis`, `mcvqe`, and `fci`
//! each write a results JSON in the same schema; `spectrum` broadens a
//! results file into a plot-ready CSV; `compare` scores results files
//! against a reference (FCI when present).
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 malformed JSON, 5 validation or
//! size caps, 6 numerical failure.

mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use exciton_vqe::cis::{embed_cis_vector, solve_cis};
use exciton_vqe::entangler::Parametrization;
use exciton_vqe::exact::{fci_solve_with, FciOptions};
use exciton_vqe::io::{read_json, read_system, write_json, write_system, SystemFile};
use exciton_vqe::mcvqe::{transitions_from_states, McVqe, McVqeConfig, OptimizerKind};
use exciton_vqe::pauli::{build_dipole_operator, build_hamiltonian};
use exciton_vqe::simulator::StateVector;
use exciton_vqe::synth::{generate, AggregateKind, SynthSpec};
use exciton_vqe::{Error, Result};
use report::{
    broaden, compare_against, energy_grid, MethodResult, RunReport, SpectrumResult, StatesFile,
    Timings, TraceRow,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "xvqe", version, about = "Exciton-model MC-VQE pipeline")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, env = "XVQE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic J-ring or H-stack system file.
    Synth(SynthArgs),
    /// Validate a system file and print a Hamiltonian summary.
    Build(BuildArgs),
    /// Classical CIS reference: energies, strengths, populations.
    Cis(CisArgs),
    /// The full MC-VQE pipeline: optimize, assemble, diagonalize, report.
    Mcvqe(McVqeArgs),
    /// Exact diagonalization (dense or matrix-free Lanczos).
    Fci(FciArgs),
    /// Broaden a results file into an absorption spectrum CSV.
    Spectrum(SpectrumArgs),
    /// Score results files against a reference (FCI if present, else last).
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Ring,
    Stack,
}

#[derive(Args)]
struct SynthArgs {
    /// Aggregate archetype.
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Number of monomers (≥ 2).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Mean excitation gap (hartree); archetype default if omitted.
    #[arg(long)]
    mean_gap: Option<f64>,
    /// Uniform site-disorder half-width (hartree).
    #[arg(long)]
    gap_sigma: Option<f64>,
    /// Nearest-neighbor distance (bohr).
    #[arg(long)]
    spacing: Option<f64>,
    /// Transition-dipole magnitude (a.u.).
    #[arg(long)]
    mu_t: Option<f64>,
    /// Difference-dipole magnitude (a.u.).
    #[arg(long)]
    mu_d: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct CisArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Number of states to report (default: all N+1).
    #[arg(long)]
    states: Option<usize>,
    /// Also write raw eigenstate amplitudes to this sidecar file.
    #[arg(long)]
    store_states: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OptimizerArg {
    Lbfgs,
    Powell,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParametrizationArg {
    /// Six SO(4) Pauli rotation angles per block.
    Pauli,
    /// The six antisymmetric-generator components per block.
    Antisym,
    /// Ry/CNOT gate-native angles per block.
    Gate,
}

#[derive(Args)]
struct McVqeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Number of contracted states N_Θ (default: all N+1).
    #[arg(long)]
    states: Option<usize>,
    /// Entangler layers.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    /// Central finite-difference step Δθ (radians).
    #[arg(long, default_value_t = 0.01)]
    fd_step: f64,
    /// Convergence threshold on max |∂Ē/∂θ|.
    #[arg(long, default_value_t = 1e-7)]
    gtol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Lbfgs)]
    optimizer: OptimizerArg,
    #[arg(long, value_enum, default_value_t = ParametrizationArg::Pauli)]
    parametrization: ParametrizationArg,
    #[arg(long)]
    store_states: Option<PathBuf>,
}

#[derive(Args)]
struct FciArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Number of lowest states (default: N+1).
    #[arg(long)]
    states: Option<usize>,
    /// Sites above which the solver switches from dense to Lanczos.
    #[arg(long, default_value_t = 10)]
    dense_threshold: usize,
    /// Eigenpair residual tolerance (relative to the Hamiltonian scale).
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for the Lanczos start vector.
    #[arg(long, default_value_t = 0x00c0_ffee)]
    seed: u64,
    #[arg(long)]
    store_states: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// A results JSON produced by cis/mcvqe/fci.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output CSV (`energy_ev,intensity`).
    #[arg(long)]
    out: PathBuf,
    /// Lorentzian half-width at half-maximum (eV).
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Grid start (eV); default: lowest stick − 20δ.
    #[arg(long)]
    emin: Option<f64>,
    /// Grid end (eV); default: highest stick + 20δ.
    #[arg(long)]
    emax: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    points: usize,
    /// Also write the full SpectrumResult as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Two or more results files; the FCI one (or the last) is the reference.
    #[arg(long = "in", num_args = 2.., required = true)]
    input: Vec<PathBuf>,
    /// Write the RunReport here (printed to stdout regardless).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore the error if a pool already exists (tests, repeat calls).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = match cli.command {
        Command::Synth(args) => cmd_synth(args),
        Command::Build(args) => cmd_build(args),
        Command::Cis(args) => cmd_cis(args),
        Command::Mcvqe(args) => cmd_mcvqe(args),
        Command::Fci(args) => cmd_fci(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

/// Distinct exit code per failure class (see module docs).
fn error_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Json { .. } => 4,
        Error::InvalidInput(_) | Error::CapExceeded { .. } | Error::DegenerateGeometry { .. } => 5,
        Error::Precondition(_) | Error::NotConverged { .. } => 6,
    }
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let mut spec = match args.kind {
        KindArg::Ring => SynthSpec::ring_defaults(args.n, args.seed),
        KindArg::Stack => SynthSpec::stack_defaults(args.n, args.seed),
    };
    if let Some(v) = args.mean_gap {
        spec.mean_gap = v;
    }
    if let Some(v) = args.gap_sigma {
        spec.gap_sigma = v;
    }
    if let Some(v) = args.spacing {
        spec.spacing = v;
    }
    if let Some(v) = args.mu_t {
        spec.mu_t = v;
    }
    if let Some(v) = args.mu_d {
        spec.mu_d = v;
    }
    let (monomers, connectivity) = generate(&spec)?;
    let system = SystemFile::new(monomers, connectivity);
    write_system(&args.out, &system)?;
    let kind = match spec.kind {
        AggregateKind::Ring => "ring",
        AggregateKind::Stack => "stack",
    };
    println!(
        "wrote {} ({kind}, {} sites, seed {}, gap {:.4} ± {:.4} hartree)",
        args.out.display(),
        spec.n_sites,
        spec.seed,
        spec.mean_gap,
        spec.gap_sigma
    );
    Ok(())
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    let system = read_system(&args.input)?;
    let h = build_hamiltonian(&system.monomers, &system.connectivity)?;
    let terms = h.to_pauli_terms();
    let range = |vals: &[f64]| -> (f64, f64) {
        vals.iter().fold((f64::INFINITY, 0.0), |(lo, hi), &v| {
            (lo.min(v.abs()), hi.max(v.abs()))
        })
    };
    let (zlo, zhi) = range(&h.z);
    let (xlo, xhi) = range(&h.x);
    let pair_coeffs: Vec<f64> = h
        .pairs
        .iter()
        .flat_map(|p| [p.xx, p.xz, p.zx, p.zz])
        .collect();
    let (plo, phi) = range(&pair_coeffs);
    println!("system: {} sites, {:?} topology", h.n_sites, system.connectivity.topology);
    println!(
        "retained pairs: {} (neighbor order {})",
        h.pairs.len(),
        system.connectivity.neighbor_order
    );
    println!("pauli terms: {} (identity 𝓔 = {:.6} hartree)", terms.len(), h.e_scalar);
    println!("|𝓩| range: [{zlo:.3e}, {zhi:.3e}] hartree");
    println!("|𝓧| range: [{xlo:.3e}, {xhi:.3e}] hartree");
    println!("|pair| range: [{plo:.3e}, {phi:.3e}] hartree");
    Ok(())
}

/// states flag → a validated N_Θ.
fn resolve_states(requested: Option<usize>, n_sites: usize) -> Result<usize> {
    let k = requested.unwrap_or(n_sites + 1);
    if k == 0 || k > n_sites + 1 {
        return Err(Error::InvalidInput(format!(
            "--states must lie in 1..={}, got {k}",
            n_sites + 1
        )));
    }
    Ok(k)
}

fn write_states_sidecar(
    path: &Path,
    states: &[StateVector],
    result: &mut MethodResult,
) -> Result<()> {
    let file = StatesFile {
        n_qubits: states[0].n_qubits(),
        states: states.iter().map(|s| s.amplitudes().to_vec()).collect(),
    };
    write_json(path, &file)?;
    result.states_file = Some(path.display().to_string());
    Ok(())
}

fn cmd_cis(args: CisArgs) -> Result<()> {
    let t0 = Instant::now();
    let system = read_system(&args.input)?;
    let h = build_hamiltonian(&system.monomers, &system.connectivity)?;
    let dipole = build_dipole_operator(&system.monomers)?;
    let k = resolve_states(args.states, h.n_sites)?;
    let cis = solve_cis(&h)?;
    let states: Vec<StateVector> = (0..k)
        .map(|theta| embed_cis_vector(h.n_sites, &cis.column(theta)))
        .collect::<Result<_>>()?;
    let transitions = transitions_from_states(&cis.energies[..k], &states, &dipole)?;
    let mut result = MethodResult::from_transitions("cis", h.n_sites, &transitions);
    if let Some(path) = &args.store_states {
        write_states_sidecar(path, &states, &mut result)?;
    }
    result.timings.total_s = t0.elapsed().as_secs_f64();
    write_json(&args.out, &result)?;
    println!(
        "cis: {} states, E_0 = {:.8} hartree, wrote {}",
        k,
        result.energies_hartree[0],
        args.out.display()
    );
    Ok(())
}

fn cmd_mcvqe(args: McVqeArgs) -> Result<()> {
    let t0 = Instant::now();
    let system = read_system(&args.input)?;
    let config = McVqeConfig {
        n_states: args.states,
        fd_step: args.fd_step,
        gtol: args.gtol,
        max_iter: args.max_iter,
        optimizer: match args.optimizer {
            OptimizerArg::Lbfgs => OptimizerKind::Lbfgs,
            OptimizerArg::Powell => OptimizerKind::Powell,
        },
        n_layers: args.layers,
        parametrization: match args.parametrization {
            ParametrizationArg::Pauli => Parametrization::PauliAngles,
            ParametrizationArg::Antisym => Parametrization::Antisym,
            ParametrizationArg::Gate => Parametrization::GateNative,
        },
    };
    let vqe = McVqe::new(&system.monomers, &system.connectivity, config)?;
    let setup_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let (params, opt) = vqe.optimize_entangler()?;
    let optimize_s = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let run = vqe.run_at(&params, opt.trace.clone(), opt.outcome, opt.n_evals)?;
    let assemble_s = t2.elapsed().as_secs_f64();

    let mut result = MethodResult::from_transitions("mcvqe", vqe.hamiltonian().n_sites, &run.transitions);
    result.parameters = Some(params.values.clone());
    result.trace = Some(opt.trace.iter().map(TraceRow::from).collect());
    result.outcome = Some(format!("{:?}", run.outcome).to_lowercase());
    result.n_evals = Some(run.n_evals);
    if let Some(path) = &args.store_states {
        write_states_sidecar(path, &run.eigenstates, &mut result)?;
    }
    result.timings = Timings {
        setup_s,
        optimize_s,
        assemble_s,
        total_s: t0.elapsed().as_secs_f64(),
    };
    write_json(&args.out, &result)?;
    println!(
        "mcvqe: {} states, {} parameters, {} iterations ({}), Ē = {:.8} hartree, wrote {}",
        vqe.n_states(),
        params.values.len(),
        opt.trace.len().saturating_sub(1),
        result.outcome.as_deref().unwrap_or("?"),
        opt.value,
        args.out.display()
    );
    Ok(())
}

fn cmd_fci(args: FciArgs) -> Result<()> {
    let t0 = Instant::now();
    let system = read_system(&args.input)?;
    let h = build_hamiltonian(&system.monomers, &system.connectivity)?;
    let dipole = build_dipole_operator(&system.monomers)?;
    let k = resolve_states(args.states, h.n_sites)?;
    let opts = FciOptions {
        dense_threshold: args.dense_threshold,
        tol: args.tol,
        seed: args.seed,
        ..FciOptions::default()
    };
    let fci = fci_solve_with(&h, k, &opts)?;
    let transitions = transitions_from_states(&fci.energies, &fci.states, &dipole)?;
    let mut result = MethodResult::from_transitions("fci", h.n_sites, &transitions);
    result.residuals = Some(fci.residuals.clone());
    if let Some(path) = &args.store_states {
        write_states_sidecar(path, &fci.states, &mut result)?;
    }
    result.timings.total_s = t0.elapsed().as_secs_f64();
    write_json(&args.out, &result)?;
    println!(
        "fci: {} states, E_0 = {:.8} hartree, wrote {}",
        k,
        result.energies_hartree[0],
        args.out.display()
    );
    Ok(())
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<()> {
    let result: MethodResult = read_json(&args.input)?;
    if !(args.delta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "--delta must be positive, got {}",
            args.delta
        )));
    }
    let sticks: Vec<(f64, f64)> = (1..result.n_states)
        .map(|t| (result.excitations_ev[t], result.oscillator_strengths[t]))
        .collect();
    if sticks.is_empty() {
        return Err(Error::InvalidInput(
            "results file contains no excited states to broaden".into(),
        ));
    }
    let lo = sticks.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = sticks.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let emin = args.emin.unwrap_or(lo - 20.0 * args.delta);
    let emax = args.emax.unwrap_or(hi + 20.0 * args.delta);
    let grid = energy_grid(emin, emax, args.points)?;
    let intensity = broaden(&sticks, args.delta, &grid);

    let mut csv = String::from("energy_ev,intensity\n");
    for (e, i) in grid.iter().zip(&intensity) {
        csv.push_str(&format!("{e},{i}\n"));
    }
    std::fs::write(&args.out, csv).map_err(|source| Error::Io {
        path: args.out.display().to_string(),
        source,
    })?;
    if let Some(json_path) = &args.json {
        let spectrum = SpectrumResult {
            method: result.method.clone(),
            delta_ev: args.delta,
            transitions: sticks,
            grid_ev: grid,
            intensity,
        };
        write_json(json_path, &spectrum)?;
    }
    println!(
        "spectrum: {} points over [{emin:.4}, {emax:.4}] eV (δ = {} eV), wrote {}",
        args.points,
        args.delta,
        args.out.display()
    );
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    let results: Vec<MethodResult> = args
        .input
        .iter()
        .map(read_json)
        .collect::<Result<_>>()?;
    let reference_idx = results
        .iter()
        .position(|r| r.method == "fci")
        .unwrap_or(results.len() - 1);
    let load_states = |r: &MethodResult| -> Result<Option<StatesFile>> {
        r.states_file.as_deref().map(read_json).transpose()
    };
    let reference = &results[reference_idx];
    let reference_states = load_states(reference)?;
    let mut entries = Vec::new();
    for (i, candidate) in results.iter().enumerate() {
        if i == reference_idx {
            continue;
        }
        let candidate_states = load_states(candidate)?;
        entries.push(compare_against(
            reference,
            reference_states.as_ref(),
            candidate,
            candidate_states.as_ref(),
            &args.input[i].display().to_string(),
        ));
    }
    let report = RunReport {
        reference_method: reference.method.clone(),
        reference_path: args.input[reference_idx].display().to_string(),
        entries,
    };
    for e in &report.entries {
        let fid = e
            .min_fidelity
            .map(|f| format!(", min fidelity {f:.6}"))
            .unwrap_or_default();
        println!(
            "{} vs {}: max |ΔE| = {:.6e} eV, max |ΔO| = {:.6e}{fid}",
            e.method, report.reference_method, e.max_abs_energy_error_ev, e.max_osc_abs_error
        );
    }
    if let Some(out) = &args.out {
        write_json(out, &report)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
