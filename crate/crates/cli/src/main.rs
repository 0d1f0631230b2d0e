use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sparsto::ansatz::{
    grid_optimize_with, kkt_verify, AnsatzKind, GridSpec, KktReport, OptimizationReport,
};
use sparsto::bounds::{
    commutator_refined_eps2, complete_bound, parse_probabilities, qdrift_bound,
    randomized_trotter_bound, serialize_probabilities, simplified_bound, trotter1_bound,
    HamiltonianOrder,
};
use sparsto::channel::{empirical_error, SimulationMode};
use sparsto::hamiltonian::{
    parse_hamiltonian, serialize_hamiltonian, sort_terms_desc, synth_power_law,
};
use sparsto::schedule::{compile_qdrift, compile_sparsto, compile_trotter1, write_schedule};
use sparsto::sweep::{gate_grid, sweep, sweep_csv, trotter1_gates};
use sparsto::{Error, HamiltonianSpec, ProbabilityAssignment};

#[derive(Parser)]
#[command(
    name = "sparsto",
    version,
    about = "Stochastic Hamiltonian sparsification for randomized Trotter circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an error bound.
    Bounds(BoundsArgs),
    /// Grid-search the sparsification probabilities.
    Optimize(OptimizeArgs),
    /// Compare bounds over a range of gate budgets (CSV).
    Sweep(SweepArgs),
    /// Emit a gate schedule.
    Compile(CompileArgs),
    /// Measure channel error by dense simulation.
    Simulate(SimulateArgs),
    /// Write a synthetic power-law Hamiltonian.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Sparsto,
    Qdrift,
    Trotter1,
    R1otrott,
}

#[derive(Clone, Copy, ValueEnum)]
enum Ansatz {
    Linear,
    Uniform,
}

impl From<Ansatz> for AnsatzKind {
    fn from(a: Ansatz) -> Self {
        match a {
            Ansatz::Linear => AnsatzKind::Linear,
            Ansatz::Uniform => AnsatzKind::Uniform,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Complete,
    Simplified,
    Commutator,
}

#[derive(Args)]
struct Common {
    /// Hamiltonian file (hamiltonian-terms-v1).
    #[arg(long)]
    hamiltonian: PathBuf,
    /// Evolution time.
    #[arg(long = "time")]
    t: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// Active fractions |A|/L of the grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    active_fractions: Option<Vec<f64>>,
    /// μ′ values of the grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    mu_primes: Option<Vec<f64>>,
}

impl GridArgs {
    fn grid(&self) -> GridSpec {
        let default = GridSpec::default();
        GridSpec {
            active_fractions: self
                .active_fractions
                .clone()
                .unwrap_or(default.active_fractions),
            mu_primes: self.mu_primes.clone().unwrap_or(default.mu_primes),
        }
    }
}

#[derive(Args)]
struct ProbabilityArgs {
    /// Probability file (probabilities-v1). When omitted the grid optimum is used.
    #[arg(long)]
    probabilities: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "linear")]
    ansatz: Ansatz,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    gates: f64,
    #[arg(long, value_enum, default_value = "sparsto")]
    method: Method,
    /// Bound used for the sparsified method.
    #[arg(long, value_enum, default_value = "complete")]
    variant: Variant,
    #[command(flatten)]
    probs: ProbabilityArgs,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    gates: f64,
    #[arg(long, value_enum, default_value = "linear")]
    ansatz: Ansatz,
    #[command(flatten)]
    grid: GridArgs,
    /// Also write the grid records as CSV.
    #[arg(long)]
    grid_csv: Option<PathBuf>,
    /// Also write the best assignment as a probability file.
    #[arg(long)]
    probabilities_out: Option<PathBuf>,
    /// Attach a KKT check of the best assignment.
    #[arg(long)]
    self_check: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    gates_min: f64,
    #[arg(long)]
    gates_max: f64,
    #[arg(long, default_value_t = 25)]
    points: usize,
    /// Log-spaced gate budgets.
    #[arg(long)]
    log: bool,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    gates: f64,
    #[arg(long, value_enum, default_value = "sparsto")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    probs: ProbabilityArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    gates: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo samples per step.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Enumerate all inclusion patterns instead of sampling.
    #[arg(long)]
    exact_enumeration: bool,
    #[command(flatten)]
    probs: ProbabilityArgs,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    terms: usize,
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    #[arg(long)]
    qubits: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Domain(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(path.to_owned(), e))
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.to_owned(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// The spec sorted by descending magnitude, which is also the gate order.
fn load_sorted(path: &Path) -> CliResult<(HamiltonianSpec, Vec<usize>)> {
    let parsed = parse_hamiltonian(&read(path)?)?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let perm = parsed.spec.sort_permutation();
    Ok((sort_terms_desc(&parsed.spec), perm))
}

/// Probabilities aligned to the sorted spec: from the file when given,
/// otherwise the grid optimum for `(t, G)`.
fn resolve_probabilities(
    args: &ProbabilityArgs,
    hamiltonian: &Path,
    sorted: &HamiltonianSpec,
    perm: &[usize],
    t: f64,
    gates: f64,
) -> CliResult<ProbabilityAssignment> {
    match &args.probabilities {
        Some(path) => {
            let file_spec = parse_hamiltonian(&read(hamiltonian)?)?.spec;
            Ok(parse_probabilities(&read(path)?, &file_spec)?.permuted(perm))
        }
        None => Ok(
            grid_optimize_with(sorted, t, gates, args.ansatz.into(), &args.grid.grid())?
                .best_assignment,
        ),
    }
}

fn cmd_bounds(a: &BoundsArgs) -> CliResult<()> {
    let (spec, perm) = load_sorted(&a.common.hamiltonian)?;
    let (t, g) = (a.common.t, a.gates);
    let bound = match a.method {
        Method::Qdrift => qdrift_bound(&spec, t, g)?,
        Method::Trotter1 => trotter1_bound(&spec, t, g)?,
        Method::R1otrott => randomized_trotter_bound(&spec, t, g)?,
        Method::Sparsto => {
            let p = resolve_probabilities(&a.probs, &a.common.hamiltonian, &spec, &perm, t, g)?;
            match a.variant {
                Variant::Complete => complete_bound(&spec, &p, t, g)?,
                Variant::Simplified => simplified_bound(&spec, &p, t, g)?,
                Variant::Commutator => commutator_refined_eps2(&spec, &p, t, g)?,
            }
        }
    };
    emit(a.common.output.as_deref(), &to_json(&bound))
}

#[derive(Serialize)]
struct OptimizeOutput<'a> {
    best_active_fraction: f64,
    #[serde(flatten)]
    report: &'a OptimizationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    kkt: Option<KktReport>,
}

fn cmd_optimize(a: &OptimizeArgs) -> CliResult<()> {
    let (spec, _) = load_sorted(&a.common.hamiltonian)?;
    let report = grid_optimize_with(&spec, a.common.t, a.gates, a.ansatz.into(), &a.grid.grid())?;
    if let Some(path) = &a.grid_csv {
        emit(Some(path), &report.grid_csv())?;
    }
    if let Some(path) = &a.probabilities_out {
        emit(
            Some(path),
            &serialize_probabilities(&report.best_assignment, HamiltonianOrder::SortedDesc),
        )?;
    }
    let kkt = a
        .self_check
        .then(|| kkt_verify(&spec, &report.best_assignment, 1e-9));
    let out = OptimizeOutput {
        best_active_fraction: report.best_active_fraction(),
        report: &report,
        kkt,
    };
    emit(a.common.output.as_deref(), &to_json(&out))
}

fn cmd_sweep(a: &SweepArgs) -> CliResult<()> {
    let (spec, _) = load_sorted(&a.common.hamiltonian)?;
    let gates = gate_grid(a.gates_min, a.gates_max, a.points, a.log)?;
    let rows = sweep(&spec, a.common.t, &gates, &a.grid.grid())?;
    emit(a.common.output.as_deref(), &sweep_csv(&rows))
}

fn cmd_compile(a: &CompileArgs) -> CliResult<()> {
    let (spec, perm) = load_sorted(&a.common.hamiltonian)?;
    let (t, g) = (a.common.t, a.gates);
    let schedule = match a.method {
        Method::Sparsto => {
            let p = resolve_probabilities(&a.probs, &a.common.hamiltonian, &spec, &perm, t, g)?;
            compile_sparsto(&spec, &p, t, g, a.seed)?
        }
        Method::R1otrott => compile_sparsto(
            &spec,
            &ProbabilityAssignment::all_ones(spec.len()),
            t,
            g,
            a.seed,
        )?,
        Method::Qdrift => {
            if !(g >= 1.0 && g.fract() == 0.0 && g <= u64::MAX as f64) {
                return Err(Error::InvalidArgument(format!(
                    "qDRIFT needs an integer gate count, got {g}"
                ))
                .into());
            }
            compile_qdrift(&spec, t, g as u64, a.seed)?
        }
        Method::Trotter1 => {
            let r = trotter1_gates(g, spec.len()) / spec.len() as f64;
            compile_trotter1(&spec, t, r as usize)?
        }
    };
    emit(a.common.output.as_deref(), &write_schedule(&schedule))
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<()> {
    let (spec, perm) = load_sorted(&a.common.hamiltonian)?;
    let (t, g) = (a.common.t, a.gates);
    let p = resolve_probabilities(&a.probs, &a.common.hamiltonian, &spec, &perm, t, g)?;
    let mode = if a.exact_enumeration {
        SimulationMode::Exact
    } else {
        SimulationMode::MonteCarlo {
            samples: a.samples,
            seed: a.seed,
        }
    };
    let report = empirical_error(&spec, &p, t, g, mode)?;
    emit(a.common.output.as_deref(), &to_json(&report))
}

fn cmd_synth(a: &SynthArgs) -> CliResult<()> {
    let spec = synth_power_law(a.terms, a.exponent, a.qubits, a.seed)?;
    emit(a.output.as_deref(), &serialize_hamiltonian(&spec))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Compile(a) => cmd_compile(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
