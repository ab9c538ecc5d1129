//! Command-line front end: analyze the robustness of interdependent
//! power/communication network instances.
//!
//! Data goes to standard output or `--out`; diagnostics go to standard
//! error. Exit codes: 0 success, 1 invalid input, 2 exact-search limits
//! exhausted, 3 internal error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ridn::cascade::{cascade, kill_sets_all};
use ridn::exact::{
    build_ilp, check_assignment, export_lp, parse_lp, solve_exact, Assignment, ExactLimits,
    ExactOutcome,
};
use ridn::generator::{generate, GenSpec};
use ridn::ingest::{export_sweep_csv, export_trace_csv, parse_idn, serialize_idn};
use ridn::model::{CaseClass, EntityId, Idn, Side};
use ridn::solvers::{solve_case1, solve_heuristic, sweep, SolveError, SweepMethod};

#[derive(Parser)]
#[command(
    name = "ridn",
    version,
    about = "Robustness analysis for interdependent networks with Boolean dependency relations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check an instance file against the structural invariants
    Validate {
        /// Instance file (.idn)
        file: PathBuf,
    },
    /// Print the dependency shape class: CaseI, CaseII, CaseIII or CaseIV
    Classify {
        file: PathBuf,
    },
    /// Cascade from an initial failure set and emit the 0/1 timing matrix
    Simulate {
        file: PathBuf,
        /// Comma-separated entities failing at t=0 (qualify as A.name/B.name
        /// if a name exists on both sides)
        #[arg(long, value_delimiter = ',', required = true)]
        fail: Vec<String>,
        /// Write the CSV here instead of standard output
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Emit every entity's kill set as CSV
    Killsets {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Robustness parameter K for one target fraction
    Robustness {
        file: PathBuf,
        /// Target fraction of failed entities, in (0, 1]
        #[arg(long)]
        rho: f64,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// K-vs-rho curve over a grid, as CSV
    Sweep {
        file: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Grid step; points are step, 2*step, ... up to 1.0
        #[arg(long, default_value_t = 0.02)]
        grid_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Build the time-expanded binary program and write it in LP format
    ExportIlp {
        file: PathBuf,
        #[arg(long)]
        rho: f64,
        /// Time horizon; defaults to |A| + |B|
        #[arg(long)]
        tf: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a 0/1 assignment (CSV: variable,value) against an LP model
    CheckIlp {
        model: PathBuf,
        assignment: PathBuf,
    },
    /// Write a seeded random instance
    Generate {
        /// Dependency shape class: 1, 2, 3 or 4
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        case: u8,
        #[arg(long)]
        size_a: usize,
        #[arg(long)]
        size_b: usize,
        #[arg(long)]
        seed: u64,
        /// Chance an entity receives a relation
        #[arg(long, default_value_t = 0.8)]
        idr_prob: f64,
        #[arg(long, default_value_t = 3)]
        max_minterms: usize,
        #[arg(long, default_value_t = 3)]
        max_minterm_size: usize,
        /// Allow relations to reference entities on the target's own side
        #[arg(long)]
        same_side: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    #[value(name = "case1")]
    Case1,
    Heuristic,
    Exact,
}

#[derive(Args)]
struct LimitArgs {
    /// Largest witness size the exact search may try
    #[arg(long, default_value_t = 6)]
    max_witness: usize,
    /// Cascade-evaluation budget for the exact search
    #[arg(long, default_value_t = 5_000_000)]
    max_nodes: u64,
    /// Time budget for the exact search, in seconds
    #[arg(long, default_value_t = 60)]
    time_budget: u64,
}

impl LimitArgs {
    fn to_limits(&self) -> ExactLimits {
        ExactLimits {
            max_witness_size: self.max_witness,
            max_nodes: self.max_nodes,
            time_budget: Duration::from_secs(self.time_budget),
        }
    }
}

enum CliError {
    /// Bad file, flags, instance, or entity reference.
    Input(String),
    /// The exact search hit its resource limits.
    Limits(String),
    /// Environment failures (e.g. writing the output file).
    Internal(String),
}

impl CliError {
    fn report(&self) -> (&str, u8) {
        match self {
            CliError::Input(m) => (m, 1),
            CliError::Limits(m) => (m, 2),
            CliError::Internal(m) => (m, 3),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Exhausted { .. } => CliError::Limits(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version print to stdout and succeed; real argument
            // errors are invalid input.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (msg, code) = e.report();
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

/// `IDN_THREADS` caps the worker count for parallel sweeps; 0 or unset
/// means automatic.
fn configure_threads() {
    if let Ok(value) = std::env::var("IDN_THREADS") {
        match value.trim().parse::<usize>() {
            Ok(0) => {}
            Ok(n) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            Err(_) => eprintln!("warning: ignoring non-numeric IDN_THREADS={value:?}"),
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, CliError> {
    match cmd {
        Cmd::Validate { file } => {
            let idn = load(&file)?;
            let report = idn.validate();
            print!("{report}");
            if report.is_clean() {
                println!("ok: {} entities, {} relations", idn.len(), idn.idrs().len());
                Ok(0)
            } else {
                Ok(1)
            }
        }
        Cmd::Classify { file } => {
            let idn = load(&file)?;
            let class = idn.classify().map_err(|e| CliError::Input(e.to_string()))?;
            println!("{class}");
            Ok(0)
        }
        Cmd::Simulate { file, fail, trace } => {
            let idn = load(&file)?;
            let initial = fail
                .iter()
                .map(|t| resolve_entity(&idn, t))
                .collect::<Result<_, _>>()?;
            let tr = cascade(&idn, &initial).map_err(|e| CliError::Input(e.to_string()))?;
            emit(&trace, &export_trace_csv(&tr))?;
            Ok(0)
        }
        Cmd::Killsets { file, out } => {
            let idn = load(&file)?;
            let sets = kill_sets_all(&idn);
            let mut csv = String::from("entity,size,members\n");
            for e in idn.entities() {
                let ks = &sets[e];
                let members: Vec<String> = ks.iter().map(display_name(&idn)).collect();
                let _ = writeln!(csv, "{},{},{}", display_name(&idn)(e), ks.len(), members.join(" "));
            }
            emit(&out, &csv)?;
            Ok(0)
        }
        Cmd::Robustness { file, rho, method, limits } => {
            let idn = load(&file)?;
            let result = match method {
                MethodArg::Case1 => solve_case1(&idn, rho)?,
                MethodArg::Heuristic => solve_heuristic(&idn, rho)?,
                MethodArg::Exact => {
                    match solve_exact(&idn, rho, &limits.to_limits())
                        .map_err(CliError::from)?
                    {
                        ExactOutcome::Solved(r) => r,
                        ExactOutcome::Exhausted(rep) => {
                            return Err(CliError::Limits(rep.to_string()))
                        }
                    }
                }
            };
            let name = display_name(&idn);
            let witness: Vec<String> = result.selection.iter().map(&name).collect();
            println!("K={} (witness size {})", result.k, result.k + 1);
            println!("witness: {}", witness.join(","));
            println!(
                "final failed: {} of {} (threshold {}, rho {:.2})",
                result.final_failed.len(),
                idn.len(),
                result.threshold,
                result.rho
            );
            Ok(0)
        }
        Cmd::Sweep { file, method, grid_step, out, limits } => {
            let idn = load(&file)?;
            let grid = build_grid(grid_step)?;
            let method = match method {
                MethodArg::Case1 => SweepMethod::Case1,
                MethodArg::Heuristic => SweepMethod::Heuristic,
                MethodArg::Exact => SweepMethod::Exact(limits.to_limits()),
            };
            let points = sweep(&idn, &grid, &method)?;
            emit(&out, &export_sweep_csv(&points))?;
            Ok(0)
        }
        Cmd::ExportIlp { file, rho, tf, out } => {
            let idn = load(&file)?;
            let t_f = tf.unwrap_or_else(|| idn.len());
            let model = build_ilp(&idn, rho, t_f).map_err(|e| CliError::Input(e.to_string()))?;
            emit(&out, &export_lp(&model))?;
            Ok(0)
        }
        Cmd::CheckIlp { model, assignment } => {
            let model_text = read(&model)?;
            let model_path = model;
            let model = parse_lp(&model_text)
                .map_err(|e| CliError::Input(format!("{}: {e}", model_path.display())))?;
            let asg_text = read(&assignment)?;
            let asg = Assignment::parse_csv(&asg_text)
                .map_err(|e| CliError::Input(format!("assignment: {e}")))?;
            let report =
                check_assignment(&model, &asg).map_err(|e| CliError::Input(e.to_string()))?;
            if report.feasible {
                println!("feasible, objective {}", report.objective);
                Ok(0)
            } else {
                println!(
                    "infeasible ({} violations), objective {}",
                    report.violations.len(),
                    report.objective
                );
                for v in &report.violations {
                    println!("{v}");
                }
                Ok(1)
            }
        }
        Cmd::Generate {
            case,
            size_a,
            size_b,
            seed,
            idr_prob,
            max_minterms,
            max_minterm_size,
            same_side,
            out,
        } => {
            let case = match case {
                1 => CaseClass::CaseI,
                2 => CaseClass::CaseII,
                3 => CaseClass::CaseIII,
                _ => CaseClass::CaseIV,
            };
            let mut spec = GenSpec::new(case, size_a, size_b, seed);
            spec.idr_probability = idr_prob;
            spec.max_minterms = max_minterms;
            spec.max_minterm_size = max_minterm_size;
            spec.cross_only = !same_side;
            let idn = generate(&spec).map_err(|e| CliError::Input(e.to_string()))?;
            emit(&out, &serialize_idn(&idn))?;
            Ok(0)
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Idn, CliError> {
    let text = read(path)?;
    let outcome = parse_idn(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    for note in &outcome.notes {
        eprintln!("note: {}: {note}", path.display());
    }
    Ok(outcome.idn)
}

fn emit(out: &Option<PathBuf>, data: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, data)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

/// Renders an entity the way the text format would: qualified only when the
/// bare name is ambiguous.
fn display_name(idn: &Idn) -> impl Fn(&EntityId) -> String + '_ {
    move |e: &EntityId| {
        let on_a = idn.entities_a().iter().any(|x| x.name == e.name);
        let on_b = idn.entities_b().iter().any(|x| x.name == e.name);
        if on_a && on_b {
            e.qualified()
        } else {
            e.name.clone()
        }
    }
}

fn resolve_entity(idn: &Idn, token: &str) -> Result<EntityId, CliError> {
    let token = token.trim();
    let (side, name) = match token.split_once('.') {
        Some(("A", rest)) => (Some(Side::A), rest),
        Some(("B", rest)) => (Some(Side::B), rest),
        Some(_) => {
            return Err(CliError::Input(format!(
                "bad qualifier in {token:?} (use A.name or B.name)"
            )))
        }
        None => (None, token),
    };
    let on_a = idn.entities_a().iter().any(|x| x.name == name);
    let on_b = idn.entities_b().iter().any(|x| x.name == name);
    match side {
        Some(Side::A) if on_a => Ok(EntityId::a(name)),
        Some(Side::B) if on_b => Ok(EntityId::b(name)),
        Some(_) => Err(CliError::Input(format!("unknown entity {token}"))),
        None => match (on_a, on_b) {
            (true, false) => Ok(EntityId::a(name)),
            (false, true) => Ok(EntityId::b(name)),
            (true, true) => Err(CliError::Input(format!(
                "{name} is declared on both sides; qualify it as A.{name} or B.{name}"
            ))),
            (false, false) => Err(CliError::Input(format!("unknown entity {name}"))),
        },
    }
}

fn build_grid(step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(CliError::Input(format!(
            "grid step must be in (0, 1], got {step}"
        )));
    }
    let mut grid = Vec::new();
    let mut i = 1u32;
    loop {
        let rho = f64::from(i) * step;
        if rho > 1.0 + 1e-9 {
            break;
        }
        grid.push(rho.min(1.0));
        i += 1;
    }
    Ok(grid)
}
