//! `beamforge`: command line front end for the planning library.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use beamforge_core::experiment::{
    results_csv, run_trials, trials_csv, BatchInstance, EliteBasis, LogBase, RunOptions,
    TrialDesign,
};
use beamforge_core::ga::{self, CrossoverKind, GaParams};
use beamforge_core::ilp::{build_model, emit_lp};
use beamforge_core::{
    decode_schedule, evaluate, generate_instance, lower_bound, parse_instance, Error, Instance,
    Objective, PackingMode, PatternSet,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "beamforge",
    version,
    about = "Bar cutting and precast beam production planner"
)]
struct Cli {
    /// Worker threads for parallel work (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        types: usize,
        #[arg(long)]
        molds: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate packing, cutting and overlapping patterns.
    Patterns {
        #[command(flatten)]
        input: Input,
        /// Keep non-maximal packing patterns too.
        #[arg(long)]
        all_packing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower bound on the objective.
    Bound {
        #[command(flatten)]
        input: Input,
        /// Include the per-class breakdown.
        #[arg(long)]
        detail: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the integer model in LP format.
    EmitLp {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve with the genetic algorithm.
    Solve(SolveArgs),
    /// Run the tuning design over a directory of instances.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Population size.
    #[arg(long, default_value_t = 25)]
    tp: usize,
    /// Generations per packing pattern.
    #[arg(long, default_value_t = 1000)]
    ng_mult: u64,
    #[arg(long = "mut", default_value_t = 0.05)]
    mutation: f64,
    /// Restart patience as a fraction of the generations.
    #[arg(long, default_value_t = 0.2)]
    rst: f64,
    /// Constructions per packing pattern at start and on restart.
    #[arg(long, default_value_t = 100)]
    as_mult: usize,
    /// Crossover kind, 1 or 2.
    #[arg(long, default_value_t = 1)]
    crs: u32,
    /// Members kept on restart.
    #[arg(long, default_value_t = 5)]
    ter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the mold timetable.
    #[arg(long)]
    gantt: bool,
    /// Write the convergence trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Basis {
    /// Horizon times packing patterns.
    Tr,
    /// Population size.
    Tp,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files (`*.json`).
    #[arg(long)]
    instances: PathBuf,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trials to run, e.g. `1,4,9`. Defaults to all nine.
    #[arg(long, value_delimiter = ',')]
    trials: Option<Vec<usize>>,
    /// Per-replication CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial CSV. Defaults to `trials.csv` next to `--out`.
    #[arg(long)]
    trials_out: Option<PathBuf>,
    /// Record zero times so output is byte-stable.
    #[arg(long)]
    no_timing: bool,
    /// Base-10 logarithm in the S/N ratio.
    #[arg(long)]
    log10: bool,
    #[arg(long, value_enum, default_value_t = Basis::Tr)]
    elite_basis: Basis,
}

enum Failure {
    Validation(String),
    Infeasible(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Infeasible(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Infeasible(_)
            | Error::InfeasibleInstance
            | Error::NoFeasibleSolution
            | Error::EmptyRatios { .. }
            | Error::Horizon { .. }
            | Error::NoPatternOutside
            | Error::BudgetExceeded { .. } => Failure::Infeasible(m),
            _ => Failure::Validation(m),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(input: &Input) -> std::result::Result<Instance, Failure> {
    Ok(parse_instance(&read(&input.instance)?)?)
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Solution<'a> {
    seed: u64,
    fitness: f64,
    makespan: u32,
    objective: Objective,
    chromosome: &'a beamforge_core::Chromosome,
    restarts: u64,
}

fn solve(a: &SolveArgs) -> Outcome {
    let inst = load(&a.input)?;
    let pats = PatternSet::enumerate(&inst);
    let r = pats.num_packing().max(1);
    let generations = a.ng_mult * r as u64;
    let params = GaParams {
        population_size: a.tp,
        generations,
        mutation_rate: a.mutation,
        restart_patience: (a.rst * generations as f64).ceil() as u64,
        construction_pool: a.as_mult * r,
        crossover: CrossoverKind::from_index(a.crs)?,
        restart_elites: a.ter,
        seed: a.seed,
    };
    let out = ga::run(&inst, &pats, &params)?;
    let ev = evaluate(&out.best, &inst, &pats)?;
    let sol = Solution {
        seed: a.seed,
        fitness: out.fitness,
        makespan: ev.schedule.makespan,
        objective: ev.objective,
        chromosome: &out.best,
        restarts: out.restarts,
    };
    emit(a.out.as_deref(), &json(&sol))?;
    if a.gantt {
        let sched = decode_schedule(&out.best, &inst, &pats)?;
        emit(None, &sched.gantt_text(inst.horizon))?;
    }
    if let Some(p) = &a.trace {
        emit(Some(p), &out.trace_csv())?;
    }
    Ok(())
}

fn bench(a: &BenchArgs) -> Outcome {
    let io = |e: io::Error| Failure::Io(format!("{}: {e}", a.instances.display()));
    let mut files: Vec<PathBuf> = fs::read_dir(&a.instances)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Validation(format!(
            "no instance files in {}",
            a.instances.display()
        )));
    }
    let mut batch = Vec::new();
    for f in &files {
        let name = f
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        let inst = parse_instance(&read(f)?)?;
        batch.push(BatchInstance::prepare(name, inst)?);
    }
    let design = TrialDesign {
        elite_basis: match a.elite_basis {
            Basis::Tr => EliteBasis::HorizonPatterns,
            Basis::Tp => EliteBasis::Population,
        },
        ..TrialDesign::default()
    };
    let trials = a
        .trials
        .clone()
        .unwrap_or_else(|| (1..=design.rows.len()).collect());
    let opts = RunOptions {
        replications: a.reps,
        seed: a.seed,
        timing: !a.no_timing,
        log_base: if a.log10 {
            LogBase::Ten
        } else {
            LogBase::Natural
        },
    };
    let results = run_trials(&design, &trials, &batch, opts)?;
    let per_rep = results_csv(&results)?;
    let per_trial = trials_csv(&results)?;
    emit(a.out.as_deref(), &per_rep)?;
    let trials_path = a
        .trials_out
        .clone()
        .or_else(|| a.out.as_ref().map(|o| o.with_file_name("trials.csv")));
    match trials_path {
        Some(p) => emit(Some(&p), &per_trial),
        None => emit(None, &format!("\n{per_trial}")),
    }
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.command {
        Command::Gen {
            seed,
            types,
            molds,
            out,
        } => emit(
            out.as_deref(),
            &generate_instance(seed, types, molds)?.to_json(),
        ),
        Command::Patterns {
            input,
            all_packing,
            out,
        } => {
            let inst = load(&input)?;
            let mode = if all_packing {
                PackingMode::All
            } else {
                PackingMode::Maximal
            };
            emit(
                out.as_deref(),
                &PatternSet::enumerate_with(&inst, mode).to_json(),
            )
        }
        Command::Bound { input, detail, out } => {
            let inst = load(&input)?;
            let b = lower_bound(&inst, &PatternSet::enumerate(&inst))?;
            let text = if detail { json(&b) } else { json(&b.summary()) };
            emit(out.as_deref(), &text)
        }
        Command::EmitLp { input, out } => {
            let inst = load(&input)?;
            emit(
                out.as_deref(),
                &emit_lp(&build_model(&inst, &PatternSet::enumerate(&inst))),
            )
        }
        Command::Solve(a) => solve(&a),
        Command::Bench(a) => bench(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
