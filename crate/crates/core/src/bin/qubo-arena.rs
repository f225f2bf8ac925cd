use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qubo_arena::harness::{
    aggregate_curves, count_wins, curves_csv, ratio_table, ratios_csv, read_records,
    render_ratio_table, resolve_workers, run_benchmark, BenchmarkPlan, Normalization, RunOptions,
};
use qubo_arena::instances::{classify, gen_nae3sat, gen_sk, load_mqlib, write_mqlib, InstanceSidecar};
use qubo_arena::rng::{RngSeed, RNG_NAME};
use qubo_arena::solvers::{solve, ParamMap, SolverBudget, SolverKind};
use qubo_arena::{Error, QuboProblem};

#[derive(Parser)]
#[command(name = "qubo-arena", version, about = "QUBO/Ising heuristics and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance file and its metadata sidecar.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Solve one instance file and print the result as JSON.
    Solve(SolveArgs),
    /// Execute a benchmark plan, appending records to an NDJSON file.
    Bench(BenchArgs),
    /// Summarise a record file.
    Report(ReportArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random NAE 3-SAT in QUBO form.
    Nae3sat {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        name: Option<String>,
    },
    /// Sherrington-Kirkpatrick spin glass in QUBO form.
    Sk {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    solver: String,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, conflicts_with = "sweeps")]
    time_limit: Option<f64>,
    #[arg(long)]
    sweeps: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver parameter as key=value; repeatable.
    #[arg(long = "param")]
    params: Vec<String>,
    /// Stop once this energy is reached.
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    trajectory_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    plan: PathBuf,
    /// Record file; defaults to `<plan stem>.records.ndjson` next to the plan.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "QUBO_ARENA_WORKERS")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    Wins,
    Ratios,
    Curves,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizeArg {
    Clauses,
    Variables,
}

#[derive(Args)]
struct ReportArgs {
    kind: ReportKind,
    #[arg(long)]
    records: PathBuf,
    #[arg(long, value_enum, default_value = "variables")]
    normalize: NormalizeArg,
    /// Budget used for wins/ratios; defaults to the largest.
    #[arg(long)]
    budget_index: Option<usize>,
    #[arg(long)]
    json: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Failure { code: 1, message: message.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::UnknownSolver(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn header(command: &str, fields: &[(&str, String)]) {
    let kv: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    eprintln!("# qubo-arena {command} {}", kv.join(" "));
}

fn write_instance(
    problem: &QuboProblem,
    name: &str,
    out: Option<&Path>,
    sidecar: InstanceSidecar,
) -> Result<(), Failure> {
    let text = write_mqlib(problem, name);
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            let meta = serde_json::to_string_pretty(&sidecar).map_err(Error::from)?;
            std::fs::write(InstanceSidecar::path_for(path), meta + "\n")?;
            eprintln!("wrote {} ({} vars, {} entries)", path.display(), problem.num_vars(), problem.entries().len());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_gen(cmd: GenCommand) -> Result<(), Failure> {
    match cmd {
        GenCommand::Nae3sat { n, m, seed, out, name } => {
            header("gen nae3sat", &[("n", n.to_string()), ("m", m.to_string()), ("seed", seed.to_string()), ("rng", RNG_NAME.into())]);
            let formula = gen_nae3sat(n, m, RngSeed(seed))?;
            let problem = formula.to_ising().to_qubo();
            let name = name.unwrap_or_else(|| format!("nae3sat-n{n}-m{m}-s{seed}"));
            let mut params = BTreeMap::new();
            params.insert("n".into(), json!(n));
            params.insert("m".into(), json!(m));
            params.insert("ratio".into(), json!(m as f64 / n as f64));
            params.insert("rng".into(), json!(RNG_NAME));
            let sidecar = InstanceSidecar::new(classify(&problem, &name), "nae3sat", Some(seed), params);
            write_instance(&problem, &name, out.as_deref(), sidecar)
        }
        GenCommand::Sk { n, seed, out, name } => {
            header("gen sk", &[("n", n.to_string()), ("seed", seed.to_string()), ("rng", RNG_NAME.into())]);
            let problem = gen_sk(n, RngSeed(seed))?.to_qubo();
            let name = name.unwrap_or_else(|| format!("sk-n{n}-s{seed}"));
            let mut params = BTreeMap::new();
            params.insert("n".into(), json!(n));
            params.insert("rng".into(), json!(RNG_NAME));
            let sidecar = InstanceSidecar::new(classify(&problem, &name), "sk", Some(seed), params);
            write_instance(&problem, &name, out.as_deref(), sidecar)
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let kind: SolverKind = args.solver.parse()?;
    let params = ParamMap::parse_pairs(args.params.iter().map(String::as_str))?;
    let budget = SolverBudget {
        time_limit: args.time_limit,
        sweep_limit: args.sweeps,
        record_trajectory: args.trajectory_out.is_some(),
        seed: RngSeed(args.seed),
        target_energy: args.target,
    };
    if kind != SolverKind::Exact {
        budget.validate()?;
    }
    header(
        "solve",
        &[
            ("solver", kind.id().into()),
            ("input", args.input.display().to_string()),
            ("seed", args.seed.to_string()),
            ("time_limit", args.time_limit.map_or("-".into(), |t| t.to_string())),
            ("sweeps", args.sweeps.map_or("-".into(), |s| s.to_string())),
            ("params", format!("{:?}", params.0)),
        ],
    );
    let (problem, meta) = load_mqlib(&args.input)?;
    let run = solve(kind, &params, &problem, &budget)?;
    if let Some(path) = &args.trajectory_out {
        let mut csv = String::from("elapsed,best_energy\n");
        for p in &run.trajectory {
            csv.push_str(&format!("{},{}\n", p.elapsed, p.best_energy));
        }
        std::fs::write(path, csv)?;
    }
    if let Some(w) = &run.warning {
        eprintln!("warning: {w}");
    }
    let assignment: String = run.best_assignment.0.iter().map(|b| char::from(b'0' + b)).collect();
    let out = json!({
        "instance": meta.name,
        "solver": run.solver_id,
        "seed": args.seed,
        "best_energy": run.best_energy,
        "elapsed": run.elapsed,
        "sweeps": run.sweeps_done,
        "params": run.params,
        "stats": run.stats,
        "warning": run.warning,
        "aborted": run.aborted,
        "assignment": assignment,
    });
    println!("{out}");
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let plan = BenchmarkPlan::load(&args.plan).map_err(|e| match e {
        Error::Io(_) => Failure::from(e),
        other => Failure::usage(format!("invalid plan: {other}")),
    })?;
    let workers = resolve_workers(args.workers);
    let out = args.out.unwrap_or_else(|| {
        let stem = args.plan.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        args.plan.with_file_name(format!("{stem}.records.ndjson"))
    });
    let mut fields: Vec<(&str, String)> =
        plan.summary().into_iter().map(|(k, v)| (k, v)).collect();
    fields.push(("workers", workers.to_string()));
    fields.push(("records", out.display().to_string()));
    header("bench", &fields);
    let new = run_benchmark(&plan, &out, RunOptions { workers })?;
    let failed = new.iter().filter(|r| r.error.is_some()).count();
    eprintln!("{} new records ({failed} failed) in {}", new.len(), out.display());
    println!("{}", json!({"records": out.display().to_string(), "new_records": new.len(), "failed": failed}));
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Failure> {
    if !args.records.exists() {
        return Err(Failure::usage(format!("no record file at {}", args.records.display())));
    }
    let records = read_records(&args.records)?;
    if records.is_empty() {
        return Err(Failure::usage("record file is empty"));
    }
    match args.kind {
        ReportKind::Wins => {
            let table = count_wins(&records, args.budget_index)?;
            if args.json {
                println!("{}", serde_json::to_string_pretty(&table).map_err(Error::from)?);
            } else {
                print!("{}", table.render());
            }
        }
        ReportKind::Ratios => {
            let entries = ratio_table(&records, args.budget_index);
            eprint!("{}", render_ratio_table(&entries));
            print!("{}", ratios_csv(&entries));
        }
        ReportKind::Curves => {
            let norm = match args.normalize {
                NormalizeArg::Clauses => Normalization::PerClause,
                NormalizeArg::Variables => Normalization::PerVariable,
            };
            let points = aggregate_curves(&records, norm)?;
            print!("{}", curves_csv(&points));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen(cmd) => cmd_gen(cmd),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
