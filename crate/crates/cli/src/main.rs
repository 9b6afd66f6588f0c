use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gendom::graphio::{generate, grid_decomposition, Graph, GraphModel, NiceTreeDecomposition, TreeDecomposition};
use gendom::oracle::induced;
use gendom::setspec::ProblemPair;
use gendom::solver::{solve, solve_nice, Algorithm, Answer, Mode};
use gendom::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "gendom", version, about = "Exact (σ,ρ)-domination solvers on tree decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Compare every applicable algorithm against brute force on random graphs.
    Verify(VerifyArgs),
    /// Write a generated graph in .gr format (and a .td decomposition with --out).
    Gen(GenArgs),
    /// Time algorithms on grid instances and print CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Decide,
    Count,
    Min,
    Max,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Auto,
    Naive,
    Structured,
    Repset,
    Brute,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Auto => Algorithm::Auto,
            AlgoArg::Naive => Algorithm::Naive,
            AlgoArg::Structured => Algorithm::Structured,
            AlgoArg::Repset => Algorithm::RepSet,
            AlgoArg::Brute => Algorithm::Brute,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputArg {
    Plain,
    Json,
}

#[derive(clap::Args)]
struct SolveArgs {
    /// Graph in PACE .gr format.
    #[arg(short = 'g', long)]
    graph: PathBuf,
    /// Tree decomposition in PACE .td format; a min-degree heuristic is used otherwise.
    #[arg(short = 't', long)]
    td: Option<PathBuf>,
    #[arg(long)]
    sigma: String,
    #[arg(long)]
    rho: String,
    #[arg(long, value_enum, default_value = "decide")]
    mode: ModeArg,
    /// Solution size: exact size for count, bound for min (at most) and max (at least).
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    algo: AlgoArg,
    #[arg(long, value_enum, default_value = "plain")]
    output: OutputArg,
    /// Unused by the exact solvers; accepted for reproducible run records.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    All,
    Structured,
    Cofinite,
    Trivial,
}

impl Family {
    fn pairs(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Family::All => &[
                ("{0}", "{1}"),
                ("{0}", "all"),
                ("all", ">=1"),
                ("{0,3}", "{3}"),
                ("{1}", "{1}"),
                (">=1", ">=1"),
                ("co{2}", "co{1}"),
            ],
            Family::Structured => &[("{0}", "{1}"), ("{0,3}", "{3}"), ("{1}", "{1}")],
            Family::Cofinite => &[("co{2}", "co{1}"), (">=2", ">=1"), ("all", ">=1"), (">=1", ">=1")],
            Family::Trivial => &[("all", "all"), ("{0,2}", "{0}"), ("{1}", "{0}")],
        }
    }
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    family: Family,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest number of vertices.
    #[arg(long, default_value_t = 10)]
    max_n: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Gnp,
    Path,
    Cycle,
    Grid,
    Tree,
}

#[derive(clap::Args)]
struct GenArgs {
    n: usize,
    #[arg(value_enum)]
    model: ModelArg,
    seed: u64,
    /// Edge probability for gnp.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Rows for grid; defaults to the integer square root of n.
    #[arg(long)]
    rows: Option<usize>,
    /// Write PREFIX.gr and PREFIX.td instead of printing the graph.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    PerfectCode,
    DominatingSet,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "perfect-code")]
    problem: Problem,
    #[arg(long, default_value_t = 4)]
    rows: usize,
    /// Grid lengths 1..=max-len are run.
    #[arg(long, default_value_t = 10)]
    max_len: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "naive,structured")]
    algos: Vec<AlgoArg>,
    #[arg(long, value_enum, default_value = "decide")]
    mode: ModeArg,
}

enum Failure {
    Solver(Error),
    Io(PathBuf, std::io::Error),
    Mismatch(String),
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Io(..) => "io",
            Failure::Mismatch(_) => "mismatch",
            Failure::Solver(e) => match e {
                Error::Parse(_) => "parse",
                Error::InvalidDecomposition(_) => "invalid-decomposition",
                Error::EmptySet => "empty-set",
                Error::TrivialPair => "trivial-pair",
                Error::NotApplicable(_) => "not-applicable",
                Error::SizeGuard { .. } => "size-guard",
                Error::StateOutOfRange { .. } | Error::LengthMismatch { .. } | Error::Invariant(_) => "invariant",
                Error::PrimeSearch(_) => "prime-search",
            },
        }
    }

    fn exit_code(&self) -> u8 {
        match self.kind() {
            "invariant" | "prime-search" => 3,
            "mismatch" => 4,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Solver(e) => e.to_string(),
            Failure::Io(path, e) => format!("{}: {e}", path.display()),
            Failure::Mismatch(m) => m.clone(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn mode_of(mode: ModeArg, size: Option<usize>) -> Mode {
    match mode {
        ModeArg::Decide => Mode::Decide,
        ModeArg::Count => Mode::Count(size),
        ModeArg::Min => Mode::Min,
        ModeArg::Max => Mode::Max,
    }
}

/// Turns an optimum into the bounded decision `--size` asks for.
fn apply_bound(answer: Answer, mode: ModeArg, size: Option<usize>) -> Answer {
    match (answer, mode, size) {
        (Answer::Optimum(best), ModeArg::Min, Some(k)) => Answer::Decision(best.is_some_and(|b| b <= k)),
        (Answer::Optimum(best), ModeArg::Max, Some(k)) => Answer::Decision(best.is_some_and(|b| b >= k)),
        (answer, ..) => answer,
    }
}

fn answer_json(answer: &Answer) -> Value {
    match answer {
        Answer::Decision(b) => json!(b),
        Answer::Count(c) => u64::try_from(c).map_or_else(|_| json!(c.to_string()), |x| json!(x)),
        Answer::Optimum(k) => json!(k),
    }
}

fn run_solve(args: &SolveArgs) -> Result<(), Failure> {
    let start = Instant::now();
    let g = Graph::parse_gr(&read(&args.graph)?)?;
    let td = match &args.td {
        Some(path) => Some(TreeDecomposition::parse_td(&read(path)?, &g)?),
        None => None,
    };
    let pair = ProblemPair::parse(&args.sigma, &args.rho)?;
    let solution = solve(&g, td.as_ref(), &pair, mode_of(args.mode, args.size), args.algo.into())?;
    let answer = apply_bound(solution.answer, args.mode, args.size);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    match args.output {
        OutputArg::Plain => println!("{answer}"),
        OutputArg::Json => println!(
            "{}",
            json!({
                "schemaVersion": SCHEMA_VERSION,
                "answer": answer_json(&answer),
                "algorithm": solution.algorithm.name(),
                "width": solution.width,
                "nodeCount": solution.node_count,
                "elapsedMs": elapsed_ms,
            })
        ),
    }
    Ok(())
}

const VERIFY_MODES: [ModeArg; 4] = [ModeArg::Decide, ModeArg::Count, ModeArg::Min, ModeArg::Max];

/// First algorithm disagreeing with brute force on `g`, if any.
fn find_mismatch(g: &Graph, pair: &ProblemPair, mode: Mode) -> Result<Option<(Algorithm, Answer, Answer)>, Failure> {
    let nice = NiceTreeDecomposition::from_td(&TreeDecomposition::min_degree(g));
    let expected = solve_nice(g, &nice, pair, mode, Algorithm::Brute)?.answer;
    for algo in [Algorithm::Auto, Algorithm::Naive, Algorithm::Structured, Algorithm::RepSet] {
        if algo.supports(pair, mode) {
            let got = solve_nice(g, &nice, pair, mode, algo)?.answer;
            if got != expected {
                return Ok(Some((algo, expected, got)));
            }
        }
    }
    Ok(None)
}

/// Greedily deletes vertices while the mismatch persists.
fn minimize(mut g: Graph, pair: &ProblemPair, mode: Mode) -> Result<Graph, Failure> {
    let mut v = 0;
    while v < g.n() {
        let keep: Vec<usize> = (0..g.n()).filter(|&u| u != v).collect();
        let smaller = induced(&g, &keep);
        if find_mismatch(&smaller, pair, mode)?.is_some() {
            g = smaller;
        } else {
            v += 1;
        }
    }
    Ok(g)
}

fn run_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let mut checks = 0usize;
    for trial in 0..args.trials {
        let seed = args.seed.wrapping_add(trial as u64);
        let n = 1 + (seed as usize * 7 + trial) % args.max_n.max(1);
        let p = if trial % 2 == 0 { 0.2 } else { 0.5 };
        let g = generate(n, GraphModel::Gnp(p), seed);
        for &(s, r) in args.family.pairs() {
            let pair = ProblemPair::parse(s, r)?;
            for mode in VERIFY_MODES {
                let mode = mode_of(mode, None);
                checks += 1;
                if let Some((algo, expected, got)) = find_mismatch(&g, &pair, mode)? {
                    let small = minimize(g.clone(), &pair, mode)?;
                    return Err(Failure::Mismatch(format!(
                        "{algo} answered {got}, brute force {expected} for {pair} {mode:?} on `gendom gen {n} gnp {seed} --p {p}`; \
                         minimized graph: {}",
                        small.to_gr().trim_end().replace('\n', "; ")
                    )));
                }
            }
        }
    }
    println!("verify: {checks} checks on {} graphs, no mismatches", args.trials);
    Ok(())
}

fn run_gen(args: &GenArgs) -> Result<(), Failure> {
    let rows = args.rows.unwrap_or_else(|| args.n.isqrt().max(1));
    let model = match args.model {
        ModelArg::Gnp => GraphModel::Gnp(args.p),
        ModelArg::Path => GraphModel::Path,
        ModelArg::Cycle => GraphModel::Cycle,
        ModelArg::Grid => GraphModel::Grid(rows),
        ModelArg::Tree => GraphModel::Tree,
    };
    let g = generate(args.n, model, args.seed);
    match &args.out {
        None => print!("{}", g.to_gr()),
        Some(prefix) => {
            let td = match args.model {
                ModelArg::Grid => grid_decomposition(rows, args.n / rows),
                _ => TreeDecomposition::min_degree(&g),
            };
            write(&prefix.with_extension("gr"), &g.to_gr())?;
            write(&prefix.with_extension("td"), &td.to_td(g.n()))?;
        }
    }
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<(), Failure> {
    let (sigma, rho) = match args.problem {
        Problem::PerfectCode => ("{0}", "{1}"),
        Problem::DominatingSet => ("all", ">=1"),
    };
    let pair = ProblemPair::parse(sigma, rho)?;
    let mode = mode_of(args.mode, None);
    println!("instance,algorithm,n,width,answer,elapsed_ms");
    for len in 1..=args.max_len {
        let g = gendom::graphio::grid(args.rows, len);
        let nice = NiceTreeDecomposition::from_td(&grid_decomposition(args.rows, len));
        for &algo in &args.algos {
            let start = Instant::now();
            let solution = solve_nice(&g, &nice, &pair, mode, algo.into())?;
            println!(
                "grid{}x{len},{},{},{},{},{:.3}",
                args.rows,
                solution.algorithm,
                g.n(),
                solution.width,
                solution.answer,
                start.elapsed().as_secs_f64() * 1000.0
            );
        }
    }
    Ok(())
}

fn configure_threads() {
    if let Some(threads) = std::env::var("SRS_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // a second initialisation only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let json_errors = matches!(&cli.command, Command::Solve(a) if a.output == OutputArg::Json);
    let result = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Verify(args) => run_verify(args),
        Command::Gen(args) => run_gen(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if json_errors {
                let error = json!({ "kind": failure.kind(), "message": failure.message() });
                println!("{}", json!({ "schemaVersion": SCHEMA_VERSION, "error": error }));
            } else {
                eprintln!("error[{}]: {}", failure.kind(), failure.message());
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
