//! `fasbound`: generate random oriented digraphs, solve minimum FAS, evaluate
//! bounds and run verification experiments.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 runtime error.

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fasbound::bounds::BoundReport;
use fasbound::edgelist;
use fasbound::experiment::{self, ModelTemplate, SweepConfig, SweepVariable};
use fasbound::plot::{self, Overlays};
use fasbound::random::{expected_edges, ModelKind, ModelSpec, Seed};
use fasbound::solvers::{self, SolverBudget};

#[derive(Parser, Debug)]
#[command(name = "fasbound", version = concat!(env!("CARGO_PKG_VERSION"), " (", env!("CARGO_PKG_NAME"), ")"))]
#[command(about = "Random oriented digraphs, minimum feedback arc sets, and their lower bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a random oriented digraph and write it as an edge list.
    Gen(GenArgs),
    /// Compute a (minimum) feedback arc set for an edge-list graph.
    Solve(SolveArgs),
    /// Evaluate every bound formula at one (n, m) point.
    Bounds(BoundsArgs),
    /// Monte Carlo sweeps and verification runs.
    Experiment {
        #[command(subcommand)]
        verb: ExperimentVerb,
    },
    /// Verification reports; exit code 1 when an inequality is violated.
    Verify {
        #[command(subcommand)]
        verb: VerifyVerb,
    },
    /// Render a sweep CSV as an SVG chart.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    Gnm,
    Gnp,
    Tournament,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Gnm => ModelKind::Gnm,
            ModelArg::Gnp => ModelKind::ErNp,
            ModelArg::Tournament => ModelKind::Tournament,
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    /// Arc count (gnm).
    #[arg(long)]
    m: Option<usize>,
    /// Edge probability (gnp).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replay trial `i` of a sweep point: samples with `derive(seed, i)`.
    #[arg(long)]
    trial: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct BudgetArgs {
    /// Largest n solved exactly by the subset DP.
    #[arg(long, default_value_t = 22)]
    exact_limit: usize,
    /// Largest n accepted by the brute-force solver.
    #[arg(long, default_value_t = 9)]
    brute_limit: usize,
    /// Cap on local-search passes (default: until no improvement).
    #[arg(long)]
    passes: Option<usize>,
}

impl BudgetArgs {
    fn budget(&self) -> SolverBudget {
        SolverBudget {
            exact_vertex_limit: self.exact_limit,
            brute_force_limit: self.brute_limit,
            local_search_passes: self.passes,
            ..SolverBudget::default()
        }
        .normalized()
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Exact,
    Brute,
    Greedy,
    Auto,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Edge-list file, or `-` for standard input.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    #[arg(long)]
    n: u64,
    /// Arc count; may be fractional.
    #[arg(long, conflicts_with = "p", required_unless_present = "p")]
    m: Option<f64>,
    /// Edge probability; m = p·n(n-1)/2.
    #[arg(long)]
    p: Option<f64>,
    /// Print a CSV header and row instead of aligned text.
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct CommonSweep {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores). Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    budget: BudgetArgs,
    /// CSV destination (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG chart with all overlays.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum ExperimentVerb {
    /// Sweep the vertex count at fixed density (p) or arc count (m).
    SweepN {
        #[command(flatten)]
        common: CommonSweep,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 10)]
        n_from: usize,
        #[arg(long, default_value_t = 50)]
        n_to: usize,
        #[arg(long, default_value_t = 10)]
        n_step: usize,
    },
    /// Sweep the edge probability at fixed n.
    SweepP {
        #[command(flatten)]
        common: CommonSweep,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        p_from: f64,
        #[arg(long, default_value_t = 1.0)]
        p_to: f64,
        #[arg(long, default_value_t = 0.1)]
        p_step: f64,
    },
    VerifyLemma21(Lemma21Args),
    VerifyThm31(Thm31Args),
}

#[derive(Subcommand, Debug)]
enum VerifyVerb {
    /// Exhaustive check of Pr(Y* <= k) <= n!·Pr(Y <= k).
    Lemma21(Lemma21Args),
    /// Monte Carlo check that exact Y* never falls below the lower bound.
    Thm31(Thm31Args),
}

#[derive(Args, Debug)]
struct Lemma21Args {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
}

#[derive(Args, Debug)]
struct Thm31Args {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value_t = 22)]
    exact_limit: usize,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// Sweep CSV produced by `experiment`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated: thm31, heuristic, half-m, delavega, all, none.
    #[arg(long, default_value = "all")]
    overlays: String,
}

enum Outcome {
    Ok,
    VerificationFailed,
}

type Res = Result<Outcome, Box<dyn std::error::Error>>;

fn write_output(out: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, bytes),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()
        }
    }
}

fn usage(msg: impl Into<String>) -> Box<dyn std::error::Error> {
    Box::new(UsageError(msg.into()))
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn cmd_gen(a: GenArgs) -> Res {
    let spec = match ModelKind::from(a.model) {
        ModelKind::Gnm => ModelSpec::Gnm { n: a.n, m: a.m.ok_or_else(|| usage("gnm needs --m"))? },
        ModelKind::ErNp => ModelSpec::ErNp { n: a.n, p: a.p.ok_or_else(|| usage("gnp needs --p"))? },
        ModelKind::Tournament => ModelSpec::Tournament { n: a.n },
    };
    let seed = match a.trial {
        Some(i) => Seed(a.seed).derive(i),
        None => Seed(a.seed),
    };
    let g = spec.sample(seed)?;
    eprintln!("generated {} graph: n={} m={} seed={}", spec.kind(), g.n(), g.m(), seed);
    write_output(a.out.as_deref(), edgelist::to_edge_list_string(&g).as_bytes())?;
    Ok(Outcome::Ok)
}

fn cmd_solve(a: SolveArgs) -> Res {
    let g = if a.input.as_os_str() == "-" {
        edgelist::read_edge_list(io::stdin().lock())?
    } else {
        edgelist::read_edge_list(BufReader::new(File::open(&a.input)?))?
    };
    let budget = a.budget.budget();
    let r = match a.method {
        Method::Exact => solvers::solve_exact_dp(&g, &budget)?,
        Method::Brute => solvers::solve_brute_force(&g, &budget)?,
        Method::Greedy => solvers::solve_greedy(&g),
        Method::Auto => solvers::solve_auto(&g, &budget)?,
    };
    let text = format!(
        "n {}\nm {}\nystar {}\nxstar {}\nexact {}\nmethod {}\nordering {}\n",
        g.n(),
        g.m(),
        r.feedback_count,
        r.forward_count,
        r.exact,
        r.method,
        r.ordering
    );
    eprintln!("Y* = {} (X* = {}, exact = {})", r.feedback_count, r.forward_count, r.exact);
    write_output(a.out.as_deref(), text.as_bytes())?;
    Ok(Outcome::Ok)
}

fn cmd_bounds(a: BoundsArgs) -> Res {
    let m = match (a.m, a.p) {
        (Some(m), _) => m,
        (None, Some(p)) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(usage(format!("--p {p} is not in [0, 1]")));
            }
            expected_edges(a.n as usize, p)
        }
        (None, None) => return Err(usage("bounds needs --m or --p")),
    };
    let report = BoundReport::evaluate(a.n, m)?;
    let text = if a.csv {
        format!("{}\n{}\n", BoundReport::CSV_HEADER, report.csv_row())
    } else {
        let mut t = String::new();
        if let Some(p) = a.p {
            t.push_str(&format!("{:<20}{}\n", "p", p));
            t.push_str(&format!("{:<20}{}\n", "m_expected", m));
        }
        t + &report.to_text()
    };
    write_output(a.out.as_deref(), text.as_bytes())?;
    Ok(Outcome::Ok)
}

fn run_sweep(common: CommonSweep, template: ModelTemplate, sweep: SweepVariable) -> Res {
    let cfg = SweepConfig {
        model: template,
        sweep,
        trials: common.trials,
        seed: Seed(common.seed),
        budget: common.budget.budget(),
        jobs: common.jobs,
    };
    let outcome = experiment::run_sweep(&cfg)?;
    for d in &outcome.diagnostics {
        eprintln!("point {} ({:?}) failed: {}", d.index, d.spec, d.message);
    }
    for r in &outcome.records {
        eprintln!(
            "n={:<4} p={:<6} m={:<10} mean Y*={:<10.3} bound={:<10} heuristic={:<10} exact={}",
            r.n,
            r.p.map(|p| p.to_string()).unwrap_or_else(|| "-".into()),
            r.m_expected,
            r.ystar_mean,
            r.bound_thm31.map(|b| format!("{b:.3}")).unwrap_or_else(|| "-".into()),
            r.heuristic_est.map(|h| format!("{h:.3}")).unwrap_or_else(|| "-".into()),
            r.exact_fraction
        );
    }
    let mut buf = Vec::new();
    experiment::write_csv(&outcome.records, &mut buf)?;
    write_output(common.out.as_deref(), &buf)?;
    if let Some(path) = &common.plot {
        plot::emit_plot(&outcome.records, path, Overlays::all())?;
    }
    Ok(Outcome::Ok)
}

fn cmd_lemma21(a: Lemma21Args) -> Res {
    let report = experiment::verify_lemma21(a.n, a.m)?;
    print!("{}", report.to_text());
    Ok(if report.passed { Outcome::Ok } else { Outcome::VerificationFailed })
}

fn cmd_thm31(a: Thm31Args) -> Res {
    let budget = SolverBudget { exact_vertex_limit: a.exact_limit, ..SolverBudget::default() }.normalized();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs).build()?;
    let report =
        pool.install(|| experiment::verify_thm31_montecarlo(a.n, a.m, a.trials, Seed(a.seed), &budget))?;
    print!("{}", report.to_text());
    Ok(if report.passed { Outcome::Ok } else { Outcome::VerificationFailed })
}

fn cmd_experiment(verb: ExperimentVerb) -> Res {
    match verb {
        ExperimentVerb::SweepN { common, p, m, n_from, n_to, n_step } => {
            let kind = ModelKind::from(common.model);
            let template = ModelTemplate { kind, n: n_from, m, p };
            run_sweep(common, template, SweepVariable::N { start: n_from, end: n_to, step: n_step })
        }
        ExperimentVerb::SweepP { common, n, p_from, p_to, p_step } => {
            let kind = ModelKind::from(common.model);
            if kind == ModelKind::Tournament {
                return Err(usage("sweep-p does not apply to tournaments"));
            }
            let template = ModelTemplate { kind, n, m: None, p: None };
            run_sweep(common, template, SweepVariable::P { start: p_from, end: p_to, step: p_step })
        }
        ExperimentVerb::VerifyLemma21(a) => cmd_lemma21(a),
        ExperimentVerb::VerifyThm31(a) => cmd_thm31(a),
    }
}

fn cmd_plot(a: PlotArgs) -> Res {
    let overlays: Overlays = a.overlays.parse().map_err(|e: plot::PlotError| usage(e.to_string()))?;
    let records = experiment::read_csv(File::open(&a.input)?)?;
    plot::emit_plot(&records, &a.out, overlays)?;
    eprintln!("wrote {} ({} points)", a.out.display(), records.len());
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Experiment { verb } => cmd_experiment(verb),
        Command::Verify { verb } => match verb {
            VerifyVerb::Lemma21(a) => cmd_lemma21(a),
            VerifyVerb::Thm31(a) => cmd_thm31(a),
        },
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
