use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use lexsched::baselines::{highest_rank, sequential_method, weighting_method};
use lexsched::generators::{gen_fixture, gen_perturbations, generate, Dist, Family, FixtureParams, GenKind, GenSpec, PerturbSpec};
use lexsched::pool::diverse_pool;
use lexsched::rational::{exact_string, parse_rational};
use lexsched::recovery::{apply_perturbations, recovery_report, RecoveryScenario, ScenarioDoc, Strategy};
use lexsched::{par, solve_lexopt, solve_lexopt_parallel, Instance, Limits, SolveReport, Status};
use lexsched_cli::files::{expand, read_json, stem, to_json, write_bytes};
use lexsched_cli::profile::{curves, curves_csv, ratios, Metric};
use lexsched_cli::scatter::{default_budget, points_csv, scatter_instance, ScatterConfig};
use lexsched_cli::{invalid, weight_q, CliError};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "lexsched", version, about = "Lexicographic makespan scheduling and recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances or perturbed scenarios
    #[command(subcommand)]
    Gen(GenCommand),
    /// Solve instances and print JSON reports
    Solve(SolveArgs),
    /// Recover a scenario and compare with the perturbed optimum
    Recover(RecoverArgs),
    /// Collect distinct near-optimal schedules
    Pool(PoolArgs),
    /// Performance-profile curves from solve reports, as CSV
    Profile(ProfileArgs),
    /// Initial weight against recovered makespan, as CSV
    Scatter(ScatterArgs),
    /// Scenario families with known recovery ratios
    Fixture(FixtureArgs),
}

#[derive(Args, Clone)]
struct LimitArgs {
    /// Wall-clock limit in seconds
    #[arg(long)]
    time_limit: Option<f64>,
    /// Search node limit
    #[arg(long)]
    node_limit: Option<u64>,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits { time: self.time_limit.map(Duration::from_secs_f64), nodes: self.node_limit }
    }
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random instances
    Instance(GenInstanceArgs),
    /// LexOpt initial schedule of an instance plus random perturbations
    Scenario(GenScenarioArgs),
}

#[derive(Args)]
struct GenInstanceArgs {
    /// JSON file holding a generator spec; flags are ignored when given
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value = "wellformed", value_parser = parse_kind)]
    kind: GenKind,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long, default_value = "uniform")]
    dist: Dist,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of instances, with consecutive seeds
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for batch output, one file per instance
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Job disturbances (default: ceil(n/5))
    #[arg(long)]
    dn: Option<usize>,
    /// Machine disturbances (default: ceil(m/5))
    #[arg(long)]
    dm: Option<usize>,
    /// Time parameter for new and augmented jobs (default: largest time)
    #[arg(long = "perturb-q")]
    q: Option<u64>,
}

impl PerturbArgs {
    fn spec(&self) -> PerturbSpec {
        PerturbSpec { seed: self.seed, dn: self.dn, dm: self.dm, q: self.q }
    }
}

#[derive(Args)]
struct GenScenarioArgs {
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    perturb: PerturbArgs,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance files or glob patterns; `-` reads stdin
    #[arg(required = true)]
    instances: Vec<String>,
    /// bnb, sequential, weighting or highest-rank
    #[arg(long, default_value = "bnb")]
    method: String,
    /// Worker threads for a single branch-and-bound search
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Base of the weighting method
    #[arg(long, default_value_t = 2)]
    base: u64,
    /// Pool capacity of the highest-rank method
    #[arg(long, default_value_t = 2000)]
    capacity: usize,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for one report per instance
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    scenario: PathBuf,
    #[arg(long, default_value = "binding")]
    strategy: Strategy,
    /// Migration budget of flexible recovery (default: ceil(n/10))
    #[arg(long)]
    g: Option<usize>,
    /// Uncertainty boundary, e.g. 3/2 (default: the one with the best guarantee)
    #[arg(long)]
    f: Option<String>,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PoolArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// Report files or glob patterns
    #[arg(required = true)]
    reports: Vec<String>,
    #[arg(long, default_value = "time")]
    metric: Metric,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScatterArgs {
    #[arg(required = true)]
    instances: Vec<String>,
    #[arg(long, default_value_t = 50)]
    pool: usize,
    #[command(flatten)]
    perturb: PerturbArgs,
    #[arg(long, value_delimiter = ',', default_value = "binding,flexible")]
    strategy: Vec<Strategy>,
    #[arg(long)]
    g: Option<usize>,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    f: Option<u64>,
    #[arg(long = "F")]
    big_f: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<GenKind, String> {
    match s {
        "wellformed" => Ok(GenKind::Wellformed),
        "degenerate" => Ok(GenKind::Degenerate),
        _ => Err(format!("unknown kind {s:?}")),
    }
}

fn warn(msg: String) {
    eprintln!("warning: {msg}");
}

fn load_instance(path: &Path) -> Result<Arc<Instance>, CliError> {
    read_json::<Instance>(path).map(Arc::new)
}

/// Successful runs report whether every search finished.
type Outcome = Result<Status, CliError>;

fn gen_instance(a: GenInstanceArgs) -> Outcome {
    let base = match &a.spec {
        Some(p) => read_json::<GenSpec>(p)?,
        None => GenSpec { kind: a.kind, m: a.m, n: a.n, q: a.q, dist: a.dist, seed: a.seed },
    };
    if a.count > 1 && a.out_dir.is_none() {
        return Err(invalid("--count above 1 needs --out-dir"));
    }
    for i in 0..a.count {
        let spec = GenSpec { seed: base.seed + i, ..base.clone() };
        let inst = generate(&spec).map_err(invalid)?;
        let bytes = to_json(&inst);
        match &a.out_dir {
            Some(dir) => {
                let kind = if spec.kind == GenKind::Degenerate { "degenerate" } else { "wellformed" };
                let dist = serde_json::to_value(spec.dist).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                let name = format!("{kind}-{dist}-m{}-n{}-s{}.json", spec.m, spec.n, spec.seed);
                write_bytes(Some(&dir.join(name)), &bytes)?;
            }
            None => write_bytes(a.out.as_deref(), &bytes)?,
        }
    }
    Ok(Status::Optimal)
}

fn gen_scenario(a: GenScenarioArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let solved = solve_lexopt(inst.clone(), a.limits.limits());
    if solved.status != Status::Optimal {
        warn("initial schedule is the best found, not proven lexicographically optimal".into());
    }
    let perts = gen_perturbations(&inst, &a.perturb.spec());
    let scenario = apply_perturbations(inst, solved.schedule, perts).map_err(invalid)?;
    write_bytes(a.out.as_deref(), &to_json(&scenario.to_doc()))?;
    Ok(solved.status)
}

fn solve_one(inst: Arc<Instance>, a: &SolveArgs) -> Result<SolveReport, CliError> {
    let limits = a.limits.limits();
    let result = match a.method.as_str() {
        "bnb" if a.threads > 1 => solve_lexopt_parallel(inst, limits, a.threads),
        "bnb" => solve_lexopt(inst, limits),
        "sequential" => sequential_method(inst, limits),
        "weighting" => {
            let out = weighting_method(inst, a.base, limits).map_err(invalid)?;
            if out.tie {
                warn("weighted-value tie resolved lexicographically".into());
            }
            out.result
        }
        "highest-rank" => {
            let out = highest_rank(inst, a.capacity, limits).map_err(invalid)?;
            if out.overflowed {
                warn("pool capacity reached; older entries were evicted".into());
            }
            out.result
        }
        other => return Err(invalid(format!("unknown method {other:?}"))),
    };
    Ok(result.report(&a.method))
}

fn solve(a: SolveArgs) -> Outcome {
    let paths = expand(&a.instances)?;
    let mut loaded = Vec::with_capacity(paths.len());
    for p in &paths {
        loaded.push((stem(p), load_instance(p)?));
    }
    let reports = par::map(loaded, |(id, inst)| {
        solve_one(inst, &a).map(|mut r| {
            r.instance = Some(id.clone());
            (id, r)
        })
    });
    let mut all_optimal = true;
    let mut batch = Vec::new();
    for r in reports {
        let (id, report) = r?;
        all_optimal &= report.status == Status::Optimal;
        match &a.out_dir {
            Some(dir) => write_bytes(Some(&dir.join(format!("{id}.{}.json", a.method))), &to_json(&report))?,
            None => batch.push(report),
        }
    }
    if a.out_dir.is_none() {
        let bytes = if batch.len() == 1 { to_json(&batch[0]) } else { to_json(&batch) };
        write_bytes(a.out.as_deref(), &bytes)?;
    }
    Ok(if all_optimal { Status::Optimal } else { Status::Timeout })
}

fn recover(a: RecoverArgs) -> Outcome {
    let doc: ScenarioDoc = read_json(&a.scenario)?;
    let scenario = RecoveryScenario::from_doc(doc).map_err(invalid)?;
    let f = a.f.as_deref().map(parse_rational).transpose().map_err(invalid)?;
    let g = a.g.unwrap_or_else(|| default_budget(scenario.init().n()));
    let report = recovery_report(&scenario, a.strategy, g, f, a.limits.limits()).map_err(invalid)?;
    write_bytes(a.out.as_deref(), &to_json(&report))?;
    Ok(report.status)
}

#[derive(Serialize)]
struct PoolEntry {
    vector: lexsched::CompletionVector,
    weight: String,
    assignment: std::collections::BTreeMap<String, usize>,
}

#[derive(Serialize)]
struct PoolDoc {
    requested: usize,
    optimal_makespan: u64,
    threshold: u64,
    status: Status,
    spread: lexsched::pool::PoolSpread,
    schedules: Vec<PoolEntry>,
}

fn pool(a: PoolArgs) -> Outcome {
    if a.count == 0 {
        return Err(invalid("--count must be at least 1"));
    }
    let inst = load_instance(&a.instance)?;
    let pool = diverse_pool(inst, a.count, a.limits.limits());
    if pool.short() {
        warn(format!("only {} distinct schedules exist under the final threshold", pool.schedules.len()));
    }
    let schedules = pool
        .schedules
        .iter()
        .map(|s| {
            let vector = s.completion_vector();
            let weight = weight_q(&vector).map(|w| exact_string(&w)).unwrap_or_else(|| "overflow".into());
            PoolEntry { vector, weight, assignment: s.to_map() }
        })
        .collect();
    let doc = PoolDoc {
        requested: pool.requested,
        optimal_makespan: pool.optimal_makespan,
        threshold: pool.threshold,
        status: pool.status,
        spread: pool.spread(),
        schedules,
    };
    write_bytes(a.out.as_deref(), &to_json(&doc))?;
    Ok(pool.status)
}

fn profile(a: ProfileArgs) -> Outcome {
    let mut reports = Vec::new();
    for p in expand(&a.reports)? {
        let text = lexsched_cli::files::read_text(&p)?;
        let parse = |source| CliError::Parse { path: p.display().to_string(), source };
        let value: serde_json::Value = serde_json::from_str(&text).map_err(parse)?;
        let items = if value.is_array() {
            serde_json::from_value::<Vec<SolveReport>>(value).map_err(parse)?
        } else {
            vec![serde_json::from_value::<SolveReport>(value).map_err(parse)?]
        };
        reports.extend(items.into_iter().map(|r| (stem(&p), r)));
    }
    let points = ratios(&reports, a.metric)?;
    write_bytes(a.out.as_deref(), &curves_csv(&curves(&points))?)?;
    Ok(Status::Optimal)
}

fn scatter(a: ScatterArgs) -> Outcome {
    let cfg = ScatterConfig {
        pool: a.pool.max(1),
        perturb: a.perturb.spec(),
        strategies: a.strategy.clone(),
        g: a.g,
        limits: a.limits.limits(),
    };
    let mut loaded = Vec::new();
    for p in expand(&a.instances)? {
        loaded.push((stem(&p), load_instance(&p)?));
    }
    let results = par::map(loaded, |(id, inst)| {
        let mut warnings = Vec::new();
        let pts = scatter_instance(&id, inst, &cfg, &mut |w| warnings.push(w));
        (pts, warnings)
    });
    let mut points = Vec::new();
    let mut all_exact = true;
    for (pts, warnings) in results {
        warnings.into_iter().for_each(warn);
        let pts = pts?;
        all_exact &= pts.iter().all(|p| p.exact);
        points.extend(pts);
    }
    write_bytes(a.out.as_deref(), &points_csv(&points)?)?;
    Ok(if all_exact { Status::Optimal } else { Status::Timeout })
}

fn fixture(a: FixtureArgs) -> Outcome {
    let params = FixtureParams { m: a.m, k: a.k, p: a.p, f: a.f, big_f: a.big_f };
    let fx = gen_fixture(a.family, &params).map_err(invalid)?;
    eprintln!("closed-form ratio: {}", exact_string(&fx.closed_form));
    write_bytes(a.out.as_deref(), &to_json(&fx.scenario.to_doc()))?;
    Ok(Status::Optimal)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = par::env_threads() {
        par::init_global(t);
    }
    let outcome = match cli.command {
        Command::Gen(GenCommand::Instance(a)) => gen_instance(a),
        Command::Gen(GenCommand::Scenario(a)) => gen_scenario(a),
        Command::Solve(a) => solve(a),
        Command::Recover(a) => recover(a),
        Command::Pool(a) => pool(a),
        Command::Profile(a) => profile(a),
        Command::Scatter(a) => scatter(a),
        Command::Fixture(a) => fixture(a),
    };
    match outcome {
        Ok(Status::Optimal) => ExitCode::SUCCESS,
        Ok(Status::Timeout) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
