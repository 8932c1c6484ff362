use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use netclust::bench::{open_graph, run_benchmark, ExperimentSpec, DEFAULT_ALPHAS};
use netclust::cluster::Telemetry;
use netclust::diffusion::{extract_cluster, run_diffusion_tracked, DiffusionConfig};
use netclust::fcm::{build_embedding, fcm_fit, most_mixed_block, overlap_report, FcmConfig};
use netclust::partition::best_partition_over;
use netclust::quality::{conductance, modularity};
use netclust::report::{
    self, BlockJson, ClusterJson, EvalBlockJson, EvalJson, OverlapClusterJson, OverlapJson,
    PartitionJson, EVAL_SCHEMA, OVERLAP_SCHEMA, PARTITION_SCHEMA,
};
use netclust::walk::{walk_cluster, BackgroundDegree, TransitionRule, WalkConfig};
use netclust::{Error, Graph, Result, VertexId};

#[derive(Parser)]
#[command(name = "netclust", version, about = "Local graph clustering by truncated diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Diffuse from one seed and extract its cluster.
    Cluster(ClusterArgs),
    /// Run the adaptive energy walk from one seed.
    Walk(WalkArgs),
    /// Cover the whole graph with diffusion clusters.
    Partition(PartitionArgs),
    /// Fuzzy c-means on a multi-center diffusion embedding.
    Overlap(OverlapArgs),
    /// Score a stored partition.
    Eval(EvalArgs),
    /// Telemetry, convergence and modularity series.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GraphArg {
    /// Edge-list file, or builtin:karate, grid:RxC, ring:COUNTxQ, cliques:Q.
    #[arg(long)]
    graph: String,
}

#[derive(Args)]
struct DiffusionArgs {
    #[arg(long, default_value_t = 1e-5)]
    alpha: f64,
    #[arg(long = "max-iters", default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
}

impl DiffusionArgs {
    fn config(&self) -> DiffusionConfig {
        DiffusionConfig {
            alpha: self.alpha,
            max_iterations: self.max_iters,
            convergence_epsilon: self.eps,
        }
    }
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(long)]
    seed: String,
    #[command(flatten)]
    diffusion: DiffusionArgs,
    /// Cluster JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration telemetry CSV.
    #[arg(long = "telemetry-out")]
    telemetry_out: Option<PathBuf>,
    /// Record this vertex's mass every iteration.
    #[arg(long)]
    track: Option<String>,
    /// Include elapsed nanoseconds in the outputs.
    #[arg(long = "wall-clock")]
    wall_clock: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Metropolis,
    Normalized,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackgroundArg {
    Own,
    Seed,
}

#[derive(Args)]
struct WalkArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(long)]
    seed: String,
    /// Phases as f:steps,f:steps; derived from --cluster-size when absent.
    #[arg(long = "f-schedule")]
    f_schedule: Option<String>,
    /// Expected cluster size used for the default schedule.
    #[arg(long = "cluster-size", default_value_t = 10)]
    cluster_size: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 100.0)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long, value_enum, default_value = "metropolis")]
    rule: RuleArg,
    /// Degree used for background energies.
    #[arg(long, value_enum, default_value = "own")]
    background: BackgroundArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// One or more truncation parameters; the best by modularity is kept.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-5])]
    alpha: Vec<f64>,
    #[arg(long = "max-iters", default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
    /// Partition CSV (vertex,block).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Partition JSON destination; stdout when absent.
    #[arg(long = "json-out")]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct OverlapArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Comma-separated center labels, or auto:D for D partition seeds.
    #[arg(long, default_value = "auto:2")]
    centers: String,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 2.0)]
    m: f64,
    /// Truncation parameter of the embedding diffusions.
    #[arg(long, default_value_t = 0.02)]
    alpha: f64,
    /// Minimum membership for a vertex to join a cluster.
    #[arg(long, default_value_t = 0.3)]
    threshold: f64,
    #[arg(long, default_value_t = 0)]
    rng: u64,
    #[arg(long = "max-iters", default_value_t = 300)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Membership CSV (vertex,c0,...).
    #[arg(long = "memberships-out")]
    memberships_out: Option<PathBuf>,
    /// Overlap JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// CSV of vertex,block rows.
    #[arg(long)]
    partition: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(long = "telemetry-out")]
    telemetry_out: PathBuf,
    #[arg(long = "convergence-out")]
    convergence_out: Option<PathBuf>,
    /// Summary JSON destination; stdout when absent.
    #[arg(long = "summary-out")]
    summary_out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALPHAS.to_vec())]
    alphas: Vec<f64>,
    /// Number of highest-degree seeds.
    #[arg(long = "seeds", default_value_t = 3)]
    seed_count: usize,
    /// Explicit seed label; repeatable, overrides --seeds.
    #[arg(long = "seed")]
    seed: Vec<String>,
    #[arg(long)]
    track: Option<String>,
    #[arg(long = "max-iters", default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
    /// Skip the whole-graph partition sweep.
    #[arg(long = "no-partitions")]
    no_partitions: bool,
    #[arg(long = "wall-clock")]
    wall_clock: bool,
}

fn load(arg: &GraphArg) -> Result<Graph> {
    let (g, stats) = open_graph(&arg.graph)?;
    if let Some(s) = stats {
        if s.self_loops_dropped + s.duplicates_dropped > 0 {
            eprintln!(
                "note: dropped {} self-loops and {} duplicate edges",
                s.self_loops_dropped, s.duplicates_dropped
            );
        }
    }
    Ok(g)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cluster(a: &ClusterArgs) -> Result<()> {
    let g = load(&a.graph)?;
    let seed = g.vertex_by_label(&a.seed)?;
    let tracked = a.track.as_deref().map(|l| g.vertex_by_label(l)).transpose()?;
    let cfg = a.diffusion.config();
    let run = run_diffusion_tracked(&g, seed, &cfg, tracked)?;
    let mut rep = extract_cluster(&g, &run.mass)?;
    rep.iterations_used = run.iterations;
    rep.converged = run.converged;
    if let Some(path) = &a.telemetry_out {
        report::write_telemetry_csv(create(path)?, &run.telemetry, a.wall_clock)?;
    }
    rep.telemetry = Telemetry::Diffusion(run.telemetry);
    let params = json!({
        "alpha": cfg.alpha,
        "max_iterations": cfg.max_iterations,
        "convergence_epsilon": cfg.convergence_epsilon,
    });
    let doc = ClusterJson::new(&g, &rep, "diffusion", params, a.wall_clock);
    let mut out = sink(a.out.as_deref())?;
    report::write_json(&mut out, &doc)?;
    out.flush()?;
    Ok(())
}

fn walk(a: &WalkArgs) -> Result<()> {
    let g = load(&a.graph)?;
    let seed = g.vertex_by_label(&a.seed)?;
    let mut cfg = WalkConfig::for_cluster_size(a.cluster_size).with_rng_seed(a.rng);
    if let Some(s) = &a.f_schedule {
        cfg.f_schedule = WalkConfig::parse_schedule(s)?;
    }
    cfg.alpha = a.alpha;
    cfg.beta = a.beta;
    cfg.rule = match a.rule {
        RuleArg::Metropolis => TransitionRule::Metropolis,
        RuleArg::Normalized => TransitionRule::NeighborNormalized,
    };
    cfg.background = match a.background {
        BackgroundArg::Own => BackgroundDegree::Own,
        BackgroundArg::Seed => BackgroundDegree::Seed,
    };
    let rep = walk_cluster(&g, seed, &cfg)?;
    let schedule: Vec<_> = cfg
        .f_schedule
        .iter()
        .map(|p| json!({ "f": p.f, "steps": p.steps }))
        .collect();
    let params = json!({
        "alpha": cfg.alpha,
        "beta": cfg.beta,
        "f_schedule": schedule,
        "rng_seed": cfg.rng_seed,
        "rule": match cfg.rule {
            TransitionRule::Metropolis => "metropolis",
            TransitionRule::NeighborNormalized => "normalized",
        },
        "background": match cfg.background {
            BackgroundDegree::Own => "own",
            BackgroundDegree::Seed => "seed",
        },
    });
    let doc = ClusterJson::new(&g, &rep, "walk", params, false);
    let mut out = sink(a.out.as_deref())?;
    report::write_json(&mut out, &doc)?;
    out.flush()?;
    Ok(())
}

fn labels(g: &Graph, vs: &[VertexId]) -> Vec<String> {
    vs.iter().map(|&v| g.label(v).to_string()).collect()
}

fn partition(a: &PartitionArgs) -> Result<()> {
    let g = load(&a.graph)?;
    let base = DiffusionConfig {
        max_iterations: a.max_iters,
        convergence_epsilon: a.eps,
        ..Default::default()
    };
    let (best, entries) = best_partition_over(&g, &a.alpha, &base)?;
    let entry = &entries[best];
    let p = &entry.run.partition;
    if let Some(path) = &a.out {
        report::write_partition_csv(create(path)?, &g, p)?;
    }
    let blocks = p
        .blocks()
        .iter()
        .enumerate()
        .map(|(b, members)| BlockJson {
            seed: Some(g.label(entry.run.block_seeds[b]).to_string()),
            size: members.len(),
            conductance: conductance(&g, members).ok(),
            members: labels(&g, members),
        })
        .collect();
    let doc = PartitionJson {
        schema: PARTITION_SCHEMA,
        alpha: Some(entry.alpha),
        vertex_count: g.vertex_count(),
        block_count: p.block_count(),
        modularity: entry.modularity,
        demoted_seeds: labels(&g, &entry.run.demoted_seeds),
        blocks,
    };
    let mut out = sink(a.json_out.as_deref())?;
    report::write_json(&mut out, &doc)?;
    out.flush()?;
    Ok(())
}

fn overlap(a: &OverlapArgs) -> Result<()> {
    let g = load(&a.graph)?;
    let embed_cfg = DiffusionConfig::with_alpha(a.alpha);
    let centers: Vec<VertexId> = match a.centers.strip_prefix("auto:") {
        Some(d) => {
            let d: usize = d
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad center count {d:?}")))?;
            let run = netclust::partition_graph(&g, &embed_cfg)?;
            if run.block_seeds.len() < d {
                return Err(Error::InvalidParameter(format!(
                    "asked for {d} centers but the partition has only {} blocks",
                    run.block_seeds.len()
                )));
            }
            run.block_seeds[..d].to_vec()
        }
        None => a
            .centers
            .split(',')
            .map(|l| g.vertex_by_label(l.trim()))
            .collect::<Result<_>>()?,
    };
    let e = build_embedding(&g, &centers, &embed_cfg)?;
    let cfg = FcmConfig {
        k: a.k,
        m: a.m,
        tol: a.tol,
        max_iters: a.max_iters,
        rng_seed: a.rng,
    };
    let msm = fcm_fit(&e, &cfg)?;
    let sets = overlap_report(&msm, a.threshold)?;
    if let Some(path) = &a.memberships_out {
        report::write_membership_csv(create(path)?, &g, &msm)?;
    }
    let doc = OverlapJson {
        schema: OVERLAP_SCHEMA,
        centers: labels(&g, &centers),
        k: msm.k(),
        m: msm.m,
        threshold: a.threshold,
        iterations: msm.iterations,
        converged: msm.converged,
        objective: msm.objective(),
        objective_history: msm.objective_history.clone(),
        most_mixed: most_mixed_block(&e, &msm),
        clusters: sets
            .iter()
            .enumerate()
            .map(|(j, vs)| OverlapClusterJson {
                cluster: j,
                members: labels(&g, vs),
            })
            .collect(),
    };
    let mut out = sink(a.out.as_deref())?;
    report::write_json(&mut out, &doc)?;
    out.flush()?;
    Ok(())
}

fn eval(a: &EvalArgs) -> Result<()> {
    let g = load(&a.graph)?;
    let p = report::read_partition_csv(File::open(&a.partition)?, &g)?;
    let q = modularity(&g, &p)?;
    let doc = EvalJson {
        schema: EVAL_SCHEMA,
        vertex_count: g.vertex_count(),
        block_count: p.block_count(),
        modularity: q,
        blocks: p
            .blocks()
            .iter()
            .enumerate()
            .map(|(b, members)| EvalBlockJson {
                block: b,
                size: members.len(),
                conductance: conductance(&g, members).ok(),
            })
            .collect(),
    };
    let mut out = sink(a.out.as_deref())?;
    report::write_json(&mut out, &doc)?;
    out.flush()?;
    Ok(())
}

fn bench(a: &BenchArgs) -> Result<()> {
    let g = load(&a.graph)?;
    let seeds = a
        .seed
        .iter()
        .map(|l| g.vertex_by_label(l))
        .collect::<Result<Vec<_>>>()?;
    let tracked = a.track.as_deref().map(|l| g.vertex_by_label(l)).transpose()?;
    let spec = ExperimentSpec {
        alphas: a.alphas.clone(),
        seed_count: a.seed_count,
        seeds,
        tracked,
        max_iterations: a.max_iters,
        convergence_epsilon: a.eps,
        partitions: !a.no_partitions,
    };
    let rep = run_benchmark(&g, &spec)?;
    rep.write_telemetry_csv(create(&a.telemetry_out)?, &g, a.wall_clock)?;
    if let Some(path) = &a.convergence_out {
        rep.write_convergence_csv(create(path)?, &g)?;
    }
    let mut out = sink(a.summary_out.as_deref())?;
    report::write_json(&mut out, &rep.summary(&g))?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Cluster(a) => cluster(a),
        Command::Walk(a) => walk(a),
        Command::Partition(a) => partition(a),
        Command::Overlap(a) => overlap(a),
        Command::Eval(a) => eval(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
