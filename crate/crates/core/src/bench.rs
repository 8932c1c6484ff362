//! Experiment harness: per-iteration telemetry and convergence series for a
//! handful of seeds, plus partition modularity across a range of `alpha`.

use std::io::Write;

use serde::Serialize;

use crate::cluster::IterationRecord;
use crate::datasets;
use crate::diffusion::{extract_cluster, run_diffusion_tracked, DiffusionConfig};
use crate::error::{Error, Result};
use crate::generators;
use crate::graph::{load_edge_list, Graph, LoadOptions, LoadStats, VertexId};
use crate::partition::best_partition_over;
use crate::quality::conductance;
use crate::report::BENCH_SCHEMA;

pub const DEFAULT_ALPHAS: [f64; 4] = [1e-3, 1e-5, 1e-6, 1e-7];

/// Open a graph from a path or a named source:
/// `builtin:karate`, `grid:RxC`, `ring:COUNTxQ`, `cliques:Q` (two bridged
/// cliques). Anything else is read as an edge-list file.
pub fn open_graph(source: &str) -> Result<(Graph, Option<LoadStats>)> {
    if let Some(name) = source.strip_prefix("builtin:") {
        let g = datasets::builtin(name)
            .ok_or_else(|| Error::invalid(format!("unknown builtin dataset {name:?}")))??;
        return Ok((g, None));
    }
    let dims = |spec: &str| -> Result<(usize, usize)> {
        let (a, b) = spec
            .split_once('x')
            .ok_or_else(|| Error::invalid(format!("expected AxB, got {spec:?}")))?;
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::invalid(format!("bad dimension {s:?} in {spec:?}")))
        };
        Ok((parse(a)?, parse(b)?))
    };
    if let Some(spec) = source.strip_prefix("grid:") {
        let (r, c) = dims(spec)?;
        if r * c < 2 {
            return Err(Error::EmptyGraph);
        }
        return Ok((generators::grid(r, c), None));
    }
    if let Some(spec) = source.strip_prefix("ring:") {
        let (count, q) = dims(spec)?;
        if count < 2 || q < 2 {
            return Err(Error::invalid("ring needs at least 2 cliques of size 2"));
        }
        return Ok((generators::ring_of_cliques(count, q), None));
    }
    if let Some(q) = source.strip_prefix("cliques:") {
        let q: usize = q
            .parse()
            .map_err(|_| Error::invalid(format!("bad clique size {q:?}")))?;
        if q < 2 {
            return Err(Error::invalid("clique size must be at least 2"));
        }
        return Ok((generators::two_cliques_bridge(q), None));
    }
    let file = std::fs::File::open(source)?;
    let (g, stats) = load_edge_list(std::io::BufReader::new(file), &LoadOptions::default())?;
    Ok((g, Some(stats)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub alphas: Vec<f64>,
    /// How many of the highest-degree vertices to use as seeds.
    pub seed_count: usize,
    /// Explicit seeds; overrides `seed_count` when nonempty.
    pub seeds: Vec<VertexId>,
    /// Vertex whose mass is recorded each iteration; defaults to each seed.
    pub tracked: Option<VertexId>,
    pub max_iterations: usize,
    pub convergence_epsilon: f64,
    /// Also sweep `alphas` for whole-graph partitions and report modularity.
    pub partitions: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let d = DiffusionConfig::default();
        ExperimentSpec {
            alphas: DEFAULT_ALPHAS.to_vec(),
            seed_count: 3,
            seeds: Vec::new(),
            tracked: None,
            max_iterations: d.max_iterations,
            convergence_epsilon: d.convergence_epsilon,
            partitions: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeedRun {
    pub alpha: f64,
    pub seed: VertexId,
    pub tracked: VertexId,
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub cluster_size: usize,
    pub conductance: f64,
}

#[derive(Debug, Clone)]
pub struct PartitionSummary {
    pub alpha: f64,
    pub block_count: usize,
    pub modularity: f64,
    pub mean_conductance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub runs: Vec<SeedRun>,
    pub partitions: Vec<PartitionSummary>,
    pub best_partition: Option<usize>,
}

/// `count` highest-degree vertices, lowest index first on ties.
pub fn top_degree_vertices(g: &Graph, count: usize) -> Vec<VertexId> {
    let mut order: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| g.degree(v) > 0).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    order.truncate(count);
    order
}

pub fn run_benchmark(g: &Graph, spec: &ExperimentSpec) -> Result<BenchReport> {
    if spec.alphas.is_empty() {
        return Err(Error::invalid("no alpha values given"));
    }
    let seeds = if spec.seeds.is_empty() {
        top_degree_vertices(g, spec.seed_count)
    } else {
        spec.seeds.clone()
    };
    if seeds.is_empty() {
        return Err(Error::invalid("no seeds to run"));
    }
    let mut runs = Vec::new();
    for &alpha in &spec.alphas {
        let cfg = DiffusionConfig {
            alpha,
            max_iterations: spec.max_iterations,
            convergence_epsilon: spec.convergence_epsilon,
        };
        for &seed in &seeds {
            let tracked = spec.tracked.unwrap_or(seed);
            let run = run_diffusion_tracked(g, seed, &cfg, Some(tracked))?;
            let cluster = extract_cluster(g, &run.mass)?;
            runs.push(SeedRun {
                alpha,
                seed,
                tracked,
                records: run.telemetry,
                converged: run.converged,
                cluster_size: cluster.len(),
                conductance: cluster.conductance,
            });
        }
    }

    let mut partitions = Vec::new();
    let mut best_partition = None;
    if spec.partitions {
        let base = DiffusionConfig {
            max_iterations: spec.max_iterations,
            convergence_epsilon: spec.convergence_epsilon,
            ..Default::default()
        };
        let (best, entries) = best_partition_over(g, &spec.alphas, &base)?;
        best_partition = Some(best);
        for e in entries {
            let mut conds = Vec::new();
            for block in e.run.partition.blocks() {
                if let Ok(c) = conductance(g, &block) {
                    conds.push(c);
                }
            }
            partitions.push(PartitionSummary {
                alpha: e.alpha,
                block_count: e.run.partition.block_count(),
                modularity: e.modularity,
                mean_conductance: (!conds.is_empty())
                    .then(|| conds.iter().sum::<f64>() / conds.len() as f64),
            });
        }
    }
    Ok(BenchReport {
        runs,
        partitions,
        best_partition,
    })
}

impl BenchReport {
    /// Columns: `alpha,seed,iteration,support_size,support_volume,work,truncated`,
    /// plus `elapsed_ns` when `wall_clock` is set.
    pub fn write_telemetry_csv<W: Write>(&self, w: W, g: &Graph, wall_clock: bool) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec![
            "alpha",
            "seed",
            "iteration",
            "support_size",
            "support_volume",
            "work",
            "truncated",
        ];
        if wall_clock {
            header.push("elapsed_ns");
        }
        out.write_record(&header)?;
        for run in &self.runs {
            for r in &run.records {
                let mut row = vec![
                    run.alpha.to_string(),
                    g.label(run.seed).to_string(),
                    r.iteration.to_string(),
                    r.support_size.to_string(),
                    r.support_volume.to_string(),
                    r.work.to_string(),
                    r.truncated.to_string(),
                ];
                if wall_clock {
                    row.push(r.elapsed_ns.to_string());
                }
                out.write_record(&row)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Columns: `alpha,seed,tracked,iteration,l1_change,tracked_mass`.
    pub fn write_convergence_csv<W: Write>(&self, w: W, g: &Graph) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["alpha", "seed", "tracked", "iteration", "l1_change", "tracked_mass"])?;
        for run in &self.runs {
            for r in &run.records {
                out.write_record([
                    run.alpha.to_string(),
                    g.label(run.seed).to_string(),
                    g.label(run.tracked).to_string(),
                    r.iteration.to_string(),
                    r.l1_change.to_string(),
                    r.tracked_mass.unwrap_or(0.0).to_string(),
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn summary(&self, g: &Graph) -> BenchSummary {
        BenchSummary {
            schema: BENCH_SCHEMA,
            vertex_count: g.vertex_count(),
            edge_count: g.edge_count(),
            clusters: self
                .runs
                .iter()
                .map(|r| ClusterSummary {
                    alpha: r.alpha,
                    seed: g.label(r.seed).to_string(),
                    iterations: r.records.len(),
                    converged: r.converged,
                    final_l1_change: r.records.last().map(|x| x.l1_change),
                    max_support_volume: r.records.iter().map(|x| x.support_volume).max().unwrap_or(0),
                    total_work: r.records.iter().map(|x| x.work).sum(),
                    size: r.cluster_size,
                    conductance: r.conductance,
                })
                .collect(),
            partitions: self
                .partitions
                .iter()
                .map(|p| PartitionSummaryJson {
                    alpha: p.alpha,
                    block_count: p.block_count,
                    modularity: p.modularity,
                    mean_conductance: p.mean_conductance,
                })
                .collect(),
            best_alpha: self.best_partition.map(|i| self.partitions[i].alpha),
            best_modularity: self.best_partition.map(|i| self.partitions[i].modularity),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterSummary {
    pub alpha: f64,
    pub seed: String,
    pub iterations: usize,
    pub converged: bool,
    pub final_l1_change: Option<f64>,
    pub max_support_volume: usize,
    pub total_work: usize,
    pub size: usize,
    pub conductance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionSummaryJson {
    pub alpha: f64,
    pub block_count: usize,
    pub modularity: f64,
    pub mean_conductance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub schema: &'static str,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub clusters: Vec<ClusterSummary>,
    pub partitions: Vec<PartitionSummaryJson>,
    pub best_alpha: Option<f64>,
    pub best_modularity: Option<f64>,
}
