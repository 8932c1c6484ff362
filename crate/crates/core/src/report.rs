//! Serialized outputs: versioned JSON documents and CSV tables.
//!
//! Every JSON document carries a `schema` field; readers should reject
//! schemas they do not know. Floats are written in shortest round-trip form,
//! so identical inputs always produce identical bytes.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::Serialize;

use crate::cluster::{ClusterReport, IterationRecord, Telemetry};
use crate::error::{Error, Result};
use crate::fcm::MembershipMatrix;
use crate::graph::Graph;
use crate::quality::Partition;

pub const CLUSTER_SCHEMA: &str = "netclust.cluster.v1";
pub const PARTITION_SCHEMA: &str = "netclust.partition.v1";
pub const OVERLAP_SCHEMA: &str = "netclust.overlap.v1";
pub const BENCH_SCHEMA: &str = "netclust.bench.v1";
pub const EVAL_SCHEMA: &str = "netclust.eval.v1";

#[derive(Debug, Clone, Serialize)]
pub struct MemberJson {
    pub label: String,
    pub belongingness: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationJson {
    pub iteration: usize,
    pub l1_change: f64,
    pub support_size: usize,
    pub support_volume: usize,
    pub work: usize,
    pub truncated: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ns: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseJson {
    pub f: f64,
    pub steps: usize,
    pub moves_accepted: usize,
    /// Arrivals per vertex label, in vertex index order.
    pub visits: Vec<(String, u64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterJson {
    pub schema: &'static str,
    pub method: String,
    pub seed: String,
    pub parameters: serde_json::Value,
    pub size: usize,
    pub conductance: f64,
    pub cut: usize,
    pub volume: usize,
    pub degenerate: bool,
    pub support_saturated: bool,
    pub iterations: usize,
    pub converged: bool,
    pub members: Vec<MemberJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diffusion_iterations: Vec<IterationJson>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub walk_phases: Vec<PhaseJson>,
}

fn iteration_json(r: &IterationRecord, wall_clock: bool) -> IterationJson {
    IterationJson {
        iteration: r.iteration,
        l1_change: r.l1_change,
        support_size: r.support_size,
        support_volume: r.support_volume,
        work: r.work,
        truncated: r.truncated,
        elapsed_ns: wall_clock.then_some(r.elapsed_ns),
    }
}

impl ClusterJson {
    /// `wall_clock` controls whether timings are included; without them the
    /// document is a pure function of the inputs.
    pub fn new(
        g: &Graph,
        report: &ClusterReport,
        method: &str,
        parameters: serde_json::Value,
        wall_clock: bool,
    ) -> ClusterJson {
        let members = report
            .members
            .iter()
            .zip(&report.belongingness)
            .map(|(&v, &b)| MemberJson {
                label: g.label(v).to_string(),
                belongingness: b,
            })
            .collect();
        let (diffusion_iterations, walk_phases) = match &report.telemetry {
            Telemetry::None => (Vec::new(), Vec::new()),
            Telemetry::Diffusion(recs) => (
                recs.iter().map(|r| iteration_json(r, wall_clock)).collect(),
                Vec::new(),
            ),
            Telemetry::Walk(phases) => (
                Vec::new(),
                phases
                    .iter()
                    .map(|p| PhaseJson {
                        f: p.f,
                        steps: p.steps,
                        moves_accepted: p.moves_accepted,
                        visits: p
                            .visits
                            .iter()
                            .map(|(&v, &c)| (g.label(v).to_string(), c))
                            .collect(),
                    })
                    .collect(),
            ),
        };
        ClusterJson {
            schema: CLUSTER_SCHEMA,
            method: method.to_string(),
            seed: g.label(report.seed).to_string(),
            parameters,
            size: report.len(),
            conductance: report.conductance,
            cut: report.cut,
            volume: report.volume,
            degenerate: report.degenerate,
            support_saturated: report.support_saturated,
            iterations: report.iterations_used,
            converged: report.converged,
            members,
            diffusion_iterations,
            walk_phases,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockJson {
    pub seed: Option<String>,
    pub size: usize,
    pub conductance: Option<f64>,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionJson {
    pub schema: &'static str,
    pub alpha: Option<f64>,
    pub vertex_count: usize,
    pub block_count: usize,
    pub modularity: f64,
    pub demoted_seeds: Vec<String>,
    pub blocks: Vec<BlockJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalBlockJson {
    pub block: usize,
    pub size: usize,
    pub conductance: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalJson {
    pub schema: &'static str,
    pub vertex_count: usize,
    pub block_count: usize,
    pub modularity: f64,
    pub blocks: Vec<EvalBlockJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapClusterJson {
    pub cluster: usize,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapJson {
    pub schema: &'static str,
    pub centers: Vec<String>,
    pub k: usize,
    pub m: f64,
    pub threshold: f64,
    pub iterations: usize,
    pub converged: bool,
    pub objective: Option<f64>,
    pub objective_history: Vec<f64>,
    /// Cluster whose center sits most evenly between the embedding centers.
    pub most_mixed: usize,
    pub clusters: Vec<OverlapClusterJson>,
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Per-iteration diffusion telemetry.
///
/// Columns: `iteration,support_size,support_volume,work,truncated,l1_change`,
/// then `tracked_mass` when any record tracks a vertex, then `elapsed_ns`
/// when `wall_clock` is set.
pub fn write_telemetry_csv<W: Write>(
    w: W,
    records: &[IterationRecord],
    wall_clock: bool,
) -> Result<()> {
    let tracked = records.iter().any(|r| r.tracked_mass.is_some());
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec![
        "iteration",
        "support_size",
        "support_volume",
        "work",
        "truncated",
        "l1_change",
    ];
    if tracked {
        header.push("tracked_mass");
    }
    if wall_clock {
        header.push("elapsed_ns");
    }
    out.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.iteration.to_string(),
            r.support_size.to_string(),
            r.support_volume.to_string(),
            r.work.to_string(),
            r.truncated.to_string(),
            r.l1_change.to_string(),
        ];
        if tracked {
            row.push(r.tracked_mass.map(|x| x.to_string()).unwrap_or_default());
        }
        if wall_clock {
            row.push(r.elapsed_ns.to_string());
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Partition as `vertex,block` rows in vertex index order, with a header.
pub fn write_partition_csv<W: Write>(w: W, g: &Graph, p: &Partition) -> Result<()> {
    if p.vertex_count() != g.vertex_count() {
        return Err(Error::invalid("partition does not match the graph"));
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["vertex", "block"])?;
    for v in 0..g.vertex_count() {
        out.write_record([g.label(v), &p.block_of(v).to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Read `vertex,block` rows. A header row is optional; block ids may be any
/// strings and are renumbered by first appearance in vertex index order.
/// Every vertex of `g` must appear exactly once.
pub fn read_partition_csv<R: Read>(r: R, g: &Graph) -> Result<Partition> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(r);
    let n = g.vertex_count();
    let mut block_name: Vec<Option<String>> = vec![None; n];
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(i + 1);
        if rec.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        if i == 0 && &rec[0] == "vertex" && &rec[1] == "block" {
            continue;
        }
        let v = g.vertex_by_label(&rec[0])?;
        if block_name[v].is_some() {
            return Err(Error::Parse {
                line,
                message: format!("vertex {} assigned twice", &rec[0]),
            });
        }
        block_name[v] = Some(rec[1].to_string());
    }
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut assignment = Vec::with_capacity(n);
    for (v, name) in block_name.into_iter().enumerate() {
        let name = name.ok_or_else(|| {
            Error::invalid(format!("vertex {} has no block", g.label(v)))
        })?;
        let next = ids.len();
        assignment.push(*ids.entry(name).or_insert(next));
    }
    Ok(Partition::from_assignment(assignment))
}

/// Membership matrix as `vertex,c0,...,c{k-1}`.
pub fn write_membership_csv<W: Write>(w: W, g: &Graph, msm: &MembershipMatrix) -> Result<()> {
    if msm.rows() != g.vertex_count() {
        return Err(Error::invalid("membership matrix does not match the graph"));
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["vertex".to_string()];
    header.extend((0..msm.k()).map(|j| format!("c{j}")));
    out.write_record(&header)?;
    for i in 0..msm.rows() {
        let mut row = vec![g.label(i).to_string()];
        row.extend(msm.row(i).iter().map(|x| x.to_string()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
