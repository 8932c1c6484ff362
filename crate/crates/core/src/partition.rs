//! Whole-graph partitions assembled from repeated local diffusion clusters.

use crate::diffusion::{diffusion_cluster, DiffusionConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::quality::{modularity, Partition};

#[derive(Debug, Clone)]
pub struct PartitionRun {
    pub partition: Partition,
    /// Seed that opened each block, indexed by block id.
    pub block_seeds: Vec<VertexId>,
    /// Seeds whose cluster was degenerate and that became singletons.
    pub demoted_seeds: Vec<VertexId>,
    /// Number of diffusion runs performed.
    pub runs: usize,
}

/// Cover the graph with local clusters.
///
/// The highest-degree uncovered vertex (lowest index on ties) seeds the next
/// diffusion; its cluster becomes a new block. A vertex that is already
/// covered moves to the new block only if its belongingness there is higher
/// than in its current block. Isolated vertices and seeds with degenerate
/// clusters become singleton blocks. Blocks emptied by moves are dropped.
pub fn partition_graph(g: &Graph, cfg: &DiffusionConfig) -> Result<PartitionRun> {
    cfg.validate()?;
    let n = g.vertex_count();
    let mut by_degree: Vec<VertexId> = (0..n).collect();
    by_degree.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));

    let mut block: Vec<Option<usize>> = vec![None; n];
    let mut best_belonging = vec![0.0f64; n];
    let mut seeds: Vec<VertexId> = Vec::new();
    let mut demoted = Vec::new();
    let mut runs = 0;

    for &seed in &by_degree {
        if block[seed].is_some() {
            continue;
        }
        let id = seeds.len();
        seeds.push(seed);
        if g.degree(seed) == 0 {
            block[seed] = Some(id);
            best_belonging[seed] = 1.0;
            continue;
        }
        let report = diffusion_cluster(g, seed, cfg)?;
        runs += 1;
        if report.degenerate {
            demoted.push(seed);
            block[seed] = Some(id);
            best_belonging[seed] = 1.0;
            continue;
        }
        for (&v, &b) in report.members.iter().zip(&report.belongingness) {
            if block[v].is_none() || b > best_belonging[v] {
                block[v] = Some(id);
                best_belonging[v] = b;
            }
        }
        debug_assert_eq!(block[seed], Some(id));
    }

    let assignment: Vec<usize> = block
        .into_iter()
        .map(|b| b.ok_or_else(|| Error::invalid("vertex left uncovered")))
        .collect::<Result<_>>()?;
    // Renumber surviving blocks in creation order.
    let mut alive = vec![false; seeds.len()];
    for &b in &assignment {
        alive[b] = true;
    }
    let mut remap = vec![usize::MAX; seeds.len()];
    let mut block_seeds = Vec::new();
    for (b, &seed) in seeds.iter().enumerate() {
        if alive[b] {
            remap[b] = block_seeds.len();
            block_seeds.push(seed);
        }
    }
    let partition = Partition::from_blocks(n, &{
        let mut blocks = vec![Vec::new(); block_seeds.len()];
        for (v, &b) in assignment.iter().enumerate() {
            blocks[remap[b]].push(v);
        }
        blocks
    })?;
    Ok(PartitionRun {
        partition,
        block_seeds,
        demoted_seeds: demoted,
        runs,
    })
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub alpha: f64,
    pub modularity: f64,
    pub run: PartitionRun,
}

/// Partition once per `alpha` and report each result's modularity; the best
/// entry is returned separately (first on ties).
pub fn best_partition_over(
    g: &Graph,
    alphas: &[f64],
    base: &DiffusionConfig,
) -> Result<(usize, Vec<SweepEntry>)> {
    if alphas.is_empty() {
        return Err(Error::invalid("no alpha values to sweep"));
    }
    let mut entries = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let cfg = DiffusionConfig { alpha, ..*base };
        let run = partition_graph(g, &cfg)?;
        let q = modularity(g, &run.partition)?;
        entries.push(SweepEntry {
            alpha,
            modularity: q,
            run,
        });
    }
    let best = (0..entries.len())
        .fold(0, |b, i| if entries[i].modularity > entries[b].modularity { i } else { b });
    Ok((best, entries))
}
