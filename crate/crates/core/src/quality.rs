//! Cluster and partition quality: conductance and modularity.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Largest graph [`min_conductance_bruteforce`] will enumerate.
pub const BRUTEFORCE_LIMIT: usize = 20;

/// Cut size and volume of a set, the two counts conductance is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutStats {
    pub cut: usize,
    pub volume: usize,
    pub complement_volume: usize,
}

impl CutStats {
    pub fn of(g: &Graph, set: &[VertexId]) -> Result<CutStats> {
        let members: HashSet<VertexId> = set.iter().copied().collect();
        let mut cut = 0;
        let mut volume = 0;
        for &u in &members {
            g.check_vertex(u)?;
            volume += g.degree(u);
            cut += g.neighbors(u).filter(|w| !members.contains(w)).count();
        }
        Ok(CutStats {
            cut,
            volume,
            complement_volume: g.total_volume() - volume,
        })
    }

    /// `None` when either side has zero volume.
    pub fn conductance(&self) -> Option<f64> {
        let denom = self.volume.min(self.complement_volume);
        (denom > 0).then(|| self.cut as f64 / denom as f64)
    }
}

/// `|E(S, V-S)| / min(vol(S), vol(V-S))`.
pub fn conductance(g: &Graph, set: &[VertexId]) -> Result<f64> {
    CutStats::of(g, set)?
        .conductance()
        .ok_or(Error::UndefinedConductance)
}

/// Exhaustive minimum-conductance set over all `2^n` subsets.
///
/// Returns the smaller-volume side of the optimal cut. Only meant as a test
/// oracle; refuses graphs with more than [`BRUTEFORCE_LIMIT`] vertices.
pub fn min_conductance_bruteforce(g: &Graph) -> Result<(Vec<VertexId>, f64)> {
    let n = g.vertex_count();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            vertex_count: n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let adjacency: Vec<u32> = (0..n)
        .map(|u| g.neighbors(u).fold(0u32, |acc, v| acc | (1 << v)))
        .collect();
    let degree = g.degrees();
    let total = g.total_volume();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };

    let mut best: Option<(u32, usize, usize)> = None;
    // Only masks without the top vertex: every cut appears once, on one side.
    let limit = 1u32 << (n.saturating_sub(1));
    for mask in 1..limit {
        let mut cut = 0;
        let mut volume = 0;
        let mut bits = mask;
        while bits != 0 {
            let u = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            volume += degree[u];
            cut += (adjacency[u] & !mask & full).count_ones() as usize;
        }
        let denom = volume.min(total - volume);
        if denom == 0 {
            continue;
        }
        let better = match best {
            None => true,
            // cut/denom < best_cut/best_denom, compared exactly
            Some((_, bc, bd)) => cut * bd < bc * denom,
        };
        if better {
            best = Some((mask, cut, denom));
        }
    }
    let (mask, cut, denom) = best.ok_or(Error::UndefinedConductance)?;
    let side: Vec<VertexId> = (0..n).filter(|&u| mask & (1 << u) != 0).collect();
    let volume: usize = side.iter().map(|&u| degree[u]).sum();
    let side = if volume <= total - volume {
        side
    } else {
        (0..n).filter(|&u| mask & (1 << u) == 0).collect()
    };
    Ok((side, cut as f64 / denom as f64))
}

/// Assignment of every vertex to exactly one nonempty block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    block_count: usize,
}

impl Partition {
    /// Block ids are relabelled to `0..k` in order of first appearance, so
    /// any labelling of blocks is accepted.
    pub fn from_assignment<I: IntoIterator<Item = usize>>(assignment: I) -> Partition {
        let mut remap = std::collections::HashMap::new();
        let assignment = assignment
            .into_iter()
            .map(|b| {
                let next = remap.len();
                *remap.entry(b).or_insert(next)
            })
            .collect();
        Partition {
            assignment,
            block_count: remap.len(),
        }
    }

    pub fn from_blocks(vertex_count: usize, blocks: &[Vec<VertexId>]) -> Result<Partition> {
        let mut assignment = vec![usize::MAX; vertex_count];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::invalid(format!("block {b} is empty")));
            }
            for &v in block {
                if v >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        index: v,
                        vertex_count,
                    });
                }
                if assignment[v] != usize::MAX {
                    return Err(Error::invalid(format!("vertex {v} is in two blocks")));
                }
                assignment[v] = b;
            }
        }
        if let Some(v) = assignment.iter().position(|&b| b == usize::MAX) {
            return Err(Error::invalid(format!("vertex {v} is not covered")));
        }
        Ok(Partition::from_assignment(assignment))
    }

    pub fn whole(vertex_count: usize) -> Partition {
        Partition::from_assignment(std::iter::repeat_n(0, vertex_count))
    }

    pub fn singletons(vertex_count: usize) -> Partition {
        Partition::from_assignment(0..vertex_count)
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn block_of(&self, v: VertexId) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn blocks(&self) -> Vec<Vec<VertexId>> {
        let mut blocks = vec![Vec::new(); self.block_count];
        for (v, &b) in self.assignment.iter().enumerate() {
            blocks[b].push(v);
        }
        blocks
    }
}

/// Newman modularity `Q = sum_S [ m_S/m - (vol(S)/2m)^2 ]`.
pub fn modularity(g: &Graph, partition: &Partition) -> Result<f64> {
    if partition.vertex_count() != g.vertex_count() {
        return Err(Error::invalid(format!(
            "partition covers {} vertices, graph has {}",
            partition.vertex_count(),
            g.vertex_count()
        )));
    }
    let m = g.edge_count();
    if m == 0 {
        return Ok(0.0);
    }
    let k = partition.block_count();
    let mut internal = vec![0usize; k];
    let mut volume = vec![0usize; k];
    for u in 0..g.vertex_count() {
        let b = partition.block_of(u);
        volume[b] += g.degree(u);
        internal[b] += g
            .neighbors(u)
            .filter(|&w| w > u && partition.block_of(w) == b)
            .count();
    }
    let m = m as f64;
    Ok(internal
        .iter()
        .zip(&volume)
        .map(|(&ms, &vol)| ms as f64 / m - (vol as f64 / (2.0 * m)).powi(2))
        .sum())
}
