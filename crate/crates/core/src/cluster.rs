//! Cluster reports shared by the diffusion and adaptive-walk extractors.

use std::collections::BTreeMap;

use crate::graph::VertexId;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterReport {
    pub seed: VertexId,
    /// Members in sweep order; the seed is always first.
    pub members: Vec<VertexId>,
    /// Affinity of each member relative to the seed, parallel to `members`.
    pub belongingness: Vec<f64>,
    pub conductance: f64,
    pub cut: usize,
    pub volume: usize,
    /// Extraction fell back to a trivial answer (see the extractor docs).
    pub degenerate: bool,
    /// The score vector reached every vertex of the graph.
    pub support_saturated: bool,
    pub iterations_used: usize,
    pub converged: bool,
    pub telemetry: Telemetry,
}

impl ClusterReport {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.contains(&v)
    }

    pub fn sorted_members(&self) -> Vec<VertexId> {
        let mut m = self.members.clone();
        m.sort_unstable();
        m
    }

    pub fn belongingness_of(&self, v: VertexId) -> Option<f64> {
        self.members
            .iter()
            .position(|&u| u == v)
            .map(|i| self.belongingness[i])
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Telemetry {
    #[default]
    None,
    Diffusion(Vec<IterationRecord>),
    Walk(Vec<PhaseRecord>),
}

/// One diffuse-then-truncate iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// L1 distance between consecutive post-truncation distributions.
    pub l1_change: f64,
    pub support_size: usize,
    pub support_volume: usize,
    /// Entry and edge visits performed by the step, truncation and L1 scan.
    pub work: usize,
    pub truncated: usize,
    /// Mass of the tracked vertex after this iteration, if one was requested.
    pub tracked_mass: Option<f64>,
    pub elapsed_ns: u64,
}

/// One phase of the adaptive walk's f-schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRecord {
    pub f: f64,
    pub steps: usize,
    pub moves_accepted: usize,
    /// Arrivals per vertex during this phase; sums to `steps`.
    pub visits: BTreeMap<VertexId, u64>,
}
