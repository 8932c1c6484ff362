//! Local graph clustering: truncated lazy-walk diffusion, an adaptive energy
//! walk, conductance and modularity scoring, and fuzzy c-means overlap
//! detection on diffusion embeddings.

pub mod bench;
pub mod cluster;
pub mod datasets;
pub mod diffusion;
pub mod error;
pub mod fcm;
pub mod generators;
pub mod graph;
pub mod partition;
pub mod quality;
pub mod report;
pub mod sweep;
pub mod walk;

pub use cluster::{ClusterReport, IterationRecord, PhaseRecord, Telemetry};
pub use diffusion::{
    diffuse_step, diffusion_cluster, extract_cluster, run_diffusion, truncate, DiffusionConfig,
    DiffusionRun, SparseMass,
};
pub use error::{Error, Result};
pub use fcm::{
    build_embedding, fcm_fit, fcm_objective, overlap_report, EmbeddingMatrix, FcmConfig,
    MembershipMatrix,
};
pub use graph::{load_edge_list, transition_prob, Graph, LoadOptions, LoadStats, VertexId};
pub use partition::{partition_graph, PartitionRun};
pub use quality::{conductance, min_conductance_bruteforce, modularity, Partition};
pub use walk::{init_energies, run_walk, walk_cluster, walk_step, EnergyTable, WalkConfig};
