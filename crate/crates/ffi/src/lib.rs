//! C interface to netclust.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free` function. Every fallible call returns an [`NcStatus`];
//! on failure a description is available from [`nc_last_error_message`] on
//! the same thread. Output parameters are written only on success.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use netclust::cluster::ClusterReport;
use netclust::diffusion::{diffusion_cluster, DiffusionConfig};
use netclust::graph::{load_edge_list, Graph, LoadOptions};
use netclust::quality::{conductance, modularity, Partition};
use netclust::report::{ClusterJson, write_json};
use netclust::walk::{walk_cluster, Phase, TransitionRule, WalkConfig};
use netclust::Error;

/// Result codes. `NC_STATUS_OK` is zero; everything else is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    EmptyGraph = 5,
    VertexOutOfRange = 6,
    UnknownLabel = 7,
    IsolatedVertex = 8,
    InvalidParameter = 9,
    ZeroSeedMass = 10,
    UndefinedConductance = 11,
    TooLarge = 12,
    Serialization = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

impl From<&Error> for NcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Io(_) => NcStatus::Io,
            Error::Parse { .. } => NcStatus::Parse,
            Error::EmptyGraph => NcStatus::EmptyGraph,
            Error::VertexOutOfRange { .. } => NcStatus::VertexOutOfRange,
            Error::UnknownLabel(_) => NcStatus::UnknownLabel,
            Error::IsolatedVertex(_) => NcStatus::IsolatedVertex,
            Error::InvalidParameter(_) => NcStatus::InvalidParameter,
            Error::ZeroSeedMass(_) => NcStatus::ZeroSeedMass,
            Error::UndefinedConductance => NcStatus::UndefinedConductance,
            Error::TooLarge { .. } => NcStatus::TooLarge,
            Error::Json(_) | Error::Csv(_) => NcStatus::Serialization,
        }
    }
}

/// Transition rule of the adaptive walk.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcWalkRule {
    Metropolis = 0,
    NeighborNormalized = 1,
}

/// Immutable graph.
pub struct NcGraph {
    inner: Arc<Graph>,
}

/// Cluster extracted around one seed.
pub struct NcCluster {
    graph: Arc<Graph>,
    report: ClusterReport,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NcDiffusionConfig {
    pub alpha: f64,
    pub max_iterations: usize,
    pub convergence_epsilon: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NcPhase {
    pub f: f64,
    pub steps: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(NcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(NcStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(NcStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> NcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_string());
            NcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(NcStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn graph_arg<'a>(g: *const NcGraph) -> Result<&'a NcGraph, Fail> {
    g.as_ref().ok_or_else(|| null("graph"))
}

unsafe fn cluster_arg<'a>(c: *const NcCluster) -> Result<&'a NcCluster, Fail> {
    c.as_ref().ok_or_else(|| null("cluster"))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message for the most recent failure on this thread, or null. The string
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Human-readable name of a status code. Never null; static storage.
#[no_mangle]
pub extern "C" fn nc_status_name(status: NcStatus) -> *const c_char {
    let s: &'static CStr = match status {
        NcStatus::Ok => c"ok",
        NcStatus::NullPointer => c"null pointer",
        NcStatus::InvalidUtf8 => c"invalid utf-8",
        NcStatus::Io => c"i/o error",
        NcStatus::Parse => c"parse error",
        NcStatus::EmptyGraph => c"empty graph",
        NcStatus::VertexOutOfRange => c"vertex out of range",
        NcStatus::UnknownLabel => c"unknown label",
        NcStatus::IsolatedVertex => c"isolated vertex",
        NcStatus::InvalidParameter => c"invalid parameter",
        NcStatus::ZeroSeedMass => c"zero seed mass",
        NcStatus::UndefinedConductance => c"undefined conductance",
        NcStatus::TooLarge => c"graph too large",
        NcStatus::Serialization => c"serialization error",
        NcStatus::BufferTooSmall => c"buffer too small",
        NcStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

fn boxed_graph(g: Graph) -> *mut NcGraph {
    Box::into_raw(Box::new(NcGraph { inner: Arc::new(g) }))
}

/// Load a whitespace-separated edge list from a file.
#[no_mangle]
pub unsafe extern "C" fn nc_graph_load_file(path: *const c_char, out: *mut *mut NcGraph) -> NcStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let file = std::fs::File::open(path).map_err(Error::from)?;
        let (g, _) = load_edge_list(BufReader::new(file), &LoadOptions::default())?;
        put(out, boxed_graph(g))
    })
}

/// Parse an edge list held in a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nc_graph_from_text(text: *const c_char, out: *mut *mut NcGraph) -> NcStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let (g, _) = load_edge_list(text.as_bytes(), &LoadOptions::default())?;
        put(out, boxed_graph(g))
    })
}

/// Build a graph on vertices `0..vertex_count` from `edge_count` pairs laid
/// out as `[u0, v0, u1, v1, ...]`. Labels are the decimal indices.
#[no_mangle]
pub unsafe extern "C" fn nc_graph_from_edges(
    vertex_count: usize,
    edges: *const usize,
    edge_count: usize,
    out: *mut *mut NcGraph,
) -> NcStatus {
    guard(|| {
        let flat = slice_arg(edges, edge_count.checked_mul(2).ok_or_else(|| null("edges"))?, "edges")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
        let g = Graph::from_edges(vertex_count, &pairs)?;
        put(out, boxed_graph(g))
    })
}

/// Release a graph. Clusters created from it remain valid. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nc_graph_free(g: *mut NcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nc_graph_vertex_count(g: *const NcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.vertex_count())
}

/// Undirected edge count, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nc_graph_edge_count(g: *const NcGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

#[no_mangle]
pub unsafe extern "C" fn nc_graph_degree(g: *const NcGraph, v: usize, out: *mut usize) -> NcStatus {
    guard(|| {
        let g = graph_arg(g)?;
        g.inner.check_vertex(v)?;
        put(out, g.inner.degree(v))
    })
}

/// Internal index of the vertex with external label `label`.
#[no_mangle]
pub unsafe extern "C" fn nc_graph_vertex_by_label(
    g: *const NcGraph,
    label: *const c_char,
    out: *mut usize,
) -> NcStatus {
    guard(|| {
        let g = graph_arg(g)?;
        let label = str_arg(label, "label")?;
        let v = g.inner.vertex_by_label(label)?;
        put(out, v)
    })
}

/// External label of vertex `v` as a new string; free with [`nc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nc_graph_label(g: *const NcGraph, v: usize, out: *mut *mut c_char) -> NcStatus {
    guard(|| {
        let g = graph_arg(g)?;
        g.inner.check_vertex(v)?;
        let s = CString::new(g.inner.label(v)).map_err(|_| null("label"))?;
        put(out, s.into_raw())
    })
}

#[no_mangle]
pub extern "C" fn nc_diffusion_config_default() -> NcDiffusionConfig {
    let d = DiffusionConfig::default();
    NcDiffusionConfig {
        alpha: d.alpha,
        max_iterations: d.max_iterations,
        convergence_epsilon: d.convergence_epsilon,
    }
}

fn diffusion_config(c: &NcDiffusionConfig) -> DiffusionConfig {
    DiffusionConfig {
        alpha: c.alpha,
        max_iterations: c.max_iterations,
        convergence_epsilon: c.convergence_epsilon,
    }
}

/// Truncated diffusion from `seed` followed by a sweep cut. A null `cfg`
/// means the defaults.
#[no_mangle]
pub unsafe extern "C" fn nc_diffusion_cluster(
    g: *const NcGraph,
    seed: usize,
    cfg: *const NcDiffusionConfig,
    out: *mut *mut NcCluster,
) -> NcStatus {
    guard(|| {
        let g = graph_arg(g)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let cfg = cfg
            .as_ref()
            .map_or_else(DiffusionConfig::default, diffusion_config);
        let report = diffusion_cluster(&g.inner, seed, &cfg)?;
        put(
            out,
            Box::into_raw(Box::new(NcCluster {
                graph: Arc::clone(&g.inner),
                report,
            })),
        )
    })
}

/// Adaptive energy walk from `seed`. With `phase_count == 0` the schedule is
/// `f = 1.3` then `f = 2.0`, each `10 * cluster_size` steps.
#[no_mangle]
pub unsafe extern "C" fn nc_walk_cluster(
    g: *const NcGraph,
    seed: usize,
    alpha: f64,
    beta: f64,
    phases: *const NcPhase,
    phase_count: usize,
    cluster_size: usize,
    rng_seed: u64,
    rule: NcWalkRule,
    out: *mut *mut NcCluster,
) -> NcStatus {
    guard(|| {
        let g = graph_arg(g)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let mut cfg = WalkConfig::for_cluster_size(cluster_size).with_rng_seed(rng_seed);
        cfg.alpha = alpha;
        cfg.beta = beta;
        let phases = slice_arg(phases, phase_count, "phases")?;
        if !phases.is_empty() {
            cfg.f_schedule = phases.iter().map(|p| Phase { f: p.f, steps: p.steps }).collect();
        }
        cfg.rule = match rule {
            NcWalkRule::Metropolis => TransitionRule::Metropolis,
            NcWalkRule::NeighborNormalized => TransitionRule::NeighborNormalized,
        };
        let report = walk_cluster(&g.inner, seed, &cfg)?;
        put(
            out,
            Box::into_raw(Box::new(NcCluster {
                graph: Arc::clone(&g.inner),
                report,
            })),
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn nc_cluster_free(c: *mut NcCluster) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Member count, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nc_cluster_size(c: *const NcCluster) -> usize {
    c.as_ref().map_or(0, |c| c.report.len())
}

/// Seed vertex, or `SIZE_MAX` for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nc_cluster_seed(c: *const NcCluster) -> usize {
    c.as_ref().map_or(usize::MAX, |c| c.report.seed)
}

/// Conductance, or NaN for a null handle.
#[no_mangle]
pub unsafe extern "C" fn nc_cluster_conductance(c: *const NcCluster) -> f64 {
    c.as_ref().map_or(f64::NAN, |c| c.report.conductance)
}

/// Copy members (seed first) into `buf`, which must hold
/// [`nc_cluster_size`] entries.
#[no_mangle]
pub unsafe extern "C" fn nc_cluster_members(c: *const NcCluster, buf: *mut usize, capacity: usize) -> NcStatus {
    guard(|| {
        let c = cluster_arg(c)?;
        copy_out(&c.report.members, buf, capacity)
    })
}

/// Copy belongingness values, parallel to [`nc_cluster_members`].
#[no_mangle]
pub unsafe extern "C" fn nc_cluster_belongingness(
    c: *const NcCluster,
    buf: *mut f64,
    capacity: usize,
) -> NcStatus {
    guard(|| {
        let c = cluster_arg(c)?;
        copy_out(&c.report.belongingness, buf, capacity)
    })
}

unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, capacity: usize) -> Result<(), Fail> {
    if capacity < src.len() {
        return Err(Fail(
            NcStatus::BufferTooSmall,
            format!("need {} entries, buffer holds {capacity}", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(null("buffer"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Cluster as `netclust.cluster.v1` JSON; free with [`nc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn nc_cluster_to_json(c: *const NcCluster, out: *mut *mut c_char) -> NcStatus {
    guard(|| {
        let c = cluster_arg(c)?;
        let method = match c.report.telemetry {
            netclust::Telemetry::Walk(_) => "walk",
            _ => "diffusion",
        };
        let doc = ClusterJson::new(&c.graph, &c.report, method, serde_json::Value::Null, false);
        let mut buf = Vec::new();
        write_json(&mut buf, &doc)?;
        let s = CString::new(buf).map_err(|_| Fail(NcStatus::Serialization, "NUL in JSON".into()))?;
        put(out, s.into_raw())
    })
}

/// Release a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Conductance of the vertex set `set[0..len]`.
#[no_mangle]
pub unsafe extern "C" fn nc_conductance(
    g: *const NcGraph,
    set: *const usize,
    len: usize,
    out: *mut f64,
) -> NcStatus {
    guard(|| {
        let g = graph_arg(g)?;
        let set = slice_arg(set, len, "set")?;
        let phi = conductance(&g.inner, set)?;
        put(out, phi)
    })
}

/// Cover the graph with diffusion clusters. `assignment` receives one block
/// id per vertex and must hold [`nc_graph_vertex_count`] entries.
#[no_mangle]
pub unsafe extern "C" fn nc_partition(
    g: *const NcGraph,
    cfg: *const NcDiffusionConfig,
    assignment: *mut usize,
    capacity: usize,
    block_count: *mut usize,
) -> NcStatus {
    guard(|| {
        let g = graph_arg(g)?;
        if block_count.is_null() {
            return Err(null("block count pointer"));
        }
        let cfg = cfg
            .as_ref()
            .map_or_else(DiffusionConfig::default, diffusion_config);
        let run = netclust::partition_graph(&g.inner, &cfg)?;
        copy_out(run.partition.assignment(), assignment, capacity)?;
        put(block_count, run.partition.block_count())
    })
}

/// Modularity of the partition given by `assignment[0..len]`, one block id
/// per vertex.
#[no_mangle]
pub unsafe extern "C" fn nc_modularity(
    g: *const NcGraph,
    assignment: *const usize,
    len: usize,
    out: *mut f64,
) -> NcStatus {
    guard(|| {
        let g = graph_arg(g)?;
        let a = slice_arg(assignment, len, "assignment")?;
        if a.len() != g.inner.vertex_count() {
            return Err(Fail(
                NcStatus::InvalidParameter,
                format!("assignment has {} entries for {} vertices", a.len(), g.inner.vertex_count()),
            ));
        }
        let q = modularity(&g.inner, &Partition::from_assignment(a.iter().copied()))?;
        put(out, q)
    })
}
