//! Truncated lazy-walk diffusion from a seed vertex.
//!
//! A probability distribution starts concentrated on the seed and is pushed
//! through the lazy transition rule one synchronous step at a time. After
//! every step, entries smaller than `alpha` times the seed's mass are cut and
//! their mass is returned to the seed, which keeps the support local. The
//! cluster is read off the converged distribution with a degree-normalized
//! sweep cut.

use std::collections::HashMap;
use std::time::Instant;

use crate::cluster::{ClusterReport, IterationRecord, Telemetry};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::sweep::sweep_cut;

/// Sparse probability distribution over vertices.
///
/// Entries are kept sorted by vertex and strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMass {
    seed: VertexId,
    entries: Vec<(VertexId, f64)>,
}

impl SparseMass {
    /// All mass on `seed`.
    pub fn at_seed(seed: VertexId) -> SparseMass {
        SparseMass {
            seed,
            entries: vec![(seed, 1.0)],
        }
    }

    /// Build from arbitrary entries; zeros are dropped, duplicates summed.
    pub fn from_entries<I>(seed: VertexId, entries: I) -> Result<SparseMass>
    where
        I: IntoIterator<Item = (VertexId, f64)>,
    {
        let mut map: HashMap<VertexId, f64> = HashMap::new();
        for (v, x) in entries {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::invalid(format!("mass {x} at vertex {v}")));
            }
            *map.entry(v).or_insert(0.0) += x;
        }
        Ok(SparseMass::from_map(seed, map))
    }

    fn from_map(seed: VertexId, map: HashMap<VertexId, f64>) -> SparseMass {
        let mut entries: Vec<_> = map.into_iter().filter(|&(_, x)| x > 0.0).collect();
        entries.sort_unstable_by_key(|&(v, _)| v);
        SparseMass { seed, entries }
    }

    pub fn seed(&self) -> VertexId {
        self.seed
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.entries
            .binary_search_by_key(&v, |&(u, _)| u)
            .map_or(0.0, |i| self.entries[i].1)
    }

    pub fn seed_mass(&self) -> f64 {
        self.get(self.seed)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|&(_, x)| x).sum()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.entries.iter().map(|&(v, _)| v)
    }

    /// `(vertex, mass)` pairs in ascending vertex order.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn support_volume(&self, g: &Graph) -> usize {
        self.support().map(|v| g.degree(v)).sum()
    }

    /// Dense copy of length `n`.
    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for &(v, x) in &self.entries {
            out[v] = x;
        }
        out
    }

    /// L1 distance, merging the two sorted supports.
    pub fn l1_distance(&self, other: &SparseMass) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut sum = 0.0;
        while i < a.len() || j < b.len() {
            match (a.get(i), b.get(j)) {
                (Some(&(u, x)), Some(&(v, y))) if u == v => {
                    sum += (x - y).abs();
                    i += 1;
                    j += 1;
                }
                (Some(&(u, x)), Some(&(v, _))) if u < v => {
                    sum += x;
                    i += 1;
                }
                (Some(&(_, x)), None) => {
                    sum += x;
                    i += 1;
                }
                (_, Some(&(_, y))) => {
                    sum += y;
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionConfig {
    /// Truncation parameter in `[0, 1)`; `0` disables truncation.
    pub alpha: f64,
    pub max_iterations: usize,
    /// Stop once the L1 change between iterations drops below this.
    pub convergence_epsilon: f64,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        DiffusionConfig {
            alpha: 1e-5,
            max_iterations: 1000,
            convergence_epsilon: 1e-9,
        }
    }
}

impl DiffusionConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        DiffusionConfig {
            alpha,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha must lie in [0, 1), got {}",
                self.alpha
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        if !(self.convergence_epsilon >= 0.0 && self.convergence_epsilon.is_finite()) {
            return Err(Error::invalid(format!(
                "convergence_epsilon must be finite and nonnegative, got {}",
                self.convergence_epsilon
            )));
        }
        Ok(())
    }
}

/// One application of the lazy walk:
/// `new[u] = old[u]/2 + sum over neighbors w of old[w] / (2 d_w)`.
pub fn diffuse_step(g: &Graph, mass: &SparseMass) -> Result<SparseMass> {
    diffuse_step_counted(g, mass).map(|(m, _)| m)
}

/// [`diffuse_step`] plus the number of entry and edge visits it performed.
pub fn diffuse_step_counted(g: &Graph, mass: &SparseMass) -> Result<(SparseMass, usize)> {
    let mut next: HashMap<VertexId, f64> = HashMap::with_capacity(mass.support_len() * 2);
    let mut work = 0;
    for (w, x) in mass.iter() {
        g.check_vertex(w)?;
        let d = g.degree(w);
        if d == 0 {
            return Err(Error::IsolatedVertex(w));
        }
        *next.entry(w).or_insert(0.0) += 0.5 * x;
        let share = x / (2.0 * d as f64);
        for &u in g.neighbor_slice(w) {
            *next.entry(u as usize).or_insert(0.0) += share;
        }
        work += 1 + d;
    }
    Ok((SparseMass::from_map(mass.seed, next), work))
}

/// Zero every non-seed entry below `alpha * mass[seed]` and move its mass to
/// the seed.
///
/// The threshold is re-evaluated against the grown seed mass until no entry
/// falls below it, so on return every non-seed entry is at least
/// `alpha * mass[seed]`. Total mass is preserved.
pub fn truncate(mass: &SparseMass, alpha: f64) -> Result<SparseMass> {
    let mut out = mass.clone();
    truncate_in_place(&mut out, alpha)?;
    Ok(out)
}

/// In-place [`truncate`]; returns how many entries were removed.
pub fn truncate_in_place(mass: &mut SparseMass, alpha: f64) -> Result<usize> {
    let seed = mass.seed;
    let seed_pos = mass
        .entries
        .binary_search_by_key(&seed, |&(u, _)| u)
        .map_err(|_| Error::ZeroSeedMass(seed))?;
    if mass.entries[seed_pos].1 <= 0.0 {
        return Err(Error::ZeroSeedMass(seed));
    }
    if alpha <= 0.0 {
        return Ok(0);
    }
    let before = mass.entries.len();
    loop {
        let threshold = alpha * mass.get(seed);
        let mut returned = 0.0;
        let mut removed = false;
        mass.entries.retain(|&(u, x)| {
            if u != seed && x < threshold {
                returned += x;
                removed = true;
                false
            } else {
                true
            }
        });
        if !removed {
            break;
        }
        let pos = mass
            .entries
            .binary_search_by_key(&seed, |&(u, _)| u)
            .expect("seed entry is never removed");
        mass.entries[pos].1 += returned;
    }
    Ok(before - mass.entries.len())
}

#[derive(Debug, Clone)]
pub struct DiffusionRun {
    pub mass: SparseMass,
    pub iterations: usize,
    pub converged: bool,
    pub telemetry: Vec<IterationRecord>,
}

/// Alternate [`diffuse_step`] and [`truncate`] until the L1 change falls below
/// `cfg.convergence_epsilon` or `cfg.max_iterations` is reached. Hitting the
/// iteration cap is reported through `converged`, not as an error.
pub fn run_diffusion(g: &Graph, seed: VertexId, cfg: &DiffusionConfig) -> Result<DiffusionRun> {
    run_diffusion_tracked(g, seed, cfg, None)
}

/// [`run_diffusion`] that also records the mass of `tracked` every iteration.
pub fn run_diffusion_tracked(
    g: &Graph,
    seed: VertexId,
    cfg: &DiffusionConfig,
    tracked: Option<VertexId>,
) -> Result<DiffusionRun> {
    cfg.validate()?;
    g.check_walkable(seed)?;
    if let Some(t) = tracked {
        g.check_vertex(t)?;
    }
    let mut mass = SparseMass::at_seed(seed);
    let mut telemetry = Vec::new();
    let mut converged = false;
    let start = Instant::now();

    for iteration in 1..=cfg.max_iterations {
        let (mut next, step_work) = diffuse_step_counted(g, &mass)?;
        let scanned = next.support_len();
        let truncated = truncate_in_place(&mut next, cfg.alpha)?;
        let l1_change = mass.l1_distance(&next);
        let work = step_work + scanned + mass.support_len() + next.support_len();
        telemetry.push(IterationRecord {
            iteration,
            l1_change,
            support_size: next.support_len(),
            support_volume: next.support_volume(g),
            work,
            truncated,
            tracked_mass: tracked.map(|t| next.get(t)),
            elapsed_ns: start.elapsed().as_nanos() as u64,
        });
        mass = next;
        if l1_change < cfg.convergence_epsilon {
            converged = true;
            break;
        }
    }

    Ok(DiffusionRun {
        iterations: telemetry.len(),
        mass,
        converged,
        telemetry,
    })
}

/// Degree-normalized sweep over the support of `mass`.
///
/// Vertices are ordered by `mass[u] / d_u` descending with the seed first and
/// ties broken by ascending index; the minimum-conductance prefix is returned.
/// If no prefix has defined conductance the whole support is returned and
/// the report is flagged `degenerate`.
pub fn extract_cluster(g: &Graph, mass: &SparseMass) -> Result<ClusterReport> {
    let seed = mass.seed();
    g.check_walkable(seed)?;
    let seed_mass = mass.seed_mass();
    if seed_mass <= 0.0 {
        return Err(Error::ZeroSeedMass(seed));
    }
    let mut order: Vec<(VertexId, f64)> = mass
        .iter()
        .filter(|&(v, _)| v != seed)
        .map(|(v, x)| {
            g.check_walkable(v)?;
            Ok((v, x / g.degree(v) as f64))
        })
        .collect::<Result<_>>()?;
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let order: Vec<VertexId> = std::iter::once(seed)
        .chain(order.into_iter().map(|(v, _)| v))
        .collect();

    let support_saturated = order.len() == g.vertex_count();
    let (members, conductance, cut, volume, degenerate) = match sweep_cut(g, &order, 1) {
        Some(res) => (
            order[..res.best_len].to_vec(),
            res.conductance,
            res.cut,
            res.volume,
            false,
        ),
        None => {
            let volume = g.volume(order.iter().copied());
            (order, 1.0, 0, volume, true)
        }
    };
    let belongingness = members
        .iter()
        .map(|&v| mass.get(v) / seed_mass)
        .collect();
    Ok(ClusterReport {
        seed,
        members,
        belongingness,
        conductance,
        cut,
        volume,
        degenerate,
        support_saturated,
        iterations_used: 0,
        converged: false,
        telemetry: Telemetry::None,
    })
}

/// Run the diffusion from `seed` and extract its cluster, keeping telemetry.
pub fn diffusion_cluster(g: &Graph, seed: VertexId, cfg: &DiffusionConfig) -> Result<ClusterReport> {
    let run = run_diffusion(g, seed, cfg)?;
    let mut report = extract_cluster(g, &run.mass)?;
    report.iterations_used = run.iterations;
    report.converged = run.converged;
    report.telemetry = Telemetry::Diffusion(run.telemetry);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{path, star, two_cliques_bridge};

    fn assert_mass(m: &SparseMass, expected: &[(VertexId, f64)]) {
        assert_eq!(m.support_len(), expected.len(), "{m:?}");
        for &(v, x) in expected {
            assert!((m.get(v) - x).abs() < 1e-15, "vertex {v}: {} vs {x}", m.get(v));
        }
    }

    #[test]
    fn star_step_from_center() {
        let g = star(3);
        let next = diffuse_step(&g, &SparseMass::at_seed(0)).unwrap();
        let sixth = 1.0 / 6.0;
        assert_mass(&next, &[(0, 0.5), (1, sixth), (2, sixth), (3, sixth)]);
    }

    #[test]
    fn star_degree_proportional_mass_is_fixed() {
        let g = star(3);
        let sixth = 1.0 / 6.0;
        let m = SparseMass::from_entries(0, [(0, 0.5), (1, sixth), (2, sixth), (3, sixth)]).unwrap();
        let next = diffuse_step(&g, &m).unwrap();
        assert_mass(&next, &[(0, 0.5), (1, sixth), (2, sixth), (3, sixth)]);
    }

    #[test]
    fn edge_step() {
        let g = path(2);
        let next = diffuse_step(&g, &SparseMass::at_seed(0)).unwrap();
        assert_mass(&next, &[(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn step_rejects_isolated_support() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let m = SparseMass::from_entries(0, [(0, 0.5), (2, 0.5)]).unwrap();
        assert!(matches!(diffuse_step(&g, &m), Err(Error::IsolatedVertex(2))));
    }

    #[test]
    fn truncate_hand_example() {
        let m = SparseMass::from_entries(0, [(0, 0.5), (1, 0.3), (2, 0.0001)]).unwrap();
        let t = truncate(&m, 1e-3).unwrap();
        assert_eq!(t.support_len(), 2);
        assert!((t.get(0) - 0.5001).abs() < 1e-15);
        assert_eq!(t.get(1), 0.3);
        assert_eq!(t.get(2), 0.0);
    }

    #[test]
    fn truncate_noop_cases() {
        let m = SparseMass::from_entries(0, [(0, 0.5), (1, 0.3), (2, 0.2)]).unwrap();
        assert_eq!(truncate(&m, 1e-9).unwrap(), m);
        let single = SparseMass::at_seed(4);
        assert_eq!(truncate(&single, 0.5).unwrap(), single);
    }

    #[test]
    fn truncate_without_seed_mass_fails() {
        let m = SparseMass::from_entries(0, [(1, 0.5), (2, 0.5)]).unwrap();
        assert!(matches!(truncate(&m, 0.1), Err(Error::ZeroSeedMass(0))));
    }

    #[test]
    fn truncate_cascades_against_grown_seed() {
        // First pass removes 3 (0.05 < 0.1 * 0.6); the seed grows to 0.65,
        // which puts 2 (0.062) below the new threshold.
        let m = SparseMass::from_entries(0, [(0, 0.6), (1, 0.288), (2, 0.062), (3, 0.05)]).unwrap();
        let t = truncate(&m, 0.1).unwrap();
        assert_eq!(t.support().collect::<Vec<_>>(), vec![0, 1]);
        assert!((t.total() - 1.0).abs() < 1e-15);
        for (v, x) in t.iter() {
            assert!(v == 0 || x >= 0.1 * t.seed_mass());
        }
    }

    #[test]
    fn two_vertex_component_converges_to_halves() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        let run = run_diffusion(&g, 0, &DiffusionConfig::default()).unwrap();
        assert!(run.converged);
        assert_mass(&run.mass, &[(0, 0.5), (1, 0.5)]);
    }

    #[test]
    fn config_validation() {
        let g = path(3);
        for bad in [
            DiffusionConfig { alpha: 1.0, ..Default::default() },
            DiffusionConfig { alpha: -0.1, ..Default::default() },
            DiffusionConfig { max_iterations: 0, ..Default::default() },
            DiffusionConfig { convergence_epsilon: f64::NAN, ..Default::default() },
        ] {
            assert!(matches!(run_diffusion(&g, 0, &bad), Err(Error::InvalidParameter(_))));
        }
        let isolated = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert!(matches!(
            run_diffusion(&isolated, 2, &DiffusionConfig::default()),
            Err(Error::IsolatedVertex(2))
        ));
    }

    #[test]
    fn non_convergence_is_flagged_not_error() {
        let g = path(30);
        let cfg = DiffusionConfig {
            alpha: 0.0,
            max_iterations: 3,
            convergence_epsilon: 0.0,
        };
        let run = run_diffusion(&g, 0, &cfg).unwrap();
        assert!(!run.converged);
        assert_eq!(run.iterations, 3);
        assert_eq!(run.telemetry.len(), 3);
    }

    #[test]
    fn seed_only_mass_gives_singleton() {
        let g = two_cliques_bridge(5);
        let r = extract_cluster(&g, &SparseMass::at_seed(2)).unwrap();
        assert_eq!(r.members, vec![2]);
        assert_eq!(r.conductance, 1.0);
        assert_eq!(r.belongingness, vec![1.0]);
    }

    #[test]
    fn planted_clique_from_diffusion() {
        let g = two_cliques_bridge(5);
        let r = diffusion_cluster(&g, 0, &DiffusionConfig::with_alpha(1e-2)).unwrap();
        assert_eq!(r.sorted_members(), vec![0, 1, 2, 3, 4]);
        assert_eq!(r.conductance, 1.0 / 21.0);
        assert_eq!(r.members[0], 0);
        assert_eq!(r.belongingness[0], 1.0);
        assert!(r.converged);
    }
}
