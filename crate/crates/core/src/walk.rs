//! Adaptive energy walk.
//!
//! Every vertex carries an energy. A single walker moves from `u` toward a
//! neighbor `v` with acceptance `min(energy[v] / energy[u], 1)`, and the
//! vertex it leaves has its energy multiplied by `f >= 1`. Visited vertices
//! therefore become more attractive over time and the walker tends to stay
//! near where it started. The run is split into phases with increasing `f`;
//! each phase restarts the walker at the seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cluster::{ClusterReport, PhaseRecord, Telemetry};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::quality::CutStats;
use crate::sweep::sweep_cut;

/// How `min(energy[v]/energy[u], 1)` turns into a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransitionRule {
    /// Propose a uniform neighbor, accept with the energy ratio, else stay.
    #[default]
    Metropolis,
    /// Move to a neighbor drawn with weights `min(energy[v]/energy[u], 1)`;
    /// the walker never stays put.
    NeighborNormalized,
}

/// Denominator of the background energy `alpha / d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackgroundDegree {
    /// `alpha / d_w` for every vertex `w`.
    #[default]
    Own,
    /// `alpha / d_seed` for every vertex.
    Seed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub f: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    /// Background energy numerator.
    pub alpha: f64,
    /// Seed energy numerator.
    pub beta: f64,
    pub f_schedule: Vec<Phase>,
    pub rng_seed: u64,
    pub rule: TransitionRule,
    pub background: BackgroundDegree,
}

impl WalkConfig {
    /// Defaults for an expected cluster of `cluster_size` vertices:
    /// `alpha = 1`, `beta = 100`, and phases `f = 1.3` then `f = 2.0`, each
    /// `10 * cluster_size` steps long.
    pub fn for_cluster_size(cluster_size: usize) -> WalkConfig {
        let steps = 10 * cluster_size;
        WalkConfig {
            alpha: 1.0,
            beta: 100.0,
            f_schedule: vec![Phase { f: 1.3, steps }, Phase { f: 2.0, steps }],
            rng_seed: 0,
            rule: TransitionRule::default(),
            background: BackgroundDegree::default(),
        }
    }

    pub fn with_rng_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.beta > self.alpha && self.beta.is_finite()) {
            return Err(Error::invalid(format!(
                "beta must exceed alpha ({}), got {}",
                self.alpha, self.beta
            )));
        }
        for p in &self.f_schedule {
            if !(p.f >= 1.0 && p.f.is_finite()) {
                return Err(Error::invalid(format!("f must be >= 1, got {}", p.f)));
            }
        }
        Ok(())
    }

    /// Parse `f:steps,f:steps,...`.
    pub fn parse_schedule(text: &str) -> Result<Vec<Phase>> {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|part| {
                let (f, steps) = part
                    .split_once(':')
                    .ok_or_else(|| Error::invalid(format!("phase {part:?} is not f:steps")))?;
                let f = f
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::invalid(format!("phase {part:?}: {e}")))?;
                let steps = steps
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| Error::invalid(format!("phase {part:?}: {e}")))?;
                Ok(Phase { f, steps })
            })
            .collect()
    }
}

/// Walker state. Vertices whose energy was never changed are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTable {
    seed: VertexId,
    alpha: f64,
    background: BackgroundDegree,
    seed_degree: usize,
    energies: BTreeMap<VertexId, f64>,
    pub f: f64,
    pub current: VertexId,
    visit_counts: BTreeMap<VertexId, u64>,
    steps: usize,
}

impl EnergyTable {
    pub fn seed(&self) -> VertexId {
        self.seed
    }

    /// Energy a vertex holds before the walk touches it.
    pub fn background_energy(&self, g: &Graph, v: VertexId) -> f64 {
        let d = match self.background {
            BackgroundDegree::Own => g.degree(v),
            BackgroundDegree::Seed => self.seed_degree,
        };
        self.alpha / d.max(1) as f64
    }

    pub fn energy(&self, g: &Graph, v: VertexId) -> f64 {
        self.energies
            .get(&v)
            .copied()
            .unwrap_or_else(|| self.background_energy(g, v))
    }

    /// Vertices with a stored (non-background) energy.
    pub fn touched(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.energies.iter().map(|(&v, &e)| (v, e))
    }

    /// Arrivals per vertex, counting the initial placement on the seed.
    pub fn visit_counts(&self) -> &BTreeMap<VertexId, u64> {
        &self.visit_counts
    }

    pub fn visits(&self, v: VertexId) -> u64 {
        self.visit_counts.get(&v).copied().unwrap_or(0)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    fn multiply(&mut self, g: &Graph, v: VertexId, factor: f64) {
        let e = self.energy(g, v);
        self.energies.insert(v, e * factor);
    }
}

pub fn init_energies(g: &Graph, seed: VertexId, cfg: &WalkConfig) -> Result<EnergyTable> {
    cfg.validate()?;
    g.check_walkable(seed)?;
    let seed_degree = g.degree(seed);
    let mut energies = BTreeMap::new();
    energies.insert(seed, cfg.beta / seed_degree as f64);
    Ok(EnergyTable {
        seed,
        alpha: cfg.alpha,
        background: cfg.background,
        seed_degree,
        energies,
        f: cfg.f_schedule.first().map_or(1.0, |p| p.f),
        current: seed,
        visit_counts: BTreeMap::from([(seed, 1)]),
        steps: 0,
    })
}

/// `min(to / from, 1)`.
#[inline]
pub fn acceptance_probability(from_energy: f64, to_energy: f64) -> f64 {
    (to_energy / from_energy).min(1.0)
}

/// Advance the walker one step and return the vertex it ends on.
///
/// The vertex the walker was on when the step began has its energy
/// multiplied by `state.f`, whether or not the walker moved.
pub fn walk_step<R: Rng + ?Sized>(
    g: &Graph,
    state: &mut EnergyTable,
    rule: TransitionRule,
    rng: &mut R,
) -> Result<VertexId> {
    let u = state.current;
    g.check_walkable(u)?;
    let neighbors = g.neighbor_slice(u);
    let here = state.energy(g, u);
    let next = match rule {
        TransitionRule::Metropolis => {
            let v = neighbors[rng.random_range(0..neighbors.len())] as usize;
            let p = acceptance_probability(here, state.energy(g, v));
            if rng.random::<f64>() < p {
                v
            } else {
                u
            }
        }
        TransitionRule::NeighborNormalized => {
            let weights: Vec<f64> = neighbors
                .iter()
                .map(|&v| acceptance_probability(here, state.energy(g, v as usize)))
                .collect();
            let total: f64 = weights.iter().sum();
            let mut target = rng.random::<f64>() * total;
            let mut chosen = neighbors[neighbors.len() - 1] as usize;
            for (&v, &w) in neighbors.iter().zip(&weights) {
                if target < w {
                    chosen = v as usize;
                    break;
                }
                target -= w;
            }
            chosen
        }
    };
    let f = state.f;
    state.multiply(g, u, f);
    state.current = next;
    *state.visit_counts.entry(next).or_insert(0) += 1;
    state.steps += 1;
    Ok(next)
}

#[derive(Debug, Clone)]
pub struct WalkRun {
    pub state: EnergyTable,
    pub phases: Vec<PhaseRecord>,
}

impl WalkRun {
    pub fn total_steps(&self) -> usize {
        self.phases.iter().map(|p| p.steps).sum()
    }
}

/// Execute every phase of the schedule, restarting the walker at the seed at
/// the start of each phase.
pub fn run_walk(g: &Graph, seed: VertexId, cfg: &WalkConfig) -> Result<WalkRun> {
    let mut state = init_energies(g, seed, cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut phases = Vec::with_capacity(cfg.f_schedule.len());
    for phase in &cfg.f_schedule {
        state.f = phase.f;
        state.current = seed;
        let mut visits: BTreeMap<VertexId, u64> = BTreeMap::new();
        let mut moves_accepted = 0;
        for _ in 0..phase.steps {
            let from = state.current;
            let to = walk_step(g, &mut state, cfg.rule, &mut rng)?;
            if to != from {
                moves_accepted += 1;
            }
            *visits.entry(to).or_insert(0) += 1;
        }
        phases.push(PhaseRecord {
            f: phase.f,
            steps: phase.steps,
            moves_accepted,
            visits,
        });
    }
    Ok(WalkRun { state, phases })
}

/// Sweep the seed's component in order of final energy (descending, ties by
/// index) and return the minimum-conductance prefix that contains the seed.
///
/// If no vertex other than the seed ever left its background energy, the
/// walk never moved and the singleton `{seed}` is returned flagged
/// `degenerate`.
pub fn extract_cluster_from_energy(g: &Graph, state: &EnergyTable) -> Result<ClusterReport> {
    let seed = state.seed();
    g.check_walkable(seed)?;
    let seed_energy = state.energy(g, seed);
    let moved = state.touched().any(|(v, _)| v != seed);

    let singleton = |degenerate: bool| -> Result<ClusterReport> {
        let stats = CutStats::of(g, &[seed])?;
        Ok(ClusterReport {
            seed,
            members: vec![seed],
            belongingness: vec![1.0],
            conductance: stats.conductance().unwrap_or(1.0),
            cut: stats.cut,
            volume: stats.volume,
            degenerate,
            support_saturated: false,
            iterations_used: state.steps(),
            converged: false,
            telemetry: Telemetry::None,
        })
    };
    if !moved {
        return singleton(true);
    }

    let mut order: Vec<(VertexId, f64)> = g
        .component_of(seed)?
        .into_iter()
        .map(|v| (v, state.energy(g, v)))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let order: Vec<VertexId> = order.into_iter().map(|(v, _)| v).collect();
    let seed_pos = order.iter().position(|&v| v == seed).expect("seed in own component");

    let Some(res) = sweep_cut(g, &order, seed_pos + 1) else {
        return singleton(true);
    };
    let members = order[..res.best_len].to_vec();
    let mut members_seed_first = Vec::with_capacity(members.len());
    members_seed_first.push(seed);
    members_seed_first.extend(members.iter().copied().filter(|&v| v != seed));
    let belongingness = members_seed_first
        .iter()
        .map(|&v| state.energy(g, v) / seed_energy)
        .collect();
    Ok(ClusterReport {
        seed,
        members: members_seed_first,
        belongingness,
        conductance: res.conductance,
        cut: res.cut,
        volume: res.volume,
        degenerate: false,
        support_saturated: state.touched().count() == g.vertex_count(),
        iterations_used: state.steps(),
        converged: false,
        telemetry: Telemetry::None,
    })
}

/// Run the walk and extract a cluster, keeping per-phase telemetry.
pub fn walk_cluster(g: &Graph, seed: VertexId, cfg: &WalkConfig) -> Result<ClusterReport> {
    let run = run_walk(g, seed, cfg)?;
    let mut report = extract_cluster_from_energy(g, &run.state)?;
    report.telemetry = Telemetry::Walk(run.phases);
    Ok(report)
}
