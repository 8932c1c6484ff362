//! Sweep cuts: evaluate the conductance of every prefix of a vertex ordering.

use std::collections::HashSet;

use crate::graph::{Graph, VertexId};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Length of the best prefix.
    pub best_len: usize,
    pub conductance: f64,
    pub cut: usize,
    pub volume: usize,
    /// Conductance of each prefix `order[..=i]`; `None` where undefined.
    pub profile: Vec<Option<f64>>,
}

/// Scan prefixes of `order` and keep the first one with minimum conductance.
///
/// Prefixes shorter than `min_len` are evaluated for the profile but not
/// eligible as the result. Returns `None` if no eligible prefix has a defined
/// conductance. Cost is linear in the volume of `order`.
pub fn sweep_cut(g: &Graph, order: &[VertexId], min_len: usize) -> Option<SweepResult> {
    let total = g.total_volume();
    let mut inside: HashSet<VertexId> = HashSet::with_capacity(order.len());
    let mut cut: usize = 0;
    let mut volume: usize = 0;
    let mut profile = Vec::with_capacity(order.len());
    let mut best: Option<(usize, usize, usize)> = None;

    for (i, &u) in order.iter().enumerate() {
        let d = g.degree(u);
        let internal = g.neighbors(u).filter(|w| inside.contains(w)).count();
        inside.insert(u);
        // Edges to earlier members stop being cut; the rest become cut.
        cut = cut + d - 2 * internal;
        volume += d;
        let denom = volume.min(total - volume);
        let phi = (denom > 0).then(|| cut as f64 / denom as f64);
        profile.push(phi);
        if i + 1 < min_len || phi.is_none() {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, bc, bd)) => cut * bd < bc * denom,
        };
        if better {
            best = Some((i + 1, cut, denom));
        }
    }

    best.map(|(len, cut, denom)| {
        let volume = order[..len].iter().map(|&u| g.degree(u)).sum();
        SweepResult {
            best_len: len,
            conductance: cut as f64 / denom as f64,
            cut,
            volume,
            profile,
        }
    })
}
