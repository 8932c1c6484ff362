//! Deterministic synthetic graphs for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexId};

fn clique_edges(offset: usize, size: usize, out: &mut Vec<(VertexId, VertexId)>) {
    for i in 0..size {
        for j in (i + 1)..size {
            out.push((offset + i, offset + j));
        }
    }
}

/// Two `K_q` cliques on `0..q` and `q..2q`, joined by the edge `(q-1, q)`.
pub fn two_cliques_bridge(q: usize) -> Graph {
    assert!(q >= 2, "cliques need at least two vertices");
    let mut edges = Vec::new();
    clique_edges(0, q, &mut edges);
    clique_edges(q, q, &mut edges);
    edges.push((q - 1, q));
    Graph::from_edges(2 * q, &edges).expect("valid edges")
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    clique_edges(0, n, &mut edges);
    Graph::from_edges(n, &edges).expect("valid edges")
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).expect("valid edges")
}

/// Center `0` joined to leaves `1..=leaves`.
pub fn star(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::from_edges(leaves + 1, &edges).expect("valid edges")
}

/// `count` cliques of size `q` arranged in a ring, consecutive cliques
/// joined by one edge.
pub fn ring_of_cliques(count: usize, q: usize) -> Graph {
    assert!(count >= 2 && q >= 2);
    let mut edges = Vec::with_capacity(count * (q * (q - 1) / 2 + 1));
    for c in 0..count {
        clique_edges(c * q, q, &mut edges);
        let next = ((c + 1) % count) * q;
        edges.push((c * q + q - 1, next));
    }
    Graph::from_edges(count * q, &edges).expect("valid edges")
}

/// `rows x cols` 4-neighbor lattice.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges).expect("valid edges")
}

/// Connected random graph: a random spanning tree plus each remaining pair
/// independently with probability `p`.
pub fn random_connected(n: usize, p: f64, seed: u64) -> Graph {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.push((parent, v));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("valid edges")
}

/// Erdos-Renyi `G(n, p)`; may be disconnected or contain isolated vertices.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("valid edges")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let g = two_cliques_bridge(5);
        assert_eq!((g.vertex_count(), g.edge_count()), (10, 21));
        assert_eq!(g.degree(4), 5);
        assert_eq!(g.degree(5), 5);
        assert_eq!(ring_of_cliques(4, 3).edge_count(), 4 * 3 + 4);
        assert_eq!(grid(3, 4).edge_count(), 3 * 3 + 2 * 4);
        let r = random_connected(30, 0.05, 7);
        assert_eq!(r.component_of(0).unwrap().len(), 30);
        assert_eq!(r, random_connected(30, 0.05, 7));
    }
}
