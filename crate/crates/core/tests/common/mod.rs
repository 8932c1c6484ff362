//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use netclust::Graph;

/// Dense lazy-walk matrix built straight from the adjacency lists:
/// `p[x][y]` is the probability of stepping from `x` to `y`.
pub fn dense_transition(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut p = vec![vec![0.0; n]; n];
    for (x, row) in p.iter_mut().enumerate() {
        let d = g.neighbors(x).len();
        if d == 0 {
            continue;
        }
        row[x] = 0.5;
        for y in g.neighbors(x) {
            row[y] += 0.5 / d as f64;
        }
    }
    p
}

/// `t` steps of `dist <- dist * P` starting from the point mass at `seed`.
pub fn dense_power(g: &Graph, seed: usize, t: usize) -> Vec<f64> {
    let p = dense_transition(g);
    let n = g.vertex_count();
    let mut dist = vec![0.0; n];
    dist[seed] = 1.0;
    for _ in 0..t {
        let mut next = vec![0.0; n];
        for x in 0..n {
            if dist[x] == 0.0 {
                continue;
            }
            for y in 0..n {
                next[y] += dist[x] * p[x][y];
            }
        }
        dist = next;
    }
    dist
}

/// Conductance by direct edge enumeration; `None` when either side has
/// zero volume.
pub fn naive_conductance(g: &Graph, set: &[usize]) -> Option<f64> {
    let n = g.vertex_count();
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    let mut cut = 0usize;
    let mut vol_in = 0usize;
    let mut vol_out = 0usize;
    for u in 0..n {
        let d = g.neighbors(u).len();
        if inside[u] {
            vol_in += d;
        } else {
            vol_out += d;
        }
        for v in g.neighbors(u) {
            if inside[u] && !inside[v] {
                cut += 1;
            }
        }
    }
    let denom = vol_in.min(vol_out);
    (denom > 0).then(|| cut as f64 / denom as f64)
}

/// Modularity from the edge list and block ids, summing over vertex pairs.
pub fn naive_modularity(g: &Graph, block: &[usize]) -> f64 {
    let n = g.vertex_count();
    let two_m = (0..n).map(|u| g.neighbors(u).len()).sum::<usize>() as f64;
    let mut q = 0.0;
    for u in 0..n {
        for v in 0..n {
            if block[u] != block[v] {
                continue;
            }
            let a = if g.contains_edge(u, v) { 1.0 } else { 0.0 };
            let du = g.neighbors(u).len() as f64;
            let dv = g.neighbors(v).len() as f64;
            q += a - du * dv / two_m;
        }
    }
    q / two_m
}

/// Exhaustive minimum conductance over every nonempty proper subset.
pub fn exhaustive_min_conductance(g: &Graph) -> f64 {
    let n = g.vertex_count();
    assert!(n <= 16);
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << n) - 1 {
        let set: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if let Some(phi) = naive_conductance(g, &set) {
            best = best.min(phi);
        }
    }
    best
}
