//! Overlapping clusters via fuzzy c-means over diffusion embeddings.
//!
//! Each vertex is embedded as the vector of its converged diffusion masses
//! from a handful of center vertices. Fuzzy c-means then assigns every vertex
//! a membership in each of `k` clusters, minimizing
//! `sum_i sum_j u_ij^m * |x_i - c_j|^2` subject to each row of `u` summing
//! to one.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffusion::{run_diffusion, DiffusionConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};

/// Row-major `n x D` matrix of vertex coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dims: usize,
    data: Vec<f64>,
    /// Center vertex behind each column, empty for synthetic data.
    centers: Vec<VertexId>,
}

impl EmbeddingMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<EmbeddingMatrix> {
        let dims = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || dims == 0 {
            return Err(Error::invalid("embedding needs at least one row and column"));
        }
        if rows.iter().any(|r| r.len() != dims) {
            return Err(Error::invalid("embedding rows have differing lengths"));
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::invalid("embedding entries must be finite"));
        }
        Ok(EmbeddingMatrix {
            rows: rows.len(),
            dims,
            data: rows.concat(),
            centers: Vec::new(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dims..(i + 1) * self.dims]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dims + j]
    }

    pub fn centers(&self) -> &[VertexId] {
        &self.centers
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

/// Column `j` is the converged diffusion mass with `centers[j]` as the seed;
/// vertices outside that run's support get zero.
pub fn build_embedding(
    g: &Graph,
    centers: &[VertexId],
    cfg: &DiffusionConfig,
) -> Result<EmbeddingMatrix> {
    if centers.len() < 2 {
        return Err(Error::invalid("an embedding needs at least two centers"));
    }
    let mut sorted = centers.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("embedding centers must be distinct"));
    }
    let n = g.vertex_count();
    let dims = centers.len();
    let mut data = vec![0.0; n * dims];
    for (j, &c) in centers.iter().enumerate() {
        let run = run_diffusion(g, c, cfg)?;
        for (v, x) in run.mass.iter() {
            data[v * dims + j] = x;
        }
    }
    Ok(EmbeddingMatrix {
        rows: n,
        dims,
        data,
        centers: centers.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    rows: usize,
    k: usize,
    memberships: Vec<f64>,
    centers: Vec<Vec<f64>>,
    pub m: f64,
    /// Objective after each iteration of the alternating optimization.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl MembershipMatrix {
    /// Validate and wrap an explicit membership table.
    pub fn new(memberships: Vec<Vec<f64>>, centers: Vec<Vec<f64>>, m: f64) -> Result<Self> {
        let k = centers.len();
        if k == 0 || memberships.iter().any(|r| r.len() != k) {
            return Err(Error::invalid("membership rows must have one entry per center"));
        }
        if m.is_nan() || m <= 1.0 {
            return Err(Error::invalid(format!("fuzzifier must exceed 1, got {m}")));
        }
        Ok(MembershipMatrix {
            rows: memberships.len(),
            k,
            memberships: memberships.concat(),
            centers,
            m,
            objective_history: Vec::new(),
            iterations: 0,
            converged: false,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn membership(&self, i: usize, j: usize) -> f64 {
        self.memberships[i * self.k + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.memberships[i * self.k..(i + 1) * self.k]
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    /// Block with the largest membership for row `i`, lowest index on ties.
    pub fn argmax(&self, i: usize) -> usize {
        let row = self.row(i);
        (0..self.k)
            .fold(0, |best, j| if row[j] > row[best] { j } else { best })
    }

    pub fn objective(&self) -> Option<f64> {
        self.objective_history.last().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcmConfig {
    pub k: usize,
    pub m: f64,
    /// Stop once an iteration lowers the objective by less than this.
    pub tol: f64,
    pub max_iters: usize,
    pub rng_seed: u64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        FcmConfig {
            k: 2,
            m: 2.0,
            tol: 1e-12,
            max_iters: 300,
            rng_seed: 0,
        }
    }
}

impl FcmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::invalid(format!("k must be at least 2, got {}", self.k)));
        }
        if !(self.m > 1.0 && self.m.is_finite()) {
            return Err(Error::invalid(format!("fuzzifier m must exceed 1, got {}", self.m)));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::invalid("tol must be nonnegative"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        Ok(())
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `F_m = sum_i sum_j u_ij^m |x_i - c_j|^2` with the Euclidean norm.
pub fn fcm_objective(e: &EmbeddingMatrix, msm: &MembershipMatrix) -> Result<f64> {
    if e.rows() != msm.rows() {
        return Err(Error::invalid("embedding and membership row counts differ"));
    }
    if msm.centers.iter().any(|c| c.len() != e.dims()) {
        return Err(Error::invalid("center dimension does not match embedding"));
    }
    Ok(objective_raw(e, &msm.memberships, &msm.centers, msm.k, msm.m))
}

/// Membership row of `x` given the current centers.
///
/// A point sitting exactly on one or more centers splits its membership
/// evenly among them and gets zero elsewhere.
fn update_row(x: &[f64], centers: &[Vec<f64>], m: f64, out: &mut [f64]) {
    let d2: Vec<f64> = centers.iter().map(|c| squared_distance(x, c)).collect();
    let coincident = d2.iter().filter(|&&d| d == 0.0).count();
    if coincident > 0 {
        for (o, &d) in out.iter_mut().zip(&d2) {
            *o = if d == 0.0 { 1.0 / coincident as f64 } else { 0.0 };
        }
        return;
    }
    // (|x-c_j| / |x-c_l|)^(2/(m-1)) == (d2_j / d2_l)^(1/(m-1))
    let p = 1.0 / (m - 1.0);
    for (j, o) in out.iter_mut().enumerate() {
        let denom: f64 = d2.iter().map(|&dl| (d2[j] / dl).powf(p)).sum();
        *o = 1.0 / denom;
    }
}

fn update_centers(e: &EmbeddingMatrix, memberships: &[f64], k: usize, m: f64, centers: &mut [Vec<f64>]) {
    for (j, center) in centers.iter_mut().enumerate() {
        let mut num = vec![0.0; e.dims()];
        let mut den = 0.0;
        for i in 0..e.rows() {
            let w = memberships[i * k + j].powf(m);
            if w == 0.0 {
                continue;
            }
            den += w;
            for (acc, &x) in num.iter_mut().zip(e.row(i)) {
                *acc += w * x;
            }
        }
        // An empty cluster keeps its previous center.
        if den > 0.0 {
            for (c, acc) in center.iter_mut().zip(num) {
                *c = acc / den;
            }
        }
    }
}

/// Pick `k` rows with pairwise distinct values in a seeded random order.
fn initial_centers(e: &EmbeddingMatrix, k: usize, rng_seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut order: Vec<usize> = (0..e.rows()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    for i in order {
        let row = e.row(i);
        if centers.iter().all(|c| c.as_slice() != row) {
            centers.push(row.to_vec());
            if centers.len() == k {
                return Ok(centers);
            }
        }
    }
    Err(Error::invalid(format!(
        "embedding has fewer than k = {k} distinct rows"
    )))
}

/// Fuzzy c-means with centers initialized from `k` distinct random rows.
pub fn fcm_fit(e: &EmbeddingMatrix, cfg: &FcmConfig) -> Result<MembershipMatrix> {
    cfg.validate()?;
    let centers = initial_centers(e, cfg.k, cfg.rng_seed)?;
    fcm_fit_from_centers(e, centers, cfg)
}

/// Fuzzy c-means from explicit initial centers; `cfg.k` and `cfg.rng_seed`
/// are ignored in favor of `centers.len()`.
pub fn fcm_fit_from_centers(
    e: &EmbeddingMatrix,
    mut centers: Vec<Vec<f64>>,
    cfg: &FcmConfig,
) -> Result<MembershipMatrix> {
    let k = centers.len();
    FcmConfig { k, ..*cfg }.validate()?;
    if centers.iter().any(|c| c.len() != e.dims()) {
        return Err(Error::invalid("initial center dimension does not match embedding"));
    }
    let n = e.rows();
    let m = cfg.m;
    let mut memberships = vec![0.0; n * k];
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        for i in 0..n {
            update_row(e.row(i), &centers, m, &mut memberships[i * k..(i + 1) * k]);
        }
        update_centers(e, &memberships, k, m, &mut centers);
        let objective = objective_raw(e, &memberships, &centers, k, m);
        let decrease = history.last().map(|&prev| prev - objective);
        history.push(objective);
        if decrease.is_some_and(|d| d < cfg.tol) {
            converged = true;
            break;
        }
    }

    Ok(MembershipMatrix {
        rows: n,
        k,
        memberships,
        centers,
        m,
        iterations: history.len(),
        objective_history: history,
        converged,
    })
}

fn objective_raw(e: &EmbeddingMatrix, u: &[f64], centers: &[Vec<f64>], k: usize, m: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..e.rows() {
        for (j, c) in centers.iter().enumerate() {
            total += u[i * k + j].powf(m) * squared_distance(e.row(i), c);
        }
    }
    total
}

/// Overlapping vertex sets: row `i` joins every cluster with membership at
/// least `threshold`, and always its argmax cluster.
pub fn overlap_report(msm: &MembershipMatrix, threshold: f64) -> Result<Vec<Vec<usize>>> {
    if !(threshold > 0.0 && threshold <= 0.5) {
        return Err(Error::invalid(format!(
            "overlap threshold must lie in (0, 0.5], got {threshold}"
        )));
    }
    let mut clusters = vec![Vec::new(); msm.k()];
    for i in 0..msm.rows() {
        let best = msm.argmax(i);
        for (j, cluster) in clusters.iter_mut().enumerate() {
            if j == best || msm.membership(i, j) >= threshold {
                cluster.push(i);
            }
        }
    }
    Ok(clusters)
}

/// Cluster whose center is most evenly spread over the embedding columns:
/// the one maximizing its smallest coordinate after scaling each column by
/// its maximum. With one column per community leader this picks the block
/// sitting between the communities.
pub fn most_mixed_block(e: &EmbeddingMatrix, msm: &MembershipMatrix) -> usize {
    let scale: Vec<f64> = (0..e.dims())
        .map(|j| {
            let max = (0..e.rows()).map(|i| e.get(i, j)).fold(0.0, f64::max);
            if max > 0.0 { max } else { 1.0 }
        })
        .collect();
    let score = |c: &Vec<f64>| {
        c.iter()
            .zip(&scale)
            .map(|(x, s)| x / s)
            .fold(f64::INFINITY, f64::min)
    };
    (0..msm.k()).fold(0, |best, j| {
        if score(&msm.centers[j]) > score(&msm.centers[best]) {
            j
        } else {
            best
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::two_cliques_bridge;

    fn two_blobs() -> EmbeddingMatrix {
        EmbeddingMatrix::from_rows(&[
            vec![0.0, 0.0],
            vec![0.1, 0.0],
            vec![0.0, 0.1],
            vec![5.0, 5.0],
            vec![5.1, 5.0],
            vec![5.0, 5.1],
        ])
        .unwrap()
    }

    #[test]
    fn objective_zero_when_points_are_centers() {
        let e = EmbeddingMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let msm = MembershipMatrix::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            2.0,
        )
        .unwrap();
        assert_eq!(fcm_objective(&e, &msm).unwrap(), 0.0);
    }

    #[test]
    fn objective_single_point() {
        let e = EmbeddingMatrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let msm = MembershipMatrix::new(vec![vec![1.0]], vec![vec![0.0, 0.0]], 2.0).unwrap();
        assert_eq!(fcm_objective(&e, &msm).unwrap(), 1.0);
    }

    #[test]
    fn equidistant_point_splits_evenly() {
        let mut out = [0.0; 2];
        update_row(&[0.0, 1.0], &[vec![-1.0, 1.0], vec![1.0, 1.0]], 2.0, &mut out);
        assert_eq!(out, [0.5, 0.5]);
    }

    #[test]
    fn coincident_point_gets_hard_membership() {
        let mut out = [0.0; 3];
        update_row(&[1.0, 1.0], &[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]], 2.0, &mut out);
        assert_eq!(out, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn separated_blobs() {
        let e = two_blobs();
        let cfg = FcmConfig { k: 2, ..Default::default() };
        let msm = fcm_fit(&e, &cfg).unwrap();
        let a = msm.argmax(0);
        assert!((0..3).all(|i| msm.argmax(i) == a));
        assert!((3..6).all(|i| msm.argmax(i) != a));
        for i in 0..6 {
            assert!((msm.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let e = two_blobs();
        for cfg in [
            FcmConfig { k: 1, ..Default::default() },
            FcmConfig { m: 1.0, ..Default::default() },
            FcmConfig { max_iters: 0, ..Default::default() },
        ] {
            assert!(matches!(fcm_fit(&e, &cfg), Err(Error::InvalidParameter(_))));
        }
        let flat = EmbeddingMatrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        assert!(fcm_fit(&flat, &FcmConfig::default()).is_err());
    }

    #[test]
    fn overlap_examples() {
        let msm = MembershipMatrix::new(
            vec![vec![0.6, 0.4], vec![0.9, 0.1]],
            vec![vec![0.0], vec![1.0]],
            2.0,
        )
        .unwrap();
        assert_eq!(overlap_report(&msm, 0.4).unwrap(), vec![vec![0, 1], vec![0]]);
        assert_eq!(overlap_report(&msm, 0.3).unwrap(), vec![vec![0, 1], vec![0]]);
        assert!(overlap_report(&msm, 0.6).is_err());
        assert!(overlap_report(&msm, 0.0).is_err());

        let third = 1.0 / 3.0;
        let uniform = MembershipMatrix::new(
            vec![vec![third; 3]],
            vec![vec![0.0], vec![1.0], vec![2.0]],
            2.0,
        )
        .unwrap();
        assert_eq!(overlap_report(&uniform, third).unwrap(), vec![vec![0], vec![0], vec![0]]);
    }

    #[test]
    fn embedding_on_disjoint_triangles() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let e = build_embedding(&g, &[0, 4], &DiffusionConfig::default()).unwrap();
        assert_eq!((e.rows(), e.dims()), (6, 2));
        for v in 3..6 {
            assert_eq!(e.get(v, 0), 0.0);
        }
        for v in 0..3 {
            assert_eq!(e.get(v, 1), 0.0);
        }
        assert!((e.column(0).iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_preconditions() {
        let g = two_cliques_bridge(4);
        let cfg = DiffusionConfig::default();
        assert!(build_embedding(&g, &[0], &cfg).is_err());
        assert!(build_embedding(&g, &[1, 1], &cfg).is_err());
    }
}
