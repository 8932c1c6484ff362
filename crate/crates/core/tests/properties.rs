mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netclust::diffusion::{diffuse_step, extract_cluster, run_diffusion, truncate};
use netclust::fcm::{fcm_fit, fcm_fit_from_centers, fcm_objective, EmbeddingMatrix, FcmConfig};
use netclust::generators::{erdos_renyi, random_connected};
use netclust::graph::{load_edge_list, transition_prob, LoadOptions};
use netclust::quality::{conductance, modularity, Partition};
use netclust::sweep::sweep_cut;
use netclust::walk::{
    acceptance_probability, init_energies, run_walk, walk_step, TransitionRule, WalkConfig,
};
use netclust::{partition_graph, DiffusionConfig, Graph, SparseMass};

use common::{dense_power, naive_conductance, naive_modularity};

fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, 0.02f64..0.5, any::<u64>()).prop_map(|(n, p, s)| random_connected(n, p, s))
}

fn graph_and_vertex(max_n: usize) -> impl Strategy<Value = (Graph, usize)> {
    connected_graph(max_n).prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), 0..n)
    })
}

fn ball(g: &Graph, seed: usize, radius: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([seed]);
    let mut frontier = vec![seed];
    for _ in 0..radius {
        let mut next = Vec::new();
        for u in frontier {
            for v in g.neighbors(u) {
                if seen.insert(v) {
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transition_rows_sum_to_one(g in connected_graph(40)) {
        for x in 0..g.vertex_count() {
            let row: f64 = (0..g.vertex_count()).map(|y| transition_prob(&g, x, y).unwrap()).sum();
            prop_assert!((row - 1.0).abs() <= 1e-12, "row {x} sums to {row}");
        }
    }

    #[test]
    fn loading_is_deterministic_and_symmetric(
        edges in prop::collection::vec((0u16..30, 0u16..30), 1..80)
    ) {
        let text: String = edges.iter().map(|(a, b)| format!("v{a} v{b}\n")).collect();
        let first = load_edge_list(text.as_bytes(), &LoadOptions::default());
        let second = load_edge_list(text.as_bytes(), &LoadOptions::default());
        match (first, second) {
            (Ok((g1, s1)), Ok((g2, s2))) => {
                prop_assert_eq!(&g1, &g2);
                prop_assert_eq!(s1, s2);
                let n = g1.vertex_count();
                for u in 0..n {
                    prop_assert!(!g1.contains_edge(u, u));
                    for v in 0..n {
                        prop_assert_eq!(g1.contains_edge(u, v), g1.contains_edge(v, u));
                    }
                }
                prop_assert_eq!(g1.degrees().iter().sum::<usize>(), 2 * g1.edge_count());
            }
            (Err(_), Err(_)) => {
                // Only possible when every edge is a self-loop.
                prop_assert!(edges.iter().all(|(a, b)| a == b));
            }
            _ => prop_assert!(false, "loads disagree"),
        }
    }

    #[test]
    fn mass_is_conserved((g, seed) in graph_and_vertex(48), alpha in 0.0f64..0.2) {
        let mut mass = SparseMass::at_seed(seed);
        for _ in 0..60 {
            mass = diffuse_step(&g, &mass).unwrap();
            prop_assert!((mass.total() - 1.0).abs() <= 1e-12, "after step: {}", mass.total());
            mass = truncate(&mass, alpha).unwrap();
            prop_assert!((mass.total() - 1.0).abs() <= 1e-12, "after truncate: {}", mass.total());
        }
    }

    #[test]
    fn truncation_floor_holds((g, seed) in graph_and_vertex(48), alpha in 1e-4f64..0.3, steps in 1usize..30) {
        let mut mass = SparseMass::at_seed(seed);
        for _ in 0..steps {
            mass = truncate(&diffuse_step(&g, &mass).unwrap(), alpha).unwrap();
            let floor = alpha * mass.seed_mass();
            for (u, x) in mass.iter() {
                prop_assert!(x > 0.0);
                if u != seed {
                    prop_assert!(x >= floor, "mass[{u}] = {x} below {floor}");
                }
            }
        }
    }

    #[test]
    fn support_stays_in_ball((g, seed) in graph_and_vertex(48), alpha in 0.0f64..0.1, steps in 1usize..12) {
        let mut mass = SparseMass::at_seed(seed);
        for t in 1..=steps {
            mass = truncate(&diffuse_step(&g, &mass).unwrap(), alpha).unwrap();
            let allowed = ball(&g, seed, t);
            for u in mass.support() {
                prop_assert!(allowed.contains(&u), "vertex {u} outside radius {t}");
            }
        }
    }

    #[test]
    fn single_step_matches_dense((g, seed) in graph_and_vertex(32), steps in 1usize..20) {
        let mut mass = SparseMass::at_seed(seed);
        for _ in 0..steps {
            mass = diffuse_step(&g, &mass).unwrap();
        }
        let dense = dense_power(&g, seed, steps);
        let sparse = mass.to_dense(g.vertex_count());
        for (a, b) in sparse.iter().zip(&dense) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn sweep_returns_best_prefix((g, seed) in graph_and_vertex(24), alpha in 1e-4f64..0.1) {
        let cfg = DiffusionConfig { alpha, max_iterations: 200, ..Default::default() };
        let run = run_diffusion(&g, seed, &cfg).unwrap();
        let report = extract_cluster(&g, &run.mass).unwrap();
        prop_assert_eq!(report.members[0], seed);
        prop_assert_eq!(report.belongingness[0], 1.0);
        prop_assert!(report.belongingness.iter().all(|&b| b > 0.0));
        if report.degenerate {
            return Ok(());
        }
        // Rebuild the degree-normalized order independently and scan every prefix.
        let mut order: Vec<usize> = run.mass.support().filter(|&u| u != seed).collect();
        order.sort_by(|&a, &b| {
            let ka = run.mass.get(a) / g.degree(a) as f64;
            let kb = run.mass.get(b) / g.degree(b) as f64;
            kb.partial_cmp(&ka).unwrap().then(a.cmp(&b))
        });
        order.insert(0, seed);
        let best = (1..=order.len())
            .filter_map(|len| naive_conductance(&g, &order[..len]))
            .fold(f64::INFINITY, f64::min);
        prop_assert!((report.conductance - best).abs() <= 1e-12, "{} vs {best}", report.conductance);
        let phi = naive_conductance(&g, &report.members).unwrap();
        prop_assert!((report.conductance - phi).abs() <= 1e-12);
    }

    #[test]
    fn sweep_profile_matches_naive(g in connected_graph(20), perm_seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..g.vertex_count()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let res = sweep_cut(&g, &order, 1).unwrap();
        for (i, phi) in res.profile.iter().enumerate() {
            let naive = naive_conductance(&g, &order[..=i]);
            prop_assert_eq!(phi.is_some(), naive.is_some());
            if let (Some(a), Some(b)) = (phi, naive) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
        let min = res.profile.iter().flatten().fold(f64::INFINITY, |a, &b| a.min(b));
        prop_assert_eq!(res.conductance, min);
    }

    #[test]
    fn conductance_is_symmetric_and_bounded(g in connected_graph(30), mask in any::<u64>()) {
        let n = g.vertex_count();
        let set: Vec<usize> = (0..n).filter(|&i| mask >> (i % 64) & 1 == 1).collect();
        let rest: Vec<usize> = (0..n).filter(|&i| mask >> (i % 64) & 1 == 0).collect();
        if set.is_empty() || rest.is_empty() {
            prop_assert!(conductance(&g, &set).is_err());
            return Ok(());
        }
        let a = conductance(&g, &set).unwrap();
        let b = conductance(&g, &rest).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!((0.0..=1.0).contains(&a));
        // Connected graph: a proper subset always has a cut edge.
        prop_assert!(a > 0.0);
        prop_assert!((a - naive_conductance(&g, &set).unwrap()).abs() <= 1e-15);
    }

    #[test]
    fn conductance_zero_on_components(n1 in 2usize..12, n2 in 2usize..12, s in any::<u64>()) {
        let a = random_connected(n1, 0.3, s);
        let b = random_connected(n2, 0.3, s ^ 1);
        let mut edges = Vec::new();
        for u in 0..n1 {
            for v in a.neighbors(u).filter(|&v| v > u) {
                edges.push((u, v));
            }
        }
        for u in 0..n2 {
            for v in b.neighbors(u).filter(|&v| v > u) {
                edges.push((n1 + u, n1 + v));
            }
        }
        let g = Graph::from_edges(n1 + n2, &edges).unwrap();
        let first: Vec<usize> = (0..n1).collect();
        prop_assert_eq!(conductance(&g, &first).unwrap(), 0.0);
    }

    #[test]
    fn modularity_matches_pair_sum_and_relabeling(
        g in connected_graph(30),
        labels in prop::collection::vec(0usize..6, 30),
        shift in 1usize..6,
    ) {
        let n = g.vertex_count();
        let block: Vec<usize> = labels[..n].to_vec();
        let p = Partition::from_assignment(block.iter().copied());
        let q = modularity(&g, &p).unwrap();
        prop_assert!((q - naive_modularity(&g, &block)).abs() <= 1e-12);
        let relabeled: Vec<usize> = block.iter().map(|b| (b + shift) * 7 % 97).collect();
        let q2 = modularity(&g, &Partition::from_assignment(relabeled)).unwrap();
        prop_assert!((q - q2).abs() <= 1e-12);
        let singles = modularity(&g, &Partition::singletons(n)).unwrap();
        prop_assert!(singles < 0.0);
    }

    #[test]
    fn partition_is_valid(n in 2usize..40, p in 0.0f64..0.3, s in any::<u64>(), alpha in 1e-5f64..0.05) {
        let g = erdos_renyi(n, p, s);
        let run = partition_graph(&g, &DiffusionConfig { alpha, max_iterations: 300, ..Default::default() }).unwrap();
        let blocks = run.partition.blocks();
        let mut seen = vec![false; n];
        for b in &blocks {
            prop_assert!(!b.is_empty());
            for &v in b {
                prop_assert!(!seen[v]);
                seen[v] = true;
            }
        }
        prop_assert!(seen.iter().all(|&x| x));
        prop_assert_eq!(run.block_seeds.len(), blocks.len());
    }

    #[test]
    fn walk_energies_and_visits((g, seed) in graph_and_vertex(24), rng_seed in any::<u64>(), normalized in any::<bool>()) {
        let mut cfg = WalkConfig::for_cluster_size(4).with_rng_seed(rng_seed);
        if normalized {
            cfg.rule = TransitionRule::NeighborNormalized;
        }
        let mut state = init_energies(&g, seed, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let mut before: Vec<f64> = (0..g.vertex_count()).map(|v| state.energy(&g, v)).collect();
        state.f = 1.3;
        for _ in 0..60 {
            let from = state.current;
            let to = walk_step(&g, &mut state, cfg.rule, &mut rng).unwrap();
            prop_assert!(to == from || g.contains_edge(from, to));
            let p = acceptance_probability(before[from], before[to]);
            prop_assert!(p > 0.0 && p <= 1.0);
            for (v, old) in before.iter_mut().enumerate() {
                let e = state.energy(&g, v);
                prop_assert!(e > 0.0);
                prop_assert!(e >= *old, "energy of {v} fell from {old} to {e}");
                *old = e;
            }
        }
        let run = run_walk(&g, seed, &cfg).unwrap();
        let total: u64 = run.state.visit_counts().values().sum();
        prop_assert_eq!(total as usize, run.state.steps() + 1);
        for phase in &run.phases {
            prop_assert_eq!(phase.visits.values().sum::<u64>() as usize, phase.steps);
        }
        prop_assert_eq!(run_walk(&g, seed, &cfg).unwrap().state, run.state);
    }
}

fn random_points(rows: usize, dims: usize, seed: u64) -> EmbeddingMatrix {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|i| {
            let blob = (i % 3) as f64;
            (0..dims).map(|_| blob + rng.random::<f64>() * 0.8).collect()
        })
        .collect();
    EmbeddingMatrix::from_rows(&data).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fcm_descends_and_rows_sum_to_one(
        rows in 6usize..40, dims in 1usize..5, k in 2usize..5, m in 1.2f64..3.5, seed in any::<u64>()
    ) {
        prop_assume!(k <= rows);
        let e = random_points(rows, dims, seed);
        let cfg = FcmConfig { k, m, rng_seed: seed, ..Default::default() };
        let msm = fcm_fit(&e, &cfg).unwrap();
        for w in msm.objective_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{} -> {}", w[0], w[1]);
        }
        for i in 0..rows {
            let s: f64 = msm.row(i).iter().sum();
            prop_assert!((s - 1.0).abs() <= 1e-9);
            prop_assert!(msm.row(i).iter().all(|&u| (0.0..=1.0).contains(&u)));
        }
        let brute = brute_objective(&e, msm.centers(), |i, j| msm.membership(i, j), m);
        prop_assert!((fcm_objective(&e, &msm).unwrap() - brute).abs() <= 1e-12);
    }

    #[test]
    fn fcm_center_permutation_permutes_columns(
        rows in 6usize..30, dims in 1usize..4, seed in any::<u64>(), rot in 1usize..3
    ) {
        let e = random_points(rows, dims, seed);
        let k = 3;
        let centers: Vec<Vec<f64>> = (0..k).map(|j| e.row(j * rows / k).to_vec()).collect();
        let mut rotated = centers.clone();
        rotated.rotate_left(rot);
        let cfg = FcmConfig { k, ..Default::default() };
        let a = fcm_fit_from_centers(&e, centers, &cfg).unwrap();
        let b = fcm_fit_from_centers(&e, rotated, &cfg).unwrap();
        prop_assert_eq!(a.iterations, b.iterations);
        for i in 0..rows {
            for j in 0..k {
                let diff = (a.membership(i, (j + rot) % k) - b.membership(i, j)).abs();
                prop_assert!(diff <= 1e-9, "row {i} col {j}: {diff}");
            }
        }
    }
}

fn brute_objective(
    e: &EmbeddingMatrix,
    centers: &[Vec<f64>],
    u: impl Fn(usize, usize) -> f64,
    m: f64,
) -> f64 {
    let mut total = 0.0;
    for i in 0..e.rows() {
        for (j, c) in centers.iter().enumerate() {
            let mut d2 = 0.0;
            for (x, y) in e.row(i).iter().zip(c) {
                d2 += (x - y) * (x - y);
            }
            total += u(i, j).powf(m) * d2;
        }
    }
    total
}

#[test]
fn fuzzifier_trend_on_separated_data() {
    let rows: Vec<Vec<f64>> = (0..30)
        .map(|i| {
            let blob = (i % 3) as f64 * 10.0;
            vec![blob + (i as f64 * 0.37).sin(), blob + (i as f64 * 0.71).cos()]
        })
        .collect();
    let e = EmbeddingMatrix::from_rows(&rows).unwrap();
    // One start per blob so every m settles on the same three clusters.
    let starts: Vec<Vec<f64>> = (0..3).map(|i| rows[i].clone()).collect();
    let mut last = f64::INFINITY;
    for m in [1.1, 1.5, 2.0, 3.0] {
        let cfg = FcmConfig { k: 3, m, ..Default::default() };
        let msm = fcm_fit_from_centers(&e, starts.clone(), &cfg).unwrap();
        let mean_max: f64 = (0..e.rows())
            .map(|i| msm.row(i).iter().cloned().fold(0.0, f64::max))
            .sum::<f64>()
            / e.rows() as f64;
        assert!(mean_max < last, "m = {m}: mean max membership {mean_max} not below {last}");
        last = mean_max;
    }
}

#[test]
fn support_shrinks_with_alpha() {
    // Larger alpha should never give a larger support on this fixed suite.
    let alphas = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 5e-2];
    let mut violations = Vec::new();
    for s in 0..20u64 {
        let g = random_connected(40, 0.08, s);
        for seed in [0, 17, 39] {
            let sizes: Vec<usize> = alphas
                .iter()
                .map(|&a| {
                    let cfg = DiffusionConfig { alpha: a, max_iterations: 50, convergence_epsilon: 0.0 };
                    run_diffusion(&g, seed, &cfg).unwrap().mass.support_len()
                })
                .collect();
            if sizes.windows(2).any(|w| w[1] > w[0]) {
                violations.push((s, seed, sizes));
            }
        }
    }
    for v in &violations {
        eprintln!("support grew with alpha: graph {} seed {} sizes {:?}", v.0, v.1, v.2);
    }
    assert!(violations.is_empty(), "{} violations", violations.len());
}
