//! Structural identity descriptors.
//!
//! Each node gets a fixed-length descriptor: the `k` largest visit masses of
//! a restarting random walk rooted at the node, sorted descending and
//! normalized to sum 1, together with the ids of the nodes those masses
//! belong to. A dense linear-solve oracle computes the same quantity exactly
//! for small graphs so the Monte Carlo estimator can be checked against it.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, SENTINEL};
use crate::linalg::{lu_solve, Mat};
use crate::real::Real;

/// Dense-solve size guard for [`exact_rpr`]; beyond this the oracle refuses.
pub const EXACT_RPR_MAX_NODES: usize = 2000;

/// Configuration of the rooted-walk descriptor estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct RprConfig {
    /// Continuation probability: at each step the walk moves to a uniform
    /// neighbor with this probability, otherwise restarts at the root.
    pub beta: f64,
    /// Descriptor length (top-k visit masses kept).
    pub k: usize,
    /// Number of walks per node.
    pub m: usize,
    /// Length of each walk (including the root at position 0).
    pub l: usize,
    /// Seed for per-node walk RNG streams.
    pub seed: u64,
}

impl Default for RprConfig {
    fn default() -> Self {
        RprConfig {
            beta: 0.5,
            k: 16,
            m: 10,
            l: 40,
            seed: 1,
        }
    }
}

impl RprConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::validation(format!(
                "beta must be in (0,1), got {}",
                self.beta
            )));
        }
        if self.k < 1 {
            return Err(Error::validation("k must be >= 1"));
        }
        if self.m < 1 {
            return Err(Error::validation("m must be >= 1"));
        }
        if self.l < 2 {
            return Err(Error::validation("l must be >= 2"));
        }
        if self.k > self.m * self.l {
            return Err(Error::validation(format!(
                "k={} exceeds total walk positions m*l={}",
                self.k,
                self.m * self.l
            )));
        }
        Ok(())
    }
}

/// Top-k normalized visit-mass descriptor of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralFeature<T> {
    /// Nonnegative masses, sorted descending, summing to 1.
    pub values: Vec<T>,
    /// Node each mass belongs to, aligned with `values`; [`SENTINEL`] for
    /// zero padding when fewer than `k` distinct nodes were visited.
    pub source_ids: Vec<NodeId>,
}

impl<T: Real> StructuralFeature<T> {
    pub fn k(&self) -> usize {
        self.values.len()
    }
}

/// Derives the per-node RNG seed; keeps batch featurization independent of
/// processing order.
pub fn node_seed(seed: u64, v: NodeId) -> u64 {
    seed ^ (v as u64)
}

/// One restarting random walk of length `l` rooted at `root`. With
/// probability `beta` the walk steps to a uniformly random neighbor of the
/// current node, otherwise it restarts at the root. An isolated root yields
/// an all-root sequence.
pub fn rooted_random_walk<T: Real, R: Rng + ?Sized>(
    g: &Graph<T>,
    root: NodeId,
    l: usize,
    beta: f64,
    rng: &mut R,
) -> Vec<NodeId> {
    let mut walk = Vec::with_capacity(l);
    walk.push(root);
    let mut cur = root;
    for _ in 1..l {
        let next = if rng.random::<f64>() < beta {
            g.sample_neighbor_uniform(cur, rng).unwrap_or(root)
        } else {
            root
        };
        walk.push(next);
        cur = next;
    }
    walk
}

/// Estimates the descriptor of `v` from `cfg.m` rooted walks of length
/// `cfg.l`: counts every visit (the root at position 0 and at every restart
/// included), keeps the `k` largest counts (ties broken by node id
/// ascending), pads with zeros and [`SENTINEL`] ids if fewer than `k`
/// distinct nodes were visited, and normalizes the kept counts to sum 1.
pub fn structural_features<T: Real, R: Rng + ?Sized>(
    g: &Graph<T>,
    v: NodeId,
    cfg: &RprConfig,
    rng: &mut R,
) -> StructuralFeature<T> {
    let mut counts = vec![0u64; g.num_nodes()];
    for _ in 0..cfg.m {
        let mut cur = v;
        counts[cur] += 1;
        for _ in 1..cfg.l {
            cur = if rng.random::<f64>() < cfg.beta {
                g.sample_neighbor_uniform(cur, rng).unwrap_or(v)
            } else {
                v
            };
            counts[cur] += 1;
        }
    }

    let mut visited: Vec<(NodeId, u64)> = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(i, &c)| (i, c))
        .collect();
    visited.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    visited.truncate(cfg.k);

    let total: u64 = visited.iter().map(|&(_, c)| c).sum();
    let mut values = Vec::with_capacity(cfg.k);
    let mut source_ids = Vec::with_capacity(cfg.k);
    for (id, c) in &visited {
        values.push(T::from_f64(*c as f64 / total as f64));
        source_ids.push(*id);
    }
    while values.len() < cfg.k {
        values.push(T::zero());
        source_ids.push(SENTINEL);
    }
    StructuralFeature { values, source_ids }
}

/// Descriptors for every node, each from its own RNG stream seeded by
/// [`node_seed`], so the result is reproducible and independent of
/// processing order.
pub fn all_structural_features<T: Real>(
    g: &Graph<T>,
    cfg: &RprConfig,
    seed: u64,
) -> Vec<StructuralFeature<T>> {
    all_structural_features_seeded(g, cfg, &|v| node_seed(seed, v))
}

/// Like [`all_structural_features`] with a caller-supplied per-node seed
/// function (used e.g. to force identical walk streams for mirrored copies).
pub fn all_structural_features_seeded<T: Real>(
    g: &Graph<T>,
    cfg: &RprConfig,
    seed_of: &(dyn Fn(NodeId) -> u64 + Sync),
) -> Vec<StructuralFeature<T>> {
    (0..g.num_nodes())
        .into_par_iter()
        .map(|v| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed_of(v));
            structural_features(g, v, cfg, &mut rng)
        })
        .collect()
}

/// Exact descriptor matrix: row `i` is the stationary occupancy of the
/// beta-restarting walk rooted at `i`, computed as
/// `(1-beta) * (I - beta * P)^-1` by dense LU solve. Test oracle only:
/// refuses graphs with isolated nodes (P would not be row-stochastic) or
/// more than [`EXACT_RPR_MAX_NODES`] nodes.
pub fn exact_rpr<T: Real>(g: &Graph<T>, beta: f64) -> Result<Mat<T>> {
    let n = g.num_nodes();
    if n > EXACT_RPR_MAX_NODES {
        return Err(Error::validation(format!(
            "exact descriptor solve limited to {EXACT_RPR_MAX_NODES} nodes, graph has {n}"
        )));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::validation(format!("beta must be in (0,1), got {beta}")));
    }
    if let Some(v) = (0..n).find(|&v| g.is_isolated(v)) {
        return Err(Error::Degenerate(format!(
            "node {} is isolated; transition matrix is not row-stochastic",
            g.name(v)
        )));
    }

    let b = T::from_f64(beta);
    // Solve (I - beta * P^T) X = (1-beta) * I; column i of X is row i of the
    // descriptor matrix.
    let mut a = Mat::zeros(n, n);
    for i in 0..n {
        for (&j, &w) in g.neighbors(i).iter().zip(g.neighbor_weights(i)) {
            // P[i][j] contributes to A[j][i].
            let v = a.get(j, i) - b * w / g.degree(i);
            a.set(j, i, v);
        }
    }
    for i in 0..n {
        let v = a.get(i, i) + T::one();
        a.set(i, i, v);
    }
    let mut rhs = Mat::zeros(n, n);
    let scale = T::one() - b;
    for i in 0..n {
        rhs.set(i, i, scale);
    }
    lu_solve(a, &mut rhs)?;

    let mut s = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s.set(i, j, rhs.get(j, i));
        }
    }
    Ok(s)
}

/// Renormalized top-k of an exact descriptor row, in the same (value desc,
/// id asc) order as [`structural_features`]. Used to compare the Monte Carlo
/// estimate against the oracle.
pub fn exact_top_k<T: Real>(row: &[T], k: usize) -> StructuralFeature<T> {
    let mut entries: Vec<(NodeId, T)> = row
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v > T::zero())
        .map(|(i, &v)| (i, v))
        .collect();
    entries.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    entries.truncate(k);
    let total: T = entries.iter().map(|&(_, v)| v).sum();
    let mut values: Vec<T> = entries.iter().map(|&(_, v)| v / total).collect();
    let mut source_ids: Vec<NodeId> = entries.iter().map(|&(i, _)| i).collect();
    while values.len() < k {
        values.push(T::zero());
        source_ids.push(SENTINEL);
    }
    StructuralFeature { values, source_ids }
}

/// Dumps descriptors as `node_id<TAB>src:val,src:val,...` (descending),
/// skipping zero padding. Sources are external node ids.
pub fn write_feature_dump<T: Real>(
    g: &Graph<T>,
    feats: &[StructuralFeature<T>],
    path: &Path,
) -> Result<()> {
    let mut out = String::new();
    for (v, feat) in feats.iter().enumerate() {
        let entries: Vec<String> = feat
            .source_ids
            .iter()
            .zip(&feat.values)
            .filter(|&(&id, _)| id != SENTINEL)
            .map(|(&id, &val)| format!("{}:{}", g.name(id), val.as_f64()))
            .collect();
        out.push_str(&format!("{}\t{}\n", g.name(v), entries.join(",")));
    }
    crate::graph::write_atomic(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphParts;

    fn path_graph(n: usize) -> Graph<f64> {
        let edges = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        Graph::from_parts(GraphParts {
            edges,
            content: Mat::zeros(n, 1),
            labels: None,
            names: None,
        })
        .unwrap()
    }

    fn two_node() -> Graph<f64> {
        path_graph(2)
    }

    fn triangle() -> Graph<f64> {
        Graph::from_parts(GraphParts {
            edges: vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
            content: Mat::zeros(3, 1),
            labels: None,
            names: None,
        })
        .unwrap()
    }

    fn star(leaves: usize) -> Graph<f64> {
        let edges = (1..=leaves).map(|i| (0, i, 1.0)).collect();
        Graph::from_parts(GraphParts {
            edges,
            content: Mat::zeros(leaves + 1, 1),
            labels: None,
            names: None,
        })
        .unwrap()
    }

    #[test]
    fn walk_beta_zero_is_all_root() {
        let g = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // beta=0 is outside RprConfig's range but the walk itself is total.
        let walk = rooted_random_walk(&g, 1, 5, 0.0, &mut rng);
        assert_eq!(walk, vec![1; 5]);
    }

    #[test]
    fn walk_beta_one_alternates_on_two_nodes() {
        let g = two_node();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let walk = rooted_random_walk(&g, 0, 4, 1.0, &mut rng);
        assert_eq!(walk, vec![0, 1, 0, 1]);
    }

    #[test]
    fn walk_restart_fraction_matches_beta() {
        // On a triangle with beta=0.5, each step restarts w.p. 0.5. A restart
        // from a non-root node is observable as a jump to the root that is
        // not a neighbor move... on a triangle every node neighbors the root,
        // so count root appearances from the root's successors instead:
        // steps from the root go to a neighbor w.p. beta. Track the
        // continuation coin directly via the spec'd Bernoulli check.
        let g = triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let steps = 100_000;
        let walk = rooted_random_walk(&g, 0, steps + 1, 0.5, &mut rng);
        // Positions where the walk sat at the root: next position is a
        // neighbor (continuation) or the root again (restart).
        let mut at_root = 0usize;
        let mut restarted = 0usize;
        for w in walk.windows(2) {
            if w[0] == 0 {
                at_root += 1;
                if w[1] == 0 {
                    restarted += 1;
                }
            }
        }
        let frac = restarted as f64 / at_root as f64;
        assert!((frac - 0.5).abs() < 0.01, "restart fraction {frac}");
    }

    #[test]
    fn walk_isolated_root_stays_put() {
        let g: Graph<f64> = Graph::from_parts(GraphParts {
            edges: vec![(0, 1, 1.0)],
            content: Mat::zeros(3, 1),
            labels: None,
            names: None,
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(rooted_random_walk(&g, 2, 6, 0.9, &mut rng), vec![2; 6]);
    }

    #[test]
    fn features_beta_near_zero_concentrate_on_root() {
        let g = triangle();
        let cfg = RprConfig {
            beta: 1e-12,
            k: 3,
            m: 10,
            l: 10,
            seed: 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let feat = structural_features(&g, 2, &cfg, &mut rng);
        assert_eq!(feat.source_ids[0], 2);
        assert_eq!(feat.values[0], 1.0);
        assert_eq!(feat.values[1], 0.0);
        assert_eq!(feat.source_ids[1], SENTINEL);
    }

    #[test]
    fn features_two_node_match_exact() {
        let g = two_node();
        let cfg = RprConfig {
            beta: 0.5,
            k: 2,
            m: 10_000,
            l: 20,
            seed: 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let feat = structural_features(&g, 0, &cfg, &mut rng);
        assert_eq!(feat.source_ids, vec![0, 1]);
        assert!((feat.values[0] - 2.0 / 3.0).abs() < 0.02, "{:?}", feat.values);
        assert!((feat.values[1] - 1.0 / 3.0).abs() < 0.02);
    }

    #[test]
    fn features_star_center_dominates() {
        let g = star(4);
        let cfg = RprConfig {
            beta: 0.5,
            k: 5,
            m: 2000,
            l: 50,
            seed: 0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let feat = structural_features(&g, 0, &cfg, &mut rng);
        assert_eq!(feat.source_ids[0], 0);
        for i in 1..5 {
            assert!(feat.values[0] > feat.values[i]);
        }
        // Oracle agrees: center row has dominant diagonal, symmetric leaves.
        let s = exact_rpr(&g, 0.5).unwrap();
        let row = s.row(0);
        for leaf in 1..5 {
            assert!(row[0] > row[leaf]);
            assert!((row[leaf] - row[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn features_normalized_descending_distinct() {
        let g = path_graph(9);
        let cfg = RprConfig {
            k: 6,
            ..RprConfig::default()
        };
        for v in 0..g.num_nodes() {
            let mut rng = ChaCha8Rng::seed_from_u64(node_seed(9, v));
            let feat = structural_features(&g, v, &cfg, &mut rng);
            let sum: f64 = feat.values.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            for w in feat.values.windows(2) {
                assert!(w[0] >= w[1]);
            }
            let mut real_ids: Vec<_> = feat
                .source_ids
                .iter()
                .filter(|&&id| id != SENTINEL)
                .collect();
            let before = real_ids.len();
            real_ids.dedup();
            assert_eq!(real_ids.len(), before);
        }
    }

    #[test]
    fn exact_rpr_two_node_closed_form() {
        let g = two_node();
        let s = exact_rpr(&g, 0.5).unwrap();
        let expect = [[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((s.get(i, j) - expect[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_rpr_beta_to_zero_is_identity() {
        let g = triangle();
        let s = exact_rpr(&g, 1e-9).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((s.get(i, j) - expect).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn exact_rpr_triangle_row() {
        let g = triangle();
        let s = exact_rpr(&g, 0.5).unwrap();
        assert!((s.get(0, 0) - 0.6).abs() < 1e-12);
        assert!((s.get(0, 1) - 0.2).abs() < 1e-12);
        assert!((s.get(0, 2) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn exact_rpr_rejects_isolated_and_oversize() {
        let g: Graph<f64> = Graph::from_parts(GraphParts {
            edges: vec![(0, 1, 1.0)],
            content: Mat::zeros(3, 1),
            labels: None,
            names: None,
        })
        .unwrap();
        assert!(matches!(exact_rpr(&g, 0.5), Err(Error::Degenerate(_))));
    }

    #[test]
    fn exact_rpr_rows_are_eq1_fixed_points() {
        // s_i = beta * P^T s_i + (1-beta) e_i, rows sum to 1.
        let g = path_graph(7);
        let beta = 0.35;
        let s = exact_rpr(&g, beta).unwrap();
        let n = g.num_nodes();
        for i in 0..n {
            let si = s.row(i);
            let sum: f64 = si.iter().sum();
            assert!((sum - 1.0).abs() < 1e-10);
            for j in 0..n {
                // (P^T s)_j = sum_u P[u][j] s_u
                let mut acc = 0.0;
                for &u in g.neighbors(j) {
                    acc += g.transition_prob(u, j).unwrap() * si[u];
                }
                let res = beta * acc + if i == j { 1.0 - beta } else { 0.0 } - si[j];
                assert!(res.abs() < 1e-10, "residual {res} at ({i},{j})");
            }
        }
    }

    #[test]
    fn batch_features_deterministic_and_order_independent() {
        let g = path_graph(12);
        let cfg = RprConfig::default();
        let a = all_structural_features(&g, &cfg, 99);
        let b = all_structural_features(&g, &cfg, 99);
        assert_eq!(a, b);
        // Same per-node streams computed one at a time, in reverse order.
        for v in (0..g.num_nodes()).rev() {
            let mut rng = ChaCha8Rng::seed_from_u64(node_seed(99, v));
            let solo = structural_features(&g, v, &cfg, &mut rng);
            assert_eq!(solo, a[v]);
        }
    }

    #[test]
    fn doubling_walks_tightens_estimate() {
        let g = two_node();
        let exact = [2.0 / 3.0, 1.0 / 3.0];
        let mean_l1 = |m: usize| -> f64 {
            let mut total = 0.0;
            for trial in 0..20u64 {
                let cfg = RprConfig {
                    beta: 0.5,
                    k: 2,
                    m,
                    l: 20,
                    seed: 0,
                };
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
                let feat = structural_features(&g, 0, &cfg, &mut rng);
                total += (feat.values[0] - exact[0]).abs() + (feat.values[1] - exact[1]).abs();
            }
            total / 20.0
        };
        // Bias from the finite walk is shared; doubling m halves the
        // sampling variance, so the mean L1 error must not grow.
        assert!(mean_l1(200) < mean_l1(50));
    }
}
