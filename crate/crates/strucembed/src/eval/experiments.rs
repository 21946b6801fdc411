//! Structural-identity experiments: the mirror-network distance study,
//! edge/content perturbation, and the descriptor-vs-embedding distance
//! correlation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::eval::metrics::{pearson, spearman};
use crate::graph::{Graph, GraphParts, LabelSet, NodeId};
use crate::linalg::{euclidean, Mat};
use crate::real::Real;
use crate::sampling::dtw_distance;
use crate::structfeat::{all_structural_features_seeded, node_seed, RprConfig, StructuralFeature};

/// Euclidean distance distributions over mirrored node pairs (`p_m`) and
/// connected node pairs (`p_a`).
#[derive(Debug, Clone)]
pub struct DistanceDistributions {
    pub p_m: Vec<f64>,
    pub p_a: Vec<f64>,
    pub mean_m: f64,
    pub mean_a: f64,
    /// `mean_a / mean_m`; infinite when every mirrored pair collapsed to
    /// distance zero.
    pub ratio: f64,
}

impl DistanceDistributions {
    fn from_samples(p_m: Vec<f64>, p_a: Vec<f64>) -> Self {
        let mean = |v: &[f64]| {
            if v.is_empty() {
                0.0
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        };
        let mean_m = mean(&p_m);
        let mean_a = mean(&p_a);
        let ratio = if mean_m > 0.0 {
            mean_a / mean_m
        } else {
            f64::INFINITY
        };
        DistanceDistributions {
            p_m,
            p_a,
            mean_m,
            mean_a,
            ratio,
        }
    }
}

/// Disjoint union of `g` and an identically-contented relabeled copy; node
/// `v`'s mirror is `v + g.num_nodes()`.
pub fn mirror_union<T: Real>(g: &Graph<T>) -> Graph<T> {
    let n = g.num_nodes();
    let mut edges = Vec::with_capacity(2 * g.num_edges());
    for (a, b, w) in g.edges() {
        edges.push((a, b, w));
        edges.push((a + n, b + n, w));
    }
    let mut rows = Vec::with_capacity(2 * n);
    for v in 0..n {
        rows.push(g.content_row(v).to_vec());
    }
    for v in 0..n {
        rows.push(g.content_row(v).to_vec());
    }
    let mut names: Vec<String> = (0..n).map(|v| g.name(v).to_string()).collect();
    names.extend((0..n).map(|v| format!("{}__mirror", g.name(v))));
    let labels = g.labels().map(|ls| {
        let mut assignment: Vec<Option<Vec<usize>>> = (0..n)
            .map(|v| ls.classes_of(v).map(|c| c.to_vec()))
            .collect();
        assignment.extend((0..n).map(|v| ls.classes_of(v).map(|c| c.to_vec())));
        LabelSet::new(
            (0..ls.num_classes()).map(|c| ls.class_name(c).to_string()).collect(),
            ls.is_multilabel(),
            assignment,
        )
        .expect("mirrored labels stay valid")
    });
    Graph::from_parts(GraphParts {
        edges,
        content: Mat::from_rows(rows).expect("uniform content rows"),
        labels,
        names: Some(names),
    })
    .expect("mirror union of a valid graph is valid")
}

/// Descriptors for a mirror union with walk streams matched across the two
/// copies: node `v` and its mirror share a per-node seed, so their
/// descriptor values are bitwise identical.
pub fn mirror_matched_features<T: Real>(
    union: &Graph<T>,
    n_orig: usize,
    cfg: &RprConfig,
) -> Vec<StructuralFeature<T>> {
    all_structural_features_seeded(union, cfg, &|v| node_seed(cfg.seed, v % n_orig))
}

/// Runs the mirror experiment: build the union, obtain embeddings for every
/// union node from `embed_fn` (usually a full training run), and measure the
/// two distance distributions.
pub fn mirror_experiment<T, F>(g: &Graph<T>, embed_fn: F) -> Result<DistanceDistributions>
where
    T: Real,
    F: FnOnce(&Graph<T>) -> Result<Mat<T>>,
{
    let n = g.num_nodes();
    let union = mirror_union(g);
    let emb = embed_fn(&union)?;
    if emb.rows() != union.num_nodes() {
        return Err(Error::Shape(format!(
            "embedding rows {} do not cover the union of {} nodes",
            emb.rows(),
            union.num_nodes()
        )));
    }
    let p_m: Vec<f64> = (0..n)
        .map(|v| euclidean(emb.row(v), emb.row(v + n)).as_f64())
        .collect();
    let p_a: Vec<f64> = union
        .edges()
        .map(|(a, b, _)| euclidean(emb.row(a), emb.row(b)).as_f64())
        .collect();
    Ok(DistanceDistributions::from_samples(p_m, p_a))
}

/// Keeps each edge independently with probability `survival`; for strictly
/// binary content, swaps one random 1-bit with one random 0-bit per node.
/// Non-binary content is left untouched (with a warning).
pub fn perturb_network<T: Real, R: Rng + ?Sized>(
    g: &Graph<T>,
    survival: f64,
    rng: &mut R,
) -> Result<Graph<T>> {
    if !(survival > 0.0 && survival <= 1.0) && survival != 0.0 {
        return Err(Error::validation(format!(
            "survival probability must be in [0,1], got {survival}"
        )));
    }
    let edges: Vec<(NodeId, NodeId, T)> = g
        .edges()
        .filter(|_| rng.random::<f64>() < survival)
        .collect();

    let binary = (0..g.num_nodes()).all(|v| {
        g.content_row(v)
            .iter()
            .all(|&x| x == T::zero() || x == T::one())
    });
    let mut rows: Vec<Vec<T>> = (0..g.num_nodes())
        .map(|v| g.content_row(v).to_vec())
        .collect();
    if binary && g.content_dim() > 0 {
        for row in rows.iter_mut() {
            let ones: Vec<usize> = (0..row.len()).filter(|&k| row[k] == T::one()).collect();
            let zeros: Vec<usize> = (0..row.len()).filter(|&k| row[k] == T::zero()).collect();
            if ones.is_empty() || zeros.is_empty() {
                continue;
            }
            let a = ones[rng.random_range(0..ones.len())];
            let b = zeros[rng.random_range(0..zeros.len())];
            row.swap(a, b);
        }
    } else if g.content_dim() > 0 {
        eprintln!("warning: content is not binary; skipping the content swap");
    }

    let labels = g.labels().cloned();
    let names = (0..g.num_nodes()).map(|v| g.name(v).to_string()).collect();
    Graph::from_parts(GraphParts {
        edges,
        content: Mat::from_rows(rows)?,
        labels,
        names: Some(names),
    })
}

/// Pearson and Spearman correlation between descriptor DTW distance and
/// embedding Euclidean distance over all connected pairs.
pub fn structural_correlation<T: Real>(
    g: &Graph<T>,
    feats: &[StructuralFeature<T>],
    emb: &Mat<T>,
) -> Result<(f64, f64)> {
    if feats.len() != g.num_nodes() || emb.rows() != g.num_nodes() {
        return Err(Error::Shape(format!(
            "features ({}) / embeddings ({}) do not cover the graph ({})",
            feats.len(),
            emb.rows(),
            g.num_nodes()
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (a, b, _) in g.edges() {
        xs.push(dtw_distance(&feats[a].values, &feats[b].values)?.as_f64());
        ys.push(euclidean(emb.row(a), emb.row(b)).as_f64());
    }
    if xs.len() < 3 {
        return Err(Error::validation(format!(
            "need at least 3 connected pairs, got {}",
            xs.len()
        )));
    }
    Ok((pearson(&xs, &ys)?, spearman(&xs, &ys)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mirror_union_duplicates_structure() {
        let g = synth::clique_bridge::<f64>(4, 3, 1);
        let n = g.num_nodes();
        let u = mirror_union(&g);
        assert_eq!(u.num_nodes(), 2 * n);
        assert_eq!(u.num_edges(), 2 * g.num_edges());
        for v in 0..n {
            assert_eq!(u.content_row(v), u.content_row(v + n));
            assert_eq!(
                u.neighbors(v).iter().map(|&x| x + n).collect::<Vec<_>>(),
                u.neighbors(v + n)
            );
        }
        // Nothing crosses between the copies.
        assert!(u.edges().all(|(a, b, _)| (a < n) == (b < n)));
    }

    #[test]
    fn mirror_stub_identical_embeddings_gives_sentinel_ratio() {
        let g = synth::clique_bridge::<f64>(4, 3, 1);
        let n = g.num_nodes();
        let dist = mirror_experiment(&g, |u| {
            let mut rows = Vec::new();
            for v in 0..u.num_nodes() {
                let base = (v % n) as f64;
                rows.push(vec![base, base * 0.5]);
            }
            Mat::from_rows(rows)
        })
        .unwrap();
        assert!(dist.p_m.iter().all(|&d| d == 0.0));
        assert!(dist.ratio.is_infinite());
    }

    #[test]
    fn mirror_random_embeddings_ratio_near_one() {
        let g = synth::clique_bridge::<f64>(6, 3, 2);
        for seed in 0..10u64 {
            let dist = mirror_experiment(&g, |u| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut m = Mat::zeros(u.num_nodes(), 8);
                for x in m.data_mut() {
                    *x = rng.random::<f64>() - 0.5;
                }
                Ok(m)
            })
            .unwrap();
            assert!(
                dist.ratio > 0.8 && dist.ratio < 1.25,
                "seed {seed}: ratio {}",
                dist.ratio
            );
        }
    }

    #[test]
    fn mirror_matched_features_are_bitwise_equal_across_copies() {
        let g = synth::preferential_attachment::<f64>(20, 2, 5, 3);
        let u = mirror_union(&g);
        let cfg = RprConfig {
            k: 8,
            m: 50,
            l: 20,
            ..RprConfig::default()
        };
        let feats = mirror_matched_features(&u, g.num_nodes(), &cfg);
        for v in 0..g.num_nodes() {
            assert_eq!(feats[v].values, feats[v + g.num_nodes()].values);
            // Source ids shift by exactly n.
            let shifted: Vec<_> = feats[v]
                .source_ids
                .iter()
                .map(|&s| {
                    if s == crate::graph::SENTINEL {
                        s
                    } else {
                        s + g.num_nodes()
                    }
                })
                .collect();
            assert_eq!(shifted, feats[v + g.num_nodes()].source_ids);
        }
    }

    #[test]
    fn perturb_keeps_all_or_none() {
        let g = synth::random_connected::<f64>(20, 0.1, 4, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let full = perturb_network(&g, 1.0, &mut rng).unwrap();
        assert_eq!(full.num_edges(), g.num_edges());
        let none = perturb_network(&g, 0.0, &mut rng).unwrap();
        assert_eq!(none.num_edges(), 0);
    }

    #[test]
    fn perturb_survival_is_binomial() {
        let g = synth::random_connected::<f64>(60, 0.5, 4, 7);
        let e = g.num_edges() as f64;
        assert!(e > 500.0, "want a dense test graph, got {e} edges");
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let kept = perturb_network(&g, 0.5, &mut rng).unwrap().num_edges() as f64;
        let sigma = (e * 0.25).sqrt();
        assert!((kept - 0.5 * e).abs() < 3.0 * sigma, "kept {kept} of {e}");
    }

    #[test]
    fn perturb_swaps_one_bit_pair_per_node() {
        let g = synth::clique_bridge::<f64>(5, 16, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = perturb_network(&g, 1.0, &mut rng).unwrap();
        for v in 0..g.num_nodes() {
            let before = g.content_row(v);
            let after = p.content_row(v);
            let ones_before = before.iter().filter(|&&x| x == 1.0).count();
            let ones_after = after.iter().filter(|&&x| x == 1.0).count();
            assert_eq!(ones_before, ones_after, "popcount must be preserved");
            let diff = before
                .iter()
                .zip(after)
                .filter(|(a, b)| a != b)
                .count();
            // Either the node had no swappable pair or exactly two slots
            // changed (one 1 -> 0 and one 0 -> 1).
            assert!(diff == 0 || diff == 2, "node {v} changed {diff} slots");
        }
    }

    #[test]
    fn correlation_perfect_monotone() {
        let g = synth::random_connected::<f64>(12, 0.2, 3, 9);
        let feats: Vec<StructuralFeature<f64>> = (0..12)
            .map(|v| StructuralFeature {
                values: vec![0.9 - 0.05 * v as f64, 0.1 + 0.05 * v as f64],
                source_ids: vec![v, (v + 1) % 12],
            })
            .collect();
        // Embeddings placed so Euclidean distance reproduces DTW distance
        // ordering exactly: e_v = (value profile scaled).
        let emb = Mat::from_rows(
            (0..12)
                .map(|v| vec![2.0 * feats[v].values[0], 2.0 * feats[v].values[1]])
                .collect(),
        )
        .unwrap();
        let (r, rho) = structural_correlation(&g, &feats, &emb).unwrap();
        assert!(r > 0.99, "pearson {r}");
        assert!(rho > 0.99, "spearman {rho}");
    }
}
