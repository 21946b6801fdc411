//! Synthetic graph generators for experiments, smoke tests and the
//! acceptance suite. All of them produce connected-by-construction graphs
//! with binary content and deterministic output under a seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, GraphParts, LabelSet, NodeId};
use crate::linalg::Mat;
use crate::real::Real;

fn random_binary_content<T: Real, R: Rng + ?Sized>(n: usize, f: usize, rng: &mut R) -> Mat<T> {
    let mut m = Mat::zeros(n, f);
    for x in m.data_mut() {
        *x = if rng.random::<f64>() < 0.5 {
            T::one()
        } else {
            T::zero()
        };
    }
    m
}

/// Two `size`-cliques joined through one bridge node: `2*size + 1` nodes,
/// labeled by community (the bridge carries class 0). The default smoke
/// graph: `clique_bridge(10, f, seed)` has 21 nodes.
pub fn clique_bridge<T: Real>(size: usize, f: usize, seed: u64) -> Graph<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * size + 1;
    let bridge = 2 * size;
    let mut edges = Vec::new();
    for c in 0..2 {
        let base = c * size;
        for i in 0..size {
            for j in i + 1..size {
                edges.push((base + i, base + j, T::one()));
            }
        }
    }
    edges.push((bridge, 0, T::one()));
    edges.push((bridge, size, T::one()));

    let content = random_binary_content(n, f, &mut rng);
    let assignment = (0..n)
        .map(|v| Some(vec![if v < size || v == bridge { 0 } else { 1 }]))
        .collect();
    let labels = LabelSet::new(vec!["a".into(), "b".into()], false, assignment).unwrap();
    Graph::from_parts(GraphParts {
        edges,
        content,
        labels: Some(labels),
        names: None,
    })
    .unwrap()
}

/// Preferential attachment: seed clique of `attach + 1` nodes, every later
/// node draws `attach` distinct targets proportional to current degree.
pub fn preferential_attachment<T: Real>(n: usize, attach: usize, f: usize, seed: u64) -> Graph<T> {
    assert!(n > attach, "need more nodes than the attachment count");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId, T)> = Vec::new();
    // Endpoint multiset; sampling an index uniformly is degree-proportional.
    let mut endpoints: Vec<NodeId> = Vec::new();
    for i in 0..=attach {
        for j in i + 1..=attach {
            edges.push((i, j, T::one()));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    for v in attach + 1..n {
        let mut targets = Vec::with_capacity(attach);
        let mut guard = 0;
        while targets.len() < attach && guard < 10_000 {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
            guard += 1;
        }
        for &t in &targets {
            edges.push((v, t, T::one()));
            endpoints.push(v);
            endpoints.push(t);
        }
    }
    let content = random_binary_content(n, f, &mut rng);
    Graph::from_parts(GraphParts {
        edges,
        content,
        labels: None,
        names: None,
    })
    .unwrap()
}

/// Parameters of the planted-partition benchmark graph.
#[derive(Debug, Clone)]
pub struct PlantedPartition {
    pub blocks: usize,
    pub per_block: usize,
    /// Intra-block edge probability.
    pub p_in: f64,
    /// Inter-block edge probability.
    pub p_out: f64,
    /// Class-correlated signal bits per class.
    pub bits_per_class: usize,
    /// Probability an own-class signal bit is on.
    pub p_signal_on: f64,
    /// Probability a foreign-class signal bit is on.
    pub p_signal_off: f64,
    /// Pure noise bits appended to the content.
    pub noise_bits: usize,
}

impl Default for PlantedPartition {
    fn default() -> Self {
        PlantedPartition {
            blocks: 3,
            per_block: 40,
            p_in: 0.25,
            p_out: 0.02,
            bits_per_class: 4,
            p_signal_on: 0.65,
            p_signal_off: 0.25,
            noise_bits: 8,
        }
    }
}

/// Blocks of nodes with dense intra-block and sparse inter-block edges,
/// labeled by block, with noisy class-correlated binary content. Each node
/// keeps at least one edge (a within-block path backbone) so the graph has
/// no isolated nodes.
pub fn planted_partition<T: Real>(cfg: &PlantedPartition, seed: u64) -> Graph<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cfg.blocks * cfg.per_block;
    let block_of = |v: usize| v / cfg.per_block;
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = if block_of(a) == block_of(b) {
                cfg.p_in
            } else {
                cfg.p_out
            };
            if rng.random::<f64>() < p {
                edges.push((a, b, T::one()));
            }
        }
    }
    // Backbone inside each block keeps every node attached.
    for blk in 0..cfg.blocks {
        let base = blk * cfg.per_block;
        for i in 1..cfg.per_block {
            edges.push((base + i - 1, base + i, T::one()));
        }
    }

    let f = cfg.blocks * cfg.bits_per_class + cfg.noise_bits;
    let mut content = Mat::zeros(n, f);
    for v in 0..n {
        let own = block_of(v);
        for c in 0..cfg.blocks {
            let p = if c == own {
                cfg.p_signal_on
            } else {
                cfg.p_signal_off
            };
            for b in 0..cfg.bits_per_class {
                if rng.random::<f64>() < p {
                    content.set(v, c * cfg.bits_per_class + b, T::one());
                }
            }
        }
        for b in 0..cfg.noise_bits {
            if rng.random::<f64>() < 0.5 {
                content.set(v, cfg.blocks * cfg.bits_per_class + b, T::one());
            }
        }
    }

    let class_names = (0..cfg.blocks).map(|c| format!("c{c}")).collect();
    let assignment = (0..n).map(|v| Some(vec![block_of(v)])).collect();
    let labels = LabelSet::new(class_names, false, assignment).unwrap();
    Graph::from_parts(GraphParts {
        edges,
        content,
        labels: Some(labels),
        names: None,
    })
    .unwrap()
}

/// Random connected graph: a random attachment tree plus extra edges drawn
/// with probability `extra_p` per pair.
pub fn random_connected<T: Real>(n: usize, extra_p: f64, f: usize, seed: u64) -> Graph<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        let t = rng.random_range(0..v);
        edges.push((t, v, T::one()));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < extra_p {
                edges.push((a, b, T::one()));
            }
        }
    }
    let content = random_binary_content(n, f, &mut rng);
    Graph::from_parts(GraphParts {
        edges,
        content,
        labels: None,
        names: None,
    })
    .unwrap()
}
