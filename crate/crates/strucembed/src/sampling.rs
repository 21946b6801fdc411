//! Training-pair machinery: window co-occurrence lists from plain random
//! walks, descriptor similarity via dynamic time warping, degree-window
//! candidate pruning, the biased positive sampler, and the degree-powered
//! negative table.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::real::Real;
use crate::structfeat::{node_seed, StructuralFeature};

/// Knobs for pair generation.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingConfig {
    /// Probability of drawing a positive by structural similarity rather
    /// than from the local co-occurrence list.
    pub alpha: f64,
    /// Co-occurrence window on walk sequences.
    pub window: usize,
    pub walks_per_node: usize,
    pub walk_len: usize,
    /// Negatives per positive.
    pub neg_k: usize,
    /// Exponent of the degree-based negative distribution.
    pub neg_power: f64,
    /// `c` in the candidate window size `c * ceil(log2 |V|)` per side.
    pub cand_factor: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            alpha: 0.5,
            window: 5,
            walks_per_node: 10,
            walk_len: 40,
            neg_k: 5,
            neg_power: 0.75,
            cand_factor: 2,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::validation(format!(
                "alpha must be in [0,1], got {}",
                self.alpha
            )));
        }
        if self.window < 1 {
            return Err(Error::validation("window must be >= 1"));
        }
        if self.neg_k < 1 {
            return Err(Error::validation("neg_k must be >= 1"));
        }
        if self.walks_per_node < 1 || self.walk_len < 2 {
            return Err(Error::validation("need walks_per_node >= 1 and walk_len >= 2"));
        }
        if self.cand_factor < 1 {
            return Err(Error::validation("cand_factor must be >= 1"));
        }
        if !(self.neg_power.is_finite() && self.neg_power >= 0.0) {
            return Err(Error::validation("neg_power must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Per-node multiset of window co-occurrences on the walk corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceLists {
    lists: Vec<Vec<NodeId>>,
}

impl CooccurrenceLists {
    pub fn list(&self, v: NodeId) -> &[NodeId] {
        &self.lists[v]
    }

    pub fn num_nodes(&self) -> usize {
        self.lists.len()
    }
}

/// One unbiased random walk of `len` steps; transitions follow edge weights
/// (uniform on unweighted graphs). Walks from isolated nodes stop at once.
pub fn random_walk<T: Real, R: Rng + ?Sized>(
    g: &Graph<T>,
    start: NodeId,
    len: usize,
    rng: &mut R,
) -> Vec<NodeId> {
    let mut walk = Vec::with_capacity(len);
    walk.push(start);
    let mut cur = start;
    for _ in 1..len {
        match g.sample_neighbor_weighted(cur, rng) {
            Some(next) => {
                walk.push(next);
                cur = next;
            }
            None => break,
        }
    }
    walk
}

/// The full walk corpus: `walks_per_node` walks from every node, grouped by
/// start node, each node drawing from its own seeded RNG stream.
pub fn generate_walks<T: Real>(
    g: &Graph<T>,
    cfg: &SamplingConfig,
    seed: u64,
) -> Vec<Vec<NodeId>> {
    let per_node: Vec<Vec<Vec<NodeId>>> = (0..g.num_nodes())
        .into_par_iter()
        .map(|v| {
            let mut rng = ChaCha8Rng::seed_from_u64(node_seed(seed, v));
            (0..cfg.walks_per_node)
                .map(|_| random_walk(g, v, cfg.walk_len, &mut rng))
                .collect()
        })
        .collect();
    per_node.into_iter().flatten().collect()
}

/// Window co-occurrence over a fixed corpus: for every walk position, every
/// other position within `window` contributes, except pairs of identical
/// nodes (a node never lists itself).
pub fn cooccurrence_from_walks(
    num_nodes: usize,
    walks: &[Vec<NodeId>],
    window: usize,
) -> CooccurrenceLists {
    let mut lists = vec![Vec::new(); num_nodes];
    for walk in walks {
        for p in 0..walk.len() {
            let hi = (p + window).min(walk.len() - 1);
            for q in p + 1..=hi {
                let (a, b) = (walk[p], walk[q]);
                if a != b {
                    lists[a].push(b);
                    lists[b].push(a);
                }
            }
        }
    }
    CooccurrenceLists { lists }
}

/// Generates the corpus and accumulates window co-occurrences.
pub fn build_cooccurrence<T: Real>(
    g: &Graph<T>,
    cfg: &SamplingConfig,
    seed: u64,
) -> CooccurrenceLists {
    let walks = generate_walks(g, cfg, seed);
    cooccurrence_from_walks(g.num_nodes(), &walks, cfg.window)
}

/// Writes a corpus as one walk per line, space-separated external node ids.
pub fn save_walks<T: Real>(g: &Graph<T>, walks: &[Vec<NodeId>], path: &Path) -> Result<()> {
    let mut out = String::new();
    for walk in walks {
        let names: Vec<&str> = walk.iter().map(|&v| g.name(v)).collect();
        out.push_str(&names.join(" "));
        out.push('\n');
    }
    crate::graph::write_atomic(path, &out)
}

pub fn load_walks<T: Real>(g: &Graph<T>, path: &Path) -> Result<Vec<Vec<NodeId>>> {
    let text = std::fs::read_to_string(path)?;
    let mut walks = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut walk = Vec::new();
        for tok in line.split_whitespace() {
            let id = g.node_id(tok).ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("unknown node '{tok}'"),
            })?;
            walk.push(id);
        }
        walks.push(walk);
    }
    Ok(walks)
}

// ---------------------------------------------------------------------------
// Dynamic time warping
// ---------------------------------------------------------------------------

/// Classic full-window DTW with absolute-difference local cost.
pub fn dtw_distance<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::validation("dtw requires non-empty sequences"));
    }
    let m = b.len();
    let inf = T::infinity();
    let mut prev = vec![inf; m + 1];
    let mut cur = vec![inf; m + 1];
    prev[0] = T::zero();
    for &ai in a {
        cur[0] = inf;
        for j in 1..=m {
            let cost = (ai - b[j - 1]).abs();
            cur[j] = cost + prev[j].min(cur[j - 1]).min(prev[j - 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m])
}

/// Similarity used by the structural sampler; strictly decreasing in the
/// DTW distance and bounded in (0, 1].
pub fn dtw_similarity<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    Ok(T::one() / (T::one() + dtw_distance(a, b)?))
}

// ---------------------------------------------------------------------------
// Degree-window candidate pruning
// ---------------------------------------------------------------------------

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Degree-ordered positions for candidate lookup.
#[derive(Debug, Clone)]
pub struct CandidateIndex {
    order: Vec<NodeId>,
    pos: Vec<usize>,
    per_side: usize,
}

impl CandidateIndex {
    pub fn new<T: Real>(g: &Graph<T>, cand_factor: usize) -> Self {
        let order = g.degree_order();
        let mut pos = vec![0; order.len()];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let per_side = cand_factor * ceil_log2(order.len());
        CandidateIndex {
            order,
            pos,
            per_side,
        }
    }

    /// Up to `per_side` nodes on each side of `i` in degree order, clipped
    /// at the boundaries, excluding `i` itself. Returned in degree order.
    pub fn candidates(&self, i: NodeId) -> Vec<NodeId> {
        let p = self.pos[i];
        let lo = p.saturating_sub(self.per_side);
        let hi = (p + self.per_side).min(self.order.len().saturating_sub(1));
        self.order[lo..=hi]
            .iter()
            .copied()
            .filter(|&v| v != i)
            .collect()
    }
}

/// Candidate set for structural sampling around `i` (convenience wrapper;
/// the trainer reuses one [`CandidateIndex`]).
pub fn structural_candidates<T: Real>(g: &Graph<T>, i: NodeId, cand_factor: usize) -> Vec<NodeId> {
    CandidateIndex::new(g, cand_factor).candidates(i)
}

// ---------------------------------------------------------------------------
// Biased positive sampling
// ---------------------------------------------------------------------------

/// Which branch produced a positive sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Structural,
    Local,
}

#[derive(Debug, Clone, Default)]
pub struct SamplerStats {
    pub structural_draws: u64,
    pub local_draws: u64,
}

#[derive(Debug, Clone)]
struct CandidateDist {
    nodes: Vec<NodeId>,
    /// Running sums of the normalized similarities.
    cum: Vec<f64>,
}

/// Draws positive partners for a node: with probability `alpha` by
/// structural similarity over the pruned candidate set, otherwise uniformly
/// from the node's co-occurrence list. If the chosen branch has nothing to
/// offer it falls back to the other; a node with neither errors.
pub struct PositiveSampler<'a, T> {
    feats: &'a [StructuralFeature<T>],
    lists: &'a CooccurrenceLists,
    index: CandidateIndex,
    alpha: f64,
    cache: Vec<Option<CandidateDist>>,
    stats: SamplerStats,
}

impl<'a, T: Real> PositiveSampler<'a, T> {
    pub fn new(
        g: &Graph<T>,
        feats: &'a [StructuralFeature<T>],
        lists: &'a CooccurrenceLists,
        cfg: &SamplingConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        if feats.len() != g.num_nodes() || lists.num_nodes() != g.num_nodes() {
            return Err(Error::Shape(format!(
                "feature table ({}) / co-occurrence table ({}) do not cover the graph ({})",
                feats.len(),
                lists.num_nodes(),
                g.num_nodes()
            )));
        }
        Ok(PositiveSampler {
            feats,
            lists,
            index: CandidateIndex::new(g, cfg.cand_factor),
            alpha: cfg.alpha,
            cache: vec![None; g.num_nodes()],
            stats: SamplerStats::default(),
        })
    }

    pub fn stats(&self) -> &SamplerStats {
        &self.stats
    }

    /// Normalized structural distribution of `i` over an explicit candidate
    /// list (similarities `1/(1+dtw)` scaled to sum 1).
    pub fn structural_distribution(&self, i: NodeId, candidates: &[NodeId]) -> Vec<(NodeId, f64)> {
        let sims: Vec<f64> = candidates
            .iter()
            .map(|&j| {
                dtw_similarity(&self.feats[i].values, &self.feats[j].values)
                    .expect("descriptors are non-empty")
                    .as_f64()
            })
            .collect();
        let total: f64 = sims.iter().sum();
        candidates
            .iter()
            .zip(sims)
            .map(|(&j, s)| (j, s / total))
            .collect()
    }

    /// The pruned candidate set of `i` in degree order.
    pub fn candidates(&self, i: NodeId) -> Vec<NodeId> {
        self.index.candidates(i)
    }

    fn dist(&mut self, i: NodeId) -> &CandidateDist {
        if self.cache[i].is_none() {
            let nodes = self.index.candidates(i);
            let mut cum = Vec::with_capacity(nodes.len());
            let mut acc = 0.0;
            for (_, p) in self.structural_distribution(i, &nodes) {
                acc += p;
                cum.push(acc);
            }
            self.cache[i] = Some(CandidateDist { nodes, cum });
        }
        self.cache[i].as_ref().unwrap()
    }

    fn draw_structural<R: Rng + ?Sized>(&mut self, i: NodeId, rng: &mut R) -> NodeId {
        let dist = self.dist(i);
        let total = *dist.cum.last().unwrap();
        let u = rng.random::<f64>() * total;
        let k = dist.cum.partition_point(|&c| c <= u).min(dist.nodes.len() - 1);
        dist.nodes[k]
    }

    fn draw_local<R: Rng + ?Sized>(&self, i: NodeId, rng: &mut R) -> NodeId {
        let list = self.lists.list(i);
        list[rng.random_range(0..list.len())]
    }

    pub fn sample_with_branch<R: Rng + ?Sized>(
        &mut self,
        i: NodeId,
        rng: &mut R,
    ) -> Result<(NodeId, Branch)> {
        let structural_ok = !self.index.candidates(i).is_empty();
        let local_ok = !self.lists.list(i).is_empty();
        let want_structural = rng.random::<f64>() < self.alpha;
        let branch = match (want_structural, structural_ok, local_ok) {
            (true, true, _) => Branch::Structural,
            (true, false, true) => Branch::Local,
            (false, _, true) => Branch::Local,
            (false, true, false) => Branch::Structural,
            _ => {
                return Err(Error::Degenerate(format!(
                    "node {i} has no co-occurrences and no structural candidates"
                )))
            }
        };
        let j = match branch {
            Branch::Structural => {
                self.stats.structural_draws += 1;
                self.draw_structural(i, rng)
            }
            Branch::Local => {
                self.stats.local_draws += 1;
                self.draw_local(i, rng)
            }
        };
        Ok((j, branch))
    }

    /// A positive sample for `i`.
    pub fn sample_positive<R: Rng + ?Sized>(&mut self, i: NodeId, rng: &mut R) -> Result<NodeId> {
        self.sample_with_branch(i, rng).map(|(j, _)| j)
    }
}

// ---------------------------------------------------------------------------
// Negative sampling
// ---------------------------------------------------------------------------

/// Cumulative distribution over nodes proportional to
/// `weighted_degree^neg_power`. Zero-degree nodes carry no mass.
#[derive(Debug, Clone)]
pub struct NegativeTable {
    cum: Vec<f64>,
}

impl NegativeTable {
    pub fn new<T: Real>(g: &Graph<T>, neg_power: f64) -> Result<Self> {
        let mut cum = Vec::with_capacity(g.num_nodes());
        let mut acc = 0.0;
        for v in 0..g.num_nodes() {
            let d = g.degree(v).as_f64();
            if d > 0.0 {
                acc += d.powf(neg_power);
            }
            cum.push(acc);
        }
        if acc <= 0.0 {
            return Err(Error::Degenerate(
                "graph has no edges; negative distribution is empty".into(),
            ));
        }
        Ok(NegativeTable { cum })
    }

    pub fn prob(&self, v: NodeId) -> f64 {
        let total = *self.cum.last().unwrap();
        let lo = if v == 0 { 0.0 } else { self.cum[v - 1] };
        (self.cum[v] - lo) / total
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        let total = *self.cum.last().unwrap();
        let u = rng.random::<f64>() * total;
        self.cum.partition_point(|&c| c <= u).min(self.cum.len() - 1)
    }
}

const NEGATIVE_RETRY_CAP: usize = 100;

/// `count` independent draws from the table; draws hitting `exclude` are
/// resampled up to a retry cap and then accepted as-is.
pub fn sample_negatives<R: Rng + ?Sized>(
    table: &NegativeTable,
    exclude: &[NodeId],
    count: usize,
    rng: &mut R,
) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut pick = table.sample(rng);
        for _ in 0..NEGATIVE_RETRY_CAP {
            if !exclude.contains(&pick) {
                break;
            }
            pick = table.sample(rng);
        }
        out.push(pick);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphParts;
    use crate::linalg::Mat;
    use crate::structfeat::{all_structural_features, RprConfig};

    fn two_node() -> Graph<f64> {
        Graph::from_parts(GraphParts {
            edges: vec![(0, 1, 1.0)],
            content: Mat::zeros(2, 1),
            labels: None,
            names: None,
        })
        .unwrap()
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

    fn cycle(n: usize) -> Graph<f64> {
        let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Graph::from_parts(GraphParts {
            edges,
            content: Mat::zeros(n, 1),
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

    fn feat(values: &[f64]) -> StructuralFeature<f64> {
        StructuralFeature {
            values: values.to_vec(),
            source_ids: (0..values.len()).collect(),
        }
    }

    #[test]
    fn cooccurrence_forced_two_node_walk() {
        let lists = cooccurrence_from_walks(2, &[vec![0, 1, 0]], 1);
        assert_eq!(lists.list(0), &[1, 1]);
        assert_eq!(lists.list(1), &[0, 0]);
    }

    #[test]
    fn cooccurrence_isolated_node_empty() {
        let g: Graph<f64> = Graph::from_parts(GraphParts {
            edges: vec![(0, 1, 1.0)],
            content: Mat::zeros(3, 1),
            labels: None,
            names: None,
        })
        .unwrap();
        let lists = build_cooccurrence(&g, &SamplingConfig::default(), 5);
        assert!(lists.list(2).is_empty());
        assert!(!lists.list(0).is_empty());
    }

    #[test]
    fn cooccurrence_matches_brute_force_pair_scan() {
        let g = triangle();
        let cfg = SamplingConfig {
            window: 2,
            walks_per_node: 10,
            walk_len: 40,
            ..SamplingConfig::default()
        };
        let walks = generate_walks(&g, &cfg, 33);
        let lists = cooccurrence_from_walks(3, &walks, cfg.window);

        let mut brute = vec![Vec::new(); 3];
        for walk in &walks {
            for p in 0..walk.len() {
                for q in 0..walk.len() {
                    if p != q
                        && p.abs_diff(q) <= cfg.window
                        && walk[p] != walk[q]
                    {
                        brute[walk[p]].push(walk[q]);
                    }
                }
            }
        }
        for v in 0..3 {
            let mut got = lists.list(v).to_vec();
            let mut want = brute[v].clone();
            got.sort_unstable();
            want.sort_unstable();
            assert_eq!(got, want);
            assert!(!got.is_empty());
            assert!(got.contains(&((v + 1) % 3)) && got.contains(&((v + 2) % 3)));
        }
    }

    #[test]
    fn walk_corpus_roundtrips_through_file() {
        let g = triangle();
        let cfg = SamplingConfig::default();
        let walks = generate_walks(&g, &cfg, 7);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("walks.txt");
        save_walks(&g, &walks, &path).unwrap();
        assert_eq!(load_walks(&g, &path).unwrap(), walks);
    }

    #[test]
    fn dtw_basic_values() {
        assert_eq!(dtw_distance(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(dtw_distance(&[0.0], &[5.0]).unwrap(), 5.0);
        assert_eq!(dtw_distance(&[1.0, 2.0], &[2.0]).unwrap(), 1.0);
        assert!(dtw_distance::<f64>(&[], &[1.0]).is_err());
    }

    /// Minimal alignment cost by explicit enumeration of all monotone
    /// step paths (no DP), for cross-checking the implementation.
    fn dtw_brute(a: &[f64], b: &[f64]) -> f64 {
        fn go(a: &[f64], b: &[f64], i: usize, j: usize) -> f64 {
            let cost = (a[i] - b[j]).abs();
            if i == a.len() - 1 && j == b.len() - 1 {
                return cost;
            }
            let mut best = f64::INFINITY;
            if i + 1 < a.len() {
                best = best.min(go(a, b, i + 1, j));
            }
            if j + 1 < b.len() {
                best = best.min(go(a, b, i, j + 1));
            }
            if i + 1 < a.len() && j + 1 < b.len() {
                best = best.min(go(a, b, i + 1, j + 1));
            }
            cost + best
        }
        go(a, b, 0, 0)
    }

    #[test]
    fn dtw_matches_brute_enumeration_exhaustively() {
        // All sequences of length 1..=4 over {0,1,2}.
        let mut seqs: Vec<Vec<f64>> = Vec::new();
        for len in 1..=4usize {
            let count = 3usize.pow(len as u32);
            for mut code in 0..count {
                let mut s = Vec::with_capacity(len);
                for _ in 0..len {
                    s.push((code % 3) as f64);
                    code /= 3;
                }
                seqs.push(s);
            }
        }
        for a in &seqs {
            for b in &seqs {
                let got = dtw_distance(a, b).unwrap();
                let want = dtw_brute(a, b);
                assert!((got - want).abs() < 1e-12, "{a:?} vs {b:?}: {got} != {want}");
                let sym = dtw_distance(b, a).unwrap();
                assert!((got - sym).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn candidates_two_node_graph() {
        let g = two_node();
        assert_eq!(structural_candidates(&g, 0, 2), vec![1]);
    }

    #[test]
    fn candidates_clip_at_boundary() {
        let g = cycle(32); // all degrees equal -> degree order is id order
        let idx = CandidateIndex::new(&g, 1); // per_side = ceil(log2 32) = 5
        let c = idx.candidates(0);
        assert_eq!(c, vec![1, 2, 3, 4, 5]);
        let c_mid = idx.candidates(16);
        assert_eq!(c_mid.len(), 10);
    }

    #[test]
    fn candidates_64_node_budget() {
        let g = cycle(64);
        let c = structural_candidates(&g, 30, 1);
        assert_eq!(c.len(), 12); // 6 per side
    }

    #[test]
    fn positive_alpha_zero_draws_from_list() {
        let g = triangle();
        let feats = all_structural_features(&g, &RprConfig::default(), 3);
        let lists = cooccurrence_from_walks(3, &[vec![0, 1, 2, 1]], 1);
        let cfg = SamplingConfig {
            alpha: 0.0,
            ..SamplingConfig::default()
        };
        let mut sampler = PositiveSampler::new(&g, &feats, &lists, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let (j, branch) = sampler.sample_with_branch(0, &mut rng).unwrap();
            assert_eq!(branch, Branch::Local);
            assert!(lists.list(0).contains(&j));
        }
        assert_eq!(sampler.stats().structural_draws, 0);
    }

    #[test]
    fn positive_alpha_one_single_candidate() {
        let g = two_node();
        let feats = all_structural_features(&g, &RprConfig::default(), 3);
        let lists = cooccurrence_from_walks(2, &[], 1);
        let cfg = SamplingConfig {
            alpha: 1.0,
            ..SamplingConfig::default()
        };
        let mut sampler = PositiveSampler::new(&g, &feats, &lists, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            assert_eq!(sampler.sample_positive(0, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn positive_structural_distribution_two_thirds_one_third() {
        // dtw(i,j)=0 -> sim 1; dtw(i,k)=1 -> sim 0.5; normalized 2/3 : 1/3.
        let g = triangle();
        let feats = vec![feat(&[0.5, 0.25]), feat(&[0.5, 0.25]), feat(&[0.5, 1.25])];
        assert_eq!(dtw_distance(&feats[0].values, &feats[2].values).unwrap(), 1.0);
        let lists = cooccurrence_from_walks(3, &[], 1);
        let cfg = SamplingConfig {
            alpha: 1.0,
            ..SamplingConfig::default()
        };
        let mut sampler = PositiveSampler::new(&g, &feats, &lists, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = 10_000;
        let mut hits_j = 0u32;
        for _ in 0..draws {
            match sampler.sample_positive(0, &mut rng).unwrap() {
                1 => hits_j += 1,
                2 => {}
                other => panic!("unexpected draw {other}"),
            }
        }
        let p = hits_j as f64 / draws as f64;
        assert!((p - 2.0 / 3.0).abs() < 0.02, "p(j) = {p}");
    }

    #[test]
    fn positive_fallback_rules() {
        let g = two_node();
        let feats = all_structural_features(&g, &RprConfig::default(), 3);
        let empty = cooccurrence_from_walks(2, &[], 1);
        // alpha=0 but no local list: falls back to structural.
        let cfg = SamplingConfig {
            alpha: 0.0,
            ..SamplingConfig::default()
        };
        let mut sampler = PositiveSampler::new(&g, &feats, &empty, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (j, branch) = sampler.sample_with_branch(0, &mut rng).unwrap();
        assert_eq!((j, branch), (1, Branch::Structural));

        // Single node: neither branch available.
        let g1: Graph<f64> = Graph::from_parts(GraphParts {
            edges: vec![],
            content: Mat::zeros(1, 1),
            labels: None,
            names: None,
        })
        .unwrap();
        let feats1 = all_structural_features(&g1, &RprConfig::default(), 3);
        let empty1 = cooccurrence_from_walks(1, &[], 1);
        let mut sampler = PositiveSampler::new(&g1, &feats1, &empty1, &cfg).unwrap();
        assert!(matches!(
            sampler.sample_with_branch(0, &mut rng),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn branch_frequency_tracks_alpha() {
        let g = triangle();
        let feats = all_structural_features(&g, &RprConfig::default(), 3);
        let lists = cooccurrence_from_walks(3, &[vec![0, 1, 2, 0, 1, 2]], 2);
        let cfg = SamplingConfig {
            alpha: 0.3,
            ..SamplingConfig::default()
        };
        let mut sampler = PositiveSampler::new(&g, &feats, &lists, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 100_000;
        for t in 0..n {
            sampler.sample_positive(t % 3, &mut rng).unwrap();
        }
        let frac = sampler.stats().structural_draws as f64 / n as f64;
        assert!((frac - 0.3).abs() < 0.01, "structural fraction {frac}");
    }

    #[test]
    fn pruned_distribution_equals_restricted_full_scan() {
        let g = cycle(48);
        let feats = all_structural_features(&g, &RprConfig::default(), 17);
        let lists = cooccurrence_from_walks(48, &[], 1);
        let cfg = SamplingConfig::default();
        let sampler = PositiveSampler::new(&g, &feats, &lists, &cfg).unwrap();
        for i in [0usize, 7, 23, 47] {
            let cands = sampler.candidates(i);
            let pruned = sampler.structural_distribution(i, &cands);
            // Full scan over all j != i, then restrict to the candidate set
            // and renormalize from the raw similarities.
            let all: Vec<NodeId> = (0..48).filter(|&j| j != i).collect();
            let full = sampler.structural_distribution(i, &all);
            let sim_of = |j: NodeId| -> f64 {
                dtw_similarity(&feats[i].values, &feats[j].values).unwrap()
            };
            let total: f64 = cands.iter().map(|&j| sim_of(j)).sum();
            for ((j, p), &cj) in pruned.iter().zip(&cands) {
                assert_eq!(*j, cj);
                assert_eq!(*p, sim_of(cj) / total);
                // and the restricted full distribution renormalizes to it
                let pf = full.iter().find(|(fj, _)| fj == j).unwrap().1;
                let full_total: f64 = full
                    .iter()
                    .filter(|(fj, _)| cands.contains(fj))
                    .map(|(_, q)| q)
                    .sum();
                assert!((pf / full_total - p).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn negative_table_uniform_degrees() {
        let g = cycle(5);
        let table = NegativeTable::new(&g, 0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        let mut counts = [0u32; 5];
        for _ in 0..n {
            counts[table.sample(&mut rng)] += 1;
        }
        // 3 sigma for Binomial(n, 1/5)
        let sigma = (n as f64 * 0.2 * 0.8).sqrt();
        for &c in &counts {
            assert!((c as f64 - n as f64 * 0.2).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn negative_table_star_degree_power_one() {
        let g = star(4);
        let table = NegativeTable::new(&g, 1.0).unwrap();
        assert!((table.prob(0) - 0.5).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 50_000;
        let mut center = 0u32;
        for _ in 0..n {
            if table.sample(&mut rng) == 0 {
                center += 1;
            }
        }
        let p = center as f64 / n as f64;
        assert!((p - 0.5).abs() < 0.02, "center prob {p}");
    }

    #[test]
    fn negatives_respect_exclusion() {
        let g = cycle(5);
        let table = NegativeTable::new(&g, 0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let negs = sample_negatives(&table, &[0, 1, 2, 3], 50, &mut rng);
        assert!(negs.iter().all(|&v| v == 4), "{negs:?}");
    }

    #[test]
    fn negative_table_empty_graph_errors() {
        let g: Graph<f64> = Graph::from_parts(GraphParts {
            edges: vec![],
            content: Mat::zeros(3, 1),
            labels: None,
            names: None,
        })
        .unwrap();
        assert!(NegativeTable::new(&g, 0.75).is_err());
    }

    #[test]
    fn pair_stream_deterministic_under_seed() {
        let g = cycle(10);
        let feats = all_structural_features(&g, &RprConfig::default(), 5);
        let cfg = SamplingConfig::default();
        let lists = build_cooccurrence(&g, &cfg, 5);
        let table = NegativeTable::new(&g, cfg.neg_power).unwrap();

        let stream = |seed: u64| -> Vec<(NodeId, Vec<NodeId>)> {
            let mut sampler = PositiveSampler::new(&g, &feats, &lists, &cfg).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|t| {
                    let i = t % 10;
                    let j = sampler.sample_positive(i, &mut rng).unwrap();
                    let negs = sample_negatives(&table, &[i, j], cfg.neg_k, &mut rng);
                    (j, negs)
                })
                .collect()
        };
        assert_eq!(stream(77), stream(77));
        assert_ne!(stream(77), stream(78));
    }
}
