//! In-memory weighted undirected graph with node content and labels, plus
//! text loaders and the elementary structural queries the rest of the
//! pipeline is built on.
//!
//! Node identifiers are dense indices in `[0, |V|)`; external string ids map
//! bijectively to dense ids through the stored name table. The adjacency is
//! CSR with per-row cumulative weights so walk steps can binary-search.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::real::Real;

/// Dense node index in `[0, num_nodes)`.
pub type NodeId = usize;

/// Invalid id used to pad truncated structural descriptors.
pub const SENTINEL: NodeId = usize::MAX;

/// Per-node class assignment. Class ids are dense indices into `class_names`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSet {
    class_names: Vec<String>,
    multilabel: bool,
    assignment: Vec<Option<Vec<usize>>>,
}

impl LabelSet {
    pub fn new(
        class_names: Vec<String>,
        multilabel: bool,
        assignment: Vec<Option<Vec<usize>>>,
    ) -> Result<Self> {
        let n_classes = class_names.len();
        for (node, classes) in assignment.iter().enumerate() {
            if let Some(cs) = classes {
                if cs.is_empty() {
                    return Err(Error::validation(format!("node {node} labeled with no class")));
                }
                if !multilabel && cs.len() > 1 {
                    return Err(Error::validation(format!(
                        "node {node} has {} classes in single-label mode",
                        cs.len()
                    )));
                }
                if cs.iter().any(|&c| c >= n_classes) {
                    return Err(Error::validation(format!("node {node} has out-of-range class id")));
                }
            }
        }
        Ok(LabelSet {
            class_names,
            multilabel,
            assignment,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn is_multilabel(&self) -> bool {
        self.multilabel
    }

    pub fn class_name(&self, class: usize) -> &str {
        &self.class_names[class]
    }

    pub fn classes_of(&self, node: NodeId) -> Option<&[usize]> {
        self.assignment.get(node).and_then(|c| c.as_deref())
    }

    /// Single-label convenience accessor.
    pub fn class_of(&self, node: NodeId) -> Option<usize> {
        self.classes_of(node).map(|cs| cs[0])
    }

    pub fn labeled_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|_| i))
    }
}

/// Weighted undirected graph, immutable after construction.
#[derive(Debug, Clone)]
pub struct Graph<T> {
    row_ptr: Vec<usize>,
    cols: Vec<NodeId>,
    weights: Vec<T>,
    /// Per-row running sums of `weights`, for weighted neighbor draws.
    cum: Vec<T>,
    degree: Vec<T>,
    content: Mat<T>,
    labels: Option<LabelSet>,
    names: Vec<String>,
    index: HashMap<String, NodeId>,
}

/// Plain inputs for programmatic graph construction (synthetic generators,
/// perturbation, subgraphs). Edges are undirected; duplicates sum.
pub struct GraphParts<T> {
    pub edges: Vec<(NodeId, NodeId, T)>,
    pub content: Mat<T>,
    pub labels: Option<LabelSet>,
    pub names: Option<Vec<String>>,
}

impl<T: Real> Graph<T> {
    pub fn from_parts(parts: GraphParts<T>) -> Result<Self> {
        let n = parts.content.rows();
        let names = match parts.names {
            Some(names) => {
                if names.len() != n {
                    return Err(Error::validation(format!(
                        "{} names for {n} nodes",
                        names.len()
                    )));
                }
                names
            }
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::validation(format!("duplicate node id '{name}'")));
            }
        }
        if let Some(labels) = &parts.labels {
            if labels.assignment.len() != n {
                return Err(Error::validation(format!(
                    "label table covers {} nodes, graph has {n}",
                    labels.assignment.len()
                )));
            }
        }

        let mut adj: Vec<BTreeMap<NodeId, T>> = vec![BTreeMap::new(); n];
        for &(a, b, w) in &parts.edges {
            if a >= n || b >= n {
                return Err(Error::validation(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::validation(format!("self-loop on node {a}")));
            }
            if !(w.is_finite() && w > T::zero()) {
                return Err(Error::validation(format!("edge ({a},{b}) has weight {w}")));
            }
            *adj[a].entry(b).or_insert_with(T::zero) += w;
            *adj[b].entry(a).or_insert_with(T::zero) += w;
        }

        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        let mut cum = Vec::new();
        let mut degree = Vec::with_capacity(n);
        row_ptr.push(0);
        for row in &adj {
            let mut acc = T::zero();
            for (&j, &w) in row {
                cols.push(j);
                weights.push(w);
                acc += w;
                cum.push(acc);
            }
            degree.push(acc);
            row_ptr.push(cols.len());
        }

        Ok(Graph {
            row_ptr,
            cols,
            weights,
            cum,
            degree,
            content: parts.content,
            labels: parts.labels,
            names,
            index,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        self.cols.len() / 2
    }

    pub fn content_dim(&self) -> usize {
        self.content.cols()
    }

    pub fn content(&self) -> &Mat<T> {
        &self.content
    }

    pub fn content_row(&self, v: NodeId) -> &[T] {
        self.content.row(v)
    }

    pub fn labels(&self) -> Option<&LabelSet> {
        self.labels.as_ref()
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.cols[self.row_ptr[v]..self.row_ptr[v + 1]]
    }

    pub fn neighbor_weights(&self, v: NodeId) -> &[T] {
        &self.weights[self.row_ptr[v]..self.row_ptr[v + 1]]
    }

    /// Weighted degree of `v` (sum of incident edge weights).
    pub fn degree(&self, v: NodeId) -> T {
        self.degree[v]
    }

    pub fn is_isolated(&self, v: NodeId) -> bool {
        self.row_ptr[v] == self.row_ptr[v + 1]
    }

    pub fn has_isolated_nodes(&self) -> bool {
        (0..self.num_nodes()).any(|v| self.is_isolated(v))
    }

    /// Each undirected edge exactly once, with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, T)> + '_ {
        (0..self.num_nodes()).flat_map(move |a| {
            let lo = self.row_ptr[a];
            let hi = self.row_ptr[a + 1];
            self.cols[lo..hi]
                .iter()
                .zip(&self.weights[lo..hi])
                .filter(move |(&b, _)| a < b)
                .map(move |(&b, &w)| (a, b, w))
        })
    }

    pub fn edge_weight(&self, a: NodeId, b: NodeId) -> Option<T> {
        let lo = self.row_ptr[a];
        let hi = self.row_ptr[a + 1];
        self.cols[lo..hi]
            .binary_search(&b)
            .ok()
            .map(|k| self.weights[lo + k])
    }

    /// Transition probability `P[i][j] = w_ij / degree(i)`.
    pub fn transition_prob(&self, i: NodeId, j: NodeId) -> Result<T> {
        if self.is_isolated(i) {
            return Err(Error::Degenerate(format!(
                "node {} has no neighbors, transition probabilities undefined",
                self.name(i)
            )));
        }
        Ok(self.edge_weight(i, j).unwrap_or_else(T::zero) / self.degree[i])
    }

    /// All nodes sorted by weighted degree ascending, ties by id ascending.
    pub fn degree_order(&self) -> Vec<NodeId> {
        let mut order: Vec<NodeId> = (0..self.num_nodes()).collect();
        order.sort_by(|&a, &b| {
            self.degree[a]
                .partial_cmp(&self.degree[b])
                .expect("degrees are finite")
                .then(a.cmp(&b))
        });
        order
    }

    /// Uniform draw over neighbors; `None` for isolated nodes.
    pub fn sample_neighbor_uniform<R: Rng + ?Sized>(
        &self,
        v: NodeId,
        rng: &mut R,
    ) -> Option<NodeId> {
        let nbrs = self.neighbors(v);
        if nbrs.is_empty() {
            None
        } else {
            Some(nbrs[rng.random_range(0..nbrs.len())])
        }
    }

    /// Draw a neighbor proportional to edge weight; `None` for isolated nodes.
    pub fn sample_neighbor_weighted<R: Rng + ?Sized>(
        &self,
        v: NodeId,
        rng: &mut R,
    ) -> Option<NodeId> {
        let lo = self.row_ptr[v];
        let hi = self.row_ptr[v + 1];
        if lo == hi {
            return None;
        }
        let target = T::from_f64(rng.random::<f64>()) * self.degree[v];
        let row = &self.cum[lo..hi];
        let k = row.partition_point(|&c| c <= target).min(hi - lo - 1);
        Some(self.cols[lo + k])
    }

    /// Induced subgraph on `keep` (dense ids are renumbered in `keep` order).
    /// Also returns the old-id -> new-id mapping.
    pub fn induced_subgraph(&self, keep: &[NodeId]) -> Result<(Graph<T>, Vec<Option<NodeId>>)> {
        let mut remap: Vec<Option<NodeId>> = vec![None; self.num_nodes()];
        for (new, &old) in keep.iter().enumerate() {
            if old >= self.num_nodes() {
                return Err(Error::validation(format!("node {old} out of range")));
            }
            if remap[old].is_some() {
                return Err(Error::validation(format!("node {old} listed twice")));
            }
            remap[old] = Some(new);
        }
        let mut edges = Vec::new();
        for (a, b, w) in self.edges() {
            if let (Some(na), Some(nb)) = (remap[a], remap[b]) {
                edges.push((na, nb, w));
            }
        }
        let content = Mat::from_rows(keep.iter().map(|&v| self.content_row(v).to_vec()).collect())?;
        let labels = self.labels.as_ref().map(|ls| LabelSet {
            class_names: ls.class_names.clone(),
            multilabel: ls.multilabel,
            assignment: keep.iter().map(|&v| ls.assignment[v].clone()).collect(),
        });
        let names = keep.iter().map(|&v| self.names[v].clone()).collect();
        let sub = Graph::from_parts(GraphParts {
            edges,
            content,
            labels,
            names: Some(names),
        })?;
        Ok((sub, remap))
    }
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(Error::Io)
}

#[derive(Default)]
struct NodeInterner {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeInterner {
    fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }
}

/// Loads a graph from an edge list, a feature file and an optional label
/// file (formats documented in the README). Node ids in the feature file
/// that never appear in the edge list become isolated nodes; duplicate edge
/// lines have their weights summed; listing both orientations of an edge
/// with different accumulated weights is rejected as asymmetric.
pub fn load_graph<T: Real>(
    edge_path: &Path,
    feature_path: &Path,
    label_path: Option<&Path>,
) -> Result<Graph<T>> {
    let mut interner = NodeInterner::default();
    let oriented = parse_edge_file::<T>(edge_path, &mut interner)?;
    let rows = parse_feature_file::<T>(feature_path, &mut interner)?;

    let n = interner.names.len();

    // Reconcile the two orientations of every undirected edge.
    let mut edges = Vec::new();
    for (&(a, b), &w) in &oriented {
        if a > b {
            continue;
        }
        match oriented.get(&(b, a)) {
            None => edges.push((a, b, w)),
            Some(&wr) => {
                if w != wr {
                    return Err(Error::validation(format!(
                        "asymmetric weights for edge {}-{}: {} vs {}",
                        interner.names[a], interner.names[b], w, wr
                    )));
                }
                edges.push((a, b, w));
            }
        }
    }
    for (&(a, b), &w) in &oriented {
        if a < b || oriented.contains_key(&(b, a)) {
            continue;
        }
        edges.push((b, a, w));
    }

    // Every node must have a content row; feature-only nodes are isolated.
    let mut content_rows: Vec<Option<Vec<T>>> = vec![None; n];
    for (id, row) in rows {
        content_rows[id] = Some(row);
    }
    let mut content = Vec::with_capacity(n);
    for (id, row) in content_rows.into_iter().enumerate() {
        match row {
            Some(r) => content.push(r),
            None => {
                return Err(Error::validation(format!(
                    "node '{}' appears in {} but has no feature row",
                    interner.names[id],
                    edge_path.display()
                )))
            }
        }
    }
    let content = Mat::from_rows(content)?;

    let labels = match label_path {
        Some(path) => Some(parse_label_file(path, &interner)?),
        None => None,
    };

    let graph = Graph::from_parts(GraphParts {
        edges,
        content,
        labels,
        names: Some(interner.names),
    })?;
    for v in 0..graph.num_nodes() {
        if graph.is_isolated(v) {
            warn(&format!("node '{}' is isolated", graph.name(v)));
        }
    }
    Ok(graph)
}

/// Loads structure only (no content); the content matrix is `|V| x 0`.
/// Sufficient for the feature-dump pipeline, rejected by training.
pub fn load_graph_structure<T: Real>(edge_path: &Path) -> Result<Graph<T>> {
    let mut interner = NodeInterner::default();
    let oriented = parse_edge_file::<T>(edge_path, &mut interner)?;
    let n = interner.names.len();
    let mut edges = Vec::new();
    for (&(a, b), &w) in &oriented {
        if a > b {
            continue;
        }
        match oriented.get(&(b, a)) {
            None => edges.push((a, b, w)),
            Some(&wr) if w == wr => edges.push((a, b, w)),
            Some(&wr) => {
                return Err(Error::validation(format!(
                    "asymmetric weights for edge {}-{}: {} vs {}",
                    interner.names[a], interner.names[b], w, wr
                )))
            }
        }
    }
    for (&(a, b), &w) in &oriented {
        if a < b || oriented.contains_key(&(b, a)) {
            continue;
        }
        edges.push((b, a, w));
    }
    Graph::from_parts(GraphParts {
        edges,
        content: Mat::zeros(n, 0),
        labels: None,
        names: Some(interner.names),
    })
}

fn parse_edge_file<T: Real>(
    path: &Path,
    interner: &mut NodeInterner,
) -> Result<BTreeMap<(NodeId, NodeId), T>> {
    let mut oriented: BTreeMap<(NodeId, NodeId), T> = BTreeMap::new();
    for (lineno, line) in read_lines(path)?.iter().enumerate() {
        let lineno = lineno + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(parse_err(
                path,
                lineno,
                format!("expected 'src dst [weight]', got {} fields", fields.len()),
            ));
        }
        let w = if fields.len() == 3 {
            fields[2]
                .parse::<f64>()
                .map_err(|e| parse_err(path, lineno, format!("bad weight '{}': {e}", fields[2])))?
        } else {
            1.0
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(parse_err(path, lineno, format!("weight must be positive, got {w}")));
        }
        let a = interner.intern(fields[0]);
        let b = interner.intern(fields[1]);
        if a == b {
            warn(&format!(
                "{}:{lineno}: dropping self-loop on '{}'",
                path.display(),
                fields[0]
            ));
            continue;
        }
        *oriented.entry((a, b)).or_insert_with(T::zero) += T::from_f64(w);
    }
    Ok(oriented)
}

fn parse_feature_file<T: Real>(
    path: &Path,
    interner: &mut NodeInterner,
) -> Result<Vec<(NodeId, Vec<T>)>> {
    let lines = read_lines(path)?;
    let mut sparse_dim: Option<usize> = None;
    let mut rows: Vec<(NodeId, Vec<T>)> = Vec::new();
    let mut dim: Option<usize> = None;
    let mut seen: HashMap<NodeId, usize> = HashMap::new();

    for (lineno, raw) in lines.iter().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#sparse") {
            let rest = rest.trim();
            let f = rest
                .strip_prefix("f=")
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| parse_err(path, lineno, "expected '#sparse f=<dim>'"))?;
            if !rows.is_empty() {
                return Err(parse_err(path, lineno, "#sparse header must precede data"));
            }
            sparse_dim = Some(f);
            dim = Some(f);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let (id_tok, rest) = match line.split_once(char::is_whitespace) {
            Some((a, b)) => (a, b.trim()),
            None => return Err(parse_err(path, lineno, "expected 'node_id<TAB>values'")),
        };
        let id = interner.intern(id_tok);
        if let Some(prev) = seen.insert(id, lineno) {
            return Err(parse_err(
                path,
                lineno,
                format!("node '{id_tok}' already has a feature row at line {prev}"),
            ));
        }
        let row = match sparse_dim {
            Some(f) => {
                let mut row = vec![T::zero(); f];
                for pair in rest.split_whitespace() {
                    let (idx, val) = pair
                        .split_once(':')
                        .ok_or_else(|| parse_err(path, lineno, format!("bad idx:val pair '{pair}'")))?;
                    let idx: usize = idx
                        .parse()
                        .map_err(|e| parse_err(path, lineno, format!("bad index '{idx}': {e}")))?;
                    if idx >= f {
                        return Err(parse_err(path, lineno, format!("index {idx} >= f={f}")));
                    }
                    let val: f64 = val
                        .parse()
                        .map_err(|e| parse_err(path, lineno, format!("bad value '{val}': {e}")))?;
                    if !val.is_finite() {
                        return Err(parse_err(path, lineno, "non-finite feature value"));
                    }
                    row[idx] = T::from_f64(val);
                }
                row
            }
            None => {
                let mut row = Vec::new();
                for tok in rest.split(',') {
                    let tok = tok.trim();
                    if tok.is_empty() {
                        return Err(parse_err(path, lineno, "empty feature value"));
                    }
                    let val: f64 = tok
                        .parse()
                        .map_err(|e| parse_err(path, lineno, format!("bad value '{tok}': {e}")))?;
                    if !val.is_finite() {
                        return Err(parse_err(path, lineno, "non-finite feature value"));
                    }
                    row.push(T::from_f64(val));
                }
                match dim {
                    None => dim = Some(row.len()),
                    Some(f) if f != row.len() => {
                        return Err(Error::validation(format!(
                            "{}:{lineno}: feature row has {} values, expected {f}",
                            path.display(),
                            row.len()
                        )))
                    }
                    _ => {}
                }
                row
            }
        };
        rows.push((id, row));
    }
    Ok(rows)
}

fn parse_label_file(path: &Path, interner: &NodeInterner) -> Result<LabelSet> {
    let lines = read_lines(path)?;
    let mut multilabel = false;
    let mut class_ids: HashMap<String, usize> = HashMap::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut assignment: Vec<Option<Vec<usize>>> = vec![None; interner.names.len()];

    for (lineno, raw) in lines.iter().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "#multilabel" {
            if assignment.iter().any(Option::is_some) {
                return Err(parse_err(path, lineno, "#multilabel header must precede data"));
            }
            multilabel = true;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let (id_tok, rest) = match line.split_once(char::is_whitespace) {
            Some((a, b)) => (a, b.trim()),
            None => return Err(parse_err(path, lineno, "expected 'node_id<TAB>class'")),
        };
        let id = match interner.index.get(id_tok) {
            Some(&id) => id,
            None => {
                return Err(Error::validation(format!(
                    "{}:{lineno}: label for unknown node '{id_tok}'",
                    path.display()
                )))
            }
        };
        let tokens: Vec<&str> = rest.split(',').map(str::trim).collect();
        if !multilabel && tokens.len() > 1 {
            return Err(parse_err(
                path,
                lineno,
                "multiple classes but no #multilabel header",
            ));
        }
        let mut classes = Vec::with_capacity(tokens.len());
        for tok in tokens {
            if tok.is_empty() {
                return Err(parse_err(path, lineno, "empty class id"));
            }
            let next = class_names.len();
            let cid = *class_ids.entry(tok.to_string()).or_insert_with(|| {
                class_names.push(tok.to_string());
                next
            });
            if !classes.contains(&cid) {
                classes.push(cid);
            }
        }
        classes.sort_unstable();
        if assignment[id].is_some() {
            return Err(parse_err(path, lineno, format!("node '{id_tok}' labeled twice")));
        }
        assignment[id] = Some(classes);
    }
    LabelSet::new(class_names, multilabel, assignment)
}

/// Parses a label file against a fixed universe of node names (index =
/// dense id). Used when labels accompany an embedding file instead of a
/// graph.
pub fn load_label_file(path: &Path, names: &[String]) -> Result<LabelSet> {
    let mut interner = NodeInterner::default();
    for name in names {
        interner.intern(name);
    }
    parse_label_file(path, &interner)
}

// ---------------------------------------------------------------------------
// Serialization (inverse of the loaders)
// ---------------------------------------------------------------------------

/// Writes `content` through a temp file and atomically renames into place.
pub(crate) fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let tmp: PathBuf = path.with_extension("tmp");
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        w.write_all(content.as_bytes())?;
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

impl<T: Real> Graph<T> {
    pub fn save_edges(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (a, b, w) in self.edges() {
            out.push_str(&format!("{}\t{}\t{}\n", self.names[a], self.names[b], w.as_f64()));
        }
        write_atomic(path, &out)
    }

    pub fn save_features(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for v in 0..self.num_nodes() {
            let vals: Vec<String> = self
                .content_row(v)
                .iter()
                .map(|x| x.as_f64().to_string())
                .collect();
            out.push_str(&format!("{}\t{}\n", self.names[v], vals.join(",")));
        }
        write_atomic(path, &out)
    }

    pub fn save_labels(&self, path: &Path) -> Result<()> {
        let ls = self
            .labels
            .as_ref()
            .ok_or_else(|| Error::validation("graph has no labels to save"))?;
        let mut out = String::new();
        if ls.is_multilabel() {
            out.push_str("#multilabel\n");
        }
        for v in 0..self.num_nodes() {
            if let Some(classes) = ls.classes_of(v) {
                let names: Vec<&str> = classes.iter().map(|&c| ls.class_name(c)).collect();
                out.push_str(&format!("{}\t{}\n", self.names[v], names.join(",")));
            }
        }
        write_atomic(path, &out)
    }
}
