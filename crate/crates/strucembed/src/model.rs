//! The differentiable core: content-to-embedding generator, auxiliary
//! per-node embeddings, the pairwise negative-sampling loss with its
//! four-way interaction objective, analytic gradients, and Adam.
//!
//! Embeddings are generated, never stored: `e_v = act(agg_v * W_M [+ b])`
//! where `agg_v` is the descriptor-weighted sum of content rows of the
//! node's top-k structural sources. Because descriptors and content are
//! frozen during training, `agg_v` is precomputed once per node.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, SENTINEL};
use crate::linalg::{axpy, dot, Mat};
use crate::real::Real;
use crate::structfeat::StructuralFeature;

// ---------------------------------------------------------------------------
// Activation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Elu,
    Identity,
}

impl Activation {
    pub fn apply<T: Real>(self, z: T) -> T {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Elu => {
                if z > T::zero() {
                    z
                } else {
                    z.exp() - T::one()
                }
            }
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation output. All three
    /// activations admit this form, which saves storing preactivations.
    pub fn grad_from_output<T: Real>(self, y: T) -> T {
        match self {
            Activation::Tanh => T::one() - y * y,
            Activation::Elu => {
                if y > T::zero() {
                    T::one()
                } else {
                    y + T::one()
                }
            }
            Activation::Identity => T::one(),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            Activation::Tanh => 0,
            Activation::Elu => 1,
            Activation::Identity => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(Activation::Tanh),
            1 => Ok(Activation::Elu),
            2 => Ok(Activation::Identity),
            other => Err(Error::validation(format!("unknown activation id {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Elu => "elu",
            Activation::Identity => "identity",
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "elu" => Ok(Activation::Elu),
            "identity" | "id" | "linear" => Ok(Activation::Identity),
            other => Err(Error::validation(format!(
                "unknown activation '{other}' (expected tanh, elu or identity)"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// The inductive generator kept at inference time.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams<T> {
    /// `f x d` content-to-embedding map.
    pub w_m: Mat<T>,
    pub bias: Option<Vec<T>>,
    pub activation: Activation,
}

impl<T: Real> GeneratorParams<T> {
    /// Glorot-uniform `W_M`, zero bias when enabled.
    pub fn init<R: Rng + ?Sized>(
        f: usize,
        d: usize,
        activation: Activation,
        use_bias: bool,
        rng: &mut R,
    ) -> Self {
        let bound = (6.0 / (f + d) as f64).sqrt();
        let mut w_m = Mat::zeros(f, d);
        for x in w_m.data_mut() {
            *x = T::from_f64((2.0 * rng.random::<f64>() - 1.0) * bound);
        }
        GeneratorParams {
            w_m,
            bias: use_bias.then(|| vec![T::zero(); d]),
            activation,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w_m.rows()
    }

    pub fn embed_dim(&self) -> usize {
        self.w_m.cols()
    }
}

/// Training-only per-node structure embedding table `W_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxEmbeddings<T> {
    pub table: Mat<T>,
}

impl<T: Real> AuxEmbeddings<T> {
    /// Uniform `(-0.5/d, 0.5/d)` init, the usual word2vec convention.
    pub fn init<R: Rng + ?Sized>(num_nodes: usize, d: usize, rng: &mut R) -> Self {
        let bound = 0.5 / d as f64;
        let mut table = Mat::zeros(num_nodes, d);
        for x in table.data_mut() {
            *x = T::from_f64((2.0 * rng.random::<f64>() - 1.0) * bound);
        }
        AuxEmbeddings { table }
    }

    pub fn row(&self, v: NodeId) -> &[T] {
        self.table.row(v)
    }
}

/// Weights of the three-part objective.
#[derive(Debug, Clone, PartialEq)]
pub struct LossConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub neg_k: usize,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            lambda1: 0.4,
            lambda2: 0.2,
            neg_k: 5,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda1 < 0.0 || self.lambda2 < 0.0 {
            return Err(Error::validation("lambda1 and lambda2 must be nonnegative"));
        }
        if self.lambda1 + self.lambda2 > 1.0 + 1e-12 {
            return Err(Error::validation(format!(
                "lambda1 + lambda2 must not exceed 1, got {}",
                self.lambda1 + self.lambda2
            )));
        }
        if self.neg_k < 1 {
            return Err(Error::validation("neg_k must be >= 1"));
        }
        Ok(())
    }

    /// Weight of the two interaction terms.
    pub fn interaction(&self) -> f64 {
        (1.0 - self.lambda1 - self.lambda2).max(0.0)
    }
}

// ---------------------------------------------------------------------------
// Embedding generation
// ---------------------------------------------------------------------------

/// Descriptor-weighted content aggregation for one node; sentinel sources
/// contribute nothing.
pub fn aggregate_content<T: Real>(
    feat: &StructuralFeature<T>,
    g: &Graph<T>,
) -> Result<Vec<T>> {
    let mut agg = vec![T::zero(); g.content_dim()];
    for (&src, &val) in feat.source_ids.iter().zip(&feat.values) {
        if src == SENTINEL {
            continue;
        }
        if src >= g.num_nodes() {
            return Err(Error::Shape(format!(
                "descriptor source {src} outside graph of {} nodes",
                g.num_nodes()
            )));
        }
        axpy(val, g.content_row(src), &mut agg);
    }
    Ok(agg)
}

fn embed_from_agg<T: Real>(agg: &[T], params: &GeneratorParams<T>) -> Vec<T> {
    let mut z = params.w_m.vecmat(agg);
    if let Some(bias) = &params.bias {
        for (zi, &bi) in z.iter_mut().zip(bias) {
            *zi += bi;
        }
    }
    z.iter_mut().for_each(|zi| *zi = params.activation.apply(*zi));
    z
}

/// `e = act(sum_j values[j] * content[source_ids[j]] * W_M [+ b])`.
pub fn generate_embedding<T: Real>(
    feat: &StructuralFeature<T>,
    g: &Graph<T>,
    params: &GeneratorParams<T>,
) -> Result<Vec<T>> {
    if params.input_dim() != g.content_dim() {
        return Err(Error::Shape(format!(
            "generator expects content dim {}, graph has {}",
            params.input_dim(),
            g.content_dim()
        )));
    }
    let agg = aggregate_content(feat, g)?;
    let e = embed_from_agg(&agg, params);
    if e.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("generated embedding".into()));
    }
    Ok(e)
}

/// Frozen per-node aggregations plus current parameters; everything a pair
/// objective evaluation needs.
pub struct PairContext<'a, T> {
    /// `|V| x f`; row v is the aggregated content of node v.
    pub agg: &'a Mat<T>,
    pub params: &'a GeneratorParams<T>,
    pub aux: &'a AuxEmbeddings<T>,
}

impl<'a, T: Real> PairContext<'a, T> {
    pub fn embed(&self, v: NodeId) -> Vec<T> {
        embed_from_agg(self.agg.row(v), self.params)
    }
}

/// Precomputes the aggregation matrix for a whole feature table.
pub fn aggregate_all<T: Real>(
    feats: &[StructuralFeature<T>],
    g: &Graph<T>,
) -> Result<Mat<T>> {
    let mut rows = Vec::with_capacity(feats.len());
    for feat in feats {
        rows.push(aggregate_content(feat, g)?);
    }
    Mat::from_rows(rows)
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

/// `ln(1 + exp(z))` without overflow.
pub fn softplus<T: Real>(z: T) -> T {
    z.max(T::zero()) + (-z.abs()).exp().ln_1p()
}

/// Logistic sigmoid, stable on both tails.
pub fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let ez = z.exp();
        ez / (T::one() + ez)
    }
}

/// `-log sig(e_i . e_p) - sum_n log sig(-e_i . e_n)`: one positive context
/// against `K` sampled negatives.
pub fn sgns_loss<T: Real>(e_i: &[T], e_p: &[T], e_negs: &[Vec<T>]) -> T {
    let mut loss = softplus(-dot(e_i, e_p));
    for e_n in e_negs {
        loss += softplus(dot(e_i, e_n));
    }
    loss
}

/// Negative node draws for the four objective terms, named
/// `<center-family><context-family>`. Context family decides the embedding
/// family the negatives are materialized from: `ee`/`se` negatives go
/// through the generator, `ss`/`es` negatives are `W_S` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct PairNegatives {
    pub ee: Vec<NodeId>,
    pub ss: Vec<NodeId>,
    pub es: Vec<NodeId>,
    pub se: Vec<NodeId>,
}

/// Gradients of one pair objective. `w_s` holds only touched rows.
#[derive(Debug, Clone)]
pub struct PairGradients<T> {
    pub w_m: Mat<T>,
    pub bias: Option<Vec<T>>,
    pub w_s: BTreeMap<NodeId, Vec<T>>,
}

/// `F(i,j) = l1*J(e_i|e_j) + l2*J(s_i|s_j) + (1-l1-l2)*[J(e_i|s_j) + J(s_i|e_j)]`.
/// Zero-weight terms are skipped entirely (they neither cost work nor touch
/// parameters).
pub fn pair_loss<T: Real>(
    ctx: &PairContext<T>,
    i: NodeId,
    j: NodeId,
    negs: &PairNegatives,
    cfg: &LossConfig,
) -> Result<T> {
    cfg.validate()?;
    let l1 = T::from_f64(cfg.lambda1);
    let l2 = T::from_f64(cfg.lambda2);
    let mu = T::from_f64(cfg.interaction());
    let mut total = T::zero();

    let needs_e = cfg.lambda1 > 0.0 || cfg.interaction() > 0.0;
    let needs_s = cfg.lambda2 > 0.0 || cfg.interaction() > 0.0;
    let (e_i, e_j) = if needs_e {
        (ctx.embed(i), ctx.embed(j))
    } else {
        (Vec::new(), Vec::new())
    };
    let (s_i, s_j) = if needs_s {
        (ctx.aux.row(i), ctx.aux.row(j))
    } else {
        (&[][..], &[][..])
    };

    if cfg.lambda1 > 0.0 {
        let negs_e: Vec<Vec<T>> = negs.ee.iter().map(|&n| ctx.embed(n)).collect();
        total += l1 * sgns_loss(&e_i, &e_j, &negs_e);
    }
    if cfg.lambda2 > 0.0 {
        let negs_s: Vec<Vec<T>> = negs.ss.iter().map(|&n| ctx.aux.row(n).to_vec()).collect();
        total += l2 * sgns_loss(s_i, s_j, &negs_s);
    }
    if cfg.interaction() > 0.0 {
        let negs_s: Vec<Vec<T>> = negs.es.iter().map(|&n| ctx.aux.row(n).to_vec()).collect();
        total += mu * sgns_loss(&e_i, s_j, &negs_s);
        let negs_e: Vec<Vec<T>> = negs.se.iter().map(|&n| ctx.embed(n)).collect();
        total += mu * sgns_loss(s_i, &e_j, &negs_e);
    }
    Ok(total)
}

/// Loss and analytic gradients of [`pair_loss`] w.r.t. `W_M`, the bias, and
/// the touched `W_S` rows. Gradients flow through the generator for every
/// generated embedding involved, negatives included.
pub fn pair_gradients<T: Real>(
    ctx: &PairContext<T>,
    i: NodeId,
    j: NodeId,
    negs: &PairNegatives,
    cfg: &LossConfig,
) -> Result<(T, PairGradients<T>)> {
    cfg.validate()?;
    let l1 = T::from_f64(cfg.lambda1);
    let l2 = T::from_f64(cfg.lambda2);
    let mu = T::from_f64(cfg.interaction());
    let f = ctx.params.input_dim();
    let d = ctx.params.embed_dim();

    let mut grads = PairGradients {
        w_m: Mat::zeros(f, d),
        bias: ctx.params.bias.as_ref().map(|_| vec![T::zero(); d]),
        w_s: BTreeMap::new(),
    };
    let mut loss = T::zero();

    let needs_e = cfg.lambda1 > 0.0 || cfg.interaction() > 0.0;

    let (e_i, e_j) = if needs_e {
        (ctx.embed(i), ctx.embed(j))
    } else {
        (Vec::new(), Vec::new())
    };
    let mut ge_i = vec![T::zero(); if needs_e { d } else { 0 }];
    let mut ge_j = vec![T::zero(); if needs_e { d } else { 0 }];

    // e_v = act(agg_v W + b): chain rule through the activation, outer
    // product with the frozen aggregation row.
    let backprop_e = |v: NodeId, e_v: &[T], g_out: &[T], grads: &mut PairGradients<T>| {
        let act = ctx.params.activation;
        let agg_v = ctx.agg.row(v);
        let gz: Vec<T> = g_out
            .iter()
            .zip(e_v)
            .map(|(&g, &y)| g * act.grad_from_output(y))
            .collect();
        for (r, &a) in agg_v.iter().enumerate() {
            if a != T::zero() {
                axpy(a, &gz, grads.w_m.row_mut(r));
            }
        }
        if let Some(bias) = grads.bias.as_mut() {
            axpy(T::one(), &gz, bias);
        }
    };
    let add_ws = |map: &mut BTreeMap<NodeId, Vec<T>>, v: NodeId, coeff: T, vec: &[T]| {
        let entry = map.entry(v).or_insert_with(|| vec![T::zero(); vec.len()]);
        axpy(coeff, vec, entry);
    };

    if cfg.lambda1 > 0.0 {
        // J(e_i | e_j) with generated negatives.
        let x = dot(&e_i, &e_j);
        loss += l1 * softplus(-x);
        let c = -l1 * sigmoid(-x);
        axpy(c, &e_j, &mut ge_i);
        axpy(c, &e_i, &mut ge_j);
        for &n in &negs.ee {
            let e_n = ctx.embed(n);
            let x = dot(&e_i, &e_n);
            loss += l1 * softplus(x);
            let c = l1 * sigmoid(x);
            axpy(c, &e_n, &mut ge_i);
            let g_n: Vec<T> = e_i.iter().map(|&v| c * v).collect();
            backprop_e(n, &e_n, &g_n, &mut grads);
        }
    }

    if cfg.lambda2 > 0.0 {
        // J(s_i | s_j) with W_S-row negatives.
        let s_i = ctx.aux.row(i);
        let s_j = ctx.aux.row(j);
        let x = dot(s_i, s_j);
        loss += l2 * softplus(-x);
        let c = -l2 * sigmoid(-x);
        add_ws(&mut grads.w_s, i, c, s_j);
        add_ws(&mut grads.w_s, j, c, s_i);
        for &n in &negs.ss {
            let s_n = ctx.aux.row(n);
            let x = dot(s_i, s_n);
            loss += l2 * softplus(x);
            let c = l2 * sigmoid(x);
            add_ws(&mut grads.w_s, i, c, s_n);
            add_ws(&mut grads.w_s, n, c, s_i);
        }
    }

    if cfg.interaction() > 0.0 {
        let s_i = ctx.aux.row(i);
        let s_j = ctx.aux.row(j);

        // J(e_i | s_j): s-context, so negatives are W_S rows.
        let x = dot(&e_i, s_j);
        loss += mu * softplus(-x);
        let c = -mu * sigmoid(-x);
        axpy(c, s_j, &mut ge_i);
        add_ws(&mut grads.w_s, j, c, &e_i);
        for &n in &negs.es {
            let s_n = ctx.aux.row(n);
            let x = dot(&e_i, s_n);
            loss += mu * softplus(x);
            let c = mu * sigmoid(x);
            axpy(c, s_n, &mut ge_i);
            add_ws(&mut grads.w_s, n, c, &e_i);
        }

        // J(s_i | e_j): e-context, generated negatives.
        let x = dot(s_i, &e_j);
        loss += mu * softplus(-x);
        let c = -mu * sigmoid(-x);
        add_ws(&mut grads.w_s, i, c, &e_j);
        axpy(c, s_i, &mut ge_j);
        for &n in &negs.se {
            let e_n = ctx.embed(n);
            let x = dot(s_i, &e_n);
            loss += mu * softplus(x);
            let c = mu * sigmoid(x);
            add_ws(&mut grads.w_s, i, c, &e_n);
            let g_n: Vec<T> = s_i.iter().map(|&v| c * v).collect();
            backprop_e(n, &e_n, &g_n, &mut grads);
        }
    }

    if needs_e {
        backprop_e(i, &e_i, &ge_i, &mut grads);
        backprop_e(j, &e_j, &ge_j, &mut grads);
    }
    Ok((loss, grads))
}

// ---------------------------------------------------------------------------
// Batch accumulation and Adam
// ---------------------------------------------------------------------------

/// Sum of pair gradients awaiting one optimizer step.
pub struct BatchGrads<T> {
    pub w_m: Mat<T>,
    pub bias: Option<Vec<T>>,
    pub w_s: BTreeMap<NodeId, Vec<T>>,
    pub pairs: usize,
}

impl<T: Real> BatchGrads<T> {
    pub fn new(f: usize, d: usize, use_bias: bool) -> Self {
        BatchGrads {
            w_m: Mat::zeros(f, d),
            bias: use_bias.then(|| vec![T::zero(); d]),
            w_s: BTreeMap::new(),
            pairs: 0,
        }
    }

    pub fn accumulate(&mut self, pg: &PairGradients<T>) {
        for (acc, &g) in self.w_m.data_mut().iter_mut().zip(pg.w_m.data()) {
            *acc += g;
        }
        if let (Some(acc), Some(g)) = (self.bias.as_mut(), pg.bias.as_ref()) {
            axpy(T::one(), g, acc);
        }
        for (&v, row) in &pg.w_s {
            let entry = self
                .w_s
                .entry(v)
                .or_insert_with(|| vec![T::zero(); row.len()]);
            axpy(T::one(), row, entry);
        }
        self.pairs += 1;
    }

    /// Folds another accumulator in (parallel batch reduction).
    pub fn merge(&mut self, other: BatchGrads<T>) {
        for (acc, &g) in self.w_m.data_mut().iter_mut().zip(other.w_m.data()) {
            *acc += g;
        }
        if let (Some(acc), Some(g)) = (self.bias.as_mut(), other.bias.as_ref()) {
            axpy(T::one(), g, acc);
        }
        for (v, row) in other.w_s {
            match self.w_s.entry(v) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(row);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    axpy(T::one(), &row, e.get_mut());
                }
            }
        }
        self.pairs += other.pairs;
    }

    /// Mean over the accumulated pairs.
    pub fn scale_to_mean(&mut self) {
        if self.pairs == 0 {
            return;
        }
        let inv = T::from_f64(1.0 / self.pairs as f64);
        self.w_m.data_mut().iter_mut().for_each(|x| *x *= inv);
        if let Some(bias) = self.bias.as_mut() {
            bias.iter_mut().for_each(|x| *x *= inv);
        }
        for row in self.w_s.values_mut() {
            row.iter_mut().for_each(|x| *x *= inv);
        }
    }

    pub fn reset(&mut self) {
        self.w_m.fill(T::zero());
        if let Some(bias) = self.bias.as_mut() {
            bias.iter_mut().for_each(|x| *x = T::zero());
        }
        self.w_s.clear();
        self.pairs = 0;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamHyper {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment accumulators for one parameter tensor.
#[derive(Debug, Clone)]
pub struct AdamTensor<T> {
    m: Vec<T>,
    v: Vec<T>,
    step: u64,
}

impl<T: Real> AdamTensor<T> {
    pub fn new(len: usize) -> Self {
        AdamTensor {
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected Adam update. Rejects non-finite gradients rather
    /// than clipping them.
    pub fn step(&mut self, hp: &AdamHyper, params: &mut [T], grads: &[T]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "adam tensor of {} entries got params {} / grads {}",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        if let Some(g) = grads.iter().find(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!("gradient entry {g}")));
        }
        self.step += 1;
        let b1 = T::from_f64(hp.beta1);
        let b2 = T::from_f64(hp.beta2);
        let lr = T::from_f64(hp.lr);
        let eps = T::from_f64(hp.eps);
        let bc1 = T::one() - T::from_f64(hp.beta1.powi(self.step as i32));
        let bc2 = T::one() - T::from_f64(hp.beta2.powi(self.step as i32));
        for ((p, g), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = b1 * *m + (T::one() - b1) * *g;
            *v = b2 * *v + (T::one() - b2) * *g * *g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
        }
        Ok(())
    }
}

/// Optimizer state for the whole model: one tensor for `W_M` (plus bias),
/// one per `W_S` row so untouched rows stay untouched.
pub struct AdamState<T> {
    pub hyper: AdamHyper,
    w_m: AdamTensor<T>,
    bias: Option<AdamTensor<T>>,
    w_s_rows: Vec<AdamTensor<T>>,
}

impl<T: Real> AdamState<T> {
    pub fn new(hyper: AdamHyper, f: usize, d: usize, use_bias: bool, num_nodes: usize) -> Self {
        AdamState {
            hyper,
            w_m: AdamTensor::new(f * d),
            bias: use_bias.then(|| AdamTensor::new(d)),
            w_s_rows: (0..num_nodes).map(|_| AdamTensor::new(d)).collect(),
        }
    }

    /// Applies one averaged batch to the parameters.
    pub fn apply(
        &mut self,
        params: &mut GeneratorParams<T>,
        aux: &mut AuxEmbeddings<T>,
        batch: &mut BatchGrads<T>,
    ) -> Result<()> {
        batch.scale_to_mean();
        self.w_m
            .step(&self.hyper, params.w_m.data_mut(), batch.w_m.data())?;
        if let (Some(state), Some(b), Some(g)) =
            (self.bias.as_mut(), params.bias.as_mut(), batch.bias.as_ref())
        {
            state.step(&self.hyper, b, g)?;
        }
        for (&v, grad) in &batch.w_s {
            self.w_s_rows[v].step(&self.hyper, aux.table.row_mut(v), grad)?;
        }
        Ok(())
    }

    /// True if no `W_S` row ever received an update.
    pub fn aux_untouched(&self) -> bool {
        self.w_s_rows.iter().all(|t| t.step_count() == 0)
    }
}
