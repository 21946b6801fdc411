//! End-to-end training and inductive inference: feature precomputation,
//! pair streaming, batched optimization, checkpointing, and embedding
//! generation for nodes the model never saw.

use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::linalg::Mat;
use crate::model::{
    aggregate_all, generate_embedding, pair_gradients, Activation, AdamHyper, AdamState,
    AuxEmbeddings, BatchGrads, GeneratorParams, LossConfig, PairContext, PairNegatives,
};
use crate::real::Real;
use crate::sampling::{
    build_cooccurrence, sample_negatives, NegativeTable, PositiveSampler, SamplerStats,
    SamplingConfig,
};
use crate::structfeat::{
    all_structural_features, node_seed, structural_features, RprConfig, StructuralFeature,
};

// Stream salts so one master seed drives independent RNG streams.
const SALT_FEATURES: u64 = 0xA076_1D64_78BD_642F;
const SALT_CORPUS: u64 = 0xE703_7ED1_A0B4_28DB;
const SALT_INIT: u64 = 0x8EBC_6AF0_9C88_C6E3;
const SALT_PAIRS: u64 = 0x5895_58CB_3A8A_88C3;

/// Every knob of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub rpr: RprConfig,
    pub sampling: SamplingConfig,
    pub loss: LossConfig,
    /// Embedding dimensionality.
    pub d: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    /// Optimizer steps between rolling checkpoints; 0 disables.
    pub checkpoint_every: usize,
    pub activation: Activation,
    pub use_bias: bool,
    /// Worker cap; 1 selects fully deterministic single-threaded training.
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            rpr: RprConfig::default(),
            sampling: SamplingConfig::default(),
            loss: LossConfig::default(),
            d: 200,
            epochs: 50,
            batch_size: 512,
            lr: 0.001,
            seed: 1,
            checkpoint_every: 0,
            activation: Activation::Tanh,
            use_bias: false,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.rpr.validate()?;
        self.sampling.validate()?;
        self.loss.validate()?;
        if self.d < 1 {
            return Err(Error::validation("embedding dimension must be >= 1"));
        }
        if self.batch_size < 1 {
            return Err(Error::validation("batch_size must be >= 1"));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::validation("learning rate must be positive"));
        }
        if self.threads < 1 {
            return Err(Error::validation("threads must be >= 1"));
        }
        Ok(())
    }
}

/// The self-contained inference artifact: generator weights plus the
/// descriptor settings needed to featurize unseen nodes. Carries no
/// auxiliary embedding table.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel<T> {
    pub params: GeneratorParams<T>,
    pub rpr: RprConfig,
    /// Hash of the training inputs, for provenance checks.
    pub fingerprint: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    pub elapsed_ms: u64,
}

/// Everything a training run produces. Only `model` is meant to survive;
/// the rest supports evaluation and tests.
pub struct TrainOutcome<T> {
    pub model: TrainedModel<T>,
    pub log: Vec<EpochStats>,
    pub aux: AuxEmbeddings<T>,
    pub feats: Vec<StructuralFeature<T>>,
    pub sampler_stats: SamplerStats,
}

/// FNV-1a over the structural and content bits of the graph.
pub fn graph_fingerprint<T: Real>(g: &Graph<T>) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut mix = |x: u64| {
        for byte in x.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    mix(g.num_nodes() as u64);
    for (a, b, w) in g.edges() {
        mix(a as u64);
        mix(b as u64);
        mix(w.as_f64().to_bits());
    }
    for v in 0..g.num_nodes() {
        for &x in g.content_row(v) {
            mix(x.as_f64().to_bits());
        }
    }
    h
}

fn draw_negatives<R: rand::Rng + ?Sized>(
    table: &NegativeTable,
    i: NodeId,
    j: NodeId,
    cfg: &LossConfig,
    k: usize,
    rng: &mut R,
) -> PairNegatives {
    let exclude = [i, j];
    let mut draw = || sample_negatives(table, &exclude, k, rng);
    let (ee, ss, es, se);
    if cfg.lambda1 > 0.0 {
        ee = draw();
    } else {
        ee = Vec::new();
    }
    if cfg.lambda2 > 0.0 {
        ss = draw();
    } else {
        ss = Vec::new();
    }
    if cfg.interaction() > 0.0 {
        es = draw();
        se = draw();
    } else {
        es = Vec::new();
        se = Vec::new();
    }
    PairNegatives { ee, ss, es, se }
}

type PairJob = (NodeId, NodeId, PairNegatives);

fn batch_gradients<T: Real>(
    jobs: &[PairJob],
    ctx: &PairContext<T>,
    cfg: &LossConfig,
    parallel: bool,
) -> Result<(T, BatchGrads<T>)> {
    let f = ctx.params.input_dim();
    let d = ctx.params.embed_dim();
    let use_bias = ctx.params.bias.is_some();
    if parallel {
        jobs.par_iter()
            .try_fold(
                || (T::zero(), BatchGrads::new(f, d, use_bias)),
                |(mut sum, mut acc), (i, j, negs)| {
                    let (loss, pg) = pair_gradients(ctx, *i, *j, negs, cfg)?;
                    sum += loss;
                    acc.accumulate(&pg);
                    Ok((sum, acc))
                },
            )
            .try_reduce(
                || (T::zero(), BatchGrads::new(f, d, use_bias)),
                |(sa, mut a), (sb, b)| {
                    a.merge(b);
                    Ok((sa + sb, a))
                },
            )
    } else {
        let mut acc = BatchGrads::new(f, d, use_bias);
        let mut sum = T::zero();
        for (i, j, negs) in jobs {
            let (loss, pg) = pair_gradients(ctx, *i, *j, negs, cfg)?;
            sum += loss;
            acc.accumulate(&pg);
        }
        Ok((sum, acc))
    }
}

/// Trains the embedding generator on `g`. Each epoch visits every
/// non-degenerate node once in shuffled order, draws one positive per
/// visit, and applies one optimizer step per full batch (plus one for the
/// epoch's remainder).
pub fn train<T: Real>(g: &Graph<T>, cfg: &TrainConfig) -> Result<TrainOutcome<T>> {
    train_with_checkpoints(g, cfg, None)
}

pub fn train_with_checkpoints<T: Real>(
    g: &Graph<T>,
    cfg: &TrainConfig,
    checkpoint_path: Option<&Path>,
) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    if g.num_nodes() == 0 {
        return Err(Error::validation("cannot train on an empty graph"));
    }
    if g.content_dim() == 0 {
        return Err(Error::validation(
            "graph has no content; the generator needs at least one feature",
        ));
    }

    let rpr = RprConfig {
        seed: cfg.seed ^ SALT_FEATURES,
        ..cfg.rpr.clone()
    };
    let feats = all_structural_features(g, &rpr, rpr.seed);
    let lists = build_cooccurrence(g, &cfg.sampling, cfg.seed ^ SALT_CORPUS);
    let table = NegativeTable::new(g, cfg.sampling.neg_power)?;
    let agg = aggregate_all(&feats, g)?;

    let f = g.content_dim();
    let mut init_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ SALT_INIT);
    let mut params = GeneratorParams::init(f, cfg.d, cfg.activation, cfg.use_bias, &mut init_rng);
    let mut aux = AuxEmbeddings::init(g.num_nodes(), cfg.d, &mut init_rng);
    let hyper = AdamHyper {
        lr: cfg.lr,
        ..AdamHyper::default()
    };
    let mut adam = AdamState::new(hyper, f, cfg.d, cfg.use_bias, g.num_nodes());

    let mut sampler = PositiveSampler::new(g, &feats, &lists, &cfg.sampling)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ SALT_PAIRS);
    let parallel = cfg.threads > 1;
    let fingerprint = graph_fingerprint(g);

    let mut log = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<NodeId> = (0..g.num_nodes()).collect();
    let mut jobs: Vec<PairJob> = Vec::with_capacity(cfg.batch_size);
    let mut steps = 0usize;
    let started = Instant::now();
    let mut degenerate_warned = false;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0f64;
        let mut epoch_pairs = 0usize;

        let flush = |jobs: &mut Vec<PairJob>,
                         params: &mut GeneratorParams<T>,
                         aux: &mut AuxEmbeddings<T>,
                         adam: &mut AdamState<T>,
                         steps: &mut usize|
         -> Result<f64> {
            if jobs.is_empty() {
                return Ok(0.0);
            }
            let (loss_sum, mut batch) = {
                let ctx = PairContext {
                    agg: &agg,
                    params,
                    aux,
                };
                batch_gradients(jobs, &ctx, &cfg.loss, parallel)?
            };
            if !loss_sum.is_finite() {
                return Err(Error::NonFinite(format!(
                    "batch loss diverged at step {steps} ({} pairs)",
                    jobs.len()
                )));
            }
            adam.apply(params, aux, &mut batch)?;
            *steps += 1;
            if cfg.checkpoint_every > 0 && *steps % cfg.checkpoint_every == 0 {
                if let Some(path) = checkpoint_path {
                    let model = TrainedModel {
                        params: params.clone(),
                        rpr: rpr.clone(),
                        fingerprint,
                    };
                    save_model(&model, Some(aux), path)?;
                }
            }
            let total = loss_sum.as_f64();
            jobs.clear();
            Ok(total)
        };

        for &i in &order {
            let (j, _branch) = match sampler.sample_with_branch(i, &mut rng) {
                Ok(pair) => pair,
                Err(Error::Degenerate(msg)) => {
                    if !degenerate_warned {
                        eprintln!("warning: skipping degenerate node(s): {msg}");
                        degenerate_warned = true;
                    }
                    continue;
                }
                Err(other) => return Err(other),
            };
            let negs = draw_negatives(&table, i, j, &cfg.loss, cfg.sampling.neg_k, &mut rng);
            jobs.push((i, j, negs));
            epoch_pairs += 1;
            if jobs.len() == cfg.batch_size {
                epoch_loss += flush(&mut jobs, &mut params, &mut aux, &mut adam, &mut steps)?;
            }
        }
        epoch_loss += flush(&mut jobs, &mut params, &mut aux, &mut adam, &mut steps)?;

        if epoch_pairs == 0 {
            return Err(Error::Degenerate(
                "no trainable pairs: every node lacks both co-occurrences and candidates".into(),
            ));
        }
        let mean_loss = epoch_loss / epoch_pairs as f64;
        if !mean_loss.is_finite() {
            return Err(Error::NonFinite(format!("mean loss at epoch {epoch}")));
        }
        log.push(EpochStats {
            epoch,
            mean_loss,
            elapsed_ms: started.elapsed().as_millis() as u64,
        });
    }

    // Soft sanity: early epochs should not trend upward.
    if log.len() >= 3 && log[0].mean_loss < log[2].mean_loss.min(log[1].mean_loss) {
        eprintln!(
            "warning: mean loss rose over the first epochs ({:.6} -> {:.6} -> {:.6})",
            log[0].mean_loss, log[1].mean_loss, log[2].mean_loss
        );
    }

    let sampler_stats = sampler.stats().clone();
    drop(sampler);
    Ok(TrainOutcome {
        model: TrainedModel {
            params,
            rpr,
            fingerprint,
        },
        log,
        aux,
        feats,
        sampler_stats,
    })
}

/// Generator outputs for every node of `g` on a fixed feature table (the
/// embeddings a training run exports).
pub fn generate_all<T: Real>(
    params: &GeneratorParams<T>,
    feats: &[StructuralFeature<T>],
    g: &Graph<T>,
) -> Result<Mat<T>> {
    let rows: Vec<Vec<T>> = feats
        .iter()
        .map(|feat| generate_embedding(feat, g, params))
        .collect::<Result<_>>()?;
    Mat::from_rows(rows)
}

/// Embeddings for `nodes` of a (possibly unseen) graph: featurize with the
/// model's descriptor settings, then run the generator. No parameters are
/// touched; rows come back in `nodes` order.
pub fn infer<T: Real>(
    model: &TrainedModel<T>,
    g_new: &Graph<T>,
    nodes: &[NodeId],
    seed: u64,
) -> Result<Mat<T>> {
    if g_new.content_dim() != model.params.input_dim() {
        return Err(Error::Shape(format!(
            "model expects content dim {}, graph has {}",
            model.params.input_dim(),
            g_new.content_dim()
        )));
    }
    if let Some(&v) = nodes.iter().find(|&&v| v >= g_new.num_nodes()) {
        return Err(Error::validation(format!("node {v} out of range")));
    }
    let rows: Vec<Vec<T>> = nodes
        .par_iter()
        .map(|&v| {
            let mut rng = ChaCha8Rng::seed_from_u64(node_seed(seed, v));
            let feat = structural_features(g_new, v, &model.rpr, &mut rng);
            generate_embedding(&feat, g_new, &model.params)
        })
        .collect::<Result<_>>()?;
    Mat::from_rows(rows)
}

// ---------------------------------------------------------------------------
// Model checkpoint format
// ---------------------------------------------------------------------------
//
// Binary, little-endian:
//   magic  "SEMB"            4 bytes
//   version u32              currently 1
//   flags   u32              bit0 = bias present, bit1 = aux table present
//   activation u8
//   f, d    u64, u64
//   beta    f64              descriptor settings for inference
//   k, m, l u64 x3
//   rpr_seed u64
//   fingerprint u64
//   w_m     f*d f64          row major
//   [bias   d f64]
//   [aux    u64 row count, then rows*d f64]

const MODEL_MAGIC: &[u8; 4] = b"SEMB";
const MODEL_VERSION: u32 = 1;

struct ByteWriter {
    buf: Vec<u8>,
}

impl ByteWriter {
    fn u32(&mut self, x: u32) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
}

struct ByteReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::validation("model file truncated"));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Serializes a model, optionally with the auxiliary table for training
/// resumption. The exported inference model never includes it.
pub fn save_model<T: Real>(
    model: &TrainedModel<T>,
    aux: Option<&AuxEmbeddings<T>>,
    path: &Path,
) -> Result<()> {
    let mut w = ByteWriter { buf: Vec::new() };
    w.buf.extend_from_slice(MODEL_MAGIC);
    w.u32(MODEL_VERSION);
    let mut flags = 0u32;
    if model.params.bias.is_some() {
        flags |= 1;
    }
    if aux.is_some() {
        flags |= 2;
    }
    w.u32(flags);
    w.buf.push(model.params.activation.id());
    w.u64(model.params.input_dim() as u64);
    w.u64(model.params.embed_dim() as u64);
    w.f64(model.rpr.beta);
    w.u64(model.rpr.k as u64);
    w.u64(model.rpr.m as u64);
    w.u64(model.rpr.l as u64);
    w.u64(model.rpr.seed);
    w.u64(model.fingerprint);
    for &x in model.params.w_m.data() {
        w.f64(x.as_f64());
    }
    if let Some(bias) = &model.params.bias {
        for &x in bias {
            w.f64(x.as_f64());
        }
    }
    if let Some(aux) = aux {
        w.u64(aux.table.rows() as u64);
        for &x in aux.table.data() {
            w.f64(x.as_f64());
        }
    }

    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &w.buf)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_model<T: Real>(path: &Path) -> Result<(TrainedModel<T>, Option<AuxEmbeddings<T>>)> {
    let buf = std::fs::read(path)?;
    let mut r = ByteReader { buf: &buf, pos: 0 };
    if r.take(4)? != MODEL_MAGIC {
        return Err(Error::validation(format!(
            "{} is not a model file (bad magic)",
            path.display()
        )));
    }
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(Error::validation(format!(
            "unsupported model version {version}"
        )));
    }
    let flags = r.u32()?;
    let activation = Activation::from_id(r.u8()?)?;
    let f = r.u64()? as usize;
    let d = r.u64()? as usize;
    let beta = r.f64()?;
    let k = r.u64()? as usize;
    let m = r.u64()? as usize;
    let l = r.u64()? as usize;
    let rpr_seed = r.u64()?;
    let fingerprint = r.u64()?;
    if d == 0 {
        return Err(Error::validation("model has embedding dimension 0"));
    }

    let mut w_m = Vec::with_capacity(f * d);
    for _ in 0..f * d {
        w_m.push(T::from_f64(r.f64()?));
    }
    let bias = if flags & 1 != 0 {
        let mut b = Vec::with_capacity(d);
        for _ in 0..d {
            b.push(T::from_f64(r.f64()?));
        }
        Some(b)
    } else {
        None
    };
    let aux = if flags & 2 != 0 {
        let rows = r.u64()? as usize;
        let mut data = Vec::with_capacity(rows * d);
        for _ in 0..rows * d {
            data.push(T::from_f64(r.f64()?));
        }
        Some(AuxEmbeddings {
            table: Mat::from_vec(rows, d, data)?,
        })
    } else {
        None
    };
    if r.pos != buf.len() {
        return Err(Error::validation("trailing bytes in model file"));
    }

    Ok((
        TrainedModel {
            params: GeneratorParams {
                w_m: Mat::from_vec(f, d, w_m)?,
                bias,
                activation,
            },
            rpr: RprConfig {
                beta,
                k,
                m,
                l,
                seed: rpr_seed,
            },
            fingerprint,
        },
        aux,
    ))
}

// ---------------------------------------------------------------------------
// Embedding file IO
// ---------------------------------------------------------------------------

/// `node_id<TAB>v1,...,vd`, one node per line. Rejects d == 0.
pub fn export_embeddings<T: Real>(names: &[String], rows: &Mat<T>, path: &Path) -> Result<()> {
    if rows.cols() == 0 {
        return Err(Error::validation("refusing to export 0-dimensional embeddings"));
    }
    if names.len() != rows.rows() {
        return Err(Error::Shape(format!(
            "{} names for {} embedding rows",
            names.len(),
            rows.rows()
        )));
    }
    let mut out = String::new();
    for (name, row) in names.iter().zip(rows.iter_rows()) {
        let vals: Vec<String> = row.iter().map(|x| x.as_f64().to_string()).collect();
        out.push_str(&format!("{name}\t{}\n", vals.join(",")));
    }
    crate::graph::write_atomic(path, &out)
}

pub fn load_embeddings<T: Real>(path: &Path) -> Result<(Vec<String>, Mat<T>)> {
    let text = std::fs::read_to_string(path)?;
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, rest) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: "expected 'node_id<TAB>v1,...,vd'".into(),
        })?;
        let mut row = Vec::new();
        for tok in rest.split(',') {
            let v: f64 = tok.trim().parse().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("bad value '{tok}': {e}"),
            })?;
            row.push(T::from_f64(v));
        }
        names.push(name.to_string());
        rows.push(row);
    }
    Ok((names, Mat::from_rows(rows)?))
}

/// Training log as `epoch,mean_loss,elapsed_ms` CSV.
pub fn write_log_csv(log: &[EpochStats], path: &Path) -> Result<()> {
    let mut out = String::from("epoch,mean_loss,elapsed_ms\n");
    for row in log {
        out.push_str(&format!("{},{},{}\n", row.epoch, row.mean_loss, row.elapsed_ms));
    }
    crate::graph::write_atomic(path, &out)
}
