//! Command-line front end. Every run echoes its fully-resolved
//! configuration to stderr so experiments can be reproduced from logs.
//!
//! Exit codes: 0 success, 1 bad input or configuration, 2 runtime failure.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::{
    evaluate_split_protocol, mirror_experiment, perturb_network, structural_correlation,
    LogRegConfig,
};
use crate::graph::{self, Graph, NodeId};
use crate::linalg::Mat;
use crate::structfeat::{all_structural_features, write_feature_dump};
use crate::trainer::{
    export_embeddings, generate_all, infer, load_embeddings, load_model, save_model, train,
    train_with_checkpoints, write_log_csv, TrainConfig,
};
use crate::Scalar;

#[derive(Parser)]
#[command(
    name = "strucembed",
    version,
    about = "Inductive node embeddings preserving local proximity and structural identity"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an embedding generator on a graph
    Train(TrainArgsCli),
    /// Generate embeddings for (possibly unseen) nodes with a trained model
    Infer(InferArgs),
    /// Dump per-node structural descriptors
    Features(FeaturesArgs),
    /// Split-protocol node classification on an embedding file
    EvalClassify(EvalClassifyArgs),
    /// Mirror-network structural identity experiment
    EvalMirror(EvalMirrorArgs),
    /// Correlation between descriptor distance and embedding distance
    EvalCorrelation(EvalCorrelationArgs),
    /// Random edge/content perturbation of a graph
    Perturb(PerturbArgs),
}

/// Hyperparameter overrides shared by training-flavored subcommands.
/// Precedence: built-in defaults < config file < these flags.
#[derive(Args, Debug, Default, Clone)]
struct HyperOverrides {
    /// Flat `key = value` config file (keys documented in the README)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Embedding dimensionality [default: 200]
    #[arg(long)]
    dim: Option<usize>,
    /// Training epochs [default: 50]
    #[arg(long)]
    epochs: Option<usize>,
    /// Pairs per optimizer step [default: 512]
    #[arg(long)]
    batch_size: Option<usize>,
    /// Adam learning rate [default: 0.001]
    #[arg(long)]
    lr: Option<f64>,
    /// Structural positive-sampling rate [default: 0.5]
    #[arg(long)]
    alpha: Option<f64>,
    /// Weight of the generated-embedding term [default: 0.4]
    #[arg(long)]
    lambda1: Option<f64>,
    /// Weight of the auxiliary-embedding term [default: 0.2]
    #[arg(long)]
    lambda2: Option<f64>,
    /// Walk continuation probability [default: 0.5]
    #[arg(long)]
    beta: Option<f64>,
    /// Descriptor length [default: 16]
    #[arg(long)]
    k: Option<usize>,
    /// Rooted walks per node [default: 10]
    #[arg(long)]
    m: Option<usize>,
    /// Rooted walk length [default: 40]
    #[arg(long)]
    l: Option<usize>,
    /// Co-occurrence window [default: 5]
    #[arg(long)]
    window: Option<usize>,
    /// Negatives per positive [default: 5]
    #[arg(long)]
    neg_k: Option<usize>,
    /// Generator activation: tanh, elu or identity [default: tanh]
    #[arg(long)]
    activation: Option<String>,
    /// Worker cap; 1 = deterministic mode [default: 1]
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct TrainArgsCli {
    /// Edge list: `src<TAB>dst[<TAB>weight]`, `#` comments
    #[arg(long)]
    edges: PathBuf,
    /// Node content: `id<TAB>v1,...,vf` or sparse with `#sparse f=<dim>`
    #[arg(long)]
    features: PathBuf,
    /// Optional labels: `id<TAB>class`, `#multilabel` header for class sets
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Output model file
    #[arg(long)]
    out_model: PathBuf,
    /// Output embedding file (`id<TAB>v1,...,vd`)
    #[arg(long)]
    out_emb: PathBuf,
    /// Training log CSV (`epoch,mean_loss,elapsed_ms`); stdout if omitted
    #[arg(long)]
    out_log: Option<PathBuf>,
    /// Rolling training checkpoint (includes the auxiliary table)
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Optimizer steps between checkpoints [default: 0 = off]
    #[arg(long)]
    checkpoint_every: Option<usize>,
    #[command(flatten)]
    hyper: HyperOverrides,
}

#[derive(Args, Debug)]
struct InferArgs {
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    features: PathBuf,
    /// `all`, a comma-separated id list, or `@file` with one id per line
    #[arg(long)]
    nodes: String,
    /// Output embedding file
    #[arg(long)]
    out: PathBuf,
    /// Featurization seed [default: the seed stored in the model]
    #[arg(long)]
    seed: Option<u64>,
    /// Worker cap; 1 = deterministic mode [default: 1]
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct FeaturesArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Output descriptor dump (`id<TAB>src:val,...`)
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    hyper: HyperOverrides,
}

#[derive(Args, Debug)]
struct EvalClassifyArgs {
    /// Embedding file produced by `train` or `infer`
    #[arg(long)]
    emb: PathBuf,
    /// Label file covering the embedded nodes
    #[arg(long)]
    labels: PathBuf,
    /// Fraction of labeled nodes used for classifier training, in (0,1]
    #[arg(long, default_value_t = 0.3)]
    train_frac: f64,
    /// Stratified split repetitions [default: 10]
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// L2 penalty of the logistic probe
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
}

#[derive(Args, Debug)]
struct EvalMirrorArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    features: PathBuf,
    /// Two-column CSV dump (`kind,distance`) of the distributions
    #[arg(long)]
    out_dist: Option<PathBuf>,
    #[command(flatten)]
    hyper: HyperOverrides,
}

#[derive(Args, Debug)]
struct EvalCorrelationArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    features: PathBuf,
    /// Embedding file aligned with the graph's node ids
    #[arg(long)]
    emb: PathBuf,
    #[command(flatten)]
    hyper: HyperOverrides,
}

#[derive(Args, Debug)]
struct PerturbArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Per-edge survival probability in [0,1]
    #[arg(long)]
    survival: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output prefix; writes `<out>.edges.tsv` and `<out>.features.tsv`
    #[arg(long)]
    out: PathBuf,
}

/// Entry point used by `main`; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Train(args) => cmd_train(args),
        Command::Infer(args) => cmd_infer(args),
        Command::Features(args) => cmd_features(args),
        Command::EvalClassify(args) => cmd_eval_classify(args),
        Command::EvalMirror(args) => cmd_eval_mirror(args),
        Command::EvalCorrelation(args) => cmd_eval_correlation(args),
        Command::Perturb(args) => cmd_perturb(args),
    }
}

// ---------------------------------------------------------------------------
// Config resolution
// ---------------------------------------------------------------------------

fn parse_config_file(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: "expected 'key = value'".into(),
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn take_parsed<T: std::str::FromStr>(
    map: &mut HashMap<String, String>,
    key: &str,
    into: &mut T,
) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if let Some(raw) = map.remove(key) {
        *into = raw
            .parse()
            .map_err(|e| Error::validation(format!("config key '{key}': {e}")))?;
    }
    Ok(())
}

fn resolve_train_config(hyper: &HyperOverrides) -> Result<TrainConfig> {
    let mut cfg = TrainConfig::default();

    if let Some(path) = &hyper.config {
        let mut map = parse_config_file(path)?;
        take_parsed(&mut map, "beta", &mut cfg.rpr.beta)?;
        take_parsed(&mut map, "k", &mut cfg.rpr.k)?;
        take_parsed(&mut map, "m", &mut cfg.rpr.m)?;
        take_parsed(&mut map, "l", &mut cfg.rpr.l)?;
        take_parsed(&mut map, "alpha", &mut cfg.sampling.alpha)?;
        take_parsed(&mut map, "window", &mut cfg.sampling.window)?;
        take_parsed(&mut map, "walks_per_node", &mut cfg.sampling.walks_per_node)?;
        take_parsed(&mut map, "walk_len", &mut cfg.sampling.walk_len)?;
        take_parsed(&mut map, "neg_power", &mut cfg.sampling.neg_power)?;
        take_parsed(&mut map, "cand_factor", &mut cfg.sampling.cand_factor)?;
        take_parsed(&mut map, "lambda1", &mut cfg.loss.lambda1)?;
        take_parsed(&mut map, "lambda2", &mut cfg.loss.lambda2)?;
        take_parsed(&mut map, "dim", &mut cfg.d)?;
        take_parsed(&mut map, "epochs", &mut cfg.epochs)?;
        take_parsed(&mut map, "batch_size", &mut cfg.batch_size)?;
        take_parsed(&mut map, "lr", &mut cfg.lr)?;
        take_parsed(&mut map, "seed", &mut cfg.seed)?;
        take_parsed(&mut map, "checkpoint_every", &mut cfg.checkpoint_every)?;
        take_parsed(&mut map, "use_bias", &mut cfg.use_bias)?;
        take_parsed(&mut map, "threads", &mut cfg.threads)?;
        if let Some(raw) = map.remove("neg_k") {
            let v: usize = raw
                .parse()
                .map_err(|e| Error::validation(format!("config key 'neg_k': {e}")))?;
            cfg.sampling.neg_k = v;
            cfg.loss.neg_k = v;
        }
        if let Some(raw) = map.remove("activation") {
            cfg.activation = raw.parse()?;
        }
        if let Some(unknown) = map.keys().next() {
            return Err(Error::validation(format!(
                "unknown config key '{unknown}' in {}",
                path.display()
            )));
        }
    }

    macro_rules! apply {
        ($field:expr, $opt:expr) => {
            if let Some(v) = $opt {
                $field = v;
            }
        };
    }
    apply!(cfg.seed, hyper.seed);
    apply!(cfg.d, hyper.dim);
    apply!(cfg.epochs, hyper.epochs);
    apply!(cfg.batch_size, hyper.batch_size);
    apply!(cfg.lr, hyper.lr);
    apply!(cfg.sampling.alpha, hyper.alpha);
    apply!(cfg.loss.lambda1, hyper.lambda1);
    apply!(cfg.loss.lambda2, hyper.lambda2);
    apply!(cfg.rpr.beta, hyper.beta);
    apply!(cfg.rpr.k, hyper.k);
    apply!(cfg.rpr.m, hyper.m);
    apply!(cfg.rpr.l, hyper.l);
    apply!(cfg.sampling.window, hyper.window);
    apply!(cfg.threads, hyper.threads);
    if let Some(v) = hyper.neg_k {
        cfg.sampling.neg_k = v;
        cfg.loss.neg_k = v;
    }
    if let Some(raw) = &hyper.activation {
        cfg.activation = raw.parse()?;
    }
    cfg.rpr.seed = cfg.seed;
    cfg.validate()?;
    Ok(cfg)
}

fn echo_config(cfg: &TrainConfig) {
    eprintln!("# resolved configuration");
    eprintln!("beta = {}", cfg.rpr.beta);
    eprintln!("k = {}", cfg.rpr.k);
    eprintln!("m = {}", cfg.rpr.m);
    eprintln!("l = {}", cfg.rpr.l);
    eprintln!("alpha = {}", cfg.sampling.alpha);
    eprintln!("window = {}", cfg.sampling.window);
    eprintln!("walks_per_node = {}", cfg.sampling.walks_per_node);
    eprintln!("walk_len = {}", cfg.sampling.walk_len);
    eprintln!("neg_k = {}", cfg.sampling.neg_k);
    eprintln!("neg_power = {}", cfg.sampling.neg_power);
    eprintln!("cand_factor = {}", cfg.sampling.cand_factor);
    eprintln!("lambda1 = {}", cfg.loss.lambda1);
    eprintln!("lambda2 = {}", cfg.loss.lambda2);
    eprintln!("dim = {}", cfg.d);
    eprintln!("epochs = {}", cfg.epochs);
    eprintln!("batch_size = {}", cfg.batch_size);
    eprintln!("lr = {}", cfg.lr);
    eprintln!("seed = {}", cfg.seed);
    eprintln!("checkpoint_every = {}", cfg.checkpoint_every);
    eprintln!("activation = {}", cfg.activation.name());
    eprintln!("use_bias = {}", cfg.use_bias);
    eprintln!("threads = {}", cfg.threads);
}

fn setup_threads(threads: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_train(args: TrainArgsCli) -> Result<()> {
    let mut cfg = resolve_train_config(&args.hyper)?;
    if let Some(every) = args.checkpoint_every {
        cfg.checkpoint_every = every;
    }
    echo_config(&cfg);
    setup_threads(cfg.threads);

    let g: Graph<Scalar> = graph::load_graph(&args.edges, &args.features, args.labels.as_deref())?;
    eprintln!(
        "loaded graph: {} nodes, {} edges, content dim {}",
        g.num_nodes(),
        g.num_edges(),
        g.content_dim()
    );

    let out = train_with_checkpoints(&g, &cfg, args.checkpoint.as_deref())?;
    save_model(&out.model, None, &args.out_model)?;

    let emb = generate_all(&out.model.params, &out.feats, &g)?;
    let names: Vec<String> = (0..g.num_nodes()).map(|v| g.name(v).to_string()).collect();
    export_embeddings(&names, &emb, &args.out_emb)?;

    match &args.out_log {
        Some(path) => write_log_csv(&out.log, path)?,
        None => {
            println!("epoch,mean_loss,elapsed_ms");
            for row in &out.log {
                println!("{},{},{}", row.epoch, row.mean_loss, row.elapsed_ms);
            }
        }
    }
    eprintln!(
        "wrote model to {} and embeddings to {}",
        args.out_model.display(),
        args.out_emb.display()
    );
    Ok(())
}

fn parse_node_selection<T: crate::Real>(g: &Graph<T>, spec: &str) -> Result<Vec<NodeId>> {
    if spec == "all" {
        return Ok((0..g.num_nodes()).collect());
    }
    let names: Vec<String> = if let Some(path) = spec.strip_prefix('@') {
        std::fs::read_to_string(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect()
    } else {
        spec.split(',').map(|s| s.trim().to_string()).collect()
    };
    names
        .iter()
        .map(|name| {
            g.node_id(name)
                .ok_or_else(|| Error::validation(format!("unknown node '{name}'")))
        })
        .collect()
}

fn cmd_infer(args: InferArgs) -> Result<()> {
    setup_threads(args.threads.unwrap_or(1));
    let (model, _) = load_model::<Scalar>(&args.model)?;
    let g: Graph<Scalar> = graph::load_graph(&args.edges, &args.features, None)?;
    let nodes = parse_node_selection(&g, &args.nodes)?;
    let seed = args.seed.unwrap_or(model.rpr.seed);
    eprintln!(
        "# resolved configuration\nmodel = {}\nseed = {}\nnodes = {}",
        args.model.display(),
        seed,
        nodes.len()
    );
    let emb = infer(&model, &g, &nodes, seed)?;
    let names: Vec<String> = nodes.iter().map(|&v| g.name(v).to_string()).collect();
    export_embeddings(&names, &emb, &args.out)?;
    eprintln!("wrote {} embeddings to {}", nodes.len(), args.out.display());
    Ok(())
}

fn cmd_features(args: FeaturesArgs) -> Result<()> {
    let cfg = resolve_train_config(&args.hyper)?;
    echo_config(&cfg);
    setup_threads(cfg.threads);
    let g: Graph<Scalar> = graph::load_graph_structure(&args.edges)?;
    let feats = all_structural_features(&g, &cfg.rpr, cfg.rpr.seed);
    write_feature_dump(&g, &feats, &args.out)?;
    eprintln!(
        "wrote descriptors for {} nodes to {}",
        g.num_nodes(),
        args.out.display()
    );
    Ok(())
}

fn cmd_eval_classify(args: EvalClassifyArgs) -> Result<()> {
    eprintln!(
        "# resolved configuration\ntrain_frac = {}\nrepeats = {}\nseed = {}\nl2 = {}",
        args.train_frac, args.repeats, args.seed, args.l2
    );
    let (names, emb) = load_embeddings::<Scalar>(&args.emb)?;
    let labels = graph::load_label_file(&args.labels, &names)?;
    let labeled: Vec<usize> = labels.labeled_nodes().collect();
    if labeled.len() < names.len() {
        eprintln!(
            "note: {} of {} embedded nodes are labeled; evaluating on those",
            labeled.len(),
            names.len()
        );
    }
    let x = Mat::from_rows(labeled.iter().map(|&i| emb.row(i).to_vec()).collect())?;
    let targets: Vec<Vec<usize>> = labeled
        .iter()
        .map(|&i| labels.classes_of(i).expect("labeled").to_vec())
        .collect();
    if args.train_frac >= 1.0 {
        eprintln!("warning: --train-frac 1.0 reports training-set metrics only");
    }
    let lr_cfg = LogRegConfig {
        l2: args.l2,
        ..LogRegConfig::default()
    };
    let eval = evaluate_split_protocol(
        &x,
        &targets,
        labels.num_classes(),
        labels.is_multilabel(),
        args.train_frac,
        args.repeats,
        args.seed,
        &lr_cfg,
    )?;

    println!("repeat,accuracy,micro_f1,macro_f1");
    for (i, r) in eval.per_repeat.iter().enumerate() {
        println!("{},{},{},{}", i, r.accuracy, r.micro_f1, r.macro_f1);
    }
    println!();
    println!("metric      mean");
    println!("accuracy    {:.4} +/- {:.4}", eval.mean.accuracy, eval.accuracy_std);
    println!("micro-F1    {:.4}", eval.mean.micro_f1);
    println!("macro-F1    {:.4}", eval.mean.macro_f1);
    Ok(())
}

fn cmd_eval_mirror(args: EvalMirrorArgs) -> Result<()> {
    let cfg = resolve_train_config(&args.hyper)?;
    echo_config(&cfg);
    setup_threads(cfg.threads);
    let g: Graph<Scalar> = graph::load_graph(&args.edges, &args.features, None)?;
    let dist = mirror_experiment(&g, |union| {
        let out = train(union, &cfg)?;
        generate_all(&out.model.params, &out.feats, union)
    })?;
    println!("mirrored_pairs,{}", dist.p_m.len());
    println!("connected_pairs,{}", dist.p_a.len());
    println!("mean_mirror_distance,{}", dist.mean_m);
    println!("mean_connected_distance,{}", dist.mean_a);
    println!("ratio,{}", dist.ratio);
    if let Some(path) = &args.out_dist {
        let mut out = String::from("kind,distance\n");
        for d in &dist.p_m {
            out.push_str(&format!("m,{d}\n"));
        }
        for d in &dist.p_a {
            out.push_str(&format!("a,{d}\n"));
        }
        graph::write_atomic(path, &out)?;
        eprintln!("wrote distance distributions to {}", path.display());
    }
    Ok(())
}

fn cmd_eval_correlation(args: EvalCorrelationArgs) -> Result<()> {
    let cfg = resolve_train_config(&args.hyper)?;
    echo_config(&cfg);
    setup_threads(cfg.threads);
    let g: Graph<Scalar> = graph::load_graph(&args.edges, &args.features, None)?;
    let (names, emb_rows) = load_embeddings::<Scalar>(&args.emb)?;
    // Align embedding rows with dense node ids.
    let mut by_node: Vec<Option<Vec<Scalar>>> = vec![None; g.num_nodes()];
    for (name, row) in names.iter().zip(emb_rows.iter_rows()) {
        let v = g
            .node_id(name)
            .ok_or_else(|| Error::validation(format!("embedding for unknown node '{name}'")))?;
        by_node[v] = Some(row.to_vec());
    }
    let rows: Vec<Vec<Scalar>> = by_node
        .into_iter()
        .enumerate()
        .map(|(v, r)| {
            r.ok_or_else(|| {
                Error::validation(format!("node '{}' has no embedding row", g.name(v)))
            })
        })
        .collect::<Result<_>>()?;
    let emb = Mat::from_rows(rows)?;
    let feats = all_structural_features(&g, &cfg.rpr, cfg.rpr.seed);
    let (r, rho) = structural_correlation(&g, &feats, &emb)?;
    println!("pearson,{r}");
    println!("spearman,{rho}");
    Ok(())
}

fn cmd_perturb(args: PerturbArgs) -> Result<()> {
    eprintln!(
        "# resolved configuration\nsurvival = {}\nseed = {}",
        args.survival, args.seed
    );
    if !(0.0..=1.0).contains(&args.survival) {
        return Err(Error::validation(format!(
            "survival must be in [0,1], got {}",
            args.survival
        )));
    }
    let g: Graph<Scalar> = graph::load_graph(&args.edges, &args.features, args.labels.as_deref())?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let p = perturb_network(&g, args.survival, &mut rng)?;

    let prefix = args.out.to_string_lossy();
    let edges_path = PathBuf::from(format!("{prefix}.edges.tsv"));
    let feats_path = PathBuf::from(format!("{prefix}.features.tsv"));
    p.save_edges(&edges_path)?;
    p.save_features(&feats_path)?;
    if args.labels.is_some() {
        let labels_path = PathBuf::from(format!("{prefix}.labels.tsv"));
        p.save_labels(&labels_path)?;
        eprintln!("wrote {labels_path:?}");
    }
    println!("edges_before,{}", g.num_edges());
    println!("edges_after,{}", p.num_edges());
    eprintln!("wrote {edges_path:?} and {feats_path:?}");
    Ok(())
}
