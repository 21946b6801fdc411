// Temporary tuning harness; deleted before finalizing.
use strucembed::eval::{evaluate_split_protocol, inductive_classification, labeled_targets, LogRegConfig};
use strucembed::eval::structural_correlation;
use strucembed::linalg::Mat;
use strucembed::model::LossConfig;
use strucembed::sampling::SamplingConfig;
use strucembed::structfeat::RprConfig;
use strucembed::synth;
use strucembed::trainer::{generate_all, train, TrainConfig};

fn probe_config() -> TrainConfig {
    TrainConfig {
        d: 64,
        epochs: 80,
        batch_size: 32,
        lr: 0.025,
        seed: 1,
        rpr: RprConfig {
            k: 16,
            m: 40,
            l: 40,
            ..RprConfig::default()
        },
        sampling: SamplingConfig::default(),
        loss: LossConfig::default(),
        ..TrainConfig::default()
    }
}

#[test]
#[ignore]
fn probe_classification() {
    let lr_cfg = LogRegConfig::default();
    let g = synth::planted_partition::<f64>(&synth::PlantedPartition::default(), 99);
    let (nodes, targets, n_classes, multi) = labeled_targets(&g).unwrap();
    assert_eq!(nodes.len(), g.num_nodes());

    // Raw-feature baseline.
    let raw = Mat::from_rows((0..g.num_nodes()).map(|v| g.content_row(v).to_vec()).collect()).unwrap();
    let raw_eval = evaluate_split_protocol(&raw, &targets, n_classes, multi, 0.3, 10, 7, &lr_cfg).unwrap();
    println!("raw-feature LR:  {:.4} +/- {:.4}", raw_eval.mean.accuracy, raw_eval.accuracy_std);

    // Embeddings.
    let t0 = std::time::Instant::now();
    let cfg = probe_config();
    let out = train(&g, &cfg).unwrap();
    println!("train took {:?}; loss {:.4} -> {:.4}", t0.elapsed(), out.log[0].mean_loss, out.log.last().unwrap().mean_loss);
    let emb = generate_all(&out.model.params, &out.feats, &g).unwrap();
    let emb_eval = evaluate_split_protocol(&emb, &targets, n_classes, multi, 0.3, 10, 7, &lr_cfg).unwrap();
    println!("embedding LR:    {:.4} +/- {:.4}", emb_eval.mean.accuracy, emb_eval.accuracy_std);

    // Inductive.
    let t1 = std::time::Instant::now();
    let mut accs = Vec::new();
    for rep in 0..3 {
        let r = inductive_classification(&g, &cfg, 0.2, &lr_cfg, 1000 + rep).unwrap();
        accs.push(r.accuracy);
    }
    println!("inductive (3 reps): {:?} ({:?})", accs, t1.elapsed());
}

fn one_hot_graph(n: usize, attach: usize, seed: u64) -> strucembed::Graph64 {
    use strucembed::graph::{Graph, GraphParts};
    let g = synth::preferential_attachment::<f64>(n, attach, 1, seed);
    let mut content = Mat::zeros(n, n);
    for v in 0..n {
        content.set(v, v, 1.0);
    }
    let edges: Vec<_> = g.edges().collect();
    Graph::from_parts(GraphParts {
        edges,
        content,
        labels: None,
        names: None,
    })
    .unwrap()
}

#[test]
#[ignore]
fn probe_correlation() {
    for (tag, d, epochs, lr, alpha, one_hot, n) in [
        ("base", 64usize, 80usize, 0.025f64, 0.5f64, false, 60usize),
        ("long", 32, 400, 0.05, 0.8, false, 60),
        ("onehot", 32, 400, 0.05, 0.8, true, 60),
        ("onehot-big", 32, 300, 0.05, 0.8, true, 120),
    ] {
        let mut wins = 0;
        let mut rhos = Vec::new();
        let t0 = std::time::Instant::now();
        for seed in 0..10u64 {
            let g = if one_hot {
                one_hot_graph(n, 2, 500 + seed)
            } else {
                synth::preferential_attachment::<f64>(n, 2, 16, 500 + seed)
            };
            let mut cfg = probe_config();
            cfg.d = d;
            cfg.epochs = epochs;
            cfg.lr = lr;
            cfg.sampling.alpha = alpha;
            cfg.seed = 900 + seed;
            let out = train(&g, &cfg).unwrap();
            let emb = generate_all(&out.model.params, &out.feats, &g).unwrap();
            let (_, rho) = structural_correlation(&g, &out.feats, &emb).unwrap();
            rhos.push((rho * 1000.0).round() / 1000.0);
            if rho > 0.2 {
                wins += 1;
            }
        }
        println!("{tag}: wins {wins}/10 rhos {rhos:?} ({:?})", t0.elapsed());
    }
}
