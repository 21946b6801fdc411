//! Evaluation harness: one-vs-rest logistic-regression node classification
//! with transductive and inductive split protocols, plus the structural
//! identity experiments.

pub mod experiments;
pub mod logreg;
pub mod metrics;

pub use experiments::{
    mirror_experiment, mirror_matched_features, mirror_union, perturb_network,
    structural_correlation, DistanceDistributions,
};
pub use logreg::{fit_logreg, ClassifierParams, LogRegConfig};
pub use metrics::{classification_report, pearson, spearman, Report};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::linalg::Mat;
use crate::real::Real;
use crate::trainer::{infer, train, TrainConfig};

/// Per-repeat reports plus their mean.
#[derive(Debug, Clone)]
pub struct SplitEvaluation {
    pub per_repeat: Vec<Report>,
    pub mean: Report,
    pub accuracy_std: f64,
}

pub fn mean_report(reports: &[Report]) -> Report {
    let n = reports.len().max(1) as f64;
    Report {
        accuracy: reports.iter().map(|r| r.accuracy).sum::<f64>() / n,
        micro_f1: reports.iter().map(|r| r.micro_f1).sum::<f64>() / n,
        macro_f1: reports.iter().map(|r| r.macro_f1).sum::<f64>() / n,
    }
}

/// Stratified train/test split over sample indices; every class keeps at
/// least one training example. `train_frac = 1.0` puts everything in train.
pub fn stratified_split<R: rand::Rng + ?Sized>(
    targets: &[Vec<usize>],
    num_classes: usize,
    train_frac: f64,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes];
    for (i, t) in targets.iter().enumerate() {
        // multi-label samples are stratified by their first class
        by_class[t[0]].push(i);
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in by_class.iter_mut() {
        if members.is_empty() {
            continue;
        }
        members.shuffle(rng);
        let take = ((members.len() as f64 * train_frac).round() as usize)
            .clamp(1, members.len());
        train.extend_from_slice(&members[..take]);
        test.extend_from_slice(&members[take..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Repeated stratified-split classification on fixed embeddings: fit on the
/// train rows, score on the held-out rows. With `train_frac = 1.0` the
/// held-out set is empty and training-set metrics are reported (with a
/// warning), matching the boundary semantics of the CLI.
pub fn evaluate_split_protocol<T: Real>(
    x: &Mat<T>,
    targets: &[Vec<usize>],
    num_classes: usize,
    multilabel: bool,
    train_frac: f64,
    repeats: usize,
    seed: u64,
    cfg: &LogRegConfig,
) -> Result<SplitEvaluation> {
    if x.rows() != targets.len() {
        return Err(Error::Shape(format!(
            "{} embedding rows vs {} labeled samples",
            x.rows(),
            targets.len()
        )));
    }
    if !(train_frac > 0.0 && train_frac <= 1.0) {
        return Err(Error::validation(format!(
            "train fraction must be in (0,1], got {train_frac}"
        )));
    }
    if repeats == 0 {
        return Err(Error::validation("repeats must be >= 1"));
    }

    let take_rows = |idx: &[usize]| -> Result<Mat<T>> {
        Mat::from_rows(idx.iter().map(|&i| x.row(i).to_vec()).collect())
    };
    let take_targets =
        |idx: &[usize]| -> Vec<Vec<usize>> { idx.iter().map(|&i| targets[i].clone()).collect() };

    let mut per_repeat = Vec::with_capacity(repeats);
    let mut warned = false;
    for r in 0..repeats {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let (train_idx, test_idx) = stratified_split(targets, num_classes, train_frac, &mut rng);
        let params = fit_logreg(
            &take_rows(&train_idx)?,
            &take_targets(&train_idx),
            num_classes,
            multilabel,
            cfg,
        )?;
        let (eval_idx, on_train) = if test_idx.is_empty() {
            (&train_idx, true)
        } else {
            (&test_idx, false)
        };
        if on_train && !warned {
            eprintln!("warning: empty held-out split; reporting training-set metrics");
            warned = true;
        }
        let pred = params.predict(&take_rows(eval_idx)?);
        per_repeat.push(classification_report(
            &pred,
            &take_targets(eval_idx),
            num_classes,
        )?);
    }

    let mean = mean_report(&per_repeat);
    let var = per_repeat
        .iter()
        .map(|r| (r.accuracy - mean.accuracy).powi(2))
        .sum::<f64>()
        / per_repeat.len() as f64;
    Ok(SplitEvaluation {
        per_repeat,
        mean,
        accuracy_std: var.sqrt(),
    })
}

/// Labeled node ids and their class sets, for feeding graph labels into the
/// classifier.
pub fn labeled_targets<T: Real>(
    g: &Graph<T>,
) -> Result<(Vec<NodeId>, Vec<Vec<usize>>, usize, bool)> {
    let ls = g
        .labels()
        .ok_or_else(|| Error::validation("graph has no labels"))?;
    let nodes: Vec<NodeId> = ls.labeled_nodes().collect();
    if nodes.is_empty() {
        return Err(Error::validation("no labeled nodes"));
    }
    let targets = nodes
        .iter()
        .map(|&v| ls.classes_of(v).expect("listed as labeled").to_vec())
        .collect();
    Ok((nodes, targets, ls.num_classes(), ls.is_multilabel()))
}

/// Inductive protocol: remove a stratified fraction of labeled nodes, train
/// on the remaining subgraph, featurize the removed nodes on the full graph
/// at inference, and classify them against a probe fit on the kept nodes.
pub fn inductive_classification<T: Real>(
    g: &Graph<T>,
    tcfg: &TrainConfig,
    remove_frac: f64,
    lr_cfg: &LogRegConfig,
    seed: u64,
) -> Result<Report> {
    if !(remove_frac > 0.0 && remove_frac < 1.0) {
        return Err(Error::validation(format!(
            "removal fraction must be in (0,1), got {remove_frac}"
        )));
    }
    let (nodes, targets, num_classes, multilabel) = labeled_targets(g)?;
    if nodes.len() != g.num_nodes() {
        return Err(Error::validation(
            "inductive protocol expects a fully labeled graph",
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (keep_pos, removed_pos) =
        stratified_split(&targets, num_classes, 1.0 - remove_frac, &mut rng);
    let keep: Vec<NodeId> = keep_pos.iter().map(|&p| nodes[p]).collect();
    let removed: Vec<NodeId> = removed_pos.iter().map(|&p| nodes[p]).collect();
    if removed.is_empty() {
        return Err(Error::validation("removal fraction removed no nodes"));
    }

    let (sub, _) = g.induced_subgraph(&keep)?;
    let out = train(&sub, tcfg)?;

    // Inference featurizes on the full graph, test nodes included.
    let all: Vec<NodeId> = (0..g.num_nodes()).collect();
    let emb = infer(&out.model, g, &all, seed ^ 0x5eed_1234)?;

    let rows_of = |ids: &[NodeId]| -> Result<Mat<T>> {
        Mat::from_rows(ids.iter().map(|&v| emb.row(v).to_vec()).collect())
    };
    let targets_of = |pos: &[usize]| -> Vec<Vec<usize>> {
        pos.iter().map(|&p| targets[p].clone()).collect()
    };
    let probe = fit_logreg(
        &rows_of(&keep)?,
        &targets_of(&keep_pos),
        num_classes,
        multilabel,
        lr_cfg,
    )?;
    let pred = probe.predict(&rows_of(&removed)?);
    classification_report(&pred, &targets_of(&removed_pos), num_classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn stratified_split_keeps_class_coverage() {
        let targets: Vec<Vec<usize>> = (0..30).map(|i| vec![i % 3]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (train, test) = stratified_split(&targets, 3, 0.3, &mut rng);
        assert_eq!(train.len() + test.len(), 30);
        for c in 0..3 {
            assert!(train.iter().any(|&i| targets[i][0] == c));
        }
        assert_eq!(train.len(), 9);
    }

    #[test]
    fn full_train_fraction_reports_training_metrics() {
        let x = Mat::from_rows(vec![vec![-1.0], vec![-0.9], vec![1.0], vec![1.1]]).unwrap();
        let targets = vec![vec![0], vec![0], vec![1], vec![1]];
        let eval = evaluate_split_protocol(
            &x,
            &targets,
            2,
            false,
            1.0,
            3,
            9,
            &LogRegConfig::default(),
        )
        .unwrap();
        assert_eq!(eval.mean.accuracy, 1.0);
    }

    #[test]
    fn split_protocol_separable_embeddings() {
        // 3 well-separated clusters in 2D; any split should classify well.
        let mut rows = Vec::new();
        let mut targets = Vec::new();
        for c in 0..3 {
            for i in 0..10 {
                let jitter = (i as f64) * 0.01;
                rows.push(vec![c as f64 * 5.0 + jitter, -(c as f64) * 3.0 + jitter]);
                targets.push(vec![c]);
            }
        }
        let x = Mat::from_rows(rows).unwrap();
        let eval =
            evaluate_split_protocol(&x, &targets, 3, false, 0.3, 5, 11, &LogRegConfig::default())
                .unwrap();
        assert!(eval.mean.accuracy > 0.95, "{:?}", eval.mean);
        // single-label multiclass: micro-F1 is accuracy
        for r in &eval.per_repeat {
            assert!((r.micro_f1 - r.accuracy).abs() < 1e-12);
        }
    }

    #[test]
    fn labeled_targets_extracts_classes() {
        let g = synth::clique_bridge::<f64>(4, 3, 1);
        let (nodes, targets, n_classes, multi) = labeled_targets(&g).unwrap();
        assert_eq!(nodes.len(), 9);
        assert_eq!(n_classes, 2);
        assert!(!multi);
        assert!(targets.iter().all(|t| t.len() == 1));
    }
}
