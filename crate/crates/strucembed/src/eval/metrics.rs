//! Classification metrics and rank correlation.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Report {
    pub accuracy: f64,
    pub micro_f1: f64,
    pub macro_f1: f64,
}

/// Accuracy (exact match), micro-F1 and macro-F1 over predicted/true class
/// sets. Macro-F1 averages per-class F1 across all `num_classes` classes,
/// with zero-support classes contributing 0.
pub fn classification_report(
    pred: &[Vec<usize>],
    truth: &[Vec<usize>],
    num_classes: usize,
) -> Result<Report> {
    if pred.is_empty() || pred.len() != truth.len() {
        return Err(Error::validation(format!(
            "prediction/truth length mismatch or empty ({} vs {})",
            pred.len(),
            truth.len()
        )));
    }
    let mut exact = 0usize;
    let mut tp = vec![0usize; num_classes];
    let mut fp = vec![0usize; num_classes];
    let mut fnc = vec![0usize; num_classes];
    for (p, t) in pred.iter().zip(truth) {
        if p == t {
            exact += 1;
        }
        for &c in p {
            if t.contains(&c) {
                tp[c] += 1;
            } else {
                fp[c] += 1;
            }
        }
        for &c in t {
            if !p.contains(&c) {
                fnc[c] += 1;
            }
        }
    }
    let accuracy = exact as f64 / pred.len() as f64;

    let (tp_all, fp_all, fn_all) = (
        tp.iter().sum::<usize>() as f64,
        fp.iter().sum::<usize>() as f64,
        fnc.iter().sum::<usize>() as f64,
    );
    let micro_f1 = if tp_all + fp_all + fn_all == 0.0 {
        0.0
    } else {
        2.0 * tp_all / (2.0 * tp_all + fp_all + fn_all)
    };

    let mut macro_sum = 0.0;
    for c in 0..num_classes {
        let denom = 2.0 * tp[c] as f64 + fp[c] as f64 + fnc[c] as f64;
        if denom > 0.0 {
            macro_sum += 2.0 * tp[c] as f64 / denom;
        }
    }
    let macro_f1 = macro_sum / num_classes as f64;

    Ok(Report {
        accuracy,
        micro_f1,
        macro_f1,
    })
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::validation("need at least 2 paired observations"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined(
            "correlation undefined for zero-variance series".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Average ranks, ties sharing the mean of their positions (1-based).
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite values"));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    pearson(&ranks(xs), &ranks(ys))
}
