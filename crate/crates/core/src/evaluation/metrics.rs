use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn from_predictions(predictions: &[u8], labels: &[u8]) -> Self {
        let mut c = ConfusionMatrix::default();
        for (&p, &l) in predictions.iter().zip(labels) {
            match (p == 1, l == 1) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// F1 of class 1.
    pub fn f1(&self) -> f64 {
        let denom = 2 * self.tp + self.fp + self.fn_;
        if denom == 0 {
            0.0
        } else {
            (2 * self.tp) as f64 / denom as f64
        }
    }

    /// `(pₒ − pₑ) / (1 − pₑ)`, evaluated on integer counts as
    /// `(N·agree − S) / (N² − S)` so round fixtures come out exact.
    pub fn cohen_kappa(&self) -> f64 {
        let n = self.total() as i128;
        let agree = (self.tp + self.tn) as i128;
        let pred_pos = (self.tp + self.fp) as i128;
        let pred_neg = (self.tn + self.fn_) as i128;
        let true_pos = (self.tp + self.fn_) as i128;
        let true_neg = (self.tn + self.fp) as i128;
        let chance = pred_pos * true_pos + pred_neg * true_neg;
        let denom = n * n - chance;
        if denom == 0 {
            // both raters constant and identical
            return if agree == n { 1.0 } else { 0.0 };
        }
        (n * agree - chance) as f64 / denom as f64
    }

    pub fn sensitivity(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn specificity(&self) -> f64 {
        ratio(self.tn, self.tn + self.fp)
    }

    pub fn geometric_mean(&self) -> f64 {
        (self.sensitivity() * self.specificity()).sqrt()
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub f1: f64,
    pub roc_auc: f64,
    pub cohen_kappa: f64,
    pub accuracy: f64,
    pub geometric_mean: f64,
    pub confusion: ConfusionMatrix,
}

/// Area under the ROC curve from the rank-sum statistic, ties sharing their average rank.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch { left: scores.len(), right: labels.len() });
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite { context: "scores" });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut pos_rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their mean
        let avg = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            if labels[k] == 1 {
                pos_rank_sum += avg;
            }
        }
        i = j + 1;
    }
    let u = pos_rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos * n_neg) as f64)
}

/// Threshold metrics from `predictions`, ranking metrics from `scores`.
pub fn metrics(predictions: &[u8], scores: &[f64], labels: &[u8]) -> Result<MetricsReport> {
    if labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch { left: predictions.len(), right: labels.len() });
    }
    let roc_auc = roc_auc(scores, labels)?;
    let c = ConfusionMatrix::from_predictions(predictions, labels);
    Ok(MetricsReport {
        f1: c.f1(),
        roc_auc,
        cohen_kappa: c.cohen_kappa(),
        accuracy: c.accuracy(),
        geometric_mean: c.geometric_mean(),
        confusion: c,
    })
}
