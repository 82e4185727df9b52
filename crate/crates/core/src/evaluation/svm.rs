use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig { lambda: 1e-2, epochs: 2000 }
    }
}

/// Primal linear SVM: `sign(w·x + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub lambda: f64,
    pub seed: u64,
    pub trained: bool,
}

fn signed(label: u8) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

impl LinearSvm {
    /// Stochastic subgradient descent on
    /// `(1/n) Σ max(0, 1 − yᵢ(w·xᵢ + b)) + (λ/2)(‖w‖² + b²)` with step `1/(λt)`,
    /// the bias riding along as a constant feature so the problem stays
    /// strongly convex. Sample order is reshuffled every epoch; the returned
    /// solution is the average of the iterates over the second half of the run.
    pub fn train(points: &Matrix, labels: &[u8], config: &SvmConfig, seed: u64) -> Result<Self> {
        if points.rows() != labels.len() {
            return Err(Error::LengthMismatch { left: points.rows(), right: labels.len() });
        }
        if !labels.contains(&0) || !labels.contains(&1) {
            return Err(Error::SingleClass);
        }
        if !(config.lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("SVM lambda {}", config.lambda)));
        }
        let d = points.cols();
        // last slot is the bias
        let mut w = vec![0.0; d + 1];
        let mut avg = vec![0.0; d + 1];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..points.rows()).collect();
        let total = (config.epochs * points.rows()) as u64;
        let burn_in = total / 2;
        let mut t = 0u64;
        for _ in 0..config.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (config.lambda * t as f64);
                let x = points.row(i);
                let y = signed(labels[i]);
                let margin = y * (dot(&w[..d], x) + w[d]);
                let shrink = 1.0 - eta * config.lambda;
                w.iter_mut().for_each(|v| *v *= shrink);
                if margin < 1.0 {
                    for (wj, xj) in w.iter_mut().zip(x) {
                        *wj += eta * y * xj;
                    }
                    w[d] += eta * y;
                }
                if t > burn_in {
                    let k = (t - burn_in) as f64;
                    for (a, v) in avg.iter_mut().zip(&w) {
                        *a += (v - *a) / k;
                    }
                }
            }
        }
        if total == 0 {
            avg = w;
        }
        if !avg.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { context: "SVM weights" });
        }
        let bias = avg.pop().unwrap_or(0.0);
        Ok(LinearSvm { weights: avg, bias, lambda: config.lambda, seed, trained: true })
    }

    pub fn decision_function(&self, x: &[f64]) -> f64 {
        debug_assert!(self.trained);
        dot(&self.weights, x) + self.bias
    }

    pub fn scores(&self, points: &Matrix) -> Vec<f64> {
        points.row_iter().map(|r| self.decision_function(r)).collect()
    }

    /// Class 1 when the decision value is positive.
    pub fn predict(&self, points: &Matrix) -> Vec<u8> {
        self.scores(points).into_iter().map(|s| u8::from(s > 0.0)).collect()
    }

    pub fn objective(&self, points: &Matrix, labels: &[u8]) -> f64 {
        svm_objective(&self.weights, self.bias, self.lambda, points, labels)
    }

    /// Objective of the all-zero starting point.
    pub fn initial_objective(&self, points: &Matrix, labels: &[u8]) -> f64 {
        svm_objective(&vec![0.0; self.weights.len()], 0.0, self.lambda, points, labels)
    }
}

pub(crate) fn svm_objective(w: &[f64], b: f64, lambda: f64, points: &Matrix, labels: &[u8]) -> f64 {
    let hinge: f64 = points
        .row_iter()
        .zip(labels)
        .map(|(x, &l)| (1.0 - signed(l) * (dot(w, x) + b)).max(0.0))
        .sum();
    hinge / points.rows() as f64 + 0.5 * lambda * (dot(w, w) + b * b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn blobs(seed: u64) -> (Matrix, Vec<u8>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..80 {
            let c = (i % 2) as u8;
            let (cx, cy) = if c == 1 { (2.5, 1.0) } else { (-2.5, -1.0) };
            rows.push([cx + rng.random_range(-1.0..1.0), cy + rng.random_range(-1.0..1.0)]);
            labels.push(c);
        }
        (Matrix::from_rows(&rows).unwrap(), labels)
    }

    #[test]
    fn separates_blobs() {
        let (x, y) = blobs(1);
        let svm = LinearSvm::train(&x, &y, &SvmConfig::default(), 4).unwrap();
        assert_eq!(svm.predict(&x), y);
        assert!(svm.objective(&x, &y) <= svm.initial_objective(&x, &y));
    }

    #[test]
    fn identical_points_give_flat_decision() {
        let x = Matrix::from_rows(&[[1.0, 2.0]; 10]).unwrap();
        let y: Vec<u8> = (0..10).map(|i| (i % 2) as u8).collect();
        let svm = LinearSvm::train(&x, &y, &SvmConfig::default(), 2).unwrap();
        assert!(crate::linalg::norm(&svm.weights) < 0.05, "{:?}", svm.weights);
        let p = svm.predict(&x);
        assert!(p.iter().all(|&v| v == p[0]));
    }

    #[test]
    fn label_flip_negates_decision() {
        let (x, y) = blobs(3);
        let flipped: Vec<u8> = y.iter().map(|&l| 1 - l).collect();
        let cfg = SvmConfig { epochs: 200, ..SvmConfig::default() };
        let a = LinearSvm::train(&x, &y, &cfg, 9).unwrap();
        let b = LinearSvm::train(&x, &flipped, &cfg, 9).unwrap();
        for (u, v) in a.weights.iter().zip(&b.weights) {
            assert!((u + v).abs() < 1e-6);
        }
        assert!((a.bias + b.bias).abs() < 1e-6);
    }

    #[test]
    fn rejects_single_class() {
        let x = Matrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert_eq!(LinearSvm::train(&x, &[1, 1], &SvmConfig::default(), 0).unwrap_err(), Error::SingleClass);
    }
}
