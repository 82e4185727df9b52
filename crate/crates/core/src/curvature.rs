//! Curvature of the per-sample loss with respect to the input features.
//!
//! The curvature matrix lives in the same `D`-dimensional space as the data
//! covariance, so its eigenvectors can be paired with covariance eigenvectors
//! to form a projection basis. Two estimators are provided: the empirical
//! Fisher information `(1/n) Σ gᵢ gᵢᵀ` of input gradients, and the averaged
//! input Hessian obtained by central differences of the input gradient.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, EigenDecomposition, Matrix, DEFAULT_EIGEN_TOL};
use crate::nn::{sigmoid, MlpModel, PROB_EPS};

/// A per-sample loss that is differentiable in its input vector.
pub trait InputLoss: Sync {
    fn input_dim(&self) -> usize;
    fn loss(&self, x: &[f64], label: u8) -> Result<f64>;
    fn grad_input(&self, x: &[f64], label: u8) -> Result<Vec<f64>>;
}

impl InputLoss for MlpModel {
    fn input_dim(&self) -> usize {
        MlpModel::input_dim(self)
    }

    fn loss(&self, x: &[f64], label: u8) -> Result<f64> {
        self.sample_loss(x, label)
    }

    fn grad_input(&self, x: &[f64], label: u8) -> Result<Vec<f64>> {
        MlpModel::grad_input(self, x, label)
    }
}

/// Log-loss of a linear logit `wᵀx + b`; its input Hessian is known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticSurrogate {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticSurrogate {
    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(crate::linalg::dot(&self.weights, x) + self.bias)
    }

    /// `p(1 − p) w wᵀ` averaged over the rows of `x`.
    pub fn analytic_hessian(&self, x: &Matrix) -> Matrix {
        let d = self.weights.len();
        let mut h = Matrix::zeros(d, d);
        for r in x.row_iter() {
            let p = self.probability(r);
            h.add_outer(p * (1.0 - p), &self.weights, &self.weights);
        }
        h.scale(1.0 / x.rows() as f64)
    }
}

impl InputLoss for LogisticSurrogate {
    fn input_dim(&self) -> usize {
        self.weights.len()
    }

    fn loss(&self, x: &[f64], label: u8) -> Result<f64> {
        let p = self.probability(x);
        let p = if label == 1 { p } else { 1.0 - p };
        Ok(-p.clamp(PROB_EPS, 1.0 - PROB_EPS).ln())
    }

    fn grad_input(&self, x: &[f64], label: u8) -> Result<Vec<f64>> {
        if x.len() != self.weights.len() {
            return Err(Error::dims(format!("input of length {}", self.weights.len()), x.len()));
        }
        let r = self.probability(x) - f64::from(label);
        Ok(self.weights.iter().map(|w| r * w).collect())
    }
}

/// Negative log-density of a one-dimensional normal `N(mean, std²)` evaluated at `x[0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLikelihood {
    pub mean: f64,
    pub std: f64,
}

impl InputLoss for GaussianLikelihood {
    fn input_dim(&self) -> usize {
        1
    }

    fn loss(&self, x: &[f64], _label: u8) -> Result<f64> {
        let z = (x[0] - self.mean) / self.std;
        Ok(0.5 * z * z + self.std.ln() + 0.5 * (2.0 * std::f64::consts::PI).ln())
    }

    fn grad_input(&self, x: &[f64], _label: u8) -> Result<Vec<f64>> {
        if x.len() != 1 {
            return Err(Error::dims("input of length 1", x.len()));
        }
        Ok(vec![(x[0] - self.mean) / (self.std * self.std)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureMethod {
    #[default]
    Fisher,
    ExactHessian,
}

impl std::str::FromStr for CurvatureMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fisher" => Ok(CurvatureMethod::Fisher),
            "exact_hessian" | "exact-hessian" | "hessian" => Ok(CurvatureMethod::ExactHessian),
            other => Err(Error::InvalidArgument(format!("unknown curvature method `{other}`"))),
        }
    }
}

impl std::fmt::Display for CurvatureMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CurvatureMethod::Fisher => "fisher",
            CurvatureMethod::ExactHessian => "exact_hessian",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureMatrix {
    pub matrix: Matrix,
    pub method: CurvatureMethod,
    pub n_samples: usize,
    /// `‖H − Hᵀ‖_F / ‖H‖_F` before symmetrization (finite-difference Hessian only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub asymmetry: Option<f64>,
}

impl CurvatureMatrix {
    pub fn eigen(&self) -> Result<EigenDecomposition> {
        sym_eigen(&self.matrix, DEFAULT_EIGEN_TOL)
    }

    /// Rows of the matrix as CSV, no header.
    pub fn to_csv(&self) -> String {
        matrix_to_csv(&self.matrix)
    }

    pub fn to_json(&self, eigenvalues: &[f64]) -> Result<String> {
        #[derive(Serialize)]
        struct Export<'a> {
            method: CurvatureMethod,
            n_samples: usize,
            dim: usize,
            eigenvalues: &'a [f64],
            matrix: Vec<&'a [f64]>,
        }
        let export = Export {
            method: self.method,
            n_samples: self.n_samples,
            dim: self.matrix.rows(),
            eigenvalues,
            matrix: self.matrix.row_iter().collect(),
        };
        Ok(serde_json::to_string_pretty(&export)?)
    }
}

/// Formats with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut s = String::new();
    for r in m.row_iter() {
        let line: Vec<String> = r.iter().map(|&v| fmt_f64(v)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

fn check_samples<M: InputLoss + ?Sized>(model: &M, x: &Matrix, labels: &[u8]) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if x.rows() != labels.len() {
        return Err(Error::LengthMismatch { left: x.rows(), right: labels.len() });
    }
    if x.cols() != model.input_dim() {
        return Err(Error::dims(format!("{} features", model.input_dim()), x.cols()));
    }
    Ok(())
}

/// Empirical Fisher information `(1/n) Σ gᵢ gᵢᵀ`, `gᵢ` the input gradient of
/// sample `i`'s negative log-likelihood at its observed label.
pub fn fisher_matrix<M: InputLoss + ?Sized>(model: &M, x: &Matrix, labels: &[u8]) -> Result<CurvatureMatrix> {
    let w = vec![1.0; x.rows()];
    fisher_matrix_weighted(model, x, labels, &w)
}

/// Fisher information as a weighted expectation `Σ wᵢ gᵢ gᵢᵀ / Σ wᵢ`.
pub fn fisher_matrix_weighted<M: InputLoss + ?Sized>(
    model: &M,
    x: &Matrix,
    labels: &[u8],
    weights: &[f64],
) -> Result<CurvatureMatrix> {
    check_samples(model, x, labels)?;
    if weights.len() != x.rows() {
        return Err(Error::LengthMismatch { left: x.rows(), right: weights.len() });
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("weights must have positive sum".into()));
    }
    // gradients in parallel, reduction in ascending sample order
    let grads = (0..x.rows())
        .into_par_iter()
        .map(|i| model.grad_input(x.row(i), labels[i]))
        .collect::<Result<Vec<_>>>()?;
    let d = x.cols();
    let mut f = Matrix::zeros(d, d);
    for (g, &w) in grads.iter().zip(weights) {
        f.add_outer(w, g, g);
    }
    f.scale_in_place(1.0 / total);
    let f = f.symmetrized()?;
    if !f.is_finite() {
        return Err(Error::NonFiniteCurvature);
    }
    Ok(CurvatureMatrix { matrix: f, method: CurvatureMethod::Fisher, n_samples: x.rows(), asymmetry: None })
}

/// Finite-difference step per sample: `h = rel · (1 + ‖x‖∞)`.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

/// Input Hessian averaged over samples, column `j` of sample `i` being
/// `[g(xᵢ + h eⱼ) − g(xᵢ − h eⱼ)] / 2h`, then symmetrized.
pub fn exact_input_hessian<M: InputLoss + ?Sized>(
    model: &M,
    x: &Matrix,
    labels: &[u8],
    relative_step: f64,
) -> Result<CurvatureMatrix> {
    check_samples(model, x, labels)?;
    if !(relative_step > 0.0) {
        return Err(Error::InvalidArgument(format!("step {relative_step}")));
    }
    let d = x.cols();
    let per_sample = (0..x.rows())
        .into_par_iter()
        .map(|i| {
            let xi = x.row(i);
            let h = relative_step * (1.0 + xi.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
            let mut hs = Matrix::zeros(d, d);
            let mut probe = xi.to_vec();
            for j in 0..d {
                probe[j] = xi[j] + h;
                let up = model.grad_input(&probe, labels[i])?;
                probe[j] = xi[j] - h;
                let dn = model.grad_input(&probe, labels[i])?;
                probe[j] = xi[j];
                for k in 0..d {
                    hs[(k, j)] = (up[k] - dn[k]) / (2.0 * h);
                }
            }
            Ok(hs)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut h = Matrix::zeros(d, d);
    for hs in &per_sample {
        h = h.add(hs)?;
    }
    h.scale_in_place(1.0 / x.rows() as f64);
    if !h.is_finite() {
        return Err(Error::NonFiniteCurvature);
    }
    let asymmetry = h.asymmetry();
    Ok(CurvatureMatrix {
        matrix: h.symmetrized()?,
        method: CurvatureMethod::ExactHessian,
        n_samples: x.rows(),
        asymmetry: Some(asymmetry),
    })
}

pub fn curvature_matrix<M: InputLoss + ?Sized>(
    model: &M,
    x: &Matrix,
    labels: &[u8],
    method: CurvatureMethod,
) -> Result<CurvatureMatrix> {
    match method {
        CurvatureMethod::Fisher => fisher_matrix(model, x, labels),
        CurvatureMethod::ExactHessian => exact_input_hessian(model, x, labels, DEFAULT_RELATIVE_STEP),
    }
}

/// Gauss–Hermite rule for expectations under the standard normal
/// (Golub–Welsch on the probabilists' Hermite recurrence). Exact for
/// polynomials of degree up to `2n − 1`.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
    }
    let mut j = Matrix::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        j[(k - 1, k)] = b;
        j[(k, k - 1)] = b;
    }
    let e = sym_eigen(&j, DEFAULT_EIGEN_TOL)?;
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = e.eigenvectors[(0, k)];
            (e.eigenvalues[k], v0 * v0)
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(rule.into_iter().unzip())
}

/// Fisher information of a normal likelihood in its location, as the
/// expectation of the squared score under the likelihood itself.
pub fn gaussian_fisher(likelihood: &GaussianLikelihood, nodes: usize) -> Result<f64> {
    let (z, w) = gauss_hermite(nodes)?;
    let points: Vec<f64> = z.iter().map(|z| likelihood.mean + likelihood.std * z).collect();
    let x = Matrix::from_vec(points.len(), 1, points)?;
    let labels = vec![0; x.rows()];
    let f = fisher_matrix_weighted(likelihood, &x, &labels, &w)?;
    Ok(f.matrix[(0, 0)])
}

/// Eigenvalue dominance diagnostics for a spectrum sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    /// `log10 λₖ − log10 λₖ₊₁` over the leading run of positive eigenvalues.
    pub log10_gaps: Vec<f64>,
    /// `λ₁ / λ₂`; absent when `λ₂ ≤ 0`.
    pub dominance_ratio: Option<f64>,
    /// `λ₁ / λ₂ ≥ 10` (true when `λ₂ ≤ 0`).
    pub first_eigenvalue_dominant: bool,
    /// `λ₁` and `λ₂` fall in different decades (`⌊log10 λ₁⌋ > ⌊log10 λ₂⌋`).
    pub leading_decade_separated: bool,
}

pub const DOMINANCE_THRESHOLD: f64 = 10.0;

pub fn eigenspectrum_report(decomp: &EigenDecomposition) -> Result<SpectrumReport> {
    let ev = &decomp.eigenvalues;
    let l1 = ev.first().copied().unwrap_or(0.0);
    if !(l1 > 0.0) {
        return Err(Error::NonPositiveLeadingEigenvalue(l1));
    }
    let log10_gaps = ev
        .windows(2)
        .take_while(|w| w[1] > 0.0)
        .map(|w| w[0].log10() - w[1].log10())
        .collect();
    let l2 = ev.get(1).copied();
    let (dominance_ratio, dominant, decades) = match l2 {
        Some(l2) if l2 > 0.0 => {
            let r = l1 / l2;
            (Some(r), r >= DOMINANCE_THRESHOLD, l1.log10().floor() > l2.log10().floor())
        }
        _ => (None, true, true),
    };
    Ok(SpectrumReport {
        eigenvalues: ev.clone(),
        log10_gaps,
        dominance_ratio,
        first_eigenvalue_dominant: dominant,
        leading_decade_separated: decades,
    })
}

/// One eigenvalue per line, with its 1-based index.
pub fn spectrum_csv(eigenvalues: &[f64]) -> String {
    let mut s = String::from("index,eigenvalue\n");
    for (k, v) in eigenvalues.iter().enumerate() {
        s.push_str(&format!("{},{}\n", k + 1, fmt_f64(*v)));
    }
    s
}
