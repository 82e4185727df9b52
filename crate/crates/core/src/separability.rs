//! Separation and compactness statistics on projected data, class-level
//! isotropy diagnostics, and numeric checks of the identities that tie
//! covariance eigenvectors to class-mean separation.
//!
//! All variances here use the population (divide-by-`n`) convention.

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::data::{apply_zscore, fit_zscore, Dataset};
use crate::error::{Error, Result};
use crate::linalg::{abs_cosine, covariance, dot, norm, Matrix, VarianceBias};
use crate::projection::ProjectedData;

/// Statistics of one projection.
///
/// `d_squared` is measured along the covariance coordinate and
/// `within_variance_sum` along the curvature coordinate, so a grid row shares
/// its `d_squared` and a grid column shares its `within_variance_sum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityCell {
    pub cov_index: usize,
    pub hess_index: usize,
    pub d_squared: f64,
    pub within_variance_sum: f64,
    /// `d_squared / within_variance_sum`; absent when the denominator is zero.
    pub lda_ratio: Option<f64>,
    /// Set when the denominator is zero and `d_squared > 0`: the ratio is unbounded.
    pub lda_ratio_unbounded: bool,
}

/// Population mean and variance.
pub fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let v = values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, v)
}

fn split_by_class(values: &[f64], labels: &[u8]) -> (Vec<f64>, Vec<f64>) {
    let mut c0 = Vec::new();
    let mut c1 = Vec::new();
    for (&v, &l) in values.iter().zip(labels) {
        if l == 1 {
            c1.push(v);
        } else {
            c0.push(v);
        }
    }
    (c0, c1)
}

pub fn separability_stats(proj: &ProjectedData) -> Result<SeparabilityCell> {
    if proj.points.cols() != 2 || proj.points.rows() != proj.labels.len() {
        return Err(Error::dims("n x 2 points with n labels", format!("{:?}", proj.points.shape())));
    }
    let (a0, a1) = split_by_class(&proj.points.column(0), &proj.labels);
    if a0.is_empty() || a1.is_empty() {
        return Err(Error::SingleClass);
    }
    let (b0, b1) = split_by_class(&proj.points.column(1), &proj.labels);
    let d = mean_var(&a0).0 - mean_var(&a1).0;
    let d_squared = d * d;
    let within_variance_sum = mean_var(&b0).1 + mean_var(&b1).1;
    let (lda_ratio, lda_ratio_unbounded) = if within_variance_sum > 0.0 {
        (Some(d_squared / within_variance_sum), false)
    } else {
        (None, d_squared > 0.0)
    };
    Ok(SeparabilityCell {
        cov_index: proj.basis.cov_index,
        hess_index: proj.basis.hess_index,
        d_squared,
        within_variance_sum,
        lda_ratio,
        lda_ratio_unbounded,
    })
}

/// Terms of `σ² = d² / (4(1 − λ))` for two equal-size one-dimensional classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverallVarianceIdentity {
    pub overall_variance: f64,
    pub mean_distance: f64,
    pub lambda: f64,
    /// `|σ² − d² / (4(1 − λ))|`
    pub residual: f64,
}

/// `(Σx, Σ(x − c)²)` in double-double precision, `c` the f64 sample mean.
/// Only exact-to-double-double operations are used (no division); an error
/// `e` in `c` perturbs the sum of squares by `n·e²`, far below f64 roundoff.
fn sums_dd(values: &[f64]) -> (TwoFloat, TwoFloat) {
    let c = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().fold((TwoFloat::from(0.0), TwoFloat::from(0.0)), |(s, q), &x| {
        let d = TwoFloat::from(x) - c;
        (s + x, q + d * d)
    })
}

/// `1 − λ` cancels catastrophically when the class means nearly coincide,
/// so it is formed as `(Q − Q₁ − Q₂)/Q` from double-double sums of squares;
/// in plain f64 the residual would carry roundoff of order `ε·σ⁴/d²`.
pub fn theorem1_check(class1: &[f64], class2: &[f64]) -> Result<OverallVarianceIdentity> {
    if class1.len() != class2.len() {
        return Err(Error::LengthMismatch { left: class1.len(), right: class2.len() });
    }
    if class1.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = class1.len() as f64;
    let all: Vec<f64> = class1.iter().chain(class2).copied().collect();
    let (_, q) = sums_dd(&all);
    if !(q.hi() > 0.0) {
        return Err(Error::ZeroOverallVariance);
    }
    let (s1, q1) = sums_dd(class1);
    let (s2, q2) = sums_dd(class2);
    // 4(1 − λ)σ² = 2(Q − Q₁ − Q₂)/n
    let between = q - q1 - q2;
    if between.hi() == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let ds = s2 - s1;
    let overall = q.hi() / (2.0 * n);
    let ratio = (ds * ds).hi() / (between * (2.0 * n)).hi();
    Ok(OverallVarianceIdentity {
        overall_variance: overall,
        mean_distance: ds.hi().abs() / n,
        lambda: 1.0 - between.hi() / q.hi(),
        residual: overall * (1.0 - ratio).abs(),
    })
}

/// `(σ²_{Y₂}/σ²_{Y₁}, σ²_{X₂}/σ²_{X₁})` for 1-D subsets embedded as `(x, 0)`
/// and projected onto the unit vector `v`.
pub fn vrpt_check(points1: &[f64], points2: &[f64], v: [f64; 2]) -> Result<(f64, f64)> {
    if (norm(&v) - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("projection vector {v:?} is not unit length")));
    }
    if v[0] == 0.0 {
        return Err(Error::DegenerateProjection);
    }
    let project = |pts: &[f64]| -> Vec<f64> { pts.iter().map(|&x| dot(&[x, 0.0], &v)).collect() };
    let (_, x1) = mean_var(points1);
    let (_, x2) = mean_var(points2);
    let (_, y1) = mean_var(&project(points1));
    let (_, y2) = mean_var(&project(points2));
    if !(x1 > 0.0) || !(y1 > 0.0) {
        return Err(Error::ZeroOverallVariance);
    }
    Ok((y2 / y1, x2 / x1))
}

/// Residual of the mean-difference eigen-equation for the analytically
/// assembled covariance `S = ½σ₁²I + ½σ₂²I + ¼ΔμΔμᵀ`:
/// `‖SΔμ − (½σ₁² + ½σ₂² + ¼d²)Δμ‖ / ‖Δμ‖`.
pub fn meanvec_eigen_check(mu1: &[f64], mu2: &[f64], var1: f64, var2: f64) -> Result<f64> {
    if mu1.len() != mu2.len() {
        return Err(Error::LengthMismatch { left: mu1.len(), right: mu2.len() });
    }
    let delta: Vec<f64> = mu1.iter().zip(mu2).map(|(a, b)| a - b).collect();
    let dn = norm(&delta);
    if dn == 0.0 {
        return Err(Error::ZeroMeanDifference);
    }
    let d = delta.len();
    let mut s = Matrix::from_diag(&vec![0.5 * var1 + 0.5 * var2; d]);
    s.add_outer(0.25, &delta, &delta);
    let sd = s.mat_vec(&delta)?;
    let eigenvalue = 0.5 * var1 + 0.5 * var2 + 0.25 * dn * dn;
    let r: Vec<f64> = sd.iter().zip(&delta).map(|(a, b)| a - eigenvalue * b).collect();
    Ok(norm(&r) / dn)
}

/// `|cos(S Δμ, Δμ)|` with `S` the population covariance of the pooled samples.
pub fn sampled_meanvec_alignment(class1: &Matrix, class2: &Matrix) -> Result<f64> {
    if class1.cols() != class2.cols() {
        return Err(Error::dims(format!("{} columns", class1.cols()), class2.cols()));
    }
    let mut rows: Vec<&[f64]> = class1.row_iter().collect();
    rows.extend(class2.row_iter());
    let pooled = Matrix::from_rows(&rows)?;
    let s = covariance(&pooled, VarianceBias::Population)?;
    let delta: Vec<f64> = class1.column_means().iter().zip(class2.column_means()).map(|(a, b)| a - b).collect();
    if norm(&delta) == 0.0 {
        return Err(Error::ZeroMeanDifference);
    }
    Ok(abs_cosine(&s.mat_vec(&delta)?, &delta))
}

/// Within-class variances before and after z-scoring the pooled 1-D data,
/// alongside the predicted values `σ_w² / σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZscoreScaling {
    pub normalized: [f64; 2],
    pub predicted: [f64; 2],
}

impl ZscoreScaling {
    pub fn max_error(&self) -> f64 {
        (self.normalized[0] - self.predicted[0]).abs().max((self.normalized[1] - self.predicted[1]).abs())
    }
}

pub fn zscore_scaling_check(class1: &[f64], class2: &[f64]) -> Result<ZscoreScaling> {
    let values: Vec<f64> = class1.iter().chain(class2).copied().collect();
    let labels: Vec<u8> = (0..values.len()).map(|i| u8::from(i >= class1.len())).collect();
    let n = values.len();
    let data = Dataset::new(Matrix::from_vec(n, 1, values.clone())?, labels, vec!["x".into()])?;
    let z = apply_zscore(&data, &fit_zscore(&data)?)?;
    let zc = z.features.column(0);
    let (_, overall) = mean_var(&values);
    let (_, v1) = mean_var(class1);
    let (_, v2) = mean_var(class2);
    let (_, z1) = mean_var(&zc[..class1.len()]);
    let (_, z2) = mean_var(&zc[class1.len()..]);
    Ok(ZscoreScaling { normalized: [z1, z2], predicted: [v1 / overall, v2 / overall] })
}

/// Summary of the absolute within-class covariance of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassIsotropy {
    pub class: u8,
    pub n_samples: usize,
    pub avg_abs_diagonal: f64,
    pub avg_abs_offdiagonal: f64,
    /// Largest over smallest diagonal entry.
    pub diag_uniformity: f64,
    /// `avg_abs_offdiagonal / avg_abs_diagonal`; zero for a perfectly isotropic class.
    pub isotropy_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotropyReport {
    pub classes: Vec<ClassIsotropy>,
}

pub fn isotropy_report(data: &Dataset) -> Result<IsotropyReport> {
    if !data.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let classes = [0u8, 1]
        .iter()
        .map(|&c| class_isotropy(&data.class_features(c), c))
        .collect::<Result<Vec<_>>>()?;
    Ok(IsotropyReport { classes })
}

fn class_isotropy(x: &Matrix, class: u8) -> Result<ClassIsotropy> {
    let s = covariance(x, VarianceBias::Population)?;
    let d = s.rows();
    let diag: Vec<f64> = s.diagonal().iter().map(|v| v.abs()).collect();
    let avg_abs_diagonal = diag.iter().sum::<f64>() / d as f64;
    let off_total: f64 = (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| s[(i, j)].abs())
        .sum();
    let avg_abs_offdiagonal = if d > 1 { off_total / (d * (d - 1)) as f64 } else { 0.0 };
    let max_d = diag.iter().copied().fold(0.0, f64::max);
    let min_d = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let diag_uniformity = if min_d > 0.0 { max_d / min_d } else { f64::MAX };
    let isotropy_score = if avg_abs_diagonal > 0.0 { avg_abs_offdiagonal / avg_abs_diagonal } else { 0.0 };
    Ok(ClassIsotropy {
        class,
        n_samples: x.rows(),
        avg_abs_diagonal,
        avg_abs_offdiagonal,
        diag_uniformity,
        isotropy_score,
    })
}
