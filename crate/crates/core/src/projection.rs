//! Two-column bases pairing a covariance eigenvector with a curvature
//! eigenvector, projection of data onto them, and the grid of all pairings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::default_feature_names;
use crate::error::{Error, Result};
use crate::linalg::{abs_cosine, EigenDecomposition, Matrix};
use crate::separability::{separability_stats, SeparabilityCell};

/// Bases whose columns have `|cos| > COLLINEAR_COSINE` are flagged as degenerate.
pub const COLLINEAR_COSINE: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionBasis {
    pub cov_vector: Vec<f64>,
    pub hess_vector: Vec<f64>,
    /// 1-based position in the descending covariance spectrum.
    pub cov_index: usize,
    /// 1-based position in the descending curvature spectrum.
    pub hess_index: usize,
}

impl ProjectionBasis {
    pub fn dim(&self) -> usize {
        self.cov_vector.len()
    }

    pub fn collinearity(&self) -> f64 {
        abs_cosine(&self.cov_vector, &self.hess_vector)
    }

    pub fn is_degenerate(&self) -> bool {
        self.collinearity() > COLLINEAR_COSINE
    }

    /// `D × 2` matrix `[cov_vector, hess_vector]`.
    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_columns(&[&self.cov_vector, &self.hess_vector]).expect("basis columns have equal length")
    }
}

/// Selects the `cov_index`-th covariance and `hess_index`-th curvature eigenvector (1-based).
pub fn build_basis(
    cov_eig: &EigenDecomposition,
    hess_eig: &EigenDecomposition,
    cov_index: usize,
    hess_index: usize,
) -> Result<ProjectionBasis> {
    if cov_eig.dim() != hess_eig.dim() {
        return Err(Error::dims(format!("curvature of dimension {}", cov_eig.dim()), hess_eig.dim()));
    }
    let d = cov_eig.dim();
    for index in [cov_index, hess_index] {
        if index == 0 || index > d {
            return Err(Error::IndexOutOfRange { index, dim: d });
        }
    }
    Ok(ProjectionBasis {
        cov_vector: cov_eig.vector(cov_index - 1),
        hess_vector: hess_eig.vector(hess_index - 1),
        cov_index,
        hess_index,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedData {
    /// `n × 2`: column 0 along the covariance vector, column 1 along the curvature vector.
    pub points: Matrix,
    pub labels: Vec<u8>,
    pub basis: ProjectionBasis,
}

impl ProjectedData {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,label\n");
        for (r, l) in self.points.row_iter().zip(&self.labels) {
            s.push_str(&format!(
                "{},{},{l}\n",
                crate::curvature::fmt_f64(r[0]),
                crate::curvature::fmt_f64(r[1])
            ));
        }
        s
    }
}

/// `X · U` on the raw rows of `x`.
pub fn project(x: &Matrix, labels: &[u8], basis: &ProjectionBasis) -> Result<ProjectedData> {
    project_centered(x, labels, basis, None)
}

/// `(X − 1 cᵀ) · U`; centering shifts every projected point by the same
/// offset, so class-mean distances and variances are unchanged.
pub fn project_centered(
    x: &Matrix,
    labels: &[u8],
    basis: &ProjectionBasis,
    center: Option<&[f64]>,
) -> Result<ProjectedData> {
    let d = basis.dim();
    if x.cols() != d {
        return Err(Error::dims(format!("{d} columns"), x.cols()));
    }
    if labels.len() != x.rows() {
        return Err(Error::LengthMismatch { left: x.rows(), right: labels.len() });
    }
    if let Some(c) = center {
        if c.len() != d {
            return Err(Error::dims(format!("center of length {d}"), c.len()));
        }
    }
    let mut points = Matrix::zeros(x.rows(), 2);
    let mut buf = vec![0.0; d];
    for (i, r) in x.row_iter().enumerate() {
        let row: &[f64] = match center {
            Some(c) => {
                for ((b, v), m) in buf.iter_mut().zip(r).zip(c) {
                    *b = v - m;
                }
                &buf
            }
            None => r,
        };
        points[(i, 0)] = crate::linalg::dot(row, &basis.cov_vector);
        points[(i, 1)] = crate::linalg::dot(row, &basis.hess_vector);
    }
    Ok(ProjectedData { points, labels: labels.to_vec(), basis: basis.clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub projection: ProjectedData,
    pub stats: SeparabilityCell,
}

/// Every pairing of the leading `max_i` covariance and `max_j` curvature
/// eigenvectors, ordered row-major by `(i, j)`.
pub fn combination_grid(
    x: &Matrix,
    labels: &[u8],
    cov_eig: &EigenDecomposition,
    hess_eig: &EigenDecomposition,
    max_i: usize,
    max_j: usize,
) -> Result<Vec<GridCell>> {
    let d = cov_eig.dim();
    for m in [max_i, max_j] {
        if m == 0 || m > d {
            return Err(Error::IndexOutOfRange { index: m, dim: d });
        }
    }
    let center = x.column_means();
    let pairs: Vec<(usize, usize)> = (1..=max_i).flat_map(|i| (1..=max_j).map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let basis = build_basis(cov_eig, hess_eig, i, j)?;
            let projection = project_centered(x, labels, &basis, Some(&center))?;
            let stats = separability_stats(&projection)?;
            Ok(GridCell { projection, stats })
        })
        .collect()
}

/// `(name, |component|)` sorted by decreasing magnitude; ties keep feature order.
pub fn parameter_contributions(vector: &[f64], names: &[String]) -> Vec<(String, f64)> {
    let names = if names.len() == vector.len() { names.to_vec() } else { default_feature_names(vector.len()) };
    let mut out: Vec<(String, f64)> = names.into_iter().zip(vector.iter().map(|v| v.abs())).collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}
