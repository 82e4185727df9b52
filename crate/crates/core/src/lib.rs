//! Class-separability analysis that pairs leading eigenvectors of the data
//! covariance with leading eigenvectors of a trained network's input-space
//! loss curvature, plus the evaluation harness around it.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod linalg;
pub mod nn;
pub mod projection;
pub mod separability;

pub use curvature::{
    curvature_matrix, eigenspectrum_report, fisher_matrix, CurvatureMatrix, CurvatureMethod, InputLoss,
    SpectrumReport,
};
pub use data::{load_csv, make_folds, Dataset, FoldPlan, LoadOptions, MissingPolicy, NormalizationParams};
pub use error::{Error, Result};
pub use evaluation::{cross_validate, CvConfig, CvReport, LinearSvm, Method, MetricsReport, SvmConfig};
pub use linalg::{covariance, sym_eigen, EigenDecomposition, Matrix, VarianceBias};
pub use nn::{train, MlpModel, Optimizer, TrainConfig, TrainReport};
pub use projection::{build_basis, combination_grid, project, ProjectedData, ProjectionBasis};
pub use separability::{isotropy_report, separability_stats, IsotropyReport, SeparabilityCell};
