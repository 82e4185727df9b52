//! Linear-SVM evaluation of projections, classification metrics, projection
//! baselines and the cross-validated comparison harness.

mod baseline;
mod cv;
mod metrics;
mod svm;

pub use baseline::{fit_projector, lda_direction, run_baseline, BaselineOutcome, FittedBases, Method, Projector, LDA_RIDGE};
pub use cv::{cross_validate, CvConfig, CvReport, ComparisonResult, FoldTrace, MethodFold, MetricSummary};
pub use metrics::{metrics, roc_auc, ConfusionMatrix, MetricsReport};
pub use svm::{LinearSvm, SvmConfig};
