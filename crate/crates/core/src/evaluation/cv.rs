use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{fmt_f64, CurvatureMethod};
use crate::data::{apply_zscore, fit_zscore, Dataset, FoldPlan, NormalizationParams};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::nn::{layer_dims_for, train, MlpModel, TrainConfig, DEFAULT_HIDDEN};

use super::baseline::{run_baseline, FittedBases, Method};
use super::metrics::MetricsReport;
use super::svm::{LinearSvm, SvmConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub methods: Vec<Method>,
    /// `train.seed` is the base seed; fold `f` uses `seed + f` for the
    /// network initialization, its batch order and the SVM shuffle.
    pub train: TrainConfig,
    pub hidden: [usize; 3],
    pub curvature: CurvatureMethod,
    pub svm: SvmConfig,
    /// Retain projected train/test points in the report (for plotting).
    pub keep_projections: bool,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            methods: Method::ALL.to_vec(),
            train: TrainConfig::default(),
            hidden: DEFAULT_HIDDEN,
            curvature: CurvatureMethod::default(),
            svm: SvmConfig::default(),
            keep_projections: false,
        }
    }
}

/// One method on one fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodFold {
    pub method: Method,
    pub fold: usize,
    pub metrics: MetricsReport,
    pub train_metrics: MetricsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<Matrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svm: Option<LinearSvm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svm_initial_objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svm_final_objective: Option<f64>,
    #[serde(skip)]
    pub train_points: Option<Matrix>,
    #[serde(skip)]
    pub test_points: Option<Matrix>,
}

/// Everything fitted on one fold's training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldTrace {
    pub fold: usize,
    pub seed: u64,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub normalization: NormalizationParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dnn_final_loss: Option<f64>,
    #[serde(skip)]
    pub model: Option<MlpModel>,
    #[serde(skip)]
    pub bases: Option<FittedBases>,
    #[serde(skip)]
    pub train_labels: Vec<u8>,
    #[serde(skip)]
    pub test_labels: Vec<u8>,
    pub methods: Vec<MethodFold>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct MetricSummary {
    pub f1: f64,
    pub roc_auc: f64,
    pub cohen_kappa: f64,
    pub accuracy: f64,
    pub geometric_mean: f64,
}

impl MetricSummary {
    fn fields(m: &MetricsReport) -> [f64; 5] {
        [m.f1, m.roc_auc, m.cohen_kappa, m.accuracy, m.geometric_mean]
    }

    fn from_fields(v: [f64; 5]) -> Self {
        MetricSummary { f1: v[0], roc_auc: v[1], cohen_kappa: v[2], accuracy: v[3], geometric_mean: v[4] }
    }

    fn as_fields(&self) -> [f64; 5] {
        [self.f1, self.roc_auc, self.cohen_kappa, self.accuracy, self.geometric_mean]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub method: Method,
    /// Test metrics, one per fold in fold order.
    pub folds: Vec<MetricsReport>,
    pub mean: MetricSummary,
    /// Sample standard deviation across folds.
    pub std: MetricSummary,
}

impl ComparisonResult {
    fn aggregate(method: Method, folds: Vec<MetricsReport>) -> Self {
        let k = folds.len() as f64;
        let mut mean = [0.0; 5];
        for m in &folds {
            for (a, v) in mean.iter_mut().zip(MetricSummary::fields(m)) {
                *a += v;
            }
        }
        mean.iter_mut().for_each(|a| *a /= k);
        let mut var = [0.0; 5];
        for m in &folds {
            for ((a, v), mu) in var.iter_mut().zip(MetricSummary::fields(m)).zip(&mean) {
                *a += (v - mu) * (v - mu);
            }
        }
        let denom = if folds.len() > 1 { k - 1.0 } else { 1.0 };
        let std = var.map(|v| (v / denom).sqrt());
        ComparisonResult { method, folds, mean: MetricSummary::from_fields(mean), std: MetricSummary::from_fields(std) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub methods: Vec<ComparisonResult>,
    pub folds: Vec<FoldTrace>,
}

const CSV_HEADER: &str = "method,fold,f1,roc_auc,cohen_kappa,accuracy,geometric_mean\n";

impl CvReport {
    pub fn method(&self, method: Method) -> Option<&ComparisonResult> {
        self.methods.iter().find(|r| r.method == method)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per method and fold, followed by `mean` and `std` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        let mut row = |method: Method, tag: String, v: [f64; 5]| {
            s.push_str(method.name());
            s.push(',');
            s.push_str(&tag);
            for x in v {
                s.push(',');
                s.push_str(&fmt_f64(x));
            }
            s.push('\n');
        };
        for r in &self.methods {
            for (f, m) in r.folds.iter().enumerate() {
                row(r.method, f.to_string(), MetricSummary::fields(m));
            }
            row(r.method, "mean".into(), r.mean.as_fields());
            row(r.method, "std".into(), r.std.as_fields());
        }
        s
    }
}

fn run_fold(data: &Dataset, plan: &FoldPlan, fold: usize, config: &CvConfig) -> Result<FoldTrace> {
    let (train_rows, test_rows) = plan.split(fold);
    let raw_train = data.subset(&train_rows);
    let normalization = fit_zscore(&raw_train)?;
    let train_set = apply_zscore(&raw_train, &normalization)?;
    let test_set = apply_zscore(&data.subset(&test_rows), &normalization)?;
    let seed = config.train.seed.wrapping_add(fold as u64);

    let mut dnn_final_loss = None;
    let model = if config.methods.iter().any(|m| m.needs_model()) {
        let init = MlpModel::new(&layer_dims_for(data.dim(), &config.hidden), seed)?;
        let train_cfg = TrainConfig { seed, ..config.train.clone() };
        let (model, report) = train(&init, &train_set, &train_cfg)?;
        dnn_final_loss = Some(report.final_loss);
        Some(model)
    } else {
        None
    };
    let bases = FittedBases::fit(&train_set, model.as_ref(), config.curvature, &config.methods)?;

    let mut methods = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let out = run_baseline(method, &train_set, &test_set, model.as_ref(), &bases, &config.svm, seed)?;
        methods.push(MethodFold {
            method,
            fold,
            metrics: out.metrics,
            train_metrics: out.train_metrics,
            directions: out.projector.map(|p| p.directions),
            svm: out.svm,
            svm_initial_objective: out.svm_initial_objective,
            svm_final_objective: out.svm_final_objective,
            train_points: if config.keep_projections { out.train_points } else { None },
            test_points: if config.keep_projections { out.test_points } else { None },
        });
    }
    Ok(FoldTrace {
        fold,
        seed,
        train_rows,
        test_rows,
        normalization,
        dnn_final_loss,
        model,
        bases: Some(bases),
        train_labels: train_set.labels,
        test_labels: test_set.labels,
        methods,
    })
}

/// Per fold: z-score fitted on the training rows → network trained on them
/// (when a method needs it) → bases → projection → SVM → test metrics.
/// Folds run in parallel; results are collected in fold order.
pub fn cross_validate(data: &Dataset, plan: &FoldPlan, config: &CvConfig) -> Result<CvReport> {
    plan.validate(data.n())?;
    if config.methods.is_empty() {
        return Err(Error::InvalidArgument("no methods requested".into()));
    }
    let mut seen = Vec::new();
    for &m in &config.methods {
        if seen.contains(&m) {
            return Err(Error::InvalidArgument(format!("method {m} listed twice")));
        }
        seen.push(m);
    }
    config.train.validate()?;

    let folds: Vec<FoldTrace> =
        (0..plan.k).into_par_iter().map(|f| run_fold(data, plan, f, config)).collect::<Result<_>>()?;

    let methods = config
        .methods
        .iter()
        .enumerate()
        .map(|(i, &m)| ComparisonResult::aggregate(m, folds.iter().map(|t| t.methods[i].metrics).collect()))
        .collect();
    Ok(CvReport { k: plan.k, seed: config.train.seed, stratified: plan.stratified, methods, folds })
}
