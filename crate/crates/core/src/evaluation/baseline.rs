use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_matrix, CurvatureMethod};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{canonicalize_sign, covariance, norm, solve_spd, sym_eigen, EigenDecomposition, Matrix, VarianceBias, DEFAULT_EIGEN_TOL};
use crate::nn::MlpModel;

use super::metrics::{metrics, MetricsReport};
use super::svm::{LinearSvm, SvmConfig};

/// Ridge added to the within-class scatter before solving for the LDA direction.
pub const LDA_RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Proposed,
    Pca,
    Lda,
    HessianOnly,
    DnnFull,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Proposed, Method::Pca, Method::Lda, Method::HessianOnly, Method::DnnFull];

    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Pca => "pca",
            Method::Lda => "lda",
            Method::HessianOnly => "hessian_only",
            Method::DnnFull => "dnn_full",
        }
    }

    pub fn needs_model(self) -> bool {
        matches!(self, Method::Proposed | Method::HessianOnly | Method::DnnFull)
    }

    fn needs_covariance(self) -> bool {
        matches!(self, Method::Proposed | Method::Pca)
    }

    fn needs_curvature(self) -> bool {
        matches!(self, Method::Proposed | Method::HessianOnly)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

/// Eigenbases fitted once per training set and shared by the methods that need them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedBases {
    pub center: Vec<f64>,
    pub covariance: Option<EigenDecomposition>,
    pub curvature: Option<EigenDecomposition>,
}

impl FittedBases {
    pub fn fit(
        train: &Dataset,
        model: Option<&MlpModel>,
        curvature: CurvatureMethod,
        methods: &[Method],
    ) -> Result<Self> {
        if train.n() == 0 {
            return Err(Error::EmptyDataset);
        }
        let covariance = if methods.iter().any(|m| m.needs_covariance()) {
            Some(sym_eigen(&covariance(&train.features, VarianceBias::Population)?, DEFAULT_EIGEN_TOL)?)
        } else {
            None
        };
        let curvature = if methods.iter().any(|m| m.needs_curvature()) {
            let model = model.ok_or_else(|| Error::MissingModel("curvature basis".into()))?;
            Some(curvature_matrix(model, &train.features, &train.labels, curvature)?.eigen()?)
        } else {
            None
        };
        Ok(FittedBases { center: train.features.column_means(), covariance, curvature })
    }
}

/// Affine map `x ↦ (x − center)ᵀ · directions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projector {
    pub method: Method,
    /// `D × d`, one unit column per output axis.
    pub directions: Matrix,
    pub center: Vec<f64>,
}

impl Projector {
    pub fn output_dim(&self) -> usize {
        self.directions.cols()
    }

    pub fn project(&self, x: &Matrix) -> Result<Matrix> {
        if x.cols() != self.directions.rows() {
            return Err(Error::dims(format!("{} columns", self.directions.rows()), x.cols()));
        }
        let mut centered = x.clone();
        for i in 0..centered.rows() {
            for (v, c) in centered.row_mut(i).iter_mut().zip(&self.center) {
                *v -= c;
            }
        }
        centered.matmul(&self.directions)
    }
}

fn leading_columns(eig: &EigenDecomposition, k: usize) -> Result<Vec<Vec<f64>>> {
    if eig.dim() < k {
        return Err(Error::IndexOutOfRange { index: k, dim: eig.dim() });
    }
    Ok((0..k).map(|i| eig.vector(i)).collect())
}

/// Unit Fisher discriminant `S_w⁻¹(μ₁ − μ₀)` with `S_w` the summed class scatter.
pub fn lda_direction(train: &Dataset) -> Result<Vec<f64>> {
    if !train.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let d = train.dim();
    let mut sw = Matrix::zeros(d, d);
    let mut means = Vec::with_capacity(2);
    for class in [0u8, 1] {
        let xc = train.class_features(class);
        let mu = xc.column_means();
        let mut diff = vec![0.0; d];
        for r in xc.row_iter() {
            for ((t, v), m) in diff.iter_mut().zip(r).zip(&mu) {
                *t = v - m;
            }
            sw.add_outer(1.0, &diff, &diff);
        }
        means.push(mu);
    }
    for i in 0..d {
        sw[(i, i)] += LDA_RIDGE;
    }
    let delta: Vec<f64> = means[1].iter().zip(&means[0]).map(|(a, b)| a - b).collect();
    if norm(&delta) == 0.0 {
        return Err(Error::ZeroMeanDifference);
    }
    let mut w = solve_spd(&sw, &delta)?;
    let n = norm(&w);
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::SingularScatterMatrix);
    }
    w.iter_mut().for_each(|v| *v /= n);
    canonicalize_sign(&mut w);
    Ok(w)
}

/// Projection for `method` fitted on `train`. `DnnFull` has no projection.
pub fn fit_projector(method: Method, train: &Dataset, bases: &FittedBases) -> Result<Projector> {
    let columns = match method {
        Method::Pca => leading_columns(require(&bases.covariance, "covariance")?, 2)?,
        Method::HessianOnly => leading_columns(require(&bases.curvature, "curvature")?, 2)?,
        Method::Proposed => vec![
            require(&bases.covariance, "covariance")?.vector(0),
            require(&bases.curvature, "curvature")?.vector(0),
        ],
        Method::Lda => vec![lda_direction(train)?],
        Method::DnnFull => {
            return Err(Error::InvalidArgument("dnn_full classifies in the full feature space".into()))
        }
    };
    Ok(Projector { method, directions: Matrix::from_columns(&columns)?, center: bases.center.clone() })
}

fn require<'a>(slot: &'a Option<EigenDecomposition>, what: &str) -> Result<&'a EigenDecomposition> {
    slot.as_ref().ok_or_else(|| Error::MissingModel(format!("{what} basis not fitted")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineOutcome {
    pub method: Method,
    pub projector: Option<Projector>,
    pub svm: Option<LinearSvm>,
    /// Metrics on the test set.
    pub metrics: MetricsReport,
    /// Metrics on the training set the classifier was fitted on.
    pub train_metrics: MetricsReport,
    pub svm_initial_objective: Option<f64>,
    pub svm_final_objective: Option<f64>,
    #[serde(skip)]
    pub train_points: Option<Matrix>,
    #[serde(skip)]
    pub test_points: Option<Matrix>,
}

/// Fits `method` on `train` only and scores it on `test`. Projection methods
/// feed a linear SVM; `DnnFull` thresholds the network output at 0.5.
pub fn run_baseline(
    method: Method,
    train: &Dataset,
    test: &Dataset,
    model: Option<&MlpModel>,
    bases: &FittedBases,
    svm_config: &SvmConfig,
    seed: u64,
) -> Result<BaselineOutcome> {
    if train.dim() != test.dim() {
        return Err(Error::dims(format!("{} test features", train.dim()), test.dim()));
    }
    if method == Method::DnnFull {
        let model = model.ok_or_else(|| Error::MissingModel(method.name().into()))?;
        let score = |d: &Dataset| -> Result<MetricsReport> {
            let p = model.predict_proba(&d.features)?;
            let pred: Vec<u8> = p.iter().map(|&v| u8::from(v > 0.5)).collect();
            metrics(&pred, &p, &d.labels)
        };
        return Ok(BaselineOutcome {
            method,
            projector: None,
            svm: None,
            metrics: score(test)?,
            train_metrics: score(train)?,
            svm_initial_objective: None,
            svm_final_objective: None,
            train_points: None,
            test_points: None,
        });
    }
    if method.needs_model() && model.is_none() {
        return Err(Error::MissingModel(method.name().into()));
    }
    let projector = fit_projector(method, train, bases)?;
    let train_points = projector.project(&train.features)?;
    let test_points = projector.project(&test.features)?;
    let svm = LinearSvm::train(&train_points, &train.labels, svm_config, seed)?;
    let metrics_test = metrics(&svm.predict(&test_points), &svm.scores(&test_points), &test.labels)?;
    let metrics_train = metrics(&svm.predict(&train_points), &svm.scores(&train_points), &train.labels)?;
    Ok(BaselineOutcome {
        method,
        svm_initial_objective: Some(svm.initial_objective(&train_points, &train.labels)),
        svm_final_objective: Some(svm.objective(&train_points, &train.labels)),
        projector: Some(projector),
        svm: Some(svm),
        metrics: metrics_test,
        train_metrics: metrics_train,
        train_points: Some(train_points),
        test_points: Some(test_points),
    })
}
