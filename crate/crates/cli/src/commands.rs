use std::fs;
use std::path::{Path, PathBuf};

use covhess_core::curvature::{curvature_matrix, eigenspectrum_report, fmt_f64, spectrum_csv, SpectrumReport};
use covhess_core::data::{apply_zscore, fit_zscore, load_csv, make_folds, NormalizationParams};
use covhess_core::evaluation::{cross_validate, CvConfig, CvReport, LinearSvm, MethodFold};
use covhess_core::linalg::{covariance, sym_eigen, VarianceBias, DEFAULT_EIGEN_TOL};
use covhess_core::nn::{layer_dims_for, train, MlpModel, TrainReport};
use covhess_core::projection::{combination_grid, parameter_contributions, GridCell};
use covhess_core::separability::{isotropy_report, IsotropyReport, SeparabilityCell};
use covhess_core::{Dataset, EigenDecomposition, Error, Matrix, Result};
use serde::Serialize;

use crate::config::RunConfig;
use crate::svg::{bar_chart, Plot, CLASS_COLORS};

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::Io(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write(path, &s)
}

/// The dataset as loaded and after a z-score fitted on all of it.
pub struct Prepared {
    pub raw: Dataset,
    pub normalized: Dataset,
    pub params: NormalizationParams,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let raw = load_csv(cfg.data_path()?, &cfg.load_options())?;
    if !raw.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let params = fit_zscore(&raw)?;
    let normalized = apply_zscore(&raw, &params)?;
    Ok(Prepared { raw, normalized, params })
}

pub fn dataset_to_csv(data: &Dataset, label_column: &str) -> String {
    let mut s = data.feature_names.join(",");
    s.push(',');
    s.push_str(label_column);
    s.push('\n');
    for (r, l) in data.features.row_iter().zip(&data.labels) {
        for v in r {
            s.push_str(&fmt_f64(*v));
            s.push(',');
        }
        s.push_str(&l.to_string());
        s.push('\n');
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct PreprocessSummary {
    pub rows: usize,
    pub features: usize,
    pub class_counts: [usize; 2],
    pub isotropy: IsotropyReport,
}

/// `normalized.csv`, `normalization.json`, `isotropy.json`.
pub fn cmd_preprocess(cfg: &RunConfig) -> Result<PreprocessSummary> {
    let p = prepare(cfg)?;
    let isotropy = isotropy_report(&p.normalized)?;
    let out = &cfg.outdir;
    write(&out.join("normalized.csv"), &dataset_to_csv(&p.normalized, &cfg.data.label_column))?;
    write_json(&out.join("normalization.json"), &p.params)?;
    write_json(&out.join("isotropy.json"), &isotropy)?;
    Ok(PreprocessSummary { rows: p.raw.n(), features: p.raw.dim(), class_counts: p.raw.class_counts, isotropy })
}

#[derive(Debug, Clone, Serialize)]
pub struct Dominance {
    pub covariance: SpectrumReport,
    pub curvature: SpectrumReport,
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub model: MlpModel,
    pub report: TrainReport,
    pub dominance: Dominance,
}

/// Covariance and curvature eigendecompositions on the normalized data.
pub struct Bases {
    pub covariance: EigenDecomposition,
    pub curvature: EigenDecomposition,
}

pub fn fit_bases(cfg: &RunConfig, data: &Dataset, model: &MlpModel) -> Result<(Bases, Matrix)> {
    let cov = sym_eigen(&covariance(&data.features, VarianceBias::Population)?, DEFAULT_EIGEN_TOL)?;
    let curv = curvature_matrix(model, &data.features, &data.labels, cfg.curvature.method)?;
    let eig = curv.eigen()?;
    Ok((Bases { covariance: cov, curvature: eig }, curv.matrix))
}

/// `model.json`, `train_report.json`, `normalization.json`, `spectra/*`, `figures/spectra.svg`.
pub fn cmd_train(cfg: &RunConfig) -> Result<TrainSummary> {
    let p = prepare(cfg)?;
    let tc = cfg.train_config();
    let init = MlpModel::new(&layer_dims_for(p.normalized.dim(), &cfg.nn.hidden), cfg.seed)?;
    let (model, report) = train(&init, &p.normalized, &tc)?;
    let curv = curvature_matrix(&model, &p.normalized.features, &p.normalized.labels, cfg.curvature.method)?;
    let curv_eig = curv.eigen()?;
    let cov_eig = sym_eigen(&covariance(&p.normalized.features, VarianceBias::Population)?, DEFAULT_EIGEN_TOL)?;
    let dominance =
        Dominance { covariance: eigenspectrum_report(&cov_eig)?, curvature: eigenspectrum_report(&curv_eig)? };

    let out = &cfg.outdir;
    write(&out.join("model.json"), &(model.to_json(Some(&tc))? + "\n"))?;
    write_json(&out.join("train_report.json"), &report)?;
    write_json(&out.join("normalization.json"), &p.params)?;
    write(&out.join("spectra/covariance.csv"), &spectrum_csv(&cov_eig.eigenvalues))?;
    write(&out.join("spectra/curvature.csv"), &spectrum_csv(&curv_eig.eigenvalues))?;
    write(&out.join("spectra/curvature_matrix.csv"), &curv.to_csv())?;
    write(&out.join("spectra/curvature.json"), &(curv.to_json(&curv_eig.eigenvalues)? + "\n"))?;
    write_json(&out.join("spectra/dominance.json"), &dominance)?;

    let log_points = |ev: &[f64]| -> Vec<(f64, f64)> {
        ev.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(k, v)| ((k + 1) as f64, v.log10())).collect()
    };
    let mut plot = Plot::new("Eigenspectra", "index", "log10 eigenvalue");
    plot.line(log_points(&cov_eig.eigenvalues), CLASS_COLORS[0], "covariance", false);
    plot.line(log_points(&curv_eig.eigenvalues), CLASS_COLORS[1], &format!("curvature ({})", cfg.curvature.method), false);
    write(&out.join("figures/spectra.svg"), &plot.render())?;

    Ok(TrainSummary { model, report, dominance })
}

pub fn model_path(cfg: &RunConfig, explicit: Option<&Path>) -> PathBuf {
    explicit.map(Path::to_path_buf).unwrap_or_else(|| cfg.outdir.join("model.json"))
}

pub fn load_model(path: &Path, expected_dim: usize) -> Result<MlpModel> {
    let text = fs::read_to_string(path).map_err(|_| Error::MissingModel(path.display().to_string()))?;
    let (model, _) = MlpModel::from_json(&text)?;
    if model.input_dim() != expected_dim {
        return Err(Error::dims(format!("model over {} features", model.input_dim()), expected_dim));
    }
    Ok(model)
}

fn grid_csv(cells: &[&SeparabilityCell], size_j: usize, value: impl Fn(&SeparabilityCell) -> String) -> String {
    let mut s = String::from("cov_index");
    for j in 1..=size_j {
        s.push_str(&format!(",hess_{j}"));
    }
    s.push('\n');
    for row in cells.chunks(size_j) {
        s.push_str(&row[0].cov_index.to_string());
        for c in row {
            s.push(',');
            s.push_str(&value(c));
        }
        s.push('\n');
    }
    s
}

fn lda_ratio_text(c: &SeparabilityCell) -> String {
    match (c.lda_ratio, c.lda_ratio_unbounded) {
        (Some(r), _) => fmt_f64(r),
        (None, true) => "unbounded".into(),
        (None, false) => "undefined".into(),
    }
}

fn class_points(points: &Matrix, labels: &[u8], class: u8, y_of: impl Fn(&[f64]) -> f64) -> Vec<(f64, f64)> {
    points.row_iter().zip(labels).filter(|(_, &l)| l == class).map(|(r, _)| (r[0], y_of(r))).collect()
}

/// Three grid CSVs, per-cell projection CSVs and one scatter SVG per cell.
pub fn cmd_heatmap(cfg: &RunConfig, model: Option<&Path>) -> Result<Vec<SeparabilityCell>> {
    let p = prepare(cfg)?;
    let model = load_model(&model_path(cfg, model), p.normalized.dim())?;
    let (bases, _) = fit_bases(cfg, &p.normalized, &model)?;
    let size = cfg.grid.size;
    let grid: Vec<GridCell> =
        combination_grid(&p.normalized.features, &p.normalized.labels, &bases.covariance, &bases.curvature, size, size)?;
    let cells: Vec<&SeparabilityCell> = grid.iter().map(|g| &g.stats).collect();

    let out = &cfg.outdir;
    write(&out.join("heatmap/d_squared.csv"), &grid_csv(&cells, size, |c| fmt_f64(c.d_squared)))?;
    write(&out.join("heatmap/within_variance.csv"), &grid_csv(&cells, size, |c| fmt_f64(c.within_variance_sum)))?;
    write(&out.join("heatmap/lda_ratio.csv"), &grid_csv(&cells, size, lda_ratio_text))?;
    write_json(&out.join("heatmap/cells.json"), &cells)?;
    for g in &grid {
        let (i, j) = (g.stats.cov_index, g.stats.hess_index);
        write(&out.join(format!("heatmap/projection_{i}_{j}.csv")), &g.projection.to_csv())?;
        let pts = &g.projection.points;
        let labels = &g.projection.labels;
        let mut plot = Plot::new(
            &format!("cov v{i} × curvature v{j}  (LDA ratio {})", lda_ratio_text(&g.stats).chars().take(8).collect::<String>()),
            &format!("covariance eigenvector {i}"),
            &format!("curvature eigenvector {j}"),
        );
        plot.scatter(class_points(pts, labels, 0, |r| r[1]), CLASS_COLORS[0], "class 0");
        plot.scatter(class_points(pts, labels, 1, |r| r[1]), CLASS_COLORS[1], "class 1");
        write(&out.join(format!("figures/projection_{i}_{j}.svg")), &plot.render())?;
    }
    Ok(grid.into_iter().map(|g| g.stats).collect())
}

/// Decision boundary `w·x + b = 0` as a segment spanning the data.
fn boundary(svm: &LinearSvm, points: &Matrix) -> Vec<(f64, f64)> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for r in points.row_iter() {
        for k in 0..2 {
            lo[k] = lo[k].min(r[k]);
            hi[k] = hi[k].max(r[k]);
        }
    }
    let (w, b) = (&svm.weights, svm.bias);
    if w[1].abs() >= w[0].abs() && w[1] != 0.0 {
        let pad = (hi[0] - lo[0]) * 0.1;
        [lo[0] - pad, hi[0] + pad].iter().map(|&x| (x, -(b + w[0] * x) / w[1])).collect()
    } else if w[0] != 0.0 {
        let pad = (hi[1] - lo[1]) * 0.1;
        [lo[1] - pad, hi[1] + pad].iter().map(|&y| (-(b + w[1] * y) / w[0], y)).collect()
    } else {
        Vec::new()
    }
}

fn boundary_plot(mf: &MethodFold, points: &Matrix, labels: &[u8], split: &str, f1: f64) -> Option<String> {
    let svm = mf.svm.as_ref()?;
    let one_d = points.cols() == 1;
    // 1-D projections are drawn with the class as the vertical coordinate
    let y_of = |r: &[f64]| if one_d { 0.0 } else { r[1] };
    let mut plot = Plot::new(
        &format!("{} ({split}, fold {})", mf.method, mf.fold),
        "axis 1",
        if one_d { "class" } else { "axis 2" },
    );
    if one_d {
        plot.scatter(class_points(points, labels, 0, |_| 0.0), CLASS_COLORS[0], "class 0");
        plot.scatter(class_points(points, labels, 1, |_| 1.0), CLASS_COLORS[1], "class 1");
        if svm.weights[0] != 0.0 {
            let x = -svm.bias / svm.weights[0];
            plot.line(vec![(x, -0.5), (x, 1.5)], "black", &format!("SVM, F1 = {f1:.4}"), true);
        }
    } else {
        plot.scatter(class_points(points, labels, 0, y_of), CLASS_COLORS[0], "class 0");
        plot.scatter(class_points(points, labels, 1, y_of), CLASS_COLORS[1], "class 1");
        plot.line(boundary(svm, points), "black", &format!("SVM, F1 = {f1:.4}"), true);
    }
    Some(plot.render())
}

/// `report.json`, `report.csv`, per-method train/test boundary plots for fold 0,
/// and a bar chart of mean F1.
pub fn cmd_compare(cfg: &RunConfig) -> Result<CvReport> {
    let data = load_csv(cfg.data_path()?, &cfg.load_options())?;
    let plan = make_folds(&data, cfg.cv.k, cfg.cv.stratified, cfg.seed)?;
    let cv = CvConfig {
        methods: cfg.methods()?,
        train: cfg.train_config(),
        hidden: cfg.nn.hidden,
        curvature: cfg.curvature.method,
        svm: cfg.svm_config(),
        keep_projections: true,
    };
    let report = cross_validate(&data, &plan, &cv)?;

    let out = &cfg.outdir;
    write(&out.join("report.json"), &(report.to_json()? + "\n"))?;
    write(&out.join("report.csv"), &report.to_csv())?;
    let fold = &report.folds[0];
    for mf in &fold.methods {
        for (split, pts, labels, m) in [
            ("train", &mf.train_points, &fold.train_labels, &mf.train_metrics),
            ("test", &mf.test_points, &fold.test_labels, &mf.metrics),
        ] {
            if let Some(svg) = pts.as_ref().and_then(|p| boundary_plot(mf, p, labels, split, m.f1)) {
                write(&out.join(format!("figures/compare_{}_{split}.svg", mf.method)), &svg)?;
            }
        }
    }
    let bars: Vec<(String, f64)> = report.methods.iter().map(|r| (r.method.to_string(), r.mean.f1)).collect();
    write(&out.join("figures/compare_f1.svg"), &bar_chart(&format!("Mean F1 over {} folds", report.k), &bars))?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct Contributions {
    pub covariance: Vec<(String, f64)>,
    pub curvature: Vec<(String, f64)>,
}

fn contributions_csv(rows: &[(String, f64)]) -> String {
    let mut s = String::from("feature,contribution\n");
    for (name, v) in rows {
        s.push_str(&format!("{name},{}\n", fmt_f64(*v)));
    }
    s
}

/// Sorted `|component|` tables of the leading covariance and curvature eigenvectors.
pub fn cmd_contributions(cfg: &RunConfig, model: Option<&Path>) -> Result<Contributions> {
    let p = prepare(cfg)?;
    let model = load_model(&model_path(cfg, model), p.normalized.dim())?;
    let (bases, _) = fit_bases(cfg, &p.normalized, &model)?;
    let names = &p.normalized.feature_names;
    let c = Contributions {
        covariance: parameter_contributions(&bases.covariance.vector(0), names),
        curvature: parameter_contributions(&bases.curvature.vector(0), names),
    };
    let out = &cfg.outdir;
    write(&out.join("contributions/covariance_v1.csv"), &contributions_csv(&c.covariance))?;
    write(&out.join("contributions/curvature_v1.csv"), &contributions_csv(&c.curvature))?;
    write(&out.join("figures/contributions_covariance.svg"), &bar_chart("Covariance eigenvector 1", &c.covariance))?;
    write(&out.join("figures/contributions_curvature.svg"), &bar_chart("Curvature eigenvector 1", &c.curvature))?;
    Ok(c)
}
