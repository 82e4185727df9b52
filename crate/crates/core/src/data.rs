//! Dataset ingestion, imputation, one-hot expansion, z-scoring and fold plans.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Binary-labelled feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Matrix,
    pub labels: Vec<u8>,
    pub feature_names: Vec<String>,
    /// Members of class 0 and class 1.
    pub class_counts: [usize; 2],
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<u8>, feature_names: Vec<String>) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::LengthMismatch { left: features.rows(), right: labels.len() });
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::InvalidArgument("labels must be 0 or 1".into()));
        }
        let feature_names = if feature_names.is_empty() {
            default_feature_names(features.cols())
        } else if feature_names.len() != features.cols() {
            return Err(Error::dims(format!("{} feature names", features.cols()), feature_names.len()));
        } else {
            feature_names
        };
        let ones = labels.iter().filter(|&&l| l == 1).count();
        Ok(Dataset { class_counts: [labels.len() - ones, ones], features, labels, feature_names })
    }

    pub fn n(&self) -> usize {
        self.features.rows()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn has_both_classes(&self) -> bool {
        self.class_counts[0] > 0 && self.class_counts[1] > 0
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let labels: Vec<u8> = rows.iter().map(|&i| self.labels[i]).collect();
        let ones = labels.iter().filter(|&&l| l == 1).count();
        Dataset {
            features: self.features.select_rows(rows),
            class_counts: [labels.len() - ones, ones],
            labels,
            feature_names: self.feature_names.clone(),
        }
    }

    /// Row indices belonging to `class`.
    pub fn class_rows(&self, class: u8) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == class).collect()
    }

    pub fn class_features(&self, class: u8) -> Matrix {
        self.features.select_rows(&self.class_rows(class))
    }
}

/// `f0 .. f{D-1}`
pub fn default_feature_names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("f{i}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MissingPolicy {
    /// Median for numeric columns, mode for categorical ones.
    #[default]
    Median,
    /// Drop any row with a missing cell.
    Drop,
}

impl std::str::FromStr for MissingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(MissingPolicy::Median),
            "drop" => Ok(MissingPolicy::Drop),
            other => Err(Error::InvalidArgument(format!("unknown missing policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub label_column: String,
    #[serde(default)]
    pub categorical_columns: Vec<String>,
    #[serde(default)]
    pub missing_policy: MissingPolicy,
    /// Raw label mapped to class 1. Without it the lexicographically larger level is class 1.
    #[serde(default)]
    pub positive_label: Option<String>,
    /// Columns ignored entirely (identifiers and the like).
    #[serde(default)]
    pub drop_columns: Vec<String>,
}

impl LoadOptions {
    pub fn new(label_column: impl Into<String>) -> Self {
        LoadOptions {
            label_column: label_column.into(),
            categorical_columns: Vec::new(),
            missing_policy: MissingPolicy::default(),
            positive_label: None,
            drop_columns: Vec::new(),
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_csv(file, options)
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c == "NA"
}

enum ColumnKind {
    Numeric,
    Categorical,
}

/// Parses a headed CSV stream into a numeric [`Dataset`].
pub fn read_csv<R: Read>(reader: R, options: &LoadOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::ParseError { row: 0, column: String::new(), message: e.to_string() })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let label_idx = headers
        .iter()
        .position(|h| *h == options.label_column)
        .ok_or_else(|| Error::UnknownColumn(options.label_column.clone()))?;
    for c in options.categorical_columns.iter().chain(&options.drop_columns) {
        if !headers.contains(c) {
            return Err(Error::UnknownColumn(c.clone()));
        }
    }

    let feature_cols: Vec<(usize, ColumnKind)> = headers
        .iter()
        .enumerate()
        .filter(|(i, h)| *i != label_idx && !options.drop_columns.contains(h))
        .map(|(i, h)| {
            let kind = if options.categorical_columns.contains(h) {
                ColumnKind::Categorical
            } else {
                ColumnKind::Numeric
            };
            (i, kind)
        })
        .collect();

    // Raw cells; None marks a missing value.
    let mut raw_labels: Vec<String> = Vec::new();
    let mut numeric: Vec<Vec<Option<f64>>> = Vec::new();
    let mut categorical: Vec<Vec<Option<String>>> = Vec::new();

    for (r, record) in rdr.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| Error::ParseError {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        let label = record.get(label_idx).unwrap_or("").trim();
        if is_missing(label) {
            if options.missing_policy == MissingPolicy::Drop {
                continue;
            }
            return Err(Error::ParseError {
                row,
                column: options.label_column.clone(),
                message: "missing label".into(),
            });
        }
        let mut num_row = Vec::new();
        let mut cat_row = Vec::new();
        let mut any_missing = false;
        for (idx, kind) in &feature_cols {
            let cell = record.get(*idx).unwrap_or("").trim();
            let missing = is_missing(cell);
            any_missing |= missing;
            match kind {
                ColumnKind::Numeric => {
                    let v = if missing {
                        None
                    } else {
                        let v: f64 = cell.parse().map_err(|_| Error::ParseError {
                            row,
                            column: headers[*idx].clone(),
                            message: format!("`{cell}` is not a number"),
                        })?;
                        if !v.is_finite() {
                            return Err(Error::ParseError {
                                row,
                                column: headers[*idx].clone(),
                                message: "non-finite value".into(),
                            });
                        }
                        Some(v)
                    };
                    num_row.push(v);
                }
                ColumnKind::Categorical => {
                    cat_row.push(if missing { None } else { Some(cell.to_string()) })
                }
            }
        }
        if any_missing && options.missing_policy == MissingPolicy::Drop {
            continue;
        }
        raw_labels.push(label.to_string());
        numeric.push(num_row);
        categorical.push(cat_row);
    }

    let n = raw_labels.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }

    let labels = map_labels(&raw_labels, options)?;

    let numeric_headers: Vec<&str> = feature_cols
        .iter()
        .filter(|(_, k)| matches!(k, ColumnKind::Numeric))
        .map(|(i, _)| headers[*i].as_str())
        .collect();
    let categorical_headers: Vec<&str> = feature_cols
        .iter()
        .filter(|(_, k)| matches!(k, ColumnKind::Categorical))
        .map(|(i, _)| headers[*i].as_str())
        .collect();

    // Imputation values per column.
    let mut numeric_fill = Vec::with_capacity(numeric_headers.len());
    for (j, name) in numeric_headers.iter().enumerate() {
        let mut present: Vec<f64> = numeric.iter().filter_map(|r| r[j]).collect();
        if present.is_empty() {
            return Err(Error::ParseError {
                row: 0,
                column: name.to_string(),
                message: "column has no values".into(),
            });
        }
        numeric_fill.push(median(&mut present));
    }
    let mut levels: Vec<Vec<String>> = Vec::with_capacity(categorical_headers.len());
    let mut categorical_fill = Vec::with_capacity(categorical_headers.len());
    for (j, name) in categorical_headers.iter().enumerate() {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &categorical {
            if let Some(v) = &r[j] {
                *counts.entry(v.as_str()).or_default() += 1;
            }
        }
        if counts.is_empty() {
            return Err(Error::ParseError {
                row: 0,
                column: name.to_string(),
                message: "column has no values".into(),
            });
        }
        // BTreeMap iterates in lexicographic order, so ties resolve to the smallest level.
        let mode = counts.iter().fold(("", 0), |best, (k, &c)| if c > best.1 { (k, c) } else { best });
        categorical_fill.push(mode.0.to_string());
        levels.push(counts.keys().map(|s| s.to_string()).collect());
    }

    let mut feature_names: Vec<String> = Vec::new();
    // Keep the original column order; categorical columns expand in place.
    let mut layout = Vec::new();
    let (mut ni, mut ci) = (0, 0);
    for (idx, kind) in &feature_cols {
        match kind {
            ColumnKind::Numeric => {
                feature_names.push(headers[*idx].clone());
                layout.push((true, ni));
                ni += 1;
            }
            ColumnKind::Categorical => {
                for level in &levels[ci] {
                    feature_names.push(format!("{}={level}", headers[*idx]));
                }
                layout.push((false, ci));
                ci += 1;
            }
        }
    }

    let d = feature_names.len();
    let mut data = Vec::with_capacity(n * d);
    for r in 0..n {
        for &(is_num, j) in &layout {
            if is_num {
                data.push(numeric[r][j].unwrap_or(numeric_fill[j]));
            } else {
                let v = categorical[r][j].as_deref().unwrap_or(&categorical_fill[j]);
                data.extend(levels[j].iter().map(|l| if l == v { 1.0 } else { 0.0 }));
            }
        }
    }
    let features = Matrix::from_vec(n, d, data)?;
    Dataset::new(features, labels, feature_names)
}

fn map_labels(raw: &[String], options: &LoadOptions) -> Result<Vec<u8>> {
    let levels: BTreeSet<&str> = raw.iter().map(|s| s.as_str()).collect();
    if levels.len() != 2 {
        return Err(Error::NonBinaryLabel {
            column: options.label_column.clone(),
            levels: levels.iter().map(|s| s.to_string()).collect(),
        });
    }
    let positive = match &options.positive_label {
        Some(p) => {
            if !levels.contains(p.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "positive label `{p}` not present in column `{}`",
                    options.label_column
                )));
            }
            p.as_str()
        }
        None => levels.iter().next_back().copied().unwrap_or_default(),
    };
    Ok(raw.iter().map(|l| u8::from(l == positive)).collect())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Per-column mean and population standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl NormalizationParams {
    pub fn dim(&self) -> usize {
        self.means.len()
    }
}

/// Fits z-score parameters on `train` (population convention).
pub fn fit_zscore(train: &Dataset) -> Result<NormalizationParams> {
    let n = train.n();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let means = train.features.column_means();
    let mut vars = vec![0.0; train.dim()];
    for r in train.features.row_iter() {
        for ((v, &x), &m) in vars.iter_mut().zip(r).zip(&means) {
            *v += (x - m) * (x - m);
        }
    }
    let mut stds = Vec::with_capacity(vars.len());
    for (j, v) in vars.iter().enumerate() {
        let s = (v / n as f64).sqrt();
        // constant columns leave rounding dust in the variance
        if !(s > 1e-12 * means[j].abs().max(1.0)) {
            return Err(Error::ZeroVarianceColumn(train.feature_names[j].clone()));
        }
        stds.push(s);
    }
    Ok(NormalizationParams { means, stds })
}

pub fn apply_zscore(data: &Dataset, params: &NormalizationParams) -> Result<Dataset> {
    Ok(Dataset { features: zscore_matrix(&data.features, params)?, ..data.clone() })
}

pub fn zscore_matrix(x: &Matrix, params: &NormalizationParams) -> Result<Matrix> {
    if x.cols() != params.dim() || params.stds.len() != params.dim() {
        return Err(Error::dims(format!("{} columns", params.dim()), x.cols()));
    }
    let mut out = x.clone();
    for i in 0..out.rows() {
        for ((v, m), s) in out.row_mut(i).iter_mut().zip(&params.means).zip(&params.stds) {
            *v = (*v - m) / s;
        }
    }
    Ok(out)
}

/// Assignment of every row to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub stratified: bool,
    pub seed: u64,
}

impl FoldPlan {
    /// `(train_rows, test_rows)` for fold `f`, each ascending.
    pub fn split(&self, f: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &a) in self.assignments.iter().enumerate() {
            if a == f {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            if a < self.k {
                sizes[a] += 1;
            }
        }
        sizes
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k < 2 {
            return Err(Error::FoldPlanMismatch(format!("k = {} < 2", self.k)));
        }
        if self.assignments.len() != n {
            return Err(Error::FoldPlanMismatch(format!(
                "plan covers {} rows, data has {n}",
                self.assignments.len()
            )));
        }
        if let Some(&bad) = self.assignments.iter().find(|&&a| a >= self.k) {
            return Err(Error::FoldPlanMismatch(format!("fold index {bad} >= k = {}", self.k)));
        }
        if let Some(f) = self.fold_sizes().iter().position(|&s| s == 0) {
            return Err(Error::FoldPlanMismatch(format!("fold {f} is empty")));
        }
        Ok(())
    }
}

/// Deterministic k-fold assignment. Stratified plans deal each class's
/// shuffled rows round-robin, continuing the rotation across classes so
/// fold sizes stay within one of each other.
pub fn make_folds(data: &Dataset, k: usize, stratified: bool, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    let n = data.n();
    if n < k {
        return Err(Error::TooFewSamples { required: k, found: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0; n];
    if stratified {
        let mut offset = 0;
        for class in 0..2u8 {
            let mut rows = data.class_rows(class);
            if rows.len() < k {
                return Err(Error::TooFewClassMembers { class, required: k, found: rows.len() });
            }
            rows.shuffle(&mut rng);
            for (pos, &r) in rows.iter().enumerate() {
                assignments[r] = (offset + pos) % k;
            }
            offset = (offset + rows.len()) % k;
        }
    } else {
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng);
        for (pos, &r) in rows.iter().enumerate() {
            assignments[r] = pos % k;
        }
    }
    Ok(FoldPlan { k, assignments, stratified, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ds(rows: &[&[f64]], labels: &[u8]) -> Dataset {
        Dataset::new(Matrix::from_rows(rows).unwrap(), labels.to_vec(), vec![]).unwrap()
    }

    #[test]
    fn one_hot_adds_levels_minus_one_columns() {
        let csv = "a,color,y\n1,red,p\n2,blue,n\n3,red,p\n";
        let mut opts = LoadOptions::new("y");
        opts.categorical_columns = vec!["color".into()];
        let d = read_csv(csv.as_bytes(), &opts).unwrap();
        assert_eq!(d.dim(), 3);
        assert_eq!(d.feature_names, vec!["a", "color=blue", "color=red"]);
        assert_eq!(d.features.row(0), &[1.0, 0.0, 1.0]);
        assert_eq!(d.features.row(1), &[2.0, 1.0, 0.0]);
        // "n" < "p", so "p" is class 1
        assert_eq!(d.labels, vec![1, 0, 1]);
        assert_eq!(d.class_counts, [1, 2]);
    }

    #[test]
    fn median_imputation() {
        let csv = "x,z,y\n1,5,a\n,4,b\n7,NA,a\n3,1,b\n10,2,a\n";
        let d = read_csv(csv.as_bytes(), &LoadOptions::new("y")).unwrap();
        // median of {1,7,3,10} = 5; median of {5,4,1,2} = 3
        assert_eq!(d.features[(1, 0)], 5.0);
        assert_eq!(d.features[(2, 1)], 3.0);

        let mut drop = LoadOptions::new("y");
        drop.missing_policy = MissingPolicy::Drop;
        let d = read_csv(csv.as_bytes(), &drop).unwrap();
        assert_eq!(d.n(), 3);
    }

    #[test]
    fn categorical_mode_imputation() {
        let csv = "c,y\nu,0\nv,1\nv,0\n,1\n";
        let mut opts = LoadOptions::new("y");
        opts.categorical_columns = vec!["c".into()];
        let d = read_csv(csv.as_bytes(), &opts).unwrap();
        assert_eq!(d.features.row(3), &[0.0, 1.0]);
    }

    #[test]
    fn label_errors_and_overrides() {
        let three = "x,y\n1,a\n2,b\n3,c\n";
        assert!(matches!(
            read_csv(three.as_bytes(), &LoadOptions::new("y")),
            Err(Error::NonBinaryLabel { .. })
        ));
        let two = "x,y\n1,B\n2,M\n";
        assert_eq!(read_csv(two.as_bytes(), &LoadOptions::new("y")).unwrap().labels, vec![0, 1]);
        let mut opts = LoadOptions::new("y");
        opts.positive_label = Some("B".into());
        assert_eq!(read_csv(two.as_bytes(), &opts).unwrap().labels, vec![1, 0]);
        assert!(matches!(
            read_csv(two.as_bytes(), &LoadOptions::new("label")),
            Err(Error::UnknownColumn(_))
        ));
        assert_eq!(read_csv("x,y\n".as_bytes(), &LoadOptions::new("y")), Err(Error::EmptyDataset));
        assert!(matches!(
            read_csv("x,y\nfoo,a\n2,b\n".as_bytes(), &LoadOptions::new("y")),
            Err(Error::ParseError { row: 1, .. })
        ));
    }

    #[test]
    fn zscore_fit_examples() {
        let d = ds(&[&[0.0], &[2.0]], &[0, 1]);
        let p = fit_zscore(&d).unwrap();
        assert_eq!((p.means[0], p.stds[0]), (1.0, 1.0));

        let c = ds(&[&[3.0, 1.0], &[3.0, 2.0]], &[0, 1]);
        assert_eq!(fit_zscore(&c), Err(Error::ZeroVarianceColumn("f0".into())));
    }

    #[test]
    fn zscore_applied_to_fit_split_is_standard() {
        let d = ds(&[&[1.0, 10.0], &[4.0, -3.0], &[2.5, 7.0], &[9.0, 0.5]], &[0, 1, 0, 1]);
        let z = apply_zscore(&d, &fit_zscore(&d).unwrap()).unwrap();
        let again = fit_zscore(&z).unwrap();
        for j in 0..2 {
            assert!(again.means[j].abs() < 1e-10);
            assert!((again.stds[j] - 1.0).abs() < 1e-10);
        }
        // params from one split applied to another: no re-centering
        let test = ds(&[&[100.0, 100.0]], &[0]);
        let zt = apply_zscore(&test, &fit_zscore(&d).unwrap()).unwrap();
        assert!(zt.features[(0, 0)] > 10.0);
        assert!(apply_zscore(&ds(&[&[1.0]], &[0]), &fit_zscore(&d).unwrap()).is_err());
    }

    #[test]
    fn balanced_stratified_folds() {
        let x: Vec<[f64; 1]> = (0..10).map(|i| [i as f64]).collect();
        let labels: Vec<u8> = (0..10).map(|i| (i % 2) as u8).collect();
        let d = Dataset::new(Matrix::from_rows(&x).unwrap(), labels, vec![]).unwrap();
        let plan = make_folds(&d, 5, true, 3).unwrap();
        for f in 0..5 {
            let (_, test) = plan.split(f);
            let pos = test.iter().filter(|&&i| d.labels[i] == 1).count();
            assert_eq!((test.len(), pos), (2, 1));
        }
        assert_eq!(plan, make_folds(&d, 5, true, 3).unwrap());
        assert!(matches!(make_folds(&d, 6, true, 3), Err(Error::TooFewClassMembers { .. })));
    }

    #[test]
    fn imbalanced_neural_like_split() {
        // 221 rows with 31 positives
        let x: Vec<[f64; 1]> = (0..221).map(|i| [i as f64]).collect();
        let labels: Vec<u8> = (0..221).map(|i| u8::from(i < 31)).collect();
        let d = Dataset::new(Matrix::from_rows(&x).unwrap(), labels, vec![]).unwrap();
        let plan = make_folds(&d, 5, true, 42).unwrap();
        for f in 0..5 {
            let (_, test) = plan.split(f);
            let pos = test.iter().filter(|&&i| d.labels[i] == 1).count();
            assert!(pos == 6 || pos == 7, "fold {f}: {pos}");
        }
    }

    #[test]
    fn plan_validation() {
        let plan = FoldPlan { k: 3, assignments: vec![0, 1, 1, 0], stratified: false, seed: 0 };
        assert!(matches!(plan.validate(4), Err(Error::FoldPlanMismatch(_))));
        assert!(matches!(plan.validate(5), Err(Error::FoldPlanMismatch(_))));
    }

    proptest! {
        #[test]
        fn stratified_folds_track_global_ratio(
            n0 in 5usize..60, n1 in 5usize..60, k in 2usize..6, seed in any::<u64>()
        ) {
            let labels: Vec<u8> = (0..n0 + n1).map(|i| u8::from(i >= n0)).collect();
            let x: Vec<[f64; 1]> = (0..n0 + n1).map(|i| [i as f64]).collect();
            let d = Dataset::new(Matrix::from_rows(&x).unwrap(), labels, vec![]).unwrap();
            let plan = make_folds(&d, k, true, seed).unwrap();
            plan.validate(d.n()).unwrap();
            for f in 0..k {
                let (_, test) = plan.split(f);
                for (class, total) in [(0u8, n0), (1u8, n1)] {
                    let c = test.iter().filter(|&&i| d.labels[i] == class).count();
                    prop_assert!(c == total / k || c == total.div_ceil(k));
                }
            }
        }

        #[test]
        fn one_hot_preserves_rows_and_labels(levels in proptest::collection::vec(0u8..4, 2..30)) {
            let mut csv = String::from("x,c,y\n");
            for (i, l) in levels.iter().enumerate() {
                csv.push_str(&format!("{i},L{l},{}\n", i % 2));
            }
            let mut opts = LoadOptions::new("y");
            opts.categorical_columns = vec!["c".into()];
            let d = read_csv(csv.as_bytes(), &opts).unwrap();
            prop_assert_eq!(d.n(), levels.len());
            for (i, l) in levels.iter().enumerate() {
                prop_assert_eq!(d.labels[i] as usize, i % 2);
                prop_assert_eq!(d.features[(i, 0)], i as f64);
                let name = format!("c=L{l}");
                let j = d.feature_names.iter().position(|f| *f == name).unwrap();
                prop_assert_eq!(d.features[(i, j)], 1.0);
                prop_assert_eq!(d.features.row(i)[1..].iter().sum::<f64>(), 1.0);
            }
        }
    }
}
