use std::path::{Path, PathBuf};

use covhess_core::data::{LoadOptions, MissingPolicy};
use covhess_core::evaluation::{Method, SvmConfig};
use covhess_core::nn::{Optimizer, TrainConfig, DEFAULT_HIDDEN};
use covhess_core::{CurvatureMethod, Error, Result};
use serde::{Deserialize, Serialize};

pub const SEED_ENV: &str = "COVHESS_SEED";

/// Experiment manifest. Every key is optional in the file; command-line flags win.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub outdir: PathBuf,
    pub threads: usize,
    pub data: DataSection,
    pub nn: NnSection,
    pub curvature: CurvatureSection,
    pub grid: GridSection,
    pub cv: CvSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub path: Option<PathBuf>,
    pub label_column: String,
    pub categorical_columns: Vec<String>,
    pub missing_policy: MissingPolicy,
    pub positive_label: Option<String>,
    pub drop_columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NnSection {
    pub hidden: [usize; 3],
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerName {
    Adam,
    Sgd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CurvatureSection {
    pub method: CurvatureMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSection {
    pub k: usize,
    pub stratified: bool,
    pub methods: Vec<String>,
    pub svm_lambda: f64,
    pub svm_epochs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            outdir: PathBuf::from("out"),
            threads: 1,
            data: DataSection::default(),
            nn: NnSection::default(),
            curvature: CurvatureSection::default(),
            grid: GridSection::default(),
            cv: CvSection::default(),
        }
    }
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { size: 3 }
    }
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            path: None,
            label_column: "label".into(),
            categorical_columns: Vec::new(),
            missing_policy: MissingPolicy::default(),
            positive_label: None,
            drop_columns: Vec::new(),
        }
    }
}

impl Default for NnSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        NnSection {
            hidden: DEFAULT_HIDDEN,
            epochs: t.epochs,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            optimizer: OptimizerName::Adam,
        }
    }
}

impl Default for CvSection {
    fn default() -> Self {
        let svm = SvmConfig::default();
        CvSection {
            k: 10,
            stratified: true,
            methods: Method::ALL.iter().map(|m| m.name().to_string()).collect(),
            svm_lambda: svm.lambda,
            svm_epochs: svm.epochs,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            label_column: self.data.label_column.clone(),
            categorical_columns: self.data.categorical_columns.clone(),
            missing_policy: self.data.missing_policy,
            positive_label: self.data.positive_label.clone(),
            drop_columns: self.data.drop_columns.clone(),
        }
    }

    pub fn data_path(&self) -> Result<&Path> {
        let p = self.data.path.as_deref().ok_or_else(|| Error::InvalidArgument("no dataset path given".into()))?;
        if !p.is_file() {
            return Err(Error::Io(format!("dataset not found: {}", p.display())));
        }
        Ok(p)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.nn.epochs,
            batch_size: self.nn.batch_size,
            learning_rate: self.nn.learning_rate,
            optimizer: match self.nn.optimizer {
                OptimizerName::Adam => Optimizer::default(),
                OptimizerName::Sgd => Optimizer::Sgd,
            },
            seed: self.seed,
            shuffle: true,
        }
    }

    pub fn svm_config(&self) -> SvmConfig {
        SvmConfig { lambda: self.cv.svm_lambda, epochs: self.cv.svm_epochs }
    }

    pub fn methods(&self) -> Result<Vec<Method>> {
        self.cv.methods.iter().map(|m| m.parse()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.cv.k < 2 {
            return Err(Error::InvalidArgument(format!("cv.k must be at least 2, got {}", self.cv.k)));
        }
        if self.grid.size == 0 {
            return Err(Error::InvalidArgument("grid.size must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(Error::InvalidArgument("threads must be at least 1".into()));
        }
        if self.nn.hidden.contains(&0) {
            return Err(Error::InvalidArgument("hidden layer sizes must be positive".into()));
        }
        self.methods()?;
        self.train_config().validate()
    }
}

/// Seed precedence: explicit flag, then `COVHESS_SEED`, then the file.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>, file: u64) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        Some(v) => v.parse().map_err(|_| Error::InvalidArgument(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        None => Ok(file),
    }
}
