use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use covhess_cli::commands::{cmd_compare, cmd_contributions, cmd_heatmap, cmd_preprocess, cmd_train};
use covhess_cli::config::{resolve_seed, RunConfig, SEED_ENV};
use covhess_cli::{exit_code, theorems};
use covhess_core::{CurvatureMethod, Error, Result};

#[derive(Parser)]
#[command(name = "covhess", version, about = "Covariance/curvature eigenanalysis for binary class separability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML run configuration
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Dataset CSV (overrides data.path)
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    positive_label: Option<String>,
    /// Output directory (overrides outdir)
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Global seed; takes precedence over COVHESS_SEED and the config file
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for fold/grid/sample parallelism
    #[arg(long)]
    threads: Option<usize>,
    /// fisher | exact_hessian
    #[arg(long)]
    curvature: Option<CurvatureMethod>,
}

#[derive(Args, Clone, Default)]
struct NnFlags {
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize the dataset and report class isotropy
    Preprocess(Common),
    /// Train the network and write both eigenspectra
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        nn: NnFlags,
    },
    /// Separability statistics over the eigenvector-combination grid
    Heatmap {
        #[command(flatten)]
        common: Common,
        /// Grid size along both axes (overrides grid.size)
        #[arg(long)]
        grid: Option<usize>,
        /// Trained model (default <out>/model.json)
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Cross-validated comparison of projection methods
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        nn: NnFlags,
        /// Number of folds (overrides cv.k)
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated: proposed,pca,lda,hessian_only,dnn_full
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
    },
    /// Feature contributions to the leading eigenvectors
    Contributions {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Randomized checks of the separability identities
    VerifyTheorems {
        #[command(flatten)]
        common: Common,
    },
}

fn build_config(common: &Common, nn: Option<&NnFlags>) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &common.data {
        cfg.data.path = Some(d.clone());
    }
    if let Some(l) = &common.label_column {
        cfg.data.label_column = l.clone();
    }
    if let Some(l) = &common.positive_label {
        cfg.data.positive_label = Some(l.clone());
    }
    if let Some(o) = &common.out {
        cfg.outdir = o.clone();
    }
    if let Some(t) = common.threads {
        cfg.threads = t;
    }
    if let Some(c) = common.curvature {
        cfg.curvature.method = c;
    }
    if let Some(nn) = nn {
        if let Some(e) = nn.epochs {
            cfg.nn.epochs = e;
        }
        if let Some(lr) = nn.learning_rate {
            cfg.nn.learning_rate = lr;
        }
        if let Some(b) = nn.batch_size {
            cfg.nn.batch_size = b;
        }
    }
    let env = std::env::var(SEED_ENV).ok();
    cfg.seed = resolve_seed(common.seed, env.as_deref(), cfg.seed)?;
    Ok(cfg)
}

fn init_threads(cfg: &RunConfig) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    let (common, nn) = match &cli.command {
        Command::Preprocess(c) | Command::VerifyTheorems { common: c } => (c, None),
        Command::Heatmap { common, .. } | Command::Contributions { common, .. } => (common, None),
        Command::Train { common, nn } | Command::Compare { common, nn, .. } => (common, Some(nn)),
    };
    let mut cfg = build_config(common, nn)?;
    match &cli.command {
        Command::Heatmap { grid: Some(g), .. } => cfg.grid.size = *g,
        Command::Compare { k, methods, .. } => {
            if let Some(k) = k {
                cfg.cv.k = *k;
            }
            if let Some(m) = methods {
                cfg.cv.methods = m.clone();
            }
        }
        _ => {}
    }
    cfg.validate()?;
    init_threads(&cfg)?;

    match &cli.command {
        Command::Preprocess(_) => {
            let s = cmd_preprocess(&cfg)?;
            println!("{} rows, {} features, classes {:?}", s.rows, s.features, s.class_counts);
            for c in &s.isotropy.classes {
                println!(
                    "class {}: mean |diag| {:.4}, mean |offdiag| {:.4}",
                    c.class, c.avg_abs_diagonal, c.avg_abs_offdiagonal
                );
            }
        }
        Command::Train { .. } => {
            let s = cmd_train(&cfg)?;
            println!("loss {:.6} -> {:.6} over {} epochs", s.report.initial_loss, s.report.final_loss, s.report.epoch_losses.len());
            for (name, r) in [("covariance", &s.dominance.covariance), ("curvature", &s.dominance.curvature)] {
                println!(
                    "{name}: lambda1/lambda2 = {}, dominant = {}",
                    r.dominance_ratio.map_or("n/a".into(), |v| format!("{v:.3}")),
                    r.first_eigenvalue_dominant
                );
            }
        }
        Command::Heatmap { model, .. } => {
            let cells = cmd_heatmap(&cfg, model.as_deref())?;
            for c in &cells {
                println!(
                    "({}, {}): d2 {:.5}, within {:.5}, lda {}",
                    c.cov_index,
                    c.hess_index,
                    c.d_squared,
                    c.within_variance_sum,
                    c.lda_ratio.map_or("-".into(), |v| format!("{v:.5}"))
                );
            }
        }
        Command::Compare { .. } => {
            let r = cmd_compare(&cfg)?;
            println!("{:<14}{:>10}{:>10}{:>10}", "method", "F1", "AUC", "kappa");
            for m in &r.methods {
                println!("{:<14}{:>10.4}{:>10.4}{:>10.4}", m.method.to_string(), m.mean.f1, m.mean.roc_auc, m.mean.cohen_kappa);
            }
        }
        Command::Contributions { model, .. } => {
            let c = cmd_contributions(&cfg, model.as_deref())?;
            for (title, rows) in [("covariance v1", &c.covariance), ("curvature v1", &c.curvature)] {
                println!("{title}:");
                for (name, v) in rows.iter().take(5) {
                    println!("  {name:<28}{v:.4}");
                }
            }
        }
        Command::VerifyTheorems { .. } => {
            let checks = theorems::run_all(cfg.seed)?;
            let mut ok = true;
            for c in &checks {
                let op = if c.lower_bound { ">=" } else { "<" };
                println!(
                    "{} {:<42} worst {:.3e} {op} {:.0e} ({} trials)",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.tolerance,
                    c.trials
                );
                ok &= c.passed;
            }
            if !ok {
                return Err(Error::NonFinite { context: "theorem residual above tolerance" });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
