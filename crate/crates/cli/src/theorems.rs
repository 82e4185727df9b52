//! Randomized checks of the separability identities, as run by `verify-theorems`.

use covhess_core::curvature::{gaussian_fisher, GaussianLikelihood};
use covhess_core::separability::{
    meanvec_eigen_check, sampled_meanvec_alignment, theorem1_check, vrpt_check, zscore_scaling_check,
};
use covhess_core::{Matrix, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub name: &'static str,
    pub trials: usize,
    /// Worst observed value: the largest residual, or the smallest alignment.
    pub worst: f64,
    pub tolerance: f64,
    /// `true` when `worst` must stay at or above `tolerance`.
    pub lower_bound: bool,
    pub passed: bool,
}

impl TheoremCheck {
    fn upper(name: &'static str, trials: usize, worst: f64, tolerance: f64) -> Self {
        TheoremCheck { name, trials, worst, tolerance, lower_bound: false, passed: worst < tolerance }
    }

    fn lower(name: &'static str, trials: usize, worst: f64, tolerance: f64) -> Self {
        TheoremCheck { name, trials, worst, tolerance, lower_bound: true, passed: worst >= tolerance }
    }
}

fn normal_samples(rng: &mut ChaCha8Rng, n: usize, mean: f64, std: f64) -> Vec<f64> {
    let d = Normal::new(mean, std).expect("finite positive std");
    (0..n).map(|_| d.sample(rng)).collect()
}

/// Random equal-size class pairs with distinct means and spreads.
fn class_pair(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let n = rng.random_range(2..200);
    let draw = |rng: &mut ChaCha8Rng| {
        let (mean, std) = (rng.random_range(-5.0..5.0), rng.random_range(0.1..3.0));
        normal_samples(rng, n, mean, std)
    };
    let a = draw(rng);
    let b = draw(rng);
    (a, b)
}

pub fn overall_variance_identity(seed: u64, trials: usize) -> Result<TheoremCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (a, b) = class_pair(&mut rng);
        worst = worst.max(theorem1_check(&a, &b)?.residual);
    }
    Ok(TheoremCheck::upper("overall_variance_identity", trials, worst, 1e-10))
}

pub fn zscore_within_scaling(seed: u64, trials: usize) -> Result<TheoremCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (a, mut b) = class_pair(&mut rng);
        b.truncate(rng.random_range(2..=b.len()));
        worst = worst.max(zscore_scaling_check(&a, &b)?.max_error());
    }
    Ok(TheoremCheck::upper("zscore_within_variance_scaling", trials, worst, 1e-10))
}

pub fn variance_ratio_preservation(seed: u64, trials: usize) -> Result<TheoremCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (a, b) = class_pair(&mut rng);
        let mut angle = rng.random_range(0.0..std::f64::consts::TAU);
        // keep the first component away from zero
        while angle.cos().abs() < 1e-3 {
            angle = rng.random_range(0.0..std::f64::consts::TAU);
        }
        let (projected, original) = vrpt_check(&a, &b, [angle.cos(), angle.sin()])?;
        worst = worst.max((projected - original).abs() / original.abs().max(1.0));
    }
    Ok(TheoremCheck::upper("variance_ratio_preservation", trials, worst, 1e-10))
}

pub fn mean_difference_eigenvector(seed: u64) -> Result<TheoremCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let dims = [2usize, 5, 10, 30];
    for &d in &dims {
        let mu1: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let mu2: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let r = meanvec_eigen_check(&mu1, &mu2, rng.random_range(0.1..4.0), rng.random_range(0.1..4.0))?;
        worst = worst.max(r);
    }
    Ok(TheoremCheck::upper("mean_difference_eigen_residual", dims.len(), worst, 1e-10))
}

/// Isotropic Gaussian classes of `n` samples each in `d` dimensions.
pub fn sampled_alignment(seed: u64, n: usize, d: usize) -> Result<TheoremCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = Normal::new(0.0, 1.0).expect("unit normal");
    let mu: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let draw = |rng: &mut ChaCha8Rng, shift: &[f64]| -> Result<Matrix> {
        let data = (0..n).flat_map(|_| shift.iter().map(|m| m + z.sample(rng)).collect::<Vec<_>>()).collect();
        Matrix::from_vec(n, d, data)
    };
    let c1 = draw(&mut rng, &vec![0.0; d])?;
    let c2 = draw(&mut rng, &mu)?;
    let cos = sampled_meanvec_alignment(&c1, &c2)?;
    Ok(TheoremCheck::lower("sampled_mean_difference_alignment", 1, cos, 0.99))
}

pub fn gaussian_fisher_information() -> Result<TheoremCheck> {
    let sigmas = [0.5, 1.0, 2.0];
    let mut worst = 0.0f64;
    for &s in &sigmas {
        let f = gaussian_fisher(&GaussianLikelihood { mean: 0.3, std: s }, 20)?;
        worst = worst.max((f - 1.0 / (s * s)).abs());
    }
    Ok(TheoremCheck::upper("gaussian_fisher_equals_inverse_variance", sigmas.len(), worst, 1e-9))
}

pub fn run_all(seed: u64) -> Result<Vec<TheoremCheck>> {
    Ok(vec![
        overall_variance_identity(seed, 1000)?,
        zscore_within_scaling(seed.wrapping_add(1), 100)?,
        variance_ratio_preservation(seed.wrapping_add(2), 100)?,
        mean_difference_eigenvector(seed.wrapping_add(3))?,
        sampled_alignment(seed.wrapping_add(4), 10_000, 5)?,
        gaussian_fisher_information()?,
    ])
}
