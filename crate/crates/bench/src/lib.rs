//! Deterministic synthetic inputs shared by the benchmarks.

use covhess_core::{Dataset, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random symmetric `d × d` matrix with entries in `[-1, 1)`.
pub fn symmetric(d: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..=i {
            let v = rng.random_range(-1.0..1.0);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// `n × d` two-class dataset, classes alternating, class 1 shifted by one
/// unit along every feature. Uniform noise keeps the fixture dependency-free.
pub fn two_class(n: usize, d: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
    let data = (0..n * d).map(|k| f64::from(labels[k / d]) + rng.random_range(-1.7..1.7)).collect();
    let names = (0..d).map(|j| format!("f{j}")).collect();
    Dataset::new(Matrix::from_vec(n, d, data).expect("n·d values"), labels, names).expect("valid dataset")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_requested_shapes() {
        let a = symmetric(7, 1);
        assert_eq!(a.shape(), (7, 7));
        assert_eq!(a.asymmetry(), 0.0);
        let ds = two_class(10, 3, 2);
        assert_eq!(ds.features.shape(), (10, 3));
        assert_eq!(ds.labels.iter().filter(|&&l| l == 1).count(), 5);
    }
}
