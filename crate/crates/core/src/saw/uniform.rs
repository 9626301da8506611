//! Goodness of fit of a sample to the uniform distribution on `Λ_n`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uniformity {
    pub samples: u64,
    pub population: u64,
    /// Total-variation distance of the empirical distribution to uniform.
    pub tv: f64,
    /// Expected `tv` of a truly uniform sample of the same size
    /// (normal approximation, `sqrt(K / (2 pi N))` for `N >> K`).
    pub expected_tv: f64,
    pub chi2: f64,
    /// `(chi2 - df) / sqrt(2 df)`.
    pub z: f64,
    /// Sampled keys outside the population.
    pub foreign: u64,
}

/// Compares sampled walk keys against the sorted keys of the whole population.
pub fn uniformity(mut sampled: Vec<u64>, population: &[u64]) -> Uniformity {
    debug_assert!(population.windows(2).all(|w| w[0] < w[1]));
    sampled.sort_unstable();
    let k = population.len() as f64;
    let n = sampled.len() as f64;
    let mut hits = vec![0u64; population.len()];
    let mut foreign = 0;
    for key in &sampled {
        match population.binary_search(key) {
            Ok(j) => hits[j] += 1,
            Err(_) => foreign += 1,
        }
    }
    let mu = n / k;
    let mut tv = foreign as f64 / n;
    let mut chi2 = 0.0;
    for &h in &hits {
        tv += (h as f64 / n - 1.0 / k).abs();
        chi2 += (h as f64 - mu).powi(2) / mu;
    }
    let df = k - 1.0;
    Uniformity {
        samples: sampled.len() as u64,
        population: population.len() as u64,
        tv: tv / 2.0,
        expected_tv: (k / (2.0 * std::f64::consts::PI * n)).sqrt(),
        chi2,
        z: (chi2 - df) / (2.0 * df).sqrt(),
        foreign,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_skewed_samples() {
        let pop = vec![1, 2, 3, 4];
        let u = uniformity(vec![1, 2, 3, 4, 4, 3, 2, 1], &pop);
        assert_eq!(u.tv, 0.0);
        assert_eq!(u.chi2, 0.0);
        let u = uniformity(vec![1, 1, 1, 1], &pop);
        assert!((u.tv - 0.75).abs() < 1e-12);
        let u = uniformity(vec![9, 1, 2, 3], &pop);
        assert_eq!(u.foreign, 1);
        assert!((u.tv - 0.25).abs() < 1e-12);
    }
}
