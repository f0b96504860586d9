//! Small sampling-statistics helpers shared by the estimators.

use serde::{Deserialize, Serialize};

/// Binomial standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_std_err(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// Two-proportion z-score with pooled variance. Zero when both samples are
/// degenerate (pooled proportion 0 or 1), since the proportions then agree.
pub fn two_proportion_z(hits_a: u64, n_a: u64, hits_b: u64, n_b: u64) -> f64 {
    let pa = hits_a as f64 / n_a as f64;
    let pb = hits_b as f64 / n_b as f64;
    let pooled = (hits_a + hits_b) as f64 / (n_a + n_b) as f64;
    let var = pooled * (1.0 - pooled) * (1.0 / n_a as f64 + 1.0 / n_b as f64);
    if var <= 0.0 {
        0.0
    } else {
        (pa - pb) / var.sqrt()
    }
}

/// Running mean and variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanVar {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(mut self, other: MeanVar) -> MeanVar {
        if other.n == 0 {
            return self;
        }
        if self.n == 0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64) * (other.n as f64) / n as f64;
        self.n = n;
        self
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn std_err(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for MeanVar {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = MeanVar::default();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, 9.0, -3.0, 0.5];
        let mv: MeanVar = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        assert!((mv.mean() - mean).abs() < 1e-12);
        assert!((mv.variance() - var).abs() < 1e-12);

        let (a, b) = xs.split_at(2);
        let merged = a.iter().copied().collect::<MeanVar>().merge(b.iter().copied().collect());
        assert!((merged.mean() - mean).abs() < 1e-12);
        assert!((merged.variance() - var).abs() < 1e-12);
    }

    #[test]
    fn z_score_degenerate_and_symmetric() {
        assert_eq!(two_proportion_z(10, 10, 10, 10), 0.0);
        assert_eq!(two_proportion_z(0, 10, 0, 10), 0.0);
        let z = two_proportion_z(30, 100, 50, 100);
        assert!((z + two_proportion_z(50, 100, 30, 100)).abs() < 1e-15);
        assert!(z < -2.0);
    }
}
