//! Binomial-proportion estimates and reference tails.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Empirical success rate with its Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let (lower, upper) = wilson_interval(successes, trials, Z95);
        let mean = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Self { successes, trials, mean, lower, upper }
    }

    /// Binomial standard error at the empirical mean.
    pub fn sigma(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.mean * (1.0 - self.mean) / self.trials as f64).sqrt()
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }
}

pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lower = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let upper = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lower, upper)
}

/// Standard error of a proportion `p` estimated from `trials` samples.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// P[Bin(n, p) > k].
pub fn binomial_upper_tail(n: u64, p: f64, k: u64) -> f64 {
    if k >= n {
        return 0.0;
    }
    let dist = Binomial::new(p.clamp(0.0, 1.0), n).expect("valid binomial");
    dist.sf(k)
}

/// Probability that a strict majority of `runs` independent trials fail when
/// each fails with probability `fail`.
pub fn majority_failure(runs: u64, fail: f64) -> f64 {
    binomial_upper_tail(runs, fail, runs / 2)
}

/// Hoeffding bound on the majority failing when each run succeeds with
/// probability `accept > 1/2`.
pub fn hoeffding_majority_bound(runs: u64, accept: f64) -> f64 {
    let gap = accept - 0.5;
    if gap <= 0.0 {
        return 1.0;
    }
    (-2.0 * runs as f64 * gap * gap).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_degenerate_ends() {
        let e = Estimate::from_counts(100, 100);
        assert_eq!(e.upper, 1.0);
        assert!(e.lower > 0.95);
        let z = Estimate::from_counts(0, 50);
        assert_eq!(z.lower, 0.0);
    }

    #[test]
    fn wilson_contains_half() {
        let e = Estimate::from_counts(5003, 10_000);
        assert!(e.contains(0.5));
        assert!(e.upper - e.lower < 0.021);
    }

    #[test]
    fn binomial_tail_matches_direct_sum() {
        // P[Bin(9, 0.01) >= 2] written out term by term.
        let p: f64 = 0.01;
        let direct = 1.0 - (1.0 - p).powi(9) - 9.0 * p * (1.0 - p).powi(8);
        assert!((binomial_upper_tail(9, p, 1) - direct).abs() < 1e-14);
        assert_eq!(binomial_upper_tail(3, 0.5, 3), 0.0);
    }

    #[test]
    fn majority_tail_small_for_good_runs() {
        let t = majority_failure(15, 0.1);
        assert!(t < 1e-4 && t > 0.0);
        assert!(hoeffding_majority_bound(15, 0.9) > t);
    }
}
