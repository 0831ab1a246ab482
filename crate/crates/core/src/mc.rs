//! Block-partitioned Monte Carlo driver and confidence intervals.
//!
//! A run of `samples` draws is cut into fixed blocks of [`BLOCK_SIZE`]; block
//! `b` always draws from `rng.child(b)`. Workers pick blocks round-robin and
//! the per-block results are returned in block order, so every estimate is
//! a pure function of `(seed, stream, samples)` whatever the worker count.

use std::num::NonZeroUsize;

use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::sampling::RngStream;

pub const BLOCK_SIZE: usize = 4096;

/// Two-sided confidence level used for every interval.
pub const CONFIDENCE: f64 = 0.99;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "CONICOND_WORKERS";

pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: usize) -> Self {
        Self { samples, workers: default_workers() }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

/// Runs `block(rng, count)` over all blocks and returns results in block order.
pub fn run_blocks<T, F>(config: &McConfig, rng: &RngStream, block: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream, usize) -> T + Sync,
{
    let n_blocks = config.samples.div_ceil(BLOCK_SIZE);
    let count = |b: usize| BLOCK_SIZE.min(config.samples - b * BLOCK_SIZE);
    let workers = config.workers.clamp(1, n_blocks.max(1));
    if workers == 1 {
        return (0..n_blocks).map(|b| block(&mut rng.child(b as u64), count(b))).collect();
    }
    let mut slots: Vec<Option<T>> = (0..n_blocks).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let block = &block;
                let count = &count;
                scope.spawn(move || {
                    (w..n_blocks)
                        .step_by(workers)
                        .map(|b| (b, block(&mut rng.child(b as u64), count(b))))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (b, value) in h.join().expect("Monte Carlo worker panicked") {
                slots[b] = Some(value);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every block is assigned")).collect()
}

/// A Monte Carlo point estimate with a two-sided confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    /// Proportion `successes / samples` with a Clopper–Pearson interval.
    pub fn proportion(successes: usize, samples: usize, seed: u64) -> Self {
        let (ci_low, ci_high) = clopper_pearson(successes as f64, samples as f64, CONFIDENCE);
        let estimate = if samples == 0 { 0.0 } else { successes as f64 / samples as f64 };
        Self { estimate, ci_low, ci_high, samples, seed }
    }

    /// Mean of draws in `[0, scale]` from their sum.
    ///
    /// The interval is Clopper–Pearson on the fractional count
    /// `sum / scale`: a `[0,1]` variable with mean `q` has variance at most
    /// `q(1−q)`, the Bernoulli value the interval is built for.
    pub fn bounded_mean(sum: f64, samples: usize, scale: f64, seed: u64) -> Self {
        let k = (sum / scale).clamp(0.0, samples as f64);
        let (lo, hi) = clopper_pearson(k, samples as f64, CONFIDENCE);
        let estimate = if samples == 0 { 0.0 } else { sum / samples as f64 };
        Self { estimate, ci_low: lo * scale, ci_high: hi * scale, samples, seed }
    }

    /// Mean of unbounded draws with a normal-approximation interval.
    pub fn sample_mean(sum: f64, sum_sq: f64, samples: usize, seed: u64) -> Self {
        let n = samples as f64;
        let mean = sum / n;
        let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        let z = normal_quantile(0.5 + CONFIDENCE / 2.0);
        let half = z * (var / n).sqrt();
        Self { estimate: mean, ci_low: mean - half, ci_high: mean + half, samples, seed }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }

    /// Multiplies estimate and interval by a positive constant.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            estimate: self.estimate * factor,
            ci_low: self.ci_low * factor,
            ci_high: self.ci_high * factor,
            ..self
        }
    }
}

fn normal_quantile(q: f64) -> f64 {
    Normal::standard().inverse_cdf(q)
}

/// Clopper–Pearson interval for `successes` out of `trials` (fractional
/// counts allowed).
pub fn clopper_pearson(successes: f64, trials: f64, confidence: f64) -> (f64, f64) {
    if trials <= 0.0 {
        return (0.0, 1.0);
    }
    let tail = 0.5 * (1.0 - confidence);
    let lower = if successes <= 0.0 {
        0.0
    } else {
        Beta::new(successes, trials - successes + 1.0)
            .map(|b| b.inverse_cdf(tail))
            .unwrap_or(0.0)
    };
    let upper = if successes >= trials {
        1.0
    } else {
        Beta::new(successes + 1.0, trials - successes)
            .map(|b| b.inverse_cdf(1.0 - tail))
            .unwrap_or(1.0)
    };
    (lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn clopper_pearson_reference_values() {
        // Exact interval for 0 successes: upper = 1 − (α/2)^{1/n}.
        let (lo, hi) = clopper_pearson(0.0, 10.0, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-9);
        let (lo, hi) = clopper_pearson(10.0, 10.0, 0.95);
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-9);
        assert_eq!(hi, 1.0);
        // 5/10 at 95%: [0.187086, 0.812914].
        let (lo, hi) = clopper_pearson(5.0, 10.0, 0.95);
        assert!((lo - 0.187_086).abs() < 1e-5 && (hi - 0.812_914).abs() < 1e-5);
    }

    #[test]
    fn estimates_are_ordered() {
        for &(k, n) in &[(0usize, 100usize), (1, 100), (50, 100), (100, 100), (3, 100_000)] {
            let e = McEstimate::proportion(k, n, 0);
            assert!(e.ci_low <= e.estimate && e.estimate <= e.ci_high, "{e:?}");
        }
        let e = McEstimate::bounded_mean(12.5, 100, 2.0, 0);
        assert!(e.ci_low <= e.estimate && e.estimate <= e.ci_high);
        assert!((e.estimate - 0.125).abs() < 1e-15);
    }

    #[test]
    fn blocks_do_not_depend_on_worker_count() {
        let rng = RngStream::new(42, 9);
        let draw = |r: &mut RngStream, count: usize| (0..count).map(|_| r.next_u64() % 1000).sum::<u64>();
        let one = run_blocks(&McConfig::new(50_000).with_workers(1), &rng, draw);
        let many = run_blocks(&McConfig::new(50_000).with_workers(7), &rng, draw);
        assert_eq!(one, many);
        assert_eq!(one.len(), 50_000usize.div_ceil(BLOCK_SIZE));
        let counted = run_blocks(&McConfig::new(10_001).with_workers(3), &rng, |_, c| c);
        assert_eq!(counted.iter().sum::<usize>(), 10_001);
    }
}
