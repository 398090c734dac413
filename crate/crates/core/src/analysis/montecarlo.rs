//! Monte Carlo rejection rates of the single-chain tester.

use serde::Serialize;

use crate::boolfn::{FunctionSpec, QueryLedger};
use crate::error::{KmError, Result};
use crate::exec::{map_chunks, stream_rng, Execution};
use crate::hypercube::sample_uniform_chain;
use crate::kmono::alternation_index;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.5758293035489004;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo.min(p), hi.max(p))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RejectionEstimate {
    pub p_hat: f64,
    pub successes: u64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub seed: u64,
}

impl RejectionEstimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_99);
        Self { p_hat: successes as f64 / trials.max(1) as f64, successes, trials, ci_low, ci_high, confidence: 0.99, seed }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Fraction of `trials` uniform chains on which `f` alternates at least
/// `k+1` times from 1. Trials are split into fixed chunks with one generator
/// stream each, so the result does not depend on `exec`.
pub fn mc_rejection_estimate(f: &FunctionSpec, k: usize, trials: u64, seed: u64, exec: Execution) -> Result<RejectionEstimate> {
    if trials == 0 {
        return Err(KmError::InvalidArgument("need at least one trial".into()));
    }
    let n = f.n();
    let hits = map_chunks(exec, trials, |c, _, count| -> Result<u64> {
        let mut rng = stream_rng(seed, c);
        let mut ledger = QueryLedger::new();
        let mut hits = 0;
        for _ in 0..count {
            let z = sample_uniform_chain(n, &mut rng)?;
            if alternation_index(&f.values_along(&z, &mut ledger)?) > k {
                hits += 1;
            }
        }
        Ok(hits)
    });
    let successes = hits.into_iter().sum::<Result<u64>>()?;
    Ok(RejectionEstimate::from_counts(successes, trials, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::intro_band_function;

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 100, Z_99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.07);
        let (lo, hi) = wilson_interval(100, 100, Z_99);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.93);
        let (lo, hi) = wilson_interval(50, 100, Z_99);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        // reference value from the closed form
        assert!((lo - 0.3752796250448).abs() < 1e-12);
    }

    #[test]
    fn estimates() {
        let zero = FunctionSpec::constant(20, false);
        let e = mc_rejection_estimate(&zero, 0, 500, 1, Execution::Parallel).unwrap();
        assert_eq!(e.p_hat, 0.0);
        assert!(e.contains(0.0));
        let band = FunctionSpec::Symmetric(intro_band_function(100).unwrap());
        let e = mc_rejection_estimate(&band, 2, 2000, 1, Execution::Parallel).unwrap();
        assert_eq!(e.successes, 2000);
        assert!(mc_rejection_estimate(&band, 2, 0, 1, Execution::Parallel).is_err());
    }

    #[test]
    fn execution_does_not_change_results() {
        let f = FunctionSpec::TruthTable(crate::boolfn::TruthTable::from_fn(8, |x| x.count_ones() % 3 == 1).unwrap());
        let a = mc_rejection_estimate(&f, 2, 5000, 9, Execution::Parallel).unwrap();
        let b = mc_rejection_estimate(&f, 2, 5000, 9, Execution::Sequential).unwrap();
        assert_eq!(a, b);
    }
}
