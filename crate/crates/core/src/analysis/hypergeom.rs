//! Hypergeometric probabilities `H(u, N, t, i)`: `i` successes in `t` draws
//! without replacement from `N` objects of which `u` are successes.

use serde::Serialize;

use crate::error::{KmError, Result};
use crate::numeric::binom_u128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hypergeometric {
    pub u: u64,
    pub population: u64,
    pub t: u64,
}

impl Hypergeometric {
    pub fn new(u: u64, population: u64, t: u64) -> Result<Self> {
        if u > population || t > population {
            return Err(KmError::InvalidArgument(format!(
                "hypergeometric parameters need u, t <= N, got u = {u}, N = {population}, t = {t}"
            )));
        }
        Ok(Self { u, population, t })
    }

    /// Smallest and largest possible number of successes.
    pub fn support(&self) -> (u64, u64) {
        let lo = (self.t + self.u).saturating_sub(self.population);
        (lo, self.t.min(self.u))
    }

    pub fn mean(&self) -> f64 {
        if self.population == 0 {
            return 0.0;
        }
        self.t as f64 * self.u as f64 / self.population as f64
    }

    /// `ln H(u, N, t, i)` for every `i` of the support, in order.
    ///
    /// Anchored at the lower end of the support and extended with the ratio
    /// of consecutive terms. Small populations use exact integer binomials.
    pub fn ln_pmf_support(&self) -> Vec<f64> {
        let (lo, hi) = self.support();
        let (u, n, t) = (self.u, self.population, self.t);
        if n <= 64 {
            let total = binom_u128(n, t).unwrap() as f64;
            return (lo..=hi)
                .map(|i| {
                    let c = binom_u128(u, i).unwrap() * binom_u128(n - u, t - i).unwrap();
                    (c as f64 / total).ln()
                })
                .collect();
        }
        // log weights relative to the mode, then normalized
        let mode = (((t + 1) as f64 * (u + 1) as f64 / (n + 2) as f64) as u64).clamp(lo, hi);
        let len = (hi - lo + 1) as usize;
        let mut out = vec![0.0; len];
        let step = |i: u64| {
            let num = (u - i) as f64 * (t - i) as f64;
            let den = (i + 1) as f64 * (n + i + 1 - u - t) as f64;
            num.ln() - den.ln()
        };
        for i in mode..hi {
            let j = (i - lo) as usize;
            out[j + 1] = out[j] + step(i);
        }
        for i in (lo..mode).rev() {
            let j = (i - lo) as usize;
            out[j] = out[j + 1] - step(i);
        }
        let ln_total = out.iter().map(|l| l.exp()).sum::<f64>().ln();
        for l in &mut out {
            *l -= ln_total;
        }
        out
    }

    pub fn pmf(&self, i: u64) -> f64 {
        let (lo, hi) = self.support();
        if i < lo || i > hi {
            return 0.0;
        }
        self.ln_pmf_support()[(i - lo) as usize].exp()
    }

    /// `Pr[X >= threshold]`.
    pub fn tail(&self, threshold: u64) -> f64 {
        let (lo, hi) = self.support();
        if threshold > hi {
            return 0.0;
        }
        if threshold <= lo {
            return 1.0;
        }
        let ln = self.ln_pmf_support();
        // smallest terms first
        ln[(threshold - lo) as usize..].iter().rev().map(|l| l.exp()).sum::<f64>().min(1.0)
    }
}

pub fn hypergeom_pmf(u: u64, population: u64, t: u64, i: u64) -> Result<f64> {
    Ok(Hypergeometric::new(u, population, t)?.pmf(i))
}

pub fn hypergeom_tail(u: u64, population: u64, t: u64, threshold: u64) -> Result<f64> {
    Ok(Hypergeometric::new(u, population, t)?.tail(threshold))
}

/// Exact upper tail at `ceil(5E/4)` against `exp(-E/48)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernoffCheck {
    pub u: u64,
    pub population: u64,
    pub t: u64,
    pub mean: f64,
    pub threshold: u64,
    pub exact_tail: f64,
    pub bound: f64,
    /// `exact_tail <= bound`; the degenerate zero-mean case passes.
    pub holds: bool,
}

pub fn chernoff_check(u: u64, population: u64, t: u64) -> Result<ChernoffCheck> {
    let h = Hypergeometric::new(u, population, t)?;
    let mean = h.mean();
    let (threshold, exact_tail, bound, holds) = if u == 0 || t == 0 {
        (0, 1.0, 1.0, true)
    } else {
        // ceil(5 t u / (4 N)) in exact integer arithmetic
        let num = 5 * t as u128 * u as u128;
        let den = 4 * population as u128;
        let threshold = num.div_ceil(den) as u64;
        let tail = h.tail(threshold);
        let bound = (-mean / 48.0).exp();
        (threshold, tail, bound, tail <= bound)
    };
    Ok(ChernoffCheck { u, population, t, mean, threshold, exact_tail, bound, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert!((hypergeom_pmf(1, 2, 1, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((hypergeom_pmf(7, 30, 30, 7).unwrap() - 1.0).abs() < 1e-12);
        assert!((hypergeom_pmf(5, 10, 4, 2).unwrap() - 10.0 / 21.0).abs() < 1e-15);
        assert!(hypergeom_pmf(11, 10, 4, 2).is_err());
        assert_eq!(hypergeom_pmf(5, 10, 4, 5).unwrap(), 0.0);
    }

    #[test]
    fn log_route_matches_exact_route() {
        // N = 65..80 uses the recurrence; compare with exact binomials
        for &(u, n, t) in &[(20u64, 70u64, 30u64), (60, 80, 50), (5, 65, 64), (40, 66, 33)] {
            let h = Hypergeometric::new(u, n, t).unwrap();
            let (lo, _) = h.support();
            let total = num_bigint::BigUint::from(binom_u128(n, t).unwrap());
            for (j, l) in h.ln_pmf_support().iter().enumerate() {
                let i = lo + j as u64;
                let c = num_bigint::BigUint::from(binom_u128(u, i).unwrap())
                    * num_bigint::BigUint::from(binom_u128(n - u, t - i).unwrap());
                let exact = crate::numeric::DyadicFraction::new(c, 0).to_f64()
                    / crate::numeric::DyadicFraction::new(total.clone(), 0).to_f64();
                assert!((l.exp() - exact).abs() <= 1e-12 * exact.max(1e-300) + 1e-300, "u={u} N={n} t={t} i={i}");
            }
        }
    }

    #[test]
    fn pmf_sums_to_one() {
        for &(u, n, t) in &[(400u64, 125_205u64, 166u64), (1000, 1_000_000, 1000), (10, 1000, 10), (900, 1000, 950)] {
            let s: f64 = Hypergeometric::new(u, n, t).unwrap().ln_pmf_support().iter().map(|l| l.exp()).sum();
            assert!((s - 1.0).abs() < 1e-12, "u={u} N={n} t={t} sum={s}");
        }
    }

    #[test]
    fn chernoff_degenerate_and_quoted_point() {
        let c = chernoff_check(0, 100, 10).unwrap();
        assert!(c.holds && c.threshold == 0 && c.exact_tail == 1.0 && c.bound == 1.0);
        let c = chernoff_check(400, 125_205, 166).unwrap();
        assert_eq!(c.threshold, 1);
        assert!(c.holds, "{c:?}");
    }
}
