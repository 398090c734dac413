//! Concentration of the uniform measure on the middle levels.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{KmError, Result};
use crate::numeric::{binomial_row, level_probabilities, DyadicFraction};

fn outside(n: usize, width: f64, i: usize) -> bool {
    (i as f64 - n as f64 / 2.0).abs() > width
}

/// Exact fraction of `{0,1}^n` with `| |x| - n/2 | > width`.
pub fn middle_mass_exact(n: usize, width: f64) -> Result<DyadicFraction> {
    if width.is_nan() || width < 0.0 {
        return Err(KmError::InvalidArgument(format!("width must be non-negative, got {width}")));
    }
    let row = binomial_row(n);
    let total = row.iter().enumerate().filter(|&(i, _)| outside(n, width, i)).fold(BigUint::zero(), |acc, (_, c)| acc + c);
    Ok(DyadicFraction::new(total, n as u32))
}

/// Floating-point [`middle_mass_exact`]; exact summation up to `n = 4096`.
pub fn middle_mass(n: usize, width: f64) -> Result<f64> {
    if n <= 4096 {
        return Ok(middle_mass_exact(n, width)?.to_f64());
    }
    if width.is_nan() || width < 0.0 {
        return Err(KmError::InvalidArgument(format!("width must be non-negative, got {width}")));
    }
    let p = level_probabilities(n);
    Ok((0..=n).filter(|&i| outside(n, width, i)).map(|i| p[i]).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelMass {
    pub n: usize,
    /// `binom(n, floor(n/2)) / 2^n`.
    pub max_fraction: f64,
    /// `2 / sqrt(n)`.
    pub bound: f64,
    pub holds: bool,
}

/// The heaviest level against `2 / sqrt(n)`.
pub fn max_level_mass(n: usize) -> Result<LevelMass> {
    if n == 0 {
        return Err(KmError::InvalidArgument("need n >= 1".into()));
    }
    // c(2m) = c(2m - 1) and c(2m + 1) = c(2m) (2m + 1) / (2m + 2)
    let mut c = 1.0f64;
    for j in 0..n {
        if j % 2 == 0 {
            c *= (j + 1) as f64 / (j + 2) as f64;
        }
    }
    let bound = 2.0 / (n as f64).sqrt();
    Ok(LevelMass { n, max_fraction: c, bound, holds: c < bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_examples() {
        assert!(middle_mass(10, 5.0).unwrap() == 0.0);
        let m = middle_mass_exact(100, 10.0).unwrap();
        let expect: BigUint = "1394423591691480037316962055".parse().unwrap();
        // stored over 2^100; the frozen value is over 2^95
        assert_eq!(m.numerator(), &(expect << 5u32));
        assert!((m.to_f64() - 0.03520020021770481).abs() < 1e-15);
        assert!(middle_mass(3, -1.0).is_err());
    }

    #[test]
    fn mass_is_monotone_in_width() {
        let mut prev = 1.0;
        for w in 0..60 {
            let m = middle_mass(101, w as f64 / 2.0).unwrap();
            assert!(m <= prev);
            prev = m;
        }
    }

    #[test]
    fn float_route_agrees() {
        let exact = middle_mass_exact(5000, 40.0).unwrap().to_f64();
        let p = level_probabilities(5000);
        let approx: f64 = (0..=5000).filter(|&i| outside(5000, 40.0, i)).map(|i| p[i]).sum();
        assert!((exact - approx).abs() < 1e-12);
    }

    #[test]
    fn heavy_level() {
        let m = max_level_mass(4).unwrap();
        assert!((m.max_fraction - 0.375).abs() < 1e-15 && m.holds);
        let m = max_level_mass(1).unwrap();
        assert!((m.max_fraction - 0.5).abs() < 1e-15 && m.holds);
        let m = max_level_mass(7).unwrap();
        assert!((m.max_fraction - 35.0 / 128.0).abs() < 1e-15);
    }
}
