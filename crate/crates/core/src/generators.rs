//! Constructions: balanced blocks, the hidden-block hard function and its
//! random relabelings, and the two-band symmetric function.

use std::ops::{Add, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{compose_permutation, FunctionSpec, LevelProfile, Permutation, TwoPart};
use crate::error::{KmError, Result};
use crate::numeric::{binom_u128, level_probabilities, round_half_down, round_half_up};

/// Default split constant (`n_R = n / (625 r^2)`).
pub const DEFAULT_C_SPLIT: f64 = 625.0;
/// Default middle-band constant (`w = sqrt(n_L) / 100`).
pub const DEFAULT_C_MID: f64 = 100.0;

/// Level intervals `I_1 .. I_l` of a balanced blocks function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    pub n: usize,
    pub blocks: usize,
    /// Inclusive level ranges, ascending and covering `0 ..= n`.
    pub cuts: Vec<(usize, usize)>,
    /// Fraction of the cube in each block.
    pub masses: Vec<f64>,
    /// Whether the size window applies, i.e. `l <= sqrt(n) / 2`.
    pub bounds_apply: bool,
    /// Whether every mass lies in `[(1 - l/sqrt n)/l, (1 + l/sqrt n)/l]`.
    pub within_bounds: bool,
}

impl BlockPartition {
    pub fn is_valid(&self) -> bool {
        self.bounds_apply && self.within_bounds
    }

    pub fn block_of(&self, level: usize) -> usize {
        self.cuts.iter().position(|&(lo, hi)| (lo..=hi).contains(&level)).expect("cuts cover all levels")
    }

    pub fn min_interval_len(&self) -> usize {
        self.cuts.iter().map(|&(lo, hi)| hi - lo + 1).min().unwrap_or(0)
    }
}

trait Mass: Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    fn times(self, k: usize) -> Self;
}

impl Mass for u128 {
    fn zero() -> Self {
        0
    }
    fn times(self, k: usize) -> Self {
        self * k as u128
    }
}

impl Mass for f64 {
    fn zero() -> Self {
        0.0
    }
    fn times(self, k: usize) -> Self {
        self * k as f64
    }
}

/// Sweeps levels upward and closes a block as soon as its mass reaches the
/// remaining mass divided by the number of blocks still to place, always
/// leaving at least one level per remaining block.
fn greedy_cuts<T: Mass>(masses: &[T], total: T, blocks: usize) -> Vec<(usize, usize)> {
    let levels = masses.len();
    let mut cuts = Vec::with_capacity(blocks);
    let mut remaining = total;
    let mut level = 0;
    for j in 0..blocks {
        let left = blocks - j;
        let start = level;
        if left == 1 {
            cuts.push((start, levels - 1));
            break;
        }
        let mut mass = T::zero();
        loop {
            mass = mass + masses[level];
            level += 1;
            if levels - level == left - 1 || mass.times(left) >= remaining {
                break;
            }
        }
        cuts.push((start, level - 1));
        remaining = remaining - mass;
    }
    cuts
}

/// The balanced blocks profile `BB(n, blocks)` and its partition.
///
/// Blocks alternate in value starting from 0 on the block containing level 0,
/// so the monotonicity index is exactly `blocks - 1`.
pub fn balanced_blocks(n: usize, blocks: usize) -> Result<(LevelProfile, BlockPartition)> {
    if blocks == 0 || blocks > n + 1 {
        return Err(KmError::InvalidArgument(format!("block count {blocks} must lie in 1..={}", n + 1)));
    }
    let probs = level_probabilities(n);
    let cuts = if n <= 120 {
        let counts: Vec<u128> = (0..=n).map(|i| binom_u128(n as u64, i as u64).unwrap()).collect();
        greedy_cuts(&counts, 1u128 << n, blocks)
    } else {
        greedy_cuts(&probs, probs.iter().sum(), blocks)
    };
    let masses: Vec<f64> = cuts.iter().map(|&(lo, hi)| probs[lo..=hi].iter().sum()).collect();
    let l = blocks as f64;
    let root = (n as f64).sqrt();
    let bounds_apply = l <= root / 2.0;
    let (low, high) = ((1.0 - l / root) / l, (1.0 + l / root) / l);
    let within_bounds = masses.iter().all(|&m| m >= low - 1e-12 && m <= high + 1e-12);

    let mut values = vec![false; n + 1];
    for (b, &(lo, hi)) in cuts.iter().enumerate() {
        for v in &mut values[lo..=hi] {
            *v = b % 2 == 1;
        }
    }
    let partition = BlockPartition { n, blocks, cuts, masses, bounds_apply, within_bounds };
    Ok((LevelProfile::new(values)?, partition))
}

/// Knobs of the hidden-block construction.
///
/// Coordinates `0 .. n_left` form the block `L`, the remaining `n_right`
/// coordinates the block `R`. The middle band is `|i - n_left/2| <= mid_width`
/// with boundaries rounded to the nearest level, ties away from the centre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardFunctionParams {
    pub n: usize,
    /// Tested monotonicity order.
    pub k: usize,
    /// Order the function is far from.
    pub s: usize,
    pub r: f64,
    pub n_left: usize,
    pub n_right: usize,
    pub mid_width: f64,
    /// Number of blocks of the inner balanced blocks function.
    pub blocks: usize,
    /// 1 above the middle band (used for odd `k`).
    pub odd_variant: bool,
    pub c_split: Option<f64>,
    pub c_mid: Option<f64>,
}

impl HardFunctionParams {
    /// `n_R = round(n / (c_split r^2))`, `w = sqrt(n_L) / c_mid`, `3s` blocks.
    pub fn with_constants(n: usize, k: usize, s: usize, c_split: f64, c_mid: f64) -> Result<Self> {
        if k == 0 || s < k {
            return Err(KmError::InvalidArgument(format!("need 1 <= k <= s, got k = {k}, s = {s}")));
        }
        if !(c_split > 0.0 && c_mid > 0.0) {
            return Err(KmError::InvalidArgument("constants must be positive".into()));
        }
        let r = s as f64 / k as f64;
        let n_right = (n as f64 / (c_split * r * r)).round() as usize;
        let n_left = n - n_right.min(n);
        let p = Self {
            n,
            k,
            s,
            r,
            n_left,
            n_right: n_right.min(n),
            mid_width: (n_left as f64).sqrt() / c_mid,
            blocks: 3 * s,
            odd_variant: k % 2 == 1,
            c_split: Some(c_split),
            c_mid: Some(c_mid),
        };
        p.validate()?;
        Ok(p)
    }

    /// The default constants 625 and 100.
    pub fn standard(n: usize, k: usize, s: usize) -> Result<Self> {
        Self::with_constants(n, k, s, DEFAULT_C_SPLIT, DEFAULT_C_MID)
    }

    /// Fully explicit sizes.
    pub fn explicit(n_left: usize, n_right: usize, mid_width: f64, blocks: usize, k: usize, s: usize) -> Result<Self> {
        let p = Self {
            n: n_left + n_right,
            k,
            s,
            r: s as f64 / k.max(1) as f64,
            n_left,
            n_right,
            mid_width,
            blocks,
            odd_variant: k % 2 == 1,
            c_split: None,
            c_mid: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(KmError::Infeasible(m));
        if self.k == 0 || self.s < self.k {
            return fail(format!("need 1 <= k <= s, got k = {}, s = {}", self.k, self.s));
        }
        if self.n_left + self.n_right != self.n {
            return fail(format!("n_left + n_right = {} != n = {}", self.n_left + self.n_right, self.n));
        }
        if self.n > crate::MAX_ORACLE_DIM {
            return fail(format!("n = {} exceeds {}", self.n, crate::MAX_ORACLE_DIM));
        }
        if !(self.mid_width.is_finite() && self.mid_width >= 0.0) {
            return fail(format!("middle half-width {} must be finite and non-negative", self.mid_width));
        }
        if self.blocks == 0 || self.blocks > self.n_right + 1 {
            return fail(format!("inner block count {} must lie in 1..={} (n_right + 1)", self.blocks, self.n_right + 1));
        }
        if (self.r - self.s as f64 / self.k as f64).abs() > 1e-9 {
            return fail("r must equal s / k".into());
        }
        Ok(())
    }

    pub fn is_standard_preset(&self) -> bool {
        self.c_split == Some(DEFAULT_C_SPLIT) && self.c_mid == Some(DEFAULT_C_MID)
    }

    /// Inclusive range of left weights inside the middle band.
    pub fn mid_levels(&self) -> (usize, usize) {
        let centre = self.n_left as f64 / 2.0;
        let lo = round_half_down(centre - self.mid_width).max(0) as usize;
        let hi = (round_half_up(centre + self.mid_width) as usize).min(self.n_left);
        (lo, hi)
    }
}

/// The hidden-block function: balanced blocks on `R` when `|x|` is in the
/// middle band of `L`, 0 below it, and 0 (even `k`) or 1 (odd `k`) above it.
pub fn hard_function(params: &HardFunctionParams) -> Result<FunctionSpec> {
    params.validate()?;
    let (inner, _) = balanced_blocks(params.n_right, params.blocks)?;
    let t = TwoPart::new(params.n_left, params.mid_levels(), params.odd_variant, inner, Some(params.clone()))?;
    Ok(FunctionSpec::TwoPart(t))
}

/// A uniformly random member of the permutation orbit of [`hard_function`].
pub fn hard_family_sample<R: Rng + ?Sized>(params: &HardFunctionParams, rng: &mut R) -> Result<FunctionSpec> {
    let f = hard_function(params)?;
    let sigma = Permutation::random(params.n, rng);
    compose_permutation(&f, &sigma)
}

/// Level ranges of the two bands of [`intro_band_function`].
pub fn band_levels(n: usize) -> Result<[(usize, usize); 2]> {
    if n < 16 {
        return Err(KmError::InvalidArgument(format!("band function needs n >= 16, got {n}")));
    }
    let half = n as f64 / 2.0;
    let root = (n as f64).sqrt();
    let lower = (round_half_down(half - 2.0 * root), round_half_down(half - root));
    let upper = (round_half_up(half + root), round_half_up(half + 2.0 * root));
    let n = n as i64;
    if lower.0 < 1 || upper.1 > n - 1 {
        return Err(KmError::Infeasible(format!("bands {lower:?} and {upper:?} reach the top or bottom level")));
    }
    if lower.0 > lower.1 || upper.0 > upper.1 || lower.1 + 1 >= upper.0 {
        return Err(KmError::Infeasible(format!("bands {lower:?} and {upper:?} are empty or touch")));
    }
    Ok([(lower.0 as usize, lower.1 as usize), (upper.0 as usize, upper.1 as usize)])
}

/// 1 exactly on the levels `[n/2 - 2 sqrt n, n/2 - sqrt n]` and
/// `[n/2 + sqrt n, n/2 + 2 sqrt n]`.
pub fn intro_band_function(n: usize) -> Result<LevelProfile> {
    let bands = band_levels(n)?;
    let values = (0..=n).map(|i| bands.iter().any(|&(lo, hi)| (lo..=hi).contains(&i))).collect();
    LevelProfile::new(values)
}
