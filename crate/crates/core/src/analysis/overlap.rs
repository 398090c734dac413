//! Expected number of right-block flips in the window after a chain enters
//! the middle band, against the threshold `t`.

use serde::Serialize;

use crate::generators::{HardFunctionParams, DEFAULT_C_MID, DEFAULT_C_SPLIT};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Overlap {
    /// `E[X] = (sqrt(n)/3) n_R / (n_L/2 + w + n_R)`.
    pub e: f64,
    /// `t = k sqrt(n_R) / (20 s)`.
    pub t: f64,
    /// Default constants, `r >= 1` and `n_L > 2n/3`.
    pub preconditions_hold: bool,
    /// `(4/15) t <= E <= (4/5) t`, only when the preconditions hold.
    pub bracket_ok: Option<bool>,
}

/// With the default constants the block sizes are taken as
/// the real numbers `n / (c r^2)` and `n - n / (c r^2)`; explicit parameter
/// sets use their integer sizes.
pub fn expected_overlap(params: &HardFunctionParams) -> Overlap {
    if let (Some(c_split), Some(c_mid)) = (params.c_split, params.c_mid) {
        return overlap_at(params.n, params.k, params.s, c_split, c_mid);
    }
    finish(params.n as f64, params.n_left as f64, params.n_right as f64, params.mid_width, params.k, params.s, false)
}

/// [`expected_overlap`] straight from the constants, without building (or
/// validating) a parameter set.
pub fn overlap_at(n: usize, k: usize, s: usize, c_split: f64, c_mid: f64) -> Overlap {
    let nf = n as f64;
    let r = s as f64 / k as f64;
    let n_right = nf / (c_split * r * r);
    let n_left = nf - n_right;
    let standard = c_split == DEFAULT_C_SPLIT && c_mid == DEFAULT_C_MID && r >= 1.0;
    finish(nf, n_left, n_right, n_left.sqrt() / c_mid, k, s, standard)
}

fn finish(n: f64, n_left: f64, n_right: f64, w: f64, k: usize, s: usize, standard: bool) -> Overlap {
    let den = n_left / 2.0 + w + n_right;
    let e = if den > 0.0 { n.sqrt() / 3.0 * n_right / den } else { 0.0 };
    let t = k as f64 * n_right.sqrt() / (20.0 * s as f64);
    let preconditions_hold = standard && n_left > 2.0 * n / 3.0;
    let bracket_ok = preconditions_hold.then(|| 4.0 / 15.0 * t <= e && e <= 0.8 * t);
    Overlap { e, t, preconditions_hold, bracket_ok }
}
