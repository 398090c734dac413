//! Chains seen through a two-part function: only the pair of block weights
//! matters, so a chain is a monotone lattice path from `(0,0)` to
//! `(n_L, n_R)` and a uniform chain is a uniformly random such path.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::boolfn::{FunctionSpec, TwoPart};
use crate::error::{check_dim, check_max_dim, KmError, Result};
use crate::exec::{map_chunks, stream_rng, Execution};
use crate::generators::{hard_function, HardFunctionParams};
use crate::hypercube::Chain;
use crate::kmono::alternation_step;

use super::hypergeom::Hypergeometric;

/// Largest `n_L * n_R * k` the exact lattice DP accepts.
pub const STATE_BUDGET: u128 = 1_000_000_000;

/// A monotone lattice path, stored as the sorted step indices (0-based, out
/// of `n_L + n_R`) at which a right-block coordinate is flipped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePath {
    n_left: usize,
    n_right: usize,
    right_steps: Vec<u32>,
}

impl LatticePath {
    pub fn new(n_left: usize, n_right: usize, mut right_steps: Vec<u32>) -> Result<Self> {
        right_steps.sort_unstable();
        right_steps.dedup();
        let n = n_left + n_right;
        if right_steps.len() != n_right || right_steps.last().is_some_and(|&s| s as usize >= n) {
            return Err(KmError::InvalidArgument(format!("need {n_right} distinct right steps below {n}")));
        }
        Ok(Self { n_left, n_right, right_steps })
    }

    /// The path traced by a full chain whose left block is `0 .. n_left`.
    pub fn from_chain(n_left: usize, z: &Chain) -> Result<Self> {
        if !z.is_full() {
            return Err(KmError::InvalidArgument("a full chain is required".into()));
        }
        let steps = z.flips().iter().enumerate().filter(|&(_, &c)| c as usize >= n_left).map(|(i, _)| i as u32).collect();
        Self::new(n_left, z.n() - n_left, steps)
    }

    pub fn right_steps(&self) -> &[u32] {
        &self.right_steps
    }

    /// For every right weight `j`, the range of left weights visited while
    /// the right weight equals `j`.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.n_left + self.n_right;
        (0..=self.n_right).map(move |j| {
            let first = if j == 0 { 0 } else { self.right_steps[j - 1] as usize + 1 };
            let last = if j == self.n_right { n } else { self.right_steps[j] as usize };
            (j, first - j, last - j)
        })
    }

    /// `V(Z)`: right weights attained while the left weight lies in `mid`.
    pub fn v_entry(&self, mid: (usize, usize)) -> VEntry {
        let mut e = VEntry::default();
        for (j, a0, a1) in self.segments() {
            if a0 <= mid.1 && a1 >= mid.0 {
                e.min.get_or_insert(j);
                e.max = Some(j);
            }
        }
        e
    }

    /// Alternation index from 1 of `f` along the path.
    pub fn alternation(&self, f: &TwoPart) -> usize {
        let (lo, hi) = f.mid();
        let mut l = 0;
        for (j, a0, a1) in self.segments() {
            if a0 < lo {
                l = alternation_step(l, false);
            }
            if a0 <= hi && a1 >= lo {
                l = alternation_step(l, f.inner().value(j));
            }
            if a1 > hi {
                l = alternation_step(l, f.above_mid());
            }
        }
        l
    }
}

/// A uniformly random monotone path to `(n_left, n_right)`.
pub fn sample_lattice_path<R: Rng + ?Sized>(n_left: usize, n_right: usize, rng: &mut R) -> LatticePath {
    let n = n_left + n_right;
    let mut steps: Vec<u32> = rand::seq::index::sample(rng, n, n_right).into_iter().map(|i| i as u32).collect();
    steps.sort_unstable();
    LatticePath { n_left, n_right, right_steps: steps }
}

/// `V(Z)` as the interval `[min, max]` of right weights, empty when the
/// chain never has its left weight in the middle band.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VEntry {
    pub min: Option<usize>,
    pub max: Option<usize>,
}

impl VEntry {
    pub fn size(&self) -> usize {
        match (self.min, self.max) {
            (Some(a), Some(b)) => b - a + 1,
            _ => 0,
        }
    }
}

/// `V(Z)` of a full chain for the hard function with `params`.
pub fn v_of_chain(params: &HardFunctionParams, z: &Chain) -> Result<VEntry> {
    check_dim(params.n, z.n())?;
    Ok(LatticePath::from_chain(params.n_left, z)?.v_entry(params.mid_levels()))
}

/// One simulated uniform chain: its `V(Z)` and its alternation index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PathTrial {
    pub v: VEntry,
    pub alternation: usize,
}

/// Sizes of `V(Z)` over many chains.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VStat {
    pub v_size: Vec<usize>,
    pub histogram: BTreeMap<usize, u64>,
}

impl VStat {
    pub fn from_entries<'a>(entries: impl IntoIterator<Item = &'a VEntry>) -> Self {
        let mut s = VStat::default();
        for e in entries {
            s.v_size.push(e.size());
            *s.histogram.entry(e.size()).or_default() += 1;
        }
        s
    }

    /// Fraction of trials with `|V(Z)| >= m`.
    pub fn fraction_at_least(&self, m: usize) -> f64 {
        if self.v_size.is_empty() {
            return 0.0;
        }
        self.v_size.iter().filter(|&&v| v >= m).count() as f64 / self.v_size.len() as f64
    }
}

/// `trials` uniform chains of the hard function, simulated as lattice paths
/// in `O(n_R)` each. Trial `i` lives in chunk `i / CHUNK_SIZE`, whose
/// generator is stream `chunk` of `seed`.
pub fn path_trials(params: &HardFunctionParams, trials: u64, seed: u64, exec: Execution) -> Result<Vec<PathTrial>> {
    let f = match hard_function(params)? {
        FunctionSpec::TwoPart(t) => t,
        _ => unreachable!("hard functions are two-part"),
    };
    let mid = params.mid_levels();
    let chunks = map_chunks(exec, trials, |c, _, count| {
        let mut rng = stream_rng(seed, c);
        (0..count)
            .map(|_| {
                let p = sample_lattice_path(params.n_left, params.n_right, &mut rng);
                PathTrial { v: p.v_entry(mid), alternation: p.alternation(&f) }
            })
            .collect::<Vec<_>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// Exact chain rejection probability for a two-part function together with
/// the instance it was computed on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactRejection {
    pub p: f64,
    pub dp_dimensions: (usize, usize, usize),
    pub params: Option<HardFunctionParams>,
    /// `Pr[X >= t]` for `X = H(n_R, n_L - mid_lo + n_R, round(sqrt(n)/3))`,
    /// the tail obtained by assuming the chain enters the middle band with
    /// right weight 0.
    pub assumption_tail: Option<f64>,
}

/// Probability that a uniform chain reveals a violation to k-monotonicity
/// of `f`, by dynamic programming over `(left weight, right weight,
/// alternation capped at k+1)`.
pub fn exact_two_part_rejection(f: &TwoPart, k: usize) -> Result<f64> {
    let (nl, nr) = (f.n_left(), f.n_right());
    let work = nl as u128 * nr as u128 * k as u128;
    if work > STATE_BUDGET {
        return Err(KmError::StateBudgetExceeded { states: work, budget: STATE_BUDGET });
    }
    let n = nl + nr;
    let s = k + 2;
    let cap = |l: usize| l.min(k + 1);
    let mut prev = vec![0.0f64; (nr + 1) * s];
    let mut cur = vec![0.0f64; (nr + 1) * s];
    let mut incoming = vec![0.0f64; s];
    for a in 0..=nl {
        for b in 0..=nr {
            incoming.iter_mut().for_each(|x| *x = 0.0);
            if a == 0 && b == 0 {
                incoming[0] = 1.0;
            }
            if a > 0 {
                let p = (nl - a + 1) as f64 / (n - a + 1 - b) as f64;
                for (x, &m) in incoming.iter_mut().zip(&prev[b * s..(b + 1) * s]) {
                    *x += p * m;
                }
            }
            if b > 0 {
                let p = (nr - b + 1) as f64 / (n - a - b + 1) as f64;
                let (done, _) = cur.split_at(b * s);
                for (x, &m) in incoming.iter_mut().zip(&done[(b - 1) * s..]) {
                    *x += p * m;
                }
            }
            let v = f.value_at(a, b);
            let out = &mut cur[b * s..(b + 1) * s];
            out.iter_mut().for_each(|x| *x = 0.0);
            for (l, &m) in incoming.iter().enumerate() {
                out[cap(alternation_step(l, v))] += m;
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[nr * s + k + 1].clamp(0.0, 1.0))
}

/// [`exact_two_part_rejection`] for the hard function with `params`.
pub fn exact_chain_rejection_prob(params: &HardFunctionParams, k: usize) -> Result<ExactRejection> {
    let f = match hard_function(params)? {
        FunctionSpec::TwoPart(t) => t,
        _ => unreachable!("hard functions are two-part"),
    };
    let p = exact_two_part_rejection(&f, k)?;
    Ok(ExactRejection {
        p,
        dp_dimensions: (params.n_left, params.n_right, k),
        params: Some(params.clone()),
        assumption_tail: assumption_tail(params, k),
    })
}

fn assumption_tail(params: &HardFunctionParams, k: usize) -> Option<f64> {
    let (lo, _) = params.mid_levels();
    let population = (params.n_left - lo + params.n_right) as u64;
    let draws = ((params.n as f64).sqrt() / 3.0).round() as u64;
    let h = Hypergeometric::new(params.n_right as u64, population, draws.min(population)).ok()?;
    let t = k as f64 * (params.n_right as f64).sqrt() / (20.0 * params.s as f64);
    Some(h.tail(t.ceil() as u64))
}

/// Probability that a uniform chain reveals a violation, by dynamic
/// programming over all points of the cube (`n <= 20`). Works for any
/// function kind.
pub fn exact_table_rejection_prob(f: &FunctionSpec, k: usize) -> Result<f64> {
    let n = f.n();
    check_max_dim(n, 20)?;
    let states = (1u128 << n) * (k as u128 + 2);
    if states > 1 << 26 {
        return Err(KmError::StateBudgetExceeded { states, budget: 1 << 26 });
    }
    let t = f.truth_table()?;
    let s = k + 2;
    let size = 1usize << n;
    let mut mass = vec![0.0f64; size * s];
    mass[alternation_step(0, t.get(0)).min(k + 1)] = 1.0;
    for x in 0..size {
        let free = n - x.count_ones() as usize;
        if free == 0 {
            continue;
        }
        let p = 1.0 / free as f64;
        for bit in (0..n).map(|i| 1usize << i).filter(|b| x & b == 0) {
            let y = x | bit;
            let v = t.get(y as u64);
            for l in 0..s {
                let m = mass[x * s + l];
                if m != 0.0 {
                    mass[y * s + alternation_step(l, v).min(k + 1)] += p * m;
                }
            }
        }
    }
    Ok(mass[(size - 1) * s + k + 1].clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{LevelProfile, QueryLedger};
    use crate::exec::rng_from_seed;
    use crate::generators::{balanced_blocks, intro_band_function};
    use crate::hypercube::sample_uniform_chain;
    use crate::kmono::alternation_index;

    fn small_params() -> HardFunctionParams {
        HardFunctionParams::explicit(8, 4, 1.0, 3, 2, 2).unwrap()
    }

    #[test]
    fn constructed_chains() {
        let p = small_params();
        let left_first: Vec<u32> = (0..12).collect();
        let v = v_of_chain(&p, &Chain::full(12, left_first).unwrap()).unwrap();
        assert_eq!((v.min, v.max, v.size()), (Some(0), Some(0), 1));
        let right_first: Vec<u32> = (8..12).chain(0..8).collect();
        let v = v_of_chain(&p, &Chain::full(12, right_first).unwrap()).unwrap();
        assert_eq!((v.min, v.max, v.size()), (Some(4), Some(4), 1));
    }

    #[test]
    fn path_alternation_matches_chain_values() {
        let p = small_params();
        let f = hard_function(&p).unwrap();
        let FunctionSpec::TwoPart(t) = &f else { panic!() };
        let mut rng = rng_from_seed(1);
        for _ in 0..300 {
            let z = sample_uniform_chain(12, &mut rng).unwrap();
            let vals = f.values_along(&z, &mut QueryLedger::new()).unwrap();
            let path = LatticePath::from_chain(8, &z).unwrap();
            assert_eq!(path.alternation(t), alternation_index(&vals));
            // V(Z) directly from the chain
            let (mut a, mut b) = (0usize, 0usize);
            let mut seen = Vec::new();
            let (lo, hi) = p.mid_levels();
            for (i, &c) in std::iter::once(&u32::MAX).chain(z.flips()).enumerate() {
                if i > 0 {
                    if (c as usize) < 8 {
                        a += 1
                    } else {
                        b += 1
                    }
                }
                if (lo..=hi).contains(&a) {
                    seen.push(b);
                }
            }
            let v = path.v_entry((lo, hi));
            assert_eq!(v.min, seen.iter().min().copied());
            assert_eq!(v.max, seen.iter().max().copied());
        }
    }

    #[test]
    fn lattice_dp_agrees_with_cube_dp() {
        let p = small_params();
        let f = hard_function(&p).unwrap();
        let FunctionSpec::TwoPart(t) = &f else { panic!() };
        for k in 0..4 {
            let a = exact_two_part_rejection(t, k).unwrap();
            let b = exact_table_rejection_prob(&f, k).unwrap();
            assert!((a - b).abs() < 1e-12, "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn degenerate_cases() {
        let (bb, _) = balanced_blocks(30, 4).unwrap();
        let open = TwoPart::embed_symmetric(bb);
        assert!((exact_two_part_rejection(&open, 2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(exact_two_part_rejection(&open, 3).unwrap(), 0.0);
        let zero = TwoPart::new(10, (3, 7), false, LevelProfile::constant(10, false), None).unwrap();
        assert_eq!(exact_two_part_rejection(&zero, 1).unwrap(), 0.0);
        let band = TwoPart::embed_symmetric(intro_band_function(100).unwrap());
        assert!((exact_two_part_rejection(&band, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let p = HardFunctionParams::explicit(1_000_000, 2000, 10.0, 6, 2, 2).unwrap();
        assert!(matches!(exact_chain_rejection_prob(&p, 2), Err(KmError::StateBudgetExceeded { .. })));
    }

    #[test]
    fn trials_are_deterministic_across_execution() {
        let p = small_params();
        let a = path_trials(&p, 3000, 4, Execution::Parallel).unwrap();
        let b = path_trials(&p, 3000, 4, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        let stat = VStat::from_entries(a.iter().map(|t| &t.v));
        assert_eq!(stat.histogram.values().sum::<u64>(), 3000);
    }
}
