//! Alternation analysis, the monotonicity index, violations on chains and
//! certified bounds on the distance to k-monotonicity.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::boolfn::{FunctionSpec, LevelProfile, QueryLedger, TruthTable};
use crate::error::{check_dim, check_max_dim, KmError, Result};
use crate::hypercube::{symmetric_chain_decomposition, Chain, Point};
use crate::numeric::{binomial_row, DyadicFraction};
use crate::MAX_MATERIALIZED_DIM;

/// Longest alternating subsequence so far after reading `v`, given the
/// length `len` before it. Even lengths end on 0 (or are empty), odd on 1.
#[inline]
pub fn alternation_step(len: usize, v: bool) -> usize {
    if v != (len % 2 == 1) {
        len + 1
    } else {
        len
    }
}

/// Length of the longest alternating subsequence that begins with 1.
pub fn alternation_index(values: &[bool]) -> usize {
    values.iter().fold(0, |l, &v| alternation_step(l, v))
}

/// Positions realizing [`alternation_index`]: the first element of every
/// run, starting at the first 1.
pub fn alternation_positions(values: &[bool]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if v != (out.len() % 2 == 1) {
            out.push(i);
        }
    }
    out
}

/// `km(f)`: the largest alternation index over all chains of the cube.
///
/// Every point carries the best alternation length over chains ending there;
/// the step is monotone in the length, so the best predecessor suffices.
pub fn monotonicity_index(f: &FunctionSpec) -> Result<usize> {
    check_max_dim(f.n(), MAX_MATERIALIZED_DIM)?;
    Ok(km_table(&f.truth_table()?))
}

fn km_table(t: &TruthTable) -> usize {
    let n = t.n();
    let size = 1usize << n;
    let mut g = vec![0u8; size];
    for x in 0..size {
        let mut best = 0u8;
        let mut rest = x;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            best = best.max(g[x ^ bit]);
            rest ^= bit;
        }
        g[x] = alternation_step(best as usize, t.get(x as u64)) as u8;
    }
    g[size - 1] as usize
}

/// Ascending comparable points with values starting at 1 and alternating.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ViolationTuple {
    points: Vec<Point>,
    values: Vec<bool>,
}

impl ViolationTuple {
    pub fn new(points: Vec<Point>, values: Vec<bool>) -> Result<Self> {
        if points.is_empty() || points.len() != values.len() {
            return Err(KmError::InvalidArgument("a violation needs matching nonempty points and values".into()));
        }
        for w in points.windows(2) {
            if w[0] == w[1] || !w[0].precedes(&w[1]) {
                return Err(KmError::InvalidArgument("violation points must be strictly ascending".into()));
            }
        }
        if values.iter().enumerate().any(|(i, &v)| v != (i % 2 == 0)) {
            return Err(KmError::InvalidArgument("violation values must read 1, 0, 1, ...".into()));
        }
        Ok(Self { points, values })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn levels(&self) -> Vec<usize> {
        self.points.iter().map(Point::weight).collect()
    }

    /// Whether `f` agrees with the recorded values.
    pub fn holds_for(&self, f: &FunctionSpec) -> Result<bool> {
        for (p, &v) in self.points.iter().zip(&self.values) {
            if f.value(p)? != v {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A `(k+1)`-point violation on `z`, if the values along `z` alternate at
/// least `k+1` times from 1. Queries every point of `z`.
pub fn chain_violation(f: &FunctionSpec, z: &Chain, k: usize, ledger: &mut QueryLedger) -> Result<Option<ViolationTuple>> {
    check_dim(f.n(), z.n())?;
    let values = f.values_along(z, ledger)?;
    Ok(violation_from_values(z, &values, k))
}

pub(crate) fn violation_from_values(z: &Chain, values: &[bool], k: usize) -> Option<ViolationTuple> {
    let mut pos = alternation_positions(values);
    if pos.len() < k + 1 {
        return None;
    }
    pos.truncate(k + 1);
    let mut points = Vec::with_capacity(k + 1);
    let mut want = pos.iter().peekable();
    for (i, p) in z.points().enumerate() {
        match want.peek() {
            Some(&&j) if j == i => {
                points.push(p);
                want.next();
            }
            Some(_) => {}
            None => break,
        }
    }
    let vals = (0..=k).map(|i| i % 2 == 0).collect();
    Some(ViolationTuple::new(points, vals).expect("chain points are strictly ascending"))
}

/// Fewest positions to flip so the alternation index drops to `k` or less,
/// by exhaustive search (at most 16 values).
pub fn min_flips_to_reduce(values: &[bool], k: usize) -> Result<usize> {
    let m = values.len();
    if m > 16 {
        return Err(KmError::InvalidArgument(format!("exhaustive flip search needs at most 16 values, got {m}")));
    }
    let base: u32 = values.iter().enumerate().map(|(i, &v)| (v as u32) << i).sum();
    let mut best = m;
    for mask in 0u32..(1 << m) {
        let c = mask.count_ones() as usize;
        if c >= best {
            continue;
        }
        let x = base ^ mask;
        let l = (0..m).fold(0, |l, i| alternation_step(l, x >> i & 1 == 1));
        if l <= k {
            best = c;
        }
    }
    Ok(best)
}

/// `ceil((m - k) / 2)` flips are needed inside a fully alternating `m`-point
/// tuple, since each flip shortens the alternation by at most 2.
pub fn forced_flips(m: usize, k: usize) -> usize {
    m.saturating_sub(k).div_ceil(2)
}

/// Disjoint violation tuples and the distance lower bound they certify.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingCertificate {
    pub n: usize,
    pub target_k: usize,
    pub tuples: Vec<ViolationTuple>,
    pub forced_flips_per_tuple: Vec<usize>,
    #[serde(skip_deserializing, default = "zero_bound")]
    pub bound: DyadicFraction,
}

fn zero_bound() -> DyadicFraction {
    DyadicFraction::zero(0)
}

impl MatchingCertificate {
    pub fn total_forced(&self) -> u64 {
        self.forced_flips_per_tuple.iter().map(|&c| c as u64).sum()
    }

    /// Checks disjointness, the recorded values against `f`, the flip counts
    /// against the formula (and the exhaustive search for short tuples) and
    /// the bound arithmetic.
    pub fn verify(&self, f: &FunctionSpec) -> Result<()> {
        let bad = |m: String| Err(KmError::InvalidArgument(m));
        check_dim(f.n(), self.n)?;
        if self.tuples.len() != self.forced_flips_per_tuple.len() {
            return bad("one flip count per tuple".into());
        }
        let mut seen = HashSet::new();
        let mut cache = HashMap::new();
        for (t, &c) in self.tuples.iter().zip(&self.forced_flips_per_tuple) {
            ViolationTuple::new(t.points.clone(), t.values.clone())?;
            if !t.holds_for(f)? {
                return bad(format!("tuple at levels {:?} does not match f", t.levels()));
            }
            for p in &t.points {
                if !seen.insert(p.clone()) {
                    return bad(format!("point {p:?} lies in two tuples"));
                }
            }
            if c != forced_flips(t.len(), self.target_k) || c != brute_forced(&mut cache, t.len(), self.target_k)? {
                return bad(format!("flip count {c} is wrong for a {}-point tuple", t.len()));
            }
        }
        let expect = DyadicFraction::new(BigUint::from(self.total_forced()), self.n as u32);
        if expect != self.bound {
            return bad(format!("bound {} should be {expect}", self.bound));
        }
        Ok(())
    }
}

fn brute_forced(cache: &mut HashMap<(usize, usize), usize>, m: usize, k: usize) -> Result<usize> {
    if m > 16 {
        return Ok(forced_flips(m, k));
    }
    if let Some(&c) = cache.get(&(m, k)) {
        return Ok(c);
    }
    let alt: Vec<bool> = (0..m).map(|i| i % 2 == 0).collect();
    let c = min_flips_to_reduce(&alt, k)?;
    cache.insert((m, k), c);
    Ok(c)
}

/// Lower bound on the distance from `f` to k-monotonicity from a matching of
/// disjoint violations, extracted greedily along a symmetric chain
/// decomposition. Each chain is peeled repeatedly: the first point of every
/// run from the first remaining 1 forms a tuple while it has at least `k+1`
/// points.
pub fn matching_lower_bound(f: &FunctionSpec, k: usize) -> Result<MatchingCertificate> {
    let n = f.n();
    check_max_dim(n, MAX_MATERIALIZED_DIM)?;
    let table = f.truth_table()?;
    let mut tuples = Vec::new();
    let mut forced = Vec::new();
    let mut cache = HashMap::new();
    if n == 0 {
        if table.get(0) && k == 0 {
            tuples.push(ViolationTuple::new(vec![Point::zeros(0)], vec![true])?);
            forced.push(1);
        }
    } else {
        let scd = symmetric_chain_decomposition(n)?;
        for c in 0..scd.len() {
            let mut idx: Vec<u32> = scd.chain_indices(c).collect();
            loop {
                let vals: Vec<bool> = idx.iter().map(|&x| table.get(x as u64)).collect();
                let pos = alternation_positions(&vals);
                if pos.len() < k + 1 {
                    break;
                }
                let points = pos.iter().map(|&i| Point::from_index(n, idx[i] as u64)).collect::<Result<Vec<_>>>()?;
                let values = (0..pos.len()).map(|i| i % 2 == 0).collect();
                let m = pos.len();
                let c = forced_flips(m, k);
                if c != brute_forced(&mut cache, m, k)? {
                    return Err(KmError::InvalidArgument(format!("flip formula disagrees at m = {m}, k = {k}")));
                }
                tuples.push(ViolationTuple::new(points, values)?);
                forced.push(c);
                let taken: HashSet<usize> = pos.into_iter().collect();
                idx = idx.into_iter().enumerate().filter(|(i, _)| !taken.contains(i)).map(|(_, x)| x).collect();
            }
        }
    }
    let total: u64 = forced.iter().map(|&c| c as u64).sum();
    Ok(MatchingCertificate {
        n,
        target_k: k,
        tuples,
        forced_flips_per_tuple: forced,
        bound: DyadicFraction::new(BigUint::from(total), n as u32),
    })
}

/// Distance from a symmetric function to the nearest symmetric k-monotone
/// function, with one minimizer. An upper bound on the distance to `M_k`.
pub fn symmetric_distance(profile: &LevelProfile, k: usize) -> (DyadicFraction, LevelProfile) {
    let n = profile.n();
    let weights = binomial_row(n);
    let states = k + 1;
    // cost[l] = cheapest prefix with alternation index l
    let mut cost: Vec<Option<BigUint>> = vec![None; states];
    let mut choice: Vec<Vec<(usize, bool)>> = Vec::with_capacity(n + 1);
    let mut start: Vec<Option<BigUint>> = vec![None; states];
    start[0] = Some(BigUint::zero());
    for (i, w) in weights.iter().enumerate() {
        let mut next: Vec<Option<BigUint>> = vec![None; states];
        let mut back = vec![(usize::MAX, false); states];
        let prev = if i == 0 { &start } else { &cost };
        for (l, c) in prev.iter().enumerate() {
            let Some(c) = c else { continue };
            for u in [false, true] {
                let nl = alternation_step(l, u);
                if nl > k {
                    continue;
                }
                let nc = if u != profile.value(i) { c + w } else { c.clone() };
                if next[nl].as_ref().is_none_or(|old| nc < *old) {
                    next[nl] = Some(nc);
                    back[nl] = (l, u);
                }
            }
        }
        cost = next;
        choice.push(back);
    }
    let (mut l, best) = cost
        .iter()
        .enumerate()
        .filter_map(|(l, c)| c.as_ref().map(|c| (l, c.clone())))
        .min_by(|a, b| a.1.cmp(&b.1))
        .expect("the all-zero profile is always feasible");
    let mut values = vec![false; n + 1];
    for i in (0..=n).rev() {
        let (pl, u) = choice[i][l];
        values[i] = u;
        l = pl;
    }
    let argmin = LevelProfile::new(values).expect("length n + 1");
    (DyadicFraction::new(best, n as u32), argmin)
}

fn km_tables(n: usize) -> &'static [u8] {
    static TABLES: [OnceLock<Vec<u8>>; 5] = [const { OnceLock::new() }; 5];
    TABLES[n].get_or_init(|| {
        let size = 1u64 << n;
        (0u64..1 << size)
            .map(|bits| {
                let t = TruthTable::from_fn(n, |x| bits >> x & 1 == 1).expect("n <= 4");
                km_table(&t) as u8
            })
            .collect()
    })
}

/// Exact distance to k-monotonicity by exhaustion over all `2^(2^n)`
/// functions (`n <= 4`).
pub fn exact_distance_small(f: &FunctionSpec, k: usize) -> Result<DyadicFraction> {
    let n = f.n();
    check_max_dim(n, 4)?;
    let size = 1u64 << n;
    let bits: u64 = (0..size).filter(|&x| f.value_at_index(x)).map(|x| 1u64 << x).sum();
    let best = km_tables(n)
        .iter()
        .enumerate()
        .filter(|&(_, &km)| km as usize <= k)
        .map(|(g, _)| (g as u64 ^ bits).count_ones())
        .min()
        .expect("the zero function is k-monotone");
    Ok(DyadicFraction::new(BigUint::from(best), n as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::rng_from_seed;
    use crate::generators::{balanced_blocks, intro_band_function};
    use crate::hypercube::{all_full_chains, sample_uniform_chain};

    fn bits(s: &[u8]) -> Vec<bool> {
        s.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn alternation_examples() {
        assert_eq!(alternation_index(&[]), 0);
        assert_eq!(alternation_index(&bits(&[0, 0, 0])), 0);
        assert_eq!(alternation_index(&bits(&[0, 0, 1])), 1);
        assert_eq!(alternation_index(&bits(&[1, 0, 1])), 3);
        assert_eq!(alternation_index(&bits(&[0, 1, 1, 0, 0, 1])), 3);
        assert_eq!(alternation_positions(&bits(&[0, 1, 1, 0, 0, 1])), vec![1, 3, 5]);
    }

    #[test]
    fn km_small_examples() {
        assert_eq!(monotonicity_index(&FunctionSpec::constant(3, false)).unwrap(), 0);
        assert_eq!(monotonicity_index(&FunctionSpec::constant(3, true)).unwrap(), 1);
        let or = TruthTable::from_hex(2, "e").unwrap();
        assert_eq!(monotonicity_index(&FunctionSpec::TruthTable(or)).unwrap(), 1);
        let parity = TruthTable::from_fn(3, |x| x.count_ones() % 2 == 1).unwrap();
        assert_eq!(monotonicity_index(&FunctionSpec::TruthTable(parity)).unwrap(), 3);
    }

    #[test]
    fn km_matches_chain_enumeration() {
        let mut rng = rng_from_seed(3);
        use rand::Rng;
        for _ in 0..40 {
            let t = TruthTable::from_fn(4, |_| rng.random()).unwrap();
            let f = FunctionSpec::TruthTable(t);
            let mut ledger = QueryLedger::new();
            let best = all_full_chains(4)
                .unwrap()
                .iter()
                .map(|c| alternation_index(&f.values_along(c, &mut ledger).unwrap()))
                .max()
                .unwrap();
            assert_eq!(monotonicity_index(&f).unwrap(), best);
        }
    }

    #[test]
    fn km_of_balanced_blocks() {
        for n in [8, 13] {
            for l in 1..=6 {
                let (p, _) = balanced_blocks(n, l).unwrap();
                assert_eq!(monotonicity_index(&FunctionSpec::Symmetric(p)).unwrap(), l - 1);
            }
        }
    }

    #[test]
    fn chain_violation_on_band() {
        let f = FunctionSpec::Symmetric(intro_band_function(100).unwrap());
        let mut rng = rng_from_seed(5);
        let mut ledger = QueryLedger::new();
        let z = sample_uniform_chain(100, &mut rng).unwrap();
        let v = chain_violation(&f, &z, 2, &mut ledger).unwrap().unwrap();
        assert_eq!(v.values(), &[true, false, true]);
        assert!(v.holds_for(&f).unwrap());
        assert_eq!(ledger.count(), 101);
        assert!(chain_violation(&FunctionSpec::constant(100, false), &z, 0, &mut ledger).unwrap().is_none());
    }

    #[test]
    fn flips_examples() {
        assert_eq!(min_flips_to_reduce(&bits(&[1, 0, 1, 0, 1]), 1).unwrap(), 2);
        assert_eq!(min_flips_to_reduce(&bits(&[0, 1, 1]), 1).unwrap(), 0);
        assert!(min_flips_to_reduce(&[false; 17], 1).is_err());
        assert_eq!(forced_flips(5, 1), 2);
        assert_eq!(forced_flips(2, 3), 0);
    }

    #[test]
    fn matching_on_monotone_is_empty() {
        let or = FunctionSpec::TruthTable(TruthTable::from_fn(5, |x| x != 0).unwrap());
        let cert = matching_lower_bound(&or, 1).unwrap();
        assert!(cert.tuples.is_empty());
        assert!(cert.bound.is_zero());
    }

    #[test]
    fn matching_bb16_is_tight() {
        let (p, _) = balanced_blocks(16, 6).unwrap();
        let f = FunctionSpec::Symmetric(p.clone());
        let cert = matching_lower_bound(&f, 1).unwrap();
        cert.verify(&f).unwrap();
        assert_eq!(cert.bound, DyadicFraction::new(19448u32, 16));
        assert_eq!(symmetric_distance(&p, 1).0, cert.bound);
    }

    #[test]
    fn verify_rejects_overlap() {
        let f = FunctionSpec::Symmetric(LevelProfile::from_bits(&[1, 0, 1]).unwrap());
        let mut cert = matching_lower_bound(&f, 1).unwrap();
        assert!(!cert.tuples.is_empty());
        cert.verify(&f).unwrap();
        cert.tuples.push(cert.tuples[0].clone());
        cert.forced_flips_per_tuple.push(cert.forced_flips_per_tuple[0]);
        assert!(cert.verify(&f).is_err());
    }

    #[test]
    fn symmetric_distance_examples() {
        let p = LevelProfile::from_bits(&[0, 1, 0]).unwrap();
        let (d, arg) = symmetric_distance(&p, 1);
        assert_eq!(d, DyadicFraction::new(1u32, 2));
        assert_eq!(arg.bits(), vec![0, 1, 1]);
        let zero = LevelProfile::constant(9, false);
        assert!(symmetric_distance(&zero, 0).0.is_zero());
        let (d, arg) = symmetric_distance(&LevelProfile::constant(3, true), 0);
        assert_eq!(d, DyadicFraction::new(8u32, 3));
        assert_eq!(alternation_index(arg.values()), 0);
    }

    #[test]
    fn exact_small_examples() {
        let parity = FunctionSpec::TruthTable(TruthTable::from_fn(2, |x| x.count_ones() == 1).unwrap());
        assert_eq!(exact_distance_small(&parity, 1).unwrap(), DyadicFraction::new(1u32, 2));
        assert!(exact_distance_small(&parity, 2).unwrap().is_zero());
        assert!(exact_distance_small(&FunctionSpec::constant(5, true), 1).is_err());
    }
}
