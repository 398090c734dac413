//! Points, chains, chain samplers and the symmetric chain decomposition of
//! `{0,1}^n`.
//!
//! Coordinates are 0-based in the API (`0 .. n`), and coordinate 0 is the
//! least significant bit of the integer encoding. Serialized forms (hex
//! points, JSON flip lists) use 1-based coordinates, matching the usual
//! notation `x_1 .. x_n`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, check_max_dim, KmError, Result};
use crate::{MAX_MATERIALIZED_DIM, MAX_ORACLE_DIM};

/// A vertex of the hypercube.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    n: usize,
    words: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl Point {
    pub fn zeros(n: usize) -> Self {
        Self { n, words: vec![0; n.div_ceil(64)] }
    }

    pub fn ones(n: usize) -> Self {
        let mut p = Self { n, words: vec![u64::MAX; n.div_ceil(64)] };
        p.mask_tail();
        p
    }

    /// The point whose integer encoding is `index` (requires `n <= 64`).
    pub fn from_index(n: usize, index: u64) -> Result<Self> {
        check_max_dim(n, 64)?;
        if n < 64 && index >> n != 0 {
            return Err(KmError::InvalidArgument(format!("index {index} out of range for n = {n}")));
        }
        let mut p = Self::zeros(n);
        if n > 0 {
            p.words[0] = index;
        }
        Ok(p)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut p = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                p.set(i, true);
            }
        }
        p
    }

    /// Parses the most-significant-first notation, e.g. `"0110"`.
    pub fn from_bit_string(s: &str) -> Result<Self> {
        let n = s.len();
        let mut p = Self::zeros(n);
        for (pos, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => p.set(n - 1 - pos, true),
                _ => return Err(KmError::Parse(format!("invalid bit character {ch:?}"))),
            }
        }
        Ok(p)
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.n).rev().map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    /// Big-endian hex of the integer encoding, `ceil(n/4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.n.div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let mut v = 0u32;
                for b in 0..4 {
                    let i = d * 4 + b;
                    if i < self.n && self.get(i) {
                        v |= 1 << b;
                    }
                }
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(n: usize, s: &str) -> Result<Self> {
        let mut p = Self::zeros(n);
        for (d, ch) in s.chars().rev().enumerate() {
            let v = ch.to_digit(16).ok_or_else(|| KmError::Parse(format!("invalid hex digit {ch:?}")))?;
            for b in 0..4 {
                if v >> b & 1 == 1 {
                    let i = d * 4 + b;
                    if i >= n {
                        return Err(KmError::Parse(format!("hex point {s:?} has bits beyond n = {n}")));
                    }
                    p.set(i, true);
                }
            }
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.n, "coordinate {i} out of range for n = {}", self.n);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.n, "coordinate {i} out of range for n = {}", self.n);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Number of set coordinates, `|x|`.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set coordinates among `lo .. hi`.
    pub fn weight_in(&self, lo: usize, hi: usize) -> usize {
        (lo..hi).filter(|&i| self.get(i)).count()
    }

    /// Integer encoding; `None` when `n > 64`.
    pub fn index(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    /// Set coordinates in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.get(i))
    }

    /// Coordinates set in `self` but not in `below`.
    pub fn difference(&self, below: &Point) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, (a, b)) in self.words.iter().zip(&below.words).enumerate() {
            let mut d = a & !b;
            while d != 0 {
                out.push(w * 64 + d.trailing_zeros() as usize);
                d &= d - 1;
            }
        }
        out
    }

    pub fn compare(&self, other: &Point) -> Result<Comparison> {
        check_dim(self.n, other.n)?;
        let mut le = true;
        let mut ge = true;
        for (a, b) in self.words.iter().zip(&other.words) {
            le &= a & !b == 0;
            ge &= b & !a == 0;
        }
        Ok(match (le, ge) {
            (true, true) => Comparison::Equal,
            (true, false) => Comparison::Less,
            (false, true) => Comparison::Greater,
            (false, false) => Comparison::Incomparable,
        })
    }

    /// Strict dominance `self < other`; false on dimension mismatch.
    pub fn precedes(&self, other: &Point) -> bool {
        matches!(self.compare(other), Ok(Comparison::Less))
    }

    fn mask_tail(&mut self) {
        let r = self.n % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 64 {
            write!(f, "Point({})", self.to_bit_string())
        } else {
            write!(f, "Point(n={}, weight={})", self.n, self.weight())
        }
    }
}

/// Hamming weight `|p|`.
pub fn weight(p: &Point) -> usize {
    p.weight()
}

/// Dominance order between two points of the same dimension.
pub fn comparable(p: &Point, q: &Point) -> Result<Comparison> {
    p.compare(q)
}

/// Serialized point: `{"n": .., "hex": ..}`.
#[derive(Serialize, Deserialize)]
struct PointRepr {
    n: usize,
    hex: String,
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointRepr { n: self.n, hex: self.to_hex() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PointRepr::deserialize(d)?;
        Point::from_hex(r.n, &r.hex).map_err(serde::de::Error::custom)
    }
}

/// An ascending chain: a start point followed by single-coordinate flips.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    start: Point,
    flips: Vec<u32>,
}

impl Chain {
    pub fn new(start: Point, flips: Vec<u32>) -> Result<Self> {
        let mut seen = start.clone();
        for &c in &flips {
            let c = c as usize;
            if c >= start.n() {
                return Err(KmError::InvalidArgument(format!("flip coordinate {c} out of range")));
            }
            if seen.get(c) {
                return Err(KmError::InvalidArgument(format!("coordinate {c} is already set")));
            }
            seen.set(c, true);
        }
        Ok(Self { start, flips })
    }

    /// The full chain `0^n < ... < 1^n` flipping coordinates in `order`.
    pub fn full(n: usize, order: Vec<u32>) -> Result<Self> {
        if order.len() != n {
            return Err(KmError::InvalidArgument(format!("a full chain needs {n} flips, got {}", order.len())));
        }
        Self::new(Point::zeros(n), order)
    }

    pub fn n(&self) -> usize {
        self.start.n()
    }

    pub fn start(&self) -> &Point {
        &self.start
    }

    pub fn flips(&self) -> &[u32] {
        &self.flips
    }

    /// Number of points on the chain.
    pub fn len(&self) -> usize {
        self.flips.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_full(&self) -> bool {
        self.flips.len() == self.n() && self.start.weight() == 0
    }

    /// Iterates over the chain's points in ascending order.
    pub fn points(&self) -> ChainPoints<'_> {
        ChainPoints { chain: self, cur: None, pos: 0 }
    }

    pub fn end(&self) -> Point {
        let mut p = self.start.clone();
        for &c in &self.flips {
            p.set(c as usize, true);
        }
        p
    }

    /// Whether `p` lies on the chain.
    pub fn contains(&self, p: &Point) -> bool {
        if p.n() != self.n() || !matches!(self.start.compare(p), Ok(Comparison::Less | Comparison::Equal)) {
            return false;
        }
        let steps = p.weight() - self.start.weight();
        steps <= self.flips.len() && self.flips[..steps].iter().all(|&c| p.get(c as usize))
    }

    /// Integer encodings of the chain's points (requires `n <= 64`).
    pub fn indices(&self) -> Option<Vec<u64>> {
        let mut cur = self.start.index()?;
        let mut out = Vec::with_capacity(self.len());
        out.push(cur);
        for &c in &self.flips {
            cur |= 1 << c;
            out.push(cur);
        }
        Some(out)
    }
}

pub struct ChainPoints<'a> {
    chain: &'a Chain,
    cur: Option<Point>,
    pos: usize,
}

impl Iterator for ChainPoints<'_> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        match &mut self.cur {
            None => {
                self.cur = Some(self.chain.start.clone());
            }
            Some(p) => {
                let c = *self.chain.flips.get(self.pos)?;
                p.set(c as usize, true);
                self.pos += 1;
            }
        }
        self.cur.clone()
    }
}

#[derive(Serialize, Deserialize)]
struct ChainRepr {
    start: Point,
    /// 1-based coordinates.
    flips: Vec<u32>,
}

impl Serialize for Chain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChainRepr { start: self.start.clone(), flips: self.flips.iter().map(|c| c + 1).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Chain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ChainRepr::deserialize(d)?;
        let flips = r
            .flips
            .iter()
            .map(|&c| c.checked_sub(1).ok_or_else(|| serde::de::Error::custom("flip coordinates are 1-based")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Chain::new(r.start, flips).map_err(serde::de::Error::custom)
    }
}

fn check_oracle_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(KmError::InvalidArgument("dimension must be positive".into()));
    }
    check_max_dim(n, MAX_ORACLE_DIM)
}

/// A uniformly random full chain: the flip order is a uniform permutation.
pub fn sample_uniform_chain<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Chain> {
    check_oracle_dim(n)?;
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);
    Ok(Chain { start: Point::zeros(n), flips: order })
}

/// A uniformly random full chain conditioned on passing through `points`.
///
/// The flips between consecutive constraints (including before the first and
/// after the last) are permuted independently and uniformly.
pub fn sample_chain_through<R: Rng + ?Sized>(points: &[Point], rng: &mut R) -> Result<Chain> {
    let segments = gap_segments(points)?;
    let n = points[0].n();
    let mut flips = Vec::with_capacity(n);
    for mut seg in segments {
        seg.shuffle(rng);
        flips.extend(seg);
    }
    Ok(Chain { start: Point::zeros(n), flips })
}

/// Flip sets of the gaps `0^n -> p_1 -> ... -> p_m -> 1^n`.
fn gap_segments(points: &[Point]) -> Result<Vec<Vec<u32>>> {
    let first = points.first().ok_or_else(|| KmError::InvalidArgument("at least one point is required".into()))?;
    let n = first.n();
    check_oracle_dim(n)?;
    let mut prev = Point::zeros(n);
    let mut segments = Vec::with_capacity(points.len() + 1);
    for (i, p) in points.iter().enumerate() {
        check_dim(n, p.n())?;
        let ord = prev.compare(p)?;
        let ok = match ord {
            Comparison::Less => true,
            // the first constraint may be the bottom of the cube itself
            Comparison::Equal => i == 0,
            _ => false,
        };
        if !ok {
            return Err(KmError::InvalidArgument(format!(
                "points must be strictly ascending; point {i} is {ord:?} relative to its predecessor"
            )));
        }
        segments.push(p.difference(&prev).into_iter().map(|c| c as u32).collect());
        prev = p.clone();
    }
    segments.push(Point::ones(n).difference(&prev).into_iter().map(|c| c as u32).collect());
    Ok(segments)
}

fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Every full chain of `{0,1}^n`, in lexicographic flip order (`n <= 8`).
pub fn all_full_chains(n: usize) -> Result<Vec<Chain>> {
    check_max_dim(n, 8)?;
    let order: Vec<u32> = (0..n as u32).collect();
    Ok(permutations(&order).into_iter().map(|flips| Chain { start: Point::zeros(n), flips }).collect())
}

/// Every full chain through `points` (`n <= 8`).
pub fn all_chains_through(points: &[Point]) -> Result<Vec<Chain>> {
    let segments = gap_segments(points)?;
    let n = points[0].n();
    check_max_dim(n, 8)?;
    let mut partial: Vec<Vec<u32>> = vec![Vec::new()];
    for seg in segments {
        let perms = permutations(&seg);
        partial = partial
            .iter()
            .flat_map(|pre| {
                perms.iter().map(move |p| {
                    let mut v = pre.clone();
                    v.extend_from_slice(p);
                    v
                })
            })
            .collect();
    }
    Ok(partial.into_iter().map(|flips| Chain { start: Point::zeros(n), flips }).collect())
}

/// A partition of `{0,1}^n` into symmetric chains.
///
/// Built by bracket matching: scanning coordinates from 1 to n, a 0 bit opens
/// and a 1 bit closes. Matched pairs are fixed along a chain; the unmatched
/// positions read `1..1 0..0` and the chain sets the unmatched zeros one at a
/// time, lowest coordinate first. A chain with `p` matched pairs spans levels
/// `p ..= n - p`.
#[derive(Clone, Debug)]
pub struct ChainDecomposition {
    n: usize,
    starts: Vec<u32>,
    offsets: Vec<u32>,
    flips: Vec<u8>,
}

impl ChainDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    fn flips_of(&self, i: usize) -> &[u8] {
        &self.flips[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn chain(&self, i: usize) -> Chain {
        let start = Point::from_index(self.n, self.starts[i] as u64).expect("n <= 24");
        Chain { start, flips: self.flips_of(i).iter().map(|&c| c as u32).collect() }
    }

    /// Integer encodings of the points of chain `i`, ascending.
    pub fn chain_indices(&self, i: usize) -> impl Iterator<Item = u32> + '_ {
        let start = self.starts[i];
        std::iter::once(start).chain(self.flips_of(i).iter().scan(start, |cur, &c| {
            *cur |= 1 << c;
            Some(*cur)
        }))
    }

    /// Lowest and highest level of chain `i`.
    pub fn span(&self, i: usize) -> (usize, usize) {
        let lo = self.starts[i].count_ones() as usize;
        (lo, lo + self.flips_of(i).len())
    }

    pub fn chains(&self) -> impl Iterator<Item = Chain> + '_ {
        (0..self.len()).map(|i| self.chain(i))
    }
}

/// Symmetric chain decomposition of `{0,1}^n` for `1 <= n <= 24`.
pub fn symmetric_chain_decomposition(n: usize) -> Result<ChainDecomposition> {
    if n == 0 {
        return Err(KmError::InvalidArgument("dimension must be positive".into()));
    }
    check_max_dim(n, MAX_MATERIALIZED_DIM)?;
    let mut starts = Vec::new();
    let mut offsets = vec![0u32];
    let mut flips = Vec::new();
    let mut open: Vec<u8> = Vec::with_capacity(n);
    'points: for x in 0u32..(1u32 << n) {
        open.clear();
        for c in 0..n {
            if x >> c & 1 == 1 {
                if open.pop().is_none() {
                    // an unmatched closer: x is not the bottom of its chain
                    continue 'points;
                }
            } else {
                open.push(c as u8);
            }
        }
        starts.push(x);
        flips.extend_from_slice(&open);
        offsets.push(flips.len() as u32);
    }
    Ok(ChainDecomposition { n, starts, offsets, flips })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::rng_from_seed;
    use crate::numeric::binom_u128;
    use std::collections::HashMap;

    fn pt(s: &str) -> Point {
        Point::from_bit_string(s).unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(weight(&Point::zeros(5)), 0);
        assert_eq!(weight(&Point::ones(4)), 4);
        assert_eq!(weight(&pt("0110")), 2);
        assert_eq!(Point::ones(130).weight(), 130);
    }

    #[test]
    fn comparisons() {
        assert_eq!(comparable(&pt("0011"), &pt("0111")).unwrap(), Comparison::Less);
        assert_eq!(comparable(&pt("0011"), &pt("0011")).unwrap(), Comparison::Equal);
        assert_eq!(comparable(&pt("0101"), &pt("1010")).unwrap(), Comparison::Incomparable);
        assert_eq!(comparable(&pt("0111"), &pt("0011")).unwrap(), Comparison::Greater);
        assert!(matches!(comparable(&pt("01"), &pt("011")), Err(KmError::DimensionMismatch { .. })));
    }

    #[test]
    fn bit_string_and_hex_conventions() {
        let p = pt("01");
        assert!(p.get(0) && !p.get(1));
        assert_eq!(p.index(), Some(1));
        assert_eq!(pt("10110").to_hex(), "16");
        assert_eq!(Point::from_hex(5, "16").unwrap(), pt("10110"));
        assert!(Point::from_hex(3, "f").is_err());
        let big = Point::ones(70);
        assert_eq!(Point::from_hex(70, &big.to_hex()).unwrap(), big);
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(sample_uniform_chain(0, &mut rng_from_seed(1)).is_err());
    }

    #[test]
    fn n1_has_a_single_chain() {
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            let c = sample_uniform_chain(1, &mut rng).unwrap();
            assert_eq!(c.flips(), &[0]);
        }
    }

    #[test]
    fn n3_chains_are_uniform() {
        let mut rng = rng_from_seed(11);
        let mut counts: HashMap<Vec<u32>, u32> = HashMap::new();
        let draws = 60_000;
        for _ in 0..draws {
            let c = sample_uniform_chain(3, &mut rng).unwrap();
            *counts.entry(c.flips().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for &c in counts.values() {
            let freq = c as f64 / draws as f64;
            assert!((freq - 1.0 / 6.0).abs() < 0.01, "freq {freq}");
        }
    }

    #[test]
    fn full_chain_visits_every_level_once() {
        let mut rng = rng_from_seed(5);
        let c = sample_uniform_chain(40, &mut rng).unwrap();
        assert!(c.is_full());
        let levels: Vec<usize> = c.points().map(|p| p.weight()).collect();
        assert_eq!(levels, (0..=40).collect::<Vec<_>>());
        assert_eq!(c.end(), Point::ones(40));
    }

    #[test]
    fn conditioned_chains_pass_through_constraints() {
        let mut rng = rng_from_seed(9);
        let p = pt("0110");
        let mut counts: HashMap<Vec<u32>, u32> = HashMap::new();
        for _ in 0..4000 {
            let c = sample_chain_through(std::slice::from_ref(&p), &mut rng).unwrap();
            assert!(c.contains(&p));
            *counts.entry(c.flips().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 4);
        assert_eq!(all_chains_through(std::slice::from_ref(&p)).unwrap().len(), 4);
    }

    #[test]
    fn fully_constrained_chain_is_forced() {
        let mut rng = rng_from_seed(2);
        let fixed = Chain::full(4, vec![2, 0, 3, 1]).unwrap();
        let pts: Vec<Point> = fixed.points().collect();
        for _ in 0..20 {
            assert_eq!(sample_chain_through(&pts, &mut rng).unwrap(), fixed);
        }
    }

    #[test]
    fn conditioning_rejects_bad_input() {
        let mut rng = rng_from_seed(2);
        assert!(sample_chain_through(&[pt("0101"), pt("1010")], &mut rng).is_err());
        assert!(sample_chain_through(&[pt("0111"), pt("0011")], &mut rng).is_err());
        assert!(sample_chain_through(&[pt("0011"), pt("0011")], &mut rng).is_err());
        assert!(sample_chain_through(&[], &mut rng).is_err());
    }

    #[test]
    fn chain_rejects_repeated_coordinate() {
        assert!(Chain::new(Point::zeros(3), vec![0, 0]).is_err());
        assert!(Chain::new(pt("001"), vec![0]).is_err());
        assert!(Chain::new(Point::zeros(3), vec![3]).is_err());
    }

    #[test]
    fn chain_json_uses_one_based_flips() {
        let c = Chain::full(3, vec![2, 0, 1]).unwrap();
        let js = serde_json::to_value(&c).unwrap();
        assert_eq!(js["flips"], serde_json::json!([3, 1, 2]));
        let back: Chain = serde_json::from_value(js).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn scd_small_cases() {
        let d1 = symmetric_chain_decomposition(1).unwrap();
        assert_eq!(d1.len(), 1);
        assert_eq!(d1.chain(0).points().map(|p| p.to_bit_string()).collect::<Vec<_>>(), ["0", "1"]);

        let d2 = symmetric_chain_decomposition(2).unwrap();
        let chains: Vec<Vec<String>> = d2.chains().map(|c| c.points().map(|p| p.to_bit_string()).collect()).collect();
        assert_eq!(chains, vec![vec!["00", "01", "11"], vec!["10"]]);
    }

    #[test]
    fn scd_partitions_the_cube() {
        for n in 1..=12usize {
            let d = symmetric_chain_decomposition(n).unwrap();
            assert_eq!(d.len() as u128, binom_u128(n as u64, n as u64 / 2).unwrap());
            let mut seen = vec![false; 1 << n];
            for i in 0..d.len() {
                let (lo, hi) = d.span(i);
                assert_eq!(lo + hi, n, "chain {i} not symmetric");
                let idx: Vec<u32> = d.chain_indices(i).collect();
                assert_eq!(idx.len(), hi - lo + 1);
                for w in idx.windows(2) {
                    assert_eq!((w[1] ^ w[0]).count_ones(), 1);
                    assert_eq!(w[1] & w[0], w[0]);
                }
                for x in idx {
                    assert!(!seen[x as usize]);
                    seen[x as usize] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn scd_dimension_limits() {
        assert!(symmetric_chain_decomposition(0).is_err());
        assert!(matches!(symmetric_chain_decomposition(25), Err(KmError::DimensionTooLarge { .. })));
    }
}
