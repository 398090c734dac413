//! Boolean function oracles with query accounting.
//!
//! Four representations share one evaluation interface: packed truth tables,
//! totally symmetric functions given by their level profile, the two-part
//! hidden-block functions (evaluated from the weights of the two coordinate
//! blocks, never materialized), and permutation-composed wrappers.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{check_dim, check_max_dim, KmError, Result};
use crate::generators::HardFunctionParams;
use crate::hypercube::{Chain, Point};
use crate::numeric::DyadicFraction;
use crate::{MAX_MATERIALIZED_DIM, MAX_ORACLE_DIM};

/// Per-run query counter. Workers own their ledger; totals are merged after
/// joining.
#[derive(Clone, Debug, Default)]
pub struct QueryLedger {
    count: u64,
    log: Option<Vec<Point>>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// A ledger that also records every queried point.
    pub fn with_log() -> Self {
        Self { count: 0, log: Some(Vec::new()) }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn log(&self) -> Option<&[Point]> {
        self.log.as_deref()
    }

    pub fn is_logging(&self) -> bool {
        self.log.is_some()
    }

    fn record(&mut self, p: &Point) {
        self.count += 1;
        if let Some(log) = &mut self.log {
            log.push(p.clone());
        }
    }

    fn record_chain(&mut self, chain: &Chain) {
        if let Some(log) = &mut self.log {
            log.extend(chain.points());
        }
        self.count += chain.len() as u64;
    }

    pub fn merge(&mut self, other: QueryLedger) {
        self.count += other.count;
        if let (Some(log), Some(other)) = (&mut self.log, other.log) {
            log.extend(other);
        }
    }
}

/// Packed truth table, bit `x` holds `f(x)` for the point with encoding `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn zeros(n: usize) -> Result<Self> {
        check_max_dim(n, MAX_MATERIALIZED_DIM)?;
        Ok(Self { n, words: vec![0; (1usize << n).div_ceil(64)] })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(u64) -> bool) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        for x in 0..1u64 << n {
            if f(x) {
                t.set(x, true);
            }
        }
        Ok(t)
    }

    pub fn from_values(values: &[bool]) -> Result<Self> {
        let n = values.len().trailing_zeros() as usize;
        if values.len() != 1 << n {
            return Err(KmError::InvalidArgument(format!("truth table length {} is not a power of two", values.len())));
        }
        Self::from_fn(n, |x| values[x as usize])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u64 {
        1 << self.n
    }

    pub fn get(&self, x: u64) -> bool {
        self.words[(x / 64) as usize] >> (x % 64) & 1 == 1
    }

    pub fn set(&mut self, x: u64, v: bool) {
        let m = 1u64 << (x % 64);
        if v {
            self.words[(x / 64) as usize] |= m;
        } else {
            self.words[(x / 64) as usize] &= !m;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of points where the two tables differ.
    pub fn disagreements(&self, other: &TruthTable) -> Result<u64> {
        check_dim(self.n, other.n)?;
        Ok(self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as u64).sum())
    }

    pub fn values(&self) -> Vec<bool> {
        (0..self.size()).map(|x| self.get(x)).collect()
    }

    /// Big-endian hex of `sum f(x) 2^x`, `max(1, 2^n / 4)` digits.
    pub fn to_hex(&self) -> String {
        let size = self.size();
        let digits = (size / 4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let mut v = 0u32;
                for b in 0..4u64 {
                    let x = d * 4 + b;
                    if x < size && self.get(x) {
                        v |= 1 << b;
                    }
                }
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(n: usize, s: &str) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        let size = t.size();
        for (d, ch) in s.chars().rev().enumerate() {
            let v = ch.to_digit(16).ok_or_else(|| KmError::Parse(format!("invalid hex digit {ch:?}")))?;
            for b in 0..4u64 {
                if v >> b & 1 == 1 {
                    let x = d as u64 * 4 + b;
                    if x >= size {
                        return Err(KmError::Parse("truth table hex longer than 2^n bits".into()));
                    }
                    t.set(x, true);
                }
            }
        }
        Ok(t)
    }
}

/// Values `v_0 .. v_n` of a totally symmetric function, one per level.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LevelProfile {
    values: Vec<bool>,
}

impl LevelProfile {
    pub fn new(values: Vec<bool>) -> Result<Self> {
        if values.is_empty() {
            return Err(KmError::InvalidArgument("a level profile needs n + 1 >= 1 values".into()));
        }
        Ok(Self { values })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let values = bits
            .iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(KmError::Parse(format!("profile entries must be 0 or 1, got {b}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn constant(n: usize, value: bool) -> Self {
        Self { values: vec![value; n + 1] }
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, level: usize) -> bool {
        self.values[level]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn bits(&self) -> Vec<u8> {
        self.values.iter().map(|&v| v as u8).collect()
    }
}

/// A permutation `sigma` of the coordinates; `image[i] = sigma(i)` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn new(image: Vec<u32>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            let v = v as usize;
            if v >= n || seen[v] {
                return Err(KmError::InvalidArgument("permutation image is not a bijection".into()));
            }
            seen[v] = true;
        }
        Ok(Self { image })
    }

    /// From the 1-based image array used in serialized form.
    pub fn from_one_based(image: &[u32]) -> Result<Self> {
        let zero = image
            .iter()
            .map(|&v| v.checked_sub(1).ok_or_else(|| KmError::Parse("permutation entries are 1-based".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero)
    }

    pub fn identity(n: usize) -> Self {
        Self { image: (0..n as u32).collect() }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut image: Vec<u32> = (0..n as u32).collect();
        image.shuffle(rng);
        Self { image }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }

    pub fn one_based(&self) -> Vec<u32> {
        self.image.iter().map(|v| v + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.n()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Self { image: inv }
    }

    /// `pi_sigma(a)`, the point `b` with `b_i = a_{sigma(i)}`.
    pub fn apply(&self, a: &Point) -> Result<Point> {
        check_dim(self.n(), a.n())?;
        let mut b = Point::zeros(a.n());
        for (i, &s) in self.image.iter().enumerate() {
            if a.get(s as usize) {
                b.set(i, true);
            }
        }
        Ok(b)
    }

    /// `pi_sigma` on integer encodings (`n <= 64`).
    pub fn apply_index(&self, a: u64) -> u64 {
        let mut b = 0u64;
        for (i, &s) in self.image.iter().enumerate() {
            b |= (a >> s & 1) << i;
        }
        b
    }

    /// The image of a chain under `pi_sigma`.
    pub fn apply_chain(&self, chain: &Chain) -> Result<Chain> {
        let inv = self.inverse();
        let start = self.apply(chain.start())?;
        Chain::new(start, chain.flips().iter().map(|&c| inv.image[c as usize]).collect())
    }
}

/// `f(x, y)` on `{0,1}^{n_L} x {0,1}^{n_R}`: 0 unless `|x|` lies in the middle
/// band `mid_lo ..= mid_hi`, where it equals the inner profile at `|y|`.
/// With `above_mid` set the function is 1 whenever `|x| > mid_hi`.
///
/// The left block is coordinates `0 .. n_left`, the right block the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPart {
    n_left: usize,
    n_right: usize,
    mid_lo: usize,
    mid_hi: usize,
    above_mid: bool,
    inner: LevelProfile,
    params: Option<HardFunctionParams>,
}

impl TwoPart {
    pub fn new(
        n_left: usize,
        mid: (usize, usize),
        above_mid: bool,
        inner: LevelProfile,
        params: Option<HardFunctionParams>,
    ) -> Result<Self> {
        let (mid_lo, mid_hi) = mid;
        if mid_lo > mid_hi || mid_hi > n_left {
            return Err(KmError::InvalidArgument(format!("middle band {mid_lo}..={mid_hi} is not inside 0..={n_left}")));
        }
        let n_right = inner.n();
        check_max_dim(n_left + n_right, MAX_ORACLE_DIM)?;
        Ok(Self { n_left, n_right, mid_lo, mid_hi, above_mid, inner, params })
    }

    /// A symmetric function on `n` coordinates viewed as a two-part function
    /// with an empty left block.
    pub fn embed_symmetric(profile: LevelProfile) -> Self {
        Self { n_left: 0, n_right: profile.n(), mid_lo: 0, mid_hi: 0, above_mid: false, inner: profile, params: None }
    }

    pub fn n(&self) -> usize {
        self.n_left + self.n_right
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn mid(&self) -> (usize, usize) {
        (self.mid_lo, self.mid_hi)
    }

    pub fn above_mid(&self) -> bool {
        self.above_mid
    }

    pub fn inner(&self) -> &LevelProfile {
        &self.inner
    }

    pub fn params(&self) -> Option<&HardFunctionParams> {
        self.params.as_ref()
    }

    pub fn in_mid(&self, left_weight: usize) -> bool {
        (self.mid_lo..=self.mid_hi).contains(&left_weight)
    }

    /// Value from the two block weights.
    pub fn value_at(&self, left_weight: usize, right_weight: usize) -> bool {
        if left_weight < self.mid_lo {
            false
        } else if left_weight > self.mid_hi {
            self.above_mid
        } else {
            self.inner.value(right_weight)
        }
    }

    fn weights(&self, p: &Point) -> (usize, usize) {
        let a = p.weight_in(0, self.n_left);
        (a, p.weight() - a)
    }
}

/// A Boolean function on `{0,1}^n` with query access.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    TruthTable(TruthTable),
    Symmetric(LevelProfile),
    TwoPart(TwoPart),
    Permuted { inner: Box<FunctionSpec>, perm: Permutation },
}

impl FunctionSpec {
    pub fn constant(n: usize, value: bool) -> Self {
        FunctionSpec::Symmetric(LevelProfile::constant(n, value))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FunctionSpec::TruthTable(_) => "truth_table",
            FunctionSpec::Symmetric(_) => "symmetric",
            FunctionSpec::TwoPart(_) => "two_part",
            FunctionSpec::Permuted { .. } => "permuted",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            FunctionSpec::TruthTable(t) => t.n(),
            FunctionSpec::Symmetric(p) => p.n(),
            FunctionSpec::TwoPart(t) => t.n(),
            FunctionSpec::Permuted { perm, .. } => perm.n(),
        }
    }

    /// `f(p)` without touching any ledger.
    pub fn value(&self, p: &Point) -> Result<bool> {
        check_dim(self.n(), p.n())?;
        Ok(match self {
            FunctionSpec::TruthTable(t) => t.get(p.index().expect("truth tables have n <= 24")),
            FunctionSpec::Symmetric(prof) => prof.value(p.weight()),
            FunctionSpec::TwoPart(t) => {
                let (a, b) = t.weights(p);
                t.value_at(a, b)
            }
            FunctionSpec::Permuted { inner, perm } => inner.value(&perm.apply(p)?)?,
        })
    }

    /// `f(x)` for the point with integer encoding `x` (`n <= 64`).
    pub fn value_at_index(&self, x: u64) -> bool {
        match self {
            FunctionSpec::TruthTable(t) => t.get(x),
            FunctionSpec::Symmetric(prof) => prof.value(x.count_ones() as usize),
            FunctionSpec::TwoPart(t) => {
                let left_mask = if t.n_left >= 64 { u64::MAX } else { (1u64 << t.n_left) - 1 };
                let a = (x & left_mask).count_ones() as usize;
                let b = (x & !left_mask).count_ones() as usize;
                t.value_at(a, b)
            }
            FunctionSpec::Permuted { inner, perm } => inner.value_at_index(perm.apply_index(x)),
        }
    }

    /// Query `f(p)`, charging one query to `ledger`.
    pub fn evaluate(&self, p: &Point, ledger: &mut QueryLedger) -> Result<bool> {
        let v = self.value(p)?;
        ledger.record(p);
        Ok(v)
    }

    /// Values at every point of `chain`, in order, charging one query per
    /// point. Runs in time linear in the chain length for every kind.
    pub fn values_along(&self, chain: &Chain, ledger: &mut QueryLedger) -> Result<Vec<bool>> {
        check_dim(self.n(), chain.n())?;
        let vals = self.chain_values(chain)?;
        ledger.record_chain(chain);
        Ok(vals)
    }

    fn chain_values(&self, chain: &Chain) -> Result<Vec<bool>> {
        let mut out = Vec::with_capacity(chain.len());
        match self {
            FunctionSpec::TruthTable(t) => {
                let idx = chain.indices().expect("truth tables have n <= 24");
                out.extend(idx.into_iter().map(|x| t.get(x)));
            }
            FunctionSpec::Symmetric(prof) => {
                let w = chain.start().weight();
                out.extend((0..chain.len()).map(|i| prof.value(w + i)));
            }
            FunctionSpec::TwoPart(t) => {
                let (mut a, mut b) = t.weights(chain.start());
                out.push(t.value_at(a, b));
                for &c in chain.flips() {
                    if (c as usize) < t.n_left {
                        a += 1;
                    } else {
                        b += 1;
                    }
                    out.push(t.value_at(a, b));
                }
            }
            FunctionSpec::Permuted { inner, perm } => {
                return inner.chain_values(&perm.apply_chain(chain)?);
            }
        }
        Ok(out)
    }

    pub fn truth_table(&self) -> Result<TruthTable> {
        check_max_dim(self.n(), MAX_MATERIALIZED_DIM)?;
        match self {
            FunctionSpec::TruthTable(t) => Ok(t.clone()),
            FunctionSpec::Permuted { inner, perm } => {
                let t = inner.truth_table()?;
                TruthTable::from_fn(self.n(), |x| t.get(perm.apply_index(x)))
            }
            other => TruthTable::from_fn(self.n(), |x| other.value_at_index(x)),
        }
    }
}

/// `f o pi_sigma`.
pub fn compose_permutation(f: &FunctionSpec, sigma: &Permutation) -> Result<FunctionSpec> {
    check_dim(f.n(), sigma.n())?;
    Ok(FunctionSpec::Permuted { inner: Box::new(f.clone()), perm: sigma.clone() })
}

/// The truth-table form of `f` (`n <= 24`).
pub fn materialize(f: &FunctionSpec) -> Result<FunctionSpec> {
    Ok(FunctionSpec::TruthTable(f.truth_table()?))
}

/// Normalized Hamming distance `#{x : f(x) != g(x)} / 2^n` (`n <= 24`).
pub fn hamming_distance(f: &FunctionSpec, g: &FunctionSpec) -> Result<DyadicFraction> {
    check_dim(f.n(), g.n())?;
    let d = f.truth_table()?.disagreements(&g.truth_table()?)?;
    Ok(DyadicFraction::new(d, f.n() as u32))
}

#[derive(Serialize, Deserialize)]
struct SpecDoc {
    kind: String,
    n: usize,
    payload: Value,
}

fn to_doc(f: &FunctionSpec) -> SpecDoc {
    let payload = match f {
        FunctionSpec::TruthTable(t) => json!({ "hex": t.to_hex() }),
        FunctionSpec::Symmetric(p) => json!({ "values": p.bits() }),
        FunctionSpec::TwoPart(t) => json!({
            "n_left": t.n_left,
            "n_right": t.n_right,
            "mid_levels": [t.mid_lo, t.mid_hi],
            "above_mid": t.above_mid as u8,
            "profile": t.inner.bits(),
            "params": t.params,
        }),
        FunctionSpec::Permuted { inner, perm } => json!({
            "inner": serde_json::to_value(to_doc(inner)).expect("spec serializes"),
            "image": perm.one_based(),
        }),
    };
    SpecDoc { kind: f.kind().to_string(), n: f.n(), payload }
}

fn field<T: serde::de::DeserializeOwned>(payload: &Value, name: &str) -> Result<T> {
    let v = payload.get(name).ok_or_else(|| KmError::Parse(format!("payload is missing {name:?}")))?;
    serde_json::from_value(v.clone()).map_err(|e| KmError::Parse(format!("payload field {name:?}: {e}")))
}

fn from_doc(doc: SpecDoc) -> Result<FunctionSpec> {
    let p = &doc.payload;
    let spec = match doc.kind.as_str() {
        "truth_table" => FunctionSpec::TruthTable(TruthTable::from_hex(doc.n, &field::<String>(p, "hex")?)?),
        "symmetric" => FunctionSpec::Symmetric(LevelProfile::from_bits(&field::<Vec<u8>>(p, "values")?)?),
        "two_part" => {
            let mid: [usize; 2] = field(p, "mid_levels")?;
            let above: u8 = field(p, "above_mid")?;
            let params: Option<HardFunctionParams> = field(p, "params").unwrap_or(None);
            if let Some(params) = &params {
                params.validate()?;
            }
            let t = TwoPart::new(
                field(p, "n_left")?,
                (mid[0], mid[1]),
                above == 1,
                LevelProfile::from_bits(&field::<Vec<u8>>(p, "profile")?)?,
                params,
            )?;
            check_dim(field(p, "n_right")?, t.n_right())?;
            FunctionSpec::TwoPart(t)
        }
        "permuted" => {
            let inner: SpecDoc = field(p, "inner")?;
            let perm = Permutation::from_one_based(&field::<Vec<u32>>(p, "image")?)?;
            let inner = from_doc(inner)?;
            check_dim(inner.n(), perm.n())?;
            FunctionSpec::Permuted { inner: Box::new(inner), perm }
        }
        other => return Err(KmError::Parse(format!("unknown function kind {other:?}"))),
    };
    check_dim(doc.n, spec.n())?;
    Ok(spec)
}

impl Serialize for FunctionSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_doc(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FunctionSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        from_doc(SpecDoc::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
