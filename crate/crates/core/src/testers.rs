//! One-sided chain testers and the transformation of a non-adaptive tester
//! into a chain-based one.

use serde::{Deserialize, Serialize};

use crate::boolfn::{FunctionSpec, Permutation, QueryLedger};
use crate::error::{check_dim, check_max_dim, KmError, Result};
use crate::exec::{rng_from_seed, KmRng};
use crate::hypercube::{all_chains_through, all_full_chains, sample_chain_through, sample_uniform_chain, Chain, Point};
use crate::kmono::{alternation_index, chain_violation, ViolationTuple};
use crate::numeric::binom_u128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Accept,
    Reject,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesterReport {
    pub decision: Decision,
    pub queries: u64,
    pub witness: Option<ViolationTuple>,
    pub chains_used: usize,
    pub seed: Option<u64>,
}

impl TesterReport {
    pub fn rejected(&self) -> bool {
        self.decision == Decision::Reject
    }
}

/// Draws up to `num_chains` uniform full chains and rejects on the first one
/// revealing a violation to k-monotonicity.
pub fn chain_tester_with_rng(
    f: &FunctionSpec,
    k: usize,
    num_chains: usize,
    rng: &mut KmRng,
    ledger: &mut QueryLedger,
) -> Result<TesterReport> {
    if num_chains == 0 {
        return Err(KmError::InvalidArgument("the chain tester needs at least one chain".into()));
    }
    let before = ledger.count();
    for used in 1..=num_chains {
        let z = sample_uniform_chain(f.n(), rng)?;
        if let Some(w) = chain_violation(f, &z, k, ledger)? {
            return Ok(TesterReport {
                decision: Decision::Reject,
                queries: ledger.count() - before,
                witness: Some(w),
                chains_used: used,
                seed: None,
            });
        }
    }
    Ok(TesterReport {
        decision: Decision::Accept,
        queries: ledger.count() - before,
        witness: None,
        chains_used: num_chains,
        seed: None,
    })
}

/// [`chain_tester_with_rng`] on a fresh generator seeded with `seed`.
pub fn chain_tester(f: &FunctionSpec, k: usize, num_chains: usize, seed: u64, ledger: &mut QueryLedger) -> Result<TesterReport> {
    let mut rng = rng_from_seed(seed);
    let mut report = chain_tester_with_rng(f, k, num_chains, &mut rng, ledger)?;
    report.seed = Some(seed);
    Ok(report)
}

/// The query distribution of a non-adaptive tester: sets of at most `q`
/// points drawn without looking at the function.
pub trait QuerySetSource {
    fn n(&self) -> usize;
    fn q(&self) -> usize;
    fn draw(&self, rng: &mut KmRng) -> Vec<Point>;
}

/// Always emits the same points.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedQuerySet {
    n: usize,
    points: Vec<Point>,
}

impl FixedQuerySet {
    pub fn new(n: usize, points: Vec<Point>) -> Result<Self> {
        for p in &points {
            check_dim(n, p.n())?;
        }
        Ok(Self { n, points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
}

impl QuerySetSource for FixedQuerySet {
    fn n(&self) -> usize {
        self.n
    }
    fn q(&self) -> usize {
        self.points.len()
    }
    fn draw(&self, _rng: &mut KmRng) -> Vec<Point> {
        self.points.clone()
    }
}

/// `q` independent uniform points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniformQuerySet {
    pub n: usize,
    pub q: usize,
}

impl QuerySetSource for UniformQuerySet {
    fn n(&self) -> usize {
        self.n
    }
    fn q(&self) -> usize {
        self.q
    }
    fn draw(&self, rng: &mut KmRng) -> Vec<Point> {
        use rand::Rng;
        (0..self.q).map(|_| Point::from_bits(&(0..self.n).map(|_| rng.random::<bool>()).collect::<Vec<_>>())).collect()
    }
}

/// Index tuples of size `m`, in lexicographic order, whose points form a
/// strictly ascending chain once sorted by weight. Each tuple is returned in
/// ascending order of its points.
pub fn comparable_tuples(points: &[Point], m: usize) -> Vec<Vec<usize>> {
    let q = points.len();
    let mut out = Vec::new();
    if m == 0 || m > q {
        return out;
    }
    let mut comb: Vec<usize> = (0..m).collect();
    loop {
        let mut t = comb.clone();
        t.sort_by_key(|&i| points[i].weight());
        if t.windows(2).all(|w| points[w[0]] != points[w[1]] && points[w[0]].precedes(&points[w[1]])) {
            out.push(t);
        }
        // next combination
        let mut i = m;
        while i > 0 && comb[i - 1] == q - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        comb[i - 1] += 1;
        for j in i..m {
            comb[j] = comb[j - 1] + 1;
        }
    }
}

/// `binom(q, k+1) * (n+1)`, the largest number of queries the transformed
/// tester can make.
pub fn query_budget(q: usize, k: usize, n: usize) -> Result<u128> {
    if q < k + 1 {
        return Err(KmError::InvalidArgument(format!("need q >= k + 1, got q = {q}, k = {k}")));
    }
    binom_u128(q as u64, k as u64 + 1)
        .and_then(|b| b.checked_mul(n as u128 + 1))
        .ok_or_else(|| KmError::InvalidArgument("query budget overflows".into()))
}

/// Outcome of one run of a transformed tester.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub report: TesterReport,
    /// Comparable `(k+1)`-tuples among the mapped query points.
    pub tuples: usize,
    pub distinct_chains: usize,
}

/// A chain-based tester built from a query distribution: every comparable
/// `(k+1)`-tuple of the (relabeled) query set gets a chain through it, and
/// the decision comes only from violations on those chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainTransform {
    pub q: usize,
    pub k: usize,
    /// Relabel the query set through a uniformly random variable permutation
    /// before building chains.
    pub conjugate: bool,
}

/// The permuted transform: relabeling makes every chain marginally uniform.
pub fn canonical_transform(q: usize, k: usize) -> Result<ChainTransform> {
    query_budget(q, k, 0)?;
    Ok(ChainTransform { q, k, conjugate: true })
}

/// The same construction without the random relabeling.
pub fn intermediate_transform(q: usize, k: usize) -> Result<ChainTransform> {
    query_budget(q, k, 0)?;
    Ok(ChainTransform { q, k, conjugate: false })
}

impl ChainTransform {
    /// Chains through the query set for one draw of the randomness, deduplicated.
    pub fn chains<S: QuerySetSource + ?Sized>(&self, src: &S, rng: &mut KmRng) -> Result<(usize, Vec<Chain>)> {
        let n = src.n();
        let sigma = if self.conjugate { Some(Permutation::random(n, rng)) } else { None };
        let mut pts = src.draw(rng);
        if pts.len() > self.q {
            return Err(KmError::InvalidArgument(format!("query source emitted {} > q = {} points", pts.len(), self.q)));
        }
        if let Some(s) = &sigma {
            pts = pts.iter().map(|p| s.apply(p)).collect::<Result<_>>()?;
        }
        let tuples = comparable_tuples(&pts, self.k + 1);
        let mut chains: Vec<Chain> = Vec::with_capacity(tuples.len());
        for t in &tuples {
            let through: Vec<Point> = t.iter().map(|&i| pts[i].clone()).collect();
            let c = sample_chain_through(&through, rng)?;
            if !chains.contains(&c) {
                chains.push(c);
            }
        }
        Ok((tuples.len(), chains))
    }

    pub fn run<S: QuerySetSource + ?Sized>(
        &self,
        f: &FunctionSpec,
        src: &S,
        rng: &mut KmRng,
        ledger: &mut QueryLedger,
    ) -> Result<TransformReport> {
        check_dim(f.n(), src.n())?;
        let before = ledger.count();
        let (tuples, chains) = self.chains(src, rng)?;
        let mut witness = None;
        for c in &chains {
            if let Some(w) = chain_violation(f, c, self.k, ledger)? {
                witness = Some(w);
                break;
            }
        }
        let report = TesterReport {
            decision: if witness.is_some() { Decision::Reject } else { Decision::Accept },
            queries: ledger.count() - before,
            chains_used: chains.len(),
            witness,
            seed: None,
        };
        Ok(TransformReport { report, tuples, distinct_chains: chains.len() })
    }

    /// Exact rejection probability on a fixed query set (`n <= 6`), averaging
    /// over every relabeling and every chain choice. Also returns the number
    /// of comparable tuples.
    pub fn exact_rejection_probability(&self, f: &FunctionSpec, src: &FixedQuerySet) -> Result<(f64, usize)> {
        let n = src.n();
        check_dim(f.n(), n)?;
        check_max_dim(n, 6)?;
        let perms = if self.conjugate { all_permutations(n) } else { vec![Permutation::identity(n)] };
        let mut total = 0.0;
        let mut tuples = 0;
        for s in &perms {
            let pts: Vec<Point> = src.points().iter().map(|p| s.apply(p)).collect::<Result<_>>()?;
            let ts = comparable_tuples(&pts, self.k + 1);
            tuples = ts.len();
            let mut accept = 1.0;
            for t in &ts {
                let through: Vec<Point> = t.iter().map(|&i| pts[i].clone()).collect();
                accept *= 1.0 - violating_fraction(f, &all_chains_through(&through)?, self.k)?;
            }
            total += 1.0 - accept;
        }
        Ok((total / perms.len() as f64, tuples))
    }
}

fn violating_fraction(f: &FunctionSpec, chains: &[Chain], k: usize) -> Result<f64> {
    let mut ledger = QueryLedger::new();
    let mut hits = 0usize;
    for c in chains {
        if alternation_index(&f.values_along(c, &mut ledger)?) > k {
            hits += 1;
        }
    }
    Ok(hits as f64 / chains.len() as f64)
}

/// Exact rejection probability of one uniform chain (`n <= 8`), by
/// enumeration of all `n!` chains.
pub fn single_chain_rejection_exact(f: &FunctionSpec, k: usize) -> Result<f64> {
    check_max_dim(f.n(), 8)?;
    violating_fraction(f, &all_full_chains(f.n())?, k)
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut cur: Vec<u32> = (0..n as u32).collect();
    let mut out = vec![Permutation::new(cur.clone()).expect("identity")];
    // lexicographic successor
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { return out };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot has a successor");
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(Permutation::new(cur.clone()).expect("a permutation"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::TruthTable;
    use crate::generators::intro_band_function;
    use crate::kmono::monotonicity_index;

    fn pt(s: &str) -> Point {
        Point::from_bit_string(s).unwrap()
    }

    #[test]
    fn tester_accepts_k_monotone() {
        let f = FunctionSpec::TruthTable(TruthTable::from_fn(6, |x| x.count_ones() >= 3).unwrap());
        for seed in 0..20 {
            let r = chain_tester(&f, 1, 3, seed, &mut QueryLedger::new()).unwrap();
            assert_eq!(r.decision, Decision::Accept);
            assert_eq!(r.queries, 3 * 7);
            assert_eq!(r.seed, Some(seed));
        }
    }

    #[test]
    fn tester_rejects_band() {
        let f = FunctionSpec::Symmetric(intro_band_function(100).unwrap());
        let r = chain_tester(&f, 2, 1, 1, &mut QueryLedger::new()).unwrap();
        assert!(r.rejected());
        assert_eq!(r.witness.unwrap().len(), 3);
        assert!(chain_tester(&f, 2, 0, 1, &mut QueryLedger::new()).is_err());
    }

    #[test]
    fn tuples_are_lexicographic_and_ascending() {
        let pts = vec![pt("011"), pt("000"), pt("001"), pt("100")];
        let t = comparable_tuples(&pts, 2);
        assert_eq!(t, vec![vec![1, 0], vec![2, 0], vec![1, 2], vec![1, 3]]);
        assert_eq!(comparable_tuples(&pts, 3), vec![vec![1, 2, 0]]);
        assert!(comparable_tuples(&[pt("01"), pt("10")], 2).is_empty());
        assert!(comparable_tuples(&[pt("01"), pt("01")], 2).is_empty());
    }

    #[test]
    fn budget_values() {
        assert_eq!(query_budget(4, 1, 10).unwrap(), 66);
        assert_eq!(query_budget(3, 2, 7).unwrap(), 8);
        assert!(query_budget(2, 2, 7).is_err());
        assert!(canonical_transform(1, 1).is_err());
    }

    #[test]
    fn single_tuple_gives_one_chain() {
        let src = FixedQuerySet::new(5, vec![pt("00001"), pt("00111")]).unwrap();
        let t = canonical_transform(2, 1).unwrap();
        let mut rng = rng_from_seed(8);
        let f = FunctionSpec::constant(5, false);
        let mut ledger = QueryLedger::new();
        let r = t.run(&f, &src, &mut rng, &mut ledger).unwrap();
        assert_eq!((r.tuples, r.distinct_chains), (1, 1));
        assert_eq!(r.report.queries, 6);
        assert_eq!(r.report.decision, Decision::Accept);
    }

    #[test]
    fn incomparable_sets_always_accept() {
        let src = FixedQuerySet::new(4, vec![pt("0011"), pt("0101"), pt("1001"), pt("0110")]).unwrap();
        let f = FunctionSpec::TruthTable(TruthTable::from_fn(4, |x| x.count_ones() % 2 == 1).unwrap());
        let t = canonical_transform(4, 1).unwrap();
        let mut rng = rng_from_seed(2);
        for _ in 0..20 {
            let r = t.run(&f, &src, &mut rng, &mut QueryLedger::new()).unwrap();
            assert_eq!((r.tuples, r.report.queries), (0, 0));
            assert_eq!(r.report.decision, Decision::Accept);
        }
    }

    #[test]
    fn permutations_enumerated() {
        let p = all_permutations(4);
        assert_eq!(p.len(), 24);
        let mut imgs: Vec<Vec<u32>> = p.iter().map(|s| s.image().to_vec()).collect();
        imgs.dedup();
        assert_eq!(imgs.len(), 24);
    }

    #[test]
    fn exact_probability_respects_union_bound() {
        let f = FunctionSpec::TruthTable(TruthTable::from_fn(4, |x| x.count_ones() % 2 == 1).unwrap());
        assert_eq!(monotonicity_index(&f).unwrap(), 4);
        let p = single_chain_rejection_exact(&f, 1).unwrap();
        assert_eq!(p, 1.0);
        let src = FixedQuerySet::new(4, vec![pt("0001"), pt("0011"), pt("1000")]).unwrap();
        let (pr, tuples) = canonical_transform(3, 1).unwrap().exact_rejection_probability(&f, &src).unwrap();
        assert_eq!(tuples, 1);
        assert!(pr <= tuples as f64 * p);
    }
}
