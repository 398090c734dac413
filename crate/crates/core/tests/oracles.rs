//! Independent oracles and frozen reference values.

use kmlab::analysis::{hypergeom_pmf, hypergeom_tail, middle_mass_exact, Hypergeometric};
use kmlab::boolfn::{FunctionSpec, LevelProfile, QueryLedger, TruthTable};
use kmlab::generators::balanced_blocks;
use kmlab::hypercube::{all_full_chains, symmetric_chain_decomposition, Point};
use kmlab::kmono::{alternation_index, exact_distance_small, matching_lower_bound, monotonicity_index, symmetric_distance};
use kmlab::numeric::{binomial_row, DyadicFraction};
use num_bigint::BigUint;

/// km by walking every full chain (n <= 6).
fn km_by_chains(f: &FunctionSpec) -> usize {
    let mut ledger = QueryLedger::new();
    all_full_chains(f.n()).unwrap().iter().map(|c| alternation_index(&f.values_along(c, &mut ledger).unwrap())).max().unwrap()
}

/// Longest alternating-from-1 subsequence by exhaustive search over subsets.
fn alternation_brute(values: &[bool]) -> usize {
    let m = values.len();
    let mut best = 0;
    for mask in 0u32..(1 << m) {
        let picked: Vec<bool> = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| values[i]).collect();
        if picked.iter().enumerate().all(|(i, &v)| v == (i % 2 == 0)) {
            best = best.max(picked.len());
        }
    }
    best
}

#[test]
fn alternation_against_subset_search() {
    for m in 0..=10usize {
        for bits in 0u32..(1 << m) {
            let v: Vec<bool> = (0..m).map(|i| bits >> i & 1 == 1).collect();
            assert_eq!(alternation_index(&v), alternation_brute(&v), "{v:?}");
        }
    }
}

#[test]
fn km_dp_against_chain_walk_exhaustive_n3() {
    for bits in 0u32..256 {
        let t = TruthTable::from_fn(3, |x| bits >> x & 1 == 1).unwrap();
        let f = FunctionSpec::TruthTable(t);
        assert_eq!(monotonicity_index(&f).unwrap(), km_by_chains(&f), "table {bits:02x}");
    }
}

#[test]
fn parity_n3_has_index_3() {
    let f = FunctionSpec::TruthTable(TruthTable::from_fn(3, |x| x.count_ones() % 2 == 1).unwrap());
    assert_eq!(km_by_chains(&f), 3);
    assert_eq!(monotonicity_index(&f).unwrap(), 3);
}

#[test]
fn bit_conventions() {
    // OR on two variables: values at indices 0..4 are 0,1,1,1, packed big-endian hex "e"
    let or = TruthTable::from_fn(2, |x| x != 0).unwrap();
    assert_eq!(or.to_hex(), "e");
    let p = Point::from_bit_string("01").unwrap();
    assert!(p.get(0) && !p.get(1));
    assert_eq!(p.index(), Some(1));
}

#[test]
fn n2_decomposition() {
    let scd = symmetric_chain_decomposition(2).unwrap();
    let mut chains: Vec<Vec<String>> =
        (0..scd.len()).map(|i| scd.chain(i).points().map(|p| p.to_bit_string()).collect()).collect();
    chains.sort();
    assert_eq!(chains, vec![vec!["00", "01", "11"], vec!["10"]]);
}

type Cuts = &'static [(usize, usize)];

#[test]
fn frozen_partitions() {
    let cases: &[(usize, usize, Cuts)] = &[
        (20, 6, &[(0, 8), (9, 9), (10, 10), (11, 11), (12, 13), (14, 20)]),
        (16, 6, &[(0, 6), (7, 7), (8, 8), (9, 9), (10, 10), (11, 16)]),
        (64, 4, &[(0, 29), (30, 32), (33, 35), (36, 64)]),
        (4, 3, &[(0, 2), (3, 3), (4, 4)]),
        (12, 3, &[(0, 5), (6, 7), (8, 12)]),
        (25, 6, &[(0, 10), (11, 12), (13, 13), (14, 14), (15, 16), (17, 25)]),
        (50, 6, &[(0, 22), (23, 24), (25, 26), (27, 28), (29, 30), (31, 50)]),
        (100, 6, &[(0, 45), (46, 48), (49, 50), (51, 53), (54, 56), (57, 100)]),
        (200, 6, &[(0, 93), (94, 97), (98, 100), (101, 103), (104, 107), (108, 200)]),
    ];
    for &(n, l, cuts) in cases {
        assert_eq!(balanced_blocks(n, l).unwrap().1.cuts, cuts, "BB({n},{l})");
    }
}

#[test]
fn frozen_bb20_matching_and_upper_bound() {
    let (p, _) = balanced_blocks(20, 6).unwrap();
    let f = FunctionSpec::Symmetric(p.clone());
    let cert = matching_lower_bound(&f, 2).unwrap();
    assert_eq!(cert.tuples.len(), 167_960);
    assert_eq!(cert.total_forced(), 206_720);
    assert!(cert.tuples.iter().all(|t| t.len() >= 3));
    for (t, &c) in cert.tuples.iter().zip(&cert.forced_flips_per_tuple) {
        if t.len() == 5 {
            assert_eq!(c, 2);
        }
    }
    let (ub, arg) = symmetric_distance(&p, 2);
    assert_eq!(ub, DyadicFraction::new(228_420u32, 20));
    assert!(alternation_index(arg.values()) <= 2);
}

/// Symmetric distance by enumerating every profile (n <= 12).
fn symdist_brute(p: &LevelProfile, k: usize) -> BigUint {
    let n = p.n();
    let row = binomial_row(n);
    let mut best: Option<BigUint> = None;
    for bits in 0u32..(1 << (n + 1)) {
        let u: Vec<bool> = (0..=n).map(|i| bits >> i & 1 == 1).collect();
        if alternation_index(&u) > k {
            continue;
        }
        let c = (0..=n).filter(|&i| u[i] != p.value(i)).fold(BigUint::from(0u32), |a, i| a + &row[i]);
        if best.as_ref().is_none_or(|b| c < *b) {
            best = Some(c);
        }
    }
    best.unwrap()
}

#[test]
fn symmetric_distance_against_enumeration() {
    for n in [2usize, 5, 9] {
        for bits in (0u32..(1 << (n + 1))).step_by(7) {
            let p = LevelProfile::new((0..=n).map(|i| bits >> i & 1 == 1).collect()).unwrap();
            for k in 0..4 {
                let (d, arg) = symmetric_distance(&p, k);
                assert_eq!(d.numerator(), &symdist_brute(&p, k), "n={n} bits={bits:b} k={k}");
                assert!(alternation_index(arg.values()) <= k);
            }
        }
    }
    let (d, _) = symmetric_distance(&LevelProfile::from_bits(&[0, 1, 0]).unwrap(), 1);
    assert_eq!(d, DyadicFraction::new(1u32, 2));
}

#[test]
fn exact_distance_examples() {
    let parity2 = FunctionSpec::TruthTable(TruthTable::from_fn(2, |x| x.count_ones() == 1).unwrap());
    assert_eq!(exact_distance_small(&parity2, 1).unwrap().to_f64(), 0.25);
    for bits in 0u32..16 {
        let f = FunctionSpec::TruthTable(TruthTable::from_fn(2, |x| bits >> x & 1 == 1).unwrap());
        let km = monotonicity_index(&f).unwrap();
        assert!(exact_distance_small(&f, km).unwrap().is_zero());
    }
}

#[test]
fn bb16_single_order_bound_is_pinned() {
    let (p, _) = balanced_blocks(16, 6).unwrap();
    let cert = matching_lower_bound(&FunctionSpec::Symmetric(p.clone()), 1).unwrap();
    let (ub, _) = symmetric_distance(&p, 1);
    assert_eq!(cert.bound, DyadicFraction::new(19_448u32, 16));
    assert_eq!(ub, cert.bound);
}

#[test]
fn middle_mass_frozen() {
    let m = middle_mass_exact(100, 10.0).unwrap();
    let num: BigUint = "1394423591691480037316962055".parse().unwrap();
    assert_eq!(m, DyadicFraction::new(num << 5u32, 100));
    assert!(middle_mass_exact(30, 15.0).unwrap().is_zero());
}

fn binom_big(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn hypergeometric_against_binomials() {
    assert!((hypergeom_pmf(5, 10, 4, 2).unwrap() - 100.0 / 210.0).abs() < 1e-15);
    assert!((hypergeom_pmf(1, 2, 1, 1).unwrap() - 0.5).abs() < 1e-15);
    // direct ratio of big binomials at a large population
    let (u, n, t) = (400u64, 125_205u64, 166u64);
    let h = Hypergeometric::new(u, n, t).unwrap();
    for i in [0u64, 1, 2, 5] {
        let scaled = ((binom_big(u, i) * binom_big(n - u, t - i)) << 200u32) / binom_big(n, t);
        let exact = DyadicFraction::new(scaled, 200).to_f64();
        assert!((h.pmf(i) - exact).abs() <= 1e-12 * exact, "i={i}");
    }
    assert!((hypergeom_tail(400, 125_205, 166, 0).unwrap() - 1.0).abs() < 1e-15);
}
