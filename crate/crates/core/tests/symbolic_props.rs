mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use furstenberg_core::construct::appendix::build_appendix;
use furstenberg_core::detect::DetectorRequest;
use furstenberg_core::symbolic::*;
use furstenberg_core::{classify_point, Cylinder, Scales, Verdict, Witness, WindowSet};
use proptest::prelude::*;

fn occurrences(x: &[u8], u: &[u8]) -> Vec<u64> {
    if u.len() > x.len() {
        return Vec::new();
    }
    (0..=x.len() - u.len()).filter(|&i| &x[i..i + u.len()] == u).map(|i| i as u64).collect()
}

fn hitting_scan(x: &[u8], u: &[u8], v: &[u8]) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    for i in occurrences(x, u) {
        for j in occurrences(x, v) {
            if j >= i {
                out.insert(j - i);
            }
        }
    }
    out
}

fn arb_word(alphabet: u8, max_len: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0..alphabet, 8..max_len)
}

fn cyl(w: &[u8]) -> Cylinder {
    Cylinder::new(w.to_vec()).unwrap()
}

#[test]
fn appendix_point_recurs_at_small_lengths() {
    let trace = build_appendix(5, 1).unwrap();
    let x = trace.point();
    for len in 1..=6 {
        assert!(transitive_point_evidence(&x, len).unwrap().passed, "len {len}");
    }
}

#[test]
fn appendix_returns_to_first_block() {
    let trace = build_appendix(3, 1).unwrap();
    let x = trace.point();
    let w1 = trace.stage(1).unwrap().w.clone();
    let block: Vec<u8> = (0..=w1.max().unwrap()).map(|i| w1.contains(i) as u8).collect();
    let times = entering_times(&x, &cyl(&block)).unwrap();
    let returns = trace.planted_returns(1, 3);
    assert!(!returns.is_empty());
    assert!(returns.iter().all(|&t| times.contains(t)));
}

#[test]
fn appendix_return_times_match_differences() {
    for stage in 1..=4 {
        let trace = build_appendix(stage, 1).unwrap();
        let w = trace.final_set();
        let h = hitting_times(&trace.point(), &cyl(&[1]), &cyl(&[1])).unwrap();
        assert_eq!(h.to_vec(), w.difference_set().to_vec(), "stage {stage}");
    }
}

#[test]
fn planted_periodic_region_gives_residue_superset() {
    // A long stretch of period 3 after a one-off prefix.
    let mut x = vec![1, 1, 0, 1, 1, 1];
    x.extend(cycled(&[0, 0, 1], 300));
    let x = SymbolicWord::from_symbols(x).unwrap();
    let (i, cert) = point_center_evidence(&x, &cyl(&[0, 0, 1]), &DetectorRequest::ResidueSuperset { k_max: 4 }).unwrap();
    assert_eq!(cert.verdict, Verdict::Witnessed);
    assert_eq!(cert.witness, Witness::Residue { k: 3 });
    assert!(i >= 6);
}

#[test]
fn full_shift_meets_itself_on_short_cylinders() {
    let x = SymbolicWord::new(2, cycled(&de_bruijn(2, 6).unwrap(), 640)).unwrap();
    let words: Vec<Vec<u8>> = (1..=3).flat_map(|l| (0..1u32 << l).map(move |m| (0..l).map(|j| (m >> j & 1) as u8).collect())).collect();
    for u in &words {
        for v in &words {
            let h = product_hitting(&x, &cyl(u), &cyl(v), &x, &cyl(v), &cyl(u)).unwrap();
            assert!(!h.is_empty(), "{u:?} {v:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn entering_times_match_scan(x in arb_word(3, 120), u in arb_word(3, 10)) {
        let u = &u[..3.min(u.len())];
        let w = SymbolicWord::new(3, x.clone()).unwrap();
        let got = entering_times(&w, &cyl(u)).unwrap();
        prop_assert_eq!(got.to_vec(), occurrences(&x, u));
        prop_assert_eq!(got.horizon(), (x.len() - u.len() + 1) as u64);
    }

    #[test]
    fn longer_cylinders_enter_less_often(x in arb_word(2, 150), start in 0usize..100, len in 1usize..6) {
        let w = SymbolicWord::new(2, x.clone()).unwrap();
        let s = start % (x.len() - len);
        let u = &x[s..s + len];
        for prefix in 1..=len {
            let long = entering_times(&w, &cyl(u)).unwrap();
            let short = entering_times(&w, &cyl(&u[..prefix])).unwrap();
            prop_assert!(long.is_subset(&short));
        }
    }

    #[test]
    fn indicator_words_agree_with_dense(b in arb_runny_bits(200), u in arb_word(2, 10)) {
        let u = &u[..u.len().min(5)];
        let support = from_bits(&b);
        prop_assume!(b.len() >= 8);
        let sparse = SymbolicWord::indicator(support).unwrap();
        let dense_symbols: Vec<u8> = b.iter().map(|&x| x as u8).collect();
        let dense = SymbolicWord::new(2, dense_symbols.clone()).unwrap();
        prop_assert_eq!(
            entering_times(&sparse, &cyl(u)).unwrap(),
            entering_times(&dense, &cyl(u)).unwrap()
        );
        let a = FactorIndex::build(&sparse, 4).unwrap();
        let d = FactorIndex::build(&dense, 4).unwrap();
        let a: Vec<_> = a.factors().map(|(c, s)| (c.clone(), s.clone())).collect();
        let d: Vec<_> = d.factors().map(|(c, s)| (c.clone(), s.clone())).collect();
        prop_assert_eq!(a, d);
    }

    #[test]
    fn factor_index_matches_enumeration(x in arb_word(3, 100), max_len in 1usize..6) {
        let w = SymbolicWord::new(3, x.clone()).unwrap();
        let index = FactorIndex::build(&w, max_len).unwrap();
        let mut expected: BTreeMap<(usize, Vec<u8>), Vec<u64>> = BTreeMap::new();
        for l in 1..=max_len.min(x.len()) {
            for i in 0..=x.len() - l {
                expected.entry((l, x[i..i + l].to_vec())).or_default().push(i as u64);
            }
        }
        let got: BTreeMap<(usize, Vec<u8>), Vec<u64>> = index
            .factors()
            .map(|(c, s)| ((c.len(), c.word().to_vec()), s.to_vec()))
            .collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn hitting_times_match_pair_scan(x in arb_word(2, 100), u in arb_word(2, 10), v in arb_word(2, 10)) {
        let (u, v) = (&u[..2], &v[..3]);
        let w = SymbolicWord::new(2, x.clone()).unwrap();
        let got = hitting_times(&w, &cyl(u), &cyl(v)).unwrap();
        prop_assert_eq!(got.to_vec(), hitting_scan(&x, u, v).into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn return_times_contain_entering_differences(x in arb_word(2, 150), start in 0usize..140, len in 1usize..5) {
        let w = SymbolicWord::new(2, x.clone()).unwrap();
        let s = start % (x.len() - len);
        let u = cyl(&x[s..s + len]);
        let returns = hitting_times(&w, &u, &u).unwrap();
        let d = entering_times(&w, &u).unwrap().difference_set();
        prop_assert!(d.is_subset(&returns));
        prop_assert!(returns.contains(0));
    }

    #[test]
    fn product_hitting_is_symmetric_and_contained(
        xa in arb_word(2, 80),
        xb in arb_word(2, 80),
        words in proptest::collection::vec(arb_word(2, 9), 4),
    ) {
        let c: Vec<Cylinder> = words.iter().map(|w| cyl(&w[..2])).collect();
        let a = SymbolicWord::new(2, xa).unwrap();
        let b = SymbolicWord::new(2, xb).unwrap();
        let ab = product_hitting(&a, &c[0], &c[1], &b, &c[2], &c[3]).unwrap();
        let ba = product_hitting(&b, &c[2], &c[3], &a, &c[0], &c[1]).unwrap();
        prop_assert_eq!(ab.to_vec(), ba.to_vec());
        prop_assert!(ab.is_subset(&hitting_times(&a, &c[0], &c[1]).unwrap()));
        prop_assert!(ab.is_subset(&hitting_times(&b, &c[2], &c[3]).unwrap()));
    }

    #[test]
    fn transitivity_matches_suffix_scan(x in arb_word(2, 200), len in 1usize..5) {
        prop_assume!(len <= x.len() / 4);
        let w = SymbolicWord::new(2, x.clone()).unwrap();
        let report = transitive_point_evidence(&w, len).unwrap();
        let half = x.len() / 2;
        let factors: BTreeSet<&[u8]> = x.windows(len).collect();
        let suffix: BTreeSet<&[u8]> = x[half..].windows(len).collect();
        prop_assert_eq!(report.passed, factors.is_subset(&suffix));
        prop_assert_eq!(report.factors_checked as usize, factors.len());
    }

    #[test]
    fn shorter_factors_never_weaken_the_aggregate(x in proptest::collection::vec(0u8..2, 60), period in 1usize..5, seam in 0usize..3) {
        // Mix of periodic and random material so that verdicts vary.
        let mut symbols = cycled(&x[..period], 120);
        symbols.extend_from_slice(&x[..seam * 20]);
        let w = SymbolicWord::new(2, symbols).unwrap();
        let scales: Scales = "n=3,g=8,k_max=4,r_max=8,L=16,delta=1/8,budget=20000".parse().unwrap();
        let short = classify_point(&w, 2, &scales).unwrap();
        let long = classify_point(&w, 4, &scales).unwrap();
        let (s, l) = (&short.aggregate, &long.aggregate);
        for (a, b) in [
            (s.e_evidence, l.e_evidence),
            (s.m_evidence, l.m_evidence),
            (s.dsps_evidence, l.dsps_evidence),
            (s.hy_evidence, l.hy_evidence),
            (s.ip_evidence, l.ip_evidence),
        ] {
            prop_assert!(!(b == Verdict::Witnessed && a == Verdict::RefutedAtScale));
            prop_assert!(a >= b);
        }
        prop_assert!(furstenberg_core::check_report_invariants(&long).is_empty());
    }
}

#[test]
fn hitting_example_on_alternating_word() {
    let x: Vec<u8> = cycled(&[1, 0], 40);
    let w = SymbolicWord::new(2, x.clone()).unwrap();
    let odd = hitting_times(&w, &cyl(&[0]), &cyl(&[1])).unwrap();
    assert_eq!(odd.to_vec(), hitting_scan(&x, &[0], &[1]).into_iter().collect::<Vec<_>>());
    assert!(odd.iter().all(|n| n % 2 == 1));
    let even = hitting_times(&w, &cyl(&[1]), &cyl(&[1])).unwrap();
    assert!(even.iter().all(|n| n % 2 == 0));
    assert_eq!(WindowSet::new(even.iter(), even.horizon()).unwrap(), even);
}
