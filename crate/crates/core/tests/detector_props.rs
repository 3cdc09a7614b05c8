mod common;

use common::*;
use furstenberg_core::construct::generators::{gen_dilated_thick, gen_fs, geometric_runs};
use furstenberg_core::detect::*;
use furstenberg_core::replay::replay;
use furstenberg_core::{Verdict, Witness, WindowSet};
use num_rational::Ratio;
use proptest::prelude::*;

fn all_detectors(f: &WindowSet, n: u64, g: u64) -> Vec<furstenberg_core::ClassCertificate> {
    vec![
        detect_thick(f, n).unwrap(),
        detect_syndetic(f, g).unwrap(),
        detect_piecewise_syndetic(f, g, n).unwrap(),
        ip_witness(f, 3, 100_000).unwrap(),
        detect_weakly_thick(f, 4, n).unwrap(),
        detect_cofinite(f),
        detect_pubd(f, n.max(1), Ratio::new(1, g)).unwrap(),
        detect_residue_superset(f, 5).unwrap(),
    ]
}

#[test]
fn powers_of_two_sums_have_unit_gaps_only_from_one() {
    // FS{2^i : i >= 1} inside [0, 64) is the evens, so gap 1 fails.
    let p: Vec<u64> = (1..6).map(|i| 1 << i).collect();
    let f = gen_fs(&p, 64).unwrap();
    assert_eq!(max_gap(&f.to_vec()), Some(2));
    assert_eq!(detect_syndetic(&f, 1).unwrap().verdict, Verdict::RefutedAtScale);
}

#[test]
fn sparse_powers_are_not_piecewise_syndetic() {
    let f = WindowSet::new((0..20).map(|i| 1u64 << i), 1 << 20).unwrap();
    assert_eq!(
        detect_piecewise_syndetic(&f, 3, 20).unwrap().verdict,
        Verdict::RefutedAtScale
    );
    // Small-window cross-check against the interval scan.
    let small = WindowSet::new((0..10).map(|i| 1u64 << i), 1 << 10).unwrap();
    assert!(!piecewise_syndetic(&bits(&small), 3, 20));
    assert!(!detect_piecewise_syndetic(&small, 3, 20).unwrap().is_witnessed());
}

#[test]
fn huge_sparse_windows_replay_quickly() {
    let h = 1u64 << 40;
    for f in [
        WindowSet::new([0, h - 1], h).unwrap(),
        WindowSet::interval(h - 50, h, h).unwrap(),
        WindowSet::empty(h),
    ] {
        for cert in all_detectors(&f, 3, 4) {
            assert_eq!(replay(&cert, &f), Ok(()), "{cert:?}");
        }
    }
}

#[test]
fn ip_search_recovers_generators() {
    let f = gen_fs(&[3, 5, 9], 20).unwrap();
    let cert = ip_witness(&f, 3, DEFAULT_IP_BUDGET).unwrap();
    assert_eq!(cert.witness, Witness::Ip { generators: vec![3, 5, 9] });
    assert!(has_ip(&bits(&f), 3));
    assert!(!has_ip(&bits(&f), 4));
}

#[test]
fn dilated_runs_found_at_their_factor() {
    let f = gen_dilated_thick(2, &geometric_runs(3, 8), 2 * 3u64.pow(8) + 20).unwrap();
    let cert = detect_weakly_thick(&f, 2, 8).unwrap();
    let (k, a) = weakly_thick(&bits(&f), 2, 8).unwrap();
    assert_eq!(k, 2);
    match cert.witness {
        Witness::Dilation { k: got, start, len } => {
            assert_eq!((got, start, len), (2, a as u64, 8));
        }
        other => panic!("unexpected witness {other:?}"),
    }
}

#[test]
fn squares_density_refuted() {
    let f = WindowSet::new((0..100).map(|i| i * i), 10_000).unwrap();
    assert_eq!(max_count(&bits(&f), 100), Some(10));
    assert_eq!(
        detect_pubd(&f, 100, Ratio::new(1, 5)).unwrap().verdict,
        Verdict::RefutedAtScale
    );
}

#[test]
fn budget_exhaustion_is_inconclusive() {
    let f = WindowSet::full(200);
    let cert = ip_witness(&f, 8, 3).unwrap();
    assert_eq!(cert.verdict, Verdict::Inconclusive);
    assert_eq!(cert.witness, Witness::IpSearch { nodes: 3, exhausted: false });
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn thick_matches_longest_run(b in arb_runny_bits(120), n in 1u64..10) {
        let f = from_bits(&b);
        let cert = detect_thick(&f, n).unwrap();
        let r = max_run(&b) as u64;
        let expected = if r >= n {
            Verdict::Witnessed
        } else if f.horizon() >= 2 * n {
            Verdict::RefutedAtScale
        } else {
            Verdict::Inconclusive
        };
        prop_assert_eq!(cert.verdict, expected);
    }

    #[test]
    fn syndetic_matches_gap_scan(b in arb_runny_bits(120), g in 1u64..10) {
        let f = from_bits(&b);
        let cert = detect_syndetic(&f, g).unwrap();
        match max_gap(&f.to_vec()) {
            Some(gap) => prop_assert_eq!(cert.is_witnessed(), gap <= g),
            None => prop_assert!(!cert.is_witnessed()),
        }
    }

    #[test]
    fn piecewise_syndetic_matches_interval_scan(b in arb_runny_bits(100), g in 1usize..8, n in 1usize..40) {
        let f = from_bits(&b);
        let cert = detect_piecewise_syndetic(&f, g as u64, n as u64).unwrap();
        prop_assert_eq!(cert.is_witnessed(), piecewise_syndetic(&b, g, n));
        if let Witness::DenseInterval { start, len, .. } = cert.witness {
            // The least admissible start is reported.
            let s = start as usize;
            prop_assert!((0..s).all(|t| !(window_meets(&b, t, n) && (n < g || (t..=t + n - g).all(|u| window_meets(&b, u, g))))));
            prop_assert_eq!(len as usize, n);
        }
    }

    #[test]
    fn ip_matches_tuple_enumeration(b in arb_bits(36), d in 1u64..4) {
        let f = from_bits(&b);
        let cert = ip_witness(&f, d, DEFAULT_IP_BUDGET).unwrap();
        prop_assert_eq!(cert.is_witnessed(), has_ip(&b, d as usize));
        prop_assert_ne!(cert.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn ip_depth_one_needs_a_positive_element(b in arb_bits(80)) {
        let f = from_bits(&b);
        let positive = f.iter().any(|v| v >= 1);
        prop_assert_eq!(ip_witness(&f, 1, DEFAULT_IP_BUDGET).unwrap().is_witnessed(), positive);
    }

    #[test]
    fn weakly_thick_matches_scan(b in arb_runny_bits(150), k_max in 1u64..6, n in 1u64..8) {
        let f = from_bits(&b);
        let cert = detect_weakly_thick(&f, k_max, n).unwrap();
        let oracle = weakly_thick(&b, k_max as usize, n as usize);
        prop_assert_eq!(cert.is_witnessed(), oracle.is_some());
        if let (Witness::Dilation { k, start, .. }, Some((ok, oa))) = (&cert.witness, oracle) {
            prop_assert_eq!((*k as usize, *start as usize), (ok, oa));
        }
    }

    #[test]
    fn weakly_thick_with_unit_factor_is_thick(b in arb_runny_bits(150), n in 1u64..10) {
        let f = from_bits(&b);
        let wt = detect_weakly_thick(&f, 1, n).unwrap();
        let t = detect_thick(&f, n).unwrap();
        prop_assert_eq!(wt.verdict, t.verdict);
        if let (Witness::Dilation { start, len, .. }, Witness::Run { start: s, len: l }) = (&wt.witness, &t.witness) {
            prop_assert_eq!((*start, *len), (*s, *l));
        }
    }

    #[test]
    fn pubd_matches_densest_window(b in arb_runny_bits(120), len in 1u64..60, num in 1u64..8, den in 1u64..9) {
        prop_assume!(num <= den);
        let f = from_bits(&b);
        let cert = detect_pubd(&f, len, Ratio::new(num, den)).unwrap();
        match max_count(&b, len as usize) {
            Some(c) => prop_assert_eq!(cert.is_witnessed(), c as u64 * den >= num * len),
            None => prop_assert_eq!(cert.verdict, Verdict::Inconclusive),
        }
    }

    #[test]
    fn residue_matches_multiple_scan(b in arb_bits(60), k_max in 1u64..8) {
        let f = from_bits(&b);
        let cert = detect_residue_superset(&f, k_max).unwrap();
        let oracle = residue_modulus(&b, k_max as usize);
        prop_assert_eq!(cert.is_witnessed(), oracle.is_some());
        if let Some(k) = oracle {
            prop_assert_eq!(cert.witness, Witness::Residue { k: k as u64 });
        }
    }

    #[test]
    fn cofinite_tail_matches_scan(b in arb_runny_bits(100)) {
        let f = from_bits(&b);
        let t = (0..=b.len()).find(|&t| b[t..].iter().all(|&x| x)).unwrap();
        prop_assert_eq!(detect_cofinite(&f).witness, Witness::Tail { start: t as u64 });
    }

    #[test]
    fn every_certificate_replays(b in arb_runny_bits(150), n in 1u64..8, g in 1u64..8) {
        let f = from_bits(&b);
        for cert in all_detectors(&f, n, g) {
            prop_assert!(replay(&cert, &f).is_ok(), "{:?}", cert);
        }
    }

    #[test]
    fn hierarchy_at_matching_scales(b in arb_runny_bits(200), n in 1u64..10, g in 1u64..6) {
        let f = from_bits(&b);
        if detect_thick(&f, n).unwrap().is_witnessed() {
            prop_assert!(detect_weakly_thick(&f, 1, n).unwrap().is_witnessed());
            prop_assert!(detect_piecewise_syndetic(&f, 1, n).unwrap().is_witnessed());
            prop_assert!(detect_pubd(&f, n, Ratio::from_integer(1)).unwrap().is_witnessed());
        }
        if detect_piecewise_syndetic(&f, g, n).unwrap().is_witnessed() && n / g > 0 {
            prop_assert!(detect_pubd(&f, n, Ratio::new(n / g, n)).unwrap().is_witnessed());
        }
    }

    #[test]
    fn thick_meets_syndetic(
        h in 40u64..400,
        n in 2u64..20,
        run_at in 0u64..400,
        g_raw in 1u64..20,
        offset in 0u64..20,
        seed in any::<u64>(),
    ) {
        prop_assume!(n < h);
        let g = g_raw.min(n);
        let start = run_at % (h - n + 1);
        let f = WindowSet::interval(start, start + n, h).unwrap();
        // A set meeting every length-g window of [0, h), with random slack.
        let mut s = Vec::new();
        let mut pos = offset % g;
        let mut state = seed;
        while pos < h {
            s.push(pos);
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            pos += 1 + (state >> 33) % g;
        }
        let s = WindowSet::new(s, h).unwrap();
        prop_assert!(detect_syndetic(&s, g).unwrap().is_witnessed());
        prop_assert!(s.min().unwrap() <= h - n);
        prop_assert!(!f.intersection(&s).is_empty());
    }
}
