use adjzeta::numkernel::{int, rat, rpow, Rational};
use adjzeta::unramzeta::{
    cs_whittaker, local_series, psi_scaling_check, reference_series, section_valuation_cells,
    section_valuation_direct, zeta_series, Bounds, SatakeTriple,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

/// Fixed seed so failures reproduce; nothing is persisted.
fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(20240611),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn triple(a: Rational, b: Rational) -> SatakeTriple {
    let c = (&a * &b).recip();
    SatakeTriple::new(a, b, c).unwrap()
}

fn satake() -> impl Strategy<Value = SatakeTriple> {
    ((1i64..5, 1i64..4), (-4i64..5, 1i64..4))
        .prop_filter("nonzero", |(_, (n, _))| *n != 0)
        .prop_map(|((a, b), (c, d))| triple(rat(a, b), rat(c, d)))
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn shell_cells_partition_the_shell(x1 in -2i64..3, x2 in -2i64..3, j in -3i64..4, p in prop::sample::select(vec![2u64, 3]), u in 0i64..1000) {
        let cells = section_valuation_cells(x1, x2, p, j, 40).unwrap();
        let pp = int(p as i64);
        let measure: Rational = cells.iter().map(|c| rpow(&pp, -c.depth)).sum();
        // shell val(z) = j has measure (1 − 1/p)·p^{-j}
        prop_assert_eq!(measure, (int(1) - rpow(&pp, -1)) * rpow(&pp, -j));
        // every point of a cell sees the cell's valuation
        for c in cells.iter().take(12) {
            let z0: Rational = c.center.parse().unwrap();
            let z = &z0 + int(u) * rpow(&pp, c.depth);
            prop_assert_eq!(section_valuation_direct(&z, x1, x2, p), c.valuation);
            prop_assert_eq!(section_valuation_direct(&z0, x1, x2, p), c.valuation);
        }
    }

    #[test]
    fn whittaker_support_and_symmetry(sat in satake(), m in -3i64..5, n in -3i64..5) {
        let w = cs_whittaker(m, n, &sat, 3);
        if m < 0 || n < 0 {
            prop_assert!(w.is_zero());
        }
        // a symmetric function of the Satake parameters
        let [a, b, c] = sat.values().clone();
        let swapped = SatakeTriple::new(b, c, a).unwrap();
        prop_assert_eq!(cs_whittaker(m, n, &swapped, 3), w);
    }
}

#[test]
fn whittaker_is_normalized_at_identity() {
    let sat = triple(int(2), int(3));
    assert!(cs_whittaker(0, 0, &sat, 2).is_one());
    // first fundamental coordinate: p^{-1}·(a1 + a2 + a3)
    let expect = rat(1, 2) * (int(2) + int(3) + rat(1, 6));
    assert_eq!(cs_whittaker(1, 0, &sat, 2), expect);
}

#[test]
fn cell_search_is_stable_in_depth() {
    for (x1, x2) in [(0, 0), (1, -1), (2, 1), (-1, 2)] {
        let a = section_valuation_cells(x1, x2, 2, 0, 30).unwrap();
        let b = section_valuation_cells(x1, x2, 2, 0, 60).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn coefficients_are_stable_under_larger_boxes() {
    let sat = triple(int(2), int(3));
    let (base, ..) = local_series(&sat, 2, 9, 0, Bounds::default()).unwrap();
    let wide = Bounds {
        torus_slack: 2,
        max_depth: 60,
    };
    let (more, ..) = local_series(&sat, 2, 9, 0, wide).unwrap();
    assert!(base.agrees_through(&more, 9), "{:?}", base.mismatches(&more, 9));
}

#[test]
fn exact_match_and_negative_control() {
    let sat = triple(int(2), int(3));
    let report = zeta_series(&sat, 3, 9, Bounds::default()).unwrap();
    assert!(report.pass);
    assert!(report.computed.agrees_through(&report.reference, 9));
    assert!(!report.hypotheses[1].matches);
    // a different representation gives a different series
    let other = reference_series(&triple(int(1), int(1)), 3, 9, 0).unwrap();
    assert!(!report.computed.mismatches(&other, 9).is_empty());
}

#[test]
fn additive_character_rescaling() {
    let sat = triple(rat(1, 2), int(-1));
    for c in [1, 2] {
        let r = psi_scaling_check(c, &sat, 2, 6).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.through, 6);
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(SatakeTriple::new(int(2), int(3), int(1)).is_err());
    assert!(SatakeTriple::new(int(0), int(3), int(1)).is_err());
    let sat = triple(int(1), int(1));
    assert!(local_series(&sat, 4, 6, 0, Bounds::default()).is_err());
    assert!(psi_scaling_check(-1, &sat, 2, 6).is_err());
}
