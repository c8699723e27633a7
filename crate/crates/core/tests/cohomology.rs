use charrank_core::cohomology::direct_ideal_slice;
use charrank_core::duals::{frobenius_recurrence_holds, g_table};
use charrank_core::rank_cup::{cup_bound_from_rank, w2_power_survives};
use charrank_core::{
    charrank_oriented, cup_lower_sw, cup_upper, Cohomology, Error, GrassmannContext,
};

fn coh(n: u32, k: u32) -> Cohomology {
    Cohomology::new(GrassmannContext::new(n, k).unwrap())
}

#[test]
fn incremental_slices_match_direct_elimination_on_larger_contexts() {
    for (n, k) in [(9, 3), (11, 3), (10, 4), (11, 4), (12, 5)] {
        let h = coh(n, k);
        for j in 0..=h.context().dim() {
            let s = h.degree_slice(j).unwrap();
            let direct = direct_ideal_slice(&h.context(), j, h.generators());
            assert_eq!(s.ideal_rows().rows(), direct.rows(), "({n},{k}) degree {j}");
            assert_eq!(s.quotient_picks(), direct.non_pivot_cols());
        }
    }
}

#[test]
fn gysin_reports_are_consistent() {
    let mut contexts = vec![];
    contexts.extend((3..=12).map(|n| (n, 1)));
    contexts.extend((4..=14).map(|n| (n, 2)));
    contexts.extend((6..=16).map(|n| (n, 3)));
    contexts.extend((8..=13).map(|n| (n, 4)));
    contexts.extend((10..=12).map(|n| (n, 5)));
    for (n, k) in contexts {
        let report = coh(n, k).gysin_report();
        assert_eq!(report.violations(), Vec::<String>::new(), "({n},{k})");
        let oriented = report.betti_oriented();
        assert_eq!(oriented.first(), Some(&1), "({n},{k})");
        assert_eq!(oriented.last(), Some(&1), "({n},{k})");
    }
}

#[test]
fn frobenius_recurrence_holds_wherever_it_applies() {
    for k in 2..=5usize {
        let mut table = g_table(k).unwrap();
        for s in 0..=4u32 {
            let bound = 1 + k as u32 * (1 << s);
            for i in bound..bound + 48 {
                assert!(
                    frobenius_recurrence_holds(&mut table, i, s).unwrap(),
                    "k={k} s={s} i={i}"
                );
            }
            assert!(matches!(
                frobenius_recurrence_holds(&mut table, bound - 1, s),
                Err(Error::Precondition(_))
            ));
        }
    }
}

#[test]
fn cup_bounds_bracket_each_other() {
    for (n, k) in [
        (6, 3),
        (7, 3),
        (8, 3),
        (9, 3),
        (10, 3),
        (8, 4),
        (9, 4),
        (10, 5),
    ] {
        let h = coh(n, k);
        let rank = charrank_oriented(&h, None).unwrap();
        let report = cup_upper(&h, &rank).unwrap();
        let lower = cup_lower_sw(&h, usize::MAX);
        assert!(!lower.search_capped);
        assert!(
            lower.value >= 1 && lower.value <= report.upper,
            "({n},{k}) {lower:?} {report:?}"
        );
        assert_eq!(
            report.upper,
            cup_bound_from_rank(report.d, rank.value.value(), report.r_used)
        );
        let with = report.clone().with_lower(lower.clone());
        assert_eq!(
            with.exact,
            (lower.value == report.upper).then_some(report.upper)
        );
    }
}

#[test]
fn lower_bound_search_respects_its_budget() {
    let h = coh(8, 3);
    let none = cup_lower_sw(&h, 0);
    assert_eq!((none.value, none.tested, none.search_capped), (0, 0, true));
    assert_eq!(none.witness, None);
    let full = cup_lower_sw(&h, usize::MAX);
    assert_eq!(full.value, 4);
    assert_eq!(full.witness.as_deref(), Some("w2^4"));
    assert!(w2_power_survives(&h, 4).unwrap());
    assert!(!w2_power_survives(&h, 5).unwrap());
}

#[test]
fn capped_charrank_scan_is_a_lower_bound() {
    let h = coh(11, 5);
    let exact = charrank_oriented(&h, None).unwrap();
    assert!(exact.value.is_exact());
    let capped = charrank_oriented(&h, Some(5)).unwrap();
    assert!(!capped.value.is_exact());
    assert!(capped.value.value() <= exact.value.value());
}
