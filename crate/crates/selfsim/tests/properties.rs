//! Invariants that hold for every input, checked on generated words, tables
//! and lamp configurations.

use std::sync::Arc;

use proptest::prelude::*;
use selfsim::central::{nil_commutator, nil_inverse, nil_multiply, orbit_mn, NilElement};
use selfsim::finite::{klein_lamp, FiniteGroup};
use selfsim::norm::{contraction_sides, solve_norm_weights};
use selfsim::synthesis::{schedule_partial, Constants, FTable};
use selfsim::traverse::{configuration_word, recursion_monotonicity_check};
use selfsim::tree::evaluate_word;
use selfsim::word::{formal_recursion, free_reduce, pre_reduce};
use selfsim::wreath::{build_delta_n, lamp_product_formula, DeltaSpec};
use selfsim::{OmegaString, TreeAut, Word};

fn tree_word(max: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(prop::sample::select(vec!['a', 'b', 'c', 'd']), 0..max)
        .prop_map(|v| v.into_iter().collect::<String>().parse().unwrap())
}

fn lamp_word(max: usize) -> impl Strategy<Value = Word> {
    let letters = vec!["a", "b", "c", "d", "u1", "v1", "v2"];
    proptest::collection::vec(prop::sample::select(letters), 0..max).prop_map(|v| v.join(" ").parse().unwrap())
}

fn nil_element(points: u32) -> impl Strategy<Value = NilElement> {
    (proptest::collection::btree_map(0..points, -3i64..=3, 0..6), -5i64..=5).prop_map(|(m, z)| NilElement {
        f: m.into_iter().filter(|e| e.1 != 0).collect(),
        z,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn words_round_trip_through_text(w in lamp_word(30)) {
        let back: Word = w.to_string().parse().unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn reductions_preserve_the_element(w in tree_word(40)) {
        let omega = OmegaString::first();
        let g = evaluate_word(&w, &omega, 8).unwrap();
        let free = free_reduce(&w).unwrap();
        let pre = pre_reduce(&w).unwrap();
        prop_assert_eq!(&evaluate_word(&free, &omega, 8).unwrap(), &g);
        prop_assert_eq!(&evaluate_word(&pre, &omega, 8).unwrap(), &g);
        prop_assert!(pre.len() <= w.len());
        prop_assert!(pre.is_pre_reduced());
        prop_assert_eq!(free_reduce(&free).unwrap(), free);
    }

    #[test]
    fn recursion_reassembles_the_element(w in tree_word(40)) {
        let omega = OmegaString::first();
        let r = formal_recursion(&w).unwrap();
        let left = evaluate_word(&r.w0, &omega, 7).unwrap();
        let right = evaluate_word(&r.w1, &omega, 7).unwrap();
        let whole = TreeAut::from_sections(&left, &right, r.swap).unwrap();
        prop_assert_eq!(whole, evaluate_word(&w, &omega, 8).unwrap());
    }

    #[test]
    fn inverses_and_associativity(x in tree_word(20), y in tree_word(20), z in tree_word(20)) {
        let omega = OmegaString::first();
        let [gx, gy, gz] = [&x, &y, &z].map(|w| evaluate_word(w, &omega, 9).unwrap());
        prop_assert!(gx.compose(&gx.inverse()).is_identity());
        prop_assert_eq!(gx.compose(&gy).compose(&gz), gx.compose(&gy.compose(&gz)));
        prop_assert_eq!(evaluate_word(&x.concat(&y), &omega, 9).unwrap(), gx.compose(&gy));
    }

    #[test]
    fn weighted_norm_contracts(w in tree_word(60)) {
        let w = pre_reduce(&w).unwrap();
        let (lhs, rhs) = contraction_sides(&w, &solve_norm_weights()).unwrap();
        prop_assert!(lhs <= rhs + 1e-9, "{} > {}", lhs, rhs);
    }

    #[test]
    fn section_fields_embed(w in tree_word(30), n in 2usize..=6) {
        prop_assert!(recursion_monotonicity_check(&w, n).unwrap().passed());
    }

    #[test]
    fn lamp_product_formula_agrees(w in lamp_word(30), n in 1usize..=3) {
        let lamp = Arc::new(FiniteGroup::new(klein_lamp()).unwrap());
        let delta = build_delta_n(&DeltaSpec::new(n, lamp)).unwrap();
        prop_assert_eq!(lamp_product_formula(&w, &delta).unwrap(), delta.eval(&w).unwrap());
    }

    #[test]
    fn configuration_words_reach_their_targets(targets in proptest::collection::vec(0u32..4, 8)) {
        let lamp = Arc::new(FiniteGroup::new(klein_lamp()).unwrap());
        let delta = build_delta_n(&DeltaSpec::new(3, lamp)).unwrap();
        let x = delta.eval(&configuration_word(&targets, &delta, None).unwrap()).unwrap();
        for p in 0..8u32 {
            prop_assert_eq!(x.lamp_at(p), targets[p as usize]);
        }
    }

    #[test]
    fn central_product_is_a_group_law(x in nil_element(64), y in nil_element(64), z in nil_element(64)) {
        let m = orbit_mn(2).unwrap();
        let xy_z = nil_multiply(&nil_multiply(&x, &y, &m).unwrap(), &z, &m).unwrap();
        let x_yz = nil_multiply(&x, &nil_multiply(&y, &z, &m).unwrap(), &m).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        let inv = nil_inverse(&x, &m).unwrap();
        prop_assert!(nil_multiply(&x, &inv, &m).unwrap().is_identity());
        let c = nil_commutator(&x, &y, &m).unwrap();
        prop_assert!(c.f.is_empty());
    }

    #[test]
    fn schedules_keep_their_invariants(slope in 0.0f64..1.0, bend in 0.0f64..1.0) {
        let alpha = Constants::default().alpha0;
        let beta = alpha + (1.0 - alpha) * slope;
        // log-log slope stays in [beta, 1], so f/x is nonincreasing and f subadditive
        let wiggle = (1.0 - beta) * bend;
        let f = FTable::from_log_fn(|lx| beta * lx + wiggle * (1.0 - (-lx).exp()), 200.0, 0.05).unwrap();
        let s = schedule_partial(&f, Constants::default().lambda0, 30).unwrap();
        prop_assert!(s.invariant_failures().is_empty(), "{:?}", s.invariant_failures());
    }

    #[test]
    fn tables_round_trip_through_csv(slope in 0.7f64..1.0) {
        let f = FTable::from_log_fn(|lx| slope * lx, 20.0, 0.5).unwrap();
        let back = FTable::parse_csv(&f.to_csv()).unwrap();
        prop_assert_eq!(back.to_csv(), f.to_csv());
    }
}
