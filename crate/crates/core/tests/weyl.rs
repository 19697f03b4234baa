use std::collections::BTreeSet;

use loopmod_core::algebra::{int, ratio};
use loopmod_core::weyl::{analyze_orbit, classify, overlapping_supports, WeightPoint, WeylGen, Window};
use loopmod_core::{LinComb, Scalar};
use proptest::prelude::*;

fn point(a: Scalar, coords: Vec<Scalar>) -> WeightPoint {
    WeightPoint::finite(a, coords).unwrap()
}

#[test]
fn class_count_is_two_to_the_degenerate_count() {
    for s in 0..=3usize {
        let coords = (0..4).map(|i| if i < s { int(i as i64 - 1) } else { ratio(1, i as i64 + 2) }).collect();
        let desc = analyze_orbit(&point(int(1), coords));
        let win = Window::first(4, 2);
        assert_eq!(desc.degenerate_in(&win).len(), s);
        let classes = classify(&desc, &win).unwrap();
        assert_eq!(classes.len(), 1 << s);
        assert!(overlapping_supports(&classes).is_empty());
    }
}

#[test]
fn cone_tips_are_killed() {
    let desc = analyze_orbit(&point(int(1), vec![int(0)]));
    let win = Window::first(1, 3);
    for m in classify(&desc, &win).unwrap() {
        let delta = m.deltas()[&1];
        let tip = m.p.with_coord(1, if delta { int(1) } else { int(0) }).unwrap();
        assert!(m.in_support(&tip));
        let g = if delta { WeylGen::D(1) } else { WeylGen::X(1) };
        assert!(m.act_unbounded(g, &tip).unwrap().is_zero());
    }
}

fn coord() -> impl Strategy<Value = Scalar> {
    prop_oneof![(-3i64..=3).prop_map(int), (-5i64..=5, 2i64..=5).prop_map(|(n, d)| ratio(n, d))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn classes_partition_and_satisfy_relations(coords in prop::collection::vec(coord(), 1..=3), a_num in 1i64..=3) {
        let a = ratio(a_num, 2);
        let coords: Vec<Scalar> = coords.into_iter().map(|c| c * &a).collect();
        let n = coords.len();
        let desc = analyze_orbit(&point(a.clone(), coords));
        let win = Window::first(n, 2);
        let classes = classify(&desc, &win).unwrap();
        prop_assert_eq!(classes.len(), 1usize << desc.degenerate_in(&win).len());
        prop_assert!(overlapping_supports(&classes).is_empty());
        let union: BTreeSet<WeightPoint> = classes.iter().flat_map(|m| m.support()).collect();
        let total: usize = classes.iter().map(|m| m.support().len()).sum();
        prop_assert_eq!(union.len(), total);
        for m in &classes {
            m.check_relations().unwrap();
            m.check_weight_propagation().unwrap();
            m.check_break_annihilation().unwrap();
            m.check_irreducible_in_window().unwrap();
            for q in m.support() {
                for i in 1..=n {
                    let w = LinComb::basis(q.clone());
                    let dx = w.map_linear(|p| m.act_unbounded(WeylGen::X(i), p)).unwrap()
                        .map_linear(|p| m.act_unbounded(WeylGen::D(i), p)).unwrap();
                    let xd = w.map_linear(|p| m.act_unbounded(WeylGen::D(i), p)).unwrap()
                        .map_linear(|p| m.act_unbounded(WeylGen::X(i), p)).unwrap();
                    prop_assert_eq!(dx.minus(&xd), w.scale(&a));
                }
            }
        }
    }
}
