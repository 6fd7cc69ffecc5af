use std::collections::BTreeSet;

use lotus_core::arith::{cf_eval, cf_expand, coprime_part_char, wedge, wild_part_char};
use lotus_core::ewtree::{ew_from_lotus, in_semigroup, minimal_generators, EwTree};
use lotus_core::ffield::FiniteField;
use lotus_core::fixtures::{random_lotus, random_series};
use lotus_core::invariants::{delta, intersection_via_multiplicities, intersection_via_order, multiplicities};
use lotus_core::lotus::{lattice_image, lattice_newton_lotus_oracle, newton_lotus, parse_steps, to_steps, LatticePetal};
use lotus_core::puiseux::ew_from_series;
use lotus_core::report::{build_report, CurveFile, Model, Source, TrunkChoice};
use lotus_core::{ExtRational, Lotus, Rational};
use proptest::prelude::*;

/// Turns a vector of raw draws into the `pick` callback the generators expect.
fn picker(draws: Vec<usize>) -> impl FnMut(usize) -> usize {
    let mut i = 0;
    move |n| {
        let d = draws[i % draws.len()];
        i += 1;
        d % n
    }
}

fn lotus_strategy(max_petals: usize) -> impl Strategy<Value = Lotus> {
    prop::collection::vec(any::<usize>(), 64).prop_map(move |d| random_lotus(&mut picker(d), max_petals, 4))
}

fn slope() -> impl Strategy<Value = Rational> {
    (1i64..=30, 1i64..=30).prop_map(|(n, d)| Rational::new(n, d))
}

fn fin(q: &Rational) -> ExtRational {
    ExtRational::Finite(q.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn continued_fraction_round_trip(n in 1i64..100_000, d in 1i64..100_000) {
        let q = Rational::new(n, d);
        let cf = cf_expand(&q).unwrap();
        prop_assert!(cf.is_canonical());
        prop_assert_eq!(cf_eval(&cf), q);
    }

    #[test]
    fn newton_lotus_matches_lattice(g in slope()) {
        let nl = newton_lotus(&[fin(&g)]).unwrap();
        let terms: usize = cf_expand(&g).unwrap().small_terms().unwrap().iter().sum();
        prop_assert_eq!(nl.lotus.petals().len(), terms);
        prop_assert_eq!(lattice_image(&nl.lotus), lattice_newton_lotus_oracle(&[fin(&g)]));
    }

    #[test]
    fn newton_lotuses_meet_in_the_wedge(g in slope(), m in slope()) {
        prop_assume!(g != m);
        let w = wedge(&g, &m).unwrap();
        prop_assert_eq!(&wedge(&m, &g).unwrap(), &w);
        let a = lattice_newton_lotus_oracle(&[fin(&g)]);
        let b = lattice_newton_lotus_oracle(&[fin(&m)]);
        let meet: BTreeSet<LatticePetal> = a.intersection(&b).cloned().collect();
        prop_assert_eq!(meet, lattice_newton_lotus_oracle(&[fin(&w)]));
        let union: BTreeSet<LatticePetal> = a.union(&b).cloned().collect();
        prop_assert_eq!(lattice_image(&newton_lotus(&[fin(&g), fin(&m)]).unwrap().lotus), union);
    }

    #[test]
    fn char_parts_factor(n in 1u64..1_000_000, p in prop::sample::select(vec![0u64, 2, 3, 5, 7, 11])) {
        let tame = coprime_part_char(n, p);
        prop_assert_eq!(tame * wild_part_char(n, p), n);
        if p > 0 {
            prop_assert!(!tame.is_multiple_of(p));
        }
    }

    #[test]
    fn minimal_generators_span_the_same_semigroup(gens in prop::collection::vec(2u64..60, 1..6)) {
        let min = minimal_generators(&gens).unwrap();
        for &g in &gens {
            prop_assert!(in_semigroup(g, &min).unwrap());
        }
        for (i, &g) in min.iter().enumerate() {
            let others: Vec<u64> = min.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            prop_assert!(!in_semigroup(g, &others).unwrap());
        }
    }

    #[test]
    fn field_inverses(p in prop::sample::select(vec![2u64, 3, 5, 7]), m in 1usize..4, idx in 1u64..1000) {
        let f = FiniteField::new(p, m).unwrap();
        let a = f.from_index(idx % (f.size().unwrap() - 1) + 1);
        prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
    }

    #[test]
    fn lotus_serializations_round_trip(l in lotus_strategy(14)) {
        prop_assert!(l.satisfies_triangle_condition());
        prop_assert!(l.boundary_is_tree());
        let back = Lotus::from_json(&l.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), l.to_json());
        let again = parse_steps(&to_steps(&l)).unwrap();
        prop_assert!(again.is_isomorphic(&l));
    }

    #[test]
    fn lotus_invariants_agree(l in lotus_strategy(12)) {
        let branches = l.branch_leaves();
        let tree = ew_from_lotus(&l).unwrap();
        prop_assert!(multiplicities(&l, &branches).unwrap().satisfies_proximity(&l));
        let mut total = 0;
        for &b in &branches {
            total += delta(&l, &[b]).unwrap();
        }
        for (i, &a) in branches.iter().enumerate() {
            for &b in &branches[i + 1..] {
                let by_products = intersection_via_multiplicities(&l, a, b).unwrap();
                prop_assert_eq!(intersection_via_order(&l, b, a).unwrap(), by_products);
                let (ta, tb) = (tree.leaf_id(l.name(a)).unwrap(), tree.leaf_id(l.name(b)).unwrap());
                prop_assert_eq!(tree.tripod_intersection(ta, tb).unwrap(), by_products);
                total += by_products;
            }
        }
        prop_assert_eq!(delta(&l, &branches).unwrap(), total);
    }

    #[test]
    fn trees_round_trip_through_trunks(l in lotus_strategy(10)) {
        let tree = ew_from_lotus(&l).unwrap();
        prop_assert!(EwTree::from_json(&tree.to_json()).unwrap().is_isomorphic(&tree));
        let count = tree.trunk_decomposition_count().unwrap();
        for k in 0..count.min(8) {
            let rebuilt = tree.lotus_from_trunks(&tree.trunk_decomposition(k).unwrap()).unwrap();
            prop_assert!(ew_from_lotus(&rebuilt).unwrap().is_isomorphic(&tree));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lotus_reports_pass_their_checks(l in lotus_strategy(12)) {
        let model = Model::build(Source::Lotus(l), TrunkChoice::Canonical, false).unwrap();
        let r = build_report(&model, 0, None, true).unwrap();
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.ok).collect();
        prop_assert!(failed.is_empty(), "{:?}", failed);
    }

    #[test]
    fn series_reports_pass_their_checks(d in prop::collection::vec(any::<usize>(), 64), p in prop::sample::select(vec![0u64, 7])) {
        let s = random_series(&mut picker(d), 5);
        let tree = ew_from_series("L", &s).unwrap();
        let leaves = tree.branches();
        for i in 0..leaves.len() {
            for j in i + 1..leaves.len() {
                for k in j + 1..leaves.len() {
                    let mut u = [
                        tree.ultrametric(leaves[i], leaves[j]).unwrap(),
                        tree.ultrametric(leaves[i], leaves[k]).unwrap(),
                        tree.ultrametric(leaves[j], leaves[k]).unwrap(),
                    ];
                    u.sort();
                    prop_assert_eq!(&u[1], &u[2]);
                }
            }
        }
        let curve = CurveFile {
            char: p,
            branches: Some(s.iter().map(|(l, x)| (l.clone(), x.to_string())).collect()),
            ..Default::default()
        };
        // coefficients can vanish or branches coincide once reduced mod p
        let Ok(model) = Model::build(Source::Curve(curve), TrunkChoice::Canonical, false) else {
            prop_assume!(p != 0);
            return Ok(());
        };
        let r = build_report(&model, 0, None, true).unwrap();
        let failed: Vec<_> = r.checks.iter().filter(|c| !c.ok).collect();
        prop_assert!(failed.is_empty(), "{:?}", failed);
    }
}
