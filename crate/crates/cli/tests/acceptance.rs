//! End-to-end acceptance: one pass/fail line per criterion, all with exact values.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;

use lotus_core::arith::{cf_eval, cf_expand, coprime_part_char, wedge};
use lotus_core::ewtree::{
    ew_from_lotus, milnor_from_char_exponents, milnor_from_char_exponents_last, semigroup_from_char_exponents,
    semigroup_from_lotus, EwTree, NodeId,
};
use lotus_core::fixtures;
use lotus_core::invariants::{
    delta, dual_graph, intersection_via_multiplicities, intersection_via_order, lambda_ord, milnor, multiplicities,
    orders_of_vanishing,
};
use lotus_core::lotus::{lattice_image, lattice_newton_lotus_oracle, newton_lotus, LatticePetal};
use lotus_core::puiseux::{has_np_root, intersection_oracle, Monomial, NpSeries, PlanePoly};
use lotus_core::report::{build_report, detect_input, Model, TrunkChoice};
use lotus_core::{ExtRational, Lotus, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn same<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Outcome {
    ensure(got == want, || format!("{what}: got {got:?}, expected {want:?}"))
}

fn id(l: &Lotus, label: &str) -> usize {
    l.vertex_id(label).unwrap()
}

/// `(λ, ord_L, dual-graph weight)` of every exceptional vertex, sorted.
fn vertex_triples(l: &Lotus) -> Vec<(u64, u64, i64)> {
    let lo = lambda_ord(l).unwrap();
    let w: BTreeMap<usize, i64> = dual_graph(l).weights.into_iter().collect();
    let mut out: Vec<(u64, u64, i64)> =
        l.exceptional_vertices().into_iter().map(|v| (lo[v].lambda, lo[v].ord, w[&v])).collect();
    out.sort();
    out
}

/// Multiplicities on petal bases plus the weight on each branch's own base edge.
fn multiplicity_multiset(l: &Lotus) -> Vec<u64> {
    let branches = l.branch_leaves();
    let w = multiplicities(l, &branches).unwrap();
    let mut all = w.petal_bases(l);
    for &b in &branches {
        let (x, y) = l.leaf_edge(b).unwrap();
        all.push(w.get(x, y));
    }
    all.sort_unstable_by(|a, b| b.cmp(a));
    all
}

/// `(ord_L, ord of the curve)` at each exceptional vertex, sorted, to pin values to vertices.
fn orders_by_vertex(l: &Lotus) -> Vec<(u64, u64, u64)> {
    let lo = lambda_ord(l).unwrap();
    let ord = orders_of_vanishing(l, &l.branch_leaves()).unwrap();
    let mut out: Vec<(u64, u64, u64)> =
        l.exceptional_vertices().into_iter().map(|v| (lo[v].lambda, lo[v].ord, ord[v])).collect();
    out.sort();
    out
}

fn criterion_1() -> Outcome {
    let cusp = fixtures::cusp();
    same("cusp (λ, ord, weight)", vertex_triples(&cusp), vec![(2, 1, -3), (3, 1, -2), (5, 2, -1)])?;
    same("cusp multiplicities", multiplicity_multiset(&cusp), vec![2, 1, 1, 1])?;
    same("cusp orders", orders_by_vertex(&cusp), vec![(2, 1, 2), (3, 1, 3), (5, 2, 6)])?;

    let branch = fixtures::branch();
    same(
        "branch (λ, ord, weight)",
        vertex_triples(&branch),
        vec![(2, 1, -3), (3, 1, -2), (5, 2, -2), (6, 2, -4), (7, 2, -2), (13, 4, -2), (19, 6, -1)],
    )?;
    same("branch multiplicities", multiplicity_multiset(&branch), vec![6, 3, 3, 3, 1, 1, 1, 1])?;
    same(
        "branch orders",
        orders_by_vertex(&branch),
        vec![(2, 1, 6), (3, 1, 9), (5, 2, 18), (6, 2, 21), (7, 2, 22), (13, 4, 44), (19, 6, 66)],
    )?;

    let three = fixtures::three_branch();
    same(
        "three-branch (λ, ord, weight)",
        vertex_triples(&three),
        vec![
            (2, 1, -3),
            (3, 1, -2),
            (5, 2, -2),
            (6, 2, -4),
            (7, 2, -3),
            (13, 4, -3),
            (19, 6, -1),
            (20, 6, -3),
            (21, 6, -2),
            (41, 12, -1),
        ],
    )?;
    same(
        "three-branch multiplicities",
        multiplicity_multiset(&three),
        vec![20, 10, 10, 10, 5, 3, 2, 1, 1, 1, 1, 1, 1],
    )?;
    same(
        "three-branch orders",
        orders_by_vertex(&three),
        vec![
            (2, 1, 20),
            (3, 1, 30),
            (5, 2, 60),
            (6, 2, 70),
            (7, 2, 75),
            (13, 4, 148),
            (19, 6, 219),
            (20, 6, 225),
            (21, 6, 226),
            (41, 12, 452),
        ],
    )
}

fn series(list: &[(&str, &str)], p: u64) -> Vec<(String, NpSeries)> {
    list.iter().map(|(l, s)| (l.to_string(), NpSeries::parse(s, p).unwrap())).collect()
}

fn criterion_2() -> Outcome {
    let l = fixtures::three_branch();
    let tree = ew_from_lotus(&l).unwrap();
    let s: BTreeMap<String, NpSeries> = series(fixtures::THREE_BRANCH_SERIES, 0).into_iter().collect();
    for (a, b, want) in [("A1", "A2", 132), ("A1", "A3", 21), ("A2", "A3", 42)] {
        let (va, vb) = (id(&l, a), id(&l, b));
        same(&format!("{a}·{b} by products"), intersection_via_multiplicities(&l, va, vb).unwrap(), want)?;
        same(&format!("{a}·{b} by order"), intersection_via_order(&l, va, vb).unwrap(), want)?;
        same(&format!("{b}·{a} by order"), intersection_via_order(&l, vb, va).unwrap(), want)?;
        let (ta, tb) = (tree.leaf_id(a).unwrap(), tree.leaf_id(b).unwrap());
        same(&format!("{a}·{b} by tripod"), tree.tripod_intersection(ta, tb).unwrap(), want)?;
        same(&format!("{a}·{b} by series"), intersection_oracle(&s[a], &s[b]).unwrap(), want)?;
    }
    Ok(())
}

/// Builds a tree from `(parent, exponent, index)` interior rows and `(parent, label, index, curvetta)` leaves;
/// parent 0 is the root and interior rows are numbered from 1 in order.
fn tree_of(interior: &[(usize, Rational, u64)], leaves: &[(usize, &str, u64, bool)]) -> EwTree {
    let mut t = EwTree::with_root("L");
    let mut ids = vec![t.root()];
    for (parent, e, i) in interior {
        let v = t.add_node(ids[*parent], e.clone(), *i);
        ids.push(v);
    }
    for &(parent, label, i, curvetta) in leaves {
        t.add_leaf(ids[parent], label, i, curvetta);
    }
    t.finish().unwrap()
}

fn expected_trees() -> Vec<(&'static str, Lotus, EwTree)> {
    vec![
        ("cusp", fixtures::cusp(), tree_of(&[(0, q(3, 2), 1)], &[(1, "L1", 1, true), (1, "A", 2, false)])),
        (
            "branch",
            fixtures::branch(),
            tree_of(
                &[(0, q(3, 2), 1), (1, q(13, 6), 2)],
                &[(1, "L1", 1, true), (2, "L2", 2, true), (2, "A1", 6, false)],
            ),
        ),
        (
            "three-branch",
            fixtures::three_branch(),
            tree_of(
                &[(0, q(3, 2), 1), (1, q(2, 1), 2), (2, q(13, 6), 2), (3, q(7, 3), 2), (4, q(29, 12), 6)],
                &[
                    (1, "L1", 1, true),
                    (2, "A3", 2, false),
                    (3, "A1", 6, false),
                    (4, "L2", 2, true),
                    (5, "L3", 6, true),
                    (5, "A2", 12, false),
                ],
            ),
        ),
    ]
}

fn criterion_3() -> Outcome {
    for (name, lotus, want) in expected_trees() {
        let got = ew_from_lotus(&lotus).unwrap();
        ensure(got.is_isomorphic(&want), || {
            format!("{name}: tree {} differs from {}", got.canonical_form(), want.canonical_form())
        })?;
    }
    let (_, _, three) = expected_trees().pop().unwrap();
    same("decompositions of the three-branch tree", three.trunk_decomposition_count().unwrap(), 2)?;
    for (k, dec) in three.trunk_decompositions().unwrap().enumerate() {
        let back = ew_from_lotus(&three.lotus_from_trunks(&dec).unwrap()).unwrap();
        ensure(back.is_isomorphic(&three), || format!("decomposition {k} does not round-trip"))?;
    }
    let canonical = three.lotus_from_trunks(&three.canonical_trunk_decomposition().unwrap()).unwrap();
    ensure(canonical.is_isomorphic(&fixtures::three_branch()), || {
        "canonical decomposition does not rebuild the three-branch lotus".to_string()
    })
}

fn node_at(tree: &EwTree, e: &Rational) -> NodeId {
    tree.interior_nodes().into_iter().find(|&v| tree.node(v).exponent == ExtRational::Finite(e.clone())).unwrap()
}

fn criterion_4() -> Outcome {
    let tree = ew_from_lotus(&fixtures::three_branch()).unwrap();
    for (e, c) in [(q(3, 2), q(3, 2)), (q(2, 1), q(7, 4)), (q(13, 6), q(11, 6)), (q(7, 3), q(23, 12)), (q(29, 12), q(139, 72))] {
        same(&format!("contact at {e}"), tree.contact_complexity(node_at(&tree, &e)), ExtRational::Finite(c))?;
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let cusp = fixtures::cusp();
    let branch = fixtures::branch();
    same("cusp semigroup by recursion", semigroup_from_char_exponents(&[q(3, 2)]).unwrap(), vec![2, 3])?;
    same("cusp semigroup by lotus", semigroup_from_lotus(&cusp, id(&cusp, "A")).unwrap().generators, vec![2, 3])?;
    let exps = [q(3, 2), q(13, 6)];
    same("branch semigroup by recursion", semigroup_from_char_exponents(&exps).unwrap(), vec![6, 9, 22])?;
    let sg = semigroup_from_lotus(&branch, id(&branch, "A1")).unwrap();
    same("branch semigroup by lotus", (sg.generators, sg.minimal), (vec![6, 9, 22], true))?;
    let a1 = id(&branch, "A1");
    let tree = ew_from_lotus(&branch).unwrap();
    same("μ from exponents", milnor_from_char_exponents(&exps).unwrap(), 48)?;
    same("μ from last exponent", milnor_from_char_exponents_last(&exps).unwrap(), 48)?;
    same("μ from tree", tree.milnor(tree.leaf_id("A1").unwrap()).unwrap(), 48)?;
    same("μ as 2δ - r + 1", 2 * delta(&branch, &[a1]).unwrap(), 48)?;
    same("μ of the lotus", milnor(&branch, &[a1]).unwrap(), 48)?;
    same("δ of the branch", delta(&branch, &[a1]).unwrap(), 24)?;
    let three = fixtures::three_branch();
    let all = three.branch_leaves();
    same("δ of three branches", delta(&three, &all).unwrap(), 339)?;
    same("μ of three branches", milnor(&three, &all).unwrap(), 676)?;
    let nm = fixtures::non_minimal();
    let sg = semigroup_from_lotus(&nm, id(&nm, "A")).unwrap();
    same("non-minimal sequence", (sg.generators, sg.minimal), (vec![2, 2, 3], false))
}

fn slopes(bound: i64) -> Vec<Rational> {
    let mut set = BTreeSet::new();
    for n in 1..=bound {
        for d in 1..=bound {
            set.insert(q(n, d));
        }
    }
    set.into_iter().collect()
}

fn criterion_6() -> Outcome {
    for n in 1..=50 {
        for d in 1..=50 {
            let cf = cf_expand(&q(n, d)).unwrap();
            ensure(cf.is_canonical() && cf_eval(&cf) == q(n, d), || format!("cf round trip of {n}/{d}"))?;
        }
    }
    let all = slopes(12);
    let mut oracle: BTreeMap<Rational, BTreeSet<LatticePetal>> = BTreeMap::new();
    for g in &all {
        let petals = lattice_newton_lotus_oracle(&[ExtRational::Finite(g.clone())]);
        let nl = newton_lotus(&[ExtRational::Finite(g.clone())]).unwrap();
        let terms: usize = cf_expand(g).unwrap().small_terms().unwrap().iter().sum();
        same(&format!("petals of Λ({g})"), nl.lotus.petals().len(), terms)?;
        same(&format!("lattice count of Λ({g})"), petals.len(), terms)?;
        ensure(lattice_image(&nl.lotus) == petals, || format!("Λ({g}) differs from the lattice oracle"))?;
        oracle.insert(g.clone(), petals);
    }
    for (i, g) in all.iter().enumerate() {
        for m in &all[i + 1..] {
            let w = wedge(g, m).unwrap();
            same(&format!("wedge({g}, {m}) symmetric"), wedge(m, g).unwrap(), w.clone())?;
            let meet: BTreeSet<LatticePetal> = oracle[g].intersection(&oracle[m]).cloned().collect();
            let want = oracle.get(&w).cloned().unwrap_or_else(|| lattice_newton_lotus_oracle(&[ExtRational::Finite(w.clone())]));
            ensure(meet == want, || format!("Λ({g}) ∩ Λ({m}) is not Λ({w})"))?;
        }
    }
    // a sample of pairs also checked as a single two-slope lotus
    for (g, m) in [(q(4, 3), q(5, 3)), (q(7, 5), q(2, 9)), (q(11, 4), q(3, 1)), (q(1, 12), q(12, 1))] {
        let both = [ExtRational::Finite(g.clone()), ExtRational::Finite(m.clone())];
        let union: BTreeSet<LatticePetal> = oracle[&g].union(&oracle[&m]).cloned().collect();
        same(&format!("Λ({{{g}, {m}}}) oracle"), lattice_newton_lotus_oracle(&both), union.clone())?;
        same(&format!("Λ({{{g}, {m}}}) glued"), lattice_image(&newton_lotus(&both).unwrap().lotus), union)?;
    }
    let f = |g: Rational| newton_lotus(&[ExtRational::Finite(g)]).unwrap().lotus.petals().len();
    same("petals of Λ(4/3), Λ(5/3)", (f(q(4, 3)), f(q(5, 3))), (4, 4))?;
    same("wedge(4/3, 5/3)", wedge(&q(4, 3), &q(5, 3)).unwrap(), q(3, 2))?;
    let glued = newton_lotus(&[ExtRational::Finite(q(4, 3)), ExtRational::Finite(q(5, 3))]).unwrap();
    same("petals of the glued lotus", glued.lotus.petals().len(), 4 + 4 - f(q(3, 2)))
}

fn conjugate_agreement_counts(s: &NpSeries) -> Outcome {
    let p = s.char();
    let conj = s.conjugates().unwrap();
    same(&format!("conjugates of {s}"), conj.len() as u64, coprime_part_char(s.n(), p))?;
    let distinct: BTreeSet<String> = conj.iter().map(|c| c.to_string()).collect();
    same(&format!("distinct conjugates of {s}"), distinct.len(), conj.len())?;
    // e_j: n divided by the lcm of denominators up to the j-th characteristic exponent
    let exps = s.char_exponents();
    let mut e = vec![s.n()];
    let mut lcm = 1u64;
    for a in &exps {
        let d = a.denom_u64().unwrap();
        lcm = lcm / num_gcd(lcm, d) * d;
        e.push(s.n() / lcm);
    }
    for (j, a) in exps.iter().enumerate() {
        let v: Vec<ExtRational> = conj.iter().map(|c| c.valuation_of_difference(s)).collect();
        let at_least = v.iter().filter(|x| **x >= ExtRational::Finite(a.clone())).count() as u64;
        let exactly = v.iter().filter(|x| **x == ExtRational::Finite(a.clone())).count() as u64;
        same(&format!("{s}: conjugates agreeing to order {a}"), at_least, coprime_part_char(e[j], p))?;
        same(
            &format!("{s}: conjugates departing at {a}"),
            exactly,
            coprime_part_char(e[j], p) - coprime_part_char(e[j + 1], p),
        )?;
    }
    Ok(())
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

/// A series with denominator exactly `n`: exponents `1 + k/n` for a random increasing set of `k`
/// that includes one coprime to `n`.
fn series_with_index(rng: &mut ChaCha8Rng, n: u64, p: u64) -> NpSeries {
    let mut ks: BTreeSet<u64> = BTreeSet::from([1]);
    for _ in 0..rng.gen_range(0..4) {
        ks.insert(rng.gen_range(1..=2 * n));
    }
    let terms: Vec<(Rational, Rational)> = ks
        .into_iter()
        .map(|k| {
            let c = if p == 0 { rng.gen_range(1..5) } else { rng.gen_range(1..p as i64) };
            (q((n + k) as i64, n as i64), Rational::from_int(c))
        })
        .collect();
    NpSeries::new(p, &terms).unwrap()
}

fn criterion_7() -> Outcome {
    // the cusp grown with L and L1 exchanged, in characteristic 3
    let tree = ew_from_lotus(&fixtures::swapped_cusp()).unwrap();
    let want = tree_of(&[(0, q(2, 3), 1)], &[(1, "L1", 1, true), (1, "A", 3, false)]);
    ensure(tree.is_isomorphic(&want), || format!("char-3 cusp tree {}", tree.canonical_form()))?;
    let char3 = Model::build(
        detect_input(&std::fs::read_to_string(fixture_dir().join("char3-cusp.series")).unwrap()).unwrap(),
        TrunkChoice::Canonical,
        false,
    )
    .unwrap();
    ensure(char3.tree.as_ref().unwrap().is_isomorphic(&want), || "char-3 cusp from its semigroup".into())?;

    // two branches in characteristic 3 given by semigroups
    let model = load_fixture("char3.json");
    let r = build_report(&model, 0, None, true).map_err(|e| e.to_string())?;
    let sg: Vec<Vec<u64>> = r.branches.iter().map(|b| b.semigroup.clone()).collect();
    same("char-3 semigroups", sg, vec![vec![3, 29], vec![6, 9, 26]])?;
    same("char-3 tripod", r.intersections[0].tripod, 27)?;
    let t = model.tree.as_ref().unwrap();
    let center = t.lca(t.leaf_id("A1").unwrap(), t.leaf_id("A2").unwrap());
    same("char-3 center", t.node(center).exponent.clone(), ExtRational::Finite(q(3, 2)))?;
    ensure(r.checks_pass(), || "char-3 checks".into())?;

    // characteristic 2: the tree of the lotus and the Newton-Puiseux tree
    let model = load_fixture("char2.series");
    let r = build_report(&model, 0, None, true).map_err(|e| e.to_string())?;
    ensure(r.checks_pass(), || "char-2 checks".into())?;
    same("char-2 tripod", r.intersections[0].tripod, 8)?;
    same("char-2 series oracle", r.intersections[0].series_oracle, Some(8))?;
    for (name, t) in [("lotus tree", model.tree.as_ref().unwrap()), ("Newton-Puiseux tree", model.np_tree.as_ref().unwrap())] {
        let c = t.lca(t.leaf_id("A1").unwrap(), t.leaf_id("A2").unwrap());
        same(&format!("char-2 contact on the {name}"), t.contact_complexity(c), ExtRational::Finite(q(2, 1)))?;
    }
    let t = model.tree.as_ref().unwrap();
    let c = t.lca(t.leaf_id("A1").unwrap(), t.leaf_id("A2").unwrap());
    same("char-2 center on the lotus tree", t.node(c).exponent.clone(), ExtRational::Finite(q(5, 2)))?;
    let t = model.np_tree.as_ref().unwrap();
    let c = t.lca(t.leaf_id("A1").unwrap(), t.leaf_id("A2").unwrap());
    same("char-2 center on the Newton-Puiseux tree", t.node(c).exponent.clone(), ExtRational::Finite(q(2, 1)))?;

    // Newton-Puiseux roots
    for p in [2u64, 3, 5, 7] {
        let pm = p as i64;
        let f = PlanePoly {
            char: p,
            monomials: vec![
                Monomial { i: 0, j: p, c: 1 },
                Monomial { i: p - 1, j: 1, c: -1 },
                Monomial { i: p - 1, j: 0, c: -1 },
            ],
        };
        same(&format!("f_{pm} has a root"), has_np_root(&f).unwrap(), false)?;
    }
    let cusp2 = PlanePoly { char: 2, monomials: vec![Monomial { i: 0, j: 2, c: 1 }, Monomial { i: 3, j: 0, c: 1 }] };
    same("y^2 + x^3 has a root in characteristic 2", has_np_root(&cusp2).unwrap(), true)?;

    // conjugate counts, and how many conjugates agree up to each characteristic exponent
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for p in [2u64, 3, 5] {
        for n in 1..=24u64 {
            for _ in 0..3 {
                let s = series_with_index(&mut rng, n, p);
                same(&format!("index of {s}"), s.n(), n)?;
                conjugate_agreement_counts(&s)?;
            }
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let mut pick = |n: usize| rng.gen_range(0..n);
        let l = fixtures::random_lotus(&mut pick, 12, 4);
        let tree = ew_from_lotus(&l).map_err(|e| format!("lotus case {case}: {e}"))?;
        let branches = l.branch_leaves();
        let total = multiplicities(&l, &branches).unwrap();
        ensure(total.satisfies_proximity(&l), || format!("lotus case {case}: proximity"))?;
        let mut sum = vec![0u64; l.petals().len()];
        let mut deltas = 0;
        for &b in &branches {
            let w = multiplicities(&l, &[b]).unwrap();
            ensure(w.satisfies_proximity(&l), || format!("lotus case {case}: proximity of one branch"))?;
            for (s, x) in sum.iter_mut().zip(w.petal_bases(&l)) {
                *s += x;
            }
            deltas += delta(&l, &[b]).unwrap();
        }
        same(&format!("lotus case {case}: additivity"), total.petal_bases(&l), sum)?;
        let mut pairs = 0;
        for (i, &a) in branches.iter().enumerate() {
            for &b in &branches[i + 1..] {
                let by_products = intersection_via_multiplicities(&l, a, b).unwrap();
                let (ta, tb) = (tree.leaf_id(l.name(a)).unwrap(), tree.leaf_id(l.name(b)).unwrap());
                same(&format!("lotus case {case}: tripod"), tree.tripod_intersection(ta, tb).unwrap(), by_products)?;
                same(&format!("lotus case {case}: order"), intersection_via_order(&l, a, b).unwrap(), by_products)?;
                pairs += by_products;
            }
        }
        same(&format!("lotus case {case}: delta decomposition"), delta(&l, &branches).unwrap(), deltas + pairs)?;
    }
    for case in 0..1000 {
        let mut pick = |n: usize| rng.gen_range(0..n);
        let bundle = fixtures::random_series(&mut pick, 5);
        let tree = lotus_core::puiseux::ew_from_series("L", &bundle).map_err(|e| format!("tree case {case}: {e}"))?;
        let leaves = tree.branches();
        for i in 0..leaves.len() {
            for j in i + 1..leaves.len() {
                let u_ij = tree.ultrametric(leaves[i], leaves[j]).unwrap();
                for k in j + 1..leaves.len() {
                    let mut u = [u_ij.clone(), tree.ultrametric(leaves[i], leaves[k]).unwrap(), tree.ultrametric(leaves[j], leaves[k]).unwrap()];
                    u.sort();
                    ensure(u[1] == u[2], || format!("tree case {case}: ultrametric {u:?}"))?;
                }
            }
        }
    }
    for n in 1..=24u64 {
        for _ in 0..4 {
            let s = series_with_index(&mut rng, n, 0);
            let by_jumps: BTreeSet<Rational> = s.char_exponents().into_iter().collect();
            let by_conjugates: BTreeSet<Rational> = s
                .conjugates()
                .unwrap()
                .iter()
                .filter_map(|c| c.valuation_of_difference(&s).finite().cloned())
                .collect();
            same(&format!("characteristic exponents of {s}"), by_jumps, by_conjugates)?;
        }
    }
    Ok(())
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn load_fixture(name: &str) -> Model {
    let text = std::fs::read_to_string(fixture_dir().join(name)).unwrap();
    Model::build(detect_input(&text).unwrap(), TrunkChoice::Canonical, false).unwrap()
}

fn fixture_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    files
}

fn criterion_9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_lotus");
    let files = fixture_files();
    ensure(files.len() >= 10, || format!("only {} fixtures found", files.len()))?;
    for f in files {
        let run = || {
            Command::new(bin).args(["invariants", "--format", "json", "--check"]).arg(&f).output().unwrap()
        };
        let (a, b) = (run(), run());
        let name = f.file_name().unwrap().to_string_lossy().to_string();
        ensure(a.status.code() == Some(0), || {
            format!("{name}: exit {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stderr))
        })?;
        ensure(a.stdout == b.stdout, || format!("{name}: two runs differ"))?;
        let expected = fixture_dir().join("expected").join(format!("{name}.json"));
        let want = std::fs::read(&expected).map_err(|e| format!("{}: {e}", expected.display()))?;
        ensure(a.stdout == want, || format!("{name}: report differs from {}", expected.display()))?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("fixture lotuses: weights, (λ, ord) pairs, multiplicities, orders", criterion_1),
        ("intersection numbers agree across four methods", criterion_2),
        ("Eggers-Wall trees of the fixtures and trunk round trips", criterion_3),
        ("contact complexity on the three-branch tree", criterion_4),
        ("semigroups, delta and Milnor numbers", criterion_5),
        ("continued fractions, Newton lotuses and gluing", criterion_6),
        ("positive characteristic", criterion_7),
        ("seeded property suites", criterion_8),
        ("CLI determinism and --check on every fixture", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        match run() {
            Ok(()) => println!("criterion {}: PASS  {name} ({:.2?})", i + 1, start.elapsed()),
            Err(e) => {
                println!("criterion {}: FAIL  {name}: {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
