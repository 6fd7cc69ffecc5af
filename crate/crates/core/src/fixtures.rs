//! Worked examples used by tests, the command-line tool and the Python bindings.

use std::collections::BTreeMap;

use crate::arith::Rational;
use crate::error::Result;
use crate::lotus::{parse_steps, Lotus, VertexId};
use crate::puiseux::NpSeries;

/// One branch with a single characteristic exponent 3/2.
pub const CUSP_STEPS: &str = "\
lotus L L1
petal L L1
petal L1 E0
petal E0 E1
leaf E2 A
";

/// One branch with characteristic exponents 3/2 and 13/6.
pub const BRANCH_STEPS: &str = "\
lotus L L1
petal L L1
petal L1 E0
petal E0 E1
curvetta E2 L2
petal E2 L2
petal E3 L2
petal E3 E4
petal E3 E5
leaf E6 A1
";

/// Three branches `A1`, `A2`, `A3`.
pub const THREE_BRANCH_STEPS: &str = "\
lotus L L1
petal L L1
petal L1 E0
petal E0 E1
curvetta E2 L2
petal E2 L2
petal E3 L2
petal E3 E4
petal E3 E5
petal E5 E4
leaf E3 A3
leaf E6 A1
curvetta E7 L3
petal E7 L3
petal E7 E8
leaf E9 A2
";

/// The cusp grown with the roles of `L` and `L1` exchanged.
pub const SWAPPED_CUSP_STEPS: &str = "\
lotus L L1
petal L L1
petal L E0
petal E0 E1
leaf E2 A
";

/// A branch whose curvettas give a non-minimal generating sequence.
pub const NON_MINIMAL_STEPS: &str = "\
lotus L L1
petal L L1
curvetta E0 L2
petal E0 L2
petal E0 E1
leaf E2 A
";

pub fn cusp() -> Lotus {
    parse_steps(CUSP_STEPS).expect("fixture builds")
}

pub fn branch() -> Lotus {
    parse_steps(BRANCH_STEPS).expect("fixture builds")
}

pub fn three_branch() -> Lotus {
    parse_steps(THREE_BRANCH_STEPS).expect("fixture builds")
}

pub fn swapped_cusp() -> Lotus {
    parse_steps(SWAPPED_CUSP_STEPS).expect("fixture builds")
}

pub fn non_minimal() -> Lotus {
    parse_steps(NON_MINIMAL_STEPS).expect("fixture builds")
}

pub const CUSP_SERIES: &[(&str, &str)] = &[("A", "x^(3/2)")];

pub const BRANCH_SERIES: &[(&str, &str)] = &[("A1", "x^(3/2) + x^(13/6)")];

pub const THREE_BRANCH_SERIES: &[(&str, &str)] = &[
    ("A1", "x^(3/2) + x^(13/6)"),
    ("A2", "x^(3/2) + x^(7/3) + x^(29/12)"),
    ("A3", "x^(3/2) + x^2"),
];

/// Roots of `y^2 + x^3` and `y^2 + x^3 + x^4` in characteristic 2.
pub const CHAR2_SERIES: &[(&str, &str)] = &[("A1", "x^(3/2)"), ("A2", "x^(3/2) + x^2")];

/// Branch semigroups and pairwise intersection numbers keyed by branch position.
pub type SemigroupData = (Vec<(String, Vec<u64>)>, BTreeMap<(usize, usize), u64>);

/// Semigroups of two characteristic-3 branches without Newton-Puiseux roots, and their
/// intersection number.
pub fn char3_semigroups() -> SemigroupData {
    (
        vec![("A1".to_string(), vec![3, 29]), ("A2".to_string(), vec![6, 9, 26])],
        BTreeMap::from([((0, 1), 27)]),
    )
}

/// Semigroups of the characteristic-2 pair, for the tree read from its lotus.
pub fn char2_semigroups() -> SemigroupData {
    (
        vec![("A1".to_string(), vec![2, 3]), ("A2".to_string(), vec![2, 3])],
        BTreeMap::from([((0, 1), 8)]),
    )
}

pub fn all_lotuses() -> Result<Vec<(&'static str, Lotus)>> {
    Ok(vec![
        ("cusp", parse_steps(CUSP_STEPS)?),
        ("branch", parse_steps(BRANCH_STEPS)?),
        ("three-branch", parse_steps(THREE_BRANCH_STEPS)?),
        ("swapped-cusp", parse_steps(SWAPPED_CUSP_STEPS)?),
        ("non-minimal", parse_steps(NON_MINIMAL_STEPS)?),
    ])
}

/// A lotus grown from a choice source: `pick(n)` must return a value in `0..n`.
/// Petals go on boundary edges away from branches, curvettas are sprinkled in, and
/// `1..=max_branches` branches are attached at the end.
pub fn random_lotus(pick: &mut dyn FnMut(usize) -> usize, max_petals: usize, max_branches: usize) -> Lotus {
    let mut lotus = Lotus::new("L", "L1").expect("valid labels");
    let petals = 1 + pick(max_petals.max(1));
    let mut curvettas = 2;
    for k in 0..petals {
        let exceptional = lotus.exceptional_vertices();
        if k > 0 && pick(4) == 0 {
            let at = exceptional[pick(exceptional.len())];
            lotus.add_base_edge(at, &format!("L{curvettas}"), false).expect("fresh label");
            curvettas += 1;
        }
        let candidates: Vec<(VertexId, VertexId)> = lotus
            .edges()
            .into_iter()
            .filter(|e| e.on_boundary())
            .map(|e| e.ends)
            .filter(|&(a, b)| !lotus.vertex(a).arrowhead() && !lotus.vertex(b).arrowhead())
            .collect();
        let (a, b) = candidates[pick(candidates.len())];
        lotus.add_petal(a, b).expect("boundary edge");
    }
    let exceptional = lotus.exceptional_vertices();
    for i in 1..=1 + pick(max_branches.max(1)) {
        let at = exceptional[pick(exceptional.len())];
        lotus.add_base_edge(at, &format!("A{i}"), true).expect("fresh label");
    }
    lotus
}

/// Characteristic-zero series for `1..=max_branches` distinct branches. Each branch copies a
/// prefix of an earlier one, departs from it, then grows a random tail; exponents are
/// multiples of 1/12 up to 4.
pub fn random_series(pick: &mut dyn FnMut(usize) -> usize, max_branches: usize) -> Vec<(String, NpSeries)> {
    let step = |k: usize| Rational::new(k as i64, 12);
    let mut out: Vec<Vec<(Rational, Rational)>> = Vec::new();
    let count = 1 + pick(max_branches.max(1));
    for _ in 0..count {
        let mut terms: Vec<(Rational, Rational)> = Vec::new();
        let mut last = Rational::zero();
        if !out.is_empty() {
            let source = &out[pick(out.len())];
            let t = pick(source.len());
            terms.extend_from_slice(&source[..t]);
            let (e, c) = source[t].clone();
            if pick(2) == 0 {
                // same exponent, different coefficient
                let c2 = &c + &Rational::from_int(1 + pick(3) as i64);
                terms.push((e.clone(), c2));
                last = e;
            } else {
                let shared = if t == 0 { Rational::zero() } else { source[t - 1].0.clone() };
                // twelfths between the last shared exponent and the source's next one; the new
                // exponent lands strictly before it or past it, never on it
                let slots = (&(&e - &shared) * &Rational::from_int(12)).to_u64().unwrap_or(1) as usize;
                let mut k = 1 + pick(slots + 5);
                if k == slots {
                    k += 1;
                }
                let next = &shared + &step(k);
                terms.push((next.clone(), Rational::from_int(1 + pick(3) as i64)));
                last = next;
            }
        }
        let tail = if terms.is_empty() { 1 + pick(4) } else { pick(3) };
        for _ in 0..tail {
            let next = &last + &step(1 + pick(12));
            if next > Rational::from_int(4) {
                break;
            }
            terms.push((next.clone(), Rational::from_int(1 + pick(3) as i64)));
            last = next;
        }
        // a copied prefix can reproduce an existing branch; extend until distinct
        while out.contains(&terms) {
            let next = &terms.last().expect("nonempty").0 + &step(1 + pick(12));
            terms.push((next, Rational::from_int(1 + pick(3) as i64)));
        }
        out.push(terms);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, terms)| (format!("A{}", i + 1), NpSeries::new(0, &terms).expect("positive exponents")))
        .collect()
}
