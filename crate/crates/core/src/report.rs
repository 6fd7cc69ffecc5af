//! Input detection, the curve pipeline and the invariant report with its cross-checks.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arith::{coprime_part_char, ExtRational, Rational};
use crate::error::{Error, Result};
use crate::ewtree::{
    char_exponents_from_semigroup, ew_from_lotus, ew_from_semigroups, in_semigroup, is_generic, minimal_generators, milnor_from_char_exponents,
    milnor_from_char_exponents_last, semigroup_closed_form, semigroup_from_char_exponents, semigroup_from_lotus,
    EwTree, NodeId,
};
use crate::invariants::{
    delta, dual_graph, intersection_via_multiplicities, intersection_via_order, lambda_ord, milnor, multiplicities,
    orders_of_vanishing, petal_degree,
};
use crate::lotus::{parse_steps, Lotus, VertexId};
use crate::puiseux::{ew_from_series, intersection_oracle, NpSeries};

/// Curve file: series and/or semigroups of the branches, with optional intersection numbers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFile {
    #[serde(default)]
    pub char: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semigroups: Option<BTreeMap<String, Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersections: Option<Vec<IntersectionRecord>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionRecord {
    pub a: String,
    pub b: String,
    pub value: u64,
}

#[derive(Clone, Debug)]
pub enum Source {
    Curve(CurveFile),
    Tree(EwTree),
    Lotus(Lotus),
}

/// Text form of a curve file:
///
/// ```text
/// char 2
/// A1 = x^(3/2)
/// A2 = x^(3/2) + x^2
/// semigroup A1 = 2 3
/// intersection A1 A2 = 8
/// ```
pub fn parse_curve_text(text: &str) -> Result<CurveFile> {
    let mut curve = CurveFile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Parse { pos: i + 1, msg: msg.to_string() };
        let number = |t: &str| t.parse::<u64>().map_err(|_| err(&format!("expected a number, found {t:?}")));
        if let Some(rest) = line.strip_prefix("char ") {
            curve.char = number(rest.trim())?;
            continue;
        }
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| err("expected `name = value`"))?;
        let words: Vec<&str> = lhs.split_whitespace().collect();
        match words.as_slice() {
            ["semigroup", label] => {
                let gens = rhs.split_whitespace().map(number).collect::<Result<Vec<u64>>>()?;
                curve.semigroups.get_or_insert_with(BTreeMap::new).insert(label.to_string(), gens);
            }
            ["intersection", a, b] => {
                let value = number(rhs.trim())?;
                curve.intersections.get_or_insert_with(Vec::new).push(IntersectionRecord {
                    a: a.to_string(),
                    b: b.to_string(),
                    value,
                });
            }
            [label] => {
                // syntax only; coefficients are reduced once the characteristic is known
                if let Err(Error::Parse { pos, msg }) = NpSeries::parse(rhs.trim(), 0) {
                    return Err(err(&format!("column {}: {msg}", pos + 1)));
                }
                curve.branches.get_or_insert_with(BTreeMap::new).insert(label.to_string(), rhs.trim().to_string());
            }
            _ => return Err(err("unrecognized line")),
        }
    }
    Ok(curve)
}

/// Recognizes a lotus file, a tree file, a curve file (JSON or text) or a step script by content.
pub fn detect_input(text: &str) -> Result<Source> {
    let trimmed = text.trim_start();
    if !trimmed.starts_with('{') {
        let first = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .find(|l| !l.is_empty())
            .unwrap_or("");
        if first.starts_with("lotus ") {
            return Ok(Source::Lotus(parse_steps(text)?));
        }
        return Ok(Source::Curve(parse_curve_text(text)?));
    }
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse { pos: e.line(), msg: e.to_string() })?;
    let obj = value.as_object().ok_or_else(|| Error::Parse { pos: 1, msg: "expected a JSON object".into() })?;
    if obj.contains_key("vertices") {
        Ok(Source::Lotus(Lotus::from_json(text)?))
    } else if obj.contains_key("nodes") {
        Ok(Source::Tree(EwTree::from_json(text)?))
    } else {
        let curve: CurveFile =
            serde_json::from_value(value).map_err(|e| Error::Parse { pos: 1, msg: e.to_string() })?;
        Ok(Source::Curve(curve))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrunkChoice {
    Canonical,
    Index(u64),
    All,
}

/// Everything derived from one input.
#[derive(Clone, Debug)]
pub struct Model {
    pub char: u64,
    pub series: Vec<(String, NpSeries)>,
    pub semigroups: Vec<(String, Vec<u64>)>,
    pub intersections: BTreeMap<(String, String), u64>,
    /// Complete tree relative to `L`, when one is available.
    pub tree: Option<EwTree>,
    /// Tree built from Newton-Puiseux roots in positive characteristic.
    pub np_tree: Option<EwTree>,
    /// Lotuses for the selected trunk decompositions (or the input lotus).
    pub lotuses: Vec<Lotus>,
    pub warnings: Vec<String>,
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn lotuses_for(tree: &EwTree, trunks: TrunkChoice) -> Result<Vec<Lotus>> {
    match trunks {
        TrunkChoice::Canonical => Ok(vec![tree.lotus_from_trunks(&tree.canonical_trunk_decomposition()?)?]),
        TrunkChoice::Index(k) => Ok(vec![tree.lotus_from_trunks(&tree.trunk_decomposition(k)?)?]),
        TrunkChoice::All => tree.trunk_decompositions()?.map(|d| tree.lotus_from_trunks(&d)).collect(),
    }
}

impl Model {
    /// Builds trees and lotuses. A tree input must be complete unless `complete` is set.
    pub fn build(source: Source, trunks: TrunkChoice, complete: bool) -> Result<Model> {
        let mut model = Model {
            char: 0,
            series: Vec::new(),
            semigroups: Vec::new(),
            intersections: BTreeMap::new(),
            tree: None,
            np_tree: None,
            lotuses: Vec::new(),
            warnings: Vec::new(),
        };
        match source {
            Source::Lotus(lotus) => {
                model.tree = Some(ew_from_lotus(&lotus)?);
                model.lotuses = vec![lotus];
            }
            Source::Tree(tree) => {
                let tree = if tree.is_complete() {
                    tree
                } else if complete {
                    tree.complete()
                } else {
                    return Err(Error::Domain("the tree is incomplete; pass --complete to add curvettas".into()));
                };
                model.lotuses = lotuses_for(&tree, trunks)?;
                model.tree = Some(tree);
            }
            Source::Curve(curve) => model.load_curve(curve, trunks)?,
        }
        Ok(model)
    }

    fn load_curve(&mut self, curve: CurveFile, trunks: TrunkChoice) -> Result<()> {
        self.char = curve.char;
        for (label, text) in curve.branches.iter().flatten() {
            self.series.push((label.clone(), NpSeries::parse(text, curve.char)?));
        }
        for (label, gens) in curve.semigroups.iter().flatten() {
            self.semigroups.push((label.clone(), gens.clone()));
        }
        for r in curve.intersections.iter().flatten() {
            if r.a == r.b {
                return Err(Error::Domain(format!("self-intersection of {} requested", r.a)));
            }
            self.intersections.insert(pair_key(&r.a, &r.b), r.value);
        }
        if self.series.is_empty() && self.semigroups.is_empty() {
            return Err(Error::Domain("the curve file lists no branches".into()));
        }
        if !self.series.is_empty() && !self.semigroups.is_empty() {
            let a: Vec<&String> = self.series.iter().map(|s| &s.0).collect();
            let b: Vec<&String> = self.semigroups.iter().map(|s| &s.0).collect();
            if a != b {
                return Err(Error::Domain("series and semigroups must name the same branches".into()));
            }
        }
        let p = self.char;
        let tame = self.series.iter().all(|(_, s)| coprime_part_char(s.n(), p) == s.n());
        if !self.series.is_empty() {
            let t = ew_from_series("L", &self.series)?;
            if p == 0 || tame {
                self.tree = Some(t.complete());
            }
            if p != 0 {
                self.np_tree = Some(t);
            }
        }
        if self.tree.is_none() {
            if self.semigroups.is_empty() {
                self.warnings.push(format!(
                    "some branch has p = {p} dividing its index; give semigroups to build the lotus"
                ));
                return Ok(());
            }
            let mut pairs = BTreeMap::new();
            for l in 0..self.semigroups.len() {
                for m in 0..l {
                    let key = pair_key(&self.semigroups[l].0, &self.semigroups[m].0);
                    let value = match self.intersections.get(&key) {
                        Some(v) => *v,
                        None if !self.series.is_empty() => {
                            intersection_oracle(&self.series[m].1, &self.series[l].1)?
                        }
                        None => {
                            return Err(Error::Domain(format!("missing intersection of {} and {}", key.0, key.1)))
                        }
                    };
                    pairs.insert((m, l), value);
                }
            }
            self.tree = Some(ew_from_semigroups("L", &self.semigroups, &pairs)?.complete());
        }
        for (_, gens) in &self.semigroups {
            let exps = char_exponents_from_semigroup(gens)?;
            if !is_generic(&exps) {
                self.warnings.push(format!("semigroup {gens:?} is not generic; minimality is not claimed"));
            }
        }
        self.lotuses = lotuses_for(self.tree.as_ref().unwrap(), trunks)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaOrdRow {
    pub vertex: String,
    pub lambda: u64,
    pub ord: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightRow {
    pub vertex: String,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualGraphReport {
    pub edges: Vec<[String; 2]>,
    pub weights: Vec<WeightRow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeWeight {
    pub edge: [String; 2],
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityReport {
    pub branches: Vec<String>,
    /// Multiplicities at the blown-up points, by petal.
    pub petal_bases: Vec<EdgeWeight>,
    /// Orders of vanishing along the exceptional divisors.
    pub orders: Vec<WeightRowU>,
    pub delta: u64,
    pub milnor: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightRowU {
    pub vertex: String,
    pub value: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionRow {
    pub a: String,
    pub b: String,
    pub multiplicities: u64,
    pub order: u64,
    pub tripod: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_oracle: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContactRow {
    pub exponent: Rational,
    pub index: u64,
    pub contact: Rational,
    pub leaves: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LotusSemigroupReport {
    pub generators: Vec<u64>,
    pub minimal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchReport {
    pub label: String,
    pub char_exponents: Vec<Rational>,
    /// First characteristic exponent above 1; semigroup claims are made only in this case.
    pub generic: bool,
    /// The lotus carries a curvetta at every index jump of the branch.
    pub curvetta_chain: bool,
    pub semigroup: Vec<u64>,
    pub semigroup_from_lotus: LotusSemigroupReport,
    pub delta: u64,
    pub milnor: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub char: u64,
    pub vertices: usize,
    pub petals: usize,
    pub base_edges: usize,
    pub rupture_vertices: Vec<String>,
    pub lambda_ord: Vec<LambdaOrdRow>,
    pub dual_graph: DualGraphReport,
    pub multiplicities: Vec<MultiplicityReport>,
    pub intersections: Vec<IntersectionRow>,
    pub tree: crate::ewtree::EwTreeFile,
    pub contact: Vec<ContactRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub np_tree: Option<crate::ewtree::EwTreeFile>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub np_contact: Vec<ContactRow>,
    pub branches: Vec<BranchReport>,
    pub delta: u64,
    pub milnor: u64,
    /// In positive characteristic `2δ - r + 1` only bounds the Milnor number from below.
    pub milnor_is_lower_bound: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckResult>,
}

impl InvariantReport {
    pub fn checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn label_pair(lotus: &Lotus, (a, b): (VertexId, VertexId)) -> [String; 2] {
    [lotus.name(a).to_string(), lotus.name(b).to_string()]
}

fn leaves_below(tree: &EwTree, v: NodeId) -> Vec<String> {
    let mut out: Vec<String> = tree
        .leaves()
        .into_iter()
        .filter(|&l| tree.path(l).contains(&v))
        .map(|l| tree.label(l))
        .collect();
    out.sort();
    out
}

fn contact_table(tree: &EwTree) -> Vec<ContactRow> {
    tree.interior_nodes()
        .into_iter()
        .map(|v| ContactRow {
            exponent: tree.node(v).exponent.finite().unwrap().clone(),
            index: tree.node(v).index,
            contact: tree.contact_complexity(v).finite().unwrap().clone(),
            leaves: leaves_below(tree, v),
        })
        .collect()
}

fn multiplicity_report(lotus: &Lotus, branches: &[VertexId]) -> Result<MultiplicityReport> {
    let w = multiplicities(lotus, branches)?;
    let ord = orders_of_vanishing(lotus, branches)?;
    Ok(MultiplicityReport {
        branches: branches.iter().map(|&b| lotus.name(b).to_string()).collect(),
        petal_bases: lotus
            .petals()
            .iter()
            .map(|p| EdgeWeight {
                edge: label_pair(lotus, (p.base[0], p.base[1])),
                value: w.get(p.base[0], p.base[1]),
            })
            .collect(),
        orders: lotus
            .exceptional_vertices()
            .into_iter()
            .map(|v| WeightRowU { vertex: lotus.name(v).to_string(), value: ord[v] })
            .collect(),
        delta: delta(lotus, branches)?,
        milnor: milnor(lotus, branches)?,
    })
}

struct Checker {
    out: Vec<CheckResult>,
}

impl Checker {
    fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) {
        let detail = if ok { String::new() } else { detail.into() };
        self.out.push(CheckResult { name: name.to_string(), ok, detail });
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, name: &str, a: T, b: T) {
        let detail = format!("{a:?} != {b:?}");
        self.check(name, a == b, detail);
    }

    fn run(&mut self, name: &str, f: impl FnOnce(&mut Checker) -> Result<()>) {
        if let Err(e) = f(self) {
            self.check(name, false, e.to_string());
        }
    }
}

/// Builds the report on the lotus `model.lotuses[which]`, restricted to `branches`
/// (all branch leaves when `None`). With `check`, every cross-method identity is verified.
pub fn build_report(model: &Model, which: usize, branches: Option<&[String]>, check: bool) -> Result<InvariantReport> {
    let lotus = model
        .lotuses
        .get(which)
        .ok_or_else(|| Error::Domain("no lotus is available for this input".into()))?;
    let tree = ew_from_lotus(lotus)?;
    let all = lotus.branch_leaves();
    let selected: Vec<VertexId> = match branches {
        None => all.clone(),
        Some(labels) => labels
            .iter()
            .map(|l| {
                let v = lotus.vertex_id(l)?;
                if !lotus.vertex(v).arrowhead() {
                    return Err(Error::Domain(format!("{l} is not a branch")));
                }
                Ok(v)
            })
            .collect::<Result<_>>()?,
    };
    if selected.is_empty() {
        return Err(Error::Domain("no branches selected".into()));
    }
    let lo = lambda_ord(lotus)?;
    let dg = dual_graph(lotus);
    let mut mult = vec![multiplicity_report(lotus, &selected)?];
    if selected.len() > 1 {
        for &b in &selected {
            mult.push(multiplicity_report(lotus, &[b])?);
        }
    }
    let series: BTreeMap<&str, &NpSeries> = model.series.iter().map(|(l, s)| (l.as_str(), s)).collect();
    let mut intersections = Vec::new();
    for (i, &a) in selected.iter().enumerate() {
        for &b in &selected[i + 1..] {
            let (la, lb) = (lotus.name(a), lotus.name(b));
            let (ta, tb) = (tree.leaf_id(la)?, tree.leaf_id(lb)?);
            let series_oracle = match (series.get(la), series.get(lb)) {
                (Some(x), Some(y)) => Some(intersection_oracle(x, y)?),
                _ => None,
            };
            intersections.push(IntersectionRow {
                a: la.to_string(),
                b: lb.to_string(),
                multiplicities: intersection_via_multiplicities(lotus, a, b)?,
                order: intersection_via_order(lotus, a, b)?,
                tripod: tree.tripod_intersection(ta, tb)?,
                series_oracle,
            });
        }
    }
    let mut branch_reports = Vec::new();
    let mut warnings = model.warnings.clone();
    for &b in &selected {
        let leaf = tree.leaf_id(lotus.name(b))?;
        let sg = semigroup_from_lotus(lotus, b)?;
        let exps = tree.characteristic_exponents(leaf);
        let generic = is_generic(&exps);
        if !generic {
            warnings.push(format!(
                "{}: first characteristic exponent is not above 1; minimality is not claimed",
                lotus.name(b)
            ));
        }
        branch_reports.push(BranchReport {
            label: lotus.name(b).to_string(),
            char_exponents: exps,
            generic,
            curvetta_chain: tree.has_curvetta_chain(leaf),
            semigroup: tree.semigroup(leaf)?,
            semigroup_from_lotus: LotusSemigroupReport { generators: sg.generators, minimal: sg.minimal && generic },
            delta: delta(lotus, &[b])?,
            milnor: tree.milnor(leaf)?,
        });
    }
    let mut report = InvariantReport {
        char: model.char,
        vertices: lotus.vertices().len(),
        petals: lotus.petals().len(),
        base_edges: lotus.base_edges().len(),
        rupture_vertices: lotus.rupture_vertices().into_iter().map(|v| lotus.name(v).to_string()).collect(),
        lambda_ord: (0..lotus.vertices().len())
            .map(|v| LambdaOrdRow { vertex: lotus.name(v).to_string(), lambda: lo[v].lambda, ord: lo[v].ord })
            .collect(),
        dual_graph: DualGraphReport {
            edges: dg.edges.iter().map(|&e| label_pair(lotus, e)).collect(),
            weights: dg.weights.iter().map(|&(v, w)| WeightRow { vertex: lotus.name(v).to_string(), weight: w }).collect(),
        },
        delta: mult[0].delta,
        milnor: mult[0].milnor,
        multiplicities: mult,
        intersections,
        contact: contact_table(&tree),
        tree: tree.to_file(),
        np_tree: model.np_tree.as_ref().map(|t| t.to_file()),
        np_contact: model.np_tree.as_ref().map(contact_table).unwrap_or_default(),
        branches: branch_reports,
        milnor_is_lower_bound: model.char != 0,
        warnings,
        checks: Vec::new(),
    };
    if check {
        report.checks = run_checks(model, which, lotus, &tree, &selected, &report);
    }
    Ok(report)
}

fn run_checks(
    model: &Model,
    which: usize,
    lotus: &Lotus,
    tree: &EwTree,
    selected: &[VertexId],
    report: &InvariantReport,
) -> Vec<CheckResult> {
    let mut c = Checker { out: Vec::new() };
    c.check("lotus: triangle condition", lotus.satisfies_triangle_condition(), "");
    c.check("lotus: lateral boundary is a tree", lotus.boundary_is_tree(), "");
    c.run("lotus: JSON round trip", |c| {
        let back = Lotus::from_json(&lotus.to_json())?;
        c.eq("lotus: JSON round trip", back.to_json(), lotus.to_json());
        Ok(())
    });
    c.run("dual graph weights", |c| {
        for v in lotus.exceptional_vertices() {
            let w = dual_graph(lotus).weights.iter().find(|x| x.0 == v).map(|x| x.1);
            c.eq(&format!("dual graph weight at {}", lotus.name(v)), w, Some(-(petal_degree(lotus, v) as i64)));
        }
        Ok(())
    });
    c.run("ord of L", |c| {
        let lo = lambda_ord(lotus)?;
        let ord = orders_of_vanishing(lotus, &[lotus.initial()])?;
        let expected: Vec<u64> = lotus.exceptional_vertices().iter().map(|&v| lo[v].ord).collect();
        let got: Vec<u64> = lotus.exceptional_vertices().iter().map(|&v| ord[v]).collect();
        c.eq("orders of L agree with the (λ, ord) table", got, expected);
        Ok(())
    });
    c.run("proximity", |c| {
        let w = multiplicities(lotus, selected)?;
        c.check("proximity equalities", w.satisfies_proximity(lotus), "");
        let mut sum = vec![0u64; lotus.petals().len()];
        for &b in selected {
            let wb = multiplicities(lotus, &[b])?;
            c.check(&format!("proximity equalities for {}", lotus.name(b)), wb.satisfies_proximity(lotus), "");
            for (s, x) in sum.iter_mut().zip(wb.petal_bases(lotus)) {
                *s += x;
            }
        }
        c.eq("multiplicities are additive", w.petal_bases(lotus), sum);
        Ok(())
    });
    for row in &report.intersections {
        let name = format!("intersection {}·{}", row.a, row.b);
        c.eq(&format!("{name}: products = order"), row.multiplicities, row.order);
        c.eq(&format!("{name}: products = tripod"), row.multiplicities, row.tripod);
        if let Some(o) = row.series_oracle {
            c.eq(&format!("{name}: products = series oracle"), row.multiplicities, o);
        }
        if let Some(v) = model.intersections.get(&pair_key(&row.a, &row.b)) {
            c.eq(&format!("{name}: products = given value"), row.multiplicities, *v);
        }
        c.run(&name, |c| {
            let (a, b) = (lotus.vertex_id(&row.a)?, lotus.vertex_id(&row.b)?);
            c.eq(&format!("{name}: order is symmetric"), intersection_via_order(lotus, b, a)?, row.order);
            Ok(())
        });
    }
    let pairwise: u64 = report.intersections.iter().map(|r| r.multiplicities).sum();
    let singles: u64 = report.branches.iter().map(|b| b.delta).sum();
    c.eq("delta decomposition", report.delta, singles + pairwise);
    for b in &report.branches {
        let name = format!("branch {}", b.label);
        c.run(&name, |c| {
            c.eq(&format!("{name}: semigroup recursion"), semigroup_from_char_exponents(&b.char_exponents)?, b.semigroup.clone());
            c.eq(&format!("{name}: semigroup closed form"), semigroup_closed_form(&b.char_exponents)?, b.semigroup.clone());
            if b.generic {
                for &g in &b.semigroup_from_lotus.generators {
                    c.check(
                        &format!("{name}: lotus generator {g} lies in the semigroup"),
                        in_semigroup(g, &b.semigroup)?,
                        format!("{g} not in {:?}", b.semigroup),
                    );
                }
                if b.curvetta_chain {
                    c.eq(
                        &format!("{name}: semigroup from lotus"),
                        minimal_generators(&b.semigroup_from_lotus.generators)?,
                        minimal_generators(&b.semigroup)?,
                    );
                }
                if b.semigroup_from_lotus.minimal && b.curvetta_chain {
                    c.eq(
                        &format!("{name}: minimal lotus sequence"),
                        b.semigroup_from_lotus.generators.clone(),
                        b.semigroup.clone(),
                    );
                }
            }
            c.eq(&format!("{name}: Milnor from exponents"), milnor_from_char_exponents(&b.char_exponents)?, b.milnor);
            c.eq(&format!("{name}: Milnor from last exponent"), milnor_from_char_exponents_last(&b.char_exponents)?, b.milnor);
            c.eq(&format!("{name}: Milnor = 2δ - 1"), 2 * b.delta + 1 - 1, b.milnor);
            Ok(())
        });
    }
    c.run("ultrametric", |c| {
        let leaves: Vec<NodeId> = selected.iter().map(|&v| tree.leaf_id(lotus.name(v))).collect::<Result<_>>()?;
        for i in 0..leaves.len() {
            for j in i + 1..leaves.len() {
                for k in j + 1..leaves.len() {
                    let mut u = [
                        tree.ultrametric(leaves[i], leaves[j])?,
                        tree.ultrametric(leaves[i], leaves[k])?,
                        tree.ultrametric(leaves[j], leaves[k])?,
                    ];
                    u.sort();
                    c.check("ultrametric inequality", u[1] == u[2], format!("{u:?}"));
                }
            }
        }
        Ok(())
    });
    c.run("contact complexity", |c| {
        for v in tree.interior_nodes() {
            let p = tree.node(v).parent.unwrap();
            c.check(
                "contact complexity increases",
                tree.contact_complexity(v) > tree.contact_complexity(p),
                format!("at node {v}"),
            );
        }
        Ok(())
    });
    if let Some(input) = &model.tree {
        c.check(
            "tree of the lotus matches the input tree",
            tree.is_isomorphic(input),
            format!("{} vs {}", tree.canonical_form(), input.canonical_form()),
        );
    }
    c.run("trunk round trips", |c| {
        let count = tree.trunk_decomposition_count()?;
        for k in 0..count.min(64) {
            let l = tree.lotus_from_trunks(&tree.trunk_decomposition(k)?)?;
            c.check(
                &format!("trunk decomposition {k} round trip"),
                ew_from_lotus(&l)?.is_isomorphic(tree),
                "",
            );
        }
        Ok(())
    });
    if let Some(np) = &model.np_tree {
        c.run("positive characteristic", |c| {
            for row in &report.intersections {
                let (a, b) = (np.leaf_id(&row.a)?, np.leaf_id(&row.b)?);
                c.eq(&format!("np tree tripod {}·{}", row.a, row.b), np.tripod_intersection(a, b)?, row.multiplicities);
                let (ta, tb) = (tree.leaf_id(&row.a)?, tree.leaf_id(&row.b)?);
                c.eq(
                    &format!("contact at the center of {}·{}", row.a, row.b),
                    np.contact_complexity(np.lca(a, b)),
                    tree.contact_complexity(tree.lca(ta, tb)),
                );
            }
            Ok(())
        });
    }
    if which >= model.lotuses.len() {
        c.check("lotus selection", false, "index out of range");
    }
    c.out
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Plain-text rendering of a report.
pub fn report_text(r: &InvariantReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "characteristic {}", r.char);
    let _ = writeln!(
        s,
        "lotus: {} vertices, {} petals, {} base edges; rupture vertices {}",
        r.vertices,
        r.petals,
        r.base_edges,
        join(&r.rupture_vertices)
    );
    let _ = writeln!(s, "\n(λ, ord_L):");
    for row in &r.lambda_ord {
        let _ = writeln!(s, "  {:>4}  ({}, {})", row.vertex, row.lambda, row.ord);
    }
    let _ = writeln!(s, "\ndual graph weights:");
    for w in &r.dual_graph.weights {
        let _ = writeln!(s, "  {:>4}  {}", w.vertex, w.weight);
    }
    for m in &r.multiplicities {
        let _ = writeln!(s, "\nbranches {}:", join(&m.branches));
        let vals: Vec<u64> = m.petal_bases.iter().map(|e| e.value).collect();
        let _ = writeln!(s, "  multiplicities  {}", join(&vals));
        let ords: Vec<String> = m.orders.iter().map(|o| format!("{}={}", o.vertex, o.value)).collect();
        let _ = writeln!(s, "  orders          {}", ords.join(" "));
        let _ = writeln!(s, "  delta {}  milnor {}", m.delta, m.milnor);
    }
    if !r.intersections.is_empty() {
        let _ = writeln!(s, "\nintersections (products, order, tripod, series):");
        for i in &r.intersections {
            let o = i.series_oracle.map_or("-".to_string(), |v| v.to_string());
            let _ = writeln!(s, "  {}·{}  {} {} {} {}", i.a, i.b, i.multiplicities, i.order, i.tripod, o);
        }
    }
    let _ = writeln!(s, "\ncontact complexity:");
    for c in &r.contact {
        let _ = writeln!(s, "  e = {:<6} i = {:<3} c = {:<8} [{}]", c.exponent.to_string(), c.index, c.contact.to_string(), join(&c.leaves));
    }
    if !r.np_contact.is_empty() {
        let _ = writeln!(s, "\ncontact complexity on the Newton-Puiseux tree:");
        for c in &r.np_contact {
            let _ = writeln!(s, "  e = {:<6} i = {:<3} c = {:<8} [{}]", c.exponent.to_string(), c.index, c.contact.to_string(), join(&c.leaves));
        }
    }
    let _ = writeln!(s, "\nbranches:");
    for b in &r.branches {
        let _ = writeln!(
            s,
            "  {}: exponents [{}], semigroup ({}), from lotus ({}){}, delta {}, milnor {}",
            b.label,
            join(&b.char_exponents),
            join(&b.semigroup),
            join(&b.semigroup_from_lotus.generators),
            if b.semigroup_from_lotus.minimal { "" } else { " not minimal" },
            b.delta,
            b.milnor
        );
    }
    let bound = if r.milnor_is_lower_bound { " (lower bound)" } else { "" };
    let _ = writeln!(s, "\ndelta {}  milnor {}{bound}", r.delta, r.milnor);
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    if !r.checks.is_empty() {
        let failed: Vec<&CheckResult> = r.checks.iter().filter(|c| !c.ok).collect();
        let _ = writeln!(s, "\nchecks: {} run, {} failed", r.checks.len(), failed.len());
        for f in failed {
            let _ = writeln!(s, "  FAILED {}: {}", f.name, f.detail);
        }
    }
    s
}

/// Exponent of a tree node, for callers that want plain rationals.
pub fn finite_exponent(e: &ExtRational) -> Option<Rational> {
    e.finite().cloned()
}
