//! Eggers-Wall trees.
//!
//! A tree is rooted at the curve `L`; nodes carry an exponent in `[0, ∞]` and the edge
//! entering a node carries an index. Leaves are branches (exponent ∞) or curvettas.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{ExtRational, Rational};
use crate::error::{Error, Result};
use crate::invariants::{attaching_vertex, lambda_ord, orders_of_vanishing};
use crate::lotus::{grow_membrane, Lotus, VertexId, VertexKind};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EwNode {
    pub exponent: ExtRational,
    pub parent: Option<NodeId>,
    /// Index of the edge from the parent; 0 at the root.
    pub index: u64,
    pub children: Vec<NodeId>,
    pub label: Option<String>,
    /// Auxiliary curvetta leaf rather than a branch.
    pub curvetta: bool,
    /// Intersection number with `L` when it differs from the incoming index
    /// (branches without Newton-Puiseux roots in positive characteristic).
    pub leaf_index: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EwTree {
    nodes: Vec<EwNode>,
}

/// A jump of the index function along the segment from the root to a leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexJump {
    pub node: NodeId,
    pub exponent: Rational,
    pub before: u64,
    pub after: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trunk {
    pub start: NodeId,
    pub leaf: NodeId,
    pub index: u64,
    /// Nodes of `(start, leaf]`, in order.
    pub path: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrunkDecomposition {
    /// Trunks in construction order: breadth first, new trunks sorted along their parent.
    pub trunks: Vec<Trunk>,
}

fn structure(msg: impl Into<String>) -> Error {
    Error::Structure(msg.into())
}

impl EwTree {
    pub fn with_root(label: &str) -> EwTree {
        EwTree {
            nodes: vec![EwNode {
                exponent: ExtRational::zero(),
                parent: None,
                index: 0,
                children: Vec::new(),
                label: Some(label.to_string()),
                curvetta: true,
                leaf_index: None,
            }],
        }
    }

    /// Adds an interior node. Call [`EwTree::finish`] once the tree is assembled.
    pub fn add_node(&mut self, parent: NodeId, exponent: Rational, index: u64) -> NodeId {
        self.push(parent, ExtRational::Finite(exponent), index, None, false, None)
    }

    pub fn add_leaf(&mut self, parent: NodeId, label: &str, index: u64, curvetta: bool) -> NodeId {
        self.push(parent, ExtRational::Infinity, index, Some(label.to_string()), curvetta, None)
    }

    fn push(
        &mut self,
        parent: NodeId,
        exponent: ExtRational,
        index: u64,
        label: Option<String>,
        curvetta: bool,
        leaf_index: Option<u64>,
    ) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(EwNode { exponent, parent: Some(parent), index, children: Vec::new(), label, curvetta, leaf_index });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn set_leaf_index(&mut self, leaf: NodeId, value: u64) {
        let n = &mut self.nodes[leaf];
        n.leaf_index = (value != n.index).then_some(value);
    }

    /// Validates the tree and renumbers it in a canonical preorder.
    pub fn finish(mut self) -> Result<EwTree> {
        self.validate()?;
        self.normalize();
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let root = &self.nodes[0];
        if !root.exponent.is_zero() || root.label.is_none() {
            return Err(structure("the root must be a labeled node with exponent 0"));
        }
        let mut labels = BTreeSet::new();
        for (id, n) in self.nodes.iter().enumerate() {
            if let Some(l) = &n.label {
                if !labels.insert(l.clone()) {
                    return Err(Error::Domain(format!("duplicate leaf label {l:?}")));
                }
            }
            let Some(p) = n.parent else { continue };
            let parent = &self.nodes[p];
            if n.exponent <= parent.exponent {
                return Err(structure(format!("exponent must increase away from the root at node {id}")));
            }
            if n.index == 0 || n.index < parent.index {
                return Err(structure(format!("index must be positive and non-decreasing at node {id}")));
            }
            if n.children.is_empty() {
                if n.label.is_none() || !n.exponent.is_infinite() {
                    return Err(structure(format!("leaf {id} needs a label and exponent inf")));
                }
            } else if n.label.is_some() || n.exponent.is_infinite() {
                return Err(structure(format!("interior node {id} must be unlabeled with finite exponent")));
            }
        }
        if root.children.is_empty() {
            return Err(structure("the tree has no branches"));
        }
        Ok(())
    }

    fn min_labels(&self) -> Vec<String> {
        let mut out = vec![String::new(); self.nodes.len()];
        for id in self.postorder() {
            let n = &self.nodes[id];
            out[id] = if n.children.is_empty() || id == 0 {
                n.label.clone().unwrap_or_default()
            } else {
                n.children.iter().map(|&c| out[c].clone()).min().unwrap_or_default()
            };
        }
        out
    }

    fn postorder(&self) -> Vec<NodeId> {
        let mut out = self.preorder();
        out.reverse();
        out
    }

    /// Node ids in depth-first preorder following the stored child order.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.nodes[v].children.iter().rev());
        }
        out
    }

    fn normalize(&mut self) {
        let mins = self.min_labels();
        let keys: Vec<(ExtRational, String)> =
            self.nodes.iter().enumerate().map(|(i, n)| (n.exponent.clone(), mins[i].clone())).collect();
        for n in self.nodes.iter_mut() {
            n.children.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        }
        let order = self.preorder();
        let mut new_id = vec![0; self.nodes.len()];
        for (i, &old) in order.iter().enumerate() {
            new_id[old] = i;
        }
        let mut nodes: Vec<EwNode> = order.iter().map(|&old| self.nodes[old].clone()).collect();
        for n in nodes.iter_mut() {
            n.parent = n.parent.map(|p| new_id[p]);
            for c in n.children.iter_mut() {
                *c = new_id[*c];
            }
        }
        self.nodes = nodes;
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn root_label(&self) -> &str {
        self.nodes[0].label.as_deref().unwrap_or("L")
    }

    pub fn nodes(&self) -> &[EwNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &EwNode {
        &self.nodes[id]
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        id != 0 && self.nodes[id].children.is_empty()
    }

    /// Leaves other than the root, in preorder.
    pub fn leaves(&self) -> Vec<NodeId> {
        self.preorder().into_iter().filter(|&v| self.is_leaf(v)).collect()
    }

    /// Branch leaves (not curvettas), in preorder.
    pub fn branches(&self) -> Vec<NodeId> {
        self.leaves().into_iter().filter(|&v| !self.nodes[v].curvetta).collect()
    }

    pub fn interior_nodes(&self) -> Vec<NodeId> {
        self.preorder().into_iter().filter(|&v| v != 0 && !self.is_leaf(v)).collect()
    }

    pub fn leaf(&self, label: &str) -> Option<NodeId> {
        (1..self.nodes.len()).find(|&v| self.is_leaf(v) && self.nodes[v].label.as_deref() == Some(label))
    }

    pub fn leaf_id(&self, label: &str) -> Result<NodeId> {
        self.leaf(label).ok_or_else(|| Error::Domain(format!("no leaf labeled {label:?}")))
    }

    pub fn label(&self, id: NodeId) -> String {
        self.nodes[id].label.clone().unwrap_or_else(|| format!("#{id}"))
    }

    /// Nodes from the root to `id`, inclusive.
    pub fn path(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = vec![id];
        let mut v = id;
        while let Some(p) = self.nodes[v].parent {
            out.push(p);
            v = p;
        }
        out.reverse();
        out
    }

    pub fn lca(&self, a: NodeId, b: NodeId) -> NodeId {
        let pa = self.path(a);
        let pb = self.path(b);
        let mut last = 0;
        for (x, y) in pa.iter().zip(&pb) {
            if x != y {
                break;
            }
            last = *x;
        }
        last
    }

    /// `(L·A)` for a leaf: its stored leaf index or the index of its edge.
    pub fn leaf_index(&self, leaf: NodeId) -> u64 {
        let n = &self.nodes[leaf];
        n.leaf_index.unwrap_or(n.index)
    }

    /// Integral of `de / i` from the root to a node.
    pub fn contact_complexity(&self, id: NodeId) -> ExtRational {
        if self.nodes[id].exponent.is_infinite() {
            return ExtRational::Infinity;
        }
        let mut c = Rational::zero();
        for w in self.path(id).windows(2) {
            let (a, b) = (&self.nodes[w[0]], &self.nodes[w[1]]);
            let de = b.exponent.finite().unwrap() - a.exponent.finite().unwrap();
            c = c + de / Rational::from(b.index);
        }
        ExtRational::Finite(c)
    }

    /// Contact complexity of the point with exponent `e` on the edge entering `id`.
    pub fn contact_complexity_at(&self, id: NodeId, e: &Rational) -> Result<Rational> {
        let n = &self.nodes[id];
        let parent = n.parent.ok_or_else(|| Error::Domain("the root has no incoming edge".into()))?;
        let lo = self.nodes[parent].exponent.finite().unwrap().clone();
        let inside = *e >= lo && ExtRational::Finite(e.clone()) <= n.exponent;
        if !inside {
            return Err(Error::Domain(format!("exponent {e} is not on the edge")));
        }
        let base = self.contact_complexity(parent).finite().unwrap().clone();
        Ok(base + (e - &lo) / Rational::from(n.index))
    }

    fn distinct_leaves(&self, a: NodeId, b: NodeId) -> Result<()> {
        if a == b {
            return Err(Error::Domain("a leaf meets itself with infinite multiplicity".into()));
        }
        for v in [a, b] {
            if !self.is_leaf(v) {
                return Err(Error::Domain(format!("{} is not a leaf other than the root", self.label(v))));
            }
        }
        Ok(())
    }

    pub fn tripod_center(&self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.distinct_leaves(a, b)?;
        Ok(self.lca(a, b))
    }

    /// `(A·B) = (L·A)(L·B) c(A ∧ B)`.
    pub fn tripod_intersection(&self, a: NodeId, b: NodeId) -> Result<u64> {
        let center = self.tripod_center(a, b)?;
        let c = self.contact_complexity(center);
        let c = c.finite().unwrap();
        let v = Rational::from(self.leaf_index(a)) * Rational::from(self.leaf_index(b)) * c;
        if !v.is_integer() {
            return Err(structure(format!("tripod value {v} is not an integer")));
        }
        v.to_u64().ok_or(Error::Overflow("intersection number"))
    }

    /// `U_L(A, B) = 1 / c(A ∧ B)`.
    pub fn ultrametric(&self, a: NodeId, b: NodeId) -> Result<Rational> {
        let center = self.tripod_center(a, b)?;
        let c = self.contact_complexity(center);
        let c = c.finite().unwrap();
        if c.is_zero() {
            return Err(Error::Domain("branches separate at the root".into()));
        }
        Ok(c.recip())
    }

    /// Index jumps between the root and a leaf.
    pub fn index_jumps(&self, leaf: NodeId) -> Vec<IndexJump> {
        let path = self.path(leaf);
        let mut out = Vec::new();
        for w in path.windows(3) {
            let (before, after) = (self.nodes[w[1]].index, self.nodes[w[2]].index);
            if after != before {
                out.push(IndexJump {
                    node: w[1],
                    exponent: self.nodes[w[1]].exponent.finite().unwrap().clone(),
                    before,
                    after,
                });
            }
        }
        out
    }

    /// Exponents at the index discontinuities on the way to a leaf.
    pub fn characteristic_exponents(&self, leaf: NodeId) -> Vec<Rational> {
        self.index_jumps(leaf).into_iter().map(|j| j.exponent).collect()
    }

    /// Generators of the semigroup of a branch, read from exponents and indices.
    pub fn semigroup(&self, leaf: NodeId) -> Result<Vec<u64>> {
        let jumps = self.index_jumps(leaf);
        let ia = Rational::from(self.leaf_index(leaf));
        let mut out = vec![self.leaf_index(leaf)];
        for i in 0..jumps.len() {
            let ii = Rational::from(jumps[i].before);
            let mut s = jumps[i].exponent.clone();
            for j in 0..i {
                let coef = &ii / Rational::from(jumps[j].before) - &ii / Rational::from(jumps[j + 1].before);
                s = s + coef * &jumps[j].exponent;
            }
            let b = &ia * s;
            out.push(to_u64(&b, "semigroup generator")?);
        }
        Ok(out)
    }

    /// Milnor number of a branch from exponents and indices along its segment.
    pub fn milnor(&self, leaf: NodeId) -> Result<u64> {
        let jumps = self.index_jumps(leaf);
        let Some(last) = jumps.last() else { return Ok(0) };
        let ia = Rational::from(self.leaf_index(leaf));
        let one = Rational::one();
        let mut s = &last.exponent / Rational::from(last.before);
        for w in jumps.windows(2) {
            let coef = &one / Rational::from(w[0].before) - &one / Rational::from(w[1].before);
            s = s + coef * &w[0].exponent;
        }
        let mu = &ia * &ia * s - &ia * (&last.exponent + &one) + one;
        to_u64(&mu, "Milnor number")
    }

    /// Every end of a level set of the index is a leaf.
    pub fn is_complete(&self) -> bool {
        self.incomplete_nodes().is_empty()
    }

    fn incomplete_nodes(&self) -> Vec<NodeId> {
        self.preorder()
            .into_iter()
            .filter(|&v| {
                let n = &self.nodes[v];
                v != 0 && !n.children.is_empty() && !n.children.iter().any(|&c| self.nodes[c].index == n.index)
            })
            .collect()
    }

    /// Whether each index jump along the path to `leaf` has a curvetta leaving the jump node
    /// with the index before the jump, as the lotus method for semigroups needs.
    pub fn has_curvetta_chain(&self, leaf: NodeId) -> bool {
        let path = self.path(leaf);
        path.windows(2).all(|w| {
            let (v, next) = (w[0], w[1]);
            if v == self.root() || self.nodes[next].index == self.nodes[v].index {
                return true;
            }
            let before = self.nodes[v].index;
            self.nodes[v]
                .children
                .iter()
                .any(|&c| c != next && self.is_leaf(c) && self.nodes[c].curvetta && self.nodes[c].index == before)
        })
    }

    /// Adds curvetta leaves `L1, L2, ...` (skipping used labels) at the ends of index level sets,
    /// named in depth-first preorder.
    pub fn complete(&self) -> EwTree {
        let mut t = self.clone();
        let mut used: BTreeSet<String> = t.nodes.iter().filter_map(|n| n.label.clone()).collect();
        let mut counter = 0usize;
        for v in self.incomplete_nodes() {
            let label = loop {
                counter += 1;
                let l = format!("{}{counter}", self.root_label());
                if !used.contains(&l) {
                    break l;
                }
            };
            used.insert(label.clone());
            let idx = t.nodes[v].index;
            t.add_leaf(v, &label, idx, true);
        }
        t.normalize();
        t
    }

    /// Nodes where a trunk has several ways to continue, with the sorted candidates.
    fn trunk_choices(&self) -> Result<Vec<(NodeId, Vec<NodeId>)>> {
        if !self.is_complete() {
            return Err(Error::Domain("trunk decompositions need a complete tree".into()));
        }
        let mins = self.min_labels();
        let mut out = Vec::new();
        for v in self.interior_nodes() {
            let n = &self.nodes[v];
            let mut cands: Vec<NodeId> =
                n.children.iter().copied().filter(|&c| self.nodes[c].index == n.index).collect();
            cands.sort_by(|&a, &b| mins[a].cmp(&mins[b]).then(a.cmp(&b)));
            out.push((v, cands));
        }
        Ok(out)
    }

    /// Number of trunk decompositions of a complete tree.
    pub fn trunk_decomposition_count(&self) -> Result<u64> {
        let mut total = 1u64;
        for (_, c) in self.trunk_choices()? {
            total = total.checked_mul(c.len() as u64).ok_or(Error::Overflow("trunk decompositions"))?;
        }
        Ok(total)
    }

    /// The `k`-th trunk decomposition; `0` is the canonical one, where every trunk continues
    /// toward the subtree holding the smallest leaf label.
    pub fn trunk_decomposition(&self, k: u64) -> Result<TrunkDecomposition> {
        let choices = self.trunk_choices()?;
        if k >= self.trunk_decomposition_count()? {
            return Err(Error::Domain(format!("no trunk decomposition number {k}")));
        }
        let mut rest = k;
        let mut next: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for (v, cands) in &choices {
            let r = cands.len() as u64;
            next.insert(*v, cands[(rest % r) as usize]);
            rest /= r;
        }
        let mut trunks = Vec::new();
        let mut queue: VecDeque<(NodeId, NodeId)> = self.nodes[0].children.iter().map(|&c| (0, c)).collect();
        while let Some((start, first)) = queue.pop_front() {
            let mut path = vec![first];
            let mut v = first;
            while !self.is_leaf(v) {
                v = next[&v];
                path.push(v);
            }
            for &p in &path[..path.len() - 1] {
                for &c in &self.nodes[p].children {
                    if c != next[&p] {
                        queue.push_back((p, c));
                    }
                }
            }
            trunks.push(Trunk { start, leaf: v, index: self.nodes[v].index, path });
        }
        Ok(TrunkDecomposition { trunks })
    }

    pub fn canonical_trunk_decomposition(&self) -> Result<TrunkDecomposition> {
        self.trunk_decomposition(0)
    }

    /// All trunk decompositions, produced on demand.
    pub fn trunk_decompositions(&self) -> Result<impl Iterator<Item = TrunkDecomposition> + '_> {
        let n = self.trunk_decomposition_count()?;
        Ok((0..n).map(move |k| self.trunk_decomposition(k).expect("index in range")))
    }

    /// Builds a lotus whose boundary is this tree, gluing one Newton lotus per trunk.
    pub fn lotus_from_trunks(&self, dec: &TrunkDecomposition) -> Result<Lotus> {
        for v in self.interior_nodes() {
            let n = &self.nodes[v];
            if n.children.len() == 1 && self.nodes[n.children[0]].index == n.index {
                return Err(structure(format!("node {} is neither a branching nor an index jump", self.label(v))));
            }
        }
        let covered: usize = dec.trunks.iter().map(|t| t.path.len()).sum();
        if covered + 1 != self.nodes.len() {
            return Err(structure("trunks do not partition the tree"));
        }
        let mut lotus: Option<Lotus> = None;
        let mut vert: BTreeMap<NodeId, VertexId> = BTreeMap::from([(0, 0)]);
        for t in &dec.trunks {
            let leaf = &self.nodes[t.leaf];
            let label = leaf.label.as_deref().unwrap_or_default();
            for &p in &t.path {
                if self.nodes[p].index != t.index {
                    return Err(structure("index varies along a trunk"));
                }
            }
            let (l, leaf_vertex) = match lotus.as_mut() {
                None if t.start == 0 => {
                    lotus = Some(Lotus::with_leaf(self.root_label(), label, !leaf.curvetta)?);
                    (lotus.as_mut().unwrap(), 1)
                }
                None => return Err(structure("the first trunk must start at the root")),
                Some(_) if t.start == 0 => {
                    return Err(structure("only one trunk may start at the root"));
                }
                Some(l) => {
                    let e = *vert.get(&t.start).ok_or_else(|| structure("trunk starts at an unbuilt node"))?;
                    let ord = lambda_ord(l)?[e].ord;
                    if ord != t.index {
                        return Err(structure(format!(
                            "trunk toward {label} has index {} but its start has ord {ord}",
                            t.index
                        )));
                    }
                    let v = l.add_base_edge(e, label, !leaf.curvetta)?;
                    (l, v)
                }
            };
            let base = self.nodes[t.start].exponent.finite().unwrap().clone();
            let scale = Rational::from(t.index);
            let exps: Vec<ExtRational> = t
                .path
                .iter()
                .map(|&p| match &self.nodes[p].exponent {
                    ExtRational::Infinity => ExtRational::Infinity,
                    ExtRational::Finite(e) => ExtRational::Finite(&scale * (e - &base)),
                })
                .collect();
            let start = vert[&t.start];
            let marks = grow_membrane(l, start, leaf_vertex, &exps)?;
            for (&p, m) in t.path.iter().zip(marks) {
                vert.insert(p, m);
            }
        }
        lotus.ok_or_else(|| structure("empty trunk decomposition"))
    }

    /// A string equal for two trees exactly when they are isomorphic with equal
    /// exponents, indices and leaf labels.
    pub fn canonical_form(&self) -> String {
        fn go(t: &EwTree, v: NodeId) -> String {
            let n = &t.nodes[v];
            let mut kids: Vec<String> = n.children.iter().map(|&c| go(t, c)).collect();
            kids.sort();
            format!(
                "({}|{}|{}|{}|{:?}[{}])",
                n.exponent,
                n.index,
                n.label.as_deref().unwrap_or(""),
                if n.curvetta { "c" } else { "b" },
                n.leaf_index,
                kids.join(",")
            )
        }
        go(self, 0)
    }

    pub fn is_isomorphic(&self, other: &EwTree) -> bool {
        self.canonical_form() == other.canonical_form()
    }

    pub fn to_file(&self) -> EwTreeFile {
        let mut edges = Vec::new();
        let mut leaves = Vec::new();
        for (id, n) in self.nodes.iter().enumerate() {
            if let Some(p) = n.parent {
                edges.push(EwEdgeRecord { from: p, to: id, index: n.index });
            }
            if let Some(label) = &n.label {
                leaves.push(EwLeafRecord { id, label: label.clone(), aux: n.curvetta, index: n.leaf_index });
            }
        }
        EwTreeFile {
            nodes: self.nodes.iter().enumerate().map(|(id, n)| EwNodeRecord { id, exponent: n.exponent.clone() }).collect(),
            edges,
            leaves,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("tree serializes")
    }

    pub fn from_json(text: &str) -> Result<EwTree> {
        let file: EwTreeFile =
            serde_json::from_str(text).map_err(|e| Error::Parse { pos: e.column(), msg: e.to_string() })?;
        EwTree::from_file(&file)
    }

    pub fn from_file(file: &EwTreeFile) -> Result<EwTree> {
        let exps: BTreeMap<usize, &ExtRational> = file.nodes.iter().map(|n| (n.id, &n.exponent)).collect();
        if exps.len() != file.nodes.len() {
            return Err(structure("duplicate node id"));
        }
        let leaves: BTreeMap<usize, &EwLeafRecord> = file.leaves.iter().map(|l| (l.id, l)).collect();
        let roots: Vec<usize> = leaves.keys().copied().filter(|id| exps.get(id).is_some_and(|e| e.is_zero())).collect();
        let [root] = roots.as_slice() else {
            return Err(structure("exactly one labeled node must have exponent 0"));
        };
        let mut adj: BTreeMap<usize, Vec<(usize, u64)>> = BTreeMap::new();
        for e in &file.edges {
            for id in [e.from, e.to] {
                if !exps.contains_key(&id) {
                    return Err(structure(format!("edge uses unknown node {id}")));
                }
            }
            adj.entry(e.from).or_default().push((e.to, e.index));
            adj.entry(e.to).or_default().push((e.from, e.index));
        }
        let rl = leaves[root];
        let mut tree = EwTree::with_root(&rl.label);
        let mut map: BTreeMap<usize, NodeId> = BTreeMap::from([(*root, 0)]);
        let mut queue = VecDeque::from([*root]);
        while let Some(v) = queue.pop_front() {
            for &(w, index) in adj.get(&v).map(|x| x.as_slice()).unwrap_or(&[]) {
                if map.contains_key(&w) {
                    continue;
                }
                let (label, curvetta, leaf_index) = match leaves.get(&w) {
                    Some(l) => (Some(l.label.clone()), l.aux, l.index),
                    None => (None, false, None),
                };
                let id = tree.push(map[&v], exps[&w].clone(), index, label, curvetta, None);
                if let Some(li) = leaf_index {
                    tree.set_leaf_index(id, li);
                }
                map.insert(w, id);
                queue.push_back(w);
            }
        }
        if map.len() != file.nodes.len() || file.edges.len() + 1 != file.nodes.len() {
            return Err(structure("the edges do not form a tree"));
        }
        tree.finish()
    }
}

fn to_u64(q: &Rational, what: &'static str) -> Result<u64> {
    if !q.is_integer() || q.is_negative() {
        return Err(structure(format!("{what} {q} is not a nonnegative integer")));
    }
    q.to_u64().ok_or(Error::Overflow(what))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EwNodeRecord {
    pub id: usize,
    pub exponent: ExtRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EwEdgeRecord {
    pub from: usize,
    pub to: usize,
    pub index: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EwLeafRecord {
    pub id: usize,
    pub label: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub aux: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
}

/// On-disk tree format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EwTreeFile {
    pub nodes: Vec<EwNodeRecord>,
    pub edges: Vec<EwEdgeRecord>,
    pub leaves: Vec<EwLeafRecord>,
}

/// The tree read off the lateral boundary of a lotus: rupture vertices and leaves become
/// nodes, exponents are `λ/ord - 1` and each membrane contributes the index `ord` of the
/// start of its base edge.
pub fn ew_from_lotus(lotus: &Lotus) -> Result<EwTree> {
    let lo = lambda_ord(lotus)?;
    let rupture: BTreeSet<VertexId> = lotus.rupture_vertices().into_iter().collect();
    let keep = |v: VertexId| rupture.contains(&v) || !lotus.vertex(v).is_exceptional();
    let mut adj: Vec<Vec<(VertexId, u64)>> = vec![Vec::new(); lotus.vertices().len()];
    for e in lotus.edges().into_iter().filter(|e| e.on_boundary()) {
        let from = lotus.base_edges()[e.membrane].from;
        let index = lo[from].ord;
        adj[e.ends.0].push((e.ends.1, index));
        adj[e.ends.1].push((e.ends.0, index));
    }
    let root = lotus.initial();
    let mut tree = EwTree::with_root(lotus.name(root));
    let mut stack: Vec<(VertexId, NodeId)> = vec![(root, 0)];
    let mut seen = vec![false; lotus.vertices().len()];
    seen[root] = true;
    while let Some((v, node)) = stack.pop() {
        for &(w0, index) in &adj[v] {
            if seen[w0] {
                continue;
            }
            let (mut prev, mut cur) = (v, w0);
            seen[cur] = true;
            while !keep(cur) {
                let next: Vec<(VertexId, u64)> = adj[cur].iter().copied().filter(|&(x, _)| x != prev).collect();
                let [(x, i)] = next.as_slice() else {
                    return Err(structure(format!("boundary branches at non-rupture vertex {}", lotus.name(cur))));
                };
                if *i != index {
                    return Err(structure("index changes inside a boundary segment"));
                }
                prev = cur;
                cur = *x;
                if seen[cur] {
                    return Err(structure("the lateral boundary has a cycle"));
                }
                seen[cur] = true;
            }
            let vx = lotus.vertex(cur);
            if vx.is_exceptional() {
                let e = Rational::new(lo[cur].lambda, lo[cur].ord) - Rational::one();
                let id = tree.add_node(node, e, index);
                stack.push((cur, id));
            } else {
                tree.add_leaf(node, &vx.label, index, vx.kind != VertexKind::Branch);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(structure("the lateral boundary does not span the lotus"));
    }
    tree.finish()
}

fn lcm_of_denominators(exps: &[Rational]) -> Result<u64> {
    let mut l = 1u64;
    for a in exps {
        let d = a.denom_u64().ok_or(Error::Overflow("denominator"))?;
        l = l.lcm(&d);
    }
    Ok(l)
}

fn check_exponents(exps: &[Rational]) -> Result<()> {
    for (i, a) in exps.iter().enumerate() {
        if !a.is_positive() {
            return Err(Error::Domain(format!("exponent {a} is not positive")));
        }
        if i > 0 && *a <= exps[i - 1] {
            return Err(Error::Domain("exponents must be strictly increasing".into()));
        }
    }
    Ok(())
}

/// Exponents are generic (the branch is transversal to `L`) when the first exceeds 1.
pub fn is_generic(exps: &[Rational]) -> bool {
    exps.first().is_none_or(|a| *a > Rational::one())
}

/// `β_0 .. β_g` together with the gcd chain `e_0 .. e_g`.
fn betas(exps: &[Rational]) -> Result<(Vec<u64>, Vec<u64>)> {
    check_exponents(exps)?;
    let b0 = lcm_of_denominators(exps)?;
    let mut beta = vec![b0];
    let mut e = vec![b0];
    for a in exps {
        let b = to_u64(&(a * Rational::from(b0)), "characteristic term")?;
        let g = e.last().unwrap().gcd(&b);
        if g == *e.last().unwrap() {
            return Err(Error::Domain(format!("exponent {a} does not lower the gcd chain")));
        }
        beta.push(b);
        e.push(g);
    }
    Ok((beta, e))
}

/// Generators `β̄_0 .. β̄_g` of the semigroup of a branch, by the usual recursion.
pub fn semigroup_from_char_exponents(exps: &[Rational]) -> Result<Vec<u64>> {
    let (beta, e) = betas(exps)?;
    let g = exps.len();
    let mut bar = vec![beta[0]];
    if g >= 1 {
        bar.push(beta[1]);
    }
    for i in 2..=g {
        let n = e[i - 2] / e[i - 1];
        let v = n
            .checked_mul(bar[i - 1])
            .and_then(|x| x.checked_add(beta[i]))
            .and_then(|x| x.checked_sub(beta[i - 1]))
            .ok_or(Error::Overflow("semigroup generator"))?;
        bar.push(v);
    }
    Ok(bar)
}

/// Same generators through `β̄_i = β_i + Σ_k (n_k - 1) n_{k+1}⋯n_{i-1} β_k`.
pub fn semigroup_closed_form(exps: &[Rational]) -> Result<Vec<u64>> {
    let (beta, e) = betas(exps)?;
    let g = exps.len();
    let n: Vec<u64> = (1..=g).map(|i| e[i - 1] / e[i]).collect();
    let mut bar = vec![beta[0]];
    for i in 1..=g {
        let mut v = beta[i];
        for k in 1..i {
            let mut term = (n[k - 1] - 1).checked_mul(beta[k]).ok_or(Error::Overflow("semigroup generator"))?;
            for nj in &n[k..i - 1] {
                term = term.checked_mul(*nj).ok_or(Error::Overflow("semigroup generator"))?;
            }
            v = v.checked_add(term).ok_or(Error::Overflow("semigroup generator"))?;
        }
        bar.push(v);
    }
    Ok(bar)
}

/// Inverse of [`semigroup_from_char_exponents`].
pub fn char_exponents_from_semigroup(gens: &[u64]) -> Result<Vec<Rational>> {
    let Some(&b0) = gens.first() else {
        return Err(Error::Domain("empty semigroup".into()));
    };
    if b0 == 0 {
        return Err(Error::Domain("β̄_0 must be positive".into()));
    }
    let mut e = vec![b0];
    let mut beta: Vec<u64> = vec![b0];
    let mut out = Vec::new();
    for i in 1..gens.len() {
        let g = e[i - 1].gcd(&gens[i]);
        if g == e[i - 1] {
            return Err(Error::Domain(format!("generator {} does not lower the gcd", gens[i])));
        }
        let b = if i == 1 {
            gens[1]
        } else {
            let n = e[i - 2] / e[i - 1];
            let prod = n.checked_mul(gens[i - 1]).ok_or(Error::Overflow("semigroup generator"))?;
            (gens[i] + beta[i - 1])
                .checked_sub(prod)
                .ok_or_else(|| Error::Domain("generators are not a branch semigroup".into()))?
        };
        if b <= beta[i - 1] && i > 1 {
            return Err(Error::Domain("generators are not a branch semigroup".into()));
        }
        e.push(g);
        beta.push(b);
        out.push(Rational::new(b as i64, b0 as i64));
    }
    if *e.last().unwrap() != 1 {
        return Err(Error::Domain("the generators have a common factor".into()));
    }
    check_exponents(&out)?;
    Ok(out)
}

/// `Σ (n_i - 1) β̄_i - β_0 + 1`.
pub fn milnor_from_char_exponents(exps: &[Rational]) -> Result<u64> {
    let (_, e) = betas(exps)?;
    let bar = semigroup_from_char_exponents(exps)?;
    let mut s: i128 = 1 - bar[0] as i128;
    for i in 1..bar.len() {
        s += ((e[i - 1] / e[i]) as i128 - 1) * bar[i] as i128;
    }
    u64::try_from(s).map_err(|_| Error::Overflow("Milnor number"))
}

/// `n_g β̄_g - β_g - β_0 + 1`.
pub fn milnor_from_char_exponents_last(exps: &[Rational]) -> Result<u64> {
    let (beta, e) = betas(exps)?;
    let bar = semigroup_from_char_exponents(exps)?;
    let g = exps.len();
    if g == 0 {
        return Ok(0);
    }
    let n = (e[g - 1] / e[g]) as i128;
    let s = n * bar[g] as i128 - beta[g] as i128 - beta[0] as i128 + 1;
    u64::try_from(s).map_err(|_| Error::Overflow("Milnor number"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LotusSemigroup {
    pub generators: Vec<u64>,
    /// No generator lies in the semigroup spanned by the others.
    pub minimal: bool,
}

fn representable(target: u64, gens: &[u64]) -> Result<bool> {
    if target > 1 << 24 {
        return Err(Error::Overflow("minimality check"));
    }
    let t = target as usize;
    let mut ok = vec![false; t + 1];
    ok[0] = true;
    for v in 1..=t {
        ok[v] = gens.iter().any(|&g| g as usize <= v && g > 0 && ok[v - g as usize]);
    }
    Ok(ok[t])
}

/// Whether `x` lies in the semigroup generated by `gens`.
pub fn in_semigroup(x: u64, gens: &[u64]) -> Result<bool> {
    representable(x, gens)
}

/// The minimal generating set of the semigroup spanned by `gens`, ascending.
pub fn minimal_generators(gens: &[u64]) -> Result<Vec<u64>> {
    let mut sorted: Vec<u64> = gens.iter().copied().filter(|&g| g > 0).collect();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out: Vec<u64> = Vec::new();
    for g in sorted {
        if !representable(g, &out)? {
            out.push(g);
        }
    }
    Ok(out)
}

pub fn is_minimal_generating_sequence(gens: &[u64]) -> Result<bool> {
    for i in 0..gens.len() {
        let others: Vec<u64> = gens.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &g)| g).collect();
        if representable(gens[i], &others)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `((A·L), (A·L_1), ...)`: orders of vanishing of the branch along the divisors
/// carrying the curvettas, in creation order.
pub fn semigroup_from_lotus(lotus: &Lotus, branch: VertexId) -> Result<LotusSemigroup> {
    if !lotus.vertex(branch).arrowhead() {
        return Err(Error::Domain(format!("{} is not a branch", lotus.name(branch))));
    }
    if lotus.petals().is_empty() {
        // the branch is the second line of the initial cross, transversal to L
        return Ok(LotusSemigroup { generators: vec![1], minimal: true });
    }
    let ord = orders_of_vanishing(lotus, &[branch])?;
    let mut generators = Vec::new();
    for c in lotus.curvettas() {
        generators.push(ord[attaching_vertex(lotus, c)?]);
    }
    let minimal = is_minimal_generating_sequence(&generators)?;
    Ok(LotusSemigroup { generators, minimal })
}

/// What a single branch contributes to a tree: exponent marks with the index after each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchProfile {
    pub label: String,
    pub marks: Vec<(Rational, u64)>,
    pub leaf_index: u64,
    pub curvetta: bool,
}

impl BranchProfile {
    /// Profile of a branch with the given characteristic exponents in characteristic 0.
    pub fn from_char_exponents(label: &str, exps: &[Rational]) -> Result<BranchProfile> {
        let (_, e) = betas(exps)?;
        let marks = exps.iter().enumerate().map(|(i, a)| (a.clone(), e[0] / e[i + 1])).collect();
        Ok(BranchProfile { label: label.to_string(), marks, leaf_index: e[0], curvetta: false })
    }

    /// Index just below `e`.
    pub fn index_before(&self, e: &ExtRational) -> u64 {
        self.marks
            .iter().rfind(|(a, _)| ExtRational::Finite(a.clone()) < *e)
            .map_or(1, |m| m.1)
    }

    pub fn contact(&self, e: &Rational) -> Rational {
        let mut c = Rational::zero();
        let mut prev = Rational::zero();
        let mut idx = 1u64;
        for (a, i) in &self.marks {
            if a >= e {
                break;
            }
            c = c + (a - &prev) / Rational::from(idx);
            prev = a.clone();
            idx = *i;
        }
        c + (e - &prev) / Rational::from(idx)
    }

    /// The exponent where the contact complexity reaches `c`.
    pub fn inverse_contact(&self, c: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut prev = Rational::zero();
        let mut idx = 1u64;
        for (a, i) in &self.marks {
            let next = &acc + (a - &prev) / Rational::from(idx);
            if next >= *c {
                break;
            }
            acc = next;
            prev = a.clone();
            idx = *i;
        }
        prev + (c - acc) * Rational::from(idx)
    }
}

/// Assembles a tree from branch profiles and their pairwise coincidence exponents.
pub fn ew_from_profiles(root: &str, profiles: &[BranchProfile], coincidence: &[Vec<ExtRational>]) -> Result<EwTree> {
    let n = profiles.len();
    if n == 0 {
        return Err(Error::Domain("no branches".into()));
    }
    if coincidence.len() != n || coincidence.iter().any(|r| r.len() != n) {
        return Err(Error::Domain("coincidence table has the wrong shape".into()));
    }
    for l in 0..n {
        for m in 0..l {
            if coincidence[l][m] != coincidence[m][l] {
                return Err(Error::Domain("coincidence table is not symmetric".into()));
            }
            if coincidence[l][m].is_infinite() {
                return Err(Error::Domain(format!(
                    "branches {} and {} coincide",
                    profiles[l].label, profiles[m].label
                )));
            }
        }
    }
    let mut tree = EwTree::with_root(root);
    build_group(&mut tree, profiles, coincidence, 0, &Rational::zero(), (0..n).collect())?;
    tree.finish()
}

fn marks_between(p: &BranchProfile, lo: &Rational, hi: &ExtRational) -> Vec<(Rational, u64)> {
    p.marks
        .iter()
        .filter(|(a, _)| a > lo && ExtRational::Finite(a.clone()) < *hi)
        .cloned()
        .collect()
}

fn build_group(
    tree: &mut EwTree,
    profiles: &[BranchProfile],
    k: &[Vec<ExtRational>],
    parent: NodeId,
    from: &Rational,
    group: Vec<usize>,
) -> Result<()> {
    if let [b] = group.as_slice() {
        let p = &profiles[*b];
        let mut node = parent;
        for (a, _) in marks_between(p, from, &ExtRational::Infinity) {
            let idx = p.index_before(&ExtRational::Finite(a.clone()));
            node = tree.add_node(node, a, idx);
        }
        let idx = p.index_before(&ExtRational::Infinity);
        let leaf = tree.add_leaf(node, &p.label, idx, p.curvetta);
        tree.set_leaf_index(leaf, p.leaf_index);
        return Ok(());
    }
    let mut split: Option<Rational> = None;
    for (i, &l) in group.iter().enumerate() {
        for &m in &group[..i] {
            let v = k[l][m].finite().unwrap();
            if split.as_ref().is_none_or(|s| v < s) {
                split = Some(v.clone());
            }
        }
    }
    let split = split.unwrap();
    if split < *from || (split == *from && parent != 0) {
        return Err(Error::Domain("coincidences are not ultrametric".into()));
    }
    let hi = ExtRational::Finite(split.clone());
    let rep = &profiles[group[0]];
    let shared = marks_between(rep, from, &hi);
    for &b in &group {
        let p = &profiles[b];
        if marks_between(p, from, &hi) != shared || p.index_before(&hi) != rep.index_before(&hi) {
            return Err(Error::Domain(format!(
                "branches {} and {} differ before they separate",
                rep.label, p.label
            )));
        }
    }
    let mut node = parent;
    for (a, _) in shared {
        let idx = rep.index_before(&ExtRational::Finite(a.clone()));
        node = tree.add_node(node, a, idx);
    }
    if split > *from {
        node = tree.add_node(node, split.clone(), rep.index_before(&hi));
    }
    // classes of the relation "coincide beyond the split"
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &b in &group {
        match classes.iter_mut().find(|c| k[c[0]][b] > hi) {
            Some(c) => c.push(b),
            None => classes.push(vec![b]),
        }
    }
    for (i, c) in classes.iter().enumerate() {
        for &l in c {
            for &m in c {
                if l != m && k[l][m] <= hi {
                    return Err(Error::Domain("coincidences are not ultrametric".into()));
                }
            }
            for other in &classes[i + 1..] {
                if other.iter().any(|&m| k[l][m] != hi) {
                    return Err(Error::Domain("coincidences are not ultrametric".into()));
                }
            }
        }
    }
    for c in classes {
        build_group(tree, profiles, k, node, &split, c)?;
    }
    Ok(())
}

/// A generic tree from branch semigroups and pairwise intersection numbers.
pub fn ew_from_semigroups(
    root: &str,
    branches: &[(String, Vec<u64>)],
    intersections: &BTreeMap<(usize, usize), u64>,
) -> Result<EwTree> {
    let mut profiles = Vec::new();
    for (label, gens) in branches {
        let exps = char_exponents_from_semigroup(gens)?;
        profiles.push(BranchProfile::from_char_exponents(label, &exps)?);
    }
    let n = profiles.len();
    let mut k = vec![vec![ExtRational::Infinity; n]; n];
    for l in 0..n {
        for m in 0..l {
            let value = intersections
                .get(&(m, l))
                .or_else(|| intersections.get(&(l, m)))
                .ok_or_else(|| {
                    Error::Domain(format!("missing intersection of {} and {}", profiles[m].label, profiles[l].label))
                })?;
            let c = Rational::from(*value) / Rational::from(profiles[l].leaf_index * profiles[m].leaf_index);
            let el = profiles[l].inverse_contact(&c);
            let em = profiles[m].inverse_contact(&c);
            if el != em {
                return Err(Error::Domain(format!(
                    "intersection {value} of {} and {} fits no common point",
                    profiles[m].label, profiles[l].label
                )));
            }
            k[l][m] = ExtRational::Finite(el.clone());
            k[m][l] = ExtRational::Finite(el);
        }
    }
    ew_from_profiles(root, &profiles, &k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn semigroups_and_milnor() {
        assert_eq!(semigroup_from_char_exponents(&[q(3, 2)]).unwrap(), vec![2, 3]);
        assert_eq!(semigroup_from_char_exponents(&[q(3, 2), q(13, 6)]).unwrap(), vec![6, 9, 22]);
        assert_eq!(semigroup_closed_form(&[q(3, 2), q(13, 6)]).unwrap(), vec![6, 9, 22]);
        assert_eq!(char_exponents_from_semigroup(&[6, 9, 26]).unwrap(), vec![q(3, 2), q(17, 6)]);
        assert_eq!(milnor_from_char_exponents(&[q(3, 2), q(13, 6)]).unwrap(), 48);
        assert_eq!(milnor_from_char_exponents_last(&[q(3, 2), q(13, 6)]).unwrap(), 48);
        assert_eq!(milnor_from_char_exponents(&[q(3, 2)]).unwrap(), 2);
        assert!(!is_minimal_generating_sequence(&[2, 2, 3]).unwrap());
        assert!(is_minimal_generating_sequence(&[6, 9, 22]).unwrap());
    }

    #[test]
    fn profile_inverse() {
        let p = BranchProfile::from_char_exponents("A", &[q(3, 2)]).unwrap();
        assert_eq!(p.inverse_contact(&q(2, 1)), q(5, 2));
        assert_eq!(p.contact(&q(5, 2)), q(2, 1));
        assert_eq!(p.inverse_contact(&q(1, 1)), q(1, 1));
    }

    #[test]
    fn char_two_center() {
        let branches = vec![("A1".to_string(), vec![2, 3]), ("A2".to_string(), vec![2, 3])];
        let t = ew_from_semigroups("L", &branches, &BTreeMap::from([((0, 1), 8)])).unwrap();
        let (a, b) = (t.leaf_id("A1").unwrap(), t.leaf_id("A2").unwrap());
        let c = t.tripod_center(a, b).unwrap();
        assert_eq!(t.node(c).exponent, ExtRational::Finite(q(5, 2)));
        assert_eq!(t.tripod_intersection(a, b).unwrap(), 8);
    }
}
