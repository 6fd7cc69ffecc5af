//! The lotus complex.
//!
//! A lotus is grown from one oriented base edge `[L, L1]` by two moves:
//! gluing a petal (triangle) on an edge of the lateral boundary, and attaching
//! a new oriented base edge at an exceptional vertex. Vertices and edges are
//! kept in creation order so every query below is deterministic.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{cf_expand, ExtRational, Rational};
use crate::error::{Error, Result};

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    /// The initial vertex `L`.
    Initial,
    /// A curvetta: the second vertex of the initial edge or an auxiliary `L_i`.
    Curvetta,
    /// A branch of the curve; drawn with an arrowhead.
    Branch,
    /// An exceptional divisor `E_k`, apex of the k-th petal.
    Exceptional,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub kind: VertexKind,
    pub label: String,
}

impl Vertex {
    pub fn arrowhead(&self) -> bool {
        self.kind == VertexKind::Branch
    }

    pub fn is_exceptional(&self) -> bool {
        self.kind == VertexKind::Exceptional
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Petal {
    pub base: [VertexId; 2],
    pub apex: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaseEdge {
    pub from: VertexId,
    pub to: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeClass {
    Base,
    Lateral,
    Internal,
}

/// Unordered edge, stored with the smaller id first.
pub type EdgeKey = (VertexId, VertexId);

pub fn edge_key(a: VertexId, b: VertexId) -> EdgeKey {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug)]
struct EdgeRec {
    membrane: usize,
    base: Option<usize>,
    petal: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeInfo {
    pub ends: EdgeKey,
    pub class: EdgeClass,
    /// Index of the membrane containing the edge (membranes are numbered by base edge).
    pub membrane: usize,
    /// Index into `base_edges()` when the edge is a base edge.
    pub base_edge: Option<usize>,
    /// The petal built on this edge, if any.
    pub petal: Option<usize>,
}

impl EdgeInfo {
    /// On the lateral boundary: lateral, or a base edge carrying no petal.
    pub fn on_boundary(&self) -> bool {
        self.petal.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membrane {
    pub base_edge: usize,
    pub petals: Vec<usize>,
    pub edges: Vec<EdgeKey>,
}

#[derive(Clone, Debug, Default)]
pub struct Lotus {
    vertices: Vec<Vertex>,
    petals: Vec<Petal>,
    base_edges: Vec<BaseEdge>,
    edges: BTreeMap<EdgeKey, EdgeRec>,
    edge_order: Vec<EdgeKey>,
}

impl Lotus {
    /// A lotus with the single base edge `[initial, second]`, oriented from `initial`.
    pub fn new(initial: &str, second: &str) -> Result<Lotus> {
        Lotus::with_leaf(initial, second, false)
    }

    /// Like [`Lotus::new`], optionally making the second vertex a branch leaf.
    pub fn with_leaf(initial: &str, second: &str, arrowhead: bool) -> Result<Lotus> {
        if initial == second {
            return Err(Error::Domain(format!("initial and second labels coincide: {initial:?}")));
        }
        check_label(initial)?;
        check_label(second)?;
        let mut lotus = Lotus::default();
        lotus.vertices.push(Vertex { kind: VertexKind::Initial, label: initial.to_string() });
        let kind = if arrowhead { VertexKind::Branch } else { VertexKind::Curvetta };
        lotus.vertices.push(Vertex { kind, label: second.to_string() });
        lotus.base_edges.push(BaseEdge { from: 0, to: 1 });
        lotus.insert_edge(0, 1, 0, Some(0));
        Ok(lotus)
    }

    fn insert_edge(&mut self, a: VertexId, b: VertexId, membrane: usize, base: Option<usize>) {
        let key = edge_key(a, b);
        self.edges.insert(key, EdgeRec { membrane, base, petal: None });
        self.edge_order.push(key);
    }

    /// Glues a petal on the edge `[a, b]` and returns its apex.
    pub fn add_petal(&mut self, a: VertexId, b: VertexId) -> Result<VertexId> {
        let key = edge_key(a, b);
        let rec = self
            .edges
            .get(&key)
            .ok_or_else(|| Error::Structure(format!("no edge between {} and {}", self.name(a), self.name(b))))?;
        if let Some(p) = rec.petal {
            return Err(Error::Structure(format!(
                "edge [{} {}] is internal: already the base of petal {p}",
                self.name(a),
                self.name(b)
            )));
        }
        let membrane = rec.membrane;
        let k = self.petals.len();
        let apex = self.vertices.len();
        self.vertices.push(Vertex { kind: VertexKind::Exceptional, label: format!("E{k}") });
        self.edges.get_mut(&key).unwrap().petal = Some(k);
        self.petals.push(Petal { base: [a, b], apex });
        self.insert_edge(a, apex, membrane, None);
        self.insert_edge(b, apex, membrane, None);
        Ok(apex)
    }

    /// Attaches a new oriented base edge from the exceptional vertex `at` to a fresh leaf.
    pub fn add_base_edge(&mut self, at: VertexId, label: &str, arrowhead: bool) -> Result<VertexId> {
        let v = self
            .vertices
            .get(at)
            .ok_or_else(|| Error::Structure(format!("no vertex with id {at}")))?;
        if !v.is_exceptional() {
            return Err(Error::Structure(format!("base edges start at exceptional vertices, not at {}", v.label)));
        }
        check_label(label)?;
        if self.find(label).is_some() {
            return Err(Error::Domain(format!("duplicate vertex label {label:?}")));
        }
        let id = self.vertices.len();
        let kind = if arrowhead { VertexKind::Branch } else { VertexKind::Curvetta };
        self.vertices.push(Vertex { kind, label: label.to_string() });
        let m = self.base_edges.len();
        self.base_edges.push(BaseEdge { from: at, to: id });
        self.insert_edge(at, id, m, Some(m));
        Ok(id)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v]
    }

    pub fn name(&self, v: VertexId) -> &str {
        self.vertices.get(v).map(|x| x.label.as_str()).unwrap_or("?")
    }

    pub fn petals(&self) -> &[Petal] {
        &self.petals
    }

    pub fn base_edges(&self) -> &[BaseEdge] {
        &self.base_edges
    }

    pub fn initial(&self) -> VertexId {
        0
    }

    pub fn find(&self, label: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.label == label)
    }

    /// Looks up a vertex by label, failing with a domain error.
    pub fn vertex_id(&self, label: &str) -> Result<VertexId> {
        self.find(label).ok_or_else(|| Error::Domain(format!("no vertex labeled {label:?}")))
    }

    /// Exceptional vertex created by the k-th petal.
    pub fn exceptional(&self, k: usize) -> VertexId {
        self.petals[k].apex
    }

    pub fn exceptional_vertices(&self) -> Vec<VertexId> {
        self.petals.iter().map(|p| p.apex).collect()
    }

    /// Arrowhead leaves, in creation order.
    pub fn branch_leaves(&self) -> Vec<VertexId> {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].arrowhead()).collect()
    }

    /// The initial vertex and the curvettas, in creation order.
    pub fn curvettas(&self) -> Vec<VertexId> {
        (0..self.vertices.len())
            .filter(|&v| matches!(self.vertices[v].kind, VertexKind::Initial | VertexKind::Curvetta))
            .collect()
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains_key(&edge_key(a, b))
    }

    fn info(&self, key: EdgeKey) -> EdgeInfo {
        let rec = &self.edges[&key];
        let class = if rec.base.is_some() {
            EdgeClass::Base
        } else if rec.petal.is_some() {
            EdgeClass::Internal
        } else {
            EdgeClass::Lateral
        };
        EdgeInfo { ends: key, class, membrane: rec.membrane, base_edge: rec.base, petal: rec.petal }
    }

    pub fn edge(&self, a: VertexId, b: VertexId) -> Option<EdgeInfo> {
        let key = edge_key(a, b);
        self.edges.contains_key(&key).then(|| self.info(key))
    }

    /// All edges in creation order.
    pub fn edges(&self) -> Vec<EdgeInfo> {
        self.edge_order.iter().map(|&k| self.info(k)).collect()
    }

    pub fn edges_of_class(&self, class: EdgeClass) -> Vec<EdgeKey> {
        self.edges().into_iter().filter(|e| e.class == class).map(|e| e.ends).collect()
    }

    /// Base edges that carry no petal.
    pub fn inactive_base_edges(&self) -> Vec<usize> {
        (0..self.base_edges.len())
            .filter(|&i| {
                let b = self.base_edges[i];
                self.edges[&edge_key(b.from, b.to)].petal.is_none()
            })
            .collect()
    }

    /// Edges of the lateral boundary, in creation order.
    pub fn lateral_boundary(&self) -> Vec<EdgeKey> {
        self.edges().into_iter().filter(|e| e.on_boundary()).map(|e| e.ends).collect()
    }

    /// Neighbours of `v` along the lateral boundary.
    pub fn boundary_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.lateral_boundary()
            .into_iter()
            .filter_map(|(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// The unique lateral-boundary edge at a leaf vertex.
    pub fn leaf_edge(&self, v: VertexId) -> Result<EdgeKey> {
        if self.vertices.get(v).is_none_or(|x| x.is_exceptional()) {
            return Err(Error::Domain(format!("{} is not a leaf of the lotus", self.name(v))));
        }
        let n = self.boundary_neighbors(v);
        match n.as_slice() {
            [w] => Ok(edge_key(v, *w)),
            _ => Err(Error::Structure(format!("{} has {} boundary neighbours", self.name(v), n.len()))),
        }
    }

    pub fn membranes(&self) -> Vec<Membrane> {
        let mut ms: Vec<Membrane> = (0..self.base_edges.len())
            .map(|i| Membrane { base_edge: i, petals: Vec::new(), edges: Vec::new() })
            .collect();
        for key in &self.edge_order {
            let rec = &self.edges[key];
            ms[rec.membrane].edges.push(*key);
        }
        for (k, p) in self.petals.iter().enumerate() {
            let m = self.edges[&edge_key(p.base[0], p.base[1])].membrane;
            ms[m].petals.push(k);
        }
        ms
    }

    fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edge_order {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Vertices whose removal disconnects the complex.
    pub fn rupture_vertices(&self) -> Vec<VertexId> {
        let adj = self.adjacency();
        let n = self.vertices.len();
        (0..n)
            .filter(|&cut| {
                let start = (0..n).find(|&v| v != cut);
                let Some(start) = start else { return false };
                let mut seen = vec![false; n];
                seen[cut] = true;
                seen[start] = true;
                let mut queue = VecDeque::from([start]);
                while let Some(v) = queue.pop_front() {
                    for &w in &adj[v] {
                        if !seen[w] {
                            seen[w] = true;
                            queue.push_back(w);
                        }
                    }
                }
                seen.iter().any(|s| !s)
            })
            .collect()
    }

    /// Edges between exceptional vertices, as arcs from the later vertex to the earlier one.
    pub fn proximity_graph(&self) -> ProximityGraph {
        let vertices = self.exceptional_vertices();
        let mut arcs: Vec<(VertexId, VertexId)> = self
            .edge_order
            .iter()
            .filter(|(a, b)| self.vertices[*a].is_exceptional() && self.vertices[*b].is_exceptional())
            .map(|&(a, b)| if a > b { (a, b) } else { (b, a) })
            .collect();
        arcs.sort();
        ProximityGraph { vertices, arcs }
    }

    /// Every triple of pairwise adjacent vertices spans exactly one petal.
    pub fn satisfies_triangle_condition(&self) -> bool {
        let adj: Vec<BTreeSet<VertexId>> =
            self.adjacency().into_iter().map(|v| v.into_iter().collect()).collect();
        let petal_sets: BTreeMap<[VertexId; 3], usize> = {
            let mut m = BTreeMap::new();
            for p in &self.petals {
                let mut t = [p.base[0], p.base[1], p.apex];
                t.sort();
                *m.entry(t).or_insert(0) += 1;
            }
            m
        };
        for &(a, b) in &self.edge_order {
            for &c in adj[a].intersection(&adj[b]) {
                let mut t = [a, b, c];
                t.sort();
                if petal_sets.get(&t) != Some(&1) {
                    return false;
                }
            }
        }
        petal_sets.values().all(|&c| c == 1)
    }

    /// The lateral boundary is a tree spanning every vertex.
    pub fn boundary_is_tree(&self) -> bool {
        let edges = self.lateral_boundary();
        let n = self.vertices.len();
        if edges.len() + 1 != n {
            return false;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (a, b) in edges {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    /// Structural isomorphism preserving the labels of non-exceptional vertices.
    pub fn is_isomorphic(&self, other: &Lotus) -> bool {
        if self.vertices.len() != other.vertices.len()
            || self.petals.len() != other.petals.len()
            || self.base_edges.len() != other.base_edges.len()
        {
            return false;
        }
        let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for (v, x) in self.vertices.iter().enumerate() {
            if x.is_exceptional() {
                continue;
            }
            match other.find(&x.label) {
                Some(w) if other.vertices[w].kind == x.kind => {
                    map.insert(v, w);
                }
                _ => return false,
            }
        }
        // Base edges pin exceptional vertices through their leaves, petals through their bases.
        let mut progress = true;
        while progress {
            progress = false;
            for b in &self.base_edges {
                if let (Some(&to), false) = (map.get(&b.to), map.contains_key(&b.from)) {
                    if let Some(ob) = other.base_edges.iter().find(|ob| ob.to == to) {
                        map.insert(b.from, ob.from);
                        progress = true;
                    }
                }
            }
            for p in &self.petals {
                if map.contains_key(&p.apex) {
                    continue;
                }
                if let (Some(&a), Some(&b)) = (map.get(&p.base[0]), map.get(&p.base[1])) {
                    let Some(rec) = other.edges.get(&edge_key(a, b)) else { return false };
                    let Some(k) = rec.petal else { return false };
                    map.insert(p.apex, other.petals[k].apex);
                    progress = true;
                }
            }
        }
        if map.len() != self.vertices.len() {
            return false;
        }
        let image: BTreeSet<VertexId> = map.values().copied().collect();
        if image.len() != map.len() {
            return false;
        }
        let petals_other: BTreeSet<[VertexId; 3]> = other
            .petals
            .iter()
            .map(|p| {
                let mut t = [p.base[0], p.base[1], p.apex];
                t[..2].sort();
                t
            })
            .collect();
        let petals_mapped: BTreeSet<[VertexId; 3]> = self
            .petals
            .iter()
            .map(|p| {
                let mut t = [map[&p.base[0]], map[&p.base[1]], map[&p.apex]];
                t[..2].sort();
                t
            })
            .collect();
        let base_other: BTreeSet<(VertexId, VertexId)> =
            other.base_edges.iter().map(|b| (b.from, b.to)).collect();
        let base_mapped: BTreeSet<(VertexId, VertexId)> =
            self.base_edges.iter().map(|b| (map[&b.from], map[&b.to])).collect();
        petals_other == petals_mapped && base_other == base_mapped
    }

    pub fn to_file(&self) -> LotusFile {
        LotusFile {
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| VertexRecord { id, kind: v.kind, label: v.label.clone(), arrowhead: v.arrowhead() })
                .collect(),
            petals: self.petals.iter().map(|p| PetalRecord { base: p.base, apex: p.apex }).collect(),
            base_edges: self.base_edges.iter().map(|b| BaseEdgeRecord { from: b.from, to: b.to }).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("lotus serializes")
    }

    pub fn from_json(text: &str) -> Result<Lotus> {
        let file: LotusFile =
            serde_json::from_str(text).map_err(|e| Error::Parse { pos: e.column(), msg: e.to_string() })?;
        Lotus::from_file(&file)
    }

    /// Rebuilds a lotus by replaying the recorded construction.
    pub fn from_file(file: &LotusFile) -> Result<Lotus> {
        let label = |id: VertexId| -> Result<&VertexRecord> {
            file.vertices
                .iter()
                .find(|v| v.id == id)
                .ok_or_else(|| Error::Structure(format!("unknown vertex id {id}")))
        };
        let initial: Vec<&VertexRecord> = file.vertices.iter().filter(|v| v.kind == VertexKind::Initial).collect();
        let [init] = initial.as_slice() else {
            return Err(Error::Structure("a lotus has exactly one initial vertex".into()));
        };
        let first: Vec<&BaseEdgeRecord> =
            file.base_edges.iter().filter(|b| b.from == init.id || b.to == init.id).collect();
        let [first] = first.as_slice() else {
            return Err(Error::Structure("exactly one base edge contains the initial vertex".into()));
        };
        if first.from != init.id {
            return Err(Error::Structure("the initial base edge must start at the initial vertex".into()));
        }
        let second = label(first.to)?;
        let mut lotus = Lotus::with_leaf(&init.label, &second.label, second.kind == VertexKind::Branch)?;
        let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::from([(init.id, 0), (second.id, 1)]);
        let mut pending: Vec<&BaseEdgeRecord> = file.base_edges.iter().filter(|b| !std::ptr::eq(*b, *first)).collect();

        let flush = |lotus: &mut Lotus,
                     map: &mut BTreeMap<VertexId, VertexId>,
                     pending: &mut Vec<&BaseEdgeRecord>,
                     before: Option<VertexId>|
         -> Result<()> {
            let mut i = 0;
            while i < pending.len() {
                let b = pending[i];
                let due = before.is_none_or(|limit| b.to < limit);
                if let (true, Some(&from)) = (due, map.get(&b.from)) {
                    let leaf = label(b.to)?;
                    if leaf.kind == VertexKind::Exceptional || leaf.kind == VertexKind::Initial {
                        return Err(Error::Structure(format!("base edge ends at non-leaf {}", leaf.label)));
                    }
                    let id = lotus.add_base_edge(from, &leaf.label, leaf.kind == VertexKind::Branch)?;
                    map.insert(b.to, id);
                    pending.remove(i);
                } else {
                    i += 1;
                }
            }
            Ok(())
        };

        // leaves are attached in id order relative to the petal apices, so ids survive a round trip
        for p in &file.petals {
            flush(&mut lotus, &mut map, &mut pending, Some(p.apex))?;
            if !p.base.iter().all(|v| map.contains_key(v)) {
                flush(&mut lotus, &mut map, &mut pending, None)?;
            }
            let a = *map.get(&p.base[0]).ok_or_else(|| Error::Structure("petal base uses an unknown vertex".into()))?;
            let b = *map.get(&p.base[1]).ok_or_else(|| Error::Structure("petal base uses an unknown vertex".into()))?;
            if label(p.apex)?.kind != VertexKind::Exceptional {
                return Err(Error::Structure("petal apex must be exceptional".into()));
            }
            if map.contains_key(&p.apex) {
                return Err(Error::Structure("vertex is the apex of two petals".into()));
            }
            let apex = lotus.add_petal(a, b)?;
            map.insert(p.apex, apex);
        }
        flush(&mut lotus, &mut map, &mut pending, None)?;
        if !pending.is_empty() || map.len() != file.vertices.len() {
            return Err(Error::Structure("lotus file has unreachable vertices or base edges".into()));
        }
        Ok(lotus)
    }
}

fn check_label(label: &str) -> Result<()> {
    let reserved = label.len() > 1 && label.starts_with('E') && label[1..].bytes().all(|b| b.is_ascii_digit());
    if label.is_empty() || reserved || label.chars().any(|c| c.is_whitespace() || c == ',' || c == '#') {
        return Err(Error::Domain(format!("invalid label {label:?}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProximityGraph {
    pub vertices: Vec<VertexId>,
    /// `(later, earlier)`: the point blown up later is proximate to the earlier one.
    pub arcs: Vec<(VertexId, VertexId)>,
}

impl ProximityGraph {
    pub fn degree(&self, v: VertexId) -> usize {
        self.arcs.iter().filter(|(a, b)| *a == v || *b == v).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: VertexId,
    pub kind: VertexKind,
    pub label: String,
    #[serde(default)]
    pub arrowhead: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PetalRecord {
    pub base: [VertexId; 2],
    pub apex: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseEdgeRecord {
    pub from: VertexId,
    pub to: VertexId,
}

/// On-disk lotus format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LotusFile {
    pub vertices: Vec<VertexRecord>,
    pub petals: Vec<PetalRecord>,
    pub base_edges: Vec<BaseEdgeRecord>,
}

/// Step of a zigzag: the next petal sits on `[apex, upper]` (Right) or `[lower, apex]` (Left).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Right,
    Left,
}

/// Moves after the first petal of the Newton lotus of `g`: `R^{a1} L^{a2} R^{a3}...`,
/// with the last run shortened by one.
pub fn move_sequence(g: &Rational) -> Result<Vec<Move>> {
    let terms = cf_expand(g)?.small_terms()?;
    let k = terms.len();
    let mut moves = Vec::new();
    for (i, &a) in terms.iter().enumerate() {
        let run = if i + 1 == k { a - 1 } else { a };
        let m = if i % 2 == 0 { Move::Right } else { Move::Left };
        moves.extend(std::iter::repeat_n(m, run));
    }
    Ok(moves)
}

fn petal_on(lotus: &mut Lotus, a: VertexId, b: VertexId) -> Result<VertexId> {
    let info = lotus
        .edge(a, b)
        .ok_or_else(|| Error::Structure("zigzag left the membrane".into()))?;
    match info.petal {
        Some(k) => Ok(lotus.petals[k].apex),
        None => lotus.add_petal(a, b),
    }
}

/// Grows the Newton lotus of `exponents` on the edge `[lower, upper]` of an existing lotus.
/// Slopes are measured from `lower` (slope 0) to `upper` (slope infinity).
/// Returns, for each exponent in the given order, its marked vertex.
pub fn grow_membrane(
    lotus: &mut Lotus,
    lower: VertexId,
    upper: VertexId,
    exponents: &[ExtRational],
) -> Result<Vec<VertexId>> {
    let mut order: Vec<usize> = (0..exponents.len()).collect();
    order.sort_by(|&i, &j| exponents[i].cmp(&exponents[j]));
    let mut marks = vec![0; exponents.len()];
    for i in order {
        marks[i] = match &exponents[i] {
            ExtRational::Infinity => upper,
            ExtRational::Finite(q) if q.is_zero() => lower,
            ExtRational::Finite(q) => {
                if q.is_negative() {
                    return Err(Error::Domain(format!("negative slope {q}")));
                }
                let (mut lo, mut hi) = (lower, upper);
                let mut apex = petal_on(lotus, lo, hi)?;
                for m in move_sequence(q)? {
                    match m {
                        Move::Right => lo = apex,
                        Move::Left => hi = apex,
                    }
                    apex = petal_on(lotus, lo, hi)?;
                }
                apex
            }
        };
    }
    Ok(marks)
}

/// An abstract Newton lotus with its marked vertices.
#[derive(Clone, Debug)]
pub struct NewtonLotus {
    pub lotus: Lotus,
    /// Marked vertex `p(γ)` of every requested slope, sorted by slope.
    pub marks: Vec<(ExtRational, VertexId)>,
}

/// The Newton lotus of a nonempty set of slopes, grown on the base segment `[e1, e2]`.
pub fn newton_lotus(exponents: &[ExtRational]) -> Result<NewtonLotus> {
    if exponents.is_empty() {
        return Err(Error::Domain("Newton lotus of an empty set".into()));
    }
    let mut exps = exponents.to_vec();
    exps.sort();
    exps.dedup();
    let mut lotus = Lotus::new("e1", "e2")?;
    let marks = grow_membrane(&mut lotus, 0, 1, &exps)?;
    Ok(NewtonLotus { lotus, marks: exps.into_iter().zip(marks).collect() })
}

/// Point of the lattice with basis `(e1, e2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint(pub BigInt, pub BigInt);

impl LatticePoint {
    pub fn e1() -> LatticePoint {
        LatticePoint(BigInt::one(), BigInt::zero())
    }

    pub fn e2() -> LatticePoint {
        LatticePoint(BigInt::zero(), BigInt::one())
    }

    pub fn add(&self, o: &LatticePoint) -> LatticePoint {
        LatticePoint(&self.0 + &o.0, &self.1 + &o.1)
    }
}

/// Petal `δ(u, v)` of the universal lotus; its apex is `u + v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePetal {
    pub u: LatticePoint,
    pub v: LatticePoint,
}

impl LatticePetal {
    pub fn apex(&self) -> LatticePoint {
        self.u.add(&self.v)
    }
}

fn cross(a: (&Rational, &Rational), b: (&Rational, &Rational)) -> Rational {
    a.0 * b.1 - a.1 * b.0
}

/// Does the ray `t·d, t >= 0` meet the open triangle `(p0, p1, p2)`?
fn ray_meets_open_triangle(d: (&Rational, &Rational), tri: [(Rational, Rational); 3]) -> bool {
    let [p0, p1, p2] = tri;
    let e1 = (&p1.0 - &p0.0, &p1.1 - &p0.1);
    let e2 = (&p2.0 - &p0.0, &p2.1 - &p0.1);
    let det = cross((&e1.0, &e1.1), (&e2.0, &e2.1));
    if det.is_zero() {
        return false;
    }
    // barycentric coordinates of t·d are affine in t: s = s0 + s1 t, u = u0 + u1 t
    let minus_p0 = (-&p0.0, -&p0.1);
    let s0 = cross((&minus_p0.0, &minus_p0.1), (&e2.0, &e2.1)) / &det;
    let s1 = cross(d, (&e2.0, &e2.1)) / &det;
    let u0 = cross((&e1.0, &e1.1), (&minus_p0.0, &minus_p0.1)) / &det;
    let u1 = cross((&e1.0, &e1.1), d) / &det;
    let w0 = Rational::one() - &s0 - &u0;
    let w1 = -(&s1 + &u1);
    let mut lo = Rational::zero();
    let mut hi: Option<Rational> = None;
    for (c0, c1) in [(s0, s1), (u0, u1), (w0, w1)] {
        if c1.is_zero() {
            if !c0.is_positive() {
                return false;
            }
        } else {
            let root = -&c0 / &c1;
            if c1.is_positive() {
                if root > lo {
                    lo = root;
                }
            } else if hi.as_ref().is_none_or(|h| root < *h) {
                hi = Some(root);
            }
        }
    }
    hi.is_none_or(|h| lo < h)
}

/// Brute-force Newton lotus: petals of the universal lotus whose interior meets a ray
/// `R≥0 (e1 + γ e2)`, found by exploring children of every petal the rays cross.
pub fn lattice_newton_lotus_oracle(exponents: &[ExtRational]) -> BTreeSet<LatticePetal> {
    let dirs: Vec<(Rational, Rational)> = exponents
        .iter()
        .map(|g| match g {
            ExtRational::Infinity => (Rational::zero(), Rational::one()),
            ExtRational::Finite(q) => (Rational::one(), q.clone()),
        })
        .collect();
    let to_q = |p: &LatticePoint| (Rational::from_int(p.0.clone()), Rational::from_int(p.1.clone()));
    let mut found = BTreeSet::new();
    let mut queue = VecDeque::from([LatticePetal { u: LatticePoint::e1(), v: LatticePoint::e2() }]);
    while let Some(petal) = queue.pop_front() {
        let tri = [to_q(&petal.u), to_q(&petal.v), to_q(&petal.apex())];
        let hit = dirs.iter().any(|d| ray_meets_open_triangle((&d.0, &d.1), tri.clone()));
        if hit && found.insert(petal.clone()) {
            let w = petal.apex();
            queue.push_back(LatticePetal { u: petal.u.clone(), v: w.clone() });
            queue.push_back(LatticePetal { u: w, v: petal.v.clone() });
        }
    }
    found
}

/// Lattice image of a lotus grown by [`grow_membrane`] on its first base edge:
/// `e1` and `e2` are the endpoints of that edge and each apex is the sum of its base.
pub fn lattice_image(lotus: &Lotus) -> BTreeSet<LatticePetal> {
    let mut pos: BTreeMap<VertexId, LatticePoint> = BTreeMap::new();
    let first = lotus.base_edges()[0];
    pos.insert(first.from, LatticePoint::e1());
    pos.insert(first.to, LatticePoint::e2());
    let mut out = BTreeSet::new();
    for p in lotus.petals() {
        let (Some(a), Some(b)) = (pos.get(&p.base[0]).cloned(), pos.get(&p.base[1]).cloned()) else {
            continue;
        };
        let (u, v) = if (&a.1 * &b.0) < (&b.1 * &a.0) { (a, b) } else { (b, a) };
        pos.insert(p.apex, u.add(&v));
        out.insert(LatticePetal { u, v });
    }
    out
}

/// Builds a lotus from a step script, one command per line:
///
/// ```text
/// lotus L L1        # initial base edge; `lotus L A arrowhead` for a branch
/// petal L L1        # petal on an edge, endpoints by label
/// leaf E2 A         # base edge to a branch
/// curvetta E2 L2    # base edge to an auxiliary curvetta
/// ```
pub fn parse_steps(text: &str) -> Result<Lotus> {
    let mut lotus: Option<Lotus> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { pos: lineno + 1, msg };
        let words: Vec<&str> = line.split_whitespace().collect();
        let wrap = |e: Error| match e {
            Error::Parse { .. } => e,
            other => err(other.to_string()),
        };
        match (words[0], &words[1..], lotus.as_mut()) {
            ("lotus", [a, b], None) => lotus = Some(Lotus::new(a, b).map_err(wrap)?),
            ("lotus", [a, b, "arrowhead"], None) => lotus = Some(Lotus::with_leaf(a, b, true).map_err(wrap)?),
            ("lotus", _, Some(_)) => return Err(err("the initial edge is already declared".into())),
            (_, _, None) => return Err(err("the script must start with `lotus`".into())),
            ("petal", [a, b], Some(l)) => {
                let (a, b) = (l.vertex_id(a).map_err(wrap)?, l.vertex_id(b).map_err(wrap)?);
                l.add_petal(a, b).map_err(wrap)?;
            }
            (cmd @ ("leaf" | "curvetta"), [at, label], Some(l)) => {
                let at = l.vertex_id(at).map_err(wrap)?;
                l.add_base_edge(at, label, cmd == "leaf").map_err(wrap)?;
            }
            _ => return Err(err(format!("cannot read {line:?}"))),
        }
    }
    lotus.ok_or(Error::Parse { pos: 0, msg: "empty step script".into() })
}

/// Step script reproducing a lotus.
pub fn to_steps(lotus: &Lotus) -> String {
    let mut out = String::new();
    let first = lotus.base_edges()[0];
    let arrow = if lotus.vertex(first.to).arrowhead() { " arrowhead" } else { "" };
    out.push_str(&format!("lotus {} {}{arrow}\n", lotus.name(first.from), lotus.name(first.to)));
    let mut pending: Vec<BaseEdge> = lotus.base_edges()[1..].to_vec();
    let flush = |out: &mut String, upto: VertexId, pending: &mut Vec<BaseEdge>| {
        pending.retain(|b| {
            if b.to < upto {
                let cmd = if lotus.vertex(b.to).arrowhead() { "leaf" } else { "curvetta" };
                out.push_str(&format!("{cmd} {} {}\n", lotus.name(b.from), lotus.name(b.to)));
                false
            } else {
                true
            }
        });
    };
    for p in lotus.petals() {
        flush(&mut out, p.apex, &mut pending);
        out.push_str(&format!("petal {} {}\n", lotus.name(p.base[0]), lotus.name(p.base[1])));
    }
    flush(&mut out, usize::MAX, &mut pending);
    out
}
