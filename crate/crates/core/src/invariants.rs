//! Numerical invariants read off a lotus.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lotus::{edge_key, EdgeKey, Lotus, VertexId, VertexKind};

/// Log-discrepancy and order of vanishing of the initial curve `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LambdaOrd {
    pub lambda: u64,
    pub ord: u64,
}

fn add(a: u64, b: u64, what: &'static str) -> Result<u64> {
    a.checked_add(b).ok_or(Error::Overflow(what))
}

/// `(λ, ord_L)` at every vertex, indexed by vertex id.
pub fn lambda_ord(lotus: &Lotus) -> Result<Vec<LambdaOrd>> {
    let mut out: Vec<LambdaOrd> = lotus
        .vertices()
        .iter()
        .map(|v| LambdaOrd { lambda: 1, ord: u64::from(v.kind == VertexKind::Initial) })
        .collect();
    for p in lotus.petals() {
        let (a, b) = (out[p.base[0]], out[p.base[1]]);
        out[p.apex] = LambdaOrd {
            lambda: add(a.lambda, b.lambda, "log-discrepancy")?,
            ord: add(a.ord, b.ord, "order of vanishing")?,
        };
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    /// Lateral boundary edges.
    pub edges: Vec<EdgeKey>,
    /// Self-intersection of each exceptional vertex, in creation order.
    pub weights: Vec<(VertexId, i64)>,
}

/// Number of petals having `v` as a vertex.
pub fn petal_degree(lotus: &Lotus, v: VertexId) -> usize {
    lotus.petals().iter().filter(|p| p.apex == v || p.base.contains(&v)).count()
}

pub fn dual_graph(lotus: &Lotus) -> DualGraph {
    DualGraph {
        edges: lotus.lateral_boundary(),
        weights: lotus
            .exceptional_vertices()
            .into_iter()
            .map(|v| (v, -(petal_degree(lotus, v) as i64)))
            .collect(),
    }
}

/// Edge weights of a divisor supported on leaves of the lotus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weighting {
    weights: BTreeMap<EdgeKey, u64>,
}

impl Weighting {
    pub fn get(&self, a: VertexId, b: VertexId) -> u64 {
        self.weights.get(&edge_key(a, b)).copied().unwrap_or(0)
    }

    /// Weight of the base of each petal, in creation order: the multiplicities
    /// at the blown-up points.
    pub fn petal_bases(&self, lotus: &Lotus) -> Vec<u64> {
        lotus.petals().iter().map(|p| self.get(p.base[0], p.base[1])).collect()
    }

    /// Nonzero weights keyed by edge.
    pub fn nonzero(&self) -> impl Iterator<Item = (EdgeKey, u64)> + '_ {
        self.weights.iter().filter(|(_, &w)| w != 0).map(|(&k, &w)| (k, w))
    }

    /// Proximity equalities: each petal base weighs as much as the edges at its apex.
    pub fn satisfies_proximity(&self, lotus: &Lotus) -> bool {
        lotus.petals().iter().all(|p| {
            let around: u64 = lotus
                .edges()
                .iter()
                .filter(|e| e.ends.0 == p.apex || e.ends.1 == p.apex)
                .map(|e| self.get(e.ends.0, e.ends.1))
                .sum();
            around == self.get(p.base[0], p.base[1])
        })
    }
}

fn check_divisor(lotus: &Lotus, divisor: &[(VertexId, u64)]) -> Result<()> {
    if divisor.is_empty() {
        return Err(Error::Domain("empty set of branches".into()));
    }
    for (i, &(v, _)) in divisor.iter().enumerate() {
        if v >= lotus.vertices().len() || lotus.vertex(v).is_exceptional() {
            return Err(Error::Domain(format!("vertex {} is not a leaf", lotus.name(v))));
        }
        if divisor[..i].iter().any(|&(w, _)| w == v) {
            return Err(Error::Domain(format!("branch {} listed twice", lotus.name(v))));
        }
    }
    Ok(())
}

/// Multiplicities of a divisor `Σ m_i A_i` whose components are leaves of the lotus.
/// Each component puts its coefficient on its boundary edge; petal bases are then
/// filled from the last petal to the first by summing the edges at the apex.
pub fn weighting(lotus: &Lotus, divisor: &[(VertexId, u64)]) -> Result<Weighting> {
    check_divisor(lotus, divisor)?;
    let mut weights: BTreeMap<EdgeKey, u64> = BTreeMap::new();
    for &(v, m) in divisor {
        let e = lotus.leaf_edge(v)?;
        *weights.entry(e).or_insert(0) += m;
    }
    let mut incident: Vec<Vec<EdgeKey>> = vec![Vec::new(); lotus.vertices().len()];
    for e in lotus.edges() {
        incident[e.ends.0].push(e.ends);
        incident[e.ends.1].push(e.ends);
    }
    for p in lotus.petals().iter().rev() {
        let mut w = 0u64;
        for e in &incident[p.apex] {
            w = add(w, weights.get(e).copied().unwrap_or(0), "multiplicity")?;
        }
        weights.insert(edge_key(p.base[0], p.base[1]), w);
    }
    Ok(Weighting { weights })
}

/// Multiplicities of the reduced divisor formed by `branches`.
pub fn multiplicities(lotus: &Lotus, branches: &[VertexId]) -> Result<Weighting> {
    let divisor: Vec<(VertexId, u64)> = branches.iter().map(|&v| (v, 1)).collect();
    weighting(lotus, &divisor)
}

/// Orders of vanishing of a divisor along every vertex (0 on leaves).
pub fn orders_of_vanishing_weighted(lotus: &Lotus, divisor: &[(VertexId, u64)]) -> Result<Vec<u64>> {
    let w = weighting(lotus, divisor)?;
    let mut ord = vec![0u64; lotus.vertices().len()];
    for p in lotus.petals() {
        let s = add(ord[p.base[0]], ord[p.base[1]], "order of vanishing")?;
        ord[p.apex] = add(s, w.get(p.base[0], p.base[1]), "order of vanishing")?;
    }
    Ok(ord)
}

pub fn orders_of_vanishing(lotus: &Lotus, branches: &[VertexId]) -> Result<Vec<u64>> {
    let divisor: Vec<(VertexId, u64)> = branches.iter().map(|&v| (v, 1)).collect();
    orders_of_vanishing_weighted(lotus, &divisor)
}

fn distinct(lotus: &Lotus, a: VertexId, b: VertexId) -> Result<()> {
    if a == b {
        return Err(Error::Domain(format!("self-intersection of {} is infinite", lotus.name(a))));
    }
    Ok(())
}

/// `(A·B)` as the sum over blown-up points of products of multiplicities.
pub fn intersection_via_multiplicities(lotus: &Lotus, a: VertexId, b: VertexId) -> Result<u64> {
    distinct(lotus, a, b)?;
    let wa = multiplicities(lotus, &[a])?.petal_bases(lotus);
    let wb = multiplicities(lotus, &[b])?.petal_bases(lotus);
    let mut total = 0u64;
    for (x, y) in wa.into_iter().zip(wb) {
        let prod = x.checked_mul(y).ok_or(Error::Overflow("intersection number"))?;
        total = add(total, prod, "intersection number")?;
    }
    Ok(total)
}

/// The exceptional vertex carrying the boundary edge of a leaf.
pub fn attaching_vertex(lotus: &Lotus, leaf: VertexId) -> Result<VertexId> {
    let (x, y) = lotus.leaf_edge(leaf)?;
    let e = if x == leaf { y } else { x };
    if !lotus.vertex(e).is_exceptional() {
        return Err(Error::Domain(format!("{} is not attached to an exceptional vertex", lotus.name(leaf))));
    }
    Ok(e)
}

/// `(A·B)` as the order of vanishing of `A` along the divisor on which `B` lands.
pub fn intersection_via_order(lotus: &Lotus, a: VertexId, b: VertexId) -> Result<u64> {
    distinct(lotus, a, b)?;
    let e = attaching_vertex(lotus, b)?;
    Ok(orders_of_vanishing(lotus, &[a])?[e])
}

pub fn delta(lotus: &Lotus, branches: &[VertexId]) -> Result<u64> {
    let w = multiplicities(lotus, branches)?;
    let mut total = 0u64;
    for m in w.petal_bases(lotus) {
        let t = m.checked_mul(m.saturating_sub(1)).ok_or(Error::Overflow("delta"))? / 2;
        total = add(total, t, "delta")?;
    }
    Ok(total)
}

/// `2δ - r + 1`; in positive characteristic this is only a lower bound for μ.
pub fn milnor(lotus: &Lotus, branches: &[VertexId]) -> Result<u64> {
    let d = delta(lotus, branches)?;
    let two_d = d.checked_mul(2).ok_or(Error::Overflow("Milnor number"))?;
    (two_d + 1)
        .checked_sub(branches.len() as u64)
        .ok_or_else(|| Error::Domain("2δ - r + 1 is negative".into()))
}
