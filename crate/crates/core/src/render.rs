//! DOT, TikZ and SVG output for lotuses, dual graphs, proximity graphs and trees.

use std::fmt::Write as _;

use crate::ewtree::{EwTree, NodeId};
use crate::invariants::dual_graph;
use crate::lotus::{Lotus, VertexId, VertexKind};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Dual graph as an undirected DOT graph; exceptional vertices carry a `weight` attribute.
pub fn dual_graph_dot(lotus: &Lotus) -> String {
    let g = dual_graph(lotus);
    let mut s = String::from("graph dual {\n");
    for &(v, w) in &g.weights {
        let _ = writeln!(s, "  {} [weight={w}, label={}];", quote(lotus.name(v)), quote(&format!("{} ({w})", lotus.name(v))));
    }
    for &(a, b) in &g.edges {
        let _ = writeln!(s, "  {} -- {};", quote(lotus.name(a)), quote(lotus.name(b)));
    }
    s.push_str("}\n");
    s
}

/// Proximity graph: an arc from each exceptional vertex to the ones it is proximate to.
pub fn proximity_dot(lotus: &Lotus) -> String {
    let g = lotus.proximity_graph();
    let mut s = String::from("digraph proximity {\n");
    for &v in &g.vertices {
        let _ = writeln!(s, "  {};", quote(lotus.name(v)));
    }
    for &(a, b) in &g.arcs {
        let _ = writeln!(s, "  {} -> {};", quote(lotus.name(a)), quote(lotus.name(b)));
    }
    s.push_str("}\n");
    s
}

/// The lotus as a DOT graph: petal edges plain, base edges to leaves bold.
pub fn lotus_dot(lotus: &Lotus) -> String {
    let mut s = String::from("graph lotus {\n");
    for (v, vert) in lotus.vertices().iter().enumerate() {
        let shape = match vert.kind {
            VertexKind::Exceptional => "circle",
            VertexKind::Branch => "none",
            _ => "box",
        };
        let _ = writeln!(s, "  {} [shape={shape}];", quote(lotus.name(v)));
    }
    for e in lotus.edges() {
        let (a, b) = e.ends;
        let leafward = [a, b].iter().any(|&x| lotus.vertex(x).kind == VertexKind::Branch);
        let attr = if leafward { " [dir=forward, style=bold]" } else { "" };
        let (from, to) = if lotus.vertex(a).kind == VertexKind::Branch { (b, a) } else { (a, b) };
        let _ = writeln!(s, "  {} -- {}{attr};", quote(lotus.name(from)), quote(lotus.name(to)));
    }
    s.push_str("}\n");
    s
}

fn tree_node_name(tree: &EwTree, v: NodeId) -> String {
    if tree.is_leaf(v) || v == tree.root() {
        tree.label(v)
    } else {
        format!("n{v}")
    }
}

/// The tree as a DOT digraph from the root; interior nodes show exponent and incoming index.
pub fn tree_dot(tree: &EwTree) -> String {
    let mut s = String::from("digraph tree {\n");
    for v in tree.preorder() {
        let node = tree.node(v);
        let label = if tree.is_leaf(v) || v == tree.root() {
            tree.label(v)
        } else {
            node.exponent.to_string()
        };
        let _ = writeln!(s, "  {} [label={}];", quote(&tree_node_name(tree, v)), quote(&label));
    }
    for v in tree.preorder() {
        if let Some(p) = tree.node(v).parent {
            let _ = writeln!(
                s,
                "  {} -> {} [label={}];",
                quote(&tree_node_name(tree, p)),
                quote(&tree_node_name(tree, v)),
                quote(&tree.node(v).index.to_string())
            );
        }
    }
    s.push_str("}\n");
    s
}

/// Indented text view: one line per node, `exponent [index]`.
pub fn tree_text(tree: &EwTree) -> String {
    fn walk(tree: &EwTree, v: NodeId, depth: usize, out: &mut String) {
        let node = tree.node(v);
        let pad = "  ".repeat(depth);
        if v == tree.root() {
            let _ = writeln!(out, "{pad}{}", tree.label(v));
        } else if tree.is_leaf(v) {
            let _ = writeln!(out, "{pad}{} [{}] (leaf index {})", tree.label(v), node.index, tree.leaf_index(v));
        } else {
            let _ = writeln!(out, "{pad}{} [{}]", node.exponent, node.index);
        }
        for &c in &node.children {
            walk(tree, c, depth + 1, out);
        }
    }
    let mut out = String::new();
    walk(tree, tree.root(), 0, &mut out);
    out
}

/// Planar positions for drawing. `L` sits at `(1, 0)`, the first leaf at `(-1, 0)`, and each apex
/// is pushed off the midpoint of its base, away from the petal the base already bounds.
pub fn layout(lotus: &Lotus) -> Vec<(f64, f64)> {
    let n = lotus.vertices().len();
    let mut pos: Vec<Option<(f64, f64)>> = vec![None; n];
    pos[lotus.initial()] = Some((1.0, 0.0));
    pos[1] = Some((-1.0, 0.0));
    let mut triangles: Vec<[VertexId; 3]> = Vec::new();
    let centroid = |pos: &[Option<(f64, f64)>]| {
        let placed: Vec<(f64, f64)> = pos.iter().flatten().copied().collect();
        let k = placed.len() as f64;
        (placed.iter().map(|p| p.0).sum::<f64>() / k, placed.iter().map(|p| p.1).sum::<f64>() / k)
    };
    let away = |from: (f64, f64), reference: (f64, f64)| {
        let (dx, dy) = (from.0 - reference.0, from.1 - reference.1);
        let len = (dx * dx + dy * dy).sqrt();
        if len < 1e-9 {
            (0.0, 1.0)
        } else {
            (dx / len, dy / len)
        }
    };
    let place_leaves = |pos: &mut Vec<Option<(f64, f64)>>, triangles: &[[VertexId; 3]]| {
        for b in lotus.base_edges() {
            if pos[b.to].is_none() {
                if let Some(p) = pos[b.from] {
                    // point away from the petals already touching the attaching vertex
                    let near: Vec<(f64, f64)> = triangles
                        .iter()
                        .filter(|t| t.contains(&b.from))
                        .flat_map(|t| t.iter().filter_map(|&x| pos[x]))
                        .collect();
                    let reference = if near.is_empty() {
                        centroid(pos)
                    } else {
                        let k = near.len() as f64;
                        (near.iter().map(|q| q.0).sum::<f64>() / k, near.iter().map(|q| q.1).sum::<f64>() / k)
                    };
                    let d = away(p, reference);
                    pos[b.to] = Some((p.0 + 1.2 * d.0, p.1 + 1.2 * d.1));
                }
            }
        }
    };
    for petal in lotus.petals() {
        place_leaves(&mut pos, &triangles);
        let [a, b] = petal.base;
        let (pa, pb) = (pos[a].unwrap_or((0.0, 0.0)), pos[b].unwrap_or((0.0, 0.0)));
        let mid = ((pa.0 + pb.0) / 2.0, (pa.1 + pb.1) / 2.0);
        let (dx, dy) = (pb.0 - pa.0, pb.1 - pa.1);
        let len = (dx * dx + dy * dy).sqrt().max(1e-9);
        let mut normal = (-dy / len, dx / len);
        let opposite = triangles
            .iter()
            .find(|t| t.contains(&a) && t.contains(&b))
            .and_then(|t| t.iter().find(|&&x| x != a && x != b))
            .and_then(|&x| pos[x]);
        let reference = opposite.unwrap_or_else(|| centroid(&pos));
        if (reference.0 - mid.0) * normal.0 + (reference.1 - mid.1) * normal.1 >= 0.0 {
            normal = (-normal.0, -normal.1);
        }
        let h = 0.75 * len;
        pos[petal.apex] = Some((mid.0 + h * normal.0, mid.1 + h * normal.1));
        triangles.push([a, b, petal.apex]);
    }
    place_leaves(&mut pos, &triangles);
    pos.into_iter().map(|p| p.unwrap_or((0.0, 0.0))).collect()
}

fn tikz_name(_lotus: &Lotus, v: VertexId) -> String {
    format!("v{v}")
}

fn tex_label(label: &str) -> String {
    let split = label.find(|c: char| c.is_ascii_digit());
    match split {
        Some(i) if i > 0 => format!("${}_{{{}}}$", &label[..i], &label[i..]),
        _ => format!("${label}$"),
    }
}

/// TikZ picture: filled petals, plain edges, arrows on base edges towards branches.
pub fn lotus_tikz(lotus: &Lotus) -> String {
    let pos = layout(lotus);
    let mut s = String::from("\\begin{tikzpicture}[scale=1.5]\n");
    for (v, p) in pos.iter().enumerate() {
        let _ = writeln!(s, "  \\coordinate ({}) at ({:.3},{:.3});", tikz_name(lotus, v), p.0, p.1);
    }
    for petal in lotus.petals() {
        let [a, b] = petal.base;
        let _ = writeln!(
            s,
            "  \\fill[pink!60, draw=black] ({}) -- ({}) -- ({}) -- cycle;",
            tikz_name(lotus, a),
            tikz_name(lotus, b),
            tikz_name(lotus, petal.apex)
        );
    }
    for b in lotus.base_edges() {
        let tip = if lotus.vertex(b.to).arrowhead() { "->" } else { "-" };
        let _ = writeln!(s, "  \\draw[{tip}, thick] ({}) -- ({});", tikz_name(lotus, b.from), tikz_name(lotus, b.to));
    }
    for (v, vert) in lotus.vertices().iter().enumerate() {
        if vert.kind != VertexKind::Branch {
            let _ = writeln!(s, "  \\fill ({}) circle (1.2pt);", tikz_name(lotus, v));
        }
        let _ = writeln!(s, "  \\node[above right] at ({}) {{{}}};", tikz_name(lotus, v), tex_label(&vert.label));
    }
    s.push_str("\\end{tikzpicture}\n");
    s
}

/// Standalone SVG with the same conventions as [`lotus_tikz`].
pub fn lotus_svg(lotus: &Lotus) -> String {
    let pos = layout(lotus);
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in &pos {
        x0 = x0.min(p.0);
        y0 = y0.min(p.1);
        x1 = x1.max(p.0);
        y1 = y1.max(p.1);
    }
    let scale = 80.0;
    let margin = 40.0;
    let map = |p: (f64, f64)| ((p.0 - x0) * scale + margin, (y1 - p.1) * scale + margin);
    let (w, h) = ((x1 - x0) * scale + 2.0 * margin, (y1 - y0) * scale + 2.0 * margin);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.1} {h:.1}\">"
    );
    s.push_str(
        "  <defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"8\" markerHeight=\"8\" orient=\"auto\">\
<path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n",
    );
    for petal in lotus.petals() {
        let pts: Vec<String> = [petal.base[0], petal.base[1], petal.apex]
            .iter()
            .map(|&v| {
                let (x, y) = map(pos[v]);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let _ = writeln!(s, "  <polygon points=\"{}\" fill=\"#f7c6d9\" stroke=\"black\"/>", pts.join(" "));
    }
    for b in lotus.base_edges() {
        let (xa, ya) = map(pos[b.from]);
        let (xb, yb) = map(pos[b.to]);
        let marker = if lotus.vertex(b.to).arrowhead() { " marker-end=\"url(#arrow)\"" } else { "" };
        let _ = writeln!(
            s,
            "  <line x1=\"{xa:.1}\" y1=\"{ya:.1}\" x2=\"{xb:.1}\" y2=\"{yb:.1}\" stroke=\"black\" stroke-width=\"2\"{marker}/>"
        );
    }
    for (v, vert) in lotus.vertices().iter().enumerate() {
        let (x, y) = map(pos[v]);
        if vert.kind != VertexKind::Branch {
            let _ = writeln!(s, "  <circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"3\"/>");
        }
        let _ = writeln!(s, "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{}</text>", x + 5.0, y - 5.0, vert.label);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn cusp_outputs() {
        let l = fixtures::cusp();
        let tikz = lotus_tikz(&l);
        assert_eq!(tikz.matches("\\fill[pink").count(), 3);
        assert_eq!(tikz.matches("\\draw[->").count(), 1);
        let dot = proximity_dot(&l);
        assert_eq!(dot.matches("->").count(), 3);
        let dual = dual_graph_dot(&l);
        for w in ["weight=-1", "weight=-2", "weight=-3"] {
            assert!(dual.contains(w), "{dual}");
        }
        let svg = lotus_svg(&l);
        assert_eq!(svg.matches("<polygon").count(), 3);
    }
}
