//! Python bindings. Rationals cross the boundary as strings such as `"13/6"`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use lotus_core::report::{build_report, detect_input, report_text, Model, TrunkChoice};
use lotus_core::{arith, ewtree, invariants, lotus, puiseux, render};
use lotus_core::{ExtRational, NpSeries, Rational};

fn err(e: lotus_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Rational> {
    s.trim().parse().map_err(err)
}

fn trunk_choice(trunks: &str) -> PyResult<TrunkChoice> {
    match trunks {
        "canonical" => Ok(TrunkChoice::Canonical),
        "all" => Ok(TrunkChoice::All),
        other => other
            .strip_prefix("index:")
            .and_then(|k| k.parse().ok())
            .map(TrunkChoice::Index)
            .ok_or_else(|| PyValueError::new_err(format!("invalid trunk choice {other:?}"))),
    }
}

fn model(text: &str, trunks: &str, complete: bool) -> PyResult<Model> {
    Model::build(detect_input(text).map_err(err)?, trunk_choice(trunks)?, complete).map_err(err)
}

/// A lotus: petals glued along a growing boundary, with curvetta and branch leaves.
#[pyclass(name = "Lotus", module = "pylotus")]
struct PyLotus {
    inner: lotus_core::Lotus,
}

#[pymethods]
impl PyLotus {
    /// Parse a step script (`lotus L L1`, `petal A B`, `curvetta V N`, `leaf V N`).
    #[staticmethod]
    fn from_steps(text: &str) -> PyResult<Self> {
        Ok(PyLotus { inner: lotus::parse_steps(text).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyLotus { inner: lotus_core::Lotus::from_json(text).map_err(err)? })
    }

    /// The Newton lotus of a set of slopes.
    #[staticmethod]
    fn newton(slopes: Vec<String>) -> PyResult<Self> {
        let exps = slopes.iter().map(|s| s.parse::<ExtRational>().map_err(err)).collect::<PyResult<Vec<_>>>()?;
        Ok(PyLotus { inner: lotus::newton_lotus(&exps).map_err(err)?.lotus })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_steps(&self) -> String {
        lotus::to_steps(&self.inner)
    }

    fn vertices(&self) -> Vec<String> {
        (0..self.inner.vertices().len()).map(|v| self.inner.name(v).to_string()).collect()
    }

    /// Petals as `(base, base, apex)` label triples, in creation order.
    fn petals(&self) -> Vec<(String, String, String)> {
        let n = |v| self.inner.name(v).to_string();
        self.inner.petals().iter().map(|p| (n(p.base[0]), n(p.base[1]), n(p.apex))).collect()
    }

    fn branches(&self) -> Vec<String> {
        self.inner.branch_leaves().into_iter().map(|v| self.inner.name(v).to_string()).collect()
    }

    /// `(λ, ord_L)` for each exceptional vertex, keyed by label.
    fn lambda_ord(&self) -> PyResult<Vec<(String, u64, u64)>> {
        let lo = invariants::lambda_ord(&self.inner).map_err(err)?;
        Ok(self
            .inner
            .exceptional_vertices()
            .into_iter()
            .map(|v| (self.inner.name(v).to_string(), lo[v].lambda, lo[v].ord))
            .collect())
    }

    /// Self-intersections of the exceptional divisors.
    fn dual_graph_weights(&self) -> Vec<(String, i64)> {
        invariants::dual_graph(&self.inner)
            .weights
            .into_iter()
            .map(|(v, w)| (self.inner.name(v).to_string(), w))
            .collect()
    }

    /// Multiplicities at the blown-up points, one per petal.
    #[pyo3(signature = (branches=None))]
    fn multiplicities(&self, branches: Option<Vec<String>>) -> PyResult<Vec<u64>> {
        let ids = self.branch_ids(branches)?;
        Ok(invariants::multiplicities(&self.inner, &ids).map_err(err)?.petal_bases(&self.inner))
    }

    fn intersection(&self, a: &str, b: &str) -> PyResult<u64> {
        let (a, b) = (self.inner.vertex_id(a).map_err(err)?, self.inner.vertex_id(b).map_err(err)?);
        invariants::intersection_via_multiplicities(&self.inner, a, b).map_err(err)
    }

    #[pyo3(signature = (branches=None))]
    fn delta(&self, branches: Option<Vec<String>>) -> PyResult<u64> {
        invariants::delta(&self.inner, &self.branch_ids(branches)?).map_err(err)
    }

    #[pyo3(signature = (branches=None))]
    fn milnor(&self, branches: Option<Vec<String>>) -> PyResult<u64> {
        invariants::milnor(&self.inner, &self.branch_ids(branches)?).map_err(err)
    }

    fn semigroup(&self, branch: &str) -> PyResult<(Vec<u64>, bool)> {
        let sg = ewtree::semigroup_from_lotus(&self.inner, self.inner.vertex_id(branch).map_err(err)?).map_err(err)?;
        Ok((sg.generators, sg.minimal))
    }

    fn tree(&self) -> PyResult<PyEwTree> {
        Ok(PyEwTree { inner: ewtree::ew_from_lotus(&self.inner).map_err(err)? })
    }

    fn is_isomorphic(&self, other: &PyLotus) -> bool {
        self.inner.is_isomorphic(&other.inner)
    }

    /// Drawing as `dot`, `tikz` or `svg`; `dual` and `proximity` graphs are dot only.
    #[pyo3(signature = (format="dot", graph="lotus"))]
    fn draw(&self, format: &str, graph: &str) -> PyResult<String> {
        match (graph, format) {
            ("lotus", "dot") => Ok(render::lotus_dot(&self.inner)),
            ("lotus", "tikz") => Ok(render::lotus_tikz(&self.inner)),
            ("lotus", "svg") => Ok(render::lotus_svg(&self.inner)),
            ("dual", "dot") => Ok(render::dual_graph_dot(&self.inner)),
            ("proximity", "dot") => Ok(render::proximity_dot(&self.inner)),
            _ => Err(PyValueError::new_err(format!("cannot draw {graph} as {format}"))),
        }
    }

    fn __len__(&self) -> usize {
        self.inner.petals().len()
    }

    fn __repr__(&self) -> String {
        format!("Lotus({} petals, branches {:?})", self.inner.petals().len(), self.branches())
    }
}

impl PyLotus {
    fn branch_ids(&self, branches: Option<Vec<String>>) -> PyResult<Vec<usize>> {
        match branches {
            None => Ok(self.inner.branch_leaves()),
            Some(names) => names.iter().map(|n| self.inner.vertex_id(n).map_err(err)).collect(),
        }
    }
}

/// An Eggers-Wall tree relative to the initial curve.
#[pyclass(name = "EwTree", module = "pylotus")]
struct PyEwTree {
    inner: lotus_core::EwTree,
}

#[pymethods]
impl PyEwTree {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyEwTree { inner: lotus_core::EwTree::from_json(text).map_err(err)? })
    }

    /// Tree of a family of branches given as `(label, series)` pairs.
    #[staticmethod]
    #[pyo3(signature = (branches, char=0))]
    fn from_series(branches: Vec<(String, String)>, char: u64) -> PyResult<Self> {
        let parsed = branches
            .into_iter()
            .map(|(l, s)| Ok((l, NpSeries::parse(&s, char).map_err(err)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyEwTree { inner: puiseux::ew_from_series("L", &parsed).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn leaves(&self) -> Vec<String> {
        self.inner.leaves().into_iter().map(|v| self.inner.label(v)).collect()
    }

    fn tripod(&self, a: &str, b: &str) -> PyResult<u64> {
        let (a, b) = (self.inner.leaf_id(a).map_err(err)?, self.inner.leaf_id(b).map_err(err)?);
        self.inner.tripod_intersection(a, b).map_err(err)
    }

    /// Contact complexity where the two leaves separate.
    fn contact(&self, a: &str, b: &str) -> PyResult<String> {
        let (a, b) = (self.inner.leaf_id(a).map_err(err)?, self.inner.leaf_id(b).map_err(err)?);
        Ok(self.inner.contact_complexity(self.inner.lca(a, b)).to_string())
    }

    fn semigroup(&self, leaf: &str) -> PyResult<Vec<u64>> {
        self.inner.semigroup(self.inner.leaf_id(leaf).map_err(err)?).map_err(err)
    }

    fn characteristic_exponents(&self, leaf: &str) -> PyResult<Vec<String>> {
        let id = self.inner.leaf_id(leaf).map_err(err)?;
        Ok(self.inner.characteristic_exponents(id).iter().map(|e| e.to_string()).collect())
    }

    fn trunk_decomposition_count(&self) -> PyResult<u64> {
        self.inner.trunk_decomposition_count().map_err(err)
    }

    /// The lotus of the `k`-th trunk decomposition; 0 is canonical.
    #[pyo3(signature = (k=0))]
    fn lotus(&self, k: u64) -> PyResult<PyLotus> {
        let dec = self.inner.trunk_decomposition(k).map_err(err)?;
        Ok(PyLotus { inner: self.inner.lotus_from_trunks(&dec).map_err(err)? })
    }

    fn complete(&self) -> PyEwTree {
        PyEwTree { inner: self.inner.complete() }
    }

    fn is_complete(&self) -> bool {
        self.inner.is_complete()
    }

    fn is_isomorphic(&self, other: &PyEwTree) -> bool {
        self.inner.is_isomorphic(&other.inner)
    }

    fn __str__(&self) -> String {
        render::tree_text(&self.inner)
    }
}

/// Invariant report of a curve file, tree JSON, lotus JSON or step script, as JSON text.
#[pyfunction]
#[pyo3(signature = (text, check=false, branches=None, trunks="canonical", complete=false))]
fn invariants_json(
    text: &str,
    check: bool,
    branches: Option<Vec<String>>,
    trunks: &str,
    complete: bool,
) -> PyResult<String> {
    let m = model(text, trunks, complete)?;
    let r = build_report(&m, 0, branches.as_deref(), check).map_err(err)?;
    serde_json::to_string_pretty(&r).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// The same report rendered as plain text.
#[pyfunction]
#[pyo3(signature = (text, check=false, branches=None, trunks="canonical", complete=false))]
fn invariants_text(
    text: &str,
    check: bool,
    branches: Option<Vec<String>>,
    trunks: &str,
    complete: bool,
) -> PyResult<String> {
    let m = model(text, trunks, complete)?;
    Ok(report_text(&build_report(&m, 0, branches.as_deref(), check).map_err(err)?))
}

#[pyfunction]
fn continued_fraction(q: &str) -> PyResult<Vec<String>> {
    Ok(arith::cf_expand(&rational(q)?).map_err(err)?.terms().iter().map(|t| t.to_string()).collect())
}

#[pyfunction]
fn wedge(a: &str, b: &str) -> PyResult<String> {
    Ok(arith::wedge(&rational(a)?, &rational(b)?).map_err(err)?.to_string())
}

#[pyfunction]
fn semigroup_from_exponents(exponents: Vec<String>) -> PyResult<Vec<u64>> {
    let exps = exponents.iter().map(|e| rational(e)).collect::<PyResult<Vec<_>>>()?;
    ewtree::semigroup_from_char_exponents(&exps).map_err(err)
}

/// Intersection number of two branches from their Newton-Puiseux series.
#[pyfunction]
#[pyo3(signature = (a, b, char=0))]
fn intersection(a: &str, b: &str, char: u64) -> PyResult<u64> {
    let (a, b) = (NpSeries::parse(a, char).map_err(err)?, NpSeries::parse(b, char).map_err(err)?);
    puiseux::intersection_oracle(&a, &b).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (series, char=0))]
fn characteristic_exponents(series: &str, char: u64) -> PyResult<Vec<String>> {
    Ok(NpSeries::parse(series, char).map_err(err)?.char_exponents().iter().map(|e| e.to_string()).collect())
}

#[pymodule]
fn pylotus(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLotus>()?;
    m.add_class::<PyEwTree>()?;
    m.add_function(wrap_pyfunction!(invariants_json, m)?)?;
    m.add_function(wrap_pyfunction!(invariants_text, m)?)?;
    m.add_function(wrap_pyfunction!(continued_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(wedge, m)?)?;
    m.add_function(wrap_pyfunction!(semigroup_from_exponents, m)?)?;
    m.add_function(wrap_pyfunction!(intersection, m)?)?;
    m.add_function(wrap_pyfunction!(characteristic_exponents, m)?)?;
    Ok(())
}
