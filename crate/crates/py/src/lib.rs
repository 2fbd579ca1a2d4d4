//! Python bindings: spec strings in, plain Python values out.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use skotch::adversary::estimate_forgery;
use skotch::plane::Plane;
use skotch::rng::Stream;
use skotch::scheme::Label;
use skotch::spec::{parse_adversary, parse_graph, parse_scheme};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Vertex count and edge list of a graph spec such as `"matching:m=10"`.
#[pyfunction]
fn graph(spec: &str) -> PyResult<(usize, Vec<(usize, usize)>)> {
    let (g, _) = parse_graph(spec).map_err(err)?;
    Ok((g.vertex_count(), g.edges()))
}

/// Declared label width of a scheme.
#[pyfunction]
fn label_bits(scheme: &str) -> PyResult<u32> {
    Ok(parse_scheme(scheme).map_err(err)?.label_bits())
}

/// Labels of every vertex, as hex strings.
#[pyfunction]
#[pyo3(signature = (scheme, graph, seed=0))]
fn label(scheme: &str, graph: &str, seed: u64) -> PyResult<Vec<String>> {
    let s = parse_scheme(scheme).map_err(err)?;
    let (g, _) = parse_graph(graph).map_err(err)?;
    let labels = s.encode_with(&g, &mut Stream::new(seed)).map_err(err)?;
    Ok(labels.iter().map(Label::to_hex).collect())
}

/// Decoder output on two hex labels.
#[pyfunction]
fn decode(scheme: &str, a: &str, b: &str) -> PyResult<bool> {
    let s = parse_scheme(scheme).map_err(err)?;
    let bits = s.label_bits();
    let parse = |h: &str| Label::from_hex(h, bits).ok_or_else(|| err(format!("not a {bits}-bit label: {h}")));
    Ok(s.decode(&parse(a)?, &parse(b)?))
}

/// Forgery-rate estimate as a dict with the CSV columns as keys.
#[pyfunction]
#[pyo3(signature = (scheme, graph, adv, trials, seed))]
fn attack<'py>(py: Python<'py>, scheme: &str, graph: &str, adv: &str, trials: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let s = parse_scheme(scheme).map_err(err)?;
    let (g, id) = parse_graph(graph).map_err(err)?;
    let a = parse_adversary(adv).map_err(err)?;
    let e = py.detach(|| estimate_forgery(&s, &g, &id, &*a, trials, seed)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("scheme", e.scheme)?;
    d.set_item("graph_family", e.graph_family)?;
    d.set_item("strategy", e.strategy)?;
    d.set_item("mode", e.mode.as_str())?;
    d.set_item("trials", e.trials)?;
    d.set_item("wins", e.wins)?;
    d.set_item("rate", e.rate)?;
    d.set_item("wilson_lo", e.wilson_lo)?;
    d.set_item("wilson_hi", e.wilson_hi)?;
    d.set_item("mean_queries", e.mean_queries)?;
    d.set_item("master_seed", e.master_seed)?;
    Ok(d)
}

/// Incidence lists of the projective plane of order `p`.
#[pyfunction]
fn plane(p: u64) -> PyResult<Vec<Vec<u64>>> {
    let pl = Plane::new(p).map_err(err)?;
    let n = pl.size();
    Ok((0..n).map(|i| (0..n).filter(|&j| pl.incident_idx(i, j)).collect()).collect())
}

#[pymodule]
fn pyskotch(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(graph, m)?)?;
    m.add_function(wrap_pyfunction!(label_bits, m)?)?;
    m.add_function(wrap_pyfunction!(label, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(attack, m)?)?;
    m.add_function(wrap_pyfunction!(plane, m)?)?;
    Ok(())
}
