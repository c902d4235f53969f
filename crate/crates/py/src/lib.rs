//! Python module `lower_envelope`.
//!
//! Coordinates cross the boundary as `fractions.Fraction`. Inputs may be
//! `int`, `Fraction`, `str` (`"3/4"`, `"-1.25"`) or `float`; floats are read
//! through their decimal `str()`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use envelope_core::chain::{Edge, EdgeKind, Envelope};
use envelope_core::formats::{self, EnvelopeDoc};
use envelope_core::merge::{self, MergeCounters, MergeOutcome};
use envelope_core::solver::{self, RoundOutcome, RunReport, SegmentSet};
use envelope_core::svg::render_svg;
use envelope_core::workload::{self, GenKind, GenSpec};
use envelope_core::{Point, Rational, Segment};

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = obj.str()?.to_string();
    text.parse().map_err(value_error)
}

fn to_fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((r.to_fraction_string(),))
}

fn point<'py>(py: Python<'py>, p: &Point) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    Ok((to_fraction(py, &p.x)?, to_fraction(py, &p.y)?))
}

fn counters_dict<'py>(py: Python<'py>, c: &MergeCounters) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("cursor_increments", c.cursor_increments)?;
    d.set_item("intersection_tests", c.intersection_tests)?;
    d.set_item("vertices_emitted", c.vertices_emitted)?;
    d.set_item("restarts", c.restarts)?;
    d.set_item("chains", c.chains)?;
    d.set_item("total_input_vertices", c.total_input_vertices)?;
    Ok(d)
}

fn report_dict<'py>(py: Python<'py>, r: &RunReport) -> PyResult<Bound<'py, PyDict>> {
    let rounds = PyList::empty(py);
    for round in &r.iterations {
        let d = PyDict::new(py);
        d.set_item("t", round.t)?;
        d.set_item("kappa", round.kappa)?;
        d.set_item("groups", round.groups)?;
        d.set_item(
            "outcome",
            match round.outcome {
                RoundOutcome::Aborted => "aborted",
                RoundOutcome::Completed => "completed",
            },
        )?;
        d.set_item("counters", counters_dict(py, &round.counters)?)?;
        rounds.append(d)?;
    }
    let d = PyDict::new(py);
    d.set_item("iterations", rounds)?;
    d.set_item("final_k", r.final_k)?;
    d.set_item("totals", counters_dict(py, &r.totals)?)?;
    d.set_item("wall_time_s", r.wall_time.as_secs_f64())?;
    Ok(d)
}

/// A set of non-vertical segments; ids follow list order.
#[pyclass(
    name = "SegmentSet",
    module = "lower_envelope",
    frozen,
    eq,
    skip_from_py_object
)]
#[derive(Clone, PartialEq)]
struct PySegmentSet {
    inner: SegmentSet,
}

type Quad<'py> = (
    Bound<'py, PyAny>,
    Bound<'py, PyAny>,
    Bound<'py, PyAny>,
    Bound<'py, PyAny>,
);

#[pymethods]
impl PySegmentSet {
    /// `segments` is a list of `(x1, y1, x2, y2)`.
    #[new]
    fn new(segments: Vec<Quad<'_>>) -> PyResult<Self> {
        let mut out = Vec::with_capacity(segments.len());
        for (id, (x1, y1, x2, y2)) in segments.iter().enumerate() {
            let p = Point::new(to_rational(x1)?, to_rational(y1)?);
            let q = Point::new(to_rational(x2)?, to_rational(y2)?);
            out.push(Segment::new(p, q, id).map_err(value_error)?);
        }
        Ok(PySegmentSet {
            inner: SegmentSet::new(out).map_err(value_error)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PySegmentSet {
            inner: formats::parse_segments(text).map_err(value_error)?,
        })
    }

    fn to_text(&self) -> String {
        formats::print_segments(&self.inner)
    }

    /// Segments as `(x1, y1, x2, y2)` with `x1 < x2`.
    fn segments<'py>(&self, py: Python<'py>) -> PyResult<Vec<Quad<'py>>> {
        self.inner
            .segments()
            .iter()
            .map(|s| {
                let (x1, y1) = point(py, &s.a)?;
                let (x2, y2) = point(py, &s.b)?;
                Ok((x1, y1, x2, y2))
            })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("SegmentSet(<{} segments>)", self.inner.len())
    }
}

/// An x-monotone chain: vertices plus `(kind, source)` edges.
#[pyclass(
    name = "Envelope",
    module = "lower_envelope",
    frozen,
    eq,
    skip_from_py_object
)]
#[derive(Clone, PartialEq)]
struct PyEnvelope {
    inner: Envelope,
}

#[pymethods]
impl PyEnvelope {
    /// Builds a chain from `(x, y)` vertices and `(kind, source)` edges,
    /// where `kind` is `"solid"` or `"gap"`.
    #[new]
    fn new(
        vertices: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>,
        edges: Vec<(String, Option<usize>)>,
    ) -> PyResult<Self> {
        let vs = vertices
            .iter()
            .map(|(x, y)| Ok(Point::new(to_rational(x)?, to_rational(y)?)))
            .collect::<PyResult<Vec<_>>>()?;
        let es = edges
            .into_iter()
            .map(|(kind, source)| match (kind.as_str(), source) {
                ("solid", Some(id)) => Ok(Edge::solid(id)),
                ("solid", None) => Ok(Edge::connector()),
                ("gap", None) => Ok(Edge::gap()),
                _ => Err(value_error(format!("bad edge ({kind:?}, {source:?})"))),
            })
            .collect::<PyResult<Vec<_>>>()?;
        let inner = Envelope::new(vs, es).map_err(|ds| {
            value_error(
                ds.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })?;
        Ok(PyEnvelope { inner })
    }

    fn vertices<'py>(
        &self,
        py: Python<'py>,
    ) -> PyResult<Vec<(Bound<'py, PyAny>, Bound<'py, PyAny>)>> {
        self.inner.vertices().iter().map(|p| point(py, p)).collect()
    }

    fn edges(&self) -> Vec<(&'static str, Option<usize>)> {
        self.inner
            .edges()
            .iter()
            .map(|e| {
                let kind = match e.kind {
                    EdgeKind::Solid => "solid",
                    EdgeKind::Gap => "gap",
                };
                (kind, e.source)
            })
            .collect()
    }

    fn edge_sources(&self) -> Vec<Option<usize>> {
        self.inner.edge_sources()
    }

    /// Lowest envelope value at `x`, or `None` where undefined.
    fn eval<'py>(
        &self,
        py: Python<'py>,
        x: &Bound<'py, PyAny>,
    ) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.inner
            .eval(&to_rational(x)?)
            .map(|y| to_fraction(py, &y))
            .transpose()
    }

    fn to_json(&self) -> String {
        EnvelopeDoc::new(&self.inner).to_json()
    }

    #[pyo3(signature = (segments=None))]
    fn to_svg(&self, segments: Option<PyRef<'_, PySegmentSet>>) -> String {
        render_svg(&self.inner, segments.as_ref().map(|s| &s.inner))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Envelope(<{} vertices>)", self.inner.len())
    }
}

impl From<Envelope> for PyEnvelope {
    fn from(inner: Envelope) -> Self {
        PyEnvelope { inner }
    }
}

#[pyfunction]
fn envelope_bruteforce(py: Python<'_>, segments: PyRef<'_, PySegmentSet>) -> PyResult<PyEnvelope> {
    let set = &segments.inner;
    py.detach(|| solver::envelope_bruteforce(set))
        .map(Into::into)
        .map_err(value_error)
}

#[pyfunction]
fn envelope_divide_conquer<'py>(
    py: Python<'py>,
    segments: PyRef<'_, PySegmentSet>,
) -> PyResult<(PyEnvelope, Bound<'py, PyDict>)> {
    let set = &segments.inner;
    let (env, counters) = py
        .detach(|| solver::envelope_divide_conquer(set))
        .map_err(value_error)?;
    Ok((env.into(), counters_dict(py, &counters)?))
}

#[pyfunction]
fn envelope_output_sensitive<'py>(
    py: Python<'py>,
    segments: PyRef<'_, PySegmentSet>,
) -> PyResult<(PyEnvelope, Bound<'py, PyDict>)> {
    let set = &segments.inner;
    let (env, report) = py
        .detach(|| solver::envelope_output_sensitive(set))
        .map_err(value_error)?;
    Ok((env.into(), report_dict(py, &report)?))
}

/// Returns `(envelope or None if aborted, counters)`.
#[pyfunction]
#[pyo3(signature = (chains, abort=None))]
fn merge_envelopes<'py>(
    py: Python<'py>,
    chains: Vec<PyRef<'_, PyEnvelope>>,
    abort: Option<u64>,
) -> PyResult<(Option<PyEnvelope>, Bound<'py, PyDict>)> {
    let chains: Vec<Envelope> = chains.iter().map(|c| c.inner.clone()).collect();
    let outcome = py
        .detach(|| merge::merge_envelopes(&chains, abort))
        .map_err(value_error)?;
    let counters = counters_dict(py, outcome.counters())?;
    Ok(match outcome {
        MergeOutcome::Completed(env, _) => (Some(env.into()), counters),
        MergeOutcome::Aborted(_) => (None, counters),
    })
}

/// `kind` is one of `random`, `small-k`, `parabola`, `disjoint-spans`.
#[pyfunction]
#[pyo3(signature = (kind, n, seed=0))]
fn generate(kind: &str, n: usize, seed: u64) -> PyResult<PySegmentSet> {
    let kind: GenKind = kind.parse().map_err(value_error)?;
    Ok(PySegmentSet {
        inner: workload::generate(&GenSpec::new(kind, n, seed)).map_err(value_error)?,
    })
}

#[pyfunction]
fn parse_chains(text: &str) -> PyResult<Vec<PyEnvelope>> {
    Ok(formats::parse_chains(text)
        .map_err(value_error)?
        .into_iter()
        .map(Into::into)
        .collect())
}

#[pymodule]
fn lower_envelope(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySegmentSet>()?;
    m.add_class::<PyEnvelope>()?;
    m.add_function(wrap_pyfunction!(envelope_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(envelope_divide_conquer, m)?)?;
    m.add_function(wrap_pyfunction!(envelope_output_sensitive, m)?)?;
    m.add_function(wrap_pyfunction!(merge_envelopes, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(parse_chains, m)?)?;
    Ok(())
}
