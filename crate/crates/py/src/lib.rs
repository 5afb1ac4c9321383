//! Python bindings for `morse_forge`.
//!
//! Cells cross the boundary as `(dim, index)` tuples and reports as JSON
//! strings.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use morse_forge::cancel::CancellationPlan;
use morse_forge::{meshes, report, synth};
use morse_forge::{CellComplex, CellId, DiscreteGradient, MorseError, ScalarField};

create_exception!(morse_forge_py, MorseForgeError, PyException);
create_exception!(morse_forge_py, NotCancelable, MorseForgeError);

fn err(e: MorseError) -> PyErr {
    MorseForgeError::new_err(e.to_string())
}

fn cell((dim, index): (u8, u32)) -> CellId {
    CellId::new(dim, index)
}

fn tuple(c: CellId) -> (u8, u32) {
    (c.dim, c.index)
}

#[pyclass(name = "CellComplex", frozen)]
struct PyComplex {
    inner: CellComplex,
}

#[pymethods]
impl PyComplex {
    #[staticmethod]
    fn from_triangles(n_vertices: usize, triangles: Vec<[u32; 3]>) -> PyResult<Self> {
        CellComplex::from_triangles(n_vertices, &triangles).map(|inner| PyComplex { inner }).map_err(err)
    }

    #[staticmethod]
    fn from_edges(n_vertices: usize, edges: Vec<[u32; 2]>) -> PyResult<Self> {
        CellComplex::from_edges(n_vertices, &edges).map(|inner| PyComplex { inner }).map_err(err)
    }

    #[staticmethod]
    fn from_off(text: &str) -> PyResult<Self> {
        morse_forge::io::parse_off(text).map(|inner| PyComplex { inner }).map_err(err)
    }

    #[staticmethod]
    fn path_graph(n: usize) -> Self {
        PyComplex { inner: meshes::path_graph(n) }
    }

    #[staticmethod]
    fn cycle_graph(n: usize) -> Self {
        PyComplex { inner: meshes::cycle_graph(n) }
    }

    #[staticmethod]
    fn grid(width: usize, height: usize) -> Self {
        PyComplex { inner: meshes::grid(width, height) }
    }

    #[staticmethod]
    fn octahedron() -> Self {
        PyComplex { inner: meshes::octahedron() }
    }

    #[staticmethod]
    fn torus(width: usize, height: usize) -> Self {
        PyComplex { inner: meshes::torus(width, height) }
    }

    #[staticmethod]
    fn cylinder(circumference: usize, rings: usize) -> Self {
        PyComplex { inner: meshes::cylinder(circumference, rings) }
    }

    #[getter]
    fn n_vertices(&self) -> usize {
        self.inner.n_vertices()
    }

    #[getter]
    fn n_edges(&self) -> usize {
        self.inner.n_edges()
    }

    #[getter]
    fn n_triangles(&self) -> usize {
        self.inner.n_triangles()
    }

    fn euler_characteristic(&self) -> i64 {
        self.inner.euler_characteristic()
    }

    fn vertices_of(&self, c: (u8, u32)) -> PyResult<Vec<u32>> {
        self.inner.check(cell(c)).map_err(err)?;
        Ok(self.inner.vertices_of(cell(c)))
    }

    fn to_off(&self) -> String {
        morse_forge::io::write_off(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "CellComplex(vertices={}, edges={}, triangles={})",
            self.inner.n_vertices(),
            self.inner.n_edges(),
            self.inner.n_triangles()
        )
    }
}

#[pyclass(name = "ScalarField", frozen)]
struct PyField {
    inner: ScalarField,
}

#[pymethods]
impl PyField {
    #[new]
    fn new(complex: &PyComplex, values: Vec<f64>) -> PyResult<Self> {
        ScalarField::load(&complex.inner, &values).map(|inner| PyField { inner }).map_err(err)
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn max_abs_diff(&self, other: &PyField) -> f64 {
        self.inner.max_abs_diff(&other.inner)
    }
}

#[pyclass(name = "Gradient", frozen)]
struct PyGradient {
    inner: DiscreteGradient,
}

#[pymethods]
impl PyGradient {
    #[new]
    fn new(complex: &PyComplex, field: &PyField) -> Self {
        PyGradient { inner: DiscreteGradient::build(&complex.inner, &field.inner) }
    }

    fn census(&self) -> [usize; 3] {
        self.inner.census()
    }

    fn critical_cells(&self) -> Vec<(u8, u32)> {
        self.inner.critical_ids().into_iter().map(tuple).collect()
    }

    fn is_critical(&self, c: (u8, u32)) -> bool {
        self.inner.is_critical(cell(c))
    }

    fn partner(&self, c: (u8, u32)) -> Option<(u8, u32)> {
        self.inner.partner(cell(c)).map(tuple)
    }
}

#[pyclass(name = "CancellationPlan", frozen)]
struct PyPlan {
    inner: CancellationPlan,
}

#[pymethods]
impl PyPlan {
    #[getter]
    fn p(&self) -> (u8, u32) {
        tuple(self.inner.p.cell)
    }

    #[getter]
    fn q(&self) -> (u8, u32) {
        tuple(self.inner.q.cell)
    }

    #[getter]
    fn persistence(&self) -> f64 {
        self.inner.persistence
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn path(&self) -> Vec<(u8, u32)> {
        self.inner.path.cells.iter().copied().map(tuple).collect()
    }

    #[getter]
    fn support(&self) -> Vec<(u8, u32)> {
        self.inner.support.iter().copied().map(tuple).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "CancellationPlan(p={}, q={}, persistence={})",
            self.inner.p.cell, self.inner.q.cell, self.inner.persistence
        )
    }
}

/// The plan for `(p, q)`, or `NotCancelable` naming the failed hypothesis.
#[pyfunction]
#[pyo3(signature = (complex, field, p, q, epsilon=None))]
fn is_cancelable(
    complex: &PyComplex,
    field: &PyField,
    p: (u8, u32),
    q: (u8, u32),
    epsilon: Option<f64>,
) -> PyResult<PyPlan> {
    let (c, f) = (&complex.inner, &field.inner);
    let g = DiscreteGradient::build(c, f);
    match morse_forge::is_cancelable(c, &g, f, cell(p), cell(q), epsilon).map_err(err)? {
        Ok(inner) => Ok(PyPlan { inner }),
        Err(why) => Err(NotCancelable::new_err(format!("{}: {why}", why.tag()))),
    }
}

/// Cancels the plan's pair and returns the realized field.
#[pyfunction]
fn cancel(complex: &PyComplex, field: &PyField, plan: &PyPlan) -> PyResult<PyField> {
    let (c, f) = (&complex.inner, &field.inner);
    let g = DiscreteGradient::build(c, f);
    let g2 = morse_forge::cancel_pair(c, &g, &plan.inner).map_err(err)?;
    let inner = morse_forge::realize_function(c, &g2, f, &plan.inner).map_err(err)?;
    Ok(PyField { inner })
}

/// `(field, report_json)` after cancelling every pair up to `threshold`.
#[pyfunction]
#[pyo3(signature = (complex, field, threshold, census_scan=None))]
fn simplify(
    complex: &PyComplex,
    field: &PyField,
    threshold: f64,
    census_scan: Option<usize>,
) -> PyResult<(PyField, String)> {
    let (inner, r) = morse_forge::simplify(&complex.inner, &field.inner, threshold, census_scan).map_err(err)?;
    Ok((PyField { inner }, report::to_json(&report::RunReport::from(&r))))
}

/// `(birth_dim, birth_index, birth_value, death_dim, death_index, death_value)`
/// rows; death fields are `None` for essential classes.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn persistence_pairs(
    complex: &PyComplex,
    field: &PyField,
) -> Vec<(u8, u32, f64, Option<u8>, Option<u32>, Option<f64>)> {
    morse_forge::persistence_pairs(&complex.inner, &field.inner)
        .into_iter()
        .map(|p| {
            let b = p.birth;
            (
                b.cell.dim,
                b.cell.index,
                b.value,
                p.death.map(|d| d.cell.dim),
                p.death.map(|d| d.cell.index),
                p.death.map(|d| d.value),
            )
        })
        .collect()
}

#[pyfunction]
#[pyo3(signature = (values, margin=1))]
fn cancel_1d(values: Vec<f64>, margin: usize) -> PyResult<Vec<f64>> {
    morse_forge::cancel_1d(&values, margin).map(|p| p.h1).map_err(err)
}

#[pyfunction]
fn analyze(complex: &PyComplex, field: &PyField) -> PyResult<String> {
    report::analyze(&complex.inner, &field.inner).map(|r| report::to_json(&r)).map_err(err)
}

/// `(ok, report_json)`.
#[pyfunction]
fn verify(complex: &PyComplex, field: &PyField) -> (bool, String) {
    let r = report::verify(&complex.inner, &field.inner);
    (r.ok, report::to_json(&r))
}

/// The seeded 32x32 two-bump fixture.
#[pyfunction]
#[pyo3(signature = (seed=0))]
fn two_bumps(seed: u64) -> PyResult<(PyComplex, PyField)> {
    let (c, f) = synth::Mixture::two_bumps().sample(seed).map_err(err)?;
    Ok((PyComplex { inner: c }, PyField { inner: f }))
}

#[pymodule]
fn morse_forge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MorseForgeError", m.py().get_type::<MorseForgeError>())?;
    m.add("NotCancelable", m.py().get_type::<NotCancelable>())?;
    m.add_class::<PyComplex>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyGradient>()?;
    m.add_class::<PyPlan>()?;
    m.add_function(wrap_pyfunction!(is_cancelable, m)?)?;
    m.add_function(wrap_pyfunction!(cancel, m)?)?;
    m.add_function(wrap_pyfunction!(simplify, m)?)?;
    m.add_function(wrap_pyfunction!(persistence_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(cancel_1d, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(two_bumps, m)?)?;
    Ok(())
}
