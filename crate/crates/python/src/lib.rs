use num_rational::BigRational;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyType;

use triaut::charzero::{self, PreimageOperator};
use triaut::finite_order::{classify_finite_order_b2, FiniteOrderReport};
use triaut::{charp, canonical_form, parse_map, parse_polynomial, ClassReport, Error, Group, Order};

create_exception!(triaut, TriautError, PyException, "Base class for triaut errors.");
create_exception!(triaut, ParseError, TriautError, "Malformed map or polynomial text.");
create_exception!(triaut, PreconditionError, TriautError, "An operation's precondition does not hold.");
create_exception!(triaut, NoSolutionError, TriautError, "A linear problem has no solution; the message carries the certificate.");
create_exception!(triaut, ResourceCapError, TriautError, "A term, degree or dimension cap was hit.");

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Parse { .. } | Error::NotTriangular { .. } | Error::InvalidPrime { .. } | Error::ArityMismatch { .. } => {
            ParseError::new_err(msg)
        }
        Error::NoSolution { .. } | Error::InternalNoSolution { .. } => NoSolutionError::new_err(msg),
        Error::ResourceCap(_) | Error::DegreeGrowthExceeded { .. } | Error::TooManyPoints { .. } => {
            ResourceCapError::new_err(msg)
        }
        _ => PreconditionError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for triaut::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn order_to_py(o: Order) -> Option<u128> {
    o.finite()
}

/// A polynomial over Q or F_p in `n` variables `x1..xn`.
#[pyclass(name = "Polynomial", module = "triaut", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPolynomial(triaut::Polynomial);

#[pymethods]
impl PyPolynomial {
    /// `Polynomial("x1^2 + 1/2*x2", "Q", 2)`.
    #[new]
    fn new(text: &str, field: &str, nvars: usize) -> PyResult<Self> {
        let field: triaut::Field = field.parse().py()?;
        Ok(PyPolynomial(parse_polynomial(text, field, nvars).py()?))
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.0.nvars()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn __add__(&self, other: &PyPolynomial) -> PyResult<Self> {
        check_same(&self.0, &other.0)?;
        Ok(PyPolynomial(self.0.add(&other.0)))
    }

    fn __sub__(&self, other: &PyPolynomial) -> PyResult<Self> {
        check_same(&self.0, &other.0)?;
        Ok(PyPolynomial(self.0.sub(&other.0)))
    }

    fn __mul__(&self, other: &PyPolynomial) -> PyResult<Self> {
        check_same(&self.0, &other.0)?;
        Ok(PyPolynomial(self.0.mul(&other.0)))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial('{}', '{}', {})", self.0, self.0.field(), self.0.nvars())
    }
}

fn check_same(a: &triaut::Polynomial, b: &triaut::Polynomial) -> PyResult<()> {
    if a.field() != b.field() {
        return Err(to_py(Error::FieldMismatch));
    }
    if a.nvars() != b.nvars() {
        return Err(to_py(Error::ArityMismatch { expected: a.nvars(), found: b.nvars() }));
    }
    Ok(())
}

/// A triangular polynomial automorphism, e.g. `Map("F2 [x1 -> x1 + x2, x2 -> x2 + 1]")`.
#[pyclass(name = "Map", module = "triaut", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyMap(triaut::TriangularMap);

impl PyMap {
    fn poly(&self, g: &Bound<'_, PyAny>) -> PyResult<triaut::Polynomial> {
        if let Ok(p) = g.extract::<PyPolynomial>() {
            check_same(&p.0, &triaut::Polynomial::zero(self.0.field(), self.0.nvars()))?;
            return Ok(p.0);
        }
        let text: String = g.extract()?;
        parse_polynomial(&text, self.0.field(), self.0.nvars()).py()
    }
}

#[pymethods]
impl PyMap {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyMap(parse_map(text).py()?))
    }

    #[classmethod]
    fn identity(_cls: &Bound<'_, PyType>, field: &str, nvars: usize) -> PyResult<Self> {
        let field: triaut::Field = field.parse().py()?;
        Ok(PyMap(triaut::TriangularMap::identity(field, nvars)))
    }

    #[getter]
    fn field(&self) -> String {
        self.0.field().to_string()
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.0.nvars()
    }

    fn components(&self) -> Vec<PyPolynomial> {
        self.0.components().into_iter().map(PyPolynomial).collect()
    }

    fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    /// `F ∘ G`: the components `F_i(G)`.
    fn compose(&self, other: &PyMap) -> PyResult<Self> {
        Ok(PyMap(self.0.compose(&other.0).py()?))
    }

    fn inverse(&self) -> PyResult<Self> {
        Ok(PyMap(self.0.inverse().py()?))
    }

    fn power(&self, m: i64) -> PyResult<Self> {
        Ok(PyMap(self.0.power(m).py()?))
    }

    /// `τ⁻¹ F τ`.
    fn conjugate(&self, tau: &PyMap) -> PyResult<Self> {
        Ok(PyMap(self.0.conjugate(&tau.0).py()?))
    }

    /// `g(F)`; `g` is a `Polynomial` or its text.
    fn apply(&self, g: &Bound<'_, PyAny>) -> PyResult<PyPolynomial> {
        let g = self.poly(g)?;
        Ok(PyPolynomial(self.0.apply(&g).py()?))
    }

    /// The order, or `None` when it is infinite.
    fn order(&self, py: Python<'_>) -> PyResult<Option<u128>> {
        let f = &self.0;
        Ok(order_to_py(py.detach(|| f.order()).py()?))
    }

    fn perm_order(&self, py: Python<'_>) -> PyResult<u128> {
        let f = &self.0;
        py.detach(|| f.perm_order()).py()
    }

    fn is_max_order(&self) -> PyResult<bool> {
        charp::is_max_order(&self.0).py()
    }

    fn __pow__(&self, m: i64, _modulo: Option<i64>) -> PyResult<Self> {
        self.power(m)
    }

    fn __matmul__(&self, other: &PyMap) -> PyResult<Self> {
        self.compose(other)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Map('{}')", self.0)
    }
}

/// Result of a classification: label, canonical form, witness `τ` with
/// `input.conjugate(τ) == canonical`, and the order (`None` if infinite).
#[pyclass(name = "Report", module = "triaut", frozen)]
struct PyReport {
    #[pyo3(get)]
    label: String,
    #[pyo3(get)]
    canonical: PyMap,
    #[pyo3(get)]
    witness: PyMap,
    #[pyo3(get)]
    witness_steps: Vec<PyMap>,
    #[pyo3(get)]
    order: Option<u128>,
}

impl From<ClassReport> for PyReport {
    fn from(r: ClassReport) -> Self {
        PyReport {
            label: r.label.name().to_string(),
            canonical: PyMap(r.canonical),
            witness: PyMap(r.witness.composed().clone()),
            witness_steps: r.witness.steps().iter().cloned().map(PyMap).collect(),
            order: order_to_py(r.order),
        }
    }
}

impl From<FiniteOrderReport> for PyReport {
    fn from(r: FiniteOrderReport) -> Self {
        PyReport {
            label: r.label.name().to_string(),
            canonical: PyMap(r.canonical),
            witness: PyMap(r.witness.composed().clone()),
            witness_steps: r.witness.steps().iter().cloned().map(PyMap).collect(),
            order: order_to_py(r.order),
        }
    }
}

#[pymethods]
impl PyReport {
    /// Whether the witness takes `input` to the canonical form.
    fn verify(&self, input: &PyMap) -> PyResult<bool> {
        Ok(input.0.conjugate(&self.witness.0).py()? == self.canonical.0)
    }

    fn __repr__(&self) -> String {
        let order = self.order.map_or("infinite".to_string(), |k| k.to_string());
        format!("Report(label='{}', canonical={}, order={order})", self.label, self.canonical.0)
    }
}

/// A triangular derivation over Q, written like a map: `Q [x1 -> x2, x2 -> 1]`.
#[pyclass(name = "Derivation", module = "triaut", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyDerivation(charzero::Derivation);

#[pymethods]
impl PyDerivation {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyDerivation(text.parse().py()?))
    }

    fn images(&self) -> Vec<PyPolynomial> {
        self.0.images().iter().cloned().map(PyPolynomial).collect()
    }

    fn apply(&self, g: &PyPolynomial) -> PyResult<PyPolynomial> {
        Ok(PyPolynomial(self.0.apply(&g.0).py()?))
    }

    fn exp(&self) -> PyResult<PyMap> {
        Ok(PyMap(charzero::exp_derivation(&self.0).py()?))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Derivation('{}')", self.0)
    }
}

fn parse_group(group: &str) -> PyResult<Group> {
    group.parse().py()
}

/// Canonical form under conjugation by `group` ("ba" or "baa").
#[pyfunction]
#[pyo3(signature = (f, group = "ba"))]
fn canonical(py: Python<'_>, f: &PyMap, group: &str) -> PyResult<PyReport> {
    let group = parse_group(group)?;
    let f = &f.0;
    Ok(py.detach(|| canonical_form(f, group)).py()?.into())
}

/// Finite-order plane classification into the forms A, U, M, S.
#[pyfunction]
#[pyo3(signature = (f, assert_finite = true))]
fn classify_finite_order(f: &PyMap, assert_finite: bool) -> PyResult<PyReport> {
    Ok(classify_finite_order_b2(&f.0, assert_finite).py()?.into())
}

/// Generators `x_i^p - a_i^(p-1) x_i + b_i` of the invariants of a maximal-order map.
#[pyfunction]
fn invariant_generators(py: Python<'_>, f: &PyMap) -> PyResult<Vec<PyPolynomial>> {
    let f = &f.0;
    let set = py.detach(|| charp::invariant_generators(f)).py()?;
    Ok(set.generators.into_iter().map(PyPolynomial).collect())
}

/// `h` with `F(h) - h = g` (`op="n"`), `D(h) = g` (`op="d"`, over Q) or `M(h) = g` (`op="m"`).
#[pyfunction]
#[pyo3(signature = (f, g, op = "n"))]
fn preimage(py: Python<'_>, f: &PyMap, g: &Bound<'_, PyAny>, op: &str) -> PyResult<PyPolynomial> {
    let target = f.poly(g)?;
    let f = &f.0;
    let result = py.detach(|| match (op, f.field()) {
        ("n", triaut::Field::Prime(_)) => charp::solve_n_preimage(f, &target),
        ("n", triaut::Field::Rationals) => charzero::solve_preimage_char0(f, &target, PreimageOperator::N),
        ("d", _) => charzero::solve_preimage_char0(f, &target, PreimageOperator::D),
        ("m", _) => charp::solve_m_preimage(f, &target),
        _ => Err(Error::UnsupportedInput(format!("unknown operator '{op}' (expected n, d or m)"))),
    });
    Ok(PyPolynomial(result.py()?))
}

/// `(r, h, unique)` with `g = r + N(h)` and `r` in the Frobenius representative system.
#[pyfunction]
fn split(py: Python<'_>, f: &PyMap, g: &Bound<'_, PyAny>) -> PyResult<(PyPolynomial, PyPolynomial, bool)> {
    let target = f.poly(g)?;
    let f = &f.0;
    let s = py.detach(|| charp::split(f, &target)).py()?;
    Ok((PyPolynomial(s.r), PyPolynomial(s.h), s.unique))
}

/// The derivation `D` with `exp(D) = F` (unipotent maps over Q).
#[pyfunction]
fn log(f: &PyMap) -> PyResult<PyDerivation> {
    Ok(PyDerivation(charzero::log_map(&f.0).py()?))
}

/// `F^t` for a rational `t` given as text, e.g. `"1/2"`.
#[pyfunction]
fn pow_fractional(f: &PyMap, t: &str) -> PyResult<PyMap> {
    let t: BigRational = t
        .trim()
        .parse()
        .map_err(|_| ParseError::new_err(format!("'{t}' is not a rational number")))?;
    Ok(PyMap(charzero::pow_fractional(&f.0, &t).py()?))
}

/// Sets the process-wide cap on intermediate polynomial sizes.
#[pyfunction]
fn set_max_terms(limit: usize) {
    triaut::limits::set_max_terms(limit);
}

#[pymodule]
#[pyo3(name = "triaut")]
fn triaut_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyDerivation>()?;
    m.add_function(wrap_pyfunction!(canonical, m)?)?;
    m.add_function(wrap_pyfunction!(classify_finite_order, m)?)?;
    m.add_function(wrap_pyfunction!(invariant_generators, m)?)?;
    m.add_function(wrap_pyfunction!(preimage, m)?)?;
    m.add_function(wrap_pyfunction!(split, m)?)?;
    m.add_function(wrap_pyfunction!(log, m)?)?;
    m.add_function(wrap_pyfunction!(pow_fractional, m)?)?;
    m.add_function(wrap_pyfunction!(set_max_terms, m)?)?;
    m.add("TriautError", py.get_type::<TriautError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("PreconditionError", py.get_type::<PreconditionError>())?;
    m.add("NoSolutionError", py.get_type::<NoSolutionError>())?;
    m.add("ResourceCapError", py.get_type::<ResourceCapError>())?;
    Ok(())
}
