//! Python bindings: operators, weights, membership tests and example runs.

use std::collections::BTreeMap;

use mopalg::arith::{CRat, MatRF};
use mopalg::catalog::{weight_by_name, ExampleKind};
use mopalg::fourier::{dw_membership, fourier_image, lambda_text, Membership};
use mopalg::opalg::DiffOp;
use mopalg::reproduce::{reproduce as run_reproduce, Options};
use mopalg::specio::{emit_report, parse_op, print_matrix, print_op, Format, ParseContext};
use mopalg::structure::exceptional_degrees as run_exceptional;
use mopalg::weights::MOPSequence;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(mopalg, MopError, PyException);

fn err(e: mopalg::Error) -> PyErr {
    match e {
        mopalg::Error::Parse { .. } | mopalg::Error::UnknownParameter(_) | mopalg::Error::InvalidParameter(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => MopError::new_err(other.to_string()),
    }
}

/// Parameter values may be given as `int`, `Fraction` or strings such as `"2/3"`.
fn params(p: Option<&Bound<'_, PyDict>>) -> PyResult<BTreeMap<String, CRat>> {
    let mut out = BTreeMap::new();
    if let Some(d) = p {
        for (k, v) in d.iter() {
            let text = v.str()?.to_string();
            out.insert(k.extract::<String>()?, text.parse::<CRat>().map_err(err)?);
        }
    }
    Ok(out)
}

/// Matrix differential operator with rational-function coefficients.
#[pyclass(name = "Op", module = "mopalg", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyOp {
    inner: DiffOp,
}

#[pymethods]
impl PyOp {
    #[new]
    #[pyo3(signature = (src, size = 2, params = None))]
    fn new(src: &str, size: usize, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let ctx = ParseContext::new(size).with_params(&self::params(params)?);
        Ok(PyOp {
            inner: parse_op(src, &ctx).map_err(err)?,
        })
    }

    #[getter]
    fn order(&self) -> Option<usize> {
        self.inner.order()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.rows()
    }

    fn star(&self) -> PyOp {
        PyOp { inner: self.inner.star() }
    }

    /// Eigenvalue `Λ(n)` as canonical text, when the operator preserves degrees.
    fn eigenvalue(&self) -> PyResult<String> {
        Ok(lambda_text(&fourier_image(&self.inner).map_err(err)?))
    }

    /// Right action on a polynomial matrix given in matrix-literal syntax.
    fn apply(&self, matrix: &str) -> PyResult<String> {
        let ctx = ParseContext::new(self.inner.rows());
        let f: MatRF = mopalg::specio::parse_matrix(matrix, &ctx).map_err(err)?;
        Ok(print_matrix(&self.inner.apply(&f).map_err(err)?, "x"))
    }

    fn __mul__(&self, o: &PyOp) -> PyResult<PyOp> {
        Ok(PyOp {
            inner: self.inner.try_mul(&o.inner).map_err(err)?,
        })
    }

    fn __add__(&self, o: &PyOp) -> PyResult<PyOp> {
        Ok(PyOp {
            inner: self.inner.try_add(&o.inner).map_err(err)?,
        })
    }

    fn __sub__(&self, o: &PyOp) -> PyResult<PyOp> {
        Ok(PyOp {
            inner: self.inner.try_sub(&o.inner).map_err(err)?,
        })
    }

    fn __str__(&self) -> String {
        print_op(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Op({:?}, size={})", print_op(&self.inner), self.inner.rows())
    }
}

/// A registered weight `W = f·Q`.
#[pyclass(name = "Weight", module = "mopalg", frozen)]
struct PyWeight {
    name: String,
    inner: mopalg::weights::Weight,
}

#[pymethods]
impl PyWeight {
    #[new]
    #[pyo3(signature = (name, params = None))]
    fn new(name: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        Ok(PyWeight {
            name: name.to_string(),
            inner: weight_by_name(name, &self::params(params)?).map_err(err)?,
        })
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    /// Formal adjoint of `op` with respect to this weight.
    fn dagger(&self, op: &PyOp) -> PyResult<PyOp> {
        Ok(PyOp {
            inner: self.inner.dagger(&op.inner).map_err(err)?,
        })
    }

    /// Monic orthogonal polynomials `P(0..=nmax)` as canonical matrix text.
    #[pyo3(signature = (nmax = 4))]
    fn mops(&self, nmax: usize) -> PyResult<Vec<String>> {
        let seq = MOPSequence::new(&self.inner, nmax).map_err(err)?;
        Ok((0..=nmax).map(|n| print_matrix(&seq.poly(n), "x")).collect())
    }

    /// Membership of `op` in the eigenvalue algebra, checked on `n = 0..=nwin`.
    ///
    /// Returns a dict with `accepted`, `certified`, `eigenvalue` and, on
    /// rejection, the witness degree `n`.
    #[pyo3(signature = (op, nwin = 12))]
    fn membership<'py>(&self, py: Python<'py>, op: &PyOp, nwin: usize) -> PyResult<Bound<'py, PyDict>> {
        let seq = MOPSequence::new(&self.inner, nwin + 1).map_err(err)?;
        let out = PyDict::new(py);
        match dw_membership(&op.inner, &seq, nwin).map_err(err)? {
            Membership::Accept { lambda, certified, .. } => {
                out.set_item("accepted", true)?;
                out.set_item("certified", certified)?;
                out.set_item("eigenvalue", lambda_text(&lambda))?;
            }
            Membership::Reject { n, residual, lambda } => {
                out.set_item("accepted", false)?;
                out.set_item("n", n)?;
                out.set_item("residual", print_matrix(&residual, "x"))?;
                out.set_item("eigenvalue", lambda.as_ref().map(lambda_text))?;
            }
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!("Weight({:?})", self.name)
    }
}

/// Runs a built-in example and returns the report text.
#[pyfunction]
#[pyo3(signature = (example, params = None, seed = 0, nwin = 12, order_cap = 6, specializations = 3, format = "json"))]
fn reproduce(
    py: Python<'_>,
    example: &str,
    params: Option<&Bound<'_, PyDict>>,
    seed: u64,
    nwin: usize,
    order_cap: usize,
    specializations: usize,
    format: &str,
) -> PyResult<String> {
    let kind = ExampleKind::from_name(example).ok_or_else(|| PyValueError::new_err(format!("unknown example {example:?}")))?;
    let fmt = match format {
        "json" => Format::Json,
        "text" => Format::Text,
        _ => return Err(PyValueError::new_err("format must be 'json' or 'text'")),
    };
    let explicit = self::params(params)?;
    let opts = Options {
        n_win: nwin,
        order_cap,
        specializations,
        seed,
    };
    let report = py.detach(|| run_reproduce(kind, &explicit, &opts)).map_err(err)?;
    Ok(String::from_utf8(emit_report(&report, fmt)).expect("reports are UTF-8"))
}

/// Degrees `n ≤ nmax` without a polynomial eigenfunction of a scalar operator.
#[pyfunction]
#[pyo3(signature = (op, nmax = 25))]
fn exceptional_degrees(op: &str, nmax: usize) -> PyResult<Vec<usize>> {
    let d = parse_op(op, &ParseContext::new(1)).map_err(err)?;
    Ok(run_exceptional(&d, nmax).map_err(err)?.into_iter().collect())
}

#[pymodule]
#[pyo3(name = "mopalg")]
fn mopalg_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOp>()?;
    m.add_class::<PyWeight>()?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    m.add_function(wrap_pyfunction!(exceptional_degrees, m)?)?;
    m.add("MopError", m.py().get_type::<MopError>())?;
    Ok(())
}
