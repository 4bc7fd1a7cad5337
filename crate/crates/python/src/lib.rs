//! Python bindings. Exact rationals cross the boundary as `"n/d"` strings.

use std::collections::{BTreeMap, BTreeSet};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use boxsums::cli::weight_formula;
use boxsums::deriver::{self, DeriveOptions};
use boxsums::numeric;
use boxsums::{weight_form, BoxPolynomial};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A polynomial state vanishing at both walls of the unit box.
#[pyclass(name = "Wavefunction", frozen)]
struct Wavefunction {
    inner: BoxPolynomial,
}

#[pymethods]
impl Wavefunction {
    /// Accepts an expression such as `"x*(1-x)"` or a comma list of
    /// ascending coefficients such as `"0, 1, -1"`.
    #[new]
    fn new(poly: &str) -> PyResult<Self> {
        BoxPolynomial::parse(poly).map(|inner| Self { inner }).map_err(value_error)
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn coefficients(&self) -> Vec<String> {
        self.inner.coefficients().iter().map(ToString::to_string).collect()
    }

    fn norm_squared(&self) -> String {
        self.inner.norm_squared().to_string()
    }

    /// `<H>` in units of ħ²/(2m a²).
    fn mean_energy(&self) -> String {
        self.inner.mean_energy().to_string()
    }

    /// `<H>` in units of ħ²/(m a²).
    fn mean_energy_hbar2_over_m(&self) -> String {
        self.inner.mean_energy_hbar2_over_m().to_string()
    }

    fn mean_h2(&self) -> String {
        self.inner.mean_h2().to_string()
    }

    fn shift_parity(&self) -> String {
        self.inner.shift_parity().to_string()
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn weight_formula(&self) -> String {
        weight_formula(&weight_form(&self.inner))
    }

    /// `W(E_n)` for `n = 1..=levels`.
    fn weights(&self, levels: u64) -> Vec<f64> {
        numeric::weights(&self.inner, levels)
    }

    /// Normalized `(x, psi)` pairs on an equally spaced grid.
    #[pyo3(signature = (points=101))]
    fn sample(&self, points: usize) -> PyResult<Vec<(f64, f64)>> {
        let samples = self.inner.sample(points).map_err(value_error)?;
        Ok(samples.into_iter().map(|(x, v)| (num_traits::ToPrimitive::to_f64(&x).unwrap_or(f64::NAN), v)).collect())
    }

    /// Full analysis as a JSON string.
    fn analyze(&self) -> String {
        let table = deriver::derive(deriver::max_argument_for(&self.inner) + 2, &DeriveOptions::default()).ok();
        serde_json::to_string(&deriver::analyze(&self.inner, table.as_ref())).expect("serializable")
    }

    fn __repr__(&self) -> String {
        format!("Wavefunction('{}')", self.inner.poly())
    }
}

fn options(use_relations: bool, moment_orders: Vec<u32>) -> DeriveOptions {
    DeriveOptions { use_relations, moment_orders: moment_orders.into_iter().collect::<BTreeSet<_>>(), allow_high_orders: false }
}

/// `{"zeta(4)": ("1/90", 4), ...}`: each value is `coefficient * pi**power`.
#[pyfunction]
#[pyo3(signature = (max_p=16, use_relations=false, moment_orders=vec![1, 2]))]
fn derive(max_p: u32, use_relations: bool, moment_orders: Vec<u32>) -> PyResult<BTreeMap<String, (String, u32)>> {
    let table = deriver::derive(max_p, &options(use_relations, moment_orders)).map_err(value_error)?;
    Ok(table
        .entries()
        .iter()
        .map(|(s, e)| (s.to_string(), (e.value.coefficient().to_string(), e.value.pi_power())))
        .collect())
}

/// Same table as [`derive`], as the JSON record list the CLI emits.
#[pyfunction]
#[pyo3(signature = (max_p=16, use_relations=false, moment_orders=vec![1, 2]))]
fn derive_json(max_p: u32, use_relations: bool, moment_orders: Vec<u32>) -> PyResult<String> {
    let table = deriver::derive(max_p, &options(use_relations, moment_orders)).map_err(value_error)?;
    Ok(table.to_json())
}

/// Even arguments reachable from states of this degree.
#[pyfunction]
fn classify(degree: usize) -> PyResult<Vec<u32>> {
    deriver::classify(degree).map(|c| c.attainable_p).map_err(value_error)
}

type ReportTuple = (String, String, f64, f64, f64, bool);

/// Derives a table and checks every entry against a partial sum.
/// Returns `(target, closed_value, partial_sum, tail_bound, residual, passed)` tuples.
#[pyfunction]
#[pyo3(signature = (max_p=16, terms=100_000))]
fn verify(max_p: u32, terms: u64) -> PyResult<Vec<ReportTuple>> {
    let table = deriver::derive(max_p, &DeriveOptions::default()).map_err(value_error)?;
    let reports = numeric::verify_table(&table, terms).map_err(value_error)?;
    Ok(reports.into_iter().map(|r| (r.target, r.closed_value, r.partial_sum, r.tail_bound, r.residual, r.pass)).collect())
}

#[pymodule]
#[pyo3(name = "boxsums")]
fn boxsums_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Wavefunction>()?;
    m.add_function(wrap_pyfunction!(derive, m)?)?;
    m.add_function(wrap_pyfunction!(derive_json, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
