//! Python bindings for detlab-core.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use detlab_core::disk::{self, ModeData};
use detlab_core::halfline::{self, Bc, SpectralPoint};
use detlab_core::verify::{self, ScanProblem};
use detlab_core::{Error, Settings};

create_exception!(detlab, DetlabError, PyException);
create_exception!(detlab, SpectralError, DetlabError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parameter(_) | Error::Config(_) | Error::Domain { .. } | Error::ModeRange(_) => PyValueError::new_err(e.to_string()),
        e if e.is_spectral() => SpectralError::new_err(e.to_string()),
        e => DetlabError::new_err(e.to_string()),
    }
}

fn point(z: Complex64) -> PyResult<SpectralPoint> {
    SpectralPoint::new(z).map_err(to_py)
}

fn parse_bc(bc: &str) -> PyResult<Bc> {
    match bc.to_ascii_lowercase().as_str() {
        "d" | "dirichlet" => Ok(Bc::Dirichlet),
        "n" | "neumann" => Ok(Bc::Neumann),
        other => Err(PyValueError::new_err(format!("unknown boundary condition {other:?}"))),
    }
}

/// Integrable potential on the half-line, truncated at x_max.
#[pyclass(frozen, name = "Potential1D")]
struct PyPotential1D {
    inner: halfline::Potential1D,
}

#[pymethods]
impl PyPotential1D {
    #[staticmethod]
    #[pyo3(signature = (x_max = 30.0))]
    fn zero(x_max: f64) -> PyResult<Self> {
        Ok(Self { inner: halfline::Potential1D::zero(x_max).map_err(to_py)? })
    }

    /// amplitude * exp(-rate * x)
    #[staticmethod]
    #[pyo3(signature = (amplitude, rate, x_max = 30.0))]
    fn exponential(amplitude: f64, rate: f64, x_max: f64) -> PyResult<Self> {
        Ok(Self { inner: halfline::Potential1D::exponential(amplitude, rate, x_max).map_err(to_py)? })
    }

    /// -depth on (0, width)
    #[staticmethod]
    #[pyo3(signature = (depth, width, x_max = 30.0))]
    fn square_well(depth: f64, width: f64, x_max: f64) -> PyResult<Self> {
        Ok(Self { inner: halfline::Potential1D::square_well(depth, width, x_max).map_err(to_py)? })
    }

    #[staticmethod]
    #[pyo3(signature = (xs, values, x_max = 30.0))]
    fn table(xs: Vec<f64>, values: Vec<Complex64>, x_max: f64) -> PyResult<Self> {
        Ok(Self { inner: halfline::Potential1D::table(xs, values, x_max).map_err(to_py)? })
    }

    fn __call__(&self, x: f64) -> Complex64 {
        self.inner.eval(x)
    }

    #[getter]
    fn x_max(&self) -> f64 {
        self.inner.x_max
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    fn __repr__(&self) -> String {
        format!("Potential1D({:?}, x_max={})", self.inner.label, self.inner.x_max)
    }
}

/// Radially symmetric potential on the disk of radius R.
#[pyclass(frozen, name = "RadialPotential")]
struct PyRadialPotential {
    inner: disk::RadialPotential2D,
}

#[pymethods]
impl PyRadialPotential {
    #[staticmethod]
    #[pyo3(signature = (radius = 1.0))]
    fn zero(radius: f64) -> PyResult<Self> {
        Ok(Self { inner: disk::RadialPotential2D::zero(radius).map_err(to_py)? })
    }

    /// amplitude * exp(-(r / width)^2)
    #[staticmethod]
    #[pyo3(signature = (amplitude, width, radius = 1.0))]
    fn gaussian(amplitude: f64, width: f64, radius: f64) -> PyResult<Self> {
        Ok(Self { inner: disk::RadialPotential2D::gaussian(amplitude, width, radius).map_err(to_py)? })
    }

    #[staticmethod]
    #[pyo3(signature = (rs, values, radius = 1.0))]
    fn table(rs: Vec<f64>, values: Vec<Complex64>, radius: f64) -> PyResult<Self> {
        Ok(Self { inner: disk::RadialPotential2D::table(rs, values, radius).map_err(to_py)? })
    }

    fn __call__(&self, r: f64) -> Complex64 {
        self.inner.eval(r)
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }

    fn __repr__(&self) -> String {
        format!("RadialPotential({:?}, R={})", self.inner.label, self.inner.radius)
    }
}

/// Independently computed sides of one identity and their spread.
#[pyclass(frozen, name = "IdentityReport")]
struct PyIdentityReport {
    inner: detlab_core::IdentityReport,
}

#[pymethods]
impl PyIdentityReport {
    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn z(&self) -> Option<Complex64> {
        self.inner.z
    }

    /// List of (side name, value).
    #[getter]
    fn sides(&self) -> Vec<(String, Complex64)> {
        self.inner.sides.iter().map(|s| (s.name.clone(), s.value)).collect()
    }

    #[getter]
    fn abs_residual(&self) -> f64 {
        self.inner.abs_residual
    }

    #[getter]
    fn rel_residual(&self) -> f64 {
        self.inner.rel_residual
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn diagnostics(&self) -> Vec<String> {
        self.inner.failures.iter().chain(&self.inner.diagnostics).cloned().collect()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| DetlabError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "IdentityReport({:?}, rel_residual={:.3e}, converged={})",
            self.inner.name, self.inner.rel_residual, self.inner.converged
        )
    }
}

fn report(inner: detlab_core::IdentityReport) -> PyIdentityReport {
    PyIdentityReport { inner }
}

fn disk_settings(n_panels: usize, nodes_per_panel: usize) -> Settings {
    let mut s = Settings::default();
    s.policy.n_panels = n_panels;
    s.policy.nodes_per_panel = nodes_per_panel;
    s
}

/// Weyl–Titchmarsh m-function of the half-line operator.
#[pyfunction]
#[pyo3(signature = (v, z, bc = "dirichlet"))]
fn m_function(v: &PyPotential1D, z: Complex64, bc: &str) -> PyResult<Complex64> {
    halfline::m_function(&v.inner, &point(z)?, parse_bc(bc)?, &Settings::default()).map_err(to_py)
}

/// Jost function f(z, 0).
#[pyfunction]
fn jost_function(v: &PyPotential1D, z: Complex64) -> PyResult<Complex64> {
    Ok(halfline::jost_solution(&v.inner, &point(z)?, &Settings::default()).map_err(to_py)?.value_at_0)
}

/// Fredholm determinant det(I + K) of the Birman–Schwinger operator.
#[pyfunction]
#[pyo3(signature = (v, z, bc = "dirichlet"))]
fn fredholm_det(v: &PyPotential1D, z: Complex64, bc: &str) -> PyResult<Complex64> {
    let s = Settings::default();
    Ok(halfline::fredholm_det_halfline(&v.inner, &point(z)?, parse_bc(bc)?, &s.policy).map_err(to_py)?.value)
}

/// Boundary scalar whose zeros are Neumann ("neumann") or Dirichlet
/// ("dirichlet") eigenvalues.
#[pyfunction]
#[pyo3(signature = (v, z, bc = "neumann"))]
fn boundary_scalar(v: &PyPotential1D, z: Complex64, bc: &str) -> PyResult<Complex64> {
    let (pt, s) = (point(z)?, Settings::default());
    let r = match parse_bc(bc)? {
        Bc::Neumann => halfline::boundary_scalar_1d(&v.inner, &pt, &s),
        Bc::Dirichlet => halfline::dirichlet_boundary_scalar_1d(&v.inner, &pt, &s),
    };
    Ok(r.map_err(to_py)?.value)
}

#[pyfunction]
#[pyo3(signature = (v, z, bc = "dirichlet", tolerance = verify::HALFLINE_TOLERANCE))]
fn verify_jost_pais(v: &PyPotential1D, z: Complex64, bc: &str, tolerance: f64) -> PyResult<PyIdentityReport> {
    let r = verify::jost_pais_with_tolerance(&v.inner, &point(z)?, parse_bc(bc)?, &Settings::default(), tolerance);
    Ok(report(r.map_err(to_py)?))
}

#[pyfunction]
#[pyo3(signature = (v, z, tolerance = verify::HALFLINE_TOLERANCE))]
fn verify_ratio_1d(v: &PyPotential1D, z: Complex64, tolerance: f64) -> PyResult<PyIdentityReport> {
    Ok(report(verify::ratio_1d_with_tolerance(&v.inner, &point(z)?, &Settings::default(), tolerance).map_err(to_py)?))
}

/// Dirichlet-to-Neumann value m_ℓ(z) of one angular mode.
#[pyfunction]
fn dtn_mode(v: &PyRadialPotential, ell: i64, z: Complex64) -> PyResult<Complex64> {
    disk::dtn_mode(ell, &v.inner, &point(z)?, &Settings::default()).map_err(to_py)
}

/// Neumann-to-Dirichlet value n_ℓ(z) of one angular mode.
#[pyfunction]
fn ntd_mode(v: &PyRadialPotential, ell: i64, z: Complex64) -> PyResult<Complex64> {
    disk::ntd_mode(ell, &v.inner, &point(z)?, &Settings::default()).map_err(to_py)
}

/// All per-mode quantities of angular mode ℓ as a dict.
#[pyfunction]
#[pyo3(signature = (v, ell, z, n_panels = 8, nodes_per_panel = 25))]
fn mode_data<'py>(
    py: Python<'py>,
    v: &PyRadialPotential,
    ell: i64,
    z: Complex64,
    n_panels: usize,
    nodes_per_panel: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let pt = point(z)?;
    let s = disk_settings(n_panels, nodes_per_panel);
    let grid = v.inner.grid(n_panels, nodes_per_panel).map_err(to_py)?;
    let m = ModeData::compute(ell, &v.inner, &pt, &grid, &s).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("ell", m.ell)?;
    for (k, val) in [
        ("m", m.m_ell),
        ("m0", m.m0_ell),
        ("n", m.n_ell),
        ("d", m.d_ell),
        ("b", m.b_ell),
        ("dtn_difference", m.dtn_difference),
        ("det2_dirichlet", m.det2_d_ell),
        ("det2_neumann", m.det2_n_ell),
        ("tau", m.tau_ell),
        ("c", m.c_ell),
        ("tau_prime", m.tau_prime_ell),
    ] {
        d.set_item(k, val)?;
    }
    Ok(d)
}

/// Q1 = Q2 = Q3 for the disk, assembled over |ℓ| ≤ l_max.
#[pyfunction]
#[pyo3(signature = (v, z, l_max = 40, n_panels = 8, nodes_per_panel = 25))]
fn verify_theorem_4_2(
    py: Python<'_>,
    v: &PyRadialPotential,
    z: Complex64,
    l_max: i64,
    n_panels: usize,
    nodes_per_panel: usize,
) -> PyResult<PyIdentityReport> {
    let pt = point(z)?;
    let s = disk_settings(n_panels, nodes_per_panel);
    let grid = v.inner.grid(n_panels, nodes_per_panel).map_err(to_py)?;
    let r = py.detach(|| verify::verify_theorem_4_2(&v.inner, &pt, l_max, &grid, &s));
    Ok(report(r.map_err(to_py)?))
}

/// The D/N-swapped reduction together with reciprocity against Q1.
#[pyfunction]
#[pyo3(signature = (v, z, l_max = 40, n_panels = 8, nodes_per_panel = 25))]
fn verify_eq_4_37(
    py: Python<'_>,
    v: &PyRadialPotential,
    z: Complex64,
    l_max: i64,
    n_panels: usize,
    nodes_per_panel: usize,
) -> PyResult<PyIdentityReport> {
    let pt = point(z)?;
    let s = disk_settings(n_panels, nodes_per_panel);
    let grid = v.inner.grid(n_panels, nodes_per_panel).map_err(to_py)?;
    let r = py.detach(|| verify::verify_eq_4_37(&v.inner, &pt, l_max, &grid, &s));
    Ok(report(r.map_err(to_py)?))
}

/// Eigenvalues in (z_min, z_max) as zeros of a boundary scalar, with the
/// finite-difference oracle alongside. Pass a RadialPotential with `ell`
/// for a disk mode.
#[pyfunction]
#[pyo3(signature = (v, bc, z_min, z_max, n_samples = 80, ell = 0))]
fn eigenvalue_scan<'py>(
    py: Python<'py>,
    v: &Bound<'py, PyAny>,
    bc: &str,
    z_min: f64,
    z_max: f64,
    n_samples: usize,
    ell: i64,
) -> PyResult<Bound<'py, PyDict>> {
    let bc = parse_bc(bc)?;
    let s = Settings::default();
    let result = if let Ok(h) = v.cast::<PyPotential1D>() {
        let h = h.get().inner.clone();
        py.detach(|| verify::eigenvalue_scan(&ScanProblem::Halfline { v: &h, bc }, (z_min, z_max), n_samples, &s))
    } else if let Ok(r) = v.cast::<PyRadialPotential>() {
        let r = r.get().inner.clone();
        py.detach(|| verify::eigenvalue_scan(&ScanProblem::DiskMode { v: &r, ell, bc }, (z_min, z_max), n_samples, &s))
    } else {
        return Err(PyValueError::new_err("v must be a Potential1D or a RadialPotential"));
    }
    .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("problem", &result.problem)?;
    d.set_item("roots", &result.roots)?;
    d.set_item("root_residuals", &result.root_residuals)?;
    d.set_item("oracle_values", &result.oracle_values)?;
    d.set_item("rejected_poles", &result.rejected_poles)?;
    d.set_item("ill_conditioned", result.ill_conditioned)?;
    d.set_item("max_mismatch", result.max_mismatch())?;
    Ok(d)
}

#[pymodule]
fn detlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DetlabError", m.py().get_type::<DetlabError>())?;
    m.add("SpectralError", m.py().get_type::<SpectralError>())?;
    m.add_class::<PyPotential1D>()?;
    m.add_class::<PyRadialPotential>()?;
    m.add_class::<PyIdentityReport>()?;
    m.add_function(wrap_pyfunction!(m_function, m)?)?;
    m.add_function(wrap_pyfunction!(jost_function, m)?)?;
    m.add_function(wrap_pyfunction!(fredholm_det, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_scalar, m)?)?;
    m.add_function(wrap_pyfunction!(verify_jost_pais, m)?)?;
    m.add_function(wrap_pyfunction!(verify_ratio_1d, m)?)?;
    m.add_function(wrap_pyfunction!(dtn_mode, m)?)?;
    m.add_function(wrap_pyfunction!(ntd_mode, m)?)?;
    m.add_function(wrap_pyfunction!(mode_data, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem_4_2, m)?)?;
    m.add_function(wrap_pyfunction!(verify_eq_4_37, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalue_scan, m)?)?;
    Ok(())
}
