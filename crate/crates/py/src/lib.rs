//! Python bindings: the closed-form constants, parameter validation, and
//! the quadrature-backed verification entry points.

// The pyfunction macro expansion converts PyErr into itself.
#![allow(clippy::useless_conversion)]

use hardy_sharp::constants;
use hardy_sharp::error::HardyError;
use hardy_sharp::operator::FunctionRep;
use hardy_sharp::params::{self, Exponents, Mode, ProductParams};
use hardy_sharp::quadrature::QuadratureSpec;
use hardy_sharp::special;
use hardy_sharp::verify;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py_err(e: HardyError) -> PyErr {
    match e {
        HardyError::NonConvergence { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "thm1" => Ok(Mode::Thm1),
        "thm2" => Ok(Mode::Thm2),
        "lemma2" => Ok(Mode::Lemma2),
        "limit" => Ok(Mode::Limit),
        other => Err(PyValueError::new_err(format!(
            "unknown mode `{other}` (expected thm1|thm2|lemma2|limit)"
        ))),
    }
}

#[pyfunction]
fn log_gamma(x: f64) -> PyResult<f64> {
    special::log_gamma(x).map_err(to_py_err)
}

#[pyfunction]
fn beta(z: f64, w: f64) -> PyResult<f64> {
    special::beta(z, w).map_err(to_py_err)
}

#[pyfunction]
fn sphere_area(n: u32) -> f64 {
    special::sphere_area(n)
}

#[pyfunction]
fn ball_volume(n: u32, r: f64) -> f64 {
    special::ball_volume(n, r)
}

#[pyfunction]
fn thm_a_constant(p: f64, alpha: f64) -> PyResult<f64> {
    constants::thm_a_constant(p, alpha).map_err(to_py_err)
}

#[pyfunction]
fn thm_b_constant(n: u32, p: f64, beta: f64) -> PyResult<f64> {
    constants::thm_b_constant(n, p, beta).map_err(to_py_err)
}

#[pyfunction]
fn lemma2_constant(n: u32, p: f64, q: f64, gamma: f64) -> PyResult<f64> {
    constants::lemma2_constant(n, p, q, gamma).map_err(to_py_err)
}

#[pyfunction]
fn derive_alpha(n: u32, beta: f64, gamma: f64, p: f64, q: f64) -> PyResult<f64> {
    params::derive_alpha(n, beta, gamma, p, q).map_err(to_py_err)
}

/// Rows (eps, cstar, limit, gap) of the q -> p sweep.
#[pyfunction]
fn sweep_q_to_p(
    dims: Vec<u32>,
    gammas: Vec<f64>,
    p: f64,
    epsilons: Vec<f64>,
) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let rows = verify::sweep_q_to_p(&dims, &gammas, p, &epsilons).map_err(to_py_err)?;
    Ok(rows
        .iter()
        .map(|r| (r.eps, r.cstar, r.limit, r.gap))
        .collect())
}

/// One verification run, as seen from Python.
#[pyclass(name = "Report")]
#[derive(Clone)]
struct PyReport {
    #[pyo3(get)]
    params: String,
    #[pyo3(get)]
    constant: f64,
    #[pyo3(get)]
    ratio: f64,
    #[pyo3(get)]
    gap: f64,
    #[pyo3(get)]
    rel_gap: f64,
    #[pyo3(get)]
    quad_err_est: f64,
    #[pyo3(get)]
    function_id: String,
    #[pyo3(get)]
    seed: Option<u64>,
}

#[pymethods]
impl PyReport {
    /// The bound claim `ratio <= constant (1 + slack + quad_err_est)`.
    fn bound_ok(&self, slack: f64) -> bool {
        self.ratio <= self.constant * (1.0 + slack + self.quad_err_est)
    }

    fn __repr__(&self) -> String {
        format!(
            "Report(function_id='{}', constant={}, ratio={}, rel_gap={})",
            self.function_id, self.constant, self.ratio, self.rel_gap
        )
    }
}

impl From<verify::VerificationReport> for PyReport {
    fn from(r: verify::VerificationReport) -> Self {
        PyReport {
            params: r.params.summary(),
            constant: r.constant,
            ratio: r.ratio,
            gap: r.gap,
            rel_gap: r.rel_gap,
            quad_err_est: r.quad_err_est,
            function_id: r.function_id,
            seed: r.seed,
        }
    }
}

/// Axis entry: `(n, beta, gamma)` or `(n, beta, gamma, alpha)`.
#[derive(FromPyObject)]
enum AxisSpec {
    Four(u32, f64, f64, f64),
    Three(u32, f64, f64),
}

impl AxisSpec {
    fn parts(&self) -> (u32, f64, f64, Option<f64>) {
        match *self {
            AxisSpec::Three(n, beta, gamma) => (n, beta, gamma, None),
            AxisSpec::Four(n, beta, gamma, alpha) => (n, beta, gamma, Some(alpha)),
        }
    }
}

/// A validated problem instance.
///
/// Axes are `(n, beta, gamma)` or `(n, beta, gamma, alpha)` tuples; when
/// `alpha` is omitted it is derived from the compatibility relation. For
/// `thm1` the target exponent follows from the first axis when `q` is
/// omitted.
#[pyclass(name = "ProductInstance")]
struct PyProductInstance {
    inner: ProductParams,
}

#[pymethods]
impl PyProductInstance {
    #[new]
    #[pyo3(signature = (mode, p, axes, q = None))]
    fn new(mode: &str, p: f64, axes: Vec<AxisSpec>, q: Option<f64>) -> PyResult<Self> {
        let mode = parse_mode(mode)?;
        let axes: Vec<(u32, f64, f64, Option<f64>)> = axes.iter().map(AxisSpec::parts).collect();
        let q = match (q, mode) {
            (Some(q), _) => q,
            (None, Mode::Limit) => p,
            (None, Mode::Thm1) => {
                let (n, beta, _, _) = *axes
                    .first()
                    .ok_or_else(|| PyValueError::new_err("at least one axis required"))?;
                let inv_q = 1.0 / p - beta / n as f64;
                if inv_q <= 0.0 {
                    return Err(PyValueError::new_err(
                        "cannot derive q: 1/p - beta/n is not positive",
                    ));
                }
                1.0 / inv_q
            }
            (None, _) => return Err(PyValueError::new_err("this mode requires q")),
        };
        let axes = axes
            .into_iter()
            .map(|(n, beta, gamma, alpha)| {
                let alpha = match alpha {
                    Some(a) => a,
                    None => params::derive_alpha(n, beta, gamma, p, q).map_err(to_py_err)?,
                };
                Ok(params::AxisParams::new(n, beta, gamma, alpha))
            })
            .collect::<PyResult<Vec<_>>>()?;
        let exponents = Exponents::new(p, q).map_err(to_py_err)?;
        let inner = params::validate(&axes, exponents, mode).map_err(to_py_err)?;
        Ok(PyProductInstance { inner })
    }

    /// `(value, per_axis_factors)` of the governing constant.
    fn constant(&self) -> PyResult<(f64, Vec<f64>)> {
        let c = verify::mode_constant(&self.inner).map_err(to_py_err)?;
        Ok((c.value, c.per_axis_factors))
    }

    fn summary(&self) -> String {
        self.inner.summary()
    }

    /// Norm-ratio report for the mode's extremizer family.
    #[pyo3(signature = (rel_tol = None))]
    fn verify_extremal(&self, rel_tol: Option<f64>) -> PyResult<PyReport> {
        let mut spec = QuadratureSpec::default();
        if let Some(rt) = rel_tol {
            spec.rel_tol = rt;
        }
        let spec = spec.validated().map_err(to_py_err)?;
        let f = match self.inner.mode() {
            Mode::Thm1 => verify::extremizer_thm1(&self.inner),
            Mode::Thm2 | Mode::Lemma2 => verify::extremizer_thm2(&self.inner),
            Mode::Limit => {
                return Err(PyValueError::new_err(
                    "limit mode has no extremizer; its constant is a limit value",
                ))
            }
        };
        let report = verify::ratio(
            &FunctionRep::Separable(f),
            &self.inner,
            &spec,
            format!("extremal-{}", self.inner.mode()),
            None,
        )
        .map_err(to_py_err)?;
        Ok(report.into())
    }

    /// Norm-ratio report for a seeded random admissible function
    /// (`family` in {"powerBump", "logNormalBump", "mixture"}).
    #[pyo3(signature = (seed, family = "mixture"))]
    fn verify_random(&self, seed: u64, family: &str) -> PyResult<PyReport> {
        let family = match family {
            "powerBump" => verify::RandomFamily::PowerBump,
            "logNormalBump" => verify::RandomFamily::LogNormalBump,
            "mixture" => verify::RandomFamily::Mixture,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown family `{other}`"
                )))
            }
        };
        let f = verify::random_test_function(seed, &self.inner, family);
        let report = verify::ratio(
            &FunctionRep::Separable(f),
            &self.inner,
            &QuadratureSpec::default(),
            format!("random-{}-seed{seed}", family.id()),
            Some(seed),
        )
        .map_err(to_py_err)?;
        Ok(report.into())
    }

    /// `(cstar, eq5, gap)` against the non-sharp product-space bound
    /// (1-D axes, order zero only).
    fn compare_wly(&self) -> PyResult<(f64, f64, f64)> {
        let cmp = constants::compare_wly(&self.inner).map_err(to_py_err)?;
        Ok((cmp.cstar, cmp.eq5, cmp.gap))
    }

    fn __repr__(&self) -> String {
        format!("ProductInstance('{}')", self.inner.summary())
    }
}

#[pymodule]
fn hardy_sharp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(log_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_area, m)?)?;
    m.add_function(wrap_pyfunction!(ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(thm_a_constant, m)?)?;
    m.add_function(wrap_pyfunction!(thm_b_constant, m)?)?;
    m.add_function(wrap_pyfunction!(lemma2_constant, m)?)?;
    m.add_function(wrap_pyfunction!(derive_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_q_to_p, m)?)?;
    m.add_class::<PyProductInstance>()?;
    m.add_class::<PyReport>()?;
    Ok(())
}
