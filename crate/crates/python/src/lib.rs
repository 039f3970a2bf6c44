//! Python bindings for `modwalk`.
//!
//! Rationals cross the boundary as strings such as `"3/7"`, `"-2"` or `"inf"`.

use modwalk::chains::{
    sample_stationary_w, sample_stationary_x, sample_stationary_y, simulate_u, simulate_v,
    simulate_w, simulate_x, simulate_y, simulate_z, BoundaryTrajectory,
};
use modwalk::stats::{exact_distribution_w, exact_distribution_x, ks_distance, EmpiricalDistribution};
use modwalk::tiling::{cayley_ball as ball, reduce_to_fundamental, reduce_to_fundamental_f64};
use modwalk::{
    BoundaryValue, ContinuedFraction, DyadicRational, ExtendedRational, FloatPoint, Mode,
    PlaneValue, ProjectiveMatrix, UpperHalfPoint, WalkConfig,
};
use num_bigint::{BigInt, BigUint};
use pyo3::exceptions::{PyMemoryError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: modwalk::Error) -> PyErr {
    if e.is_resource() {
        PyMemoryError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse(s: &str) -> PyResult<ExtendedRational> {
    s.parse().map_err(to_py)
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "exact" => Ok(Mode::Exact),
        "float" => Ok(Mode::Float),
        other => Err(PyValueError::new_err(format!("mode must be 'exact' or 'float', got {other:?}"))),
    }
}

fn dyadic_pair(d: DyadicRational) -> (BigInt, u64) {
    (d.numer().clone(), d.exponent())
}

fn boundary_values(runs: Vec<BoundaryTrajectory>) -> Vec<Vec<String>> {
    runs.into_iter()
        .map(|t| t.values.iter().map(ToString::to_string).collect())
        .collect()
}

/// `?(x)` as a reduced fraction string.
#[pyfunction]
fn qmark(x: &str) -> PyResult<String> {
    Ok(modwalk::qmark(&parse(x)?).map_err(to_py)?.to_rational().to_string())
}

/// `?(x)` as `(numerator, k)` with value `numerator / 2^k`.
#[pyfunction]
fn qmark_dyadic(x: &str) -> PyResult<(BigInt, u64)> {
    Ok(dyadic_pair(modwalk::qmark(&parse(x)?).map_err(to_py)?))
}

#[pyfunction]
fn qmark_float(x: f64) -> PyResult<f64> {
    modwalk::minkowski::qmark_f64(x).map_err(to_py)
}

/// Inverse of `?` on a dyadic `numerator / 2^k`.
#[pyfunction]
fn qmark_inverse(numerator: BigInt, k: u64) -> PyResult<String> {
    Ok(modwalk::qmark_inverse(&DyadicRational::new(numerator, k)).map_err(to_py)?.to_string())
}

#[pyfunction]
fn chi_half(y: &str) -> PyResult<String> {
    Ok(modwalk::chi_half(&parse(y)?).map_err(to_py)?.to_rational().to_string())
}

#[pyfunction]
fn lambda_survival(x: &str) -> PyResult<String> {
    Ok(modwalk::lambda_survival(&parse(x)?).map_err(to_py)?.to_rational().to_string())
}

/// A finite continued fraction `[head; tail...]`.
#[pyclass(name = "ContinuedFraction", frozen)]
struct PyContinuedFraction(ContinuedFraction);

#[pymethods]
impl PyContinuedFraction {
    #[new]
    fn new(head: BigUint, tail: Vec<BigUint>) -> PyResult<Self> {
        Ok(Self(ContinuedFraction::new(head, tail).map_err(to_py)?.canonicalize()))
    }

    #[staticmethod]
    fn expand(x: &str) -> PyResult<Self> {
        Ok(Self(modwalk::cfrac::expand(&parse(x)?).map_err(to_py)?))
    }

    #[getter]
    fn head(&self) -> BigUint {
        self.0.head().clone()
    }

    #[getter]
    fn tail(&self) -> Vec<BigUint> {
        self.0.tail().to_vec()
    }

    fn value(&self) -> String {
        self.0.value().to_string()
    }

    fn convergents(&self) -> Vec<String> {
        self.0.convergents().iter().map(ToString::to_string).collect()
    }

    fn __repr__(&self) -> String {
        format!("ContinuedFraction({})", self.0)
    }
}

/// An element of PSL(2,Z).
#[pyclass(name = "Matrix", frozen, eq)]
#[derive(PartialEq)]
struct PyMatrix(ProjectiveMatrix);

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> PyResult<Self> {
        Ok(Self(ProjectiveMatrix::new(a, b, c, d).map_err(to_py)?))
    }

    #[staticmethod]
    fn generators() -> Vec<Self> {
        ProjectiveMatrix::generators().into_iter().map(Self).collect()
    }

    #[getter]
    fn entries(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        let [a, b, c, d] = self.0.entries();
        (a.clone(), b.clone(), c.clone(), d.clone())
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(self.0.multiply(&other.0))
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    /// Möbius action on a boundary point.
    fn apply(&self, x: &str) -> PyResult<String> {
        Ok(self.0.mobius_real(&parse(x)?).to_string())
    }

    fn __repr__(&self) -> String {
        format!("Matrix({})", self.0.label())
    }
}

fn plane_start(re: &str, im: &str) -> PyResult<UpperHalfPoint> {
    UpperHalfPoint::from_parts(&parse(re)?, &parse(im)?).map_err(to_py)
}

/// Seeded trajectories of chain `X`, `Y`, `W`, `U`, `Z` or `V`.
///
/// Boundary chains start at `start`; plane chains at `start_re + i·start_im`.
/// Returns one list of value strings per trajectory.
#[pyfunction]
#[pyo3(signature = (chain, seed, steps, trajectories, start=None, start_re="0", start_im="1", mode=None))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    chain: &str,
    seed: u64,
    steps: usize,
    trajectories: usize,
    start: Option<&str>,
    start_re: &str,
    start_im: &str,
    mode: Option<&str>,
) -> PyResult<Vec<Vec<String>>> {
    let plane = matches!(chain, "Z" | "V");
    let mode = parse_mode(mode.unwrap_or(if plane { "float" } else { "exact" }))?;
    let cfg = WalkConfig::new(seed, steps, trajectories, mode);
    if plane {
        let z0 = plane_start(start_re, start_im)?;
        let runs = py.detach(|| if chain == "Z" { simulate_z(&z0, &cfg) } else { simulate_v(&z0, &cfg) });
        return Ok(runs
            .into_iter()
            .map(|t| t.values.iter().map(PlaneValue::to_string).collect())
            .collect());
    }
    if !matches!(chain, "X" | "Y" | "W" | "U") {
        return Err(PyValueError::new_err(format!("unknown chain {chain:?}")));
    }
    let x0 = parse(start.unwrap_or("0"))?;
    let runs = py.detach(|| match chain {
        "X" => Ok(simulate_x(&x0, &cfg)),
        "Y" => Ok(simulate_y(&x0, &cfg)),
        "W" => simulate_w(&x0, &cfg),
        _ => simulate_u(&x0, &cfg),
    });
    Ok(boundary_values(runs.map_err(to_py)?))
}

/// Samples from the stationary law of `W`, `Y` or `X`, truncated at `depth`.
#[pyfunction]
#[pyo3(signature = (chain, seed, count, depth=64, mode="exact"))]
fn sample_stationary(py: Python<'_>, chain: &str, seed: u64, count: usize, depth: usize, mode: &str) -> PyResult<Vec<String>> {
    if !matches!(chain, "W" | "Y" | "X") {
        return Err(PyValueError::new_err(format!("unknown stationary chain {chain:?}")));
    }
    let cfg = WalkConfig::new(seed, 0, count, parse_mode(mode)?);
    let batch = py
        .detach(|| match chain {
            "W" => sample_stationary_w(&cfg, depth),
            "Y" => sample_stationary_y(&cfg, depth),
            _ => sample_stationary_x(&cfg, depth),
        })
        .map_err(to_py)?;
    Ok(batch.samples.iter().map(BoundaryValue::to_string).collect())
}

/// Kolmogorov–Smirnov distance of exact samples to `qmark`, `chi` or `lambda`.
#[pyfunction]
fn ks_statistic(py: Python<'_>, samples: Vec<String>, reference: &str) -> PyResult<f64> {
    let reference = reference.parse().map_err(to_py)?;
    let values = samples.iter().map(|s| parse(s)).collect::<PyResult<Vec<_>>>()?;
    py.detach(|| {
        let emp = EmpiricalDistribution::from_exact(values)?;
        Ok(ks_distance(&emp, reference)?.statistic)
    })
    .map_err(to_py)
}

/// Exact law of `X_n` or `W_n` as `(value, weight)` string pairs.
#[pyfunction]
fn exact_distribution(chain: &str, start: &str, steps: usize) -> PyResult<Vec<(String, String)>> {
    let x0 = parse(start)?;
    let dist = match chain {
        "X" => exact_distribution_x(&x0, steps),
        "W" => exact_distribution_w(&x0, steps),
        other => return Err(PyValueError::new_err(format!("exact laws exist for X and W, not {other:?}"))),
    }
    .map_err(to_py)?;
    Ok(dist.atoms().iter().map(|(x, w)| (x.to_string(), w.to_string())).collect())
}

type Ball = (Vec<PyMatrix>, Vec<(usize, usize)>);

/// Ball of the tiling graph: `(vertices, edges)` with vertices as matrices.
#[pyfunction]
fn cayley_ball(py: Python<'_>, radius: usize) -> PyResult<Ball> {
    let g = py.detach(|| ball(radius)).map_err(to_py)?;
    Ok((g.vertices().iter().cloned().map(PyMatrix).collect(), g.edges().to_vec()))
}

/// Reduction of `re + i·im` to the fundamental domain.
///
/// Exact when both parts parse as rationals, otherwise in floating point.
/// Returns `(tile, reduced_point, on_boundary)`.
#[pyfunction]
fn reduce(re: &str, im: &str) -> PyResult<(PyMatrix, String, bool)> {
    if let (Ok(x), Ok(y)) = (re.parse::<ExtendedRational>(), im.parse::<ExtendedRational>()) {
        let r = reduce_to_fundamental(&UpperHalfPoint::from_parts(&x, &y).map_err(to_py)?);
        return Ok((PyMatrix(r.tile), r.point.to_string(), r.on_boundary));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| PyValueError::new_err(format!("cannot parse {s:?}")));
    let z = FloatPoint::new(num(re)?, num(im)?).map_err(to_py)?;
    let r = reduce_to_fundamental_f64(z).map_err(to_py)?;
    Ok((PyMatrix(r.tile), r.point.to_string(), r.on_boundary))
}

#[pymodule]
fn modwalk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyContinuedFraction>()?;
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(qmark, m)?)?;
    m.add_function(wrap_pyfunction!(qmark_dyadic, m)?)?;
    m.add_function(wrap_pyfunction!(qmark_float, m)?)?;
    m.add_function(wrap_pyfunction!(qmark_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(chi_half, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_survival, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(sample_stationary, m)?)?;
    m.add_function(wrap_pyfunction!(ks_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(exact_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(cayley_ball, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    Ok(())
}
