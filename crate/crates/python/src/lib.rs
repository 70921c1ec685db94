//! Python bindings for `mrlife`.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mrlife::io::{self, RunConfig, RunMode, SimSpec};
use mrlife::numeric::Grid;
use mrlife::survival::DistSpec;

fn py_err(e: mrlife::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dist(family: &str, params: &[f64]) -> PyResult<DistSpec> {
    DistSpec::from_parts(family, params).map_err(py_err)
}

/// Mean residual life of a named family at `t >= 0`.
#[pyfunction]
pub fn parametric_mrl(family: &str, params: Vec<f64>, t: f64) -> PyResult<f64> {
    dist(family, &params)?.mrl(t).map_err(py_err)
}

/// `(density, survival, hazard)` at `t > 0`.
#[pyfunction]
pub fn eval_core(family: &str, params: Vec<f64>, t: f64) -> PyResult<(f64, f64, f64)> {
    let v = dist(family, &params)?.eval_core(t).map_err(py_err)?;
    Ok((v.density, v.survival, v.hazard))
}

/// Density, survival, hazard and MRL on a log-spaced grid, plus the MRL shape.
#[pyfunction]
#[pyo3(signature = (family, params, lo, hi, n=200))]
pub fn catalog<'py>(
    py: Python<'py>,
    family: &str,
    params: Vec<f64>,
    lo: f64,
    hi: f64,
    n: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = Grid::log_spaced(lo, hi, n).map_err(py_err)?;
    let c = io::catalog(&dist(family, &params)?, &grid).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("t", c.rows.iter().map(|r| r.t).collect::<Vec<_>>())?;
    out.set_item("density", c.rows.iter().map(|r| r.density).collect::<Vec<_>>())?;
    out.set_item("survival", c.rows.iter().map(|r| r.survival).collect::<Vec<_>>())?;
    out.set_item("hazard", c.rows.iter().map(|r| r.hazard).collect::<Vec<_>>())?;
    out.set_item("mrl", c.rows.iter().map(|r| r.mrl).collect::<Vec<_>>())?;
    out.set_item("shape", c.shape.as_str())?;
    Ok(out)
}

/// Times and censoring flags from the `sim1` or `sim2` preset.
#[pyfunction]
#[pyo3(signature = (preset, seed=1))]
pub fn simulate(preset: &str, seed: u64) -> PyResult<(Vec<f64>, Vec<bool>)> {
    let d = io::simulate(&SimSpec::preset(preset, seed).map_err(py_err)?).map_err(py_err)?;
    Ok((d.times().to_vec(), d.censored().to_vec()))
}

/// `(L, captured mass)` for DP precision `alpha` and tail mass `eps`.
#[pyfunction]
pub fn truncation_level(alpha: f64, eps: f64) -> PyResult<(usize, f64)> {
    mrlife::mixture::truncation_level(alpha, eps).map_err(py_err)
}

/// Elicited DPMM hyperparameters as a dict.
#[pyfunction]
pub fn elicit<'py>(py: Python<'py>, center: f64, range: f64, q_e: f64, q_v: f64) -> PyResult<Bound<'py, PyDict>> {
    let e = mrlife::mixture::elicit_hyperparameters(center, range, q_e, q_v).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("a_mu", e.hyper.a_mu.to_vec())?;
    out.set_item("b_prime", e.b_prime)?;
    out.set_item("a_sigma", e.hyper.a_sigma)?;
    out.set_item("target_mean", e.target_mean)?;
    out.set_item("target_variance", e.target_variance)?;
    Ok(out)
}

/// Runs a JSON config (`mode` is "fit" or "compare") and returns the output folder.
#[pyfunction]
#[pyo3(signature = (config, mode="fit", output_dir=None))]
pub fn run(config: PathBuf, mode: &str, output_dir: Option<PathBuf>) -> PyResult<String> {
    let mode = match mode {
        "fit" => RunMode::Fit,
        "compare" => RunMode::Compare,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let mut cfg = RunConfig::from_file(&config).map_err(py_err)?;
    if let Some(o) = output_dir {
        cfg.output_dir = o;
    }
    let rep = io::run(&cfg, mode).map_err(py_err)?;
    Ok(rep.output_dir.display().to_string())
}

#[pymodule]
fn mrlife_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(parametric_mrl, m)?)?;
    m.add_function(wrap_pyfunction!(eval_core, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(truncation_level, m)?)?;
    m.add_function(wrap_pyfunction!(elicit, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
