use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tdcount_core::bigfloat::decimal_digits_for;
use tdcount_core::counter::{Branching, Status};
use tdcount_core::driver::{format_result_block, run, ModeSelect, Outcome, RunConfig};
use tdcount_core::preprocess::PreprocessConfig;
use tdcount_core::semiring::CountValue;

fn seconds(value: Option<f64>, name: &str) -> PyResult<Option<Duration>> {
    match value {
        Some(s) if !(s.is_finite() && s > 0.0) => {
            Err(PyValueError::new_err(format!("{name} must be a positive number of seconds")))
        }
        Some(s) => Ok(Some(Duration::from_secs_f64(s))),
        None => Ok(None),
    }
}

/// Counts the models of a DIMACS formula.
///
/// Returns a dict with `type` ("mc" or "wmc"), `status` ("SATISFIABLE",
/// "UNSATISFIABLE" or "UNKNOWN" on timeout), `log10`, `count` (an int, plain
/// counting only), `value` (the weighted result as a decimal string) and
/// `block`, the result block the command-line tool prints.
#[pyfunction]
#[pyo3(signature = (
    dimacs,
    *,
    mode = "auto",
    timeout = None,
    td_time = None,
    td_import = None,
    preprocess = true,
    branching = "td",
    seed = 0,
    precision = 256,
    cache_mb = 2000,
))]
#[allow(clippy::too_many_arguments)]
fn count<'py>(
    py: Python<'py>,
    dimacs: &str,
    mode: &str,
    timeout: Option<f64>,
    td_time: Option<f64>,
    td_import: Option<&str>,
    preprocess: bool,
    branching: &str,
    seed: u64,
    precision: u32,
    cache_mb: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = match mode {
        "mc" => ModeSelect::Mc,
        "wmc" => ModeSelect::Wmc,
        "auto" => ModeSelect::Auto,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let branching = match branching {
        "td" => Branching::Td,
        "base" => Branching::Base,
        other => return Err(PyValueError::new_err(format!("unknown branching {other:?}"))),
    };
    if precision < 8 {
        return Err(PyValueError::new_err("precision must be at least 8 bits"));
    }
    let cfg = RunConfig {
        mode,
        td_time: seconds(td_time, "td_time")?,
        cache_mb,
        precision,
        seed,
        preprocess: preprocess.then(PreprocessConfig::default),
        branching,
        timeout: seconds(timeout, "timeout")?,
        keep_preprocessed: false,
    };
    let report = py
        .detach(|| run(dimacs.as_bytes(), td_import.map(str::as_bytes), &cfg))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;

    let out = PyDict::new(py);
    out.set_item("type", if report.weighted { "wmc" } else { "mc" })?;
    out.set_item("block", format_result_block(&report))?;
    match &report.outcome {
        Outcome::Timeout => {
            out.set_item("status", "UNKNOWN")?;
            out.set_item("log10", py.None())?;
            out.set_item("count", py.None())?;
            out.set_item("value", py.None())?;
        }
        Outcome::Counted { value, status } => {
            let status = match status {
                Status::Sat => "SATISFIABLE",
                Status::Unsat => "UNSATISFIABLE",
            };
            out.set_item("status", status)?;
            out.set_item("log10", value.log10())?;
            match value {
                CountValue::Exact(v) => {
                    out.set_item("count", v)?;
                    out.set_item("value", v.to_string())?;
                }
                CountValue::Weighted(v) => {
                    out.set_item("count", py.None())?;
                    out.set_item("value", v.to_decimal(decimal_digits_for(precision)))?;
                }
            }
        }
    }
    Ok(out)
}

#[pymodule]
fn tdcount(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    Ok(())
}
