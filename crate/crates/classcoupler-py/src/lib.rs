//! Python bindings: configure a model from JSON or a preset name, run
//! exact draws, and get the report back as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use classcoupler::config::{ModelConfig, PRESET_NAMES};
use classcoupler::driver::{run_and_summarize, BuiltModel, RunOptions, RunReport};

fn to_py_err(e: classcoupler::Error) -> PyErr {
    match e {
        classcoupler::Error::Config(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// Recursive JSON-to-Python conversion so reports arrive as native dicts.
fn value_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<PyObject> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.unbind().into()
            } else {
                n.as_f64()
                    .expect("JSON numbers are i64, u64, or f64")
                    .into_pyobject(py)?
                    .unbind()
                    .into()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.unbind().into(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.unbind().into()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, value_to_py(py, item)?)?;
            }
            dict.unbind().into()
        }
    })
}

fn report_document(
    config: &ModelConfig,
    model: &BuiltModel,
    opts: &RunOptions,
    report: &RunReport,
) -> serde_json::Value {
    serde_json::json!({
        "model": model.kind_name(),
        "model_config": config,
        "options": opts,
        "report": report,
    })
}

/// A configured model plus the machinery to draw from it exactly.
#[pyclass]
struct Sampler {
    config: ModelConfig,
    model: BuiltModel,
}

impl Sampler {
    fn from_config(config: ModelConfig) -> PyResult<Self> {
        let model = config.build().map_err(to_py_err)?;
        Ok(Self { config, model })
    }

    fn options(draws: u64, seed: u64, workers: usize, bins: usize, max_horizon: u64) -> RunOptions {
        RunOptions {
            draws,
            seed,
            workers,
            bins,
            max_horizon,
        }
    }
}

#[pymethods]
impl Sampler {
    /// Build from a JSON model description (the CLI's `--config` format).
    #[new]
    fn new(config_json: &str) -> PyResult<Self> {
        Self::from_config(ModelConfig::from_json(config_json).map_err(to_py_err)?)
    }

    /// Build one of the named built-in models.
    #[staticmethod]
    fn from_preset(name: &str) -> PyResult<Self> {
        Self::from_config(ModelConfig::preset(name).map_err(to_py_err)?)
    }

    /// Model family name, e.g. "single-mean" or "discrete-demo".
    fn kind(&self) -> &'static str {
        self.model.kind_name()
    }

    /// The configuration as a JSON string.
    fn config_json(&self) -> String {
        self.config.to_json()
    }

    /// Run independent exact draws and return the full report document
    /// (same shape as the CLI's JSON output).
    #[pyo3(signature = (draws=10_000, seed=1, workers=1, bins=0, max_horizon=1<<22))]
    fn run(
        &self,
        py: Python<'_>,
        draws: u64,
        seed: u64,
        workers: usize,
        bins: usize,
        max_horizon: u64,
    ) -> PyResult<PyObject> {
        let opts = Self::options(draws, seed, workers, bins, max_horizon);
        let (report, _) = py
            .allow_threads(|| run_and_summarize(&self.model, &opts))
            .map_err(to_py_err)?;
        value_to_py(py, &report_document(&self.config, &self.model, &opts, &report))
    }

    /// Per-draw values as `{"columns": [...], "rows": [[...], ...]}`, the
    /// CSV layout: draw_index, bct, mh_steps, then the model's columns.
    #[pyo3(signature = (draws=1_000, seed=1, workers=1, max_horizon=1<<22))]
    fn draw_table(
        &self,
        py: Python<'_>,
        draws: u64,
        seed: u64,
        workers: usize,
        max_horizon: u64,
    ) -> PyResult<PyObject> {
        let opts = Self::options(draws, seed, workers, 0, max_horizon);
        let output = py
            .allow_threads(|| classcoupler::driver::run_draws(&self.model, &opts))
            .map_err(to_py_err)?;
        let mut columns = vec!["draw_index".to_string(), "bct".to_string(), "mh_steps".to_string()];
        columns.extend(self.model.column_names().iter().map(|c| c.to_string()));
        let rows: Vec<Vec<f64>> = output
            .outcomes
            .iter()
            .map(|o| {
                let mut row = vec![o.index as f64, o.bct as f64, o.mh_steps as f64];
                row.extend(self.model.column_values(&o.state));
                row
            })
            .collect();
        let dict = PyDict::new(py);
        dict.set_item("columns", columns)?;
        dict.set_item("rows", rows)?;
        dict.set_item("horizon_exceeded", output.horizon_exceeded.to_vec())?;
        Ok(dict.unbind().into())
    }

    fn __repr__(&self) -> String {
        format!("Sampler(kind='{}')", self.model.kind_name())
    }
}

/// Names accepted by [`Sampler::from_preset`] and `run_preset`.
#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    PRESET_NAMES.to_vec()
}

/// The configuration document of a built-in model, as a dict.
#[pyfunction]
fn preset_config(py: Python<'_>, name: &str) -> PyResult<PyObject> {
    let config = ModelConfig::preset(name).map_err(to_py_err)?;
    let value = serde_json::to_value(&config).expect("config serializes");
    value_to_py(py, &value)
}

/// One-call convenience: build a preset and run it.
#[pyfunction]
#[pyo3(signature = (name, draws=10_000, seed=1, workers=1, bins=0, max_horizon=1<<22))]
fn run_preset(
    py: Python<'_>,
    name: &str,
    draws: u64,
    seed: u64,
    workers: usize,
    bins: usize,
    max_horizon: u64,
) -> PyResult<PyObject> {
    Sampler::from_preset(name)?.run(py, draws, seed, workers, bins, max_horizon)
}

/// One-call convenience: parse a config JSON string and run it.
#[pyfunction]
#[pyo3(signature = (config_json, draws=10_000, seed=1, workers=1, bins=0, max_horizon=1<<22))]
fn run_config(
    py: Python<'_>,
    config_json: &str,
    draws: u64,
    seed: u64,
    workers: usize,
    bins: usize,
    max_horizon: u64,
) -> PyResult<PyObject> {
    Sampler::new(config_json)?.run(py, draws, seed, workers, bins, max_horizon)
}

#[pymodule]
fn classcoupler_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Sampler>()?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
