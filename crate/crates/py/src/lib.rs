//! Python bindings: models, the twelve checks, derived automata, the oracle
//! and the generator.

use desv_core::artifact::{build_artifact, Artifact};
use desv_core::io::{export_dot, parse_model, serialize_model};
use desv_core::oracle::{
    bounded_definitional_search, random_lfsa, validate_witness, DefinitionalClaim, GeneratorParams,
    PropertyInstance,
};
use desv_core::{gallery, AnnotatedModel, FaultSpec, PropertyKind, SecretSpec, Witness};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn property(name: &str) -> PyResult<PropertyKind> {
    name.parse().map_err(value_error)
}

/// A labeled finite-state automaton with fault events and secret states.
#[pyclass(module = "desv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Model {
    inner: AnnotatedModel,
}

#[pymethods]
impl Model {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = parse_model(text).map_err(value_error)?;
        Ok(Model { inner })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| value_error(format!("{path}: {e}")))?;
        Model::from_json(&text)
    }

    /// One of the bundled examples `s1` … `s7`.
    #[staticmethod]
    fn example(name: &str) -> PyResult<Self> {
        gallery::all()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, inner)| Model { inner })
            .ok_or_else(|| value_error(format!("no example named `{name}`")))
    }

    fn to_json(&self) -> String {
        serialize_model(&self.inner)
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.lfsa.state_names().to_vec()
    }

    #[getter]
    fn events(&self) -> Vec<String> {
        self.inner.lfsa.event_names().to_vec()
    }

    #[getter]
    fn secrets(&self) -> Vec<String> {
        let m = &self.inner.lfsa;
        self.inner.secrets.states().iter().map(|q| m.state_name(q).to_string()).collect()
    }

    #[getter]
    fn faults(&self) -> Vec<String> {
        let m = &self.inner.lfsa;
        self.inner.faults.events().map(|e| m.event_name(e).to_string()).collect()
    }

    fn with_secrets(&self, names: Vec<String>) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        inner.secrets = SecretSpec::from_names(&inner.lfsa, names.iter().map(String::as_str)).map_err(value_error)?;
        Ok(Model { inner })
    }

    fn with_faults(&self, names: Vec<String>) -> PyResult<Self> {
        let mut inner = self.inner.clone();
        inner.faults = FaultSpec::from_names(&inner.lfsa, names.iter().map(String::as_str)).map_err(value_error)?;
        Ok(Model { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(states={}, events={}, transitions={})",
            self.inner.lfsa.num_states(),
            self.inner.lfsa.num_events(),
            self.inner.lfsa.transitions().len()
        )
    }
}

#[pyclass(module = "desv", frozen, get_all)]
struct Verdict {
    property: String,
    holds: bool,
    k: Option<u64>,
    effective_k: Option<u64>,
    /// The witness as JSON, present exactly when the property fails.
    witness: Option<String>,
    observer_states: usize,
    product_states: usize,
    document: String,
}

#[pymethods]
impl Verdict {
    fn to_json(&self) -> String {
        self.document.clone()
    }

    fn __bool__(&self) -> bool {
        self.holds
    }

    fn __repr__(&self) -> String {
        format!("Verdict({}, holds={})", self.property, self.holds)
    }
}

#[pyfunction]
#[pyo3(signature = (model, property_name, k = None))]
fn verify(model: &Model, property_name: &str, k: Option<u64>) -> PyResult<Verdict> {
    let kind = property(property_name)?;
    let v = desv_core::verify(&model.inner, kind, k).map_err(value_error)?;
    Ok(Verdict {
        property: kind.name().to_string(),
        holds: v.holds,
        k: v.k,
        effective_k: v.effective_k,
        witness: v.witness.as_ref().map(Witness::to_json),
        observer_states: v.observer_states,
        product_states: v.product_states,
        document: v.to_document(&model.inner, None).to_json(),
    })
}

/// A derived automaton as DOT text, or as JSON with `format="json"`.
#[pyfunction]
#[pyo3(signature = (model, artifact, fault = None, format = "dot"))]
fn build(model: &Model, artifact: &str, fault: Option<&str>, format: &str) -> PyResult<String> {
    let a: Artifact = artifact.parse().map_err(value_error)?;
    let view = build_artifact(&model.inner, a, fault).map_err(value_error)?;
    match format {
        "dot" => Ok(export_dot(&view)),
        "json" => Ok(view.to_json()),
        other => Err(value_error(format!("unknown format `{other}`"))),
    }
}

/// A counterexample of length at most `bound` as JSON, or `None`.
#[pyfunction]
#[pyo3(signature = (model, property_name, bound, k = None))]
fn oracle(model: &Model, property_name: &str, bound: usize, k: Option<u64>) -> PyResult<Option<String>> {
    let instance = PropertyInstance {
        property: property(property_name)?,
        k,
    };
    let found = bounded_definitional_search(&model.inner, instance, bound).map_err(value_error)?;
    Ok(found.map(|c| Witness::Counterexample(c).to_json()))
}

/// Checks a JSON witness against the definition; returns `(valid, explanation)`.
#[pyfunction]
#[pyo3(signature = (model, property_name, witness, k = None))]
fn validate(model: &Model, property_name: &str, witness: &str, k: Option<u64>) -> PyResult<(bool, String)> {
    let claim = DefinitionalClaim {
        instance: PropertyInstance {
            property: property(property_name)?,
            k,
        },
        witness: Witness::from_json(witness).map_err(value_error)?,
    };
    let c = validate_witness(&model.inner, &claim).map_err(value_error)?;
    Ok((c.valid, c.explanation))
}

#[pyfunction]
#[pyo3(signature = (states, events, seed, live = false, divergence_free = false, appendix_scope = false))]
fn generate(
    states: usize,
    events: usize,
    seed: u64,
    live: bool,
    divergence_free: bool,
    appendix_scope: bool,
) -> PyResult<Model> {
    let mut p = GeneratorParams::new(states, events, seed);
    p.live = live;
    p.divergence_free = divergence_free;
    p.appendix_scope = appendix_scope;
    let inner = random_lfsa(&p).map_err(value_error)?;
    Ok(Model { inner })
}

#[pyfunction]
fn properties() -> Vec<&'static str> {
    PropertyKind::ALL.iter().map(|p| p.name()).collect()
}

#[pymodule]
fn desv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Verdict>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(properties, m)?)?;
    Ok(())
}
