// SPDX-License-Identifier: Apache-2.0
//! Python bindings for the adaptation compiler.

use std::path::PathBuf;

use adaptforge_core::adapt::{format_rules, parse_rules, validate_rules, RulesModel};
use adaptforge_core::context::{parse_context_file, serialize_context, validate_context, ContextModel};
use adaptforge_core::diagnostic;
use adaptforge_core::pipeline::{self, GenerateOptions, PipelineError, UserSelection};
use adaptforge_core::schema::SchemaRegistry;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(adaptforge, AdaptforgeError, PyValueError);
create_exception!(adaptforge, UsageError, AdaptforgeError);

fn to_py(e: PipelineError) -> PyErr {
    if e.is_usage() {
        UsageError::new_err(e.to_string())
    } else {
        AdaptforgeError::new_err(e.to_string())
    }
}

/// One finding from validation, planning or transformation.
#[pyclass(frozen, name = "Diagnostic")]
struct PyDiagnostic(diagnostic::Diagnostic);

#[pymethods]
impl PyDiagnostic {
    #[getter]
    fn severity(&self) -> String {
        self.0.severity.to_string()
    }

    #[getter]
    fn code(&self) -> &str {
        &self.0.code
    }

    #[getter]
    fn message(&self) -> &str {
        &self.0.message
    }

    #[getter]
    fn location(&self) -> Option<&str> {
        self.0.location.as_deref()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("<Diagnostic {}>", self.0)
    }
}

fn wrap(diags: Vec<diagnostic::Diagnostic>) -> Vec<PyDiagnostic> {
    diags.into_iter().map(PyDiagnostic).collect()
}

/// A parsed `.adapt` document.
#[pyclass(frozen, name = "Rules")]
struct PyRules(RulesModel);

#[pymethods]
impl PyRules {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_rules(text)
            .map(Self)
            .map_err(|e| AdaptforgeError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        pipeline::load_rules(&path).map(Self).map_err(to_py)
    }

    fn rule_ids(&self) -> Vec<String> {
        self.0.rule_ids().into_iter().map(String::from).collect()
    }

    fn format(&self) -> String {
        format_rules(&self.0)
    }

    fn validate(&self) -> Vec<PyDiagnostic> {
        wrap(validate_rules(&self.0, &SchemaRegistry::builtin()))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __len__(&self) -> usize {
        self.0.rules.len()
    }
}

/// A parsed `.ctx.json` document.
#[pyclass(frozen, name = "Context")]
struct PyContext(ContextModel);

#[pymethods]
impl PyContext {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_context_file(text)
            .map(Self)
            .map_err(|e| AdaptforgeError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        pipeline::load_context(&path).map(Self).map_err(to_py)
    }

    fn users(&self) -> Vec<String> {
        self.0.list_users().into_iter().map(String::from).collect()
    }

    fn serialize(&self) -> String {
        serialize_context(&self.0)
    }

    fn validate(&self) -> Vec<PyDiagnostic> {
        wrap(validate_context(&self.0, &SchemaRegistry::builtin()))
    }

    /// Trace of how `rule` evaluates for `user`.
    fn explain(&self, rules: &PyRules, user: &str, rule: &str) -> PyResult<String> {
        pipeline::explain_models(&self.0, &rules.0, user, rule).map_err(to_py)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

/// One generated variant.
#[pyclass(frozen, name = "Variant")]
struct PyVariant(pipeline::Variant);

#[pymethods]
impl PyVariant {
    #[getter]
    fn user_id(&self) -> &str {
        &self.0.user_id
    }

    #[getter]
    fn dir(&self) -> PathBuf {
        self.0.dir.clone()
    }

    #[getter]
    fn files(&self) -> Vec<String> {
        self.0.files.keys().cloned().collect()
    }

    #[getter]
    fn diagnostics(&self) -> Vec<PyDiagnostic> {
        wrap(self.0.diagnostics.clone())
    }

    /// Bytes of one variant file, decoded as UTF-8.
    fn read(&self, path: &str) -> Option<String> {
        self.0
            .files
            .get(path)
            .map(|b| String::from_utf8_lossy(b).into_owned())
    }

    fn manifest_json(&self) -> Option<String> {
        self.0.manifest.as_ref().map(|m| m.to_json())
    }
}

#[pyclass(frozen, name = "Report")]
struct PyReport(pipeline::RunReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn variants(&self) -> Vec<PyVariant> {
        self.0.variants.iter().cloned().map(PyVariant).collect()
    }

    #[getter]
    fn diagnostics(&self) -> Vec<PyDiagnostic> {
        wrap(self.0.all_diagnostics().cloned().collect())
    }

    fn has_errors(&self) -> bool {
        self.0.has_errors()
    }

    fn plans_json(&self) -> String {
        self.0.plans_json()
    }
}

/// Generates one variant per selected user under `out`.
#[pyfunction]
#[pyo3(signature = (app, context, rules, out, user=None, dry_run=false, parallel=true))]
fn generate(
    py: Python<'_>,
    app: PathBuf,
    context: PathBuf,
    rules: PathBuf,
    out: PathBuf,
    user: Option<String>,
    dry_run: bool,
    parallel: bool,
) -> PyResult<PyReport> {
    let options = GenerateOptions {
        users: user.map_or(UserSelection::All, UserSelection::One),
        dry_run,
        parallel,
        ..GenerateOptions::default()
    };
    py.detach(|| pipeline::generate(&app, &context, &rules, &out, &options))
        .map(PyReport)
        .map_err(to_py)
}

#[pyfunction]
fn check(app: PathBuf, context: PathBuf, rules: PathBuf) -> PyResult<Vec<PyDiagnostic>> {
    pipeline::check(&app, &context, &rules).map(wrap).map_err(to_py)
}

#[pyfunction]
fn explain(context: PathBuf, rules: PathBuf, user: &str, rule: &str) -> PyResult<String> {
    pipeline::explain(&context, &rules, user, rule).map_err(to_py)
}

#[pyfunction]
fn diff(app: PathBuf, variant: PathBuf) -> PyResult<String> {
    pipeline::diff_dirs(&app, &variant).map_err(to_py)
}

/// Hash mismatches between a variant directory and its manifest.
#[pyfunction]
fn verify_manifest(variant: PathBuf) -> PyResult<Vec<String>> {
    pipeline::verify_manifest(&variant).map_err(to_py)
}

#[pymodule]
fn adaptforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("AdaptforgeError", m.py().get_type::<AdaptforgeError>())?;
    m.add("UsageError", m.py().get_type::<UsageError>())?;
    m.add_class::<PyDiagnostic>()?;
    m.add_class::<PyRules>()?;
    m.add_class::<PyContext>()?;
    m.add_class::<PyVariant>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(explain, m)?)?;
    m.add_function(wrap_pyfunction!(diff, m)?)?;
    m.add_function(wrap_pyfunction!(verify_manifest, m)?)?;
    Ok(())
}
