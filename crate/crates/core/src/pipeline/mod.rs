// SPDX-License-Identifier: Apache-2.0
//! End-to-end commands: generate variants, check an app against its
//! rules, explain a verdict, and diff a variant against its source.

mod diff;
mod manifest;
mod source;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::adapt::{parse_rules, validate_rules, KeySpec, Payload, RulesError, RulesModel};
use crate::context::{parse_context_file, validate_context, ContextError, ContextModel, Resolution};
use crate::diagnostic::{Diagnostic, Severity};
use crate::engine::{applicable_rules, eval_condition, plan_operations, render_trace, OperationPlan, Verdict};
use crate::schema::SchemaRegistry;
use crate::transform::transform;
use crate::widget::WidgetIndex;

pub use diff::{diff_dirs, diff_texts};
pub use manifest::{
    sha256_hex, verify_manifest, OperationRecord, RuleRecord, TargetRecord, VariantManifest, MANIFEST_FILE,
};
pub use source::{list_files, load_app, AppSource, DEFAULT_EXCLUDES};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Context {
        path: String,
        #[source]
        source: ContextError,
    },
    #[error("{path}: {source}")]
    Rules {
        path: String,
        #[source]
        source: RulesError,
    },
    #[error("{path}: source already adapted")]
    AlreadyAdapted { path: String },
    #[error("unknown user \"{id}\"; available: {}", .available.join(", "))]
    UnknownUser { id: String, available: Vec<String> },
    #[error("unknown rule \"{id}\"; available: {}", .available.join(", "))]
    UnknownRule { id: String, available: Vec<String> },
    #[error("output directory {0} is not empty")]
    OutputCollision(String),
    #[error("invalid exclude pattern: {0}")]
    Glob(String),
    #[error("invalid manifest: {0}")]
    Manifest(String),
}

impl PipelineError {
    /// Whether the error is caused by how the command was invoked rather
    /// than by the inputs' content.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            PipelineError::UnknownUser { .. } | PipelineError::UnknownRule { .. } | PipelineError::Glob(_)
        )
    }
}

pub fn load_context(path: &Path) -> Result<ContextModel, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(source::io_err(path))?;
    parse_context_file(&text).map_err(|source| PipelineError::Context {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_rules(path: &Path) -> Result<RulesModel, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(source::io_err(path))?;
    parse_rules(&text).map_err(|source| PipelineError::Rules {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UserSelection {
    One(String),
    All,
}

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub users: UserSelection,
    pub dry_run: bool,
    pub parallel: bool,
    pub excludes: Vec<String>,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            users: UserSelection::All,
            dry_run: false,
            parallel: true,
            excludes: DEFAULT_EXCLUDES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Result of one user's generation.
#[derive(Debug, Clone)]
pub struct Variant {
    pub user_id: String,
    pub dir: PathBuf,
    pub plan: Option<OperationPlan>,
    pub manifest: Option<VariantManifest>,
    /// Full variant contents (path to bytes), manifest included.
    pub files: BTreeMap<String, Vec<u8>>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub variants: Vec<Variant>,
    pub diagnostics: Vec<Diagnostic>,
}

impl RunReport {
    pub fn has_errors(&self) -> bool {
        self.all_diagnostics().any(|d| d.is_error())
    }

    pub fn all_diagnostics(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics
            .iter()
            .chain(self.variants.iter().flat_map(|v| v.diagnostics.iter()))
    }

    /// Serialized operation plans keyed by user id.
    pub fn plans_json(&self) -> String {
        let plans: BTreeMap<&str, &OperationPlan> = self
            .variants
            .iter()
            .filter_map(|v| v.plan.as_ref().map(|p| (v.user_id.as_str(), p)))
            .collect();
        let mut s = serde_json::to_string_pretty(&plans).expect("plan serializes");
        s.push('\n');
        s
    }
}

fn selected_users(model: &ContextModel, sel: &UserSelection) -> Result<Vec<String>, PipelineError> {
    match sel {
        UserSelection::All => Ok(model.list_users().into_iter().map(String::from).collect()),
        UserSelection::One(id) => {
            if model.user(id).is_none() {
                return Err(PipelineError::UnknownUser {
                    id: id.clone(),
                    available: model.list_users().into_iter().map(String::from).collect(),
                });
            }
            Ok(vec![id.clone()])
        }
    }
}

fn dir_is_empty(dir: &Path) -> bool {
    match std::fs::read_dir(dir) {
        Ok(mut it) => it.next().is_none(),
        Err(_) => true,
    }
}

/// Builds one variant in memory.
pub fn build_variant(
    app: &AppSource,
    model: &ContextModel,
    rules: &RulesModel,
    user_id: &str,
    out_dir: &Path,
    parallel: bool,
) -> Variant {
    let schema = SchemaRegistry::builtin();
    let mut variant = Variant {
        user_id: user_id.to_string(),
        dir: out_dir.join(user_id),
        plan: None,
        manifest: None,
        files: BTreeMap::new(),
        diagnostics: Vec::new(),
    };
    let at = format!("user {user_id}");
    let applicable = match applicable_rules(rules, model, user_id, &schema) {
        Ok(a) => a,
        Err(e) => {
            variant.diagnostics.push(Diagnostic::error("evaluation", e.to_string()).at(at));
            return variant;
        }
    };
    let index = WidgetIndex::build(&app.units);
    let plan = match plan_operations(&applicable, rules, &index) {
        Ok(p) => p,
        Err(e) => {
            variant.diagnostics.push(Diagnostic::error("planning", e.to_string()).at(at));
            return variant;
        }
    };
    let result = transform(&app.units, &plan, rules, parallel);

    let mut files: BTreeMap<String, Vec<u8>> = app.files.iter().cloned().collect();
    for f in &result.files {
        files.insert(f.path.clone(), f.content.clone().into_bytes());
    }
    for g in &result.generated {
        files.insert(g.path.clone(), g.content.clone().into_bytes());
    }
    let mut diagnostics = plan.diagnostics.clone();
    diagnostics.extend(result.diagnostics.iter().cloned());

    let operations = plan
        .ops
        .iter()
        .zip(&result.ops)
        .map(|(p, r)| OperationRecord {
            rule_id: p.origin.rule_id.clone(),
            op_index: p.origin.op_index,
            adaptation_type: p.adaptation_type,
            widget_type: p.widget_type.clone(),
            targets: p
                .targets
                .iter()
                .map(|t| TargetRecord {
                    path: t.path.clone(),
                    line: t.line,
                    widget_type: t.widget_type.clone(),
                    key: t.key.clone(),
                })
                .collect(),
            edits: r.edits,
            diagnostics: r.diagnostics.clone(),
        })
        .collect::<Vec<_>>();
    let manifest = VariantManifest {
        user_id: user_id.to_string(),
        rules: VariantManifest::rule_records(&applicable),
        applied_rules: applicable
            .iter()
            .filter(|a| a.verdict == Verdict::Applies)
            .map(|a| a.rule_id.clone())
            .collect(),
        operations,
        generated_files: result.generated.clone(),
        adapted_files: result.files.iter().map(|f| f.path.clone()).collect(),
        diagnostics: diagnostics.clone(),
        files: files.iter().map(|(p, b)| (p.clone(), sha256_hex(b))).collect(),
    };
    variant
        .diagnostics
        .extend(diagnostics);
    variant.diagnostics.extend(
        manifest
            .operations
            .iter()
            .flat_map(|o| o.diagnostics.iter().cloned()),
    );
    files.insert(MANIFEST_FILE.to_string(), manifest.to_json().into_bytes());
    variant.files = files;
    variant.manifest = Some(manifest);
    variant.plan = Some(plan);
    variant
}

fn write_variant(v: &Variant) -> Result<(), PipelineError> {
    for (rel, bytes) in &v.files {
        let full = v.dir.join(rel);
        if let Some(parent) = full.parent() {
            std::fs::create_dir_all(parent).map_err(source::io_err(parent))?;
        }
        std::fs::write(&full, bytes).map_err(source::io_err(&full))?;
    }
    Ok(())
}

/// Generates one variant directory per selected user under `out_dir`.
/// The app directory is only read.
pub fn generate(
    app_dir: &Path,
    context_file: &Path,
    rules_file: &Path,
    out_dir: &Path,
    options: &GenerateOptions,
) -> Result<RunReport, PipelineError> {
    let schema = SchemaRegistry::builtin();
    let model = load_context(context_file)?;
    let rules = load_rules(rules_file)?;
    let users = selected_users(&model, &options.users)?;
    let app = load_app(app_dir, &options.excludes, Some(out_dir), options.parallel)?;

    let mut diagnostics = validate_context(&model, &schema);
    diagnostics.extend(validate_rules(&rules, &schema));
    diagnostics.extend(app.diagnostics.iter().cloned());

    if !options.dry_run {
        for u in &users {
            let dir = out_dir.join(u);
            if !dir_is_empty(&dir) {
                return Err(PipelineError::OutputCollision(dir.display().to_string()));
            }
        }
    }
    let build = |u: &String| build_variant(&app, &model, &rules, u, out_dir, options.parallel);
    let variants: Vec<Variant> = if options.parallel {
        users.par_iter().map(build).collect()
    } else {
        users.iter().map(build).collect()
    };
    if !options.dry_run {
        for v in &variants {
            if v.manifest.is_some() {
                write_variant(v)?;
            }
        }
    }
    Ok(RunReport { variants, diagnostics })
}

/// Report-only validation of models and app against each other.
pub fn check(app_dir: &Path, context_file: &Path, rules_file: &Path) -> Result<Vec<Diagnostic>, PipelineError> {
    let schema = SchemaRegistry::builtin();
    let model = load_context(context_file)?;
    let rules = load_rules(rules_file)?;
    let app = load_app(app_dir, &GenerateOptions::default().excludes, None, true)?;
    let mut out = validate_context(&model, &schema);
    out.extend(validate_rules(&rules, &schema));
    out.extend(app.diagnostics.iter().cloned());

    let index = WidgetIndex::build(&app.units);
    for key in index.keys() {
        let refs = index.by_key(key);
        if refs.len() > 1 {
            let places: Vec<String> = refs
                .iter()
                .map(|r| format!("{}:{}", r.path(), crate::widget::line_col(&r.unit.text, r.offset()).0))
                .collect();
            out.push(Diagnostic::warning(
                "duplicate-key",
                format!("key {key} is used {} times: {}", refs.len(), places.join(", ")),
            ));
        }
    }

    for rule in &rules.rules {
        for (i, op) in rule.operations.iter().enumerate() {
            let mut keys: Vec<&str> = match &op.keys {
                KeySpec::All => Vec::new(),
                KeySpec::Keys(k) => k.iter().map(String::as_str).collect(),
            };
            if let Payload::Navigation(n) = &op.payload {
                keys.push(&n.container_key);
                keys.extend(n.groups.iter().flat_map(|g| g.order.iter().map(String::as_str)));
            }
            let mut seen = BTreeSet::new();
            for k in keys {
                if seen.insert(k) && index.by_key(k).is_empty() {
                    out.push(
                        Diagnostic::warning("key-not-found", format!("key not found: {k}"))
                            .at(format!("rule:{} op:{i}", rule.id)),
                    );
                }
            }
        }
    }

    for user in model.users() {
        for rule in &rules.rules {
            for leaf in rule.condition.leaves() {
                if let Resolution::Unresolved(u) = crate::context::resolve_in(user, &leaf.path) {
                    out.push(
                        Diagnostic::info(
                            "unresolved-path",
                            format!("{} is unresolved for user {} ({u})", leaf.path, user.id),
                        )
                        .at(format!("rule:{}", rule.id)),
                    );
                }
            }
        }
    }
    Ok(out)
}

/// Verdict and per-leaf trace of one rule for one user.
pub fn explain(context_file: &Path, rules_file: &Path, user_id: &str, rule_id: &str) -> Result<String, PipelineError> {
    let model = load_context(context_file)?;
    let rules = load_rules(rules_file)?;
    explain_models(&model, &rules, user_id, rule_id)
}

pub fn explain_models(
    model: &ContextModel,
    rules: &RulesModel,
    user_id: &str,
    rule_id: &str,
) -> Result<String, PipelineError> {
    let entry = model.user(user_id).ok_or_else(|| PipelineError::UnknownUser {
        id: user_id.to_string(),
        available: model.list_users().into_iter().map(String::from).collect(),
    })?;
    let rule = rules.rule(rule_id).ok_or_else(|| PipelineError::UnknownRule {
        id: rule_id.to_string(),
        available: rules.rule_ids().into_iter().map(String::from).collect(),
    })?;
    let schema = SchemaRegistry::builtin();
    match eval_condition(&rule.condition, |p| crate::context::resolve_in(entry, p), &schema) {
        Ok(eval) => Ok(render_trace(&eval)),
        Err(e) => Ok(format!("verdict: error\n{e}\n")),
    }
}

/// Worst severity among `diags`, if any.
pub fn worst(diags: &[Diagnostic]) -> Option<Severity> {
    diags.iter().map(|d| d.severity).max()
}
