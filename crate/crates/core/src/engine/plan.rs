// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::eval::{eval_condition, EvalError, TraceEntry, Verdict};
use crate::adapt::{AdaptationType, KeySpec, Operation, Payload, RulesModel};
use crate::context::{ContextError, ContextModel};
use crate::diagnostic::Diagnostic;
use crate::schema::SchemaRegistry;
use crate::transform::property::{canonical_widget_type, PropertyTable, Recipe};
use crate::widget::{line_col, Span, WidgetIndex, WidgetRef};

/// Which operation of which rule produced something.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Origin {
    pub rule_id: String,
    pub op_index: usize,
}

impl Origin {
    pub fn new(rule_id: impl Into<String>, op_index: usize) -> Self {
        Self {
            rule_id: rule_id.into(),
            op_index,
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule:{} op:{}", self.rule_id, self.op_index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Applicability {
    pub rule_id: String,
    pub verdict: Verdict,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error("rule \"{rule_id}\": {source}")]
    Eval {
        rule_id: String,
        #[source]
        source: EvalError,
    },
    #[error("navigation operations {first} and {second} both restructure container \"{container_key}\"")]
    NavigationConflict {
        container_key: String,
        first: Origin,
        second: Origin,
    },
}

/// One verdict per rule, in declaration order.
pub fn applicable_rules(
    rules: &RulesModel,
    model: &ContextModel,
    user_id: &str,
    schema: &SchemaRegistry,
) -> Result<Vec<Applicability>, EngineError> {
    let entry = model
        .user(user_id)
        .ok_or_else(|| ContextError::UnknownUser(user_id.to_string()))?;
    rules
        .rules
        .iter()
        .map(|rule| {
            let eval = eval_condition(
                &rule.condition,
                |p| crate::context::resolve_in(entry, p),
                schema,
            )
            .map_err(|source| EngineError::Eval {
                rule_id: rule.id.clone(),
                source,
            })?;
            Ok(Applicability {
                rule_id: rule.id.clone(),
                verdict: eval.verdict,
                trace: eval.trace,
            })
        })
        .collect()
}

/// A widget occurrence an operation applies to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Target {
    pub path: String,
    pub span: Span,
    pub line: usize,
    pub widget_type: String,
    pub key: Option<String>,
}

impl Target {
    fn of(r: &WidgetRef<'_>) -> Self {
        Self {
            path: r.unit.path.clone(),
            span: r.node.span,
            line: line_col(&r.unit.text, r.node.span.start).0,
            widget_type: r.node.type_name.clone(),
            key: r.node.key.clone(),
        }
    }

    fn label(&self) -> String {
        format!("{}:{}", self.path, self.line)
    }
}

/// A write of an earlier operation that a later one replaced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Overridden {
    pub target: usize,
    pub slot: String,
    pub by: Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlannedOp {
    pub origin: Origin,
    pub adaptation_type: AdaptationType,
    pub widget_type: String,
    pub targets: Vec<Target>,
    pub overridden: Vec<Overridden>,
    pub diagnostics: Vec<Diagnostic>,
}

impl PlannedOp {
    /// Whether `slot` on target `i` was replaced by a later writer.
    pub fn is_overridden(&self, target: usize, slot: &str) -> bool {
        self.overridden
            .iter()
            .any(|o| o.target == target && o.slot == slot)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperationPlan {
    pub ops: Vec<PlannedOp>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Conflict slot for a presentation property: the argument it writes, with
/// nested style fields as `arg.field`.
pub fn property_slot(widget_type: &str, property: &str) -> String {
    match PropertyTable::builtin()
        .widget(widget_type)
        .and_then(|w| w.property(property))
        .map(|p| p.recipe)
    {
        Some(Recipe::Direct { arg }) => arg.to_string(),
        Some(Recipe::Nested { arg, .. }) => format!("{arg}.{property}"),
        Some(Recipe::IconIdentifier) => "icon".to_string(),
        None => property.to_string(),
    }
}

/// Slot written by a modality wrap.
pub const MODALITY_SLOT: &str = "<modality>";

fn slots_overlap(a: &str, b: &str) -> bool {
    a == b
        || a.strip_prefix(b).is_some_and(|r| r.starts_with('.'))
        || b.strip_prefix(a).is_some_and(|r| r.starts_with('.'))
}

fn op_slots(op: &Operation) -> Vec<String> {
    match &op.payload {
        Payload::Presentation(p) => {
            let mut out: Vec<String> = p
                .properties
                .keys()
                .map(|k| property_slot(&op.widget_type, k))
                .collect();
            out.extend(p.raw_args.keys().cloned());
            out
        }
        Payload::Modality(_) => vec![MODALITY_SLOT.to_string()],
        Payload::Navigation(_) => Vec::new(),
    }
}

/// Binds every operation of every applying rule to concrete widget
/// occurrences and resolves write conflicts last-writer-wins.
pub fn plan_operations(
    applicable: &[Applicability],
    rules: &RulesModel,
    index: &WidgetIndex<'_>,
) -> Result<OperationPlan, EngineError> {
    let mut ops: Vec<PlannedOp> = Vec::new();
    let mut diagnostics = Vec::new();
    // (path, start) -> live writes (slot, index into ops, target index)
    let mut writes: BTreeMap<(String, usize), Vec<(String, usize, usize)>> = BTreeMap::new();
    let mut containers: BTreeMap<String, Origin> = BTreeMap::new();

    for app in applicable.iter().filter(|a| a.verdict == Verdict::Applies) {
        let Some(rule) = rules.rule(&app.rule_id) else {
            continue;
        };
        for (i, op) in rule.operations.iter().enumerate() {
            let origin = Origin::new(&rule.id, i);
            let mut op_diags = Vec::new();
            let targets = match &op.payload {
                Payload::Navigation(nav) => {
                    if let Some(first) = containers.get(&nav.container_key) {
                        return Err(EngineError::NavigationConflict {
                            container_key: nav.container_key.clone(),
                            first: first.clone(),
                            second: origin,
                        });
                    }
                    containers.insert(nav.container_key.clone(), origin.clone());
                    resolve_keys(op, index, &origin, &mut op_diags);
                    let found = index.by_key(&nav.container_key);
                    if found.is_empty() {
                        op_diags.push(
                            Diagnostic::warning(
                                "key-not-found",
                                format!("key not found: {}", nav.container_key),
                            )
                            .at(origin.to_string()),
                        );
                    }
                    found.iter().map(Target::of).collect()
                }
                _ => resolve_keys(op, index, &origin, &mut op_diags),
            };

            let op_index = ops.len();
            for slot in op_slots(op) {
                for (t, target) in targets.iter().enumerate() {
                    let live = writes.entry((target.path.clone(), target.span.start)).or_default();
                    let mut kept = Vec::with_capacity(live.len());
                    for (s, prev_op, prev_t) in live.drain(..) {
                        if prev_op != op_index && slots_overlap(&s, &slot) {
                            let prev: &mut PlannedOp = &mut ops[prev_op];
                            diagnostics.push(
                                Diagnostic::warning(
                                    "overridden-write",
                                    format!(
                                        "{} on {} at {} overrides the value set by {}",
                                        slot,
                                        target.widget_type,
                                        target.label(),
                                        prev.origin
                                    ),
                                )
                                .at(origin.to_string()),
                            );
                            prev.overridden.push(Overridden {
                                target: prev_t,
                                slot: s,
                                by: origin.clone(),
                            });
                        } else {
                            kept.push((s, prev_op, prev_t));
                        }
                    }
                    kept.push((slot.clone(), op_index, t));
                    *live = kept;
                }
            }

            ops.push(PlannedOp {
                origin,
                adaptation_type: op.adaptation_type(),
                widget_type: op.widget_type.clone(),
                targets,
                overridden: Vec::new(),
                diagnostics: op_diags,
            });
        }
    }
    Ok(OperationPlan { ops, diagnostics })
}

fn resolve_keys(
    op: &Operation,
    index: &WidgetIndex<'_>,
    origin: &Origin,
    diags: &mut Vec<Diagnostic>,
) -> Vec<Target> {
    let wanted = canonical_widget_type(&op.widget_type);
    match &op.keys {
        KeySpec::All => index.by_type(wanted).iter().map(Target::of).collect(),
        KeySpec::Keys(keys) => {
            let mut out = Vec::new();
            for key in keys {
                let found = index.by_key(key);
                if found.is_empty() {
                    diags.push(
                        Diagnostic::warning("key-not-found", format!("key not found: {key}"))
                            .at(origin.to_string()),
                    );
                }
                for r in found {
                    if canonical_widget_type(&r.node.type_name) != wanted {
                        diags.push(
                            Diagnostic::warning(
                                "widget-type-mismatch",
                                format!(
                                    "key {key} is on a {}, expected {}",
                                    r.node.type_name, op.widget_type
                                ),
                            )
                            .at(origin.to_string()),
                        );
                        continue;
                    }
                    if !matches!(op.payload, Payload::Navigation(_)) {
                        out.push(Target::of(r));
                    }
                }
            }
            out
        }
    }
}
