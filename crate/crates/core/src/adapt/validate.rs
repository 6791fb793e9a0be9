// SPDX-License-Identifier: Apache-2.0

use super::*;
use crate::diagnostic::Diagnostic;
use crate::schema::{SchemaRegistry, ValueType};
use crate::transform::property::{render_value, PropertyTable};

/// Semantic checks a grammar cannot express. Ordered comparisons that can
/// never be evaluated are errors; everything else is a warning.
pub fn validate_rules(rules: &RulesModel, schema: &SchemaRegistry) -> Vec<Diagnostic> {
    let table = PropertyTable::builtin();
    let mut out = Vec::new();
    for rule in &rules.rules {
        for leaf in rule.condition.leaves() {
            let loc = format!("rule:{} {}", rule.id, leaf.pos);
            check_leaf(leaf, schema, &loc, &mut out);
        }
        for (i, op) in rule.operations.iter().enumerate() {
            let loc = format!("rule:{} op:{}", rule.id, i);
            let Some(spec) = table.widget(&op.widget_type) else {
                out.push(
                    Diagnostic::warning(
                        "unknown-widget-type",
                        format!("unknown widget type `{}`", op.widget_type),
                    )
                    .at(&loc),
                );
                continue;
            };
            match &op.payload {
                Payload::Presentation(p) => {
                    for (name, value) in &p.properties {
                        match spec.property(name) {
                            None => out.push(
                                Diagnostic::error(
                                    "unsupported-property",
                                    format!(
                                        "property `{name}` is not supported for {}; use raw_arg",
                                        spec.name
                                    ),
                                )
                                .at(&loc),
                            ),
                            Some(prop) => {
                                if let Err(e) = render_value(prop.kind, value) {
                                    out.push(
                                        Diagnostic::error(
                                            "invalid-property-value",
                                            format!("{}.{name}: {e}", spec.name),
                                        )
                                        .at(&loc),
                                    );
                                }
                            }
                        }
                    }
                }
                Payload::Modality(_) => {
                    if !spec.accepts_modality {
                        out.push(
                            Diagnostic::error(
                                "modality-target",
                                format!("modality adaptations require a text input widget, not {}", spec.name),
                            )
                            .at(&loc),
                        );
                    }
                }
                Payload::Navigation(_) => {}
            }
        }
    }
    out
}

fn check_leaf(leaf: &Comparison, schema: &SchemaRegistry, loc: &str, out: &mut Vec<Diagnostic>) {
    let declared = schema.attribute_type(&leaf.path);
    if declared.is_none() {
        out.push(
            Diagnostic::warning(
                "unknown-path",
                format!("{}: path not in built-in schema", leaf.path),
            )
            .at(loc),
        );
    }
    if leaf.op.is_ordered() {
        let problem = match (&leaf.literal, declared) {
            (Literal::Number(_), None | Some(ValueType::Number)) => None,
            (Literal::Number(_), Some(t)) => Some(format!("ordered numeric comparison on {}", t.describe())),
            (Literal::Bool(_), _) => Some("ordered comparison on boolean".to_string()),
            (Literal::Str(s) | Literal::Ident(s), Some(ValueType::Enum(d))) if d.ordered => {
                if d.accepts(s) {
                    None
                } else {
                    Some(format!("`{s}` is not a level of {}", leaf.path))
                }
            }
            (Literal::Str(_) | Literal::Ident(_), Some(ValueType::Enum(_))) => {
                Some("ordered comparison on unordered enum".to_string())
            }
            (Literal::Str(_) | Literal::Ident(_), _) => {
                Some("ordered comparison requires a number or an ordered enum".to_string())
            }
        };
        if let Some(p) = problem {
            out.push(Diagnostic::error("ordered-comparison", format!("{leaf}: {p}")).at(loc));
        }
        return;
    }
    let mismatch = match (declared, &leaf.literal) {
        (None, _) => false,
        (Some(ValueType::Number), Literal::Number(_)) => false,
        (Some(ValueType::Bool), Literal::Bool(_)) => false,
        (Some(ValueType::Text), Literal::Str(_) | Literal::Ident(_)) => false,
        (Some(ValueType::Enum(d)), Literal::Str(s) | Literal::Ident(s)) => {
            if !d.accepts(s) {
                out.push(
                    Diagnostic::warning(
                        "unknown-enum-value",
                        format!("{leaf}: `{s}` is not a declared value of {}", leaf.path),
                    )
                    .at(loc),
                );
            }
            false
        }
        _ => true,
    };
    if mismatch {
        out.push(
            Diagnostic::warning(
                "literal-type",
                format!(
                    "{leaf}: {} literal compared with {} attribute",
                    leaf.literal.kind_name(),
                    declared.map(|t| t.describe()).unwrap_or("unknown")
                ),
            )
            .at(loc),
        );
    }
}
