// SPDX-License-Identifier: Apache-2.0

use super::{ContextModel, ContextNode, ContextValue};
use crate::diagnostic::Diagnostic;
use crate::schema::{NodeSchema, SchemaRegistry, ValueType};

/// Checks attribute types against the schema. Unknown kinds, names, and
/// attributes are reported as informational only.
pub fn validate_context(model: &ContextModel, schema: &SchemaRegistry) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for entry in model.users() {
        for (section, root) in entry.sections() {
            walk(
                root,
                section.as_str(),
                Some(schema.section(section)),
                &entry.id,
                &mut out,
            );
        }
    }
    out
}

fn walk(
    node: &ContextNode,
    trail: &str,
    schema: Option<&NodeSchema>,
    user: &str,
    out: &mut Vec<Diagnostic>,
) {
    let loc = format!("user {user}");
    for (name, value) in &node.attributes {
        let path = format!("{trail}.{name}");
        let Some(schema) = schema else { continue };
        match schema.attributes.get(name) {
            None => out.push(
                Diagnostic::info("unknown-attribute", format!("{path} is not in the built-in schema"))
                    .at(&loc),
            ),
            Some(ty) => {
                if let Some(msg) = type_problem(ty, value) {
                    out.push(Diagnostic::warning("type-mismatch", format!("{path} {msg}")).at(&loc));
                }
            }
        }
    }
    for child in &node.children {
        let label = match &child.name {
            Some(n) => format!("{}[{}]", child.kind, n),
            None => child.kind.clone(),
        };
        let here = format!("{trail}.{label}");
        let child_schema = match schema {
            Some(s) => match s.children.get(&child.kind) {
                Some(cs) => {
                    if let (Some(names), Some(name)) = (&cs.names, &child.name) {
                        if !names.contains(name) {
                            out.push(
                                Diagnostic::info(
                                    "unknown-name",
                                    format!("{here}: `{name}` is not a built-in {} name", child.kind),
                                )
                                .at(&loc),
                            );
                        }
                    }
                    Some(cs)
                }
                None => {
                    out.push(
                        Diagnostic::info(
                            "unknown-kind",
                            format!("{here}: node kind `{}` is not in the built-in schema", child.kind),
                        )
                        .at(&loc),
                    );
                    None
                }
            },
            None => None,
        };
        walk(child, &here, child_schema, user, out);
    }
}

fn type_problem(ty: &ValueType, value: &ContextValue) -> Option<String> {
    match (ty, value) {
        (ValueType::Number, ContextValue::Number(_))
        | (ValueType::Bool, ContextValue::Bool(_))
        | (ValueType::Text, ContextValue::Text(_) | ContextValue::Enum(_)) => None,
        (ValueType::Enum(domain), ContextValue::Enum(tok) | ContextValue::Text(tok)) => {
            if domain.accepts(tok) {
                None
            } else {
                let variants = domain.variants.as_deref().unwrap_or_default().join(", ");
                Some(format!("expects one of [{variants}], found `{tok}`"))
            }
        }
        (ty, _) => Some(format!("expects {}", ty.describe())),
    }
}
