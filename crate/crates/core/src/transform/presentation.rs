// SPDX-License-Identifier: Apache-2.0

use indexmap::IndexMap;

use super::edit::Edit;
use super::property::{render_value, PropertyTable, Recipe};
use crate::adapt::PresentationPayload;
use crate::diagnostic::Diagnostic;
use crate::engine::{property_slot, Origin};
use crate::widget::{SourceUnit, Span, TokenKind, WidgetNode};

/// Where a single presentation value goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WriteTarget {
    Direct(String),
    Nested { arg: String, ctor: String, field: String },
    Positional,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyWrite {
    pub origin: Origin,
    pub slot: String,
    pub target: WriteTarget,
    /// Dart source of the value.
    pub value: String,
}

/// Resolves a payload into writes for `widget_type`, skipping slots for
/// which `skip` returns true. Values that cannot be rendered become
/// errors for the operation.
pub fn payload_writes(
    widget_type: &str,
    payload: &PresentationPayload,
    origin: &Origin,
    skip: impl Fn(&str) -> bool,
) -> (Vec<PropertyWrite>, Vec<Diagnostic>) {
    let mut writes = Vec::new();
    let mut errors = Vec::new();
    let spec = PropertyTable::builtin().widget(widget_type);
    for (name, literal) in &payload.properties {
        let slot = property_slot(widget_type, name);
        if skip(&slot) {
            continue;
        }
        let Some(prop) = spec.and_then(|s| s.property(name)) else {
            errors.push(
                Diagnostic::error(
                    "unsupported-property",
                    format!("property `{name}` is not supported for {widget_type}; use raw_arg"),
                )
                .at(origin.to_string()),
            );
            continue;
        };
        let value = match render_value(prop.kind, literal) {
            Ok(v) => v,
            Err(e) => {
                errors.push(
                    Diagnostic::error("invalid-property-value", format!("{widget_type}.{name}: {e}"))
                        .at(origin.to_string()),
                );
                continue;
            }
        };
        let target = match prop.recipe {
            Recipe::Direct { arg } => WriteTarget::Direct(arg.to_string()),
            Recipe::Nested { arg, ctor } => WriteTarget::Nested {
                arg: arg.to_string(),
                ctor: ctor.to_string(),
                field: name.clone(),
            },
            Recipe::IconIdentifier => WriteTarget::Positional,
        };
        writes.push(PropertyWrite {
            origin: origin.clone(),
            slot,
            target,
            value,
        });
    }
    for (name, code) in &payload.raw_args {
        if skip(name) {
            continue;
        }
        writes.push(PropertyWrite {
            origin: origin.clone(),
            slot: name.clone(),
            target: WriteTarget::Direct(name.clone()),
            value: code.clone(),
        });
    }
    (writes, errors)
}

/// Leading whitespace of the line containing `offset`.
pub fn line_indent(text: &str, offset: usize) -> &str {
    let start = text[..offset].rfind('\n').map_or(0, |i| i + 1);
    let line = &text[start..];
    &line[..line.len() - line.trim_start_matches([' ', '\t']).len()]
}

/// Insertion of new named arguments at the end of `node`'s argument list.
/// Multi-line lists get one argument per line with a trailing comma;
/// single-line lists stay on one line.
fn arg_insertion(unit: &SourceUnit, node: &WidgetNode, args: &[(String, String)]) -> (usize, String) {
    let text = &unit.text;
    let open = node.args_span.start + 1;
    let Some(last_end) = node.last_arg_end() else {
        let body: Vec<String> = args.iter().map(|(n, v)| format!("{n}: {v}")).collect();
        return (open, body.join(", "));
    };
    let first_start = node
        .positional
        .iter()
        .map(|s| s.start)
        .chain(node.named.iter().map(|a| a.name_span.start))
        .min()
        .unwrap_or(last_end);
    let multiline = text[open..first_start].contains('\n');
    let comma = unit
        .tokens
        .iter()
        .find(|t| t.start >= last_end && !t.kind.is_trivia())
        .filter(|t| t.kind == TokenKind::Punct && t.text(text) == ",")
        .map(|t| t.end);
    if multiline {
        let last_start = node
            .positional
            .iter()
            .map(|s| s.start)
            .chain(node.named.iter().map(|a| a.name_span.start))
            .max()
            .unwrap_or(last_end);
        let indent = line_indent(text, last_start);
        let mut body = String::new();
        if comma.is_none() {
            body.push(',');
        }
        for (n, v) in args {
            body.push_str(&format!("\n{indent}{n}: {v},"));
        }
        (comma.unwrap_or(last_end), body)
    } else {
        let mut parts: Vec<String> = args.iter().map(|(n, v)| format!("{n}: {v}")).collect();
        match comma {
            Some(at) => {
                let body = format!(" {},", parts.join(", "));
                (at, body)
            }
            None => {
                parts.insert(0, String::new());
                (last_end, parts.join(", "))
            }
        }
    }
}

fn literal_ctor<'n>(node: &'n WidgetNode, value: Span, ctor: &str) -> Option<&'n WidgetNode> {
    let child = node.child_at(value)?;
    let name = match &child.constructor {
        Some(c) => format!("{}.{c}", child.type_name),
        None => child.type_name.clone(),
    };
    (name == ctor).then_some(child)
}

fn merge_origins<'a>(ws: impl Iterator<Item = &'a PropertyWrite>) -> Vec<Origin> {
    let mut out: Vec<Origin> = Vec::new();
    for w in ws {
        if !out.contains(&w.origin) {
            out.push(w.origin.clone());
        }
    }
    out
}

/// Edits for all writes to one widget. Writes to the same argument list
/// are combined into a single insertion. Errors are per operation and do
/// not stop other writes.
pub fn widget_edits(
    unit: &SourceUnit,
    node: &WidgetNode,
    writes: &[PropertyWrite],
) -> (Vec<Edit>, Vec<Diagnostic>) {
    let path = unit.path.as_str();
    let mut edits = Vec::new();
    let mut errors = Vec::new();
    let mut positional: Option<&PropertyWrite> = None;
    let mut direct: IndexMap<&str, &PropertyWrite> = IndexMap::new();
    let mut nested: IndexMap<&str, (&str, IndexMap<&str, &PropertyWrite>)> = IndexMap::new();
    for w in writes {
        match &w.target {
            WriteTarget::Positional => positional = Some(w),
            WriteTarget::Direct(arg) => {
                direct.insert(arg, w);
            }
            WriteTarget::Nested { arg, ctor, field } => {
                nested.entry(arg).or_insert((ctor, IndexMap::new())).1.insert(field, w);
            }
        }
    }

    let mut new_args: Vec<(String, String, Vec<Origin>)> = Vec::new();

    if let Some(w) = positional {
        match node.positional.first() {
            Some(span) => edits.push(Edit::new(path, *span, &w.value, &w.origin)),
            None => {
                let text = if node.last_arg_end().is_some() {
                    format!("{}, ", w.value)
                } else {
                    w.value.clone()
                };
                edits.push(Edit::insert(path, node.args_span.start + 1, text, &w.origin));
            }
        }
    }

    for (arg, w) in &direct {
        match node.read_arg(arg) {
            Some(a) => edits.push(Edit::new(path, a.value, &w.value, &w.origin)),
            None => new_args.push((arg.to_string(), w.value.clone(), vec![w.origin.clone()])),
        }
    }

    for (arg, (ctor, fields)) in &nested {
        if let Some(raw) = direct.get(arg) {
            for w in fields.values() {
                errors.push(
                    Diagnostic::error(
                        "conflicting-write",
                        format!("`{arg}.{}` conflicts with raw argument `{arg}` from {}", w.slot, raw.origin),
                    )
                    .at(w.origin.to_string()),
                );
            }
            continue;
        }
        match node.read_arg(arg) {
            None => {
                let body: Vec<String> = fields.iter().map(|(f, w)| format!("{f}: {}", w.value)).collect();
                new_args.push((
                    arg.to_string(),
                    format!("{ctor}({})", body.join(", ")),
                    merge_origins(fields.values().copied()),
                ));
            }
            Some(a) => match literal_ctor(node, a.value, ctor) {
                None => {
                    for w in fields.values() {
                        errors.push(
                            Diagnostic::error(
                                "manual-merge-required",
                                format!(
                                    "manual merge required: `{arg}: {}` is not a literal {ctor}(...); `{}` not applied",
                                    a.value.text(&unit.text),
                                    w.slot
                                ),
                            )
                            .at(w.origin.to_string()),
                        );
                    }
                }
                Some(style) => {
                    let mut inserts = Vec::new();
                    for (f, w) in fields {
                        match style.read_arg(f) {
                            Some(existing) => edits.push(Edit::new(path, existing.value, &w.value, &w.origin)),
                            None => inserts.push((f.to_string(), w.value.clone(), vec![w.origin.clone()])),
                        }
                    }
                    if !inserts.is_empty() {
                        edits.push(insertion_edit(unit, style, inserts));
                    }
                }
            },
        }
    }

    if !new_args.is_empty() {
        edits.push(insertion_edit(unit, node, new_args));
    }
    (edits, errors)
}

fn insertion_edit(unit: &SourceUnit, node: &WidgetNode, args: Vec<(String, String, Vec<Origin>)>) -> Edit {
    let pairs: Vec<(String, String)> = args.iter().map(|(n, v, _)| (n.clone(), v.clone())).collect();
    let (at, text) = arg_insertion(unit, node, &pairs);
    let mut origins: Vec<Origin> = Vec::new();
    for (_, _, os) in args {
        for o in os {
            if !origins.contains(&o) {
                origins.push(o);
            }
        }
    }
    Edit {
        path: unit.path.clone(),
        span: Span::new(at, at),
        text,
        origins,
        comment: false,
    }
}

/// Edits implementing one presentation payload on one widget.
pub fn apply_presentation(
    unit: &SourceUnit,
    target: &WidgetNode,
    payload: &PresentationPayload,
    origin: &Origin,
) -> (Vec<Edit>, Vec<Diagnostic>) {
    let (writes, mut errors) = payload_writes(&target.type_name, payload, origin, |_| false);
    let (edits, more) = widget_edits(unit, target, &writes);
    errors.extend(more);
    (edits, errors)
}
