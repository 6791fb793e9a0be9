// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use super::edit::{Piece, Structural};
use super::presentation::line_indent;
use crate::adapt::NavigationPayload;
use crate::diagnostic::Diagnostic;
use crate::engine::Origin;
use crate::widget::{list_elements, SourceUnit, Span, WidgetNode};

pub const NAVIGATION_HELPER_PATH: &str = "lib/adaptforge_navigation.dart";
pub const STEPPER_WIDGET: &str = "AdaptforgeStepperForm";
pub const STEP_WIDGET: &str = "AdaptforgeFormStep";

pub const NAVIGATION_HELPER: &str = r#"// Generated by adaptforge. Do not edit.
import 'package:flutter/material.dart';

/// One titled group of form fields.
class AdaptforgeFormStep {
  const AdaptforgeFormStep({required this.title, required this.children});

  final String title;
  final List<Widget> children;
}

/// Shows form groups one at a time with the stepper's default controls.
class AdaptforgeStepperForm extends StatefulWidget {
  const AdaptforgeStepperForm({super.key, required this.steps});

  final List<AdaptforgeFormStep> steps;

  @override
  State<AdaptforgeStepperForm> createState() => _AdaptforgeStepperFormState();
}

class _AdaptforgeStepperFormState extends State<AdaptforgeStepperForm> {
  int _current = 0;

  @override
  Widget build(BuildContext context) {
    return Stepper(
      physics: const ClampingScrollPhysics(),
      currentStep: _current,
      onStepTapped: (i) => setState(() => _current = i),
      onStepContinue: _current < widget.steps.length - 1
          ? () => setState(() => _current += 1)
          : null,
      onStepCancel: _current > 0 ? () => setState(() => _current -= 1) : null,
      steps: [
        for (var i = 0; i < widget.steps.length; i++)
          Step(
            title: Text(widget.steps[i].title),
            isActive: i == _current,
            state: i < _current ? StepState.complete : StepState.indexed,
            content: Column(children: widget.steps[i].children),
          ),
      ],
    );
  }
}
"#;

fn dart_string(s: &str) -> String {
    let mut out = String::from("'");
    for c in s.chars() {
        match c {
            '\'' | '\\' | '$' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

/// Restructures the container's `children:` list into a stepper. Keyed
/// items outside every group go to the last step with a warning; items
/// without keys stay in the list after the stepper.
pub fn apply_navigation(
    unit: &SourceUnit,
    container: &WidgetNode,
    payload: &NavigationPayload,
    origin: &Origin,
) -> Result<(Structural, Vec<Diagnostic>), String> {
    let ck = &payload.container_key;
    let children = container
        .read_arg("children")
        .ok_or_else(|| format!("container \"{ck}\" has no children list"))?;
    let items = list_elements(unit, children.value)
        .ok_or_else(|| format!("children of container \"{ck}\" is not a list literal"))?;

    let keyed: Vec<&WidgetNode> = container
        .walk()
        .into_iter()
        .filter(|w| w.key.is_some())
        .collect();
    let item_of = |span: Span| items.iter().position(|it| it.contains(span));
    let item_keys: Vec<Vec<&str>> = items
        .iter()
        .map(|it| {
            keyed
                .iter()
                .filter(|w| it.contains(w.span))
                .filter_map(|w| w.key.as_deref())
                .collect()
        })
        .collect();

    let mut assignment: BTreeMap<usize, usize> = BTreeMap::new();
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); payload.groups.len()];
    for (g, group) in payload.groups.iter().enumerate() {
        for key in &group.order {
            let Some(node) = keyed.iter().find(|w| w.key.as_deref() == Some(key.as_str())) else {
                return Err(if unit.find_by_key(key).is_empty() {
                    format!("key not found: {key} (container \"{ck}\")")
                } else {
                    format!("member key \"{key}\" is outside container \"{ck}\"")
                });
            };
            let Some(item) = item_of(node.span) else {
                return Err(format!(
                    "member key \"{key}\" is not inside the children list of container \"{ck}\""
                ));
            };
            match assignment.get(&item) {
                Some(&other) if other != g => {
                    return Err(format!(
                        "member key \"{key}\" shares a list element with a member of group \"{}\"",
                        payload.groups[other].title
                    ))
                }
                Some(_) => {}
                None => {
                    assignment.insert(item, g);
                    groups[g].push(item);
                }
            }
        }
    }

    let last = groups.len() - 1;
    let mut warnings = Vec::new();
    let mut trailing = Vec::new();
    for (i, keys) in item_keys.iter().enumerate() {
        if assignment.contains_key(&i) {
            continue;
        }
        if keys.is_empty() {
            trailing.push(i);
        } else {
            groups[last].push(i);
            warnings.push(
                Diagnostic::warning(
                    "ungrouped-field",
                    format!(
                        "keyed widget \"{}\" is not in any group; appended to step \"{}\"",
                        keys[0], payload.groups[last].title
                    ),
                )
                .at(origin.to_string()),
            );
        }
    }

    let i = line_indent(&unit.text, children.name_span.start);
    let mut pieces = vec![Piece::Text(format!(
        "[\n{i}  {STEPPER_WIDGET}(\n{i}    steps: [\n"
    ))];
    for (g, members) in groups.iter().enumerate() {
        pieces.push(Piece::Text(format!(
            "{i}      {STEP_WIDGET}(\n{i}        title: {},\n{i}        children: [\n",
            dart_string(&payload.groups[g].title)
        )));
        for &m in members {
            let indent = format!("{i}          ");
            pieces.push(Piece::Text(indent.clone()));
            pieces.push(Piece::Source { span: items[m], indent });
            pieces.push(Piece::Text(",\n".into()));
        }
        pieces.push(Piece::Text(format!("{i}        ],\n{i}      ),\n")));
    }
    pieces.push(Piece::Text(format!("{i}    ],\n{i}  ),\n")));
    for &t in &trailing {
        let indent = format!("{i}  ");
        pieces.push(Piece::Text(indent.clone()));
        pieces.push(Piece::Source { span: items[t], indent });
        pieces.push(Piece::Text(",\n".into()));
    }
    pieces.push(Piece::Text(format!("{i}]")));

    Ok((
        Structural {
            span: children.value,
            pieces,
            origins: vec![origin.clone()],
        },
        warnings,
    ))
}
