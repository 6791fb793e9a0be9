// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::edit::{apply_edits, compose, Edit, Structural};
use super::modality::{apply_modality, import_edit, MODALITY_HELPER, MODALITY_HELPER_PATH};
use super::navigation::{apply_navigation, NAVIGATION_HELPER, NAVIGATION_HELPER_PATH};
use super::presentation::{payload_writes, widget_edits, PropertyWrite};
use super::provenance::{comment_edit, render_provenance};
use crate::adapt::{Payload, RulesModel};
use crate::diagnostic::Diagnostic;
use crate::engine::{OperationPlan, Origin, MODALITY_SLOT};
use crate::widget::SourceUnit;

/// A file produced from a fixed template rather than from app source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratedFile {
    pub path: String,
    #[serde(skip)]
    pub content: String,
    pub rule_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedFile {
    pub path: String,
    pub content: String,
    pub edits: Vec<Edit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpReport {
    pub origin: Origin,
    pub edits: usize,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult {
    /// Files with at least one edit, sorted by path.
    pub files: Vec<AdaptedFile>,
    pub generated: Vec<GeneratedFile>,
    /// One report per planned operation, in plan order.
    pub ops: Vec<OpReport>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Default)]
struct FileOutcome {
    file: Option<AdaptedFile>,
    counts: BTreeMap<Origin, usize>,
    op_diags: Vec<(Origin, Diagnostic)>,
    modality_rules: Vec<String>,
    navigation_rules: Vec<String>,
    diagnostics: Vec<Diagnostic>,
}

fn push_unique<T: PartialEq>(v: &mut Vec<T>, x: T) {
    if !v.contains(&x) {
        v.push(x);
    }
}

fn transform_unit(unit: &SourceUnit, plan: &OperationPlan, rules: &RulesModel) -> FileOutcome {
    let mut out = FileOutcome::default();
    let mut writes: BTreeMap<usize, Vec<PropertyWrite>> = BTreeMap::new();
    let mut structurals: Vec<Structural> = Vec::new();
    let mut leaf: Vec<Edit> = Vec::new();
    let mut imports: Vec<String> = Vec::new();
    let mut import_origins: Vec<Origin> = Vec::new();
    // (widget start, origin, lines, needs presentation edits)
    let mut comments: Vec<(usize, Origin, Vec<String>, bool)> = Vec::new();

    for pop in &plan.ops {
        let Some(rule) = rules.rule(&pop.origin.rule_id) else {
            continue;
        };
        let op = &rule.operations[pop.origin.op_index];
        let origin = &pop.origin;
        for (t, target) in pop.targets.iter().enumerate() {
            if target.path != unit.path {
                continue;
            }
            let Some(node) = unit.node_at(target.span.start).filter(|n| n.span == target.span) else {
                continue;
            };
            let lines = render_provenance(rule, origin.op_index, op);
            match &op.payload {
                Payload::Presentation(p) => {
                    let (ws, errs) =
                        payload_writes(&node.type_name, p, origin, |slot| pop.is_overridden(t, slot));
                    out.op_diags.extend(errs.into_iter().map(|d| (origin.clone(), d)));
                    if !ws.is_empty() {
                        writes.entry(node.span.start).or_default().extend(ws);
                        comments.push((node.span.start, origin.clone(), lines, true));
                    }
                }
                Payload::Modality(m) => {
                    if pop.is_overridden(t, MODALITY_SLOT) {
                        continue;
                    }
                    match apply_modality(unit, node, m, origin) {
                        Ok((wrap, uris)) => {
                            structurals.push(wrap);
                            *out.counts.entry(origin.clone()).or_default() += 1;
                            for u in uris {
                                push_unique(&mut imports, u);
                            }
                            push_unique(&mut import_origins, origin.clone());
                            push_unique(&mut out.modality_rules, rule.id.clone());
                            comments.push((node.span.start, origin.clone(), lines, false));
                        }
                        Err(e) => out.op_diags.push((
                            origin.clone(),
                            Diagnostic::error("modality", e).at(format!("{} {}:{}", origin, target.path, target.line)),
                        )),
                    }
                }
                Payload::Navigation(n) => match apply_navigation(unit, node, n, origin) {
                    Ok((s, warnings)) => {
                        structurals.push(s);
                        *out.counts.entry(origin.clone()).or_default() += 1;
                        out.op_diags.extend(warnings.into_iter().map(|d| (origin.clone(), d)));
                        push_unique(&mut out.navigation_rules, rule.id.clone());
                        comments.push((node.span.start, origin.clone(), lines, false));
                    }
                    Err(e) => out.op_diags.push((
                        origin.clone(),
                        Diagnostic::error("navigation", e).at(format!("{} {}:{}", origin, target.path, target.line)),
                    )),
                },
            }
        }
    }

    let mut edited: Vec<(usize, Origin)> = Vec::new();
    for (start, ws) in &writes {
        let Some(node) = unit.node_at(*start) else { continue };
        let (edits, errs) = widget_edits(unit, node, ws);
        for e in &edits {
            for o in &e.origins {
                *out.counts.entry(o.clone()).or_default() += 1;
                push_unique(&mut edited, (*start, o.clone()));
            }
        }
        for d in errs {
            let origin = ws
                .iter()
                .map(|w| &w.origin)
                .find(|o| d.location.as_deref() == Some(o.to_string().as_str()))
                .cloned()
                .unwrap_or_else(|| ws[0].origin.clone());
            out.op_diags.push((origin, d));
        }
        leaf.extend(edits);
    }
    for (start, origin, lines, needs_edit) in comments {
        if needs_edit && !edited.contains(&(start, origin.clone())) {
            continue;
        }
        leaf.push(comment_edit(unit, start, &lines, &origin));
    }
    if let Some(e) = import_edit(unit, &imports, &import_origins) {
        leaf.push(e);
    }
    if leaf.is_empty() && structurals.is_empty() {
        return out;
    }

    let result = compose(&unit.path, &unit.text, leaf, structurals)
        .and_then(|edits| apply_edits(&unit.text, &edits).map(|content| (edits, content)));
    match result {
        Ok((edits, content)) => {
            out.file = Some(AdaptedFile {
                path: unit.path.clone(),
                content,
                edits,
            })
        }
        Err(e) => out
            .diagnostics
            .push(Diagnostic::error("edit", e.to_string()).at(unit.path.clone())),
    }
    out
}

/// Applies a plan to parsed sources. Per-file work may run in parallel;
/// the result does not depend on scheduling.
pub fn transform(units: &[SourceUnit], plan: &OperationPlan, rules: &RulesModel, parallel: bool) -> TransformResult {
    let outcomes: Vec<FileOutcome> = if parallel {
        units.par_iter().map(|u| transform_unit(u, plan, rules)).collect()
    } else {
        units.iter().map(|u| transform_unit(u, plan, rules)).collect()
    };

    let mut ops: Vec<OpReport> = plan
        .ops
        .iter()
        .map(|p| OpReport {
            origin: p.origin.clone(),
            edits: 0,
            diagnostics: p.diagnostics.clone(),
        })
        .collect();
    let position: BTreeMap<&Origin, usize> = plan.ops.iter().enumerate().map(|(i, p)| (&p.origin, i)).collect();
    let mut files = Vec::new();
    let mut diagnostics = Vec::new();
    let mut modality_rules: Vec<String> = Vec::new();
    let mut navigation_rules: Vec<String> = Vec::new();
    for o in outcomes {
        for (origin, n) in o.counts {
            if let Some(&i) = position.get(&origin) {
                ops[i].edits += n;
            }
        }
        for (origin, d) in o.op_diags {
            if let Some(&i) = position.get(&origin) {
                ops[i].diagnostics.push(d);
            }
        }
        for r in o.modality_rules {
            push_unique(&mut modality_rules, r);
        }
        for r in o.navigation_rules {
            push_unique(&mut navigation_rules, r);
        }
        diagnostics.extend(o.diagnostics);
        files.extend(o.file);
    }
    files.sort_by(|a, b| a.path.cmp(&b.path));

    let mut generated = Vec::new();
    let order = |ids: Vec<String>| -> Vec<String> {
        rules.rule_ids().into_iter().filter(|r| ids.iter().any(|i| i == r)).map(String::from).collect()
    };
    for (path, content, ids) in [
        (MODALITY_HELPER_PATH, MODALITY_HELPER, modality_rules),
        (NAVIGATION_HELPER_PATH, NAVIGATION_HELPER, navigation_rules),
    ] {
        if ids.is_empty() {
            continue;
        }
        if units.iter().any(|u| u.path == path) {
            diagnostics.push(
                Diagnostic::error("generated-file-collision", format!("generated file {path} collides with an app file"))
                    .at(path),
            );
            continue;
        }
        generated.push(GeneratedFile {
            path: path.to_string(),
            content: content.to_string(),
            rule_ids: order(ids),
        });
    }
    TransformResult {
        files,
        generated,
        ops,
        diagnostics,
    }
}
