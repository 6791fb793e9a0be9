// SPDX-License-Identifier: Apache-2.0

use super::edit::{Edit, MARKER};
use super::presentation::line_indent;
use crate::adapt::{AdaptationRule, Operation};
use crate::engine::Origin;
use crate::widget::{SourceUnit, Span};

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Comment lines for one operation: the marker, the rule's comment fields
/// that are present, then the operation's own comment.
pub fn render_provenance(rule: &AdaptationRule, op_index: usize, op: &Operation) -> Vec<String> {
    let mut marker = format!("{MARKER}rule:{} op:{op_index}", rule.id);
    if let Some(w) = &rule.wcag {
        marker.push_str(&format!(" wcag:{}", one_line(w)));
    }
    marker.push(']');
    let mut lines = vec![marker];
    for (k, v) in rule.comment.fields() {
        lines.push(format!("// {k}: {}", one_line(v)));
    }
    if let Some(c) = &op.comment {
        lines.push(format!("// {}", one_line(c)));
    }
    lines
}

/// Inserts `lines` above the invocation starting at `at`, at that line's
/// indentation. A widget that does not start its line gets the block on
/// the line above.
pub fn comment_edit(unit: &SourceUnit, at: usize, lines: &[String], origin: &Origin) -> Edit {
    let text = &unit.text;
    let line_start = text[..at].rfind('\n').map_or(0, |i| i + 1);
    let indent = line_indent(text, at);
    let (offset, body) = if text[line_start..at].trim().is_empty() {
        let mut body = lines.join(&format!("\n{indent}"));
        body.push('\n');
        body.push_str(indent);
        (at, body)
    } else {
        let body: String = lines.iter().map(|l| format!("{indent}{l}\n")).collect();
        (line_start, body)
    };
    Edit {
        path: unit.path.clone(),
        span: Span::new(offset, offset),
        text: body,
        origins: vec![origin.clone()],
        comment: true,
    }
}
