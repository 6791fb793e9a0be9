// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;
use thiserror::Error;

use super::presentation::line_indent;
use crate::engine::Origin;
use crate::widget::Span;

/// Start of every provenance marker line.
pub const MARKER: &str = "// [ADAPTFORGE ";

/// A splice against the original text of one file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edit {
    pub path: String,
    pub span: Span,
    pub text: String,
    pub origins: Vec<Origin>,
    /// Provenance comment block; may be moved when the code around it is
    /// restructured.
    #[serde(skip)]
    pub comment: bool,
}

impl Edit {
    pub fn new(path: &str, span: Span, text: impl Into<String>, origin: &Origin) -> Self {
        Self {
            path: path.to_string(),
            span,
            text: text.into(),
            origins: vec![origin.clone()],
            comment: false,
        }
    }

    pub fn insert(path: &str, at: usize, text: impl Into<String>, origin: &Origin) -> Self {
        Self::new(path, Span::new(at, at), text, origin)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EditError {
    #[error("source already adapted")]
    AlreadyAdapted,
    #[error("edit {span:?} is outside the text or not on a character boundary")]
    OutOfBounds { span: Span },
    #[error("overlapping edits {a:?} ({}) and {b:?} ({})", join_origins(.a_origins), join_origins(.b_origins))]
    Overlap {
        a: Span,
        b: Span,
        a_origins: Vec<Origin>,
        b_origins: Vec<Origin>,
    },
    #[error("edit {span:?} ({}) would be lost by restructuring", join_origins(.origins))]
    Displaced { span: Span, origins: Vec<Origin> },
}

fn join_origins(list: &[Origin]) -> String {
    list.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(", ")
}

fn check_bounds(text: &str, span: Span) -> Result<(), EditError> {
    if span.start > span.end
        || span.end > text.len()
        || !text.is_char_boundary(span.start)
        || !text.is_char_boundary(span.end)
    {
        return Err(EditError::OutOfBounds { span });
    }
    Ok(())
}

fn sorted(edits: &[Edit]) -> Vec<&Edit> {
    let mut v: Vec<&Edit> = edits.iter().collect();
    v.sort_by_key(|e| (e.span.start, e.span.end));
    v
}

/// Overlap means sharing a byte, or two insertions at one offset (their
/// relative order would be ambiguous).
fn check_disjoint(sorted: &[&Edit]) -> Result<(), EditError> {
    for w in sorted.windows(2) {
        let (a, b) = (w[0], w[1]);
        let same_point = a.span.is_empty() && b.span.is_empty() && a.span.start == b.span.start;
        if b.span.start < a.span.end || same_point {
            return Err(EditError::Overlap {
                a: a.span,
                b: b.span,
                a_origins: a.origins.clone(),
                b_origins: b.origins.clone(),
            });
        }
    }
    Ok(())
}

/// Splices sorted, disjoint edits into `text[range]`.
fn splice(text: &str, range: Span, edits: &[&Edit]) -> String {
    let mut out = String::with_capacity(range.len() + edits.iter().map(|e| e.text.len()).sum::<usize>());
    let mut cursor = range.start;
    for e in edits {
        out.push_str(&text[cursor..e.span.start]);
        out.push_str(&e.text);
        cursor = e.span.end;
    }
    out.push_str(&text[cursor..range.end]);
    out
}

/// Applies non-overlapping edits in one left-to-right pass. Bytes outside
/// every edit span are copied unchanged.
pub fn apply_edits(original: &str, edits: &[Edit]) -> Result<String, EditError> {
    if original.contains(MARKER) {
        return Err(EditError::AlreadyAdapted);
    }
    for e in edits {
        check_bounds(original, e.span)?;
    }
    let s = sorted(edits);
    check_disjoint(&s)?;
    Ok(splice(original, Span::new(0, original.len()), &s))
}

/// Part of a structural rewrite: literal text, or a range of the original
/// rendered with the edits that fall inside it. Continuation lines of a
/// source piece are moved from the original line's indent to `indent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Text(String),
    Source { span: Span, indent: String },
}

/// A rewrite of `span` whose replacement is built from pieces, some of
/// which reuse original text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structural {
    pub span: Span,
    pub pieces: Vec<Piece>,
    pub origins: Vec<Origin>,
}

/// Concatenates insertions that share an offset, keeping their order.
fn merge_insertions(edits: Vec<Edit>) -> Vec<Edit> {
    let mut out: Vec<Edit> = Vec::with_capacity(edits.len());
    let mut positions: std::collections::HashMap<usize, usize> = Default::default();
    for e in edits {
        if e.span.is_empty() {
            if let Some(&i) = positions.get(&e.span.start) {
                let prev = &mut out[i];
                prev.text.push_str(&e.text);
                prev.comment &= e.comment;
                for o in e.origins {
                    if !prev.origins.contains(&o) {
                        prev.origins.push(o);
                    }
                }
                continue;
            }
            positions.insert(e.span.start, out.len());
        }
        out.push(e);
    }
    out
}

/// Moves every line after the first from indent `from` to indent `to`.
/// Text holding a multi-line string literal is returned unchanged.
fn reindent(s: &str, from: &str, to: &str) -> String {
    if from == to || s.contains("'''") || s.contains("\"\"\"") {
        return s.to_string();
    }
    let mut lines = s.split('\n');
    let mut out = String::with_capacity(s.len());
    out.push_str(lines.next().unwrap_or(""));
    for line in lines {
        out.push('\n');
        match line.strip_prefix(from) {
            Some(rest) if !line.trim().is_empty() => {
                out.push_str(to);
                out.push_str(rest);
            }
            _ => out.push_str(line),
        }
    }
    out
}

fn relocated_comment(text: &str, indent: &str) -> String {
    let mut out = String::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        out.push_str(line);
        out.push('\n');
        out.push_str(indent);
    }
    out
}

/// Folds structural rewrites and the plain edits they enclose into one
/// flat list of disjoint edits against the original text. Structurals are
/// processed innermost first; insertions exactly at a structural's
/// boundary stay outside it.
pub fn compose(
    path: &str,
    text: &str,
    edits: Vec<Edit>,
    mut structurals: Vec<Structural>,
) -> Result<Vec<Edit>, EditError> {
    let mut pool = merge_insertions(edits);
    for e in &pool {
        check_bounds(text, e.span)?;
    }
    structurals.sort_by_key(|s| (s.span.len(), s.span.start));
    for s in structurals {
        check_bounds(text, s.span)?;
        let (inside, outside): (Vec<Edit>, Vec<Edit>) = pool.into_iter().partition(|e| {
            s.span.contains(e.span)
                && !(e.span.is_empty() && (e.span.start == s.span.start || e.span.start == s.span.end))
        });
        for e in &outside {
            let touches = e.span.start < s.span.end && s.span.start < e.span.end;
            if touches {
                return Err(EditError::Overlap {
                    a: e.span,
                    b: s.span,
                    a_origins: e.origins.clone(),
                    b_origins: s.origins.clone(),
                });
            }
        }
        let sources: Vec<(usize, Span, &str)> = s
            .pieces
            .iter()
            .enumerate()
            .filter_map(|(i, p)| match p {
                Piece::Source { span, .. } => Some((i, *span, line_indent(text, span.start))),
                Piece::Text(_) => None,
            })
            .collect();
        let mut assigned: Vec<Vec<Edit>> = vec![Vec::new(); s.pieces.len()];
        let mut origins = s.origins.clone();
        for mut e in inside {
            for o in &e.origins {
                if !origins.contains(o) {
                    origins.push(o.clone());
                }
            }
            if let Some(&(i, _, _)) = sources.iter().find(|(_, span, _)| span.contains(e.span)) {
                assigned[i].push(e);
                continue;
            }
            let next = sources.iter().find(|(_, span, _)| span.start >= e.span.end);
            match next {
                Some(&(i, span, indent)) if e.comment => {
                    e.text = relocated_comment(&e.text, indent);
                    e.span = Span::new(span.start, span.start);
                    assigned[i].push(e);
                }
                _ => {
                    return Err(EditError::Displaced {
                        span: e.span,
                        origins: e.origins,
                    })
                }
            }
        }
        let mut out = String::new();
        for (i, piece) in s.pieces.iter().enumerate() {
            match piece {
                Piece::Text(t) => out.push_str(t),
                Piece::Source { span, indent } => {
                    let merged = merge_insertions(std::mem::take(&mut assigned[i]));
                    let sorted = sorted(&merged);
                    check_disjoint(&sorted)?;
                    let from = line_indent(text, span.start);
                    out.push_str(&reindent(&splice(text, *span, &sorted), from, indent));
                }
            }
        }
        pool = outside;
        pool.push(Edit {
            path: path.to_string(),
            span: s.span,
            text: out,
            origins,
            comment: false,
        });
    }
    pool.sort_by_key(|e| (e.span.start, e.span.end));
    check_disjoint(&pool.iter().collect::<Vec<_>>())?;
    Ok(pool)
}
