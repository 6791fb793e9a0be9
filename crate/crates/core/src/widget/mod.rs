// SPDX-License-Identifier: Apache-2.0
//! Lossless reading of Flutter/Dart sources: tokens, constructor
//! invocations, keys, imports.

mod index;
mod lexer;
mod parser;

pub use index::{WidgetIndex, WidgetRef};
pub use lexer::{lex, line_col, LexError, Token, TokenKind};
pub use parser::{
    parse_widget_tree, Declaration, ImportDecl, NamedArg, SourceUnit, Span, WidgetNode,
    WidgetParseError,
};

/// Top-level elements of a list literal `[a, b, c]` given the span of the
/// list including its brackets. Returns the element spans with trivia
/// trimmed, or `None` if `span` is not a list literal.
pub fn list_elements(unit: &SourceUnit, span: Span) -> Option<Vec<Span>> {
    let text = &unit.text;
    let sig: Vec<&Token> = unit
        .tokens
        .iter()
        .filter(|t| !t.kind.is_trivia() && t.start >= span.start && t.end <= span.end)
        .collect();
    let first = sig.first()?;
    let last = sig.last()?;
    if first.text(text) != "[" || last.text(text) != "]" || first.start != span.start || last.end != span.end {
        return None;
    }
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut seg: Option<(usize, usize)> = None;
    for t in &sig[1..sig.len() - 1] {
        let s = t.text(text);
        if t.kind == TokenKind::Punct {
            match s {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth = depth.checked_sub(1)?,
                "," if depth == 0 => {
                    if let Some((a, b)) = seg.take() {
                        out.push(Span::new(a, b));
                    }
                    continue;
                }
                _ => {}
            }
        }
        seg = Some(match seg {
            Some((a, _)) => (a, t.end),
            None => (t.start, t.end),
        });
    }
    if depth != 0 {
        return None;
    }
    if let Some((a, b)) = seg {
        out.push(Span::new(a, b));
    }
    Some(out)
}
