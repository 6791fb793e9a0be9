// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;
use thiserror::Error;

use super::lexer::{lex, line_col, LexError, Token, TokenKind};
use crate::diagnostic::Diagnostic;

/// Half-open byte range into a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedArg {
    pub name: String,
    pub name_span: Span,
    pub value: Span,
    pub trailing_comma: bool,
}

/// A constructor invocation `[const] Upper[<T>][.name](args)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WidgetNode {
    pub type_name: String,
    pub constructor: Option<String>,
    pub is_const: bool,
    /// Whole invocation, including a leading `const`.
    pub span: Span,
    /// From `(` to `)` inclusive.
    pub args_span: Span,
    pub positional: Vec<Span>,
    pub named: Vec<NamedArg>,
    pub key: Option<String>,
    pub children: Vec<WidgetNode>,
}

impl WidgetNode {
    pub fn read_arg(&self, name: &str) -> Option<&NamedArg> {
        self.named.iter().find(|a| a.name == name)
    }

    /// End offset of the last argument (positional or named), if any.
    pub fn last_arg_end(&self) -> Option<usize> {
        self.positional
            .iter()
            .map(|s| s.end)
            .chain(self.named.iter().map(|a| a.value.end))
            .max()
    }

    /// Whether the last argument is followed by a comma.
    pub fn has_trailing_comma(&self, src: &str) -> bool {
        match self.last_arg_end() {
            Some(end) => src[end..self.args_span.end - 1].trim_start().starts_with(','),
            None => false,
        }
    }

    /// Pre-order traversal of this node and its descendants.
    pub fn walk(&self) -> Vec<&WidgetNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    /// Direct child invocation whose span is exactly `span`.
    pub fn child_at(&self, span: Span) -> Option<&WidgetNode> {
        self.children.iter().find(|c| c.span == span)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImportDecl {
    pub uri: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Declaration {
    pub keyword: String,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceUnit {
    pub path: String,
    pub text: String,
    pub tokens: Vec<Token>,
    pub widgets: Vec<WidgetNode>,
    pub imports: Vec<ImportDecl>,
    pub declarations: Vec<Declaration>,
    pub diagnostics: Vec<Diagnostic>,
}

impl SourceUnit {
    /// All invocations in pre-order (which is also byte-offset order).
    pub fn walk(&self) -> Vec<&WidgetNode> {
        self.widgets.iter().flat_map(|w| w.walk()).collect()
    }

    pub fn find_by_key(&self, key: &str) -> Vec<&WidgetNode> {
        self.walk()
            .into_iter()
            .filter(|w| w.key.as_deref() == Some(key))
            .collect()
    }

    pub fn node_at(&self, start: usize) -> Option<&WidgetNode> {
        self.walk().into_iter().find(|w| w.span.start == start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WidgetParseError {
    #[error("{path}: {source}")]
    Lex {
        path: String,
        #[source]
        source: LexError,
    },
    #[error("{path}: line {line}, column {column}: {message}")]
    Syntax {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
}

/// Keywords that may directly precede an invocation.
const LEADING_KEYWORDS: &[&str] = &[
    "const", "new", "return", "await", "yield", "else", "throw", "case", "in", "do",
];

struct Parser<'a> {
    path: &'a str,
    src: &'a str,
    tokens: &'a [Token],
    /// Indices of significant (non-trivia) tokens.
    sig: Vec<usize>,
    /// For each significant position of an opening delimiter, the position
    /// of its closing delimiter.
    matching: Vec<Option<usize>>,
    depth: Vec<usize>,
    diagnostics: Vec<Diagnostic>,
}

pub fn parse_widget_tree(text: &str, path: &str) -> Result<SourceUnit, WidgetParseError> {
    let tokens = lex(text).map_err(|source| WidgetParseError::Lex {
        path: path.to_string(),
        source,
    })?;
    let sig: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.kind.is_trivia())
        .map(|(i, _)| i)
        .collect();
    let mut p = Parser {
        path,
        src: text,
        tokens: &tokens,
        matching: vec![None; sig.len()],
        depth: vec![0; sig.len()],
        sig,
        diagnostics: Vec::new(),
    };
    p.match_delimiters()?;
    let widgets = p.scan(0, p.sig.len())?;
    let imports = p.imports();
    let declarations = p.declarations();
    let diagnostics = std::mem::take(&mut p.diagnostics);
    Ok(SourceUnit {
        path: path.to_string(),
        text: text.to_string(),
        tokens,
        widgets,
        imports,
        declarations,
        diagnostics,
    })
}

impl<'a> Parser<'a> {
    fn tok(&self, i: usize) -> &Token {
        &self.tokens[self.sig[i]]
    }

    fn text(&self, i: usize) -> &'a str {
        self.tokens[self.sig[i]].text(self.src)
    }

    fn is(&self, i: usize, s: &str) -> bool {
        i < self.sig.len() && self.text(i) == s
    }

    fn is_punct(&self, i: usize, s: &str) -> bool {
        i < self.sig.len() && self.tok(i).kind == TokenKind::Punct && self.text(i) == s
    }

    fn is_ident(&self, i: usize) -> bool {
        i < self.sig.len() && self.tok(i).kind == TokenKind::Ident
    }

    fn syntax_error(&self, offset: usize, message: impl Into<String>) -> WidgetParseError {
        let (line, column) = line_col(self.src, offset);
        WidgetParseError::Syntax {
            path: self.path.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    fn match_delimiters(&mut self) -> Result<(), WidgetParseError> {
        let mut stack: Vec<(usize, &str)> = Vec::new();
        for i in 0..self.sig.len() {
            self.depth[i] = stack.len();
            if self.tok(i).kind != TokenKind::Punct {
                continue;
            }
            match self.text(i) {
                open @ ("(" | "[" | "{") => stack.push((i, open)),
                close @ (")" | "]" | "}") => {
                    let want = match close {
                        ")" => "(",
                        "]" => "[",
                        _ => "{",
                    };
                    match stack.pop() {
                        Some((j, open)) if open == want => {
                            self.matching[j] = Some(i);
                            self.depth[i] = stack.len();
                        }
                        Some((j, open)) => {
                            let (l, c) = line_col(self.src, self.tok(j).start);
                            return Err(self.syntax_error(
                                self.tok(i).start,
                                format!("`{close}` does not match `{open}` opened at line {l}, column {c}"),
                            ));
                        }
                        None => {
                            return Err(self.syntax_error(
                                self.tok(i).start,
                                format!("unbalanced `{close}`"),
                            ))
                        }
                    }
                }
                _ => {}
            }
        }
        if let Some((j, open)) = stack.pop() {
            return Err(self.syntax_error(self.tok(j).start, format!("unclosed `{open}`")));
        }
        Ok(())
    }

    /// Recognizes an invocation whose type identifier is at `i`. Returns the
    /// significant position of its `(`.
    fn invocation_at(&self, i: usize) -> Option<(usize, Option<String>)> {
        if !self.is_ident(i) || !self.text(i).as_bytes()[0].is_ascii_uppercase() {
            return None;
        }
        if i > 0 {
            let prev = i - 1;
            if self.is_punct(prev, ".") {
                return None;
            }
            if self.is_ident(prev) && !LEADING_KEYWORDS.contains(&self.text(prev)) {
                return None;
            }
        }
        let mut j = i + 1;
        if self.is_punct(j, "<") {
            let mut depth = 0usize;
            loop {
                if j >= self.sig.len() {
                    return None;
                }
                match self.text(j) {
                    "<" => depth += 1,
                    ">" => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    "," | "?" | "." => {}
                    _ if self.is_ident(j) => {}
                    _ => return None,
                }
                j += 1;
            }
            j += 1;
        }
        let mut ctor = None;
        if self.is_punct(j, ".") && self.is_ident(j + 1) {
            ctor = Some(self.text(j + 1).to_string());
            j += 2;
        }
        if self.is_punct(j, "(") {
            Some((j, ctor))
        } else {
            None
        }
    }

    /// Finds invocations among significant positions `[lo, hi)`.
    fn scan(&mut self, lo: usize, hi: usize) -> Result<Vec<WidgetNode>, WidgetParseError> {
        let mut out = Vec::new();
        let mut i = lo;
        while i < hi {
            if let Some((open, ctor)) = self.invocation_at(i) {
                let node = self.invocation(i, open, ctor)?;
                out.push(node);
                i = self.matching[open].expect("balanced") + 1;
            } else {
                i += 1;
            }
        }
        Ok(out)
    }

    fn invocation(
        &mut self,
        i: usize,
        open: usize,
        constructor: Option<String>,
    ) -> Result<WidgetNode, WidgetParseError> {
        let close = self.matching[open].expect("balanced");
        let is_const = i > 0 && self.is(i - 1, "const");
        let start = if is_const {
            self.tok(i - 1).start
        } else {
            self.tok(i).start
        };
        let span = Span::new(start, self.tok(close).end);

        let mut positional = Vec::new();
        let mut named: Vec<NamedArg> = Vec::new();
        let mut children = Vec::new();
        let mut seg_start = open + 1;
        let mut k = open + 1;
        while k <= close {
            if k == close || self.is_punct(k, ",") {
                if seg_start < k {
                    let trailing_comma = k != close;
                    let (value_lo, arg) = if self.is_ident(seg_start) && self.is_punct(seg_start + 1, ":") && seg_start + 1 < k {
                        let name_tok = *self.tok(seg_start);
                        if seg_start + 2 >= k {
                            return Err(self.syntax_error(
                                name_tok.start,
                                format!("missing value for argument `{}`", self.text(seg_start)),
                            ));
                        }
                        (
                            seg_start + 2,
                            Some((
                                self.text(seg_start).to_string(),
                                Span::new(name_tok.start, name_tok.end),
                            )),
                        )
                    } else {
                        (seg_start, None)
                    };
                    let value = Span::new(self.tok(value_lo).start, self.tok(k - 1).end);
                    match arg {
                        Some((name, name_span)) => {
                            if named.iter().any(|a| a.name == name) {
                                return Err(self.syntax_error(
                                    name_span.start,
                                    format!("duplicate named argument `{name}`"),
                                ));
                            }
                            named.push(NamedArg {
                                name,
                                name_span,
                                value,
                                trailing_comma,
                            });
                        }
                        None => positional.push(value),
                    }
                    children.extend(self.scan(value_lo, k)?);
                } else if k != close {
                    return Err(self.syntax_error(self.tok(k).start, "empty argument"));
                }
                seg_start = k + 1;
                k += 1;
                continue;
            }
            k = match self.matching[k] {
                Some(m) => m + 1,
                None => k + 1,
            };
        }

        let key = match named.iter().find(|a| a.name == "key") {
            Some(arg) => {
                let key = self.literal_key(arg.value);
                if key.is_none() {
                    let (l, c) = line_col(self.src, arg.value.start);
                    self.diagnostics.push(
                        Diagnostic::info(
                            "computed-key",
                            format!(
                                "key `{}` is not a literal Key('<id>') and cannot be indexed",
                                arg.value.text(self.src)
                            ),
                        )
                        .at(format!("{}:{l}:{c}", self.path)),
                    );
                }
                key
            }
            None => None,
        };

        Ok(WidgetNode {
            type_name: self.text(i).to_string(),
            constructor,
            is_const,
            span,
            args_span: Span::new(self.tok(open).start, self.tok(close).end),
            positional,
            named,
            key,
            children,
        })
    }

    /// `Key('id')`, `ValueKey('id')`, or `const Key('id')` with a plain
    /// quoted string.
    fn literal_key(&self, value: Span) -> Option<String> {
        let mut i = self.sig.iter().position(|&t| self.tokens[t].start == value.start)?;
        if self.is(i, "const") {
            i += 1;
        }
        if !(self.is(i, "Key") || self.is(i, "ValueKey")) {
            return None;
        }
        i += 1;
        if self.is_punct(i, "<") && self.is_ident(i + 1) && self.is_punct(i + 2, ">") {
            i += 3;
        }
        if !self.is_punct(i, "(") || !self.is_punct(i + 2, ")") {
            return None;
        }
        if self.tok(i + 2).end != value.end || self.tok(i + 1).kind != TokenKind::Str {
            return None;
        }
        simple_string_content(self.text(i + 1))
    }

    fn imports(&self) -> Vec<ImportDecl> {
        let mut out = Vec::new();
        for i in 0..self.sig.len() {
            if self.depth[i] != 0 || !self.is(i, "import") || !self.is_ident(i) {
                continue;
            }
            if i + 1 >= self.sig.len() || self.tok(i + 1).kind != TokenKind::Str {
                continue;
            }
            let Some(uri) = simple_string_content(self.text(i + 1)) else {
                continue;
            };
            let Some(semi) = (i + 2..self.sig.len()).find(|&j| self.is_punct(j, ";")) else {
                continue;
            };
            out.push(ImportDecl {
                uri,
                span: Span::new(self.tok(i).start, self.tok(semi).end),
            });
        }
        out
    }

    fn declarations(&self) -> Vec<Declaration> {
        let mut out = Vec::new();
        for i in 0..self.sig.len() {
            if self.depth[i] != 0 || !self.is_ident(i) {
                continue;
            }
            let kw = self.text(i);
            if !matches!(kw, "class" | "mixin" | "enum" | "extension") || !self.is_ident(i + 1) {
                continue;
            }
            let Some(brace) = (i + 1..self.sig.len()).find(|&j| self.is_punct(j, "{")) else {
                continue;
            };
            let close = self.matching[brace].expect("balanced");
            out.push(Declaration {
                keyword: kw.to_string(),
                name: self.text(i + 1).to_string(),
                span: Span::new(self.tok(i).start, self.tok(close).end),
            });
        }
        out
    }
}

/// Content of a single-line, non-interpolated string literal.
fn simple_string_content(lit: &str) -> Option<String> {
    let (raw, body) = match lit.strip_prefix('r') {
        Some(rest) => (true, rest),
        None => (false, lit),
    };
    let quote = body.chars().next()?;
    if body.len() < 2 || body.starts_with(&format!("{quote}{quote}{quote}")) && body.len() >= 6 {
        return None;
    }
    let inner = &body[1..body.len() - 1];
    if raw {
        return Some(inner.to_string());
    }
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => out.push(chars.next()?),
            '$' => return None,
            c => out.push(c),
        }
    }
    Some(out)
}
