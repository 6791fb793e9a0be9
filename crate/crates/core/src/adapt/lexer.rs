// SPDX-License-Identifier: Apache-2.0

use super::{RulesError, RulesErrorKind, SourcePos};

#[derive(Debug, Clone, PartialEq)]
pub(super) enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Colon,
    Comma,
    Dot,
    Star,
    AndAnd,
    OrOr,
    Bang,
    EqEq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string {}", super::quote(s)),
            Tok::Num(n) => format!("number {n}"),
            Tok::Eof => "end of file".to_string(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Star => "`*`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::OrOr => "`||`".into(),
            Tok::Bang => "`!`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Spanned {
    pub tok: Tok,
    pub pos: SourcePos,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> SourcePos {
        SourcePos {
            line: self.line,
            column: self.column,
        }
    }
}

fn err(pos: SourcePos, msg: impl Into<String>) -> RulesError {
    RulesError {
        pos,
        kind: RulesErrorKind::Syntax(msg.into()),
    }
}

pub(super) fn tokenize(text: &str) -> Result<Vec<Spanned>, RulesError> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        while matches!(cur.peek(), Some(c) if c.is_whitespace()) {
            cur.bump();
        }
        let pos = cur.pos();
        let Some(c) = cur.bump() else {
            out.push(Spanned { tok: Tok::Eof, pos });
            return Ok(out);
        };
        let tok = match c {
            '/' => {
                if cur.peek() == Some('/') {
                    while !matches!(cur.peek(), None | Some('\n')) {
                        cur.bump();
                    }
                    continue;
                }
                return Err(err(pos, "unexpected `/`"));
            }
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '*' => Tok::Star,
            '&' if cur.peek() == Some('&') => {
                cur.bump();
                Tok::AndAnd
            }
            '|' if cur.peek() == Some('|') => {
                cur.bump();
                Tok::OrOr
            }
            '=' if cur.peek() == Some('=') => {
                cur.bump();
                Tok::EqEq
            }
            '!' if cur.peek() == Some('=') => {
                cur.bump();
                Tok::Ne
            }
            '!' => Tok::Bang,
            '<' if cur.peek() == Some('=') => {
                cur.bump();
                Tok::Le
            }
            '<' => Tok::Lt,
            '>' if cur.peek() == Some('=') => {
                cur.bump();
                Tok::Ge
            }
            '>' => Tok::Gt,
            '"' => {
                let mut s = String::new();
                loop {
                    match cur.bump() {
                        None => return Err(err(pos, "unterminated string")),
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some(e @ ('"' | '\\')) => s.push(e),
                            Some(other) => {
                                return Err(err(cur.pos(), format!("invalid escape `\\{other}`")))
                            }
                            None => return Err(err(pos, "unterminated string")),
                        },
                        Some(ch) => s.push(ch),
                    }
                }
                Tok::Str(s)
            }
            c if c == '-' || c.is_ascii_digit() => {
                let mut s = String::from(c);
                while matches!(cur.peek(), Some(d) if d.is_ascii_digit()) {
                    s.push(cur.bump().unwrap());
                }
                if cur.peek() == Some('.') {
                    s.push(cur.bump().unwrap());
                    while matches!(cur.peek(), Some(d) if d.is_ascii_digit()) {
                        s.push(cur.bump().unwrap());
                    }
                }
                if s == "-" || s.ends_with('.') {
                    return Err(err(pos, format!("malformed number `{s}`")));
                }
                match s.parse::<f64>() {
                    Ok(n) if n.is_finite() => Tok::Num(n),
                    _ => return Err(err(pos, format!("malformed number `{s}`"))),
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::from(c);
                while matches!(cur.peek(), Some(d) if d.is_ascii_alphanumeric() || d == '_') {
                    s.push(cur.bump().unwrap());
                }
                Tok::Ident(s)
            }
            other => return Err(err(pos, format!("unexpected character `{other}`"))),
        };
        out.push(Spanned { tok, pos });
    }
}
