// SPDX-License-Identifier: Apache-2.0
//! Lossless tokenizer for the Dart subset. Every byte of the input belongs
//! to exactly one token; whitespace and comments are trivia tokens.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TokenKind {
    Whitespace,
    LineComment,
    BlockComment,
    Ident,
    Number,
    Str,
    Punct,
}

impl TokenKind {
    pub fn is_trivia(self) -> bool {
        matches!(
            self,
            TokenKind::Whitespace | TokenKind::LineComment | TokenKind::BlockComment
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn text<'a>(&self, src: &'a str) -> &'a str {
        &src[self.start..self.end]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct LexError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// 1-based line and column (in characters) of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[line_start..].chars().count() + 1)
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_' || b == b'$'
}

fn is_ident_continue(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'$'
}

impl<'a> Lexer<'a> {
    fn error(&self, offset: usize, message: impl Into<String>) -> LexError {
        let (line, column) = line_col(self.src, offset);
        LexError {
            offset,
            line,
            column,
            message: message.into(),
        }
    }

    fn peek_at(&self, i: usize) -> Option<u8> {
        self.bytes.get(i).copied()
    }

    /// Scans one token starting at `self.pos`.
    fn token(&mut self) -> Result<Token, LexError> {
        let start = self.pos;
        let b = self.bytes[start];
        let kind = match b {
            b if b.is_ascii_whitespace() => {
                while self.peek_at(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
                    self.pos += 1;
                }
                TokenKind::Whitespace
            }
            b'/' if self.peek_at(start + 1) == Some(b'/') => {
                while self.peek_at(self.pos).is_some_and(|c| c != b'\n') {
                    self.pos += 1;
                }
                TokenKind::LineComment
            }
            b'/' if self.peek_at(start + 1) == Some(b'*') => {
                self.block_comment()?;
                TokenKind::BlockComment
            }
            b'r' if matches!(self.peek_at(start + 1), Some(b'\'' | b'"')) => {
                self.pos += 1;
                self.string(start, true)?;
                TokenKind::Str
            }
            b'\'' | b'"' => {
                self.string(start, false)?;
                TokenKind::Str
            }
            b if is_ident_start(b) => {
                while self.peek_at(self.pos).is_some_and(is_ident_continue) {
                    self.pos += 1;
                }
                TokenKind::Ident
            }
            b if b.is_ascii_digit() => {
                self.number();
                TokenKind::Number
            }
            _ => {
                // Multi-byte UTF-8 characters stay whole.
                let ch = self.src[start..].chars().next().unwrap();
                self.pos += ch.len_utf8();
                TokenKind::Punct
            }
        };
        Ok(Token {
            kind,
            start,
            end: self.pos,
        })
    }

    fn block_comment(&mut self) -> Result<(), LexError> {
        let start = self.pos;
        self.pos += 2;
        let mut depth = 1;
        while depth > 0 {
            match (self.peek_at(self.pos), self.peek_at(self.pos + 1)) {
                (None, _) => return Err(self.error(start, "unterminated block comment")),
                (Some(b'/'), Some(b'*')) => {
                    depth += 1;
                    self.pos += 2;
                }
                (Some(b'*'), Some(b'/')) => {
                    depth -= 1;
                    self.pos += 2;
                }
                _ => self.pos += 1,
            }
        }
        Ok(())
    }

    fn number(&mut self) {
        let start = self.pos;
        if self.bytes[start] == b'0' && matches!(self.peek_at(start + 1), Some(b'x' | b'X')) {
            self.pos += 2;
            while self.peek_at(self.pos).is_some_and(|c| c.is_ascii_hexdigit()) {
                self.pos += 1;
            }
            return;
        }
        let digits = |l: &mut Self| {
            while l.peek_at(l.pos).is_some_and(|c| c.is_ascii_digit()) {
                l.pos += 1;
            }
        };
        digits(self);
        if self.peek_at(self.pos) == Some(b'.')
            && self.peek_at(self.pos + 1).is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.peek_at(self.pos), Some(b'e' | b'E')) {
            let mut p = self.pos + 1;
            if matches!(self.peek_at(p), Some(b'+' | b'-')) {
                p += 1;
            }
            if self.peek_at(p).is_some_and(|c| c.is_ascii_digit()) {
                self.pos = p;
                digits(self);
            }
        }
    }

    /// Scans a string literal whose opening quote is at `self.pos`. `start`
    /// is the token start (before any `r` prefix).
    fn string(&mut self, start: usize, raw: bool) -> Result<(), LexError> {
        let quote = self.bytes[self.pos];
        let triple =
            self.peek_at(self.pos + 1) == Some(quote) && self.peek_at(self.pos + 2) == Some(quote);
        self.pos += if triple { 3 } else { 1 };
        loop {
            let Some(c) = self.peek_at(self.pos) else {
                return Err(self.error(start, "unterminated string"));
            };
            if c == quote {
                if !triple {
                    self.pos += 1;
                    return Ok(());
                }
                if self.peek_at(self.pos + 1) == Some(quote)
                    && self.peek_at(self.pos + 2) == Some(quote)
                {
                    self.pos += 3;
                    return Ok(());
                }
                self.pos += 1;
                continue;
            }
            match c {
                b'\n' if !triple => return Err(self.error(start, "unterminated string")),
                b'\\' if !raw => {
                    self.pos += 1;
                    if self.peek_at(self.pos).is_none() {
                        return Err(self.error(start, "unterminated string"));
                    }
                    let ch = self.src[self.pos..].chars().next().unwrap();
                    self.pos += ch.len_utf8();
                }
                b'$' if !raw && self.peek_at(self.pos + 1) == Some(b'{') => {
                    self.pos += 2;
                    self.interpolation(self.pos - 2)?;
                }
                _ => self.pos += 1,
            }
        }
    }

    /// Consumes tokens after `${` up to and including the balancing `}`.
    fn interpolation(&mut self, open: usize) -> Result<(), LexError> {
        let mut depth = 1usize;
        while self.pos < self.bytes.len() {
            let t = self.token()?;
            if t.kind == TokenKind::Punct {
                match self.bytes[t.start] {
                    b'{' => depth += 1,
                    b'}' => {
                        depth -= 1;
                        if depth == 0 {
                            return Ok(());
                        }
                    }
                    _ => {}
                }
            }
        }
        Err(self.error(open, "unterminated string interpolation"))
    }
}

pub fn lex(text: &str) -> Result<Vec<Token>, LexError> {
    let mut lx = Lexer {
        src: text,
        bytes: text.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    while lx.pos < text.len() {
        out.push(lx.token()?);
    }
    Ok(out)
}
