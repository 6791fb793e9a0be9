// SPDX-License-Identifier: Apache-2.0
//! Adaptation-rules language: model, parser, canonical formatter, and
//! validator for `.adapt` files.

mod format;
mod lexer;
mod parser;
mod validate;

use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::context::ContextPath;

pub use format::format_rules;
pub use parser::parse_rules;
pub use validate::validate_rules;

/// Line/column of a construct in its source file (1-based). Positions never
/// take part in structural equality, so a formatted-then-reparsed model
/// compares equal to the original.
#[derive(Debug, Clone, Copy, Default, Eq, Serialize)]
pub struct SourcePos {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for SourcePos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{pos}: {kind}")]
pub struct RulesError {
    pub pos: SourcePos,
    pub kind: RulesErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RulesErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("duplicate rule id \"{0}\"")]
    DuplicateRuleId(String),
    #[error("rule must declare at least one operation")]
    NoOperations,
    #[error("payload entry `{entry}` does not match adaptation_type {expected}")]
    PayloadMismatch {
        expected: AdaptationType,
        entry: String,
    },
    #[error("wildcard keys are only permitted for presentation operations")]
    WildcardNotAllowed,
    #[error("{0}")]
    InvalidPayload(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RulesModel {
    pub rules: Vec<AdaptationRule>,
}

impl RulesModel {
    pub fn rule(&self, id: &str) -> Option<&AdaptationRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn rule_ids(&self) -> Vec<&str> {
        self.rules.iter().map(|r| r.id.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationRule {
    pub id: String,
    pub wcag: Option<String>,
    pub comment: RuleComment,
    pub condition: ConditionExpr,
    pub operations: Vec<Operation>,
    pub pos: SourcePos,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RuleComment {
    pub problem: Option<String>,
    pub solution: Option<String>,
    pub advantages: Option<String>,
    pub tradeoffs: Option<String>,
}

impl RuleComment {
    pub fn is_empty(&self) -> bool {
        self.fields().next().is_none()
    }

    /// Present fields in canonical order.
    pub fn fields(&self) -> impl Iterator<Item = (&'static str, &str)> {
        [
            ("problem", &self.problem),
            ("solution", &self.solution),
            ("advantages", &self.advantages),
            ("tradeoffs", &self.tradeoffs),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConditionExpr {
    Compare(Comparison),
    And(Vec<ConditionExpr>),
    Or(Vec<ConditionExpr>),
    Not(Box<ConditionExpr>),
}

impl ConditionExpr {
    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&Comparison> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Comparison>) {
        match self {
            ConditionExpr::Compare(c) => out.push(c),
            ConditionExpr::And(xs) | ConditionExpr::Or(xs) => {
                xs.iter().for_each(|x| x.collect_leaves(out))
            }
            ConditionExpr::Not(x) => x.collect_leaves(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub path: ContextPath,
    pub op: RelOp,
    pub literal: Literal,
    pub pos: SourcePos,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.path, self.op, self.literal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn is_ordered(self) -> bool {
        matches!(self, RelOp::Lt | RelOp::Le | RelOp::Gt | RelOp::Ge)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }

    /// Applies the operator to an already computed ordering.
    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            RelOp::Eq => ord == Equal,
            RelOp::Ne => ord != Equal,
            RelOp::Lt => ord == Less,
            RelOp::Le => ord != Greater,
            RelOp::Gt => ord == Greater,
            RelOp::Ge => ord != Less,
        }
    }
}

impl fmt::Display for RelOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Literal {
    Number(f64),
    Str(String),
    Bool(bool),
    Ident(String),
}

impl Literal {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Literal::Str(s) | Literal::Ident(s) => Some(s),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Literal::Number(_) => "number",
            Literal::Str(_) => "string",
            Literal::Bool(_) => "boolean",
            Literal::Ident(_) => "identifier",
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Number(n) => write!(f, "{n}"),
            Literal::Str(s) => f.write_str(&quote(s)),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Ident(s) => f.write_str(s),
        }
    }
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum KeySpec {
    All,
    Keys(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdaptationType {
    Presentation,
    Modality,
    Navigation,
}

impl AdaptationType {
    pub fn as_str(self) -> &'static str {
        match self {
            AdaptationType::Presentation => "presentation",
            AdaptationType::Modality => "modality",
            AdaptationType::Navigation => "navigation",
        }
    }
}

impl fmt::Display for AdaptationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operation {
    pub keys: KeySpec,
    pub widget_type: String,
    pub comment: Option<String>,
    pub payload: Payload,
    pub pos: SourcePos,
}

impl Operation {
    pub fn adaptation_type(&self) -> AdaptationType {
        match self.payload {
            Payload::Presentation(_) => AdaptationType::Presentation,
            Payload::Modality(_) => AdaptationType::Modality,
            Payload::Navigation(_) => AdaptationType::Navigation,
        }
    }
}

/// The payload variant is the operation's adaptation type.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Presentation(PresentationPayload),
    Modality(ModalityPayload),
    Navigation(NavigationPayload),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PresentationPayload {
    pub properties: IndexMap<String, Literal>,
    /// Argument name to verbatim Dart expression.
    pub raw_args: IndexMap<String, String>,
}

impl PresentationPayload {
    pub fn is_empty(&self) -> bool {
        self.properties.is_empty() && self.raw_args.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModalityPayload {
    pub text_to_speech: bool,
    pub speech_to_text: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NavigationPayload {
    pub container_key: String,
    pub groups: Vec<FormGroup>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormGroup {
    pub title: String,
    pub order: Vec<String>,
}
