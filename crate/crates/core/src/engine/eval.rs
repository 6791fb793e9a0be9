// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::adapt::{Comparison, ConditionExpr, Literal, RelOp};
use crate::context::{ContextPath, ContextValue, Resolution};
use crate::schema::SchemaRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Applies,
    DoesNotApply,
    NotApplicableUnresolved,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Applies => "applies",
            Verdict::DoesNotApply => "does_not_apply",
            Verdict::NotApplicableUnresolved => "not_applicable_unresolved",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafOutcome {
    True,
    False,
    Unresolved,
}

impl LeafOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            LeafOutcome::True => "true",
            LeafOutcome::False => "false",
            LeafOutcome::Unresolved => "unresolved",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub path: ContextPath,
    pub op: RelOp,
    pub literal: Literal,
    pub resolved: Resolution,
    pub outcome: LeafOutcome,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {} ; {} {} → {}",
            self.path,
            self.resolved,
            self.op,
            self.literal,
            self.outcome.as_str()
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub verdict: Verdict,
    /// One entry per leaf, in left-to-right order.
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{leaf}: {message}")]
pub struct EvalError {
    pub leaf: String,
    pub message: String,
}

/// Evaluates `expr` with every leaf visited. Any unresolved leaf makes the
/// whole verdict `not_applicable_unresolved`, whatever the boolean
/// structure around it.
pub fn eval_condition<F>(
    expr: &ConditionExpr,
    resolver: F,
    schema: &SchemaRegistry,
) -> Result<Evaluation, EvalError>
where
    F: Fn(&ContextPath) -> Resolution,
{
    let mut trace = Vec::new();
    for leaf in expr.leaves() {
        let resolved = resolver(&leaf.path);
        let outcome = match &resolved {
            Resolution::Unresolved(_) => LeafOutcome::Unresolved,
            Resolution::Value(v) => {
                if compare(leaf, v, schema)? {
                    LeafOutcome::True
                } else {
                    LeafOutcome::False
                }
            }
        };
        trace.push(TraceEntry {
            path: leaf.path.clone(),
            op: leaf.op,
            literal: leaf.literal.clone(),
            resolved,
            outcome,
        });
    }
    let verdict = refold(expr, &trace).expect("trace built from the same leaves");
    Ok(Evaluation { verdict, trace })
}

/// Recomputes a verdict from a trace alone. Returns `None` if the trace
/// does not have one entry per leaf.
pub fn refold(expr: &ConditionExpr, trace: &[TraceEntry]) -> Option<Verdict> {
    if trace.len() != expr.leaves().len() {
        return None;
    }
    if trace.iter().any(|t| t.outcome == LeafOutcome::Unresolved) {
        return Some(Verdict::NotApplicableUnresolved);
    }
    let mut outcomes = trace.iter().map(|t| t.outcome == LeafOutcome::True);
    let value = fold(expr, &mut outcomes);
    Some(if value {
        Verdict::Applies
    } else {
        Verdict::DoesNotApply
    })
}

fn fold(expr: &ConditionExpr, outcomes: &mut impl Iterator<Item = bool>) -> bool {
    match expr {
        ConditionExpr::Compare(_) => outcomes.next().unwrap_or(false),
        ConditionExpr::Not(inner) => !fold(inner, outcomes),
        ConditionExpr::And(items) => items.iter().fold(true, |acc, e| fold(e, outcomes) && acc),
        ConditionExpr::Or(items) => items.iter().fold(false, |acc, e| fold(e, outcomes) || acc),
    }
}

fn compare(leaf: &Comparison, value: &ContextValue, schema: &SchemaRegistry) -> Result<bool, EvalError> {
    let clash = |message: String| EvalError {
        leaf: leaf.to_string(),
        message,
    };
    let ord = match (value, &leaf.literal) {
        (ContextValue::Number(a), Literal::Number(b)) => {
            a.partial_cmp(b).ok_or_else(|| clash("number is not comparable".into()))?
        }
        (ContextValue::Bool(a), Literal::Bool(b)) if !leaf.op.is_ordered() => a.cmp(b),
        (ContextValue::Text(a), Literal::Str(b) | Literal::Ident(b)) if !leaf.op.is_ordered() => {
            a.as_str().cmp(b.as_str())
        }
        (ContextValue::Enum(a), Literal::Str(b) | Literal::Ident(b)) => {
            if !leaf.op.is_ordered() {
                a.as_str().cmp(b.as_str())
            } else {
                let domain = schema
                    .ordering(&leaf.path)
                    .ok_or_else(|| clash("ordered comparison on unordered enum".into()))?;
                let ra = domain
                    .rank(a)
                    .ok_or_else(|| clash(format!("value `{a}` is not a declared level")))?;
                let rb = domain
                    .rank(b)
                    .ok_or_else(|| clash(format!("`{b}` is not a declared level")))?;
                ra.cmp(&rb)
            }
        }
        (ContextValue::Bool(_) | ContextValue::Text(_), Literal::Bool(_) | Literal::Str(_) | Literal::Ident(_))
            if leaf.op.is_ordered() =>
        {
            return Err(clash(format!("ordered comparison on {} value", value.kind_name())))
        }
        _ => {
            return Err(clash(format!(
                "{} literal compared with {} value",
                leaf.literal.kind_name(),
                value.kind_name()
            )))
        }
    };
    Ok(leaf.op.holds(ord))
}

/// The verdict line followed by one trace line per leaf.
pub fn render_trace(eval: &Evaluation) -> String {
    let mut out = format!("verdict: {}\n", eval.verdict);
    for t in &eval.trace {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}
