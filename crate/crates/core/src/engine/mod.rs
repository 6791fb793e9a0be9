// SPDX-License-Identifier: Apache-2.0
//! Rule evaluation against a user's context and operation planning.

mod eval;
mod plan;

pub use eval::{eval_condition, refold, render_trace, EvalError, Evaluation, LeafOutcome, TraceEntry, Verdict};
pub use plan::{
    applicable_rules, plan_operations, property_slot, Applicability, EngineError, OperationPlan,
    Origin, Overridden, PlannedOp, Target, MODALITY_SLOT,
};
