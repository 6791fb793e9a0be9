// SPDX-License-Identifier: Apache-2.0
//! Design-time UI adaptation compiler.

pub mod adapt;
pub mod context;
pub mod diagnostic;
pub mod engine;
pub mod pipeline;
pub mod schema;
pub mod transform;
pub mod widget;
