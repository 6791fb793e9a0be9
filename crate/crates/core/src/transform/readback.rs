// SPDX-License-Identifier: Apache-2.0

use super::property::{PropertyTable, Recipe};
use crate::widget::{SourceUnit, WidgetNode};

/// Current Dart source of a presentation property on `node`, following the
/// same recipe the transformer writes with.
pub fn read_property(unit: &SourceUnit, node: &WidgetNode, property: &str) -> Option<String> {
    let spec = PropertyTable::builtin().widget(&node.type_name)?.property(property)?;
    let text = &unit.text;
    match spec.recipe {
        Recipe::Direct { arg } => Some(node.read_arg(arg)?.value.text(text).to_string()),
        Recipe::IconIdentifier => Some(node.positional.first()?.text(text).to_string()),
        Recipe::Nested { arg, .. } => {
            let value = node.read_arg(arg)?.value;
            let style = node.child_at(value)?;
            Some(style.read_arg(property)?.value.text(text).to_string())
        }
    }
}
