// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use super::parser::{SourceUnit, WidgetNode};
use crate::transform::property::canonical_widget_type;

/// Location of one invocation inside a set of parsed files.
#[derive(Debug, Clone, Copy)]
pub struct WidgetRef<'u> {
    pub unit: &'u SourceUnit,
    pub node: &'u WidgetNode,
}

impl WidgetRef<'_> {
    pub fn path(&self) -> &str {
        &self.unit.path
    }

    pub fn offset(&self) -> usize {
        self.node.span.start
    }
}

/// Lookup by key and by widget type across files, in (path, offset) order.
#[derive(Debug, Default)]
pub struct WidgetIndex<'u> {
    by_key: BTreeMap<String, Vec<WidgetRef<'u>>>,
    by_type: BTreeMap<String, Vec<WidgetRef<'u>>>,
}

impl<'u> WidgetIndex<'u> {
    pub fn build(units: &'u [SourceUnit]) -> Self {
        let mut sorted: Vec<&SourceUnit> = units.iter().collect();
        sorted.sort_by(|a, b| a.path.cmp(&b.path));
        let mut index = WidgetIndex::default();
        for unit in sorted {
            for node in unit.walk() {
                let r = WidgetRef { unit, node };
                if let Some(k) = &node.key {
                    index.by_key.entry(k.clone()).or_default().push(r);
                }
                index
                    .by_type
                    .entry(canonical_widget_type(&node.type_name).to_string())
                    .or_default()
                    .push(r);
            }
        }
        index
    }

    pub fn by_key(&self, key: &str) -> &[WidgetRef<'u>] {
        self.by_key.get(key).map_or(&[], |v| v.as_slice())
    }

    pub fn by_type(&self, type_name: &str) -> &[WidgetRef<'u>] {
        self.by_type
            .get(canonical_widget_type(type_name))
            .map_or(&[], |v| v.as_slice())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.by_key.keys().map(|k| k.as_str())
    }
}
