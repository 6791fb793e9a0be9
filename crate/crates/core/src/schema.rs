// SPDX-License-Identifier: Apache-2.0
//! Built-in vocabulary of context attributes.
//!
//! The registry is a tree mirroring context files: every section has a root
//! [`NodeSchema`] whose children are keyed by node kind. Anything not listed
//! here is still legal in a context file; validators only report it as
//! informational.

use std::collections::BTreeMap;

use crate::context::{ContextPath, Section};

#[derive(Debug, Clone, PartialEq)]
pub enum ValueType {
    Number,
    Text,
    Bool,
    Enum(EnumDomain),
}

impl ValueType {
    pub fn describe(&self) -> &'static str {
        match self {
            ValueType::Number => "number",
            ValueType::Text => "text",
            ValueType::Bool => "boolean",
            ValueType::Enum(d) if d.ordered => "ordered enum",
            ValueType::Enum(_) => "enum",
        }
    }
}

/// Domain of an enum-typed attribute. `variants: None` is an open enum that
/// accepts any token. Ordered domains list variants from lowest to highest.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumDomain {
    pub variants: Option<Vec<String>>,
    pub ordered: bool,
}

impl EnumDomain {
    fn open() -> Self {
        Self {
            variants: None,
            ordered: false,
        }
    }

    fn closed(variants: &[&str]) -> Self {
        Self {
            variants: Some(variants.iter().map(|s| s.to_string()).collect()),
            ordered: false,
        }
    }

    fn ordered(variants: &[&str]) -> Self {
        Self {
            variants: Some(variants.iter().map(|s| s.to_string()).collect()),
            ordered: true,
        }
    }

    pub fn accepts(&self, token: &str) -> bool {
        match &self.variants {
            None => true,
            Some(v) => v.iter().any(|x| x == token),
        }
    }

    /// Rank of `token` in an ordered domain.
    pub fn rank(&self, token: &str) -> Option<usize> {
        if !self.ordered {
            return None;
        }
        self.variants.as_ref()?.iter().position(|v| v == token)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeSchema {
    pub attributes: BTreeMap<String, ValueType>,
    pub children: BTreeMap<String, NodeSchema>,
    /// Known discriminator names for nodes of this kind, if the vocabulary
    /// is fixed.
    pub names: Option<Vec<String>>,
}

impl NodeSchema {
    fn attr(mut self, name: &str, ty: ValueType) -> Self {
        self.attributes.insert(name.to_string(), ty);
        self
    }

    fn child(mut self, kind: &str, schema: NodeSchema) -> Self {
        self.children.insert(kind.to_string(), schema);
        self
    }

    fn named(mut self, names: &[&str]) -> Self {
        self.names = Some(names.iter().map(|s| s.to_string()).collect());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemaRegistry {
    user: NodeSchema,
    platform: NodeSchema,
    environment: NodeSchema,
}

impl Default for SchemaRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl SchemaRegistry {
    pub fn builtin() -> Self {
        let levels = || ValueType::Enum(EnumDomain::ordered(&["low", "medium", "high"]));

        let user = NodeSchema::default()
            .attr("age", ValueType::Number)
            .attr("language", ValueType::Text)
            .attr("digital_literacy", levels())
            .child(
                "impairment",
                NodeSchema::default()
                    .named(&["vision", "hearing", "mobility", "cognitive"])
                    .attr("type", ValueType::Enum(EnumDomain::open()))
                    .attr(
                        "severity",
                        ValueType::Enum(EnumDomain::ordered(&["mild", "moderate", "severe"])),
                    ),
            )
            .child(
                "preference",
                NodeSchema::default()
                    .named(&[
                        "text",
                        "colour",
                        "multimedia",
                        "privacy",
                        "voiceover",
                        "touch",
                        "language",
                    ])
                    .attr("enabled", ValueType::Bool)
                    .attr("value", ValueType::Text)
                    .attr("scale", ValueType::Number),
            );

        let platform = NodeSchema::default()
            .attr("audio_input", ValueType::Bool)
            .attr("audio_output", ValueType::Bool)
            .attr("haptic_output", ValueType::Bool)
            .child(
                "device",
                NodeSchema::default()
                    .attr(
                        "type",
                        ValueType::Enum(EnumDomain::closed(&[
                            "smartphone",
                            "tablet",
                            "desktop",
                            "wearable",
                        ])),
                    )
                    .attr("model", ValueType::Text)
                    .attr("os", ValueType::Text)
                    .attr("os_version", ValueType::Text),
            )
            .child(
                "screen",
                NodeSchema::default()
                    .attr("width_px", ValueType::Number)
                    .attr("height_px", ValueType::Number)
                    .attr("dpi", ValueType::Number),
            )
            .child(
                "assistive",
                NodeSchema::default()
                    .named(&[
                        "screen_reader",
                        "voice_input",
                        "switch_control",
                        "magnifier",
                        "hearing_aid",
                        "wearable",
                    ])
                    .attr("enabled", ValueType::Bool)
                    .attr("product", ValueType::Text),
            );

        let environment = NodeSchema::default()
            .attr("ambient_light", levels())
            .attr("noise", levels())
            .attr("location", ValueType::Text)
            .attr("time", ValueType::Text)
            .attr("weather", ValueType::Enum(EnumDomain::open()));

        Self {
            user,
            platform,
            environment,
        }
    }

    pub fn section(&self, section: Section) -> &NodeSchema {
        match section {
            Section::User => &self.user,
            Section::Platform => &self.platform,
            Section::Environment => &self.environment,
        }
    }

    /// Schema for the node reached by following `kinds` from a section root.
    pub fn node<'a, I>(&self, section: Section, kinds: I) -> Option<&NodeSchema>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut node = self.section(section);
        for kind in kinds {
            node = node.children.get(kind)?;
        }
        Some(node)
    }

    pub fn attribute_type(&self, path: &ContextPath) -> Option<&ValueType> {
        self.node(path.section, path.nodes.iter().map(|s| s.kind.as_str()))?
            .attributes
            .get(&path.attribute)
    }

    /// Declared order for an ordered-enum attribute.
    pub fn ordering(&self, path: &ContextPath) -> Option<&EnumDomain> {
        match self.attribute_type(path)? {
            ValueType::Enum(d) if d.ordered => Some(d),
            _ => None,
        }
    }
}
