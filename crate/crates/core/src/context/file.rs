// SPDX-License-Identifier: Apache-2.0
//! `.ctx.json` reader and writer.

use std::fmt;

use indexmap::IndexMap;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{ContextError, ContextModel, ContextNode, ContextValue, Section, UserEntry};
use crate::schema::{NodeSchema, SchemaRegistry, ValueType};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    users: Vec<RawUser>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUser {
    id: String,
    #[serde(default)]
    user: Option<RawNode>,
    #[serde(default)]
    platform: Option<RawNode>,
    #[serde(default)]
    environment: Option<RawNode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    attributes: RawAttributes,
    #[serde(default)]
    children: Vec<RawNode>,
}

enum RawValue {
    Number(f64),
    Text(String),
    Bool(bool),
}

impl<'de> Deserialize<'de> for RawValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = RawValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, string, or boolean")
            }
            fn visit_bool<E>(self, v: bool) -> Result<RawValue, E> {
                Ok(RawValue::Bool(v))
            }
            fn visit_i64<E>(self, v: i64) -> Result<RawValue, E> {
                Ok(RawValue::Number(v as f64))
            }
            fn visit_u64<E>(self, v: u64) -> Result<RawValue, E> {
                Ok(RawValue::Number(v as f64))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<RawValue, E> {
                if v.is_finite() {
                    Ok(RawValue::Number(v))
                } else {
                    Err(E::custom("numbers must be finite"))
                }
            }
            fn visit_str<E>(self, v: &str) -> Result<RawValue, E> {
                Ok(RawValue::Text(v.to_string()))
            }
        }
        d.deserialize_any(V)
    }
}

/// Attribute map that rejects duplicate names (serde_json would silently keep
/// the last one).
#[derive(Default)]
struct RawAttributes(IndexMap<String, RawValue>);

impl<'de> Deserialize<'de> for RawAttributes {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RawAttributes;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an attribute object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawAttributes, A::Error> {
                let mut out = IndexMap::new();
                while let Some((k, v)) = map.next_entry::<String, RawValue>()? {
                    if out.contains_key(&k) {
                        return Err(de::Error::custom(format!("duplicate attribute `{k}`")));
                    }
                    out.insert(k, v);
                }
                Ok(RawAttributes(out))
            }
        }
        d.deserialize_map(V)
    }
}

/// Parses a context file using the built-in schema to type enum attributes.
pub fn parse_context_file(text: &str) -> Result<ContextModel, ContextError> {
    parse_context_file_with(text, &SchemaRegistry::builtin())
}

pub fn parse_context_file_with(
    text: &str,
    schema: &SchemaRegistry,
) -> Result<ContextModel, ContextError> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| ContextError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut users = Vec::with_capacity(raw.users.len());
    for ru in raw.users {
        let mut entry = UserEntry::new(ru.id);
        for (section, node) in [
            (Section::User, ru.user),
            (Section::Platform, ru.platform),
            (Section::Environment, ru.environment),
        ] {
            let Some(node) = node else { continue };
            let kind = node.kind.clone().unwrap_or_else(|| section.to_string());
            let built = build_node(node, kind, Some(schema.section(section)), &entry.id)?;
            match section {
                Section::User => entry.user = Some(built),
                Section::Platform => entry.platform = Some(built),
                Section::Environment => entry.environment = Some(built),
            }
        }
        users.push(entry);
    }
    ContextModel::new(users)
}

fn build_node(
    raw: RawNode,
    kind: String,
    schema: Option<&NodeSchema>,
    trail: &str,
) -> Result<ContextNode, ContextError> {
    let attributes = raw
        .attributes
        .0
        .into_iter()
        .map(|(name, v)| {
            let declared = schema.and_then(|s| s.attributes.get(&name));
            let value = match v {
                RawValue::Number(n) => ContextValue::Number(n),
                RawValue::Bool(b) => ContextValue::Bool(b),
                RawValue::Text(t) => match declared {
                    Some(ValueType::Enum(_)) => ContextValue::Enum(t),
                    _ => ContextValue::Text(t),
                },
            };
            (name, value)
        })
        .collect();
    let here = format!("{trail}.{kind}");
    let children = raw
        .children
        .into_iter()
        .map(|c| {
            let ck = c.kind.clone().ok_or_else(|| ContextError::MissingKind {
                parent: here.clone(),
            })?;
            let cs = schema.and_then(|s| s.children.get(&ck));
            build_node(c, ck, cs, &here)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ContextNode {
        kind,
        name: raw.name,
        attributes,
        children,
    })
}

fn node_json(node: &ContextNode) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(node.kind));
    if let Some(n) = &node.name {
        obj.insert("name".into(), json!(n));
    }
    let attrs: Map<String, Value> = node
        .attributes
        .iter()
        .map(|(k, v)| {
            let jv = match v {
                ContextValue::Number(n) => json!(n),
                ContextValue::Bool(b) => json!(b),
                ContextValue::Text(s) | ContextValue::Enum(s) => json!(s),
            };
            (k.clone(), jv)
        })
        .collect();
    obj.insert("attributes".into(), Value::Object(attrs));
    obj.insert(
        "children".into(),
        Value::Array(node.children.iter().map(node_json).collect()),
    );
    Value::Object(obj)
}

/// Canonical pretty-printed form. Section roots always carry an explicit
/// `kind`.
pub fn serialize_context(model: &ContextModel) -> String {
    let users: Vec<Value> = model
        .users()
        .iter()
        .map(|u| {
            let mut obj = Map::new();
            obj.insert("id".into(), json!(u.id));
            for (section, node) in u.sections() {
                obj.insert(section.to_string(), node_json(node));
            }
            Value::Object(obj)
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&json!({ "users": users }))
        .expect("context JSON is always serializable");
    out.push('\n');
    out
}
