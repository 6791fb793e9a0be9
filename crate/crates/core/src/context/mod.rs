// SPDX-License-Identifier: Apache-2.0
//! Context-of-use models: per-user trees of user, platform, and environment
//! parameters.

mod file;
mod validate;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

pub use file::{parse_context_file, parse_context_file_with, serialize_context};
pub use validate::validate_context;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContextError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("at least one user required")]
    NoUsers,
    #[error("duplicate user id \"{0}\"")]
    DuplicateUser(String),
    #[error("duplicate sibling node {node} under {parent}")]
    DuplicateSibling { parent: String, node: String },
    #[error("section `{section}` has root kind `{found}`")]
    SectionKind { section: Section, found: String },
    #[error("node under {parent} is missing `kind`")]
    MissingKind { parent: String },
    #[error("non-finite number for attribute `{0}`")]
    NonFinite(String),
    #[error("unknown user id \"{0}\"")]
    UnknownUser(String),
    #[error("invalid context path `{path}`: {reason}")]
    InvalidPath { path: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    User,
    Platform,
    Environment,
}

impl Section {
    pub const ALL: [Section; 3] = [Section::User, Section::Platform, Section::Environment];

    pub fn as_str(self) -> &'static str {
        match self {
            Section::User => "user",
            Section::Platform => "platform",
            Section::Environment => "environment",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "user" => Some(Section::User),
            "platform" => Some(Section::Platform),
            "environment" => Some(Section::Environment),
            _ => None,
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Attribute value. Strings stored at a location the schema declares as an
/// enum are parsed as [`ContextValue::Enum`]; all other strings are text.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ContextValue {
    Number(f64),
    Text(String),
    Bool(bool),
    Enum(String),
}

impl ContextValue {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ContextValue::Number(_) => "number",
            ContextValue::Text(_) => "text",
            ContextValue::Bool(_) => "boolean",
            ContextValue::Enum(_) => "enum",
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ContextValue::Text(s) | ContextValue::Enum(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for ContextValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextValue::Number(n) => write!(f, "{n}"),
            ContextValue::Text(s) => write!(f, "{s:?}"),
            ContextValue::Bool(b) => write!(f, "{b}"),
            ContextValue::Enum(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContextNode {
    pub kind: String,
    pub name: Option<String>,
    pub attributes: IndexMap<String, ContextValue>,
    pub children: Vec<ContextNode>,
}

impl ContextNode {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            ..Default::default()
        }
    }

    fn label(&self) -> String {
        match &self.name {
            Some(n) => format!("{}[{}]", self.kind, n),
            None => self.kind.clone(),
        }
    }

    fn check(&self, trail: &str) -> Result<(), ContextError> {
        for (name, value) in &self.attributes {
            if let ContextValue::Number(n) = value {
                if !n.is_finite() {
                    return Err(ContextError::NonFinite(name.clone()));
                }
            }
        }
        let mut seen = HashSet::new();
        for child in &self.children {
            if !seen.insert((child.kind.as_str(), child.name.as_deref())) {
                return Err(ContextError::DuplicateSibling {
                    parent: trail.to_string(),
                    node: child.label(),
                });
            }
        }
        for child in &self.children {
            child.check(&format!("{trail}.{}", child.label()))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserEntry {
    pub id: String,
    pub user: Option<ContextNode>,
    pub platform: Option<ContextNode>,
    pub environment: Option<ContextNode>,
}

impl UserEntry {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            user: None,
            platform: None,
            environment: None,
        }
    }

    pub fn section(&self, section: Section) -> Option<&ContextNode> {
        match section {
            Section::User => self.user.as_ref(),
            Section::Platform => self.platform.as_ref(),
            Section::Environment => self.environment.as_ref(),
        }
    }

    pub fn sections(&self) -> impl Iterator<Item = (Section, &ContextNode)> {
        Section::ALL
            .into_iter()
            .filter_map(move |s| self.section(s).map(|n| (s, n)))
    }
}

/// Immutable, validated collection of users.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextModel {
    users: Vec<UserEntry>,
}

impl ContextModel {
    pub fn new(users: Vec<UserEntry>) -> Result<Self, ContextError> {
        if users.is_empty() {
            return Err(ContextError::NoUsers);
        }
        let mut ids = HashSet::new();
        for entry in &users {
            if !ids.insert(entry.id.as_str()) {
                return Err(ContextError::DuplicateUser(entry.id.clone()));
            }
            for (section, root) in entry.sections() {
                if root.kind != section.as_str() {
                    return Err(ContextError::SectionKind {
                        section,
                        found: root.kind.clone(),
                    });
                }
                root.check(&format!("{}/{}", entry.id, section))?;
            }
        }
        Ok(Self { users })
    }

    pub fn users(&self) -> &[UserEntry] {
        &self.users
    }

    pub fn user(&self, id: &str) -> Option<&UserEntry> {
        self.users.iter().find(|u| u.id == id)
    }

    /// User ids in declaration order.
    pub fn list_users(&self) -> Vec<&str> {
        self.users.iter().map(|u| u.id.as_str()).collect()
    }

    pub fn resolve(&self, user_id: &str, path: &ContextPath) -> Result<Resolution, ContextError> {
        let entry = self
            .user(user_id)
            .ok_or_else(|| ContextError::UnknownUser(user_id.to_string()))?;
        Ok(resolve_in(entry, path))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PathSegment {
    pub kind: String,
    pub name: Option<String>,
}

impl fmt::Display for PathSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.name {
            Some(n) => write!(f, "{}[{}]", self.kind, n),
            None => f.write_str(&self.kind),
        }
    }
}

/// Address of one attribute, e.g. `user.impairment[vision].type`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContextPath {
    pub section: Section,
    pub nodes: Vec<PathSegment>,
    pub attribute: String,
}

impl ContextPath {
    pub fn new(section: Section, nodes: Vec<PathSegment>, attribute: impl Into<String>) -> Self {
        Self {
            section,
            nodes,
            attribute: attribute.into(),
        }
    }
}

impl fmt::Display for ContextPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.section.as_str())?;
        for seg in &self.nodes {
            write!(f, ".{seg}")?;
        }
        write!(f, ".{}", self.attribute)
    }
}

impl Serialize for ContextPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl FromStr for ContextPath {
    type Err = ContextError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| ContextError::InvalidPath {
            path: s.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = s.split('.').collect();
        if parts.len() < 2 {
            return Err(bad("expected <section>.<attribute>"));
        }
        let section = Section::from_name(parts[0]).ok_or_else(|| bad("unknown section"))?;
        let attribute = parts[parts.len() - 1];
        if !is_ident(attribute) {
            return Err(bad("attribute must be an identifier"));
        }
        let mut nodes = Vec::new();
        for part in &parts[1..parts.len() - 1] {
            let seg = match part.split_once('[') {
                Some((kind, rest)) => {
                    let name = rest.strip_suffix(']').ok_or_else(|| bad("missing `]`"))?;
                    if !is_ident(name) {
                        return Err(bad("node name must be an identifier"));
                    }
                    PathSegment {
                        kind: kind.to_string(),
                        name: Some(name.to_string()),
                    }
                }
                None => PathSegment {
                    kind: part.to_string(),
                    name: None,
                },
            };
            if !is_ident(&seg.kind) {
                return Err(bad("node kind must be an identifier"));
            }
            nodes.push(seg);
        }
        Ok(ContextPath::new(section, nodes, attribute))
    }
}

/// Why a path did not resolve: the first segment that could not be followed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unresolved {
    pub section: Section,
    /// Rendering of the missing segment (`environment`, `impairment[vision]`,
    /// or an attribute name).
    pub missing: String,
    /// Set when a nameless segment matched several sibling nodes.
    pub ambiguous: bool,
}

impl fmt::Display for Unresolved {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ambiguous {
            write!(f, "<ambiguous: {}>", self.missing)
        } else {
            write!(f, "<unresolved: {}>", self.missing)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    Value(ContextValue),
    Unresolved(Unresolved),
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Value(v) => v.fmt(f),
            Resolution::Unresolved(u) => u.fmt(f),
        }
    }
}

pub(crate) fn resolve_in(entry: &UserEntry, path: &ContextPath) -> Resolution {
    let missing = |what: String, ambiguous: bool| {
        Resolution::Unresolved(Unresolved {
            section: path.section,
            missing: what,
            ambiguous,
        })
    };
    let Some(mut node) = entry.section(path.section) else {
        return missing(path.section.to_string(), false);
    };
    for seg in &path.nodes {
        let mut matches = node.children.iter().filter(|c| {
            c.kind == seg.kind && seg.name.as_ref().is_none_or(|n| c.name.as_ref() == Some(n))
        });
        match (matches.next(), matches.next()) {
            (Some(only), None) => node = only,
            (Some(_), Some(_)) => return missing(seg.to_string(), true),
            (None, _) => return missing(seg.to_string(), false),
        }
    }
    match node.attributes.get(&path.attribute) {
        Some(v) => Resolution::Value(v.clone()),
        None => missing(path.attribute.clone(), false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const JUDY: &str = r#"{"users":[{"id":"001",
        "user":{"attributes":{"age":72},"children":[
            {"kind":"impairment","name":"vision","attributes":{"type":"low_contrast_sensitivity","severity":"moderate"}}]},
        "platform":{"children":[{"kind":"device","attributes":{"type":"smartphone","model":"iPhone 11"}}]}}]}"#;

    fn judy() -> ContextModel {
        parse_context_file(JUDY).unwrap()
    }

    #[test]
    fn resolves_age() {
        let m = judy();
        let r = m.resolve("001", &"user.age".parse().unwrap()).unwrap();
        assert_eq!(r, Resolution::Value(ContextValue::Number(72.0)));
    }

    #[test]
    fn resolves_named_impairment_as_enum() {
        let m = judy();
        let r = m
            .resolve("001", &"user.impairment[vision].type".parse().unwrap())
            .unwrap();
        assert_eq!(
            r,
            Resolution::Value(ContextValue::Enum("low_contrast_sensitivity".into()))
        );
    }

    #[test]
    fn absent_section_is_unresolved() {
        let m = judy();
        let r = m
            .resolve("001", &"environment.weather".parse().unwrap())
            .unwrap();
        match r {
            Resolution::Unresolved(u) => {
                assert_eq!(u.section, Section::Environment);
                assert_eq!(u.missing, "environment");
            }
            other => panic!("expected unresolved, got {other:?}"),
        }
    }

    #[test]
    fn missing_named_node_reports_segment() {
        let m = judy();
        let r = m
            .resolve("001", &"user.impairment[hearing].type".parse().unwrap())
            .unwrap();
        assert!(matches!(r, Resolution::Unresolved(ref u) if u.missing == "impairment[hearing]"));
    }

    #[test]
    fn nameless_segment_over_several_devices_is_ambiguous() {
        let text = r#"{"users":[{"id":"a","platform":{"children":[
            {"kind":"device","name":"phone","attributes":{"model":"x"}},
            {"kind":"device","name":"watch","attributes":{"model":"y"}}]}}]}"#;
        let m = parse_context_file(text).unwrap();
        let r = m.resolve("a", &"platform.device.model".parse().unwrap()).unwrap();
        assert!(matches!(r, Resolution::Unresolved(ref u) if u.ambiguous));
        let r = m
            .resolve("a", &"platform.device[watch].model".parse().unwrap())
            .unwrap();
        assert_eq!(r, Resolution::Value(ContextValue::Text("y".into())));
    }

    #[test]
    fn unknown_user_errors() {
        let m = judy();
        let err = m.resolve("999", &"user.age".parse().unwrap()).unwrap_err();
        assert_eq!(err, ContextError::UnknownUser("999".into()));
    }

    #[test]
    fn list_users_keeps_declaration_order() {
        let text = r#"{"users":[{"id":"judy"},{"id":"carl"}]}"#;
        let m = parse_context_file(text).unwrap();
        assert_eq!(m.list_users(), vec!["judy", "carl"]);
        assert_eq!(judy().list_users(), vec!["001"]);
    }

    #[test]
    fn path_round_trips_through_display() {
        for p in [
            "user.age",
            "user.impairment[vision].type",
            "platform.device.model",
        ] {
            let parsed: ContextPath = p.parse().unwrap();
            assert_eq!(parsed.to_string(), p);
        }
        assert!("shoe.size".parse::<ContextPath>().is_err());
        assert!("user".parse::<ContextPath>().is_err());
        assert!("user.impairment[vision.type".parse::<ContextPath>().is_err());
    }
}
