// SPDX-License-Identifier: Apache-2.0
//! Which presentation properties each widget type supports, where they live
//! in the constructor call, and how DSL literals render as Dart.

use crate::adapt::Literal;

/// Where a property's value is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Recipe {
    /// A named argument of the widget itself.
    Direct { arg: &'static str },
    /// A named argument of a style object passed as `arg`, built with
    /// `ctor` when absent.
    Nested {
        arg: &'static str,
        ctor: &'static str,
    },
    /// The first positional argument (icon data).
    IconIdentifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Number,
    /// `#RRGGBB` text.
    Color,
    FontWeight,
    /// Member of a Dart enum-like class, with the accepted members.
    Member {
        class: &'static str,
        members: &'static [&'static str],
    },
    Icon,
    /// Number rendered as uniform `EdgeInsets`.
    Padding,
}

#[derive(Debug, Clone, Copy)]
pub struct PropertySpec {
    pub name: &'static str,
    pub recipe: Recipe,
    pub kind: ValueKind,
}

impl PropertySpec {
    /// Argument name holding the value (inside the style object for nested
    /// recipes).
    pub fn target_arg(&self) -> &'static str {
        match self.recipe {
            Recipe::Direct { arg } => arg,
            Recipe::Nested { .. } => self.name,
            Recipe::IconIdentifier => "icon",
        }
    }
}

#[derive(Debug)]
pub struct WidgetSpec {
    pub name: &'static str,
    pub properties: &'static [PropertySpec],
    pub accepts_modality: bool,
}

impl WidgetSpec {
    pub fn property(&self, name: &str) -> Option<&PropertySpec> {
        self.properties.iter().find(|p| p.name == name)
    }
}

const fn direct(name: &'static str, kind: ValueKind) -> PropertySpec {
    PropertySpec {
        name,
        recipe: Recipe::Direct { arg: name },
        kind,
    }
}

const fn nested(name: &'static str, arg: &'static str, ctor: &'static str, kind: ValueKind) -> PropertySpec {
    PropertySpec {
        name,
        recipe: Recipe::Nested { arg, ctor },
        kind,
    }
}

const FONT_WEIGHTS: &[&str] = &[
    "normal", "bold", "w100", "w200", "w300", "w400", "w500", "w600", "w700", "w800", "w900",
];
const TEXT_ALIGN: ValueKind = ValueKind::Member {
    class: "TextAlign",
    members: &["left", "right", "center", "justify", "start", "end"],
};
const MAIN_AXIS: ValueKind = ValueKind::Member {
    class: "MainAxisAlignment",
    members: &["start", "end", "center", "spaceBetween", "spaceAround", "spaceEvenly"],
};
const CROSS_AXIS: ValueKind = ValueKind::Member {
    class: "CrossAxisAlignment",
    members: &["start", "end", "center", "stretch", "baseline"],
};

const TEXT_STYLE: &[PropertySpec] = &[
    nested("fontSize", "style", "TextStyle", ValueKind::Number),
    nested("fontWeight", "style", "TextStyle", ValueKind::FontWeight),
    nested("color", "style", "TextStyle", ValueKind::Color),
    nested("backgroundColor", "style", "TextStyle", ValueKind::Color),
    direct("textAlign", TEXT_ALIGN),
];

const ICON: &[PropertySpec] = &[
    PropertySpec {
        name: "icon",
        recipe: Recipe::IconIdentifier,
        kind: ValueKind::Icon,
    },
    direct("size", ValueKind::Number),
    direct("color", ValueKind::Color),
];

const INPUT: &[PropertySpec] = &[
    nested("fontSize", "style", "TextStyle", ValueKind::Number),
    nested("fontWeight", "style", "TextStyle", ValueKind::FontWeight),
    nested("color", "style", "TextStyle", ValueKind::Color),
    direct("cursorColor", ValueKind::Color),
    direct("textAlign", TEXT_ALIGN),
];

const DROPDOWN: &[PropertySpec] = &[
    nested("fontSize", "style", "TextStyle", ValueKind::Number),
    nested("fontWeight", "style", "TextStyle", ValueKind::FontWeight),
    nested("color", "style", "TextStyle", ValueKind::Color),
    direct("dropdownColor", ValueKind::Color),
    direct("iconSize", ValueKind::Number),
];

const CONTAINER: &[PropertySpec] = &[
    direct("color", ValueKind::Color),
    direct("width", ValueKind::Number),
    direct("height", ValueKind::Number),
    direct("padding", ValueKind::Padding),
];

const BUTTON: &[PropertySpec] = &[
    nested("backgroundColor", "style", "ElevatedButton.styleFrom", ValueKind::Color),
    nested("foregroundColor", "style", "ElevatedButton.styleFrom", ValueKind::Color),
    nested("padding", "style", "ElevatedButton.styleFrom", ValueKind::Padding),
];

const FLEX: &[PropertySpec] = &[
    direct("mainAxisAlignment", MAIN_AXIS),
    direct("crossAxisAlignment", CROSS_AXIS),
];

const APP_BAR: &[PropertySpec] = &[
    direct("backgroundColor", ValueKind::Color),
    direct("foregroundColor", ValueKind::Color),
    direct("elevation", ValueKind::Number),
    direct("toolbarHeight", ValueKind::Number),
];

const SCAFFOLD: &[PropertySpec] = &[direct("backgroundColor", ValueKind::Color)];

const IMAGE: &[PropertySpec] = &[
    direct("width", ValueKind::Number),
    direct("height", ValueKind::Number),
    direct("color", ValueKind::Color),
];

const GRID: &[PropertySpec] = &[direct("padding", ValueKind::Padding)];

static WIDGETS: &[WidgetSpec] = &[
    WidgetSpec { name: "Text", properties: TEXT_STYLE, accepts_modality: false },
    WidgetSpec { name: "Icon", properties: ICON, accepts_modality: false },
    WidgetSpec { name: "TextField", properties: INPUT, accepts_modality: false },
    WidgetSpec { name: "TextFormField", properties: INPUT, accepts_modality: true },
    WidgetSpec { name: "DropdownButtonFormField", properties: DROPDOWN, accepts_modality: false },
    WidgetSpec { name: "Container", properties: CONTAINER, accepts_modality: false },
    WidgetSpec { name: "ElevatedButton", properties: BUTTON, accepts_modality: false },
    WidgetSpec { name: "Row", properties: FLEX, accepts_modality: false },
    WidgetSpec { name: "Column", properties: FLEX, accepts_modality: false },
    WidgetSpec { name: "AppBar", properties: APP_BAR, accepts_modality: false },
    WidgetSpec { name: "Scaffold", properties: SCAFFOLD, accepts_modality: false },
    WidgetSpec { name: "Image", properties: IMAGE, accepts_modality: false },
    WidgetSpec { name: "GridView", properties: GRID, accepts_modality: false },
    WidgetSpec { name: "SliverGrid", properties: &[], accepts_modality: false },
];

/// Widget types the presentation transformer knows about.
#[derive(Debug)]
pub struct PropertyTable {
    widgets: &'static [WidgetSpec],
}

static BUILTIN: PropertyTable = PropertyTable { widgets: WIDGETS };

impl PropertyTable {
    pub fn builtin() -> &'static PropertyTable {
        &BUILTIN
    }

    pub fn widget(&self, type_name: &str) -> Option<&WidgetSpec> {
        let canonical = canonical_widget_type(type_name);
        self.widgets.iter().find(|w| w.name == canonical)
    }

    pub fn widgets(&self) -> impl Iterator<Item = &WidgetSpec> {
        self.widgets.iter()
    }
}

/// `DropdownField` is accepted as an alias of `DropdownButtonFormField`.
pub fn canonical_widget_type(name: &str) -> &str {
    match name {
        "DropdownField" => "DropdownButtonFormField",
        other => other,
    }
}

fn is_dart_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
}

fn fmt_number(n: f64) -> String {
    format!("{n}")
}

/// Dart source for `value` under `kind`.
pub fn render_value(kind: ValueKind, value: &Literal) -> Result<String, String> {
    match (kind, value) {
        (ValueKind::Number, Literal::Number(n)) => Ok(fmt_number(*n)),
        (ValueKind::Padding, Literal::Number(n)) => Ok(format!("EdgeInsets.all({})", fmt_number(*n))),
        (ValueKind::Color, Literal::Str(s)) => {
            let hex = s
                .strip_prefix('#')
                .filter(|h| h.len() == 6 && h.chars().all(|c| c.is_ascii_hexdigit()))
                .ok_or_else(|| format!("colour must be #RRGGBB, found \"{s}\""))?;
            Ok(format!("Color(0xFF{})", hex.to_ascii_uppercase()))
        }
        (ValueKind::FontWeight, Literal::Ident(s) | Literal::Str(s)) => {
            if FONT_WEIGHTS.contains(&s.as_str()) {
                Ok(format!("FontWeight.{s}"))
            } else {
                Err(format!("unknown font weight `{s}`"))
            }
        }
        (ValueKind::Member { class, members }, Literal::Ident(s) | Literal::Str(s)) => {
            if members.contains(&s.as_str()) {
                Ok(format!("{class}.{s}"))
            } else {
                Err(format!("`{s}` is not a {class} value"))
            }
        }
        (ValueKind::Icon, Literal::Ident(s) | Literal::Str(s)) => {
            if is_dart_ident(s) {
                Ok(format!("Icons.{s}"))
            } else {
                Err(format!("`{s}` is not an icon identifier"))
            }
        }
        (kind, v) => Err(format!("{} literal does not fit {kind:?}", v.kind_name())),
    }
}
