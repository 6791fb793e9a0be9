// SPDX-License-Identifier: Apache-2.0
//! Fixtures, seeded generators and independent oracles shared by the
//! integration tests and the acceptance harness.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use adaptforge_core::adapt::{
    AdaptationRule, Comparison, ConditionExpr, FormGroup, KeySpec, Literal, ModalityPayload, NavigationPayload,
    Operation, Payload, PresentationPayload, RelOp, RuleComment, RulesModel, SourcePos,
};
use adaptforge_core::context::{serialize_context, ContextModel, ContextNode, ContextPath, ContextValue, PathSegment, Section, UserEntry};
use adaptforge_core::engine::{property_slot, Origin, Verdict};
use adaptforge_core::transform::property::{PropertyTable, ValueKind};
use adaptforge_core::transform::{comment_edit, compose, payload_writes, widget_edits, Edit};
use adaptforge_core::widget::{SourceUnit, Span};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde_json::Value;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(rel: &str) -> PathBuf {
    fixtures().join(rel)
}

pub fn rules_file(name: &str) -> PathBuf {
    fixtures().join("rules").join(format!("{name}.adapt"))
}

pub fn personas() -> PathBuf {
    fixture("personas.ctx.json")
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Every file under `dir` as (relative path, bytes), sorted.
pub fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = walkdir::WalkDir::new(dir)
        .into_iter()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let rel = e.path().strip_prefix(dir).unwrap().to_string_lossy().replace('\\', "/");
            (rel, std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

pub fn copy_tree(from: &Path, to: &Path) {
    for (rel, bytes) in read_tree(from) {
        let dest = to.join(&rel);
        std::fs::create_dir_all(dest.parent().unwrap()).unwrap();
        std::fs::write(dest, bytes).unwrap();
    }
}

/// Compares `actual` with the golden file `tests/golden/<name>`, or
/// rewrites the golden file when `UPDATE_GOLDEN` is set.
pub fn golden(name: &str, actual: &str) -> Result<(), String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!(
            "golden {name} differs; rerun with UPDATE_GOLDEN=1 to accept\n{}",
            adaptforge_core::pipeline::diff_texts(name, Some(&expected), Some(actual))
        ))
    }
}

// ---------------------------------------------------------------------------
// Context models

const WORDS: &[&str] = &[
    "mild", "moderate", "severe", "low", "medium", "high", "smartphone", "tablet", "desktop", "en", "fr",
    "blur", "tremor", "glaucoma", "extreme", "home",
];

/// Attribute vocabulary: (section, node kind or "" for the section root,
/// attribute, type). Types: "n" number, "b" bool, "t" text, "sev" and
/// "lvl" ordered enums, "open" and "dev" unordered enums.
const ATTRS: &[(Section, &str, &str, &str)] = &[
    (Section::User, "", "age", "n"),
    (Section::User, "", "language", "t"),
    (Section::User, "", "digital_literacy", "lvl"),
    (Section::User, "impairment", "type", "open"),
    (Section::User, "impairment", "severity", "sev"),
    (Section::User, "preference", "enabled", "b"),
    (Section::User, "preference", "scale", "n"),
    (Section::Platform, "device", "type", "dev"),
    (Section::Platform, "device", "model", "t"),
    (Section::Platform, "screen", "width_px", "n"),
    (Section::Platform, "", "audio_input", "b"),
    (Section::Environment, "", "ambient_light", "lvl"),
    (Section::Environment, "", "noise", "lvl"),
    (Section::Environment, "", "location", "t"),
];

const IMPAIRMENTS: &[&str] = &["vision", "hearing", "mobility", "cognitive"];
const PREFERENCES: &[&str] = &["text", "voiceover"];

fn domain(ty: &str) -> Option<&'static [&'static str]> {
    match ty {
        "sev" => Some(&["mild", "moderate", "severe"]),
        "lvl" => Some(&["low", "medium", "high"]),
        "dev" => Some(&["smartphone", "tablet", "desktop", "wearable"]),
        "open" => Some(&["blur", "tremor", "glaucoma", "low_contrast_sensitivity"]),
        _ => None,
    }
}

fn attr_type(section: Section, kind: &str, attr: &str) -> Option<&'static str> {
    ATTRS
        .iter()
        .find(|(s, k, a, _)| *s == section && *k == kind && *a == attr)
        .map(|(_, _, _, t)| *t)
}

fn gen_number(r: &mut StdRng) -> f64 {
    match r.gen_range(0..3) {
        0 => r.gen_range(0..120) as f64,
        1 => r.gen_range(0..2000) as f64 / 8.0,
        _ => r.gen_range(-1000.0..1000.0),
    }
}

fn gen_text(r: &mut StdRng) -> String {
    const PARTS: &[&str] = &["a", "Zoë", " ", "\"q\"", "\\", "x_1", "東京", "😀", "\t", "line\nbreak"];
    let n = r.gen_range(0..4);
    (0..n).map(|_| *PARTS.choose(r).unwrap()).collect()
}

fn gen_value(r: &mut StdRng, ty: &str) -> ContextValue {
    match ty {
        "n" => ContextValue::Number(gen_number(r)),
        "b" => ContextValue::Bool(r.gen()),
        "t" => ContextValue::Text(if r.gen_bool(0.5) {
            WORDS.choose(r).unwrap().to_string()
        } else {
            gen_text(r)
        }),
        other => ContextValue::Enum(domain(other).unwrap().choose(r).unwrap().to_string()),
    }
}

fn gen_attrs(r: &mut StdRng, section: Section, kind: &str, node: &mut ContextNode) {
    for (s, k, a, ty) in ATTRS {
        if *s == section && *k == kind && r.gen_bool(0.85) {
            node.attributes.insert(a.to_string(), gen_value(r, ty));
        }
    }
    if r.gen_bool(0.1) {
        // Attributes outside the schema are kept as text.
        node.attributes.insert("custom_note".into(), ContextValue::Text(gen_text(r)));
    }
}

fn gen_section(r: &mut StdRng, section: Section) -> ContextNode {
    let mut root = ContextNode::new(section.as_str());
    gen_attrs(r, section, "", &mut root);
    match section {
        Section::User => {
            for name in IMPAIRMENTS {
                if r.gen_bool(0.6) {
                    let mut n = ContextNode::new("impairment");
                    n.name = Some(name.to_string());
                    gen_attrs(r, section, "impairment", &mut n);
                    root.children.push(n);
                }
            }
            for name in PREFERENCES {
                if r.gen_bool(0.6) {
                    let mut n = ContextNode::new("preference");
                    n.name = Some(name.to_string());
                    gen_attrs(r, section, "preference", &mut n);
                    root.children.push(n);
                }
            }
        }
        Section::Platform => {
            // Several devices make nameless `device` paths ambiguous.
            for i in 0..r.gen_range(0..3) {
                let mut n = ContextNode::new("device");
                if i > 0 || r.gen_bool(0.3) {
                    n.name = Some(format!("d{i}"));
                }
                gen_attrs(r, section, "device", &mut n);
                root.children.push(n);
            }
            if r.gen_bool(0.5) {
                let mut n = ContextNode::new("screen");
                gen_attrs(r, section, "screen", &mut n);
                root.children.push(n);
            }
        }
        Section::Environment => {}
    }
    root.children.shuffle(r);
    root
}

pub fn gen_user(r: &mut StdRng, id: String) -> UserEntry {
    let mut u = UserEntry::new(id);
    if r.gen_bool(0.9) {
        u.user = Some(gen_section(r, Section::User));
    }
    if r.gen_bool(0.8) {
        u.platform = Some(gen_section(r, Section::Platform));
    }
    if r.gen_bool(0.7) {
        u.environment = Some(gen_section(r, Section::Environment));
    }
    u
}

pub fn gen_context(r: &mut StdRng) -> ContextModel {
    let n = r.gen_range(1..4);
    let users = (0..n)
        .map(|i| {
            let id = format!("u{i}-{}", gen_text(r));
            gen_user(r, id)
        })
        .collect();
    ContextModel::new(users).unwrap()
}

// ---------------------------------------------------------------------------
// Conditions

fn gen_path(r: &mut StdRng) -> (ContextPath, &'static str) {
    let seg = |kind: &str, name: Option<&str>| PathSegment {
        kind: kind.to_string(),
        name: name.map(String::from),
    };
    let (section, kind, attr, ty) = *ATTRS.choose(r).unwrap();
    let mut nodes = Vec::new();
    match kind {
        "" => {}
        "impairment" => nodes.push(seg(kind, (!r.gen_bool(0.15)).then(|| *IMPAIRMENTS.choose(r).unwrap()))),
        "preference" => nodes.push(seg(kind, Some(PREFERENCES.choose(r).unwrap()))),
        "device" => nodes.push(seg(kind, r.gen_bool(0.3).then_some("d1"))),
        _ => nodes.push(seg(kind, None)),
    }
    let attr = if r.gen_bool(0.05) { "missing_attr" } else { attr };
    (ContextPath::new(section, nodes, attr), ty)
}

/// Mostly a literal of the path's own type, so that comparisons are
/// usually well-typed; otherwise anything.
fn gen_literal(r: &mut StdRng, ty: &str) -> Literal {
    if r.gen_bool(0.8) {
        return match ty {
            "n" => Literal::Number(gen_number(r)),
            "b" => Literal::Bool(r.gen()),
            "t" => Literal::Str(WORDS.choose(r).unwrap().to_string()),
            _ if r.gen_bool(0.1) => Literal::Ident("extreme".into()),
            _ => Literal::Ident(domain(ty).unwrap().choose(r).unwrap().to_string()),
        };
    }
    match r.gen_range(0..5) {
        0 => Literal::Number(gen_number(r)),
        1 => Literal::Bool(r.gen()),
        2 => Literal::Str(WORDS.choose(r).unwrap().to_string()),
        _ => Literal::Ident(WORDS.choose(r).unwrap().to_string()),
    }
}

const OPS: &[RelOp] = &[RelOp::Eq, RelOp::Ne, RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge];

pub fn gen_condition(r: &mut StdRng, depth: u32) -> ConditionExpr {
    if depth == 0 || r.gen_bool(0.45) {
        let (path, ty) = gen_path(r);
        let ordered_ok = matches!(ty, "n" | "sev" | "lvl");
        let op = if ordered_ok || r.gen_bool(0.2) {
            *OPS.choose(r).unwrap()
        } else {
            *OPS[..2].choose(r).unwrap()
        };
        return ConditionExpr::Compare(Comparison {
            path,
            op,
            literal: gen_literal(r, ty),
            pos: SourcePos::default(),
        });
    }
    match r.gen_range(0..3) {
        0 => ConditionExpr::Not(Box::new(gen_condition(r, depth - 1))),
        k => {
            let items = (0..r.gen_range(2..4)).map(|_| gen_condition(r, depth - 1)).collect();
            if k == 1 {
                ConditionExpr::And(items)
            } else {
                ConditionExpr::Or(items)
            }
        }
    }
}

/// Outcome computed by [`oracle_verdict`]: `Err` for a type clash.
pub type OracleResult = Result<Verdict, ()>;

enum Leaf {
    Unresolved,
    Value(Value, &'static str),
}

/// Follows `path` through the serialized JSON form of one user.
fn oracle_lookup(user: &Value, path: &ContextPath) -> Leaf {
    let Some(mut node) = user.get(path.section.as_str()) else {
        return Leaf::Unresolved;
    };
    for seg in &path.nodes {
        let children = node.get("children").and_then(Value::as_array).cloned().unwrap_or_default();
        let found: Vec<&Value> = children
            .iter()
            .filter(|c| c["kind"] == seg.kind.as_str())
            .filter(|c| seg.name.as_ref().is_none_or(|n| c.get("name").and_then(Value::as_str) == Some(n)))
            .collect();
        if found.len() != 1 {
            return Leaf::Unresolved;
        }
        let idx = children.iter().position(|c| std::ptr::eq(c, found[0])).unwrap();
        node = &node["children"][idx];
    }
    let kind = path.nodes.last().map_or("", |s| s.kind.as_str());
    match node.get("attributes").and_then(|a| a.get(&path.attribute)) {
        Some(v) => Leaf::Value(v.clone(), attr_type(path.section, kind, &path.attribute).unwrap_or("t")),
        None => Leaf::Unresolved,
    }
}

fn ordered(op: RelOp) -> bool {
    matches!(op, RelOp::Lt | RelOp::Le | RelOp::Gt | RelOp::Ge)
}

fn holds<T: PartialOrd + ?Sized>(op: RelOp, a: &T, b: &T) -> bool {
    match op {
        RelOp::Eq => a == b,
        RelOp::Ne => a != b,
        RelOp::Lt => a < b,
        RelOp::Le => a <= b,
        RelOp::Gt => a > b,
        RelOp::Ge => a >= b,
    }
}

fn oracle_leaf(value: &Value, ty: &str, op: RelOp, lit: &Literal) -> Result<bool, ()> {
    let text_lit = match lit {
        Literal::Str(s) | Literal::Ident(s) => Some(s.as_str()),
        _ => None,
    };
    match ty {
        "n" => match lit {
            Literal::Number(b) => Ok(holds(op, &value.as_f64().unwrap(), b)),
            _ => Err(()),
        },
        "b" => match lit {
            Literal::Bool(b) if !ordered(op) => Ok(holds(op, &value.as_bool().unwrap(), b)),
            _ => Err(()),
        },
        _ => {
            let a = value.as_str().unwrap();
            let b = text_lit.ok_or(())?;
            if !ordered(op) {
                return Ok(holds(op, a, b));
            }
            let levels = match ty {
                "sev" | "lvl" => domain(ty).unwrap(),
                _ => return Err(()),
            };
            let ra = levels.iter().position(|l| *l == a).ok_or(())?;
            let rb = levels.iter().position(|l| *l == b).ok_or(())?;
            Ok(holds(op, &ra, &rb))
        }
    }
}

fn oracle_fold(expr: &ConditionExpr, leaves: &mut impl Iterator<Item = bool>) -> bool {
    match expr {
        ConditionExpr::Compare(_) => leaves.next().unwrap(),
        ConditionExpr::Not(e) => !oracle_fold(e, leaves),
        ConditionExpr::And(xs) => xs.iter().map(|x| oracle_fold(x, leaves)).fold(true, |a, b| a & b),
        ConditionExpr::Or(xs) => xs.iter().map(|x| oracle_fold(x, leaves)).fold(false, |a, b| a | b),
    }
}

/// Brute-force verdict of `expr` for the user at `index`, computed from the
/// serialized context only.
pub fn oracle_verdict(context_json: &Value, index: usize, expr: &ConditionExpr) -> OracleResult {
    let user = &context_json["users"][index];
    let mut outcomes = Vec::new();
    let mut unresolved = false;
    for leaf in expr.leaves() {
        match oracle_lookup(user, &leaf.path) {
            Leaf::Unresolved => {
                unresolved = true;
                outcomes.push(false);
            }
            Leaf::Value(v, ty) => outcomes.push(oracle_leaf(&v, ty, leaf.op, &leaf.literal)?),
        }
    }
    if unresolved {
        return Ok(Verdict::NotApplicableUnresolved);
    }
    Ok(if oracle_fold(expr, &mut outcomes.into_iter()) {
        Verdict::Applies
    } else {
        Verdict::DoesNotApply
    })
}

/// A generated (model, expression) pair with the model's JSON form.
pub struct OracleCase {
    pub model: ContextModel,
    pub json: Value,
    pub user: usize,
    pub expr: ConditionExpr,
}

pub fn gen_oracle_case(seed: u64) -> OracleCase {
    let mut r = rng(seed);
    let model = gen_context(&mut r);
    let json: Value = serde_json::from_str(&serialize_context(&model)).unwrap();
    let user = r.gen_range(0..model.users().len());
    let expr = gen_condition(&mut r, 3);
    OracleCase { model, json, user, expr }
}

// ---------------------------------------------------------------------------
// Rules models

const WIDGETS: &[&str] = &["Text", "Icon", "Container", "TextFormField", "Column", "AppBar", "CustomCard"];
const IDENTS: &[&str] = &["bold", "favorite", "center", "w600", "spaceBetween", "moderate", "x_1"];

fn gen_string(r: &mut StdRng) -> String {
    const PARTS: &[&str] = &["a", "B", " ", "\"", "\\", "é", "1.4.3", "_", "//", "{", "}"];
    let n = r.gen_range(1..6);
    (0..n).map(|_| *PARTS.choose(r).unwrap()).collect()
}

fn gen_rule_literal(r: &mut StdRng) -> Literal {
    match r.gen_range(0..4) {
        0 => Literal::Number(if r.gen() { r.gen_range(0..500) as f64 } else { r.gen_range(-1e4..1e4) }),
        1 => Literal::Bool(r.gen()),
        2 => Literal::Str(gen_string(r)),
        _ => Literal::Ident(IDENTS.choose(r).unwrap().to_string()),
    }
}

fn gen_keys(r: &mut StdRng) -> Vec<String> {
    (0..r.gen_range(1..4)).map(|i| format!("k{i}_{}", gen_string(r))).collect()
}

fn gen_operation(r: &mut StdRng) -> Operation {
    let payload = match r.gen_range(0..3) {
        0 => {
            let mut p = PresentationPayload::default();
            for name in ["fontSize", "color", "fontWeight", "icon", "padding"] {
                if r.gen_bool(0.4) {
                    p.properties.insert(name.to_string(), gen_rule_literal(r));
                }
            }
            if r.gen_bool(0.3) {
                p.raw_args.insert("decoration".into(), format!("BoxDecoration(/* {} */)", gen_string(r)));
            }
            Payload::Presentation(p)
        }
        1 => {
            let (tts, stt) = match r.gen_range(0..3) {
                0 => (true, false),
                1 => (false, true),
                _ => (true, true),
            };
            Payload::Modality(ModalityPayload {
                text_to_speech: tts,
                speech_to_text: stt,
            })
        }
        _ => {
            let groups = (0..r.gen_range(2..4))
                .map(|g| FormGroup {
                    title: format!("Step {g} {}", gen_string(r)),
                    order: (0..r.gen_range(1..4)).map(|i| format!("g{g}f{i}")).collect(),
                })
                .collect();
            Payload::Navigation(NavigationPayload {
                container_key: gen_string(r),
                groups,
            })
        }
    };
    let keys = match &payload {
        Payload::Presentation(_) if r.gen_bool(0.3) => KeySpec::All,
        _ => KeySpec::Keys(gen_keys(r)),
    };
    Operation {
        keys,
        widget_type: WIDGETS.choose(r).unwrap().to_string(),
        comment: r.gen_bool(0.5).then(|| gen_string(r)),
        payload,
        pos: SourcePos::default(),
    }
}

pub fn gen_rules(seed: u64) -> RulesModel {
    let mut r = rng(seed);
    let rules = (0..r.gen_range(1..4))
        .map(|i| AdaptationRule {
            id: format!("r{i}{}", gen_string(&mut r)),
            wcag: r.gen_bool(0.5).then(|| gen_string(&mut r)),
            comment: RuleComment {
                problem: r.gen_bool(0.5).then(|| gen_string(&mut r)),
                solution: r.gen_bool(0.5).then(|| gen_string(&mut r)),
                advantages: r.gen_bool(0.3).then(|| gen_string(&mut r)),
                tradeoffs: r.gen_bool(0.3).then(|| gen_string(&mut r)),
            },
            condition: gen_condition(&mut r, 3),
            operations: (0..r.gen_range(1..4)).map(|_| gen_operation(&mut r)).collect(),
            pos: SourcePos::default(),
        })
        .collect();
    RulesModel { rules }
}

// ---------------------------------------------------------------------------
// Widget-subset Dart sources

enum Arg {
    Expr(String),
    Widget(WNode),
    List(Vec<WNode>),
}

struct WNode {
    ty: &'static str,
    is_const: bool,
    positional: Option<String>,
    named: Vec<(String, Arg)>,
    multiline: bool,
    trailing: bool,
}

fn dart_string(r: &mut StdRng) -> String {
    const BODIES: &[&str] = &[
        "Hello", "it\\'s", "price: \\$5", "${item.name} x", "$count items", "ünïcödé", "a ( b ) [ c ]", "// not a comment",
    ];
    let body = BODIES.choose(r).unwrap();
    if r.gen_bool(0.8) {
        format!("'{body}'")
    } else {
        format!("\"{}\"", body.replace("\\'", "'"))
    }
}

fn gen_wnode(r: &mut StdRng, depth: u32, next_key: &mut usize) -> WNode {
    let leaf = depth == 0 || r.gen_bool(0.4);
    let ty: &'static str = if leaf {
        ["Text", "Text", "Icon", "SizedBox"].choose(r).copied().unwrap()
    } else {
        ["Column", "Row", "Container", "ElevatedButton", "Padding"].choose(r).copied().unwrap()
    };
    let mut named: Vec<(String, Arg)> = Vec::new();
    let mut positional = None;
    if r.gen_bool(0.5) {
        *next_key += 1;
        named.push(("key".into(), Arg::Expr(format!("Key('w{next_key}')"))));
    }
    match ty {
        "Text" => {
            positional = Some(dart_string(r));
            match r.gen_range(0..4) {
                0 => named.push(("style".into(), Arg::Expr("TextStyle(fontSize: 14, color: Colors.grey)".into()))),
                1 => named.push(("style".into(), Arg::Expr("const TextStyle(letterSpacing: 1.2)".into()))),
                2 => named.push(("maxLines".into(), Arg::Expr("2".into()))),
                _ => {}
            }
        }
        "Icon" => {
            positional = Some(["Icons.home", "Icons.arrow_back", "Icons.star"].choose(r).unwrap().to_string());
            if r.gen() {
                named.push(("size".into(), Arg::Expr("24".into())));
            }
        }
        "SizedBox" => named.push(("height".into(), Arg::Expr("8".into()))),
        "Column" | "Row" => {
            if r.gen() {
                named.push(("mainAxisAlignment".into(), Arg::Expr("MainAxisAlignment.start".into())));
            }
            let kids = (0..r.gen_range(0..4)).map(|_| gen_wnode(r, depth - 1, next_key)).collect();
            named.push(("children".into(), Arg::List(kids)));
        }
        "ElevatedButton" => {
            named.push(("onPressed".into(), Arg::Expr("() { tap(\"(\"); }".into())));
            named.push(("child".into(), Arg::Widget(gen_wnode(r, depth - 1, next_key))));
        }
        _ => {
            if ty == "Padding" {
                named.push(("padding".into(), Arg::Expr("const EdgeInsets.all(4)".into())));
            } else if r.gen() {
                named.push(("width".into(), Arg::Expr("120".into())));
            }
            named.push(("child".into(), Arg::Widget(gen_wnode(r, depth - 1, next_key))));
        }
    }
    if named.len() > 1 && r.gen_bool(0.3) {
        let k = named.remove(0);
        named.push(k);
    }
    WNode {
        ty,
        is_const: ty == "SizedBox" && r.gen(),
        positional,
        named,
        multiline: r.gen_bool(0.6),
        trailing: r.gen_bool(0.6),
    }
}

fn render(n: &WNode, indent: &str, r: &mut StdRng, out: &mut String) {
    if n.is_const {
        out.push_str("const ");
    }
    out.push_str(n.ty);
    out.push('(');
    let inner = format!("{indent}  ");
    let mut parts: Vec<String> = Vec::new();
    if let Some(p) = &n.positional {
        parts.push(p.clone());
    }
    for (name, arg) in &n.named {
        let mut s = format!("{name}: ");
        match arg {
            Arg::Expr(e) => s.push_str(e),
            Arg::Widget(w) => render(w, if n.multiline { &inner } else { indent }, r, &mut s),
            Arg::List(items) => {
                s.push('[');
                let deeper = format!("{inner}  ");
                for (i, w) in items.iter().enumerate() {
                    if n.multiline {
                        s.push('\n');
                        s.push_str(&deeper);
                        if r.gen_bool(0.2) {
                            s.push_str("// item\n");
                            s.push_str(&deeper);
                        }
                        render(w, &deeper, r, &mut s);
                        s.push(',');
                    } else {
                        if i > 0 {
                            s.push_str(", ");
                        }
                        if r.gen_bool(0.1) {
                            s.push_str("/* c */ ");
                        }
                        render(w, indent, r, &mut s);
                    }
                }
                if n.multiline && !items.is_empty() {
                    s.push('\n');
                    s.push_str(&inner);
                }
                s.push(']');
            }
        }
        parts.push(s);
    }
    if n.multiline && !parts.is_empty() {
        for (i, p) in parts.iter().enumerate() {
            out.push('\n');
            out.push_str(&inner);
            out.push_str(p);
            if i + 1 < parts.len() || n.trailing {
                out.push(',');
            }
        }
        out.push('\n');
        out.push_str(indent);
    } else {
        out.push_str(&parts.join(", "));
        if n.trailing && !parts.is_empty() {
            out.push(',');
        }
    }
    out.push(')');
}

/// A Dart file containing one or more build functions over the widget
/// subset, with comments and string interpolation mixed in.
pub fn gen_dart(seed: u64) -> String {
    let mut r = rng(seed);
    let mut out = String::from("import 'package:flutter/material.dart';\n\n// Generated sample.\n");
    let mut key = 0;
    for f in 0..r.gen_range(1..3) {
        let tree = gen_wnode(&mut r, 3, &mut key);
        out.push_str(&format!("\n/* build {f} */\nWidget build{f}(BuildContext context) {{\n  final count = {f};\n  return "));
        render(&tree, "  ", &mut r, &mut out);
        out.push_str(";\n}\n");
    }
    out
}

fn gen_prop_value(r: &mut StdRng, kind: ValueKind) -> Literal {
    match kind {
        ValueKind::Number | ValueKind::Padding => Literal::Number(r.gen_range(1..64) as f64),
        ValueKind::Color => Literal::Str(format!("#{:06X}", r.gen_range(0..0x1000000))),
        ValueKind::FontWeight => Literal::Ident(["bold", "normal", "w300"].choose(r).unwrap().to_string()),
        ValueKind::Member { members, .. } => Literal::Ident(members.choose(r).unwrap().to_string()),
        ValueKind::Icon => Literal::Ident(["favorite", "settings", "mic"].choose(r).unwrap().to_string()),
    }
}

/// Expected value of one write, looked up on the re-parsed output.
pub struct ExpectedWrite {
    pub widget_start: usize,
    pub property: String,
    pub value: String,
}

/// Random presentation edits over `unit`, composed the way the transformer
/// does, plus what each written property should read back as.
pub fn gen_presentation_edits(seed: u64, unit: &SourceUnit) -> (Vec<Edit>, Vec<ExpectedWrite>) {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let table = PropertyTable::builtin();
    let mut leaf = Vec::new();
    let mut expected = Vec::new();
    for (i, node) in unit.walk().into_iter().enumerate() {
        let Some(spec) = table.widget(&node.type_name) else { continue };
        if spec.properties.is_empty() || !r.gen_bool(0.5) {
            continue;
        }
        let origin = Origin::new("fuzz", i);
        let mut payload = PresentationPayload::default();
        for p in spec.properties {
            if r.gen_bool(0.4) {
                payload.properties.insert(p.name.to_string(), gen_prop_value(&mut r, p.kind));
            }
        }
        let (writes, errs) = payload_writes(&node.type_name, &payload, &origin, |_| false);
        assert!(errs.is_empty(), "{errs:?}");
        let (edits, errs) = widget_edits(unit, node, &writes);
        if !errs.is_empty() || edits.is_empty() {
            continue;
        }
        for name in payload.properties.keys() {
            let slot = property_slot(&node.type_name, name);
            let w = writes.iter().find(|w| w.slot == slot).unwrap();
            expected.push(ExpectedWrite {
                widget_start: node.span.start,
                property: name.clone(),
                value: w.value.clone(),
            });
        }
        leaf.extend(edits);
        leaf.push(comment_edit(unit, node.span.start, &[format!("// [ADAPTFORGE rule:fuzz op:{i}]")], &origin));
    }
    let edits = compose(&unit.path, &unit.text, leaf, vec![]).expect("leaf edits compose");
    (edits, expected)
}

/// Checks that every byte outside `edits` reappears unchanged, in order, in
/// `output`. Returns the first violation.
pub fn check_preserved(original: &str, edits: &[Edit], output: &str) -> Result<(), String> {
    let mut sorted: Vec<&Edit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.span.start, e.span.end));
    let (mut src, mut dst) = (0usize, 0usize);
    for e in sorted.iter().map(|e| (e.span, &e.text)).chain(std::iter::once((
        Span::new(original.len(), original.len()),
        &String::new(),
    ))) {
        let (span, text) = e;
        let gap = &original.as_bytes()[src..span.start];
        let got = output.as_bytes().get(dst..dst + gap.len()).ok_or("output too short")?;
        if got != gap {
            return Err(format!("bytes {src}..{} changed", span.start));
        }
        dst += gap.len() + text.len();
        src = span.end;
    }
    if dst != output.len() {
        return Err(format!("output has {} trailing bytes", output.len() - dst));
    }
    Ok(())
}

/// Position of `original_start` after `edits` are applied.
pub fn shifted(original_start: usize, edits: &[Edit]) -> usize {
    let delta: isize = edits
        .iter()
        .filter(|e| e.span.end <= original_start)
        .map(|e| e.text.len() as isize - e.span.len() as isize)
        .sum();
    (original_start as isize + delta) as usize
}
