// SPDX-License-Identifier: Apache-2.0

mod support;

use std::path::Path;

use adaptforge_core::diagnostic::Severity;
use adaptforge_core::pipeline::{
    check, diff_dirs, explain, generate, verify_manifest, GenerateOptions, PipelineError, UserSelection,
    DEFAULT_EXCLUDES, MANIFEST_FILE,
};
use adaptforge_core::transform::{read_property, MARKER, MODALITY_HELPER_PATH, NAVIGATION_HELPER_PATH, STT_IMPORT, TTS_IMPORT};
use adaptforge_core::widget::parse_widget_tree;
use support::*;
use tempfile::TempDir;

fn one(user: &str) -> GenerateOptions {
    GenerateOptions {
        users: UserSelection::One(user.into()),
        ..GenerateOptions::default()
    }
}

fn run(app: &str, rules: &str, user: &str) -> (TempDir, std::path::PathBuf) {
    let out = TempDir::new().unwrap();
    let report = generate(&fixture(app), &personas(), &rules_file(rules), out.path(), &one(user)).unwrap();
    assert!(!report.has_errors(), "{:?}", report.all_diagnostics().collect::<Vec<_>>());
    let dir = out.path().join(user);
    (out, dir)
}

fn read(dir: &Path, rel: &str) -> String {
    std::fs::read_to_string(dir.join(rel)).unwrap()
}

#[test]
fn header_icon_and_title_read_back() {
    let (_out, dir) = run("furniture", "header", "judy");
    let unit = parse_widget_tree(&read(&dir, "lib/screens/add_shipping.dart"), "lib/screens/add_shipping.dart").unwrap();
    let icon = unit.find_by_key("add_shipping_appbar_icon")[0];
    let title = unit.find_by_key("add_shipping_title")[0];
    assert_eq!(read_property(&unit, icon, "icon").as_deref(), Some("Icons.favorite"));
    assert_eq!(read_property(&unit, title, "fontSize").as_deref(), Some("24"));
    assert_eq!(read_property(&unit, title, "color").as_deref(), Some("Color(0xFFD32F2F)"));
    let diff = diff_dirs(&fixture("furniture"), &dir).unwrap();
    golden("header.diff", &diff).unwrap();
}

#[test]
fn judy_gets_bold_text_everywhere_and_carl_gets_identity() {
    let out = TempDir::new().unwrap();
    let report = generate(
        &fixture("furniture"),
        &personas(),
        &rules_file("judy"),
        out.path(),
        &GenerateOptions::default(),
    )
    .unwrap();
    assert!(!report.has_errors());
    let judy: Vec<_> = read_tree(&out.path().join("judy"))
        .into_iter()
        .filter(|(p, _)| p.ends_with(".dart") && !p.ends_with(".g.dart"))
        .map(|(p, b)| parse_widget_tree(&String::from_utf8(b).unwrap(), &p).unwrap())
        .collect();
    let texts: Vec<_> = judy
        .iter()
        .flat_map(|u| u.walk().into_iter().filter(|w| w.type_name == "Text").map(move |w| (u, w)))
        .collect();
    assert_eq!(texts.len(), 6);
    for (u, w) in texts {
        assert_eq!(read_property(u, w, "fontWeight").as_deref(), Some("FontWeight.bold"), "{}", u.path);
    }
    for user in ["carl", "kathryn"] {
        let mut variant = read_tree(&out.path().join(user));
        variant.retain(|(p, _)| p != MANIFEST_FILE);
        assert_eq!(variant, read_tree(&fixture("furniture")), "{user}");
    }
    golden("judy.diff", &diff_dirs(&fixture("furniture"), &out.path().join("judy")).unwrap()).unwrap();
}

#[test]
fn keyless_twin_differs_only_by_key_lines() {
    let keyed = read_tree(&fixture("furniture"));
    let keyless = read_tree(&fixture("furniture_keyless"));
    assert_eq!(keyed.len(), keyless.len());
    let mut removed = Vec::new();
    for ((pa, a), (pb, b)) in keyed.iter().zip(&keyless) {
        assert_eq!(pa, pb);
        if a == b {
            continue;
        }
        let (a, b) = (String::from_utf8_lossy(a), String::from_utf8_lossy(b));
        let b_lines: Vec<&str> = b.lines().collect();
        let kept: Vec<&str> = a.lines().filter(|l| !l.trim_start().starts_with("key: Key(")).collect();
        assert_eq!(kept, b_lines);
        removed.extend(a.lines().filter(|l| !b_lines.contains(l)).map(|l| l.trim().to_string()));
    }
    assert_eq!(
        removed,
        ["key: Key('add_shipping_appbar_icon'),", "key: Key('add_shipping_title'),"]
    );

    let keyed = check(&fixture("furniture"), &personas(), &rules_file("header")).unwrap();
    assert!(keyed.iter().all(|d| d.severity == Severity::Info), "{keyed:?}");
    let keyless = check(&fixture("furniture_keyless"), &personas(), &rules_file("header")).unwrap();
    let missing: Vec<&str> = keyless
        .iter()
        .filter(|d| d.code == "key-not-found")
        .map(|d| d.message.as_str())
        .collect();
    assert_eq!(
        missing,
        ["key not found: add_shipping_appbar_icon", "key not found: add_shipping_title"]
    );
}

#[test]
fn speech_field_wrapper_imports_and_helper() {
    let (_out, dir) = run("furniture", "modality", "kathryn");
    let text = read(&dir, "lib/screens/add_shipping.dart");
    for uri in [TTS_IMPORT, STT_IMPORT, "../adaptforge_modality.dart"] {
        assert_eq!(text.matches(&format!("import '{uri}';")).count(), 1, "{uri}");
    }
    assert_eq!(text.matches("AdaptforgeSpeechField(").count(), 1);
    assert!(text.contains("controller: _addressController,\n                speechToText: true,\n                textToSpeech: true,"));
    assert!(dir.join(MODALITY_HELPER_PATH).is_file());
    parse_widget_tree(&text, "x.dart").unwrap();
    golden("modality.diff", &diff_dirs(&fixture("furniture"), &dir).unwrap()).unwrap();

    let (_again, dir2) = run("furniture", "modality", "kathryn");
    assert_eq!(read_tree(&dir), read_tree(&dir2));

    let out = TempDir::new().unwrap();
    let err = generate(&dir, &personas(), &rules_file("modality"), out.path(), &one("kathryn")).unwrap_err();
    assert!(matches!(err, PipelineError::AlreadyAdapted { .. }));
    assert!(err.to_string().ends_with("source already adapted"), "{err}");
}

#[test]
fn form_becomes_three_steps_in_declared_order() {
    let out = TempDir::new().unwrap();
    let report = generate(
        &fixture("shipping_form"),
        &personas(),
        &rules_file("navigation"),
        out.path(),
        &one("kathryn"),
    )
    .unwrap();
    let warnings: Vec<_> = report.all_diagnostics().filter(|d| d.severity == Severity::Warning).collect();
    assert_eq!(warnings.len(), 1, "{warnings:?}");
    assert_eq!(warnings[0].code, "ungrouped-field");
    assert!(warnings[0].message.contains("delivery_notes"));

    let dir = out.path().join("kathryn");
    let text = read(&dir, "lib/shipping_form.dart");
    let unit = parse_widget_tree(&text, "lib/shipping_form.dart").unwrap();
    let steps: Vec<_> = unit.walk().into_iter().filter(|w| w.type_name == "AdaptforgeFormStep").collect();
    assert_eq!(steps.len(), 3);
    let order: Vec<Vec<&str>> = steps
        .iter()
        .map(|s| s.walk().into_iter().filter_map(|w| w.key.as_deref()).collect())
        .collect();
    assert_eq!(
        order,
        [
            vec!["full_name", "phone", "email"],
            vec!["street", "city", "region"],
            vec!["country", "postcode", "delivery_notes"],
        ]
    );
    assert!(dir.join(NAVIGATION_HELPER_PATH).is_file());
    golden("navigation.diff", &diff_dirs(&fixture("shipping_form"), &dir).unwrap()).unwrap();
}

#[test]
fn app_directory_is_never_written() {
    let app = TempDir::new().unwrap();
    copy_tree(&fixture("furniture"), app.path());
    let before = read_tree(app.path());
    let out = app.path().join("out");
    for rules in ["judy", "header", "modality"] {
        let o = out.join(rules);
        generate(app.path(), &personas(), &rules_file(rules), &o, &GenerateOptions::default()).unwrap();
    }
    let mut after = read_tree(app.path());
    after.retain(|(p, _)| !p.starts_with("out/"));
    assert_eq!(before, after);
}

#[test]
fn dry_run_writes_nothing() {
    let out = TempDir::new().unwrap();
    let opts = GenerateOptions {
        dry_run: true,
        ..GenerateOptions::default()
    };
    let report = generate(&fixture("furniture"), &personas(), &rules_file("judy"), out.path(), &opts).unwrap();
    assert!(read_tree(out.path()).is_empty());
    let plans: serde_json::Value = serde_json::from_str(&report.plans_json()).unwrap();
    assert_eq!(plans["judy"]["ops"].as_array().unwrap().len(), 3);
    assert_eq!(plans["carl"]["ops"].as_array().unwrap().len(), 0);
}

#[test]
fn refuses_to_overwrite_a_variant() {
    let (out, _dir) = run("furniture", "header", "judy");
    let err = generate(&fixture("furniture"), &personas(), &rules_file("header"), out.path(), &one("judy")).unwrap_err();
    assert!(matches!(err, PipelineError::OutputCollision(_)));
}

#[test]
fn manifest_lists_rules_and_digests() {
    let (_out, dir) = run("furniture", "judy", "judy");
    assert!(verify_manifest(&dir).unwrap().is_empty());
    let manifest: serde_json::Value = serde_json::from_str(&read(&dir, MANIFEST_FILE)).unwrap();
    assert_eq!(manifest["user_id"], "judy");
    assert_eq!(manifest["applied_rules"][0], "senior_low_contrast");
    assert_eq!(manifest["rules"][0]["verdict"], "applies");
    assert!(manifest["files"]["lib/main.dart"].as_str().unwrap().len() == 64);
    assert_eq!(
        manifest["adapted_files"],
        serde_json::json!(["lib/screens/add_shipping.dart", "lib/screens/product_list.dart"])
    );

    std::fs::write(dir.join("lib/main.dart"), "// edited\n").unwrap();
    std::fs::write(dir.join("lib/extra.dart"), "").unwrap();
    let problems = verify_manifest(&dir).unwrap();
    assert_eq!(problems.len(), 2, "{problems:?}");
}

#[test]
fn generated_parts_are_copied_untouched() {
    let (_out, dir) = run("furniture", "judy", "judy");
    assert_eq!(
        read(&dir, "lib/models/product.g.dart"),
        read(&fixture("furniture"), "lib/models/product.g.dart")
    );
    assert!(DEFAULT_EXCLUDES.contains(&"**/*.g.dart"));
}

#[test]
fn provenance_marks_every_adapted_widget() {
    let (_out, dir) = run("furniture", "judy", "judy");
    let text = read(&dir, "lib/screens/product_list.dart");
    assert_eq!(text.matches(MARKER).count(), 5);
    assert!(text.contains("// [ADAPTFORGE rule:senior_low_contrast op:0 wcag:1.4.3]"));
    assert!(text.contains("// problem: Thin grey text is hard to read for users with low contrast sensitivity"));
    assert!(text.contains("// bold weight on every text widget"));
}

#[test]
fn explain_shows_each_leaf() {
    let judy = explain(&personas(), &rules_file("judy"), "judy", "senior_low_contrast").unwrap();
    assert_eq!(
        judy,
        "verdict: applies\n\
         user.age = 72 ; > 60 → true\n\
         user.impairment[vision].type = low_contrast_sensitivity ; == \"low_contrast_sensitivity\" → true\n"
    );
    let carl = explain(&personas(), &rules_file("judy"), "carl", "senior_low_contrast").unwrap();
    assert!(carl.starts_with("verdict: not_applicable_unresolved\n"), "{carl}");

    let err = explain(&personas(), &rules_file("judy"), "nobody", "senior_low_contrast").unwrap_err();
    assert!(err.is_usage());
    assert!(err.to_string().contains("judy, carl, kathryn"));
    let err = explain(&personas(), &rules_file("judy"), "judy", "nope").unwrap_err();
    assert!(err.is_usage());
}

#[test]
fn parallel_and_sequential_runs_agree() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let seq = GenerateOptions {
        parallel: false,
        ..GenerateOptions::default()
    };
    generate(&fixture("furniture"), &personas(), &rules_file("judy"), a.path(), &GenerateOptions::default()).unwrap();
    generate(&fixture("furniture"), &personas(), &rules_file("judy"), b.path(), &seq).unwrap();
    assert_eq!(read_tree(a.path()), read_tree(b.path()));
}

#[test]
fn comments_on_moved_fields_follow_them() {
    let rules = TempDir::new().unwrap();
    let path = rules.path().join("both.adapt");
    std::fs::write(
        &path,
        r#"rule "steps" {
  condition: user.age > 60
  operations {
    operation {
      key: ["shipping_form"]
      widget_type: Column
      adaptation_type: navigation
      adaptations {
        container_key: "shipping_form"
        group "A" { order: ["full_name", "phone", "email", "street"] }
        group "B" { order: ["city", "region", "postcode", "country", "delivery_notes"] }
      }
    }
  }
}
rule "inputs" {
  condition: user.age > 60
  operations {
    operation {
      key: ["email", "city"]
      widget_type: TextFormField
      adaptation_type: presentation
      adaptations { fontSize: 20 }
    }
  }
}
"#,
    )
    .unwrap();
    let out = TempDir::new().unwrap();
    let report = generate(&fixture("shipping_form"), &personas(), &path, out.path(), &one("judy")).unwrap();
    assert!(!report.has_errors(), "{:?}", report.all_diagnostics().collect::<Vec<_>>());
    let text = read(&out.path().join("judy"), "lib/shipping_form.dart");
    let unit = parse_widget_tree(&text, "x.dart").unwrap();
    for key in ["email", "city"] {
        let field = unit.find_by_key(key)[0];
        assert_eq!(read_property(&unit, field, "fontSize").as_deref(), Some("20"));
        let before = &text[..field.span.start];
        let last_line = before.lines().rev().nth(1).unwrap();
        assert!(last_line.trim_start().starts_with("// [ADAPTFORGE rule:inputs"), "{key}: {last_line}");
    }
}
