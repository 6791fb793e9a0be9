// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::*;

/// Canonical text for a rules model: two-space indentation, fields in the
/// order wcag, comment, condition, operations (key, widget_type,
/// adaptation_type, comment, adaptations). Rules are separated by one blank
/// line.
pub fn format_rules(rules: &RulesModel) -> String {
    let mut out = String::new();
    for (i, rule) in rules.rules.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_rule(&mut out, rule);
    }
    out
}

fn write_rule(out: &mut String, rule: &AdaptationRule) {
    let _ = writeln!(out, "rule {} {{", quote(&rule.id));
    if let Some(w) = &rule.wcag {
        let _ = writeln!(out, "  wcag: {}", quote(w));
    }
    if !rule.comment.is_empty() {
        out.push_str("  comment {\n");
        for (k, v) in rule.comment.fields() {
            let _ = writeln!(out, "    {k}: {}", quote(v));
        }
        out.push_str("  }\n");
    }
    let _ = writeln!(out, "  condition: {}", format_condition(&rule.condition));
    out.push_str("  operations {\n");
    for op in &rule.operations {
        write_operation(out, op);
    }
    out.push_str("  }\n}\n");
}

fn write_operation(out: &mut String, op: &Operation) {
    out.push_str("    operation {\n");
    match &op.keys {
        KeySpec::All => out.push_str("      key: *\n"),
        KeySpec::Keys(keys) => {
            let _ = writeln!(out, "      key: {}", string_list(keys));
        }
    }
    let _ = writeln!(out, "      widget_type: {}", op.widget_type);
    let _ = writeln!(out, "      adaptation_type: {}", op.adaptation_type());
    if let Some(c) = &op.comment {
        let _ = writeln!(out, "      comment: {}", quote(c));
    }
    let mut body = Vec::new();
    match &op.payload {
        Payload::Presentation(p) => {
            for (k, v) in &p.properties {
                body.push(format!("{k}: {v}"));
            }
            for (name, code) in &p.raw_args {
                body.push(format!(
                    "raw_arg {{ name: {} code: {} }}",
                    quote(name),
                    quote(code)
                ));
            }
        }
        Payload::Modality(m) => {
            body.push(format!("text_to_speech: {}", m.text_to_speech));
            body.push(format!("speech_to_text: {}", m.speech_to_text));
        }
        Payload::Navigation(n) => {
            body.push(format!("container_key: {}", quote(&n.container_key)));
            for g in &n.groups {
                body.push(format!("group {} {{", quote(&g.title)));
                body.push(format!("  order: {}", string_list(&g.order)));
                body.push("}".to_string());
            }
        }
    }
    if body.is_empty() {
        out.push_str("      adaptations {}\n");
    } else {
        out.push_str("      adaptations {\n");
        for line in body {
            let _ = writeln!(out, "        {line}");
        }
        out.push_str("      }\n");
    }
    out.push_str("    }\n");
}

fn string_list(items: &[String]) -> String {
    let inner: Vec<String> = items.iter().map(|s| quote(s)).collect();
    format!("[{}]", inner.join(", "))
}

/// Renders a condition with the minimum parentheses needed to reparse to the
/// same tree. Negation always parenthesizes its operand.
pub(crate) fn format_condition(expr: &ConditionExpr) -> String {
    match expr {
        ConditionExpr::Compare(c) => c.to_string(),
        ConditionExpr::Not(inner) => format!("!({})", format_condition(inner)),
        ConditionExpr::Or(items) => items
            .iter()
            .map(|e| match e {
                ConditionExpr::Or(_) => format!("({})", format_condition(e)),
                _ => format_condition(e),
            })
            .collect::<Vec<_>>()
            .join(" || "),
        ConditionExpr::And(items) => items
            .iter()
            .map(|e| match e {
                ConditionExpr::Or(_) | ConditionExpr::And(_) => {
                    format!("({})", format_condition(e))
                }
                _ => format_condition(e),
            })
            .collect::<Vec<_>>()
            .join(" && "),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_rules;
    use super::*;

    const JUDY: &str = r##"rule "judy_contrast" {
  wcag: "1.4.3"
  comment {
    problem: "Low contrast sensitivity"
    solution: "Switch to a black and white theme with bold text"
  }
  condition: user.age > 60 && user.impairment[vision].type == "low_contrast_sensitivity"
  operations {
    operation {
      key: *
      widget_type: Text
      adaptation_type: presentation
      comment: "Bold every text widget"
      adaptations {
        fontWeight: bold
        color: "#FFFFFF"
      }
    }
  }
}
"##;

    #[test]
    fn canonical_text_is_a_fixed_point() {
        let m = parse_rules(JUDY).unwrap();
        let formatted = format_rules(&m);
        assert_eq!(formatted, JUDY);
        assert_eq!(parse_rules(&formatted).unwrap(), m);
    }

    #[test]
    fn empty_comment_block_omitted() {
        let text = r#"rule "r" { comment { } condition: user.age > 1 operations { operation {
            key: ["a"] widget_type: Text adaptation_type: presentation adaptations { } } } }"#;
        let out = format_rules(&parse_rules(text).unwrap());
        assert!(!out.contains("comment"), "{out}");
        assert!(out.contains("adaptations {}"));
    }

    #[test]
    fn nested_groups_keep_parentheses() {
        let text = r#"rule "r" { condition: (user.age > 1 && user.age < 5) && !(user.age == 3 || user.age == 4) || (user.age == 9 || user.age == 10)
            operations { operation { key: ["a"] widget_type: Text adaptation_type: presentation adaptations { } } } }"#;
        let m = parse_rules(text).unwrap();
        let out = format_rules(&m);
        assert!(out.contains(
            "condition: (user.age > 1 && user.age < 5) && !(user.age == 3 || user.age == 4) || (user.age == 9 || user.age == 10)"
        ), "{out}");
        assert_eq!(parse_rules(&out).unwrap(), m);
    }
}
