// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::source::{io_err, list_files};
use super::PipelineError;
use crate::adapt::AdaptationType;
use crate::diagnostic::Diagnostic;
use crate::engine::{Applicability, Verdict};
use crate::transform::GeneratedFile;

pub const MANIFEST_FILE: &str = "adaptforge.manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleRecord {
    pub rule_id: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetRecord {
    pub path: String,
    pub line: usize,
    pub widget_type: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperationRecord {
    pub rule_id: String,
    pub op_index: usize,
    pub adaptation_type: AdaptationType,
    pub widget_type: String,
    pub targets: Vec<TargetRecord>,
    pub edits: usize,
    pub diagnostics: Vec<Diagnostic>,
}

/// Record of one generated variant, written next to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantManifest {
    pub user_id: String,
    pub rules: Vec<RuleRecord>,
    pub applied_rules: Vec<String>,
    pub operations: Vec<OperationRecord>,
    pub generated_files: Vec<GeneratedFile>,
    pub adapted_files: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
    /// SHA-256 of every file in the variant except the manifest itself.
    pub files: BTreeMap<String, String>,
}

impl VariantManifest {
    pub fn rule_records(applicable: &[Applicability]) -> Vec<RuleRecord> {
        applicable
            .iter()
            .map(|a| RuleRecord {
                rule_id: a.rule_id.clone(),
                verdict: a.verdict,
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Recomputes digests under `variant_dir` and compares them with its
/// manifest. Returns one line per mismatch, missing, or unlisted file.
pub fn verify_manifest(variant_dir: &Path) -> Result<Vec<String>, PipelineError> {
    let path = variant_dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| PipelineError::Manifest(e.to_string()))?;
    let listed = value
        .get("files")
        .and_then(|f| f.as_object())
        .ok_or_else(|| PipelineError::Manifest("manifest has no files map".into()))?;
    let mut problems = Vec::new();
    let present: Vec<String> = list_files(variant_dir, None)?
        .into_iter()
        .filter(|p| p != MANIFEST_FILE)
        .collect();
    for (p, digest) in listed {
        let full = variant_dir.join(p);
        match std::fs::read(&full) {
            Ok(bytes) => {
                if Some(sha256_hex(&bytes).as_str()) != digest.as_str() {
                    problems.push(format!("digest mismatch: {p}"));
                }
            }
            Err(_) => problems.push(format!("missing: {p}")),
        }
    }
    for p in present {
        if !listed.contains_key(&p) {
            problems.push(format!("not in manifest: {p}"));
        }
    }
    Ok(problems)
}
