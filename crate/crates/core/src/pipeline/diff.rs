// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::path::Path;

use similar::TextDiff;

use super::manifest::MANIFEST_FILE;
use super::source::{io_err, list_files};
use super::PipelineError;

fn as_text(b: &Option<Vec<u8>>) -> Option<Option<&str>> {
    b.as_ref().map(|b| std::str::from_utf8(b).ok())
}

/// Unified diff of one file. `None` on either side means the file is
/// absent there.
pub fn diff_texts(path: &str, old: Option<&str>, new: Option<&str>) -> String {
    let a = if old.is_some() { format!("a/{path}") } else { "/dev/null".to_string() };
    let b = if new.is_some() { format!("b/{path}") } else { "/dev/null".to_string() };
    TextDiff::from_lines(old.unwrap_or(""), new.unwrap_or(""))
        .unified_diff()
        .context_radius(3)
        .header(&a, &b)
        .to_string()
}

/// Diff of every file that differs between an app and one of its
/// variants, sorted by path. The variant manifest is not compared.
pub fn diff_dirs(app_dir: &Path, variant_dir: &Path) -> Result<String, PipelineError> {
    let left: BTreeSet<String> = list_files(app_dir, Some(variant_dir))?.into_iter().collect();
    let right: BTreeSet<String> = list_files(variant_dir, None)?
        .into_iter()
        .filter(|p| p != MANIFEST_FILE)
        .collect();
    let mut out = String::new();
    for path in left.union(&right) {
        let read = |dir: &Path, present: bool| -> Result<Option<Vec<u8>>, PipelineError> {
            if !present {
                return Ok(None);
            }
            let full = dir.join(path);
            std::fs::read(&full).map(Some).map_err(io_err(&full))
        };
        let old = read(app_dir, left.contains(path))?;
        let new = read(variant_dir, right.contains(path))?;
        if old == new {
            continue;
        }
        match (as_text(&old), as_text(&new)) {
            (Some(None), _) | (_, Some(None)) => {
                out.push_str(&format!("Binary files a/{path} and b/{path} differ\n"));
            }
            (o, n) => out.push_str(&diff_texts(path, o.flatten(), n.flatten())),
        }
    }
    Ok(out)
}
