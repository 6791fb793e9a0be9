// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use walkdir::WalkDir;

use super::manifest::MANIFEST_FILE;
use super::PipelineError;
use crate::diagnostic::Diagnostic;
use crate::transform::MARKER;
use crate::widget::{parse_widget_tree, SourceUnit};

/// Default patterns for Dart files that are copied but never parsed.
pub const DEFAULT_EXCLUDES: &[&str] = &["**/*.g.dart", "**/*.freezed.dart"];

/// Every file of an app tree, keyed by `/`-separated relative path.
#[derive(Debug, Clone)]
pub struct AppSource {
    pub root: PathBuf,
    /// Sorted by path.
    pub files: Vec<(String, Vec<u8>)>,
    /// Parsed Dart files, sorted by path.
    pub units: Vec<SourceUnit>,
    pub diagnostics: Vec<Diagnostic>,
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn build_globs(patterns: &[String]) -> Result<GlobSet, PipelineError> {
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        b.add(Glob::new(p).map_err(|e| PipelineError::Glob(e.to_string()))?);
    }
    b.build().map_err(|e| PipelineError::Glob(e.to_string()))
}

/// Relative paths of all regular files under `root`, sorted, skipping
/// hidden entries, `build/`, nested variant directories (those holding a
/// manifest), and `skip` (an output directory nested in the tree).
pub fn list_files(root: &Path, skip: Option<&Path>) -> Result<Vec<String>, PipelineError> {
    let skip = skip.and_then(|s| s.canonicalize().ok());
    let mut out = Vec::new();
    let walker = WalkDir::new(root).sort_by_file_name().into_iter().filter_entry(|e| {
        if e.depth() == 0 {
            return true;
        }
        let name = e.file_name().to_string_lossy();
        if name.starts_with('.') || (e.file_type().is_dir() && e.depth() == 1 && name == "build") {
            return false;
        }
        if e.file_type().is_dir() && e.path().join(MANIFEST_FILE).is_file() {
            return false;
        }
        match (&skip, e.path().canonicalize()) {
            (Some(s), Ok(p)) => &p != s,
            _ => true,
        }
    });
    for entry in walker {
        let entry = entry.map_err(|e| PipelineError::Io {
            path: root.display().to_string(),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).expect("walk stays under root");
        let rel: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
        out.push(rel.join("/"));
    }
    out.sort();
    Ok(out)
}

/// Reads an app tree and parses its Dart files. A file that already
/// carries a provenance marker aborts loading.
pub fn load_app(
    root: &Path,
    excludes: &[String],
    skip: Option<&Path>,
    parallel: bool,
) -> Result<AppSource, PipelineError> {
    if !root.is_dir() {
        return Err(PipelineError::Io {
            path: root.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let globs = build_globs(excludes)?;
    let mut files = Vec::new();
    for rel in list_files(root, skip)? {
        let full = root.join(&rel);
        let bytes = std::fs::read(&full).map_err(io_err(&full))?;
        files.push((rel, bytes));
    }
    let dart: Vec<(&String, &str)> = files
        .iter()
        .filter(|(p, _)| p.ends_with(".dart") && !globs.is_match(p))
        .filter_map(|(p, b)| std::str::from_utf8(b).ok().map(|t| (p, t)))
        .collect();
    if let Some((p, _)) = dart.iter().find(|(_, t)| t.contains(MARKER)) {
        return Err(PipelineError::AlreadyAdapted { path: p.to_string() });
    }
    let parse = |(p, t): &(&String, &str)| parse_widget_tree(t, p);
    let parsed: Vec<_> = if parallel {
        dart.par_iter().map(parse).collect()
    } else {
        dart.iter().map(parse).collect()
    };
    let mut units = Vec::new();
    let mut diagnostics = Vec::new();
    for r in parsed {
        match r {
            Ok(u) => {
                diagnostics.extend(u.diagnostics.iter().cloned());
                units.push(u);
            }
            Err(e) => diagnostics.push(Diagnostic::error("dart-syntax", e.to_string())),
        }
    }
    Ok(AppSource {
        root: root.to_path_buf(),
        files,
        units,
        diagnostics,
    })
}
