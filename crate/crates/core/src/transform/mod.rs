// SPDX-License-Identifier: Apache-2.0
//! Turning an operation plan into text edits and applying them.

mod apply;
mod edit;
mod modality;
mod navigation;
mod presentation;
pub mod property;
mod provenance;
mod readback;

pub use apply::{transform, AdaptedFile, GeneratedFile, OpReport, TransformResult};
pub use edit::{apply_edits, compose, Edit, EditError, Piece, Structural, MARKER};
pub use modality::{
    apply_modality, import_edit, modality_imports, relative_import, MODALITY_HELPER, MODALITY_HELPER_PATH,
    MODALITY_WRAPPER, STT_IMPORT, TTS_IMPORT,
};
pub use navigation::{apply_navigation, NAVIGATION_HELPER, NAVIGATION_HELPER_PATH, STEPPER_WIDGET, STEP_WIDGET};
pub use presentation::{apply_presentation, line_indent, payload_writes, widget_edits, PropertyWrite, WriteTarget};
pub use provenance::{comment_edit, render_provenance};
pub use readback::read_property;
