// SPDX-License-Identifier: Apache-2.0

use super::edit::{Edit, Piece, Structural};
use super::presentation::line_indent;
use crate::adapt::ModalityPayload;
use crate::engine::Origin;
use crate::widget::{SourceUnit, WidgetNode};

pub const MODALITY_HELPER_PATH: &str = "lib/adaptforge_modality.dart";
pub const TTS_IMPORT: &str = "package:flutter_tts/flutter_tts.dart";
pub const STT_IMPORT: &str = "package:speech_to_text/speech_to_text.dart";
pub const MODALITY_WRAPPER: &str = "AdaptforgeSpeechField";

pub const MODALITY_HELPER: &str = r#"// Generated by adaptforge. Do not edit.
import 'package:flutter/material.dart';
import 'package:flutter_tts/flutter_tts.dart';
import 'package:speech_to_text/speech_to_text.dart';

/// Places microphone and speaker buttons next to a text field. Dictation
/// writes into [controller]; playback reads the controller's text.
class AdaptforgeSpeechField extends StatefulWidget {
  const AdaptforgeSpeechField({
    super.key,
    required this.controller,
    required this.child,
    this.speechToText = false,
    this.textToSpeech = false,
  });

  final TextEditingController controller;
  final Widget child;
  final bool speechToText;
  final bool textToSpeech;

  @override
  State<AdaptforgeSpeechField> createState() => _AdaptforgeSpeechFieldState();
}

class _AdaptforgeSpeechFieldState extends State<AdaptforgeSpeechField> {
  final FlutterTts _tts = FlutterTts();
  final SpeechToText _stt = SpeechToText();
  bool _listening = false;

  Future<void> _toggleListening() async {
    if (_listening) {
      await _stt.stop();
      setState(() => _listening = false);
      return;
    }
    final available = await _stt.initialize();
    if (!available) return;
    setState(() => _listening = true);
    await _stt.listen(onResult: (result) {
      widget.controller.text = result.recognizedWords;
      widget.controller.selection = TextSelection.collapsed(
        offset: widget.controller.text.length,
      );
      if (result.finalResult) setState(() => _listening = false);
    });
  }

  Future<void> _speak() async {
    final text = widget.controller.text;
    if (text.isNotEmpty) await _tts.speak(text);
  }

  @override
  void dispose() {
    _tts.stop();
    _stt.cancel();
    super.dispose();
  }

  @override
  Widget build(BuildContext context) {
    return Row(
      children: [
        Expanded(child: widget.child),
        if (widget.speechToText)
          IconButton(
            tooltip: _listening ? 'Stop dictation' : 'Dictate',
            icon: Icon(_listening ? Icons.mic_off : Icons.mic),
            onPressed: _toggleListening,
          ),
        if (widget.textToSpeech)
          IconButton(
            tooltip: 'Read aloud',
            icon: const Icon(Icons.volume_up),
            onPressed: _speak,
          ),
      ],
    );
  }
}
"#;

fn is_simple_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
}

/// Import `to` (a path from the app root) from the file at `from`.
pub fn relative_import(from: &str, to: &str) -> String {
    let from_dir: Vec<&str> = from.split('/').collect::<Vec<_>>();
    let from_dir = &from_dir[..from_dir.len().saturating_sub(1)];
    let to_parts: Vec<&str> = to.split('/').collect();
    let common = from_dir
        .iter()
        .zip(&to_parts)
        .take_while(|(a, b)| a == b)
        .count();
    let mut parts: Vec<&str> = vec![".."; from_dir.len() - common];
    parts.extend(&to_parts[common..]);
    parts.join("/")
}

/// Imports a file using a modality wrapper needs, in insertion order.
pub fn modality_imports(path: &str, payload: &ModalityPayload) -> Vec<String> {
    let mut out = Vec::new();
    if payload.text_to_speech {
        out.push(TTS_IMPORT.to_string());
    }
    if payload.speech_to_text {
        out.push(STT_IMPORT.to_string());
    }
    out.push(relative_import(path, MODALITY_HELPER_PATH));
    out
}

/// One insertion adding each missing import once, after the last existing
/// import (or at the top of the file).
pub fn import_edit(unit: &SourceUnit, uris: &[String], origins: &[Origin]) -> Option<Edit> {
    let mut missing: Vec<&String> = Vec::new();
    for u in uris {
        if !unit.imports.iter().any(|i| &i.uri == u) && !missing.contains(&u) {
            missing.push(u);
        }
    }
    if missing.is_empty() {
        return None;
    }
    let (at, text) = match unit.imports.iter().map(|i| i.span.end).max() {
        Some(end) => (end, missing.iter().map(|u| format!("\nimport '{u}';")).collect::<String>()),
        None => (
            0,
            missing.iter().map(|u| format!("import '{u}';\n")).collect::<String>() + "\n",
        ),
    };
    let mut edit = Edit::insert(&unit.path, at, text, &origins[0]);
    edit.origins = origins.to_vec();
    Some(edit)
}

/// Wraps `target` in the speech helper. Returns the wrap and the imports
/// the file needs.
pub fn apply_modality(
    unit: &SourceUnit,
    target: &WidgetNode,
    payload: &ModalityPayload,
    origin: &Origin,
) -> Result<(Structural, Vec<String>), String> {
    let controller = target
        .read_arg("controller")
        .map(|a| a.value.text(&unit.text))
        .filter(|v| is_simple_identifier(v))
        .ok_or_else(|| "speech adaptation requires a named controller".to_string())?;
    let i = line_indent(&unit.text, target.span.start);
    let head = format!(
        "{MODALITY_WRAPPER}(\n{i}  controller: {controller},\n{i}  speechToText: {},\n{i}  textToSpeech: {},\n{i}  child: ",
        payload.speech_to_text, payload.text_to_speech
    );
    let wrap = Structural {
        span: target.span,
        pieces: vec![
            Piece::Text(head),
            Piece::Source {
                span: target.span,
                indent: format!("{i}  "),
            },
            Piece::Text(format!(",\n{i})")),
        ],
        origins: vec![origin.clone()],
    };
    Ok((wrap, modality_imports(&unit.path, payload)))
}
