//! Text output for laid-out captions.

use crate::layout::{LayoutBox, Line};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    /// Font runs wrapped as `«attrs:text»`.
    Annotated,
}

/// One row per line, blank rows for skips and paragraph gaps, margins as
/// leading spaces. An empty box renders as an empty string.
pub fn render_box(b: &LayoutBox, format: OutputFormat) -> String {
    if b.lines.is_empty() {
        return String::new();
    }
    let mut out = "\n".repeat(b.skip_above);
    for line in &b.lines {
        out.push_str(&"\n".repeat(line.gap_before));
        let body = match format {
            OutputFormat::Text => line.content.clone(),
            OutputFormat::Annotated => annotate(line),
        };
        let row = format!("{}{}", " ".repeat(line.indent), body);
        out.push_str(row.trim_end());
        out.push('\n');
    }
    out.push_str(&"\n".repeat(b.skip_below));
    out
}

/// Wraps font runs; runs in the same font separated only by spaces are
/// merged.
fn annotate(line: &Line) -> String {
    let chars: Vec<char> = line.content.chars().collect();
    let mut out = String::new();
    let mut pos = 0;
    let mut i = 0;
    while i < line.spans.len() {
        let span = &line.spans[i];
        let mut end = span.start + span.len;
        let mut j = i + 1;
        while j < line.spans.len() {
            let next = &line.spans[j];
            if next.font.describe() != span.font.describe() || !chars[end..next.start].iter().all(|c| *c == ' ') {
                break;
            }
            end = next.start + next.len;
            j += 1;
        }
        out.extend(&chars[pos..span.start]);
        let text: String = chars[span.start..end].iter().collect();
        let attrs = span.font.describe();
        if attrs.is_empty() {
            out.push_str(&text);
        } else {
            out.push_str(&format!("«{attrs}:{text}»"));
        }
        pos = end;
        i = j;
    }
    out.extend(&chars[pos..]);
    out
}
