//! From settings and caption parts to a [`LayoutBox`].

use super::breaker::{break_atoms, place_line, segs_width, Atom, Cell, Geom, Seg};
use super::{CellMetrics, FontSpan, LayoutBox, Line};
use crate::diag::CaptionError;
use crate::registry::template::{apply_font, eval_template, is_blank, plain, Align, NBSP};
use crate::registry::{FontSpec, Piece, Registries, StyledText, VarEnv};
use crate::settings::{apply_list, ApplyCtx, CaptionSettings, Position};

#[derive(Debug, Clone, PartialEq)]
pub struct ComposedCaption {
    pub label: StyledText,
    pub separator: StyledText,
    pub text: StyledText,
    /// The format template applied to label, separator and text.
    pub pieces: StyledText,
    pub hang: bool,
    pub vertical: bool,
}

/// Builds label, separator and text and runs them through the format.
/// Starred captions get an empty label.
pub fn compose(
    reg: &Registries,
    s: &CaptionSettings,
    vars: &VarEnv,
    float_name: &str,
    number: &str,
    heading: &StyledText,
    starred: bool,
) -> Result<ComposedCaption, CaptionError> {
    let format = reg.format(&s.format)?;
    let sep_def = reg.label_separator(&s.labelsep)?;
    if format.hang && sep_def.template.contains_line_break() {
        return Err(CaptionError::LabelsepIncompatible(s.labelsep.clone()));
    }
    let mut label = if starred {
        Vec::new()
    } else {
        eval_template(reg.label_format(&s.labelformat)?, &[plain(float_name), plain(number)], vars)?
    };
    let mut text = eval_template(reg.text_format(&s.textformat)?, std::slice::from_ref(heading), vars)?;
    let mut separator =
        if is_blank(&label) || is_blank(heading) { Vec::new() } else { eval_template(&sep_def.template, &[], vars)? };
    let label_font = s.font.merge(&s.labelfont);
    apply_font(&mut label, &label_font);
    apply_font(&mut separator, if sep_def.exempt_from_labelfont { &s.font } else { &label_font });
    apply_font(&mut text, &s.font.merge(&s.textfont));
    let args = if format.hang {
        let mut lead = label.clone();
        lead.extend(separator.iter().cloned());
        [vec![Piece::MakeBox { width: None, align: Align::Left, pieces: lead }], Vec::new(), text.clone()]
    } else {
        [label.clone(), separator.clone(), text.clone()]
    };
    let pieces = eval_template(&format.template, &args, vars)?;
    Ok(ComposedCaption { label, separator, text, pieces, hang: format.hang, vertical: format.vertical })
}

/// Left and right margins in cells.
pub fn margins(s: &CaptionSettings, m: &CellMetrics) -> (usize, usize) {
    let cpl = m.cells_per_line;
    if let Some(w) = s.width {
        let wc = (m.cells(w).max(1) as usize).min(cpl);
        let left = (cpl - wc) / 2;
        return (left, cpl - wc - left);
    }
    let clamp = |d| {
        let mut c = m.cells(d);
        if let Some(max) = s.maxmargin {
            c = c.min(m.cells(max));
        }
        if let Some(min) = s.minmargin {
            c = c.max(m.cells(min));
        }
        c.max(0) as usize
    };
    let mut left = clamp(s.margin_left);
    let mut right = clamp(s.margin_right);
    let limit = cpl - 1;
    if left + right > limit {
        right = right.min(limit.saturating_sub(left));
        left = left.min(limit - right);
    }
    (left, right)
}

fn push_char(segs: &mut Vec<Seg>, ch: char, font: &FontSpec) {
    match segs.last_mut() {
        Some(s) if s.font == *font => s.text.push(ch),
        _ => segs.push(Seg { text: ch.to_string(), font: font.clone() }),
    }
}

/// Renders pieces as unbreakable material (for llap and makebox contents).
fn inline_segs(pieces: &[Piece], m: &CellMetrics) -> Vec<Seg> {
    let mut segs = Vec::new();
    let mut last_space = false;
    for p in pieces {
        match p {
            Piece::Text { text, font } => {
                for ch in text.chars() {
                    let space = ch.is_whitespace() && ch != NBSP;
                    if space && last_space {
                        continue;
                    }
                    push_char(&mut segs, if space { ' ' } else { ch }, font);
                    last_space = space;
                }
            }
            Piece::Space(d) => {
                for _ in 0..m.cells_nonneg(*d) {
                    push_char(&mut segs, ' ', &FontSpec::default());
                }
            }
            Piece::Llap(inner) => segs.extend(inline_segs(inner, m)),
            Piece::MakeBox { width, align, pieces } => segs.extend(make_box(*width, *align, pieces, m)),
            Piece::Fill | Piece::LineBreak | Piece::ParBreak => {}
        }
    }
    segs
}

fn make_box(width: Option<crate::optparse::Dimension>, align: Align, pieces: &[Piece], m: &CellMetrics) -> Vec<Seg> {
    let inner = inline_segs(pieces, m);
    let natural = segs_width(&inner);
    let target = width.map_or(natural, |w| m.cells_nonneg(w)).max(natural);
    let pad = target - natural;
    let (before, after) = match align {
        Align::Left => (0, pad),
        Align::Right => (pad, 0),
        Align::Center => (pad / 2, pad - pad / 2),
    };
    let mut out = Vec::new();
    if before > 0 {
        out.push(Seg::plain(&NBSP.to_string().repeat(before)));
    }
    out.extend(inner);
    if after > 0 {
        out.push(Seg::plain(&NBSP.to_string().repeat(after)));
    }
    out
}

/// Converts one paragraph's pieces into breakable atoms.
fn to_atoms(pieces: &[Piece], m: &CellMetrics) -> Vec<Atom> {
    let mut atoms = Vec::new();
    let mut word: Vec<Seg> = Vec::new();
    let flush = |word: &mut Vec<Seg>, atoms: &mut Vec<Atom>| {
        if !word.is_empty() {
            atoms.push(Atom::Word(std::mem::take(word)));
        }
    };
    for p in pieces {
        match p {
            Piece::Text { text, font } => {
                for ch in text.chars() {
                    if ch.is_whitespace() && ch != NBSP {
                        flush(&mut word, &mut atoms);
                        if !matches!(atoms.last(), Some(Atom::Glue)) {
                            atoms.push(Atom::Glue);
                        }
                    } else {
                        push_char(&mut word, ch, font);
                    }
                }
            }
            Piece::Space(d) => {
                flush(&mut word, &mut atoms);
                let n = m.cells_nonneg(*d);
                if n > 0 {
                    atoms.push(Atom::Kern(n));
                }
            }
            Piece::Fill => {
                flush(&mut word, &mut atoms);
                atoms.push(Atom::Fill);
            }
            Piece::LineBreak => {
                flush(&mut word, &mut atoms);
                atoms.push(Atom::Break);
            }
            Piece::ParBreak => flush(&mut word, &mut atoms),
            Piece::Llap(inner) => {
                flush(&mut word, &mut atoms);
                let segs = inline_segs(inner, m);
                if !segs.is_empty() {
                    atoms.push(Atom::Llap(segs));
                }
            }
            Piece::MakeBox { width, align, pieces } => word.extend(make_box(*width, *align, pieces, m)),
        }
    }
    flush(&mut word, &mut atoms);
    atoms
}

/// Width of the pieces set on one line, trailing space included.
pub fn natural_width(pieces: &[Piece], m: &CellMetrics) -> usize {
    let atoms = to_atoms(pieces, m);
    let start = atoms.iter().position(|a| !matches!(a, Atom::Glue)).unwrap_or(atoms.len());
    atoms[start..]
        .iter()
        .map(|a| match a {
            Atom::Word(s) => segs_width(s),
            Atom::Glue => 1,
            Atom::Kern(k) => *k,
            _ => 0,
        })
        .sum()
}

fn paragraphs(pieces: &[Piece]) -> Vec<&[Piece]> {
    let mut out: Vec<&[Piece]> = pieces.split(|p| matches!(p, Piece::ParBreak)).collect();
    while out.len() > 1 && is_blank(out[out.len() - 1]) {
        out.pop();
    }
    out
}

fn has_forced_break(pieces: &[Piece]) -> bool {
    pieces.iter().any(|p| matches!(p, Piece::LineBreak))
}

/// Whether the caption fits on a single line and the check is enabled.
pub fn single_line_check(c: &ComposedCaption, s: &CaptionSettings, m: &CellMetrics) -> bool {
    if !s.singlelinecheck {
        return false;
    }
    let paras = paragraphs(&c.pieces);
    if paras.len() != 1 || has_forced_break(paras[0]) {
        return false;
    }
    let (l, r) = margins(s, m);
    natural_width(paras[0], m) <= m.cells_per_line - l - r
}

fn line_from_cells(cells: &[Cell], gap_before: usize) -> Option<Line> {
    let min = cells.iter().map(|c| c.col).min()?;
    let max = cells.iter().map(|c| c.col).max()?;
    let mut buf: Vec<Option<(char, &FontSpec)>> = vec![None; max - min + 1];
    for c in cells {
        let ch = if c.ch == NBSP { ' ' } else { c.ch };
        buf[c.col - min] = Some((ch, &c.font));
    }
    let content: String = buf.iter().map(|c| c.map_or(' ', |(ch, _)| ch)).collect();
    let mut spans: Vec<FontSpan> = Vec::new();
    for (i, cell) in buf.iter().enumerate() {
        let Some((ch, font)) = cell else { continue };
        if *ch == ' ' {
            continue;
        }
        match spans.last_mut() {
            Some(s) if s.start + s.len == i && s.font == **font => s.len += 1,
            _ => spans.push(FontSpan { start: i, len: 1, font: (*font).clone() }),
        }
    }
    Some(Line { indent: min, content, spans, gap_before })
}

/// Lays out a composed caption. `position` must already be decided; `Auto`
/// is treated as bottom.
pub fn layout_caption(
    c: &ComposedCaption,
    s: &CaptionSettings,
    reg: &Registries,
    m: &CellMetrics,
    position: Position,
) -> Result<LayoutBox, CaptionError> {
    let mode = reg.justification(&s.justification)?.mode;
    let cpl = m.cells_per_line;
    let (left, right) = margins(s, m);
    let usable = (cpl - left - right) as i64;
    let hang_w = if c.hang {
        let mut lead = c.label.clone();
        lead.extend(c.separator.iter().cloned());
        natural_width(&lead, m) as i64
    } else {
        0
    };
    let indention = if c.vertical { 0 } else { m.cells(s.indention) };
    let hangindent = m.cells(s.hangindent);
    let parindent = m.cells(s.parindent);
    let parskip = m.cells_nonneg(s.parskip);
    let geom = |indent: i64| {
        let indent = indent.min(usable - 1);
        let origin = (left as i64 + indent).clamp(0, (cpl - right - 1) as i64) as usize;
        Geom { origin, width: cpl - right - origin }
    };
    let mut lines = Vec::new();
    for (k, para) in paragraphs(&c.pieces).into_iter().enumerate() {
        let (first, rest) =
            if k == 0 { (0, hang_w + indention + hangindent) } else { (hang_w + parindent, hang_w + hangindent) };
        let broken = break_atoms(to_atoms(para, m), geom(first), geom(rest))?;
        let mut gap = if k > 0 { parskip } else { 0 };
        for (i, bl) in broken.iter().enumerate() {
            if let Some(line) = line_from_cells(&place_line(bl, mode, i), gap) {
                lines.push(line);
                gap = 0;
            }
        }
    }
    let skip = m.cells_nonneg(s.skip);
    let (skip_above, skip_below) = match position {
        Position::Top => (0, skip),
        Position::Bottom | Position::Auto => (skip, 0),
    };
    Ok(LayoutBox { lines, skip_above, skip_below, width: cpl })
}

/// Caption parts handed to [`typeset`].
#[derive(Debug, Clone, Copy)]
pub struct CaptionParts<'a> {
    pub float_name: &'a str,
    pub number: &'a str,
    pub heading: &'a StyledText,
    pub starred: bool,
}

/// Compose, apply the single-line overrides when they fire, and lay out.
pub fn typeset(
    reg: &Registries,
    s: &CaptionSettings,
    vars: &VarEnv,
    parts: CaptionParts<'_>,
    float_type: Option<&str>,
    m: &CellMetrics,
    position: Position,
) -> Result<LayoutBox, CaptionError> {
    let c = compose(reg, s, vars, parts.float_name, parts.number, parts.heading, parts.starred)?;
    if single_line_check(&c, s, m) && !s.singleline.is_empty() {
        let mut single = s.clone();
        let (_, errors) = apply_list(&mut single, &s.singleline, ApplyCtx { reg, float_type });
        if let Some(e) = errors.into_iter().next() {
            return Err(e);
        }
        let c = compose(reg, &single, vars, parts.float_name, parts.number, parts.heading, parts.starred)?;
        return layout_caption(&c, &single, reg, m, position);
    }
    layout_caption(&c, s, reg, m, position)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optparse::parse_option_list;
    use crate::settings::{ResolveCtx, Scope, SettingsStore};

    fn settings(reg: &Registries, opts: &str) -> CaptionSettings {
        let mut store = SettingsStore::new();
        let d = store.setup(reg, Scope::Global, &parse_option_list(opts).unwrap(), false);
        assert!(d.is_empty(), "{d:?}");
        store.resolve(reg, Some("figure"), &[], ResolveCtx::default()).0
    }

    fn render(opts: &str, text: &str, width: usize) -> Vec<String> {
        let reg = Registries::builtin();
        let s = settings(&reg, opts);
        let heading = plain(text);
        let parts = CaptionParts { float_name: "Figure", number: "1", heading: &heading, starred: false };
        let b = typeset(&reg, &s, &s.vars, parts, Some("figure"), &CellMetrics::new(width), Position::Bottom).unwrap();
        b.lines.iter().map(|l| format!("{}{}", " ".repeat(l.indent), l.content)).collect()
    }

    #[test]
    fn short_caption_is_centered() {
        assert_eq!(render("", "A short caption.", 40), [format!("{}Figure 1: A short caption.", " ".repeat(7))]);
        assert_eq!(render("singlelinecheck=false", "A short caption.", 40), ["Figure 1: A short caption."]);
    }

    #[test]
    fn hang_indents_continuations_by_label_width() {
        let out = render("format=hang,justification=raggedright", "aaaa bbbb cccc dddd eeee", 23);
        assert_eq!(out, ["Figure 1: aaaa bbbb", "          cccc dddd", "          eeee"]);
    }

    #[test]
    fn empty_label_drops_separator() {
        let out = render("labelformat=empty", "Text", 30);
        assert_eq!(out[0].trim(), "Text");
    }

    #[test]
    fn newline_with_hang_is_rejected() {
        let reg = Registries::builtin();
        let s = settings(&reg, "format=hang,labelsep=newline");
        let err = compose(&reg, &s, &VarEnv::new(), "Figure", "1", &plain("x"), false).unwrap_err();
        assert_eq!(err.to_string(), "The option `labelsep=newline' does not work with `format=hang'.");
    }

    #[test]
    fn period_text_format() {
        let reg = Registries::builtin();
        let s = settings(&reg, "textformat=period");
        let c = compose(&reg, &s, &VarEnv::new(), "Table", "1", &plain("A table"), false).unwrap();
        assert_eq!(crate::registry::template::text_content(&c.text), "A table.");
    }

    #[test]
    fn skip_goes_opposite_to_position() {
        let reg = Registries::builtin();
        let s = settings(&reg, "position=top");
        let heading = plain("x");
        let parts = CaptionParts { float_name: "Figure", number: "1", heading: &heading, starred: false };
        let b = typeset(&reg, &s, &s.vars, parts, None, &CellMetrics::default(), Position::Top).unwrap();
        assert_eq!((b.skip_above, b.skip_below), (0, 2));
    }
}
