//! Greedy first-fit line breaking and horizontal placement on a cell grid.

use crate::diag::CaptionError;
use crate::registry::{FontSpec, Justify};

/// A run of characters in one font.
#[derive(Debug, Clone, PartialEq)]
pub struct Seg {
    pub text: String,
    pub font: FontSpec,
}

impl Seg {
    pub fn plain(text: &str) -> Self {
        Seg { text: text.into(), font: FontSpec::default() }
    }
}

pub fn segs_width(segs: &[Seg]) -> usize {
    segs.iter().map(|s| s.text.chars().count()).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    /// Unbreakable material.
    Word(Vec<Seg>),
    /// Interword space: one cell, stretchable, dropped at breaks.
    Glue,
    /// Fixed space, dropped at natural breaks.
    Kern(usize),
    /// Absorbs all slack on its line.
    Fill,
    /// Zero-width material drawn to the left of the current position.
    Llap(Vec<Seg>),
    /// Forced line break.
    Break,
}

impl Atom {
    fn width(&self) -> usize {
        match self {
            Atom::Word(s) => segs_width(s),
            Atom::Glue => 1,
            Atom::Kern(n) => *n,
            _ => 0,
        }
    }
}

/// Where a line starts (absolute column) and how many cells it may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geom {
    pub origin: usize,
    pub width: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineEnd {
    Natural,
    Forced,
    Last,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrokenLine {
    pub atoms: Vec<Atom>,
    pub end: LineEnd,
    pub geom: Geom,
}

impl BrokenLine {
    pub fn natural_width(&self) -> usize {
        self.atoms.iter().map(Atom::width).sum()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Start {
    Paragraph,
    AfterForced,
    AfterNatural,
}

struct Breaker {
    lines: Vec<BrokenLine>,
    cur: Vec<Atom>,
    cur_w: usize,
    first: Geom,
    rest: Geom,
    start: Start,
}

impl Breaker {
    fn geom(&self) -> Geom {
        if self.lines.is_empty() {
            self.first
        } else {
            self.rest
        }
    }

    fn finish_line(&mut self, end: LineEnd, next: Start) {
        while matches!(self.cur.last(), Some(Atom::Glue | Atom::Kern(_) | Atom::Fill)) {
            self.cur.pop();
        }
        let geom = self.geom();
        self.lines.push(BrokenLine { atoms: std::mem::take(&mut self.cur), end, geom });
        self.cur_w = 0;
        self.start = next;
    }

    fn place_chunk(&mut self, seps: Vec<Atom>, llaps: Vec<Atom>, word: Atom) -> Result<(), CaptionError> {
        let word_w = word.width();
        if !self.cur.is_empty() {
            let add: usize = seps.iter().map(Atom::width).sum::<usize>() + word_w;
            if self.cur_w + add <= self.geom().width {
                self.cur.extend(seps);
                self.cur.extend(llaps);
                self.cur.push(word);
                self.cur_w += add;
                return Ok(());
            }
            self.finish_line(LineEnd::Natural, Start::AfterNatural);
        }
        let geom = self.geom();
        if word_w > geom.width {
            let text = match &word {
                Atom::Word(s) => s.iter().map(|s| s.text.as_str()).collect(),
                _ => String::new(),
            };
            return Err(CaptionError::WordTooWide { word: text, width: geom.width });
        }
        // Fixed spaces survive at the start of a paragraph or after a forced
        // break, as long as they leave room for the word.
        let mut lead: usize = 0;
        if self.start != Start::AfterNatural {
            for s in seps {
                if let Atom::Kern(k) = s {
                    if lead + k + word_w <= geom.width {
                        lead += k;
                        self.cur.push(Atom::Kern(k));
                    }
                }
            }
        }
        // Material hanging left of column 0 pushes the line right.
        let llap_w: usize =
            llaps.iter().map(|l| if let Atom::Llap(s) = l { segs_width(s) } else { 0 }).max().unwrap_or(0);
        let room = geom.origin + lead;
        if llap_w > room {
            let shift = (llap_w - room).min(geom.width - lead - word_w);
            if shift > 0 {
                self.cur.insert(0, Atom::Kern(shift));
                lead += shift;
            }
        }
        self.cur.extend(llaps);
        self.cur.push(word);
        self.cur_w = lead + word_w;
        Ok(())
    }
}

/// Breaks one paragraph greedily. The first line uses `first`, all others
/// (including lines after forced breaks) use `rest`.
pub fn break_atoms(atoms: Vec<Atom>, first: Geom, rest: Geom) -> Result<Vec<BrokenLine>, CaptionError> {
    let mut b = Breaker { lines: Vec::new(), cur: Vec::new(), cur_w: 0, first, rest, start: Start::Paragraph };
    let mut seps = Vec::new();
    let mut llaps = Vec::new();
    for atom in atoms {
        match atom {
            Atom::Glue | Atom::Kern(_) | Atom::Fill => {
                if !b.cur.is_empty() {
                    b.cur.append(&mut llaps);
                }
                seps.push(atom);
            }
            Atom::Llap(_) => llaps.push(atom),
            Atom::Word(_) => b.place_chunk(std::mem::take(&mut seps), std::mem::take(&mut llaps), atom)?,
            Atom::Break => {
                seps.clear();
                b.cur.append(&mut llaps);
                b.finish_line(LineEnd::Forced, Start::AfterForced);
            }
        }
    }
    b.cur.append(&mut llaps);
    if !b.cur.is_empty() || b.lines.is_empty() {
        b.finish_line(LineEnd::Last, Start::AfterNatural);
    }
    Ok(b.lines)
}

/// A drawn character with its font.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub col: usize,
    pub ch: char,
    pub font: FontSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Placement {
    Left,
    Right,
    Center,
    Stretch,
}

fn placement(mode: Justify, index: usize, end: LineEnd) -> Placement {
    let finalish = end != LineEnd::Natural;
    match mode {
        Justify::Justified if finalish => Placement::Left,
        Justify::Justified => Placement::Stretch,
        Justify::Centering => Placement::Center,
        Justify::CenterLast if finalish => Placement::Center,
        Justify::CenterLast => Placement::Stretch,
        Justify::CenterFirst if index == 0 => Placement::Center,
        Justify::CenterFirst => Placement::Stretch,
        Justify::RaggedRight => Placement::Left,
        Justify::RaggedLeft => Placement::Right,
    }
}

/// Splits `total` into `n` shares differing by at most one, larger first.
fn shares(total: usize, n: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    (0..n).map(|i| total / n + usize::from(i < total % n)).collect()
}

fn put(out: &mut Vec<Cell>, col: usize, segs: &[Seg]) -> usize {
    let mut c = col;
    for s in segs {
        for ch in s.text.chars() {
            out.push(Cell { col: c, ch, font: s.font.clone() });
            c += 1;
        }
    }
    c
}

/// Positions the atoms of one line. `index` is the line's position within
/// its paragraph.
pub fn place_line(line: &BrokenLine, mode: Justify, index: usize) -> Vec<Cell> {
    let slack = line.geom.width.saturating_sub(line.natural_width());
    let fills = line.atoms.iter().filter(|a| matches!(a, Atom::Fill)).count();
    let glues = line.atoms.iter().filter(|a| matches!(a, Atom::Glue)).count();
    let mut offset = 0;
    let mut fill_share = Vec::new();
    let mut glue_share = Vec::new();
    if fills > 0 {
        fill_share = shares(slack, fills);
    } else {
        match placement(mode, index, line.end) {
            Placement::Left => {}
            Placement::Right => offset = slack,
            Placement::Center => offset = slack / 2,
            Placement::Stretch if glues > 0 => glue_share = shares(slack, glues),
            Placement::Stretch => {}
        }
    }
    let mut out = Vec::new();
    let mut col = line.geom.origin + offset;
    let (mut fi, mut gi) = (0, 0);
    for a in &line.atoms {
        match a {
            Atom::Word(s) => col = put(&mut out, col, s),
            Atom::Glue => {
                col += 1 + glue_share.get(gi).copied().unwrap_or(0);
                gi += 1;
            }
            Atom::Kern(k) => col += k,
            Atom::Fill => {
                col += fill_share.get(fi).copied().unwrap_or(0);
                fi += 1;
            }
            Atom::Llap(s) => {
                let start = col.saturating_sub(segs_width(s));
                put(&mut out, start, s);
            }
            Atom::Break => {}
        }
    }
    out
}

/// A placed line of plain text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedLine {
    pub indent: usize,
    pub content: String,
}

/// Flattens placed cells into leading indent plus text, later cells
/// overwriting earlier ones.
pub fn flatten(cells: &[Cell]) -> PlacedLine {
    let Some(min) = cells.iter().map(|c| c.col).min() else {
        return PlacedLine { indent: 0, content: String::new() };
    };
    let max = cells.iter().map(|c| c.col).max().unwrap_or(min);
    let mut buf = vec![' '; max - min + 1];
    for c in cells {
        buf[c.col - min] = if c.ch == crate::registry::template::NBSP { ' ' } else { c.ch };
    }
    PlacedLine { indent: min, content: buf.into_iter().collect() }
}

/// Breaks space-separated words into lines of `usable` cells. Indents are
/// relative to the left edge; the first line uses `first_indent`, the rest
/// `hang_indent`.
pub fn break_paragraph(
    text: &str,
    mode: Justify,
    usable: usize,
    first_indent: usize,
    hang_indent: usize,
) -> Result<Vec<PlacedLine>, CaptionError> {
    let mut atoms = Vec::new();
    for (i, w) in text.split_whitespace().enumerate() {
        if i > 0 {
            atoms.push(Atom::Glue);
        }
        atoms.push(Atom::Word(vec![Seg::plain(w)]));
    }
    let geom = |indent: usize| Geom {
        origin: indent.min(usable.saturating_sub(1)),
        width: usable.saturating_sub(indent).max(1),
    };
    let lines = break_atoms(atoms, geom(first_indent), geom(hang_indent))?;
    Ok(lines
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.atoms.is_empty())
        .map(|(i, l)| flatten(&place_line(l, mode, i)))
        .collect())
}
