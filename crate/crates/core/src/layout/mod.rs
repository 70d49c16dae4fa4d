//! Caption composition and layout on a grid of monospaced cells.

pub mod breaker;
pub mod compose;

use crate::optparse::Dimension;
use crate::registry::FontSpec;

pub use breaker::{break_paragraph, PlacedLine};
pub use compose::{compose, layout_caption, single_line_check, ComposedCaption};

pub const POINTS_PER_CELL: f64 = 6.0;
pub const DEFAULT_WIDTH: usize = 72;

/// Converts lengths to cells for a container of `cells_per_line` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellMetrics {
    pub cells_per_line: usize,
}

impl Default for CellMetrics {
    fn default() -> Self {
        CellMetrics { cells_per_line: DEFAULT_WIDTH }
    }
}

impl CellMetrics {
    pub fn new(cells_per_line: usize) -> Self {
        CellMetrics { cells_per_line: cells_per_line.max(1) }
    }

    /// Points at 6pt per cell plus the relative part of the line width,
    /// each rounded half away from zero.
    pub fn cells(&self, d: Dimension) -> i64 {
        let abs = (d.points / POINTS_PER_CELL).round() as i64;
        let rel = d.relative.map_or(0, |r| (r * self.cells_per_line as f64).round() as i64);
        abs + rel
    }

    pub fn cells_nonneg(&self, d: Dimension) -> usize {
        self.cells(d).max(0) as usize
    }
}

/// A run of characters in one font, as char offsets into the line content.
#[derive(Debug, Clone, PartialEq)]
pub struct FontSpan {
    pub start: usize,
    pub len: usize,
    pub font: FontSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    /// Absolute column of the first character.
    pub indent: usize,
    pub content: String,
    pub spans: Vec<FontSpan>,
    /// Blank rows inserted before this line (paragraph skip).
    pub gap_before: usize,
}

/// A laid-out caption.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LayoutBox {
    pub lines: Vec<Line>,
    pub skip_above: usize,
    pub skip_below: usize,
    /// Container width in cells.
    pub width: usize,
}

impl LayoutBox {
    /// Line texts with justification padding collapsed to single spaces.
    pub fn collapsed_text(&self) -> Vec<String> {
        self.lines.iter().map(|l| l.content.split_whitespace().collect::<Vec<_>>().join(" ")).collect()
    }
}
