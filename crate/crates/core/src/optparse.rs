//! The key/value option language: `key=value` lists separated by commas,
//! with `{...}` grouping, plus dimensions and boolean literals.

use std::fmt;

use crate::diag::CaptionError;

/// Points per unit. The conversions are fixed; `em` is pinned to 12pt so
/// that parsing never depends on a font.
const UNITS: &[(&str, f64)] = &[("pt", 1.0), ("in", 72.27), ("cm", 28.45), ("mm", 2.845), ("em", 12.0)];

/// A length: absolute points plus an optional fraction of the container width.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dimension {
    pub points: f64,
    pub relative: Option<f64>,
}

impl Dimension {
    pub const ZERO: Dimension = Dimension { points: 0.0, relative: None };

    pub fn pt(points: f64) -> Self {
        Dimension { points, relative: None }
    }

    pub fn relative(fraction: f64) -> Self {
        Dimension { points: 0.0, relative: Some(fraction) }
    }

    pub fn is_absolute(&self) -> bool {
        self.relative.is_none()
    }

    pub fn is_negative(&self) -> bool {
        self.points < 0.0 || self.relative.is_some_and(|r| r < 0.0)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.relative {
            None => write!(f, "{}pt", self.points),
            Some(r) if self.points == 0.0 => write!(f, "{r}\\linewidth"),
            // Not produced by the parser; kept printable for debugging.
            Some(r) => write!(f, "{}pt+{r}\\linewidth", self.points),
        }
    }
}

/// Parses a single dimension term such as `10pt`, `-0.5cm` or `.75\textwidth`.
pub fn parse_dimension(text: &str) -> Result<Dimension, CaptionError> {
    let bad = || CaptionError::BadDimension(text.to_string());
    let t = text.trim();
    let (number, rest) = split_number(t);
    let rest = rest.trim_start();
    if rest == "\\linewidth" || rest == "\\textwidth" {
        let fraction = match number {
            "" => 1.0,
            "-" => -1.0,
            "+" => 1.0,
            n => parse_decimal(n).ok_or_else(bad)?,
        };
        return Ok(Dimension::relative(fraction));
    }
    let value = parse_decimal(number).ok_or_else(bad)?;
    let factor = UNITS.iter().find(|(u, _)| *u == rest).map(|(_, f)| *f).ok_or_else(bad)?;
    Ok(Dimension::pt(value * factor))
}

fn split_number(t: &str) -> (&str, &str) {
    let end = t
        .char_indices()
        .find(|&(i, c)| !(c.is_ascii_digit() || c == '.' || (i == 0 && (c == '-' || c == '+'))))
        .map_or(t.len(), |(i, _)| i);
    t.split_at(end)
}

fn parse_decimal(s: &str) -> Option<f64> {
    let digits = s.trim_start_matches(['+', '-']);
    if digits.is_empty() || digits == "." || digits.matches('.').count() > 1 {
        return None;
    }
    s.parse().ok()
}

/// Parses one of the eight documented boolean literals.
pub fn parse_bool(text: &str) -> Result<bool, CaptionError> {
    match text.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(CaptionError::UndefinedBooleanValue(other.to_string())),
    }
}

/// One `key[=value]` item. Values are kept as raw text with one level of
/// outer braces removed; [`OptionEntry::nested`] reparses a value as a list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptionEntry {
    pub key: String,
    pub value: Option<String>,
}

impl OptionEntry {
    pub fn new(key: impl Into<String>, value: Option<&str>) -> Self {
        OptionEntry { key: key.into(), value: value.map(str::to_string) }
    }

    pub fn nested(&self) -> Result<OptionList, CaptionError> {
        parse_option_list(self.value.as_deref().unwrap_or(""))
    }
}

impl fmt::Display for OptionEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            None => f.write_str(&self.key),
            Some(v) => write!(f, "{}={{{}}}", self.key, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OptionList {
    pub entries: Vec<OptionEntry>,
}

impl OptionList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, OptionEntry> {
        self.entries.iter()
    }

    pub fn push(&mut self, key: impl Into<String>, value: Option<&str>) {
        self.entries.push(OptionEntry::new(key, value));
    }

    pub fn extend(&mut self, other: &OptionList) {
        self.entries.extend(other.entries.iter().cloned());
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.entries.iter().any(|e| e.key == key)
    }

    /// Removes every entry with `key`; returns whether anything was removed.
    pub fn remove_key(&mut self, key: &str) -> bool {
        let before = self.entries.len();
        self.entries.retain(|e| e.key != key);
        before != self.entries.len()
    }

    /// The source text as written, without the canonical re-bracing of `Display`.
    pub fn to_source(&self) -> String {
        self.entries
            .iter()
            .map(|e| match &e.value {
                None => e.key.clone(),
                Some(v) if needs_braces(v) => format!("{}={{{}}}", e.key, v),
                Some(v) => format!("{}={}", e.key, v),
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn needs_braces(v: &str) -> bool {
    v.is_empty()
        || v.contains([',', '='])
        || v.starts_with(char::is_whitespace)
        || v.ends_with(char::is_whitespace)
        || strip_outer_braces(v) != v
}

impl fmt::Display for OptionList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a OptionList {
    type Item = &'a OptionEntry;
    type IntoIter = std::slice::Iter<'a, OptionEntry>;
    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Checks brace balance; the error position is the byte offset of the
/// stray `}` or of the innermost `{` left open.
fn check_braces(text: &str) -> Result<(), CaptionError> {
    let mut open = Vec::new();
    for (i, c) in text.char_indices() {
        match c {
            '{' => open.push(i),
            '}' if open.pop().is_none() => {
                return Err(CaptionError::UnbalancedBraces(i));
            }
            _ => {}
        }
    }
    match open.last() {
        Some(&i) => Err(CaptionError::UnbalancedBraces(i)),
        None => Ok(()),
    }
}

/// Splits `text` at top-level occurrences of `sep`, returning byte offsets.
fn split_top_level(text: &str, sep: char) -> Vec<(usize, &str)> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push((start, &text[start..i]));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push((start, &text[start..]));
    parts
}

fn find_top_level(text: &str, needle: char) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => depth = depth.saturating_sub(1),
            c if c == needle && depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Removes one pair of braces if the whole string is a single group.
pub(crate) fn strip_outer_braces(v: &str) -> &str {
    if !(v.starts_with('{') && v.ends_with('}')) || v.len() < 2 {
        return v;
    }
    let mut depth = 0usize;
    for (i, c) in v.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return if i == v.len() - 1 { &v[1..i] } else { v };
                }
            }
            _ => {}
        }
    }
    v
}

/// Parses a comma-separated option list.
///
/// Whitespace around keys, `=` and commas is trimmed, empty items are
/// skipped, and one level of braces around a value is removed.
pub fn parse_option_list(text: &str) -> Result<OptionList, CaptionError> {
    check_braces(text)?;
    let mut list = OptionList::new();
    for (offset, item) in split_top_level(text, ',') {
        if item.trim().is_empty() {
            continue;
        }
        match find_top_level(item, '=') {
            None => list.entries.push(OptionEntry { key: item.trim().to_string(), value: None }),
            Some(eq) => {
                let key = item[..eq].trim();
                if key.is_empty() {
                    return Err(CaptionError::EmptyKey(offset + eq));
                }
                let value = strip_outer_braces(item[eq + 1..].trim());
                list.entries.push(OptionEntry { key: key.to_string(), value: Some(value.to_string()) });
            }
        }
    }
    Ok(list)
}

/// Parses `x` or `{left,right}` (braces already stripped) into a margin pair.
pub fn parse_dimension_pair(text: &str) -> Result<(Dimension, Dimension), CaptionError> {
    let parts = split_top_level(text, ',');
    match parts.as_slice() {
        [(_, one)] => {
            let d = parse_dimension(strip_outer_braces(one.trim()))?;
            Ok((d, d))
        }
        [(_, l), (_, r)] => {
            Ok((parse_dimension(strip_outer_braces(l.trim()))?, parse_dimension(strip_outer_braces(r.trim()))?))
        }
        _ => Err(CaptionError::BadDimension(text.to_string())),
    }
}
