//! The template language used by format, label format, separator, text
//! format and list format declarations.
//!
//! Supported syntax: literal text, `#1`..`#3`, `\\`, `\par`, `\hfill`,
//! `\hfil`, `\llap{..}`, `\hspace{..}`, `\hspace*{..}`, `\quad`, `\qquad`,
//! `\makebox[w][l|r|c]{..}`, `\bothIfFirst{..}{..}`, `\bothIfSecond{..}{..}`,
//! the `\textXX{..}`/`\emph{..}` font commands, escaped characters, `~`,
//! and variables (`\figurename`, `\thetable`, declared custom options).

use std::collections::BTreeMap;
use std::fmt;

use super::font::{text_command, FontSpec};
use crate::diag::CaptionError;
use crate::optparse::{parse_dimension, Dimension};

pub const NBSP: char = '\u{a0}';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Align {
    Left,
    Right,
    Center,
}

impl Align {
    fn letter(self) -> char {
        match self {
            Align::Left => 'l',
            Align::Right => 'r',
            Align::Center => 'c',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Length {
    Fixed(Dimension),
    Var(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    Literal(String),
    Param(u8),
    LineBreak,
    Par,
    Fill,
    Llap(Template),
    HSpace {
        length: Length,
        starred: bool,
    },
    MakeBox {
        width: Option<Dimension>,
        align: Align,
        inner: Template,
    },
    Var(String),
    BothIfFirst(Template, Template),
    BothIfSecond(Template, Template),
    /// `\textbf{..}` and friends; the command name is kept for display.
    Font {
        command: String,
        inner: Template,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Template {
    pub tokens: Vec<Token>,
}

impl Template {
    pub fn literal(text: &str) -> Self {
        let mut t = Template::default();
        if !text.is_empty() {
            t.tokens.push(Token::Literal(text.to_string()));
        }
        t
    }

    /// Parses template source. `is_var` decides which other control words
    /// name variables; `\<type>name` and `\the<type>` always do.
    pub fn parse(src: &str, is_var: &dyn Fn(&str) -> bool) -> Result<Template, CaptionError> {
        let mut p = Parser { chars: src.chars().collect(), pos: 0, is_var };
        let t = p.sequence(false)?;
        Ok(t)
    }

    /// Highest parameter index used anywhere in the template.
    pub fn max_param(&self) -> u8 {
        self.tokens
            .iter()
            .map(|t| match t {
                Token::Param(n) => *n,
                Token::Llap(i) | Token::MakeBox { inner: i, .. } | Token::Font { inner: i, .. } => i.max_param(),
                Token::BothIfFirst(a, b) | Token::BothIfSecond(a, b) => a.max_param().max(b.max_param()),
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn check_arity(&self, arity: u8) -> Result<(), CaptionError> {
        match self.max_param() {
            n if n > arity => Err(CaptionError::ParamOutOfRange { param: n, arity }),
            _ => Ok(()),
        }
    }

    pub fn contains_line_break(&self) -> bool {
        self.tokens.iter().any(|t| match t {
            Token::LineBreak | Token::Par => true,
            Token::Font { inner, .. } => inner.contains_line_break(),
            Token::BothIfFirst(a, b) | Token::BothIfSecond(a, b) => a.contains_line_break() || b.contains_line_break(),
            _ => false,
        })
    }

    fn push_literal(&mut self, s: &str) {
        if let Some(Token::Literal(prev)) = self.tokens.last_mut() {
            prev.push_str(s);
        } else {
            self.tokens.push(Token::Literal(s.to_string()));
        }
    }
}

fn is_type_var(name: &str) -> bool {
    (name.len() > 4 && name.ends_with("name")) || (name.len() > 3 && name.starts_with("the"))
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    is_var: &'a dyn Fn(&str) -> bool,
}

fn malformed(msg: impl Into<String>) -> CaptionError {
    CaptionError::MalformedTemplate(msg.into())
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn sequence(&mut self, in_group: bool) -> Result<Template, CaptionError> {
        let mut t = Template::default();
        while let Some(c) = self.peek() {
            match c {
                '}' if in_group => return Ok(t),
                '}' => return Err(malformed("unexpected `}'")),
                '{' => {
                    let inner = self.group()?;
                    for tok in inner.tokens {
                        match tok {
                            Token::Literal(s) => t.push_literal(&s),
                            other => t.tokens.push(other),
                        }
                    }
                }
                '#' => {
                    self.pos += 1;
                    match self.peek().and_then(|d| d.to_digit(10)) {
                        Some(d) if d >= 1 => {
                            self.pos += 1;
                            t.tokens.push(Token::Param(d as u8));
                        }
                        _ => return Err(malformed("`#' must be followed by a parameter number")),
                    }
                }
                '~' => {
                    self.pos += 1;
                    t.push_literal(&NBSP.to_string());
                }
                '-' => {
                    let n = self.chars[self.pos..].iter().take(3).take_while(|&&c| c == '-').count();
                    self.pos += n;
                    t.push_literal(match n {
                        1 => "-",
                        2 => "\u{2013}",
                        _ => "\u{2014}",
                    });
                }
                '\\' => self.command(&mut t)?,
                c => {
                    self.pos += 1;
                    t.push_literal(&c.to_string());
                }
            }
        }
        if in_group {
            return Err(malformed("missing `}'"));
        }
        Ok(t)
    }

    fn group(&mut self) -> Result<Template, CaptionError> {
        self.skip_spaces();
        if self.peek() != Some('{') {
            return Err(malformed("expected `{'"));
        }
        self.pos += 1;
        let t = self.sequence(true)?;
        self.pos += 1;
        Ok(t)
    }

    fn skip_spaces(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    /// Raw text of a `{...}` group without interpretation.
    fn raw_group(&mut self) -> Result<String, CaptionError> {
        self.skip_spaces();
        if self.peek() != Some('{') {
            return Err(malformed("expected `{'"));
        }
        self.pos += 1;
        let start = self.pos;
        let mut depth = 1;
        while let Some(c) = self.peek() {
            self.pos += 1;
            match c {
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(self.chars[start..self.pos - 1].iter().collect());
                    }
                }
                _ => {}
            }
        }
        Err(malformed("missing `}'"))
    }

    fn optional(&mut self) -> Result<Option<String>, CaptionError> {
        self.skip_spaces();
        if self.peek() != Some('[') {
            return Ok(None);
        }
        self.pos += 1;
        let start = self.pos;
        while let Some(c) = self.peek() {
            self.pos += 1;
            if c == ']' {
                return Ok(Some(self.chars[start..self.pos - 1].iter().collect()));
            }
        }
        Err(malformed("missing `]'"))
    }

    fn control_word(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn command(&mut self, t: &mut Template) -> Result<(), CaptionError> {
        self.pos += 1;
        let Some(c) = self.peek() else {
            return Err(malformed("trailing `\\'"));
        };
        if !c.is_ascii_alphabetic() {
            self.pos += 1;
            match c {
                '\\' => t.tokens.push(Token::LineBreak),
                '&' | '%' | '#' | '_' | '{' | '}' | '$' => t.push_literal(&c.to_string()),
                ' ' => t.push_literal(" "),
                ',' => t.push_literal(&NBSP.to_string()),
                other => return Err(CaptionError::UnsupportedCommand(other.to_string())),
            }
            return Ok(());
        }
        let name = self.control_word();
        let starred = self.peek() == Some('*');
        if starred && name == "hspace" {
            self.pos += 1;
        }
        // Spaces after a control word are not part of the output.
        let skip_after = |p: &mut Self| p.skip_spaces();
        match name.as_str() {
            "par" => {
                skip_after(self);
                t.tokens.push(Token::Par)
            }
            "hfill" | "hfil" => {
                skip_after(self);
                t.tokens.push(Token::Fill)
            }
            "textbackslash" | "textasciitilde" => {
                skip_after(self);
                t.push_literal(if name == "textbackslash" { "\\" } else { "~" });
            }
            "quad" | "qquad" => {
                skip_after(self);
                let pts = if name == "quad" { 12.0 } else { 24.0 };
                t.tokens.push(Token::HSpace { length: Length::Fixed(Dimension::pt(pts)), starred: false })
            }
            "llap" => {
                let inner = self.group()?;
                t.tokens.push(Token::Llap(inner));
            }
            "hspace" => {
                skip_after(self);
                let length = if self.peek() == Some('\\') {
                    self.pos += 1;
                    let v = self.control_word();
                    skip_after(self);
                    Length::Var(v)
                } else {
                    let raw = self.raw_group()?;
                    let raw = raw.trim();
                    match raw.strip_prefix('\\') {
                        Some(v) if v.chars().all(|c| c.is_ascii_alphabetic()) => Length::Var(v.to_string()),
                        _ => Length::Fixed(parse_dimension(raw)?),
                    }
                };
                if let Length::Var(v) = &length {
                    if !(self.is_var)(v) && !is_type_var(v) {
                        return Err(CaptionError::UnsupportedCommand(v.clone()));
                    }
                }
                t.tokens.push(Token::HSpace { length, starred });
            }
            "makebox" => {
                let width = self.optional()?.map(|w| parse_dimension(&w)).transpose()?;
                let align = match self.optional()?.as_deref().map(str::trim) {
                    None | Some("c") => Align::Center,
                    Some("l") => Align::Left,
                    Some("r") => Align::Right,
                    Some(other) => return Err(malformed(format!("bad \\makebox position `{other}'"))),
                };
                let inner = self.group()?;
                t.tokens.push(Token::MakeBox { width, align, inner });
            }
            "bothIfFirst" | "bothIfSecond" => {
                let a = self.group()?;
                let b = self.group()?;
                t.tokens.push(if name == "bothIfFirst" { Token::BothIfFirst(a, b) } else { Token::BothIfSecond(a, b) });
            }
            n if text_command(n).is_some() => {
                let inner = self.group()?;
                t.tokens.push(Token::Font { command: name, inner });
            }
            n if is_type_var(n) || (self.is_var)(n) => {
                skip_after(self);
                t.tokens.push(Token::Var(name));
            }
            _ => return Err(CaptionError::UnsupportedCommand(name)),
        }
        Ok(())
    }
}

fn escape_literal(s: &str, out: &mut String) {
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            NBSP => out.push('~'),
            '#' | '{' | '}' | '&' | '%' | '_' | '$' => {
                out.push('\\');
                out.push(c);
            }
            '\\' => out.push_str("\\textbackslash{}"),
            '~' => out.push_str("\\textasciitilde{}"),
            '-' if chars.peek() == Some(&'-') => out.push_str("-{}"),
            c => out.push(c),
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_tokens(&self.tokens, &mut out);
        f.write_str(&out)
    }
}

fn write_group(t: &Template, out: &mut String) {
    out.push('{');
    write_tokens(&t.tokens, out);
    out.push('}');
}

fn write_tokens(tokens: &[Token], out: &mut String) {
    // A control word directly followed by a letter or space needs a `{}`
    // terminator, otherwise reparsing would merge or drop characters.
    let mut open_word = false;
    for tok in tokens {
        if open_word {
            if let Token::Literal(s) = tok {
                if s.starts_with(|c: char| c.is_ascii_alphabetic() || c.is_whitespace()) {
                    out.push_str("{}");
                }
            }
        }
        open_word = false;
        match tok {
            Token::Literal(s) => escape_literal(s, out),
            Token::Param(n) => {
                out.push('#');
                out.push_str(&n.to_string());
            }
            Token::LineBreak => out.push_str("\\\\"),
            Token::Par => {
                out.push_str("\\par");
                open_word = true;
            }
            Token::Fill => {
                out.push_str("\\hfill");
                open_word = true;
            }
            Token::Llap(inner) => {
                out.push_str("\\llap");
                write_group(inner, out);
            }
            Token::HSpace { length, starred } => {
                out.push_str("\\hspace");
                if *starred {
                    out.push('*');
                }
                match length {
                    Length::Fixed(d) => {
                        out.push('{');
                        out.push_str(&d.to_string());
                        out.push('}');
                    }
                    Length::Var(v) => {
                        out.push_str("{\\");
                        out.push_str(v);
                        out.push('}');
                    }
                }
            }
            Token::MakeBox { width, align, inner } => {
                out.push_str("\\makebox");
                if let Some(w) = width {
                    out.push_str(&format!("[{w}]"));
                }
                out.push_str(&format!("[{}]", align.letter()));
                write_group(inner, out);
            }
            Token::Var(v) => {
                out.push('\\');
                out.push_str(v);
                open_word = true;
            }
            Token::BothIfFirst(a, b) | Token::BothIfSecond(a, b) => {
                out.push_str(if matches!(tok, Token::BothIfFirst(..)) { "\\bothIfFirst" } else { "\\bothIfSecond" });
                write_group(a, out);
                write_group(b, out);
            }
            Token::Font { command, inner } => {
                out.push('\\');
                out.push_str(command);
                write_group(inner, out);
            }
        }
    }
}

/// Values of template variables.
#[derive(Debug, Clone, PartialEq)]
pub enum VarValue {
    Length(Dimension),
    Text(String),
}

pub type VarEnv = BTreeMap<String, VarValue>;

/// Output of template evaluation, consumed by layout.
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Text { text: String, font: FontSpec },
    Space(Dimension),
    Fill,
    LineBreak,
    ParBreak,
    Llap(Vec<Piece>),
    MakeBox { width: Option<Dimension>, align: Align, pieces: Vec<Piece> },
}

pub type StyledText = Vec<Piece>;

pub fn plain(text: &str) -> StyledText {
    if text.is_empty() {
        Vec::new()
    } else {
        vec![Piece::Text { text: text.to_string(), font: FontSpec::default() }]
    }
}

/// True when the pieces produce no visible material.
pub fn is_blank(pieces: &[Piece]) -> bool {
    pieces.iter().all(|p| matches!(p, Piece::Text { text, .. } if text.is_empty()))
}

/// Flattens pieces into a readable string with markers for non-text items.
pub fn debug_string(pieces: &[Piece]) -> String {
    let mut s = String::new();
    for p in pieces {
        match p {
            Piece::Text { text, .. } => s.push_str(text),
            Piece::Space(d) => s.push_str(&format!("⟨space {d}⟩")),
            Piece::Fill => s.push_str("⟨fill⟩"),
            Piece::LineBreak => s.push_str("⟨br⟩"),
            Piece::ParBreak => s.push_str("⟨par⟩"),
            Piece::Llap(inner) => s.push_str(&format!("⟨llap {}⟩", debug_string(inner))),
            Piece::MakeBox { pieces, .. } => s.push_str(&format!("⟨box {}⟩", debug_string(pieces))),
        }
    }
    s
}

/// Text content only, with non-breaking spaces shown as spaces.
pub fn text_content(pieces: &[Piece]) -> String {
    let mut s = String::new();
    for p in pieces {
        match p {
            Piece::Text { text, .. } => s.extend(text.chars().map(|c| if c == NBSP { ' ' } else { c })),
            Piece::Llap(inner) | Piece::MakeBox { pieces: inner, .. } => s.push_str(&text_content(inner)),
            _ => {}
        }
    }
    s
}

pub fn apply_font(pieces: &mut [Piece], outer: &FontSpec) {
    if outer.is_empty() {
        return;
    }
    for p in pieces {
        match p {
            Piece::Text { font, .. } => *font = outer.merge(font),
            Piece::Llap(inner) | Piece::MakeBox { pieces: inner, .. } => apply_font(inner, outer),
            _ => {}
        }
    }
}

pub fn both_if_first(a: &str, b: &str) -> String {
    if a.is_empty() {
        String::new()
    } else {
        format!("{a}{b}")
    }
}

pub fn both_if_second(a: &str, b: &str) -> String {
    if b.is_empty() {
        String::new()
    } else {
        format!("{a}{b}")
    }
}

/// Substitutes arguments and variables into a template.
pub fn eval_template(t: &Template, args: &[StyledText], vars: &VarEnv) -> Result<StyledText, CaptionError> {
    let mut out = Vec::new();
    for tok in &t.tokens {
        match tok {
            Token::Literal(s) => out.extend(plain(s)),
            Token::Param(n) => {
                if let Some(a) = args.get(usize::from(*n) - 1) {
                    out.extend(a.iter().cloned());
                }
            }
            Token::LineBreak => out.push(Piece::LineBreak),
            Token::Par => out.push(Piece::ParBreak),
            Token::Fill => out.push(Piece::Fill),
            Token::Llap(inner) => out.push(Piece::Llap(eval_template(inner, args, vars)?)),
            Token::HSpace { length, .. } => out.push(Piece::Space(resolve_length(length, vars)?)),
            Token::MakeBox { width, align, inner } => {
                out.push(Piece::MakeBox { width: *width, align: *align, pieces: eval_template(inner, args, vars)? })
            }
            Token::Var(name) => match vars.get(name) {
                Some(VarValue::Text(s)) => out.extend(plain(s)),
                Some(VarValue::Length(d)) => out.extend(plain(&d.to_string())),
                None => return Err(CaptionError::UnboundVariable(name.clone())),
            },
            Token::BothIfFirst(a, b) => {
                let first = eval_template(a, args, vars)?;
                if !is_blank(&first) {
                    out.extend(first);
                    out.extend(eval_template(b, args, vars)?);
                }
            }
            Token::BothIfSecond(a, b) => {
                let second = eval_template(b, args, vars)?;
                if !is_blank(&second) {
                    out.extend(eval_template(a, args, vars)?);
                    out.extend(second);
                }
            }
            Token::Font { command, inner } => {
                let mut pieces = eval_template(inner, args, vars)?;
                let spec = text_command(command).unwrap_or_default();
                apply_font(&mut pieces, &spec);
                out.extend(pieces);
            }
        }
    }
    Ok(out)
}

fn resolve_length(length: &Length, vars: &VarEnv) -> Result<Dimension, CaptionError> {
    match length {
        Length::Fixed(d) => Ok(*d),
        Length::Var(name) => match vars.get(name) {
            Some(VarValue::Length(d)) => Ok(*d),
            Some(VarValue::Text(s)) => parse_dimension(s),
            None => Err(CaptionError::UnboundVariable(name.clone())),
        },
    }
}
