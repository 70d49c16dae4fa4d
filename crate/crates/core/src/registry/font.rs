//! Font attributes. Fonts never change cell widths; they travel with the
//! text as annotations.

use std::fmt;

use crate::diag::CaptionError;
use crate::optparse::{parse_option_list, OptionList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Size {
    Scriptsize,
    Footnotesize,
    Small,
    Normalsize,
    Large,
    LargeCap,
}

impl Size {
    pub const ALL: [Size; 6] =
        [Size::Scriptsize, Size::Footnotesize, Size::Small, Size::Normalsize, Size::Large, Size::LargeCap];

    pub fn name(self) -> &'static str {
        match self {
            Size::Scriptsize => "scriptsize",
            Size::Footnotesize => "footnotesize",
            Size::Small => "small",
            Size::Normalsize => "normalsize",
            Size::Large => "large",
            Size::LargeCap => "Large",
        }
    }

    pub fn from_name(name: &str) -> Option<Size> {
        Size::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Series {
    Md,
    Bf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Up,
    It,
    Sl,
    Sc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Rm,
    Sf,
    Tt,
}

impl Series {
    fn name(self) -> &'static str {
        match self {
            Series::Md => "md",
            Series::Bf => "bf",
        }
    }
}

impl Shape {
    fn name(self) -> &'static str {
        match self {
            Shape::Up => "up",
            Shape::It => "it",
            Shape::Sl => "sl",
            Shape::Sc => "sc",
        }
    }
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Rm => "rm",
            Family::Sf => "sf",
            Family::Tt => "tt",
        }
    }
}

/// A partial font description. Unset attributes inherit from the
/// surrounding font; the reset flags clear inherited attributes first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FontSpec {
    pub size: Option<Size>,
    pub series: Option<Series>,
    pub shape: Option<Shape>,
    pub family: Option<Family>,
    pub color: Option<String>,
    pub stretch: Option<f64>,
    /// `normalfont`: drop inherited series, shape and family.
    pub reset_font: bool,
    /// `normalcolor`: drop the inherited color.
    pub reset_color: bool,
}

impl FontSpec {
    pub fn is_empty(&self) -> bool {
        *self == FontSpec::default()
    }

    /// The `normal` bundle: normalcolor, normalfont, normalsize, singlespacing.
    pub fn normal() -> Self {
        FontSpec {
            size: Some(Size::Normalsize),
            stretch: Some(1.0),
            reset_font: true,
            reset_color: true,
            ..FontSpec::default()
        }
    }

    /// `b` applied on top of `self`.
    pub fn merge(&self, b: &FontSpec) -> FontSpec {
        let mut out = self.clone();
        if b.reset_font {
            out.series = None;
            out.shape = None;
            out.family = None;
            out.reset_font = true;
        }
        if b.reset_color {
            out.color = None;
            out.reset_color = true;
        }
        out.size = b.size.or(out.size);
        out.series = b.series.or(out.series);
        out.shape = b.shape.or(out.shape);
        out.family = b.family.or(out.family);
        out.stretch = b.stretch.or(out.stretch);
        if b.color.is_some() {
            out.color = b.color.clone();
        }
        out
    }

    /// Effective line-spacing factor.
    pub fn line_stretch(&self) -> f64 {
        self.stretch.unwrap_or(1.0)
    }

    /// Compact attribute list used by annotated output, e.g. `small,bf`.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        if let Some(s) = self.size {
            parts.push(s.name().into());
        }
        if let Some(f) = self.family {
            parts.push(f.name().into());
        }
        if let Some(s) = self.series {
            parts.push(s.name().into());
        }
        if let Some(s) = self.shape {
            parts.push(s.name().into());
        }
        if let Some(c) = &self.color {
            parts.push(format!("color={c}"));
        }
        if let Some(st) = self.stretch {
            if st != 1.0 {
                parts.push(format!("stretch={st}"));
            }
        }
        parts.join(",")
    }
}

impl fmt::Display for FontSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// A named font option. Parametrized entries take their value from
/// `name=value` and substitute it into the color or stretch slot.
#[derive(Debug, Clone, PartialEq)]
pub struct FontDef {
    pub spec: FontSpec,
    pub param: Option<FontParam>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FontParam {
    Color,
    Stretch,
}

impl FontDef {
    pub fn fixed(spec: FontSpec) -> Self {
        FontDef { spec, param: None }
    }

    /// Instantiates the definition with an optional `=value` argument.
    pub fn instantiate(&self, name: &str, value: Option<&str>) -> Result<FontSpec, CaptionError> {
        let mut spec = self.spec.clone();
        match (self.param, value) {
            (None, None) => {}
            (None, Some(_)) => return Err(CaptionError::UndefinedFont(format!("{name}={}", value.unwrap_or("")))),
            (Some(_), None) => return Err(CaptionError::MissingValue(name.to_string())),
            (Some(FontParam::Color), Some(v)) => spec.color = Some(v.trim().to_string()),
            (Some(FontParam::Stretch), Some(v)) => spec.stretch = Some(parse_stretch(v)?),
        }
        Ok(spec)
    }
}

fn parse_stretch(v: &str) -> Result<f64, CaptionError> {
    match v.trim().parse::<f64>() {
        Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
        _ => Err(CaptionError::BadDimension(v.to_string())),
    }
}

pub(crate) fn builtin_fonts() -> Vec<(String, FontDef)> {
    let mut out = Vec::new();
    let mut add = |name: &str, spec: FontSpec| out.push((name.to_string(), FontDef::fixed(spec)));
    for s in Size::ALL {
        add(s.name(), FontSpec { size: Some(s), ..FontSpec::default() });
    }
    add("normalfont", FontSpec { reset_font: true, ..FontSpec::default() });
    for (n, sh) in [("up", Shape::Up), ("it", Shape::It), ("sl", Shape::Sl), ("sc", Shape::Sc)] {
        add(n, FontSpec { shape: Some(sh), ..FontSpec::default() });
    }
    for (n, se) in [("md", Series::Md), ("bf", Series::Bf)] {
        add(n, FontSpec { series: Some(se), ..FontSpec::default() });
    }
    for (n, fa) in [("rm", Family::Rm), ("sf", Family::Sf), ("tt", Family::Tt)] {
        add(n, FontSpec { family: Some(fa), ..FontSpec::default() });
    }
    for (n, st) in [("singlespacing", 1.0), ("onehalfspacing", 1.5), ("doublespacing", 2.0)] {
        add(n, FontSpec { stretch: Some(st), ..FontSpec::default() });
    }
    add("normalcolor", FontSpec { reset_color: true, ..FontSpec::default() });
    add("normal", FontSpec::normal());
    out.push(("color".into(), FontDef { spec: FontSpec::default(), param: Some(FontParam::Color) }));
    out.push(("stretch".into(), FontDef { spec: FontSpec::default(), param: Some(FontParam::Stretch) }));
    out
}

/// Parses the body of a font declaration. Accepts either a sequence of
/// font switches (`\small\bfseries`, `\color{red}`, `\setstretch{#1}`)
/// or an option list of already known font names (`{small,bf}`).
pub fn parse_font_code(code: &str, lookup: &dyn Fn(&str) -> Option<FontDef>) -> Result<FontDef, CaptionError> {
    let code = code.trim();
    if !code.starts_with('\\') {
        let list: OptionList = parse_option_list(code)?;
        let mut spec = FontSpec::default();
        for e in &list {
            let def = lookup(&e.key).ok_or_else(|| CaptionError::UndefinedFont(e.key.clone()))?;
            spec = spec.merge(&def.instantiate(&e.key, e.value.as_deref())?);
        }
        return Ok(FontDef::fixed(spec));
    }
    let mut spec = FontSpec::default();
    let mut param = None;
    let mut rest = code;
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('\\')
            .ok_or_else(|| CaptionError::MalformedTemplate(format!("unexpected text `{rest}'")))?;
        let name_len = body.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(body.len());
        let name = &body[..name_len];
        rest = body[name_len..].trim_start();
        let arg = if name == "color" || name == "setstretch" {
            let (arg, after) = take_group(rest)
                .ok_or_else(|| CaptionError::MalformedTemplate(format!("\\{name} needs an argument")))?;
            rest = after.trim_start();
            Some(arg)
        } else {
            None
        };
        let piece = match (name, arg) {
            ("color", Some("#1")) => {
                param = Some(FontParam::Color);
                FontSpec::default()
            }
            ("color", Some(c)) => FontSpec { color: Some(c.trim().to_string()), ..FontSpec::default() },
            ("setstretch", Some("#1")) => {
                param = Some(FontParam::Stretch);
                FontSpec::default()
            }
            ("setstretch", Some(v)) => FontSpec { stretch: Some(parse_stretch(v)?), ..FontSpec::default() },
            (n, _) => font_switch(n).ok_or_else(|| CaptionError::UnsupportedCommand(n.to_string()))?,
        };
        spec = spec.merge(&piece);
    }
    Ok(FontDef { spec, param })
}

fn take_group(s: &str) -> Option<(&str, &str)> {
    let s = s.strip_prefix('{')?;
    let mut depth = 1usize;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some((&s[..i], &s[i + 1..]));
                }
            }
            _ => {}
        }
    }
    None
}

/// Declaration-style switches such as `\bfseries`.
fn font_switch(name: &str) -> Option<FontSpec> {
    let d = FontSpec::default();
    Some(match name {
        "normalfont" => FontSpec { reset_font: true, ..d },
        "normalcolor" => FontSpec { reset_color: true, ..d },
        "upshape" => FontSpec { shape: Some(Shape::Up), ..d },
        "itshape" => FontSpec { shape: Some(Shape::It), ..d },
        "slshape" => FontSpec { shape: Some(Shape::Sl), ..d },
        "scshape" => FontSpec { shape: Some(Shape::Sc), ..d },
        "mdseries" => FontSpec { series: Some(Series::Md), ..d },
        "bfseries" => FontSpec { series: Some(Series::Bf), ..d },
        "rmfamily" => FontSpec { family: Some(Family::Rm), ..d },
        "sffamily" => FontSpec { family: Some(Family::Sf), ..d },
        "ttfamily" => FontSpec { family: Some(Family::Tt), ..d },
        "singlespacing" => FontSpec { stretch: Some(1.0), ..d },
        "onehalfspacing" => FontSpec { stretch: Some(1.5), ..d },
        "doublespacing" => FontSpec { stretch: Some(2.0), ..d },
        n => FontSpec { size: Some(Size::from_name(n)?), ..d },
    })
}

/// Font implied by a `\textXX{...}` or `\emph{...}` template command.
pub(crate) fn text_command(name: &str) -> Option<FontSpec> {
    let d = FontSpec::default();
    Some(match name {
        "textbf" => FontSpec { series: Some(Series::Bf), ..d },
        "textmd" => FontSpec { series: Some(Series::Md), ..d },
        "textit" | "emph" => FontSpec { shape: Some(Shape::It), ..d },
        "textsl" => FontSpec { shape: Some(Shape::Sl), ..d },
        "textsc" => FontSpec { shape: Some(Shape::Sc), ..d },
        "textup" => FontSpec { shape: Some(Shape::Up), ..d },
        "textrm" => FontSpec { family: Some(Family::Rm), ..d },
        "textsf" => FontSpec { family: Some(Family::Sf), ..d },
        "texttt" => FontSpec { family: Some(Family::Tt), ..d },
        _ => return None,
    })
}
