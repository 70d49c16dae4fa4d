//! Named, user-extensible tables: formats, label formats, separators, text
//! formats, justifications, fonts, styles, list formats, custom options and
//! float types.

pub mod font;
pub mod template;

use std::collections::BTreeMap;

use crate::diag::CaptionError;
use crate::optparse::{parse_option_list, OptionList};
pub use font::{FontDef, FontSpec};
pub use template::{Piece, StyledText, Template, VarEnv, VarValue};

/// Expansion of the `base` style.
pub const BASE_STYLE: &str = "format=plain,labelformat=default,labelsep=colon,justification=justified,\
font={},labelfont={},textfont={},margin=0pt,indention=0pt,parindent=0pt,hangindent=0pt,singlelinecheck=true";

/// Expansion of the `default` style.
pub const DEFAULT_STYLE: &str = "format=default,labelformat=default,labelsep=default,justification=default,\
font=default,labelfont=default,textfont=default,margin=0pt,indention=0pt,parindent=0pt,hangindent=0pt,\
singlelinecheck=true";

/// Overrides applied to single-line captions by both predefined styles.
pub const SINGLELINE_OVERRIDES: &str = "justification=centering,indention=0pt";

#[derive(Debug, Clone, PartialEq)]
pub struct FormatDef {
    pub template: Template,
    /// Declared with the starred form; `indention` does not apply.
    pub vertical: bool,
    /// Continuation lines hang under the text.
    pub hang: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatorDef {
    pub template: Template,
    /// Declared with the starred form: not set in the label font.
    pub exempt_from_labelfont: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Justify {
    Justified,
    Centering,
    CenterLast,
    CenterFirst,
    RaggedRight,
    RaggedLeft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JustificationDef {
    pub mode: Justify,
    /// Stands in for an unavailable variant and warns when used.
    pub substitute: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StyleDef {
    pub options: OptionList,
    pub singleline: OptionList,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Length,
    Text,
}

/// A user option that stores its value into a template variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CustomOption {
    pub var: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FloatTypeDef {
    pub name: String,
    pub display_name: String,
    pub list_heading: String,
    pub within: Option<String>,
}

/// What the `default` value of each key means for a document class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassProfile {
    pub name: &'static str,
    pub format: &'static str,
    pub labelformat: &'static str,
    pub labelsep: &'static str,
    pub textformat: &'static str,
    pub justification: &'static str,
    pub listformat: &'static str,
    pub font: &'static str,
    pub labelfont: &'static str,
    pub textfont: &'static str,
}

impl ClassProfile {
    pub const STANDARD: ClassProfile = ClassProfile {
        name: "standard",
        format: "plain",
        labelformat: "simple",
        labelsep: "colon",
        textformat: "simple",
        justification: "justified",
        listformat: "subsimple",
        font: "",
        labelfont: "",
        textfont: "",
    };
}

#[derive(Debug, Clone)]
pub struct Registries {
    pub formats: BTreeMap<String, FormatDef>,
    pub label_formats: BTreeMap<String, Template>,
    pub label_separators: BTreeMap<String, SeparatorDef>,
    pub text_formats: BTreeMap<String, Template>,
    pub justifications: BTreeMap<String, JustificationDef>,
    pub fonts: BTreeMap<String, FontDef>,
    pub styles: BTreeMap<String, StyleDef>,
    pub list_formats: BTreeMap<String, Template>,
    pub custom_options: BTreeMap<String, CustomOption>,
    pub float_types: BTreeMap<String, FloatTypeDef>,
    pub profile: ClassProfile,
}

fn no_vars(_: &str) -> bool {
    false
}

fn builtin(src: &str) -> Template {
    Template::parse(src, &no_vars).expect("built-in template")
}

impl Default for Registries {
    fn default() -> Self {
        Self::builtin()
    }
}

impl Registries {
    /// All predefined entries under the standard-classes profile.
    pub fn builtin() -> Self {
        let mut r = Registries {
            formats: BTreeMap::new(),
            label_formats: BTreeMap::new(),
            label_separators: BTreeMap::new(),
            text_formats: BTreeMap::new(),
            justifications: BTreeMap::new(),
            fonts: font::builtin_fonts().into_iter().collect(),
            styles: BTreeMap::new(),
            list_formats: BTreeMap::new(),
            custom_options: BTreeMap::new(),
            float_types: BTreeMap::new(),
            profile: ClassProfile::STANDARD,
        };
        r.formats.insert("plain".into(), FormatDef { template: builtin("#1#2#3\\par"), vertical: false, hang: false });
        r.formats.insert("hang".into(), FormatDef { template: builtin("#1#2#3\\par"), vertical: false, hang: true });
        for (name, src) in [
            ("empty", ""),
            ("simple", "\\bothIfFirst{#1}{~}#2"),
            ("brace", "\\bothIfFirst{#1}{~}#2)"),
            ("parens", "\\bothIfFirst{#1}{~}(#2)"),
        ] {
            r.label_formats.insert(name.into(), builtin(src));
        }
        for (name, src, starred) in [
            ("none", "", false),
            ("colon", ": ", false),
            ("period", ". ", false),
            ("space", " ", false),
            ("quad", "\\quad", true),
            ("newline", "\\\\", true),
            ("endash", " -- ", true),
        ] {
            r.label_separators
                .insert(name.into(), SeparatorDef { template: builtin(src), exempt_from_labelfont: starred });
        }
        r.text_formats.insert("simple".into(), builtin("#1"));
        r.text_formats.insert("period".into(), builtin("#1."));
        for (name, mode, substitute) in [
            ("justified", Justify::Justified, false),
            ("centering", Justify::Centering, false),
            ("centerlast", Justify::CenterLast, false),
            ("centerfirst", Justify::CenterFirst, false),
            ("raggedright", Justify::RaggedRight, false),
            ("RaggedRight", Justify::RaggedRight, true),
            ("raggedleft", Justify::RaggedLeft, false),
        ] {
            r.justifications.insert(name.into(), JustificationDef { mode, substitute });
        }
        for (name, src) in
            [("empty", ""), ("simple", "#1#2"), ("parens", "#1(#2)"), ("subsimple", "#2"), ("subparens", "(#2)")]
        {
            r.list_formats.insert(name.into(), builtin(src));
        }
        let singleline = parse_option_list(SINGLELINE_OVERRIDES).expect("built-in options");
        for (name, src) in [("base", BASE_STYLE), ("default", DEFAULT_STYLE)] {
            let options = parse_option_list(src).expect("built-in options");
            r.styles.insert(name.into(), StyleDef { options, singleline: singleline.clone() });
        }
        r.declare_type("figure", None, None, None);
        r.declare_type("table", None, None, None);
        r
    }

    fn is_custom_var(&self, name: &str) -> bool {
        self.custom_options.values().any(|o| o.var == name)
    }

    fn parse_template(&self, src: &str, arity: u8) -> Result<Template, CaptionError> {
        let t = Template::parse(src, &|n| self.is_custom_var(n))?;
        t.check_arity(arity)?;
        Ok(t)
    }

    pub fn declare_format(&mut self, name: &str, src: &str, vertical: bool) -> Result<(), CaptionError> {
        let template = self.parse_template(src, 3)?;
        self.formats.insert(name.into(), FormatDef { template, vertical, hang: false });
        Ok(())
    }

    pub fn declare_label_format(&mut self, name: &str, src: &str) -> Result<(), CaptionError> {
        let t = self.parse_template(src, 2)?;
        self.label_formats.insert(name.into(), t);
        Ok(())
    }

    pub fn declare_text_format(&mut self, name: &str, src: &str) -> Result<(), CaptionError> {
        let t = self.parse_template(src, 1)?;
        self.text_formats.insert(name.into(), t);
        Ok(())
    }

    pub fn declare_label_separator(&mut self, name: &str, src: &str, starred: bool) -> Result<(), CaptionError> {
        let template = self.parse_template(src, 0)?;
        self.label_separators.insert(name.into(), SeparatorDef { template, exempt_from_labelfont: starred });
        Ok(())
    }

    pub fn declare_list_format(&mut self, name: &str, src: &str) -> Result<(), CaptionError> {
        let t = self.parse_template(src, 2)?;
        self.list_formats.insert(name.into(), t);
        Ok(())
    }

    /// Accepts a justification switch (`\raggedright`, `\centering`,
    /// `\centerlast`, ...), an existing justification name, or nothing.
    pub fn declare_justification(&mut self, name: &str, code: &str) -> Result<(), CaptionError> {
        let code = code.trim();
        let def = match code {
            "" | "\\justifying" => JustificationDef { mode: Justify::Justified, substitute: false },
            "\\centering" | "\\Centering" => JustificationDef { mode: Justify::Centering, substitute: false },
            "\\centerlast" => JustificationDef { mode: Justify::CenterLast, substitute: false },
            "\\centerfirst" => JustificationDef { mode: Justify::CenterFirst, substitute: false },
            "\\raggedright" => JustificationDef { mode: Justify::RaggedRight, substitute: false },
            "\\raggedleft" | "\\RaggedLeft" => JustificationDef { mode: Justify::RaggedLeft, substitute: false },
            "\\RaggedRight" => JustificationDef { mode: Justify::RaggedRight, substitute: true },
            other => match other.strip_prefix('\\') {
                Some(cmd) => return Err(CaptionError::UnsupportedCommand(cmd.to_string())),
                None => *self.justification(other)?,
            },
        };
        self.justifications.insert(name.into(), def);
        Ok(())
    }

    pub fn declare_font(&mut self, name: &str, code: &str) -> Result<(), CaptionError> {
        let def = font::parse_font_code(code, &|n| self.fonts.get(n).cloned())?;
        self.fonts.insert(name.into(), def);
        Ok(())
    }

    pub fn declare_style(&mut self, name: &str, singleline: OptionList, options: OptionList) {
        self.styles.insert(name.into(), StyleDef { options, singleline });
    }

    /// `code` is `\setlength\var{#1}` (length), `\def\var{#1}` or
    /// `\renewcommand\var{#1}` (text), or simply `length`/`text`, in which
    /// case the variable shares the option's name.
    pub fn declare_option(&mut self, name: &str, code: &str) -> Result<(), CaptionError> {
        let code = code.trim();
        let opt = match code {
            "length" => CustomOption { var: name.into(), kind: VarKind::Length },
            "text" | "" => CustomOption { var: name.into(), kind: VarKind::Text },
            _ => parse_option_code(code)?,
        };
        self.custom_options.insert(name.into(), opt);
        Ok(())
    }

    pub fn declare_type(&mut self, name: &str, display: Option<&str>, list: Option<&str>, within: Option<&str>) {
        let display_name = display.map(str::to_string).unwrap_or_else(|| capitalize(name));
        let list_heading = list.map(str::to_string).unwrap_or_else(|| format!("List of {display_name}s"));
        let within = within.filter(|w| *w != "none").map(str::to_string);
        self.float_types.insert(name.into(), FloatTypeDef { name: name.into(), display_name, list_heading, within });
    }

    fn resolve_default<'a>(&self, name: &'a str, default: &'static str) -> &'a str {
        if name == "default" {
            default
        } else {
            name
        }
    }

    pub fn format(&self, name: &str) -> Result<&FormatDef, CaptionError> {
        let n = self.resolve_default(name, self.profile.format);
        self.formats.get(n).ok_or_else(|| CaptionError::UndefinedFormat(name.into()))
    }

    pub fn label_format(&self, name: &str) -> Result<&Template, CaptionError> {
        let n = self.resolve_default(name, self.profile.labelformat);
        self.label_formats.get(n).ok_or_else(|| CaptionError::UndefinedLabelFormat(name.into()))
    }

    pub fn label_separator(&self, name: &str) -> Result<&SeparatorDef, CaptionError> {
        let n = self.resolve_default(name, self.profile.labelsep);
        self.label_separators.get(n).ok_or_else(|| CaptionError::UndefinedLabelSeparator(name.into()))
    }

    pub fn text_format(&self, name: &str) -> Result<&Template, CaptionError> {
        let n = self.resolve_default(name, self.profile.textformat);
        self.text_formats.get(n).ok_or_else(|| CaptionError::UndefinedTextFormat(name.into()))
    }

    pub fn justification(&self, name: &str) -> Result<&JustificationDef, CaptionError> {
        let n = self.resolve_default(name, self.profile.justification);
        self.justifications.get(n).ok_or_else(|| CaptionError::UndefinedJustification(name.into()))
    }

    pub fn list_format(&self, name: &str) -> Result<&Template, CaptionError> {
        let n = self.resolve_default(name, self.profile.listformat);
        self.list_formats.get(n).ok_or_else(|| CaptionError::UndefinedListFormat(name.into()))
    }

    pub fn style(&self, name: &str) -> Result<&StyleDef, CaptionError> {
        self.styles.get(name).ok_or_else(|| CaptionError::UndefinedStyle(name.into()))
    }

    pub fn float_type(&self, name: &str) -> Result<&FloatTypeDef, CaptionError> {
        self.float_types.get(name).ok_or_else(|| CaptionError::NoFloatType(name.into()))
    }

    /// Evaluates a font option list such as `{small,bf}` or `{color=blue}`.
    /// `which` selects the class profile entry used for `default`.
    pub fn font_spec(&self, list: &OptionList, which: FontSlot) -> Result<FontSpec, CaptionError> {
        let mut spec = FontSpec::default();
        for e in list {
            let part = if e.key == "default" && e.value.is_none() {
                let src = match which {
                    FontSlot::Caption => self.profile.font,
                    FontSlot::Label => self.profile.labelfont,
                    FontSlot::Text => self.profile.textfont,
                };
                self.font_spec(&parse_option_list(src)?, which)?
            } else {
                let def = self.fonts.get(&e.key).ok_or_else(|| CaptionError::UndefinedFont(e.key.clone()))?;
                def.instantiate(&e.key, e.value.as_deref())?
            };
            spec = spec.merge(&part);
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FontSlot {
    Caption,
    Label,
    Text,
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn parse_option_code(code: &str) -> Result<CustomOption, CaptionError> {
    let bad = || CaptionError::MalformedTemplate(format!("unsupported option code `{code}'"));
    let (cmd, rest) = code
        .strip_prefix('\\')
        .map(|c| {
            let n = c.find(|ch: char| !ch.is_ascii_alphabetic()).unwrap_or(c.len());
            (&c[..n], c[n..].trim_start())
        })
        .ok_or_else(bad)?;
    let kind = match cmd {
        "setlength" => VarKind::Length,
        "def" | "renewcommand" | "newcommand" => VarKind::Text,
        other => return Err(CaptionError::UnsupportedCommand(other.into())),
    };
    // Variable either bare (`\x{#1}`) or braced (`{\x}{#1}`).
    let rest = rest.strip_prefix('{').unwrap_or(rest);
    let rest = rest.strip_prefix('\\').ok_or_else(bad)?;
    let n = rest.find(|ch: char| !ch.is_ascii_alphabetic()).unwrap_or(rest.len());
    let var = &rest[..n];
    let tail: String = rest[n..].chars().filter(|c| !c.is_whitespace()).collect();
    if var.is_empty() || !(tail == "{#1}" || tail == "}{#1}") {
        return Err(bad());
    }
    Ok(CustomOption { var: var.into(), kind })
}
