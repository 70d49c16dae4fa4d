//! Diagnostics: every error and warning the engine can raise, and the
//! catalog of their message templates.
//!
//! Entries marked [`Origin::Upstream`] use the exact wording of the LaTeX
//! caption package; [`Origin::Extension`] entries are specific to this engine.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// Errors. The `Display` text is the exact catalog message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaptionError {
    #[error("Unbalanced braces at position {0}.")]
    UnbalancedBraces(usize),
    #[error("Empty key at position {0}.")]
    EmptyKey(usize),
    #[error("Bad dimension `{0}'.")]
    BadDimension(String),
    #[error("Undefined boolean value `{0}'.")]
    UndefinedBooleanValue(String),
    #[error("Undefined format `{0}'.")]
    UndefinedFormat(String),
    #[error("Undefined label format `{0}'.")]
    UndefinedLabelFormat(String),
    #[error("Undefined label separator `{0}'.")]
    UndefinedLabelSeparator(String),
    #[error("Undefined list format `{0}'.")]
    UndefinedListFormat(String),
    #[error("Undefined position `{0}'.")]
    UndefinedPosition(String),
    #[error("Undefined style `{0}'.")]
    UndefinedStyle(String),
    #[error("Undefined text format `{0}'.")]
    UndefinedTextFormat(String),
    #[error("Undefined justification `{0}'.")]
    UndefinedJustification(String),
    #[error("Undefined font `{0}'.")]
    UndefinedFont(String),
    #[error("Unknown option `{0}'.")]
    UnknownOption(String),
    #[error("Option `{0}' requires a value.")]
    MissingValue(String),
    #[error("The option `skip={0}' must not be negative.")]
    NegativeSkip(String),
    #[error("`{0}' is not a legacy option.")]
    NotLegacy(String),
    #[error("Undefined variable `{0}'.")]
    UnboundVariable(String),
    #[error("Unsupported control sequence `\\{0}' in template.")]
    UnsupportedCommand(String),
    #[error("Malformed template: {0}.")]
    MalformedTemplate(String),
    #[error("Parameter #{param} exceeds the {arity} argument(s) of this template.")]
    ParamOutOfRange { param: u8, arity: u8 },
    #[error("Word `{word}' does not fit into {width} cell(s).")]
    WordTooWide { word: String, width: usize },
    #[error("The option `labelsep={0}' does not work with `format=hang'.")]
    LabelsepIncompatible(String),
    #[error("\\caption outside float.")]
    CaptionOutsideFloat,
    #[error("\\ContinuedFloat outside float.")]
    ContinuedOutsideFloat,
    #[error("Continued `{current}' after `{previous}'.")]
    ContinuedAfterOtherType { current: String, previous: String },
    #[error("No float type '{0}' defined.")]
    NoFloatType(String),
    #[error("Float `{inner}' opened inside `{outer}'.")]
    NestedFloat { inner: String, outer: String },
    #[error("No open float or group to end.")]
    NothingToEnd,
}

impl CaptionError {
    pub fn code(&self) -> &'static str {
        use CaptionError::*;
        match self {
            UnbalancedBraces(_) => "unbalanced-braces",
            EmptyKey(_) => "empty-key",
            BadDimension(_) => "bad-dimension",
            UndefinedBooleanValue(_) => "undefined-boolean",
            UndefinedFormat(_) => "undefined-format",
            UndefinedLabelFormat(_) => "undefined-label-format",
            UndefinedLabelSeparator(_) => "undefined-label-separator",
            UndefinedListFormat(_) => "undefined-list-format",
            UndefinedPosition(_) => "undefined-position",
            UndefinedStyle(_) => "undefined-style",
            UndefinedTextFormat(_) => "undefined-text-format",
            UndefinedJustification(_) => "undefined-justification",
            UndefinedFont(_) => "undefined-font",
            UnknownOption(_) => "unknown-option",
            MissingValue(_) => "missing-value",
            NegativeSkip(_) => "negative-skip",
            NotLegacy(_) => "not-legacy",
            UnboundVariable(_) => "unbound-variable",
            UnsupportedCommand(_) => "unsupported-command",
            MalformedTemplate(_) => "malformed-template",
            ParamOutOfRange { .. } => "param-out-of-range",
            WordTooWide { .. } => "word-too-wide",
            LabelsepIncompatible(_) => "labelsep-incompatible",
            CaptionOutsideFloat => "caption-outside-float",
            ContinuedOutsideFloat => "continued-outside-float",
            ContinuedAfterOtherType { .. } => "continued-after-other-type",
            NoFloatType(_) => "no-float-type",
            NestedFloat { .. } => "nested-float",
            NothingToEnd => "nothing-to-end",
        }
    }
}

/// Warnings. The `Display` text is the exact catalog message.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CaptionWarning {
    #[error("Option `{option}' was not in list `{list}'.")]
    NotInList { option: String, list: String },
    #[error("Option list `{0}' undefined.")]
    ListUndefined(String),
    #[error("Unused \\captionsetup[{0}].")]
    UnusedSetup(String),
    #[error("`ragged2e' package not loaded, therefore substituting \\raggedright for \\RaggedRight.")]
    RaggedRightSubstituted,
    #[error("The caption type was already set to `{0}'.")]
    TypeAlreadySet(String),
}

impl CaptionWarning {
    pub fn code(&self) -> &'static str {
        use CaptionWarning::*;
        match self {
            NotInList { .. } => "not-in-list",
            ListUndefined(_) => "list-undefined",
            UnusedSetup(_) => "unused-setup",
            RaggedRightSubstituted => "ragged-right-substituted",
            TypeAlreadySet(_) => "type-already-set",
        }
    }
}

/// A rendered diagnostic, optionally tied to a scenario line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub line: Option<usize>,
}

impl Diagnostic {
    pub fn at_line(mut self, line: usize) -> Self {
        self.line.get_or_insert(line);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl From<CaptionError> for Diagnostic {
    fn from(e: CaptionError) -> Self {
        Diagnostic { severity: Severity::Error, code: e.code(), message: e.to_string(), line: None }
    }
}

impl From<CaptionWarning> for Diagnostic {
    fn from(w: CaptionWarning) -> Self {
        Diagnostic { severity: Severity::Warning, code: w.code(), message: w.to_string(), line: None }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        write!(f, "{}[{}]: {}", self.severity, self.code, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Upstream,
    Extension,
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub code: &'static str,
    pub severity: Severity,
    pub origin: Origin,
    /// Message text; each `<name>` is a placeholder.
    pub template: &'static str,
}

const fn entry(code: &'static str, severity: Severity, origin: Origin, template: &'static str) -> CatalogEntry {
    CatalogEntry { code, severity, origin, template }
}

use Origin::{Extension as X, Upstream as M};
use Severity::{Error as E, Warning as W};

pub const CATALOG: &[CatalogEntry] = &[
    entry("not-in-list", W, M, "Option `<option>' was not in list `<option list>'."),
    entry("list-undefined", W, M, "Option list `<option list>' undefined."),
    entry("unused-setup", W, M, "Unused \\captionsetup[<type>]."),
    entry(
        "ragged-right-substituted",
        W,
        M,
        "`ragged2e' package not loaded, therefore substituting \\raggedright for \\RaggedRight.",
    ),
    entry("type-already-set", W, M, "The caption type was already set to `<type>'."),
    entry("caption-outside-float", E, M, "\\caption outside float."),
    entry("continued-outside-float", E, M, "\\ContinuedFloat outside float."),
    entry("continued-after-other-type", E, M, "Continued `<type>' after `<type>'."),
    entry("no-float-type", E, M, "No float type '<type>' defined."),
    entry("labelsep-incompatible", E, M, "The option `labelsep=<name>' does not work with `format=hang'."),
    entry("undefined-boolean", E, M, "Undefined boolean value `<value>'."),
    entry("undefined-format", E, M, "Undefined format `<name>'."),
    entry("undefined-label-format", E, M, "Undefined label format `<name>'."),
    entry("undefined-label-separator", E, M, "Undefined label separator `<name>'."),
    entry("undefined-list-format", E, M, "Undefined list format `<name>'."),
    entry("undefined-position", E, M, "Undefined position `<name>'."),
    entry("undefined-style", E, M, "Undefined style `<name>'."),
    entry("undefined-text-format", E, M, "Undefined text format `<name>'."),
    entry("undefined-justification", E, X, "Undefined justification `<name>'."),
    entry("undefined-font", E, X, "Undefined font `<name>'."),
    entry("unknown-option", E, X, "Unknown option `<key>'."),
    entry("missing-value", E, X, "Option `<key>' requires a value."),
    entry("negative-skip", E, X, "The option `skip=<value>' must not be negative."),
    entry("not-legacy", E, X, "`<key>' is not a legacy option."),
    entry("unbound-variable", E, X, "Undefined variable `<name>'."),
    entry("unsupported-command", E, X, "Unsupported control sequence `\\<name>' in template."),
    entry("malformed-template", E, X, "Malformed template: <reason>."),
    entry("param-out-of-range", E, X, "Parameter #<n> exceeds the <arity> argument(s) of this template."),
    entry("word-too-wide", E, X, "Word `<word>' does not fit into <width> cell(s)."),
    entry("unbalanced-braces", E, X, "Unbalanced braces at position <n>."),
    entry("empty-key", E, X, "Empty key at position <n>."),
    entry("bad-dimension", E, X, "Bad dimension `<text>'."),
    entry("nested-float", E, X, "Float `<type>' opened inside `<type>'."),
    entry("nothing-to-end", E, X, "No open float or group to end."),
];

pub fn catalog_entry(code: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.code == code)
}
