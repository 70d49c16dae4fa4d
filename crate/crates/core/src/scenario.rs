//! Scenario files: a line-oriented script of caption commands.
//!
//! Each directive is a verb followed by arguments. Arguments are bare
//! words, `"double quoted"` strings (only `\"` is an escape), `'single
//! quoted'` strings, `{braced}` groups and `[optional]` groups. Quoted and
//! braced arguments may span lines. Lines starting with `#` are comments.
//!
//! ```text
//! usepackage {margin=10pt,font=small,labelfont=bf}
//! begin figure
//! content
//! caption [Short entry] "A long caption.\par Second paragraph."
//! end
//! listof figure
//! ```

use std::fmt;

use crate::diag::{CaptionError, Diagnostic};
use crate::document::{CaptionOutput, CaptionRequest, Document};
use crate::layout::CellMetrics;
use crate::optparse::{parse_option_list, OptionList};
use crate::registry::Registries;
use crate::render::{render_box, OutputFormat};
use crate::settings::Scope;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    UsePackage(String),
    Setup { scope: Option<String>, options: String, starred: bool },
    ClearSetup { scope: String, keys: Option<String>, starred: bool },
    ShowSetup(Option<String>),
    DeclareFormat { name: String, template: String, vertical: bool },
    DeclareLabelFormat { name: String, template: String },
    DeclareTextFormat { name: String, template: String },
    DeclareLabelSeparator { name: String, template: String, starred: bool },
    DeclareJustification { name: String, code: String },
    DeclareFont { name: String, code: String },
    DeclareStyle { name: String, singleline: Option<String>, options: String },
    DeclareListFormat { name: String, template: String },
    DeclareOption { name: String, code: String },
    DeclareType { options: Option<String>, name: String, display: Option<String>, list: Option<String> },
    Begin(String),
    Content,
    Caption { entry: Option<String>, heading: String, starred: bool },
    CaptionOf { float_type: String, entry: Option<String>, heading: String, starred: bool },
    CaptionListEntry { float_type: String, text: String },
    ContinuedFloat,
    End,
    BeginGroup,
    EndGroup,
    StepCounter(String),
    ListOf(String),
    Page(u32),
    Width(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    /// Directives with their 1-based line numbers.
    pub directives: Vec<(usize, Directive)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Arg(String),
    Opt(String),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

impl Lexer<'_> {
    fn err(&self, message: impl Into<String>) -> ScenarioError {
        ScenarioError { line: self.line, message: message.into() }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c == Some('\n') {
            self.line += 1;
        }
        c
    }

    /// Reads up to the matching `close`, keeping nested braces intact.
    fn balanced(&mut self, close: char) -> Result<String, ScenarioError> {
        let start = self.line;
        let mut depth = 0usize;
        let mut out = String::new();
        loop {
            let c = self.bump().ok_or_else(|| ScenarioError { line: start, message: format!("missing `{close}'") })?;
            match c {
                '\\' => {
                    out.push(c);
                    if let Some(n) = self.bump() {
                        out.push(n);
                    }
                    continue;
                }
                '{' => depth += 1,
                '}' if depth > 0 => depth -= 1,
                c if c == close && depth == 0 => return Ok(out),
                _ => {}
            }
            out.push(c);
        }
    }

    fn quoted(&mut self, quote: char) -> Result<String, ScenarioError> {
        let start = self.line;
        let mut out = String::new();
        loop {
            let c = self.bump().ok_or_else(|| ScenarioError { line: start, message: "unterminated string".into() })?;
            match c {
                '\\' if quote == '"' && self.chars.peek() == Some(&'"') => {
                    self.bump();
                    out.push('"');
                }
                c if c == quote => return Ok(out),
                c => out.push(c),
            }
        }
    }

    /// Tokens of the next directive and its line, or `None` at the end.
    fn directive(&mut self) -> Result<Option<(usize, Vec<Tok>)>, ScenarioError> {
        let mut toks = Vec::new();
        let mut line = self.line;
        loop {
            match self.chars.peek().copied() {
                None => break,
                Some('\n') => {
                    self.bump();
                    if !toks.is_empty() {
                        break;
                    }
                }
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') if toks.is_empty() => {
                    while self.chars.peek().is_some_and(|c| *c != '\n') {
                        self.bump();
                    }
                }
                Some(c) => {
                    if toks.is_empty() {
                        line = self.line;
                    }
                    let tok = match c {
                        '"' | '\'' => {
                            self.bump();
                            Tok::Arg(self.quoted(c)?)
                        }
                        '{' => {
                            self.bump();
                            Tok::Arg(self.balanced('}')?)
                        }
                        '[' => {
                            self.bump();
                            Tok::Opt(self.balanced(']')?)
                        }
                        '}' | ']' => return Err(self.err(format!("unexpected `{c}'"))),
                        _ => {
                            let mut w = String::new();
                            while let Some(&c) = self.chars.peek() {
                                if c.is_whitespace() || matches!(c, '[' | '{' | '"') {
                                    break;
                                }
                                w.push(c);
                                self.bump();
                            }
                            Tok::Arg(w)
                        }
                    };
                    toks.push(tok);
                }
            }
        }
        Ok((!toks.is_empty()).then_some((line, toks)))
    }
}

struct Args {
    toks: std::collections::VecDeque<Tok>,
    line: usize,
    verb: String,
}

impl Args {
    fn err(&self, message: String) -> ScenarioError {
        ScenarioError { line: self.line, message }
    }

    fn opt(&mut self) -> Option<String> {
        match self.toks.front() {
            Some(Tok::Opt(_)) => match self.toks.pop_front() {
                Some(Tok::Opt(s)) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }

    fn arg(&mut self, what: &str) -> Result<String, ScenarioError> {
        match self.toks.pop_front() {
            Some(Tok::Arg(s)) => Ok(s),
            Some(Tok::Opt(_)) => Err(self.err(format!("`{}': unexpected optional argument before {what}", self.verb))),
            None => Err(self.err(format!("`{}': missing {what}", self.verb))),
        }
    }

    fn finish(self) -> Result<(), ScenarioError> {
        if self.toks.is_empty() {
            Ok(())
        } else {
            Err(self.err(format!("`{}': too many arguments", self.verb)))
        }
    }
}

fn parse_directive(line: usize, toks: Vec<Tok>) -> Result<Directive, ScenarioError> {
    let mut toks: std::collections::VecDeque<Tok> = toks.into();
    let Some(Tok::Arg(verb)) = toks.pop_front() else {
        return Err(ScenarioError { line, message: "expected a verb".into() });
    };
    let (base, starred) = match verb.strip_suffix('*') {
        Some(b) => (b.to_string(), true),
        None => (verb.clone(), false),
    };
    let mut a = Args { toks, line, verb: verb.clone() };
    let star_ok = matches!(
        base.as_str(),
        "setup" | "clearsetup" | "declareformat" | "declarelabelseparator" | "caption" | "captionof"
    );
    if starred && !star_ok {
        return Err(a.err(format!("unknown verb `{verb}'")));
    }
    let d = match base.as_str() {
        "usepackage" => Directive::UsePackage(a.opt().map_or_else(|| a.arg("options"), Ok)?),
        "setup" => Directive::Setup { scope: a.opt(), options: a.arg("options")?, starred },
        "clearsetup" => {
            let keys = a.opt();
            Directive::ClearSetup { keys, scope: a.arg("scope")?, starred }
        }
        "showsetup" => Directive::ShowSetup(a.toks.pop_front().map(|t| match t {
            Tok::Arg(s) | Tok::Opt(s) => s,
        })),
        "declareformat" => {
            Directive::DeclareFormat { name: a.arg("name")?, template: a.arg("template")?, vertical: starred }
        }
        "declarelabelformat" => Directive::DeclareLabelFormat { name: a.arg("name")?, template: a.arg("template")? },
        "declaretextformat" => Directive::DeclareTextFormat { name: a.arg("name")?, template: a.arg("template")? },
        "declarelabelseparator" => {
            Directive::DeclareLabelSeparator { name: a.arg("name")?, template: a.arg("template")?, starred }
        }
        "declarejustification" => Directive::DeclareJustification { name: a.arg("name")?, code: a.arg("code")? },
        "declarefont" => Directive::DeclareFont { name: a.arg("name")?, code: a.arg("code")? },
        "declarestyle" => {
            let name = a.arg("name")?;
            Directive::DeclareStyle { name, singleline: a.opt(), options: a.arg("options")? }
        }
        "declarelistformat" => Directive::DeclareListFormat { name: a.arg("name")?, template: a.arg("template")? },
        "declareoption" => Directive::DeclareOption { name: a.arg("name")?, code: a.arg("code")? },
        "declaretype" => {
            let options = a.opt();
            let name = a.arg("type name")?;
            let display = a.opt();
            Directive::DeclareType { options, name, display, list: a.opt() }
        }
        "begin" => Directive::Begin(a.arg("float type")?),
        "content" => Directive::Content,
        "caption" => {
            let entry = a.opt();
            Directive::Caption { entry, heading: a.arg("heading")?, starred }
        }
        "captionof" => {
            let float_type = a.arg("float type")?;
            let entry = a.opt();
            Directive::CaptionOf { float_type, entry, heading: a.arg("heading")?, starred }
        }
        "captionlistentry" => {
            let float_type = a.opt().map_or_else(|| a.arg("float type"), Ok)?;
            Directive::CaptionListEntry { float_type, text: a.arg("entry")? }
        }
        "continuedfloat" => Directive::ContinuedFloat,
        "end" => Directive::End,
        "begingroup" => Directive::BeginGroup,
        "endgroup" => Directive::EndGroup,
        "stepcounter" => Directive::StepCounter(a.arg("counter")?),
        "listof" => Directive::ListOf(a.arg("float type")?),
        "page" => {
            let v = a.arg("page number")?;
            Directive::Page(v.parse().ok().filter(|p| *p >= 1).ok_or_else(|| a.err(format!("bad page number `{v}'")))?)
        }
        "width" => {
            let v = a.arg("width")?;
            Directive::Width(v.parse().ok().filter(|w| *w >= 1).ok_or_else(|| a.err(format!("bad width `{v}'")))?)
        }
        _ => return Err(a.err(format!("unknown verb `{verb}'"))),
    };
    a.finish()?;
    Ok(d)
}

impl Scenario {
    pub fn parse(src: &str) -> Result<Scenario, ScenarioError> {
        let mut lexer = Lexer { chars: src.chars().peekable(), line: 1 };
        let mut directives = Vec::new();
        while let Some((line, toks)) = lexer.directive()? {
            directives.push((line, parse_directive(line, toks)?));
        }
        Ok(Scenario { directives })
    }

    pub fn run(&self, width: usize) -> RunResult {
        Runner::new(width).run(self)
    }
}

/// One piece of scenario output.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Caption(CaptionOutput),
    List(Vec<String>),
    Setup(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub blocks: Vec<Block>,
    pub diagnostics: Vec<Diagnostic>,
}

impl RunResult {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }

    pub fn has_warnings(&self) -> bool {
        self.diagnostics.iter().any(|d| !d.is_error())
    }

    /// Blocks separated by one blank line.
    pub fn render(&self, format: OutputFormat) -> String {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| match b {
                Block::Caption(c) => render_box(&c.layout, format),
                Block::List(lines) => lines.iter().map(|l| format!("{l}\n")).collect(),
                Block::Setup(s) => s.clone(),
            })
            .filter(|s| !s.is_empty())
            .collect();
        parts.join("\n")
    }

    /// Diagnostics one per line, as printed on the error stream.
    pub fn render_diagnostics(&self) -> String {
        self.diagnostics.iter().map(|d| format!("{d}\n")).collect()
    }
}

struct Runner {
    doc: Document,
    blocks: Vec<Block>,
    diagnostics: Vec<Diagnostic>,
    line: usize,
}

fn options(src: &str) -> Result<OptionList, CaptionError> {
    parse_option_list(src)
}

impl Runner {
    fn new(width: usize) -> Self {
        let mut doc = Document::new(Registries::builtin());
        doc.metrics = CellMetrics::new(width);
        Runner { doc, blocks: Vec::new(), diagnostics: Vec::new(), line: 0 }
    }

    fn report(&mut self, diags: Vec<Diagnostic>) {
        let line = self.line;
        self.diagnostics.extend(diags.into_iter().map(|d| d.at_line(line)));
    }

    fn run(mut self, scenario: &Scenario) -> RunResult {
        for (line, d) in &scenario.directives {
            self.line = *line;
            if let Err(e) = self.exec(d) {
                self.report(vec![e.into()]);
            }
            let w = self.doc.take_warnings();
            self.report(w);
        }
        let end = self.doc.finish();
        self.line = scenario.directives.last().map_or(0, |(l, _)| *l);
        self.report(end);
        RunResult { blocks: self.blocks, diagnostics: self.diagnostics }
    }

    fn request(&self, heading: &str, entry: &Option<String>, starred: bool) -> Result<CaptionRequest, CaptionError> {
        let list_entry = match entry.as_deref() {
            Some(e) if !e.is_empty() => Some(self.doc.entry_text(e)?),
            other => other.map(String::from),
        };
        Ok(CaptionRequest { heading: self.doc.heading(heading)?, list_entry, starred })
    }

    fn exec(&mut self, d: &Directive) -> Result<(), CaptionError> {
        let doc = &mut self.doc;
        match d {
            Directive::UsePackage(o) => {
                let diags = doc.usepackage(&options(o)?);
                self.report(diags);
            }
            Directive::Setup { scope, options: o, starred } => {
                let diags = doc.setup(scope.as_deref(), &options(o)?, *starred);
                self.report(diags);
            }
            Directive::ClearSetup { scope, keys, starred } => {
                let keys: Option<Vec<String>> = keys
                    .as_ref()
                    .map(|k| k.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect());
                let diags = doc.store.clear_setup(scope, keys.as_deref(), *starred);
                self.report(diags);
            }
            Directive::ShowSetup(scope) => {
                let scope = match scope.as_deref() {
                    None | Some("global") => Scope::Global,
                    Some("package") => Scope::Package,
                    Some(t) => Scope::Type(t.to_string()),
                };
                self.blocks.push(Block::Setup(doc.store.show_setup(&scope)));
            }
            Directive::DeclareFormat { name, template, vertical } => {
                doc.reg.declare_format(name, template, *vertical)?
            }
            Directive::DeclareLabelFormat { name, template } => doc.reg.declare_label_format(name, template)?,
            Directive::DeclareTextFormat { name, template } => doc.reg.declare_text_format(name, template)?,
            Directive::DeclareLabelSeparator { name, template, starred } => {
                doc.reg.declare_label_separator(name, template, *starred)?
            }
            Directive::DeclareJustification { name, code } => doc.reg.declare_justification(name, code)?,
            Directive::DeclareFont { name, code } => doc.reg.declare_font(name, code)?,
            Directive::DeclareStyle { name, singleline, options: o } => {
                let single = options(singleline.as_deref().unwrap_or(""))?;
                doc.reg.declare_style(name, single, options(o)?);
            }
            Directive::DeclareListFormat { name, template } => doc.reg.declare_list_format(name, template)?,
            Directive::DeclareOption { name, code } => doc.reg.declare_option(name, code)?,
            Directive::DeclareType { options: o, name, display, list } => {
                let o = options(o.as_deref().unwrap_or(""))?;
                doc.declare_type(name, display.as_deref(), list.as_deref(), &o)?;
            }
            Directive::Begin(t) => doc.begin_float(t)?,
            Directive::Content => doc.mark_content(),
            Directive::Caption { entry, heading, starred } => {
                let req = self.request(heading, entry, *starred)?;
                let out = self.doc.caption(&req, &OptionList::new())?;
                self.blocks.push(Block::Caption(out));
            }
            Directive::CaptionOf { float_type, entry, heading, starred } => {
                let req = self.request(heading, entry, *starred)?;
                let out = self.doc.caption_of(float_type, &req, &OptionList::new())?;
                self.blocks.push(Block::Caption(out));
            }
            Directive::CaptionListEntry { float_type, text } => {
                let text = doc.entry_text(text)?;
                doc.caption_list_entry(float_type, &text)?;
            }
            Directive::ContinuedFloat => doc.continued_float()?,
            Directive::End | Directive::EndGroup => {
                doc.end()?;
            }
            Directive::BeginGroup => doc.begin_group(),
            Directive::StepCounter(c) => {
                doc.step_counter(c);
            }
            Directive::ListOf(t) => {
                let lines = doc.list_of(t)?;
                self.blocks.push(Block::List(lines));
            }
            Directive::Page(p) => doc.page = *p,
            Directive::Width(w) => doc.metrics = CellMetrics::new(*w),
        }
        Ok(())
    }
}
