//! Float environments, counters, captions and lists of floats.

use std::collections::BTreeMap;

use crate::diag::{CaptionError, CaptionWarning, Diagnostic};
use crate::layout::compose::{typeset, CaptionParts};
use crate::layout::{CellMetrics, LayoutBox};
use crate::optparse::OptionList;
use crate::registry::template::{eval_template, plain, text_content};
use crate::registry::{Registries, StyledText, Template, VarValue};
use crate::settings::{ApplyCtx, CaptionSettings, Position, ResolveCtx, Scope, SettingsStore, Sidedness};

/// Formats a float number from the `within` counter's representation and
/// the float counter.
pub type NumberFormatter = fn(within: Option<&str>, counter: u32) -> String;

pub fn arabic_number(within: Option<&str>, counter: u32) -> String {
    match within {
        Some(w) => format!("{w}.{counter}"),
        None => counter.to_string(),
    }
}

/// Sectioning counters known from the start, outermost first.
pub const SECTION_COUNTERS: [&str; 4] = ["chapter", "section", "subsection", "subsubsection"];

#[derive(Debug, Clone, PartialEq, Eq)]
struct Counter {
    value: u32,
    parent: Option<String>,
    /// Bumped on every step or reset; float counters compare against it.
    generation: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct FloatCounter {
    value: u32,
    /// `within` counter and its generation at the last step.
    snapshot: Option<(String, u64)>,
    number: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListEntry {
    pub number: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
enum FrameKind {
    Float { float_type: String, content_seen: bool, captions: u32, number: Option<String>, continued: bool },
    Group,
}

#[derive(Debug, Clone, PartialEq)]
struct Frame {
    kind: FrameKind,
    local: Vec<OptionList>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaptionRequest {
    pub heading: StyledText,
    /// `None` uses the heading; `Some("")` keeps the caption out of the list.
    pub list_entry: Option<String>,
    pub starred: bool,
}

impl CaptionRequest {
    pub fn new(heading: &str) -> Self {
        CaptionRequest { heading: plain(heading), list_entry: None, starred: false }
    }

    pub fn starred(mut self) -> Self {
        self.starred = true;
        self
    }

    pub fn with_entry(mut self, entry: &str) -> Self {
        self.list_entry = Some(entry.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaptionOutput {
    pub float_type: String,
    /// Empty for starred captions.
    pub number: String,
    pub layout: LayoutBox,
}

/// What `end` closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Closed {
    Float(String),
    Group,
}

/// One document session.
#[derive(Debug, Clone)]
pub struct Document {
    pub reg: Registries,
    pub store: SettingsStore,
    pub metrics: CellMetrics,
    pub page: u32,
    pub sidedness: Sidedness,
    pub number_format: NumberFormatter,
    counters: BTreeMap<String, Counter>,
    floats: BTreeMap<String, FloatCounter>,
    lists: BTreeMap<String, Vec<ListEntry>>,
    frames: Vec<Frame>,
    /// Type and number of the last closed float.
    previous: Option<(String, Option<String>)>,
    warnings: Vec<Diagnostic>,
}

impl Default for Document {
    fn default() -> Self {
        Self::new(Registries::builtin())
    }
}

impl Document {
    pub fn new(reg: Registries) -> Self {
        let mut counters = BTreeMap::new();
        let mut parent: Option<&str> = None;
        for name in SECTION_COUNTERS {
            counters.insert(name.to_string(), Counter { value: 0, parent: parent.map(String::from), generation: 0 });
            parent = Some(name);
        }
        Document {
            reg,
            store: SettingsStore::new(),
            metrics: CellMetrics::default(),
            page: 1,
            sidedness: Sidedness::OneSide,
            number_format: arabic_number,
            counters,
            floats: BTreeMap::new(),
            lists: BTreeMap::new(),
            frames: Vec::new(),
            previous: None,
            warnings: Vec::new(),
        }
    }

    /// Warnings raised by the operations since the last call.
    pub fn take_warnings(&mut self) -> Vec<Diagnostic> {
        std::mem::take(&mut self.warnings)
    }

    fn ctx(&self) -> ResolveCtx {
        ResolveCtx { page: self.page, sidedness: self.sidedness }
    }

    fn open_float(&self) -> Option<&str> {
        self.frames.iter().rev().find_map(|f| match &f.kind {
            FrameKind::Float { float_type, .. } => Some(float_type.as_str()),
            FrameKind::Group => None,
        })
    }

    fn float_frame_mut(&mut self) -> Option<&mut FrameKind> {
        self.frames.iter_mut().rev().map(|f| &mut f.kind).find(|k| matches!(k, FrameKind::Float { .. }))
    }

    fn locals(&self) -> Vec<OptionList> {
        self.frames.iter().flat_map(|f| f.local.iter().cloned()).collect()
    }

    /// `\captionsetup`: local inside a float or group, otherwise global or
    /// per type.
    pub fn setup(&mut self, scope: Option<&str>, opts: &OptionList, starred: bool) -> Vec<Diagnostic> {
        match scope {
            None if !self.frames.is_empty() => {
                let float_type = self.open_float().map(String::from);
                let ctx = ApplyCtx { reg: &self.reg, float_type: float_type.as_deref() };
                let (kept, diags) = self.store.validate(opts, ctx);
                let frame = self.frames.last_mut().expect("frame");
                frame.local.push(OptionList { entries: kept });
                diags
            }
            None => self.store.setup(&self.reg, Scope::Global, opts, starred),
            Some(t) => self.store.setup(&self.reg, Scope::Type(t.to_string()), opts, starred),
        }
    }

    pub fn usepackage(&mut self, opts: &OptionList) -> Vec<Diagnostic> {
        self.store.setup(&self.reg, Scope::Package, opts, false)
    }

    /// Registers a float type; `opts` may carry `within`, `name` and
    /// `listname`.
    pub fn declare_type(
        &mut self,
        name: &str,
        display: Option<&str>,
        list: Option<&str>,
        opts: &OptionList,
    ) -> Result<(), CaptionError> {
        let mut display = display.map(String::from);
        let mut list = list.map(String::from);
        let mut within = None;
        for e in opts {
            let value = || e.value.clone().ok_or_else(|| CaptionError::MissingValue(e.key.clone()));
            match e.key.as_str() {
                "within" => within = Some(value()?),
                "name" => display = Some(value()?),
                "listname" => list = Some(value()?),
                "fileext" | "placement" => {}
                k => return Err(CaptionError::UnknownOption(k.to_string())),
            }
        }
        self.reg.declare_type(name, display.as_deref(), list.as_deref(), within.as_deref());
        self.floats.remove(name);
        self.lists.remove(name);
        Ok(())
    }

    pub fn begin_float(&mut self, float_type: &str) -> Result<(), CaptionError> {
        self.reg.float_type(float_type)?;
        if let Some(outer) = self.open_float() {
            return Err(CaptionError::NestedFloat { inner: float_type.into(), outer: outer.into() });
        }
        self.frames.push(Frame {
            kind: FrameKind::Float {
                float_type: float_type.into(),
                content_seen: false,
                captions: 0,
                number: None,
                continued: false,
            },
            local: Vec::new(),
        });
        Ok(())
    }

    pub fn begin_group(&mut self) {
        self.frames.push(Frame { kind: FrameKind::Group, local: Vec::new() });
    }

    /// Closes the innermost float or group.
    pub fn end(&mut self) -> Result<Closed, CaptionError> {
        let frame = self.frames.pop().ok_or(CaptionError::NothingToEnd)?;
        Ok(match frame.kind {
            FrameKind::Float { float_type, number, .. } => {
                self.previous = Some((float_type.clone(), number));
                Closed::Float(float_type)
            }
            FrameKind::Group => Closed::Group,
        })
    }

    /// Records float content; a caption after content is placed below it.
    pub fn mark_content(&mut self) {
        if let Some(FrameKind::Float { content_seen, .. }) = self.float_frame_mut() {
            *content_seen = true;
        }
    }

    pub fn continued_float(&mut self) -> Result<(), CaptionError> {
        let current = self.open_float().map(String::from).ok_or(CaptionError::ContinuedOutsideFloat)?;
        let Some((prev_type, prev_number)) = self.previous.clone() else {
            return Ok(());
        };
        if prev_type != current {
            return Err(CaptionError::ContinuedAfterOtherType { current, previous: prev_type });
        }
        if let Some(FrameKind::Float { number, continued, .. }) = self.float_frame_mut() {
            *continued = true;
            if number.is_none() {
                *number = prev_number;
            }
        }
        Ok(())
    }

    pub fn counter_value(&self, name: &str) -> Option<u32> {
        self.counters.get(name).map(|c| c.value).or_else(|| self.floats.get(name).map(|f| f.value))
    }

    /// Printed form of a sectioning counter, prefixed by its parent when the
    /// parent has been stepped.
    pub fn counter_string(&self, name: &str) -> String {
        let Some(c) = self.counters.get(name) else {
            return self.floats.get(name).map(|f| f.number.clone()).unwrap_or_else(|| "0".into());
        };
        match c.parent.as_deref().filter(|p| self.counters.get(*p).is_some_and(|pc| pc.value > 0)) {
            Some(p) => format!("{}.{}", self.counter_string(p), c.value),
            None => c.value.to_string(),
        }
    }

    fn reset_children(&mut self, name: &str) {
        let children: Vec<String> =
            self.counters.iter().filter(|(_, c)| c.parent.as_deref() == Some(name)).map(|(k, _)| k.clone()).collect();
        for child in children {
            if let Some(c) = self.counters.get_mut(&child) {
                c.value = 0;
                c.generation += 1;
            }
            self.reset_children(&child);
        }
    }

    /// Steps a sectioning counter (resetting everything within it) or a
    /// float counter. Unknown names become new top-level counters.
    pub fn step_counter(&mut self, name: &str) -> String {
        if self.reg.float_types.contains_key(name) && !self.counters.contains_key(name) {
            let s = self.peek_settings(Some(name));
            return self.step_float(name, &s);
        }
        let c = self.counters.entry(name.to_string()).or_insert(Counter { value: 0, parent: None, generation: 0 });
        c.value += 1;
        c.generation += 1;
        self.reset_children(name);
        self.counter_string(name)
    }

    fn step_float(&mut self, float_type: &str, s: &CaptionSettings) -> String {
        let within = s.within_counter(&self.reg, float_type);
        let snapshot = within.as_ref().map(|w| {
            self.counters.entry(w.clone()).or_insert(Counter { value: 0, parent: None, generation: 0 });
            (w.clone(), self.counters[w].generation)
        });
        let within_str = within.as_deref().map(|w| self.counter_string(w));
        let fc = self.floats.entry(float_type.to_string()).or_default();
        if let (Some((old, gen)), Some((new, new_gen))) = (&fc.snapshot, &snapshot) {
            if old == new && gen != new_gen {
                fc.value = 0;
            }
        }
        fc.value += 1;
        fc.snapshot = snapshot;
        fc.number = (self.number_format)(within_str.as_deref(), fc.value);
        fc.number.clone()
    }

    fn peek_settings(&self, float_type: Option<&str>) -> CaptionSettings {
        self.store.peek(&self.reg, float_type, &self.locals(), self.ctx()).0
    }

    /// Current printed number of a float type.
    pub fn float_number(&self, float_type: &str) -> String {
        self.floats.get(float_type).map_or_else(|| "0".into(), |f| f.number.clone())
    }

    pub fn list_entries(&self, float_type: &str) -> &[ListEntry] {
        self.lists.get(float_type).map_or(&[], Vec::as_slice)
    }

    /// `\caption` inside a float, or anywhere once `type=` is set.
    pub fn caption(&mut self, req: &CaptionRequest, local: &OptionList) -> Result<CaptionOutput, CaptionError> {
        let open = self.open_float().map(String::from);
        let mut locals = self.locals();
        locals.push(local.clone());
        let typed = self.store.peek(&self.reg, open.as_deref(), &locals, self.ctx()).0.caption_type;
        let float_type = typed.or(open).ok_or(CaptionError::CaptionOutsideFloat)?;
        self.caption_typed(&float_type, req, local)
    }

    /// `\captionof`: a caption with an explicit type.
    pub fn caption_of(
        &mut self,
        float_type: &str,
        req: &CaptionRequest,
        local: &OptionList,
    ) -> Result<CaptionOutput, CaptionError> {
        self.reg.float_type(float_type)?;
        if let Some(open) = self.open_float().filter(|t| *t != float_type) {
            self.warnings.push(CaptionWarning::TypeAlreadySet(open.to_string()).into());
        }
        self.caption_typed(float_type, req, local)
    }

    fn caption_typed(
        &mut self,
        float_type: &str,
        req: &CaptionRequest,
        local: &OptionList,
    ) -> Result<CaptionOutput, CaptionError> {
        self.reg.float_type(float_type)?;
        let ctx = ApplyCtx { reg: &self.reg, float_type: Some(float_type) };
        let (kept, diags) = self.store.validate(local, ctx);
        self.warnings.extend(diags);
        let mut locals = self.locals();
        locals.push(OptionList { entries: kept });
        let (s, errors) = self.store.resolve(&self.reg, Some(float_type), &locals, self.ctx());
        self.warnings.extend(errors);

        let in_own_float = self.open_float() == Some(float_type);
        let number = if req.starred {
            String::new()
        } else {
            let reuse = match self.float_frame_mut() {
                Some(FrameKind::Float { number: Some(n), .. }) if in_own_float => Some(n.clone()),
                _ => None,
            };
            match reuse {
                Some(n) => n,
                None => {
                    let n = self.step_float(float_type, &s);
                    if in_own_float {
                        if let Some(FrameKind::Float { number, .. }) = self.float_frame_mut() {
                            *number = Some(n.clone());
                        }
                    }
                    n
                }
            }
        };
        if let Some(f) = self.floats.get_mut(float_type).filter(|_| !number.is_empty()) {
            f.number = number.clone();
        }
        if !req.starred && s.list && req.list_entry.as_deref() != Some("") {
            let text = req.list_entry.clone().unwrap_or_else(|| heading_text(&req.heading));
            self.lists.entry(float_type.to_string()).or_default().push(ListEntry { number: number.clone(), text });
        }

        let position = match s.position {
            Position::Auto => match self.float_frame_mut() {
                Some(FrameKind::Float { content_seen: false, .. }) if in_own_float => Position::Top,
                _ => Position::Bottom,
            },
            p => p,
        };
        if let Some(FrameKind::Float { captions, .. }) = self.float_frame_mut() {
            *captions += 1;
        }
        let vars = self.vars(&s);
        let name = s.display_name(&self.reg, float_type);
        let parts = CaptionParts { float_name: &name, number: &number, heading: &req.heading, starred: req.starred };
        let layout = typeset(&self.reg, &s, &vars, parts, Some(float_type), &self.metrics, position)?;
        Ok(CaptionOutput { float_type: float_type.to_string(), number, layout })
    }

    /// Template variables: custom options plus `\<type>name` and
    /// `\the<type>` for every declared type.
    fn vars(&self, s: &CaptionSettings) -> crate::registry::VarEnv {
        let mut vars = s.vars.clone();
        for t in self.reg.float_types.keys() {
            vars.insert(format!("{t}name"), VarValue::Text(s.display_name(&self.reg, t)));
            vars.insert(format!("the{t}"), VarValue::Text(self.float_number(t)));
        }
        for c in self.counters.keys() {
            vars.entry(format!("the{c}")).or_insert_with(|| VarValue::Text(self.counter_string(c)));
        }
        vars
    }

    /// Evaluates heading markup (`\\`, `\par`, `~`, font commands,
    /// `\thefigure`, ...) in the current context.
    pub fn heading(&self, src: &str) -> Result<StyledText, CaptionError> {
        let vars = self.vars(&self.peek_settings(self.open_float()));
        let t = Template::parse(src, &|n| vars.contains_key(n))?;
        eval_template(&t, &[], &vars)
    }

    /// Heading markup flattened to the plain text used in lists.
    pub fn entry_text(&self, src: &str) -> Result<String, CaptionError> {
        Ok(heading_text(&self.heading(src)?))
    }

    /// `\captionlistentry`: steps the counter and records an entry without
    /// typesetting anything.
    pub fn caption_list_entry(&mut self, float_type: &str, text: &str) -> Result<String, CaptionError> {
        self.reg.float_type(float_type)?;
        let s = self.peek_settings(Some(float_type));
        let number = self.step_float(float_type, &s);
        if s.list {
            self.lists
                .entry(float_type.to_string())
                .or_default()
                .push(ListEntry { number: number.clone(), text: text.to_string() });
        }
        Ok(number)
    }

    /// The list heading followed by one line per entry.
    pub fn list_of(&self, float_type: &str) -> Result<Vec<String>, CaptionError> {
        self.reg.float_type(float_type)?;
        let s = self.peek_settings(Some(float_type));
        let template = self.reg.list_format(&s.listformat)?;
        let vars = self.vars(&s);
        let mut out = vec![s.list_heading(&self.reg, float_type)];
        for e in self.list_entries(float_type) {
            let num = eval_template(template, &[plain(""), plain(&e.number)], &vars)?;
            out.push(format!("{}  {}", text_content(&num), e.text));
        }
        Ok(out)
    }

    /// Warnings due at the end of the document.
    pub fn finish(&mut self) -> Vec<Diagnostic> {
        let mut out = self.take_warnings();
        out.extend(self.store.unused_setups());
        out
    }
}

fn heading_text(heading: &StyledText) -> String {
    text_content(heading).split_whitespace().collect::<Vec<_>>().join(" ")
}
