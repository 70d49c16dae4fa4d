//! Option scopes and their resolution into [`CaptionSettings`].
//!
//! Options accumulate in four levels: package, global, per float type and
//! local. Resolution replays them in that order over the class defaults;
//! later assignments win.

pub mod legacy;

use std::collections::BTreeMap;

use crate::diag::{CaptionError, CaptionWarning, Diagnostic};
use crate::optparse::{
    parse_bool, parse_dimension, parse_dimension_pair, parse_option_list, Dimension, OptionEntry, OptionList,
};
use crate::registry::{FontSlot, FontSpec, Registries, VarEnv, VarKind, VarValue, BASE_STYLE, SINGLELINE_OVERRIDES};
pub use legacy::{is_legacy, map_legacy, LEGACY_TABLE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Position {
    Top,
    Bottom,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sidedness {
    OneSide,
    TwoSide,
}

/// Every layout-affecting key, fully resolved for one caption.
#[derive(Debug, Clone, PartialEq)]
pub struct CaptionSettings {
    pub format: String,
    pub labelformat: String,
    pub labelsep: String,
    pub textformat: String,
    pub justification: String,
    pub listformat: String,
    pub font: FontSpec,
    pub labelfont: FontSpec,
    pub textfont: FontSpec,
    pub margin_left: Dimension,
    pub margin_right: Dimension,
    pub width: Option<Dimension>,
    pub margin_star: Option<(Dimension, Dimension)>,
    pub minmargin: Option<Dimension>,
    pub maxmargin: Option<Dimension>,
    pub indention: Dimension,
    pub hangindent: Dimension,
    pub parindent: Dimension,
    pub parskip: Dimension,
    pub skip: Dimension,
    pub belowskip: Dimension,
    pub position: Position,
    pub singlelinecheck: bool,
    pub list: bool,
    pub strut: bool,
    /// Explicit `name=` override for whatever type is being captioned.
    pub name: Option<String>,
    pub names: BTreeMap<String, String>,
    pub list_names: BTreeMap<String, String>,
    pub within: BTreeMap<String, Option<String>>,
    /// Explicit `oneside`/`twoside`; otherwise the document decides.
    pub sidedness: Option<Sidedness>,
    /// Set by `type=` / `type*=`.
    pub caption_type: Option<String>,
    /// Options applied when the single-line check fires.
    pub singleline: OptionList,
    pub vars: VarEnv,
}

impl Default for CaptionSettings {
    fn default() -> Self {
        CaptionSettings {
            format: "plain".into(),
            labelformat: "default".into(),
            labelsep: "colon".into(),
            textformat: "simple".into(),
            justification: "justified".into(),
            listformat: "subsimple".into(),
            font: FontSpec::default(),
            labelfont: FontSpec::default(),
            textfont: FontSpec::default(),
            margin_left: Dimension::ZERO,
            margin_right: Dimension::ZERO,
            width: None,
            margin_star: None,
            minmargin: None,
            maxmargin: None,
            indention: Dimension::ZERO,
            hangindent: Dimension::ZERO,
            parindent: Dimension::ZERO,
            parskip: Dimension::ZERO,
            skip: Dimension::pt(10.0),
            belowskip: Dimension::ZERO,
            position: Position::Auto,
            singlelinecheck: true,
            list: true,
            strut: true,
            name: None,
            names: BTreeMap::new(),
            list_names: BTreeMap::new(),
            within: BTreeMap::new(),
            sidedness: None,
            caption_type: None,
            singleline: parse_option_list(SINGLELINE_OVERRIDES).expect("built-in options"),
            vars: VarEnv::new(),
        }
    }
}

impl CaptionSettings {
    /// Class defaults plus the initial values of declared custom options.
    pub fn initial(reg: &Registries) -> Self {
        let mut s = CaptionSettings::default();
        for opt in reg.custom_options.values() {
            let v = match opt.kind {
                VarKind::Length => VarValue::Length(Dimension::ZERO),
                VarKind::Text => VarValue::Text(String::new()),
            };
            s.vars.entry(opt.var.clone()).or_insert(v);
        }
        s
    }

    pub fn display_name(&self, reg: &Registries, float_type: &str) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        self.names
            .get(float_type)
            .cloned()
            .or_else(|| reg.float_types.get(float_type).map(|t| t.display_name.clone()))
            .unwrap_or_default()
    }

    pub fn list_heading(&self, reg: &Registries, float_type: &str) -> String {
        self.list_names
            .get(float_type)
            .cloned()
            .or_else(|| reg.float_types.get(float_type).map(|t| t.list_heading.clone()))
            .unwrap_or_default()
    }

    pub fn within_counter(&self, reg: &Registries, float_type: &str) -> Option<String> {
        match self.within.get(float_type) {
            Some(w) => w.clone(),
            None => reg.float_types.get(float_type).and_then(|t| t.within.clone()),
        }
    }

    pub fn effective_sidedness(&self, default: Sidedness) -> Sidedness {
        self.sidedness.unwrap_or(default)
    }
}

/// The float type an option list is applied for, if any.
#[derive(Debug, Clone, Copy)]
pub struct ApplyCtx<'a> {
    pub reg: &'a Registries,
    pub float_type: Option<&'a str>,
}

fn need(e: &OptionEntry) -> Result<&str, CaptionError> {
    e.value.as_deref().ok_or_else(|| CaptionError::MissingValue(e.key.clone()))
}

fn flag(e: &OptionEntry) -> Result<bool, CaptionError> {
    e.value.as_deref().map_or(Ok(true), parse_bool)
}

fn dim(e: &OptionEntry) -> Result<Dimension, CaptionError> {
    parse_dimension(need(e)?)
}

fn font_list(e: &OptionEntry) -> Result<OptionList, CaptionError> {
    parse_option_list(need(e)?)
}

pub fn parse_position(v: &str) -> Result<Position, CaptionError> {
    match v.trim() {
        "top" | "above" | "t" => Ok(Position::Top),
        "bottom" | "below" | "b" => Ok(Position::Bottom),
        "auto" => Ok(Position::Auto),
        other => Err(CaptionError::UndefinedPosition(other.to_string())),
    }
}

/// Keys accepted for compatibility that have no effect here.
const IGNORED_KEYS: &[&str] = &["compatibility", "hypcap", "hypcapspace", "FPlist", "FPref", "subtype"];

/// Applies one option. Errors leave `s` unchanged for that key.
pub fn apply_option(
    s: &mut CaptionSettings,
    e: &OptionEntry,
    ctx: ApplyCtx<'_>,
    warnings: &mut Vec<CaptionWarning>,
) -> Result<(), CaptionError> {
    let reg = ctx.reg;
    match e.key.as_str() {
        "format" => {
            let v = need(e)?;
            reg.format(v)?;
            s.format = v.into();
        }
        "labelformat" => {
            let v = need(e)?;
            reg.label_format(v)?;
            s.labelformat = v.into();
        }
        "labelsep" | "labelseparator" => {
            let v = need(e)?;
            reg.label_separator(v)?;
            s.labelsep = v.into();
        }
        "textformat" => {
            let v = need(e)?;
            reg.text_format(v)?;
            s.textformat = v.into();
        }
        "justification" => {
            let v = need(e)?;
            if reg.justification(v)?.substitute {
                warnings.push(CaptionWarning::RaggedRightSubstituted);
            }
            s.justification = v.into();
        }
        "listformat" => {
            let v = need(e)?;
            reg.list_format(v)?;
            s.listformat = v.into();
        }
        "font" => s.font = reg.font_spec(&font_list(e)?, FontSlot::Caption)?,
        "labelfont" => s.labelfont = reg.font_spec(&font_list(e)?, FontSlot::Label)?,
        "textfont" => s.textfont = reg.font_spec(&font_list(e)?, FontSlot::Text)?,
        "font+" => s.font = s.font.merge(&reg.font_spec(&font_list(e)?, FontSlot::Caption)?),
        "labelfont+" => s.labelfont = s.labelfont.merge(&reg.font_spec(&font_list(e)?, FontSlot::Label)?),
        "textfont+" => s.textfont = s.textfont.merge(&reg.font_spec(&font_list(e)?, FontSlot::Text)?),
        "margin" => {
            let (l, r) = parse_dimension_pair(need(e)?)?;
            s.margin_left = l;
            s.margin_right = r;
            s.width = None;
        }
        "margin*" => {
            let pair = parse_dimension_pair(need(e)?)?;
            s.margin_star = Some(pair);
            if s.width.is_none() {
                s.margin_left = pair.0;
                s.margin_right = pair.1;
            }
        }
        "width" => s.width = Some(dim(e)?),
        "minmargin" => s.minmargin = Some(dim(e)?),
        "maxmargin" => s.maxmargin = Some(dim(e)?),
        "indention" => s.indention = dim(e)?,
        "hangindent" => s.hangindent = dim(e)?,
        "parindent" => s.parindent = dim(e)?,
        "parskip" => s.parskip = dim(e)?,
        "skip" | "aboveskip" => {
            let d = dim(e)?;
            if d.is_negative() {
                return Err(CaptionError::NegativeSkip(need(e)?.trim().to_string()));
            }
            s.skip = d;
        }
        "belowskip" => s.belowskip = dim(e)?,
        "position" => s.position = parse_position(need(e)?)?,
        "figureposition" | "tableposition" => {
            let p = parse_position(need(e)?)?;
            let ty = e.key.trim_end_matches("position");
            if ctx.float_type == Some(ty) {
                s.position = p;
            }
        }
        "singlelinecheck" => s.singlelinecheck = flag(e)?,
        "list" => s.list = flag(e)?,
        "strut" => s.strut = flag(e)?,
        "oneside" => s.sidedness = Some(if flag(e)? { Sidedness::OneSide } else { Sidedness::TwoSide }),
        "twoside" => s.sidedness = Some(if flag(e)? { Sidedness::TwoSide } else { Sidedness::OneSide }),
        "name" => s.name = Some(need(e)?.to_string()),
        "figurename" | "tablename" => {
            let ty = e.key.trim_end_matches("name");
            s.names.insert(ty.into(), need(e)?.to_string());
        }
        "listfigurename" | "listtablename" => {
            let ty = e.key.trim_start_matches("list").trim_end_matches("name");
            s.list_names.insert(ty.into(), need(e)?.to_string());
        }
        "figurewithin" | "tablewithin" => {
            let ty = e.key.trim_end_matches("within");
            let v = need(e)?.trim();
            s.within.insert(ty.into(), (v != "none").then(|| v.to_string()));
        }
        "type" | "type*" => {
            let v = need(e)?.trim();
            reg.float_type(v)?;
            s.caption_type = Some(v.to_string());
        }
        "options" => {
            for inner in &font_list(e)? {
                apply_option(s, inner, ctx, warnings)?;
            }
        }
        "style" => {
            let style = reg.style(need(e)?.trim())?;
            for inner in &parse_option_list(BASE_STYLE)? {
                apply_option(s, inner, ctx, warnings)?;
            }
            for inner in &style.options {
                apply_option(s, inner, ctx, warnings)?;
            }
            s.singleline = style.singleline.clone();
        }
        k if IGNORED_KEYS.contains(&k) => {}
        k => {
            if let Some(opt) = reg.custom_options.get(k) {
                let v = need(e)?;
                let value = match opt.kind {
                    VarKind::Length => VarValue::Length(parse_dimension(v)?),
                    VarKind::Text => VarValue::Text(v.to_string()),
                };
                s.vars.insert(opt.var.clone(), value);
            } else if is_legacy(k) && e.value.is_none() {
                for inner in &map_legacy(k)? {
                    apply_option(s, inner, ctx, warnings)?;
                }
            } else {
                return Err(CaptionError::UnknownOption(k.to_string()));
            }
        }
    }
    Ok(())
}

/// Applies a list, collecting errors and continuing with the next key.
pub fn apply_list(
    s: &mut CaptionSettings,
    list: &OptionList,
    ctx: ApplyCtx<'_>,
) -> (Vec<CaptionWarning>, Vec<CaptionError>) {
    let mut warnings = Vec::new();
    let mut errors = Vec::new();
    for e in list {
        let mut trial = s.clone();
        match apply_option(&mut trial, e, ctx, &mut warnings) {
            Ok(()) => *s = trial,
            Err(err) => errors.push(err),
        }
    }
    (warnings, errors)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scope {
    Package,
    Global,
    Type(String),
}

impl Scope {
    pub fn label(&self) -> String {
        match self {
            Scope::Package => "package".into(),
            Scope::Global => "global".into(),
            Scope::Type(t) => t.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeScope {
    pub calls: Vec<OptionList>,
    pub consumed: bool,
    /// Set by any starred setup; suppresses the unused warning.
    pub starred: bool,
}

/// Layout context for resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolveCtx {
    pub page: u32,
    pub sidedness: Sidedness,
}

impl Default for ResolveCtx {
    fn default() -> Self {
        ResolveCtx { page: 1, sidedness: Sidedness::OneSide }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SettingsStore {
    pub package: Vec<OptionList>,
    pub global: Vec<OptionList>,
    pub types: BTreeMap<String, TypeScope>,
    ragged_warned: bool,
}

impl SettingsStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates `opts` and appends the valid ones to `scope`. Invalid
    /// options are reported and dropped. Position abbreviations are moved
    /// into the matching type scope.
    pub fn setup(&mut self, reg: &Registries, scope: Scope, opts: &OptionList, starred: bool) -> Vec<Diagnostic> {
        let float_type = match &scope {
            Scope::Type(t) => Some(t.as_str()),
            _ => None,
        };
        let ctx = ApplyCtx { reg, float_type };
        let (kept, diags) = self.validate(opts, ctx);
        let (moved, kept): (Vec<_>, Vec<_>) =
            kept.into_iter().partition(|e| matches!(e.key.as_str(), "figureposition" | "tableposition"));
        for e in moved {
            let ty = e.key.trim_end_matches("position").to_string();
            let mut l = OptionList::new();
            l.push("position", e.value.as_deref());
            let ts = self.types.entry(ty).or_default();
            ts.calls.push(l);
            ts.starred = true;
        }
        let list = OptionList { entries: kept };
        match scope {
            Scope::Package => self.package.push(list),
            Scope::Global => self.global.push(list),
            Scope::Type(t) => {
                let ts = self.types.entry(t).or_default();
                ts.calls.push(list);
                ts.starred |= starred;
            }
        }
        diags
    }

    /// Checks options for a scope or a local frame; returns the valid ones.
    pub fn validate(&mut self, opts: &OptionList, ctx: ApplyCtx<'_>) -> (Vec<OptionEntry>, Vec<Diagnostic>) {
        let mut kept = Vec::new();
        let mut diags = Vec::new();
        let mut scratch = CaptionSettings::initial(ctx.reg);
        for e in opts {
            let mut warnings = Vec::new();
            match apply_option(&mut scratch, e, ctx, &mut warnings) {
                Ok(()) => kept.push(e.clone()),
                Err(err) => diags.push(err.into()),
            }
            for w in warnings {
                if matches!(w, CaptionWarning::RaggedRightSubstituted) {
                    if self.ragged_warned {
                        continue;
                    }
                    self.ragged_warned = true;
                }
                diags.push(w.into());
            }
        }
        (kept, diags)
    }

    pub fn clear_setup(&mut self, scope: &str, keys: Option<&[String]>, starred: bool) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let Some(ts) = self.types.get_mut(scope) else {
            if !starred {
                diags.push(CaptionWarning::ListUndefined(scope.to_string()).into());
            }
            return diags;
        };
        match keys {
            None => ts.calls.clear(),
            Some(keys) => {
                for k in keys {
                    let mut found = false;
                    for call in &mut ts.calls {
                        found |= call.remove_key(k);
                    }
                    if !found && !starred {
                        diags.push(CaptionWarning::NotInList { option: k.clone(), list: scope.to_string() }.into());
                    }
                }
            }
        }
        diags
    }

    /// Each setup call of a scope on its own line, as written.
    pub fn show_setup(&self, scope: &Scope) -> String {
        let calls: &[OptionList] = match scope {
            Scope::Package => &self.package,
            Scope::Global => &self.global,
            Scope::Type(t) => self.types.get(t).map_or(&[], |ts| ts.calls.as_slice()),
        };
        calls.iter().map(|c| c.to_source() + "\n").collect()
    }

    pub fn unused_setups(&self) -> Vec<Diagnostic> {
        self.types
            .iter()
            .filter(|(_, ts)| !ts.consumed && !ts.starred)
            .map(|(name, _)| CaptionWarning::UnusedSetup(name.clone()).into())
            .collect()
    }

    pub fn mark_consumed(&mut self, float_type: &str) {
        if let Some(ts) = self.types.get_mut(float_type) {
            ts.consumed = true;
        }
    }

    /// Resolves without marking the type scope as consumed.
    pub fn peek(
        &self,
        reg: &Registries,
        float_type: Option<&str>,
        local: &[OptionList],
        ctx: ResolveCtx,
    ) -> (CaptionSettings, Vec<Diagnostic>) {
        let actx = ApplyCtx { reg, float_type };
        let mut s = CaptionSettings::initial(reg);
        let mut errors = Vec::new();
        let type_calls = float_type.and_then(|t| self.types.get(t)).map(|ts| ts.calls.as_slice()).unwrap_or(&[]);
        for list in self.package.iter().chain(&self.global).chain(type_calls).chain(local) {
            let (_, errs) = apply_list(&mut s, list, actx);
            errors.extend(errs);
        }
        finish(&mut s, ctx);
        (s, errors.into_iter().map(Diagnostic::from).collect())
    }

    pub fn resolve(
        &mut self,
        reg: &Registries,
        float_type: Option<&str>,
        local: &[OptionList],
        ctx: ResolveCtx,
    ) -> (CaptionSettings, Vec<Diagnostic>) {
        if let Some(t) = float_type {
            self.mark_consumed(t);
        }
        self.peek(reg, float_type, local, ctx)
    }
}

/// Mirrors margins on even pages of two-sided documents and applies the
/// margin bounds where both are absolute.
fn finish(s: &mut CaptionSettings, ctx: ResolveCtx) {
    if s.effective_sidedness(ctx.sidedness) == Sidedness::TwoSide && ctx.page.is_multiple_of(2) {
        std::mem::swap(&mut s.margin_left, &mut s.margin_right);
        if let Some((l, r)) = s.margin_star {
            s.margin_star = Some((r, l));
        }
    }
    for m in [&mut s.margin_left, &mut s.margin_right] {
        if !m.is_absolute() {
            continue;
        }
        if let Some(max) = s.maxmargin.filter(Dimension::is_absolute) {
            m.points = m.points.min(max.points);
        }
        if let Some(min) = s.minmargin.filter(Dimension::is_absolute) {
            m.points = m.points.max(min.points);
        }
    }
}
