//! Options of older package generations and their modern equivalents.

use crate::diag::CaptionError;
use crate::optparse::{parse_option_list, OptionList};

pub const LEGACY_TABLE: &[(&str, &str)] = &[
    ("normal", "format=plain"),
    ("hang", "format=hang"),
    ("isu", "format=hang"),
    ("center", "justification=centering"),
    ("centerlast", "justification=centerlast"),
    ("nooneline", "singlelinecheck=off"),
    ("scriptsize", "font=scriptsize"),
    ("footnotesize", "font=footnotesize"),
    ("small", "font=small"),
    ("normalsize", "font=normalsize"),
    ("large", "font=large"),
    ("Large", "font=Large"),
    ("up", "labelfont=up"),
    ("it", "labelfont=it"),
    ("sl", "labelfont=sl"),
    ("sc", "labelfont=sc"),
    ("md", "labelfont=md"),
    ("bf", "labelfont=bf"),
    ("rm", "labelfont=rm"),
    ("sf", "labelfont=sf"),
    ("tt", "labelfont=tt"),
    ("flushleft", "justification=raggedright"),
    ("flushright", "justification=raggedleft"),
    ("oneline", "singlelinecheck=on"),
];

pub fn is_legacy(key: &str) -> bool {
    LEGACY_TABLE.iter().any(|(k, _)| *k == key)
}

/// The modern options for a legacy flag.
pub fn map_legacy(key: &str) -> Result<OptionList, CaptionError> {
    LEGACY_TABLE
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, modern)| parse_option_list(modern).expect("legacy table entry"))
        .ok_or_else(|| CaptionError::NotLegacy(key.to_string()))
}
