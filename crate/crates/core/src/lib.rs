//! Caption layout engine.
//!
//! Captions are configured with a key/value option language, composed from
//! user-extensible templates and laid out on a grid of monospaced cells.

pub mod diag;
pub mod document;
pub mod layout;
pub mod optparse;
pub mod registry;
pub mod render;
pub mod scenario;
pub mod settings;

pub use diag::{CaptionError, CaptionWarning, Diagnostic, Severity};
pub use document::{CaptionOutput, CaptionRequest, Document, ListEntry};
pub use layout::{CellMetrics, LayoutBox, Line};
pub use optparse::{parse_bool, parse_dimension, parse_option_list, Dimension, OptionEntry, OptionList};
pub use registry::{FontSpec, Registries};
pub use render::{render_box, OutputFormat};
pub use scenario::{RunResult, Scenario, ScenarioError};
pub use settings::{CaptionSettings, Position, ResolveCtx, Scope, SettingsStore, Sidedness};
