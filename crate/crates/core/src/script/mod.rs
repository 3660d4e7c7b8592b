//! The context-script language: syntax tree, parser, canonical renderer and
//! semantic validation.

pub mod ast;
pub mod diagnostic;
pub mod parse;
pub mod render;
pub mod validate;

pub use ast::*;
pub use diagnostic::{has_errors, Diagnostic, DiagnosticCode, Severity};
pub use parse::{is_identifier, parse_script_set};
pub use render::render_script_set;
pub use validate::validate;
