//! Lexing, parsing, validation and pretty-printing of PADL descriptions.

pub mod ast;
pub mod diagnostic;
pub mod expr;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod validate;

pub use ast::*;
pub use diagnostic::{Diagnostic, Severity};
pub use parser::{parse, parse_equations, parse_expr};
pub use pretty::pretty_print;
pub use validate::{validate, EndpointError, ValidatedArchitecture};

/// Parses and validates in one step.
pub fn load(src: &str) -> Result<ValidatedArchitecture, Vec<Diagnostic>> {
    validate(&parse(src)?)
}
