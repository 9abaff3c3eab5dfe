pub mod dfl;
pub mod dl;
pub mod lex;

pub use dfl::{format_theory, parse_theory, parse_theory_bytes};
pub use dl::{emit_datalog_text, parse_datalog, parse_datalog_bytes, print_datalog};
pub use lex::{ParseError, SourceLocation};
