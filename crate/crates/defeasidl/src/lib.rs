//! Text formats, random generators, differential checking and the
//! `defeasidl` command line, on top of `defeasidl-core`.

pub mod check;
pub mod cli;
pub mod random;
pub mod report;
pub mod syntax;

pub use defeasidl_core as core;
