//! Defeasible theories in DL(∂||) and DL(∂||*), their compilation to
//! Datalog with negation, and the semantics needed to run and check the
//! compiled programs.
//!
//! The crate is `no_std` and only needs `alloc`. Text formats, random
//! generators and the command-line front end live in the `defeasidl` crate.
//!
//! Module map:
//!
//! - [`theory`]: the source language, validation, grounding and structural checks.
//! - [`oracle`]: forward-chaining closures computed straight from the inference rules.
//! - [`compile`]: emission of the compiled programs for team and individual defeat.
//! - [`datalog`]: the Datalog¬ representation and its dependency analyses.
//! - [`eval`]: grounding plus stratified, Fitting, well-founded and hybrid evaluation.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod compile;
pub mod datalog;
pub mod eval;
mod graph;
pub mod oracle;
pub mod theory;

#[cfg(test)]
pub(crate) mod fixtures;

pub use compile::{compile_individual, compile_team, compiled_size, CompilationOutput, DefeatMode};
pub use datalog::{DClause, DatalogProgram};
pub use eval::{eval_fitting, eval_hybrid, eval_stratified, eval_wellfounded, ThreeValuedInterpretation};
pub use oracle::{conclusions, ConclusionSet};
pub use theory::{
    complement, ground_theory, is_hierarchical, is_locally_hierarchical, is_range_restricted,
    theory_size, validate_theory, Atom, DefeasibleTheory, GroundTheory, Literal, Polarity, Rule,
    RuleKind, Term, ValidationReport,
};
