//! The `.dl` Datalog¬ format: `head :- lit, ..., not lit.` and `head.`

use std::collections::BTreeMap;
use std::fmt::Write as _;

use defeasidl_core::compile::CompilationOutput;
use defeasidl_core::{Atom, DClause, DatalogProgram};

use super::dfl::atom;
use super::lex::{decode_utf8, tokenize, Cursor, ParseError, SourceLocation, TokenKind};

pub fn parse_datalog(text: &str) -> Result<DatalogProgram, Vec<ParseError>> {
    let (tokens, mut errors) = tokenize(text);
    let mut cursor = Cursor::new(tokens);
    let mut clauses = Vec::new();
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    while !cursor.at_eof() {
        match clause(&mut cursor) {
            Ok(located) => {
                for (location, a) in &located.atoms {
                    match arities.get(&a.predicate) {
                        Some(&n) if n != a.arity() => errors.push(ParseError::new(
                            *location,
                            format!("`{}` with arity {n}", a.predicate),
                            format!("arity {}", a.arity()),
                        )),
                        Some(_) => {}
                        None => {
                            arities.insert(a.predicate.clone(), a.arity());
                        }
                    }
                }
                clauses.push(located.clause);
            }
            Err(e) => {
                errors.push(e);
                cursor.recover();
            }
        }
    }
    if !errors.is_empty() {
        errors.sort_by_key(|e| e.location);
        return Err(errors);
    }
    Ok(DatalogProgram::new(clauses).expect("arities checked while parsing"))
}

pub fn parse_datalog_bytes(bytes: &[u8]) -> Result<DatalogProgram, Vec<ParseError>> {
    parse_datalog(decode_utf8(bytes).map_err(|e| vec![e])?)
}

struct Located {
    clause: DClause,
    atoms: Vec<(SourceLocation, Atom)>,
}

fn located_atom(c: &mut Cursor, atoms: &mut Vec<(SourceLocation, Atom)>) -> Result<Atom, ParseError> {
    let location = c.peek().location;
    let a = atom(c)?;
    atoms.push((location, a.clone()));
    Ok(a)
}

fn clause(c: &mut Cursor) -> Result<Located, ParseError> {
    let mut atoms = Vec::new();
    let head = located_atom(c, &mut atoms)?;
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    if c.peek().kind == TokenKind::If {
        c.next();
        loop {
            let negated = matches!(&c.peek().kind, TokenKind::Name(n) if n == "not")
                && matches!(c.peek_at(1).kind, TokenKind::Name(_));
            if negated {
                c.next();
                negative.push(located_atom(c, &mut atoms)?);
            } else {
                positive.push(located_atom(c, &mut atoms)?);
            }
            match c.peek().kind {
                TokenKind::Comma => {
                    c.next();
                }
                TokenKind::Dot => break,
                _ => return Err(c.error("`,` or `.`")),
            }
        }
    }
    c.expect(TokenKind::Dot)?;
    Ok(Located {
        clause: DClause::new(head, positive, negative),
        atoms,
    })
}

pub fn print_datalog(program: &DatalogProgram) -> String {
    program.to_string()
}

/// The compiled program with a `% SCHEMA SOURCE` comment above each clause.
pub fn emit_datalog_text(out: &CompilationOutput) -> String {
    let mut text = String::new();
    for (clause, provenance) in out.iter() {
        let _ = writeln!(text, "% {} {}", provenance.schema, provenance.source);
        let _ = writeln!(text, "{clause}");
    }
    text
}
