//! The `.dfl` theory format.
//!
//! ```text
//! % comments run to the end of the line
//! penguin(tweety).
//! f: bird(freddie).            % fact labels are accepted and dropped
//! r1: bird(X) => fly(X).
//! r2: penguin(X) => neg fly(X).
//! r3: penguin(X) -> bird(X).
//! r4: injured(X) ~> neg fly(X).
//! r0: -> ok.
//! r2 > r1.
//! ```

use std::fmt::Write as _;

use defeasidl_core::{Atom, DefeasibleTheory, Literal, Polarity, Rule, Term};

use super::lex::{decode_utf8, tokenize, Cursor, ParseError, TokenKind};

pub fn parse_theory(text: &str) -> Result<DefeasibleTheory, Vec<ParseError>> {
    let (tokens, mut errors) = tokenize(text);
    let mut cursor = Cursor::new(tokens);
    let mut theory = DefeasibleTheory::new();
    while !cursor.at_eof() {
        if let Err(e) = statement(&mut cursor, &mut theory) {
            errors.push(e);
            cursor.recover();
        }
    }
    if errors.is_empty() {
        Ok(theory)
    } else {
        errors.sort_by_key(|e| e.location);
        Err(errors)
    }
}

/// Like [`parse_theory`], for raw file contents.
pub fn parse_theory_bytes(bytes: &[u8]) -> Result<DefeasibleTheory, Vec<ParseError>> {
    parse_theory(decode_utf8(bytes).map_err(|e| vec![e])?)
}

fn statement(c: &mut Cursor, theory: &mut DefeasibleTheory) -> Result<(), ParseError> {
    let first = c.peek().kind.clone();
    let second = c.peek_at(1).kind.clone();
    match (first, second) {
        (TokenKind::Name(label), TokenKind::Colon) => {
            c.next();
            c.next();
            let mut body = Vec::new();
            if !matches!(c.peek().kind, TokenKind::Arrow(_)) {
                body.push(literal(c)?);
                while c.peek().kind == TokenKind::Comma {
                    c.next();
                    body.push(literal(c)?);
                }
            }
            match c.peek().kind.clone() {
                TokenKind::Arrow(kind) => {
                    c.next();
                    let head = literal(c)?;
                    c.expect(TokenKind::Dot)?;
                    theory.rules.push(Rule::new(label, body, head, kind));
                }
                TokenKind::Dot if body.len() == 1 => {
                    c.next();
                    theory.facts.insert(body.pop().expect("one literal"));
                }
                _ => return Err(c.error("`->`, `=>` or `~>`")),
            }
        }
        (TokenKind::Name(superior), TokenKind::Gt) => {
            c.next();
            c.next();
            let inferior = match &c.peek().kind {
                TokenKind::Name(n) => n.clone(),
                _ => return Err(c.error("a rule label")),
            };
            c.next();
            c.expect(TokenKind::Dot)?;
            theory.superiority.insert((superior, inferior));
        }
        _ => {
            let fact = literal(c)?;
            match c.peek().kind {
                TokenKind::Dot => {
                    c.next();
                    theory.facts.insert(fact);
                }
                TokenKind::Arrow(_) | TokenKind::Comma => return Err(c.error("`.` (rules need a `label:`)")),
                _ => return Err(c.error("`.`")),
            }
        }
    }
    Ok(())
}

fn literal(c: &mut Cursor) -> Result<Literal, ParseError> {
    let negated = matches!(&c.peek().kind, TokenKind::Name(n) if n == "neg")
        && matches!(c.peek_at(1).kind, TokenKind::Name(_));
    if negated {
        c.next();
    }
    let atom = atom(c)?;
    Ok(Literal {
        atom,
        polarity: if negated { Polarity::Negative } else { Polarity::Positive },
    })
}

pub(crate) fn atom(c: &mut Cursor) -> Result<Atom, ParseError> {
    let predicate = match &c.peek().kind {
        TokenKind::Name(n) => n.clone(),
        _ => return Err(c.error("a literal")),
    };
    c.next();
    let mut args = Vec::new();
    if c.peek().kind == TokenKind::LParen {
        c.next();
        loop {
            args.push(term(c)?);
            match c.peek().kind {
                TokenKind::Comma => {
                    c.next();
                }
                TokenKind::RParen => {
                    c.next();
                    break;
                }
                _ => return Err(c.error("`,` or `)`")),
            }
        }
    }
    Ok(Atom::new(predicate, args))
}

fn term(c: &mut Cursor) -> Result<Term, ParseError> {
    let t = match &c.peek().kind {
        TokenKind::Name(n) => Term::constant(n.clone()),
        TokenKind::Variable(v) => Term::var(v.clone()),
        _ => return Err(c.error("a constant or variable")),
    };
    c.next();
    if c.peek().kind == TokenKind::LParen {
        return Err(c.error("`,` or `)` (function symbols are not allowed)"));
    }
    Ok(t)
}

/// One statement per line: facts, then rules, then superiority pairs.
pub fn format_theory(theory: &DefeasibleTheory) -> String {
    let mut out = String::new();
    for fact in &theory.facts {
        let _ = writeln!(out, "{fact}.");
    }
    for rule in &theory.rules {
        let _ = writeln!(out, "{rule}.");
    }
    for (t, s) in &theory.superiority {
        let _ = writeln!(out, "{t} > {s}.");
    }
    out
}
