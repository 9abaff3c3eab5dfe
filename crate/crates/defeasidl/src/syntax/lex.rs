//! Tokens shared by the `.dfl` and `.dl` formats.

use std::fmt;

use defeasidl_core::RuleKind;

/// 1-based line and column (columns count characters).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceLocation {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub location: SourceLocation,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    pub fn new(location: SourceLocation, expected: impl Into<String>, found: impl Into<String>) -> Self {
        ParseError {
            location,
            expected: expected.into(),
            found: found.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, found {}", self.location, self.expected, self.found)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    /// lowercase-, digit- or underscore-initial identifier
    Name(String),
    /// uppercase-initial identifier
    Variable(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    /// `:-`
    If,
    Arrow(RuleKind),
    Gt,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Name(n) | TokenKind::Variable(n) => format!("`{n}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::If => "`:-`".into(),
            TokenKind::Arrow(k) => format!("`{}`", k.arrow()),
            TokenKind::Gt => "`>`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub location: SourceLocation,
}

/// Splits `text` into tokens. Unknown characters are reported and skipped;
/// the token list always ends with `Eof`.
pub fn tokenize(text: &str) -> (Vec<Token>, Vec<ParseError>) {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);

    while let Some(&c) = chars.peek() {
        let location = SourceLocation { line, column };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '%' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                ident.push(c);
                bump(&mut chars);
            }
            let kind = if ident.starts_with(|c: char| c.is_ascii_uppercase()) {
                TokenKind::Variable(ident)
            } else {
                TokenKind::Name(ident)
            };
            tokens.push(Token { kind, location });
            continue;
        }
        bump(&mut chars);
        let kind = match c {
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ',' => Some(TokenKind::Comma),
            '.' => Some(TokenKind::Dot),
            '>' => Some(TokenKind::Gt),
            ':' if chars.peek() == Some(&'-') => {
                bump(&mut chars);
                Some(TokenKind::If)
            }
            ':' => Some(TokenKind::Colon),
            '-' | '=' | '~' if chars.peek() == Some(&'>') => {
                bump(&mut chars);
                Some(TokenKind::Arrow(match c {
                    '-' => RuleKind::Strict,
                    '=' => RuleKind::Defeasible,
                    _ => RuleKind::Defeater,
                }))
            }
            _ => None,
        };
        match kind {
            Some(kind) => tokens.push(Token { kind, location }),
            None => errors.push(ParseError::new(location, "a token", format!("`{c}`"))),
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        location: SourceLocation { line, column },
    });
    (tokens, errors)
}

/// Decodes `bytes` as UTF-8, reporting the position of the first bad byte.
pub fn decode_utf8(bytes: &[u8]) -> Result<&str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("prefix is valid");
        let line = valid.matches('\n').count() + 1;
        let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError::new(
            SourceLocation { line, column },
            "UTF-8 text",
            format!("byte 0x{:02x}", bytes[e.valid_up_to()]),
        )
    })
}

/// Cursor over a token list.
pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(tokens: Vec<Token>) -> Self {
        Cursor { tokens, pos: 0 }
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    pub fn peek_at(&self, offset: usize) -> &Token {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i]
    }

    pub fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    pub fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.next())
        } else {
            Err(self.error(&kind.describe()))
        }
    }

    pub fn error(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::new(t.location, expected, t.kind.describe())
    }

    /// Skips past the next `.` (or to the end) after an error.
    pub fn recover(&mut self) {
        while !self.at_eof() {
            if self.next().kind == TokenKind::Dot {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrows_and_locations() {
        let (tokens, errors) = tokenize("r: a -> b.\n% c\n  p :- not q.");
        assert!(errors.is_empty());
        let kinds: Vec<_> = tokens.iter().map(|t| t.kind.clone()).collect();
        assert_eq!(kinds[3], TokenKind::Arrow(RuleKind::Strict));
        let p = tokens.iter().find(|t| t.kind == TokenKind::Name("p".into())).unwrap();
        assert_eq!(p.location, SourceLocation { line: 3, column: 3 });
        assert!(kinds.contains(&TokenKind::If));
        assert_eq!(tokens.last().unwrap().kind, TokenKind::Eof);
    }

    #[test]
    fn bad_characters_are_reported() {
        let (_, errors) = tokenize("p & q");
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].location, SourceLocation { line: 1, column: 3 });
    }

    #[test]
    fn invalid_utf8() {
        let err = decode_utf8(b"ab\ncd\xff").unwrap_err();
        assert_eq!(err.location, SourceLocation { line: 2, column: 3 });
    }
}
