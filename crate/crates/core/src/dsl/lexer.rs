use super::{ErrorKind, ParseError};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    /// Unsigned decimal literal, kept as written.
    Number(String),
    /// Unsigned decimal literal with an `i` suffix (the suffix not kept).
    Imag(String),
    Sym(char),
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn text(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Number(s) => s.clone(),
            Tok::Imag(s) => format!("{s}i"),
            Tok::Sym(c) => c.to_string(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const SYMBOLS: &str = "=,()[]{};+-*|:";

/// Splits `src` into tokens. Lexical errors are returned alongside the
/// tokens; the offending line is cut short at the error.
pub(crate) fn tokenize(src: &str) -> (Vec<Token>, Vec<ParseError>) {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    for (li, raw) in src.split('\n').enumerate() {
        let line = li + 1;
        let chars: Vec<char> = raw.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                    column,
                });
                continue;
            }
            if c.is_ascii_digit()
                || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
            {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let next = chars.get(i).copied();
                let after = chars.get(i + 1).copied();
                let word =
                    |ch: Option<char>| ch.is_some_and(|ch| ch.is_ascii_alphanumeric() || ch == '_');
                if next == Some('i') && !word(after) {
                    i += 1;
                    tokens.push(Token {
                        tok: Tok::Imag(text),
                        line,
                        column,
                    });
                } else if matches!(next, Some('e' | 'E')) {
                    errors.push(ParseError::new(
                        ErrorKind::Syntax,
                        line,
                        i + 1,
                        "scientific notation is not supported",
                        format!("{text}{}", next.unwrap()),
                    ));
                    break;
                } else if word(next) {
                    errors.push(ParseError::new(
                        ErrorKind::Syntax,
                        line,
                        i + 1,
                        "malformed number",
                        format!("{text}{}", next.unwrap()),
                    ));
                    break;
                } else {
                    tokens.push(Token {
                        tok: Tok::Number(text),
                        line,
                        column,
                    });
                }
                continue;
            }
            if SYMBOLS.contains(c) {
                tokens.push(Token {
                    tok: Tok::Sym(c),
                    line,
                    column,
                });
                i += 1;
                continue;
            }
            errors.push(ParseError::new(
                ErrorKind::Syntax,
                line,
                column,
                "unexpected character",
                c.to_string(),
            ));
            break;
        }
        tokens.push(Token {
            tok: Tok::Newline,
            line,
            column: chars.len() + 1,
        });
    }
    let (line, column) = tokens.last().map(|t| (t.line, t.column)).unwrap_or((1, 1));
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    (tokens, errors)
}
