use std::fmt;
use std::sync::Arc;

use super::{Span, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Implies,
    Equals,
    Turnstile,
    Assign,
    MapsTo,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Semi,
    Colon,
    Hash,
    Slash,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Implies => "=>",
            Tok::Equals => "==",
            Tok::Turnstile => "|-",
            Tok::Assign => ":=",
            Tok::MapsTo => "->",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Hash => "#",
            Tok::Slash => "/",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits `text` into tokens. `first_line` is the line number of the
/// first line of `text`.
pub fn lex(file: &Arc<str>, text: &str, first_line: usize) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let mut line = first_line;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let start = (line, col);
        col += 1;
        let two = |chars: &mut std::iter::Peekable<std::str::Chars>, next: char| {
            if chars.peek() == Some(&next) {
                chars.next();
                true
            } else {
                false
            }
        };
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => continue,
            '-' if chars.peek() == Some(&'-') => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        line += 1;
                        col = 1;
                        break;
                    }
                }
                continue;
            }
            '=' if two(&mut chars, '>') => Tok::Implies,
            '=' if two(&mut chars, '=') => Tok::Equals,
            '|' if two(&mut chars, '-') => Tok::Turnstile,
            ':' if two(&mut chars, '=') => Tok::Assign,
            '-' if two(&mut chars, '>') => Tok::MapsTo,
            '⇒' => Tok::Implies,
            '≡' => Tok::Equals,
            '⊢' => Tok::Turnstile,
            '∀' => Tok::Ident("forall".into()),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            '#' => Tok::Hash,
            '/' => Tok::Slash,
            c if is_ident_char(c) => {
                let mut s = String::from(c);
                while let Some(&d) = chars.peek() {
                    if !is_ident_char(d) {
                        break;
                    }
                    s.push(d);
                    chars.next();
                    col += 1;
                }
                Tok::Ident(s)
            }
            c => {
                return Err(SyntaxError::syntax(
                    Span::point(file, start.0, start.1),
                    format!("unexpected character `{c}`"),
                ))
            }
        };
        if matches!(
            tok,
            Tok::Implies | Tok::Equals | Tok::Turnstile | Tok::Assign | Tok::MapsTo
        ) && !matches!(c, '⇒' | '≡' | '⊢')
        {
            col += 1;
        }
        out.push(Token {
            tok,
            span: Span {
                file: file.clone(),
                line: start.0,
                col: start.1,
                end_line: line,
                end_col: col,
            },
        });
    }
    Ok(out)
}
