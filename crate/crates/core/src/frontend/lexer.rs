//! Tokenizer for PADL source text.

use super::ast::Span;
use super::diagnostic::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Dot,
    DotDot,
    Colon,
    Assign,
    Arrow,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Eof => "end of file".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Colon => ":",
            Tok::Assign => ":=",
            Tok::Arrow => "->",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits `src` into tokens. `%` starts a comment running to the end of the line.
///
/// The returned vector always ends with an `Eof` token.
pub fn tokenize(src: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        let peek = chars.get(i + 1).copied();
        let advance = |n: usize, i: &mut usize, col: &mut u32| {
            *i += n;
            *col += n as u32;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += (i - start) as u32;
                let word: String = chars[start..i].iter().collect();
                out.push(Token { tok: Tok::Ident(word), span });
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                col += (i - start) as u32;
                let digits: String = chars[start..i].iter().collect();
                match digits.parse::<i64>() {
                    Ok(v) => out.push(Token { tok: Tok::Int(v), span }),
                    Err(_) => errors.push(Diagnostic::error(
                        "E_LEX",
                        span,
                        format!("integer literal `{digits}` is out of range"),
                    )),
                }
            }
            _ => {
                let two = match (c, peek) {
                    ('.', Some('.')) => Some(Tok::DotDot),
                    (':', Some('=')) => Some(Tok::Assign),
                    ('-', Some('>')) => Some(Tok::Arrow),
                    ('!', Some('=')) => Some(Tok::Ne),
                    ('<', Some('=')) => Some(Tok::Le),
                    ('>', Some('=')) => Some(Tok::Ge),
                    _ => None,
                };
                if let Some(tok) = two {
                    out.push(Token { tok, span });
                    advance(2, &mut i, &mut col);
                    continue;
                }
                let one = match c {
                    '(' => Some(Tok::LParen),
                    ')' => Some(Tok::RParen),
                    '{' => Some(Tok::LBrace),
                    '}' => Some(Tok::RBrace),
                    ';' => Some(Tok::Semi),
                    ',' => Some(Tok::Comma),
                    '.' => Some(Tok::Dot),
                    ':' => Some(Tok::Colon),
                    '=' => Some(Tok::Eq),
                    '<' => Some(Tok::Lt),
                    '>' => Some(Tok::Gt),
                    '+' => Some(Tok::Plus),
                    '-' => Some(Tok::Minus),
                    _ => None,
                };
                match one {
                    Some(tok) => out.push(Token { tok, span }),
                    None => errors.push(Diagnostic::error(
                        "E_LEX",
                        span,
                        format!("unexpected character `{c}`"),
                    )),
                }
                advance(1, &mut i, &mut col);
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(out)
}
