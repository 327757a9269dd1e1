use super::ast::Span;
use super::{HatlError, HatlErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    Dot,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Assign,
    /// Newline or `;`.
    End,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, HatlError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let (mut line, mut line_start) = (1usize, 0usize);
    while let Some(&(i, c)) = chars.peek() {
        let span = Span { line, column: src[line_start..i].chars().count() + 1 };
        let err = |msg: String| HatlError::new(HatlErrorKind::Syntax, span, msg);
        match c {
            '\n' | ';' => {
                chars.next();
                if c == '\n' {
                    line += 1;
                    line_start = i + 1;
                }
                out.push(Token { tok: Tok::End, span });
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                    chars.next();
                }
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((_, '\\')) => match chars.next() {
                            Some((_, 'n')) => s.push('\n'),
                            Some((_, 't')) => s.push('\t'),
                            Some((_, c @ ('"' | '\\'))) => s.push(c),
                            _ => return Err(err("invalid escape in string literal".into())),
                        },
                        Some((_, '\n')) | None => return Err(err("unterminated string literal".into())),
                        Some((_, c)) => s.push(c),
                    }
                }
                out.push(Token { tok: Tok::Str(s), span });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(Token { tok: Tok::Ident(s), span });
            }
            c if c.is_ascii_digit() || c == '-' => {
                let mut s = String::new();
                s.push(c);
                chars.next();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '.' || ((c == '-' || c == '+') && s.ends_with(['e', 'E'])) {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let v = s.parse::<f64>().map_err(|_| err(format!("malformed number '{s}'")))?;
                out.push(Token { tok: Tok::Num(v), span });
            }
            _ => {
                chars.next();
                let tok = match c {
                    '.' => Tok::Dot,
                    ',' => Tok::Comma,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '=' => Tok::Assign,
                    other => return Err(err(format!("unexpected character '{other}'"))),
                };
                out.push(Token { tok, span });
            }
        }
    }
    Ok(out)
}
