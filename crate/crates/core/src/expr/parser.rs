use thiserror::Error;

use super::ast::{BinOp, Expr, UnOp};
use super::lexer::{tokenize, Tok, Token};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("column {}: {message}", .offset + 1)]
pub struct ParseError {
    /// Byte offset into the parsed text.
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(offset: usize, message: impl Into<String>) -> Self {
        Self { offset, message: message.into() }
    }
}

const RESERVED: [&str; 5] = ["and", "or", "not", "true", "false"];

/// Recursive descent parser over a token slice. The STL parser drives it
/// directly to read atoms.
pub struct ExprParser<'a> {
    toks: &'a [Token],
    end: usize,
    pub pos: usize,
}

impl<'a> ExprParser<'a> {
    /// `end` is the byte length of the source, used for errors at end of input.
    pub fn new(toks: &'a [Token], end: usize) -> Self {
        Self { toks, end, pos: 0 }
    }

    pub fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&'a Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    pub fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.offset)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.offset(), msg)
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_word(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub fn parse_or(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_and()?;
        while self.eat(&Tok::OrOr) || self.eat_word("or") {
            let rhs = self.parse_and()?;
            lhs = Expr::bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_cmp()?;
        while self.eat(&Tok::AndAnd) || self.eat_word("and") {
            let rhs = self.parse_cmp()?;
            lhs = Expr::bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    pub fn comparison_op(&self) -> Option<BinOp> {
        Some(match self.peek()? {
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            _ => return None,
        })
    }

    pub fn parse_cmp(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.parse_add()?;
        if let Some(op) = self.comparison_op() {
            self.pos += 1;
            let rhs = self.parse_add()?;
            if self.comparison_op().is_some() {
                return Err(self.error("comparisons cannot be chained; add parentheses"));
            }
            return Ok(Expr::bin(op, lhs, rhs));
        }
        Ok(lhs)
    }

    pub fn parse_add(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_mul()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.parse_mul()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn parse_mul(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.parse_unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            if let Some(Tok::Num(v)) = self.peek() {
                self.pos += 1;
                return Ok(Expr::Num(-v));
            }
            return Ok(Expr::un(UnOp::Neg, self.parse_unary()?));
        }
        if self.eat(&Tok::Bang) || self.eat_word("not") {
            return Ok(Expr::un(UnOp::Not, self.parse_unary()?));
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<Expr, ParseError> {
        let start = self.offset();
        match self.peek() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(*v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.parse_or()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "true" => return Ok(Expr::Bool(true)),
                    "false" => return Ok(Expr::Bool(false)),
                    w if RESERVED.contains(&w) => {
                        return Err(ParseError::new(start, format!("unexpected keyword '{w}'")))
                    }
                    _ => {}
                }
                if self.peek() != Some(&Tok::LParen) {
                    return Ok(Expr::Var(name.clone()));
                }
                self.pos += 1;
                let mut args = vec![self.parse_or()?];
                while self.eat(&Tok::Comma) {
                    args.push(self.parse_or()?);
                }
                self.expect(&Tok::RParen, "')' after function arguments")?;
                let arity = |n: usize| {
                    if args.len() == n {
                        Ok(())
                    } else {
                        Err(ParseError::new(start, format!("{name} takes {n} argument(s), got {}", args.len())))
                    }
                };
                let unary = |op| -> Result<Expr, ParseError> {
                    arity(1)?;
                    Ok(Expr::un(op, args[0].clone()))
                };
                match name.as_str() {
                    "abs" => unary(UnOp::Abs),
                    "sin" => unary(UnOp::Sin),
                    "cos" => unary(UnOp::Cos),
                    "sqrt" => unary(UnOp::Sqrt),
                    "min" | "max" => {
                        arity(2)?;
                        let op = if name == "min" { BinOp::Min } else { BinOp::Max };
                        Ok(Expr::bin(op, args[0].clone(), args[1].clone()))
                    }
                    _ => Err(ParseError::new(start, format!("unknown function '{name}'"))),
                }
            }
            Some(t) => Err(self.error(format!("unexpected {}", describe(t)))),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("'{s}'"),
        other => format!("token {other:?}"),
    }
}

/// Parses a complete expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = ExprParser::new(&toks, src.len());
    let e = p.parse_or()?;
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

/// Parses `name = expr`, the form used by flow and reset declarations.
pub fn parse_assignment(src: &str) -> Result<(String, Expr), ParseError> {
    let toks = tokenize(src)?;
    let name = match toks.first() {
        Some(Token { tok: Tok::Ident(n), .. }) if !RESERVED.contains(&n.as_str()) => n.clone(),
        _ => return Err(ParseError::new(0, "expected 'name = expression'")),
    };
    let mut p = ExprParser::new(&toks, src.len());
    p.pos = 1;
    p.expect(&Tok::Assign, "'=' after the assigned name")?;
    let e = p.parse_or()?;
    if !p.at_end() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok((name, e))
}
