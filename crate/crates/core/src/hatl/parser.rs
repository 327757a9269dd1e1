use super::ast::{Arg, Call, Ref, Script, Span, Stmt, Value};
use super::lexer::{tokenize, Tok, Token};
use super::{HatlError, HatlErrorKind};

/// Deepest dotted reference accepted, e.g. `model_copy.Trans` or `t.guard`.
const MAX_REF_DEPTH: usize = 3;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: Span,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.eof, |t| t.span)
    }

    fn err(&self, msg: impl Into<String>) -> HatlError {
        HatlError::new(HatlErrorKind::Syntax, self.span(), msg)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), HatlError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.err(format!("expected {what}, found {}", self.describe())))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of script".into(),
            Some(Tok::Ident(s)) => format!("'{s}'"),
            Some(Tok::Str(s)) => format!("string \"{s}\""),
            Some(Tok::Num(v)) => format!("number {v}"),
            Some(Tok::End) => "end of line".into(),
            Some(Tok::Dot) => "'.'".into(),
            Some(Tok::Comma) => "','".into(),
            Some(Tok::LParen) => "'('".into(),
            Some(Tok::RParen) => "')'".into(),
            Some(Tok::LBrace) => "'{'".into(),
            Some(Tok::RBrace) => "'}'".into(),
            Some(Tok::Assign) => "'='".into(),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, HatlError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err(format!("expected {what}, found {}", self.describe()))),
        }
    }

    fn skip_ends(&mut self) {
        while self.eat(&Tok::End) {}
    }

    fn dotted(&mut self) -> Result<Ref, HatlError> {
        let span = self.span();
        let mut path = vec![self.ident("a name")?];
        while self.eat(&Tok::Dot) {
            path.push(self.ident("a name after '.'")?);
        }
        Ok(Ref { path, span })
    }

    fn args(&mut self) -> Result<Vec<Arg>, HatlError> {
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            let arg = match self.peek() {
                Some(Tok::Str(s)) => {
                    let a = Arg::Str(s.clone());
                    self.pos += 1;
                    a
                }
                Some(Tok::Num(v)) => {
                    let a = Arg::Num(*v);
                    self.pos += 1;
                    a
                }
                Some(Tok::Ident(_)) => {
                    let r = self.dotted()?;
                    if self.peek() == Some(&Tok::LParen) {
                        return Err(self.err("method calls cannot be used as arguments; assign the result first"));
                    }
                    check_depth(&r)?;
                    Arg::Ref(r)
                }
                _ => return Err(self.err(format!("expected an argument, found {}", self.describe()))),
            };
            args.push(arg);
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            self.expect(&Tok::Comma, "',' or ')'")?;
        }
    }

    /// A dotted reference, optionally followed by a call.
    fn value(&mut self) -> Result<Value, HatlError> {
        let r = self.dotted()?;
        if !self.eat(&Tok::LParen) {
            check_depth(&r)?;
            return Ok(Value::Ref(r));
        }
        if r.path.len() < 2 {
            return Err(HatlError::new(
                HatlErrorKind::Syntax,
                r.span,
                format!("'{}' is called without a receiver; write receiver.{}(...)", r.path[0], r.path[0]),
            ));
        }
        let mut receiver = r.clone();
        let method = receiver.path.pop().expect("at least two segments");
        check_depth(&receiver)?;
        let args = self.args()?;
        Ok(Value::Call(Call { receiver, method, args, span: r.span }))
    }

    fn end_of_stmt(&mut self) -> Result<(), HatlError> {
        match self.peek() {
            None | Some(Tok::RBrace) => Ok(()),
            Some(Tok::End) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected end of statement, found {}", self.describe()))),
        }
    }

    fn block(&mut self, nested: bool) -> Result<Vec<Stmt>, HatlError> {
        let mut stmts = Vec::new();
        loop {
            self.skip_ends();
            match self.peek() {
                None if nested => return Err(self.err("missing '}' to close the loop body")),
                None => return Ok(stmts),
                Some(Tok::RBrace) if nested => return Ok(stmts),
                Some(Tok::RBrace) => return Err(self.err("unmatched '}'")),
                _ => {}
            }
            stmts.push(self.stmt()?);
            self.end_of_stmt()?;
        }
    }

    fn stmt(&mut self) -> Result<Stmt, HatlError> {
        let span = self.span();
        match self.peek() {
            Some(Tok::Ident(kw)) if kw == "formode" || kw == "fortran" => {
                let is_mode = kw == "formode";
                self.pos += 1;
                let var = self.ident("a loop variable")?;
                self.expect(&Tok::Assign, "'=' after the loop variable")?;
                let collection = self.dotted()?;
                check_depth(&collection)?;
                self.expect(&Tok::LBrace, "'{' to open the loop body")?;
                let body = self.block(true)?;
                self.expect(&Tok::RBrace, "'}'")?;
                Ok(if is_mode {
                    Stmt::ForMode { var, collection, body, span }
                } else {
                    Stmt::ForTrans { var, collection, body, span }
                })
            }
            Some(Tok::Ident(_)) => {
                if self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::Assign) {
                    let name = self.ident("a name")?;
                    self.pos += 1;
                    let value = self.value()?;
                    return Ok(Stmt::Assign { name, value, span });
                }
                match self.value()? {
                    Value::Call(c) => Ok(Stmt::Call(c)),
                    Value::Ref(r) => Err(HatlError::new(
                        HatlErrorKind::Syntax,
                        span,
                        format!("'{r}' on its own does nothing; expected a call or an assignment"),
                    )),
                }
            }
            _ => Err(self.err(format!("expected a statement, found {}", self.describe()))),
        }
    }
}

fn check_depth(r: &Ref) -> Result<(), HatlError> {
    if r.path.len() > MAX_REF_DEPTH {
        return Err(HatlError::new(
            HatlErrorKind::Syntax,
            r.span,
            format!("reference '{r}' is nested deeper than {MAX_REF_DEPTH} levels"),
        ));
    }
    Ok(())
}

/// Parses HATL source text.
pub fn parse_script(src: &str) -> Result<Script, HatlError> {
    let toks = tokenize(src)?;
    let lines = src.lines().count().max(1);
    let eof = Span { line: lines, column: src.lines().last().map_or(1, |l| l.chars().count() + 1) };
    let mut p = Parser { toks, pos: 0, eof };
    Ok(Script { stmts: p.block(false)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_loops_and_calls() {
        let s = parse_script("x = model.copyModel()\nformode m = x.Mode {\n  fortran t = model.Trans { t.addResetLabel(\"c = 0\") }\n}\n").unwrap();
        assert_eq!(s.stmts.len(), 2);
        let Stmt::ForMode { body, .. } = &s.stmts[1] else { panic!() };
        assert!(matches!(&body[0], Stmt::ForTrans { body, .. } if body.len() == 1));
    }

    #[test]
    fn spans_point_at_statements() {
        let err = parse_script("model.addParam(\"a\")\n\n   model.addParam(\"b\" \"c\")").unwrap_err();
        assert_eq!((err.line, err.column), (3, 23));
    }

    #[test]
    fn semicolons_separate_statements() {
        let s = parse_script("model.addParam(\"a\"); model.addParam(\"b\")").unwrap();
        assert_eq!(s.stmts.len(), 2);
    }

    #[test]
    fn deep_references_are_rejected() {
        assert!(parse_script("x = a.b.c.d").is_err());
        assert!(parse_script("x = a.b.c").is_ok());
    }

    #[test]
    fn printing_round_trips() {
        let src = "m2 = model.copyModel()\nformode m = model.Mode {\n    c = model.addMode(m)\n    m.replace(c.flow, \"a\\\"b\", -2.5)\n}\n";
        let s = parse_script(src).unwrap();
        assert_eq!(s.to_source(), src);
        assert_eq!(parse_script(&s.to_source()).unwrap(), s);
    }
}
