use std::collections::BTreeMap;

use super::ast::Formula;
use super::StlError;
use crate::expr::{tokenize, ExprParser, ParseError, Tok};

/// Parses a formula.
pub fn parse(src: &str) -> Result<Formula, StlError> {
    parse_with_constants(src, &BTreeMap::new())
}

/// Parses a formula whose interval bounds may name constants, e.g.
/// `G[0,T] phi` with `T` supplied by the caller.
pub fn parse_with_constants(src: &str, constants: &BTreeMap<String, f64>) -> Result<Formula, StlError> {
    let toks = tokenize(src)?;
    let mut p = StlParser { p: ExprParser::new(&toks, src.len()), constants };
    let f = p.implies()?;
    if !p.p.at_end() {
        return Err(p.p.error("unexpected trailing input").into());
    }
    Ok(f)
}

struct StlParser<'a> {
    p: ExprParser<'a>,
    constants: &'a BTreeMap<String, f64>,
}

impl StlParser<'_> {
    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.p.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.p.eat_word("or") || self.p.eat(&Tok::OrOr) {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.p.eat_word("and") || self.p.eat(&Tok::AndAnd) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn bound(&mut self) -> Result<f64, ParseError> {
        let at = self.p.offset();
        let v = match self.p.peek() {
            Some(Tok::Num(v)) => *v,
            Some(Tok::Ident(w)) if w == "inf" => f64::INFINITY,
            Some(Tok::Ident(w)) => *self
                .constants
                .get(w)
                .ok_or_else(|| ParseError::new(at, format!("unknown constant '{w}' in interval")))?,
            _ => return Err(self.p.error("expected a number, 'inf' or a constant name")),
        };
        self.p.pos += 1;
        Ok(v)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.p.eat_word("not") || self.p.eat(&Tok::Bang) {
            return Ok(!self.unary()?);
        }
        if let (Some(Tok::Ident(op)), Some(Tok::LBracket)) = (self.p.peek(), self.p.peek_at(1)) {
            if op == "G" || op == "F" {
                let globally = op == "G";
                let at = self.p.offset();
                self.p.pos += 2;
                let a = self.bound()?;
                self.p.expect(&Tok::Comma, "',' between interval bounds")?;
                let b = self.bound()?;
                self.p.expect(&Tok::RBracket, "']'")?;
                if !(a >= 0.0 && a.is_finite() && a <= b) {
                    return Err(ParseError::new(at, format!("bad interval [{a}, {b}]")));
                }
                let child = self.unary()?;
                return Ok(if globally { Formula::globally(a, b, child) } else { Formula::eventually(a, b, child) });
            }
        }
        if self.p.peek() == Some(&Tok::LParen) {
            // Either a parenthesised formula or an atom that starts with a
            // parenthesised arithmetic term, e.g. `(x + y) > 1`.
            let save = self.p.pos;
            self.p.pos += 1;
            if let Ok(f) = self.implies() {
                if self.p.eat(&Tok::RParen) && !self.continues_arithmetic() {
                    return Ok(f);
                }
            }
            self.p.pos = save;
        }
        self.atom()
    }

    fn continues_arithmetic(&self) -> bool {
        matches!(self.p.peek(), Some(Tok::Plus | Tok::Minus | Tok::Star | Tok::Slash))
            || self.p.comparison_op().is_some()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let at = self.p.offset();
        let e = self.p.parse_cmp()?;
        Formula::atom(&e).ok_or_else(|| ParseError::new(at, format!("expected a comparison, found '{e}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_case_study_specs() {
        let f = parse("G[0,10] ((delta >= 0) and (delta <= 3.5) and (omega >= -2) and (omega <= 3))").unwrap();
        assert!(matches!(f, Formula::Globally(a, b, _) if a == 0.0 && b == 10.0));
        let g = parse("G[0,inf] (d > 5 + v)").unwrap();
        assert!(matches!(g, Formula::Globally(_, b, _) if b.is_infinite()));
    }

    #[test]
    fn parenthesised_terms_inside_atoms() {
        let f = parse("(x + 1) * 2 > y").unwrap();
        assert!(matches!(f, Formula::Atom(_)));
        let g = parse("((x)) > 0 and not (y < 1)").unwrap();
        assert!(matches!(g, Formula::And(..)));
    }

    #[test]
    fn constants_in_bounds() {
        let mut c = BTreeMap::new();
        c.insert("T".to_string(), 50.0);
        let f = parse_with_constants("F[0,T] x > 1", &c).unwrap();
        assert!(matches!(f, Formula::Eventually(_, b, _) if b == 50.0));
        assert!(parse("F[0,T] x > 1").is_err());
    }

    #[test]
    fn rejects_malformed_formulas() {
        for bad in ["G[0,10] x", "G[5,1] x > 0", "G[0,1 x > 0", "x > 0 and", "F[0,1]", "(x > 0"] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse("a > 0 => b > 0 => c > 0").unwrap();
        let Formula::Implies(_, rhs) = f else { panic!() };
        assert!(matches!(*rhs, Formula::Implies(..)));
    }

    #[test]
    fn printing_round_trips() {
        let f = parse("G[0,5] (x > 1 => F[1,inf] not (y <= 2 or x == 3))").unwrap();
        assert_eq!(parse(&f.to_string()).unwrap(), f);
    }
}
