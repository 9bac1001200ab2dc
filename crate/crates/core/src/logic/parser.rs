//! Concrete syntax for terms and formulas.
//!
//! ```text
//! formula  := quant | implies
//! quant    := ("forall" | "exists") ident ":" type ("<~" term)? "." formula
//! implies  := or ("=>" implies)?
//! or       := and ("|" and)*
//! and      := unary ("&" unary)*
//! unary    := "~" unary | quant | "(" formula ")" | term rel term
//! rel      := "=R" | "<=R" | "=0" | "<=0" | "=X" | "<~"
//! term     := "\" ident ":" type "." term | sum
//! sum      := product (("+" | "-") product)*
//! product  := postfix ("*" postfix)*
//! postfix  := primary ("(" term ("," term)* ")")*
//! primary  := ident | numeral | numeral ("/" numeral)? "r" | "0X" | "1X"
//!           | "norm" | "c_p" | "C" | "(" term ")"
//! ```

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use super::formula::{BinOp, Binder, Constant, Formula, Quantifier, Relation, Term};
use super::types::{FiniteType, TypeParser};
use crate::error::{Error, Result};

const RESERVED: &[&str] = &["forall", "exists", "norm", "c_p", "C", "X", "lambda"];

pub(crate) fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

const ALIASES: &[(&str, &str)] = &[
    ("∀", "forall "),
    ("∃", "exists "),
    ("λ", "\\"),
    ("¬", "~"),
    ("∧", "&"),
    ("∨", "|"),
    ("⇒", "=>"),
    ("⪯", "<~"),
    ("≤", "<="),
];

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Parser<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax { pos: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn rest(&mut self) -> &'a str {
        self.skip_ws();
        &self.src[self.pos..]
    }

    fn peek(&mut self) -> Option<char> {
        self.rest().chars().next()
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(format!("expected {tok:?}")))
        }
    }

    /// Consumes a keyword only when it is not the prefix of a longer identifier.
    fn eat_keyword(&mut self, kw: &str) -> bool {
        let rest = self.rest();
        if rest.starts_with(kw) && !rest[kw.len()..].starts_with(is_ident_char) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        let rest = self.rest();
        if !rest.starts_with(is_ident_start) {
            return Err(self.err("expected identifier"));
        }
        let len = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
        let name = &rest[..len];
        if is_reserved(name) {
            return Err(self.err(format!("{name:?} is reserved")));
        }
        self.pos += len;
        Ok(name.to_owned())
    }

    fn numeral(&mut self) -> Option<BigUint> {
        let rest = self.rest();
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some(rest[..len].parse().expect("digits"))
    }

    fn ty(&mut self) -> Result<FiniteType> {
        self.skip_ws();
        let mut tp = TypeParser::new(self.src, self.pos);
        let t = tp.parse()?;
        self.pos = tp.pos;
        Ok(t)
    }

    fn formula(&mut self) -> Result<Formula> {
        if let Some(q) = self.quantifier_keyword() {
            return self.quant(q);
        }
        self.implies()
    }

    fn quantifier_keyword(&mut self) -> Option<Quantifier> {
        if self.eat_keyword("forall") {
            Some(Quantifier::Forall)
        } else if self.eat_keyword("exists") {
            Some(Quantifier::Exists)
        } else {
            None
        }
    }

    fn quant(&mut self, q: Quantifier) -> Result<Formula> {
        let name = self.ident()?;
        self.expect(":")?;
        let ty = self.ty()?;
        let bound = if self.eat("<~") { Some(self.term()?) } else { None };
        self.expect(".")?;
        let body = self.formula()?;
        Ok(Formula::Quant(q, Binder { name, ty, bound }, Box::new(body)))
    }

    fn implies(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat("=>") {
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            let rhs = self.and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat("~") {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if let Some(q) = self.quantifier_keyword() {
            return self.quant(q);
        }
        if self.peek() == Some('(') {
            let start = self.pos;
            self.pos += 1;
            if let Ok(f) = self.formula() {
                if self.eat(")") && self.relation_ahead().is_none() && !self.term_operator_ahead() {
                    return Ok(f);
                }
            }
            self.pos = start;
        }
        self.atom()
    }

    fn term_operator_ahead(&mut self) -> bool {
        matches!(self.peek(), Some('+' | '-' | '*' | '('))
    }

    fn relation_ahead(&mut self) -> Option<(Relation, usize)> {
        let rest = self.rest();
        const RELS: &[(&str, Relation)] = &[
            ("<=R", Relation::LeR),
            ("<=0", Relation::LeNat),
            ("<~", Relation::Preceq),
            ("=R", Relation::EqR),
            ("=0", Relation::EqNat),
            ("=X", Relation::EqX),
        ];
        RELS.iter().find(|(s, _)| rest.starts_with(s)).map(|(s, r)| (*r, s.len()))
    }

    fn atom(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        let Some((rel, len)) = self.relation_ahead() else {
            return Err(self.err("expected a relation (=R, <=R, =0, <=0, =X, <~)"));
        };
        self.pos += len;
        let rhs = self.term()?;
        Ok(Formula::Atom(rel, lhs, rhs))
    }

    fn term(&mut self) -> Result<Term> {
        if self.eat("\\") || self.eat_keyword("lambda") {
            let var = self.ident()?;
            self.expect(":")?;
            let ty = self.ty()?;
            self.expect(".")?;
            let body = self.term()?;
            return Ok(Term::Lam { var, ty, body: Box::new(body) });
        }
        self.sum()
    }

    fn sum(&mut self) -> Result<Term> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat("+") {
                BinOp::Add
            } else if !self.rest().starts_with("->") && self.eat("-") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.product()?;
            lhs = Term::bin(op, lhs, rhs);
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut lhs = self.postfix()?;
        while self.eat("*") {
            let rhs = self.postfix()?;
            lhs = Term::bin(BinOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> Result<Term> {
        let mut t = self.primary()?;
        while self.eat("(") {
            loop {
                let arg = self.term()?;
                t = Term::app(t, arg);
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term> {
        if self.eat("(") {
            let t = self.term()?;
            self.expect(")")?;
            return Ok(t);
        }
        for c in [Constant::Norm, Constant::Cp, Constant::Limit] {
            if self.eat_keyword(c.symbol()) {
                return Ok(Term::Const(c));
            }
        }
        if self.eat_keyword("0X") {
            return Ok(Term::Const(Constant::ZeroX));
        }
        if self.eat_keyword("1X") {
            return Ok(Term::Const(Constant::OneX));
        }
        let start = self.pos;
        if let Some(n) = self.numeral() {
            if self.src[self.pos..].starts_with('/') {
                self.pos += 1;
                let d = self.numeral().ok_or_else(|| self.err("expected denominator"))?;
                if d.is_zero() {
                    return Err(Error::Syntax { pos: start, message: "zero denominator".into() });
                }
                if !self.src[self.pos..].starts_with('r') {
                    return Err(self.err("rational literal must end in 'r'"));
                }
                self.pos += 1;
                return Ok(Term::Real(BigRational::new(n.into(), d.into())));
            }
            if self.src[self.pos..].starts_with('r') && !self.src[self.pos + 1..].starts_with(is_ident_char) {
                self.pos += 1;
                return Ok(Term::Real(BigRational::from_integer(n.into())));
            }
            if self.src[self.pos..].starts_with(is_ident_char) {
                return Err(self.err("malformed numeral"));
            }
            return Ok(Term::Nat(n));
        }
        match self.peek() {
            Some(c) if is_ident_start(c) => Ok(Term::Var(self.ident()?)),
            Some(c) => Err(self.err(format!("unexpected {c:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Rewrites Unicode notation into the ASCII grammar, keeping a map from offsets in the
/// rewritten text back to the original.
fn normalize(text: &str) -> (String, Vec<usize>) {
    let mut out = String::with_capacity(text.len());
    let mut origin = Vec::with_capacity(text.len() + 1);
    let mut i = 0;
    'outer: while i < text.len() {
        for (from, to) in ALIASES {
            if text[i..].starts_with(from) {
                out.push_str(to);
                origin.extend(std::iter::repeat_n(i, to.len()));
                i += from.len();
                continue 'outer;
            }
        }
        let c = text[i..].chars().next().expect("char boundary");
        out.push(c);
        origin.extend(std::iter::repeat_n(i, c.len_utf8()));
        i += c.len_utf8();
    }
    origin.push(text.len());
    (out, origin)
}

fn run<T>(text: &str, f: impl FnOnce(&mut Parser) -> Result<T>) -> Result<T> {
    let (src, origin) = normalize(text);
    let mut p = Parser { src: &src, pos: 0 };
    let out = f(&mut p).and_then(|t| {
        if p.rest().is_empty() {
            Ok(t)
        } else {
            Err(p.err("unexpected trailing input"))
        }
    });
    out.map_err(|e| match e {
        Error::Syntax { pos, message } => Error::Syntax { pos: origin[pos.min(origin.len() - 1)], message },
        other => other,
    })
}

/// Parses a formula without type checking it.
pub fn parse_formula(text: &str) -> Result<Formula> {
    run(text, |p| p.formula())
}

pub fn parse_term(text: &str) -> Result<Term> {
    run(text, |p| p.term())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::types::parse_type;

    fn round_trip(s: &str) {
        let f = parse_formula(s).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert_eq!(f.to_string(), s);
    }

    #[test]
    fn printer_is_inverse_on_normal_forms() {
        for s in [
            "forall a:0. exists b:0 <~ a. forall c:X. b <=0 a",
            "a + b * c =0 (a + b) * c",
            "norm(x + y) <=R norm(x) + norm(y)",
            "~(a =0 b) & (c =0 d | e =0 f)",
            "a =0 b => c =0 d => e =0 f",
            "(a =0 b => c =0 d) => e =0 f",
            "exists B:0(0) <~ (\\a:0. a). forall a:0. B(a) <=0 a",
            "1/2r * x =X C(\\n:0. x)",
            "(forall x:0. x <=0 x) & 0 =0 0",
            "a - (b - c) =0 a - b + c",
        ] {
            round_trip(s);
        }
    }

    #[test]
    fn sugar_and_aliases() {
        let a = parse_formula("∀a:0. ∃b:0 ⪯ a. ¬(b ≤0 a) ∧ f(a, b) =0 0").unwrap();
        let b = parse_formula("forall a:0. exists b:0 <~ a. ~(b <=0 a) & f(a)(b) =0 0").unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_term("λx:0. x").unwrap(), parse_term("\\x:0. x").unwrap());
    }

    #[test]
    fn literals() {
        assert_eq!(parse_term("2r").unwrap(), Term::Real(BigRational::from_integer(2.into())));
        assert_eq!(parse_term("0X").unwrap(), Term::Const(Constant::ZeroX));
        assert_eq!(parse_term("17").unwrap(), Term::Nat(17u32.into()));
        assert!(parse_term("1/0r").is_err());
        assert!(parse_term("12ab").is_err());
    }

    #[test]
    fn errors_point_into_the_original_text() {
        match parse_formula("∀a:0. a <=0").unwrap_err() {
            Error::Syntax { pos, .. } => assert_eq!(pos, "∀a:0. a <=0".len()),
            e => panic!("{e}"),
        }
        assert!(matches!(parse_formula("forall a:0 a =0 a"), Err(Error::Syntax { pos: 11, .. })));
        assert!(matches!(parse_formula("a =0"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse_formula("forall X:0. 0 =0 0"), Err(Error::Syntax { pos: 7, .. })));
    }

    #[test]
    fn type_checking() {
        let f = parse_formula("forall x:X. norm(x) <=R 1r").unwrap();
        assert!(f.check(&[]).is_ok());
        let bad = parse_formula("forall x:X. x <=0 x").unwrap();
        assert!(matches!(bad.check(&[]), Err(Error::Type(_))));
        let free = parse_formula("u <=0 v").unwrap();
        assert!(free.check(&[]).is_err());
        let decl = [("u".to_string(), FiniteType::Nat), ("v".to_string(), FiniteType::Nat)];
        assert!(free.check(&decl).is_ok());
        let lam = parse_formula("exists f:X(0) <~ \\n:0. x. 0 =0 0").unwrap();
        assert!(lam.check(&[("x".into(), parse_type("X").unwrap())]).is_ok());
    }

    #[test]
    fn substitution_avoids_capture() {
        let t = parse_term("\\a:0. b + a").unwrap();
        let s = t.substitute("b", &parse_term("a").unwrap());
        assert_eq!(s.to_string(), "\\a1:0. a + a1");
    }
}
