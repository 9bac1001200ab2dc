use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Finite types over the base types `0` (naturals) and `X` (the space).
///
/// `Fun { arg, res }` is written `res(arg)` and denotes `arg -> res`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FiniteType {
    Nat,
    Space,
    Fun { arg: Box<FiniteType>, res: Box<FiniteType> },
}

impl FiniteType {
    pub fn fun(res: FiniteType, arg: FiniteType) -> Self {
        FiniteType::Fun { arg: Box::new(arg), res: Box::new(res) }
    }

    /// The type `1 = 0(0)` of number-theoretic functions, used for reals.
    pub fn one() -> Self {
        FiniteType::fun(FiniteType::Nat, FiniteType::Nat)
    }

    /// Splits `ρ(τ_n)…(τ_1)` into the base `ρ` and the arguments `[τ_n, …, τ_1]`.
    pub fn decompose(&self) -> (&FiniteType, Vec<&FiniteType>) {
        let mut args = Vec::new();
        let mut t = self;
        while let FiniteType::Fun { arg, res } = t {
            args.push(arg.as_ref());
            t = res;
        }
        args.reverse();
        (t, args)
    }

    /// Builds `res(args[0])(args[1])…`.
    pub fn applied(res: FiniteType, args: impl IntoIterator<Item = FiniteType>) -> Self {
        args.into_iter().fold(res, FiniteType::fun)
    }

    pub fn is_base(&self) -> bool {
        !matches!(self, FiniteType::Fun { .. })
    }

    pub fn contains_space(&self) -> bool {
        match self {
            FiniteType::Nat => false,
            FiniteType::Space => true,
            FiniteType::Fun { arg, res } => arg.contains_space() || res.contains_space(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            FiniteType::Fun { arg, res } => 1 + arg.depth().max(res.depth()),
            _ => 0,
        }
    }

    /// Arrow notation, e.g. `0 -> 0 -> X` for `X(0)(0)`.
    pub fn arrow_string(&self) -> String {
        match self {
            FiniteType::Nat => "0".into(),
            FiniteType::Space => "X".into(),
            FiniteType::Fun { arg, res } => {
                let a = if arg.is_base() { arg.arrow_string() } else { format!("({})", arg.arrow_string()) };
                format!("{a} -> {}", res.arrow_string())
            }
        }
    }
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteType::Nat => write!(f, "0"),
            FiniteType::Space => write!(f, "X"),
            FiniteType::Fun { arg, res } => write!(f, "{res}({arg})"),
        }
    }
}

impl Serialize for FiniteType {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        s.collect_str(self)
    }
}

/// `ρ(0)…(0)` with `ρ ∈ {0, X}`.
pub fn is_small(t: &FiniteType) -> bool {
    t.decompose().1.iter().all(|a| **a == FiniteType::Nat)
}

/// `ρ(τ_n)…(τ_1)` with every `τ_i` small.
pub fn is_admissible(t: &FiniteType) -> bool {
    t.decompose().1.iter().all(|a| is_small(a))
}

/// Replaces every `X` by `0`.
pub fn hat_type(t: &FiniteType) -> FiniteType {
    match t {
        FiniteType::Nat | FiniteType::Space => FiniteType::Nat,
        FiniteType::Fun { arg, res } => FiniteType::fun(hat_type(res), hat_type(arg)),
    }
}

pub(crate) struct TypeParser<'a> {
    src: &'a str,
    pub(crate) pos: usize,
}

impl<'a> TypeParser<'a> {
    pub(crate) fn new(src: &'a str, pos: usize) -> Self {
        TypeParser { src, pos }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax { pos: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn parse(&mut self) -> Result<FiniteType> {
        let lhs = self.application()?;
        if self.eat("->") || self.eat("→") {
            let rhs = self.parse()?;
            return Ok(FiniteType::fun(rhs, lhs));
        }
        Ok(lhs)
    }

    fn application(&mut self) -> Result<FiniteType> {
        let mut t = self.primary()?;
        while self.peek() == Some('(') {
            self.eat("(");
            let arg = self.parse()?;
            if !self.eat(")") {
                return Err(self.err("expected ')' in type"));
            }
            t = FiniteType::fun(t, arg);
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<FiniteType> {
        match self.peek() {
            Some('0') => {
                self.pos += 1;
                Ok(FiniteType::Nat)
            }
            Some('1') => {
                self.pos += 1;
                Ok(FiniteType::one())
            }
            Some('X') => {
                self.pos += 1;
                Ok(FiniteType::Space)
            }
            Some('(') => {
                self.pos += 1;
                let t = self.parse()?;
                if !self.eat(")") {
                    return Err(self.err("expected ')' in type"));
                }
                Ok(t)
            }
            Some(c) => Err(self.err(format!("unexpected {c:?} in type"))),
            None => Err(self.err("unexpected end of input in type")),
        }
    }
}

/// Parses a type written in application style (`X(0)(0)`), with arrows (`0 -> 0 -> X`),
/// or mixing both. `1` abbreviates `0(0)`.
pub fn parse_type(text: &str) -> Result<FiniteType> {
    let mut p = TypeParser::new(text, 0);
    let t = p.parse()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after type"));
    }
    Ok(t)
}
