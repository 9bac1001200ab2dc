use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;

use super::types::FiniteType;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    /// `0X`
    ZeroX,
    /// `1X`
    OneX,
    /// `norm`, of type `1(X)`
    Norm,
    /// `c_p`, the exponent as a real
    Cp,
    /// `C`, the limit operator of type `X(X(0))`
    Limit,
}

impl Constant {
    pub fn ty(self) -> FiniteType {
        match self {
            Constant::ZeroX | Constant::OneX => FiniteType::Space,
            Constant::Norm => FiniteType::fun(FiniteType::one(), FiniteType::Space),
            Constant::Cp => FiniteType::one(),
            Constant::Limit => FiniteType::fun(
                FiniteType::Space,
                FiniteType::fun(FiniteType::Space, FiniteType::Nat),
            ),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Constant::ZeroX => "0X",
            Constant::OneX => "1X",
            Constant::Norm => "norm",
            Constant::Cp => "c_p",
            Constant::Limit => "C",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    /// Numeral of type `0`.
    Nat(BigUint),
    /// Non-negative rational literal of type `1`, written `2r` or `1/2r`.
    Real(BigRational),
    Const(Constant),
    App(Box<Term>, Box<Term>),
    Lam { var: String, ty: FiniteType, body: Box<Term> },
    Bin(BinOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_owned())
    }

    pub fn app(f: Term, x: Term) -> Self {
        Term::App(Box::new(f), Box::new(x))
    }

    pub fn lam(var: &str, ty: FiniteType, body: Term) -> Self {
        Term::Lam { var: var.to_owned(), ty, body: Box::new(body) }
    }

    pub fn bin(op: BinOp, a: Term, b: Term) -> Self {
        Term::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::Nat(_) | Term::Real(_) | Term::Const(_) => {}
            Term::App(a, b) | Term::Bin(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Term::Lam { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(a, b) | Term::Bin(_, a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Term::Lam { var, body, .. } => {
                out.insert(var.clone());
                body.collect_names(out);
            }
            _ => {}
        }
    }

    /// Capture-avoiding substitution of `with` for the free occurrences of `name`.
    pub fn substitute(&self, name: &str, with: &Term) -> Term {
        match self {
            Term::Var(v) if v == name => with.clone(),
            Term::Var(_) | Term::Nat(_) | Term::Real(_) | Term::Const(_) => self.clone(),
            Term::App(a, b) => Term::app(a.substitute(name, with), b.substitute(name, with)),
            Term::Bin(op, a, b) => Term::bin(*op, a.substitute(name, with), b.substitute(name, with)),
            Term::Lam { var, ty, body } => {
                if var == name || !body.free_vars().contains(name) {
                    return self.clone();
                }
                let fv = with.free_vars();
                if fv.contains(var) {
                    let mut avoid = fv;
                    body.collect_names(&mut avoid);
                    avoid.insert(name.to_owned());
                    let fresh = fresh_name(var, &avoid);
                    let renamed = body.substitute(var, &Term::Var(fresh.clone()));
                    Term::lam(&fresh, ty.clone(), renamed.substitute(name, with))
                } else {
                    Term::lam(var, ty.clone(), body.substitute(name, with))
                }
            }
        }
    }

    /// Infers the type of the term under the given context (innermost binding last).
    pub fn type_of(&self, ctx: &mut Vec<(String, FiniteType)>) -> Result<FiniteType> {
        match self {
            Term::Var(v) => ctx
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| Error::Type(format!("unbound variable {v}"))),
            Term::Nat(_) => Ok(FiniteType::Nat),
            Term::Real(_) => Ok(FiniteType::one()),
            Term::Const(c) => Ok(c.ty()),
            Term::App(f, x) => {
                let tf = f.type_of(ctx)?;
                let tx = x.type_of(ctx)?;
                match tf {
                    FiniteType::Fun { arg, res } if *arg == tx => Ok(*res),
                    FiniteType::Fun { arg, .. } => Err(Error::Type(format!(
                        "in {self}: argument {x} has type {tx}, expected {arg}"
                    ))),
                    _ => Err(Error::Type(format!("in {self}: {f} of type {tf} is not a function"))),
                }
            }
            Term::Lam { var, ty, body } => {
                ctx.push((var.clone(), ty.clone()));
                let tb = body.type_of(ctx);
                ctx.pop();
                Ok(FiniteType::fun(tb?, ty.clone()))
            }
            Term::Bin(op, a, b) => {
                let ta = a.type_of(ctx)?;
                let tb = b.type_of(ctx)?;
                let one = FiniteType::one();
                let ok = match op {
                    BinOp::Add | BinOp::Sub => {
                        ta == tb && (ta == FiniteType::Nat || ta == FiniteType::Space || ta == one)
                    }
                    BinOp::Mul => {
                        (ta == tb && (ta == FiniteType::Nat || ta == one)) || (ta == one && tb == FiniteType::Space)
                    }
                };
                if ok {
                    Ok(tb)
                } else {
                    Err(Error::Type(format!("in {self}: operator {} undefined on {ta} and {tb}", op.symbol())))
                }
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Term::Lam { .. } => 0,
            Term::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Term::Bin(BinOp::Mul, ..) => 2,
            _ => 3,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.prec() < ctx;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Term::Var(v) => write!(f, "{v}")?,
            Term::Nat(n) => write!(f, "{n}")?,
            Term::Real(r) => write!(f, "{r}r")?,
            Term::Const(c) => write!(f, "{}", c.symbol())?,
            Term::App(a, b) => {
                a.write(f, 3)?;
                write!(f, "(")?;
                b.write(f, 0)?;
                write!(f, ")")?;
            }
            Term::Lam { var, ty, body } => {
                write!(f, "\\{var}:{ty}. ")?;
                body.write(f, 0)?;
            }
            Term::Bin(op, a, b) => {
                let (l, r) = if *op == BinOp::Mul { (2, 3) } else { (1, 2) };
                a.write(f, l)?;
                write!(f, " {} ", op.symbol())?;
                b.write(f, r)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `=R`
    EqR,
    /// `<=R`
    LeR,
    /// `=0`
    EqNat,
    /// `<=0`
    LeNat,
    /// `=X`
    EqX,
    /// `<~`, the norm-wise bound relation at the type of its operands
    Preceq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::EqR => "=R",
            Relation::LeR => "<=R",
            Relation::EqNat => "=0",
            Relation::LeNat => "<=0",
            Relation::EqX => "=X",
            Relation::Preceq => "<~",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: String,
    pub ty: FiniteType,
    pub bound: Option<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Relation, Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant(Quantifier, Binder, Box<Formula>),
}

pub(crate) fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) && !super::parser::is_reserved(base) {
        return base.to_owned();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply of names")
}

impl Formula {
    pub fn quant(q: Quantifier, name: &str, ty: FiniteType, bound: Option<Term>, body: Formula) -> Self {
        Formula::Quant(q, Binder { name: name.to_owned(), ty, bound }, Box::new(body))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(..) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Quant(..) => false,
        }
    }

    /// The leading quantifier block and the formula under it.
    pub fn prefix(&self) -> (Vec<(Quantifier, &Binder)>, &Formula) {
        let mut out = Vec::new();
        let mut f = self;
        while let Formula::Quant(q, b, body) = f {
            out.push((*q, b));
            f = body;
        }
        (out, f)
    }

    pub fn with_prefix(prefix: Vec<(Quantifier, Binder)>, matrix: Formula) -> Self {
        prefix
            .into_iter()
            .rev()
            .fold(matrix, |body, (q, b)| Formula::Quant(q, b, Box::new(body)))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let term = |t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>| {
            for v in t.free_vars() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Atom(_, a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant(_, b, body) => {
                if let Some(t) = &b.bound {
                    term(t, bound, out);
                }
                bound.push(b.name.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Formula::Not(a) => a.collect_names(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Formula::Quant(_, b, body) => {
                out.insert(b.name.clone());
                if let Some(t) = &b.bound {
                    t.collect_names(out);
                }
                body.collect_names(out);
            }
        }
    }

    /// Capture-avoiding substitution of `with` for the free occurrences of `name`.
    pub fn substitute(&self, name: &str, with: &Term) -> Formula {
        match self {
            Formula::Atom(r, a, b) => Formula::Atom(*r, a.substitute(name, with), b.substitute(name, with)),
            Formula::Not(a) => Formula::Not(Box::new(a.substitute(name, with))),
            Formula::And(a, b) => Formula::And(Box::new(a.substitute(name, with)), Box::new(b.substitute(name, with))),
            Formula::Or(a, b) => Formula::Or(Box::new(a.substitute(name, with)), Box::new(b.substitute(name, with))),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.substitute(name, with)), Box::new(b.substitute(name, with)))
            }
            Formula::Quant(q, b, body) => {
                let bound = b.bound.as_ref().map(|t| t.substitute(name, with));
                if b.name == name || !body.free_vars().contains(name) {
                    return Formula::Quant(*q, Binder { bound, ..b.clone() }, body.clone());
                }
                let fv = with.free_vars();
                let (var, body) = if fv.contains(&b.name) {
                    let mut avoid = fv;
                    body.collect_names(&mut avoid);
                    avoid.insert(name.to_owned());
                    let fresh = fresh_name(&b.name, &avoid);
                    let renamed = body.substitute(&b.name, &Term::Var(fresh.clone()));
                    (fresh, renamed)
                } else {
                    (b.name.clone(), (**body).clone())
                };
                Formula::Quant(
                    *q,
                    Binder { name: var, ty: b.ty.clone(), bound },
                    Box::new(body.substitute(name, with)),
                )
            }
        }
    }

    /// Checks that every relation and bound is well typed. `free` declares the types of
    /// variables not bound inside the formula; any other free variable is an error.
    pub fn check(&self, free: &[(String, FiniteType)]) -> Result<()> {
        let mut ctx = free.to_vec();
        self.check_in(&mut ctx)
    }

    fn check_in(&self, ctx: &mut Vec<(String, FiniteType)>) -> Result<()> {
        match self {
            Formula::Atom(r, a, b) => {
                let ta = a.type_of(ctx)?;
                let tb = b.type_of(ctx)?;
                let want = match r {
                    Relation::EqR | Relation::LeR => Some(FiniteType::one()),
                    Relation::EqNat | Relation::LeNat => Some(FiniteType::Nat),
                    Relation::EqX => Some(FiniteType::Space),
                    Relation::Preceq => None,
                };
                let ok = match want {
                    Some(w) => ta == w && tb == w,
                    None => ta == tb,
                };
                if ok {
                    Ok(())
                } else {
                    Err(Error::Type(format!("in {self}: {} relates {ta} and {tb}", r.symbol())))
                }
            }
            Formula::Not(a) => a.check_in(ctx),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.check_in(ctx)?;
                b.check_in(ctx)
            }
            Formula::Quant(_, b, body) => {
                if let Some(t) = &b.bound {
                    let tt = t.type_of(ctx)?;
                    if tt != b.ty {
                        return Err(Error::Type(format!(
                            "bound {t} of {} has type {tt}, expected {}",
                            b.name, b.ty
                        )));
                    }
                }
                ctx.push((b.name.clone(), b.ty.clone()));
                let r = body.check_in(ctx);
                ctx.pop();
                r
            }
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Quant(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(..) => 4,
            Formula::Atom(..) => 5,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.prec() < ctx;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Formula::Atom(r, a, b) => write!(f, "{a} {} {b}", r.symbol())?,
            Formula::Not(a) => {
                write!(f, "~")?;
                a.write(f, 6)?;
            }
            Formula::And(a, b) => {
                a.write(f, 3)?;
                write!(f, " & ")?;
                b.write(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.write(f, 2)?;
                write!(f, " | ")?;
                b.write(f, 3)?;
            }
            Formula::Implies(a, b) => {
                a.write(f, 2)?;
                write!(f, " => ")?;
                b.write(f, 1)?;
            }
            Formula::Quant(q, b, body) => {
                let kw = match q {
                    Quantifier::Forall => "forall",
                    Quantifier::Exists => "exists",
                };
                write!(f, "{kw} {}:{}", b.name, b.ty)?;
                if let Some(t) = &b.bound {
                    write!(f, " <~ ")?;
                    t.write(f, 1)?;
                }
                write!(f, ". ")?;
                body.write(f, 0)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}
