use std::fmt;

use serde::Serialize;

use super::formula::{Binder, Formula, Quantifier, Relation, Term};
use super::types::{is_admissible, FiniteType};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    ForallFormula,
    ExistsFormula,
    DeltaSentence,
    SkolemForm,
    Other,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::ForallFormula => "forall-formula",
            Classification::ExistsFormula => "exists-formula",
            Classification::DeltaSentence => "delta-sentence",
            Classification::SkolemForm => "skolem-form",
            Classification::Other => "other",
        })
    }
}

impl std::str::FromStr for Classification {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "forall-formula" => Classification::ForallFormula,
            "exists-formula" => Classification::ExistsFormula,
            "delta-sentence" => Classification::DeltaSentence,
            "skolem-form" => Classification::SkolemForm,
            "other" => Classification::Other,
            _ => return Err(Error::Parameter(format!("unknown classification {s:?}"))),
        })
    }
}

/// `⪯` inside a quantifier-free matrix must stay at a base type, where it unfolds to a
/// quantifier-free comparison.
fn matrix_ok(f: &Formula, ctx: &mut Vec<(String, FiniteType)>) -> bool {
    match f {
        Formula::Atom(Relation::Preceq, a, _) => matches!(a.type_of(ctx), Ok(FiniteType::Nat | FiniteType::Space)),
        Formula::Atom(..) => true,
        Formula::Not(a) => matrix_ok(a, ctx),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => matrix_ok(a, ctx) && matrix_ok(b, ctx),
        Formula::Quant(..) => false,
    }
}

fn base_bounded(b: &Binder) -> bool {
    b.bound.is_none() || b.ty.is_base()
}

/// Classifies a formula whose free variables have the given types.
///
/// Labels are tried in order: a purely universal prefix gives `forall-formula`, a purely
/// (unbounded) existential one `exists-formula`, a bounded existential block with closed
/// bounds followed by universals `skolem-form`, and universals, bounded existentials,
/// universals `delta-sentence`. Quantifiers range over admissible types; bounded
/// universals count as universals at base types only.
pub fn classify_with(f: &Formula, free: &[(String, FiniteType)]) -> Result<Classification> {
    f.check(free)?;
    let (prefix, matrix) = f.prefix();
    let mut ctx = free.to_vec();
    ctx.extend(prefix.iter().map(|(_, b)| (b.name.clone(), b.ty.clone())));
    if !matrix.is_quantifier_free() || !matrix_ok(matrix, &mut ctx) {
        return Ok(Classification::Other);
    }
    if !prefix.iter().all(|(_, b)| is_admissible(&b.ty)) {
        return Ok(Classification::Other);
    }
    let universal = |(q, b): &(Quantifier, &Binder)| *q == Quantifier::Forall && base_bounded(b);
    let bounded_exists = |(q, b): &(Quantifier, &Binder)| *q == Quantifier::Exists && b.bound.is_some();
    if prefix.iter().all(universal) {
        return Ok(Classification::ForallFormula);
    }
    if prefix.iter().all(|(q, b)| *q == Quantifier::Exists && b.bound.is_none()) {
        return Ok(Classification::ExistsFormula);
    }
    let a_len = prefix.iter().take_while(|e| universal(e)).count();
    let b_len = prefix[a_len..].iter().take_while(|e| bounded_exists(e)).count();
    let c_ok = prefix[a_len + b_len..].iter().all(universal);
    if b_len == 0 || !c_ok {
        return Ok(Classification::Other);
    }
    let closed_free: Vec<&String> = free.iter().map(|(n, _)| n).collect();
    if a_len == 0 {
        let closed = prefix[..b_len].iter().all(|(_, b)| {
            let fv = b.bound.as_ref().map(Term::free_vars).unwrap_or_default();
            fv.iter().all(|v| closed_free.contains(&v))
        });
        return Ok(if closed { Classification::SkolemForm } else { Classification::Other });
    }
    if !free.is_empty() {
        return Ok(Classification::Other);
    }
    if prefix[..a_len].iter().any(|(_, b)| b.bound.is_some()) {
        return Ok(Classification::Other);
    }
    let a_names: Vec<&String> = prefix[..a_len].iter().map(|(_, b)| &b.name).collect();
    let bounds_ok = prefix[a_len..a_len + b_len].iter().all(|(_, b)| {
        let fv = b.bound.as_ref().map(Term::free_vars).unwrap_or_default();
        fv.iter().all(|v| a_names.contains(&v))
    });
    Ok(if bounds_ok { Classification::DeltaSentence } else { Classification::Other })
}

pub fn classify(f: &Formula) -> Result<Classification> {
    classify_with(f, &[])
}

/// `∀a̲ ∃b̲ ⪯ r̲a̲ ∀c̲ B₀`, split into its blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSentence {
    pub universal: Vec<Binder>,
    pub bounded: Vec<Binder>,
    pub inner: Vec<Binder>,
    pub matrix: Formula,
}

impl DeltaSentence {
    /// Accepts delta sentences and universal sentences (the latter with an empty
    /// existential block).
    pub fn from_formula(f: &Formula) -> Result<Self> {
        match classify(f)? {
            Classification::DeltaSentence | Classification::ForallFormula => {}
            other => return Err(Error::Precondition(format!("not a delta sentence: classified {other}"))),
        }
        let (prefix, matrix) = f.prefix();
        let a_len = prefix
            .iter()
            .take_while(|(q, b)| *q == Quantifier::Forall && b.bound.is_none())
            .count();
        let b_len = prefix[a_len..].iter().take_while(|(q, _)| *q == Quantifier::Exists).count();
        let take = |r: std::ops::Range<usize>| prefix[r].iter().map(|(_, b)| (*b).clone()).collect();
        Ok(DeltaSentence {
            universal: take(0..a_len),
            bounded: take(a_len..a_len + b_len),
            inner: take(a_len + b_len..prefix.len()),
            matrix: matrix.clone(),
        })
    }

    pub fn to_formula(&self) -> Formula {
        let prefix = self
            .universal
            .iter()
            .map(|b| (Quantifier::Forall, b.clone()))
            .chain(self.bounded.iter().map(|b| (Quantifier::Exists, b.clone())))
            .chain(self.inner.iter().map(|b| (Quantifier::Forall, b.clone())))
            .collect();
        Formula::with_prefix(prefix, self.matrix.clone())
    }

    /// Skolem function names, one per bounded existential, fresh for the sentence.
    pub fn skolem_names(&self) -> Vec<String> {
        let mut avoid = self.to_formula().names();
        self.bounded
            .iter()
            .map(|b| {
                let mut chars = b.name.chars();
                let base: String = match chars.next() {
                    Some(c) => c.to_uppercase().chain(chars).collect(),
                    None => "B".into(),
                };
                let name = super::formula::fresh_name(&base, &avoid);
                avoid.insert(name.clone());
                name
            })
            .collect()
    }

    /// `B(a₁)…(aₙ)` for the given Skolem function name.
    pub fn skolem_application(&self, name: &str) -> Term {
        self.universal
            .iter()
            .fold(Term::Var(name.to_owned()), |t, a| Term::app(t, Term::Var(a.name.clone())))
    }

    /// The matrix with each `b` replaced by its Skolem term.
    pub fn skolem_matrix(&self, names: &[String]) -> Formula {
        let mut m = self.matrix.clone();
        for (b, n) in self.bounded.iter().zip(names) {
            m = m.substitute(&b.name, &self.skolem_application(n));
        }
        m
    }
}

/// `∃B̲ ⪯ λa̲.r̲ ∀a̲ ∀c̲ B₀(a̲, B̲a̲, c̲)`. With no universal block in front of the
/// existentials the sentence is already in this form and is returned unchanged.
pub fn skolem_normal_form(delta: &DeltaSentence) -> Formula {
    if delta.universal.is_empty() {
        return delta.to_formula();
    }
    let names = delta.skolem_names();
    let mut prefix = Vec::new();
    for (b, name) in delta.bounded.iter().zip(&names) {
        let ty = FiniteType::applied(b.ty.clone(), delta.universal.iter().rev().map(|a| a.ty.clone()));
        let bound = b.bound.as_ref().map(|r| {
            delta
                .universal
                .iter()
                .rev()
                .fold(r.clone(), |t, a| Term::lam(&a.name, a.ty.clone(), t))
        });
        prefix.push((Quantifier::Exists, Binder { name: name.clone(), ty, bound }));
    }
    prefix.extend(delta.universal.iter().map(|a| (Quantifier::Forall, a.clone())));
    prefix.extend(delta.inner.iter().map(|c| (Quantifier::Forall, c.clone())));
    Formula::with_prefix(prefix, delta.skolem_matrix(&names))
}

/// Skolemizes a formula given as text-level AST. Errors unless it is a delta sentence.
pub fn skolemize(f: &Formula) -> Result<Formula> {
    DeltaSentence::from_formula(f).map(|d| skolem_normal_form(&d))
}
