//! Finite measure spaces and simple functions on them.
//!
//! A [`MeasureSpace`] is a finite list of atoms with strictly positive rational
//! weights. A [`SimpleFunction`] assigns one scalar to each atom, which makes
//! `‖f‖_p^p = Σ_j w_j |f_j|^p` a finite sum. With rational values and an integral
//! exponent every quantity here is computed exactly.

use std::collections::HashSet;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{Exponent, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureSpace {
    atoms: Vec<String>,
    weights: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct SpaceDoc {
    atoms: Vec<Value>,
    weights: Vec<Value>,
}

impl MeasureSpace {
    pub fn new(atoms: Vec<String>, weights: Vec<BigRational>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::InvalidSpace(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        let mut seen = HashSet::new();
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate atom {a:?}")));
            }
        }
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::InvalidSpace(format!(
                "weight of atom {:?} is not positive",
                atoms[i]
            )));
        }
        Ok(Self { atoms, weights })
    }

    /// `n` atoms named `"0"`, `"1"`, ... with the given weights.
    pub fn with_weights(weights: Vec<BigRational>) -> Result<Self> {
        let atoms = (0..weights.len()).map(|i| i.to_string()).collect();
        Self::new(atoms, weights)
    }

    /// `n` atoms of weight one.
    pub fn uniform(n: usize) -> Self {
        Self::with_weights(vec![BigRational::from_integer(1.into()); n])
            .expect("unit weights are valid")
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(SpaceDoc {
            atoms: self.atoms.iter().map(|a| Value::String(a.clone())).collect(),
            weights: self.weights.iter().map(Scalar::to_json).collect(),
        })
        .expect("space document serializes")
    }

    /// Reads `{"atoms": [...], "weights": [{"num":..,"den":..}, ...]}`. Atom ids may be
    /// strings or numbers; weights may be `{num, den}` objects, integers, decimals or
    /// `"a/b"` strings.
    pub fn from_json(v: &Value) -> Result<Self> {
        let doc: SpaceDoc = serde_json::from_value(v.clone())?;
        let atoms = doc
            .atoms
            .iter()
            .map(|a| match a {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                other => Err(Error::Schema(format!("atom id must be a string or number, got {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = doc
            .weights
            .iter()
            .map(BigRational::from_json)
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms, weights)
    }
}

/// A function on the atoms of a measure space: one value per atom.
#[derive(Debug, Clone)]
pub struct SimpleFunction<S> {
    space: Arc<MeasureSpace>,
    values: Vec<S>,
}

impl<S: PartialEq> PartialEq for SimpleFunction<S> {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

fn same_space(a: &Arc<MeasureSpace>, b: &Arc<MeasureSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<S: Scalar> SimpleFunction<S> {
    pub fn new(space: Arc<MeasureSpace>, values: Vec<S>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::SpaceMismatch(format!(
                "{} values for a space of {} atoms",
                values.len(),
                space.len()
            )));
        }
        Ok(Self { space, values })
    }

    pub fn zero(space: Arc<MeasureSpace>) -> Self {
        let values = vec![S::zero(); space.len()];
        Self { space, values }
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn check_same_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch("functions live on different measure spaces".into()))
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&S, &S) -> S) -> Result<Self> {
        self.check_same_space(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| op(a, b)).collect();
        Ok(Self { space: self.space.clone(), values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, alpha: &S) -> Self {
        let values = self.values.iter().map(|v| alpha.clone() * v.clone()).collect();
        Self { space: self.space.clone(), values }
    }

    pub fn pointwise_abs(&self) -> Self {
        let values = self.values.iter().map(Signed::abs).collect();
        Self { space: self.space.clone(), values }
    }

    /// `Σ_j w_j |f_j|^p`.
    pub fn lp_norm_pow(&self, p: Exponent) -> Result<S> {
        let mut total = S::zero();
        for (v, w) in self.values.iter().zip(self.space.weights()) {
            if v.is_zero() {
                continue;
            }
            total = total + S::from_ratio(w) * v.pow_p(p)?;
        }
        Ok(total)
    }

    /// Floating-point norm. Exact comparisons should go through [`Self::lp_norm_pow`].
    pub fn lp_norm(&self, p: Exponent) -> Result<f64> {
        let pow = match self.lp_norm_pow(p) {
            Ok(v) => v.to_f64(),
            Err(Error::InexactExponent(_)) => self.to_f64().lp_norm_pow(p)?,
            Err(e) => return Err(e),
        };
        Ok(p.root(pow))
    }

    /// `v / max{‖v‖, 1}`.
    ///
    /// In exact mode the divisor is an exact `p`-th root when one exists and otherwise
    /// a rational approximation chosen so that the result still has norm at most one.
    pub fn normalize_tilde(&self, p: Exponent) -> Result<Self> {
        let pow = self.lp_norm_pow(p)?;
        if pow <= S::one() {
            return Ok(self.clone());
        }
        let factor = S::inverse_root_below(&pow, p)?;
        Ok(self.scale(&factor))
    }

    pub fn to_f64(&self) -> SimpleFunction<f64> {
        SimpleFunction {
            space: self.space.clone(),
            values: self.values.iter().map(Scalar::to_f64).collect(),
        }
    }

    pub fn values_json(&self) -> Value {
        Value::Array(self.values.iter().map(Scalar::to_json).collect())
    }

    pub fn from_values_json(space: Arc<MeasureSpace>, v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Schema("function must be an array of values".into()))?;
        let values = arr.iter().map(S::from_json).collect::<Result<Vec<_>>>()?;
        Self::new(space, values)
    }
}

impl SimpleFunction<BigRational> {
    /// Convenience constructor from `(num, den)` pairs.
    pub fn from_fracs(space: Arc<MeasureSpace>, values: &[(i64, i64)]) -> Result<Self> {
        let values = values
            .iter()
            .map(|&(n, d)| BigRational::new(n.into(), d.into()))
            .collect();
        Self::new(space, values)
    }
}
