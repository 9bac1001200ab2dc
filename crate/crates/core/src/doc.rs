//! JSON interchange documents.
//!
//! Every document carries `"schema": 1`. Rational scalars are written as
//! `{"num": .., "den": ..}` objects, floating scalars as plain numbers. Object keys
//! are emitted in sorted order, so equal values always serialize to equal bytes.

use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde_json::{json, Map, Value};

use crate::approx::{ApproximationWitness, Cell, Label, LpBasisCertificate, Mode, Verdict, VerifyOptions};
use crate::error::{Error, Result};
use crate::measure::{MeasureSpace, SimpleFunction};
use crate::scalar::{Exponent, Scalar};

pub const SCHEMA_VERSION: u64 = 1;

pub fn exponent_json(p: Exponent) -> Value {
    match p {
        Exponent::Integer(k) => json!(k),
        Exponent::Real(r) => json!(r),
    }
}

/// Reads an array of value arrays aligned to the atoms of `space`.
pub fn functions_from_json<S: Scalar>(space: &Arc<MeasureSpace>, v: &Value) -> Result<Vec<SimpleFunction<S>>> {
    let arr = match v {
        Value::Array(a) => a,
        Value::Object(m) => m
            .get("functions")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Schema("expected an array of functions".into()))?,
        _ => return Err(Error::Schema("expected an array of functions".into())),
    };
    arr.iter().map(|f| SimpleFunction::from_values_json(space.clone(), f)).collect()
}

/// Reads a single function: either a bare value array or a one-element array of arrays.
pub fn function_from_json<S: Scalar>(space: &Arc<MeasureSpace>, v: &Value) -> Result<SimpleFunction<S>> {
    match v.as_array() {
        Some(a) if a.len() == 1 && a[0].is_array() => SimpleFunction::from_values_json(space.clone(), &a[0]),
        _ => SimpleFunction::from_values_json(space.clone(), v),
    }
}

/// Whether every entry of a function document can be read as an exact rational.
pub fn is_rational_json(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(is_rational_json),
        Value::Object(m) if m.contains_key("functions") => m.get("functions").is_some_and(is_rational_json),
        other => BigRational::from_json(other).is_ok(),
    }
}

fn get<'a>(m: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| Error::Schema(format!("missing field {key:?}")))
}

fn get_u64(m: &Map<String, Value>, key: &str) -> Result<u64> {
    get(m, key)?
        .as_u64()
        .ok_or_else(|| Error::Schema(format!("field {key:?} must be a non-negative integer")))
}

fn scalars<S: Scalar>(v: &Value) -> Result<Vec<S>> {
    v.as_array()
        .ok_or_else(|| Error::Schema("expected an array of scalars".into()))?
        .iter()
        .map(S::from_json)
        .collect()
}

fn arrays<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Schema(format!("{what} must be an array")))
}

pub fn verdict_json(v: &Verdict) -> Value {
    serde_json::to_value(v).expect("verdict serializes")
}

/// Serializes a witness, optionally with the verdict that certifies it.
pub fn witness_to_json<S: Scalar>(
    w: &ApproximationWitness<S>,
    original_inputs: Option<&[SimpleFunction<S>]>,
    verdict: Option<&Verdict>,
) -> Value {
    let c = &w.certificate;
    let mut doc = json!({
        "schema": SCHEMA_VERSION,
        "kind": "approximation-witness",
        "arithmetic": if S::EXACT { "exact" } else { "float" },
        "mode": w.mode.to_string(),
        "p": exponent_json(c.p),
        "n": w.n(),
        "N": w.n_grid,
        "space": w.space().to_json(),
        "inputs": w.inputs.iter().map(SimpleFunction::values_json).collect::<Vec<_>>(),
        "cells": c.cells.iter().map(|cell| json!({
            "label": cell.label.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "atoms": cell.atoms,
        })).collect::<Vec<_>>(),
        "basis": c.basis.iter().map(SimpleFunction::values_json).collect::<Vec<_>>(),
        "weights": c.weights.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        "coords": w.coords.iter().map(|r| r.iter().map(Scalar::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "scales": w.scales,
        "dimension": w.dimension(),
        "error_bound_pow": w.error_bound_pow.to_json(),
        "dim_bound": w.dim_bound.to_string(),
    });
    let obj = doc.as_object_mut().expect("object");
    if let Some(orig) = original_inputs {
        obj.insert(
            "original_inputs".into(),
            Value::Array(orig.iter().map(SimpleFunction::values_json).collect()),
        );
    }
    if let Some(v) = verdict {
        obj.insert("verdict".into(), verdict_json(v));
    }
    doc
}

/// Reads a witness document. Returns the embedded verdict, if any, alongside.
pub fn witness_from_json<S: Scalar>(v: &Value) -> Result<(ApproximationWitness<S>, Option<Verdict>)> {
    let m = v.as_object().ok_or_else(|| Error::Schema("witness must be an object".into()))?;
    let schema = get_u64(m, "schema")?;
    if schema != SCHEMA_VERSION {
        return Err(Error::Schema(format!("unsupported schema version {schema}")));
    }
    let mode: Mode = get(m, "mode")?
        .as_str()
        .ok_or_else(|| Error::Schema("mode must be a string".into()))?
        .parse()?;
    let p = Exponent::new(
        get(m, "p")?
            .as_f64()
            .ok_or_else(|| Error::Schema("p must be a number".into()))?,
    )?;
    let n_grid = get_u64(m, "N")?;
    let space = Arc::new(MeasureSpace::from_json(get(m, "space")?)?);
    let inputs = functions_from_json::<S>(&space, get(m, "inputs")?)?;
    let cells = arrays(get(m, "cells")?, "cells")?
        .iter()
        .map(|c| {
            let label = arrays(c.get("label").unwrap_or(&Value::Null), "label")?
                .iter()
                .map(|l| {
                    l.as_str()
                        .ok_or_else(|| Error::Schema("label entries must be strings".into()))?
                        .parse::<Label>()
                })
                .collect::<Result<Vec<_>>>()?;
            let atoms = arrays(c.get("atoms").unwrap_or(&Value::Null), "atoms")?
                .iter()
                .map(|a| {
                    a.as_u64()
                        .map(|a| a as usize)
                        .ok_or_else(|| Error::Schema("atom indices must be integers".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Cell { label, atoms })
        })
        .collect::<Result<Vec<_>>>()?;
    let basis = functions_from_json::<S>(&space, get(m, "basis")?)?;
    let weights = scalars::<S>(get(m, "weights")?)?;
    let coords = arrays(get(m, "coords")?, "coords")?
        .iter()
        .map(scalars::<S>)
        .collect::<Result<Vec<_>>>()?;
    let scales = arrays(get(m, "scales")?, "scales")?
        .iter()
        .map(|s| match s {
            Value::Null => Ok(None),
            other => other
                .as_f64()
                .map(Some)
                .ok_or_else(|| Error::Schema("scales must be numbers or null".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    let error_bound_pow = S::from_json(get(m, "error_bound_pow")?)?;
    let dim_bound: BigUint = get(m, "dim_bound")?
        .as_str()
        .map(str::to_owned)
        .or_else(|| get(m, "dim_bound").ok().and_then(Value::as_u64).map(|v| v.to_string()))
        .ok_or_else(|| Error::Schema("dim_bound must be an integer".into()))?
        .parse()
        .map_err(|_| Error::Schema("dim_bound must be an integer".into()))?;
    let verdict = match m.get("verdict") {
        Some(v) => Some(serde_json::from_value(v.clone())?),
        None => None,
    };
    let witness = ApproximationWitness {
        mode,
        n_grid,
        inputs,
        certificate: LpBasisCertificate { p, cells, basis, weights },
        coords,
        scales,
        error_bound_pow,
        dim_bound,
    };
    Ok((witness, verdict))
}

/// A witness in whichever arithmetic its document declares.
#[derive(Debug, Clone)]
pub enum AnyWitness {
    Exact(ApproximationWitness<BigRational>),
    Float(ApproximationWitness<f64>),
}

impl AnyWitness {
    pub fn from_json(v: &Value) -> Result<(Self, Option<Verdict>)> {
        match v.get("arithmetic").and_then(Value::as_str) {
            Some("exact") => witness_from_json(v).map(|(w, r)| (AnyWitness::Exact(w), r)),
            Some("float") => witness_from_json(v).map(|(w, r)| (AnyWitness::Float(w), r)),
            other => Err(Error::Schema(format!("unknown arithmetic {other:?}"))),
        }
    }

    pub fn verify(&self, options: &VerifyOptions) -> Verdict {
        match self {
            AnyWitness::Exact(w) => crate::approx::verify_certificate(w, options),
            AnyWitness::Float(w) => crate::approx::verify_certificate(w, options),
        }
    }

    pub fn to_json(&self, verdict: Option<&Verdict>) -> Value {
        match self {
            AnyWitness::Exact(w) => witness_to_json(w, None, verdict),
            AnyWitness::Float(w) => witness_to_json(w, None, verdict),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}
