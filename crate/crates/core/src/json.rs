//! JSON encoding of scalars, polynomials and sequences. Rationals are
//! written as `"num/den"` strings so they survive a round trip exactly.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::polyseq::PolySeq;
use crate::scalar::{format_rational, parse_rational, Scalar};
use crate::Rational;

pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl JsonScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        v.as_str()
            .and_then(parse_rational)
            .ok_or_else(|| Error::Parse(format!("expected a rational string, got {v}")))
    }
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        json!(self)
    }

    fn from_json(v: &Value) -> Result<Self> {
        v.as_f64()
            .ok_or_else(|| Error::Parse(format!("expected a number, got {v}")))
    }
}

impl<S: JsonScalar> JsonScalar for Polynomial<S> {
    fn to_json(&self) -> Value {
        Value::Array(self.coeffs().iter().map(JsonScalar::to_json).collect())
    }

    fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse(format!("expected a coefficient array, got {v}")))?;
        Ok(Polynomial::new(
            arr.iter().map(S::from_json).collect::<Result<Vec<_>>>()?,
        ))
    }
}

/// Array of coefficient arrays.
pub fn polyseq_to_json<S: JsonScalar>(p: &PolySeq<S>) -> Value {
    Value::Array(p.coords().iter().map(JsonScalar::to_json).collect())
}

pub fn polyseq_from_json<S: JsonScalar>(v: &Value) -> Result<PolySeq<S>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("expected an array of coordinates".into()))?;
    let coords = arr
        .iter()
        .map(Polynomial::<S>::from_json)
        .collect::<Result<Vec<_>>>()?;
    Ok(PolySeq::from_coords_tight(coords))
}
