//! JSON encodings shared by the library and the CLI. Rationals travel as
//! `[numerator, denominator]` pairs; integers that do not fit in `i64` are
//! written as decimal strings.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::exact_math::{Rat, RatPoint};
use crate::triangulation::Triangulation;

/// Serde adapter for a [`Rat`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JsonRat(pub Rat);

fn int_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(n.to_string()),
    }
}

fn parse_int(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(num) => num
            .as_i64()
            .map(BigInt::from)
            .or_else(|| num.as_u64().map(BigInt::from))
            .ok_or_else(|| format!("{num} is not an integer")),
        Value::String(s) => BigInt::from_str(s).map_err(|e| format!("bad integer {s:?}: {e}")),
        other => Err(format!("expected an integer, found {other}")),
    }
}

impl JsonRat {
    pub fn to_value(&self) -> Value {
        Value::Array(vec![int_value(self.0.numer()), int_value(self.0.denom())])
    }

    /// Accepts `[num, den]`, a bare integer, or a `"num/den"` string.
    pub fn from_value(v: &Value) -> Result<Self, String> {
        match v {
            Value::Array(pair) if pair.len() == 2 => {
                let num = parse_int(&pair[0])?;
                let den = parse_int(&pair[1])?;
                if den.is_zero() {
                    return Err("zero denominator".into());
                }
                Ok(JsonRat(Rat::new(num, den)))
            }
            Value::Number(_) => Ok(JsonRat(Rat::from_integer(parse_int(v)?))),
            Value::String(s) => parse_rat(s).map(JsonRat),
            other => Err(format!("expected a rational [num, den], found {other}")),
        }
    }
}

/// Parses `"a/b"` or `"a"`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|e| format!("bad rational {s:?}: {e}"))?;
    let den = BigInt::from_str(den).map_err(|e| format!("bad rational {s:?}: {e}"))?;
    if den.is_zero() {
        return Err(format!("bad rational {s:?}: zero denominator"));
    }
    Ok(Rat::new(num, den))
}

impl Serialize for JsonRat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_value().serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonRat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        JsonRat::from_value(&v).map_err(D::Error::custom)
    }
}

impl From<Rat> for JsonRat {
    fn from(r: Rat) -> Self {
        JsonRat(r)
    }
}

impl From<&Rat> for JsonRat {
    fn from(r: &Rat) -> Self {
        JsonRat(r.clone())
    }
}

pub fn point_to_json(p: &RatPoint) -> Vec<JsonRat> {
    p.coords().iter().map(JsonRat::from).collect()
}

pub fn point_from_json(coords: &[JsonRat]) -> RatPoint {
    RatPoint::new(coords.iter().map(|c| c.0.clone()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationJson {
    pub vertices: Vec<Vec<JsonRat>>,
    pub cells: Vec<Vec<usize>>,
}

impl TriangulationJson {
    pub fn from_triangulation(t: &Triangulation) -> Self {
        TriangulationJson {
            vertices: t.vertices().iter().map(point_to_json).collect(),
            cells: t.cells().to_vec(),
        }
    }
}
