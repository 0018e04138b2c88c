//! Scalar backends.
//!
//! Every algebraic structure in the crate is generic over [`Scalar`]. Two
//! backends matter in practice: exact rationals ([`Rational`]) for the
//! unipotent statements, and double-precision complex numbers ([`C64`]) for
//! anything that needs a logarithm of an eigenvalue. `f64` is supported for
//! real-only work.

use std::fmt::Debug;
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::tolerance::DEFAULT_TOL;

pub type Rational = BigRational;
pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Real,
    Complex,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Real => "real",
            Backend::Complex => "complex",
        })
    }
}

pub trait Scalar:
    nalgebra::Scalar
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
{
    const EXACT: bool;
    const BACKEND: Backend;

    fn from_i64(v: i64) -> Self;

    fn from_rational(q: &Rational) -> Self;

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(num.into(), den.into()))
    }

    /// Absolute value as a double; used for tolerance checks and pivoting.
    fn magnitude(&self) -> f64;

    fn to_complex(&self) -> C64;

    /// `None` when the value cannot be represented in this backend.
    fn from_complex(z: C64) -> Option<Self>;

    fn default_tol() -> f64 {
        if Self::EXACT {
            0.0
        } else {
            DEFAULT_TOL
        }
    }

    /// Exact backends only treat an actual zero as negligible.
    fn is_negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol
        }
    }

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;
}

fn parse_bigint(v: &Value, field: &str) -> Result<BigInt> {
    match v {
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("{field}: {e}"))),
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("{field}: expected an integer, got {n}"))),
        other => Err(Error::Parse(format!("{field}: expected integer string, got {other}"))),
    }
}

/// `{"num","den"}` (den optional) or a plain JSON integer.
fn parse_rational(v: &Value) -> Result<Option<Rational>> {
    if let Some(i) = v.as_i64() {
        return Ok(Some(Rational::from_integer(i.into())));
    }
    let Some(obj) = v.as_object() else {
        return Ok(None);
    };
    let Some(num) = obj.get("num") else {
        return Ok(None);
    };
    let num = parse_bigint(num, "num")?;
    let den = match obj.get("den") {
        Some(d) => parse_bigint(d, "den")?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(Some(Rational::new(num, den)))
}

fn parse_complex(v: &Value) -> Result<C64> {
    if let Some(q) = parse_rational(v)? {
        return Ok(C64::new(q.to_f64().unwrap_or(f64::NAN), 0.0));
    }
    if let Some(x) = v.as_f64() {
        return Ok(C64::new(x, 0.0));
    }
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse(format!("expected a coefficient object, got {v}")))?;
    let part = |name: &str| -> Result<f64> {
        match obj.get(name) {
            None => Ok(0.0),
            Some(x) => x
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("{name}: expected a number, got {x}"))),
        }
    };
    if !obj.contains_key("re") && !obj.contains_key("im") {
        return Err(Error::Parse(format!("expected re/im or num/den, got {v}")));
    }
    let z = C64::new(part("re")?, part("im")?);
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Parse("non-finite coefficient".into()));
    }
    Ok(z)
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const BACKEND: Backend = Backend::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(v.into())
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn to_complex(&self) -> C64 {
        C64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn from_complex(_: C64) -> Option<Self> {
        None
    }

    fn to_json(&self) -> Value {
        json!({ "num": self.numer().to_string(), "den": self.denom().to_string() })
    }

    fn from_json(v: &Value) -> Result<Self> {
        parse_rational(v)?.ok_or_else(|| {
            Error::Parse(format!(
                "exact backend needs integer or {{\"num\",\"den\"}} coefficients, got {v}"
            ))
        })
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;
    const BACKEND: Backend = Backend::Complex;

    fn from_i64(v: i64) -> Self {
        C64::new(v as f64, 0.0)
    }

    fn from_rational(q: &Rational) -> Self {
        C64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn to_complex(&self) -> C64 {
        *self
    }

    fn from_complex(z: C64) -> Option<Self> {
        Some(z)
    }

    fn to_json(&self) -> Value {
        json!({ "re": self.re, "im": self.im })
    }

    fn from_json(v: &Value) -> Result<Self> {
        parse_complex(v)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const BACKEND: Backend = Backend::Real;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }

    fn to_complex(&self) -> C64 {
        C64::new(*self, 0.0)
    }

    fn from_complex(z: C64) -> Option<Self> {
        (z.im.abs() <= DEFAULT_TOL * z.re.abs().max(1.0)).then_some(z.re)
    }

    fn to_json(&self) -> Value {
        json!({ "re": self, "im": 0.0 })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let z = parse_complex(v)?;
        Self::from_complex(z).ok_or_else(|| Error::Parse(format!("real backend got complex value {v}")))
    }
}
