//! JSON wire formats. Letters and degree keys are one-based; coefficients are
//! `{"num","den"}` strings on the exact backend and `{"re","im"}` otherwise.
//!
//! - tensor: `{"n":2,"k":4,"terms":[{"word":[1,2],"coeff":..}]}`
//! - Lie polynomial: `{"n":2,"k":4,"terms":[{"lyndon":[1,2],"coeff":..}]}`
//! - matrix: `{"rows":[[..],..]}`
//! - automorphism: `{"n":2,"k":4,"A":[[..]],"u":{"2":[[..]],"3":[[..]]}}`
//! - derivation: `{"n":2,"k":4,"d":{"1":[[..]],"2":[[..]],"3":[[..]]}}`
//!
//! In `u` and `d`, row `r` is the `r`-th word of that length in lexicographic
//! order and column `j` the generator `X_{j+1}`.

use serde_json::{json, Map, Value};

use crate::derivation::GradedDerivation;
use crate::error::{Error, Result};
use crate::free_lie::LiePoly;
use crate::graded_aut::GradedAut;
use crate::graded_tensor::{TruncatedTensor, Word};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

pub trait Wire: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;

    fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialise")
    }

    fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| Error::Parse(format!("missing field \"{name}\"")))
}

fn usize_field(v: &Value, name: &str) -> Result<usize> {
    field(v, name)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("\"{name}\" must be a non-negative integer")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn word_from_json(v: &Value, n: usize) -> Result<Word> {
    let letters: Result<Vec<usize>> = array(v, "word")?
        .iter()
        .map(|l| match l.as_u64() {
            Some(i) if i >= 1 && (i as usize) <= n => Ok(i as usize - 1),
            _ => Err(Error::Parse(format!("letter {l} is not in 1..={n}"))),
        })
        .collect();
    Ok(Word::from_letters(letters?))
}

fn word_to_json(w: &Word) -> Value {
    Value::Array(w.letters().map(|l| json!(l + 1)).collect())
}

fn rows_to_json<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| m[(i, j)].to_json()).collect()))
            .collect(),
    )
}

fn rows_from_json<S: Scalar>(v: &Value) -> Result<Matrix<S>> {
    let rows = array(v, "rows")?;
    let parsed: Result<Vec<Vec<S>>> = rows
        .iter()
        .map(|r| array(r, "row")?.iter().map(S::from_json).collect())
        .collect();
    let parsed = parsed?;
    let ncols = parsed.first().map_or(0, Vec::len);
    if parsed.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(Matrix::from_fn(parsed.len(), ncols, |i, j| parsed[i][j].clone()))
}

pub fn matrix_to_json<S: Scalar>(m: &Matrix<S>) -> Value {
    json!({ "rows": rows_to_json(m) })
}

/// Accepts `{"rows": [[..]]}` or a bare array of rows.
pub fn matrix_from_json<S: Scalar>(v: &Value) -> Result<Matrix<S>> {
    match v.get("rows") {
        Some(rows) => rows_from_json(rows),
        None => rows_from_json(v),
    }
}

fn graded_blocks_from_json<S: Scalar>(v: &Value, n: usize, degrees: std::ops::Range<usize>, what: &str) -> Result<Vec<Matrix<S>>> {
    let obj = match v {
        Value::Object(o) => o.clone(),
        Value::Null => Map::new(),
        _ => return Err(Error::Parse(format!("\"{what}\" must be an object keyed by degree"))),
    };
    for key in obj.keys() {
        match key.parse::<usize>() {
            Ok(m) if degrees.contains(&m) => {}
            _ => return Err(Error::Parse(format!("\"{what}\" has unexpected degree key \"{key}\""))),
        }
    }
    degrees
        .map(|m| match obj.get(&m.to_string()) {
            None => Ok(Matrix::from_element(n.pow(m as u32), n, S::zero())),
            Some(rows) => {
                let b = rows_from_json::<S>(rows)?;
                if b.shape() != (n.pow(m as u32), n) {
                    return Err(Error::Parse(format!(
                        "{what}_{m} must be {}x{n}, got {}x{}",
                        n.pow(m as u32),
                        b.nrows(),
                        b.ncols()
                    )));
                }
                Ok(b)
            }
        })
        .collect()
}

impl<S: Scalar> Wire for TruncatedTensor<S> {
    fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms().map(|(w, c)| json!({ "word": word_to_json(w), "coeff": c.to_json() })).collect();
        json!({ "n": self.n(), "k": self.k(), "terms": terms })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let (n, k) = (usize_field(v, "n")?, usize_field(v, "k")?);
        let terms: Result<Vec<(Word, S)>> = array(field(v, "terms")?, "terms")?
            .iter()
            .map(|t| Ok((word_from_json(field(t, "word")?, n)?, S::from_json(field(t, "coeff")?)?)))
            .collect();
        TruncatedTensor::from_terms(n, k, terms?).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl<S: Scalar> Wire for LiePoly<S> {
    fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms().map(|(w, c)| json!({ "lyndon": word_to_json(w), "coeff": c.to_json() })).collect();
        json!({ "n": self.n(), "k": self.k(), "terms": terms })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let (n, k) = (usize_field(v, "n")?, usize_field(v, "k")?);
        let terms: Result<Vec<(Word, S)>> = array(field(v, "terms")?, "terms")?
            .iter()
            .map(|t| Ok((word_from_json(field(t, "lyndon")?, n)?, S::from_json(field(t, "coeff")?)?)))
            .collect();
        LiePoly::from_terms(n, k, terms?).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl<S: Scalar> Wire for GradedAut<S> {
    fn to_json(&self) -> Value {
        let u: Map<String, Value> = (2..self.k()).map(|m| (m.to_string(), rows_to_json(self.u(m)))).collect();
        json!({ "n": self.n(), "k": self.k(), "A": rows_to_json(self.a()), "u": u })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let (n, k) = (usize_field(v, "n")?, usize_field(v, "k")?);
        if n == 0 || k < 2 {
            return Err(Error::Parse(format!("need n >= 1 and k >= 2, got n={n}, k={k}")));
        }
        let a = rows_from_json::<S>(field(v, "A")?)?;
        if a.shape() != (n, n) {
            return Err(Error::Parse(format!("A must be {n}x{n}")));
        }
        let u = graded_blocks_from_json(v.get("u").unwrap_or(&Value::Null), n, 2..k, "u")?;
        GradedAut::new(a, u, k)
    }
}

impl<S: Scalar> Wire for GradedDerivation<S> {
    fn to_json(&self) -> Value {
        let d: Map<String, Value> = (1..self.k()).map(|m| (m.to_string(), rows_to_json(self.d(m)))).collect();
        json!({ "n": self.n(), "k": self.k(), "d": d })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let (n, k) = (usize_field(v, "n")?, usize_field(v, "k")?);
        if n == 0 || k < 2 {
            return Err(Error::Parse(format!("need n >= 1 and k >= 2, got n={n}, k={k}")));
        }
        let d = graded_blocks_from_json(field(v, "d")?, n, 1..k, "d")?;
        GradedDerivation::new(d, n)
    }
}

/// Hex SHA-256 of the compact serialisation (object keys sorted).
pub fn digest(v: &Value) -> String {
    use sha2::{Digest, Sha256};
    let bytes = Sha256::digest(v.to_string().as_bytes());
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, C64};

    #[test]
    fn tensor_wire_format() {
        let v = json!({"n": 2, "k": 4, "terms": [{"word": [1, 2], "coeff": {"num": "1", "den": "2"}}]});
        let t = TruncatedTensor::<Rational>::from_json(&v).unwrap();
        assert_eq!(t.coeff(&Word::from_letters([0, 1])), Rational::ratio(1, 2));
        assert_eq!(t.to_json(), v);
        let c = TruncatedTensor::<C64>::from_json(&json!({"n": 2, "k": 3, "terms": [{"word": [], "coeff": {"re": 0.5, "im": 0.0}}]})).unwrap();
        assert_eq!(c.constant_term(), C64::new(0.5, 0.0));
    }

    #[test]
    fn bad_inputs_are_parse_errors() {
        let bad_letter = json!({"n": 2, "k": 4, "terms": [{"word": [3], "coeff": {"num": "1"}}]});
        assert!(matches!(TruncatedTensor::<Rational>::from_json(&bad_letter), Err(Error::Parse(_))));
        let ragged = json!({"n": 2, "k": 3, "A": [[{"num": "1"}], [{"num": "1"}, {"num": "0"}]]});
        assert!(GradedAut::<Rational>::from_json(&ragged).is_err());
        assert!(GradedAut::<Rational>::from_json_str("{not json").is_err());
    }

    #[test]
    fn aut_round_trip_is_byte_stable() {
        let v = json!({
            "n": 2, "k": 3,
            "A": [[{"num": "2", "den": "1"}, {"num": "1", "den": "1"}], [{"num": "1", "den": "1"}, {"num": "1", "den": "1"}]],
            "u": {"2": [[{"num": "0", "den": "1"}, {"num": "0", "den": "1"}],
                        [{"num": "1", "den": "3"}, {"num": "0", "den": "1"}],
                        [{"num": "-1", "den": "3"}, {"num": "0", "den": "1"}],
                        [{"num": "0", "den": "1"}, {"num": "0", "den": "1"}]]}
        });
        let a = GradedAut::<Rational>::from_json(&v).unwrap();
        assert_eq!(a.to_json(), v);
        assert_eq!(GradedAut::<Rational>::from_json_str(&a.to_json_string()).unwrap(), a);
    }

    #[test]
    fn missing_u_means_zero() {
        let v = json!({"n": 1, "k": 3, "A": [[{"num": "3"}]]});
        let a = GradedAut::<Rational>::from_json(&v).unwrap();
        assert_eq!(a, GradedAut::splitting(&Matrix::from_element(1, 1, Rational::from_i64(3)), 3).unwrap());
    }

    #[test]
    fn digest_is_stable() {
        let d = digest(&json!({"b": 1, "a": [1, 2]}));
        assert_eq!(d, digest(&json!({"a": [1, 2], "b": 1})));
        assert_eq!(d.len(), 64);
    }
}
