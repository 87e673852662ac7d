//! Serde adapter for floats that may be infinite.
//!
//! JSON has no infinity, so `±∞` and NaN are written as the strings `"inf"`,
//! `"-inf"` and `"nan"`; finite values stay plain numbers.

use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Num(f64),
    Text(String),
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    match Repr::deserialize(d)? {
        Repr::Num(x) => Ok(x),
        Repr::Text(t) => match t.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            other => Err(serde::de::Error::custom(format!("not a number: {other:?}"))),
        },
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Bound(#[serde(with = "super")] f64);

    #[test]
    fn round_trip() {
        for x in [f64::INFINITY, f64::NEG_INFINITY, 0.1 + 0.2, -3.5e-300] {
            let s = serde_json::to_string(&Bound(x)).unwrap();
            let back: Bound = serde_json::from_str(&s).unwrap();
            assert_eq!(back.0.to_bits(), x.to_bits());
        }
    }
}
