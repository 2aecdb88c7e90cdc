//! serde adapters: big integers as JSON numbers when they fit in 64 bits
//! (strings otherwise), rationals as `"a/b"` strings or plain integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

pub fn bigint_to_value(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => Value::from(i),
        None => Value::from(v.to_string()),
    }
}

pub fn value_to_bigint(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

pub fn rational_to_value(v: &BigRational) -> Value {
    if v.denom().is_one() {
        bigint_to_value(v.numer())
    } else {
        Value::from(format!("{}/{}", v.numer(), v.denom()))
    }
}

pub fn value_to_rational(v: &Value) -> Option<BigRational> {
    if let Value::String(s) = v {
        if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b == BigInt::from(0) {
                return None;
            }
            return Some(BigRational::new(a, b));
        }
    }
    value_to_bigint(v).map(BigRational::from_integer)
}

pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        bigint_to_value(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let v = Value::deserialize(d)?;
        value_to_bigint(&v).ok_or_else(|| D::Error::custom("expected an integer"))
    }
}

pub mod bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(bigint_to_value).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v = Vec::<Value>::deserialize(d)?;
        v.iter()
            .map(|x| value_to_bigint(x).ok_or_else(|| D::Error::custom("expected an integer")))
            .collect()
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(rational_to_value).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let v = Vec::<Value>::deserialize(d)?;
        v.iter()
            .map(|x| value_to_rational(x).ok_or_else(|| D::Error::custom("expected a rational")))
            .collect()
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        rational_to_value(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let v = Value::deserialize(d)?;
        value_to_rational(&v).ok_or_else(|| D::Error::custom("expected a rational"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(value_to_bigint(&bigint_to_value(&big)).unwrap(), big);
        assert_eq!(bigint_to_value(&BigInt::from(-7)), Value::from(-7));
        let r = BigRational::new(3.into(), (-6).into());
        assert_eq!(rational_to_value(&r), Value::from("-1/2"));
        assert_eq!(value_to_rational(&Value::from("-1/2")).unwrap(), r);
        assert!(value_to_rational(&Value::from("1/0")).is_none());
    }
}
