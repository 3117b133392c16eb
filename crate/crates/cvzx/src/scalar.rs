//! Real scalars in two modes: exact rationals (the default for rule
//! application and normal-form reduction) and double-precision floats (for
//! trigonometric gate parameters). Mixed-mode arithmetic promotes to float.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Default comparison tolerance for float-mode scalars.
pub const DEFAULT_EPS: f64 = 1e-9;

static EPS_BITS: AtomicU64 = AtomicU64::new(0);

/// Current float-mode tolerance. Defaults to [`DEFAULT_EPS`]; the CLI may
/// override it through the `CVZX_EPS` environment variable.
pub fn epsilon() -> f64 {
    let bits = EPS_BITS.load(Ordering::Relaxed);
    if bits == 0 {
        DEFAULT_EPS
    } else {
        f64::from_bits(bits)
    }
}

/// Override the float-mode tolerance process-wide.
pub fn set_epsilon(eps: f64) {
    EPS_BITS.store(eps.to_bits(), Ordering::Relaxed);
}

/// A real number, either an exact rational or a float.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

/// Exact values serialize as `"p/q"` strings, floats as JSON numbers.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(_) => serializer.serialize_str(&self.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        match v {
            serde_json::Value::String(s) => s.parse().map_err(D::Error::custom),
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(Scalar::Float)
                .ok_or_else(|| D::Error::custom("non-finite float")),
            other => Err(D::Error::custom(format!("bad scalar value {other}"))),
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact rational `p/q`. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn float(x: f64) -> Self {
        Scalar::Float(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    /// Zero test: exact in rational mode, `|x| <= eps` in float mode.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => x.abs() <= epsilon(),
        }
    }

    /// Guard test used by rules that divide: strictly nonzero.
    pub fn is_nonzero(&self) -> bool {
        !self.is_zero()
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_one(),
            Scalar::Float(x) => approx_eq(*x, 1.0),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r.clone()),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(x) => Scalar::Float(x.abs()),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Float(self.to_f64() * other.to_f64()),
        }
    }

    /// Division. Returns `None` when the divisor is zero (exactly, or within
    /// tolerance in float mode).
    pub fn div(&self, other: &Scalar) -> Option<Scalar> {
        if other.is_zero() {
            return None;
        }
        Some(match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => Scalar::Float(self.to_f64() / other.to_f64()),
        })
    }

    pub fn recip(&self) -> Option<Scalar> {
        Scalar::one().div(self)
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn pow(&self, exp: i32) -> Option<Scalar> {
        if exp < 0 {
            return self.recip()?.pow(-exp);
        }
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        Some(acc)
    }

    /// Promote to float mode.
    pub fn promote(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }
}

fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= epsilon() * 1.0_f64.max(a.abs()).max(b.abs())
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => approx_eq(self.to_f64(), other.to_f64()),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float(x) => write!(f, "{x:?}"),
        }
    }
}

impl FromStr for Scalar {
    type Err = String;

    /// Parses `p/q` and integer literals as exact rationals; any literal with
    /// a decimal point or exponent becomes a float.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || format!("invalid numeric literal `{s}`");
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(format!("zero denominator in `{s}`"));
            }
            return Ok(Scalar::Exact(BigRational::new(p, q)));
        }
        if s.contains('.') || s.contains('e') || s.contains('E') {
            let x: f64 = s.parse().map_err(|_| bad())?;
            return Ok(Scalar::Float(x));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Scalar::Exact(BigRational::from_integer(n)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_compare_no_tolerance() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::ratio(333333333, 1000000000);
        assert_ne!(a, b);
        assert_eq!(a, Scalar::ratio(2, 6));
    }

    #[test]
    fn float_compare_with_tolerance() {
        let a = Scalar::float(1.0);
        let b = Scalar::float(1.0 + 1e-12);
        assert_eq!(a, b);
        assert_ne!(Scalar::float(1.0), Scalar::float(1.001));
    }

    #[test]
    fn mixed_mode_promotes() {
        let a = Scalar::ratio(1, 2);
        let b = Scalar::float(0.25);
        assert!(matches!(a.mul(&b), Scalar::Float(_)));
        assert_eq!(a.mul(&b), Scalar::float(0.125));
    }

    #[test]
    fn parse_round_trip() {
        assert_eq!("3/2".parse::<Scalar>().unwrap(), Scalar::ratio(3, 2));
        assert_eq!("-7".parse::<Scalar>().unwrap(), Scalar::int(-7));
        assert!(matches!("0.25".parse::<Scalar>().unwrap(), Scalar::Float(_)));
        assert!("1/0".parse::<Scalar>().is_err());
    }

    #[test]
    fn division_guard() {
        assert!(Scalar::int(1).div(&Scalar::zero()).is_none());
        assert_eq!(
            Scalar::int(1).div(&Scalar::int(4)).unwrap(),
            Scalar::ratio(1, 4)
        );
    }
}
