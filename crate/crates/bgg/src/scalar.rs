//! Exact ground fields: prime fields F_p and the rationals.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{BggError, Result};

pub const DEFAULT_PRIME: u32 = 32003;

/// Which ground field to compute over. Serializes as `{"prime": p}` or `"rational"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldSpec {
    Prime(u32),
    Rational,
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Prime(DEFAULT_PRIME)
    }
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldSpec::Rational => Ok(()),
            FieldSpec::Prime(p) => {
                if !(3..1 << 31).contains(&p) || !is_prime(p) {
                    Err(BggError::InvalidField(format!("{p} is not an odd prime below 2^31")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Parses `32003`, `prime:32003`, `rational` or `q`.
    pub fn parse(s: &str) -> Result<FieldSpec> {
        let t = s.trim();
        let spec = match t {
            "rational" | "q" | "Q" => FieldSpec::Rational,
            _ => {
                let digits = t.strip_prefix("prime:").unwrap_or(t);
                let p = digits
                    .parse::<u32>()
                    .map_err(|_| BggError::InvalidField(format!("cannot parse field '{s}'")))?;
                FieldSpec::Prime(p)
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldSpec::Prime(p) => write!(f, "F_{p}"),
            FieldSpec::Rational => write!(f, "Q"),
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic context for an exact field. Contexts are small immutable values.
pub trait Field: Clone + Debug + Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn spec(&self) -> FieldSpec;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// A pseudo-random element; for the rationals a small integer.
    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem;
    fn to_json(&self, a: &Self::Elem) -> Value;
    fn from_json(&self, v: &Value) -> Result<Self::Elem>;
    fn render(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `y += c * x` on slices of equal length.
    fn axpy(&self, y: &mut [Self::Elem], c: &Self::Elem, x: &[Self::Elem]) {
        for (yi, xi) in y.iter_mut().zip(x) {
            if !self.is_zero(xi) {
                *yi = self.add(yi, &self.mul(c, xi));
            }
        }
    }

    fn scale(&self, y: &mut [Self::Elem], c: &Self::Elem) {
        for yi in y.iter_mut() {
            *yi = self.mul(c, yi);
        }
    }

    fn from_sign(&self, negative: bool) -> Self::Elem {
        if negative {
            self.neg(&self.one())
        } else {
            self.one()
        }
    }
}

/// The prime field F_p with elements stored as canonical residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<PrimeField> {
        FieldSpec::Prime(p).validate()?;
        Ok(PrimeField { p })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    fn reduce_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    fn pow(&self, mut b: u32, mut e: u32) -> u32 {
        let p = self.p as u64;
        let mut acc = 1u64;
        let mut base = b as u64 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        b = acc as u32;
        b
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime(self.p)
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn from_i64(&self, n: i64) -> u32 {
        self.reduce_i64(n)
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        (s % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        self.add(a, &self.neg(b))
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn inv(&self, a: &u32) -> Result<u32> {
        if *a == 0 {
            return Err(BggError::DivisionByZero);
        }
        Ok(self.pow(*a, self.p - 2))
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn sample(&self, rng: &mut dyn RngCore) -> u32 {
        (rng.next_u64() % self.p as u64) as u32
    }
    fn to_json(&self, a: &u32) -> Value {
        let half = self.p / 2;
        if *a > half {
            Value::from(*a as i64 - self.p as i64)
        } else {
            Value::from(*a as i64)
        }
    }
    fn from_json(&self, v: &Value) -> Result<u32> {
        match v {
            Value::Number(n) => n
                .as_i64()
                .map(|k| self.reduce_i64(k))
                .ok_or_else(|| BggError::InvalidInput(format!("coefficient {n} is not an integer"))),
            Value::String(s) => {
                let r = parse_rational(s)?;
                let num = self.reduce_i64(bigint_mod(r.numer(), self.p) as i64);
                let den = self.reduce_i64(bigint_mod(r.denom(), self.p) as i64);
                self.div(&num, &den)
            }
            _ => Err(BggError::InvalidInput(format!("bad coefficient {v}"))),
        }
    }
    fn render(&self, a: &u32) -> String {
        self.to_json(a).to_string()
    }

    fn axpy(&self, y: &mut [u32], c: &u32, x: &[u32]) {
        let p = self.p as u64;
        let c = *c as u64;
        if c == 0 {
            return;
        }
        for (yi, &xi) in y.iter_mut().zip(x) {
            if xi != 0 {
                *yi = ((*yi as u64 + c * xi as u64) % p) as u32;
            }
        }
    }

    fn scale(&self, y: &mut [u32], c: &u32) {
        let p = self.p as u64;
        let c = *c as u64;
        for yi in y.iter_mut() {
            *yi = ((*yi as u64 * c) % p) as u32;
        }
    }
}

fn bigint_mod(n: &BigInt, p: u32) -> i64 {
    let m = BigInt::from(p);
    let r = ((n % &m) + &m) % &m;
    r.to_i64().unwrap_or(0)
}

/// Parses `"a"`, `"-a"` or `"a/b"` into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || BggError::InvalidInput(format!("cannot parse rational '{s}'"));
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(BggError::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

/// Renders a rational as `"a"` or `"a/b"`.
pub fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// The field of rational numbers with arbitrary-precision entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Result<BigRational> {
        if a.is_zero() {
            return Err(BggError::DivisionByZero);
        }
        Ok(a.recip())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn sample(&self, rng: &mut dyn RngCore) -> BigRational {
        self.from_i64((rng.next_u32() % 19) as i64 - 9)
    }
    fn to_json(&self, a: &BigRational) -> Value {
        if a.denom().is_one() {
            if let Some(k) = a.numer().to_i64() {
                return Value::from(k);
            }
        }
        Value::from(render_rational(a))
    }
    fn from_json(&self, v: &Value) -> Result<BigRational> {
        match v {
            Value::Number(n) => n
                .as_i64()
                .map(|k| self.from_i64(k))
                .ok_or_else(|| BggError::InvalidInput(format!("coefficient {n} is not an integer"))),
            Value::String(s) => parse_rational(s),
            _ => Err(BggError::InvalidInput(format!("bad coefficient {v}"))),
        }
    }
    fn render(&self, a: &BigRational) -> String {
        render_rational(a)
    }
}

/// Element of the rationals as an exact integer, if it is one.
pub fn rational_to_i64(r: &BigRational) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses() {
        let f7 = PrimeField::new(7).unwrap();
        assert_eq!(f7.inv(&3).unwrap(), 5);
        let f = PrimeField::default();
        assert_eq!(f.inv(&1).unwrap(), 1);
        let q = Rationals;
        let two_thirds = BigRational::new(2.into(), 3.into());
        assert_eq!(q.inv(&two_thirds).unwrap(), BigRational::new(3.into(), 2.into()));
    }

    #[test]
    fn zero_inverse_is_an_error() {
        assert_eq!(PrimeField::default().inv(&0), Err(BggError::DivisionByZero));
        assert_eq!(Rationals.inv(&BigRational::zero()), Err(BggError::DivisionByZero));
    }

    #[test]
    fn spec_validation_and_json() {
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(2).is_err());
        assert_eq!(FieldSpec::parse("32003").unwrap(), FieldSpec::Prime(32003));
        assert_eq!(FieldSpec::parse("rational").unwrap(), FieldSpec::Rational);
        let s = serde_json::to_string(&FieldSpec::Prime(32003)).unwrap();
        assert_eq!(s, r#"{"prime":32003}"#);
        assert_eq!(serde_json::to_string(&FieldSpec::Rational).unwrap(), r#""rational""#);
    }

    #[test]
    fn json_coefficients() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.from_json(&Value::from(-1)).unwrap(), 6);
        assert_eq!(f.to_json(&6), Value::from(-1));
        assert_eq!(f.from_json(&Value::from("1/2")).unwrap(), 4);
        let q = Rationals;
        let x = q.from_json(&Value::from("-3/6")).unwrap();
        assert_eq!(q.to_json(&x), Value::from("-1/2"));
    }
}
