//! Exact scalars used for voter and strategy coordinates.
//!
//! Everything in this crate is generic over [`Scalar`]. Two implementations
//! are provided: [`Coord`], an arbitrary-precision rational, and `i64`, used
//! by the solver after all coordinates have been scaled to a common integer
//! lattice (see [`crate::lattice`]).

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Ordered additive group used for coordinates.
///
/// Only addition and subtraction are needed by the gain predicates; every
/// comparison the solver makes has the form `2 * (v_j - v_i) < y - x`.
pub trait Scalar: Clone + Ord + Hash + fmt::Debug + Send + Sync + 'static {
    fn from_int(v: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;

    fn double(&self) -> Self {
        self.add(self)
    }
}

impl Scalar for i64 {
    fn from_int(v: i64) -> Self {
        v
    }

    fn add(&self, rhs: &Self) -> Self {
        self.checked_add(*rhs).expect("lattice coordinate overflow")
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.checked_sub(*rhs).expect("lattice coordinate overflow")
    }
}

/// An exact rational coordinate, always stored in lowest terms with a
/// positive denominator, so structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord(BigRational);

impl Coord {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, Error> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::InvalidInstance("zero denominator".into()));
        }
        Ok(Coord(BigRational::new(numer.into(), denom)))
    }

    pub fn integer(v: i64) -> Self {
        Coord(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        Coord(r)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Exact conversion from a finite float.
    pub fn from_f64(v: f64) -> Result<Self, Error> {
        BigRational::from_float(v)
            .map(Coord)
            .ok_or_else(|| Error::InvalidInstance(format!("non-finite coordinate {v}")))
    }

    /// Lossy conversion, for rendering only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn half(&self) -> Self {
        Coord(&self.0 / BigInt::from(2))
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Coord(&self.0 * BigInt::from(k))
    }

    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        Coord(&self.0 / BigInt::from(k))
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Always `num/den`, including integers (`5/1`).
    pub fn to_ratio_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }

    pub fn midpoint(a: &Coord, b: &Coord) -> Coord {
        Coord((&a.0 + &b.0) / BigInt::from(2))
    }
}

impl Scalar for Coord {
    fn from_int(v: i64) -> Self {
        Coord::integer(v)
    }

    fn add(&self, rhs: &Self) -> Self {
        Coord(&self.0 + &rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Coord(&self.0 - &rhs.0)
    }
}

impl From<i64> for Coord {
    fn from(v: i64) -> Self {
        Coord::integer(v)
    }
}

impl fmt::Debug for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Coord {
    type Err = Error;

    /// Accepts `p`, `p/q` and finite decimals such as `-1.25`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::InvalidInstance(format!("cannot parse coordinate {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            return Coord::new(num, den);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.trim_start().starts_with('-');
            let int: BigInt = match int {
                "" | "-" | "+" => BigInt::zero(),
                _ => int.parse().map_err(|_| bad())?,
            };
            let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let frac_val = BigRational::new(frac_num, scale);
            let mut val = BigRational::from_integer(int.abs()) + frac_val;
            if negative {
                val = -val;
            }
            return Ok(Coord(val));
        }
        let int: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Coord(BigRational::from_integer(int)))
    }
}

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_ratio_string())
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CoordVisitor;

        impl<'de> Visitor<'de> for CoordVisitor {
            type Value = Coord;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a \"num/den\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Coord, E> {
                Ok(Coord::integer(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Coord, E> {
                Ok(Coord(BigRational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Coord, E> {
                Coord::from_f64(v).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Coord, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(CoordVisitor)
    }
}

/// A scalar extended with `-∞` and `+∞`.
///
/// Variant order gives the total order `NegInf < Finite(_) < PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ext<S> {
    NegInf,
    Finite(S),
    PosInf,
}

pub type ExtendedCoord = Ext<Coord>;

impl<S> Ext<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Ext::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn map<T>(self, f: impl FnOnce(S) -> T) -> Ext<T> {
        match self {
            Ext::NegInf => Ext::NegInf,
            Ext::Finite(v) => Ext::Finite(f(v)),
            Ext::PosInf => Ext::PosInf,
        }
    }
}

impl<S: Ord> Ext<S> {
    /// Compares against a finite value without cloning it.
    pub fn cmp_finite(&self, v: &S) -> Ordering {
        match self {
            Ext::NegInf => Ordering::Less,
            Ext::Finite(x) => x.cmp(v),
            Ext::PosInf => Ordering::Greater,
        }
    }
}

impl<S: fmt::Display> fmt::Display for Ext<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::Finite(v) => v.fmt(f),
            Ext::PosInf => f.write_str("inf"),
        }
    }
}

impl Ext<Coord> {
    pub fn to_ratio_string(&self) -> String {
        match self {
            Ext::NegInf => "-inf".into(),
            Ext::Finite(v) => v.to_ratio_string(),
            Ext::PosInf => "inf".into(),
        }
    }
}

/// Smallest positive integer `s` such that `s * v` is an integer for every `v`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Coord>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
