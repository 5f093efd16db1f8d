//! Exact semifield arithmetic.
//!
//! Every distribution and empirical model in this crate is generic over one of
//! three semifields: the nonnegative rationals (probabilities), the signed
//! rationals (quasi-probabilities) and the booleans (possibilities). Values are
//! tagged with their instance so that mixing instances is a checked error
//! rather than a silent coercion.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The closed set of semifield instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SemifieldKind {
    #[serde(rename = "nonneg-rational")]
    NonNegRational,
    #[serde(rename = "signed-rational")]
    SignedRational,
    #[serde(rename = "boolean")]
    Boolean,
}

impl SemifieldKind {
    pub const ALL: [SemifieldKind; 3] = [
        SemifieldKind::NonNegRational,
        SemifieldKind::SignedRational,
        SemifieldKind::Boolean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SemifieldKind::NonNegRational => "nonneg-rational",
            SemifieldKind::SignedRational => "signed-rational",
            SemifieldKind::Boolean => "boolean",
        }
    }

    pub fn zero(self) -> SemifieldValue {
        match self {
            SemifieldKind::NonNegRational => SemifieldValue::NonNeg(BigRational::zero()),
            SemifieldKind::SignedRational => SemifieldValue::Signed(BigRational::zero()),
            SemifieldKind::Boolean => SemifieldValue::Bool(false),
        }
    }

    pub fn one(self) -> SemifieldValue {
        match self {
            SemifieldKind::NonNegRational => SemifieldValue::NonNeg(BigRational::one()),
            SemifieldKind::SignedRational => SemifieldValue::Signed(BigRational::one()),
            SemifieldKind::Boolean => SemifieldValue::Bool(true),
        }
    }

    /// Wraps a rational as a value of this instance. Booleans take the
    /// support of the rational (nonzero maps to `true`).
    pub fn from_rational(self, r: BigRational) -> Result<SemifieldValue, SemifieldError> {
        match self {
            SemifieldKind::NonNegRational => SemifieldValue::nonneg(r),
            SemifieldKind::SignedRational => Ok(SemifieldValue::Signed(r)),
            SemifieldKind::Boolean => Ok(SemifieldValue::Bool(!r.is_zero())),
        }
    }
}

impl fmt::Display for SemifieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemifieldKind {
    type Err = SemifieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SemifieldKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SemifieldError::UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemifieldError {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("semifield mismatch: expected {expected}, found {found}")]
    InstanceMismatch {
        expected: SemifieldKind,
        found: SemifieldKind,
    },
    #[error("{0} is negative and not a nonnegative rational")]
    Negative(BigRational),
    #[error("cannot read {text:?} as a {kind} value")]
    Parse { text: String, kind: SemifieldKind },
    #[error("unknown semifield {0:?}")]
    UnknownKind(String),
}

/// An element of one of the three semifields.
///
/// Rationals are kept in lowest terms with a positive denominator (guaranteed
/// by `BigRational`), so structural equality is numeric equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemifieldValue {
    NonNeg(BigRational),
    Signed(BigRational),
    Bool(bool),
}

impl SemifieldValue {
    pub fn nonneg(r: BigRational) -> Result<Self, SemifieldError> {
        if r.is_negative() {
            Err(SemifieldError::Negative(r))
        } else {
            Ok(SemifieldValue::NonNeg(r))
        }
    }

    /// `numer/denom` in the nonnegative rationals. Panics on a zero
    /// denominator or a negative ratio; meant for literals.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::nonneg(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
            .expect("ratio literal must be nonnegative")
    }

    pub fn signed_ratio(numer: i64, denom: i64) -> Self {
        SemifieldValue::Signed(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn kind(&self) -> SemifieldKind {
        match self {
            SemifieldValue::NonNeg(_) => SemifieldKind::NonNegRational,
            SemifieldValue::Signed(_) => SemifieldKind::SignedRational,
            SemifieldValue::Bool(_) => SemifieldKind::Boolean,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SemifieldValue::NonNeg(r) | SemifieldValue::Signed(r) => r.is_zero(),
            SemifieldValue::Bool(b) => !b,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            SemifieldValue::NonNeg(r) | SemifieldValue::Signed(r) => r.is_one(),
            SemifieldValue::Bool(b) => *b,
        }
    }

    /// The rational payload; `None` for booleans.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            SemifieldValue::NonNeg(r) | SemifieldValue::Signed(r) => Some(r),
            SemifieldValue::Bool(_) => None,
        }
    }

    fn same_kind(&self, other: &Self) -> Result<(), SemifieldError> {
        if self.kind() == other.kind() {
            Ok(())
        } else {
            Err(SemifieldError::InstanceMismatch {
                expected: self.kind(),
                found: other.kind(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SemifieldError> {
        self.same_kind(other)?;
        Ok(match (self, other) {
            (SemifieldValue::NonNeg(a), SemifieldValue::NonNeg(b)) => SemifieldValue::NonNeg(a + b),
            (SemifieldValue::Signed(a), SemifieldValue::Signed(b)) => SemifieldValue::Signed(a + b),
            (SemifieldValue::Bool(a), SemifieldValue::Bool(b)) => SemifieldValue::Bool(*a || *b),
            _ => unreachable!(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SemifieldError> {
        self.same_kind(other)?;
        Ok(match (self, other) {
            (SemifieldValue::NonNeg(a), SemifieldValue::NonNeg(b)) => SemifieldValue::NonNeg(a * b),
            (SemifieldValue::Signed(a), SemifieldValue::Signed(b)) => SemifieldValue::Signed(a * b),
            (SemifieldValue::Bool(a), SemifieldValue::Bool(b)) => SemifieldValue::Bool(*a && *b),
            _ => unreachable!(),
        })
    }

    pub fn inv(&self) -> Result<Self, SemifieldError> {
        if self.is_zero() {
            return Err(SemifieldError::ZeroInverse);
        }
        Ok(match self {
            SemifieldValue::NonNeg(r) => SemifieldValue::NonNeg(r.recip()),
            SemifieldValue::Signed(r) => SemifieldValue::Signed(r.recip()),
            SemifieldValue::Bool(_) => SemifieldValue::Bool(true),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self, SemifieldError> {
        self.mul(&other.inv()?)
    }

    // Infallible variants for callers that have already checked instances.
    pub(crate) fn plus(&self, other: &Self) -> Self {
        self.add(other).expect("operands share a semifield")
    }

    pub(crate) fn times(&self, other: &Self) -> Self {
        self.mul(other).expect("operands share a semifield")
    }

    /// Reads a value of the given instance from its textual form (`"p/q"`,
    /// `"p"`, or `"true"`/`"false"` for booleans).
    pub fn parse(kind: SemifieldKind, text: &str) -> Result<Self, SemifieldError> {
        let err = || SemifieldError::Parse {
            text: text.to_string(),
            kind,
        };
        match kind {
            SemifieldKind::Boolean => match text {
                "true" => Ok(SemifieldValue::Bool(true)),
                "false" => Ok(SemifieldValue::Bool(false)),
                _ => Err(err()),
            },
            _ => {
                let r = parse_rational(text).ok_or_else(err)?;
                kind.from_rational(r)
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SemifieldValue::NonNeg(r) | SemifieldValue::Signed(r) => {
                serde_json::Value::String(format_rational(r))
            }
            SemifieldValue::Bool(b) => serde_json::Value::Bool(*b),
        }
    }

    pub fn from_json(kind: SemifieldKind, value: &serde_json::Value) -> Result<Self, SemifieldError> {
        match (kind, value) {
            (SemifieldKind::Boolean, serde_json::Value::Bool(b)) => Ok(SemifieldValue::Bool(*b)),
            (_, serde_json::Value::String(s)) => Self::parse(kind, s),
            (_, other) => Err(SemifieldError::Parse {
                text: other.to_string(),
                kind,
            }),
        }
    }
}

impl fmt::Display for SemifieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemifieldValue::NonNeg(r) | SemifieldValue::Signed(r) => f.write_str(&format_rational(r)),
            SemifieldValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl Serialize for SemifieldValue {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            SemifieldValue::NonNeg(r) | SemifieldValue::Signed(r) => {
                serializer.serialize_str(&format_rational(r))
            }
            SemifieldValue::Bool(b) => serializer.serialize_bool(*b),
        }
    }
}

/// `"p/q"`, with `q` omitted when it is 1.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (text.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if denom.is_zero() {
        return None;
    }
    Some(BigRational::new(numer, denom))
}

/// Serde adapter for rationals written as `"p/q"` strings.
pub mod rational_string {
    use super::{format_rational, parse_rational};
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid rational {text:?}")))
    }
}

/// A homomorphism between two of the shipped semifields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemifieldHom {
    Identity(SemifieldKind),
    /// The unique homomorphism from the nonnegative rationals to the
    /// booleans: `v ↦ (v ≠ 0)`.
    Collapse,
    /// Nonnegative rationals included in the signed rationals.
    Inclusion,
}

impl SemifieldHom {
    pub fn source(self) -> SemifieldKind {
        match self {
            SemifieldHom::Identity(k) => k,
            SemifieldHom::Collapse | SemifieldHom::Inclusion => SemifieldKind::NonNegRational,
        }
    }

    pub fn target(self) -> SemifieldKind {
        match self {
            SemifieldHom::Identity(k) => k,
            SemifieldHom::Collapse => SemifieldKind::Boolean,
            SemifieldHom::Inclusion => SemifieldKind::SignedRational,
        }
    }

    pub fn apply(self, v: &SemifieldValue) -> Result<SemifieldValue, SemifieldError> {
        if v.kind() != self.source() {
            return Err(SemifieldError::InstanceMismatch {
                expected: self.source(),
                found: v.kind(),
            });
        }
        Ok(match (self, v) {
            (SemifieldHom::Identity(_), v) => v.clone(),
            (SemifieldHom::Collapse, v) => SemifieldValue::Bool(!v.is_zero()),
            (SemifieldHom::Inclusion, SemifieldValue::NonNeg(r)) => SemifieldValue::Signed(r.clone()),
            _ => unreachable!(),
        })
    }
}
