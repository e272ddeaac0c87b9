//! Weight algebras.
//!
//! Every algorithm in the crate is generic over [`Semiring`]. Three carriers
//! are provided: [`TropicalWeight`] (min, +), [`LogWeight`] (-log-sum-exp, +)
//! and [`ProbabilityWeight`] (+, ×). All three are commutative, so left and
//! right division coincide.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default tolerance used by weight comparisons.
pub const DEFAULT_DELTA: f64 = 1e-9;

/// Runtime tag naming one of the built-in semirings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    Tropical,
    Log,
    Probability,
}

impl Ring {
    /// Token used in file headers and on the command line.
    pub fn token(self) -> &'static str {
        match self {
            Ring::Tropical => "tropical",
            Ring::Log => "log",
            Ring::Probability => "prob",
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tropical" => Ok(Ring::Tropical),
            "log" => Ok(Ring::Log),
            "prob" | "probability" => Ok(Ring::Probability),
            other => Err(Error::Invalid(format!("unknown semiring {other:?}"))),
        }
    }
}

pub trait Semiring: Copy + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    const RING: Ring;
    /// Whether `a ⊕ a = a` for every `a`.
    const IDEMPOTENT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;

    /// Returns `x` with `self ⊗ x = rhs`.
    fn left_divide(&self, rhs: &Self) -> Result<Self>;

    /// Validating constructor: rejects NaN and values outside the carrier.
    fn from_value(value: f64) -> Result<Self>;

    fn value(&self) -> f64;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// `|a - b| <= delta`, with equal infinities comparing equal.
    fn approx_eq(&self, other: &Self, delta: f64) -> bool {
        let (a, b) = (self.value(), other.value());
        a == b || (a - b).abs() <= delta
    }

    /// Integer grid key used to hash weights that went through floating-point
    /// arithmetic. Infinities map to the extremes of `i64`.
    fn quantize(&self, step: f64) -> i64 {
        quantize(self.value(), step)
    }
}

pub(crate) fn quantize(value: f64, step: f64) -> i64 {
    if value == f64::INFINITY {
        i64::MAX
    } else if value == f64::NEG_INFINITY {
        i64::MIN
    } else if step > 0.0 {
        (value / step).round() as i64
    } else {
        value.to_bits() as i64
    }
}

fn fmt_value(value: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    // Normalise -0 so serialization is stable.
    if value == 0.0 {
        f.write_str("0")
    } else if value == f64::INFINITY {
        f.write_str("inf")
    } else {
        write!(f, "{value}")
    }
}

/// `(ℝ ∪ {+∞}, min, +, +∞, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct TropicalWeight(f64);

impl TropicalWeight {
    /// # Panics
    /// On NaN or -∞.
    pub fn new(value: f64) -> Self {
        Self::from_value(value).expect("invalid tropical weight")
    }
}

impl Semiring for TropicalWeight {
    const RING: Ring = Ring::Tropical;
    const IDEMPOTENT: bool = true;

    fn zero() -> Self {
        TropicalWeight(f64::INFINITY)
    }

    fn one() -> Self {
        TropicalWeight(0.0)
    }

    fn plus(&self, rhs: &Self) -> Self {
        if rhs.0 < self.0 {
            *rhs
        } else {
            *self
        }
    }

    fn times(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            Self::zero()
        } else {
            TropicalWeight(self.0 + rhs.0)
        }
    }

    fn left_divide(&self, rhs: &Self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(Self::RING));
        }
        if rhs.is_zero() {
            return Ok(Self::zero());
        }
        Ok(TropicalWeight(rhs.0 - self.0))
    }

    fn from_value(value: f64) -> Result<Self> {
        if value.is_nan() || value == f64::NEG_INFINITY {
            return Err(Error::InvalidWeight {
                ring: Self::RING,
                value,
            });
        }
        Ok(TropicalWeight(value))
    }

    fn value(&self) -> f64 {
        self.0
    }
}

impl fmt::Display for TropicalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_value(self.0, f)
    }
}

/// `(ℝ ∪ {+∞}, -log(e^-a + e^-b), +, +∞, 0)`: negated log probabilities.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogWeight(f64);

impl LogWeight {
    /// # Panics
    /// On NaN or -∞.
    pub fn new(value: f64) -> Self {
        Self::from_value(value).expect("invalid log weight")
    }
}

impl Semiring for LogWeight {
    const RING: Ring = Ring::Log;
    const IDEMPOTENT: bool = false;

    fn zero() -> Self {
        LogWeight(f64::INFINITY)
    }

    fn one() -> Self {
        LogWeight(0.0)
    }

    fn plus(&self, rhs: &Self) -> Self {
        let (lo, hi) = if self.0 <= rhs.0 {
            (self.0, rhs.0)
        } else {
            (rhs.0, self.0)
        };
        if hi == f64::INFINITY {
            return LogWeight(lo);
        }
        LogWeight(lo - (lo - hi).exp().ln_1p())
    }

    fn times(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            Self::zero()
        } else {
            LogWeight(self.0 + rhs.0)
        }
    }

    fn left_divide(&self, rhs: &Self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(Self::RING));
        }
        if rhs.is_zero() {
            return Ok(Self::zero());
        }
        Ok(LogWeight(rhs.0 - self.0))
    }

    fn from_value(value: f64) -> Result<Self> {
        if value.is_nan() || value == f64::NEG_INFINITY {
            return Err(Error::InvalidWeight {
                ring: Self::RING,
                value,
            });
        }
        Ok(LogWeight(value))
    }

    fn value(&self) -> f64 {
        self.0
    }
}

impl fmt::Display for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_value(self.0, f)
    }
}

/// `(ℝ≥0, +, ×, 0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct ProbabilityWeight(f64);

impl ProbabilityWeight {
    /// # Panics
    /// On NaN, negative or infinite values.
    pub fn new(value: f64) -> Self {
        Self::from_value(value).expect("invalid probability weight")
    }
}

impl Semiring for ProbabilityWeight {
    const RING: Ring = Ring::Probability;
    const IDEMPOTENT: bool = false;

    fn zero() -> Self {
        ProbabilityWeight(0.0)
    }

    fn one() -> Self {
        ProbabilityWeight(1.0)
    }

    fn plus(&self, rhs: &Self) -> Self {
        ProbabilityWeight(self.0 + rhs.0)
    }

    fn times(&self, rhs: &Self) -> Self {
        ProbabilityWeight(self.0 * rhs.0)
    }

    fn left_divide(&self, rhs: &Self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero(Self::RING));
        }
        Ok(ProbabilityWeight(rhs.0 / self.0))
    }

    fn from_value(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidWeight {
                ring: Self::RING,
                value,
            });
        }
        // -0.0 == 0.0 but would print differently.
        Ok(ProbabilityWeight(if value == 0.0 { 0.0 } else { value }))
    }

    fn value(&self) -> f64 {
        self.0
    }
}

impl fmt::Display for ProbabilityWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_value(self.0, f)
    }
}
