//! The two scalar modes: exact rationals and binary64 floats.
//!
//! A game, its graph operators, and its decomposition all run in one mode.
//! Edge weights are always stored exactly and converted on demand.

use crate::error::{Error, Result};
use crate::graph::{GameGraph, WeightTable};
use num::traits::{NumAssignRef, Signed};
use num::{BigInt, Num, One, ToPrimitive, Zero};
use std::fmt::Debug;

pub type Rational = num::BigRational;

/// Shorthand for an exact fraction `numer / denom`.
pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarMode {
    Rational,
    Float,
}

impl std::fmt::Display for ScalarMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScalarMode::Rational => "rational",
            ScalarMode::Float => "float",
        })
    }
}

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + Signed
    + NumAssignRef
    + std::iter::Sum
{
    const MODE: ScalarMode;

    fn from_rational(q: &Rational) -> Self;

    /// Exact for both modes; floats convert through their binary expansion.
    fn to_rational(&self) -> Rational;

    fn to_f64(&self) -> f64;

    fn from_i64(k: i64) -> Self;

    /// Exact for rationals (finite inputs only), identity for floats.
    fn from_f64(x: f64) -> Self;

    /// Rejects non-finite floats.
    fn check(&self) -> Result<()>;

    /// Zero test: exact for rationals, `|x| <= tol * max(1, scale)` for floats.
    fn is_negligible(&self, tol: f64, scale: f64) -> bool;

    /// Rationals as `p/q` (or `p`), floats with 12 significant digits.
    fn render(&self) -> String;

    /// Selection key for partial pivoting; larger is better, zero means unusable.
    fn pivot_key(&self) -> f64;

    #[doc(hidden)]
    fn weight_table(graph: &GameGraph) -> &WeightTable<Self>;
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::Rational;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_i64(k: i64) -> Self {
        Rational::from_integer(BigInt::from(k))
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_else(Rational::zero)
    }

    fn check(&self) -> Result<()> {
        Ok(())
    }

    fn is_negligible(&self, _tol: f64, _scale: f64) -> bool {
        self.is_zero()
    }

    fn render(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn pivot_key(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    fn weight_table(graph: &GameGraph) -> &WeightTable<Self> {
        &graph.weights_exact
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Rational::zero)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_i64(k: i64) -> Self {
        k as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn check(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::Validation(format!("non-finite float value {self}")))
        }
    }

    fn is_negligible(&self, tol: f64, scale: f64) -> bool {
        self.abs() <= tol * scale.abs().max(1.0)
    }

    fn render(&self) -> String {
        render_float(*self)
    }

    fn pivot_key(&self) -> f64 {
        self.abs()
    }

    fn weight_table(graph: &GameGraph) -> &WeightTable<Self> {
        &graph.weights_float
    }
}

fn render_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    // round to 12 significant digits, then print the shortest decimal of that value
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if (1e-4..1e15).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Parses `p/q` or an integer literal into a reduced fraction.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Validation(format!("`{s}` is not a rational literal (use p/q or an integer)"));
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p = BigInt::from_str_radix(p, 10).map_err(|_| bad())?;
    let q = BigInt::from_str_radix(q, 10).map_err(|_| bad())?;
    if q.is_zero() {
        return Err(Error::Validation(format!("`{s}` has a zero denominator")));
    }
    Ok(Rational::new(p, q))
}
