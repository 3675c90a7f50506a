//! Interval windows in the internal space with exactly decidable boundaries.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{QcError, Result};
use crate::numberfield::{FieldElement, QuadraticField};
use crate::numeric::pi_third_pow_interval;

/// A window radius `w = (π/3)^k · γ^{1/r}` with `γ ∈ K` positive.
///
/// Every radius used here (powers `|θ'|^x` with rational x, products of such,
/// dual radii `(π/3)/w`, shell multiples `n·w`) has this shape, so the test
/// `|y| < w` for `y ∈ K` reduces to an exact comparison in K (and against a
/// 100-digit enclosure of π when `k ≠ 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct WindowBound {
    pub gamma: FieldElement,
    pub root: u32,
    pub pi3_pow: i64,
    approx: f64,
}

impl WindowBound {
    fn build(k: &QuadraticField, gamma: FieldElement, root: u32, pi3_pow: i64) -> Result<Self> {
        if root == 0 {
            return Err(QcError::InvalidInput("root must be ≥ 1".into()));
        }
        if gamma.is_zero() || k.sign(&gamma) != Ordering::Greater {
            return Err(QcError::InvalidInput("window bound must be positive".into()));
        }
        let g = k.value(&gamma);
        let approx = (g.ln() / root as f64 + pi3_pow as f64 * (std::f64::consts::PI / 3.0).ln()).exp();
        Ok(WindowBound { gamma, root, pi3_pow, approx })
    }

    /// `w = γ` for positive γ ∈ K.
    pub fn element(k: &QuadraticField, gamma: FieldElement) -> Result<Self> {
        Self::build(k, gamma, 1, 0)
    }

    pub fn rational(k: &QuadraticField, q: BigRational) -> Result<Self> {
        Self::build(k, FieldElement::rational(q), 1, 0)
    }

    /// Exact binary value of a float radius.
    pub fn from_f64(k: &QuadraticField, w: f64) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(QcError::InvalidInput(format!("window radius {w} must be positive")));
        }
        let q = BigRational::from_float(w).ok_or_else(|| QcError::InvalidInput("bad float".into()))?;
        Self::rational(k, q)
    }

    /// `|σ₂(θ)|^x = θ^{-x}` for rational x.
    pub fn exponent(k: &QuadraticField, x: &BigRational) -> Result<Self> {
        let p = x
            .numer()
            .to_i64()
            .ok_or_else(|| QcError::InvalidInput("exponent numerator too large".into()))?;
        let q = x
            .denom()
            .to_u32()
            .ok_or_else(|| QcError::InvalidInput("exponent denominator too large".into()))?;
        if q > 1024 || p.abs() > 4096 {
            return Err(QcError::InvalidInput(format!("exponent {x} outside supported range")));
        }
        Self::build(k, k.theta_inv_pow(p), q, 0)
    }

    pub fn value(&self) -> f64 {
        self.approx
    }

    /// `w·w'`.
    pub fn mul(&self, k: &QuadraticField, o: &WindowBound) -> Result<Self> {
        let g = k.mul(
            &k.pow(&self.gamma, o.root as i64)?,
            &k.pow(&o.gamma, self.root as i64)?,
        );
        Self::build(k, g, self.root * o.root, self.pi3_pow + o.pi3_pow)
    }

    /// `c·w` for positive `c ∈ K`.
    pub fn mul_elem(&self, k: &QuadraticField, c: &FieldElement) -> Result<Self> {
        let g = k.mul(&self.gamma, &k.pow(c, self.root as i64)?);
        Self::build(k, g, self.root, self.pi3_pow)
    }

    /// `(π/3)/w`.
    pub fn dual(&self, k: &QuadraticField) -> Result<Self> {
        Self::build(k, k.inv(&self.gamma)?, self.root, 1 - self.pi3_pow)
    }

    /// Compares `|y|` with `w` exactly.
    pub fn cmp_abs(&self, k: &QuadraticField, y: &FieldElement) -> Result<Ordering> {
        if y.is_zero() {
            return Ok(Ordering::Less);
        }
        let z = k.abs(y);
        let zr = k.pow(&z, self.root as i64)?;
        if self.pi3_pow == 0 {
            return Ok(k.cmp(&zr, &self.gamma));
        }
        let q = k.div(&zr, &self.gamma)?;
        let (lo, hi) = pi_third_pow_interval(self.pi3_pow * self.root as i64);
        if k.cmp(&q, &FieldElement::rational(lo)) != Ordering::Greater {
            return Ok(Ordering::Less);
        }
        if k.cmp(&q, &FieldElement::rational(hi)) != Ordering::Less {
            return Ok(Ordering::Greater);
        }
        Err(QcError::BoundaryUndecidable(format!(
            "|{y}| against a π-dependent radius within 1e-100"
        )))
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "gamma": {"a": self.gamma.a.to_string(), "b": self.gamma.b.to_string()},
            "root": self.root,
            "pi_over_3_power": self.pi3_pow,
            "value": self.approx,
        })
    }
}

/// Internal-space window `|y| < w` (strict) or `|y| ≤ w`, optionally with a
/// hole `|y| ≤ w_in` removed (shells of dual model sets).
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    pub bound: WindowBound,
    pub strict: bool,
    pub inner: Option<WindowBound>,
    /// Exponent x when the radius is `|θ'|^x`, kept for reporting.
    pub exponent: Option<BigRational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership {
    Inside,
    Outside,
    Undecided,
}

impl WindowSpec {
    pub fn new(bound: WindowBound, strict: bool) -> Self {
        WindowSpec { bound, strict, inner: None, exponent: None }
    }

    /// `|y| < |θ'|^x` (strict) or `≤` (closed, 𝔞_x⁺).
    pub fn exponent(k: &QuadraticField, x: &BigRational, strict: bool) -> Result<Self> {
        let mut w = Self::new(WindowBound::exponent(k, x)?, strict);
        w.exponent = Some(x.clone());
        Ok(w)
    }

    pub fn radius(&self) -> f64 {
        self.bound.value()
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner.as_ref().map_or(0.0, |b| b.value())
    }

    /// Total internal length `2(w − w_in)`.
    pub fn measure(&self) -> f64 {
        2.0 * (self.radius() - self.inner_radius())
    }

    /// Float pre-classification of an internal coordinate.
    #[inline]
    pub fn classify_f64(&self, y: f64) -> Membership {
        const REL: f64 = 1e-9;
        let ay = y.abs();
        let w = self.bound.value();
        if ay > w * (1.0 + REL) {
            return Membership::Outside;
        }
        if let Some(inner) = &self.inner {
            let wi = inner.value();
            if ay < wi * (1.0 - REL) {
                return Membership::Outside;
            }
            if ay <= wi * (1.0 + REL) {
                return Membership::Undecided;
            }
        }
        if ay < w * (1.0 - REL) {
            Membership::Inside
        } else {
            Membership::Undecided
        }
    }

    /// Exact membership of an internal coordinate `y ∈ K`.
    pub fn contains_exact(&self, k: &QuadraticField, y: &FieldElement) -> Result<bool> {
        if let Some(inner) = &self.inner {
            if inner.cmp_abs(k, y)? != Ordering::Greater {
                return Ok(false);
            }
        }
        Ok(match self.bound.cmp_abs(k, y)? {
            Ordering::Less => true,
            Ordering::Equal => !self.strict,
            Ordering::Greater => false,
        })
    }

    pub fn contains(&self, k: &QuadraticField, y_f: f64, y: impl FnOnce() -> FieldElement) -> Result<bool> {
        match self.classify_f64(y_f) {
            Membership::Inside => Ok(true),
            Membership::Outside => Ok(false),
            Membership::Undecided => self.contains_exact(k, &y()),
        }
    }

    /// Scales the window by a positive element of K.
    pub fn scaled(&self, k: &QuadraticField, c: &FieldElement) -> Result<Self> {
        Ok(WindowSpec {
            bound: self.bound.mul_elem(k, c)?,
            strict: self.strict,
            inner: match &self.inner {
                Some(i) => Some(i.mul_elem(k, c)?),
                None => None,
            },
            exponent: None,
        })
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "radius": self.radius(),
            "strict": self.strict,
            "exponent": self.exponent.as_ref().map(|x| x.to_string()),
            "bound": self.bound.describe(),
            "inner": self.inner.as_ref().map(|i| i.describe()),
        })
    }
}

/// `w ≥ 1/2` check used by the coding function shortcut.
pub fn at_least_half(k: &QuadraticField, b: &WindowBound) -> Result<bool> {
    let half = FieldElement::rational(BigRational::new(1.into(), 2.into()));
    Ok(b.cmp_abs(k, &half)? != Ordering::Greater)
}
