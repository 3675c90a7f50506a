//! Exact arithmetic in real quadratic fields `K = ℚ(√d)`.
//!
//! Elements are stored on the integral basis `{1, ω}` of `O_K`, with
//! `ω = √d` for `d ≢ 1 (mod 4)` and `ω = (1+√d)/2` otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{QcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaKind {
    /// ω = √d
    SqrtD,
    /// ω = (1+√d)/2
    HalfOnePlusSqrtD,
}

/// `a + b·ω` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub a: BigRational,
    pub b: BigRational,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl FieldElement {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        FieldElement { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        FieldElement { a: rat(a), b: rat(b) }
    }

    pub fn rational(q: BigRational) -> Self {
        FieldElement { a: q, b: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn omega() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Integral in `O_K` iff both coordinates on `{1, ω}` are integers.
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        FieldElement { a: &self.a * q, b: &self.b * q }
    }

    /// Least common denominator of both coordinates.
    pub fn denominator(&self) -> BigInt {
        self.a.denom().lcm(self.b.denom())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}ω", self.a, self.b)
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        FieldElement { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, o: FieldElement) -> FieldElement {
        &self + &o
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        FieldElement { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, o: FieldElement) -> FieldElement {
        &self - &o
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { a: -&self.a, b: -&self.b }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// A real quadratic field together with its fundamental unit.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticField {
    pub d: i64,
    pub omega_kind: OmegaKind,
    pub disc: i64,
    /// Fundamental unit θ > 1.
    pub fu: FieldElement,
    pub fu_norm: i8,
    /// Whether ℤ[θ] = O_K.
    pub zt_equals_ok: bool,
    sqrt_d: f64,
}

fn is_squarefree(d: i64) -> bool {
    let mut p = 2i64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Sign of `p + q√d` for rationals `p, q`, decided exactly.
pub fn sign_surd(p: &BigRational, q: &BigRational, d: i64) -> Ordering {
    let sp = p.cmp(&BigRational::zero());
    let sq = q.cmp(&BigRational::zero());
    if sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal || sp == sq {
        return sq;
    }
    // opposite signs: compare p² with q²d
    let lhs = p * p;
    let rhs = q * q * rat(d);
    match lhs.cmp(&rhs) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => Ordering::Equal,
    }
}

impl QuadraticField {
    /// Builds `ℚ(√d)` and its fundamental unit.
    pub fn new(d: i64) -> Result<Self> {
        if d < 2 {
            return Err(QcError::InvalidInput(format!("d = {d} must be at least 2")));
        }
        if !is_squarefree(d) {
            return Err(QcError::InvalidInput(format!("d = {d} is not squarefree")));
        }
        if d > 1_000_000_000 {
            return Err(QcError::InvalidInput(format!("d = {d} too large")));
        }
        let omega_kind = if d.rem_euclid(4) == 1 {
            OmegaKind::HalfOnePlusSqrtD
        } else {
            OmegaKind::SqrtD
        };
        let disc = match omega_kind {
            OmegaKind::SqrtD => 4 * d,
            OmegaKind::HalfOnePlusSqrtD => d,
        };
        let mut field = QuadraticField {
            d,
            omega_kind,
            disc,
            fu: FieldElement::one(),
            fu_norm: 1,
            zt_equals_ok: false,
            sqrt_d: (d as f64).sqrt(),
        };
        let fu = field.fundamental_unit()?;
        let n = field.norm(&fu);
        field.fu_norm = if n == rat(1) { 1 } else { -1 };
        field.zt_equals_ok = fu.b.abs() == rat(1);
        field.fu = fu;
        Ok(field)
    }

    /// ω² = c0 + c1·ω.
    fn omega_sq(&self) -> (i64, i64) {
        match self.omega_kind {
            OmegaKind::SqrtD => (self.d, 0),
            OmegaKind::HalfOnePlusSqrtD => ((self.d - 1) / 4, 1),
        }
    }

    pub fn sqrt_d(&self) -> f64 {
        self.sqrt_d
    }

    /// (σ₁(ω), σ₂(ω)) in double precision.
    pub fn omega_embeddings(&self) -> (f64, f64) {
        match self.omega_kind {
            OmegaKind::SqrtD => (self.sqrt_d, -self.sqrt_d),
            OmegaKind::HalfOnePlusSqrtD => ((1.0 + self.sqrt_d) / 2.0, (1.0 - self.sqrt_d) / 2.0),
        }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let (c0, c1) = self.omega_sq();
        let bb = &x.b * &y.b;
        let a = &x.a * &y.a + &bb * rat(c0);
        let b = &x.a * &y.b + &x.b * &y.a + &bb * rat(c1);
        FieldElement { a, b }
    }

    pub fn conj(&self, x: &FieldElement) -> FieldElement {
        match self.omega_kind {
            OmegaKind::SqrtD => FieldElement { a: x.a.clone(), b: -&x.b },
            // ω' = 1 − ω
            OmegaKind::HalfOnePlusSqrtD => FieldElement { a: &x.a + &x.b, b: -&x.b },
        }
    }

    pub fn norm(&self, x: &FieldElement) -> BigRational {
        let (c0, c1) = self.omega_sq();
        // (a + bω)(a + bω') = a² + ab·Tr(ω) + b²·N(ω)
        let tr_w = rat(c1);
        let n_w = -rat(c0);
        &x.a * &x.a + &x.a * &x.b * tr_w + &x.b * &x.b * n_w
    }

    pub fn trace(&self, x: &FieldElement) -> BigRational {
        let (_, c1) = self.omega_sq();
        &x.a * rat(2) + &x.b * rat(c1)
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement> {
        let n = self.norm(x);
        if n.is_zero() {
            return Err(QcError::Arithmetic("division by zero".into()));
        }
        Ok(self.conj(x).scale(&n.recip()))
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &FieldElement, k: i64) -> Result<FieldElement> {
        let base = if k < 0 { self.inv(x)? } else { x.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = FieldElement::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        Ok(acc)
    }

    /// Writes `x` as `p + q√d`.
    pub fn to_surd(&self, x: &FieldElement) -> (BigRational, BigRational) {
        match self.omega_kind {
            OmegaKind::SqrtD => (x.a.clone(), x.b.clone()),
            OmegaKind::HalfOnePlusSqrtD => {
                let half = ratio(1, 2);
                (&x.a + &x.b * &half, &x.b * &half)
            }
        }
    }

    /// Exact sign of σ₁(x).
    pub fn sign(&self, x: &FieldElement) -> Ordering {
        let (p, q) = self.to_surd(x);
        sign_surd(&p, &q, self.d)
    }

    /// Exact comparison of σ₁(x) and σ₁(y).
    pub fn cmp(&self, x: &FieldElement, y: &FieldElement) -> Ordering {
        self.sign(&(x - y))
    }

    /// Element with σ₁ ≥ 0 (sign flip if needed).
    pub fn abs(&self, x: &FieldElement) -> FieldElement {
        if self.sign(x) == Ordering::Less {
            -x
        } else {
            x.clone()
        }
    }

    /// Absolute value of the conjugate, as a field element.
    pub fn abs_conj(&self, x: &FieldElement) -> FieldElement {
        let c = self.conj(x);
        self.abs(&c)
    }

    fn surd_to_f64(&self, p: &BigRational, q: &BigRational) -> f64 {
        let pf = p.to_f64().unwrap_or(f64::NAN);
        let qf = q.to_f64().unwrap_or(f64::NAN);
        if q.is_zero() {
            return pf;
        }
        if p.is_zero() || p.is_positive() == q.is_positive() {
            return pf + qf * self.sqrt_d;
        }
        // cancellation: p + q√d = (p² − q²d)/(p − q√d)
        let num = p * p - q * q * rat(self.d);
        let nf = num.to_f64().unwrap_or(f64::NAN);
        if nf == 0.0 {
            return 0.0;
        }
        nf / (pf - qf * self.sqrt_d)
    }

    /// (σ₁(x), σ₂(x)) in double precision.
    pub fn embed(&self, x: &FieldElement) -> (f64, f64) {
        let (p, q) = self.to_surd(x);
        let mq = -&q;
        (self.surd_to_f64(&p, &q), self.surd_to_f64(&p, &mq))
    }

    pub fn value(&self, x: &FieldElement) -> f64 {
        self.embed(x).0
    }

    /// Fast embeddings of `(A + Bω)/den` with integer coordinates.
    ///
    /// The smaller embedding is recovered from the exact norm to avoid cancellation.
    pub fn embed_int(&self, a: i64, b: i64, den: i64) -> (f64, f64) {
        let (w1, w2) = self.omega_embeddings();
        let (af, bf, df) = (a as f64, b as f64, den as f64);
        let s1 = (af + bf * w1) / df;
        let s2 = (af + bf * w2) / df;
        if a == 0 || b == 0 {
            return (s1, s2);
        }
        let (c0, c1) = self.omega_sq();
        let (a, b) = (a as i128, b as i128);
        let n = a * a + a * b * c1 as i128 - b * b * c0 as i128;
        let nf = n as f64 / (df * df);
        if s1.abs() >= s2.abs() {
            (s1, nf / s1)
        } else {
            (nf / s2, s2)
        }
    }

    /// Exact floor of σ₁(x).
    pub fn floor(&self, x: &FieldElement) -> BigInt {
        let approx = self.value(x).floor();
        let mut f = if approx.is_finite() {
            BigInt::from(approx as i64)
        } else {
            let (p, _) = self.to_surd(x);
            p.floor().to_integer()
        };
        loop {
            let fe = FieldElement::rational(BigRational::from_integer(f.clone()));
            if self.cmp(x, &fe) == Ordering::Less {
                f -= 1;
                continue;
            }
            let fe1 = FieldElement::rational(BigRational::from_integer(&f + 1));
            if self.cmp(x, &fe1) != Ordering::Less {
                f += 1;
                continue;
            }
            return f;
        }
    }

    /// Smallest unit > 1 of O_K, from the continued fraction of ω.
    fn fundamental_unit(&self) -> Result<FieldElement> {
        let omega = FieldElement::omega();
        let mut x = omega.clone();
        let (mut h_prev, mut h) = (BigInt::one(), BigInt::zero());
        let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
        // h/k runs over convergents of ω; h − kω is a unit exactly at the period
        for _ in 0..100_000 {
            let a = self.floor(&x);
            let h_new = &a * &h_prev + &h;
            let k_new = &a * &k_prev + &k;
            h = h_prev;
            k = k_prev;
            h_prev = h_new;
            k_prev = k_new;
            let eta = FieldElement::new(
                BigRational::from_integer(h_prev.clone()),
                -BigRational::from_integer(k_prev.clone()),
            );
            let n = self.norm(&eta);
            if n.abs() == rat(1) {
                let eps = self.conj(&eta);
                let eps = self.abs(&eps);
                if self.cmp(&eps, &FieldElement::one()) == Ordering::Greater {
                    return Ok(eps);
                }
            }
            let frac = &x - &FieldElement::rational(BigRational::from_integer(a));
            x = self.inv(&frac)?;
        }
        Err(QcError::Resource(format!("no unit found for d = {}", self.d)))
    }

    pub fn theta(&self) -> &FieldElement {
        &self.fu
    }

    /// (σ₁(θ), σ₂(θ)).
    pub fn theta_embeddings(&self) -> (f64, f64) {
        self.embed(&self.fu)
    }

    /// `θ^{-k}` as an exact positive element (equals `|θ'|^k`).
    pub fn theta_inv_pow(&self, k: i64) -> FieldElement {
        self.pow(&self.fu, -k).expect("θ is a unit")
    }

    /// Coordinates `(u, v)` with `x = u + vθ`; only when ℤ[θ] = O_K.
    pub fn to_theta_basis(&self, x: &FieldElement) -> Result<(BigRational, BigRational)> {
        if !self.zt_equals_ok {
            return Err(QcError::Unsupported(format!(
                "ℤ[θ] ≠ O_K for d = {}",
                self.d
            )));
        }
        // θ = t0 + t1·ω with t1 = ±1
        let t0 = &self.fu.a;
        let t1 = &self.fu.b;
        let v = &x.b / t1;
        let u = &x.a - &v * t0;
        Ok((u, v))
    }
}

impl QuadraticField {
    /// JSON-friendly summary.
    pub fn summary(&self) -> serde_json::Value {
        let (t1, t2) = self.theta_embeddings();
        serde_json::json!({
            "d": self.d,
            "omega_kind": self.omega_kind,
            "disc": self.disc,
            "fu": {"a": self.fu.a.to_string(), "b": self.fu.b.to_string()},
            "fu_value": t1,
            "fu_conj": t2,
            "fu_norm": self.fu_norm,
            "zt_equals_ok": self.zt_equals_ok,
        })
    }
}
