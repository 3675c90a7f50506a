//! Rank-2 ℤ-modules in K written on the `{1, ω}` basis, in Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{QcError, Result};
use crate::numberfield::{FieldElement, QuadraticField};

/// Canonical basis `e1 = (g + hω)/D`, `e2 = cω/D` with `g, c > 0`, `0 ≤ h < c`.
pub fn hnf(gens: &[FieldElement]) -> Result<[FieldElement; 2]> {
    if gens.is_empty() {
        return Err(QcError::InvalidInput("no generators".into()));
    }
    let mut den = BigInt::one();
    for g in gens {
        den = den.lcm(&g.denominator());
    }
    let dq = BigRational::from_integer(den.clone());
    let mut rows: Vec<(BigInt, BigInt)> = gens
        .iter()
        .map(|g| ((&g.a * &dq).to_integer(), (&g.b * &dq).to_integer()))
        .collect();

    // gcd-combine the first column into a single pivot row
    let mut pivot: Option<(BigInt, BigInt)> = None;
    let mut rest_c = BigInt::zero();
    for r in rows.drain(..) {
        match pivot.take() {
            None => {
                if r.0.is_zero() {
                    rest_c = rest_c.gcd(&r.1);
                } else {
                    pivot = Some(r);
                }
            }
            Some(p) => {
                if r.0.is_zero() {
                    rest_c = rest_c.gcd(&r.1);
                    pivot = Some(p);
                    continue;
                }
                let eg = p.0.extended_gcd(&r.0);
                let (g, x, y) = (eg.gcd, eg.x, eg.y);
                let new_p = (g.clone(), &x * &p.1 + &y * &r.1);
                // the complementary combination has zero first entry
                let u = &r.0 / &g;
                let v = &p.0 / &g;
                let zero_row_b = &u * &p.1 - &v * &r.1;
                rest_c = rest_c.gcd(&zero_row_b);
                pivot = Some(new_p);
            }
        }
    }
    let (mut g, mut h) = pivot.ok_or_else(|| QcError::InvalidInput("rank < 2".into()))?;
    if rest_c.is_zero() {
        return Err(QcError::InvalidInput("generators span a rank-1 module".into()));
    }
    if g.is_negative() {
        g = -g;
        h = -h;
    }
    let c = rest_c.abs();
    h = h.mod_floor(&c);
    let e1 = FieldElement::new(BigRational::new(g, den.clone()), BigRational::new(h, den.clone()));
    let e2 = FieldElement::new(BigRational::zero(), BigRational::new(c, den));
    Ok([e1, e2])
}

/// Integer coordinates of `x` on an HNF basis, if it lies in the lattice.
pub fn coordinates(basis: &[FieldElement; 2], x: &FieldElement) -> Option<(BigInt, BigInt)> {
    let [e1, e2] = basis;
    if e1.a.is_zero() || e2.b.is_zero() {
        return None;
    }
    let i = &x.a / &e1.a;
    if !i.is_integer() {
        return None;
    }
    let j = (&x.b - &i * &e1.b) / &e2.b;
    if !j.is_integer() {
        return None;
    }
    Some((i.to_integer(), j.to_integer()))
}

pub fn contains(basis: &[FieldElement; 2], x: &FieldElement) -> bool {
    coordinates(basis, x).is_some()
}

/// Product of two lattices as a ℤ-module (the ideal product for ideals).
pub fn product(k: &QuadraticField, a: &[FieldElement; 2], b: &[FieldElement; 2]) -> Result<[FieldElement; 2]> {
    let gens: Vec<FieldElement> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| (x, y)))
        .map(|(x, y)| k.mul(x, y))
        .collect();
    hnf(&gens)
}

/// The lattice `γ·𝔄`.
pub fn scale(k: &QuadraticField, basis: &[FieldElement; 2], g: &FieldElement) -> Result<[FieldElement; 2]> {
    hnf(&[k.mul(&basis[0], g), k.mul(&basis[1], g)])
}

/// Whether the ℤ-module is closed under multiplication by ω (a fractional ideal of O_K).
pub fn is_ok_module(k: &QuadraticField, basis: &[FieldElement; 2]) -> bool {
    let w = FieldElement::omega();
    basis.iter().all(|e| contains(basis, &k.mul(e, &w)))
}

/// Covolume determinant `σ₁(e1)σ₂(e2) − σ₂(e1)σ₁(e2)` squared, exactly.
pub fn discriminant(k: &QuadraticField, basis: &[FieldElement; 2]) -> BigRational {
    // det of the trace form Tr(e_i e_j)
    let t = |x: &FieldElement, y: &FieldElement| k.trace(&k.mul(x, y));
    let t11 = t(&basis[0], &basis[0]);
    let t12 = t(&basis[0], &basis[1]);
    let t22 = t(&basis[1], &basis[1]);
    &t11 * &t22 - &t12 * &t12
}
