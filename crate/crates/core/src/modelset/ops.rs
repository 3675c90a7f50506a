//! Monoid operations on model sets and their truncations.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;

use super::{lattice, CloudPoint, ModelSetSpec, PointCloud, WindowSpec};
use crate::error::{QcError, Result};
use crate::numberfield::FieldElement;

fn same_field(a: &PointCloud, b: &PointCloud) -> Result<()> {
    if a.field.d != b.field.d {
        return Err(QcError::InvalidInput("clouds live in different fields".into()));
    }
    if !a.exact || !b.exact {
        return Err(QcError::Unsupported("exact coordinates required".into()));
    }
    Ok(())
}

fn reduce_den(pts: &mut [CloudPoint], den: i64) -> i64 {
    let mut g = den;
    for p in pts.iter() {
        g = g.gcd(&p.a).gcd(&p.b);
        if g == 1 {
            return den;
        }
    }
    for p in pts.iter_mut() {
        p.a /= g;
        p.b /= g;
    }
    den / g
}

/// `{αβ : α ∈ a, β ∈ b, 0 < αβ ≤ R}`, deduplicated by exact element.
pub fn monoid_product(a: &PointCloud, b: &PointCloud, range_max: f64) -> Result<PointCloud> {
    same_field(a, b)?;
    let pa: Vec<&CloudPoint> = a.positive().collect();
    let pb: Vec<&CloudPoint> = b.positive().collect();
    if pa.is_empty() || pb.is_empty() {
        return Ok(PointCloud::assemble(a.field.clone(), 1, vec![], range_max, false, a.lattice && b.lattice, None));
    }
    let (amin, bmin) = (pa[0].value, pb[0].value);
    let need_a = range_max / bmin;
    let need_b = range_max / amin;
    if a.range_max < need_a * (1.0 - 1e-12) || b.range_max < need_b * (1.0 - 1e-12) {
        return Err(QcError::Completeness(format!(
            "product up to {range_max} needs inputs complete to {need_a} and {need_b}, have {} and {}",
            a.range_max, b.range_max
        )));
    }
    let k = &a.field;
    let den = a
        .den
        .checked_mul(b.den)
        .ok_or_else(|| QcError::Resource("denominator overflow".into()))?;
    let lattice = a.lattice && b.lattice;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in &pa {
        for q in &pb {
            let v = p.value * q.value;
            if v > range_max * (1.0 + 1e-12) {
                break;
            }
            let (x, y) = mul_coords(k, (p.a, p.b), (q.a, q.b))?;
            if !seen.insert((x, y)) {
                continue;
            }
            let (value, conj) = k.embed_int(x, y, den);
            if value > range_max {
                continue;
            }
            out.push(CloudPoint { a: x, b: y, value, internal: if lattice { 0.0 } else { conj } });
        }
    }
    let den2 = reduce_den(&mut out, den);
    Ok(PointCloud::assemble(k.clone(), den2, out, range_max, false, lattice, None))
}

fn mul_coords(
    k: &crate::numberfield::QuadraticField,
    x: (i64, i64),
    y: (i64, i64),
) -> Result<(i64, i64)> {
    let e = k.mul(&FieldElement::from_ints(x.0, x.1), &FieldElement::from_ints(y.0, y.1));
    let cv = |q: &BigRational| -> Result<i64> {
        num_traits::ToPrimitive::to_i64(&q.to_integer())
            .ok_or_else(|| QcError::Resource("coordinate overflow".into()))
    };
    Ok((cv(&e.a)?, cv(&e.b)?))
}

/// `{α + β : 0 < α + β ≤ R}` over two truncations, deduplicated.
///
/// Both inputs must be complete up to `R`; for signed inputs, sums using a
/// summand beyond the input ranges are not produced, so callers buffer the
/// input ranges.
pub fn sumset(a: &PointCloud, b: &PointCloud, range_max: f64) -> Result<PointCloud> {
    same_field(a, b)?;
    let need = |c: &PointCloud, other: &PointCloud| -> f64 {
        if c.signed || other.signed {
            range_max
        } else {
            range_max - other.positive().next().map_or(0.0, |p| p.value)
        }
    };
    if a.range_max < need(a, b) || b.range_max < need(b, a) {
        return Err(QcError::Completeness(format!(
            "sumset up to {range_max} needs inputs complete to at least {range_max}, have {} and {}",
            a.range_max, b.range_max
        )));
    }
    let k = &a.field;
    let den = a.den.lcm(&b.den);
    let (fa, fb) = (den / a.den, den / b.den);
    let lattice = a.lattice && b.lattice;
    let bv: Vec<f64> = b.values();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in &a.points {
        // β ∈ (−α, R − α]
        let lo = bv.partition_point(|&v| v <= -p.value - 1e-9 * (1.0 + p.value.abs()));
        for q in &b.points[lo..] {
            let v = p.value + q.value;
            if v > range_max * (1.0 + 1e-12) + 1e-12 {
                break;
            }
            let x = p.a.checked_mul(fa).zip(q.a.checked_mul(fb)).and_then(|(u, w)| u.checked_add(w));
            let y = p.b.checked_mul(fa).zip(q.b.checked_mul(fb)).and_then(|(u, w)| u.checked_add(w));
            let (x, y) = x.zip(y).ok_or_else(|| QcError::Resource("coordinate overflow".into()))?;
            if x == 0 && y == 0 {
                continue;
            }
            let (value, conj) = k.embed_int(x, y, den);
            if value <= 0.0 || value > range_max {
                continue;
            }
            if seen.insert((x, y)) {
                out.push(CloudPoint { a: x, b: y, value, internal: if lattice { 0.0 } else { conj } });
            }
        }
    }
    let den2 = reduce_den(&mut out, den);
    Ok(PointCloud::assemble(k.clone(), den2, out, range_max, false, lattice, None))
}

/// `𝔞 ∗ 𝔟 = 𝓜(𝔄𝔅, D·D')`.
pub fn star_product(a: &ModelSetSpec, b: &ModelSetSpec) -> Result<ModelSetSpec> {
    if a.field.d != b.field.d {
        return Err(QcError::InvalidInput("different fields".into()));
    }
    let k = &a.field;
    if a.lattice_mode || b.lattice_mode {
        if a.lattice_mode && b.lattice_mode {
            return ModelSetSpec::lattice(k.clone(), k.mul(&a.scale, &b.scale));
        }
        return Err(QcError::Unsupported("star product mixing lattice mode".into()));
    }
    if a.window.inner.is_some() || b.window.inner.is_some() {
        return Err(QcError::Unsupported("star product of annular windows".into()));
    }
    let basis = lattice::product(k, &a.ideal_basis, &b.ideal_basis)?;
    let bound = a.window.bound.mul(k, &b.window.bound)?;
    let mut window = WindowSpec::new(bound, a.window.strict && b.window.strict);
    window.exponent = match (&a.window.exponent, &b.window.exponent) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    ModelSetSpec::new(k.clone(), basis, window, k.mul(&a.scale, &b.scale))
}

/// `θᵏ·𝔞`: basis times θᵏ, window times `|θ'|ᵏ`.
pub fn scale_by_unit(spec: &ModelSetSpec, k_pow: i64) -> Result<ModelSetSpec> {
    let k = &spec.field;
    let tk = k.pow(&k.fu, k_pow)?;
    if spec.lattice_mode {
        return ModelSetSpec::lattice(k.clone(), k.mul(&spec.scale, &tk));
    }
    let basis = lattice::scale(k, &spec.ideal_basis, &tk)?;
    let c = k.theta_inv_pow(k_pow);
    let mut window = spec.window.scaled(k, &c)?;
    window.exponent = spec.window.exponent.as_ref().map(|x| x + BigRational::from_integer(k_pow.into()));
    ModelSetSpec::new(k.clone(), basis, window, spec.scale.clone())
}

/// Bit `a` is 1 iff some integer b puts `aθ + b` in the model set.
pub fn coding_function(spec: &ModelSetSpec, a_max: u64) -> Result<Vec<bool>> {
    let k = &spec.field;
    if !k.zt_equals_ok {
        return Err(QcError::Unsupported(format!("ℤ[θ] ≠ O_K for d = {}", k.d)));
    }
    if spec.lattice_mode {
        return Err(QcError::Unsupported("coding function needs a model set".into()));
    }
    if let Some(x) = &spec.window.exponent {
        if x.is_negative() {
            return Err(QcError::InvalidInput("window exponent must be ≥ 0".into()));
        }
    }
    let window = spec.effective_window()?;
    let basis = spec.effective_basis()?;
    let theta_c = k.conj(&k.fu);
    let tc = k.value(&theta_c);
    let mut bits = Vec::with_capacity(a_max as usize);
    for a in 1..=a_max {
        let y = a as f64 * tc;
        let b0 = -(y.round() as i64);
        let mut hit = false;
        for b in [b0 - 1, b0, b0 + 1] {
            let elem = &k.fu.scale(&BigRational::from_integer(BigInt::from(a)))
                + &FieldElement::from_ints(b, 0);
            if !lattice::contains(&basis, &elem) {
                continue;
            }
            let yf = y + b as f64;
            if window.contains(k, yf, || k.conj(&elem))? {
                hit = true;
                break;
            }
        }
        bits.push(hit);
    }
    Ok(bits)
}

/// Φ(𝔞) = 𝔞·O_K, the underlying fractional ideal of the spec.
pub fn extend_to_ideal(spec: &ModelSetSpec) -> Result<[FieldElement; 2]> {
    spec.effective_basis()
}

/// Checks that O_K-combinations of the cloud's points lie in and generate the ideal.
pub fn verify_extension(spec: &ModelSetSpec, cloud: &PointCloud) -> Result<bool> {
    let k = &spec.field;
    let ideal = extend_to_ideal(spec)?;
    let w = FieldElement::omega();
    let mut gens = Vec::new();
    for i in 0..cloud.len().min(64) {
        let e = cloud.element(i);
        if e.is_zero() {
            continue;
        }
        let ew = k.mul(&e, &w);
        if !lattice::contains(&ideal, &e) || !lattice::contains(&ideal, &ew) {
            return Ok(false);
        }
        gens.push(e);
        gens.push(ew);
    }
    match lattice::hnf(&gens) {
        Ok(h) => Ok(h == ideal),
        Err(_) => Ok(false),
    }
}
