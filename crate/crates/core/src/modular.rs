//! The modular invariant `J(𝔞) = ζ_𝔞(6)²/ζ_𝔞(4)³`, `j = 12³/(1 − (49/40)J)`,
//! the Diophantine family `j_ε(θ)` and numerical checks of Pink's theorem.

use std::cmp::Ordering;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{QcError, Result};
use crate::modelset::{enumerate, window, ModelSetSpec, PointCloud, WindowBound};
use crate::numberfield::{rat, ratio, FieldElement, QuadraticField};
use crate::zeta::{zeta_direct, EvalResult};

pub const J_FACTOR: f64 = 49.0 / 40.0;

/// Prefactor in `j = p/(1 − (49/40)J)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prefactor {
    #[default]
    TwelveCubed,
    Twelve,
}

impl Prefactor {
    pub fn value(&self) -> f64 {
        match self {
            Prefactor::TwelveCubed => 1728.0,
            Prefactor::Twelve => 12.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JValue {
    /// `ζ(6)²/ζ(4)³`
    pub big_j: f64,
    pub big_j_bound: f64,
    /// `None` when `1 − (49/40)J` is zero within the bound.
    pub j: Option<f64>,
    pub j_infinite: bool,
    pub zeta4: f64,
    pub zeta6: f64,
    pub points: usize,
}

fn j_from_zetas(z4: &EvalResult, z6: &EvalResult, prefactor: Prefactor, points: usize) -> JValue {
    let (a, b) = (z4.value.re, z6.value.re);
    if a == 0.0 {
        return JValue {
            big_j: 0.0,
            big_j_bound: 0.0,
            j: Some(prefactor.value()),
            j_infinite: false,
            zeta4: a,
            zeta6: b,
            points,
        };
    }
    let big_j = b * b / (a * a * a);
    let rel = 2.0 * z6.error_bound / b.abs() + 3.0 * z4.error_bound / a.abs();
    let big_j_bound = big_j.abs() * rel + 4.0 * f64::EPSILON * big_j.abs();
    let den = 1.0 - J_FACTOR * big_j;
    let tol = (J_FACTOR * big_j_bound).max(1e-12);
    let j_infinite = den.abs() <= tol;
    JValue {
        big_j,
        big_j_bound,
        j: if j_infinite { None } else { Some(prefactor.value() / den) },
        j_infinite,
        zeta4: a,
        zeta6: b,
        points,
    }
}

/// `J(𝔞)` and `j(𝔞)` from the direct zeta sums of a complete cloud.
pub fn j_invariant(cloud: &PointCloud) -> Result<JValue> {
    let z4 = zeta_direct(cloud, Complex64::new(4.0, 0.0))?;
    let z6 = zeta_direct(cloud, Complex64::new(6.0, 0.0))?;
    Ok(j_from_zetas(&z4, &z6, Prefactor::TwelveCubed, cloud.positive().count()))
}

/// Tests `‖nθ‖ < ε` for n = 1..=n_max. Uses floats away from the boundary and
/// exact arithmetic in K near it.
fn lambda_eps_unchecked(k: &QuadraticField, theta: &FieldElement, eps: &WindowBound, n_max: u64) -> Result<Vec<u64>> {
    if n_max > 200_000_000 {
        return Err(QcError::Resource(format!("n_max = {n_max} too large")));
    }
    let th = k.value(theta);
    let e = eps.value();
    let mut out = Vec::new();
    for n in 1..=n_max {
        let x = n as f64 * th;
        let r = x.round();
        let frac = x - r;
        let slack = 1e-8 * (1.0 + x.abs() * 1e-7);
        let d = frac.abs();
        if d < e - slack {
            out.push(n);
            continue;
        }
        if d > e + slack && (0.5 - d) > slack {
            continue;
        }
        // exact: y = nθ − round(nθ)
        let nt = theta.scale(&rat(n as i64));
        let half = FieldElement::rational(ratio(1, 2));
        let ri = k.floor(&(nt.clone() + half));
        let y = nt - FieldElement::rational(BigRational::from_integer(ri));
        if eps.cmp_abs(k, &y)? == Ordering::Less {
            out.push(n);
        }
    }
    Ok(out)
}

/// `Λ_ε(θ) ∩ [1, n_max] = {n : ‖nθ‖ < ε}` for `0 < ε < 1/2`.
pub fn lambda_eps(k: &QuadraticField, theta: &FieldElement, eps: &WindowBound, n_max: u64) -> Result<Vec<u64>> {
    if window::at_least_half(k, eps)? {
        return Err(QcError::InvalidInput("ε ≥ 1/2 admits every n".into()));
    }
    lambda_eps_unchecked(k, theta, eps, n_max)
}

/// `ε = θ^{−x}` for rational x.
pub fn eps_power(k: &QuadraticField, x: &BigRational) -> Result<WindowBound> {
    WindowBound::exponent(k, x)
}

#[derive(Debug, Clone, Serialize)]
pub struct JEps {
    pub eps: f64,
    pub count: usize,
    /// `ζ_{θ,ε}(6)²/ζ_{θ,ε}(4)³`, prefactor-free.
    pub ratio: f64,
    /// `(49/40)·ratio`.
    pub big_j_eps: f64,
    pub j_eps: Option<f64>,
    pub tail4: f64,
    pub tail6: f64,
}

fn j_eps_from(ns: &[u64], eps: f64, n_max: u64, prefactor: Prefactor) -> Result<JEps> {
    if ns.is_empty() {
        return Ok(JEps {
            eps,
            count: 0,
            ratio: 0.0,
            big_j_eps: 0.0,
            j_eps: Some(prefactor.value()),
            tail4: 0.0,
            tail6: 0.0,
        });
    }
    let vals: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let density = (2.0 * eps).min(1.0);
    let cloud = PointCloud::from_values(vals, n_max as f64, Some(density))?;
    let z4 = zeta_direct(&cloud, Complex64::new(4.0, 0.0))?;
    let z6 = zeta_direct(&cloud, Complex64::new(6.0, 0.0))?;
    if z4.error_bound > 1e-10 {
        return Err(QcError::Completeness(format!(
            "ζ(4) tail bound {:.2e} exceeds 1e-10; raise n_max",
            z4.error_bound
        )));
    }
    let (a, b) = (z4.value.re, z6.value.re);
    let r = b * b / (a * a * a);
    let big = J_FACTOR * r;
    let den = 1.0 - big;
    Ok(JEps {
        eps,
        count: ns.len(),
        ratio: r,
        big_j_eps: big,
        j_eps: if den.abs() < 1e-12 { None } else { Some(prefactor.value() / den) },
        tail4: z4.error_bound,
        tail6: z6.error_bound,
    })
}

/// `J_ε(θ) = (49/40)ζ_{θ,ε}(6)²/ζ_{θ,ε}(4)³` and `j_ε = p/(1 − J_ε)`.
pub fn j_eps(k: &QuadraticField, theta: &FieldElement, eps: &WindowBound, n_max: u64, prefactor: Prefactor) -> Result<JEps> {
    let ns = lambda_eps(k, theta, eps, n_max)?;
    j_eps_from(&ns, eps.value(), n_max, prefactor)
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantumJReport {
    pub theta: f64,
    pub x: String,
    pub eps_sequence: Vec<f64>,
    pub j_values: Vec<JEps>,
    pub lambda_counts: Vec<usize>,
}

/// `j_ε(θ)` along `ε = θ^{−x−m}`, m = 1..=m_max.
pub fn quantum_j(k: &QuadraticField, x: &BigRational, m_max: u32, n_max: u64, prefactor: Prefactor) -> Result<QuantumJReport> {
    let theta = k.theta().clone();
    let mut rep = QuantumJReport {
        theta: k.value(&theta),
        x: x.to_string(),
        eps_sequence: vec![],
        j_values: vec![],
        lambda_counts: vec![],
    };
    for m in 1..=m_max {
        let eps = eps_power(k, &(x + rat(m as i64)))?;
        let ns = lambda_eps_unchecked(k, &theta, &eps, n_max)?;
        let je = j_eps_from(&ns, eps.value(), n_max, prefactor)?;
        rep.eps_sequence.push(eps.value());
        rep.lambda_counts.push(je.count);
        rep.j_values.push(je);
    }
    Ok(rep)
}

fn check_pink_input(k: &QuadraticField, x: &BigRational) -> Result<()> {
    if !k.zt_equals_ok {
        return Err(QcError::Unsupported(format!("O_K ≠ ℤ[θ] for d = {}", k.d)));
    }
    if *x < rat(0) || *x >= rat(1) {
        return Err(QcError::InvalidInput(format!("x = {x} must lie in [0, 1)")));
    }
    Ok(())
}

/// One-sided distance `max_{a ∈ A ∩ [lo, hi]} min_{b ∈ B} |a − b|` (B sorted).
fn one_sided(a: &[f64], b: &[f64], lo: f64, hi: f64) -> f64 {
    let mut d: f64 = 0.0;
    for &v in a.iter().filter(|&&v| v >= lo && v <= hi) {
        let i = b.partition_point(|&w| w < v);
        let mut best = f64::INFINITY;
        if i < b.len() {
            best = best.min(b[i] - v);
        }
        if i > 0 {
            best = best.min(v - b[i - 1]);
        }
        d = d.max(best);
    }
    d
}

/// Symmetric Hausdorff distance on `[lo, hi]`.
pub fn hausdorff(a: &[f64], b: &[f64], lo: f64, hi: f64) -> f64 {
    one_sided(a, b, lo, hi).max(one_sided(b, a, lo, hi))
}

#[derive(Debug, Clone, Serialize)]
pub struct PinkReport {
    pub x: String,
    pub m_values: Vec<u32>,
    pub set_distances: Vec<f64>,
    pub ratios: Vec<f64>,
    pub counts: Vec<usize>,
    pub target_count: usize,
    pub value_gaps: Vec<f64>,
    pub j_sequence: Vec<f64>,
    /// `J(𝔞_x)`
    pub target: Option<f64>,
    /// `J(𝔞_x⁺)`, present when the boundary is attained.
    pub target_closed: Option<f64>,
    #[serde(skip)]
    pub scaled_sets: Vec<Vec<f64>>,
}

impl PinkReport {
    fn new(x: &BigRational) -> Self {
        PinkReport {
            x: x.to_string(),
            m_values: vec![],
            set_distances: vec![],
            ratios: vec![],
            counts: vec![],
            target_count: 0,
            value_gaps: vec![],
            j_sequence: vec![],
            target: None,
            target_closed: None,
            scaled_sets: vec![],
        }
    }

    /// CSV of the scaled sets: `m,value`.
    pub fn scaled_csv(&self) -> String {
        let mut s = String::from("m,value\n");
        for (m, set) in self.m_values.iter().zip(&self.scaled_sets) {
            for v in set {
                s.push_str(&format!("{m},{v:.17e}\n"));
            }
        }
        s
    }
}

/// `Δ = θ − θ'`.
fn delta(k: &QuadraticField) -> f64 {
    let (a, b) = k.theta_embeddings();
    a - b
}

/// Distances between `(Δ/θ^m)Λ_{x+m}` and `𝔞_x` on `[0, R]`, m = 0..=m_max.
pub fn pink_set_check(k: Arc<QuadraticField>, x: &BigRational, m_max: u32, r: f64) -> Result<PinkReport> {
    check_pink_input(&k, x)?;
    let spec = ModelSetSpec::ring(k.clone(), x, true)?;
    let target = enumerate(&spec, r, false)?;
    let tv = target.positive_values();
    let lo = 2.0 * target.gap_max;
    let hi = r - lo;
    if !(lo < hi) {
        return Err(QcError::InsufficientData(format!("range {r} too short for the edge buffer {lo}")));
    }
    let theta = k.theta().clone();
    let th = k.value(&theta);
    let dl = delta(&k);
    let mut rep = PinkReport::new(x);
    rep.target_count = tv.len();
    for m in 0..=m_max {
        let scale = dl / th.powi(m as i32);
        let n_max = (r / scale).ceil() as u64 + 1;
        let eps = eps_power(&k, &(x + rat(m as i64)))?;
        let ns = lambda_eps_unchecked(&k, &theta, &eps, n_max)?;
        let set: Vec<f64> = ns.iter().map(|&n| n as f64 * scale).filter(|&v| v <= r).collect();
        let d = hausdorff(&set, &tv, lo, hi);
        rep.m_values.push(m);
        rep.counts.push(set.len());
        if let Some(&prev) = rep.set_distances.last() {
            rep.ratios.push(if prev > 0.0 { d / prev } else { f64::NAN });
        }
        rep.set_distances.push(d);
        rep.scaled_sets.push(set);
    }
    Ok(rep)
}

/// `J` of `𝔞_x` (strict) and, when `θ^x ∈ O_K`, of `𝔞_x⁺`.
pub fn pink_targets(k: Arc<QuadraticField>, x: &BigRational, r: f64) -> Result<(f64, Option<f64>)> {
    let strict = j_invariant(&enumerate(&ModelSetSpec::ring(k.clone(), x, true)?, r, false)?)?;
    let closed = if x.is_integer() {
        let c = j_invariant(&enumerate(&ModelSetSpec::ring(k, x, false)?, r, false)?)?;
        Some(c.big_j)
    } else {
        None
    };
    Ok((strict.big_j, closed))
}

/// `|J_{θ^{−x−m}}(θ) − J(𝔞_x)|` on the prefactor-free ratio, m = 1..=m_max.
pub fn pink_value_check(k: Arc<QuadraticField>, x: &BigRational, m_max: u32, n_max: u64) -> Result<PinkReport> {
    check_pink_input(&k, x)?;
    let (target, closed) = pink_targets(k.clone(), x, 2e4)?;
    let q = quantum_j(&k, x, m_max, n_max, Prefactor::Twelve)?;
    let mut rep = PinkReport::new(x);
    rep.target = Some(target);
    rep.target_closed = closed;
    for (i, je) in q.j_values.iter().enumerate() {
        rep.m_values.push(i as u32 + 1);
        rep.counts.push(je.count);
        rep.j_sequence.push(je.ratio);
        rep.value_gaps.push((je.ratio - target).abs());
    }
    Ok(rep)
}

/// `|J(𝔞_x) − J(𝔞_{x+δ_i})|` for `δ_i = 2^{−i}/10`, i = 1..=steps.
pub fn continuity_gaps(k: Arc<QuadraticField>, x: &BigRational, steps: u32, r: f64) -> Result<Vec<f64>> {
    let base = j_invariant(&enumerate(&ModelSetSpec::ring(k.clone(), x, true)?, r, false)?)?.big_j;
    let mut out = Vec::new();
    for i in 1..=steps {
        let d = BigRational::new(1.into(), (10i64 << i).into());
        let c = enumerate(&ModelSetSpec::ring(k.clone(), &(x + d), true)?, r, false)?;
        out.push((j_invariant(&c)?.big_j - base).abs());
    }
    Ok(out)
}

/// `x` as a float, for reporting.
pub fn x_value(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
