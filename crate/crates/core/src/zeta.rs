//! `ζ_𝔞(s) = Σ_{α ∈ 𝔞, α > 0} α^{-s}` and weighted L-series.
//!
//! Continuation uses the counting discrepancy `E(u) = N(u) − ρu` where
//! `N(u) = #{α ∈ (0, u]}` and ρ is the density:
//!
//! ```text
//! ζ(s) = S(x) + ρx^{1−s}/(s−1) − E(x)x^{−s} + s∫_x^∞ E(u)u^{−s−1}du
//! ```
//!
//! In lattice mode `E(u) = −{u}` and this is the classical Riemann–Stieltjes
//! formula.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QcError, Result};
use crate::modelset::PointCloud;
use crate::numeric::{pow_neg, CompSumC};
use crate::theta::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    Continued,
    Deep(u32),
}

impl Method {
    pub fn tag(&self) -> String {
        match self {
            Method::Direct => "direct".into(),
            Method::Continued => "continued".into(),
            Method::Deep(k) => format!("deep-{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub error_bound: f64,
    pub rigorous: bool,
    pub cutoff_used: f64,
    pub method: Method,
    pub terms: usize,
}

impl EvalResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value_re": self.value.re,
            "value_im": self.value.im,
            "error_bound": self.error_bound,
            "rigorous": self.rigorous,
            "method": self.method.tag(),
            "cutoff": self.cutoff_used,
            "terms": self.terms,
        })
    }
}

/// Truncation parameters for the continued and deep evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZetaConfig {
    /// Anchor X of the expansion; `None` picks the default for the method.
    pub cutoff: Option<f64>,
    pub ibp_depth: u32,
    /// Overrides the empirical mean μ₀ of `E` (see [`discrepancy_means`]).
    pub mean_correction: Option<f64>,
}

fn positive(cloud: &PointCloud) -> Vec<f64> {
    cloud.positive_values()
}

fn direct_tail_bound(rho: f64, gap: f64, x: f64, sigma: f64) -> f64 {
    rho * x.powf(1.0 - sigma) / (sigma - 1.0) * (1.0 + gap * rho)
}

/// Rounding allowance for a compensated sum with absolute mass `mag`.
fn rounding(mag: f64) -> f64 {
    4.0 * f64::EPSILON * mag
}

fn safe_gap(cloud: &PointCloud) -> f64 {
    if cloud.gap_max.is_finite() {
        cloud.gap_max
    } else {
        cloud.range_max
    }
}

/// Ascending partial sum over the whole cloud plus a rigorous tail bound.
pub fn zeta_direct(cloud: &PointCloud, s: Complex64) -> Result<EvalResult> {
    if s.re <= 1.0 {
        return Err(QcError::Domain(format!(
            "direct sum needs Re(s) > 1, got {}; use the continuation",
            s.re
        )));
    }
    let xs = positive(cloud);
    let mut acc = CompSumC::new();
    let mut mag = 0.0;
    for &a in &xs {
        let z = pow_neg(a, s);
        mag += z.norm();
        acc.add(z);
    }
    let bound = if xs.is_empty() {
        0.0
    } else {
        let rho = cloud.density_est.max(cloud.density.unwrap_or(0.0));
        direct_tail_bound(rho, safe_gap(cloud), cloud.range_max, s.re) + rounding(mag)
    };
    Ok(EvalResult {
        value: acc.value(),
        error_bound: bound,
        rigorous: true,
        cutoff_used: cloud.range_max,
        method: Method::Direct,
        terms: xs.len(),
    })
}

/// Weighted series `Σ f(α')α^{-s}` for a Gaussian weight on the internal coordinate.
pub fn l_function(cloud: &PointCloud, weight: &WeightSpec, s: Complex64) -> Result<EvalResult> {
    if s.re <= 1.0 {
        return Err(QcError::Domain(format!("L-series needs Re(s) > 1, got {}", s.re)));
    }
    let mut acc = CompSumC::new();
    let mut n = 0;
    let mut mag = 0.0;
    for p in cloud.positive() {
        let z = pow_neg(p.value, s) * weight.f(p.internal);
        mag += z.norm();
        acc.add(z);
        n += 1;
    }
    let bound = if n == 0 {
        0.0
    } else {
        let rho = cloud.density_est.max(cloud.density.unwrap_or(0.0));
        weight.max_abs() * direct_tail_bound(rho, safe_gap(cloud), cloud.range_max, s.re) + rounding(mag)
    };
    Ok(EvalResult {
        value: acc.value(),
        error_bound: bound,
        rigorous: true,
        cutoff_used: cloud.range_max,
        method: Method::Direct,
        terms: n,
    })
}

fn check_continuation_domain(s: Complex64) -> Result<()> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(QcError::Pole);
    }
    Ok(())
}

/// Riemann–Stieltjes continuation with x pinned to the largest point.
pub fn zeta_continued(cloud: &PointCloud, s: Complex64) -> Result<EvalResult> {
    let xs = positive(cloud);
    let x = *xs
        .last()
        .ok_or_else(|| QcError::InsufficientData("empty cloud".into()))?;
    zeta_continued_at(cloud, s, x)
}

/// Continuation with a free split point x: the integral from x to the last
/// point is evaluated in closed form on each inter-point interval.
pub fn zeta_continued_at(cloud: &PointCloud, s: Complex64, x: f64) -> Result<EvalResult> {
    check_continuation_domain(s)?;
    if s.re <= 0.0 {
        return Err(QcError::Domain(format!(
            "continuation needs Re(s) > 0, got {}; use the deep continuation",
            s.re
        )));
    }
    let xs = positive(cloud);
    if xs.len() < 2 {
        return Err(QcError::InsufficientData("need at least two points".into()));
    }
    let big_x = *xs.last().unwrap_or(&0.0);
    if !(x >= xs[0] && x <= big_x) {
        return Err(QcError::InvalidInput(format!("split point {x} outside [{}, {big_x}]", xs[0])));
    }
    let rho = cloud.rho();
    let one = Complex64::new(1.0, 0.0);

    // S(x)
    let mut acc = CompSumC::new();
    let mut mag = 0.0;
    let n_x = xs.partition_point(|&a| a <= x);
    for &a in &xs[..n_x] {
        let z = pow_neg(a, s);
        mag += z.norm();
        acc.add(z);
    }
    let e_x = n_x as f64 - rho * x;
    acc.add(rho * x * pow_neg(x, s) / (s - one));
    acc.add(-e_x * pow_neg(x, s));

    // s∫_x^X E(u)u^{-s-1}du, E = N_m − ρu on [a_m, a_{m+1})
    let prim = |n: f64, u: f64| -> Complex64 {
        // s·∫(n − ρu)u^{−s−1}du = −n·u^{−s} − sρ/(1−s)·u^{1−s}
        -n * pow_neg(u, s) - s * rho / (one - s) * u * pow_neg(u, s)
    };
    let mut lo = x;
    for (m, &a) in xs.iter().enumerate().skip(n_x) {
        let n = m as f64;
        acc.add(prim(n, a) - prim(n, lo));
        lo = a;
    }

    // sup|E| on the sampled range bounds the remaining tail
    let mut sup_e: f64 = 0.0;
    for (m, &a) in xs.iter().enumerate() {
        let before = m as f64 - rho * a;
        sup_e = sup_e.max(before.abs()).max((before + 1.0).abs());
    }
    let sup_e = if cloud.lattice { sup_e.max(1.0) } else { sup_e.max(safe_gap(cloud) * rho) };
    let bound = s.norm() * sup_e * big_x.powf(-s.re) / s.re + rounding(mag);
    Ok(EvalResult {
        value: acc.value(),
        error_bound: bound,
        rigorous: cloud.lattice,
        cutoff_used: big_x,
        method: Method::Continued,
        terms: xs.len(),
    })
}

/// Iterated mean-corrected antiderivatives of `E` sampled at the points.
struct Antiderivatives {
    /// `vals[j][m] = ψ_j(a_m)`
    vals: Vec<Vec<f64>>,
    means: Vec<f64>,
    sup: Vec<f64>,
    /// `|μ_j − μ_j(first half)|`, a convergence diagnostic.
    drift: Vec<f64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// ψ₀ = E, ψ_{j+1}(u) = ∫_{a_1}^u (ψ_j − μ_j) with μ_j the mean over [a_1, a_N].
fn antiderivatives(xs: &[f64], rho: f64, depth: usize, mu0: Option<f64>) -> Antiderivatives {
    let n = xs.len();
    let len = xs[n - 1] - xs[0];
    let mut vals: Vec<Vec<f64>> = Vec::with_capacity(depth + 1);
    let mut means = Vec::with_capacity(depth + 1);
    let mut sup = Vec::with_capacity(depth + 1);
    let mut drift = Vec::with_capacity(depth + 1);
    let half = xs.partition_point(|&a| a <= 0.5 * (xs[0] + xs[n - 1])).max(2) - 1;
    vals.push((0..n).map(|m| (m + 1) as f64 - rho * xs[m]).collect());
    for j in 0..=depth {
        // ψ_j(a_m + t) = ψ_j(a_m) + Σ_{i=1..j} (ψ_{j−i}(a_m) − μ_{j−i}) tⁱ/i! − ρ t^{j+1}/(j+1)!
        let taylor_int = |m: usize, h: f64| -> f64 {
            let mut v = vals[j][m] * h;
            for i in 1..=j {
                v += (vals[j - i][m] - means[j - i]) * h.powi(i as i32 + 1) / factorial(i + 1);
            }
            v - rho * h.powi(j as i32 + 2) / factorial(j + 2)
        };
        let taylor_at = |m: usize, t: f64| -> f64 {
            let mut v = vals[j][m];
            for i in 1..=j {
                v += (vals[j - i][m] - means[j - i]) * t.powi(i as i32) / factorial(i);
            }
            v - rho * t.powi(j as i32 + 1) / factorial(j + 1)
        };
        let mut integral = crate::numeric::CompSum::new();
        let mut pieces = Vec::with_capacity(n);
        let mut s_max: f64 = 0.0;
        let mut half_integral = 0.0;
        for m in 0..n - 1 {
            if m == half {
                half_integral = integral.value();
            }
            let h = xs[m + 1] - xs[m];
            let piece = taylor_int(m, h);
            pieces.push(piece);
            integral.add(piece);
            s_max = s_max.max(vals[j][m].abs()).max(taylor_at(m, 0.5 * h).abs());
        }
        let mu = match (j, mu0) {
            (0, Some(m)) => m,
            _ => integral.value() / len,
        };
        drift.push(if mu0.is_some() && j == 0 {
            0.0
        } else {
            (mu - half_integral / (xs[half] - xs[0])).abs()
        });
        means.push(mu);
        sup.push(s_max);
        if j == depth {
            break;
        }
        let mut next = Vec::with_capacity(n);
        let mut run = crate::numeric::CompSum::new();
        next.push(0.0);
        for (m, piece) in pieces.iter().enumerate() {
            run.add(*piece);
            run.add(-mu * (xs[m + 1] - xs[m]));
            next.push(run.value());
        }
        vals.push(next);
    }
    Antiderivatives { vals, means, sup, drift }
}

/// Empirical means μ₀, μ₁, … of the iterated antiderivatives of `E`.
pub fn discrepancy_means(cloud: &PointCloud, depth: usize) -> Result<Vec<f64>> {
    let xs = positive(cloud);
    if xs.len() < 10 {
        return Err(QcError::InsufficientData("need at least 10 points".into()));
    }
    Ok(antiderivatives(&xs, cloud.rho(), depth, None).means)
}

/// Default anchor for the deep expansion.
fn default_anchor(xs: &[f64], s: Complex64) -> f64 {
    let last = xs[xs.len() - 1];
    if s.re >= 0.0 {
        return last;
    }
    // positive powers of X amplify rounding and mean-estimation error
    let target = 200.0_f64.max(xs[9.min(xs.len() - 1)] * 4.0).min(last);
    let i = xs.partition_point(|&a| a <= target);
    xs[i.max(1) - 1]
}

/// k-fold integration by parts with mean-corrected antiderivatives.
///
/// Valid for `Re(s) > −k` when the antiderivatives stay bounded; the error
/// bound is heuristic.
pub fn zeta_deep(cloud: &PointCloud, s: Complex64, k: u32) -> Result<EvalResult> {
    zeta_deep_with(cloud, s, &ZetaConfig { ibp_depth: k, ..Default::default() })
}

pub fn zeta_deep_with(cloud: &PointCloud, s: Complex64, cfg: &ZetaConfig) -> Result<EvalResult> {
    let k = cfg.ibp_depth;
    if k > 4 {
        return Err(QcError::Unsupported(format!("depth {k} > 4")));
    }
    check_continuation_domain(s)?;
    if s.re <= -(k as f64) {
        return Err(QcError::Domain(format!("depth {k} needs Re(s) > −{k}, got {}", s.re)));
    }
    let xs = positive(cloud);
    if xs.len() < 10 {
        return Err(QcError::Completeness(format!(
            "{} points; the expansion needs at least 10",
            xs.len()
        )));
    }
    let anchor = match cfg.cutoff {
        Some(c) => {
            if c < xs[9] || c > xs[xs.len() - 1] {
                return Err(QcError::Completeness(format!(
                    "anchor {c} must lie between the 10th point and the last point"
                )));
            }
            let i = xs.partition_point(|&a| a <= c);
            xs[i - 1]
        }
        None => default_anchor(&xs, s),
    };
    let rho = cloud.rho();
    let ad = antiderivatives(&xs, rho, k as usize, cfg.mean_correction);
    let m = xs.partition_point(|&a| a <= anchor) - 1;
    let one = Complex64::new(1.0, 0.0);

    let mut acc = CompSumC::new();
    let mut mag = 0.0;
    for &a in &xs[..=m] {
        let z = pow_neg(a, s);
        mag += z.norm();
        acc.add(z);
    }
    let xs_pow = pow_neg(anchor, s);
    acc.add(rho * anchor * xs_pow / (s - one));
    acc.add(-ad.vals[0][m] * xs_pow);

    // Σ_j (s)_j μ_j X^{−s−j} − (s)_{j+1} ψ_{j+1}(X) X^{−s−j−1}
    let mut poch = one;
    let mut last_term = Complex64::new(0.0, 0.0);
    let mut drift = 0.0;
    for j in 0..k as usize {
        let xpow = xs_pow * anchor.powi(-(j as i32));
        drift += (poch * xpow).norm() * ad.drift[j];
        let t1 = poch * ad.means[j] * xpow;
        let poch_next = poch * (s + j as f64);
        let t2 = -poch_next * ad.vals[j + 1][m] * xpow / anchor;
        acc.add(t1);
        acc.add(t2);
        last_term = t1 + t2;
        poch = poch_next;
    }
    // remainder (s)_{k+1}∫ψ_k u^{−s−k−1} with ψ_k bounded by its sampled sup
    let c_k = poch * (s + k as f64);
    let remainder = c_k.norm() * ad.sup[k as usize] * anchor.powf(-s.re - k as f64) / (s.re + k as f64);
    let bound = remainder + drift + rounding(mag) + if k > 0 { last_term.norm() * 0.1 } else { 0.0 };
    Ok(EvalResult {
        value: acc.value(),
        error_bound: bound,
        rigorous: false,
        cutoff_used: anchor,
        method: Method::Deep(k),
        terms: m + 1,
    })
}

/// `B_{𝔞,n} = ζ_𝔞(−n)` for n ∈ {1, 3}.
pub fn bernoulli_qc(cloud: &PointCloud, n: u32) -> Result<EvalResult> {
    if n != 1 && n != 3 {
        return Err(QcError::Unsupported(format!("n = {n}; only 1 and 3 are supported")));
    }
    let k = (n + 2).min(4);
    zeta_deep(cloud, Complex64::new(-(n as f64), 0.0), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelset::{enumerate, ModelSetSpec};
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn integers(r: f64) -> PointCloud {
        enumerate(&ModelSetSpec::integers(), r, false).unwrap()
    }

    fn a_sigma(r: f64) -> PointCloud {
        let k = Arc::new(crate::QuadraticField::new(5).unwrap());
        enumerate(&ModelSetSpec::a_sigma(k).unwrap(), r, false).unwrap()
    }

    #[test]
    fn direct_matches_riemann() {
        let z = integers(1e4);
        let r = zeta_direct(&z, c(4.0)).unwrap();
        assert!((r.value.re - PI.powi(4) / 90.0).abs() <= r.error_bound);
        let r = zeta_direct(&z, c(6.0)).unwrap();
        assert!((r.value.re - PI.powi(6) / 945.0).abs() <= r.error_bound);
        assert!(zeta_direct(&z, c(1.0)).is_err());
    }

    #[test]
    fn empty_cloud_is_zero() {
        let z = integers(0.5);
        let r = zeta_direct(&z, c(3.0)).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        assert_eq!(r.error_bound, 0.0);
    }

    #[test]
    fn continued_matches_riemann() {
        let z = integers(1e4);
        let r = zeta_continued(&z, c(4.0)).unwrap();
        assert!((r.value.re - PI.powi(4) / 90.0).abs() < 1e-12);
        let z = integers(1e6);
        let r = zeta_continued(&z, c(0.5)).unwrap();
        let want = -1.460_354_508_809_586_8;
        assert!((r.value.re - want).abs() <= r.error_bound, "{} {}", r.value, r.error_bound);
        assert!(zeta_continued(&z, c(1.0)).is_err());
        assert!(zeta_continued(&z, c(-0.5)).is_err());
    }

    #[test]
    fn continued_is_independent_of_split_point() {
        let a = a_sigma(5e3);
        let s = Complex64::new(0.7, 3.0);
        let r1 = zeta_continued(&a, s).unwrap();
        let r2 = zeta_continued_at(&a, s, 10.0).unwrap();
        assert!((r1.value - r2.value).norm() < 1e-9);
    }

    #[test]
    fn deep_reproduces_euler_maclaurin() {
        let z = integers(2e3);
        let r = zeta_deep(&z, c(-1.0), 3).unwrap();
        assert!((r.value.re + 1.0 / 12.0).abs() < 1e-6, "{}", r.value);
        let r = zeta_deep(&z, c(-3.0), 4).unwrap();
        assert!((r.value.re - 1.0 / 120.0).abs() < 1e-4, "{}", r.value);
        let means = discrepancy_means(&z, 3).unwrap();
        assert!((means[0] + 0.5).abs() < 1e-9);
        assert!((means[1] - 1.0 / 12.0).abs() < 1e-9);
        assert!(means[2].abs() < 1e-9);
        assert!(zeta_deep(&z, c(-5.0), 4).is_err());
        assert!(zeta_deep(&z, c(2.0), 5).is_err());
    }

    #[test]
    fn deep_agrees_with_continued_in_the_strip() {
        let a = a_sigma(1e5);
        for s in [Complex64::new(0.5, 2.0), c(0.3), c(0.9)] {
            let r1 = zeta_continued(&a, s).unwrap();
            let r2 = zeta_deep(&a, s, 3).unwrap();
            let tol = 10.0 * (r1.error_bound + r2.error_bound);
            assert!((r1.value - r2.value).norm() <= tol, "{s}: {} {} {tol}", r1.value, r2.value);
        }
    }

    #[test]
    #[ignore = "iterated antiderivatives of E grow like log R on A_σ, so μ₁ has no limit"]
    fn bernoulli_model_set_is_stable() {
        let b1 = bernoulli_qc(&a_sigma(5e4), 1).unwrap().value.re;
        let b2 = bernoulli_qc(&a_sigma(1e5), 1).unwrap().value.re;
        assert!(b1.is_finite() && (b1 - b2).abs() <= 0.01 * b2.abs(), "{b1} {b2}");
    }

    #[test]
    fn pinned_mean_matches_lattice_value() {
        let z = integers(500.0);
        let cfg = ZetaConfig { ibp_depth: 3, mean_correction: Some(-0.5), cutoff: None };
        let r = zeta_deep_with(&z, c(-1.0), &cfg).unwrap();
        assert!((r.value.re + 1.0 / 12.0).abs() < 1e-8);
    }

    #[test]
    fn deep_bound_exposes_mean_drift() {
        let a = a_sigma(1e5);
        let r = bernoulli_qc(&a, 1).unwrap();
        assert!(r.value.re.is_finite() && !r.rigorous);
        assert!(r.error_bound > 0.05, "{}", r.error_bound);
        let z = integers(2e3);
        assert!(bernoulli_qc(&z, 1).unwrap().error_bound < 1e-6);
    }

    #[test]
    fn bernoulli_integers() {
        let z = integers(2e3);
        assert!((bernoulli_qc(&z, 1).unwrap().value.re + 1.0 / 12.0).abs() < 1e-6);
        assert!((bernoulli_qc(&z, 3).unwrap().value.re - 1.0 / 120.0).abs() < 1e-4);
        assert!(bernoulli_qc(&z, 2).is_err());
        assert!(bernoulli_qc(&z, 5).is_err());
    }

    #[test]
    fn residue_is_density() {
        let a = a_sigma(1e5);
        let rho = 2.0 / 5f64.sqrt();
        let mut vals = vec![];
        for eps in [1e-3, -1e-3, 1e-4, -1e-4] {
            let r = zeta_continued(&a, c(1.0 + eps)).unwrap();
            vals.push(eps * r.value.re);
        }
        for v in &vals {
            assert!((v - rho).abs() / rho < 0.01, "{v}");
        }
    }

    #[test]
    fn scaling_covariance() {
        let a = a_sigma(2e4);
        let b = a.scale_rational(2, 1).unwrap();
        let s = c(3.0);
        let za = zeta_direct(&a, s).unwrap();
        let zb = zeta_direct(&b, s).unwrap();
        assert!((zb.value.re - za.value.re / 8.0).abs() < 1e-14);
    }

    #[test]
    fn l_function_limits() {
        let z = integers(1e4);
        let w = WeightSpec::new(1.0).unwrap();
        let r = l_function(&z, &w, c(4.0)).unwrap();
        assert!((r.value.re - PI.powi(4) / 90.0).abs() <= r.error_bound);
        let a = a_sigma(1e4);
        let flat = WeightSpec::new(1e-30).unwrap();
        let l = l_function(&a, &flat, c(4.0)).unwrap();
        let zd = zeta_direct(&a, c(4.0)).unwrap();
        assert!((l.value - zd.value).norm() < 1e-15);
        let l1 = l_function(&a, &w, c(4.0)).unwrap();
        assert!(l1.value.re > 0.0 && l1.value.re <= zd.value.re);
    }

    mod props {
        use super::*;
        use crate::numberfield::QuadraticField;
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use std::sync::OnceLock;

        fn golden() -> &'static PointCloud {
            static C: OnceLock<PointCloud> = OnceLock::new();
            C.get_or_init(|| {
                let k = Arc::new(QuadraticField::new(5).unwrap());
                enumerate(&ModelSetSpec::a_sigma(k).unwrap(), 2e4, false).unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(10))]

            #[test]
            fn direct_and_continued_agree(sigma in 1.1f64..6.0, t in -8.0f64..8.0) {
                let s = Complex64::new(sigma, t);
                let a = zeta_direct(golden(), s).unwrap();
                let b = zeta_continued(golden(), s).unwrap();
                prop_assert!((a.value - b.value).norm() <= a.error_bound + b.error_bound);
            }
        }

        #[test]
        fn simple_pole_at_one() {
            let c = golden();
            let r: Vec<f64> = [1e-3, -1e-3, 1e-4, -1e-4]
                .iter()
                .map(|h| (zeta_continued(c, Complex64::new(1.0 + h, 0.0)).unwrap().value * h).re)
                .collect();
            let mid = r.iter().sum::<f64>() / 4.0;
            for v in &r {
                assert!((v - mid).abs() < 0.01 * mid.abs(), "{r:?}");
            }
            assert!((mid - c.rho()).abs() < 0.01 * c.rho());
        }

        #[test]
        fn jittered_lattice_converges() {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            let mut v = Vec::new();
            for n in 1..=40_000 {
                v.push(n as f64 + rng.gen_range(-0.3..0.3));
            }
            let long = PointCloud::from_values(v.clone(), 40_001.0, Some(1.0)).unwrap();
            v.truncate(4_000);
            let short = PointCloud::from_values(v, 4_001.0, Some(1.0)).unwrap();
            assert!(short.r_min >= 0.4);
            let s = Complex64::new(2.0, 0.0);
            let a = zeta_direct(&short, s).unwrap();
            let b = zeta_direct(&long, s).unwrap();
            assert!((a.value - b.value).norm() <= a.error_bound + b.error_bound);
            assert!(a.error_bound < 1e-2);
        }
    }
}
