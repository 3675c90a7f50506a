//! Cut-and-project sets `𝓜(𝔄, D) = {α ∈ 𝔄 : σ₂(α) ∈ D}` and their finite truncations.

pub mod lattice;
mod ops;
pub mod window;

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{QcError, Result};
use crate::numberfield::{FieldElement, QuadraticField};

pub use ops::{
    coding_function, extend_to_ideal, monoid_product, scale_by_unit, star_product, sumset,
    verify_extension,
};
pub use window::{Membership, WindowBound, WindowSpec};

/// Hard cap on enumerated points.
pub const POINT_CAP: usize = 40_000_000;

/// A model set `γ·𝓜(𝔄, D)`, or the lattice `ξℤ` in lattice mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSetSpec {
    pub field: Arc<QuadraticField>,
    /// Hermite-reduced basis of 𝔄.
    pub ideal_basis: [FieldElement; 2],
    pub window: WindowSpec,
    pub scale: FieldElement,
    /// Internal constraint ignored; the point set is `scale·ℤ`.
    pub lattice_mode: bool,
}

impl ModelSetSpec {
    pub fn new(
        field: Arc<QuadraticField>,
        basis: [FieldElement; 2],
        window: WindowSpec,
        scale: FieldElement,
    ) -> Result<Self> {
        if scale.is_zero() {
            return Err(QcError::InvalidInput("scale must be nonzero".into()));
        }
        let ideal_basis = lattice::hnf(&basis)?;
        Ok(ModelSetSpec { field, ideal_basis, window, scale, lattice_mode: false })
    }

    pub fn ring_of_integers_basis() -> [FieldElement; 2] {
        [FieldElement::one(), FieldElement::omega()]
    }

    /// `𝔞_x(θ) = {α ∈ O_K : |α'| < |θ'|^x}` (or `≤` when not strict).
    pub fn ring(field: Arc<QuadraticField>, x: &BigRational, strict: bool) -> Result<Self> {
        let w = WindowSpec::exponent(&field, x, strict)?;
        Self::new(field, Self::ring_of_integers_basis(), w, FieldElement::one())
    }

    /// `A_σ = {α ∈ O_K : |α'| ≤ 1}`.
    pub fn a_sigma(field: Arc<QuadraticField>) -> Result<Self> {
        Self::ring(field, &BigRational::zero(), false)
    }

    /// Model set on a given ideal with a given window.
    pub fn on_ideal(field: Arc<QuadraticField>, basis: [FieldElement; 2], window: WindowSpec) -> Result<Self> {
        Self::new(field, basis, window, FieldElement::one())
    }

    /// Lattice mode: the point set `ξℤ` with trivial internal space.
    pub fn lattice(field: Arc<QuadraticField>, xi: FieldElement) -> Result<Self> {
        if field.sign(&xi) != Ordering::Greater {
            return Err(QcError::InvalidInput("lattice spacing must be positive".into()));
        }
        let w = WindowSpec::new(WindowBound::element(&field, FieldElement::one())?, false);
        let mut s = Self::new(field, Self::ring_of_integers_basis(), w, xi)?;
        s.lattice_mode = true;
        Ok(s)
    }

    /// ℤ itself.
    pub fn integers() -> Self {
        let k = Arc::new(QuadraticField::new(5).expect("d = 5"));
        Self::lattice(k, FieldElement::one()).expect("ℤ")
    }

    pub fn with_scale(&self, scale: FieldElement) -> Result<Self> {
        if scale.is_zero() {
            return Err(QcError::InvalidInput("scale must be nonzero".into()));
        }
        let mut s = self.clone();
        s.scale = scale;
        Ok(s)
    }

    /// Basis of `γ𝔄`.
    pub fn effective_basis(&self) -> Result<[FieldElement; 2]> {
        lattice::scale(&self.field, &self.ideal_basis, &self.scale)
    }

    /// Window for the internal coordinate of `γα`, i.e. `|σ₂(γ)|·D`.
    pub fn effective_window(&self) -> Result<WindowSpec> {
        let c = self.field.abs_conj(&self.scale);
        if c == FieldElement::one() {
            return Ok(self.window.clone());
        }
        self.window.scaled(&self.field, &c)
    }

    /// Covolume `√|disc(γ𝔄)|` of the Minkowski lattice.
    pub fn covolume(&self) -> Result<f64> {
        let b = self.effective_basis()?;
        let disc = lattice::discriminant(&self.field, &b);
        Ok(disc.abs().to_f64().unwrap_or(f64::NAN).sqrt())
    }

    /// Asymptotic point density per unit length.
    pub fn density(&self) -> Result<f64> {
        if self.lattice_mode {
            return Ok(1.0 / self.field.value(&self.scale));
        }
        Ok(self.effective_window()?.measure() / self.covolume()?)
    }

    /// Exact membership of `x ∈ K`.
    pub fn contains(&self, x: &FieldElement) -> Result<bool> {
        let k = &self.field;
        if self.lattice_mode {
            let q = k.div(x, &self.scale)?;
            return Ok(q.b.is_zero() && q.a.is_integer());
        }
        let b = self.effective_basis()?;
        if !lattice::contains(&b, x) {
            return Ok(false);
        }
        self.effective_window()?.contains_exact(k, &k.conj(x))
    }

    pub fn describe(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.field.d,
            "ideal_basis": self.ideal_basis.iter().map(|e| [e.a.to_string(), e.b.to_string()]).collect::<Vec<_>>(),
            "window": self.window.describe(),
            "scale": [self.scale.a.to_string(), self.scale.b.to_string()],
            "lattice_mode": self.lattice_mode,
        })
    }
}

/// A point `(a + bω)/den` with its two embeddings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPoint {
    pub a: i64,
    pub b: i64,
    pub value: f64,
    /// Internal coordinate (σ₂, or 0 in lattice mode).
    pub internal: f64,
}

/// Sorted finite truncation of a point set with Delaunay diagnostics.
#[derive(Debug, Clone)]
pub struct PointCloud {
    pub field: Arc<QuadraticField>,
    pub den: i64,
    pub points: Vec<CloudPoint>,
    pub range_max: f64,
    pub signed: bool,
    pub lattice: bool,
    /// Whether `a, b` carry exact coordinates.
    pub exact: bool,
    pub r_min: f64,
    pub gap_max: f64,
    pub density_est: f64,
    /// Asymptotic density when known in closed form.
    pub density: Option<f64>,
}

fn to_i64(x: &BigRational) -> Result<i64> {
    x.to_integer()
        .to_i64()
        .ok_or_else(|| QcError::Resource("coordinate exceeds 64 bits".into()))
}

fn lcm_den(basis: &[FieldElement]) -> Result<i64> {
    let mut den = BigInt::from(1);
    for e in basis {
        den = num_integer::Integer::lcm(&den, &e.denominator());
    }
    den.to_i64().ok_or_else(|| QcError::Resource("denominator exceeds 64 bits".into()))
}

/// Finite truncation of a model set on `(0, R]` (or `[−R, R]` when signed).
pub fn enumerate(spec: &ModelSetSpec, range_max: f64, signed: bool) -> Result<PointCloud> {
    if !(range_max > 0.0 && range_max.is_finite()) {
        return Err(QcError::InvalidInput(format!("range_max = {range_max} must be positive")));
    }
    let k = &spec.field;
    if spec.lattice_mode {
        return enumerate_lattice(spec, range_max, signed);
    }
    let basis = spec.effective_basis()?;
    let window = spec.effective_window()?;
    let den = lcm_den(&basis)?;
    let dq = BigRational::from_integer(den.into());
    let c: Vec<(i64, i64)> = basis
        .iter()
        .map(|e| Ok((to_i64(&(&e.a * &dq))?, to_i64(&(&e.b * &dq))?)))
        .collect::<Result<_>>()?;
    let (u1, v1) = k.embed(&basis[0]);
    let (u2, v2) = k.embed(&basis[1]);
    let det = u1 * v2 - u2 * v1;
    let w = window.radius() * (1.0 + 1e-9);
    let lo = if signed { -range_max } else { 0.0 };
    let est = (range_max - lo) * 2.0 * w / det.abs();
    if est > POINT_CAP as f64 {
        return Err(QcError::Resource(format!(
            "about {est:.0} points requested, cap is {POINT_CAP}"
        )));
    }
    // j = (u1·σ₂ − v1·σ₁)/det over the box
    let corners = [(lo, -w), (lo, w), (range_max, -w), (range_max, w)];
    let js: Vec<f64> = corners.iter().map(|(s1, s2)| (u1 * s2 - v1 * s1) / det).collect();
    let jmin = js.iter().cloned().fold(f64::INFINITY, f64::min).floor() as i64 - 1;
    let jmax = js.iter().cloned().fold(f64::NEG_INFINITY, f64::max).ceil() as i64 + 1;

    let interval = |coef: f64, off: f64, a: f64, b: f64| -> (f64, f64) {
        let (x, y) = ((a - off) / coef, (b - off) / coef);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    };
    let mut pts = Vec::with_capacity(est as usize + 16);
    for j in jmin..=jmax {
        let jf = j as f64;
        let (a0, a1) = interval(u1, jf * u2, lo, range_max);
        let (b0, b1) = interval(v1, jf * v2, -w, w);
        let (i0, i1) = (a0.max(b0), a1.min(b1));
        if i0 > i1 + 1e-6 {
            continue;
        }
        let pad = 1e-7 * (1.0 + i0.abs().max(i1.abs()));
        let (ilo, ihi) = ((i0 - pad).floor() as i64, (i1 + pad).ceil() as i64);
        for i in ilo..=ihi {
            let aa = i as i128 * c[0].0 as i128 + j as i128 * c[1].0 as i128;
            let bb = i as i128 * c[0].1 as i128 + j as i128 * c[1].1 as i128;
            let (aa, bb) = match (i64::try_from(aa), i64::try_from(bb)) {
                (Ok(x), Ok(y)) => (x, y),
                _ => return Err(QcError::Resource("coordinate exceeds 64 bits".into())),
            };
            if aa == 0 && bb == 0 {
                if signed {
                    pts.push(CloudPoint { a: 0, b: 0, value: 0.0, internal: 0.0 });
                }
                continue;
            }
            let (s1, s2) = k.embed_int(aa, bb, den);
            if s1 > range_max || s1 < lo || (!signed && s1 <= 0.0) {
                continue;
            }
            let inside = window.contains(k, s2, || {
                let x = FieldElement::new(
                    BigRational::new(aa.into(), den.into()),
                    BigRational::new(bb.into(), den.into()),
                );
                k.conj(&x)
            })?;
            if inside {
                pts.push(CloudPoint { a: aa, b: bb, value: s1, internal: s2 });
            }
        }
    }
    let density = Some(window.measure() / spec.covolume()?);
    Ok(PointCloud::assemble(k.clone(), den, pts, range_max, signed, false, density))
}

fn enumerate_lattice(spec: &ModelSetSpec, range_max: f64, signed: bool) -> Result<PointCloud> {
    let k = &spec.field;
    let xi = &spec.scale;
    let den = lcm_den(std::slice::from_ref(xi))?;
    let dq = BigRational::from_integer(den.into());
    let (xa, xb) = (to_i64(&(&xi.a * &dq))?, to_i64(&(&xi.b * &dq))?);
    let step = k.value(xi);
    let nmax = (range_max / step * (1.0 + 1e-12)).floor() as i64;
    if nmax as f64 * if signed { 2.0 } else { 1.0 } > POINT_CAP as f64 {
        return Err(QcError::Resource(format!("{nmax} lattice points exceed the cap")));
    }
    let nmin = if signed { -nmax } else { 1 };
    let mut pts = Vec::with_capacity((nmax - nmin + 1).max(0) as usize);
    for n in nmin..=nmax {
        let (a, b) = (n * xa, n * xb);
        let v = if n == 0 { 0.0 } else { k.embed_int(a, b, den).0 };
        if v.abs() > range_max {
            continue;
        }
        pts.push(CloudPoint { a, b, value: v, internal: 0.0 });
    }
    Ok(PointCloud::assemble(k.clone(), den, pts, range_max, signed, true, Some(1.0 / step)))
}

impl PointCloud {
    pub(crate) fn assemble(
        field: Arc<QuadraticField>,
        den: i64,
        mut points: Vec<CloudPoint>,
        range_max: f64,
        signed: bool,
        lattice: bool,
        density: Option<f64>,
    ) -> Self {
        points.sort_by(|p, q| {
            p.value
                .partial_cmp(&q.value)
                .unwrap_or(Ordering::Equal)
                .then(p.a.cmp(&q.a))
                .then(p.b.cmp(&q.b))
        });
        points.dedup_by(|p, q| p.a == q.a && p.b == q.b && p.value == q.value);
        let mut c = PointCloud {
            field,
            den,
            points,
            range_max,
            signed,
            lattice,
            exact: true,
            r_min: f64::NAN,
            gap_max: f64::NAN,
            density_est: 0.0,
            density,
        };
        c.refresh_stats();
        c
    }

    /// A cloud of bare values without exact coordinates (synthetic Delaunay sets).
    pub fn from_values(mut values: Vec<f64>, range_max: f64, density: Option<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0 || *v > range_max) {
            return Err(QcError::InvalidInput("values must lie in (0, range_max]".into()));
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let field = Arc::new(QuadraticField::new(5)?);
        let pts = values
            .into_iter()
            .map(|v| CloudPoint { a: 0, b: 0, value: v, internal: 0.0 })
            .collect();
        let mut c = Self::assemble(field, 1, pts, range_max, false, true, density);
        c.exact = false;
        Ok(c)
    }

    fn refresh_stats(&mut self) {
        let mut r = f64::INFINITY;
        let mut g: f64 = 0.0;
        for w in self.points.windows(2) {
            let d = w[1].value - w[0].value;
            r = r.min(d);
            g = g.max(d);
        }
        if self.points.len() < 2 {
            r = f64::NAN;
            g = f64::NAN;
        }
        self.r_min = r;
        self.gap_max = g;
        let len = if self.signed { 2.0 * self.range_max } else { self.range_max };
        self.density_est = self.points.len() as f64 / len;
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Strictly positive points in ascending order.
    pub fn positive(&self) -> impl Iterator<Item = &CloudPoint> {
        self.points.iter().filter(|p| p.value > 0.0)
    }

    pub fn positive_values(&self) -> Vec<f64> {
        self.positive().map(|p| p.value).collect()
    }

    /// Best available density: closed form if known, otherwise the empirical one.
    pub fn rho(&self) -> f64 {
        self.density.unwrap_or(self.density_est)
    }

    pub fn element(&self, i: usize) -> FieldElement {
        let p = &self.points[i];
        FieldElement::new(
            BigRational::new(p.a.into(), self.den.into()),
            BigRational::new(p.b.into(), self.den.into()),
        )
    }

    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.len()).map(|i| self.element(i)).collect()
    }

    /// Exact coordinates normalized to lowest terms, for set comparisons.
    pub fn exact_keys(&self) -> Vec<(BigRational, BigRational)> {
        self.elements().into_iter().map(|e| (e.a, e.b)).collect()
    }

    /// Points with value ≤ `r`, marked complete up to `r`.
    pub fn truncate(&self, r: f64) -> Result<Self> {
        if r > self.range_max {
            return Err(QcError::Completeness(format!(
                "cannot extend a cloud complete to {} up to {r}",
                self.range_max
            )));
        }
        let pts = self.points.iter().filter(|p| p.value.abs() <= r).cloned().collect();
        let mut c = Self::assemble(self.field.clone(), self.den, pts, r, self.signed, self.lattice, self.density);
        c.exact = self.exact;
        Ok(c)
    }

    /// Exact scaling by a positive rational `p/q`.
    pub fn scale_rational(&self, p: i64, q: i64) -> Result<Self> {
        if p <= 0 || q <= 0 {
            return Err(QcError::InvalidInput("scale factor must be positive".into()));
        }
        let lam = p as f64 / q as f64;
        let g = num_integer::gcd(p, q);
        let (p, q) = (p / g, q / g);
        let den = self
            .den
            .checked_mul(q)
            .ok_or_else(|| QcError::Resource("denominator overflow".into()))?;
        let mut pts = Vec::with_capacity(self.len());
        for pt in &self.points {
            let (a, b) = match (pt.a.checked_mul(p), pt.b.checked_mul(p)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(QcError::Resource("coordinate overflow".into())),
            };
            let (value, internal) = if self.exact && !(a == 0 && b == 0) {
                let (v, c) = self.field.embed_int(a, b, den);
                (v, if self.lattice { 0.0 } else { c })
            } else {
                (pt.value * lam, pt.internal * lam)
            };
            pts.push(CloudPoint { a, b, value, internal });
        }
        let mut c = Self::assemble(
            self.field.clone(),
            den,
            pts,
            self.range_max * lam,
            self.signed,
            self.lattice,
            self.density.map(|d| d / lam),
        );
        c.exact = self.exact;
        Ok(c)
    }

    /// Copy with the point at `index` removed (diagnostics).
    pub fn without_point(&self, index: usize) -> Self {
        let mut c = self.clone();
        c.points.remove(index);
        c.refresh_stats();
        c
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("a,b,value,conj_value\n");
        for p in &self.points {
            let conj = if self.exact {
                if p.a == 0 && p.b == 0 {
                    0.0
                } else {
                    self.field.embed_int(p.a, p.b, self.den).1
                }
            } else {
                p.internal
            };
            if self.den == 1 {
                let _ = writeln!(s, "{},{},{:.16e},{:.16e}", p.a, p.b, p.value, conj);
            } else {
                let _ = writeln!(
                    s,
                    "{}/{},{}/{},{:.16e},{:.16e}",
                    p.a, self.den, p.b, self.den, p.value, conj
                );
            }
        }
        s
    }

    pub fn stats_json(&self) -> serde_json::Value {
        serde_json::json!({
            "count": self.len(),
            "range_max": self.range_max,
            "signed": self.signed,
            "r_min": finite_or_null(self.r_min),
            "gap_max": finite_or_null(self.gap_max),
            "density_est": self.density_est,
            "density": self.density,
        })
    }
}

fn finite_or_null(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// `(r_min, gap_max)` of consecutive differences.
pub fn delaunay_stats(cloud: &PointCloud) -> Result<(f64, f64)> {
    if cloud.len() < 2 {
        return Err(QcError::InsufficientData(format!(
            "{} points, need at least 2",
            cloud.len()
        )));
    }
    Ok((cloud.r_min, cloud.gap_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::rat;

    fn golden() -> Arc<QuadraticField> {
        Arc::new(QuadraticField::new(5).unwrap())
    }

    #[test]
    fn a_sigma_up_to_five() {
        let s = ModelSetSpec::a_sigma(golden()).unwrap();
        let c = enumerate(&s, 5.0, false).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let want = [1.0, phi, phi * phi, phi * phi * phi];
        assert_eq!(c.len(), 4);
        for (p, w) in c.points.iter().zip(want) {
            assert!((p.value - w).abs() < 1e-14);
        }
        assert_eq!((c.points[1].a, c.points[1].b), (0, 1));
    }

    #[test]
    fn integers_mode() {
        let c = enumerate(&ModelSetSpec::integers(), 10.0, false).unwrap();
        assert_eq!(c.values(), (1..=10).map(|n| n as f64).collect::<Vec<_>>());
        assert_eq!(delaunay_stats(&c).unwrap(), (1.0, 1.0));
        let c = enumerate(&ModelSetSpec::integers(), 3.0, true).unwrap();
        assert_eq!(c.len(), 7);
    }

    #[test]
    fn empty_below_first_point() {
        let s = ModelSetSpec::a_sigma(golden()).unwrap();
        let c = enumerate(&s, 0.5, false).unwrap();
        assert!(c.is_empty());
        assert!(delaunay_stats(&c).is_err());
    }

    #[test]
    fn removed_point_widens_gap() {
        let c = enumerate(&ModelSetSpec::integers(), 10.0, false).unwrap();
        let r = c.without_point(4);
        assert_eq!(r.gap_max, 2.0);
    }

    #[test]
    fn density_matches_cut_and_project() {
        let k = golden();
        let s = ModelSetSpec::a_sigma(k).unwrap();
        let c = enumerate(&s, 1e4, false).unwrap();
        let rho = 2.0 / 5f64.sqrt();
        assert!((c.density_est - rho).abs() / rho < 0.05);
        assert!((c.density.unwrap() - rho).abs() < 1e-12);
    }

    #[test]
    fn gap_max_stable_under_doubling() {
        let s = ModelSetSpec::a_sigma(golden()).unwrap();
        let c1 = enumerate(&s, 1e4, false).unwrap();
        let c2 = enumerate(&s, 2e4, false).unwrap();
        assert_eq!(c1.gap_max, c2.gap_max);
        assert!(c1.r_min > 0.0);
        // Fibonacci-chain gaps φ⁻¹, 1, φ
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((c1.gap_max - phi).abs() < 1e-9);
        assert!((c1.r_min - 1.0 / phi).abs() < 1e-9);
    }

    #[test]
    fn pv_characterization() {
        let k = golden();
        let s = ModelSetSpec::a_sigma(k.clone()).unwrap();
        let c = enumerate(&s, 200.0, false).unwrap();
        for (i, p) in c.points.iter().enumerate() {
            let e = c.element(i);
            assert!(e.is_integral());
            if k.cmp(&e, &FieldElement::one()) == Ordering::Equal {
                continue;
            }
            assert_eq!(k.cmp(&e, &FieldElement::one()), Ordering::Greater);
            assert!(p.internal.abs() <= 1.0);
        }
        assert_eq!(c.points[0].value, 1.0);
        assert!(s.contains(&FieldElement::from_ints(-1, 0)).unwrap());
        assert!(!s.contains(&FieldElement::from_ints(2, 0)).unwrap());
    }

    #[test]
    fn csv_has_four_rows() {
        let s = ModelSetSpec::a_sigma(golden()).unwrap();
        let c = enumerate(&s, 5.0, false).unwrap();
        let csv = c.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("a,b,value,conj_value\n1,0,1.0000000000000000e0,"));
    }

    #[test]
    fn exact_scaling_by_two() {
        let s = ModelSetSpec::a_sigma(golden()).unwrap();
        let c = enumerate(&s, 50.0, false).unwrap();
        let d = c.scale_rational(2, 1).unwrap();
        for (p, q) in c.points.iter().zip(&d.points) {
            assert_eq!(q.value, 2.0 * p.value);
        }
        assert_eq!(d.element(3), c.element(3).scale(&rat(2)));
    }

    mod props {
        use super::*;
        use crate::modelset::monoid_product;
        use crate::numberfield::ratio;
        use proptest::prelude::*;
        use std::collections::BTreeSet;

        type Key = (BigRational, BigRational);

        /// Every `a + bω` in the bounding box, tested one at a time.
        fn scan(spec: &ModelSetSpec, r: f64) -> BTreeSet<Key> {
            let k = &spec.field;
            let (o1, o2) = k.omega_embeddings();
            let w = spec.window.radius();
            let bmax = ((r + w) / (o1 - o2).abs()).ceil() as i64 + 1;
            let amax = (r + bmax as f64 * o1.abs().max(o2.abs())).ceil() as i64 + 1;
            let mut out = BTreeSet::new();
            for b in -bmax..=bmax {
                for a in -amax..=amax {
                    let x = FieldElement::from_ints(a, b);
                    let v = k.value(&x);
                    if v > 0.0 && v <= r && spec.contains(&x).unwrap() {
                        out.insert((x.a, x.b));
                    }
                }
            }
            out
        }

        fn keys(c: &PointCloud) -> BTreeSet<Key> {
            c.exact_keys().into_iter().collect()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn enumeration_matches_scan(
                d in prop::sample::select(vec![2i64, 3, 5, 10]),
                p in 0i64..=16,
                strict in any::<bool>(),
            ) {
                let k = Arc::new(QuadraticField::new(d).unwrap());
                let spec = ModelSetSpec::ring(k, &ratio(p, 8), strict).unwrap();
                let c = enumerate(&spec, 30.0, false).unwrap();
                prop_assert_eq!(keys(&c), scan(&spec, 30.0));
            }

            #[test]
            fn unit_multiplication_shifts_exponent(p in 0i64..=12, strict in any::<bool>()) {
                let k = Arc::new(QuadraticField::new(5).unwrap());
                let x = ratio(p, 4);
                let r = 60.0;
                let th = k.theta().clone();
                let a = enumerate(&ModelSetSpec::ring(k.clone(), &x, strict).unwrap(), r / k.value(&th), false).unwrap();
                let moved: BTreeSet<Key> = a
                    .elements()
                    .iter()
                    .map(|e| k.mul(e, &th))
                    .filter(|e| k.value(e) <= r)
                    .map(|e| (e.a, e.b))
                    .collect();
                let b = enumerate(&ModelSetSpec::ring(k, &(x + rat(1)), strict).unwrap(), r, false).unwrap();
                prop_assert_eq!(moved, keys(&b));
            }

            #[test]
            fn products_land_in_summed_exponent(p in 0i64..=6, q in 0i64..=6) {
                let k = Arc::new(QuadraticField::new(5).unwrap());
                let (x, y) = (ratio(p, 3), ratio(q, 3));
                let a = enumerate(&ModelSetSpec::ring(k.clone(), &x, true).unwrap(), 40.0, false).unwrap();
                let b = enumerate(&ModelSetSpec::ring(k.clone(), &y, true).unwrap(), 40.0, false).unwrap();
                let prod = monoid_product(&a, &b, 40.0).unwrap();
                let target = ModelSetSpec::ring(k, &(x + y), true).unwrap();
                for e in prod.elements() {
                    prop_assert!(target.contains(&e).unwrap());
                }
            }
        }
    }
}
