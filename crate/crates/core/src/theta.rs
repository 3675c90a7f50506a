//! Theta functions of weighted model sets, the dual model set and the
//! Poisson–Meyer functional equation.
//!
//! With the Fourier kernel `e^{−2πi⟨x,ξ⟩}` on the Minkowski plane and a
//! Gaussian weight `f(y) = e^{−πcy²}` on the internal coordinate,
//!
//! ```text
//! θ(t) = C·t^{−1/2}·θ^∨(1/t),   C = 1/covol(𝔄)
//! ```
//!
//! where `θ^∨` carries the weights `χ^∨(ξ) = f^∨(ξ')` (no constant folded in).
//! The identity is exact for the full lattice and holds up to `f(w)` for a
//! window of radius w.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{QcError, Result};
use crate::modelset::{enumerate, lattice, ModelSetSpec, PointCloud, WindowBound, WindowSpec};
use crate::numberfield::{FieldElement, QuadraticField};
use crate::numeric::{gamma, integrate_gl, pow_neg, CompSum, CompSumC};
use crate::zeta::{EvalResult, Method};

/// Exponent budget: terms with `πα²t` beyond this are dropped.
const GAUSS_CUT: f64 = 40.0;
/// Larger budget for series that feed the Mellin integrals.
const MELLIN_CUT: f64 = 60.0;

/// Gaussian weight `f_c(y) = e^{−πcy²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightSpec {
    pub c: f64,
}

impl WeightSpec {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(QcError::InvalidInput(format!("weight parameter c = {c} must be positive")));
        }
        Ok(WeightSpec { c })
    }

    #[inline]
    pub fn f(&self, y: f64) -> f64 {
        (-std::f64::consts::PI * self.c * y * y).exp()
    }

    /// `f^∨(η) = c^{−1/2} e^{−πη²/c}`.
    #[inline]
    pub fn dual(&self, eta: f64) -> f64 {
        (-std::f64::consts::PI * eta * eta / self.c).exp() / self.c.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        1.0
    }

    /// `∫_{−w}^{w} f`.
    pub fn integral(&self, w: f64) -> f64 {
        libm::erf(w * (std::f64::consts::PI * self.c).sqrt()) / self.c.sqrt()
    }

    /// `|η|` beyond which `f^∨(η) < eps`.
    pub fn dual_cutoff(&self, eps: f64) -> f64 {
        let l = (1.0 / (self.c.sqrt() * eps)).ln().max(0.0);
        (self.c * l / std::f64::consts::PI).sqrt()
    }
}

/// Which constant multiplies the dual side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `1/covol`, forced by the Jacobi identity in lattice mode.
    #[default]
    Covolume,
    /// `2π/covol`, the constant that appears when 2π is kept in the kernel.
    TwoPi,
}

impl Normalization {
    pub fn constant(&self, covol: f64) -> f64 {
        match self {
            Normalization::Covolume => 1.0 / covol,
            Normalization::TwoPi => 2.0 * std::f64::consts::PI / covol,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Normalization::Covolume => "covolume",
            Normalization::TwoPi => "two-pi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualData {
    pub dual_basis: [FieldElement; 2],
    /// `w^∨ = (π/3)/w`.
    pub dual_window_bound: WindowBound,
    pub covolume: f64,
}

/// Trace-dual basis: `Tr(βᵢαⱼ) = δᵢⱼ`.
pub fn dual_basis(k: &QuadraticField, basis: &[FieldElement; 2]) -> Result<[FieldElement; 2]> {
    let g = |i: usize, j: usize| k.trace(&k.mul(&basis[i], &basis[j]));
    let (g00, g01, g11) = (g(0, 0), g(0, 1), g(1, 1));
    let det = &g00 * &g11 - &g01 * &g01;
    if num_traits::Zero::is_zero(&det) {
        return Err(QcError::Arithmetic("singular trace form".into()));
    }
    let comb = |p: &num_rational::BigRational, q: &num_rational::BigRational| {
        basis[0].scale(p) + basis[1].scale(q)
    };
    let b0 = comb(&(&g11 / &det), &(-&g01 / &det));
    let b1 = comb(&(-&g01 / &det), &(&g00 / &det));
    let out = [b0, b1];
    for (i, b) in out.iter().enumerate() {
        for (j, a) in basis.iter().enumerate() {
            let tr = k.trace(&k.mul(b, a));
            let want = if i == j { 1 } else { 0 };
            if tr != crate::numberfield::rat(want) {
                return Err(QcError::Arithmetic("trace-dual verification failed".into()));
            }
        }
    }
    Ok(out)
}

/// Hermite-reduced `𝔄^∨ = {β ∈ K : Tr(β𝔄) ⊂ ℤ}`.
pub fn dual_lattice(k: &QuadraticField, basis: &[FieldElement; 2]) -> Result<[FieldElement; 2]> {
    lattice::hnf(&dual_basis(k, basis)?)
}

pub fn dual_data(spec: &ModelSetSpec) -> Result<DualData> {
    if spec.lattice_mode {
        return Err(QcError::Unsupported("lattice mode has no internal window".into()));
    }
    let w = spec.effective_window()?;
    if w.inner.is_some() {
        return Err(QcError::Unsupported("dual of an annular window".into()));
    }
    let k = &spec.field;
    Ok(DualData {
        dual_basis: dual_lattice(k, &spec.effective_basis()?)?,
        dual_window_bound: w.bound.dual(k)?,
        covolume: spec.covolume()?,
    })
}

fn shell_window(k: &QuadraticField, dual: &WindowBound, n: usize) -> Result<WindowSpec> {
    let bound = dual.mul_elem(k, &FieldElement::from_ints(n as i64, 0))?;
    let inner = if n >= 2 {
        Some(dual.mul_elem(k, &FieldElement::from_ints(n as i64 - 1, 0))?)
    } else {
        None
    };
    Ok(WindowSpec { bound, strict: false, inner, exponent: None })
}

/// Shell `Δ𝔪_n^∨ = {β ∈ 𝔄^∨ : (n−1)w^∨ < |β'| ≤ n·w^∨}`.
pub fn dual_model_set(spec: &ModelSetSpec, n_shell: usize) -> Result<ModelSetSpec> {
    if n_shell == 0 {
        return Err(QcError::InvalidInput("shells are numbered from 1".into()));
    }
    let dd = dual_data(spec)?;
    let w = shell_window(&spec.field, &dd.dual_window_bound, n_shell)?;
    ModelSetSpec::on_ideal(spec.field.clone(), dd.dual_basis, w)
}

/// `𝔪_n^∨ = 𝓜(𝔄^∨, n·D^∨)`.
pub fn dual_model_set_cumulative(spec: &ModelSetSpec, n: usize) -> Result<ModelSetSpec> {
    if n == 0 {
        return Err(QcError::InvalidInput("n must be ≥ 1".into()));
    }
    let dd = dual_data(spec)?;
    let mut w = shell_window(&spec.field, &dd.dual_window_bound, n)?;
    w.inner = None;
    ModelSetSpec::on_ideal(spec.field.clone(), dd.dual_basis, w)
}

fn lattice_spacing(spec: &ModelSetSpec) -> f64 {
    spec.field.value(&spec.scale)
}

fn covolume_of(spec: &ModelSetSpec) -> Result<f64> {
    if spec.lattice_mode {
        Ok(lattice_spacing(spec))
    } else {
        spec.covolume()
    }
}

/// A finite exponential sum `½w₀ + Σ wᵢ e^{−πaᵢ²t}` valid for `t ≥ t_min`.
#[derive(Debug, Clone)]
pub struct ThetaSeries {
    /// `(a², weight, shell)`
    terms: Vec<(f64, f64, usize)>,
    pub zero_weight: f64,
    pub t_min: f64,
    pub range: f64,
    pub shells: usize,
    /// Upper bound on point count per unit length (for tail bounds).
    count_rate: f64,
    /// Mass of the weight beyond the last shell, `∫_{|η|>Y} f^∨ / covol`.
    shell_tail_density: f64,
}

impl ThetaSeries {
    fn range_for(t_min: f64, cut: f64) -> f64 {
        (cut / (std::f64::consts::PI * t_min)).sqrt()
    }

    fn push_cloud(&mut self, cloud: &PointCloud, weight: impl Fn(f64) -> f64, shell: usize) {
        for p in cloud.positive() {
            let w = weight(p.internal);
            if w != 0.0 {
                self.terms.push((p.value * p.value, w, shell));
            }
        }
    }

    fn empty(t_min: f64, range: f64, zero_weight: f64) -> Self {
        ThetaSeries {
            terms: Vec::new(),
            zero_weight,
            t_min,
            range,
            shells: 0,
            count_rate: 0.0,
            shell_tail_density: 0.0,
        }
    }

    /// Primal series `½f(0) + Σ_{α>0} f(α')e^{−πα²t}` over the model set.
    pub fn primal(spec: &ModelSetSpec, weight: &WeightSpec, t_min: f64) -> Result<Self> {
        Self::primal_with_cut(spec, weight, t_min, GAUSS_CUT)
    }

    fn primal_with_cut(spec: &ModelSetSpec, weight: &WeightSpec, t_min: f64, cut: f64) -> Result<Self> {
        check_t(t_min)?;
        let range = Self::range_for(t_min, cut);
        let cloud = enumerate(spec, range, false)?;
        let mut s = Self::empty(t_min, range, 1.0);
        if spec.lattice_mode {
            s.push_cloud(&cloud, |_| 1.0, 1);
            s.count_rate = 1.0 / lattice_spacing(spec) + 1.0;
        } else {
            s.push_cloud(&cloud, |y| weight.f(y), 1);
            s.count_rate = 2.0 * spec.effective_window()?.radius() / spec.covolume()? + 1.0;
        }
        s.shells = 1;
        Ok(s)
    }

    /// Dual series `½f^∨(0) + Σ_{n≤N} Σ_{β∈Δ𝔪_n^∨, β>0} f^∨(β')e^{−πβ²t}`.
    ///
    /// `n_shells = None` takes enough shells for `f^∨ < 10⁻²⁰` beyond the last one.
    pub fn dual(spec: &ModelSetSpec, weight: &WeightSpec, t_min: f64, n_shells: Option<usize>) -> Result<Self> {
        Self::dual_with_cut(spec, weight, t_min, n_shells, GAUSS_CUT)
    }

    fn dual_with_cut(
        spec: &ModelSetSpec,
        weight: &WeightSpec,
        t_min: f64,
        n_shells: Option<usize>,
        cut: f64,
    ) -> Result<Self> {
        check_t(t_min)?;
        let range = Self::range_for(t_min, cut);
        if spec.lattice_mode {
            let xi = lattice_spacing(spec);
            let n = n_shells.unwrap_or(1).min(1);
            let mut s = Self::empty(t_min, range, 1.0);
            if n == 1 {
                let m = (range * xi).floor() as usize;
                for j in 1..=m {
                    let b = j as f64 / xi;
                    s.terms.push((b * b, 1.0, 1));
                }
            }
            s.shells = n;
            s.count_rate = xi + 1.0;
            return Ok(s);
        }
        let dd = dual_data(spec)?;
        let wd = dd.dual_window_bound.value();
        let n = match n_shells {
            Some(n) => n,
            None => (weight.dual_cutoff(1e-20) / wd).ceil() as usize + 1,
        };
        if n > 4096 {
            return Err(QcError::Resource(format!("{n} dual shells requested")));
        }
        let mut s = Self::empty(t_min, range, weight.dual(0.0));
        for shell in 1..=n {
            let w = shell_window(&spec.field, &dd.dual_window_bound, shell)?;
            let sp = ModelSetSpec::on_ideal(spec.field.clone(), dd.dual_basis.clone(), w)?;
            let cloud = enumerate(&sp, range, false)?;
            s.push_cloud(&cloud, |y| weight.dual(y), shell);
        }
        s.shells = n;
        // dual covolume is 1/covol
        let y = n as f64 * wd;
        s.count_rate = 2.0 * y * dd.covolume + 1.0;
        s.shell_tail_density = dd.covolume * libm::erfc(y * (std::f64::consts::PI / weight.c).sqrt());
        Ok(s)
    }

    /// `θ(t)` and a bound on the dropped terms.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        check_t(t)?;
        if t < self.t_min * (1.0 - 1e-12) {
            return Err(QcError::Completeness(format!(
                "series prepared for t ≥ {}, asked for t = {t}",
                self.t_min
            )));
        }
        let mut acc = CompSum::new();
        acc.add(0.5 * self.zero_weight);
        acc.add(self.sum(t));
        Ok((acc.value(), self.tail_bound(t)))
    }

    /// `θ(t) − ½w₀`.
    fn sum(&self, t: f64) -> f64 {
        let mut acc = CompSum::new();
        let pt = std::f64::consts::PI * t;
        for &(a2, w, _) in &self.terms {
            acc.add(w * (-pt * a2).exp());
        }
        acc.value()
    }

    /// Contribution of one shell.
    pub fn shell_sum(&self, t: f64, shell: usize) -> f64 {
        let pt = std::f64::consts::PI * t;
        let mut acc = CompSum::new();
        for &(a2, w, sh) in &self.terms {
            if sh == shell {
                acc.add(w * (-pt * a2).exp());
            }
        }
        acc.value()
    }

    fn tail_bound(&self, t: f64) -> f64 {
        let r = self.range;
        let pt = std::f64::consts::PI * t;
        let beyond_range = self.count_rate * (-pt * r * r).exp() / (1.0 - (-2.0 * pt * r).exp());
        let beyond_shells = self.shell_tail_density * (0.5 / t.sqrt() + 1.0);
        beyond_range + beyond_shells
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `∫_1^∞ (θ(t) − ½w₀) t^{s/2} dt/t` by composite Gauss–Legendre in `ln t`.
    fn mellin_tail(&self, s: Complex64) -> Result<(Complex64, f64)> {
        let a2min = self
            .terms
            .iter()
            .filter(|(_, w, _)| w.abs() > 1e-40)
            .map(|(a2, _, _)| *a2)
            .fold(f64::INFINITY, f64::min);
        if !a2min.is_finite() {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let half = s.re.max(0.0) / 2.0;
        let mut tstar: f64 = 1.0;
        for _ in 0..4 {
            tstar = ((MELLIN_CUT + half * tstar.ln()) / (std::f64::consts::PI * a2min)).max(1.0);
        }
        let u_max = tstar.ln();
        if u_max <= 0.0 {
            return Ok((Complex64::new(0.0, 0.0), 0.0));
        }
        let f = |u: f64| -> Complex64 {
            let t = u.exp();
            self.sum(t) * (s * (0.5 * u)).exp()
        };
        let mut panels = 16;
        let mut prev = integrate_gl(f, 0.0, u_max, panels, 20);
        loop {
            panels *= 2;
            let cur = integrate_gl(f, 0.0, u_max, panels, 20);
            let diff = (cur - prev).norm();
            if diff <= 1e-13 * cur.norm().max(1e-300) || diff < 1e-300 {
                return Ok((cur, diff));
            }
            if panels >= 4096 {
                return Err(QcError::Numeric(format!(
                    "Mellin quadrature unstable: change {diff:.3e} at {panels} panels"
                )));
            }
            prev = cur;
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(QcError::InvalidInput(format!("t = {t} must be positive")));
    }
    Ok(())
}

fn theta_result(series: &ThetaSeries, t: f64, rigorous: bool) -> Result<EvalResult> {
    let (v, b) = series.eval(t)?;
    Ok(EvalResult {
        value: Complex64::new(v, 0.0),
        error_bound: b,
        rigorous,
        cutoff_used: series.range,
        method: Method::Direct,
        terms: series.len(),
    })
}

/// `θ_{𝔪,χ}(t) = ½χ(0) + Σ_{α>0} χ(α)e^{−πα²t}`.
pub fn theta_qc(spec: &ModelSetSpec, weight: &WeightSpec, t: f64) -> Result<EvalResult> {
    theta_result(&ThetaSeries::primal(spec, weight, t)?, t, true)
}

/// Dual theta function summed over the first `n_shells` shells.
pub fn theta_dual(spec: &ModelSetSpec, weight: &WeightSpec, t: f64, n_shells: usize) -> Result<EvalResult> {
    theta_result(&ThetaSeries::dual(spec, weight, t, Some(n_shells))?, t, false)
}

#[derive(Debug, Clone, Serialize)]
pub struct PoissonReport {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    pub constant: f64,
    pub normalization: Normalization,
    pub lhs_bound: f64,
    pub rhs_bound: f64,
    pub range: f64,
    pub dual_range: f64,
    pub dual_shells: usize,
}

/// `θ(t)` against `C·t^{−1/2}·θ^∨(1/t)`.
pub fn poisson_check(spec: &ModelSetSpec, weight: &WeightSpec, t: f64, norm: Normalization) -> Result<PoissonReport> {
    poisson_check_with_cut(spec, weight, t, norm, GAUSS_CUT)
}

/// As [`poisson_check`] with both series truncated where `πa²t` reaches `cut`.
pub fn poisson_check_with_cut(
    spec: &ModelSetSpec,
    weight: &WeightSpec,
    t: f64,
    norm: Normalization,
    cut: f64,
) -> Result<PoissonReport> {
    check_t(t)?;
    if !(cut > 0.0 && cut.is_finite()) {
        return Err(QcError::InvalidInput(format!("cut = {cut} must be positive")));
    }
    let p = ThetaSeries::primal_with_cut(spec, weight, t, cut)?;
    let d = ThetaSeries::dual_with_cut(spec, weight, 1.0 / t, None, cut)?;
    let c = norm.constant(covolume_of(spec)?);
    let (lhs, lb) = p.eval(t)?;
    let (dv, db) = d.eval(1.0 / t)?;
    let scale = c / t.sqrt();
    let rhs = scale * dv;
    Ok(PoissonReport {
        t,
        lhs,
        rhs,
        rel_err: (lhs - rhs).abs() / lhs.abs(),
        constant: c,
        normalization: norm,
        lhs_bound: lb,
        rhs_bound: scale * db,
        range: p.range,
        dual_range: d.range,
        dual_shells: d.shells,
    })
}

/// Both theta series prepared for the Mellin integrals on `[1, ∞)`.
pub struct MellinData {
    primal: ThetaSeries,
    dual: ThetaSeries,
    pub constant: f64,
}

impl MellinData {
    pub fn new(spec: &ModelSetSpec, weight: &WeightSpec, norm: Normalization) -> Result<Self> {
        Ok(MellinData {
            primal: ThetaSeries::primal_with_cut(spec, weight, 1.0, MELLIN_CUT)?,
            dual: ThetaSeries::dual_with_cut(spec, weight, 1.0, None, MELLIN_CUT)?,
            constant: norm.constant(covolume_of(spec)?),
        })
    }

    /// `χ(0)`.
    pub fn chi0(&self) -> f64 {
        self.primal.zero_weight
    }

    /// `χ^∨(0) = f^∨(0)`.
    pub fn chi_dual0(&self) -> f64 {
        self.dual.zero_weight
    }

    /// `Λ(s) = I(s) + C·I^∨(1−s) + Cχ^∨(0)/(s−1) − χ(0)/s`.
    pub fn lambda(&self, s: Complex64) -> Result<EvalResult> {
        check_poles(s)?;
        let one = Complex64::new(1.0, 0.0);
        let c = self.constant;
        let (i1, e1) = self.primal.mellin_tail(s)?;
        let (i2, e2) = self.dual.mellin_tail(one - s)?;
        let v = i1 + c * i2 + c * self.chi_dual0() / (s - one) - self.chi0() / s;
        Ok(self.result(v, e1 + c * e2))
    }

    /// `Λ^∨(s) = I^∨(s) + C⁻¹·I(1−s) + C⁻¹χ(0)/(s−1) − χ^∨(0)/s`.
    pub fn lambda_dual(&self, s: Complex64) -> Result<EvalResult> {
        check_poles(s)?;
        let one = Complex64::new(1.0, 0.0);
        let ci = 1.0 / self.constant;
        let (i1, e1) = self.dual.mellin_tail(s)?;
        let (i2, e2) = self.primal.mellin_tail(one - s)?;
        let v = i1 + ci * i2 + ci * self.chi0() / (s - one) - self.chi_dual0() / s;
        Ok(self.result(v, e1 + ci * e2))
    }

    fn result(&self, v: Complex64, quad: f64) -> EvalResult {
        let t1 = self.primal.tail_bound(1.0) + self.dual.tail_bound(1.0);
        EvalResult {
            value: v,
            error_bound: quad + t1,
            rigorous: false,
            cutoff_used: self.primal.range,
            method: Method::Continued,
            terms: self.primal.len() + self.dual.len(),
        }
    }
}

fn check_poles(s: Complex64) -> Result<()> {
    if s == Complex64::new(0.0, 0.0) || s == Complex64::new(1.0, 0.0) {
        return Err(QcError::Pole);
    }
    Ok(())
}

/// Completed `Λ(𝔪, χ, s)` via the Mellin split of the theta function.
pub fn lambda_completed(spec: &ModelSetSpec, weight: &WeightSpec, s: Complex64, norm: Normalization) -> Result<EvalResult> {
    MellinData::new(spec, weight, norm)?.lambda(s)
}

/// `π^{−s/2}Γ(s/2)`.
pub fn gamma_factor(s: Complex64) -> Complex64 {
    pow_neg(std::f64::consts::PI, s * 0.5) * gamma(s * 0.5)
}

/// Weighted density `lim N_f(u)/u = ∫_D f / covol`.
pub fn weighted_density(spec: &ModelSetSpec, weight: &WeightSpec) -> Result<f64> {
    if spec.lattice_mode {
        return Ok(1.0 / lattice_spacing(spec));
    }
    let w = spec.effective_window()?;
    let mass = weight.integral(w.radius()) - weight.integral(w.inner_radius());
    Ok(mass / spec.covolume()?)
}

/// `L(s) = Σ_{α>0} f(α')α^{−s}` continued to `Re(s) > 0` with the weighted
/// discrepancy `E_f(u) = Σ_{α≤u} f(α') − ρ_f u`.
pub fn l_continued(cloud: &PointCloud, weight: &WeightSpec, s: Complex64, rho_f: f64) -> Result<EvalResult> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(QcError::Pole);
    }
    if s.re <= 0.0 {
        return Err(QcError::Domain(format!("needs Re(s) > 0, got {}", s.re)));
    }
    let w = |y: f64| if cloud.lattice { 1.0 } else { weight.f(y) };
    let mut acc = CompSumC::new();
    let mut mass = CompSum::new();
    let mut sup_e: f64 = 0.0;
    let mut last = 0.0;
    let mut n = 0;
    for p in cloud.positive() {
        let before = mass.value() - rho_f * p.value;
        let fw = w(p.internal);
        acc.add(fw * pow_neg(p.value, s));
        mass.add(fw);
        sup_e = sup_e.max(before.abs()).max((mass.value() - rho_f * p.value).abs());
        last = p.value;
        n += 1;
    }
    if n < 2 {
        return Err(QcError::InsufficientData("need at least two points".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let x = last;
    let e_x = mass.value() - rho_f * x;
    acc.add(rho_f * x * pow_neg(x, s) / (s - one));
    acc.add(-e_x * pow_neg(x, s));
    Ok(EvalResult {
        value: acc.value(),
        error_bound: s.norm() * sup_e * x.powf(-s.re) / s.re,
        rigorous: false,
        cutoff_used: x,
        method: Method::Continued,
        terms: n,
    })
}

/// `Λ(s) = π^{−s/2}Γ(s/2)L(s)` from the Dirichlet series with the
/// weighted-density tail.
pub fn lambda_dirichlet(spec: &ModelSetSpec, weight: &WeightSpec, s: Complex64, x_max: f64) -> Result<EvalResult> {
    let cloud = enumerate(spec, x_max, false)?;
    let rho_f = weighted_density(spec, weight)?;
    let l = l_continued(&cloud, weight, s, rho_f)?;
    let g = gamma_factor(s);
    Ok(EvalResult { value: g * l.value, error_bound: g.norm() * l.error_bound, ..l })
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionalEquationReport {
    pub s_re: f64,
    pub s_im: f64,
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub dual_side_re: f64,
    pub dual_side_im: f64,
    pub residual: f64,
    pub constant: f64,
    pub normalization: Normalization,
}

/// `|Λ(s) − C·Λ^∨(1−s)| / |Λ(s)|` with `Λ(s)` from the Dirichlet series and
/// `Λ^∨` from the Mellin split of the dual theta function.
pub fn functional_equation_residual(
    spec: &ModelSetSpec,
    weight: &WeightSpec,
    s: Complex64,
    norm: Normalization,
    x_max: f64,
) -> Result<FunctionalEquationReport> {
    let lam = lambda_dirichlet(spec, weight, s, x_max)?.value;
    let md = MellinData::new(spec, weight, norm)?;
    let dual = md.constant * md.lambda_dual(Complex64::new(1.0, 0.0) - s)?.value;
    Ok(FunctionalEquationReport {
        s_re: s.re,
        s_im: s.im,
        lambda_re: lam.re,
        lambda_im: lam.im,
        dual_side_re: dual.re,
        dual_side_im: dual.im,
        residual: (lam - dual).norm() / lam.norm(),
        constant: md.constant,
        normalization: norm,
    })
}

/// Residue of Λ at `s = 1` from the Dirichlet side with the empirical
/// weighted density, against `C·χ^∨(0)`.
pub fn residue_at_one(spec: &ModelSetSpec, weight: &WeightSpec, x_max: f64, norm: Normalization) -> Result<(f64, f64)> {
    let cloud = enumerate(spec, x_max, false)?;
    let mass: f64 = cloud
        .positive()
        .map(|p| if cloud.lattice { 1.0 } else { weight.f(p.internal) })
        .sum();
    let last = cloud.positive().last().map_or(x_max, |p| p.value);
    let rho_emp = mass / last;
    let mut est = 0.0;
    for d in [1e-3, -1e-3] {
        let s = Complex64::new(1.0 + d, 0.0);
        let l = l_continued(&cloud, weight, s, rho_emp)?;
        est += 0.5 * (d * gamma_factor(s) * l.value).re;
    }
    let chi_dual0 = if spec.lattice_mode { 1.0 } else { weight.dual(0.0) };
    Ok((est, norm.constant(covolume_of(spec)?) * chi_dual0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::rat;
    use num_rational::BigRational;
    use std::cmp::Ordering;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn field(d: i64) -> Arc<QuadraticField> {
        Arc::new(QuadraticField::new(d).unwrap())
    }

    fn wide(d: i64, x: i64) -> ModelSetSpec {
        ModelSetSpec::ring(field(d), &rat(x), true).unwrap()
    }

    fn same_lattice(a: &[FieldElement; 2], b: &[FieldElement; 2]) -> bool {
        lattice::hnf(a).unwrap() == lattice::hnf(b).unwrap()
    }

    #[test]
    fn codifferent_formulas() {
        for d in [2, 3, 7] {
            let k = QuadraticField::new(d).unwrap();
            let o = ModelSetSpec::ring_of_integers_basis();
            let dual = dual_lattice(&k, &o).unwrap();
            let g = k.inv(&FieldElement::from_ints(0, 2)).unwrap(); // 1/(2√d)
            let want = lattice::scale(&k, &o, &g).unwrap();
            assert!(same_lattice(&dual, &want), "d = {d}");
        }
        let k = QuadraticField::new(5).unwrap();
        let o = ModelSetSpec::ring_of_integers_basis();
        let sqrt5 = FieldElement::new(rat(-1), rat(2)); // 2ω − 1
        let want = lattice::scale(&k, &o, &k.inv(&sqrt5).unwrap()).unwrap();
        assert!(same_lattice(&dual_lattice(&k, &o).unwrap(), &want));
    }

    #[test]
    fn biduality_and_trace() {
        let k = QuadraticField::new(10).unwrap();
        let ideal = lattice::hnf(&[FieldElement::from_ints(2, 0), FieldElement::from_ints(0, 1)]).unwrap();
        let d = dual_basis(&k, &ideal).unwrap();
        for b in &d {
            for a in &ideal {
                assert!(k.trace(&k.mul(a, b)).is_integer());
            }
        }
        let dd = dual_lattice(&k, &lattice::hnf(&d).unwrap()).unwrap();
        assert!(same_lattice(&dd, &ideal));
    }

    #[test]
    fn shells_partition_the_dual() {
        let spec = ModelSetSpec::ring(field(5), &rat(0), false).unwrap();
        let r = 20.0;
        let n_max = 10;
        let mut union = Vec::new();
        for n in 1..=n_max {
            let c = enumerate(&dual_model_set(&spec, n).unwrap(), r, false).unwrap();
            union.extend(c.exact_keys());
        }
        let total = union.len();
        union.sort();
        union.dedup();
        assert_eq!(union.len(), total, "shells overlap");
        let all = enumerate(&dual_model_set_cumulative(&spec, n_max).unwrap(), r, false).unwrap();
        let mut want = all.exact_keys();
        want.sort();
        assert_eq!(union, want);
    }

    #[test]
    fn first_shell_radius_and_brute_force() {
        let k = field(5);
        let spec = ModelSetSpec::on_ideal(
            k.clone(),
            ModelSetSpec::ring_of_integers_basis(),
            WindowSpec::new(WindowBound::element(&k, FieldElement::one()).unwrap(), true),
        )
        .unwrap();
        let sh = dual_model_set(&spec, 1).unwrap();
        assert!((sh.window.radius() - PI / 3.0).abs() < 1e-15);
        let got = enumerate(&sh, 100.0, false).unwrap().exact_keys();
        // scan β = i·b₀ + j·b₁ over a box far larger than the target region
        let dd = dual_data(&spec).unwrap();
        let mut want = Vec::new();
        let m = 300i64;
        for i in -m..=m {
            for j in -m..=m {
                let b = dd.dual_basis[0].scale(&rat(i)) + dd.dual_basis[1].scale(&rat(j));
                let (v, c) = k.embed(&b);
                if v <= 0.0 || v > 100.0 || c.abs() > 2.0 {
                    continue;
                }
                if dd.dual_window_bound.cmp_abs(&k, &k.conj(&b)).unwrap() != Ordering::Greater {
                    assert!(i.abs() < m - 5 && j.abs() < m - 5, "scan box too small");
                    want.push((b.a.clone(), b.b.clone()));
                }
            }
        }
        want.sort();
        let mut got = got;
        got.sort();
        assert_eq!(got, want);
        assert!(!got.is_empty());
    }

    #[test]
    fn jacobi_theta_constant() {
        let z = ModelSetSpec::integers();
        let w = WeightSpec::new(1.0).unwrap();
        let r = theta_qc(&z, &w, 1.0).unwrap();
        let want = PI.powf(0.25) / (2.0 * crate::numeric::gamma_real(0.75));
        assert!((r.value.re - want).abs() < 1e-13);
        assert!((r.value.re - 0.543_217_405_606_654).abs() < 1e-14);
        let big = theta_qc(&z, &w, 1e4).unwrap();
        assert!((big.value.re - 0.5).abs() < 1e-15);
        let d = theta_dual(&z, &w, 1.0, 0).unwrap();
        assert_eq!(d.value.re, 0.5);
    }

    #[test]
    fn jacobi_inversion() {
        let z = ModelSetSpec::integers();
        let w = WeightSpec::new(1.0).unwrap();
        for t in [0.5, 1.0, 2.0, 0.1] {
            let r = poisson_check(&z, &w, t, Normalization::Covolume).unwrap();
            assert!(r.rel_err < 1e-12, "t = {t}: {}", r.rel_err);
        }
        // ξℤ with ξ = 3/2 has dual (2/3)ℤ and constant 2/3
        let k = field(5);
        let xi = ModelSetSpec::lattice(k, FieldElement::rational(BigRational::new(3.into(), 2.into()))).unwrap();
        let r = poisson_check(&xi, &w, 0.7, Normalization::Covolume).unwrap();
        assert!(r.rel_err < 1e-12 && (r.constant - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn poisson_meyer_golden() {
        let spec = wide(5, -3);
        let w = WeightSpec::new(1.0).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let r = poisson_check(&spec, &w, t, Normalization::Covolume).unwrap();
            assert!(r.rel_err < 1e-6, "t = {t}: {r:?}");
            let p = poisson_check(&spec, &w, t, Normalization::TwoPi).unwrap();
            assert!(p.rel_err > 1.0);
        }
    }

    #[test]
    fn dual_shells_decay() {
        let spec = wide(5, 0);
        let w = WeightSpec::new(1.0).unwrap();
        let s = ThetaSeries::dual(&spec, &w, 1.0, Some(12)).unwrap();
        let mags: Vec<f64> = (1..=12).map(|n| s.shell_sum(1.0, n).abs()).collect();
        for n in 3..8 {
            assert!(mags[n] <= 0.1 * mags[n - 1] || mags[n] < 1e-30, "{mags:?}");
        }
    }

    #[test]
    fn lambda_matches_riemann() {
        let z = ModelSetSpec::integers();
        let w = WeightSpec::new(1.0).unwrap();
        let l = lambda_completed(&z, &w, Complex64::new(4.0, 0.0), Normalization::Covolume).unwrap();
        let want = PI.powi(2) / 90.0;
        assert!((l.value.re - want).abs() < 1e-10, "{}", l.value);
        // Riemann's ξ-symmetry Λ(s) = Λ(1−s) at a complex point
        let s = Complex64::new(0.3, 2.0);
        let a = lambda_completed(&z, &w, s, Normalization::Covolume).unwrap();
        let b = lambda_completed(&z, &w, Complex64::new(1.0, 0.0) - s, Normalization::Covolume).unwrap();
        assert!((a.value - b.value).norm() < 1e-10);
    }

    #[test]
    fn mellin_agrees_with_dirichlet() {
        let spec = wide(5, -2);
        let w = WeightSpec::new(1.0).unwrap();
        let s = Complex64::new(3.0, 0.5);
        let m = lambda_completed(&spec, &w, s, Normalization::Covolume).unwrap();
        let d = lambda_dirichlet(&spec, &w, s, 2e3).unwrap();
        assert!((m.value - d.value).norm() < 1e-6 + d.error_bound, "{} {}", m.value, d.value);
    }

    #[test]
    fn functional_equation_and_residue() {
        let spec = wide(5, -3);
        let w = WeightSpec::new(1.0).unwrap();
        let r = functional_equation_residual(&spec, &w, Complex64::new(2.0, 0.0), Normalization::Covolume, 1e4)
            .unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
        let (got, want) = residue_at_one(&spec, &w, 1e4, Normalization::Covolume).unwrap();
        assert!((got - want).abs() / want < 0.01, "{got} {want}");
        assert!(lambda_completed(&spec, &w, Complex64::new(1.0, 0.0), Normalization::Covolume).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn dual_basis_has_integral_traces(
                d in prop::sample::select(vec![2i64, 3, 5, 6, 7, 10, 13, 14, 15, 21]),
                a in 1i64..6, b in -5i64..6, c in 1i64..6,
            ) {
                let k = QuadraticField::new(d).unwrap();
                let gens = [
                    FieldElement::from_ints(a, 0),
                    FieldElement::from_ints(b, c),
                ];
                let basis = lattice::hnf(&gens).unwrap();
                let dual = dual_basis(&k, &basis).unwrap();
                for (i, x) in basis.iter().enumerate() {
                    for (j, y) in dual.iter().enumerate() {
                        let tr = k.trace(&k.mul(x, y));
                        prop_assert_eq!(tr, rat(if i == j { 1 } else { 0 }));
                    }
                }
            }
        }

        #[test]
        fn poisson_residual_shrinks_with_cutoff() {
            let spec = wide(5, -3);
            let w = WeightSpec::new(1.0).unwrap();
            for t in [0.5, 1.0, 2.0] {
                let errs: Vec<f64> = [3.0, 8.0, 16.0, 40.0]
                    .iter()
                    .map(|&cut| poisson_check_with_cut(&spec, &w, t, Normalization::Covolume, cut).unwrap().rel_err)
                    .collect();
                for p in errs.windows(2) {
                    assert!(p[1] <= p[0] * (1.0 + 1e-3) + 1e-12, "t = {t}: {errs:?}");
                }
                assert!(errs[3] < errs[0] || errs[0] < 1e-12);
            }
        }
    }
}
