//! Small numerical kernels shared by the analytic modules.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompSum {
    sum: f64,
    comp: f64,
}

impl CompSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex accumulator (componentwise).
#[derive(Debug, Clone, Copy, Default)]
pub struct CompSumC {
    re: CompSum,
    im: CompSum,
}

impl CompSumC {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `x^{-s}` for `x > 0` via the principal logarithm.
#[inline]
pub fn pow_neg(x: f64, s: Complex64) -> Complex64 {
    (-s * x.ln()).exp()
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(z) for complex z by the Lanczos approximation, reflected for Re z < 1/2.
pub fn gamma(z: Complex64) -> Complex64 {
    use std::f64::consts::PI;
    if z.re < 0.5 {
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Complex64::new(PI, 0.0) / (s * gamma(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// Cached Gauss–Legendre rule of the given order.
pub fn gl_rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<std::sync::Mutex<Vec<(usize, &'static (Vec<f64>, Vec<f64>))>>> =
        OnceLock::new();
    let cell = RULES.get_or_init(|| std::sync::Mutex::new(Vec::new()));
    let mut g = cell.lock().expect("rule cache poisoned");
    if let Some((_, r)) = g.iter().find(|(k, _)| *k == n) {
        return r;
    }
    let r: &'static (Vec<f64>, Vec<f64>) = Box::leak(Box::new(gauss_legendre(n)));
    g.push((n, r));
    r
}

const PI_DIGITS: &str = "31415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

/// Rational enclosure `lo < π < hi` with width 10⁻¹⁰⁰.
pub fn pi_interval() -> &'static (BigRational, BigRational) {
    static PI: OnceLock<(BigRational, BigRational)> = OnceLock::new();
    PI.get_or_init(|| {
        let digits: BigInt = PI_DIGITS.parse().expect("digits");
        let den = num_traits::pow(BigInt::from(10), PI_DIGITS.len() - 1);
        let lo = BigRational::new(digits.clone(), den.clone());
        let hi = BigRational::new(digits + BigInt::one(), den);
        (lo, hi)
    })
}

/// Enclosure of `(π/3)^k` for integer k.
pub fn pi_third_pow_interval(k: i64) -> (BigRational, BigRational) {
    let (lo, hi) = pi_interval();
    let three = BigRational::from_integer(BigInt::from(3));
    let (l, h) = (lo / &three, hi / &three);
    let n = k.unsigned_abs() as usize;
    let mut pl = BigRational::one();
    let mut ph = BigRational::one();
    for _ in 0..n {
        pl *= &l;
        ph *= &h;
    }
    if k < 0 {
        (ph.recip(), pl.recip())
    } else {
        (pl, ph)
    }
}

/// Composite Gauss–Legendre integral of `f` over `[a, b]` split into `panels` pieces.
pub fn integrate_gl<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> Complex64 {
    let (xs, ws) = gl_rule(order);
    let h = (b - a) / panels as f64;
    let mut acc = CompSumC::new();
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        for (x, w) in xs.iter().zip(ws) {
            acc.add(f(mid + 0.5 * h * x) * (0.5 * h * w));
        }
    }
    acc.value()
}
