//! Quadrature rules used by the validation routes.

use crate::Complex64;
use std::ops::{Add, Mul, Sub};

/// Scalars that can be integrated: `f64` and `Complex64`.
pub trait Scalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<T: Scalar, F: Fn(f64) -> T>(f: F, a: f64, b: f64, tol: f64) -> T {
    fn step<T: Scalar, F: Fn(f64) -> T>(
        f: &F,
        a: f64,
        b: f64,
        fa: T,
        fm: T,
        fb: T,
        whole: T,
        tol: f64,
        depth: u32,
    ) -> T {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
        let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
        let delta = left + right - whole;
        // stop once the requested accuracy is below rounding of the panel value
        let floor = 64.0 * f64::EPSILON * (left + right).magnitude();
        if depth == 0 || delta.magnitude() <= 15.0 * tol.max(floor) {
            left + right + delta * (1.0 / 15.0)
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    // Start from a few panels so periodic integrands cannot fool the first estimate.
    let panels = 8;
    let h = (b - a) / panels as f64;
    let mut acc = T::zero();
    for k in 0..panels {
        let (x0, x1) = (a + h * k as f64, if k + 1 == panels { b } else { a + h * (k + 1) as f64 });
        let (f0, fm, f1) = (f(x0), f(0.5 * (x0 + x1)), f(x1));
        let whole = (f0 + fm * 4.0 + f1) * ((x1 - x0) / 6.0);
        acc = acc + step(&f, x0, x1, f0, fm, f1, whole, tol / panels as f64, 50);
    }
    acc
}

/// Gauss-Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss-Legendre over consecutive segments of `breaks`.
pub fn gauss_legendre_composite<T: Scalar, F: Fn(f64) -> T>(f: F, breaks: &[f64], order: usize) -> T {
    let (x, w) = gauss_legendre(order);
    let mut acc = T::zero();
    for seg in breaks.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b <= a {
            continue;
        }
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (xi, wi) in x.iter().zip(&w) {
            acc = acc + f(c + h * xi) * (wi * h);
        }
    }
    acc
}

#[allow(clippy::excessive_precision)]
const GK_XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for j in 0..7 {
        let dx = h * GK_XK[j];
        let s = f(c - dx) + f(c + dx);
        k = k + s * GK_WK[j];
        if j % 2 == 1 {
            g = g + s * GK_WG[j / 2];
        }
    }
    (k * h, (k - g).magnitude() * h)
}

/// Adaptive Gauss-Kronrod (7/15) on `[a, b]`; returns the estimate and the
/// summed error estimate.
pub fn adaptive_gk<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> (T, f64) {
    adaptive_gk_noisy(f, a, b, tol, 64.0 * f64::EPSILON, depth)
}

/// [`adaptive_gk`] for integrands known only to relative accuracy `noise`:
/// a panel is accepted once its error estimate falls below `noise · |value|`.
pub fn adaptive_gk_noisy<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64, tol: f64, noise: f64, depth: u32) -> (T, f64) {
    let (v, err) = gk15(f, a, b);
    if err <= tol.max(noise * v.magnitude()) || depth == 0 {
        return (v, err);
    }
    let m = 0.5 * (a + b);
    let (l, el) = adaptive_gk_noisy(f, a, m, 0.5 * tol, noise, depth - 1);
    let (r, er) = adaptive_gk_noisy(f, m, b, 0.5 * tol, noise, depth - 1);
    (l + r, el + er)
}

/// Adaptive Gauss-Kronrod over unit panels of `[a, b]` (panel width `panel`).
pub fn panel_gk<T: Scalar, F: Fn(f64) -> T>(f: &F, a: f64, b: f64, panel: f64, tol_per_panel: f64) -> (T, f64) {
    let n = ((b - a) / panel).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut acc = T::zero();
    let mut err = 0.0;
    for k in 0..n {
        let x0 = a + h * k as f64;
        let x1 = if k + 1 == n { b } else { x0 + h };
        let (v, e) = adaptive_gk(f, x0, x1, tol_per_panel, 30);
        acc = acc + v;
        err += e;
    }
    (acc, err)
}

/// Settings for integrals over the whole line of integrands that decay like
/// `Q(λ)/λ²` with `Q` bounded and almost periodic.
#[derive(Debug, Clone, Copy)]
pub struct LineQuadrature {
    /// Core window `[−cutoff, cutoff]`.
    pub cutoff: f64,
    /// Width of the smooth transition beyond `±cutoff`.
    pub tail_window: f64,
    pub panel: f64,
    pub tol_per_panel: f64,
    /// Optional `(offset, period)`: panel edges are placed on
    /// `offset + k·period` so that sharp features there sit on panel ends.
    pub lattice: Option<(f64, f64)>,
}

impl Default for LineQuadrature {
    fn default() -> Self {
        Self {
            cutoff: 5.0e2,
            tail_window: 4.0e3,
            panel: 0.5,
            tol_per_panel: 1e-13,
            lattice: None,
        }
    }
}

/// Result of a whole-line integral.
#[derive(Debug, Clone, Copy)]
pub struct LineIntegral {
    pub value: Complex64,
    /// Kronrod error estimate summed over panels.
    pub quadrature_error: f64,
    /// Size of the tail correction that was added.
    pub tail_correction: f64,
}

/// `C^∞` step from 0 at `s ≤ 0` to 1 at `s ≥ 1`.
fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let (a, b) = ((-1.0 / s).exp(), (-1.0 / (1.0 - s)).exp());
    a / (a + b)
}

/// Unnormalized `C^∞` bump on `(0, 1)`.
fn bump(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        (-1.0 / (s * (1.0 - s))).exp()
    }
}

impl LineQuadrature {
    /// Same settings with panel edges aligned to `offset + k·period`.
    pub fn aligned(self, offset: f64, period: f64) -> Self {
        Self {
            lattice: (period > 0.0).then_some((offset, period)),
            ..self
        }
    }

    fn panels<T: Scalar, F: Fn(f64) -> T>(&self, f: &F, a: f64, b: f64, tol: f64) -> (T, f64) {
        let Some((offset, period)) = self.lattice else {
            return panel_gk(f, a, b, self.panel, tol);
        };
        let mut acc = T::zero();
        let mut err = 0.0;
        let mut x0 = a;
        let mut k = ((a - offset) / period).floor() + 1.0;
        while x0 < b {
            let x1 = (offset + k * period).min(b);
            if x1 > x0 {
                let (v, e) = panel_gk(f, x0, x1, self.panel, tol);
                acc = acc + v;
                err += e;
                x0 = x1;
            }
            k += 1.0;
        }
        (acc, err)
    }

    /// `∫_ℝ f`. The integrand is split by a smooth partition `φ + (1 − φ)`
    /// with `φ = 1` on the core and `φ = 0` beyond `±(cutoff + tail_window)`.
    /// `∫ f φ` is computed directly. On the outer part `λ² f` is replaced by
    /// its bump-weighted mean over the transition window. The oscillating
    /// part of `λ² f` is then seen only through smooth weights, so the
    /// neglected remainder decays faster than any power of `ν·tail_window`
    /// for each frequency `ν ≠ 0` of `Q`.
    pub fn integrate<F: Fn(f64) -> Complex64 + Sync>(&self, f: F) -> LineIntegral {
        let (l0, w) = (self.cutoff, self.tail_window);
        let l1 = l0 + w;
        let (core, e0) = self.panels(&f, -l0, l0, self.tol_per_panel);
        let taper = |l: f64| 1.0 - smooth_step((l.abs() - l0) / w);
        let weight = |l: f64| bump((l.abs() - l0) / w);
        let mut value = core;
        let mut err = e0;
        let mut tail = Complex64::new(0.0, 0.0);
        // ∫_{l0}^∞ (1 − φ)/λ² and the normalization of the bump
        let (outer, _) = adaptive_gk(&|l: f64| smooth_step((l - l0) / w) / (l * l), l0, l1, 1e-16, 30);
        let outer = outer + 1.0 / l1;
        let (bump_mass, _) = adaptive_gk(&|l: f64| bump((l - l0) / w), l0, l1, 1e-16, 30);
        for (a, b) in [(l0, l1), (-l1, -l0)] {
            let (part, e1) = self.panels(&|l: f64| f(l) * taper(l), a, b, self.tol_per_panel);
            let (mean, e2) = self.panels(&|l: f64| f(l) * (l * l * weight(l)), a, b, self.tol_per_panel * l1 * l1);
            let correction = mean * (outer / bump_mass);
            value += part + correction;
            tail += correction;
            err += e1 + e2 * outer / bump_mass;
        }
        LineIntegral {
            value,
            quadrature_error: err,
            tail_correction: tail.norm(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_and_periodic() {
        let v = adaptive_simpson(|x: f64| x * x * x - x, 0.0, 2.0, 1e-13);
        assert!((v - 2.0).abs() < 1e-13);
        let v = adaptive_simpson(|x: f64| (std::f64::consts::TAU * x).cos().powi(2), 0.0, 1.0, 1e-13);
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn legendre_rules() {
        for n in [1usize, 2, 5, 10, 20] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // exact for degree 2n − 1
            let d = 2 * n - 2;
            let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(d as i32)).sum();
            assert!((s - 2.0 / (d as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
        let v = gauss_legendre_composite(|t: f64| (-t).exp(), &[0.0, 1.0, 3.0, 40.0], 20);
        assert!((v - (1.0 - (-40f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn kronrod_peaked_integrand() {
        // Poisson kernel, integral over a period is 1
        let r: f64 = 0.95;
        let p = |x: f64| (1.0 - r * r) / (1.0 - 2.0 * r * (std::f64::consts::TAU * x).cos() + r * r);
        let (v, _) = panel_gk(&p, 0.0, 1.0, 0.25, 1e-15);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_integral_of_sinc_squared() {
        // ∫ (sin πλ / πλ)² dλ = 1
        let q = LineQuadrature::default();
        let s = q.integrate(|l| {
            let v = if l == 0.0 { 1.0 } else { (std::f64::consts::PI * l).sin() / (std::f64::consts::PI * l) };
            Complex64::new(v * v, 0.0)
        });
        assert!((s.value.re - 1.0).abs() < 1e-9, "{}", s.value.re - 1.0);
    }
}
