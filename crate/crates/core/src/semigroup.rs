//! The compressed semigroup `Z_B(t) = P₀ U_B(t) P₀`, Shannon sampling on
//! `I₀`, the spatial semigroup with its Volterra resolvent, and the two
//! resolvent routes for `Z_B`.

use crate::characteristics::traced_norm2;
use crate::domain::{BoundaryMatrix, Component, ExteriorDomain};
use crate::eigen::coeff_a;
use crate::error::{Error, Result};
use crate::multiplier::{MultiplierKind, MultiplierSeries};
use crate::packet::{exp_integral, StepPacket};
use crate::quadrature::{gauss_legendre_composite, LineQuadrature};
use crate::spectral::{fourier_coeffs, SpectralDensity};
use crate::transform::{Provenance, TransformSample};
use crate::{e, Complex64};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupState {
    pub packet: StepPacket,
    pub t: f64,
    pub truncation_error: f64,
}

/// `Z_B(t) f = χ₀ (m⁻² (P₀f)^)∨(· − t)` for `t ≥ 0`.
pub fn compress_evolve(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, t: f64, eps: f64) -> Result<SemigroupState> {
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    let m = MultiplierSeries::make(MultiplierKind::MSquaredInv, b, dom, eps)?;
    let f0 = f.restrict_component(dom, Component::Zero);
    let (packet, truncation_error) = m.apply_shifted(&f0, t, dom.interval(Component::Zero), eps);
    Ok(SemigroupState {
        packet,
        t,
        truncation_error,
    })
}

/// `sin(π(λ−ξ))/(π(λ−ξ))`, equal to one on the diagonal.
pub fn shannon_kernel(lambda: f64, xi: f64) -> f64 {
    let d = PI * (lambda - xi);
    if d.abs() < 1e-8 {
        1.0 - d * d / 6.0
    } else {
        d.sin() / d
    }
}

/// Reproducing kernel of `{ĝ : g ∈ L²(a, b)}` normalized to one on the
/// diagonal: `e(−c(λ−ξ)) sinc(πL(λ−ξ))` with `c` the midpoint and `L` the
/// length. It reduces to [`shannon_kernel`] on `(−1/2, 1/2)`.
pub fn shifted_shannon_kernel(interval: (f64, f64), lambda: f64, xi: f64) -> Complex64 {
    let len = interval.1 - interval.0;
    exp_integral(xi - lambda, interval.0, interval.1) / len
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShannonBasisCoeffs {
    /// `ĝ(n/L)` for `n` in `window`.
    pub samples: Vec<Complex64>,
    pub window: (i64, i64),
    pub interval: (f64, f64),
    /// `L‖g‖² − Σ_window |ĝ(n/L)|²`, the energy outside the window.
    pub tail_estimate: f64,
}

impl ShannonBasisCoeffs {
    pub fn get(&self, n: i64) -> Option<Complex64> {
        if n < self.window.0 || n > self.window.1 {
            None
        } else {
            Some(self.samples[(n - self.window.0) as usize])
        }
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }
}

/// Samples `ĝ(n/L)` of a packet supported in `interval`.
pub fn shannon_coeffs(g: &StepPacket, interval: (f64, f64), window: (i64, i64)) -> Result<ShannonBasisCoeffs> {
    if let Some((lo, hi)) = g.support() {
        if lo < interval.0 || hi > interval.1 {
            return Err(Error::InvalidArgument("packet is not supported in the sampling interval".into()));
        }
    }
    if window.0 > window.1 {
        return Err(Error::InvalidArgument("empty sampling window".into()));
    }
    let len = interval.1 - interval.0;
    let samples: Vec<Complex64> = (window.0..=window.1).map(|n| g.fourier(n as f64 / len)).collect();
    let energy: f64 = samples.iter().map(|s| s.norm_sqr()).sum();
    Ok(ShannonBasisCoeffs {
        samples,
        window,
        interval,
        tail_estimate: (len * g.norm2() - energy).max(0.0),
    })
}

/// `ĝ(λ) ≈ Σ_n ĝ(n/L) K(λ, n/L)` over the stored window.
pub fn shannon_interpolate(c: &ShannonBasisCoeffs, lambda: f64) -> Complex64 {
    let len = c.interval.1 - c.interval.0;
    (c.window.0..=c.window.1)
        .zip(&c.samples)
        .map(|(n, s)| s * shifted_shannon_kernel(c.interval, lambda, n as f64 / len))
        .sum()
}

/// `(Z_B(t)f)^(λ) = ∫ K₀(λ, ξ) e(−tξ) f̂(ξ) dσ_B(ξ)` by whole-line quadrature,
/// with `K₀(λ, ξ) = ∫_{I₀} e((ξ−λ)x) dx`.
pub fn semigroup_kernel_apply(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    f: &StepPacket,
    t: f64,
    lambda_grid: &[f64],
    q: &LineQuadrature,
) -> Result<TransformSample> {
    let sd = SpectralDensity::new(*b, *dom)?;
    let f0 = f.restrict_component(dom, Component::Zero);
    let (lo, hi) = dom.interval(Component::Zero);
    let (offset, period) = sd.peak_lattice();
    let q = q.aligned(offset, period);
    let values = lambda_grid
        .iter()
        .map(|&l| {
            q.integrate(|xi| exp_integral(xi - l, lo, hi) * e(-t * xi) * f0.fourier(xi) * sd.density(xi))
                .value
        })
        .collect();
    TransformSample::new(lambda_grid.to_vec(), values, Provenance::Quadrature)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledEnergy {
    /// `Σ_{|n| ≤ N} |(Z_B(t)f)^(n/L)|²`
    pub energy: f64,
    /// `(4/w²)‖f‖²`
    pub bound: f64,
    pub margin: f64,
}

/// Sampled energy of `Z_B(t) f` against the `(4/w²)‖f‖²` bound.
pub fn sampled_energy(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, t: f64, n_max: i64, eps: f64) -> Result<SampledEnergy> {
    let z = compress_evolve(b, dom, f, t, eps)?;
    let c = shannon_coeffs(&z.packet, dom.interval(Component::Zero), (-n_max, n_max))?;
    let energy = c.energy();
    let bound = 4.0 / (b.w() * b.w()) * f.norm2();
    Ok(SampledEnergy {
        energy,
        bound,
        margin: bound - energy,
    })
}

fn require_in_zero(dom: &ExteriorDomain, f: &StepPacket) -> Result<()> {
    if let Some((lo, hi)) = f.support() {
        if lo < 1.0 || hi > dom.alpha() {
            return Err(Error::InvalidArgument("packet must be supported in I₀".into()));
        }
    }
    Ok(())
}

/// `Z_sp(t) f = χ_{I₀} f(· − t)`.
pub fn spatial_semigroup(dom: &ExteriorDomain, f: &StepPacket, t: f64) -> Result<StepPacket> {
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    require_in_zero(dom, f)?;
    Ok(f.translate(t).restrict(1.0, dom.alpha()))
}

/// `x ↦ A_k + B_k e^{−λ(x − x_k)}` on `[x_k, x_{k+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraProfile {
    pub lambda: Complex64,
    pub knots: Vec<f64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl VolterraProfile {
    pub fn eval(&self, x: f64) -> Complex64 {
        if self.knots.is_empty() || x < self.knots[0] || x > *self.knots.last().unwrap() {
            return Complex64::new(0.0, 0.0);
        }
        let k = self.knots.partition_point(|&p| p <= x).clamp(1, self.knots.len() - 1) - 1;
        self.a[k] + self.b[k] * (-self.lambda * (x - self.knots[k])).exp()
    }

    /// Exact `L²` norm squared.
    pub fn norm2(&self) -> f64 {
        let l = self.lambda;
        let mut acc = 0.0;
        for k in 0..self.a.len() {
            let h = self.knots[k + 1] - self.knots[k];
            let (a, b) = (self.a[k], self.b[k]);
            // ∫₀^h e^{−λs} ds and ∫₀^h e^{−2 Re λ s} ds
            let i1 = if l.norm() * h < 1e-8 { Complex64::new(h, 0.0) } else { (1.0 - (-l * h).exp()) / l };
            let two = 2.0 * l.re;
            let i2 = if (two * h).abs() < 1e-8 { h } else { (1.0 - (-two * h).exp()) / two };
            acc += a.norm_sqr() * h + 2.0 * (a.conj() * b * i1).re + b.norm_sqr() * i2;
        }
        acc
    }
}

/// `(R_sp(λ) f)(x) = ∫₁ˣ e^{−λ(x−y)} f(y) dy` on `I₀`, cell by cell.
pub fn spatial_resolvent(dom: &ExteriorDomain, lambda: Complex64, f: &StepPacket) -> Result<VolterraProfile> {
    if lambda.re <= 0.0 {
        return Err(Error::HalfPlaneViolation { re: lambda.re });
    }
    require_in_zero(dom, f)?;
    if f.carrier() != 0.0 {
        return Err(Error::InvalidArgument("the Volterra profile needs a carrier-free packet".into()));
    }
    let mut knots = vec![1.0];
    knots.extend(f.breakpoints().iter().copied().filter(|&x| x > 1.0 && x < dom.alpha()));
    knots.push(dom.alpha());
    knots.dedup();
    let mut a = Vec::with_capacity(knots.len() - 1);
    let mut b = Vec::with_capacity(knots.len() - 1);
    let mut start = Complex64::new(0.0, 0.0);
    for w in knots.windows(2) {
        let v = f.cell_value(0.5 * (w[0] + w[1]));
        let ak = v / lambda;
        a.push(ak);
        b.push(start - ak);
        start = ak + (start - ak) * (-lambda * (w[1] - w[0])).exp();
    }
    Ok(VolterraProfile { lambda, knots, a, b })
}

/// `∫₀^∞ e^{−λt} (Z_sp(t) f)(x) dt` by composite Gauss-Legendre with the
/// kinks of the integrand as panel ends.
pub fn laplace_spatial(dom: &ExteriorDomain, lambda: Complex64, f: &StepPacket, x: f64) -> Result<Complex64> {
    if lambda.re <= 0.0 {
        return Err(Error::HalfPlaneViolation { re: lambda.re });
    }
    require_in_zero(dom, f)?;
    if !(x > 1.0 && x < dom.alpha()) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let t_end = x - 1.0;
    let mut breaks = vec![0.0, t_end];
    breaks.extend(f.breakpoints().iter().map(|p| x - p).filter(|&t| t > 0.0 && t < t_end));
    breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
    breaks.dedup();
    Ok(gauss_legendre_composite(|t| (-lambda * t).exp() * f.eval(x - t), &breaks, 20))
}

/// `∫₀^T e^{−λt} (Z_B(t)f)(x) dt` with `T` where `e^{−T Re λ} ≤ 1e−12`,
/// composite Gauss-Legendre in `t` with panel ends at the kinks.
pub fn laplace_compressed(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    lambda: Complex64,
    f: &StepPacket,
    x: f64,
    eps: f64,
) -> Result<Complex64> {
    if lambda.re <= 0.0 {
        return Err(Error::HalfPlaneViolation { re: lambda.re });
    }
    require_in_zero(dom, f)?;
    if !(x > 1.0 && x < dom.alpha()) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let m = MultiplierSeries::make(MultiplierKind::MSquaredInv, b, dom, eps)?;
    let t_max = 12.0 * 10f64.ln() / lambda.re;
    let ell = dom.ell();
    // (Z(t)f)(x) = Σ_k a_k f(x − t + kℓ) jumps where x − t + kℓ hits a breakpoint
    let mut breaks = vec![0.0, t_max];
    let k_hi = ((t_max + 1.0) / ell).ceil() as i64 + 1;
    for k in -1..=k_hi {
        for p in f.breakpoints() {
            let t = x + k as f64 * ell - p;
            if t > 0.0 && t < t_max {
                breaks.push(t);
            }
        }
    }
    breaks.sort_by(|p, q| p.partial_cmp(q).unwrap());
    breaks.dedup_by(|q, p| (*q - *p).abs() < 1e-14);
    Ok(gauss_legendre_composite(
        |t| (-lambda * t).exp() * m.eval_applied_at(f, x - t),
        &breaks,
        20,
    ))
}

/// Exact `(R_B(λ) f)(x) = Σ_k a_k ∫_{−∞}^{x+kℓ} e^{−λ(x+kℓ−y)} f(y) dy`.
pub fn compressed_resolvent_exact(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    lambda: Complex64,
    f: &StepPacket,
    x: f64,
    eps: f64,
) -> Result<Complex64> {
    if lambda.re <= 0.0 {
        return Err(Error::HalfPlaneViolation { re: lambda.re });
    }
    require_in_zero(dom, f)?;
    if !(x > 1.0 && x < dom.alpha()) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let m = MultiplierSeries::make(MultiplierKind::MSquaredInv, b, dom, eps)?;
    let ell = dom.ell();
    let cells: Vec<(f64, f64, Complex64)> = f.cells().collect();
    // causal Volterra integral over the whole line
    let whole = |y: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(p, q, v) in &cells {
            if p >= y {
                break;
            }
            let q = q.min(y);
            acc += v * ((-lambda * (y - q)).exp() - (-lambda * (y - p)).exp()) / lambda;
        }
        acc
    };
    let Some((lo, _)) = f.support() else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let t_max = 40.0 / lambda.re;
    let k_lo = ((lo - x) / ell).floor() as i64;
    let k_hi = ((t_max + 1.0) / ell).ceil() as i64 + 1;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in k_lo..=k_hi {
        let c = m.coefficient(k);
        if c != Complex64::new(0.0, 0.0) {
            acc += c * whole(x + k as f64 * ell);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventReport {
    pub lambda: Complex64,
    /// `m_B(0)²`
    pub m0_squared: f64,
    /// `‖R_B(λ)f − R_sp(λ m_B(0)²)f‖`
    pub discrepancy: f64,
    /// `‖R_B(λ)f‖` by Laplace quadrature
    pub resolvent_norm: f64,
    /// `max_x |Laplace route − exact series route|` on the sample points
    pub laplace_error: f64,
    /// `|Σ_k m_B(0)² a_k − 1|`
    pub normalization_residual: f64,
}

/// Compares `R_B(λ) f` (Laplace transform of `Z_B`) with the candidate
/// `R_sp(λ m_B(0)²) f` on `I₀`.
pub fn resolvent_comparison(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    lambda: Complex64,
    f: &StepPacket,
    eps: f64,
) -> Result<ResolventReport> {
    if lambda.re <= 0.0 {
        return Err(Error::HalfPlaneViolation { re: lambda.re });
    }
    b.require_coupled()?;
    let m0_squared = coeff_a(b, dom, 0.0).norm_sqr();
    let candidate = spatial_resolvent(dom, lambda * m0_squared, f)?;
    // Gauss-Legendre in x over the cells of the candidate profile and every
    // point where a shifted copy of f jumps
    let ell = dom.ell();
    let mut xs = vec![1.0, dom.alpha()];
    for k in -4..=4 {
        for p in f.breakpoints() {
            let x = p + k as f64 * ell;
            if x > 1.0 && x < dom.alpha() {
                xs.push(x);
            }
        }
    }
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xs.dedup_by(|q, p| (*q - *p).abs() < 1e-14);
    let (nodes, weights) = crate::quadrature::gauss_legendre(12);
    let mut disc = 0.0;
    let mut norm = 0.0;
    let mut laplace_error: f64 = 0.0;
    for w in xs.windows(2) {
        let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (u, wt) in nodes.iter().zip(&weights) {
            let x = c + h * u;
            let rb = laplace_compressed(b, dom, lambda, f, x, eps)?;
            let exact = compressed_resolvent_exact(b, dom, lambda, f, x, eps)?;
            laplace_error = laplace_error.max((rb - exact).norm());
            disc += wt * h * (rb - candidate.eval(x)).norm_sqr();
            norm += wt * h * rb.norm_sqr();
        }
    }
    let table = fourier_coeffs(b, dom, crate::spectral::default_k(b, 1e-15))?;
    let sum: Complex64 = (-(table.k_max as i64)..=table.k_max as i64).map(|k| table.get(k)).sum();
    Ok(ResolventReport {
        lambda,
        m0_squared,
        discrepancy: disc.sqrt(),
        resolvent_norm: norm.sqrt(),
        laplace_error,
        normalization_residual: (sum * m0_squared - 1.0).norm(),
    })
}

/// `‖(Z_sp(h)f − f)/h + f′‖` for a smooth `f` on `I₀`, by adaptive Simpson.
pub fn spatial_difference_quotient_defect<F, D>(dom: &ExteriorDomain, f: F, df: D, h: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let alpha = dom.alpha();
    let shifted = |x: f64| if x - h > 1.0 { f(x - h) } else { 0.0 };
    let defect = |x: f64| ((shifted(x) - f(x)) / h + df(x)).powi(2);
    let split = (1.0 + h).min(alpha);
    (crate::quadrature::adaptive_simpson(defect, 1.0, split, 1e-14)
        + crate::quadrature::adaptive_simpson(defect, split, alpha, 1e-14))
    .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySample {
    pub t: f64,
    /// `‖Z_B(t) e_n χ₀‖²` from the series engine
    pub engine: f64,
    /// the same norm from characteristics and adaptive quadrature in `x`
    pub oracle: f64,
    /// `max(1 − t, 0)`
    pub reference: f64,
}

/// `t ↦ ‖Z_B(t) e_n χ₀‖²` for a unit-length `I₀`.
pub fn norm_decay_profile(b: &BoundaryMatrix, dom: &ExteriorDomain, n: i64, t_grid: &[f64]) -> Result<Vec<DecaySample>> {
    if (dom.ell() - 1.0).abs() > 1e-15 {
        return Err(Error::InvalidArgument("the decay profile needs α − 1 = 1".into()));
    }
    b.require_coupled()?;
    let f = StepPacket::with_carrier(vec![1.0, dom.alpha()], vec![Complex64::new(1.0, 0.0)], n as f64)?;
    t_grid
        .iter()
        .map(|&t| {
            let z = compress_evolve(b, dom, &f, t, 1e-15)?;
            let oracle = traced_norm2(b, dom, &f, t, 1.0, dom.alpha())?;
            Ok(DecaySample {
                t,
                engine: z.packet.norm2(),
                oracle,
                reference: (1.0 - t).max(0.0),
            })
        })
        .collect()
}
