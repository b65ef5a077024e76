//! The spectral density `m_B⁻²(λ)`, a periodized Poisson kernel, and its
//! behaviour as `w → 0`.

use crate::domain::{BoundaryMatrix, ExteriorDomain};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk_noisy;
use crate::{e, Complex64};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensity {
    pub boundary: BoundaryMatrix,
    pub domain: ExteriorDomain,
    /// `|b| = √(1 − w²)`
    pub b_modulus: f64,
    /// `1/(α − 1)`
    pub period: f64,
}

impl SpectralDensity {
    pub fn new(boundary: BoundaryMatrix, domain: ExteriorDomain) -> Result<Self> {
        boundary.require_coupled()?;
        Ok(Self {
            boundary,
            domain,
            b_modulus: boundary.r(),
            period: 1.0 / domain.ell(),
        })
    }

    /// `P_b(2π((α−1)λ − ψ)) = (1 − |b|²) / (1 − 2|b| cos(·) + |b|²)`.
    pub fn density(&self, lambda: f64) -> f64 {
        let r = self.b_modulus;
        let u = self.domain.ell() * lambda - self.boundary.psi();
        // 1 − cos(2πu) = 2 sin²(πu) and 1 − r² = w² keep full precision at the peak
        let s = (PI * (u - u.round())).sin();
        let w2 = self.boundary.w() * self.boundary.w();
        let gap = w2 / (1.0 + r);
        w2 / (gap * gap + 4.0 * r * s * s)
    }

    /// Harmonic-mean bounds `(1−|b|)/(1+|b|) ≤ density ≤ (1+|b|)/(1−|b|)`.
    /// Peak positions `(ψ + n)/(α−1)` as `(offset, period)`.
    pub fn peak_lattice(&self) -> (f64, f64) {
        (self.boundary.psi() * self.period, self.period)
    }

    pub fn bounds(&self) -> (f64, f64) {
        let r = self.b_modulus;
        ((1.0 - r) / (1.0 + r), (1.0 + r) / (1.0 - r))
    }

    /// Adaptive Simpson over one period.
    pub fn period_integral(&self) -> f64 {
        self.mass(0.0, self.period)
    }

    /// Mass of `σ_B` on `[lo, hi]` by adaptive Gauss-Kronrod.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        adaptive_gk_noisy(&|l| self.density(l), lo, hi, 1e-13, self.relative_noise(lo, hi), 60).0
    }

    /// Relative rounding noise of the density on `[lo, hi]`. The phase
    /// `u = (α−1)λ − ψ` carries an absolute error of a few ulps, which the
    /// peak of half-width `gap` amplifies by `2√r / gap`.
    pub fn relative_noise(&self, lo: f64, hi: f64) -> f64 {
        let r = self.b_modulus;
        let w2 = self.boundary.w() * self.boundary.w();
        let gap = w2 / (1.0 + r);
        let phase = self.domain.ell() * lo.abs().max(hi.abs()) + self.boundary.psi().abs() + 1.0;
        let ds = 4.0 * PI * f64::EPSILON * phase;
        (64.0 * f64::EPSILON).max(2.0 * r.sqrt() * ds / gap)
    }
}

pub fn density(sd: &SpectralDensity, lambda: f64) -> f64 {
    sd.density(lambda)
}

pub fn period_integral(sd: &SpectralDensity) -> f64 {
    sd.period_integral()
}

/// `a_k = (1−w²)^{|k|/2} e(−kψ)` for `|k| ≤ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficientTable {
    /// Index `k + K` holds `a_k`.
    pub coefficients: Vec<Complex64>,
    pub k_max: usize,
    pub lattice_step: f64,
    r: f64,
}

impl FourierCoefficientTable {
    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k_max {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficients[(k + self.k_max as i64) as usize]
    }

    /// `Σ_{|k|>K} |a_k| ≤ 2 r^{K+1}/(1 − r)`.
    pub fn tail_bound(&self) -> f64 {
        if self.r == 0.0 {
            0.0
        } else {
            2.0 * self.r.powi(self.k_max as i32 + 1) / (1.0 - self.r)
        }
    }

    /// `Σ_{|k|≤K} a_k e(k(α−1)λ)`.
    pub fn partial_sum(&self, lambda: f64) -> Complex64 {
        let k = self.k_max as i64;
        (-k..=k).map(|j| self.get(j) * e(j as f64 * self.lattice_step * lambda)).sum()
    }
}

/// Smallest `K` with `2 r^{K+1}/(1−r) ≤ tol`.
pub fn default_k(b: &BoundaryMatrix, tol: f64) -> usize {
    let r = b.r();
    if r == 0.0 {
        return 0;
    }
    let mut k = 0usize;
    while 2.0 * r.powi(k as i32 + 1) / (1.0 - r) > tol {
        k += 1;
    }
    k
}

pub fn fourier_coeffs(b: &BoundaryMatrix, dom: &ExteriorDomain, k_max: usize) -> Result<FourierCoefficientTable> {
    b.require_coupled()?;
    let r = b.r();
    let coefficients = (-(k_max as i64)..=k_max as i64)
        .map(|k| {
            let mag = if k == 0 { 1.0 } else { r.powi(k.unsigned_abs() as i32) };
            mag * e(-(k as f64) * b.psi())
        })
        .collect();
    Ok(FourierCoefficientTable {
        coefficients,
        k_max,
        lattice_step: dom.ell(),
        r,
    })
}

/// Weight attached to each atom of the `w = 0` measure. The per-period mass
/// is known; the normalization of the individual atoms is left symbolic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomWeight {
    PerPeriodConcentration(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralMeasure {
    AbsolutelyContinuous(SpectralDensity),
    /// Lebesgue measure plus atoms at the bound-state lattice.
    Mixed {
        lebesgue_density: f64,
        atoms: Vec<(f64, AtomWeight)>,
    },
}

/// The spectral measure; for `w = 0` the atoms with index in `[n_lo, n_hi]`.
pub fn spectral_measure(b: &BoundaryMatrix, dom: &ExteriorDomain, n_lo: i64, n_hi: i64) -> Result<SpectralMeasure> {
    if b.w() == 0.0 {
        let weight = AtomWeight::PerPeriodConcentration(1.0 / dom.ell());
        let atoms = crate::eigen::bound_state_spectrum(b, dom, n_lo, n_hi)?
            .into_iter()
            .map(|l| (l, weight))
            .collect();
        Ok(SpectralMeasure::Mixed {
            lebesgue_density: 1.0,
            atoms,
        })
    } else {
        Ok(SpectralMeasure::AbsolutelyContinuous(SpectralDensity::new(*b, *dom)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombSample {
    pub w: f64,
    /// `σ_B` mass of the window centred at `ψ/(α−1)`.
    pub window_mass: f64,
    /// `σ_B` mass of the full period containing the window.
    pub period_mass: f64,
}

/// Window masses around the lattice point `ψ/(α−1)` along a sequence `w → 0`.
pub fn comb_limit_diagnostic(
    dom: &ExteriorDomain,
    psi: f64,
    w_sequence: &[f64],
    window_width: f64,
) -> Result<Vec<CombSample>> {
    if w_sequence.iter().any(|&w| !(w > 0.0 && w <= 1.0)) {
        return Err(Error::InvalidArgument("every w must lie in (0, 1]".into()));
    }
    if w_sequence.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::InvalidArgument("w sequence must be strictly decreasing".into()));
    }
    let period = 1.0 / dom.ell();
    if !(window_width > 0.0 && window_width < period) {
        return Err(Error::InvalidArgument(format!(
            "window width must lie in (0, {period})"
        )));
    }
    w_sequence
        .iter()
        .map(|&w| {
            let b = BoundaryMatrix::new(w, 0.0, 0.0, psi)?;
            let sd = SpectralDensity::new(b, *dom)?;
            let centre = b.psi() / dom.ell();
            let half = 0.5 * window_width;
            // split at the peak so the adaptive rule sees it on a panel edge
            let window_mass = sd.mass(centre - half, centre) + sd.mass(centre, centre + half);
            let period_mass = sd.mass(centre - 0.5 * period, centre) + sd.mass(centre, centre + 0.5 * period);
            Ok(CombSample {
                w,
                window_mass,
                period_mass,
            })
        })
        .collect()
}

/// Closed-form window mass `(2/(π(α−1))) arctan(((1+r)/(1−r)) tan(π(α−1)δ/2))`.
pub fn window_mass_closed_form(dom: &ExteriorDomain, w: f64, window_width: f64) -> f64 {
    let r = ((1.0 - w) * (1.0 + w)).sqrt();
    let ell = dom.ell();
    2.0 / (PI * ell) * (((1.0 + r) / (1.0 - r)) * (PI * ell * window_width / 2.0).tan()).atan()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sd(w: f64, psi: f64, alpha: f64) -> SpectralDensity {
        SpectralDensity::new(
            BoundaryMatrix::new(w, 0.0, 0.0, psi).unwrap(),
            ExteriorDomain::new(alpha, alpha + 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn density_values() {
        let s = sd(3f64.sqrt() / 2.0, 0.0, 2.0);
        assert!((s.density(0.0) - 3.0).abs() < 1e-14);
        assert!((s.density(0.5) - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(sd(1.0, 0.3, 2.5).density(0.123), 1.0);
        assert!(SpectralDensity::new(BoundaryMatrix::new(0.0, 0.0, 0.0, 0.0).unwrap(), ExteriorDomain::new(2.0, 3.0).unwrap()).is_err());
    }

    #[test]
    fn period_integrals() {
        assert!((sd(0.3, 0.0, 3.0).period_integral() - 0.5).abs() < 1e-10);
        for &w in &[0.1, 0.5, 1.0] {
            assert!((sd(w, 0.37, 2.0).period_integral() - 1.0).abs() < 1e-10);
        }
        assert!((sd(1.0, 0.0, 4.0).period_integral() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn coefficient_tables() {
        let d = ExteriorDomain::new(2.0, 3.0).unwrap();
        let t = fourier_coeffs(&BoundaryMatrix::identity(), &d, 3).unwrap();
        assert_eq!(t.get(0), Complex64::new(1.0, 0.0));
        assert_eq!(t.get(2), Complex64::new(0.0, 0.0));
        let b = BoundaryMatrix::new(3f64.sqrt() / 2.0, 0.0, 0.0, 0.0).unwrap();
        let k = default_k(&b, 1e-12);
        let t = fourier_coeffs(&b, &d, k).unwrap();
        for j in -5..=5i64 {
            assert!((t.get(j) - 0.5f64.powi(j.abs() as i32)).norm() < 1e-15);
        }
        let total: Complex64 = (-(k as i64)..=k as i64).map(|j| t.get(j)).sum();
        assert!((total - 3.0).norm() < 1e-11);
        assert!(t.tail_bound() <= 1e-12);
    }

    #[test]
    fn conjugate_symmetry_of_coefficients() {
        let d = ExteriorDomain::new(1.5, 3.0).unwrap();
        let b = BoundaryMatrix::new(0.4, 0.0, 0.0, 0.21).unwrap();
        let t = fourier_coeffs(&b, &d, 20).unwrap();
        for j in 0..=20i64 {
            assert!((t.get(-j) - t.get(j).conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn comb_example() {
        let d = ExteriorDomain::new(2.0, 3.0).unwrap();
        let out = comb_limit_diagnostic(&d, 0.0, &[0.5, 0.1, 0.02], 0.1).unwrap();
        assert!(out[0].window_mass < out[1].window_mass && out[1].window_mass < out[2].window_mass);
        for s in &out {
            assert!((s.period_mass - 1.0).abs() < 1e-9);
            assert!((s.window_mass - window_mass_closed_form(&d, s.w, 0.1)).abs() < 1e-9);
        }
        assert!(out[2].window_mass < 1.0);
        let one = comb_limit_diagnostic(&d, 0.0, &[1.0], 0.2).unwrap();
        assert!((one[0].window_mass - 0.2).abs() < 1e-12);
        assert!(comb_limit_diagnostic(&d, 0.0, &[0.1, 0.5], 0.1).is_err());
    }

    #[test]
    fn decoupled_measure_is_mixed() {
        let d = ExteriorDomain::new(3.0, 4.0).unwrap();
        let m = spectral_measure(&BoundaryMatrix::new(0.0, 0.0, 0.0, 0.5).unwrap(), &d, 0, 1).unwrap();
        match m {
            SpectralMeasure::Mixed { atoms, .. } => {
                assert_eq!(atoms.len(), 2);
                assert_eq!(atoms[0].0, 0.25);
                assert_eq!(atoms[0].1, AtomWeight::PerPeriodConcentration(0.5));
            }
            _ => panic!("expected mixed measure"),
        }
    }
}
