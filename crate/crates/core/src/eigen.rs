//! Generalized eigenfunctions `ψ_λ = (a χ₋ + χ₀ + c χ₊) e_λ`, the transfer
//! function `H`, the scattering matrix and the bound states at `w = 0`.

use crate::domain::{BoundaryMatrix, Component, ExteriorDomain};
use crate::error::{Error, Result};
use crate::rkhs::BoundaryTrace;
use crate::{e, Complex64};

/// Coefficients of `ψ_λ` in the gauge `b_λ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCoefficients {
    pub lambda: f64,
    pub a: Complex64,
    pub c: Complex64,
    pub b_norm: Complex64,
    pub h: Complex64,
    /// `m_B(λ) = |a| = |c|`
    pub m: f64,
    /// Max-norm residual of `B ρ₁ = ρ₂` for the closed-form pair.
    pub residual: f64,
}

/// `H(λ) = 1 / (1 − √(1−w²) e(−ψ + (α−1)λ))`.
pub fn transfer_h(b: &BoundaryMatrix, dom: &ExteriorDomain, lambda: f64) -> Result<Complex64> {
    b.require_coupled()?;
    Ok(1.0 / (1.0 - b.r() * e(-b.psi() + dom.ell() * lambda)))
}

/// Closed-form `a(λ)`.
pub fn coeff_a(b: &BoundaryMatrix, dom: &ExteriorDomain, lambda: f64) -> Complex64 {
    e(b.phi() + lambda) * (1.0 - b.r() * e(-b.psi() + dom.ell() * lambda)) / b.w()
}

/// Closed-form `c(λ)`.
pub fn coeff_c(b: &BoundaryMatrix, dom: &ExteriorDomain, lambda: f64) -> Complex64 {
    e(b.phi() - b.theta() - (dom.beta() - dom.alpha()) * lambda)
        * (1.0 - b.r() * e(b.psi() - dom.ell() * lambda))
        / b.w()
}

/// Solve `B ρ₁ = ρ₂` for `(a, c)` with `ρ₁ = (e(λ), c e(βλ))`,
/// `ρ₂ = (a, e(αλ))`, straight from the matrix entries.
pub fn solve_boundary_system(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    lambda: f64,
) -> Result<(Complex64, Complex64)> {
    b.require_coupled()?;
    let m = b.matrix();
    let eb = e(dom.beta() * lambda);
    // rows: −a + B12 eβ c = −B11 e(λ);  0·a + B22 eβ c = e(αλ) − B21 e(λ)
    let (m11, m12) = (Complex64::new(-1.0, 0.0), m[0][1] * eb);
    let (m21, m22) = (Complex64::new(0.0, 0.0), m[1][1] * eb);
    let r1 = -m[0][0] * e(lambda);
    let r2 = e(dom.alpha() * lambda) - m[1][0] * e(lambda);
    let det = m11 * m22 - m12 * m21;
    let a = (r1 * m22 - m12 * r2) / det;
    let c = (m11 * r2 - r1 * m21) / det;
    Ok((a, c))
}

/// Traces of `ψ_λ` for given coefficients.
pub fn traces_for(dom: &ExteriorDomain, lambda: f64, a: Complex64, c: Complex64) -> BoundaryTrace {
    BoundaryTrace {
        rho1: [e(lambda), c * e(dom.beta() * lambda)],
        rho2: [a, e(dom.alpha() * lambda)],
    }
}

/// `max |B ρ₁ − ρ₂|` for `ψ = (a χ₋ + χ₀ + c χ₊) e_λ`.
pub fn boundary_residual(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    lambda: f64,
    a: Complex64,
    c: Complex64,
) -> f64 {
    traces_for(dom, lambda, a, c).membership_residual(b)
}

pub fn eigen_coeffs(b: &BoundaryMatrix, dom: &ExteriorDomain, lambda: f64) -> Result<EigenCoefficients> {
    let h = transfer_h(b, dom, lambda)?;
    let a = coeff_a(b, dom, lambda);
    let c = coeff_c(b, dom, lambda);
    Ok(EigenCoefficients {
        lambda,
        a,
        c,
        b_norm: Complex64::new(1.0, 0.0),
        h,
        m: a.norm(),
        residual: boundary_residual(b, dom, lambda, a, c),
    })
}

/// One-sided boundary values of `ψ_λ`.
pub fn eigen_traces(b: &BoundaryMatrix, dom: &ExteriorDomain, lambda: f64) -> Result<BoundaryTrace> {
    b.require_coupled()?;
    Ok(traces_for(dom, lambda, coeff_a(b, dom, lambda), coeff_c(b, dom, lambda)))
}

pub fn eigenfunction_eval(b: &BoundaryMatrix, dom: &ExteriorDomain, lambda: f64, x: f64) -> Result<Complex64> {
    b.require_coupled()?;
    let comp = dom.component_of(x).ok_or(Error::OutOfDomain { x })?;
    let coeff = match comp {
        Component::Minus => coeff_a(b, dom, lambda),
        Component::Zero => Complex64::new(1.0, 0.0),
        Component::Plus => coeff_c(b, dom, lambda),
    };
    Ok(coeff * e(lambda * x))
}

/// The two eigenfunction families of the decoupled regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoupledMode {
    /// `(−e(θ−ψ+βλ) χ₋ + χ₊) e_λ`, every real `λ`.
    Continuum,
    /// `χ₀ e_λ`, only on the bound-state lattice.
    Bound,
}

pub fn decoupled_coefficients(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    lambda: f64,
    mode: DecoupledMode,
) -> Result<[Complex64; 3]> {
    if b.w() != 0.0 {
        return Err(Error::NotDecoupled { w: b.w() });
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Ok(match mode {
        DecoupledMode::Continuum => [-e(b.theta() - b.psi() + dom.beta() * lambda), zero, one],
        DecoupledMode::Bound => [zero, one, zero],
    })
}

pub fn decoupled_traces(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    lambda: f64,
    mode: DecoupledMode,
) -> Result<BoundaryTrace> {
    let [a, m, c] = decoupled_coefficients(b, dom, lambda, mode)?;
    Ok(BoundaryTrace {
        rho1: [m * e(lambda), c * e(dom.beta() * lambda)],
        rho2: [a, m * e(dom.alpha() * lambda)],
    })
}

/// `Ŝ(λ) = a(λ)⁻¹ c(λ)`.
pub fn scattering_matrix(b: &BoundaryMatrix, dom: &ExteriorDomain, lambda: f64) -> Result<Complex64> {
    b.require_coupled()?;
    Ok(coeff_c(b, dom, lambda) / coeff_a(b, dom, lambda))
}

/// The scattering matrix by three routes: `a⁻¹c`, the closed quotient, and
/// the split into resonance series plus direct reflection.
pub fn scattering_routes(b: &BoundaryMatrix, dom: &ExteriorDomain, lambda: f64) -> Result<[Complex64; 3]> {
    let via_coeffs = scattering_matrix(b, dom, lambda)?;
    let (r, ell) = (b.r(), dom.ell());
    let delay = dom.beta() - dom.alpha() + 1.0;
    let prefactor = e(-b.theta() - delay * lambda);
    let quotient = prefactor * (1.0 - r * e(b.psi() - ell * lambda)) / (1.0 - r * e(-b.psi() + ell * lambda));
    let h = transfer_h(b, dom, lambda)?;
    let split = prefactor * b.w() * b.w() * h - e(b.psi() - b.theta()) * r * e(-dom.beta() * lambda);
    Ok([via_coeffs, quotient, split])
}

/// `{ (ψ + n)/(α−1) : n_lo ≤ n ≤ n_hi }`.
pub fn bound_state_spectrum(b: &BoundaryMatrix, dom: &ExteriorDomain, n_lo: i64, n_hi: i64) -> Result<Vec<f64>> {
    if b.w() != 0.0 {
        return Err(Error::NotDecoupled { w: b.w() });
    }
    Ok((n_lo..=n_hi).map(|n| (b.psi() + n as f64) / dom.ell()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex59() -> (BoundaryMatrix, ExteriorDomain) {
        (
            BoundaryMatrix::new(3f64.sqrt() / 2.0, 0.0, 0.0, 0.0).unwrap(),
            ExteriorDomain::new(2.0, 3.0).unwrap(),
        )
    }

    #[test]
    fn transfer_values() {
        let (b, d) = ex59();
        assert!((transfer_h(&b, &d, 0.0).unwrap() - 2.0).norm() < 1e-15);
        let id = BoundaryMatrix::identity();
        assert!((transfer_h(&id, &d, 0.77).unwrap() - 1.0).norm() == 0.0);
        for k in 0..50 {
            let l = -3.0 + 0.13 * k as f64;
            let h0 = transfer_h(&b, &d, l).unwrap();
            let h1 = transfer_h(&b, &d, l + 1.0 / d.ell()).unwrap();
            assert!((h0 - h1).norm() < 1e-13);
            let inv = 1.0 / h0.norm();
            assert!(inv >= 1.0 - b.r() - 1e-15 && inv <= 1.0 + b.r() + 1e-15);
        }
        let z = BoundaryMatrix::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(transfer_h(&z, &d, 0.0), Err(Error::DegenerateRegime));
    }

    #[test]
    fn coefficients_at_zero() {
        let (b, d) = ex59();
        let ec = eigen_coeffs(&b, &d, 0.0).unwrap();
        assert!((ec.a - 1.0 / 3f64.sqrt()).norm() < 1e-15);
        let (a, c) = solve_boundary_system(&b, &d, 0.0).unwrap();
        assert!((a - ec.a).norm() < 1e-15 && (c - ec.c).norm() < 1e-15);
    }

    #[test]
    fn transparent_coefficients_are_unimodular() {
        let d = ExteriorDomain::new(1.6, 2.5).unwrap();
        let b = BoundaryMatrix::new(1.0, 0.3, 0.45, 0.2).unwrap();
        for k in 0..40 {
            let l = -2.0 + 0.1 * k as f64;
            let ec = eigen_coeffs(&b, &d, l).unwrap();
            assert!((ec.a - e(b.phi() + l)).norm() < 1e-14);
            assert!((ec.c - e(b.phi() - b.theta() - (d.beta() - d.alpha()) * l)).norm() < 1e-14);
            assert!((ec.m - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn residual_of_example_eigenfunction() {
        let (b, d) = ex59();
        let t = eigen_traces(&b, &d, 0.37).unwrap();
        assert!(t.membership_residual(&b) <= 1e-12);
        // ψ_λ(1₊) and ψ_λ(0₋) agree with pointwise evaluation near the endpoints
        let v = eigenfunction_eval(&b, &d, 0.37, 1.0 + 1e-13).unwrap();
        assert!((v - t.rho1[0]).norm() < 1e-11);
        assert!(matches!(eigenfunction_eval(&b, &d, 0.37, 0.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn modulus_on_middle_is_one() {
        let (b, d) = ex59();
        assert!((eigenfunction_eval(&b, &d, 1.3, 1.5).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scattering_values() {
        let (b, d) = ex59();
        assert!((scattering_matrix(&b, &d, 0.0).unwrap() - 1.0).norm() < 1e-15);
        let id = BoundaryMatrix::new(1.0, 0.2, 0.0, 0.0).unwrap();
        for k in 0..20 {
            let l = 0.17 * k as f64 - 1.0;
            let s = scattering_matrix(&id, &d, l).unwrap();
            assert!((s - e(-0.2 - 2.0 * l)).norm() < 1e-14);
        }
    }

    #[test]
    fn bound_states() {
        let d = ExteriorDomain::new(2.0, 3.0).unwrap();
        let b = BoundaryMatrix::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(bound_state_spectrum(&b, &d, -2, 2).unwrap(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        let b = BoundaryMatrix::new(0.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(bound_state_spectrum(&b, &d, 0, 1).unwrap(), vec![0.5, 1.5]);
        for l in bound_state_spectrum(&b, &d, -5, 5).unwrap() {
            let t = decoupled_traces(&b, &d, l, DecoupledMode::Bound).unwrap();
            assert!(t.membership_residual(&b) < 1e-13);
        }
        let t = decoupled_traces(&b, &d, 0.1, DecoupledMode::Bound).unwrap();
        assert!(t.membership_residual(&b) > 0.1);
        let t = decoupled_traces(&b, &d, 0.1, DecoupledMode::Continuum).unwrap();
        assert!(t.membership_residual(&b) < 1e-14);
        let g = BoundaryMatrix::new(0.5, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(bound_state_spectrum(&g, &d, 0, 1), Err(Error::NotDecoupled { .. })));
    }
}
