//! Pointwise evaluation of `U_B(t) f` for `t ≥ 0` by following
//! characteristics backwards.
//!
//! Every signal moves right at unit speed. Whatever arrives at `0⁻` and `α⁻`
//! leaves at `1⁺` and `β⁺` according to `(f(1), f(β)) = B* (f(0), f(α))`.
//! This route uses nothing but the boundary condition, so it serves as an
//! independent check on the multiplier engine.

use crate::domain::{BoundaryMatrix, Component, ExteriorDomain};
use crate::error::{Error, Result};
use crate::packet::StepPacket;
use crate::{e, Complex64};

pub struct Tracer<'a> {
    b: &'a BoundaryMatrix,
    dom: &'a ExteriorDomain,
    f: &'a StepPacket,
}

impl<'a> Tracer<'a> {
    pub fn new(b: &'a BoundaryMatrix, dom: &'a ExteriorDomain, f: &'a StepPacket) -> Self {
        Self { b, dom, f }
    }

    /// Value leaving `1⁺` at time `tau ≥ 0`.
    fn out_one(&self, tau: f64) -> Complex64 {
        let (w, r) = (self.b.w(), self.b.r());
        let direct = w * e(-self.b.phi());
        let bounce = r * e(-self.b.psi());
        let ell = self.dom.ell();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut fac = Complex64::new(1.0, 0.0);
        let mut tc = tau;
        loop {
            acc += fac * direct * self.f.eval(-tc);
            if tc < ell {
                acc += fac * bounce * self.f.eval(self.dom.alpha() - tc);
                break;
            }
            fac *= bounce;
            if fac == Complex64::new(0.0, 0.0) {
                break;
            }
            tc -= ell;
        }
        acc
    }

    /// Value arriving at `α⁻` at time `tau ≥ 0`.
    fn in_alpha(&self, tau: f64) -> Complex64 {
        if tau < self.dom.ell() {
            self.f.eval(self.dom.alpha() - tau)
        } else {
            self.out_one(tau - self.dom.ell())
        }
    }

    /// Value leaving `β⁺` at time `tau ≥ 0`.
    fn out_beta(&self, tau: f64) -> Complex64 {
        let (w, r) = (self.b.w(), self.b.r());
        let (th, ph, ps) = (self.b.theta(), self.b.phi(), self.b.psi());
        -r * e(ps - th) * self.f.eval(-tau) + w * e(ph - th) * self.in_alpha(tau)
    }

    /// `(U_B(t) f)(x)` for `x ∈ Ω`, `t ≥ 0`.
    pub fn value(&self, x: f64, t: f64) -> Result<Complex64> {
        if t < 0.0 {
            return Err(Error::NegativeTime { t });
        }
        let comp = self.dom.component_of(x).ok_or(Error::OutOfDomain { x })?;
        Ok(match comp {
            Component::Minus => self.f.eval(x - t),
            Component::Zero => {
                if x - t >= 1.0 {
                    self.f.eval(x - t)
                } else {
                    self.out_one(t - (x - 1.0))
                }
            }
            Component::Plus => {
                if x - t >= self.dom.beta() {
                    self.f.eval(x - t)
                } else {
                    self.out_beta(t - (x - self.dom.beta()))
                }
            }
        })
    }
}

/// `‖χ_{[lo,hi]} U_B(t) f‖²` by adaptive Simpson on the traced values.
pub fn traced_norm2(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, t: f64, lo: f64, hi: f64) -> Result<f64> {
    let tr = Tracer::new(b, dom, f);
    tr.value(0.5 * (lo + hi), t)?;
    Ok(crate::quadrature::adaptive_simpson(
        |x| tr.value(x, t).map(|v| v.norm_sqr()).unwrap_or(0.0),
        lo,
        hi,
        1e-13,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transparent_splice() {
        let b = BoundaryMatrix::new(1.0, 0.3, 0.2, 0.0).unwrap();
        let d = ExteriorDomain::new(2.0, 3.5).unwrap();
        let f = StepPacket::unit_box(-0.5, 0.0);
        let tr = Tracer::new(&b, &d, &f);
        // crosses into I₀ with e(−φ)
        assert!((tr.value(1.2, 0.5).unwrap() - e(-0.2)).norm() < 1e-15);
        // then into I₊ with the further factor e(φ − θ)
        assert!((tr.value(3.7, 1.45).unwrap() - e(-0.3)).norm() < 1e-15);
    }

    #[test]
    fn example_bounces() {
        let b = BoundaryMatrix::new(3f64.sqrt() / 2.0, 0.0, 0.0, 0.0).unwrap();
        let d = ExteriorDomain::new(2.0, 3.0).unwrap();
        let f = StepPacket::unit_box(-0.5, 0.0);
        let tr = Tracer::new(&b, &d, &f);
        assert!((tr.value(1.25, 0.5).unwrap() - 3f64.sqrt() / 2.0).norm() < 1e-15);
        assert!((tr.value(1.25, 1.5).unwrap() - 3f64.sqrt() / 4.0).norm() < 1e-15);
        // first arrival at β: direct reflection −1/2 at t ≤ 0.5 after β, then 3/4
        assert!((tr.value(3.25, 0.5).unwrap() + 0.5).norm() < 1e-15);
        assert!((tr.value(3.25, 1.5).unwrap() - 0.75).norm() < 1e-15);
        assert!(tr.value(0.5, 1.0).is_err());
    }
}
