//! Spectral theory and scattering for the momentum operator `(1/2πi) d/dx`
//! on the exterior domain `Ω = (−∞,0) ∪ (1,α) ∪ (β,∞)`.
//!
//! The selfadjoint extensions are labelled by a unitary boundary matrix
//! `B(w, θ, φ, ψ)`. Time evolution, the scattering operator and the
//! compressed semigroup all act on piecewise-constant wave packets as
//! weighted sums of lattice translates, so they are computed exactly.
//!
//! Phases are measured in cycles: `e(x) = exp(2πix)`.

pub mod characteristics;
pub mod degenerate;
pub mod domain;
pub mod eigen;
pub mod error;
pub mod evolution;
pub mod multiplier;
pub mod packet;
pub mod quadrature;
pub mod rkhs;
pub mod semigroup;
pub mod spectral;
pub mod transform;

pub use num_complex::Complex64;

pub use domain::{BoundaryMatrix, Component, ExteriorDomain, PointClass, Regime};
pub use error::{Error, Result};
pub use multiplier::{MultiplierKind, MultiplierSeries};
pub use packet::StepPacket;

/// `e(x) = exp(2πix)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    // x - round(x) is exact, so large arguments keep full phase accuracy.
    let (s, c) = (std::f64::consts::TAU * (x - x.round())).sin_cos();
    Complex64::new(c, s)
}

/// Reduce a phase in cycles to `[0, 1)`.
#[inline]
pub fn normalize_phase(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}
