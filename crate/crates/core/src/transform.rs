//! The spectral transform `(V_B f)(λ) = ⟨ψ_λ, f⟩` and its adjoint.
//!
//! For a step packet `V_B f = ā f̂₋ + f̂₀ + c̄ f̂₊` in closed form. Integrals
//! against `σ_B` are done with [`LineQuadrature`].

use crate::domain::{BoundaryMatrix, Component, ExteriorDomain};
use crate::eigen::{coeff_a, coeff_c};
use crate::error::{Error, Result};
use crate::packet::{exp_integral, StepPacket};
use crate::quadrature::{LineIntegral, LineQuadrature};
use crate::spectral::SpectralDensity;
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformSample {
    pub lambda_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub provenance: Provenance,
}

impl TransformSample {
    pub fn new(lambda_grid: Vec<f64>, values: Vec<Complex64>, provenance: Provenance) -> Result<Self> {
        if lambda_grid.len() != values.len() {
            return Err(Error::InvalidArgument("grid and values differ in length".into()));
        }
        check_grid(&lambda_grid)?;
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidArgument("transform values must be finite".into()));
        }
        Ok(Self {
            lambda_grid,
            values,
            provenance,
        })
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|p| !(p[1] > p[0])) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("λ grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// `λ ↦ (V_B f)(λ)` for a fixed packet.
pub struct Transform {
    b: BoundaryMatrix,
    dom: ExteriorDomain,
    parts: [StepPacket; 3],
}

impl Transform {
    pub fn new(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket) -> Result<Self> {
        b.require_coupled()?;
        Ok(Self {
            b: *b,
            dom: *dom,
            parts: Component::ALL.map(|c| f.restrict_component(dom, c)),
        })
    }

    pub fn eval(&self, lambda: f64) -> Complex64 {
        let [m, z, p] = &self.parts;
        let mut v = z.fourier(lambda);
        if !m.is_zero() {
            v += coeff_a(&self.b, &self.dom, lambda).conj() * m.fourier(lambda);
        }
        if !p.is_zero() {
            v += coeff_c(&self.b, &self.dom, lambda).conj() * p.fourier(lambda);
        }
        v
    }
}

/// `V_B f` on a grid, in closed form.
pub fn forward_transform(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, lambda_grid: &[f64]) -> Result<TransformSample> {
    check_grid(lambda_grid)?;
    let tr = Transform::new(b, dom, f)?;
    TransformSample::new(
        lambda_grid.to_vec(),
        lambda_grid.iter().map(|&l| tr.eval(l)).collect(),
        Provenance::Analytic,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointResult {
    pub packet: StepPacket,
    /// Richardson estimate of the discretization error plus the tail
    /// estimate, as a bound on the cell averages.
    pub error_estimate: f64,
}

/// `V_B* g`, projected onto the cells `[cells[k], cells[k+1])` by cell
/// averages. Each cell must lie inside one component of `Ω`.
///
/// `g` is integrated with the trapezoid rule on its own grid; the Richardson
/// estimate compares against every second node. Outside the grid `g` is
/// assumed to decay like `1/λ`, which holds for transforms of step packets.
pub fn adjoint_transform(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    g: &TransformSample,
    cells: &[f64],
    tol: f64,
) -> Result<AdjointResult> {
    let sd = SpectralDensity::new(*b, *dom)?;
    check_grid(cells)?;
    if cells.len() < 2 {
        return Err(Error::InvalidArgument("need at least one output cell".into()));
    }
    let n = g.lambda_grid.len();
    if g.values.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
        return Ok(AdjointResult {
            packet: StepPacket::zero(),
            error_estimate: 0.0,
        });
    }
    if n < 5 {
        return Err(Error::GridTooCoarse {
            estimate: f64::INFINITY,
            tol,
        });
    }
    let lam = &g.lambda_grid;
    let weights: Vec<Complex64> = lam.iter().zip(&g.values).map(|(&l, v)| v * sd.density(l)).collect();
    // envelope |g(λ)| ≤ G/|λ| fitted on the outer tenth of the grid
    let big = lam[0].abs().min(lam[n - 1].abs()).max(1.0);
    let outer = (n / 10).max(1);
    let envelope = lam[..outer]
        .iter()
        .zip(&g.values[..outer])
        .chain(lam[n - outer..].iter().zip(&g.values[n - outer..]))
        .map(|(l, v)| l.abs() * v.norm())
        .fold(0.0, f64::max);
    let mut values = Vec::with_capacity(cells.len() - 1);
    let mut worst: f64 = 0.0;
    for w in cells.windows(2) {
        let (p, q) = (w[0], w[1]);
        let comp = dom
            .component_of(0.5 * (p + q))
            .filter(|_| dom.component_of(p + 1e-12 * (q - p)) == dom.component_of(q - 1e-12 * (q - p)))
            .ok_or(Error::OutOfDomain { x: 0.5 * (p + q) })?;
        let width = q - p;
        let integrand: Vec<Complex64> = lam
            .iter()
            .zip(&weights)
            .map(|(&l, wv)| {
                let coef = match comp {
                    Component::Minus => coeff_a(b, dom, l),
                    Component::Zero => Complex64::new(1.0, 0.0),
                    Component::Plus => coeff_c(b, dom, l),
                };
                wv * coef * exp_integral(l, p, q) / width
            })
            .collect();
        let fine = trapezoid(lam, &integrand, 1);
        let coarse = trapezoid(lam, &integrand, 2);
        let richardson = (fine - coarse).norm() / 3.0;
        // beyond the grid |cell transform| ≤ |sin|/(π|λ| width), σ_B has mean
        // density one per period and the product of two sines averages ≤ 1/2
        let tail = envelope / (std::f64::consts::PI * width * big);
        worst = worst.max((richardson + tail) * width.sqrt());
        values.push(fine);
    }
    let est = worst * ((cells.len() - 1) as f64).sqrt();
    if est > tol {
        return Err(Error::GridTooCoarse { estimate: est, tol });
    }
    Ok(AdjointResult {
        packet: StepPacket::new(cells.to_vec(), values)?,
        error_estimate: est,
    })
}

/// Trapezoid rule on the nodes `0, stride, 2·stride, …` (the last node is
/// always included).
fn trapezoid(x: &[f64], y: &[Complex64], stride: usize) -> Complex64 {
    let mut idx: Vec<usize> = (0..x.len()).step_by(stride).collect();
    if *idx.last().unwrap() != x.len() - 1 {
        idx.push(x.len() - 1);
    }
    idx.windows(2)
        .map(|w| (y[w[0]] + y[w[1]]) * (0.5 * (x[w[1]] - x[w[0]])))
        .sum()
}

/// `⟨V_B f, V_B g⟩_{L²(σ_B)}` by whole-line quadrature.
pub fn cross_term(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    f: &StepPacket,
    g: &StepPacket,
    q: &LineQuadrature,
) -> Result<LineIntegral> {
    let sd = SpectralDensity::new(*b, *dom)?;
    let (tf, tg) = (Transform::new(b, dom, f)?, Transform::new(b, dom, g)?);
    let (offset, period) = sd.peak_lattice();
    let q = q.aligned(offset, period);
    Ok(q.integrate(|l| tf.eval(l).conj() * tg.eval(l) * sd.density(l)))
}

/// `∫ |V_B P_c f|² dσ_B`, which should equal `‖P_c f‖²`.
pub fn component_isometry(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    f: &StepPacket,
    c: Component,
    q: &LineQuadrature,
) -> Result<LineIntegral> {
    let fc = f.restrict_component(dom, c);
    cross_term(b, dom, &fc, &fc, q)
}

/// Uniform grid with `n` intervals on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ex59() -> (BoundaryMatrix, ExteriorDomain) {
        (
            BoundaryMatrix::new(3f64.sqrt() / 2.0, 0.0, 0.0, 0.0).unwrap(),
            ExteriorDomain::new(2.0, 3.0).unwrap(),
        )
    }

    #[test]
    fn interior_packets_transform_to_fourier() {
        let (b, d) = ex59();
        let f = StepPacket::unit_box(1.2, 1.7);
        let grid = uniform_grid(-3.0, 3.0, 60);
        let s = forward_transform(&b, &d, &f, &grid).unwrap();
        assert_eq!(s.provenance, Provenance::Analytic);
        for (l, v) in grid.iter().zip(&s.values) {
            assert!((v - f.fourier(*l)).norm() < 1e-15);
        }
        // centred unit box: sin(πλ)/(πλ)
        let c = StepPacket::unit_box(-0.5, 0.5);
        for l in [0.3, 1.7, -2.2] {
            assert!((c.fourier(l).re - (PI * l).sin() / (PI * l)).abs() < 1e-15);
        }
        assert!(forward_transform(&b, &d, &f, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn cross_terms_and_isometries() {
        let (b, d) = ex59();
        let q = LineQuadrature::default();
        let fm = StepPacket::unit_box(-0.5, 0.0);
        let f0 = StepPacket::unit_box(1.25, 1.75);
        let fp = StepPacket::unit_box(3.2, 3.9);
        assert!(cross_term(&b, &d, &fm, &f0, &q).unwrap().value.norm() < 1e-8);
        assert!(cross_term(&b, &d, &fm, &fp, &q).unwrap().value.norm() < 1e-8);
        assert!(cross_term(&b, &d, &f0, &fp, &q).unwrap().value.norm() < 1e-8);
        let all = StepPacket::sum(&[fm.clone(), f0.clone(), fp.clone()]).unwrap();
        for c in Component::ALL {
            let v = component_isometry(&b, &d, &all, c, &q).unwrap().value;
            let expect = all.restrict_component(&d, c).norm2();
            assert!((v.re - expect).abs() < 1e-6 && v.im.abs() < 1e-8, "{c:?}");
        }
    }

    #[test]
    fn adjoint_round_trip() {
        let (b, d) = ex59();
        let f = StepPacket::unit_box(1.25, 1.75);
        let grid = uniform_grid(-5000.0, 5000.0, 500_000);
        let s = forward_transform(&b, &d, &f, &grid).unwrap();
        let cells = [1.0, 1.25, 1.75, 2.0];
        let back = adjoint_transform(&b, &d, &s, &cells, 1e-4).unwrap();
        assert!(back.packet.l2_distance(&f) <= 1e-4, "{}", back.packet.l2_distance(&f));
        assert!(back.error_estimate <= 1e-4);
        let zero = TransformSample::new(grid.clone(), vec![Complex64::new(0.0, 0.0); grid.len()], Provenance::Analytic).unwrap();
        assert!(adjoint_transform(&b, &d, &zero, &cells, 1e-4).unwrap().packet.is_zero());
        let coarse = forward_transform(&b, &d, &f, &uniform_grid(-20.0, 20.0, 40)).unwrap();
        assert!(matches!(adjoint_transform(&b, &d, &coarse, &cells, 1e-4), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn adjoint_round_trip_transparent() {
        let b = BoundaryMatrix::identity();
        let d = ExteriorDomain::new(2.0, 3.0).unwrap();
        let f = StepPacket::unit_box(-0.75, -0.25);
        let grid = uniform_grid(-5000.0, 5000.0, 500_000);
        let s = forward_transform(&b, &d, &f, &grid).unwrap();
        let back = adjoint_transform(&b, &d, &s, &[-1.0, -0.75, -0.25, 0.0], 1e-4).unwrap();
        assert!(back.packet.l2_distance(&f) <= 1e-4);
    }
}
