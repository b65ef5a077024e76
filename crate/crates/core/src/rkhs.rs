//! First-order Sobolev kernels, boundary traces and the boundary form.
//!
//! The inner product is `⟨f, g⟩_{H₁} = ∫ (f ḡ + f′ ḡ′)` over the relevant
//! component. All kernels here are real.

use crate::domain::{BoundaryMatrix, ExteriorDomain};
use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::Complex64;

/// One-sided boundary values `ρ₁ = (f(1), f(β))`, `ρ₂ = (f(0), f(α))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryTrace {
    pub rho1: [Complex64; 2],
    pub rho2: [Complex64; 2],
}

impl BoundaryTrace {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { rho1: [z, z], rho2: [z, z] }
    }

    /// `max |B ρ₁ − ρ₂|`.
    pub fn membership_residual(&self, b: &BoundaryMatrix) -> f64 {
        let lhs = b.apply(self.rho1);
        (lhs[0] - self.rho2[0]).norm().max((lhs[1] - self.rho2[1]).norm())
    }
}

/// `f(1)ḡ(1) − f(0)ḡ(0) + f(β)ḡ(β) − f(α)ḡ(α)`.
pub fn boundary_form(f: &BoundaryTrace, g: &BoundaryTrace) -> Complex64 {
    f.rho1[0] * g.rho1[0].conj() - f.rho2[0] * g.rho2[0].conj() + f.rho1[1] * g.rho1[1].conj()
        - f.rho2[1] * g.rho2[1].conj()
}

pub fn domain_membership_residual(b: &BoundaryMatrix, f: &BoundaryTrace) -> f64 {
    f.membership_residual(b)
}

/// A bounded component `J = (a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidArgument(format!("empty interval ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    fn contains_closed(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Kernel reproducing `f(a₊)` (Left) or `f(b₋)` (Right); zero off `J`.
pub fn kernel_endpoint(j: Interval, which: Side, x: f64) -> f64 {
    if !j.contains_closed(x) {
        return 0.0;
    }
    let s = (j.b - j.a).sinh();
    match which {
        Side::Left => (j.b - x).cosh() / s,
        Side::Right => (x - j.a).cosh() / s,
    }
}

pub fn kernel_endpoint_derivative(j: Interval, which: Side, x: f64) -> f64 {
    if !j.contains_closed(x) {
        return 0.0;
    }
    let s = (j.b - j.a).sinh();
    match which {
        Side::Left => -(j.b - x).sinh() / s,
        Side::Right => (x - j.a).sinh() / s,
    }
}

/// Kernel reproducing `f(x)` for interior `x`:
/// `cosh(min(x,y) − a) cosh(b − max(x,y)) / sinh(b − a)`.
pub fn kernel_interior(j: Interval, x: f64, y: f64) -> f64 {
    if !j.contains_closed(y) {
        return 0.0;
    }
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    (lo - j.a).cosh() * (j.b - hi).cosh() / (j.b - j.a).sinh()
}

/// `∂_y` of [`kernel_interior`]; one-sided at `y = x` (right derivative).
pub fn kernel_interior_derivative(j: Interval, x: f64, y: f64) -> f64 {
    if !j.contains_closed(y) {
        return 0.0;
    }
    let s = (j.b - j.a).sinh();
    if y < x {
        (y - j.a).sinh() * (j.b - x).cosh() / s
    } else {
        -(x - j.a).cosh() * (j.b - y).sinh() / s
    }
}

/// Blend of the two endpoint kernels with weights `sinh(b−x)`, `sinh(x−a)`:
/// `[sinh(b−x)cosh(b−y) + sinh(x−a)cosh(y−a)] / sinh²(b−a)`.
///
/// It agrees with the endpoint kernels at `x = a, b`. Its `H₁` pairing with
/// `f` is `[sinh(b−x) f(a) + sinh(x−a) f(b)] / sinh(b−a)`, which equals
/// `f(x)` only when `f″ = f`.
pub fn interpolating_kernel(j: Interval, x: f64, y: f64) -> f64 {
    if !j.contains_closed(y) {
        return 0.0;
    }
    let s = (j.b - j.a).sinh();
    ((j.b - x).sinh() * (j.b - y).cosh() + (x - j.a).sinh() * (y - j.a).cosh()) / (s * s)
}

pub fn interpolating_kernel_derivative(j: Interval, x: f64, y: f64) -> f64 {
    if !j.contains_closed(y) {
        return 0.0;
    }
    let s = (j.b - j.a).sinh();
    (-(j.b - x).sinh() * (j.b - y).sinh() + (x - j.a).sinh() * (y - j.a).sinh()) / (s * s)
}

/// Gram matrix `[k(x_i, x_j)]`.
pub fn gram_matrix(j: Interval, points: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|&x| points.iter().map(|&y| kernel_interior(j, x, y)).collect())
        .collect()
}

/// Finite sum `Σ A_k e^{κ_k x}` with closed-form derivative.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpSum {
    pub terms: Vec<(Complex64, Complex64)>,
}

impl ExpSum {
    pub fn new(terms: Vec<(Complex64, Complex64)>) -> Self {
        Self { terms }
    }

    pub fn value(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|(a, k)| a * (k * x).exp()).sum()
    }

    pub fn derivative(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|(a, k)| a * k * (k * x).exp()).sum()
    }
}

/// `∫_lo^hi (k f + k′ f′)` for a real kernel given with its derivative.
/// Interior breakpoints of the kernel (a kink) can be passed in `kinks`.
pub fn h1_pairing<K, D>(k: K, dk: D, f: &ExpSum, lo: f64, hi: f64, kinks: &[f64], tol: f64) -> Complex64
where
    K: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut pts = vec![lo];
    pts.extend(kinks.iter().copied().filter(|&p| lo < p && p < hi));
    pts.push(hi);
    pts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            // evaluate strictly inside each piece so one-sided derivatives are used
            adaptive_simpson(
                |y: f64| {
                    let y = y.clamp(a + 1e-15 * (b - a), b - 1e-15 * (b - a));
                    f.value(y) * k(y) + f.derivative(y) * dk(y)
                },
                a,
                b,
                tol,
            )
        })
        .sum()
}

/// A test function on `Ω`, given per component as an exponential sum.
/// On the half-lines every rate must make the function decay at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseExp {
    pub minus: ExpSum,
    pub zero: ExpSum,
    pub plus: ExpSum,
}

/// Length of the truncated half-line used in quadrature.
const HALF_LINE_CUT: f64 = 40.0;

impl PiecewiseExp {
    pub fn validate(&self) -> Result<()> {
        if self.minus.terms.iter().any(|(_, k)| k.re <= 0.0) || self.plus.terms.iter().any(|(_, k)| k.re >= 0.0) {
            return Err(Error::InvalidArgument("half-line terms must decay at infinity".into()));
        }
        Ok(())
    }

    /// Exact traces from the closed forms.
    pub fn traces(&self, dom: &ExteriorDomain) -> BoundaryTrace {
        BoundaryTrace {
            rho1: [self.zero.value(1.0), self.plus.value(dom.beta())],
            rho2: [self.minus.value(0.0), self.zero.value(dom.alpha())],
        }
    }

    /// Traces obtained as `H₁` pairings with the four endpoint kernels.
    pub fn kernel_traces(&self, dom: &ExteriorDomain, tol: f64) -> BoundaryTrace {
        let j0 = Interval { a: 1.0, b: dom.alpha() };
        let beta = dom.beta();
        let at_zero = h1_pairing(|x| x.exp(), |x| x.exp(), &self.minus, -HALF_LINE_CUT, 0.0, &[], tol);
        let at_one = h1_pairing(
            |x| kernel_endpoint(j0, Side::Left, x),
            |x| kernel_endpoint_derivative(j0, Side::Left, x),
            &self.zero,
            j0.a,
            j0.b,
            &[],
            tol,
        );
        let at_alpha = h1_pairing(
            |x| kernel_endpoint(j0, Side::Right, x),
            |x| kernel_endpoint_derivative(j0, Side::Right, x),
            &self.zero,
            j0.a,
            j0.b,
            &[],
            tol,
        );
        let at_beta = h1_pairing(
            |x| (beta - x).exp(),
            |x| -(beta - x).exp(),
            &self.plus,
            beta,
            beta + HALF_LINE_CUT,
            &[],
            tol,
        );
        BoundaryTrace {
            rho1: [at_one, at_beta],
            rho2: [at_zero, at_alpha],
        }
    }
}
