//! Geometry of the exterior domain and the boundary-matrix family.

use crate::error::{Error, Result};
use crate::{e, normalize_phase, Complex64};

/// One of the three open components of `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    /// `I₋ = (−∞, 0)`
    Minus,
    /// `I₀ = (1, α)`
    Zero,
    /// `I₊ = (β, ∞)`
    Plus,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Minus, Component::Zero, Component::Plus];

    pub fn symbol(self) -> &'static str {
        match self {
            Component::Minus => "-",
            Component::Zero => "0",
            Component::Plus => "+",
        }
    }
}

/// Classification of a real point relative to the two barriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    IMinus,
    Barrier1,
    IZero,
    Barrier2,
    IPlus,
    /// One of the four endpoints `0, 1, α, β`.
    Boundary,
}

/// `Ω = (−∞,0) ∪ (1,α) ∪ (β,∞)` with barriers `[0,1]` and `[α,β]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorDomain {
    alpha: f64,
    beta: f64,
}

impl ExteriorDomain {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && 1.0 < alpha && alpha < beta) {
            return Err(Error::OrderingViolation { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    /// Normal form of an arbitrary pair of disjoint intervals `[p,q]`, `[r,s]`
    /// with `q < r`: the affine map `x ↦ (x − p)/(q − p)` sends the first
    /// interval to `[0,1]`. Returns the domain and the map `(offset, scale)`
    /// with `x_normal = (x − offset)/scale`.
    pub fn from_intervals(first: (f64, f64), second: (f64, f64)) -> Result<(Self, (f64, f64))> {
        let (p, q) = first;
        let (r, s) = second;
        if !(p < q && q < r && r < s) {
            return Err(Error::InvalidArgument(format!(
                "intervals [{p}, {q}] and [{r}, {s}] must be ordered and disjoint"
            )));
        }
        let scale = q - p;
        let dom = Self::new((r - p) / scale, (s - p) / scale)?;
        Ok((dom, (p, scale)))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Length of `I₀`, also the lattice step of every multiplier series.
    pub fn ell(&self) -> f64 {
        self.alpha - 1.0
    }

    /// Open interval of a component; infinite ends are `±∞`.
    pub fn interval(&self, c: Component) -> (f64, f64) {
        match c {
            Component::Minus => (f64::NEG_INFINITY, 0.0),
            Component::Zero => (1.0, self.alpha),
            Component::Plus => (self.beta, f64::INFINITY),
        }
    }

    pub fn classify_point(&self, x: f64) -> PointClass {
        if x == 0.0 || x == 1.0 || x == self.alpha || x == self.beta {
            PointClass::Boundary
        } else if x < 0.0 {
            PointClass::IMinus
        } else if x < 1.0 {
            PointClass::Barrier1
        } else if x < self.alpha {
            PointClass::IZero
        } else if x < self.beta {
            PointClass::Barrier2
        } else {
            PointClass::IPlus
        }
    }

    /// Component containing `x`, or `None` for barriers and endpoints.
    pub fn component_of(&self, x: f64) -> Option<Component> {
        match self.classify_point(x) {
            PointClass::IMinus => Some(Component::Minus),
            PointClass::IZero => Some(Component::Zero),
            PointClass::IPlus => Some(Component::Plus),
            _ => None,
        }
    }
}

/// Exact dispatch on `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `w = 0`: the middle interval decouples and carries bound states.
    Decoupled,
    Generic,
    /// `w = 1`: no reflection at either barrier.
    Transparent,
}

pub type Mat2 = [[Complex64; 2]; 2];

/// The unitary matrix
/// `[[w e(φ), −√(1−w²) e(θ−ψ)], [√(1−w²) e(ψ), w e(θ−φ)]]`.
///
/// It links the traces `ρ₁ = (f(1), f(β))` and `ρ₂ = (f(0), f(α))` through
/// `B ρ₁ = ρ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryMatrix {
    w: f64,
    theta: f64,
    phi: f64,
    psi: f64,
}

impl BoundaryMatrix {
    pub fn new(w: f64, theta: f64, phi: f64, psi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::RangeViolation {
                name: "w",
                value: w,
                range: "[0, 1]",
            });
        }
        for (name, v) in [("theta", theta), ("phi", phi), ("psi", psi)] {
            if !v.is_finite() {
                return Err(Error::RangeViolation {
                    name,
                    value: v,
                    range: "finite reals",
                });
            }
        }
        Ok(Self {
            w,
            theta: normalize_phase(theta),
            phi: normalize_phase(phi),
            psi: normalize_phase(psi),
        })
    }

    pub fn identity() -> Self {
        Self {
            w: 1.0,
            theta: 0.0,
            phi: 0.0,
            psi: 0.0,
        }
    }

    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn phi(&self) -> f64 {
        self.phi
    }
    pub fn psi(&self) -> f64 {
        self.psi
    }

    /// `√(1 − w²)`, the reflection amplitude at each barrier.
    pub fn r(&self) -> f64 {
        ((1.0 - self.w) * (1.0 + self.w)).sqrt()
    }

    pub fn regime(&self) -> Regime {
        if self.w == 0.0 {
            Regime::Decoupled
        } else if self.w == 1.0 {
            Regime::Transparent
        } else {
            Regime::Generic
        }
    }

    pub fn require_coupled(&self) -> Result<()> {
        if self.w == 0.0 {
            Err(Error::DegenerateRegime)
        } else {
            Ok(())
        }
    }

    pub fn matrix(&self) -> Mat2 {
        let r = self.r();
        [
            [self.w * e(self.phi), -r * e(self.theta - self.psi)],
            [r * e(self.psi), self.w * e(self.theta - self.phi)],
        ]
    }

    pub fn det(&self) -> Complex64 {
        let m = self.matrix();
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `(a, b, e(θ))` with `a = w e(−φ)`, `b = √(1−w²) e(−ψ)`, so that
    /// `B = [[ā, −b e(θ)], [b̄, a e(θ)]]`.
    pub fn to_su2(&self) -> (Complex64, Complex64, Complex64) {
        (
            self.w * e(-self.phi),
            self.r() * e(-self.psi),
            e(self.theta),
        )
    }

    pub fn matrix_from_su2(a: Complex64, b: Complex64, det_phase: Complex64) -> Mat2 {
        [[a.conj(), -b * det_phase], [b.conj(), a * det_phase]]
    }

    /// Recover the parameters from an SU(2) triple (phases normalized).
    pub fn from_su2(a: Complex64, b: Complex64, det_phase: Complex64) -> Result<Self> {
        let w = a.norm().min(1.0);
        let tau = std::f64::consts::TAU;
        let phi = if w > 0.0 { -a.arg() / tau } else { 0.0 };
        let psi = if b.norm() > 0.0 { -b.arg() / tau } else { 0.0 };
        Self::new(w, det_phase.arg() / tau, phi, psi)
    }

    /// `max |(B*B − I)_{ij}|` and the same for `BB*`.
    pub fn unitarity_defect(&self) -> f64 {
        let m = self.matrix();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                let bb: Complex64 = (0..2).map(|k| m[k][i].conj() * m[k][j]).sum();
                let bbs: Complex64 = (0..2).map(|k| m[i][k] * m[j][k].conj()).sum();
                worst = worst.max((bb - id).norm()).max((bbs - id).norm());
            }
        }
        worst
    }

    /// `B v`.
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = self.matrix();
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// `B* v`: outgoing traces `(f(1), f(β))` from incoming `(f(0), f(α))`.
    pub fn apply_adjoint(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = self.matrix();
        [
            m[0][0].conj() * v[0] + m[1][0].conj() * v[1],
            m[0][1].conj() * v[0] + m[1][1].conj() * v[1],
        ]
    }
}
