//! Fourier multipliers of the form
//! `M(λ) = scalar · e(base·λ) · Σ_n c_n e(n ℓ λ)`, which act on packets as
//! `(M f̂)∨(x) = scalar · Σ_n c_n f(x + base + n ℓ)`.

use crate::domain::{BoundaryMatrix, ExteriorDomain};
use crate::error::Result;
use crate::packet::StepPacket;
use crate::{e, Complex64};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MultiplierKind {
    Identity,
    /// `a(λ)⁻¹`
    AInv,
    /// `c(λ)⁻¹`
    CInv,
    /// `a(λ)⁻¹ c(λ)`, the scattering matrix
    AInvC,
    /// `c(λ)⁻¹ a(λ)`
    CInvA,
    /// `conj(a(λ))⁻¹`
    AConjInv,
    /// `conj(c(λ))⁻¹`
    CConjInv,
    /// `m_B(λ)⁻²`
    MSquaredInv,
    /// `a(λ)`
    A,
    /// `c(λ)`
    C,
    /// `conj(a(λ))`
    AConj,
    /// `conj(c(λ))`
    CConj,
    /// Product of other series.
    Composite,
}

impl MultiplierKind {
    pub fn conjugate(self) -> Self {
        use MultiplierKind::*;
        match self {
            Identity => Identity,
            AInv => AConjInv,
            AConjInv => AInv,
            CInv => CConjInv,
            CConjInv => CInv,
            AInvC => CInvA,
            CInvA => AInvC,
            MSquaredInv => MSquaredInv,
            A => AConj,
            AConj => A,
            C => CConj,
            CConj => C,
            Composite => Composite,
        }
    }
}

/// Geometric run of coefficients: `c_{start + j·dir} = first · ratio^j`, `j ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub start: i64,
    pub dir: i64,
    pub first: Complex64,
    pub ratio: Complex64,
}

impl Ray {
    fn new(start: i64, dir: i64, first: Complex64, ratio: Complex64) -> Self {
        Self { start, dir, first, ratio }
    }

    fn single(n: i64, value: Complex64) -> Self {
        Self::new(n, 1, value, Complex64::new(0.0, 0.0))
    }

    fn coefficient(&self, j: u64) -> Complex64 {
        if j == 0 {
            self.first
        } else if self.ratio == Complex64::new(0.0, 0.0) {
            Complex64::new(0.0, 0.0)
        } else {
            self.first * self.ratio.powu(j.min(u32::MAX as u64) as u32)
        }
    }

    /// Largest index kept so that `Σ_{j>J} |c_j| ≤ tol`.
    fn cutoff(&self, tol: f64) -> u64 {
        let q = self.ratio.norm();
        let a = self.first.norm();
        if q == 0.0 || a == 0.0 {
            return 0;
        }
        // a q^{J+1}/(1−q) ≤ tol
        let need = ((tol * (1.0 - q) / a).ln() / q.ln() - 1.0).ceil();
        need.max(0.0) as u64
    }

    fn tail(&self, j_max: u64) -> f64 {
        let q = self.ratio.norm();
        if q == 0.0 {
            0.0
        } else {
            self.first.norm() * q.powf(j_max as f64 + 1.0) / (1.0 - q)
        }
    }

    fn conjugate(&self) -> Self {
        Self::new(-self.start, -self.dir, self.first.conj(), self.ratio.conj())
    }

    /// `Σ_j c_j e(n_j ℓ λ)` in closed form.
    fn sum_at(&self, x: f64) -> Complex64 {
        self.first * e(self.start as f64 * x) / (1.0 - self.ratio * e(self.dir as f64 * x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSeries {
    pub kind: MultiplierKind,
    pub scalar: Complex64,
    pub base_shift: f64,
    pub lattice_step: f64,
    /// Truncated coefficient map.
    pub coefficients: BTreeMap<i64, Complex64>,
    /// `Σ |c_n|` over the coefficients left out of the map.
    pub tail_bound: f64,
    /// Exact coefficient law; empty for composites.
    pub rays: Vec<Ray>,
}

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn c1() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl MultiplierSeries {
    fn from_rays(kind: MultiplierKind, scalar: Complex64, base: f64, step: f64, rays: Vec<Ray>, eps: f64) -> Self {
        let lead = rays.iter().map(|r| r.first.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut coefficients = BTreeMap::new();
        let mut tail_bound = 0.0;
        for ray in &rays {
            let j_max = ray.cutoff(eps * lead);
            for j in 0..=j_max {
                let c = ray.coefficient(j);
                if c != c0() {
                    *coefficients.entry(ray.start + ray.dir * j as i64).or_insert(c0()) += c;
                }
            }
            tail_bound += ray.tail(j_max);
        }
        Self {
            kind,
            scalar,
            base_shift: base,
            lattice_step: step,
            coefficients,
            tail_bound,
            rays,
        }
    }

    pub fn identity(step: f64) -> Self {
        Self::from_rays(MultiplierKind::Identity, c1(), 0.0, step, vec![Ray::single(0, c1())], 1e-12)
    }

    /// Series for `kind` with geometric tail at most `eps` times the leading
    /// coefficient.
    pub fn make(kind: MultiplierKind, b: &BoundaryMatrix, dom: &ExteriorDomain, eps: f64) -> Result<Self> {
        use MultiplierKind::*;
        let step = dom.ell();
        if kind == Identity {
            return Ok(Self::identity(step));
        }
        b.require_coupled()?;
        if kind == Composite {
            return Err(crate::Error::InvalidArgument("composite series are built with compose".into()));
        }
        let (w, r) = (b.w(), b.r());
        let (th, ph, ps) = (b.theta(), b.phi(), b.psi());
        let gap = dom.beta() - dom.alpha();
        let down = r * e(-ps);
        let series = match kind {
            AInv => Self::from_rays(AInv, w * e(-ph), -1.0, step, vec![Ray::new(0, 1, c1(), down)], eps),
            CInv => Self::from_rays(CInv, w * e(th - ph), gap, step, vec![Ray::new(0, -1, c1(), down.conj())], eps),
            MSquaredInv => Self::from_rays(
                MSquaredInv,
                c1(),
                0.0,
                step,
                vec![Ray::new(0, 1, c1(), down), Ray::new(-1, -1, down.conj(), down.conj())],
                eps,
            ),
            AInvC => Self::from_rays(
                AInvC,
                e(-th),
                -(gap + 1.0),
                step,
                vec![Ray::single(-1, -down.conj()), Ray::new(0, 1, Complex64::new(w * w, 0.0), down)],
                eps,
            ),
            A => Self::from_rays(
                A,
                e(ph) / w,
                1.0,
                step,
                vec![Ray::single(0, c1()), Ray::single(1, -down)],
                eps,
            ),
            C => Self::from_rays(
                C,
                e(ph - th) / w,
                -gap,
                step,
                vec![Ray::single(0, c1()), Ray::single(-1, -down.conj())],
                eps,
            ),
            AConjInv | CConjInv | CInvA | AConj | CConj => {
                return Ok(Self::make(kind.conjugate(), b, dom, eps)?.conjugate());
            }
            Identity | Composite => unreachable!(),
        };
        Ok(series)
    }

    /// `c_n` from the exact law, or from the stored map for composites.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        if self.rays.is_empty() {
            return self.coefficients.get(&n).copied().unwrap_or(c0());
        }
        self.rays
            .iter()
            .map(|r| {
                let j = (n - r.start) * r.dir;
                if j < 0 {
                    c0()
                } else {
                    r.coefficient(j as u64)
                }
            })
            .sum()
    }

    /// `M(λ)` from the truncated map.
    pub fn eval(&self, lambda: f64) -> Complex64 {
        let x = self.lattice_step * lambda;
        let s: Complex64 = self.coefficients.iter().map(|(n, c)| c * e(*n as f64 * x)).sum();
        self.scalar * e(self.base_shift * lambda) * s
    }

    /// `M(λ)` from the geometric closed form (falls back to [`eval`](Self::eval)).
    pub fn eval_exact(&self, lambda: f64) -> Complex64 {
        if self.rays.is_empty() {
            return self.eval(lambda);
        }
        let x = self.lattice_step * lambda;
        let s: Complex64 = self.rays.iter().map(|r| r.sum_at(x)).sum();
        self.scalar * e(self.base_shift * lambda) * s
    }

    /// Series of `λ ↦ conj(M(λ))`.
    pub fn conjugate(&self) -> Self {
        if self.kind == MultiplierKind::Identity {
            return self.clone();
        }
        Self {
            kind: self.kind.conjugate(),
            scalar: self.scalar.conj(),
            base_shift: -self.base_shift,
            lattice_step: self.lattice_step,
            coefficients: self.coefficients.iter().map(|(n, c)| (-n, c.conj())).collect(),
            tail_bound: self.tail_bound,
            rays: self.rays.iter().map(Ray::conjugate).collect(),
        }
    }

    fn l1(&self) -> f64 {
        self.coefficients.values().map(|c| c.norm()).sum()
    }

    /// Product `M₁ M₂`: scalars multiply, shifts add, coefficients convolve.
    pub fn compose(&self, other: &Self) -> Self {
        assert!(
            (self.lattice_step - other.lattice_step).abs() <= 1e-15 * self.lattice_step,
            "lattice steps differ"
        );
        let mut coefficients: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (n, c) in &self.coefficients {
            for (m, d) in &other.coefficients {
                *coefficients.entry(n + m).or_insert(c0()) += c * d;
            }
        }
        let tail_bound = self.l1() * other.tail_bound + self.tail_bound * other.l1() + self.tail_bound * other.tail_bound;
        Self {
            kind: MultiplierKind::Composite,
            scalar: self.scalar * other.scalar,
            base_shift: self.base_shift + other.base_shift,
            lattice_step: self.lattice_step,
            coefficients,
            tail_bound,
            rays: Vec::new(),
        }
    }

    /// `(M f̂)∨` using the truncated map.
    pub fn apply(&self, f: &StepPacket) -> StepPacket {
        if self.coefficients.is_empty() {
            return StepPacket::zero();
        }
        let lo = *self.coefficients.keys().next().unwrap();
        let hi = *self.coefficients.keys().next_back().unwrap();
        let s = self.scalar;
        f.lattice_sum(
            self.base_shift,
            self.lattice_step,
            (lo, hi),
            |n| self.coefficients.get(&n).map(|c| s * c).unwrap_or(c0()),
            (f64::NEG_INFINITY, f64::INFINITY),
        )
    }

    /// `χ_window (M f̂)∨(· − t)`.
    ///
    /// Only the terms whose support meets the window are summed, so for a
    /// bounded window or a one-sided law the result is exact. Otherwise the
    /// geometric runs are cut where their tail drops below `eps`; the second
    /// return value bounds the `L²` norm of what was dropped.
    pub fn apply_shifted(&self, f: &StepPacket, t: f64, window: (f64, f64), eps: f64) -> (StepPacket, f64) {
        let Some((lo, hi)) = f.support() else {
            return (StepPacket::zero(), 0.0);
        };
        let step = self.lattice_step;
        let base = self.base_shift - t;
        // term n meets the window iff lo − s_n < whi and hi − s_n > wlo
        let n_min = (lo - base - window.1) / step;
        let n_max = (hi - base - window.0) / step;
        let n_min = if n_min.is_finite() { n_min.floor() as i64 } else { i64::MIN };
        let n_max = if n_max.is_finite() { n_max.ceil() as i64 } else { i64::MAX };
        if n_min > n_max {
            return (StepPacket::zero(), 0.0);
        }
        let norm = f.norm() * self.scalar.norm();
        let mut coeffs: BTreeMap<i64, Complex64> = BTreeMap::new();
        let mut dropped = 0.0;
        if self.rays.is_empty() {
            for (&n, &c) in self.coefficients.range(n_min..=n_max) {
                coeffs.insert(n, c);
            }
            dropped = self.tail_bound * norm;
        } else {
            let lead = self.rays.iter().map(|r| r.first.norm()).fold(0.0, f64::max);
            for ray in &self.rays {
                let (j_lo, j_hi) = if ray.dir > 0 {
                    (n_min.saturating_sub(ray.start), n_max.saturating_sub(ray.start))
                } else {
                    (ray.start.saturating_sub(n_max), ray.start.saturating_sub(n_min))
                };
                let j_lo = j_lo.max(0);
                if j_hi < j_lo {
                    continue;
                }
                let only_first = ray.ratio == c0();
                let mut j_hi = if only_first { j_hi.min(0) } else { j_hi };
                const EXACT_LIMIT: i64 = 2_000_000;
                if j_hi - j_lo > EXACT_LIMIT {
                    let cap = ray.cutoff(eps * lead.max(f64::MIN_POSITIVE)) as i64;
                    let cap = cap.max(j_lo);
                    if cap < j_hi {
                        dropped += ray.tail(cap as u64) * norm;
                        j_hi = cap;
                    }
                }
                for j in j_lo..=j_hi {
                    let c = ray.coefficient(j as u64);
                    if c != c0() {
                        *coeffs.entry(ray.start + ray.dir * j).or_insert(c0()) += c;
                    }
                }
            }
        }
        if coeffs.is_empty() {
            return (StepPacket::zero(), dropped);
        }
        let (k_lo, k_hi) = (*coeffs.keys().next().unwrap(), *coeffs.keys().next_back().unwrap());
        let s = self.scalar;
        let out = f.lattice_sum(base, step, (k_lo, k_hi), |n| coeffs.get(&n).map(|c| s * c).unwrap_or(c0()), window);
        (out, dropped)
    }

    /// `((M f̂)∨)(x)` at one point, from the exact law (truncated map for
    /// composites).
    pub fn eval_applied_at(&self, f: &StepPacket, x: f64) -> Complex64 {
        let Some((lo, hi)) = f.support() else {
            return c0();
        };
        // x + base + n ℓ ∈ [lo, hi)
        let n_lo = ((lo - x - self.base_shift) / self.lattice_step).floor() as i64;
        let n_hi = ((hi - x - self.base_shift) / self.lattice_step).ceil() as i64;
        let mut acc = c0();
        for n in n_lo..=n_hi {
            let v = f.eval(x + self.base_shift + n as f64 * self.lattice_step);
            if v != c0() {
                acc += self.coefficient(n) * v;
            }
        }
        self.scalar * acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{coeff_a, coeff_c};

    fn ex59() -> (BoundaryMatrix, ExteriorDomain) {
        (
            BoundaryMatrix::new(3f64.sqrt() / 2.0, 0.0, 0.0, 0.0).unwrap(),
            ExteriorDomain::new(2.0, 3.0).unwrap(),
        )
    }

    fn generic() -> (BoundaryMatrix, ExteriorDomain) {
        (
            BoundaryMatrix::new(0.63, 0.17, 0.41, 0.73).unwrap(),
            ExteriorDomain::new(1.7, 2.45).unwrap(),
        )
    }

    #[test]
    fn ainv_of_example() {
        let (b, d) = ex59();
        let m = MultiplierSeries::make(MultiplierKind::AInv, &b, &d, 1e-12).unwrap();
        assert!((m.scalar - 3f64.sqrt() / 2.0).norm() < 1e-15);
        assert_eq!(m.base_shift, -1.0);
        for n in 0..20 {
            assert!((m.coefficient(n) - 0.5f64.powi(n as i32)).norm() < 1e-15);
        }
        assert_eq!(m.coefficient(-1), c0());
        assert!(m.tail_bound <= 1e-12);
        let f = StepPacket::unit_box(-0.5, 0.0);
        let g = m.apply(&f);
        assert!((g.eval(0.75) - 3f64.sqrt() / 2.0).norm() < 1e-15);
        assert!((g.eval(-0.25) - 3f64.sqrt() / 4.0).norm() < 1e-15);
    }

    #[test]
    fn identity_and_w1() {
        let (_, d) = ex59();
        let f = StepPacket::new(vec![-2.0, -1.0, 0.5], vec![Complex64::new(1.0, 2.0), c1()]).unwrap();
        assert_eq!(MultiplierSeries::identity(1.0).apply(&f), f);
        let m = MultiplierSeries::make(MultiplierKind::MSquaredInv, &BoundaryMatrix::identity(), &d, 1e-12).unwrap();
        assert_eq!(m.coefficients.len(), 1);
        assert_eq!(m.coefficients[&0], c1());
    }

    #[test]
    fn laws_match_closed_forms() {
        use MultiplierKind::*;
        for (b, d) in [ex59(), generic()] {
            for k in 0..100 {
                let l = -4.0 + 0.0817 * k as f64;
                let (a, c) = (coeff_a(&b, &d, l), coeff_c(&b, &d, l));
                let m2 = 1.0 / a.norm_sqr();
                let cases = [
                    (AInv, 1.0 / a),
                    (CInv, 1.0 / c),
                    (AInvC, c / a),
                    (CInvA, a / c),
                    (AConjInv, 1.0 / a.conj()),
                    (CConjInv, 1.0 / c.conj()),
                    (MSquaredInv, Complex64::new(m2, 0.0)),
                    (A, a),
                    (C, c),
                    (AConj, a.conj()),
                    (CConj, c.conj()),
                ];
                for (kind, expect) in cases {
                    let m = MultiplierSeries::make(kind, &b, &d, 1e-13).unwrap();
                    assert!((m.eval_exact(l) - expect).norm() < 1e-12 * expect.norm().max(1.0), "{kind:?} at {l}");
                    assert!((m.eval(l) - expect).norm() < 1e-11 * expect.norm().max(1.0), "{kind:?} truncated");
                }
            }
        }
    }

    #[test]
    fn conjugation() {
        let (b, d) = generic();
        let m = MultiplierSeries::make(MultiplierKind::AInv, &b, &d, 1e-12).unwrap();
        assert_eq!(m.conjugate().conjugate(), m);
        for k in 0..100 {
            let l = -3.0 + 0.061 * k as f64;
            assert!((m.conjugate().eval(l) - m.eval(l).conj()).norm() < 1e-13);
        }
        let id = MultiplierSeries::identity(0.7);
        assert_eq!(id.conjugate(), id);
    }

    #[test]
    fn composition_matches_product() {
        let (b, d) = generic();
        let a = MultiplierSeries::make(MultiplierKind::A, &b, &d, 1e-14).unwrap();
        let ainv = MultiplierSeries::make(MultiplierKind::AInv, &b, &d, 1e-14).unwrap();
        let p = a.compose(&ainv);
        for k in 0..40 {
            let l = -2.0 + 0.1 * k as f64;
            assert!((p.eval(l) - 1.0).norm() < 1e-12);
        }
        let f = StepPacket::new(vec![-1.3, -0.4, 0.0], vec![Complex64::new(0.5, 1.0), Complex64::new(-1.0, 0.2)]).unwrap();
        let two_step = a.apply(&ainv.apply(&f));
        let one_step = p.apply(&f);
        assert!(two_step.l2_distance(&one_step) < 1e-12);
        assert!(one_step.l2_distance(&f) < 1e-12);
    }

    #[test]
    fn shifted_window_matches_full_application() {
        let (b, d) = generic();
        let f = StepPacket::new(vec![-1.1, -0.6, -0.1], vec![Complex64::new(1.0, -0.5), Complex64::new(0.3, 0.0)]).unwrap();
        for kind in [MultiplierKind::AInv, MultiplierKind::MSquaredInv, MultiplierKind::AInvC] {
            let m = MultiplierSeries::make(kind, &b, &d, 1e-15).unwrap();
            let full = m.apply(&f).translate(0.8).restrict(1.0, d.alpha());
            let (win, dropped) = m.apply_shifted(&f, 0.8, (1.0, d.alpha()), 1e-15);
            assert_eq!(dropped, 0.0);
            assert!(full.l2_distance(&win) < 1e-13, "{kind:?}");
            for x in [1.05, 1.3, 1.55] {
                let v = m.eval_applied_at(&f, x - 0.8);
                assert!((v - win.eval(x)).norm() < 1e-13);
            }
        }
    }
}
