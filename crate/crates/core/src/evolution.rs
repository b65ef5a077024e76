//! The unitary group `U_B(t)`, the scattering operator, the translation
//! representations and correlation functions, all on step packets.
//!
//! A packet `f = f₋ + f₀ + f₊` evolves block by block:
//! `χ_i U_B(t) f_j = χ_i (M_ij f̂_j)∨(· − t)` with
//!
//! | source \ target | I₋ | I₀ | I₊ |
//! |---|---|---|---|
//! | f₋ | 1 | a⁻¹ | a⁻¹c |
//! | f₀ | ā⁻¹ | m⁻² | c̄⁻¹ |
//! | f₊ | c⁻¹a | c⁻¹ | 1 |
//!
//! These identities hold for every real `t`. Each target window has a finite
//! end towards which the geometric runs of `M_ij` point, so only finitely
//! many translates meet it and the result is exact.

use crate::domain::{BoundaryMatrix, Component, ExteriorDomain};
use crate::error::{Error, Result};
use crate::multiplier::{MultiplierKind, MultiplierSeries};
use crate::packet::StepPacket;
use crate::{e, Complex64};

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub packet: StepPacket,
    /// Bound on the `L²` norm of translates left out (zero unless a run had
    /// to be capped).
    pub truncation_error: f64,
    pub t: f64,
}

/// Multiplier carrying `source` into `target`.
pub fn block_kind(target: Component, source: Component) -> MultiplierKind {
    use Component::*;
    use MultiplierKind::*;
    match (source, target) {
        (Minus, Minus) | (Plus, Plus) => Identity,
        (Minus, Zero) => AInv,
        (Minus, Plus) => AInvC,
        (Zero, Minus) => AConjInv,
        (Zero, Zero) => MSquaredInv,
        (Zero, Plus) => CConjInv,
        (Plus, Minus) => CInvA,
        (Plus, Zero) => CInv,
    }
}

fn require_in_omega(dom: &ExteriorDomain, f: &StepPacket) -> Result<()> {
    let m = f.barrier_norm2(dom);
    if m > 0.0 {
        return Err(Error::InvalidArgument(format!("packet carries mass {m:e} on the barriers")));
    }
    Ok(())
}

/// `U_B(t) f` for `w > 0`.
pub fn evolve(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, t: f64, eps: f64) -> Result<EvolutionResult> {
    b.require_coupled()?;
    require_in_omega(dom, f)?;
    let mut parts = Vec::with_capacity(9);
    let mut truncation_error = 0.0;
    for source in Component::ALL {
        let fj = f.restrict_component(dom, source);
        if fj.is_zero() {
            continue;
        }
        for target in Component::ALL {
            let m = MultiplierSeries::make(block_kind(target, source), b, dom, eps)?;
            let (p, dropped) = m.apply_shifted(&fj, t, dom.interval(target), eps);
            truncation_error += dropped;
            parts.push(p);
        }
    }
    Ok(EvolutionResult {
        packet: StepPacket::sum(&parts)?,
        truncation_error,
        t,
    })
}

/// `U_B(t) f` for `w = 0`: periodic transport inside `I₀` (phase `e(−ψ)` per
/// wrap) and transport along `I₋ ∪ I₊` glued at `0 ~ β` with phase
/// `κ = −e(ψ − θ)`.
pub fn evolve_decoupled(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, t: f64) -> Result<EvolutionResult> {
    if b.w() != 0.0 {
        return Err(Error::NotDecoupled { w: b.w() });
    }
    require_in_omega(dom, f)?;
    let ell = dom.ell();
    let psi = b.psi();
    let kappa = -e(psi - b.theta());
    let (fm, f0, fp) = (
        f.restrict_component(dom, Component::Minus),
        f.restrict_component(dom, Component::Zero),
        f.restrict_component(dom, Component::Plus),
    );
    let k_range = ((t / ell).floor() as i64 - 1, (t / ell).ceil() as i64 + 1);
    let inner = f0.lattice_sum(-t, ell, k_range, |k| e(-(k as f64) * psi), dom.interval(Component::Zero));
    let minus = dom.interval(Component::Minus);
    let plus = dom.interval(Component::Plus);
    let beta = dom.beta();
    let parts = [
        inner,
        fm.translate(t).restrict(minus.0, minus.1),
        fm.translate(t + beta).restrict(plus.0, plus.1).scale(kappa),
        fp.translate(t).restrict(plus.0, plus.1),
        fp.translate(t - beta).restrict(minus.0, minus.1).scale(kappa.conj()),
    ];
    Ok(EvolutionResult {
        packet: StepPacket::sum(&parts)?,
        truncation_error: 0.0,
        t,
    })
}

/// `U_B(t) f` in either regime.
pub fn evolve_any(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, t: f64, eps: f64) -> Result<EvolutionResult> {
    if b.w() == 0.0 {
        evolve_decoupled(b, dom, f, t)
    } else {
        evolve(b, dom, f, t, eps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterResult {
    pub packet: StepPacket,
    pub truncation_error: f64,
}

fn whole_line(m: &MultiplierSeries, f: &StepPacket, eps: f64) -> (StepPacket, f64) {
    m.apply_shifted(f, 0.0, (f64::NEG_INFINITY, f64::INFINITY), eps)
}

/// `S̃ f = (a⁻¹c f̂)∨` for an incoming packet `f ∈ L²(I₋)`.
pub fn scatter(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, eps: f64) -> Result<ScatterResult> {
    b.require_coupled()?;
    match f.support() {
        None => return Err(Error::EmptySupport("incoming packet is zero")),
        Some((_, hi)) if hi > 0.0 => return Err(Error::EmptySupport("incoming packet must lie in I₋")),
        _ => {}
    }
    let m = MultiplierSeries::make(MultiplierKind::AInvC, b, dom, eps)?;
    let (packet, truncation_error) = whole_line(&m, f, eps);
    Ok(ScatterResult {
        packet,
        truncation_error,
    })
}

/// `‖U_B(t) f − (S̃ f)(· − t)‖`, which tends to zero as `t → ∞`.
pub fn scattering_defect(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, t: f64, eps: f64) -> Result<f64> {
    let s = scatter(b, dom, f, eps)?;
    let u = evolve(b, dom, f, t, eps)?;
    Ok(u.packet.l2_distance(&s.packet.translate(t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Incoming,
    Outgoing,
}

/// `R₊ f` (outgoing) or `R₋ f` (incoming) on the whole line.
///
/// `R₊ = a⁻¹c ⊕ c̄⁻¹ ⊕ 1` and `R₋ = 1 ⊕ ā⁻¹ ⊕ c⁻¹a` on `f₋ ⊕ f₀ ⊕ f₊`.
pub fn translation_representation(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    f: &StepPacket,
    sign: Sign,
    eps: f64,
) -> Result<ScatterResult> {
    b.require_coupled()?;
    require_in_omega(dom, f)?;
    let target = match sign {
        Sign::Outgoing => Component::Plus,
        Sign::Incoming => Component::Minus,
    };
    let mut parts = Vec::with_capacity(3);
    let mut truncation_error = 0.0;
    for source in Component::ALL {
        let fj = f.restrict_component(dom, source);
        if fj.is_zero() {
            continue;
        }
        let kind = block_kind(target, source);
        if kind == MultiplierKind::Identity {
            parts.push(fj);
            continue;
        }
        let m = MultiplierSeries::make(kind, b, dom, eps)?;
        let (p, dropped) = whole_line(&m, &fj, eps);
        truncation_error += dropped;
        parts.push(p);
    }
    Ok(ScatterResult {
        packet: StepPacket::sum(&parts)?,
        truncation_error,
    })
}

/// `⟨f, U_B(t) g⟩`.
pub fn correlation(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, g: &StepPacket, t: f64, eps: f64) -> Result<Complex64> {
    let u = evolve(b, dom, g, t, eps)?;
    Ok(f.inner(&u.packet))
}

/// Piecewise-linear `τ ↦ ∫ f̄(x) g(x − τ) dx` for carrier-free packets.
#[derive(Debug, Clone)]
struct CrossCorrelation {
    knots: Vec<f64>,
    values: Vec<Complex64>,
}

impl CrossCorrelation {
    fn new(f: &StepPacket, g: &StepPacket) -> Self {
        let mut knots: Vec<f64> = f
            .breakpoints()
            .iter()
            .flat_map(|a| g.breakpoints().iter().map(move |b| a - b))
            .collect();
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        knots.dedup_by(|b, a| (*a - *b).abs() <= 1e-14 * a.abs().max(1.0));
        let values = knots.iter().map(|&tau| f.inner(&g.translate(tau))).collect();
        Self { knots, values }
    }

    fn range(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    fn eval(&self, tau: f64) -> Complex64 {
        let (lo, hi) = self.range();
        if !(tau > lo && tau < hi) {
            return Complex64::new(0.0, 0.0);
        }
        let k = self.knots.partition_point(|&x| x <= tau);
        let (x0, x1) = (self.knots[k - 1], self.knots[k]);
        let s = (tau - x0) / (x1 - x0);
        self.values[k - 1] * (1.0 - s) + self.values[k] * s
    }
}

/// `t ↦ ⟨f, U_B(t) g⟩` on `[−T, T]` as an explicit sum of shifted
/// cross-correlations, each piecewise linear in `t`.
#[derive(Debug, Clone)]
pub struct CorrelationFunction {
    pieces: Vec<CrossCorrelation>,
    /// `(shift, coefficient, piece)` sorted by the start of the support.
    terms: Vec<(f64, Complex64, usize)>,
    max_width: f64,
    horizon: f64,
}

impl CorrelationFunction {
    pub fn new(b: &BoundaryMatrix, dom: &ExteriorDomain, f: &StepPacket, g: &StepPacket, horizon: f64) -> Result<Self> {
        b.require_coupled()?;
        require_in_omega(dom, f)?;
        require_in_omega(dom, g)?;
        if f.carrier() != 0.0 || g.carrier() != 0.0 {
            return Err(Error::InvalidArgument("correlation functions need carrier-free packets".into()));
        }
        let ell = dom.ell();
        let mut pieces = Vec::new();
        let mut terms = Vec::new();
        for target in Component::ALL {
            let fi = f.restrict_component(dom, target);
            if fi.is_zero() {
                continue;
            }
            for source in Component::ALL {
                let gj = g.restrict_component(dom, source);
                if gj.is_zero() {
                    continue;
                }
                let x = CrossCorrelation::new(&fi, &gj);
                let (lo, hi) = x.range();
                let idx = pieces.len();
                pieces.push(x);
                let m = MultiplierSeries::make(block_kind(target, source), b, dom, 1e-15)?;
                // term n contributes X(t − base − nℓ), alive for t ∈ base + nℓ + (lo, hi)
                let n_lo = ((-horizon - hi - m.base_shift) / ell).floor() as i64;
                let n_hi = ((horizon - lo - m.base_shift) / ell).ceil() as i64;
                for n in n_lo..=n_hi {
                    let c = m.coefficient(n);
                    if c != Complex64::new(0.0, 0.0) {
                        terms.push((m.base_shift + n as f64 * ell, m.scalar * c, idx));
                    }
                }
            }
        }
        let max_width = pieces.iter().map(|p| p.range().1 - p.range().0).fold(0.0, f64::max);
        terms.sort_by(|a, b| (a.0 + pieces[a.2].range().0).partial_cmp(&(b.0 + pieces[b.2].range().0)).unwrap());
        Ok(Self {
            pieces,
            terms,
            max_width,
            horizon,
        })
    }

    fn start(&self, k: usize) -> f64 {
        let (s, _, p) = self.terms[k];
        s + self.pieces[p].range().0
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        // terms alive at t start in [t − max_width, t]
        let first = self.terms.partition_point(|term| term.0 + self.pieces[term.2].range().0 < t - self.max_width);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in first..self.terms.len() {
            if self.start(k) > t {
                break;
            }
            let (s, c, p) = self.terms[k];
            acc += c * self.pieces[p].eval(t - s);
        }
        acc
    }

    /// All kinks of the function inside `[lo, hi]`, including the ends.
    fn kinks(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = vec![lo, hi];
        for &(s, _, p) in &self.terms {
            for &k in &self.pieces[p].knots {
                let x = s + k;
                if x > lo && x < hi {
                    pts.push(x);
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|b, a| (*a - *b).abs() <= 1e-13 * a.abs().max(1.0));
        pts
    }

    /// `(1/2T) ∫_{−T}^{T} |⟨f, U_B(t) g⟩|² dt`, exact up to rounding.
    pub fn cesaro_mean(&self, big_t: f64) -> Result<f64> {
        if !(big_t > 0.0 && big_t <= self.horizon) {
            return Err(Error::InvalidArgument(format!(
                "T = {big_t} must lie in (0, {}]",
                self.horizon
            )));
        }
        let pts = self.kinks(-big_t, big_t);
        let vals: Vec<Complex64> = pts.iter().map(|&t| self.eval(t)).collect();
        let mut acc = 0.0;
        for k in 0..pts.len() - 1 {
            let (u, v) = (vals[k], vals[k + 1]);
            // ∫ |u + s(v − u)|² over a segment of width h
            let h = pts[k + 1] - pts[k];
            acc += h / 3.0 * (u.norm_sqr() + (u * v.conj()).re + v.norm_sqr());
        }
        Ok(acc / (2.0 * big_t))
    }
}

/// Cesàro means `(1/2T) ∫_{−T}^{T} |⟨f, U_B(t) g⟩|² dt` for each `T`.
pub fn cesaro_decay(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    f: &StepPacket,
    g: &StepPacket,
    t_grid: &[f64],
) -> Result<Vec<f64>> {
    let horizon = t_grid.iter().copied().fold(0.0, f64::max);
    let c = CorrelationFunction::new(b, dom, f, g, horizon)?;
    t_grid.iter().map(|&t| c.cesaro_mean(t)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockEntry {
    /// `χ_i U_B(t) P_j f` by evolving and restricting.
    pub via_evolution: StepPacket,
    /// `χ_i (m⁻² a_i ā_j P_j f̂)∨(· − t)` from the composed series.
    pub via_product: StepPacket,
    pub discrepancy: f64,
    pub truncation_error: f64,
}

fn coefficient_kind(c: Component) -> Option<MultiplierKind> {
    match c {
        Component::Minus => Some(MultiplierKind::A),
        Component::Zero => None,
        Component::Plus => Some(MultiplierKind::C),
    }
}

/// `P_i U_B(t) P_j f` computed both ways.
pub fn block_matrix_entry(
    b: &BoundaryMatrix,
    dom: &ExteriorDomain,
    i: Component,
    j: Component,
    f: &StepPacket,
    t: f64,
    eps: f64,
) -> Result<BlockEntry> {
    let fj = f.restrict_component(dom, j);
    let ev = evolve(b, dom, &fj, t, eps)?;
    let via_evolution = ev.packet.restrict_component(dom, i);
    let mut m = MultiplierSeries::make(MultiplierKind::MSquaredInv, b, dom, eps)?;
    if let Some(k) = coefficient_kind(i) {
        m = m.compose(&MultiplierSeries::make(k, b, dom, eps)?);
    }
    if let Some(k) = coefficient_kind(j) {
        m = m.compose(&MultiplierSeries::make(k, b, dom, eps)?.conjugate());
    }
    let (via_product, dropped) = m.apply_shifted(&fj, t, dom.interval(i), eps);
    let discrepancy = via_evolution.l2_distance(&via_product);
    Ok(BlockEntry {
        via_evolution,
        via_product,
        discrepancy,
        truncation_error: ev.truncation_error + dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characteristics::Tracer;

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

    fn mixed_packet() -> StepPacket {
        let parts = [
            StepPacket::new(vec![-1.2, -0.7, -0.1], vec![Complex64::new(1.0, 0.5), Complex64::new(-0.4, 0.0)]).unwrap(),
            StepPacket::boxed(1.1, 1.5, Complex64::new(0.0, 0.8)),
            StepPacket::boxed(2.6, 3.3, Complex64::new(0.3, -0.2)),
        ];
        StepPacket::sum(&parts).unwrap()
    }

    #[test]
    fn example_transit_values() {
        let (b, d) = ex59();
        let f = StepPacket::unit_box(-0.5, 0.0);
        let u = evolve(&b, &d, &f, 1.5, 1e-12).unwrap().packet;
        assert!((u.eval(1.25) - 3f64.sqrt() / 4.0).norm() < 1e-15);
        assert!((u.eval(1.75) - 0.0).norm() < 1e-15);
        assert!((u.eval(3.25) - 0.75).norm() < 1e-15);
        assert!((u.eval(4.25) + 0.5).norm() < 1e-15);
        for t in [0.5, 1.0, 2.0, 5.0] {
            let u = evolve(&b, &d, &f, t, 1e-12).unwrap();
            assert!((u.packet.norm2() - 0.5).abs() < 1e-13);
            assert_eq!(u.truncation_error, 0.0);
        }
    }

    #[test]
    fn agrees_with_characteristics() {
        let (b, d) = generic();
        let f = mixed_packet();
        for t in [0.3, 1.1, 2.9, 7.4] {
            let u = evolve(&b, &d, &f, t, 1e-14).unwrap().packet;
            let tr = Tracer::new(&b, &d, &f);
            for k in 0..400 {
                let x = -3.0 + 0.0371 * k as f64 + 1e-4;
                if d.component_of(x).is_none() {
                    continue;
                }
                let v = tr.value(x, t).unwrap();
                assert!((u.eval(x) - v).norm() < 1e-13, "x = {x}, t = {t}");
            }
        }
    }

    #[test]
    fn group_law_with_negative_times() {
        let (b, d) = generic();
        let f = mixed_packet();
        for (s, t) in [(0.7, 1.3), (-0.9, 2.2), (1.5, -2.5), (-1.1, -0.4)] {
            let us = evolve(&b, &d, &f, s, 1e-14).unwrap().packet;
            let ust = evolve(&b, &d, &us, t, 1e-14).unwrap().packet;
            let direct = evolve(&b, &d, &f, s + t, 1e-14).unwrap().packet;
            assert!(ust.l2_distance(&direct) < 1e-12, "({s}, {t})");
            assert!((direct.norm2() - f.norm2()).abs() < 1e-13);
        }
        let back = evolve(&b, &d, &evolve(&b, &d, &f, 3.0, 1e-14).unwrap().packet, -3.0, 1e-14).unwrap();
        assert!(back.packet.l2_distance(&f) < 1e-12);
    }

    #[test]
    fn rejects_barrier_mass_and_w0() {
        let (b, d) = ex59();
        assert!(evolve(&b, &d, &StepPacket::unit_box(0.5, 1.5), 1.0, 1e-12).is_err());
        let b0 = BoundaryMatrix::new(0.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(evolve(&b0, &d, &StepPacket::unit_box(-1.0, 0.0), 1.0, 1e-12), Err(Error::DegenerateRegime)));
        assert!(matches!(evolve_decoupled(&b, &d, &StepPacket::unit_box(-1.0, 0.0), 1.0), Err(Error::NotDecoupled { .. })));
    }

    #[test]
    fn decoupled_wraps_and_splices() {
        let d = ExteriorDomain::new(2.5, 3.2).unwrap();
        let b = BoundaryMatrix::new(0.0, 0.3, 0.0, 0.15).unwrap();
        let f0 = StepPacket::unit_box(1.2, 1.6);
        let u = evolve_decoupled(&b, &d, &f0, d.ell()).unwrap().packet;
        assert!(u.l2_distance(&f0.scale(e(-0.15))) < 1e-14);
        let u = evolve_decoupled(&b, &d, &f0, 0.5).unwrap().packet;
        assert!((u.norm2() - f0.norm2()).abs() < 1e-14);
        assert!(u.restrict_component(&d, Component::Zero).l2_distance(&u) < 1e-15);
        let fm = StepPacket::unit_box(-0.4, -0.1);
        let u = evolve_decoupled(&b, &d, &fm, 0.3).unwrap().packet;
        let expect = StepPacket::sum(&[
            StepPacket::unit_box(-0.1, 0.0),
            StepPacket::boxed(3.2, 3.4, -e(0.15 - 0.3)),
        ])
        .unwrap();
        assert!(u.l2_distance(&expect) < 1e-14);
        // and back again
        let back = evolve_decoupled(&b, &d, &u, -0.3).unwrap().packet;
        assert!(back.l2_distance(&fm) < 1e-14);
    }

    #[test]
    fn scatter_example() {
        let (b, d) = ex59();
        let f = StepPacket::unit_box(-0.5, 0.0);
        let s = scatter(&b, &d, &f, 1e-15).unwrap();
        assert!((s.packet.norm2() - 0.5).abs() < 1e-13);
        assert!((s.packet.eval(2.75) + 0.5).norm() < 1e-15);
        for n in 0..20 {
            // (3/4)(1/2)^n f(x − 3 + (n+1)) lives on [1.5 − n, 2 − n]
            let x = 1.75 - n as f64;
            assert!((s.packet.eval(x) - 0.75 * 0.5f64.powi(n)).norm() < 1e-15);
        }
        for t in [5.0, 20.0, 60.0] {
            let defect = scattering_defect(&b, &d, &f, t, 1e-15).unwrap();
            assert!(defect < 0.5f64.powf(t - 3.0) + 1e-12, "t = {t}: {defect}");
        }
        assert!(scatter(&b, &d, &StepPacket::unit_box(1.2, 1.4), 1e-12).is_err());
        assert!(scatter(&b, &d, &StepPacket::zero(), 1e-12).is_err());
    }

    #[test]
    fn translation_representations() {
        let (b, d) = generic();
        let f = mixed_packet();
        let plus = f.restrict_component(&d, Component::Plus);
        let minus = f.restrict_component(&d, Component::Minus);
        let rp = translation_representation(&b, &d, &plus, Sign::Outgoing, 1e-15).unwrap();
        assert_eq!(rp.packet, plus);
        let rm = translation_representation(&b, &d, &minus, Sign::Incoming, 1e-15).unwrap();
        assert_eq!(rm.packet, minus);
        for sign in [Sign::Outgoing, Sign::Incoming] {
            let r = translation_representation(&b, &d, &f, sign, 1e-15).unwrap();
            assert!((r.packet.norm2() - f.norm2()).abs() < 1e-12);
            for t in [0.8, 2.3] {
                let u = evolve(&b, &d, &f, t, 1e-15).unwrap().packet;
                let ru = translation_representation(&b, &d, &u, sign, 1e-15).unwrap();
                assert!(ru.packet.l2_distance(&r.packet.translate(t)) < 1e-10);
            }
        }
    }

    #[test]
    fn correlation_function_matches_evolution() {
        let (b, d) = generic();
        let f = mixed_packet();
        let g = StepPacket::sum(&[StepPacket::unit_box(-0.6, -0.2), StepPacket::boxed(1.3, 1.6, Complex64::new(0.5, 0.5))]).unwrap();
        let c = CorrelationFunction::new(&b, &d, &f, &g, 10.0).unwrap();
        for k in 0..60 {
            let t = -9.7 + 0.331 * k as f64;
            let direct = correlation(&b, &d, &f, &g, t, 1e-15).unwrap();
            assert!((c.eval(t) - direct).norm() < 1e-12, "t = {t}");
        }
        assert!((c.eval(0.0) - f.inner(&g)).norm() < 1e-13);
    }

    #[test]
    fn cesaro_means_of_example() {
        let (b, d) = ex59();
        let f = StepPacket::unit_box(1.2, 1.7);
        let m = cesaro_decay(&b, &d, &f, &f, &[10.0, 100.0, 1000.0]).unwrap();
        assert!(m[0] > m[1] && m[1] > m[2] && m[2] > 0.0);
        // a box in I₋ only overlaps itself for |t| < 1/2: ∫|C|² = 2∫₀^{1/2}(1/2 − t)² dt = 1/12
        let g = StepPacket::unit_box(-0.5, 0.0);
        let m = cesaro_decay(&b, &d, &g, &g, &[10.0]).unwrap();
        assert!((m[0] - 1.0 / 12.0 / 20.0).abs() < 1e-15);
    }

    #[test]
    fn block_entries_two_routes() {
        let (b, d) = ex59();
        let f = StepPacket::unit_box(-0.5, 0.0);
        let be = block_matrix_entry(&b, &d, Component::Zero, Component::Minus, &f, 1.5, 1e-14).unwrap();
        assert!(!be.via_evolution.is_zero());
        assert!(be.discrepancy < 1e-12);
        let (b, d) = generic();
        let f = mixed_packet();
        for i in Component::ALL {
            for j in Component::ALL {
                for t in [-1.3, 0.6, 2.2] {
                    let be = block_matrix_entry(&b, &d, i, j, &f, t, 1e-15).unwrap();
                    assert!(be.discrepancy < 1e-11, "({i:?}, {j:?}, {t}): {}", be.discrepancy);
                }
            }
        }
    }
}
