//! Compactly supported piecewise-constant wave packets.
//!
//! A packet is `x ↦ v_i e(κx)` on cell `[x_i, x_{i+1})` and zero outside the
//! outermost breakpoints. The carrier frequency `κ` is shared by all cells;
//! it is zero for ordinary step functions and lets the engine carry the
//! basis functions `e_n χ₀` exactly.

use crate::domain::{Component, ExteriorDomain};
use crate::error::{Error, Result};
use crate::{e, Complex64};
use std::f64::consts::PI;

/// Breakpoints closer than this (relative to `max(1, |x|)`) are merged.
pub const MERGE_TOL: f64 = 1e-14;

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= MERGE_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `∫_p^q e(Δx) dx`, stable for small `Δ`.
pub fn exp_integral(delta: f64, p: f64, q: f64) -> Complex64 {
    let width = q - p;
    if delta == 0.0 {
        return Complex64::new(width, 0.0);
    }
    let arg = PI * delta * width;
    let sinc = if arg.abs() < 1e-8 { width * (1.0 - arg * arg / 6.0) } else { arg.sin() / (PI * delta) };
    e(delta * 0.5 * (p + q)) * sinc
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepPacket {
    breaks: Vec<f64>,
    values: Vec<Complex64>,
    carrier: f64,
}

impl Default for StepPacket {
    fn default() -> Self {
        Self::zero()
    }
}

impl StepPacket {
    pub fn zero() -> Self {
        Self {
            breaks: Vec::new(),
            values: Vec::new(),
            carrier: 0.0,
        }
    }

    /// Packet with `values.len() + 1` strictly increasing breakpoints.
    pub fn new(breaks: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        Self::with_carrier(breaks, values, 0.0)
    }

    pub fn with_carrier(breaks: Vec<f64>, values: Vec<Complex64>, carrier: f64) -> Result<Self> {
        if breaks.is_empty() && values.is_empty() {
            return Ok(Self { carrier, ..Self::zero() });
        }
        if breaks.len() != values.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints need {} values, got {}",
                breaks.len(),
                breaks.len().saturating_sub(1),
                values.len()
            )));
        }
        if breaks.iter().any(|x| !x.is_finite()) || values.iter().any(|v| !v.is_finite()) || !carrier.is_finite() {
            return Err(Error::InvalidArgument("packet data must be finite".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("breakpoints must be strictly increasing".into()));
        }
        Ok(Self::from_raw(breaks, values, carrier))
    }

    /// Constant `value` on `[lo, hi]`.
    pub fn boxed(lo: f64, hi: f64, value: Complex64) -> Self {
        Self::new(vec![lo, hi], vec![value]).expect("box needs lo < hi")
    }

    /// Unit-height box.
    pub fn unit_box(lo: f64, hi: f64) -> Self {
        Self::boxed(lo, hi, Complex64::new(1.0, 0.0))
    }

    /// Canonicalize raw data without validation (breakpoints nondecreasing).
    pub(crate) fn from_raw(breaks: Vec<f64>, values: Vec<Complex64>, carrier: f64) -> Self {
        let mut nb: Vec<f64> = Vec::with_capacity(breaks.len());
        let mut nv: Vec<Complex64> = Vec::with_capacity(values.len());
        for (i, &x) in breaks.iter().enumerate() {
            if i == 0 {
                nb.push(x);
                continue;
            }
            let v = values[i - 1];
            let last = *nb.last().unwrap();
            if near(last, x) {
                // zero-width cell: keep the earlier breakpoint, drop the cell
                continue;
            }
            if let Some(&pv) = nv.last() {
                if pv == v {
                    *nb.last_mut().unwrap() = x;
                    continue;
                }
            }
            nb.push(x);
            nv.push(v);
        }
        // trim zero cells at both ends
        let zero = Complex64::new(0.0, 0.0);
        let first = nv.iter().position(|v| *v != zero);
        match first {
            None => Self { carrier, ..Self::zero() },
            Some(s) => {
                let last = nv.iter().rposition(|v| *v != zero).unwrap();
                Self {
                    breaks: nb[s..=last + 1].to_vec(),
                    values: nv[s..=last].to_vec(),
                    carrier,
                }
            }
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    /// Cell coefficients `v_i` (without the carrier factor).
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, Complex64)> + '_ {
        self.breaks.windows(2).zip(&self.values).map(|(w, v)| (w[0], w[1], *v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// `[first, last]` breakpoint, `None` for the zero packet.
    pub fn support(&self) -> Option<(f64, f64)> {
        if self.is_zero() {
            None
        } else {
            Some((self.breaks[0], *self.breaks.last().unwrap()))
        }
    }

    /// Coefficient of the cell containing `x` (cells are `[x_i, x_{i+1})`).
    pub fn cell_value(&self, x: f64) -> Complex64 {
        if self.is_zero() || x < self.breaks[0] || x >= *self.breaks.last().unwrap() {
            return Complex64::new(0.0, 0.0);
        }
        let i = self.breaks.partition_point(|b| *b <= x) - 1;
        self.values[i]
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let v = self.cell_value(x);
        if self.carrier == 0.0 {
            v
        } else {
            v * e(self.carrier * x)
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self::from_raw(self.breaks.clone(), self.values.iter().map(|v| v * z).collect(), self.carrier)
    }

    /// `x ↦ f(x − t)`.
    pub fn translate(&self, t: f64) -> Self {
        let phase = if self.carrier == 0.0 { Complex64::new(1.0, 0.0) } else { e(-self.carrier * t) };
        Self::from_raw(
            self.breaks.iter().map(|x| x + t).collect(),
            self.values.iter().map(|v| v * phase).collect(),
            self.carrier,
        )
    }

    /// Restriction to `[lo, hi]` (either end may be infinite).
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        if self.is_zero() || hi <= lo {
            return Self { carrier: self.carrier, ..Self::zero() };
        }
        let mut nb = Vec::new();
        let mut nv = Vec::new();
        for (a, b, v) in self.cells() {
            let (p, q) = (a.max(lo), b.min(hi));
            if q <= p {
                continue;
            }
            match nb.last() {
                Some(&last) if last == p => {}
                Some(_) => {
                    nb.push(p);
                    nv.push(Complex64::new(0.0, 0.0));
                }
                None => nb.push(p),
            }
            nb.push(q);
            nv.push(v);
        }
        if nb.is_empty() {
            return Self { carrier: self.carrier, ..Self::zero() };
        }
        Self::from_raw(nb, nv, self.carrier)
    }

    pub fn restrict_component(&self, dom: &ExteriorDomain, c: Component) -> Self {
        let (lo, hi) = dom.interval(c);
        self.restrict(lo, hi)
    }

    /// Restriction to `Ω` (drops whatever lies on the barriers).
    pub fn restrict_omega(&self, dom: &ExteriorDomain) -> Self {
        let parts: Vec<Self> = Component::ALL.iter().map(|&c| self.restrict_component(dom, c)).collect();
        Self::sum(&parts).expect("restrictions share the carrier")
    }

    /// Mass that lies on the barriers `[0,1] ∪ [α,β]`.
    pub fn barrier_norm2(&self, dom: &ExteriorDomain) -> f64 {
        self.restrict(0.0, 1.0).norm2() + self.restrict(dom.alpha(), dom.beta()).norm2()
    }

    fn check_carrier(&self, other: &Self) -> Result<()> {
        if self.carrier != other.carrier && !self.is_zero() && !other.is_zero() {
            Err(Error::CarrierMismatch(self.carrier, other.carrier))
        } else {
            Ok(())
        }
    }

    /// `Σ z_k f_k` over packets with a common carrier.
    pub fn linear_combination(terms: &[(Complex64, &Self)]) -> Result<Self> {
        let live: Vec<&(Complex64, &Self)> = terms.iter().filter(|(_, p)| !p.is_zero()).collect();
        let carrier = live.first().map(|(_, p)| p.carrier).unwrap_or(0.0);
        if let Some((_, bad)) = live.iter().find(|(_, p)| p.carrier != carrier) {
            return Err(Error::CarrierMismatch(carrier, bad.carrier));
        }
        let mut pts: Vec<f64> = live.iter().flat_map(|(_, p)| p.breaks.iter().copied()).collect();
        if pts.is_empty() {
            return Ok(Self { carrier, ..Self::zero() });
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|b, a| near(*a, *b));
        let values = pts
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                live.iter().map(|(z, p)| z * p.cell_value(m)).sum()
            })
            .collect();
        Ok(Self::from_raw(pts, values, carrier))
    }

    pub fn sum(parts: &[Self]) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        let terms: Vec<(Complex64, &Self)> = parts.iter().map(|p| (one, p)).collect();
        Self::linear_combination(&terms)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_carrier(other)?;
        let one = Complex64::new(1.0, 0.0);
        Self::linear_combination(&[(one, self), (one, other)])
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_carrier(other)?;
        Self::linear_combination(&[(Complex64::new(1.0, 0.0), self), (Complex64::new(-1.0, 0.0), other)])
    }

    /// `‖f‖² = Σ |v_i|² (x_{i+1} − x_i)`.
    pub fn norm2(&self) -> f64 {
        self.cells().map(|(a, b, v)| v.norm_sqr() * (b - a)).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm2().sqrt()
    }

    /// `⟨f, g⟩ = ∫ f̄ g` (conjugate-linear in the first slot).
    pub fn inner(&self, other: &Self) -> Complex64 {
        let delta = other.carrier - self.carrier;
        let (mut i, mut j) = (0usize, 0usize);
        let mut acc = Complex64::new(0.0, 0.0);
        let (n, m) = (self.values.len(), other.values.len());
        while i < n && j < m {
            let (a0, a1) = (self.breaks[i], self.breaks[i + 1]);
            let (b0, b1) = (other.breaks[j], other.breaks[j + 1]);
            let (p, q) = (a0.max(b0), a1.min(b1));
            if q > p {
                acc += self.values[i].conj() * other.values[j] * exp_integral(delta, p, q);
            }
            if a1 <= b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        acc
    }

    /// `‖f − g‖`; exact subtraction when the carriers agree.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        match self.sub(other) {
            Ok(d) => d.norm(),
            Err(_) => (self.norm2() + other.norm2() - 2.0 * self.inner(other).re).max(0.0).sqrt(),
        }
    }

    /// `max |f − g|` over cells (common carrier required).
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.values.iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    /// `f̂(λ) = ∫ f(x) e(−λx) dx`, closed form.
    pub fn fourier(&self, lambda: f64) -> Complex64 {
        let delta = self.carrier - lambda;
        self.cells().map(|(a, b, v)| v * exp_integral(delta, a, b)).sum()
    }

    /// Jumps `(x, f(x₊) − f(x₋))` of a carrier-free packet.
    pub fn jumps(&self) -> Vec<(f64, Complex64)> {
        let zero = Complex64::new(0.0, 0.0);
        let mut prev = zero;
        let mut out = Vec::with_capacity(self.breaks.len());
        for (k, &x) in self.breaks.iter().enumerate() {
            let next = self.values.get(k).copied().unwrap_or(zero);
            out.push((x, next - prev));
            prev = next;
        }
        out
    }

    /// `x ↦ Σ_{n_lo ≤ n ≤ n_hi} coeff(n) f(x + base + n·step)` restricted to
    /// `[window.0, window.1]`, evaluated cell by cell without cancellation.
    pub fn lattice_sum<C: Fn(i64) -> Complex64>(
        &self,
        base: f64,
        step: f64,
        n_range: (i64, i64),
        coeff: C,
        window: (f64, f64),
    ) -> Self {
        let carrier = self.carrier;
        let Some((lo_f, hi_f)) = self.support() else {
            return Self { carrier, ..Self::zero() };
        };
        let (wlo, whi) = window;
        assert!(step > 0.0, "lattice step must be positive");
        // term n is supported on [lo_f − s_n, hi_f − s_n], s_n = base + n step
        let n_first = ((lo_f - base - whi) / step).floor().max(n_range.0 as f64 - 1.0);
        let n_last = ((hi_f - base - wlo) / step).ceil().min(n_range.1 as f64 + 1.0);
        let (n_first, n_last) = (
            (n_first as i64).max(n_range.0),
            (n_last as i64).min(n_range.1),
        );
        if n_first > n_last {
            return Self { carrier, ..Self::zero() };
        }
        let mut pts = Vec::new();
        for n in n_first..=n_last {
            let s = base + n as f64 * step;
            if coeff(n) == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &b in &self.breaks {
                let x = b - s;
                if x > wlo && x < whi {
                    pts.push(x);
                }
            }
            let (p, q) = (lo_f - s, hi_f - s);
            if p < whi && q > wlo {
                pts.push(p.max(wlo));
                pts.push(q.min(whi));
            }
        }
        if pts.is_empty() {
            return Self { carrier, ..Self::zero() };
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|b, a| near(*a, *b));
        let values = pts
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                // m + s_n ∈ (lo_f, hi_f)
                let a = ((lo_f - m - base) / step).floor() as i64;
                let b = ((hi_f - m - base) / step).ceil() as i64;
                let mut acc = Complex64::new(0.0, 0.0);
                for n in a.max(n_first)..=b.min(n_last) {
                    let s = base + n as f64 * step;
                    let v = self.cell_value(m + s);
                    if v == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let c = coeff(n);
                    let phase = if carrier == 0.0 { Complex64::new(1.0, 0.0) } else { e(carrier * s) };
                    acc += c * phase * v;
                }
                acc
            })
            .collect();
        Self::from_raw(pts, values, carrier)
    }
}
