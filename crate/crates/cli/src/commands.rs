//! One function per command. Each returns a report and writes its CSVs
//! through the sink.

use crate::error::CliError;
use crate::output::Sink;
use crate::report::RunReport;
use crate::scenario::Scenario;
use crate::Command;
use lpscatter::characteristics::{traced_norm2, Tracer};
use lpscatter::degenerate::{
    degenerate_conjugation_check, degenerate_evolve, degenerate_multiplier_bounds, degenerate_v, two_point_coefficients,
    DegenerateModel,
};
use lpscatter::eigen::{
    bound_state_spectrum, coeff_a, decoupled_traces, eigen_coeffs, eigenfunction_eval, scattering_routes, DecoupledMode,
};
use lpscatter::evolution::{evolve_any, scatter, scattering_defect};
use lpscatter::rkhs::{
    h1_pairing, kernel_endpoint, kernel_endpoint_derivative, kernel_interior, kernel_interior_derivative, ExpSum,
    Interval, Side,
};
use lpscatter::semigroup::{compress_evolve, norm_decay_profile, resolvent_comparison, sampled_energy};
use lpscatter::spectral::SpectralDensity;
use lpscatter::{Complex64, Component, StepPacket};
use std::f64::consts::TAU;

type Out = Result<RunReport, CliError>;

fn ctx(command: &'static str) -> impl Fn(lpscatter::Error) -> CliError {
    move |source| CliError::Command { command, source }
}

fn record(r: &mut RunReport, written: Option<std::path::PathBuf>) {
    r.files.extend(written);
}

/// Samples of a packet on the scenario's `x` points.
fn packet_rows<'a>(xs: &'a [f64], f: &'a StepPacket) -> impl Iterator<Item = (f64, Complex64)> + 'a {
    xs.iter().map(move |&x| (x, f.eval(x)))
}

pub fn run(cmd: Command, sc: &Scenario, sink: &Sink) -> Out {
    match cmd {
        Command::Eigen => eigen(sc, sink),
        Command::Density => density(sc, sink),
        Command::Smatrix => smatrix(sc, sink),
        Command::Evolve => evolve_cmd(sc, sink),
        Command::Scatter => scatter_cmd(sc, sink),
        Command::Semigroup => semigroup(sc, sink),
        Command::Kernels => kernels(sc, sink),
        Command::Degenerate => degenerate(sc, sink),
        Command::Verify => verify(sc, sink),
    }
}

/// Generalized eigenfunctions: the modulus `m_B(λ)` on the λ grid, the
/// eigenfunction at `λ = 0`, and the boundary condition at every λ.
pub fn eigen(sc: &Scenario, sink: &Sink) -> Out {
    let err = ctx("eigen");
    let (b, d) = (&sc.boundary, &sc.domain);
    let mut r = RunReport::new(&sc.name, "eigen");
    let (lo, hi) = (sc.lambda_grid[0], *sc.lambda_grid.last().unwrap());
    if b.w() == 0.0 {
        let ell = d.ell();
        let n_lo = (lo * ell - b.psi()).floor() as i64;
        let n_hi = (hi * ell - b.psi()).ceil() as i64;
        let levels: Vec<f64> = bound_state_spectrum(b, d, n_lo, n_hi)
            .map_err(&err)?
            .into_iter()
            .filter(|l| (lo..=hi).contains(l))
            .collect();
        let mut worst: f64 = 0.0;
        for &l in &levels {
            worst = worst.max(decoupled_traces(b, d, l, DecoupledMode::Bound).map_err(&err)?.membership_residual(b));
        }
        r.check("bound_state_boundary_residual", worst, 1e-12, format!("{} levels", levels.len()));
        let mut worst: f64 = 0.0;
        for &l in &sc.lambda_grid {
            worst = worst.max(decoupled_traces(b, d, l, DecoupledMode::Continuum).map_err(&err)?.membership_residual(b));
        }
        r.check("continuum_boundary_residual", worst, 1e-12, "");
        record(&mut r, sink.spectrum("bound_states.csv", levels.iter().map(|&l| (l, 1.0 / ell)))?);
        return Ok(r);
    }
    let (mut residual, mut modulus_gap, mut violations): (f64, f64, usize) = (0.0, 0.0, 0);
    let mut rows = Vec::with_capacity(sc.lambda_grid.len());
    for &l in &sc.lambda_grid {
        let ec = eigen_coeffs(b, d, l).map_err(&err)?;
        residual = residual.max(ec.residual / ec.m.max(1.0));
        modulus_gap = modulus_gap.max((ec.a.norm() - ec.c.norm()).abs() / ec.m);
        if ec.m < b.w() / 2.0 || ec.m > 2.0 / b.w() {
            violations += 1;
        }
        rows.push((l, ec.m));
    }
    r.check("boundary_residual", residual, 1e-12, "relative to m_B");
    r.check("modulus_a_equals_c", modulus_gap, 1e-12, "");
    r.require("modulus_bounds", violations == 0, violations as f64, "w/2 <= m_B <= 2/w");
    record(&mut r, sink.spectrum("eigen_modulus.csv", rows)?);
    let xs = sc.x_points();
    let mut samples = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = if d.component_of(x).is_some() {
            eigenfunction_eval(b, d, 0.0, x).map_err(&err)?
        } else {
            Complex64::new(0.0, 0.0)
        };
        samples.push((x, v));
    }
    record(&mut r, sink.packet("eigenfunction_lambda0.csv", samples)?);
    Ok(r)
}

/// Spectral density on the λ grid (atoms for `w = 0`).
pub fn density(sc: &Scenario, sink: &Sink) -> Out {
    let err = ctx("density");
    let (b, d) = (&sc.boundary, &sc.domain);
    let mut r = RunReport::new(&sc.name, "density");
    if b.w() == 0.0 {
        let ell = d.ell();
        let (lo, hi) = (sc.lambda_grid[0], *sc.lambda_grid.last().unwrap());
        let levels: Vec<f64> = bound_state_spectrum(b, d, (lo * ell).floor() as i64 - 1, (hi * ell).ceil() as i64 + 1)
            .map_err(&err)?
            .into_iter()
            .filter(|l| (lo..=hi).contains(l))
            .collect();
        r.measure("atom_count", levels.len() as f64, format!("atoms of weight 1/(alpha-1) = {}", 1.0 / ell));
        record(&mut r, sink.spectrum("atoms.csv", levels.iter().map(|&l| (l, 1.0 / ell)))?);
        return Ok(r);
    }
    let sd = SpectralDensity::new(*b, *d).map_err(&err)?;
    let (lo, hi) = sd.bounds();
    let rows: Vec<(f64, f64)> = sc.lambda_grid.iter().map(|&l| (l, sd.density(l))).collect();
    let outside = rows
        .iter()
        .filter(|(_, v)| *v < lo * (1.0 - 1e-12) || *v > hi * (1.0 + 1e-12))
        .count();
    r.require("density_bounds", outside == 0, outside as f64, format!("[{lo:.6}, {hi:.6}]"));
    let gap = rows
        .iter()
        .map(|&(l, v)| (v * coeff_a(b, d, l).norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    r.check("density_times_modulus_squared", gap, 1e-12, "sigma_B |a|^2 = 1");
    let p = sd.period_integral();
    r.check(
        "period_integral",
        (p - 1.0 / d.ell()).abs(),
        sc.quad_tol,
        format!("integral over one period {p:.15}"),
    );
    // share of the period mass within a tenth of a period of the peak
    let (offset, period) = sd.peak_lattice();
    let window = sd.mass(offset - 0.05 * period, offset + 0.05 * period);
    r.measure("peak_window_share", window / p, "mass within 0.1 period of a peak");
    record(&mut r, sink.spectrum("density.csv", rows)?);
    Ok(r)
}

/// Scattering matrix on the λ grid.
pub fn smatrix(sc: &Scenario, sink: &Sink) -> Out {
    let err = ctx("smatrix");
    let (b, d) = (&sc.boundary, &sc.domain);
    let mut r = RunReport::new(&sc.name, "smatrix");
    let (mut unimodular, mut routes): (f64, f64) = (0.0, 0.0);
    let mut values = Vec::with_capacity(sc.lambda_grid.len());
    for &l in &sc.lambda_grid {
        let [s, q, split] = scattering_routes(b, d, l).map_err(&err)?;
        unimodular = unimodular.max((s.norm() - 1.0).abs());
        routes = routes.max((s - q).norm()).max((s - split).norm());
        values.push((l, s));
    }
    r.check("unimodular", unimodular, 1e-12, "max ||S| - 1|");
    r.check("route_agreement", routes, 1e-12, "a^-1 c vs quotient vs series split");
    record(&mut r, sink.spectrum("smatrix_re.csv", values.iter().map(|(l, s)| (*l, s.re)))?);
    record(&mut r, sink.spectrum("smatrix_im.csv", values.iter().map(|(l, s)| (*l, s.im)))?);
    Ok(r)
}

/// `U_B(t) f` at every scenario time.
pub fn evolve_cmd(sc: &Scenario, sink: &Sink) -> Out {
    let err = ctx("evolve");
    let (b, d) = (&sc.boundary, &sc.domain);
    let mut r = RunReport::new(&sc.name, "evolve");
    let f = sc.packet();
    let n0 = f.norm2();
    let xs = sc.x_points();
    let tracer = Tracer::new(b, d, &f);
    let (mut drift, mut barrier, mut group, mut trace, mut trunc): (f64, f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut norms = Vec::new();
    let mut prev: Option<(f64, StepPacket)> = None;
    for (k, &t) in sc.times.iter().enumerate() {
        let u = evolve_any(b, d, &f, t, sc.eps).map_err(&err)?;
        trunc = trunc.max(u.truncation_error);
        let p = u.packet;
        drift = drift.max((p.norm2() - n0).abs() / n0.max(1.0));
        barrier = barrier.max(p.barrier_norm2(d));
        if let Some((s, q)) = &prev {
            let step = evolve_any(b, d, q, t - s, sc.eps).map_err(&err)?.packet;
            group = group.max(step.l2_distance(&p));
        }
        for &x in xs.iter().step_by(37) {
            if d.component_of(x).is_none() || p.breakpoints().iter().any(|q| (q - x).abs() < 1e-9) {
                continue;
            }
            if let Ok(v) = tracer.value(x, t) {
                trace = trace.max((v - p.eval(x)).norm());
            }
        }
        record(&mut r, sink.packet(&format!("evolve_t{k:02}.csv"), packet_rows(&xs, &p))?);
        norms.push((t, p.norm2()));
        prev = Some((t, p));
    }
    r.check("norm_conservation", drift, 1e-10, "relative | ||U f||^2 - ||f||^2 |");
    r.check("barrier_mass", barrier, 0.0, "mass on the barriers");
    r.check("group_law", group, 1e-9, "U(t_k - t_{k-1}) U(t_{k-1}) f vs U(t_k) f");
    r.check("characteristics", trace, 1e-10, "pointwise gap to traced characteristics");
    r.measure("truncation_bound", trunc, "largest series tail");
    record(&mut r, sink.decay("evolve_norm.csv", norms)?);
    Ok(r)
}

/// Scattering operator applied to the incoming part of the packet.
pub fn scatter_cmd(sc: &Scenario, sink: &Sink) -> Out {
    let err = ctx("scatter");
    let (b, d) = (&sc.boundary, &sc.domain);
    let mut r = RunReport::new(&sc.name, "scatter");
    let f = sc.packet_in(Component::Minus);
    let s = scatter(b, d, &f, sc.eps).map_err(&err)?;
    r.check(
        "isometry",
        (s.packet.norm2() - f.norm2()).abs(),
        1e-10,
        "| ||S f||^2 - ||f||^2 |",
    );
    let mut defects = Vec::new();
    for &t in &sc.times {
        let v = scattering_defect(b, d, &f, t, sc.eps).map_err(&err)?;
        defects.push((t, v * v));
    }
    if let Some(&(t, v)) = defects.iter().max_by(|p, q| p.0.total_cmp(&q.0)) {
        r.measure("wave_operator_defect", v.sqrt(), format!("||U(t) f - S f(. - t)|| at t = {t}"));
    }
    record(&mut r, sink.packet("scatter.csv", packet_rows(&sc.x_points(), &s.packet))?);
    record(&mut r, sink.decay("scatter_defect.csv", defects)?);
    Ok(r)
}

/// Compressed semigroup on the `I₀` part of the packet.
pub fn semigroup(sc: &Scenario, sink: &Sink) -> Out {
    let err = ctx("semigroup");
    let (b, d) = (&sc.boundary, &sc.domain);
    let mut r = RunReport::new(&sc.name, "semigroup");
    let f = sc.packet_in(Component::Zero);
    let (lo, hi) = d.interval(Component::Zero);
    let xs: Vec<f64> = sc.x_points().into_iter().filter(|x| (lo..=hi).contains(x)).collect();
    let mut times = sc.times.clone();
    times.sort_by(f64::total_cmp);
    let (mut excess, mut monotone, mut law, mut oracle, mut margin): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, f64::INFINITY);
    let mut norms = Vec::new();
    let mut prev: Option<(f64, StepPacket)> = None;
    for (k, &t) in times.iter().enumerate() {
        let z = compress_evolve(b, d, &f, t, sc.eps).map_err(&err)?.packet;
        let n = z.norm2();
        excess = excess.max(n - f.norm2());
        if let Some((s, q)) = &prev {
            monotone = monotone.max(n - q.norm2());
            let step = compress_evolve(b, d, q, t - s, sc.eps).map_err(&err)?.packet;
            law = law.max(step.l2_distance(&z));
        }
        oracle = oracle.max((traced_norm2(b, d, &f, t, lo, hi).map_err(&err)? - n).abs());
        margin = margin.min(sampled_energy(b, d, &f, t, 200, sc.eps).map_err(&err)?.margin);
        record(&mut r, sink.packet(&format!("semigroup_t{k:02}.csv"), packet_rows(&xs, &z))?);
        norms.push((t, n));
        prev = Some((t, z));
    }
    r.check("contraction", excess, 1e-12, "max ||Z(t) f||^2 - ||f||^2");
    r.check("monotone_decay", monotone, 1e-12, "largest increase of ||Z(t) f||^2");
    r.check("semigroup_law", law, 1e-10, "Z(t - s) Z(s) f vs Z(t) f");
    r.check("characteristics_oracle", oracle, 1e-10, "norm from traced characteristics");
    r.require("sampled_energy_bound", margin >= 0.0, margin, "smallest margin to (4/w^2)||f||^2");
    let res = resolvent_comparison(b, d, Complex64::new(1.0, 0.0), &f, sc.eps).map_err(&err)?;
    r.measure(
        "resolvent_candidate_gap",
        res.discrepancy,
        format!("||R_B(1) f - R_sp(m_B(0)^2) f|| with ||R_B(1) f|| = {:.4e}", res.resolvent_norm),
    );
    if (d.ell() - 1.0).abs() <= 1e-15 {
        let grid: Vec<f64> = times.iter().copied().filter(|t| *t <= 1.0).collect();
        for s in norm_decay_profile(b, d, 0, &grid).map_err(&err)? {
            r.measure(
                &format!("unit_box_decay_t{}", s.t),
                s.engine,
                format!("||Z(t) chi_0||^2 vs max(1 - t, 0) = {}", s.reference),
            );
        }
    }
    record(&mut r, sink.decay("semigroup_norm.csv", norms)?);
    Ok(r)
}

/// Reproducing kernels of `H¹(I₀)` and their reproduction property.
pub fn kernels(sc: &Scenario, sink: &Sink) -> Out {
    let err = ctx("kernels");
    let mut r = RunReport::new(&sc.name, "kernels");
    let (a, b) = sc.domain.interval(Component::Zero);
    let j = Interval::new(a, b).map_err(&err)?;
    let len = b - a;
    let ys: Vec<f64> = (0..=200).map(|k| a + len * k as f64 / 200.0).collect();
    let mid = 0.5 * (a + b);
    let row = |k: &dyn Fn(f64) -> f64| ys.iter().map(|&y| (y, Complex64::new(k(y), 0.0))).collect::<Vec<_>>();
    record(&mut r, sink.packet("kernel_left.csv", row(&|y| kernel_endpoint(j, Side::Left, y)))?);
    record(&mut r, sink.packet("kernel_right.csv", row(&|y| kernel_endpoint(j, Side::Right, y)))?);
    record(&mut r, sink.packet("kernel_interior.csv", row(&|y| kernel_interior(j, mid, y)))?);
    let mut worst: f64 = 0.0;
    for lam in [-1.3, 0.0, 0.7, 2.1] {
        let f = ExpSum::new(vec![(Complex64::new(1.0, 0.0), Complex64::new(0.0, TAU * lam))]);
        for x in [a + 0.25 * len, mid, a + 0.8 * len] {
            let v = h1_pairing(
                |y| kernel_interior(j, x, y),
                |y| kernel_interior_derivative(j, x, y),
                &f,
                a,
                b,
                &[x],
                sc.quad_tol,
            );
            worst = worst.max((v - f.value(x)).norm());
        }
        for (side, x) in [(Side::Left, a), (Side::Right, b)] {
            let v = h1_pairing(
                |y| kernel_endpoint(j, side, y),
                |y| kernel_endpoint_derivative(j, side, y),
                &f,
                a,
                b,
                &[],
                sc.quad_tol,
            );
            worst = worst.max((v - f.value(x)).norm());
        }
    }
    r.check("reproduction", worst, 1e-6, "<f, k_x>_{H1} vs f(x) for exponentials");
    let pts = [a + 0.1 * len, mid, a + 0.9 * len];
    let asym = pts
        .iter()
        .flat_map(|&x| pts.iter().map(move |&y| (kernel_interior(j, x, y) - kernel_interior(j, y, x)).abs()))
        .fold(0.0, f64::max);
    r.check("kernel_symmetry", asym, 1e-15, "");
    Ok(r)
}

/// Degenerate one-point, one-interval and two-point models.
pub fn degenerate(sc: &Scenario, sink: &Sink) -> Out {
    let err = ctx("degenerate");
    let mut r = RunReport::new(&sc.name, "degenerate");
    let Some(model) = sc.degenerate else {
        return Err(CliError::Validation(vec!["degenerate: scenario has no degenerate section".into()]));
    };
    let f = if sc.packets.is_empty() {
        StepPacket::unit_box(0.0, 1.0)
    } else {
        sc.packet()
    };
    let mut conj: f64 = 0.0;
    for &t in &sc.times {
        conj = conj.max(degenerate_conjugation_check(&model, &f, t).map_err(&err)?);
    }
    r.check("conjugation", conj, 1e-12, "evolution conjugated by V vs free translation");
    match model {
        DegenerateModel::TwoPoints { w, alpha } => {
            let bounds = degenerate_multiplier_bounds(w, alpha, &sc.lambda_grid).map_err(&err)?;
            r.require(
                "multiplier_bounds",
                bounds.holds(),
                bounds.min_abs,
                format!("|a| in [{:.4}, {:.4}] within [w/2, 2/w]", bounds.min_abs, bounds.max_abs),
            );
            r.check("closed_form_modulus", bounds.closed_form_defect, 1e-12, "");
            r.check("main_model_modulus", bounds.main_model_defect, 1e-12, "");
            let rows = sc.lambda_grid.iter().map(|&xi| (xi, two_point_coefficients(w, alpha, xi).0.norm_sqr()));
            record(&mut r, sink.spectrum("degenerate_modulus.csv", rows)?);
        }
        _ => {
            let vf = degenerate_v(&model, &f).map_err(&err)?;
            let xs = sc.x_points();
            let mut drift: f64 = 0.0;
            for (k, &t) in sc.times.iter().enumerate() {
                let u = degenerate_evolve(&model, &vf, t).map_err(&err)?;
                drift = drift.max((u.norm2() - vf.norm2()).abs());
                record(&mut r, sink.packet(&format!("degenerate_t{k:02}.csv"), packet_rows(&xs, &u))?);
            }
            r.check("unitarity", drift, 1e-12, "| ||U V f||^2 - ||V f||^2 |");
        }
    }
    Ok(r)
}

/// Every applicable check for the scenario in one report.
pub fn verify(sc: &Scenario, sink: &Sink) -> Out {
    let mut r = RunReport::new(&sc.name, "verify");
    let coupled = sc.boundary.w() > 0.0;
    let mut plan = vec![Command::Eigen, Command::Density];
    if coupled {
        plan.push(Command::Smatrix);
    }
    if !sc.packets.is_empty() && !sc.times.is_empty() {
        plan.push(Command::Evolve);
    }
    if coupled && sc.has_component(Component::Minus) {
        plan.push(Command::Scatter);
    }
    if coupled && sc.has_component(Component::Zero) && sc.times.iter().all(|&t| t >= 0.0) {
        plan.push(Command::Semigroup);
    }
    plan.push(Command::Kernels);
    if sc.degenerate.is_some() {
        plan.push(Command::Degenerate);
    }
    for cmd in plan {
        r.merge(run(cmd, sc, sink)?);
    }
    Ok(r)
}
