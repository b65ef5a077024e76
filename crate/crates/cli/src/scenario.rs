//! Scenario documents: JSON with schema tag `lpscatter/1`.

use crate::error::CliError;
use crate::Command;
use lpscatter::degenerate::DegenerateModel;
use lpscatter::{BoundaryMatrix, Complex64, Component, ExteriorDomain, StepPacket};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SCHEMA: &str = "lpscatter/1";

/// Scenarios shipped with the binary, addressable by name.
pub const BUNDLED: [(&str, &str); 6] = [
    ("example_5_8", include_str!("../scenarios/example_5_8.json")),
    ("example_5_9", include_str!("../scenarios/example_5_9.json")),
    ("w_zero_boundstates", include_str!("../scenarios/w_zero_boundstates.json")),
    ("w_one_splice", include_str!("../scenarios/w_one_splice.json")),
    ("comb_limit", include_str!("../scenarios/comb_limit.json")),
    ("two_points", include_str!("../scenarios/two_points.json")),
];

pub const DEFAULT_TIMES: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 4.0];
pub const DEFAULT_EPS: f64 = 1e-12;
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Raw document as written on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema: String,
    #[serde(default)]
    pub name: Option<String>,
    pub domain: DomainSpec,
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub packets: Vec<PacketSpec>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub lambda_grid: Option<GridSpec>,
    #[serde(default)]
    pub x_grid: Option<GridSpec>,
    #[serde(default)]
    pub tolerances: Option<ToleranceSpec>,
    #[serde(default)]
    pub degenerate: Option<DegenerateSpec>,
    /// Only used to validate command-specific requirements.
    #[serde(default)]
    pub command: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub w: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub psi: f64,
}

/// Step function on one component: `values[i]` (as `[re, im]`) on
/// `[breaks[i], breaks[i+1]]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub component: String,
    pub breaks: Vec<f64>,
    pub values: Vec<[f64; 2]>,
}

/// `n` intervals on `[lo, hi]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        (0..=self.n)
            .map(|k| self.lo + (self.hi - self.lo) * k as f64 / self.n as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub quad_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegenerateSpec {
    pub model: String,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub w: Option<f64>,
}

/// Validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub domain: ExteriorDomain,
    pub boundary: BoundaryMatrix,
    pub packets: Vec<(Component, StepPacket)>,
    pub times: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    pub x_grid: Option<Vec<f64>>,
    pub eps: f64,
    pub quad_tol: f64,
    pub degenerate: Option<DegenerateModel>,
}

impl Scenario {
    /// Sum of all packets.
    pub fn packet(&self) -> StepPacket {
        let parts: Vec<StepPacket> = self.packets.iter().map(|(_, p)| p.clone()).collect();
        StepPacket::sum(&parts).unwrap_or_else(|_| StepPacket::zero())
    }

    /// Sum of the packets tagged with `c`.
    pub fn packet_in(&self, c: Component) -> StepPacket {
        let parts: Vec<StepPacket> = self.packets.iter().filter(|(k, _)| *k == c).map(|(_, p)| p.clone()).collect();
        StepPacket::sum(&parts).unwrap_or_else(|_| StepPacket::zero())
    }

    pub fn has_component(&self, c: Component) -> bool {
        self.packets.iter().any(|(k, _)| *k == c)
    }

    /// Sample points in `x`: the scenario grid, or a window covering every
    /// packet position reached within the time grid.
    pub fn x_points(&self) -> Vec<f64> {
        if let Some(x) = &self.x_grid {
            return x.clone();
        }
        let reach = self.times.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let lo = (-2.0 - reach).floor();
        let hi = (self.domain.beta() + 2.0 + reach).ceil();
        GridSpec {
            lo,
            hi,
            n: ((hi - lo) * 200.0).round() as usize,
        }
        .points()
    }
}

/// Where a scenario came from: a file path or a bundled name.
pub fn resolve_source(spec: &str) -> Result<(String, Option<PathBuf>), CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        return Ok((text, Some(path.to_path_buf())));
    }
    if let Some((_, text)) = BUNDLED.iter().find(|(n, _)| *n == spec) {
        return Ok((text.to_string(), None));
    }
    Err(CliError::Io {
        path: path.to_path_buf(),
        message: format!(
            "no such file and no bundled scenario of that name (bundled: {})",
            BUNDLED.map(|(n, _)| n).join(", ")
        ),
    })
}

/// Reads and validates a scenario from a path or bundled name. When
/// `command` is given its specific requirements are checked as well.
pub fn load_scenario(spec: &str, command: Option<Command>) -> Result<Scenario, CliError> {
    let (text, path) = resolve_source(spec)?;
    let fallback = path
        .as_ref()
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string());
    parse_scenario(&text, &fallback, command)
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str, fallback_name: &str, command: Option<Command>) -> Result<Scenario, CliError> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    validate(file, fallback_name, command)
}

fn component_from_tag(tag: &str) -> Option<Component> {
    match tag {
        "minus" | "-" => Some(Component::Minus),
        "zero" | "0" => Some(Component::Zero),
        "plus" | "+" => Some(Component::Plus),
        _ => None,
    }
}

fn check_grid(name: &str, g: &GridSpec, errs: &mut Vec<String>) {
    if !(g.lo.is_finite() && g.hi.is_finite() && g.lo < g.hi) {
        errs.push(format!("{name}: need finite lo < hi, got lo = {}, hi = {}", g.lo, g.hi));
    }
    if g.n == 0 || g.n > 1_000_000 {
        errs.push(format!("{name}: n must lie in [1, 1000000], got {}", g.n));
    }
}

/// Collects every violated constraint before failing.
pub fn validate(file: ScenarioFile, fallback_name: &str, command: Option<Command>) -> Result<Scenario, CliError> {
    let mut errs = Vec::new();
    if file.schema != SCHEMA {
        errs.push(format!("schema: expected \"{SCHEMA}\", got \"{}\"", file.schema));
    }
    let (alpha, beta) = (file.domain.alpha, file.domain.beta);
    let domain = ExteriorDomain::new(alpha, beta);
    if domain.is_err() {
        errs.push(format!("domain: ordering constraint 1 < alpha < beta violated (alpha = {alpha}, beta = {beta})"));
    }
    let bs = &file.boundary;
    for (name, v) in [("theta", bs.theta), ("phi", bs.phi), ("psi", bs.psi)] {
        if !v.is_finite() {
            errs.push(format!("boundary.{name}: must be finite, got {v}"));
        }
    }
    if !(0.0..=1.0).contains(&bs.w) {
        errs.push(format!("boundary.w: must lie in [0, 1], got {}", bs.w));
    }
    let boundary = BoundaryMatrix::new(bs.w, bs.theta, bs.phi, bs.psi).ok();

    let mut packets = Vec::new();
    for (i, p) in file.packets.iter().enumerate() {
        let tag = format!("packets[{i}]");
        let comp = component_from_tag(&p.component);
        if comp.is_none() {
            errs.push(format!("{tag}.component: expected minus, zero or plus, got \"{}\"", p.component));
        }
        let mut ok = comp.is_some();
        if p.breaks.len() < 2 {
            errs.push(format!("{tag}.breaks: need at least two breakpoints"));
            ok = false;
        } else if p.breaks.windows(2).any(|w| !(w[0] < w[1])) || p.breaks.iter().any(|x| !x.is_finite()) {
            errs.push(format!("{tag}.breaks: must be finite and strictly increasing"));
            ok = false;
        }
        if p.values.len() + 1 != p.breaks.len() {
            errs.push(format!(
                "{tag}.values: need one value per cell ({} cells), got {}",
                p.breaks.len().saturating_sub(1),
                p.values.len()
            ));
            ok = false;
        }
        if p.values.iter().flatten().any(|v| !v.is_finite()) {
            errs.push(format!("{tag}.values: must be finite"));
            ok = false;
        }
        if let (Some(c), Ok(d)) = (comp, &domain) {
            let (lo, hi) = d.interval(c);
            if p.breaks.first().is_some_and(|&x| x < lo) || p.breaks.last().is_some_and(|&x| x > hi) {
                errs.push(format!(
                    "{tag}: support [{}, {}] leaves component {} = ({lo}, {hi})",
                    p.breaks.first().unwrap(),
                    p.breaks.last().unwrap(),
                    p.component
                ));
                ok = false;
            }
        }
        if ok {
            let values = p.values.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            match StepPacket::new(p.breaks.clone(), values) {
                Ok(f) => packets.push((comp.unwrap(), f)),
                Err(e) => errs.push(format!("{tag}: {e}")),
            }
        }
    }

    let times = file.times.clone().unwrap_or_else(|| DEFAULT_TIMES.to_vec());
    if times.iter().any(|t| !t.is_finite()) {
        errs.push("times: must be finite".into());
    }
    let lambda_spec = file.lambda_grid.unwrap_or(GridSpec {
        lo: -3.0,
        hi: 3.0,
        n: 600,
    });
    check_grid("lambda_grid", &lambda_spec, &mut errs);
    if let Some(g) = &file.x_grid {
        check_grid("x_grid", g, &mut errs);
    }
    let tol = file.tolerances.unwrap_or_default();
    let eps = tol.eps.unwrap_or(DEFAULT_EPS);
    let quad_tol = tol.quad_tol.unwrap_or(DEFAULT_QUAD_TOL);
    if !(eps > 0.0 && eps < 1.0) {
        errs.push(format!("tolerances.eps: must lie in (0, 1), got {eps}"));
    }
    if !(quad_tol > 0.0 && quad_tol < 1.0) {
        errs.push(format!("tolerances.quad_tol: must lie in (0, 1), got {quad_tol}"));
    }

    let degenerate = file.degenerate.as_ref().and_then(|d| degenerate_model(d, &mut errs));

    let command = match (command, file.command.as_deref()) {
        (Some(c), _) => Some(c),
        (None, Some(name)) => match Command::from_name(name) {
            Some(c) => Some(c),
            None => {
                errs.push(format!("command: unknown command \"{name}\""));
                None
            }
        },
        (None, None) => None,
    };
    if let Some(cmd) = command {
        command_requirements(cmd, &file, &packets, &times, &mut errs);
    }

    if !errs.is_empty() {
        return Err(CliError::Validation(errs));
    }
    Ok(Scenario {
        name: file.name.unwrap_or_else(|| fallback_name.to_string()),
        domain: domain.expect("checked above"),
        boundary: boundary.expect("checked above"),
        packets,
        times,
        lambda_grid: lambda_spec.points(),
        x_grid: file.x_grid.map(|g| g.points()),
        eps,
        quad_tol,
        degenerate,
    })
}

fn degenerate_model(d: &DegenerateSpec, errs: &mut Vec<String>) -> Option<DegenerateModel> {
    let need = |name: &str, v: Option<f64>, errs: &mut Vec<String>| {
        if v.is_none() {
            errs.push(format!("degenerate.{name}: required for model \"{}\"", d.model));
        }
        v
    };
    let built = match d.model.as_str() {
        "one_point" => need("theta", d.theta, errs).map(DegenerateModel::one_point),
        "one_interval" => match (need("theta", d.theta, errs), need("alpha", d.alpha, errs)) {
            (Some(t), Some(a)) => Some(DegenerateModel::one_interval(t, a)),
            _ => None,
        },
        "two_points" => match (need("w", d.w, errs), need("alpha", d.alpha, errs)) {
            (Some(w), Some(a)) => Some(DegenerateModel::two_points(w, a)),
            _ => None,
        },
        other => {
            errs.push(format!(
                "degenerate.model: expected one_point, one_interval or two_points, got \"{other}\""
            ));
            None
        }
    };
    match built {
        Some(Ok(m)) => Some(m),
        Some(Err(e)) => {
            errs.push(format!("degenerate: {e}"));
            None
        }
        None => None,
    }
}

fn command_requirements(
    cmd: Command,
    file: &ScenarioFile,
    packets: &[(Component, StepPacket)],
    times: &[f64],
    errs: &mut Vec<String>,
) {
    let coupled = file.boundary.w > 0.0;
    let has = |c: Component| packets.iter().any(|(k, _)| *k == c);
    match cmd {
        Command::Evolve => {
            if file.packets.is_empty() {
                errs.push("packets: command evolve needs at least one packet".into());
            }
            if times.is_empty() {
                errs.push("times: command evolve needs at least one time".into());
            }
        }
        Command::Scatter => {
            if !coupled {
                errs.push("boundary.w: command scatter needs w > 0".into());
            }
            if !has(Component::Minus) {
                errs.push("packets: command scatter needs a packet on component minus".into());
            }
        }
        Command::Semigroup => {
            if !coupled {
                errs.push("boundary.w: command semigroup needs w > 0".into());
            }
            if !has(Component::Zero) {
                errs.push("packets: command semigroup needs a packet on component zero".into());
            }
            if times.is_empty() || times.iter().any(|&t| t < 0.0) {
                errs.push("times: command semigroup needs a nonempty list of times t >= 0".into());
            }
        }
        Command::Smatrix => {
            if !coupled {
                errs.push("boundary.w: command smatrix needs w > 0".into());
            }
        }
        Command::Degenerate => {
            if file.degenerate.is_none() {
                errs.push("degenerate: command degenerate needs a degenerate section".into());
            }
        }
        Command::Eigen | Command::Density | Command::Kernels | Command::Verify => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_scenario_validates() {
        for (name, _) in BUNDLED {
            let s = load_scenario(name, None).unwrap();
            assert_eq!(s.name, name);
        }
    }

    #[test]
    fn example_5_9_parameters() {
        let s = load_scenario("example_5_9", None).unwrap();
        assert_eq!((s.domain.alpha(), s.domain.beta()), (2.0, 3.0));
        assert!((s.boundary.w() - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(s.packets.len(), 1);
        assert_eq!(s.packets[0].0, Component::Minus);
        assert_eq!(s.packets[0].1.support(), Some((-0.5, 0.0)));
    }

    #[test]
    fn all_violations_are_listed() {
        let text = r#"{"schema": "lpscatter/0", "domain": {"alpha": 3.0, "beta": 2.0},
            "boundary": {"w": 1.5},
            "packets": [{"component": "middle", "breaks": [0.0, -1.0], "values": []}],
            "tolerances": {"eps": -1.0}}"#;
        match parse_scenario(text, "t", None) {
            Err(CliError::Validation(v)) => {
                let joined = v.join("\n");
                for key in ["schema", "ordering", "boundary.w", "component", "breaks", "values", "eps"] {
                    assert!(joined.contains(key), "missing {key} in {joined}");
                }
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(parse_scenario("{ not json", "t", None), Err(CliError::Parse(_))));
        let unknown = r#"{"schema": "lpscatter/1", "domain": {"alpha": 2, "beta": 3}, "boundary": {"w": 1}, "extra": 1}"#;
        assert!(matches!(parse_scenario(unknown, "t", None), Err(CliError::Parse(_))));
    }

    #[test]
    fn packets_outside_their_component_are_rejected() {
        let text = r#"{"schema": "lpscatter/1", "domain": {"alpha": 2, "beta": 3}, "boundary": {"w": 0.5},
            "packets": [{"component": "zero", "breaks": [0.5, 1.5], "values": [[1, 0]]}]}"#;
        match parse_scenario(text, "t", None) {
            Err(CliError::Validation(v)) => assert!(v[0].contains("leaves component")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn command_specific_requirements() {
        let text = r#"{"schema": "lpscatter/1", "domain": {"alpha": 2, "beta": 3}, "boundary": {"w": 0}}"#;
        assert!(parse_scenario(text, "t", None).is_ok());
        for cmd in [Command::Evolve, Command::Scatter, Command::Semigroup, Command::Smatrix, Command::Degenerate] {
            assert!(matches!(parse_scenario(text, "t", Some(cmd)), Err(CliError::Validation(_))), "{cmd:?}");
        }
    }

    #[test]
    fn default_x_window_covers_the_time_range() {
        let s = load_scenario("example_5_9", None).unwrap();
        let x = s.x_points();
        assert!(x[0] <= -6.0 && *x.last().unwrap() >= 9.0);
    }
}
