//! Flat `key = value` experiment configuration.
//!
//! See `CONFIG.md` in the crate root for the key reference.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use cnls_core::model::{CouplingMatrix, Exponent, ModelParams};
use num_rational::Rational64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Conservation,
    Convergence,
    FreeCheck,
    Decay,
    Morawetz,
    Scattering,
    CriticalSmallData,
    OracleMorawetz,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::Conservation,
        Kind::Convergence,
        Kind::FreeCheck,
        Kind::Decay,
        Kind::Morawetz,
        Kind::Scattering,
        Kind::CriticalSmallData,
        Kind::OracleMorawetz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Conservation => "conservation",
            Kind::Convergence => "convergence",
            Kind::FreeCheck => "free_check",
            Kind::Decay => "decay",
            Kind::Morawetz => "morawetz",
            Kind::Scattering => "scattering",
            Kind::CriticalSmallData => "critical_smalldata",
            Kind::OracleMorawetz => "oracle_morawetz",
        }
    }

    /// Verdict thresholds and their defaults.
    pub fn default_thresholds(self) -> &'static [(&'static str, f64)] {
        match self {
            Kind::Conservation => &[
                ("mass_drift", 1e-10),
                ("energy_drift", 1e-6),
                ("ratio_min", 3.4),
                ("ratio_max", 4.6),
            ],
            Kind::Convergence => &[("plane_wave_error", 1e-11), ("order_min", 1.8), ("order_max", 2.2)],
            Kind::FreeCheck => &[("max_error", 1e-8), ("isometry", 1e-12)],
            Kind::Decay => &[("decay_factor", 0.5), ("min_window", 40.0)],
            Kind::Morawetz => &[("increment_ratio", 1.0)],
            Kind::Scattering => &[],
            Kind::CriticalSmallData => &[("xi_growth", 2.0)],
            Kind::OracleMorawetz => &[("relative", 1e-9)],
        }
    }

    /// Kinds whose horizon defaults to a fraction of the validity window.
    pub fn uses_window_horizon(self) -> bool {
        matches!(
            self,
            Kind::FreeCheck | Kind::Decay | Kind::Morawetz | Kind::Scattering | Kind::CriticalSmallData
        )
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown kind `{s}`, expected one of {}", names.join(", "))
            })
    }
}

/// One Gaussian bump `A exp(-|x-c|²/(2w²)) e^{i v·(x-c)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
    pub amplitude: f64,
    pub velocity: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    /// One bump per component.
    Gaussian(Vec<Bump>),
    /// `c_j e^{i k·x}` with `k_d = 2π n_d / L_d`.
    PlaneWave { modes: Vec<i64>, amplitudes: Vec<f64> },
    /// The same bumps in every component, scaled by a per-component factor.
    MultiBump { bumps: Vec<Bump>, amplitudes: Vec<f64> },
    /// Independent uniform real and imaginary parts in `[-A, A]`.
    Random { amplitude: f64 },
}

impl DataSpec {
    pub fn family(&self) -> &'static str {
        match self {
            DataSpec::Gaussian(_) => "gaussian",
            DataSpec::PlaneWave { .. } => "plane_wave",
            DataSpec::MultiBump { .. } => "multi_bump",
            DataSpec::Random { .. } => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: String,
    pub kind: Kind,
    pub model: ModelParams,
    pub points: Vec<usize>,
    pub box_lengths: Vec<f64>,
    pub dt: f64,
    pub t_end: Option<f64>,
    pub record_every: usize,
    pub seed: u64,
    pub data: DataSpec,
    pub window_fraction: f64,
    pub window_factor: f64,
    pub gn_edge: Option<f64>,
    pub track_scattering: bool,
    pub thresholds: BTreeMap<String, f64>,
    pub scattering_levels: usize,
    pub xi_targets: Vec<f64>,
    pub report_targets: Vec<f64>,
    pub bootstrap_theta: Option<f64>,
    pub bootstrap_b: f64,
    pub oracle_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

/// Every problem found in one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

const GENERAL_KEYS: &[&str] = &[
    "id",
    "kind",
    "dim",
    "components",
    "p",
    "coupling",
    "points",
    "box",
    "dt",
    "t_end",
    "steps",
    "record_every",
    "seed",
    "window.fraction",
    "window.factor",
    "diagnostics.gn_edge",
    "diagnostics.scattering",
    "data.family",
    "data.center",
    "data.width",
    "data.amplitude",
    "data.velocity",
    "data.mode",
    "data.bumps",
];

fn kind_keys(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Scattering => &["scattering.levels"],
        Kind::CriticalSmallData => &[
            "critical.xi_targets",
            "critical.report_targets",
            "bootstrap.theta",
            "bootstrap.b",
        ],
        Kind::OracleMorawetz => &["oracle.samples"],
        _ => &[],
    }
}

/// Parses `p` as an exact rational when written as an integer, a fraction
/// `a/b` or a plain decimal; anything else is kept as a float.
pub fn parse_exponent(s: &str) -> Result<Exponent, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
        let b: i64 = b.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
        if b == 0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Exponent::Rational(Rational64::new(a, b)));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Ok(Exponent::integer(n));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
        if !int.is_empty() && digits_ok(int) && digits_ok(frac) && frac.len() <= 15 {
            let denom = 10i64.pow(frac.len() as u32);
            let numer: i64 = format!("{int}{frac}")
                .parse()
                .map_err(|_| format!("bad number `{s}`"))?;
            return Ok(Exponent::Rational(Rational64::new(numer, denom)));
        }
    }
    let x: f64 = s.parse().map_err(|_| format!("bad number `{s}`"))?;
    Ok(Exponent::Real(x))
}

struct Reader {
    values: BTreeMap<String, String>,
    errors: Vec<ConfigError>,
}

impl Reader {
    fn err(&mut self, key: &str, message: impl Into<String>) {
        self.errors.push(ConfigError {
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parse_list<T: FromStr>(&mut self, key: &str) -> Option<Vec<T>> {
        let raw = self.raw(key)?.to_string();
        let mut out = Vec::new();
        for item in raw.split(',') {
            match item.trim().parse::<T>() {
                Ok(v) => out.push(v),
                Err(_) => {
                    self.err(key, format!("cannot parse `{}`", item.trim()));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn parse_one<T: FromStr>(&mut self, key: &str) -> Option<T> {
        let raw = self.raw(key)?.trim().to_string();
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.err(key, format!("cannot parse `{raw}`"));
                None
            }
        }
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Option<T> {
        if self.raw(key).is_none() {
            self.err(key, "missing required key");
            return None;
        }
        self.parse_one(key)
    }

    fn positive(&mut self, key: &str, value: Option<f64>) -> Option<f64> {
        match value {
            Some(v) if v.is_finite() && v > 0.0 => Some(v),
            Some(v) => {
                self.err(key, format!("must be positive and finite, got {v}"));
                None
            }
            None => None,
        }
    }

    /// `n` values, or one value broadcast to `n`.
    fn broadcast<T: FromStr + Clone>(&mut self, key: &str, n: usize) -> Option<Vec<T>> {
        let list = self.parse_list::<T>(key)?;
        match list.len() {
            1 => Some(vec![list[0].clone(); n]),
            len if len == n => Some(list),
            len => {
                self.err(key, format!("expected 1 or {n} values, got {len}"));
                None
            }
        }
    }

    /// Per-component vectors of length `dim`: `dim` values shared by all
    /// components or `m · dim` values, component-major.
    fn per_component_vectors(&mut self, key: &str, dim: usize, m: usize, default: f64) -> Option<Vec<Vec<f64>>> {
        let Some(list) = self.parse_list::<f64>(key) else {
            return if self.raw(key).is_some() {
                None
            } else {
                Some(vec![vec![default; dim]; m])
            };
        };
        if list.len() == dim {
            Some(vec![list; m])
        } else if list.len() == dim * m {
            Some(list.chunks(dim).map(<[f64]>::to_vec).collect())
        } else {
            self.err(key, format!("expected {dim} or {} values, got {}", dim * m, list.len()));
            None
        }
    }
}

fn parse_bumps(r: &mut Reader, dim: usize) -> Option<Vec<Bump>> {
    let Some(raw) = r.raw("data.bumps").map(str::to_string) else {
        r.err("data.bumps", "missing required key for family multi_bump");
        return None;
    };
    let mut bumps = Vec::new();
    for (i, entry) in raw.split(';').enumerate() {
        let nums: Result<Vec<f64>, _> = entry.split(',').map(|t| t.trim().parse::<f64>()).collect();
        let Ok(nums) = nums else {
            r.err("data.bumps", format!("bump {} has a non-numeric entry", i + 1));
            return None;
        };
        if nums.len() != 2 * dim + 2 {
            r.err(
                "data.bumps",
                format!(
                    "bump {} needs {} numbers (center, width, amplitude, velocity), got {}",
                    i + 1,
                    2 * dim + 2,
                    nums.len()
                ),
            );
            return None;
        }
        if !(nums[dim] > 0.0) {
            r.err("data.bumps", format!("bump {} width must be positive", i + 1));
            return None;
        }
        bumps.push(Bump {
            center: nums[..dim].to_vec(),
            width: nums[dim],
            amplitude: nums[dim + 1],
            velocity: nums[dim + 2..].to_vec(),
        });
    }
    Some(bumps)
}

fn parse_data(r: &mut Reader, kind: Kind, dim: usize, m: usize) -> Option<DataSpec> {
    let default_family = if kind == Kind::OracleMorawetz { "random" } else { "gaussian" };
    let family = r.raw("data.family").unwrap_or(default_family).trim().to_string();
    let amplitudes = if r.raw("data.amplitude").is_some() {
        r.broadcast::<f64>("data.amplitude", m)?
    } else {
        vec![1.0; m]
    };
    match family.as_str() {
        "gaussian" => {
            let centers = r.per_component_vectors("data.center", dim, m, 0.0)?;
            let velocities = r.per_component_vectors("data.velocity", dim, m, 0.0)?;
            let widths = if r.raw("data.width").is_some() {
                r.broadcast::<f64>("data.width", m)?
            } else {
                vec![1.0; m]
            };
            if widths.iter().any(|w| !(*w > 0.0)) {
                r.err("data.width", "widths must be positive");
                return None;
            }
            Some(DataSpec::Gaussian(
                (0..m)
                    .map(|j| Bump {
                        center: centers[j].clone(),
                        width: widths[j],
                        amplitude: amplitudes[j],
                        velocity: velocities[j].clone(),
                    })
                    .collect(),
            ))
        }
        "plane_wave" => {
            let modes = if r.raw("data.mode").is_some() {
                r.broadcast::<i64>("data.mode", dim)?
            } else {
                vec![0; dim]
            };
            Some(DataSpec::PlaneWave { modes, amplitudes })
        }
        "multi_bump" => {
            let bumps = parse_bumps(r, dim)?;
            Some(DataSpec::MultiBump { bumps, amplitudes })
        }
        "random" => Some(DataSpec::Random {
            amplitude: amplitudes[0],
        }),
        other => {
            r.err(
                "data.family",
                format!("unknown family `{other}`, expected gaussian, plane_wave, multi_bump or random"),
            );
            None
        }
    }
}

/// Parses and validates a configuration, collecting every error found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let mut r = Reader {
        values: BTreeMap::new(),
        errors: Vec::new(),
    };
    for (lineno, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            r.err(&format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`"));
            continue;
        };
        let key = key.trim().to_string();
        if r.values.insert(key.clone(), value.trim().to_string()).is_some() {
            r.err(&key, "key given more than once");
        }
    }

    let kind: Option<Kind> = match r.raw("kind").map(str::to_string) {
        None => {
            r.err("kind", "missing required key");
            None
        }
        Some(s) => match s.parse::<Kind>() {
            Ok(k) => Some(k),
            Err(e) => {
                r.err("kind", e);
                None
            }
        },
    };

    let mut allowed: BTreeSet<String> = GENERAL_KEYS.iter().map(|s| s.to_string()).collect();
    if let Some(kind) = kind {
        allowed.extend(kind_keys(kind).iter().map(|s| s.to_string()));
        allowed.extend(kind.default_thresholds().iter().map(|(n, _)| format!("threshold.{n}")));
    }
    let unknown: Vec<String> = r.values.keys().filter(|k| !allowed.contains(*k)).cloned().collect();
    for key in unknown {
        r.err(&key, "unknown key");
    }

    let dim: Option<usize> = r.required("dim");
    if let Some(d) = dim {
        if !(1..=4).contains(&d) {
            r.err("dim", format!("must be 1, 2, 3 or 4, got {d}"));
        }
    }
    let dim = dim.filter(|d| (1..=4).contains(d));
    let m: usize = if r.raw("components").is_some() {
        r.parse_one("components").unwrap_or(1)
    } else {
        1
    };
    if m == 0 {
        r.err("components", "must be at least 1");
    }
    let m = m.max(1);

    let p = match r.raw("p").map(str::to_string) {
        None => {
            r.err("p", "missing required key");
            None
        }
        Some(s) => match parse_exponent(&s) {
            Ok(p) => Some(p),
            Err(e) => {
                r.err("p", e);
                None
            }
        },
    };
    let coupling = if r.raw("coupling").is_none() {
        r.err("coupling", "missing required key");
        None
    } else {
        r.parse_list::<f64>("coupling")
    };
    let coupling = coupling.and_then(|entries| match CouplingMatrix::new(m, entries) {
        Ok(c) => Some(c),
        Err(e) => {
            r.err("coupling", e.to_string());
            None
        }
    });
    let model = match (dim, p, coupling) {
        (Some(dim), Some(p), Some(c)) => match ModelParams::new(dim, p, c) {
            Ok(model) => Some(model),
            Err(e) => {
                r.err("p", e.to_string());
                None
            }
        },
        _ => None,
    };

    let points = match dim {
        Some(d) if r.raw("points").is_some() => r.broadcast::<usize>("points", d),
        _ => {
            if r.raw("points").is_none() {
                r.err("points", "missing required key");
            }
            None
        }
    };
    if let Some(pts) = &points {
        if pts.iter().any(|n| *n < 2 || n % 2 != 0) {
            r.err("points", "point counts must be even and at least 2");
        }
    }
    let box_lengths = match dim {
        Some(d) if r.raw("box").is_some() => r.broadcast::<f64>("box", d),
        _ => {
            if r.raw("box").is_none() {
                r.err("box", "missing required key");
            }
            None
        }
    };
    if let Some(b) = &box_lengths {
        if b.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            r.err("box", "box lengths must be positive");
        }
    }

    let dt = if r.raw("dt").is_some() {
        let v = r.parse_one("dt");
        r.positive("dt", v)
    } else {
        Some(1e-3)
    };
    let record_every: usize = if r.raw("record_every").is_some() {
        r.parse_one("record_every").unwrap_or(10)
    } else {
        10
    };
    if record_every == 0 {
        r.err("record_every", "must be positive");
    }
    let seed: u64 = if r.raw("seed").is_some() {
        r.parse_one("seed").unwrap_or(0)
    } else {
        0
    };

    let mut t_end: Option<f64> = if r.raw("t_end").is_some() {
        let v = r.parse_one("t_end");
        r.positive("t_end", v)
    } else {
        None
    };
    if r.raw("steps").is_some() {
        if t_end.is_some() {
            r.err("steps", "give either t_end or steps, not both");
        }
        let steps: Option<usize> = r.parse_one("steps");
        match (steps, dt) {
            (Some(0), _) => r.err("steps", "must be positive"),
            (Some(n), Some(dt)) => t_end = Some(n as f64 * dt),
            _ => {}
        }
    }
    if let Some(kind) = kind {
        let needs_t_end = !kind.uses_window_horizon() && kind != Kind::OracleMorawetz;
        if needs_t_end && t_end.is_none() && r.raw("steps").is_none() {
            r.err("t_end", format!("required for kind {kind} (or give steps)"));
        }
    }

    let window_fraction: f64 = r.parse_one("window.fraction").unwrap_or(cnls_core::integrator::DEFAULT_ENERGY_FRACTION);
    if !(window_fraction > 0.0 && window_fraction < 1.0) {
        r.err("window.fraction", format!("must lie in (0, 1), got {window_fraction}"));
    }
    let window_factor: f64 = r.parse_one("window.factor").unwrap_or(0.9);
    if !(window_factor > 0.0 && window_factor.is_finite()) {
        r.err("window.factor", format!("must be positive, got {window_factor}"));
    }
    let gn_edge = {
        let v = r.parse_one("diagnostics.gn_edge");
        r.positive("diagnostics.gn_edge", v)
    };
    let track_scattering = r.parse_one::<bool>("diagnostics.scattering").unwrap_or(false) || kind == Some(Kind::Scattering);

    let mut thresholds = BTreeMap::new();
    if let Some(kind) = kind {
        for (name, default) in kind.default_thresholds() {
            let key = format!("threshold.{name}");
            let v = r.parse_one::<f64>(&key).unwrap_or(*default);
            thresholds.insert(name.to_string(), v);
        }
    }

    let scattering_levels: usize = r.parse_one("scattering.levels").unwrap_or(3);
    if scattering_levels < 3 && kind == Some(Kind::Scattering) {
        r.err("scattering.levels", format!("at least 3 dyadic levels are required, got {scattering_levels}"));
    }
    let xi_targets = r.parse_list::<f64>("critical.xi_targets").unwrap_or_else(|| vec![1e-4, 1e-3]);
    let report_targets = r.parse_list::<f64>("critical.report_targets").unwrap_or_else(|| vec![1e-2]);
    if xi_targets.iter().chain(&report_targets).any(|x| !(*x > 0.0)) {
        r.err("critical.xi_targets", "targets must be positive");
    }
    let bootstrap_theta: Option<f64> = r.parse_one("bootstrap.theta");
    if kind == Some(Kind::CriticalSmallData) && bootstrap_theta.is_none() && dim.is_some_and(|d| d <= 2) {
        r.err("bootstrap.theta", "required when dim <= 2 (no finite N/(N-2))");
    }
    let bootstrap_b: f64 = r.parse_one("bootstrap.b").unwrap_or(1.0);
    let oracle_samples: usize = r.parse_one("oracle.samples").unwrap_or(3);

    let data = match (kind, dim) {
        (Some(kind), Some(dim)) => parse_data(&mut r, kind, dim, m),
        _ => None,
    };
    if let (Some(kind), Some(data)) = (kind, &data) {
        if kind == Kind::FreeCheck && !matches!(data, DataSpec::Gaussian(_)) {
            r.err("data.family", format!("family {} is not supported by kind {kind}", data.family()));
        }
    }

    let id = r.raw("id").map(str::to_string).or_else(|| kind.map(|k| k.name().to_string()));
    if let Some(id) = &id {
        if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            r.err("id", "must be non-empty and use only letters, digits, `_` and `-`");
        }
    }

    if !r.errors.is_empty() {
        return Err(ConfigErrors(r.errors));
    }
    Ok(ExperimentConfig {
        id: id.unwrap(),
        kind: kind.unwrap(),
        model: model.unwrap(),
        points: points.unwrap(),
        box_lengths: box_lengths.unwrap(),
        dt: dt.unwrap(),
        t_end,
        record_every,
        seed,
        data: data.unwrap(),
        window_fraction,
        window_factor,
        gn_edge,
        track_scattering,
        thresholds,
        scattering_levels,
        xi_targets,
        report_targets,
        bootstrap_theta,
        bootstrap_b,
        oracle_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_literals() {
        assert_eq!(parse_exponent("3").unwrap(), Exponent::integer(3));
        assert_eq!(parse_exponent("5/3").unwrap(), Exponent::ratio(5, 3));
        assert_eq!(parse_exponent("2.5").unwrap(), Exponent::ratio(5, 2));
        assert_eq!(parse_exponent("1e0").unwrap(), Exponent::Real(1.0));
        assert!(parse_exponent("x").is_err());
        assert!(parse_exponent("1/0").is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in Kind::ALL {
            assert_eq!(k.name().parse::<Kind>().unwrap(), k);
        }
    }
}
