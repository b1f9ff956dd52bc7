//! Run configuration: a JSON document, flag overrides, defaults and validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use poiseuille_core::estimates::GridPolicy;
use poiseuille_core::force::ForceFamily;
use poiseuille_core::grid::{MAX_ORDER, MIN_ORDER};
use poiseuille_core::mode::ModeParams;
use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Solve,
    Sweep,
    Decompose,
    Nonlinear,
    Uniqueness,
    Inequalities,
    Spectrum,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Decompose => "decompose",
            Command::Nonlinear => "nonlinear",
            Command::Uniqueness => "uniqueness",
            Command::Inequalities => "inequalities",
            Command::Spectrum => "spectrum",
        }
    }

    fn single_flux(self) -> bool {
        matches!(self, Command::Solve | Command::Decompose | Command::Nonlinear | Command::Uniqueness)
    }

    fn uses_modes(self) -> bool {
        matches!(self, Command::Solve | Command::Sweep | Command::Decompose | Command::Spectrum)
    }

    fn uses_field(self) -> bool {
        matches!(self, Command::Nonlinear | Command::Uniqueness)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Comma-separated floats, or a JSON number or array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FloatList {
    One(f64),
    Many(Vec<f64>),
}

impl FloatList {
    pub fn values(&self) -> Vec<f64> {
        match self {
            FloatList::One(x) => vec![*x],
            FloatList::Many(v) => v.clone(),
        }
    }
}

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}` is not a number: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(FloatList::Many)
    }
}

/// Mode indices: `3`, `1,2,4`, `1..8` (inclusive) or a JSON number, array or string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeList {
    One(i64),
    Many(Vec<i64>),
    Text(String),
}

impl ModeList {
    pub fn values(&self) -> Result<Vec<i64>, String> {
        match self {
            ModeList::One(n) => Ok(vec![*n]),
            ModeList::Many(v) => Ok(v.clone()),
            ModeList::Text(s) => parse_modes(s),
        }
    }
}

fn parse_modes(s: &str) -> Result<Vec<i64>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let int = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("`{t}` is not an integer: {e}"));
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (int(a)?, int(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range `{part}`"));
            }
            out.extend(a..=b);
        } else {
            out.push(int(part)?);
        }
    }
    Ok(out)
}

impl FromStr for ModeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        parse_modes(s)?;
        Ok(ModeList::Text(s.to_string()))
    }
}

/// `"auto"` or a fixed Chebyshev order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridChoice {
    Auto,
    Fixed(usize),
}

impl FromStr for GridChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(GridChoice::Auto);
        }
        s.parse::<usize>()
            .map(GridChoice::Fixed)
            .map_err(|_| format!("expected `auto` or a grid order, got `{s}`"))
    }
}

impl Serialize for GridChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            GridChoice::Auto => s.serialize_str("auto"),
            GridChoice::Fixed(m) => s.serialize_u64(*m as u64),
        }
    }
}

impl<'de> Deserialize<'de> for GridChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(m) => Ok(GridChoice::Fixed(m)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl GridChoice {
    pub fn policy(self) -> GridPolicy {
        match self {
            GridChoice::Auto => GridPolicy::Auto,
            GridChoice::Fixed(m) => GridPolicy::Fixed(m),
        }
    }
}

/// Every setting, as read from `config.json` or from flags. Unset fields fall back
/// to the file, then to the defaults of [`RunConfig`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Flux values, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<FloatList>,
    /// Mode indices: `3`, `1,2,4` or `1..8`.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<ModeList>,
    /// Period parameter; the strip has period 2πL.
    #[arg(long = "L", visible_alias = "l", allow_hyphen_values = true)]
    #[serde(rename = "L", alias = "l")]
    pub l: Option<f64>,
    /// Fourier mode cutoff N.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Chebyshev order or `auto`.
    #[arg(long)]
    pub m: Option<GridChoice>,
    /// `constant`, `poly:k`, `trig:k` or `random:s`.
    #[arg(long)]
    pub force: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    /// CSV of Chebyshev coefficients per mode: `n,k,f1_re,f1_im,f2_re,f2_im`.
    #[arg(long)]
    pub force_table: Option<PathBuf>,
    /// Rescale the full force field to this `L²(Ω)` norm.
    #[arg(long, allow_hyphen_values = true)]
    pub force_norm: Option<f64>,
    /// Largest |n| carrying force in field runs.
    #[arg(long)]
    pub active: Option<usize>,
    /// Whether the n = 0 mode carries force in field runs.
    #[arg(long)]
    pub mean: Option<bool>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Small-data threshold recorded in nonlinear reports.
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
    #[arg(long)]
    pub sigma_min: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub reference_samples: Option<usize>,
    /// Grid order of the inequality suite.
    #[arg(long)]
    pub order: Option<usize>,
    /// Absolute `‖v₂‖_{H¹}` of the uniqueness perturbation.
    #[arg(long, allow_hyphen_values = true)]
    pub perturbation: Option<f64>,
    /// Perturbation as a fraction of `Φ^{1/60}` when no absolute size is given.
    #[arg(long, allow_hyphen_values = true)]
    pub perturbation_fraction: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho_max: Option<f64>,
    #[arg(long)]
    pub layer_points: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub decay_radius: Option<f64>,
    /// Output directory.
    #[arg(long = "out")]
    #[serde(alias = "out")]
    pub output: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),* $(,)?) => {
        Settings { $($f: $top.$f.or($base.$f)),* }
    };
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(format!("reading {}", path.display()), e))?;
        serde_json::from_str(&text)
            .map_err(|e| LabError::Invalid(vec![format!("config {}: {e}", path.display())]))
    }

    /// Fields set in `top` win.
    pub fn overlay(self, top: Settings) -> Settings {
        overlay!(
            self,
            top,
            phi,
            n,
            l,
            cutoff,
            m,
            force,
            amplitude,
            force_table,
            force_norm,
            active,
            mean,
            tol,
            max_iter,
            eps,
            eps1,
            phi0,
            sigma_min,
            seed,
            samples,
            reference_samples,
            order,
            perturbation,
            perturbation_fraction,
            rho_max,
            layer_points,
            decay_radius,
            output,
        )
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub phi: Vec<f64>,
    pub n: Vec<i64>,
    #[serde(rename = "L")]
    pub l: f64,
    pub cutoff: usize,
    pub m: GridChoice,
    pub force: String,
    #[serde(skip)]
    pub family: ForceFamily,
    pub amplitude: f64,
    pub force_table: Option<PathBuf>,
    pub force_norm: Option<f64>,
    pub active: usize,
    pub mean: bool,
    pub tol: f64,
    pub max_iter: usize,
    pub eps: f64,
    pub eps1: f64,
    pub phi0: f64,
    pub sigma_min: bool,
    pub seed: u64,
    pub samples: usize,
    pub reference_samples: usize,
    pub order: usize,
    pub perturbation: Option<f64>,
    pub perturbation_fraction: f64,
    pub rho_max: f64,
    pub layer_points: usize,
    pub decay_radius: f64,
    pub output: PathBuf,
}

impl RunConfig {
    /// Applies defaults and reports every violation at once.
    pub fn resolve(command: Command, s: Settings) -> Result<Self, LabError> {
        let mut bad: Vec<String> = Vec::new();
        let mut v = |field: &str, msg: String| bad.push(format!("{field}: {msg}"));
        let unforced = s.force.is_none() && s.force_table.is_none();
        let default_amplitude = if command == Command::Uniqueness && unforced { 0.0 } else { 1.0 };

        let phi = s.phi.map(|p| p.values()).unwrap_or_default();
        let n = match s.n.as_ref().map(ModeList::values) {
            Some(Ok(n)) => n,
            Some(Err(e)) => {
                v("n", e);
                Vec::new()
            }
            None => Vec::new(),
        };
        let l = s.l.unwrap_or(1.0);
        let cutoff = s.cutoff.unwrap_or(poiseuille_core::nonlinear::DEFAULT_CUTOFF);
        let m = s.m.unwrap_or(GridChoice::Auto);
        let seed = s.seed.unwrap_or(0);
        let force = s.force.clone().unwrap_or_else(|| "trig:1".to_string());
        let force = if force == "random" { format!("random:{seed}") } else { force };
        let family = match force.parse::<ForceFamily>() {
            Ok(f) => f,
            Err(e) => {
                v("force", e.to_string());
                ForceFamily::Trig(1)
            }
        };
        let cfg = RunConfig {
            command,
            phi,
            n,
            l,
            cutoff,
            m,
            force: family.to_string(),
            family,
            amplitude: s.amplitude.unwrap_or(default_amplitude),
            force_table: s.force_table,
            force_norm: s.force_norm,
            active: s.active.unwrap_or(2),
            mean: s.mean.unwrap_or(true),
            tol: s.tol.unwrap_or(1e-10),
            max_iter: s.max_iter.unwrap_or(100),
            eps: s.eps.unwrap_or(1e-2),
            eps1: s.eps1.unwrap_or(0.05),
            phi0: s.phi0.unwrap_or(100.0),
            sigma_min: s.sigma_min.unwrap_or(true),
            seed,
            samples: s.samples.unwrap_or(10_000),
            reference_samples: s.reference_samples.unwrap_or(1_000),
            order: s.order.unwrap_or(128),
            perturbation: s.perturbation,
            perturbation_fraction: s.perturbation_fraction.unwrap_or(0.5),
            rho_max: s.rho_max.unwrap_or(40.0),
            layer_points: s.layer_points.unwrap_or(160),
            decay_radius: s.decay_radius.unwrap_or(10.0),
            output: s.output.unwrap_or_else(|| PathBuf::from("out")),
        };
        cfg.check(&mut v);
        if bad.is_empty() {
            Ok(cfg)
        } else {
            Err(LabError::Invalid(bad))
        }
    }

    fn check(&self, v: &mut impl FnMut(&str, String)) {
        let c = self.command;
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;
        if !finite_pos(self.l) {
            v("L", format!("must be positive and finite, got {}", self.l));
        }
        if c != Command::Inequalities {
            if self.phi.is_empty() {
                v("phi", "required".into());
            }
            for &p in &self.phi {
                if !(p.is_finite() && p >= 0.0) {
                    v("phi", format!("must be nonnegative and finite, got {p}"));
                }
            }
            if c.single_flux() && self.phi.len() > 1 {
                v("phi", format!("{c} takes one flux, got {}", self.phi.len()));
            }
            if matches!(c, Command::Decompose) && self.phi.contains(&0.0) {
                v("phi", "the boundary-layer decomposition needs phi > 0".into());
            }
        }
        if c.uses_modes() {
            if self.n.is_empty() {
                v("n", "required".into());
            }
            if matches!(c, Command::Solve | Command::Decompose) && self.n.len() > 1 {
                v("n", format!("{c} takes one mode, got {}", self.n.len()));
            }
            if matches!(c, Command::Decompose | Command::Spectrum) && self.n.contains(&0) {
                v("n", format!("{c} needs n != 0"));
            }
        }
        if c.uses_field() {
            if self.cutoff == 0 {
                v("cutoff", "must be at least 1".into());
            }
            if self.active == 0 || self.active > self.cutoff {
                v("active", format!("must lie in 1..={}, got {}", self.cutoff, self.active));
            }
            if !(self.max_iter >= 1) {
                v("max_iter", "must be at least 1".into());
            }
        }
        if !finite_pos(self.tol) {
            v("tol", format!("must be positive and finite, got {}", self.tol));
        }
        if !self.amplitude.is_finite() {
            v("amplitude", format!("must be finite, got {}", self.amplitude));
        }
        if let Some(f) = self.force_norm {
            if !finite_pos(f) {
                v("force_norm", format!("must be positive and finite, got {f}"));
            }
        }
        if self.force_table.is_some() && matches!(c, Command::Sweep | Command::Spectrum | Command::Inequalities) {
            v("force_table", format!("{c} uses force families only"));
        }
        for (name, x) in [("eps", self.eps), ("eps1", self.eps1)] {
            if !finite_pos(x) {
                v(name, format!("must be positive and finite, got {x}"));
            }
        }
        if !(self.phi0.is_finite() && self.phi0 >= 0.0) {
            v("phi0", format!("must be nonnegative and finite, got {}", self.phi0));
        }
        if let GridChoice::Fixed(m) = self.m {
            if !(MIN_ORDER..=MAX_ORDER).contains(&m) {
                v("m", format!("must lie in {MIN_ORDER}..={MAX_ORDER}, got {m}"));
            }
        } else if c.uses_modes() && finite_pos(self.l) {
            for &phi in self.phi.iter().filter(|p| p.is_finite() && **p >= 0.0) {
                for &n in &self.n {
                    if let Ok(p) = ModeParams::new(n, self.l, phi) {
                        let m = if c == Command::Decompose {
                            poiseuille_core::boundary_layer::decomposition_order(&p)
                        } else {
                            p.resolved_order()
                        };
                        if m > MAX_ORDER {
                            v("m", format!("auto resolves to M = {m} above {MAX_ORDER} for phi = {phi}, n = {n}"));
                        }
                    }
                }
            }
        } else if c.uses_field() && finite_pos(self.l) {
            for &phi in self.phi.iter().filter(|p| p.is_finite() && **p >= 0.0) {
                if let Ok(m) = poiseuille_core::nonlinear::picard_order(self.l, phi, self.cutoff) {
                    if m > MAX_ORDER {
                        v("m", format!("auto resolves to M = {m} above {MAX_ORDER} for phi = {phi}, cutoff = {}", self.cutoff));
                    }
                }
            }
        }
        if c == Command::Inequalities {
            if self.samples == 0 {
                v("samples", "must be positive".into());
            }
            if self.reference_samples == 0 || self.reference_samples > self.samples {
                v("reference_samples", format!("must lie in 1..={}, got {}", self.samples, self.reference_samples));
            }
            if self.order < 16 || 2 * self.order > MAX_ORDER {
                v("order", format!("must lie in 16..={}, got {}", MAX_ORDER / 2, self.order));
            }
        }
        if let Some(p) = self.perturbation {
            if !(p.is_finite() && p >= 0.0) {
                v("perturbation", format!("must be nonnegative and finite, got {p}"));
            }
        }
        if !(self.perturbation_fraction.is_finite() && self.perturbation_fraction >= 0.0) {
            v("perturbation_fraction", format!("must be nonnegative and finite, got {}", self.perturbation_fraction));
        }
        if !(self.rho_max.is_finite() && self.rho_max >= 30.0) {
            v("rho_max", format!("must be at least 30, got {}", self.rho_max));
        }
        if self.layer_points < 16 || self.layer_points > MAX_ORDER {
            v("layer_points", format!("must lie in 16..={MAX_ORDER}, got {}", self.layer_points));
        }
        if !(self.decay_radius > 0.0 && self.decay_radius < self.rho_max - 5.0) {
            v("decay_radius", format!("must lie in (0, rho_max - 5), got {}", self.decay_radius));
        }
    }
}
