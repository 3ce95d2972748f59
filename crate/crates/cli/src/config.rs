//! Run configuration: defaults, a flat `key = value` file, then flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nlskdv::{ModelParams, Order, RadialGrid};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable config or input, invalid parameter values.
    Usage(String),
    Solver(nlskdv::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Solver(e) => write!(f, "solver: {e}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl From<nlskdv::Error> for CliError {
    fn from(e: nlskdv::Error) -> Self {
        CliError::Solver(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Beta,
    Lambda2,
}

impl FromStr for SweepAxis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "beta" => Ok(SweepAxis::Beta),
            "lambda2" => Ok(SweepAxis::Lambda2),
            _ => Err(format!("sweep axis must be beta or lambda2, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Sweep {
    /// Evenly spaced values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        (0..self.steps)
            .map(|i| self.from + (self.to - self.from) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Initial state for the ground-state solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    /// `(V₂, V₂)`.
    Diagonal,
    /// `(δ, V₂)` with a small seeded random `δ`.
    NearV2,
    /// Seeded random bumps in both components.
    Random,
}

impl FromStr for InitKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "diagonal" => Ok(InitKind::Diagonal),
            "near-v2" => Ok(InitKind::NearV2),
            "random" => Ok(InitKind::Random),
            _ => Err(format!("init must be diagonal, near-v2 or random, got {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub order: Order,
    pub dimension: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta: f64,
    /// `None` means `40 / sqrt(min(λ₁, λ₂))`.
    pub radius: Option<f64>,
    pub points: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub path_nodes: usize,
    pub sweep: Option<Sweep>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub init: InitKind,
    pub input: Option<PathBuf>,
    pub component: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            order: Order::Laplacian,
            dimension: 1,
            lambda1: 1.0,
            lambda2: 1.0,
            beta: 1.0,
            radius: None,
            points: 4001,
            tol: 1e-8,
            max_iters: 20_000,
            path_nodes: 17,
            sweep: None,
            seed: 42,
            out: None,
            json: false,
            init: InitKind::Diagonal,
            input: None,
            component: None,
        }
    }
}

/// Values given on the command line; `None` leaves the file or default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub order: Option<u32>,
    pub dimension: Option<usize>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub beta: Option<f64>,
    pub radius: Option<f64>,
    pub points: Option<usize>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub path_nodes: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub init: Option<InitKind>,
    pub input: Option<PathBuf>,
    pub component: Option<String>,
    pub sweep_axis: Option<SweepAxis>,
    pub sweep_from: Option<f64>,
    pub sweep_to: Option<f64>,
    pub sweep_steps: Option<usize>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("bad value {value:?} for {key}: {e}")))
}

fn order_from(pde_order: u32) -> Result<Order, CliError> {
    Order::from_pde_order(pde_order).map_err(|e| CliError::Usage(e.to_string()))
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Overrides, CliError> {
    let mut o = Overrides::default();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("line {}: expected key = value", no + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "order" => o.order = Some(parse(key, value)?),
            "dim" => o.dimension = Some(parse(key, value)?),
            "lambda1" => o.lambda1 = Some(parse(key, value)?),
            "lambda2" => o.lambda2 = Some(parse(key, value)?),
            "beta" => o.beta = Some(parse(key, value)?),
            "radius" => o.radius = Some(parse(key, value)?),
            "points" => o.points = Some(parse(key, value)?),
            "tol" => o.tol = Some(parse(key, value)?),
            "max_iters" => o.max_iters = Some(parse(key, value)?),
            "nodes" => o.path_nodes = Some(parse(key, value)?),
            "seed" => o.seed = Some(parse(key, value)?),
            "out" => o.out = Some(PathBuf::from(value)),
            "format" => match value {
                "json" => o.json = true,
                "csv" => o.json = false,
                _ => return Err(CliError::Usage(format!("format must be csv or json, got {value:?}"))),
            },
            "init" => o.init = Some(parse(key, value)?),
            "input" => o.input = Some(PathBuf::from(value)),
            "component" => o.component = Some(value.to_string()),
            "sweep_axis" => o.sweep_axis = Some(parse(key, value)?),
            "sweep_from" => o.sweep_from = Some(parse(key, value)?),
            "sweep_to" => o.sweep_to = Some(parse(key, value)?),
            "sweep_steps" => o.sweep_steps = Some(parse(key, value)?),
            _ => return Err(CliError::Usage(format!("line {}: unknown key {key:?}", no + 1))),
        }
    }
    Ok(o)
}

pub fn read_config_file(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

impl RunConfig {
    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(k) = o.order {
            self.order = order_from(k)?;
        }
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = o.$field.clone() {
                    self.$field = v;
                }
            )*};
        }
        take!(dimension, lambda1, lambda2, beta, points, tol, max_iters, path_nodes, seed, init);
        if o.radius.is_some() {
            self.radius = o.radius;
        }
        if o.out.is_some() {
            self.out = o.out.clone();
        }
        if o.input.is_some() {
            self.input = o.input.clone();
        }
        if o.component.is_some() {
            self.component = o.component.clone();
        }
        self.json |= o.json;
        let any_sweep = o.sweep_axis.is_some() || o.sweep_from.is_some() || o.sweep_to.is_some() || o.sweep_steps.is_some();
        if any_sweep {
            let base = self.sweep.clone();
            let axis = o.sweep_axis.or(base.as_ref().map(|s| s.axis));
            let from = o.sweep_from.or(base.as_ref().map(|s| s.from));
            let to = o.sweep_to.or(base.as_ref().map(|s| s.to));
            let steps = o.sweep_steps.or(base.as_ref().map(|s| s.steps));
            self.sweep = match (axis, from, to, steps) {
                (Some(axis), Some(from), Some(to), Some(steps)) => Some(Sweep { axis, from, to, steps }),
                _ => {
                    return Err(CliError::Usage(
                        "a sweep needs sweep_axis, sweep_from, sweep_to and sweep_steps".into(),
                    ))
                }
            };
        }
        Ok(())
    }

    /// Defaults, then the config file named in `flags` (if any), then `flags`.
    pub fn resolve(config_path: Option<&Path>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(p) = config_path {
            cfg.apply(&read_config_file(p)?)?;
        }
        cfg.apply(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params().map_err(|e| CliError::Usage(e.to_string()))?;
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        if self.path_nodes < 8 {
            return bad(format!("need at least 8 path nodes, got {}", self.path_nodes));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("radius must be positive, got {r}"));
            }
        }
        if self.points < 8 {
            return bad(format!("need at least 8 points, got {}", self.points));
        }
        Ok(())
    }

    pub fn params(&self) -> nlskdv::Result<ModelParams> {
        ModelParams::new(self.order, self.dimension, self.lambda1, self.lambda2, self.beta)
    }

    pub fn radius_for(&self, lambda1: f64, lambda2: f64) -> f64 {
        self.radius.unwrap_or_else(|| 40.0 / lambda1.min(lambda2).sqrt())
    }

    pub fn grid_for(&self, params: &ModelParams) -> Result<RadialGrid, CliError> {
        let r = self.radius_for(params.lambda1, params.lambda2);
        RadialGrid::new(params.dimension, params.order, r, self.points).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn solver(&self) -> nlskdv::solvers::SolverConfig {
        nlskdv::solvers::SolverConfig {
            tol: self.tol,
            max_iters: self.max_iters,
            path_nodes: self.path_nodes,
            ..Default::default()
        }
    }
}
