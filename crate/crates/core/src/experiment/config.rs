//! `key = value` experiment configuration with command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mdp::GridMdp;
use crate::radio::{
    AreaSpec, BuildingModelParams, EnvConfig, MetricKind, QualityMetric, MAX_AERIAL_HEIGHT_M, MIN_AERIAL_HEIGHT_M,
};
use crate::td::TdConfig;
use crate::tile::TilingSpec;

use super::seeds::{derive_seed, ENVIRONMENT, TRAINING};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Dp,
    Td,
    TdTile,
    Direct,
}

impl Solver {
    pub const ALL: [Solver; 4] = [Solver::Dp, Solver::Td, Solver::TdTile, Solver::Direct];

    pub fn name(self) -> &'static str {
        match self {
            Solver::Dp => "dp",
            Solver::Td => "td",
            Solver::TdTile => "td-tile",
            Solver::Direct => "direct",
        }
    }

    pub fn is_learner(self) -> bool {
        matches!(self, Solver::Td | Solver::TdTile)
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Solver::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("expected one of dp, td, td-tile, direct, got `{s}`"))
    }
}

/// Every recognised key, in echo order.
pub const KEYS: &[&str] = &[
    "seed",
    "area",
    "altitude",
    "alpha_bd",
    "beta_bd",
    "sigma_bd",
    "clip",
    "isd",
    "antenna_height",
    "tx_dbm",
    "carrier_ghz",
    "metric",
    "gamma_th_db",
    "step",
    "actions",
    "mu",
    "start",
    "goal",
    "solver",
    "episodes",
    "max_steps",
    "n_alpha",
    "n_eps",
    "tilings",
    "tile_size",
    "output",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Master seed; component seeds are derived from it.
    pub seed: u64,
    /// `[x_lo, y_lo, x_hi, y_hi]` in metres.
    pub area: [f64; 4],
    pub altitude_m: f64,
    pub alpha_bd: f64,
    pub beta_bd: f64,
    pub sigma_bd_m: f64,
    pub height_clip_m: f64,
    pub isd_m: f64,
    pub antenna_height_m: f64,
    pub tx_dbm: f64,
    pub carrier_ghz: f64,
    pub metric: MetricKind,
    pub gamma_th_db: f64,
    pub step_m: f64,
    pub actions: usize,
    pub mu: f64,
    pub start: [f64; 2],
    pub goal: [f64; 2],
    pub solver: Solver,
    pub episodes: usize,
    pub max_steps: usize,
    pub n_alpha: f64,
    pub n_eps: f64,
    pub tilings: usize,
    pub tile_size: [f64; 2],
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let env = EnvConfig::default();
        let b = env.buildings;
        let td = TdConfig::default();
        Self {
            seed: 0,
            area: [env.area.x_lo, env.area.y_lo, env.area.x_hi, env.area.y_hi],
            altitude_m: env.area.uav_altitude_m,
            alpha_bd: b.alpha_bd,
            beta_bd: b.beta_bd,
            sigma_bd_m: b.sigma_bd_m,
            height_clip_m: b.height_clip_m,
            isd_m: env.inter_site_distance_m,
            antenna_height_m: env.antenna_height_m,
            tx_dbm: env.tx_power_dbm,
            carrier_ghz: env.carrier_ghz,
            metric: env.metric.kind,
            gamma_th_db: env.metric.threshold,
            step_m: 10.0,
            actions: 4,
            mu: 30.0,
            start: [200.0, 400.0],
            goal: [1400.0, 1600.0],
            solver: Solver::Dp,
            episodes: td.max_episodes,
            max_steps: td.max_steps,
            n_alpha: td.n_alpha,
            n_eps: td.n_eps,
            tilings: 20,
            tile_size: [200.0, 200.0],
            output: PathBuf::from("out"),
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}` as a number")))
}

fn parse_list<const N: usize>(key: &str, value: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(Error::config(
            key,
            format!("expected {N} comma-separated numbers, got `{value}`"),
        ));
    }
    let mut out = [0.0; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = parse_num(key, p)?;
    }
    Ok(out)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Parses `key = value` lines. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(
                    format!("line {}", n + 1),
                    format!("expected `key = value`, got `{line}`"),
                )
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => self.seed = parse_num(key, value)?,
            "area" => self.area = parse_list(key, value)?,
            "altitude" => self.altitude_m = parse_num(key, value)?,
            "alpha_bd" => self.alpha_bd = parse_num(key, value)?,
            "beta_bd" => self.beta_bd = parse_num(key, value)?,
            "sigma_bd" => self.sigma_bd_m = parse_num(key, value)?,
            "clip" => self.height_clip_m = parse_num(key, value)?,
            "isd" => self.isd_m = parse_num(key, value)?,
            "antenna_height" => self.antenna_height_m = parse_num(key, value)?,
            "tx_dbm" => self.tx_dbm = parse_num(key, value)?,
            "carrier_ghz" => self.carrier_ghz = parse_num(key, value)?,
            "metric" => {
                self.metric = match value {
                    "sir" => MetricKind::Sir,
                    "max-power" => MetricKind::MaxPower,
                    _ => {
                        return Err(Error::config(
                            key,
                            format!("expected `sir` or `max-power`, got `{value}`"),
                        ))
                    }
                }
            }
            "gamma_th_db" => self.gamma_th_db = parse_num(key, value)?,
            "step" => self.step_m = parse_num(key, value)?,
            "actions" => self.actions = parse_num(key, value)?,
            "mu" => self.mu = parse_num(key, value)?,
            "start" => self.start = parse_list(key, value)?,
            "goal" => self.goal = parse_list(key, value)?,
            "solver" => self.solver = value.parse().map_err(|e| Error::config(key, e))?,
            "episodes" => self.episodes = parse_num(key, value)?,
            "max_steps" => self.max_steps = parse_num(key, value)?,
            "n_alpha" => self.n_alpha = parse_num(key, value)?,
            "n_eps" => self.n_eps = parse_num(key, value)?,
            "tilings" => self.tilings = parse_num(key, value)?,
            "tile_size" => {
                self.tile_size = if value.contains(',') {
                    parse_list(key, value)?
                } else {
                    let side = parse_num(key, value)?;
                    [side, side]
                }
            }
            "output" => {
                if value.is_empty() {
                    return Err(Error::config(key, "must not be empty"));
                }
                self.output = PathBuf::from(value)
            }
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Applies overrides in order, then re-validates.
    pub fn with_overrides<'a>(mut self, overrides: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        for (k, v) in overrides {
            self.set(k, v)?;
        }
        self.validate()?;
        Ok(self)
    }

    /// Checks every constraint and names the first offending key.
    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive, got {v}")))
            }
        };
        positive("step", self.step_m)?;
        positive("isd", self.isd_m)?;
        positive("antenna_height", self.antenna_height_m)?;
        positive("carrier_ghz", self.carrier_ghz)?;
        positive("n_alpha", self.n_alpha)?;
        positive("n_eps", self.n_eps)?;
        positive("tile_size", self.tile_size[0].min(self.tile_size[1]))?;
        self.area_spec()?;
        if !(self.altitude_m > MIN_AERIAL_HEIGHT_M && self.altitude_m <= MAX_AERIAL_HEIGHT_M) {
            return Err(Error::config(
                "altitude",
                format!(
                    "must lie in ({MIN_AERIAL_HEIGHT_M}, {MAX_AERIAL_HEIGHT_M}] m, got {}",
                    self.altitude_m
                ),
            ));
        }
        if self.actions < 2 {
            return Err(Error::config(
                "actions",
                format!("need at least 2, got {}", self.actions),
            ));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::config("mu", format!("must be non-negative, got {}", self.mu)));
        }
        for (key, v) in [
            ("episodes", self.episodes),
            ("max_steps", self.max_steps),
            ("tilings", self.tilings),
        ] {
            if v == 0 {
                return Err(Error::config(key, "must be at least 1"));
            }
        }
        self.buildings().validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::config(name, reason),
            other => other,
        })?;
        if !(self.tx_dbm.is_finite() && self.gamma_th_db.is_finite()) {
            return Err(Error::config("tx_dbm", "must be finite"));
        }
        let area = self.area_spec()?;
        for (key, p) in [("start", self.start), ("goal", self.goal)] {
            if !area.contains(p[0], p[1]) {
                return Err(Error::config(
                    key,
                    format!("({}, {}) lies outside the area", p[0], p[1]),
                ));
            }
        }
        Ok(())
    }

    pub fn area_spec(&self) -> Result<AreaSpec> {
        let [x_lo, y_lo, x_hi, y_hi] = self.area;
        if !(x_hi > x_lo && y_hi > y_lo) {
            return Err(Error::config(
                "area",
                "expected x_lo,y_lo,x_hi,y_hi with x_hi > x_lo and y_hi > y_lo",
            ));
        }
        AreaSpec::new(x_lo, y_lo, x_hi, y_hi, self.altitude_m).map_err(|e| Error::config("altitude", e.to_string()))
    }

    fn buildings(&self) -> BuildingModelParams {
        BuildingModelParams {
            alpha_bd: self.alpha_bd,
            beta_bd: self.beta_bd,
            sigma_bd_m: self.sigma_bd_m,
            height_clip_m: self.height_clip_m,
            rng_seed: derive_seed(self.seed, ENVIRONMENT),
        }
    }

    pub fn env_config(&self) -> Result<EnvConfig> {
        let metric = match self.metric {
            MetricKind::Sir => QualityMetric::sir(self.gamma_th_db),
            MetricKind::MaxPower => QualityMetric::max_power(self.gamma_th_db),
        };
        Ok(EnvConfig {
            area: self.area_spec()?,
            buildings: self.buildings(),
            inter_site_distance_m: self.isd_m,
            antenna_height_m: self.antenna_height_m,
            tx_power_dbm: self.tx_dbm,
            carrier_ghz: self.carrier_ghz,
            metric,
            ..EnvConfig::default()
        })
    }

    pub fn mdp(&self) -> Result<GridMdp> {
        GridMdp::new(
            self.area_spec()?,
            self.step_m,
            self.actions,
            self.mu,
            self.start,
            self.goal,
        )
    }

    pub fn td_config(&self) -> TdConfig {
        TdConfig {
            max_episodes: self.episodes,
            max_steps: self.max_steps,
            n_alpha: self.n_alpha,
            n_eps: self.n_eps,
            rng_seed: derive_seed(self.seed, TRAINING),
        }
    }

    pub fn tiling(&self) -> Result<TilingSpec> {
        TilingSpec::new(self.area_spec()?, self.tilings, self.tile_size[0], self.tile_size[1])
    }

    /// Textual value of one key, as accepted by [`ExperimentConfig::set`].
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "seed" => self.seed.to_string(),
            "area" => join(&self.area),
            "altitude" => self.altitude_m.to_string(),
            "alpha_bd" => self.alpha_bd.to_string(),
            "beta_bd" => self.beta_bd.to_string(),
            "sigma_bd" => self.sigma_bd_m.to_string(),
            "clip" => self.height_clip_m.to_string(),
            "isd" => self.isd_m.to_string(),
            "antenna_height" => self.antenna_height_m.to_string(),
            "tx_dbm" => self.tx_dbm.to_string(),
            "carrier_ghz" => self.carrier_ghz.to_string(),
            "metric" => match self.metric {
                MetricKind::Sir => "sir".into(),
                MetricKind::MaxPower => "max-power".into(),
            },
            "gamma_th_db" => self.gamma_th_db.to_string(),
            "step" => self.step_m.to_string(),
            "actions" => self.actions.to_string(),
            "mu" => self.mu.to_string(),
            "start" => join(&self.start),
            "goal" => join(&self.goal),
            "solver" => self.solver.to_string(),
            "episodes" => self.episodes.to_string(),
            "max_steps" => self.max_steps.to_string(),
            "n_alpha" => self.n_alpha.to_string(),
            "n_eps" => self.n_eps.to_string(),
            "tilings" => self.tilings.to_string(),
            "tile_size" => join(&self.tile_size),
            "output" => self.output.display().to_string(),
            _ => return None,
        })
    }

    /// Every key as a `key = value` line; parses back to the same config.
    pub fn to_text(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).expect("listed key")))
            .collect()
    }
}
