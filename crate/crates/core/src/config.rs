//! Scenario files.
//!
//! A scenario is a TOML document deserialized into [`ScenarioConfig`].
//! Unknown keys are rejected. Overrides address fields with dotted paths
//! (`gains.k_pos`, `obstacles.0.velocity`) and are applied to the resolved
//! document, with all defaults filled in, before it is type-checked.

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::barriers::{BacksteppingConfig, CollisionGeometry, Obstacle};
use crate::dynamics::{AircraftState, EPS_SPEED, GRAVITY};
use crate::error::ConfigError;
use crate::nominal::{ReferenceTrajectory, TrackingGains};
use crate::safety_filter::{ClassKappa, InputClamp, EPS_GRAD};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    #[serde(rename = "none")]
    Unfiltered,
    #[default]
    Naive,
    Backstepped,
    Baseline,
}

impl FilterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterKind::Unfiltered => "none",
            FilterKind::Naive => "naive",
            FilterKind::Backstepped => "backstepped",
            FilterKind::Baseline => "baseline",
        }
    }
}

impl std::str::FromStr for FilterKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(FilterKind::Unfiltered),
            "naive" => Ok(FilterKind::Naive),
            "backstepped" => Ok(FilterKind::Backstepped),
            "baseline" => Ok(FilterKind::Baseline),
            other => Err(ConfigError::Parse(format!("unknown filter kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    /// Center at t = 0 (m).
    pub center: [f64; 3],
    #[serde(default)]
    pub velocity: [f64; 3],
    #[serde(default = "default_r_obs")]
    pub r_obs: f64,
    /// Only accepted when zero: obstacles move at constant velocity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acceleration: Option<[f64; 3]>,
}

fn default_r_obs() -> f64 {
    70.0
}

impl ObstacleSpec {
    pub fn obstacle(&self) -> Obstacle {
        Obstacle::new(
            Vector3::from(self.center),
            Vector3::from(self.velocity),
            self.r_obs,
        )
    }
}

/// Aircraft-side contributions to the collision radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SafetyMargins {
    pub r_uav: f64,
    pub d_s: f64,
}

impl Default for SafetyMargins {
    fn default() -> Self {
        Self {
            r_uav: 10.0,
            d_s: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineConfig {
    pub gamma1: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self { gamma1: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterSettings {
    pub eps_grad: f64,
    /// Optional post-filter saturation. Voids the barrier guarantee.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamp: Option<InputClamp>,
}

impl Default for FilterSettings {
    fn default() -> Self {
        Self {
            eps_grad: EPS_GRAD,
            clamp: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub initial_state: AircraftState,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    #[serde(default)]
    pub geometry: SafetyMargins,
    pub trajectory: ReferenceTrajectory,
    #[serde(default)]
    pub gains: TrackingGains,
    #[serde(default)]
    pub kappa: ClassKappa,
    #[serde(default)]
    pub filter_kind: FilterKind,
    #[serde(default)]
    pub backstepping: BacksteppingConfig,
    #[serde(default)]
    pub baseline: BaselineConfig,
    #[serde(default)]
    pub filter: FilterSettings,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

fn default_dt() -> f64 {
    0.01
}

fn default_t_max() -> f64 {
    120.0
}

fn default_gravity() -> f64 {
    GRAVITY
}

impl ScenarioConfig {
    /// Defaults everywhere except the two required sections.
    pub fn new(initial_state: AircraftState, trajectory: ReferenceTrajectory) -> Self {
        Self {
            name: String::new(),
            initial_state,
            obstacles: Vec::new(),
            geometry: SafetyMargins::default(),
            trajectory,
            gains: TrackingGains::default(),
            kappa: ClassKappa::default(),
            filter_kind: FilterKind::default(),
            backstepping: BacksteppingConfig::default(),
            baseline: BaselineConfig::default(),
            filter: FilterSettings::default(),
            dt: default_dt(),
            t_max: default_t_max(),
            gravity: default_gravity(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        ScenarioDocument::parse(text)?.resolve()
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        ScenarioDocument::load(path)?.resolve()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    pub fn obstacles(&self) -> Vec<Obstacle> {
        self.obstacles.iter().map(ObstacleSpec::obstacle).collect()
    }

    pub fn geometry_for(&self, obstacle: &Obstacle) -> CollisionGeometry {
        CollisionGeometry::new(obstacle.r_obs, self.geometry.r_uav, self.geometry.d_s)
    }

    /// Number of records in a run that reaches `t_max`.
    pub fn record_count(&self) -> usize {
        (self.t_max / self.dt + 1e-9).floor() as usize + 1
    }

    /// Every violated invariant, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut require = |ok: bool, msg: String| {
            if !ok {
                out.push(msg);
            }
        };
        let positive = |x: f64| x.is_finite() && x > 0.0;

        require(positive(self.dt), format!("dt must be > 0 (got {})", self.dt));
        require(
            self.t_max.is_finite() && self.t_max > self.dt,
            format!("t_max must exceed dt (got t_max = {}, dt = {})", self.t_max, self.dt),
        );
        require(positive(self.gravity), format!("gravity must be > 0 (got {})", self.gravity));
        if let Err(e) = self.initial_state.check() {
            require(false, format!("initial_state: {e}"));
        }

        let g = &self.gains;
        for (name, v) in [("k_pos", g.k_pos), ("k_v", g.k_v), ("k_theta", g.k_theta), ("k_phi", g.k_phi)] {
            require(positive(v), format!("gains.{name} must be > 0 (got {v})"));
        }
        require(
            g.speed_band.is_finite() && (0.0..1.0).contains(&g.speed_band),
            format!("gains.speed_band must be in [0, 1) (got {})", g.speed_band),
        );
        require(positive(self.kappa.gamma), format!("kappa.gamma must be > 0 (got {})", self.kappa.gamma));
        require(
            positive(self.backstepping.lambda),
            format!("backstepping.lambda must be > 0 (got {})", self.backstepping.lambda),
        );
        require(
            positive(self.baseline.gamma1),
            format!("baseline.gamma1 must be > 0 (got {})", self.baseline.gamma1),
        );
        require(
            positive(self.filter.eps_grad),
            format!("filter.eps_grad must be > 0 (got {})", self.filter.eps_grad),
        );
        if let Some(c) = self.filter.clamp {
            require(
                positive(c.a_t) && positive(c.p) && positive(c.q),
                "filter.clamp limits must be > 0".to_string(),
            );
        }

        require(
            self.geometry.r_uav >= 0.0 && self.geometry.d_s >= 0.0,
            "geometry.r_uav and geometry.d_s must be >= 0".to_string(),
        );

        let start = self.initial_state.position();
        for (i, spec) in self.obstacles.iter().enumerate() {
            require(spec.r_obs >= 0.0, format!("obstacles.{i}.r_obs must be >= 0"));
            if let Some(a) = spec.acceleration {
                require(
                    a.iter().all(|&x| x == 0.0),
                    format!("obstacles.{i}.acceleration must be zero: obstacles move at constant velocity"),
                );
            }
            let obstacle = spec.obstacle();
            let r = self.geometry_for(&obstacle).radius();
            require(r > 0.0, format!("obstacles.{i}: collision radius must be > 0"));
            let sep = (obstacle.center - start).norm();
            require(
                sep > r,
                format!("initial state is inside the collision sphere of obstacles.{i} (separation {sep} m, radius {r} m)"),
            );
        }

        require(
            self.trajectory.speed() > EPS_SPEED,
            "trajectory speed must be > 0".to_string(),
        );
        if let ReferenceTrajectory::LevelTurn { radius, .. } = self.trajectory {
            require(positive(radius), "trajectory.radius must be > 0".to_string());
        }
        require(
            self.trajectory.horizon() >= self.t_max,
            format!("trajectory.horizon must cover t_max ({})", self.t_max),
        );
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invariant(v.join("; ")))
        }
    }
}

/// A scenario as a TOML tree, so overrides can be applied before typing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDocument {
    table: Table,
}

impl ScenarioDocument {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        let doc = Self { table };
        // Fill defaults so that every schema key is addressable.
        let resolved = doc.resolve()?;
        Ok(Self::from_config(&resolved))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse(msg) => ConfigError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn from_config(config: &ScenarioConfig) -> Self {
        let table = Table::try_from(config).expect("scenario config serializes");
        Self { table }
    }

    pub fn resolve(&self) -> Result<ScenarioConfig, ConfigError> {
        ScenarioConfig::deserialize(Value::Table(self.table.clone()))
            .map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Applies `key=value`; the value is read as a TOML literal, falling
    /// back to a bare string.
    pub fn apply_override_str(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::BadOverride(assignment.to_string()))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::BadOverride(assignment.to_string()));
        }
        self.apply_override(key, parse_value(raw.trim()))
    }

    pub fn apply_override(&mut self, key: &str, value: Value) -> Result<(), ConfigError> {
        let unknown = || ConfigError::UnknownKey(key.to_string());
        let parts: Vec<&str> = key.split('.').collect();
        let (leaf, path) = parts.split_last().ok_or_else(unknown)?;

        let mut root = Value::Table(self.table.clone());
        let mut node = &mut root;
        for part in path {
            node = match node {
                Value::Table(t) => t.get_mut(*part).ok_or_else(unknown)?,
                Value::Array(a) => {
                    let i: usize = part.parse().map_err(|_| unknown())?;
                    a.get_mut(i).ok_or_else(unknown)?
                }
                _ => return Err(unknown()),
            };
        }
        let existed = match node {
            Value::Table(t) => t.insert(leaf.to_string(), value).is_some(),
            Value::Array(a) => {
                let i: usize = leaf.parse().map_err(|_| unknown())?;
                *a.get_mut(i).ok_or_else(unknown)? = value;
                true
            }
            _ => return Err(unknown()),
        };
        let Value::Table(table) = root else {
            unreachable!("document root is a table")
        };
        // A key absent from the resolved tree is only accepted when the
        // schema takes it (optional fields such as `trajectory.horizon`).
        let resolved = Self { table }
            .resolve()
            .map_err(|e| if existed { e } else { unknown() })?;
        *self = Self::from_config(&resolved);
        Ok(())
    }
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}
