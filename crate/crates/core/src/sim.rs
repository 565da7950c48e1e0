//! Closed-loop episodes: reference, tracking controller, barrier
//! evaluation, filter, RK4 step, once per `dt`.

use rayon::prelude::*;
use serde::Serialize;

use crate::barriers::{
    backstepped_eval_lenient, baseline_distance_eval, c3bf_eval_lenient, r_des, BarrierEval,
    Obstacle,
};
use crate::config::{FilterKind, ScenarioConfig, ScenarioDocument};
use crate::dynamics::{step_rk4, AircraftState, ControlInput};
use crate::error::{BarrierError, ConfigError, DomainError, SimError};
use crate::nominal::{reference_eval, track, ReferenceSample};
use crate::safety_filter::{compose_obstacles, psi, FilterOutput};

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub state: AircraftState,
    pub u_des: ControlInput,
    pub u_safe: ControlInput,
    pub u_star: ControlInput,
    /// Barrier value per obstacle; NaN once inside the collision sphere.
    pub h: Vec<f64>,
    /// `psi` per obstacle at `u_des`.
    pub psi: Vec<f64>,
    /// Obstacle whose constraint modified the input at this step.
    pub active_obstacle: Option<usize>,
    /// Center-to-center distance per obstacle (m).
    pub separation: Vec<f64>,
    pub feasible: bool,
}

impl StepRecord {
    pub fn active(&self) -> bool {
        self.active_obstacle.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Completed,
    Collision { step: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub filter_kind: FilterKind,
    pub obstacle_count: usize,
    pub records: Vec<StepRecord>,
    pub termination: Termination,
}

impl TrajectoryLog {
    pub fn collided(&self) -> bool {
        matches!(self.termination, Termination::Collision { .. })
    }

    /// Time of the first step at which the filter modified the input.
    pub fn first_activation(&self) -> Option<f64> {
        self.records.iter().find(|r| r.active()).map(|r| r.t)
    }
}

/// The barrier `config.filter_kind` uses for one obstacle. Unfiltered runs
/// log the collision-cone barrier.
pub fn barrier_eval(
    config: &ScenarioConfig,
    state: &AircraftState,
    reference: &ReferenceSample,
    obstacle: &Obstacle,
) -> Result<BarrierEval, BarrierError> {
    let geom = config.geometry_for(obstacle);
    let g = config.gravity;
    match config.filter_kind {
        FilterKind::Unfiltered | FilterKind::Naive => c3bf_eval_lenient(state, obstacle, &geom, g),
        FilterKind::Backstepped => {
            let a_lat = config
                .backstepping
                .r_des_mode
                .lateral_accel(state, reference, &config.gains);
            let rd = r_des(state, a_lat, g)?;
            backstepped_eval_lenient(state, obstacle, &geom, config.backstepping.lambda, rd, g)
        }
        FilterKind::Baseline => {
            baseline_distance_eval(state, obstacle, &geom, g, config.baseline.gamma1)
        }
    }
}

/// Runs one episode. Bit-for-bit deterministic in `config`.
pub fn run(config: &ScenarioConfig) -> Result<TrajectoryLog, SimError> {
    config.validate()?;
    if config.filter.clamp.is_some() && config.filter_kind != FilterKind::Unfiltered {
        log::warn!("input clamp enabled: the filtered input may violate the barrier constraint");
    }
    let obstacles = config.obstacles();
    let last_step = config.record_count() - 1;
    let mut records = Vec::with_capacity(last_step + 1);
    let mut state = config.initial_state;
    let mut termination = Termination::Completed;

    for step in 0..=last_step {
        let t = step as f64 * config.dt;
        let domain = |source: DomainError| SimError::Domain { step, t, source };
        let reference = reference_eval(&config.trajectory, t)?;
        let u_des = track(&state, &reference, &config.gains, config.gravity).map_err(domain)?;

        let current: Vec<Obstacle> = obstacles.iter().map(|o| o.at(t)).collect();
        let separation: Vec<f64> = current
            .iter()
            .map(|o| (o.center - state.position()).norm())
            .collect();
        let collided = current
            .iter()
            .zip(&separation)
            .any(|(o, &sep)| sep <= config.geometry_for(o).radius());

        let mut evals = Vec::with_capacity(current.len());
        let mut h = Vec::with_capacity(current.len());
        let mut psis = Vec::with_capacity(current.len());
        for o in &current {
            match barrier_eval(config, &state, &reference, o) {
                Ok(e) => {
                    h.push(e.h);
                    psis.push(psi(&e, &u_des, &config.kappa));
                    evals.push(e);
                }
                Err(BarrierError::InsideCollisionRadius { .. }) => {
                    h.push(f64::NAN);
                    psis.push(f64::NAN);
                }
                Err(BarrierError::Domain(e)) => return Err(domain(e)),
                Err(BarrierError::DegenerateVelocity { .. }) => {
                    unreachable!("lenient evaluations do not reject slow relative motion")
                }
            }
        }

        let filtered = if config.filter_kind == FilterKind::Unfiltered || collided {
            FilterOutput {
                u_star: u_des,
                u_safe: ControlInput::ZERO,
                psi: f64::INFINITY,
                active: false,
                feasible: true,
                obstacle: None,
            }
        } else {
            compose_obstacles(&evals, &u_des, &config.kappa, config.filter.eps_grad)
        };
        let u_star = match config.filter.clamp {
            Some(c) => c.apply(&filtered.u_star),
            None => filtered.u_star,
        };

        records.push(StepRecord {
            t,
            state,
            u_des,
            u_safe: filtered.u_safe,
            u_star,
            h,
            psi: psis,
            active_obstacle: filtered.obstacle.filter(|_| filtered.active),
            separation,
            feasible: filtered.feasible,
        });

        if collided {
            termination = Termination::Collision { step };
            break;
        }
        if step < last_step {
            state = step_rk4(&state, &u_star, config.dt, config.gravity).map_err(domain)?;
        }
    }

    Ok(TrajectoryLog {
        filter_kind: config.filter_kind,
        obstacle_count: obstacles.len(),
        records,
        termination,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpisodeMetrics {
    pub min_separation: f64,
    pub min_h: f64,
    pub collision: bool,
    pub filter_active_fraction: f64,
    /// Trapezoidal integral of `|u_safe|^2` over the episode.
    pub control_effort: f64,
    /// Largest distance from the reference path (m).
    pub max_path_deviation: f64,
    pub infeasible_steps: usize,
}

/// Metrics of a log. Collision is judged against the radii in `config`.
pub fn summarize(log: &TrajectoryLog, config: &ScenarioConfig) -> EpisodeMetrics {
    let radii: Vec<f64> = config
        .obstacles()
        .iter()
        .map(|o| config.geometry_for(o).radius())
        .collect();
    let records = &log.records;

    let mut min_separation = f64::INFINITY;
    let mut min_h = f64::INFINITY;
    let mut collision = false;
    let mut active = 0usize;
    let mut infeasible_steps = 0usize;
    let mut max_path_deviation = 0.0f64;
    for r in records {
        for (sep, radius) in r.separation.iter().zip(&radii) {
            min_separation = min_separation.min(*sep);
            collision |= *sep <= *radius;
        }
        for &h in r.h.iter().filter(|h| h.is_finite()) {
            min_h = min_h.min(h);
        }
        active += r.active() as usize;
        infeasible_steps += !r.feasible as usize;
        max_path_deviation =
            max_path_deviation.max(config.trajectory.distance_to_path(&r.state.position()));
    }

    let effort_rate = |r: &StepRecord| r.u_safe.to_vector().norm_squared();
    let control_effort = records
        .windows(2)
        .map(|w| 0.5 * (w[1].t - w[0].t) * (effort_rate(&w[0]) + effort_rate(&w[1])))
        .sum();

    EpisodeMetrics {
        min_separation,
        min_h,
        collision,
        filter_active_fraction: if records.is_empty() {
            0.0
        } else {
            active as f64 / records.len() as f64
        },
        control_effort,
        max_path_deviation,
        infeasible_steps,
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonEntry {
    pub config: ScenarioConfig,
    pub log: TrajectoryLog,
    pub metrics: EpisodeMetrics,
    pub first_activation: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub entries: Vec<ComparisonEntry>,
}

impl ComparisonReport {
    /// Largest pointwise position difference between two episodes over
    /// their common steps.
    pub fn max_position_delta(&self, a: usize, b: usize) -> f64 {
        max_position_delta(&self.entries[a].log, &self.entries[b].log)
    }

    pub fn effort_delta(&self, a: usize, b: usize) -> f64 {
        self.entries[a].metrics.control_effort - self.entries[b].metrics.control_effort
    }

    pub fn deviation_delta(&self, a: usize, b: usize) -> f64 {
        self.entries[a].metrics.max_path_deviation - self.entries[b].metrics.max_path_deviation
    }

    /// True when `a` starts filtering strictly before `b`. An episode that
    /// never filters counts as activating last.
    pub fn activates_earlier(&self, a: usize, b: usize) -> bool {
        let time = |i: usize| self.entries[i].first_activation.unwrap_or(f64::INFINITY);
        time(a) < time(b)
    }
}

pub fn max_position_delta(a: &TrajectoryLog, b: &TrajectoryLog) -> f64 {
    a.records
        .iter()
        .zip(&b.records)
        .map(|(x, y)| (x.state.position() - y.state.position()).norm())
        .fold(0.0, f64::max)
}

/// Runs configurations that share trajectory, obstacles and step size.
pub fn compare(configs: &[ScenarioConfig]) -> Result<ComparisonReport, SimError> {
    if let Some(first) = configs.first() {
        for c in &configs[1..] {
            if c.trajectory != first.trajectory {
                return Err(ConfigError::Mismatch("trajectory").into());
            }
            if c.obstacles != first.obstacles {
                return Err(ConfigError::Mismatch("obstacles").into());
            }
            if c.dt != first.dt {
                return Err(ConfigError::Mismatch("dt").into());
            }
        }
    }
    let entries = configs
        .par_iter()
        .map(|c| {
            let log = run(c)?;
            let metrics = summarize(&log, c);
            Ok(ComparisonEntry {
                config: c.clone(),
                first_activation: log.first_activation(),
                log,
                metrics,
            })
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(ComparisonReport { entries })
}

/// One swept parameter and its values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub values: Vec<toml::Value>,
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub values: Vec<toml::Value>,
    pub outcome: Result<EpisodeMetrics, SimError>,
}

/// Runs the full grid over one or two axes, first axis outermost.
pub fn sweep(base: &ScenarioDocument, axes: &[SweepAxis]) -> Result<Vec<SweepCell>, ConfigError> {
    if axes.is_empty() || axes.len() > 2 {
        return Err(ConfigError::Invariant(
            "a sweep takes one or two keys".to_string(),
        ));
    }
    if let Some(axis) = axes.iter().find(|a| a.values.is_empty()) {
        return Err(ConfigError::Invariant(format!(
            "sweep key `{}` has no values",
            axis.key
        )));
    }

    let mut grid: Vec<Vec<toml::Value>> = vec![Vec::new()];
    for axis in axes {
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut cell = prefix.clone();
                    cell.push(v.clone());
                    cell
                })
            })
            .collect();
    }

    let configs = grid
        .iter()
        .map(|cell| {
            let mut doc = base.clone();
            for (axis, value) in axes.iter().zip(cell) {
                doc.apply_override(&axis.key, value.clone())?;
            }
            doc.resolve()
        })
        .collect::<Result<Vec<_>, ConfigError>>()?;

    Ok(grid
        .into_par_iter()
        .zip(configs.into_par_iter())
        .map(|(values, config)| SweepCell {
            values,
            outcome: run(&config).map(|log| summarize(&log, &config)),
        })
        .collect())
}
