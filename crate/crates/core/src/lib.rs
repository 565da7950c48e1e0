//! Collision-cone control barrier function (C3BF) safety filters for a
//! kinematic fixed-wing aircraft.
//!
//! The crate is layered bottom-up:
//!
//! - [`dynamics`]: 3D Dubins kinematics and RK4 integration.
//! - [`barriers`]: collision-cone barrier, its backstepped extension and a
//!   second-order distance barrier, each with the `L_f h` / `L_g h` split.
//! - [`safety_filter`]: closed-form single-constraint CBF-QP.
//! - [`nominal`]: reference trajectories and the tracking controller.
//! - [`config`], [`sim`], [`report`]: scenario files, closed-loop runs and
//!   their outputs.

pub mod barriers;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod nominal;
pub mod report;
pub mod safety_filter;
pub mod sim;

pub use barriers::{BarrierEval, BarrierKind, CollisionGeometry, Obstacle};
pub use config::{FilterKind, ScenarioConfig, ScenarioDocument};
pub use dynamics::{AircraftState, ControlInput};
pub use error::{BarrierError, ConfigError, DomainError, QpError, ReferenceError, SimError};
pub use safety_filter::{ClassKappa, FilterOutput};
pub use sim::{EpisodeMetrics, TrajectoryLog};
