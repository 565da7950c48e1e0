//! Reference trajectories and the cascaded tracking controller that
//! produces the desired input fed to the safety filter.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::dynamics::{inertial_velocity, AircraftState, ControlInput, EPS_PITCH, EPS_SPEED};
use crate::error::{DomainError, ReferenceError};

/// Reference position, velocity and acceleration at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSample {
    pub t: f64,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnDirection {
    /// Yaw increasing (right turn with z down).
    #[default]
    Positive,
    Negative,
}

impl TurnDirection {
    fn sign(self) -> f64 {
        match self {
            TurnDirection::Positive => 1.0,
            TurnDirection::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceTrajectory {
    /// `p(t) = start + velocity * t`.
    Straight {
        start: [f64; 3],
        velocity: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<f64>,
    },
    /// Constant-speed horizontal circle at fixed altitude.
    LevelTurn {
        center: [f64; 2],
        altitude: f64,
        radius: f64,
        speed: f64,
        /// Polar angle of the start point around the center (rad).
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        direction: TurnDirection,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<f64>,
    },
}

impl ReferenceTrajectory {
    pub fn horizon(&self) -> f64 {
        match self {
            ReferenceTrajectory::Straight { horizon, .. }
            | ReferenceTrajectory::LevelTurn { horizon, .. } => horizon.unwrap_or(f64::INFINITY),
        }
    }

    /// Reference speed, constant for both families.
    pub fn speed(&self) -> f64 {
        match self {
            ReferenceTrajectory::Straight { velocity, .. } => Vector3::from(*velocity).norm(),
            ReferenceTrajectory::LevelTurn { speed, .. } => *speed,
        }
    }

    /// Euclidean distance from `point` to the geometric path (time-free).
    pub fn distance_to_path(&self, point: &Vector3<f64>) -> f64 {
        match self {
            ReferenceTrajectory::Straight { start, velocity, .. } => {
                let offset = point - Vector3::from(*start);
                let v = Vector3::from(*velocity);
                let n = v.norm();
                if n == 0.0 {
                    return offset.norm();
                }
                let dir = v / n;
                (offset - dir * offset.dot(&dir)).norm()
            }
            ReferenceTrajectory::LevelTurn {
                center,
                altitude,
                radius,
                ..
            } => {
                let horizontal = (point.x - center[0]).hypot(point.y - center[1]);
                (horizontal - radius).hypot(point.z - altitude)
            }
        }
    }
}

/// Samples the reference at time `t`.
pub fn reference_eval(
    trajectory: &ReferenceTrajectory,
    t: f64,
) -> Result<ReferenceSample, ReferenceError> {
    let horizon = trajectory.horizon();
    if !(0.0..=horizon).contains(&t) {
        return Err(ReferenceError::OutOfHorizon { t, horizon });
    }
    Ok(match *trajectory {
        ReferenceTrajectory::Straight {
            start, velocity, ..
        } => {
            let velocity = Vector3::from(velocity);
            ReferenceSample {
                t,
                position: Vector3::from(start) + velocity * t,
                velocity,
                acceleration: Vector3::zeros(),
            }
        }
        ReferenceTrajectory::LevelTurn {
            center,
            altitude,
            radius,
            speed,
            phase,
            direction,
            ..
        } => {
            let s = direction.sign();
            let angle = phase + s * speed * t / radius;
            let (sa, ca) = angle.sin_cos();
            ReferenceSample {
                t,
                position: Vector3::new(center[0] + radius * ca, center[1] + radius * sa, altitude),
                velocity: s * speed * Vector3::new(-sa, ca, 0.0),
                acceleration: -(speed * speed / radius) * Vector3::new(ca, sa, 0.0),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrackingGains {
    pub k_pos: f64,
    pub k_v: f64,
    pub k_theta: f64,
    pub k_phi: f64,
    /// Commanded speed stays within `(1 +- speed_band)` times the reference
    /// speed.
    pub speed_band: f64,
}

impl Default for TrackingGains {
    fn default() -> Self {
        Self {
            k_pos: 0.5,
            k_v: 1.0,
            k_theta: 2.0,
            k_phi: 2.0,
            speed_band: 0.5,
        }
    }
}

/// Velocity the guidance loop asks for: reference velocity plus a
/// proportional pull onto the reference point.
pub fn desired_velocity(
    state: &AircraftState,
    reference: &ReferenceSample,
    gains: &TrackingGains,
) -> Vector3<f64> {
    reference.velocity + gains.k_pos * (reference.position - state.position())
}

/// Horizontal acceleration demand normal to the aircraft heading, positive
/// towards increasing yaw.
pub fn lateral_accel_demand(
    state: &AircraftState,
    reference: &ReferenceSample,
    gains: &TrackingGains,
) -> f64 {
    let v_d = desired_velocity(state, reference, gains);
    let demand = reference.acceleration + gains.k_pos * (v_d - inertial_velocity(state));
    let (spsi, cpsi) = state.psi.sin_cos();
    demand.dot(&Vector3::new(-spsi, cpsi, 0.0))
}

/// Bank angle of a coordinated turn producing `a_lat` of lateral acceleration.
pub fn coordinated_bank(a_lat: f64, gravity: f64) -> f64 {
    a_lat.atan2(gravity)
}

/// Cascaded proportional tracking law.
pub fn track(
    state: &AircraftState,
    reference: &ReferenceSample,
    gains: &TrackingGains,
    gravity: f64,
) -> Result<ControlInput, DomainError> {
    state.check()?;
    let v_d = desired_velocity(state, reference, gains);
    let speed_d = v_d.norm();

    // Speed command limited to a band around the reference speed; without
    // it an aircraft ahead of its reference point chases an ever larger |v_d|.
    let v_ref = reference.velocity.norm();
    let speed_cmd = speed_d.clamp(
        v_ref * (1.0 - gains.speed_band),
        v_ref * (1.0 + gains.speed_band),
    );
    let a_t = gains.k_v * (speed_cmd - state.v_t);

    let pitch_limit = FRAC_PI_2 - 2.0 * EPS_PITCH;
    let theta_d = if speed_d > EPS_SPEED {
        (-(v_d.z / speed_d).clamp(-1.0, 1.0).asin()).clamp(-pitch_limit, pitch_limit)
    } else {
        state.theta
    };
    let q = gains.k_theta * (theta_d - state.theta) / state.phi.cos().max(0.1);

    let phi_d = coordinated_bank(lateral_accel_demand(state, reference, gains), gravity);
    let p = gains.k_phi * (phi_d - state.phi);

    let u = ControlInput::new(a_t, p, q);
    if u.is_finite() {
        Ok(u)
    } else {
        Err(DomainError::NonFinite)
    }
}
