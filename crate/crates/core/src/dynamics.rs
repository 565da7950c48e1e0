//! 3D Dubins fixed-wing kinematics.
//!
//! State is `[x_p, y_p, z_p, phi, theta, psi, v_t]`, input is `[A_T, P, Q]`.
//! The position rows follow `z_dot = -V_T sin(theta)`, so positive pitch
//! decreases `z`: the earth-fixed `z` axis points down.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::DomainError;

/// Minimum airspeed accepted by the model (m/s).
pub const EPS_SPEED: f64 = 1e-3;
/// Minimum distance of pitch from +-pi/2 (rad).
pub const EPS_PITCH: f64 = 1e-3;
/// Standard gravity (m/s^2).
pub const GRAVITY: f64 = 9.81;

pub type StateVector = SVector<f64, 7>;
pub type ControlMatrix = SMatrix<f64, 7, 3>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AircraftState {
    pub x_p: f64,
    pub y_p: f64,
    pub z_p: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub v_t: f64,
}

/// Longitudinal acceleration, body roll rate and body pitch rate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlInput {
    pub a_t: f64,
    pub p: f64,
    pub q: f64,
}

/// Time derivative of an [`AircraftState`], field by field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub x_p: f64,
    pub y_p: f64,
    pub z_p: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub v_t: f64,
}

impl AircraftState {
    pub fn new(position: Vector3<f64>, phi: f64, theta: f64, psi: f64, v_t: f64) -> Self {
        Self {
            x_p: position.x,
            y_p: position.y,
            z_p: position.z,
            phi,
            theta,
            psi,
            v_t,
        }
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x_p, self.y_p, self.z_p)
    }

    pub fn to_vector(&self) -> StateVector {
        StateVector::from([
            self.x_p, self.y_p, self.z_p, self.phi, self.theta, self.psi, self.v_t,
        ])
    }

    pub fn from_vector(v: &StateVector) -> Self {
        Self {
            x_p: v[0],
            y_p: v[1],
            z_p: v[2],
            phi: v[3],
            theta: v[4],
            psi: v[5],
            v_t: v[6],
        }
    }

    /// Checks the airspeed and pitch guards.
    pub fn check(&self) -> Result<(), DomainError> {
        if !self.to_vector().iter().all(|x| x.is_finite()) {
            return Err(DomainError::NonFinite);
        }
        check_speed(self.v_t)?;
        check_pitch(self.theta)
    }

    /// Copy with roll and yaw wrapped to (-pi, pi].
    pub fn wrapped(mut self) -> Self {
        self.phi = wrap_angle(self.phi);
        self.psi = wrap_angle(self.psi);
        self
    }
}

impl ControlInput {
    pub const ZERO: Self = Self {
        a_t: 0.0,
        p: 0.0,
        q: 0.0,
    };

    pub fn new(a_t: f64, p: f64, q: f64) -> Self {
        Self { a_t, p, q }
    }

    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(self.a_t, self.p, self.q)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn is_finite(&self) -> bool {
        self.a_t.is_finite() && self.p.is_finite() && self.q.is_finite()
    }
}

impl StateDerivative {
    pub fn to_vector(&self) -> StateVector {
        StateVector::from([
            self.x_p, self.y_p, self.z_p, self.phi, self.theta, self.psi, self.v_t,
        ])
    }

    pub fn from_vector(v: &StateVector) -> Self {
        Self {
            x_p: v[0],
            y_p: v[1],
            z_p: v[2],
            phi: v[3],
            theta: v[4],
            psi: v[5],
            v_t: v[6],
        }
    }
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(angle: f64) -> f64 {
    let w = angle.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

fn check_speed(v_t: f64) -> Result<(), DomainError> {
    if v_t > EPS_SPEED {
        Ok(())
    } else {
        Err(DomainError::SpeedTooLow {
            v_t,
            min: EPS_SPEED,
        })
    }
}

fn check_pitch(theta: f64) -> Result<(), DomainError> {
    if FRAC_PI_2 - theta.abs() > EPS_PITCH {
        Ok(())
    } else {
        Err(DomainError::PitchSingular {
            theta,
            margin: EPS_PITCH,
        })
    }
}

/// Drift field `f(x)`.
pub fn drift(state: &AircraftState, gravity: f64) -> Result<StateDerivative, DomainError> {
    state.check()?;
    let (sphi, cphi) = state.phi.sin_cos();
    let (sth, cth) = state.theta.sin_cos();
    let (spsi, cpsi) = state.psi.sin_cos();
    let v = state.v_t;
    let k = gravity / v;
    Ok(StateDerivative {
        x_p: v * cth * cpsi,
        y_p: v * cth * spsi,
        z_p: -v * sth,
        phi: k * sphi * cphi * sth,
        theta: -k * sphi * sphi * cth,
        psi: k * sphi * cphi,
        v_t: 0.0,
    })
}

/// Input matrix `g(x)`; columns are `(A_T, P, Q)`.
pub fn control_matrix(state: &AircraftState) -> Result<ControlMatrix, DomainError> {
    check_pitch(state.theta)?;
    let (sphi, cphi) = state.phi.sin_cos();
    let (sth, cth) = state.theta.sin_cos();
    let mut g = ControlMatrix::zeros();
    g[(3, 1)] = 1.0;
    g[(3, 2)] = sphi * sth / cth;
    g[(4, 2)] = cphi;
    g[(5, 2)] = sphi / cth;
    g[(6, 0)] = 1.0;
    Ok(g)
}

/// `f(x) + g(x) u`.
pub fn state_derivative(
    state: &AircraftState,
    input: &ControlInput,
    gravity: f64,
) -> Result<StateDerivative, DomainError> {
    if !input.is_finite() {
        return Err(DomainError::NonFinite);
    }
    let f = drift(state, gravity)?.to_vector();
    let g = control_matrix(state)?;
    Ok(StateDerivative::from_vector(&(f + g * input.to_vector())))
}

/// Earth-frame velocity of the aircraft.
pub fn inertial_velocity(state: &AircraftState) -> Vector3<f64> {
    state.v_t * flight_direction(state.theta, state.psi)
}

fn flight_direction(theta: f64, psi: f64) -> Vector3<f64> {
    let (sth, cth) = theta.sin_cos();
    let (spsi, cpsi) = psi.sin_cos();
    Vector3::new(cth * cpsi, cth * spsi, -sth)
}

/// Body yaw rate of a coordinated turn, `(g / V_T) sin(phi) cos(theta)`.
pub fn coordinated_turn_rate(state: &AircraftState, gravity: f64) -> Result<f64, DomainError> {
    check_speed(state.v_t)?;
    Ok(gravity / state.v_t * state.phi.sin() * state.theta.cos())
}

/// Earth-frame acceleration split into its input-free part and its input
/// Jacobian: `a = drift + jacobian * u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelerationMap {
    pub drift: Vector3<f64>,
    pub jacobian: Matrix3<f64>,
}

impl AccelerationMap {
    pub fn apply(&self, input: &ControlInput) -> Vector3<f64> {
        self.drift + self.jacobian * input.to_vector()
    }
}

/// Chain rule of `inertial_velocity` through the state derivative.
///
/// The roll rate never reaches the velocity direction, so the `P` column of
/// the Jacobian is zero.
pub fn acceleration_map(state: &AircraftState, gravity: f64) -> Result<AccelerationMap, DomainError> {
    let f = drift(state, gravity)?;
    let g = control_matrix(state)?;
    let (sth, cth) = state.theta.sin_cos();
    let (spsi, cpsi) = state.psi.sin_cos();
    let v = state.v_t;

    let dir = Vector3::new(cth * cpsi, cth * spsi, -sth);
    let d_theta = v * Vector3::new(-sth * cpsi, -sth * spsi, -cth);
    let d_psi = v * Vector3::new(-cth * spsi, cth * cpsi, 0.0);

    let drift = d_theta * f.theta + d_psi * f.psi + dir * f.v_t;
    let mut jacobian = Matrix3::zeros();
    for col in 0..3 {
        let column = dir * g[(6, col)] + d_theta * g[(4, col)] + d_psi * g[(5, col)];
        jacobian.set_column(col, &column);
    }
    Ok(AccelerationMap { drift, jacobian })
}

/// Time derivative of [`inertial_velocity`] under `input`.
pub fn aircraft_acceleration(
    state: &AircraftState,
    input: &ControlInput,
    gravity: f64,
) -> Result<Vector3<f64>, DomainError> {
    Ok(acceleration_map(state, gravity)?.apply(input))
}

/// One classical Runge-Kutta step with the input held over the step.
pub fn step_rk4(
    state: &AircraftState,
    input: &ControlInput,
    dt: f64,
    gravity: f64,
) -> Result<AircraftState, DomainError> {
    let x0 = state.to_vector();
    let rate = |x: &StateVector| -> Result<StateVector, DomainError> {
        Ok(state_derivative(&AircraftState::from_vector(x), input, gravity)?.to_vector())
    };
    let k1 = rate(&x0)?;
    let k2 = rate(&(x0 + k1 * (dt / 2.0)))?;
    let k3 = rate(&(x0 + k2 * (dt / 2.0)))?;
    let k4 = rate(&(x0 + k3 * dt))?;
    let x1 = x0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let next = AircraftState::from_vector(&x1).wrapped();
    next.check()?;
    Ok(next)
}
