//! Barrier functions for a spherical obstacle.
//!
//! Every evaluation returns `h` together with the split of its time
//! derivative, `h_dot = lf_h + lg_h . u`, where `lf_h` collects all
//! input-free terms (including obstacle motion) and `lg_h` the coefficients
//! of `(A_T, P, Q)`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    acceleration_map, coordinated_turn_rate, control_matrix, drift, inertial_velocity,
    AircraftState, ControlInput,
};
use crate::error::{BarrierError, DomainError};
use crate::nominal::{coordinated_bank, lateral_accel_demand, ReferenceSample, TrackingGains};

/// Relative speed below which the collision cone is undefined (m/s).
pub const EPS_REL_SPEED: f64 = 1e-6;

/// Sphere moving at constant velocity. `center` is the position at `t = 0`
/// unless the obstacle has been advanced with [`Obstacle::at`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub r_obs: f64,
}

impl Obstacle {
    pub fn new(center: Vector3<f64>, velocity: Vector3<f64>, r_obs: f64) -> Self {
        Self {
            center,
            velocity,
            r_obs,
        }
    }

    /// The obstacle advanced analytically by `t` seconds.
    pub fn at(&self, t: f64) -> Self {
        Self {
            center: self.center + self.velocity * t,
            ..*self
        }
    }
}

/// Radii that add up to the collision radius `r = r_obs + r_uav + d_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionGeometry {
    pub r_obs: f64,
    pub r_uav: f64,
    pub d_s: f64,
}

impl CollisionGeometry {
    pub fn new(r_obs: f64, r_uav: f64, d_s: f64) -> Self {
        Self { r_obs, r_uav, d_s }
    }

    /// A geometry whose whole radius sits in the safety margin.
    pub fn with_radius(r: f64) -> Self {
        Self::new(0.0, 0.0, r)
    }

    pub fn radius(&self) -> f64 {
        self.r_obs + self.r_uav + self.d_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeKinematics {
    /// Obstacle center minus aircraft position.
    pub p_rel: Vector3<f64>,
    /// Time derivative of `p_rel`.
    pub v_rel: Vector3<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierKind {
    Naive,
    Backstepped,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierEval {
    pub h: f64,
    pub lf_h: f64,
    /// Coefficients of `(A_T, P, Q)` in `h_dot`.
    pub lg_h: Vector3<f64>,
    pub kind: BarrierKind,
    /// Center-to-center distance (m).
    pub separation: f64,
    /// Set when the relative velocity was too small to define the cone; the
    /// filter ignores such evaluations.
    pub degenerate: bool,
}

impl BarrierEval {
    /// `h_dot` under input `u`.
    pub fn h_dot(&self, u: &ControlInput) -> f64 {
        self.lf_h + self.lg_h.dot(&u.to_vector())
    }
}

/// How the desired body yaw rate of the backstepped barrier is obtained.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RDesMode {
    /// Lateral acceleration commanded by the tracking controller, feedback
    /// included.
    #[default]
    CommandedLateral,
    /// Lateral component of the reference acceleration alone.
    ReferenceFeedforward,
}

impl RDesMode {
    pub fn lateral_accel(
        self,
        state: &AircraftState,
        reference: &ReferenceSample,
        gains: &TrackingGains,
    ) -> f64 {
        match self {
            RDesMode::CommandedLateral => lateral_accel_demand(state, reference, gains),
            RDesMode::ReferenceFeedforward => {
                let (spsi, cpsi) = state.psi.sin_cos();
                reference.acceleration.dot(&Vector3::new(-spsi, cpsi, 0.0))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BacksteppingConfig {
    pub lambda: f64,
    pub r_des_mode: RDesMode,
}

impl Default for BacksteppingConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            r_des_mode: RDesMode::default(),
        }
    }
}

pub fn relative_kinematics(state: &AircraftState, obstacle: &Obstacle) -> RelativeKinematics {
    RelativeKinematics {
        p_rel: obstacle.center - state.position(),
        v_rel: obstacle.velocity - inertial_velocity(state),
    }
}

fn outside(p_rel: &Vector3<f64>, r: f64) -> Result<(f64, f64), BarrierError> {
    let dist = p_rel.norm();
    if dist <= r {
        return Err(BarrierError::InsideCollisionRadius {
            separation: dist,
            radius: r,
        });
    }
    Ok((dist, (dist * dist - r * r).sqrt()))
}

/// Collision-cone barrier value `<p, v> + |v| sqrt(|p|^2 - r^2)`.
///
/// Non-negative exactly when the relative velocity points outside the cone
/// of directions that hit the collision sphere.
pub fn c3bf_value(rel: &RelativeKinematics, geom: &CollisionGeometry) -> Result<f64, BarrierError> {
    let (_, tangent) = outside(&rel.p_rel, geom.radius())?;
    Ok(rel.p_rel.dot(&rel.v_rel) + rel.v_rel.norm() * tangent)
}

fn cone_eval(
    state: &AircraftState,
    obstacle: &Obstacle,
    geom: &CollisionGeometry,
    gravity: f64,
    allow_degenerate: bool,
) -> Result<BarrierEval, BarrierError> {
    let acc = acceleration_map(state, gravity)?;
    let RelativeKinematics { p_rel, v_rel } = relative_kinematics(state, obstacle);
    let (dist, tangent) = outside(&p_rel, geom.radius())?;
    let speed = v_rel.norm();

    let degenerate = speed <= EPS_REL_SPEED;
    if degenerate && !allow_degenerate {
        return Err(BarrierError::DegenerateVelocity { speed });
    }
    // Gradients of h with respect to p_rel and v_rel; the second is the
    // vector usually written xi.
    let (grad_p, xi) = if degenerate {
        (v_rel, p_rel)
    } else {
        (
            v_rel + p_rel * (speed / tangent),
            p_rel + v_rel * (tangent / speed),
        )
    };
    let h = p_rel.dot(&v_rel) + speed * tangent;
    // d/dt v_rel = -(aircraft acceleration); the obstacle does not accelerate.
    let lf_h = grad_p.dot(&v_rel) - xi.dot(&acc.drift);
    let lg_h = -(acc.jacobian.transpose() * xi);
    Ok(BarrierEval {
        h,
        lf_h,
        lg_h,
        kind: BarrierKind::Naive,
        separation: dist,
        degenerate,
    })
}

/// Collision-cone barrier and its derivative split.
pub fn c3bf_eval(
    state: &AircraftState,
    obstacle: &Obstacle,
    geom: &CollisionGeometry,
    gravity: f64,
) -> Result<BarrierEval, BarrierError> {
    cone_eval(state, obstacle, geom, gravity, false)
}

/// Like [`c3bf_eval`], but a vanishing relative velocity yields an
/// evaluation flagged `degenerate` (cone term dropped) instead of an error.
pub fn c3bf_eval_lenient(
    state: &AircraftState,
    obstacle: &Obstacle,
    geom: &CollisionGeometry,
    gravity: f64,
) -> Result<BarrierEval, BarrierError> {
    cone_eval(state, obstacle, geom, gravity, true)
}

/// Desired body yaw rate for a lateral acceleration demand, through the
/// coordinated-turn bank angle.
pub fn r_des(state: &AircraftState, a_lat_des: f64, gravity: f64) -> Result<f64, DomainError> {
    let bank = coordinated_bank(a_lat_des, gravity);
    coordinated_turn_rate(
        &AircraftState {
            phi: bank,
            ..*state
        },
        gravity,
    )
}

/// Adds `-(R_des - R)^2 / (2 lambda)` to a cone evaluation. `R_des` is held
/// constant between control updates.
fn add_backstepping(
    mut eval: BarrierEval,
    state: &AircraftState,
    lambda: f64,
    r_des: f64,
    gravity: f64,
) -> Result<BarrierEval, BarrierError> {
    let yaw_rate = coordinated_turn_rate(state, gravity)?;
    let f = drift(state, gravity)?;
    let g = control_matrix(state)?;
    let (sphi, cphi) = state.phi.sin_cos();
    let (sth, cth) = state.theta.sin_cos();
    let k = gravity / state.v_t;

    let dr_dphi = k * cphi * cth;
    let dr_dtheta = -k * sphi * sth;
    let dr_dv = -k / state.v_t * sphi * cth;

    let err = r_des - yaw_rate;
    let rate_drift = dr_dphi * f.phi + dr_dtheta * f.theta;
    let rate_input = Vector3::from_fn(|col, _| {
        dr_dphi * g[(3, col)] + dr_dtheta * g[(4, col)] + dr_dv * g[(6, col)]
    });

    eval.h -= err * err / (2.0 * lambda);
    eval.lf_h += err / lambda * rate_drift;
    eval.lg_h += rate_input * (err / lambda);
    eval.kind = BarrierKind::Backstepped;
    Ok(eval)
}

/// Collision-cone barrier extended with a yaw-rate backstepping penalty.
pub fn backstepped_eval(
    state: &AircraftState,
    obstacle: &Obstacle,
    geom: &CollisionGeometry,
    lambda: f64,
    r_des: f64,
    gravity: f64,
) -> Result<BarrierEval, BarrierError> {
    let base = c3bf_eval(state, obstacle, geom, gravity)?;
    add_backstepping(base, state, lambda, r_des, gravity)
}

pub fn backstepped_eval_lenient(
    state: &AircraftState,
    obstacle: &Obstacle,
    geom: &CollisionGeometry,
    lambda: f64,
    r_des: f64,
    gravity: f64,
) -> Result<BarrierEval, BarrierError> {
    let base = c3bf_eval_lenient(state, obstacle, geom, gravity)?;
    add_backstepping(base, state, lambda, r_des, gravity)
}

/// Second-order distance barrier `H = 2 <p, v> + gamma1 (|p|^2 - r^2)`.
///
/// `|p|^2 - r^2` has relative degree two, so the filter acts on `H`.
pub fn baseline_distance_eval(
    state: &AircraftState,
    obstacle: &Obstacle,
    geom: &CollisionGeometry,
    gravity: f64,
    gamma1: f64,
) -> Result<BarrierEval, BarrierError> {
    let acc = acceleration_map(state, gravity)?;
    let RelativeKinematics { p_rel, v_rel } = relative_kinematics(state, obstacle);
    let r = geom.radius();
    let dist = p_rel.norm();
    if dist < r {
        return Err(BarrierError::InsideCollisionRadius {
            separation: dist,
            radius: r,
        });
    }
    let pv = p_rel.dot(&v_rel);
    let h0 = dist * dist - r * r;
    Ok(BarrierEval {
        h: 2.0 * pv + gamma1 * h0,
        lf_h: 2.0 * v_rel.norm_squared() - 2.0 * p_rel.dot(&acc.drift) + 2.0 * gamma1 * pv,
        lg_h: -2.0 * (acc.jacobian.transpose() * p_rel),
        kind: BarrierKind::Baseline,
        separation: dist,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{state_derivative, StateVector, GRAVITY};
    use approx::assert_abs_diff_eq;
    use nalgebra::{Rotation3, Unit};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn level_at_origin(v_t: f64) -> AircraftState {
        AircraftState::new(Vector3::zeros(), 0.0, 0.0, 0.0, v_t)
    }

    fn rel(p: [f64; 3], v: [f64; 3]) -> RelativeKinematics {
        RelativeKinematics {
            p_rel: Vector3::from(p),
            v_rel: Vector3::from(v),
        }
    }

    #[test]
    fn relative_kinematics_examples() {
        let s = level_at_origin(10.0);
        let o = Obstacle::new(Vector3::new(500.0, 0.0, 0.0), Vector3::zeros(), 0.0);
        let r = relative_kinematics(&s, &o);
        assert_eq!(r.p_rel, Vector3::new(500.0, 0.0, 0.0));
        assert_eq!(r.v_rel, Vector3::new(-10.0, 0.0, 0.0));

        let o = Obstacle::new(Vector3::new(500.0, 0.0, 0.0), Vector3::new(5.0, 0.0, 0.0), 0.0);
        assert_eq!(relative_kinematics(&s, &o).v_rel, Vector3::new(-5.0, 0.0, 0.0));

        let o = Obstacle::new(Vector3::zeros(), Vector3::new(10.0, 0.0, 0.0), 0.0);
        let r = relative_kinematics(&s, &o);
        assert_eq!((r.p_rel, r.v_rel), (Vector3::zeros(), Vector3::zeros()));
    }

    #[test]
    fn c3bf_value_examples() {
        let g = CollisionGeometry::with_radius(100.0);
        let h = c3bf_value(&rel([200.0, 0.0, 0.0], [-20.0, 0.0, 0.0]), &g).unwrap();
        assert_abs_diff_eq!(h, -4000.0 + 20.0 * 30000f64.sqrt(), epsilon = 1e-9);
        assert_abs_diff_eq!(h, -535.898, epsilon = 1e-3);
        assert_eq!(c3bf_value(&rel([200.0, 0.0, 0.0], [0.0; 3]), &g).unwrap(), 0.0);
        let h = c3bf_value(&rel([200.0, 0.0, 0.0], [0.0, 20.0, 0.0]), &g).unwrap();
        assert_abs_diff_eq!(h, 3464.102, epsilon = 1e-3);
        assert!(matches!(
            c3bf_value(&rel([60.0, 80.0, 0.0], [1.0, 0.0, 0.0]), &g),
            Err(BarrierError::InsideCollisionRadius { .. })
        ));
    }

    #[test]
    fn cone_boundary_limit() {
        let r = 100.0;
        let g = CollisionGeometry::with_radius(r);
        let v = [-3.0, 4.0, 1.0];
        // cos(alpha) = sqrt(2 eps + eps^2) bounds the cone term.
        let eps = 1e-6;
        let k = rel([r * (1.0 + eps), 0.0, 0.0], v);
        let gap = c3bf_value(&k, &g).unwrap() - k.p_rel.dot(&k.v_rel);
        let cos_alpha = (2.0 * eps + eps * eps).sqrt();
        assert!(gap.abs() <= cos_alpha * k.p_rel.norm() * k.v_rel.norm() * (1.0 + 1e-9));

        let k = rel([r * (1.0 + 1e-8), 0.0, 0.0], v);
        let inner = k.p_rel.dot(&k.v_rel);
        assert!(((c3bf_value(&k, &g).unwrap() - inner) / inner).abs() < 1e-3);
    }

    #[test]
    fn head_on_gradient() {
        let s = level_at_origin(20.0);
        let o = Obstacle::new(Vector3::new(500.0, 0.0, 0.0), Vector3::zeros(), 0.0);
        let e = c3bf_eval(&s, &o, &CollisionGeometry::with_radius(100.0), GRAVITY).unwrap();
        // xi = p - v_hat * sqrt(|p|^2 - r^2) lies on the x axis.
        let xi_x = 500.0 - (500.0f64.powi(2) - 1e4).sqrt();
        assert_abs_diff_eq!(e.lg_h[0], -xi_x, epsilon = 1e-9);
        assert!(e.lg_h[0] != 0.0);
        assert_eq!(e.lg_h[1], 0.0);
        assert_abs_diff_eq!(e.lg_h[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_velocity_is_reported() {
        let s = level_at_origin(20.0);
        let o = Obstacle::new(Vector3::new(500.0, 0.0, 0.0), Vector3::new(20.0, 0.0, 0.0), 0.0);
        let g = CollisionGeometry::with_radius(100.0);
        assert!(matches!(
            c3bf_eval(&s, &o, &g, GRAVITY),
            Err(BarrierError::DegenerateVelocity { .. })
        ));
        let e = c3bf_eval_lenient(&s, &o, &g, GRAVITY).unwrap();
        assert!(e.degenerate);
        assert_eq!(e.h, 0.0);
    }

    #[test]
    fn r_des_examples() {
        let s = AircraftState { v_t: 9.81, ..level_at_origin(9.81) };
        assert_eq!(r_des(&s, 0.0, 9.81).unwrap(), 0.0);
        assert_abs_diff_eq!(r_des(&s, 9.81, 9.81).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);
        assert!(r_des(&s, 1e-9, 9.81).unwrap().abs() < 1e-9);
        assert!(r_des(&level_at_origin(0.0), 1.0, 9.81).is_err());
    }

    #[test]
    fn backstepping_penalty_vanishes_at_matched_rate() {
        let s = AircraftState { phi: 0.2, theta: 0.1, ..level_at_origin(25.0) };
        let o = Obstacle::new(Vector3::new(400.0, 50.0, -20.0), Vector3::new(-3.0, 0.0, 0.0), 0.0);
        let g = CollisionGeometry::with_radius(100.0);
        let yaw = coordinated_turn_rate(&s, GRAVITY).unwrap();
        let naive = c3bf_eval(&s, &o, &g, GRAVITY).unwrap();
        let back = backstepped_eval(&s, &o, &g, 1e-4, yaw, GRAVITY).unwrap();
        assert_eq!(back.h, naive.h);
        assert_eq!(back.lg_h[1], 0.0);
        assert_eq!(back.kind, BarrierKind::Backstepped);

        let far = backstepped_eval(&s, &o, &g, 1e12, yaw + 0.3, GRAVITY).unwrap();
        assert!((far.h - naive.h).abs() < 1e-9);
    }

    #[test]
    fn backstepped_roll_coefficient() {
        let s = AircraftState { phi: 0.3, ..level_at_origin(9.81) };
        let o = Obstacle::new(Vector3::new(400.0, 30.0, 10.0), Vector3::zeros(), 0.0);
        let g = CollisionGeometry::with_radius(100.0);
        let yaw = coordinated_turn_rate(&s, 9.81).unwrap();
        let e = backstepped_eval(&s, &o, &g, 1e-4, yaw + 0.2, 9.81).unwrap();
        assert_abs_diff_eq!(e.lg_h[1], 0.2 / 1e-4 * 0.3f64.cos(), epsilon = 1e-6);
        assert_abs_diff_eq!(e.lg_h[1], 1910.67, epsilon = 1e-2);
    }

    #[test]
    fn baseline_examples() {
        let g = CollisionGeometry::with_radius(100.0);
        let s = level_at_origin(20.0);
        // Obstacle co-moving with the aircraft: v_rel = 0.
        let o = Obstacle::new(Vector3::new(300.0, 40.0, 0.0), Vector3::new(20.0, 0.0, 0.0), 0.0);
        let e = baseline_distance_eval(&s, &o, &g, GRAVITY, 1.5).unwrap();
        assert_abs_diff_eq!(e.h, 1.5 * (300f64.powi(2) + 1600.0 - 1e4), epsilon = 1e-9);
        let o = Obstacle::new(Vector3::new(100.0, 0.0, 0.0), Vector3::new(20.0, 0.0, 0.0), 0.0);
        assert_eq!(baseline_distance_eval(&s, &o, &g, GRAVITY, 1.0).unwrap().h, 0.0);
    }

    // Central difference of a barrier along the closed-loop flow, with the
    // obstacle advanced alongside the aircraft.
    fn fd_hdot(
        eval: impl Fn(&AircraftState, &Obstacle) -> BarrierEval,
        s: &AircraftState,
        o: &Obstacle,
        u: &ControlInput,
    ) -> f64 {
        let d = 1e-6;
        let xdot = state_derivative(s, u, GRAVITY).unwrap().to_vector();
        let shift = |k: f64| {
            let x: StateVector = s.to_vector() + xdot * (k * d);
            (AircraftState::from_vector(&x), o.at(k * d))
        };
        let (sp, op) = shift(1.0);
        let (sm, om) = shift(-1.0);
        (eval(&sp, &op).h - eval(&sm, &om).h) / (2.0 * d)
    }

    fn arb_case() -> impl Strategy<Value = (AircraftState, Obstacle, ControlInput, f64)> {
        (
            (-PI..PI, -1.2..1.2f64, -PI..PI, 5.0..40.0f64),
            (1.1..8.0f64, -PI..PI, -1.5..1.5f64),
            prop::array::uniform3(-15.0..15.0f64),
            (-3.0..3.0f64, -0.5..0.5f64, -0.5..0.5f64),
            -0.5..0.5f64,
        )
            .prop_map(|((phi, theta, psi, v), (dist, az, el), vel, (a, p, q), rd)| {
                let s = AircraftState::new(Vector3::new(10.0, -20.0, 5.0), phi, theta, psi, v);
                let dir = Vector3::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin());
                let o = Obstacle::new(s.position() + dir * (100.0 * dist), Vector3::from(vel), 40.0);
                (s, o, ControlInput::new(a, p, q), rd)
            })
    }

    proptest! {
        #[test]
        fn rotation_invariance(
            p in prop::array::uniform3(-500.0..500.0f64),
            v in prop::array::uniform3(-30.0..30.0f64),
            axis in prop::array::uniform3(-1.0..1.0f64),
            angle in -PI..PI,
        ) {
            let g = CollisionGeometry::with_radius(100.0);
            let k = rel(p, v);
            prop_assume!(k.p_rel.norm() > 101.0);
            prop_assume!(Vector3::from(axis).norm() > 1e-3);
            let rot = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::from(axis)), angle);
            let turned = RelativeKinematics { p_rel: rot * k.p_rel, v_rel: rot * k.v_rel };
            let a = c3bf_value(&k, &g).unwrap();
            let b = c3bf_value(&turned, &g).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }

        #[test]
        fn naive_roll_coefficient_is_zero((s, o, _u, _rd) in arb_case()) {
            let e = c3bf_eval(&s, &o, &CollisionGeometry::with_radius(100.0), GRAVITY).unwrap();
            prop_assert_eq!(e.lg_h[1], 0.0);
        }

        #[test]
        fn backstepped_never_exceeds_naive((s, o, _u, rd) in arb_case(), lambda in 1e-6..1e3f64) {
            let g = CollisionGeometry::with_radius(100.0);
            let naive = c3bf_eval(&s, &o, &g, GRAVITY).unwrap();
            let back = backstepped_eval(&s, &o, &g, lambda, rd, GRAVITY).unwrap();
            prop_assert!(back.h <= naive.h);
        }

        #[test]
        fn derivatives_match_finite_differences((s, o, u, rd) in arb_case()) {
            let g = CollisionGeometry::with_radius(100.0);
            let check = |analytic: f64, fd: f64| (analytic - fd).abs() <= 1e-4 * analytic.abs().max(1.0);

            let e = c3bf_eval(&s, &o, &g, GRAVITY).unwrap();
            let fd = fd_hdot(|s, o| c3bf_eval(s, o, &g, GRAVITY).unwrap(), &s, &o, &u);
            prop_assert!(check(e.h_dot(&u), fd), "naive {} vs {}", e.h_dot(&u), fd);

            let e = backstepped_eval(&s, &o, &g, 1e-4, rd, GRAVITY).unwrap();
            let fd = fd_hdot(|s, o| backstepped_eval(s, o, &g, 1e-4, rd, GRAVITY).unwrap(), &s, &o, &u);
            prop_assert!(check(e.h_dot(&u), fd), "backstepped {} vs {}", e.h_dot(&u), fd);

            let e = baseline_distance_eval(&s, &o, &g, GRAVITY, 1.0).unwrap();
            let fd = fd_hdot(|s, o| baseline_distance_eval(s, o, &g, GRAVITY, 1.0).unwrap(), &s, &o, &u);
            prop_assert!(check(e.h_dot(&u), fd), "baseline {} vs {}", e.h_dot(&u), fd);
        }
    }
}
