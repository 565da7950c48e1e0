//! Closed-form CBF-QP safety filter.
//!
//! With a single affine constraint `lf + lg . u + gamma h >= 0`, the
//! minimum-norm correction of `u_des` is zero while the constraint holds at
//! `u_des` and the projection onto the constraint boundary otherwise.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::barriers::BarrierEval;
use crate::dynamics::ControlInput;
use crate::error::QpError;

/// Threshold on `|lg_h|^2` below which an active constraint is declared
/// infeasible.
pub const EPS_GRAD: f64 = 1e-10;

/// Linear class-K function `kappa(h) = gamma h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassKappa {
    pub gamma: f64,
}

impl Default for ClassKappa {
    fn default() -> Self {
        Self { gamma: 1.0 }
    }
}

impl ClassKappa {
    pub fn apply(&self, h: f64) -> f64 {
        self.gamma * h
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterOutput {
    pub u_star: ControlInput,
    pub u_safe: ControlInput,
    pub psi: f64,
    /// `psi < 0`: the desired input violates the constraint.
    pub active: bool,
    /// False when active with a vanishing input gradient.
    pub feasible: bool,
    /// Index of the evaluation that drove the output, if any was eligible.
    pub obstacle: Option<usize>,
}

impl FilterOutput {
    fn passthrough(u_des: &ControlInput, psi: f64, obstacle: Option<usize>) -> Self {
        Self {
            u_star: *u_des,
            u_safe: ControlInput::ZERO,
            psi,
            active: false,
            feasible: true,
            obstacle,
        }
    }
}

/// `h_dot(x, u_des) + kappa(h)`.
pub fn psi(eval: &BarrierEval, u_des: &ControlInput, kappa: &ClassKappa) -> f64 {
    eval.h_dot(u_des) + kappa.apply(eval.h)
}

pub fn filter(
    eval: &BarrierEval,
    u_des: &ControlInput,
    kappa: &ClassKappa,
    eps_grad: f64,
) -> FilterOutput {
    let psi = psi(eval, u_des, kappa);
    if psi >= 0.0 {
        return FilterOutput::passthrough(u_des, psi, None);
    }
    let grad_sq = eval.lg_h.norm_squared();
    if grad_sq <= eps_grad {
        return FilterOutput {
            active: true,
            feasible: false,
            ..FilterOutput::passthrough(u_des, psi, None)
        };
    }
    let u_safe = eval.lg_h * (-psi / grad_sq);
    FilterOutput {
        u_star: ControlInput::from_vector(&(u_des.to_vector() + u_safe)),
        u_safe: ControlInput::from_vector(&u_safe),
        psi,
        active: true,
        feasible: true,
        obstacle: None,
    }
}

/// Minimizer of `|u - u_des|^2` subject to `a . u >= b` with
/// `a = lg_h`, `b = -(lf_h + gamma h)`, solved from the KKT conditions.
///
/// Kept separate from [`filter`]: the multiplier is computed explicitly and
/// the solution rebuilt from stationarity.
pub fn qp_reference_solve(
    eval: &BarrierEval,
    u_des: &ControlInput,
    kappa: &ClassKappa,
) -> Result<ControlInput, QpError> {
    let a = eval.lg_h;
    let b = -(eval.lf_h + kappa.gamma * eval.h);
    let u0 = u_des.to_vector();
    let slack = a.dot(&u0) - b;
    if slack >= 0.0 {
        return Ok(*u_des);
    }
    let aa = a.dot(&a);
    if aa == 0.0 {
        return Err(QpError::Infeasible);
    }
    // Stationarity: u = u0 + mu a. Complementarity with the constraint
    // active: a . u = b, so mu = (b - a . u0) / (a . a) > 0.
    let mu = -slack / aa;
    let u: Vector3<f64> = u0 + a * mu;
    Ok(ControlInput::from_vector(&u))
}

/// Filters against the most violated of several constraints (minimum psi).
/// Degenerate evaluations are skipped.
pub fn compose_obstacles(
    evals: &[BarrierEval],
    u_des: &ControlInput,
    kappa: &ClassKappa,
    eps_grad: f64,
) -> FilterOutput {
    let worst = evals
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.degenerate)
        .map(|(i, e)| (i, psi(e, u_des, kappa)))
        .min_by(|a, b| a.1.total_cmp(&b.1));
    match worst {
        Some((i, _)) => {
            let mut out = filter(&evals[i], u_des, kappa, eps_grad);
            out.obstacle = Some(i);
            out
        }
        None => FilterOutput::passthrough(u_des, f64::INFINITY, None),
    }
}

/// Symmetric per-channel saturation applied after filtering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputClamp {
    pub a_t: f64,
    pub p: f64,
    pub q: f64,
}

impl InputClamp {
    pub fn apply(&self, u: &ControlInput) -> ControlInput {
        ControlInput::new(
            u.a_t.clamp(-self.a_t, self.a_t),
            u.p.clamp(-self.p, self.p),
            u.q.clamp(-self.q, self.q),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::BarrierKind;
    use proptest::prelude::*;

    fn eval(h: f64, lf_h: f64, lg: [f64; 3]) -> BarrierEval {
        BarrierEval {
            h,
            lf_h,
            lg_h: Vector3::from(lg),
            kind: BarrierKind::Naive,
            separation: 500.0,
            degenerate: false,
        }
    }

    const GAMMA1: ClassKappa = ClassKappa { gamma: 1.0 };

    #[test]
    fn psi_examples() {
        let u = ControlInput::new(3.0, -1.0, 7.0);
        assert_eq!(psi(&eval(2.0, -1.0, [0.0; 3]), &u, &GAMMA1), 1.0);
        assert_eq!(psi(&eval(0.0, 0.0, [0.0; 3]), &u, &GAMMA1), 0.0);
        assert_eq!(psi(&eval(-1.0, 0.0, [0.0; 3]), &u, &GAMMA1), -1.0);
    }

    #[test]
    fn inactive_passes_through() {
        let u = ControlInput::new(0.3, 0.1, -0.2);
        let out = filter(&eval(5.0, 0.0, [1.0, 2.0, 3.0]), &ControlInput::ZERO, &GAMMA1, EPS_GRAD);
        assert_eq!(out.psi, 5.0);
        assert_eq!(out.u_safe, ControlInput::ZERO);
        let out = filter(&eval(5.0, 0.0, [1.0, 2.0, 3.0]), &u, &GAMMA1, EPS_GRAD);
        assert!(!out.active);
        assert_eq!(out.u_star, u);
    }

    #[test]
    fn active_projection() {
        let out = filter(&eval(-2.0, 0.0, [1.0, 0.0, 0.0]), &ControlInput::ZERO, &GAMMA1, EPS_GRAD);
        assert!(out.active && out.feasible);
        assert_eq!(out.u_safe, ControlInput::new(2.0, 0.0, 0.0));
    }

    #[test]
    fn degenerate_gradient_is_flagged() {
        let out = filter(&eval(-1.0, 0.0, [0.0; 3]), &ControlInput::ZERO, &GAMMA1, EPS_GRAD);
        assert!(out.active && !out.feasible);
        assert_eq!(out.u_safe, ControlInput::ZERO);
        assert_eq!(
            qp_reference_solve(&eval(-1.0, 0.0, [0.0; 3]), &ControlInput::ZERO, &GAMMA1),
            Err(QpError::Infeasible)
        );
    }

    #[test]
    fn reference_solve_examples() {
        let u = ControlInput::new(1.0, 2.0, 3.0);
        assert_eq!(qp_reference_solve(&eval(4.0, 0.0, [1.0; 3]), &u, &GAMMA1).unwrap(), u);
        let out = qp_reference_solve(&eval(-3.0, 0.0, [1.0, 0.0, 0.0]), &ControlInput::ZERO, &GAMMA1)
            .unwrap();
        assert_eq!(out, ControlInput::new(3.0, 0.0, 0.0));
    }

    #[test]
    fn composition_rules() {
        let u = ControlInput::new(0.5, 0.0, 0.0);
        let a = eval(-1.0, 0.0, [0.0, 0.0, 2.0]);
        let single = compose_obstacles(&[a], &u, &GAMMA1, EPS_GRAD);
        assert_eq!(single, FilterOutput { obstacle: Some(0), ..filter(&a, &u, &GAMMA1, EPS_GRAD) });

        let out = compose_obstacles(
            &[eval(3.0, 0.0, [1.0; 3]), eval(7.0, 0.0, [1.0; 3])],
            &ControlInput::ZERO,
            &GAMMA1,
            EPS_GRAD,
        );
        assert!(!out.active);
        assert_eq!(out.u_star, ControlInput::ZERO);

        let first = eval(-1.0, 0.0, [1.0, 0.0, 0.0]);
        let out = compose_obstacles(&[first, eval(2.0, 0.0, [0.0, 1.0, 0.0])], &ControlInput::ZERO, &GAMMA1, EPS_GRAD);
        assert_eq!(out.obstacle, Some(0));
        assert_eq!(out.u_star, filter(&first, &ControlInput::ZERO, &GAMMA1, EPS_GRAD).u_star);
    }

    #[test]
    fn degenerate_evals_are_skipped() {
        let mut d = eval(-5.0, 0.0, [1.0, 0.0, 0.0]);
        d.degenerate = true;
        let out = compose_obstacles(&[d], &ControlInput::ZERO, &GAMMA1, EPS_GRAD);
        assert!(!out.active);
        assert_eq!(out.obstacle, None);
    }

    #[test]
    fn switch_is_continuous() {
        let e0 = eval(0.0, 0.0, [1.0, -2.0, 0.5]);
        let mut last = f64::INFINITY;
        for k in 1..=12 {
            let psi0 = -10f64.powi(-k);
            let e = BarrierEval { lf_h: psi0, ..e0 };
            let n = filter(&e, &ControlInput::ZERO, &GAMMA1, EPS_GRAD).u_safe.to_vector().norm();
            assert!(n < last);
            last = n;
        }
        assert!(last < 1e-11);
    }

    #[test]
    fn clamp_saturates_each_channel() {
        let c = InputClamp { a_t: 1.0, p: 0.5, q: 0.2 };
        assert_eq!(c.apply(&ControlInput::new(-3.0, 0.1, 9.0)), ControlInput::new(-1.0, 0.1, 0.2));
    }

    proptest! {
        #[test]
        fn closed_form_matches_reference(
            h in -50.0..50.0f64,
            lf in -50.0..50.0f64,
            lg in prop::array::uniform3(-5.0..5.0f64),
            u in prop::array::uniform3(-5.0..5.0f64),
            gamma in 0.1..5.0f64,
        ) {
            let e = eval(h, lf, lg);
            prop_assume!(e.lg_h.norm_squared() > EPS_GRAD);
            let k = ClassKappa { gamma };
            let u = ControlInput::from_vector(&Vector3::from(u));
            let out = filter(&e, &u, &k, EPS_GRAD);
            let reference = qp_reference_solve(&e, &u, &k).unwrap();
            prop_assert!((out.u_star.to_vector() - reference.to_vector()).amax() <= 1e-9);
            if out.active {
                let residual = e.h_dot(&out.u_star) + k.apply(e.h);
                prop_assert!(residual.abs() <= 1e-9);
                prop_assert!(out.u_safe.to_vector().cross(&e.lg_h).norm() <= 1e-9 * (1.0 + out.u_safe.to_vector().norm()));
            } else {
                prop_assert_eq!(out.u_star, u);
            }
        }
    }
}
