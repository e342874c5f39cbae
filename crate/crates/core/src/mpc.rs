//! Receding-horizon outer loop on the pseudo-linearized inner loop.
//!
//! The decision variable is the internal-reference increment sequence
//! dv over the horizon, with v(k+i) = v_prev + sum_{j<=i} dv(j). Because
//! the estimator's map from v to predicted outputs and inputs is affine,
//! one base evaluation plus one probe per horizon column condenses
//!
//! ```text
//!   J = q sum_{i=1..Hp} (yhat(k+i) - r(k+i))^2
//!     + r sum_{i=0..Hu-1} duhat(k+i)^2
//!     + v sum_{i=0..Hu-1} dv(k+i)^2
//! ```
//!
//! into min 1/2 dv' H dv + f' dv subject to box constraints on the
//! estimated input, solved by Hildreth's dual coordinate ascent. The v
//! term keeps H positive definite (eigenvalues >= 2v), so the dual sweep
//! always has a well-defined primal recovery.

use crate::estimator::{advance_state, estimate_horizon, EstimatorState};
use crate::frit::ThetaFull;
use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpcWeights {
    /// Tracking error weight, >= 0.
    pub q: f64,
    /// Input-variation weight, >= 0.
    pub r: f64,
    /// Internal-reference-variation weight, > 0; guarantees strict
    /// convexity.
    pub v: f64,
    /// Prediction horizon; the control horizon is the same length.
    pub hp: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputConstraints {
    pub u_min: f64,
    pub u_max: f64,
}

impl InputConstraints {
    pub fn clamp(&self, u: f64) -> f64 {
        u.clamp(self.u_min, self.u_max)
    }
}

/// Condensed QP: min 1/2 dv' H dv + f' dv subject to A dv <= b. The
/// constraint rows are the upper input bounds for i = 0..Hu-1 followed by
/// the lower bounds.
#[derive(Debug, Clone)]
pub struct MpcProblem {
    pub hessian: DMatrix<f64>,
    pub gradient: DVector<f64>,
    pub a_ineq: DMatrix<f64>,
    pub b_ineq: DVector<f64>,
    /// Objective value at dv = 0; added to the quadratic form it gives the
    /// full horizon cost for diagnostics.
    pub cost_offset: f64,
}

/// Condenses one control step into a QP.
///
/// The predicted outputs entering the tracking term are the model outputs
/// advanced one step, so entries i = 1..Hp depend on v(k)..v(k+Hp-1); the
/// input bounds apply to the estimated input at i = 0..Hu-1.
#[allow(clippy::too_many_arguments)]
pub fn build_qp(
    th: &ThetaFull,
    ts: f64,
    w: &MpcWeights,
    c: &InputConstraints,
    est: &EstimatorState,
    y_meas: f64,
    v_prev: f64,
    r_preview: &[f64],
) -> MpcProblem {
    let hp = w.hp;
    debug_assert!(hp >= 1 && r_preview.len() == hp);
    debug_assert!(w.q >= 0.0 && w.r >= 0.0 && w.v > 0.0);
    debug_assert!(c.u_min < c.u_max);

    let v_base = vec![v_prev; hp];
    let base = estimate_horizon(th, ts, est, y_meas, &v_base);
    let shifted = |y_hat: &[f64], x_final: f64| -> Vec<f64> {
        let mut s: Vec<f64> = y_hat[1..].to_vec();
        s.push(x_final);
        s
    };
    let hys = shifted(&base.y_hat, base.x_final);

    // Probe each lower-triangular step direction: dv_j = 1 raises v from
    // index j onward by one.
    let mut gy = DMatrix::zeros(hp, hp);
    let mut gu = DMatrix::zeros(hp, hp);
    let mut gdu = DMatrix::zeros(hp, hp);
    for j in 0..hp {
        let mut vj = v_base.clone();
        for v in vj.iter_mut().skip(j) {
            *v += 1.0;
        }
        let probe = estimate_horizon(th, ts, est, y_meas, &vj);
        let ys = shifted(&probe.y_hat, probe.x_final);
        for i in 0..hp {
            gy[(i, j)] = ys[i] - hys[i];
            gu[(i, j)] = probe.u_hat[i] - base.u_hat[i];
            gdu[(i, j)] = probe.du_hat[i] - base.du_hat[i];
        }
    }

    let err = DVector::from_iterator(hp, hys.iter().zip(r_preview).map(|(y, r)| y - r));
    let du0 = DVector::from_column_slice(&base.du_hat);
    let hessian = 2.0
        * (w.q * gy.transpose() * &gy
            + w.r * gdu.transpose() * &gdu
            + w.v * DMatrix::identity(hp, hp));
    let gradient = 2.0 * (w.q * gy.transpose() * &err + w.r * gdu.transpose() * &du0);
    let cost_offset = w.q * err.norm_squared() + w.r * du0.norm_squared();

    let mut a_ineq = DMatrix::zeros(2 * hp, hp);
    let mut b_ineq = DVector::zeros(2 * hp);
    for i in 0..hp {
        for j in 0..hp {
            a_ineq[(i, j)] = gu[(i, j)];
            a_ineq[(hp + i, j)] = -gu[(i, j)];
        }
        b_ineq[i] = c.u_max - base.u_hat[i];
        b_ineq[hp + i] = base.u_hat[i] - c.u_min;
    }

    MpcProblem {
        hessian,
        gradient,
        a_ineq,
        b_ineq,
        cost_offset,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    MaxIter,
}

impl std::fmt::Display for QpStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QpStatus::Optimal => write!(f, "optimal"),
            QpStatus::MaxIter => write!(f, "max_iter"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub dv: DVector<f64>,
    pub status: QpStatus,
    pub iterations: usize,
}

/// Hildreth's dual coordinate ascent on A dv <= b.
///
/// The unconstrained minimum is returned immediately when feasible.
/// Otherwise multipliers sweep until the largest change drops below tol;
/// hitting max_iter returns the unconstrained minimum projected into the
/// feasible set (exact for the paired +/- rows this crate builds, since
/// their common row map is lower triangular).
pub fn solve_qp(p: &MpcProblem, tol: f64, max_iter: usize) -> Result<QpSolution> {
    let chol = Cholesky::new(p.hessian.clone())
        .expect("hessian must be positive definite (v weight > 0)");
    let x_unc = -chol.solve(&p.gradient);
    let m = p.b_ineq.len();

    let slack = &p.a_ineq * &x_unc - &p.b_ineq;
    if slack.iter().all(|&s| s <= tol) {
        return Ok(QpSolution {
            dv: x_unc,
            status: QpStatus::Optimal,
            iterations: 0,
        });
    }

    // Degenerate rows cannot be repaired by any dv.
    for i in 0..m {
        let row_scale = (0..p.a_ineq.ncols())
            .map(|j| p.a_ineq[(i, j)].abs())
            .fold(0.0, f64::max);
        if row_scale < 1e-14 && p.b_ineq[i] < -tol {
            return Err(Error::InfeasibleConstraints { row: i });
        }
    }

    let hinv_at = chol.solve(&p.a_ineq.transpose());
    let big_p = &p.a_ineq * &hinv_at;
    let d = &p.a_ineq * chol.solve(&p.gradient) + &p.b_ineq;

    let mut lam: DVector<f64> = DVector::zeros(m);
    let mut status = QpStatus::MaxIter;
    let mut iterations = max_iter;
    for it in 0..max_iter {
        let mut max_change = 0.0_f64;
        for i in 0..m {
            if big_p[(i, i)] <= 1e-14 {
                continue;
            }
            let mut w = d[i];
            for j in 0..m {
                if j != i {
                    w += big_p[(i, j)] * lam[j];
                }
            }
            let new = (-w / big_p[(i, i)]).max(0.0);
            max_change = max_change.max((new - lam[i]).abs());
            lam[i] = new;
        }
        if max_change < tol {
            status = QpStatus::Optimal;
            iterations = it + 1;
            break;
        }
    }

    let dv = -chol.solve(&(&p.gradient + p.a_ineq.transpose() * &lam));
    if status == QpStatus::Optimal {
        return Ok(QpSolution {
            dv,
            status,
            iterations,
        });
    }
    Ok(QpSolution {
        dv: project_into_constraints(p, &x_unc),
        status: QpStatus::MaxIter,
        iterations,
    })
}

/// Clips a candidate into the paired box rows [G; -G] dv <= [b_up; b_lo]
/// by clamping the constrained image and solving the triangular row map
/// back. Falls back to the candidate coordinate where the diagonal is
/// numerically zero.
fn project_into_constraints(p: &MpcProblem, x: &DVector<f64>) -> DVector<f64> {
    let hp = p.a_ineq.ncols();
    debug_assert_eq!(p.b_ineq.len(), 2 * hp);
    let g = p.a_ineq.rows(0, hp);
    let image = g * x;
    let mut target = DVector::zeros(hp);
    for i in 0..hp {
        target[i] = image[i].clamp(-p.b_ineq[hp + i], p.b_ineq[i]);
    }
    // Forward substitution; g is lower triangular by construction.
    let mut out = DVector::zeros(hp);
    for i in 0..hp {
        let mut acc = target[i];
        for j in 0..i {
            acc -= g[(i, j)] * out[j];
        }
        if g[(i, i)].abs() < 1e-12 {
            out[i] = x[i];
        } else {
            out[i] = acc / g[(i, i)];
        }
    }
    out
}

/// Everything the receding-horizon loop carries between steps.
#[derive(Debug, Clone)]
pub struct MpcControllerState {
    pub th: ThetaFull,
    pub ts: f64,
    pub weights: MpcWeights,
    pub constraints: InputConstraints,
    pub est: EstimatorState,
    pub v_prev: f64,
}

impl MpcControllerState {
    pub fn new(
        th: ThetaFull,
        ts: f64,
        weights: MpcWeights,
        constraints: InputConstraints,
        v_init: f64,
        est: EstimatorState,
    ) -> Self {
        MpcControllerState {
            th,
            ts,
            weights,
            constraints,
            est,
            v_prev: v_init,
        }
    }
}

/// Per-step record for logs and constraint auditing.
#[derive(Debug, Clone, Copy)]
pub struct StepDiagnostics {
    /// Estimated inner-loop input before the actuator clamp.
    pub u_hat: f64,
    /// Input actually applied to the plant.
    pub u_applied: f64,
    /// Horizon cost at the solution, offset included.
    pub cost: f64,
    pub qp_status: QpStatus,
    pub qp_iters: usize,
}

/// One receding-horizon step: build the QP, solve it, apply the first
/// internal-reference move, and commit the estimator state with the real
/// measurement. Solver trouble degrades to the projected unconstrained
/// solution rather than stopping the loop.
pub fn mpc_step(
    ctrl: &mut MpcControllerState,
    y_meas: f64,
    r_preview: &[f64],
) -> Result<(f64, StepDiagnostics)> {
    let p = build_qp(
        &ctrl.th,
        ctrl.ts,
        &ctrl.weights,
        &ctrl.constraints,
        &ctrl.est,
        y_meas,
        ctrl.v_prev,
        r_preview,
    );
    let sol = match solve_qp(&p, 1e-9, 2000) {
        Ok(sol) => sol,
        Err(Error::InfeasibleConstraints { .. }) => {
            // Saturate the unconstrained optimum and keep the loop alive.
            let chol = Cholesky::new(p.hessian.clone()).expect("hessian must be SPD");
            let x_unc = -chol.solve(&p.gradient);
            QpSolution {
                dv: project_into_constraints(&p, &x_unc),
                status: QpStatus::MaxIter,
                iterations: 0,
            }
        }
        Err(e) => return Err(e),
    };

    let cost = p.cost_offset
        + p.gradient.dot(&sol.dv)
        + 0.5 * (&p.hessian * &sol.dv).dot(&sol.dv);
    let v_new = ctrl.v_prev + sol.dv[0];
    ctrl.est = advance_state(&ctrl.th, ctrl.ts, &ctrl.est, v_new, y_meas);
    ctrl.v_prev = v_new;
    let u_hat = ctrl.est.last_u_hat;
    Ok((
        v_new,
        StepDiagnostics {
            u_hat,
            u_applied: ctrl.constraints.clamp(u_hat),
            cost,
            qp_status: sol.status,
            qp_iters: sol.iterations,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pid::PidState;
    use crate::pl::{pl_from_tc, pl_step};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn box_problem(h: DMatrix<f64>, f: DVector<f64>, lo: f64, hi: f64) -> MpcProblem {
        let n = f.len();
        let mut a = DMatrix::zeros(2 * n, n);
        let mut b = DVector::zeros(2 * n);
        for i in 0..n {
            a[(i, i)] = 1.0;
            a[(n + i, i)] = -1.0;
            b[i] = hi;
            b[n + i] = -lo;
        }
        MpcProblem {
            hessian: h,
            gradient: f,
            a_ineq: a,
            b_ineq: b,
            cost_offset: 0.0,
        }
    }

    #[test]
    fn unconstrained_minimum_is_returned_directly() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 4.0]));
        let f = DVector::from_vec(vec![-2.0, -4.0]);
        // Minimum at (1, 1), box wide open.
        let p = box_problem(h, f, -10.0, 10.0);
        let sol = solve_qp(&p, 1e-9, 100).unwrap();
        assert_eq!(sol.status, QpStatus::Optimal);
        assert_eq!(sol.iterations, 0);
        assert_abs_diff_eq!(sol.dv[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.dv[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn one_dimensional_clamped_optimum() {
        // min (x-3)^2 s.t. x <= 1: H = 2, f = -6.
        let h = DMatrix::from_element(1, 1, 2.0);
        let f = DVector::from_element(1, -6.0);
        let p = box_problem(h, f, -100.0, 1.0);
        let sol = solve_qp(&p, 1e-10, 500).unwrap();
        assert_abs_diff_eq!(sol.dv[0], 1.0, epsilon = 1e-7);
    }

    #[test]
    fn random_boxes_match_active_set_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..25 {
            let n = 4;
            let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let h = &m * m.transpose() + DMatrix::identity(n, n) * 0.5;
            let f = DVector::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
            let lo = -0.4;
            let hi = 0.3;
            let p = box_problem(h.clone(), f.clone(), lo, hi);
            let sol = solve_qp(&p, 1e-11, 5000).unwrap();
            let obj = |x: &DVector<f64>| 0.5 * (&h * x).dot(x) + f.dot(x);

            // Enumerate every pattern of {free, at lo, at hi}.
            let mut best = f64::INFINITY;
            for code in 0..3usize.pow(n as u32) {
                let mut pattern = Vec::new();
                let mut c = code;
                for _ in 0..n {
                    pattern.push(c % 3);
                    c /= 3;
                }
                let free: Vec<usize> =
                    (0..n).filter(|&i| pattern[i] == 0).collect();
                let mut x = DVector::zeros(n);
                for i in 0..n {
                    x[i] = match pattern[i] {
                        1 => lo,
                        2 => hi,
                        _ => 0.0,
                    };
                }
                if !free.is_empty() {
                    // Solve the reduced stationarity system for free vars.
                    let nf = free.len();
                    let mut hr = DMatrix::zeros(nf, nf);
                    let mut fr = DVector::zeros(nf);
                    for (a, &i) in free.iter().enumerate() {
                        fr[a] = f[i];
                        for j in 0..n {
                            if pattern[j] != 0 {
                                fr[a] += h[(i, j)] * x[j];
                            }
                        }
                        for (b, &j) in free.iter().enumerate() {
                            hr[(a, b)] = h[(i, j)];
                        }
                    }
                    let xf = Cholesky::new(hr).unwrap().solve(&-fr);
                    for (a, &i) in free.iter().enumerate() {
                        x[i] = xf[a];
                    }
                }
                let feasible = (0..n).all(|i| x[i] >= lo - 1e-12 && x[i] <= hi + 1e-12);
                if feasible {
                    best = best.min(obj(&x));
                }
            }
            assert!(
                (obj(&sol.dv) - best).abs() <= 1e-4,
                "hildreth {} vs enumeration {}",
                obj(&sol.dv),
                best
            );
        }
    }

    fn theta() -> ThetaFull {
        ThetaFull {
            kp: 0.2,
            ki: 0.9,
            kd: 0.01,
            tc: 0.8,
        }
    }

    fn wide_open() -> InputConstraints {
        InputConstraints {
            u_min: -1e6,
            u_max: 1e6,
        }
    }

    #[test]
    fn hessian_is_spd_with_margin_for_random_builds() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let th = ThetaFull {
                kp: rng.gen_range(-1.0..1.0),
                ki: rng.gen_range(-1.0..1.0),
                kd: rng.gen_range(-0.3..0.3),
                tc: rng.gen_range(0.05..5.0),
            };
            let w = MpcWeights {
                q: rng.gen_range(0.0..100.0),
                r: rng.gen_range(0.0..10.0),
                v: rng.gen_range(0.01..10.0),
                hp: rng.gen_range(1..7),
            };
            let est = EstimatorState {
                pid_state: PidState {
                    integ: rng.gen_range(-1.0..1.0),
                    prev_err: rng.gen_range(-1.0..1.0),
                },
                last_u_hat: rng.gen_range(-1.0..1.0),
            };
            let preview: Vec<f64> = (0..w.hp).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = build_qp(
                &th,
                0.05,
                &w,
                &wide_open(),
                &est,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                &preview,
            );
            let eig = p.hessian.clone().symmetric_eigenvalues();
            let min_eig = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(
                min_eig >= 2.0 * w.v - 1e-9,
                "min eigenvalue {min_eig} below 2v = {}",
                2.0 * w.v
            );
        }
    }

    #[test]
    fn zero_q_and_r_leave_dv_at_zero() {
        let w = MpcWeights {
            q: 0.0,
            r: 0.0,
            v: 1.0,
            hp: 4,
        };
        let p = build_qp(
            &theta(),
            0.1,
            &w,
            &wide_open(),
            &EstimatorState::default(),
            0.3,
            0.2,
            &[1.0; 4],
        );
        let sol = solve_qp(&p, 1e-9, 100).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(sol.dv[i], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_step_horizon_matches_hand_solution() {
        // hp = 1, q = 1, r = 0, v = 1e-9: the solution drives the one-step
        // model prediction onto the reference.
        let th = theta();
        let ts = 0.1;
        let m = pl_from_tc(th.tc, ts).unwrap();
        let w = MpcWeights {
            q: 1.0,
            r: 0.0,
            v: 1e-9,
            hp: 1,
        };
        let y = 0.4;
        let v_prev = 0.5;
        let r1 = 1.2;
        let p = build_qp(
            &th,
            ts,
            &w,
            &wide_open(),
            &EstimatorState::default(),
            y,
            v_prev,
            &[r1],
        );
        let sol = solve_qp(&p, 1e-12, 100).unwrap();
        let expect = (r1 - m.a_p * y) / m.b_p - v_prev;
        assert_relative_eq!(sol.dv[0], expect, max_relative = 1e-6);
    }

    #[test]
    fn huge_q_forces_one_step_tracking() {
        let th = theta();
        let ts = 0.1;
        let m = pl_from_tc(th.tc, ts).unwrap();
        let w = MpcWeights {
            q: 1e6,
            r: 0.0,
            v: 1.0,
            hp: 1,
        };
        let y = -0.2;
        let v_prev = 0.1;
        let r1 = 0.9;
        let p = build_qp(
            &th,
            ts,
            &w,
            &wide_open(),
            &EstimatorState::default(),
            y,
            v_prev,
            &[r1],
        );
        let sol = solve_qp(&p, 1e-12, 100).unwrap();
        let y_next = m.a_p * y + m.b_p * (v_prev + sol.dv[0]);
        assert_abs_diff_eq!(y_next, r1, epsilon = 1e-4);
    }

    #[test]
    fn equilibrium_keeps_v_still() {
        let th = theta();
        let ts = 0.1;
        let y = 2.0;
        // Integral already holding u = y (unit DC gain), zero error state.
        let est = EstimatorState {
            pid_state: PidState {
                integ: y,
                prev_err: 0.0,
            },
            last_u_hat: y,
        };
        let w = MpcWeights {
            q: 1000.0,
            r: 0.0,
            v: 1.0,
            hp: 5,
        };
        let mut ctrl = MpcControllerState::new(
            th,
            ts,
            w,
            InputConstraints {
                u_min: 0.0,
                u_max: 10.0,
            },
            y,
            est,
        );
        let (v, diag) = mpc_step(&mut ctrl, y, &[y; 5]).unwrap();
        assert_abs_diff_eq!(v, y, epsilon = 1e-6);
        assert_abs_diff_eq!(diag.u_hat, y, epsilon = 1e-6);
    }

    #[test]
    fn loop_on_the_model_itself_converges_geometrically() {
        // When the true plant IS the reference model, the closed loop must
        // settle to zero tracking error.
        let th = ThetaFull {
            kp: 0.5,
            ki: 0.4,
            kd: 0.0,
            tc: 0.6,
        };
        let ts = 0.1;
        let m = pl_from_tc(th.tc, ts).unwrap();
        let w = MpcWeights {
            q: 100.0,
            r: 0.0,
            v: 1.0,
            hp: 5,
        };
        let mut ctrl = MpcControllerState::new(
            th,
            ts,
            w,
            InputConstraints {
                u_min: -100.0,
                u_max: 100.0,
            },
            0.0,
            EstimatorState::default(),
        );
        let mut x = 0.0;
        let r = 1.0;
        let mut errs = Vec::new();
        for _ in 0..200 {
            let y = x;
            let (_, diag) = mpc_step(&mut ctrl, y, &[r; 5]).unwrap();
            let (x2, _) = pl_step(&m, x, diag.u_applied);
            x = x2;
            errs.push((r - y).abs());
        }
        assert!(errs[199] < 1e-6, "final error {}", errs[199]);
        assert!(errs[50] < errs[10] && errs[100] < errs[50] && errs[150] < errs[100]);
        assert!(errs[199] <= errs[150]);
    }

    #[test]
    fn qp_keeps_estimated_input_inside_the_box() {
        let th = theta();
        let ts = 0.1;
        let w = MpcWeights {
            q: 1000.0,
            r: 0.0,
            v: 1.0,
            hp: 5,
        };
        let cons = InputConstraints {
            u_min: 0.0,
            u_max: 2.0,
        };
        let mut ctrl =
            MpcControllerState::new(th, ts, w, cons, 0.0, EstimatorState::default());
        let m = pl_from_tc(th.tc, ts).unwrap();
        let mut x = 0.0;
        // Step big enough that the bound saturates.
        for k in 0..120 {
            let r = if k < 60 { 5.0 } else { 0.2 };
            let y = x;
            let (_, diag) = mpc_step(&mut ctrl, y, &[r; 5]).unwrap();
            assert!(
                diag.u_hat <= cons.u_max + 1e-6 && diag.u_hat >= cons.u_min - 1e-6,
                "estimated input {} escaped the box at step {k}",
                diag.u_hat
            );
            let (x2, _) = pl_step(&m, x, diag.u_applied);
            x = x2;
        }
    }

    #[test]
    fn infeasible_rows_are_reported() {
        // A zero constraint row with negative bound cannot be satisfied.
        let h = DMatrix::identity(2, 2);
        let f = DVector::from_vec(vec![1.0, 1.0]);
        let mut a = DMatrix::zeros(4, 2);
        let mut b = DVector::zeros(4);
        a[(0, 0)] = 1.0;
        a[(1, 1)] = 1.0;
        // rows 2, 3 are all-zero; make row 3 impossible.
        b[0] = 1.0;
        b[1] = 1.0;
        b[2] = 0.5;
        b[3] = -0.5;
        let p = MpcProblem {
            hessian: h,
            gradient: f,
            a_ineq: a,
            b_ineq: b,
            cost_offset: 0.0,
        };
        assert!(matches!(
            solve_qp(&p, 1e-9, 100),
            Err(Error::InfeasibleConstraints { row: 3 })
        ));
    }
}
