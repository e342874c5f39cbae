//! Horizon prediction of the inner-loop plant input.
//!
//! Given the internal reference sequence v over the horizon, the chain
//! runs the reference model forward from the measured output and the PID
//! recursion on the model tracking error:
//!
//! ```text
//!   yhat(k)   = x0            (anchored to the measurement)
//!   ehat(i)   = v(k+i) - yhat(k+i)
//!   uhat(i)   = PID(ehat)     (same recursion as the real controller)
//!   yhat(i+1) = a_p yhat(i) + b_p v(k+i)
//! ```
//!
//! The map from v to (uhat, yhat) is affine for fixed state, which is what
//! turns the receding-horizon cost into a QP. At i = 0 the recursion uses
//! the same arithmetic as the live controller on the same inputs, so the
//! estimate of the current input is exact, not approximate.

use crate::frit::ThetaFull;
use crate::pid::{pid_step, PidState};
use crate::pl::pl_from_tc;

/// Estimator bookkeeping between control steps: the PID state shared with
/// the inner loop and the previous input for the first increment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EstimatorState {
    pub pid_state: PidState,
    pub last_u_hat: f64,
}

/// Horizon prediction: inputs, input increments, model outputs, and the
/// model state one step past the horizon end.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonEstimate {
    pub u_hat: Vec<f64>,
    pub du_hat: Vec<f64>,
    pub y_hat: Vec<f64>,
    /// Model state after consuming every v sample; this is the predicted
    /// output one step past the last y_hat entry.
    pub x_final: f64,
}

/// Runs the prediction chain over v_seq from measured output x0. All three
/// vectors have v_seq's length; du_hat[0] is taken against s.last_u_hat.
pub fn estimate_horizon(
    th: &ThetaFull,
    ts: f64,
    s: &EstimatorState,
    x0: f64,
    v_seq: &[f64],
) -> HorizonEstimate {
    debug_assert!(!v_seq.is_empty());
    let m = pl_from_tc(th.tc, ts).expect("estimator needs a positive time constant");
    let g = th.gains(ts);
    let n = v_seq.len();
    let mut u_hat = Vec::with_capacity(n);
    let mut du_hat = Vec::with_capacity(n);
    let mut y_hat = Vec::with_capacity(n);
    let mut x = x0;
    let mut pid = s.pid_state;
    let mut last_u = s.last_u_hat;
    for &v in v_seq {
        y_hat.push(x);
        let (u, pid2) = pid_step(&g, &pid, v - x);
        pid = pid2;
        du_hat.push(u - last_u);
        last_u = u;
        u_hat.push(u);
        x = m.a_p * x + m.b_p * v;
    }
    HorizonEstimate {
        u_hat,
        du_hat,
        y_hat,
        x_final: x,
    }
}

/// Commits one real control step: updates the PID state with the measured
/// error v - y and stores the resulting input for the next first
/// increment. The returned state's last_u_hat IS the input the inner loop
/// applies (before any actuator clamp).
pub fn advance_state(
    th: &ThetaFull,
    ts: f64,
    s: &EstimatorState,
    v_applied: f64,
    y_measured: f64,
) -> EstimatorState {
    let g = th.gains(ts);
    let (u, pid) = pid_step(&g, &s.pid_state, v_applied - y_measured);
    EstimatorState {
        pid_state: pid,
        last_u_hat: u,
    }
}
