//! Discrete-time PID controller in three interchangeable forms: a rational
//! filter, an online stepper, and an inverse filter.
//!
//! The controller is
//!
//! ```text
//!   C(z) = Kp + Ki Ts / (1 - z^-1) + Kd (1 - z^-1) / Ts
//! ```
//!
//! with the derivative acting on the error and no anti-windup; saturation
//! handling belongs to the predictive outer loop, and adding windup
//! protection here would change the closed loop the tuned model matches.

use crate::signals::RationalFilter;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Sampling time in seconds, > 0.
    pub ts: f64,
}

/// State threaded through `pid_step`: accumulated integral input and the
/// previous error sample.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PidState {
    pub integ: f64,
    pub prev_err: f64,
}

/// C(z) over the common denominator Ts (1 - z^-1).
pub fn pid_as_filter(g: &PidGains) -> RationalFilter {
    let ts = g.ts;
    RationalFilter::new(
        vec![
            g.kp * ts + g.ki * ts * ts + g.kd,
            -(g.kp * ts + 2.0 * g.kd),
            g.kd,
        ],
        vec![ts, -ts],
    )
}

/// C^-1(z), numerator and denominator swapped.
///
/// Invertible iff the leading numerator coefficient Kp Ts + Ki Ts^2 + Kd is
/// nonzero; a zero lead coefficient leaves the fictitious reference
/// undefined.
pub fn pid_inverse_filter(g: &PidGains) -> Result<RationalFilter> {
    let c = pid_as_filter(g);
    if c.num[0] == 0.0 {
        return Err(Error::NonInvertibleController);
    }
    Ok(RationalFilter::new(c.den, c.num))
}

/// One position-form step: the integral accumulates before the output sum,
/// so `u = Kp e + (integ + Ki e Ts) + Kd (e - prev_err) / Ts`.
pub fn pid_step(g: &PidGains, s: &PidState, err: f64) -> (f64, PidState) {
    let integ = s.integ + g.ki * err * g.ts;
    let u = g.kp * err + integ + g.kd * (err - s.prev_err) / g.ts;
    (
        u,
        PidState {
            integ,
            prev_err: err,
        },
    )
}
