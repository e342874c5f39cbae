//! First-order reference model and its state-space realization.
//!
//! The model is the zero-order-hold discretization of a unit-DC-gain
//! first-order lag with time constant tc:
//!
//! ```text
//!   P(z) = b_p z^-1 / (1 - a_p z^-1),   a_p = e^(-ts/tc),  b_p = 1 - a_p
//! ```
//!
//! or equivalently x(k+1) = a_p x(k) + b_p v(k), y(k) = x(k). The output is
//! read from the pre-update state, which puts the one-step delay inside the
//! state recursion exactly where the z^-1 numerator has it.

use crate::signals::RationalFilter;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlModel {
    pub tc: f64,
    pub ts: f64,
    pub a_p: f64,
    pub b_p: f64,
    pub c_p: f64,
}

/// Builds the model from its time constant; a_p + b_p = 1 by construction,
/// so the DC gain is exactly 1.
pub fn pl_from_tc(tc: f64, ts: f64) -> Result<PlModel> {
    if !(tc > 0.0) {
        return Err(Error::NonPositiveTimeConstant { tc });
    }
    debug_assert!(ts > 0.0);
    let a_p = (-ts / tc).exp();
    Ok(PlModel {
        tc,
        ts,
        a_p,
        b_p: 1.0 - a_p,
        c_p: 1.0,
    })
}

impl PlModel {
    /// Rational-filter view b_p z^-1 / (1 - a_p z^-1).
    pub fn as_filter(&self) -> RationalFilter {
        RationalFilter::new(vec![0.0, self.b_p], vec![1.0, -self.a_p])
    }
}

/// One state update; y is the pre-update output c_p x.
pub fn pl_step(m: &PlModel, x: f64, v: f64) -> (f64, f64) {
    (m.a_p * x + m.b_p * v, m.c_p * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::{filter, TimeSeries};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn rejects_nonpositive_time_constant() {
        assert!(matches!(
            pl_from_tc(0.0, 0.1),
            Err(Error::NonPositiveTimeConstant { .. })
        ));
        assert!(matches!(
            pl_from_tc(-1.0, 0.1),
            Err(Error::NonPositiveTimeConstant { .. })
        ));
    }

    #[test]
    fn half_life_time_constant_gives_half_coefficients() {
        let ts = 0.3;
        let m = pl_from_tc(ts / 2.0_f64.ln(), ts).unwrap();
        assert_relative_eq!(m.a_p, 0.5, epsilon = 1e-12);
        assert_relative_eq!(m.b_p, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn hammerstein_scenario_pole_value() {
        let m = pl_from_tc(0.81, 1.0).unwrap();
        assert_relative_eq!(m.a_p, 0.2910, epsilon = 1e-4);
        assert_relative_eq!(m.a_p + m.b_p, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn huge_time_constant_degenerates_gracefully() {
        // Documented precision loss: b_p underflows toward 1e-14 but the
        // model stays well formed.
        let m = pl_from_tc(1e12, 0.01).unwrap();
        assert!(m.a_p < 1.0 && m.a_p > 1.0 - 1e-13);
        assert!(m.b_p > 0.0 && m.b_p < 1e-13);
    }

    #[test]
    fn unity_gain_fixed_point() {
        let m = pl_from_tc(0.7, 0.1).unwrap();
        let (x2, y) = pl_step(&m, 1.0, 1.0);
        assert_abs_diff_eq!(x2, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y, 1.0, epsilon = 1e-15);
        assert_eq!(pl_step(&m, 0.0, 0.0), (0.0, 0.0));
    }

    #[test]
    fn constant_input_state_follows_geometric_series() {
        let m = pl_from_tc(0.5, 0.1).unwrap();
        let mut x = 0.0;
        for k in 1..=30 {
            (x, _) = pl_step(&m, x, 1.0);
            assert_relative_eq!(x, 1.0 - m.a_p.powi(k), epsilon = 1e-13);
        }
    }

    #[test]
    fn stepping_matches_filter_view_sample_for_sample() {
        let m = pl_from_tc(0.81, 1.0).unwrap();
        let step = TimeSeries::new(vec![1.0; 25], 1.0);
        let by_filter = filter(&m.as_filter(), &step).unwrap();
        let mut x = 0.0;
        for k in 0..25 {
            let (x2, y) = pl_step(&m, x, 1.0);
            x = x2;
            assert_abs_diff_eq!(y, by_filter.values[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn positive_constant_input_gives_increasing_bounded_state() {
        let m = pl_from_tc(2.0, 0.5).unwrap();
        let mut x = 0.0;
        let mut prev = -1.0_f64;
        for _ in 0..100 {
            let (x2, _) = pl_step(&m, x, 3.0);
            assert!(x2 > x && x2 < 3.0, "state must climb toward v");
            prev = prev.max(x2);
            x = x2;
        }
        assert!(prev < 3.0);
    }
}
