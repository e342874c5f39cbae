//! Ground-truth nonlinear simulators and reference generators. These exist
//! only to produce I/O records and to grade controllers; nothing in the
//! tuning or control path may peek at their internals.

use crate::signals::TimeSeries;
use crate::{Error, Result};
use std::path::Path;

/// Simulator interface used by every closed loop in this crate.
///
/// `output` returns y(k) from the current state without consuming the
/// input, so loops can measure before they actuate; `step` then applies
/// u(k) and commits the state update. Both views of y(k) agree.
pub trait Plant {
    fn output(&self) -> f64;
    fn step(&mut self, u: f64) -> Result<f64>;
}

// ---------------------------------------------------------------- Hammerstein

/// Regressors of the second-order Hammerstein simulator: previous outputs
/// and previous nonlinear intermediates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HammersteinState {
    pub y1: f64,
    pub y2: f64,
    pub x1: f64,
    pub x2: f64,
}

/// One step of
/// `y(k) = 0.6 y(k-1) - 0.1 y(k-2) + 1.2 x(k-1) - 0.1 x(k-2)` with the
/// static nonlinearity `x = 1.5 u - 1.5 u^2 + 0.5 u^3`. y(k) depends only
/// on past samples, never on u(k).
pub fn hammerstein_step(s: &HammersteinState, u: f64) -> (HammersteinState, f64) {
    let x = 1.5 * u - 1.5 * u * u + 0.5 * u * u * u;
    let y = hammerstein_output(s);
    (
        HammersteinState {
            y1: y,
            y2: s.y1,
            x1: x,
            x2: s.x1,
        },
        y,
    )
}

fn hammerstein_output(s: &HammersteinState) -> f64 {
    0.6 * s.y1 - 0.1 * s.y2 + 1.2 * s.x1 - 0.1 * s.x2
}

/// Hammerstein plant starting from rest.
#[derive(Debug, Clone, Default)]
pub struct Hammerstein {
    pub state: HammersteinState,
}

impl Plant for Hammerstein {
    fn output(&self) -> f64 {
        hammerstein_output(&self.state)
    }

    fn step(&mut self, u: f64) -> Result<f64> {
        let (s, y) = hammerstein_step(&self.state, u);
        self.state = s;
        Ok(y)
    }
}

// ------------------------------------------------------------------ Bouc-Wen

/// Coefficients of the asymmetric Bouc-Wen simulator. Field names follow
/// the conventional parameter table for this model.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoucWenParams {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub A1: f64,
    pub beta1: f64,
    pub gamma1: f64,
    pub c1: f64,
    pub d1: f64,
    pub e1: f64,
    pub A2: f64,
    pub beta2: f64,
    pub gamma2: f64,
    pub c2: f64,
    pub d2: f64,
    pub e2: f64,
}

impl Default for BoucWenParams {
    fn default() -> Self {
        BoucWenParams {
            a1: 9.95832e-1,
            a2: 1.23972e-3,
            b1: 1.19205e-2,
            A1: 9.94593e-1,
            beta1: 4.93442e-1,
            gamma1: -8.00753e-1,
            c1: -3.34000e-1,
            d1: 2.34191e-3,
            e1: -1.84394e-5,
            A2: -1.13653e-1,
            beta2: -4.10528e-1,
            gamma2: 6.79071e-1,
            c2: 3.51356e-1,
            d2: -2.28465e-3,
            e2: 1.80024e-5,
        }
    }
}

impl BoucWenParams {
    /// Loads `key = value` lines; keys must match the struct fields, one
    /// line per parameter, `#` comments allowed.
    pub fn load(path: &Path) -> Result<BoucWenParams> {
        let text = std::fs::read_to_string(path)?;
        let mut p = BoucWenParams::default();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Parse(format!("line {}: bad number {:?}", lineno + 1, value.trim()))
            })?;
            let slot = match key {
                "a1" => &mut p.a1,
                "a2" => &mut p.a2,
                "b1" => &mut p.b1,
                "A1" => &mut p.A1,
                "beta1" => &mut p.beta1,
                "gamma1" => &mut p.gamma1,
                "c1" => &mut p.c1,
                "d1" => &mut p.d1,
                "e1" => &mut p.e1,
                "A2" => &mut p.A2,
                "beta2" => &mut p.beta2,
                "gamma2" => &mut p.gamma2,
                "c2" => &mut p.c2,
                "d2" => &mut p.d2,
                "e2" => &mut p.e2,
                other => return Err(Error::Parse(format!("unknown parameter {other:?}"))),
            };
            *slot = value;
            seen.insert(key.to_string());
        }
        if seen.len() != 15 {
            return Err(Error::Parse(format!(
                "parameter file defines {} of 15 required values",
                seen.len()
            )));
        }
        Ok(p)
    }
}

/// History carried by the Bouc-Wen recursion: recent outputs, the previous
/// input, the two directional hysteresis components, and the last two
/// aggregate hysteresis values they couple back onto.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoucWenState {
    /// y(k-1) .. y(k-4), most recent first.
    pub y_hist: [f64; 4],
    pub u_prev: f64,
    pub h1: f64,
    pub h2: f64,
    /// Aggregate h(k-1), h(k-2) including the polynomial part.
    pub h_hist: [f64; 2],
}

impl BoucWenState {
    /// State at a constant operating point y with all motion terms at rest.
    ///
    /// At equilibrium the aggregate hysteresis solves
    /// h = (c1 + c2) h + pol(y), and the matching constant input is
    /// u = ((1 - a1 - a2) y - h) / b1. Returns (state, u).
    pub fn at_equilibrium(p: &BoucWenParams, y: f64) -> (BoucWenState, f64) {
        let pol = (p.d1 + p.d2) * y * y + (p.e1 + p.e2) * y * y * y;
        let hs = pol / (1.0 - p.c1 - p.c2);
        let u = ((1.0 - p.a1 - p.a2) * y - hs) / p.b1;
        (
            BoucWenState {
                y_hist: [y; 4],
                u_prev: u,
                h1: p.c1 * hs,
                h2: p.c2 * hs,
                h_hist: [hs, hs],
            },
            u,
        )
    }
}

struct BoucWenParts {
    h1n: f64,
    h2n: f64,
    pol: f64,
}

fn boucwen_parts(p: &BoucWenParams, s: &BoucWenState) -> BoucWenParts {
    let dy1 = s.y_hist[0] - s.y_hist[1];
    let dy2 = s.y_hist[1] - s.y_hist[2];
    let h1n = p.A1 * dy1 + p.beta1 * dy1.abs() * s.h1 + p.gamma1 * dy1 * s.h1.abs()
        + p.c1 * s.h_hist[0];
    let h2n = p.A2 * dy2 + p.beta2 * dy2.abs() * s.h2 + p.gamma2 * dy2 * s.h2.abs()
        + p.c2 * s.h_hist[1];
    let y1 = s.y_hist[0];
    let pol = (p.d1 + p.d2) * y1 * y1 + (p.e1 + p.e2) * y1 * y1 * y1;
    BoucWenParts { h1n, h2n, pol }
}

fn boucwen_output(p: &BoucWenParams, s: &BoucWenState) -> f64 {
    let parts = boucwen_parts(p, s);
    p.a1 * s.y_hist[0] + p.a2 * s.y_hist[1] + p.b1 * s.u_prev + parts.h1n + parts.h2n + parts.pol
}

/// One step of the asymmetric Bouc-Wen recursion.
///
/// The linear part is a1 y(k-1) + a2 y(k-2) + b1 u(k-1). Each directional
/// component i uses its own velocity dy_i = y(k-i) - y(k-i-1), its stored
/// previous value in the bilinear terms, and couples back on the stored
/// aggregate h(k-i); the even-power polynomial terms pool on y(k-1). All
/// right-hand-side hysteresis values are previous stored values, the only
/// causally computable reading.
pub fn boucwen_step(p: &BoucWenParams, s: &BoucWenState, u: f64) -> Result<(BoucWenState, f64)> {
    let parts = boucwen_parts(p, s);
    let y = p.a1 * s.y_hist[0] + p.a2 * s.y_hist[1] + p.b1 * s.u_prev
        + parts.h1n
        + parts.h2n
        + parts.pol;
    if !(y.abs() <= 1e6) {
        return Err(Error::Divergence { magnitude: y.abs() });
    }
    Ok((
        BoucWenState {
            y_hist: [y, s.y_hist[0], s.y_hist[1], s.y_hist[2]],
            u_prev: u,
            h1: parts.h1n,
            h2: parts.h2n,
            h_hist: [parts.h1n + parts.h2n + parts.pol, s.h_hist[0]],
        },
        y,
    ))
}

/// Bouc-Wen plant with owned parameters and state.
#[derive(Debug, Clone)]
pub struct BoucWen {
    pub params: BoucWenParams,
    pub state: BoucWenState,
}

impl BoucWen {
    pub fn new(params: BoucWenParams) -> Self {
        BoucWen {
            params,
            state: BoucWenState::default(),
        }
    }

    /// Plant resting at output level y; returns the plant and the constant
    /// input holding it there.
    pub fn at_equilibrium(params: BoucWenParams, y: f64) -> (Self, f64) {
        let (state, u) = BoucWenState::at_equilibrium(&params, y);
        (BoucWen { params, state }, u)
    }
}

impl Plant for BoucWen {
    fn output(&self) -> f64 {
        boucwen_output(&self.params, &self.state)
    }

    fn step(&mut self, u: f64) -> Result<f64> {
        let (s, y) = boucwen_step(&self.params, &self.state, u)?;
        self.state = s;
        Ok(y)
    }
}

// ------------------------------------------------------------ linear plant

/// Strictly proper rational plant in direct form II transposed, so the
/// current output is available from the delay chain before the current
/// input arrives (required by the read-then-actuate loop convention).
#[derive(Debug, Clone)]
pub struct LinearPlant {
    b: Vec<f64>,
    a: Vec<f64>,
    w: Vec<f64>,
}

impl LinearPlant {
    /// num and den are ascending powers of z^-1; num[0] must be zero
    /// (no direct feedthrough) and den[0] nonzero.
    pub fn strictly_proper(num: &[f64], den: &[f64]) -> Result<Self> {
        if den.is_empty() || den[0] == 0.0 {
            return Err(Error::ZeroLeadingDenominator);
        }
        if num.first().copied().unwrap_or(0.0) != 0.0 {
            return Err(Error::Parse(
                "plant must be strictly proper (num[0] == 0)".into(),
            ));
        }
        let order = num.len().max(den.len()) - 1;
        let d0 = den[0];
        let b: Vec<f64> = (1..=order)
            .map(|i| num.get(i).copied().unwrap_or(0.0) / d0)
            .collect();
        let a: Vec<f64> = (1..=order)
            .map(|i| den.get(i).copied().unwrap_or(0.0) / d0)
            .collect();
        Ok(LinearPlant {
            b,
            a,
            w: vec![0.0; order],
        })
    }
}

impl Plant for LinearPlant {
    fn output(&self) -> f64 {
        self.w.first().copied().unwrap_or(0.0)
    }

    fn step(&mut self, u: f64) -> Result<f64> {
        let y = self.output();
        let n = self.w.len();
        for i in 0..n {
            let next = if i + 1 < n { self.w[i + 1] } else { 0.0 };
            self.w[i] = next + self.b[i] * u - self.a[i] * y;
        }
        if !y.is_finite() {
            return Err(Error::Divergence { magnitude: y.abs() });
        }
        Ok(y)
    }
}

// ---------------------------------------------------------------- references

/// Piecewise-constant reference; each segment is (value, duration in
/// seconds) and is sampled duration/ts times (rounded).
pub fn staircase_reference(segments: &[(f64, f64)], ts: f64) -> TimeSeries {
    debug_assert!(ts > 0.0);
    let mut values = Vec::new();
    for &(level, duration) in segments {
        debug_assert!(duration > 0.0);
        let n = (duration / ts).round() as usize;
        values.extend(std::iter::repeat_n(level, n));
    }
    TimeSeries::new(values, ts)
}

/// offset + amp sin(2 pi f t), sampled at t = k ts for duration seconds.
pub fn sinusoid_reference(amp: f64, offset: f64, freq: f64, duration: f64, ts: f64) -> TimeSeries {
    debug_assert!(ts > 0.0 && duration > 0.0);
    let n = (duration / ts).round() as usize;
    let values = (0..n)
        .map(|k| offset + amp * (2.0 * std::f64::consts::PI * freq * k as f64 * ts).sin())
        .collect();
    TimeSeries::new(values, ts)
}
