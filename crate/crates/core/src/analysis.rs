//! Closed-loop evaluation: the conventional PID baseline and empirical
//! frequency-response measurement of a (possibly nonlinear) closed loop
//! by single-frequency correlation.

use crate::pid::{pid_step, PidGains, PidState};
use crate::pl::pl_from_tc;
use crate::plants::Plant;
use crate::signals::{filter, freq_response, RationalFilter, TimeSeries};
use crate::{Error, Result};
use std::f64::consts::PI;

/// One measured point of a frequency sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqPoint {
    pub freq_hz: f64,
    pub gain_db: f64,
    pub phase_deg: f64,
}

/// Knobs for the generic PID loop: an optional actuator box and a warm
/// initial controller state (integ preloaded for equilibrium starts).
#[derive(Debug, Clone, Copy, Default)]
pub struct PidLoopOptions {
    pub limits: Option<(f64, f64)>,
    pub init: PidState,
}

/// Unity-feedback PID loop over a reference. Each sample reads the plant
/// output first, then computes and applies the input, so y(k) never
/// depends on u(k). Returns (y, u) with u the applied (possibly clamped)
/// input.
pub fn simulate_pid_loop(
    plant: &mut dyn Plant,
    gains: &PidGains,
    r: &TimeSeries,
    opts: &PidLoopOptions,
) -> Result<(TimeSeries, TimeSeries)> {
    let mut state = opts.init;
    let mut y = Vec::with_capacity(r.len());
    let mut u = Vec::with_capacity(r.len());
    for &rk in &r.values {
        let yk = plant.output();
        let (mut uk, next) = pid_step(gains, &state, rk - yk);
        state = next;
        if let Some((lo, hi)) = opts.limits {
            uk = uk.clamp(lo, hi);
        }
        plant.step(uk)?;
        y.push(yk);
        u.push(uk);
    }
    Ok((TimeSeries::new(y, r.ts), TimeSeries::new(u, r.ts)))
}

/// The baseline controller: plain unity-feedback PID from rest, no
/// actuator limits.
pub fn simulate_conventional(
    plant: &mut dyn Plant,
    gains: &PidGains,
    r: &TimeSeries,
) -> Result<(TimeSeries, TimeSeries)> {
    simulate_pid_loop(plant, gains, r, &PidLoopOptions::default())
}

/// The target response the tuned loop is matched to: the reference passed
/// through the first-order model.
pub fn desired_output(tc: f64, r: &TimeSeries) -> Result<TimeSeries> {
    let m = pl_from_tc(tc, r.ts)?;
    filter(&m.as_filter(), r)
}

/// First-harmonic amplitude and phase of `values` at freq_hz by
/// correlation, with the time origin at sample index `k0` of the global
/// grid (so two signals sharing a grid get comparable phases). Exact for
/// integer-period windows.
pub fn first_harmonic(values: &[f64], freq_hz: f64, ts: f64, k0: usize) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut s = 0.0;
    let mut c = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let w = 2.0 * PI * freq_hz * ((k0 + i) as f64) * ts;
        s += (v - mean) * w.sin();
        c += (v - mean) * w.cos();
    }
    let amp = 2.0 * (s * s + c * c).sqrt() / n;
    let phase = c.atan2(s);
    (amp, phase)
}

fn wrap_angle(a: f64) -> f64 {
    a.sin().atan2(a.cos())
}

/// Measures the describing response of a closed loop by driving it with
/// offset + amp sin(2 pi f t) at each frequency, discarding
/// settle_periods, and correlating measure_periods of both the drive and
/// the response. `loop_sim` maps a reference series to the closed-loop
/// output series and is called once per frequency.
pub fn empirical_freq_response<F>(
    mut loop_sim: F,
    freqs: &[f64],
    amp: f64,
    offset: f64,
    settle_periods: usize,
    measure_periods: usize,
    ts: f64,
) -> Result<Vec<FreqPoint>>
where
    F: FnMut(&TimeSeries) -> Result<TimeSeries>,
{
    debug_assert!(settle_periods >= 2 && measure_periods >= 1);
    let mut points = Vec::with_capacity(freqs.len());
    for &f in freqs {
        debug_assert!(f > 0.0 && f < 0.5 / ts);
        let nper = (1.0 / (f * ts)).round() as usize;
        let ns = settle_periods * nper;
        let nm = measure_periods * nper;
        let n = ns + nm;
        let r: Vec<f64> = (0..n)
            .map(|k| offset + amp * (2.0 * PI * f * k as f64 * ts).sin())
            .collect();
        let y = loop_sim(&TimeSeries::new(r.clone(), ts))?;
        if y.len() != n {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: n,
            });
        }
        let (ay, py) = first_harmonic(&y.values[ns..], f, ts, ns);
        let (ar, pr) = first_harmonic(&r[ns..], f, ts, ns);
        let power = 0.5 * ay * ay;
        if power < 1e-12 {
            return Err(Error::NoConvergence { power });
        }
        points.push(FreqPoint {
            freq_hz: f,
            gain_db: 20.0 * (ay / ar).log10(),
            phase_deg: wrap_angle(py - pr).to_degrees(),
        });
    }
    Ok(points)
}

/// Analytic response of a rational filter at freq_hz, in the same units
/// as the empirical sweep.
pub fn filter_freq_point(f: &RationalFilter, freq_hz: f64, ts: f64) -> Result<FreqPoint> {
    let h = freq_response(f, 2.0 * PI * freq_hz, ts)?;
    Ok(FreqPoint {
        freq_hz,
        gain_db: 20.0 * h.norm().log10(),
        phase_deg: h.arg().to_degrees(),
    })
}

/// 15 log-spaced frequencies spanning [0.02, 5] Hz with the nearest point
/// snapped to exactly 0.2 Hz, the excitation frequency of the sinusoid
/// scenarios.
pub fn default_freq_grid() -> Vec<f64> {
    let n = 15;
    let lo = 0.02_f64.log10();
    let hi = 5.0_f64.log10();
    let mut freqs: Vec<f64> = (0..n)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64))
        .collect();
    let nearest = freqs
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - 0.2)
                .abs()
                .partial_cmp(&(b.1 - 0.2).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    freqs[nearest] = 0.2;
    freqs
}

/// Bode CSV rows pairing the measured loop response with the model
/// response at the same frequencies.
pub fn bode_csv(loop_pts: &[FreqPoint], model_pts: &[FreqPoint]) -> Result<String> {
    if loop_pts.len() != model_pts.len() {
        return Err(Error::LengthMismatch {
            left: loop_pts.len(),
            right: model_pts.len(),
        });
    }
    let mut out = String::from("freq_hz,gain_db_loop,phase_deg_loop,gain_db_pl,phase_deg_pl\n");
    for (l, m) in loop_pts.iter().zip(model_pts) {
        debug_assert_eq!(l.freq_hz, m.freq_hz);
        out.push_str(&format!(
            "{:.6},{:.8e},{:.8e},{:.8e},{:.8e}\n",
            l.freq_hz, l.gain_db, l.phase_deg, m.gain_db, m.phase_deg
        ));
    }
    Ok(out)
}
