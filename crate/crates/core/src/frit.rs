//! Offline tuning from one closed-loop record.
//!
//! From logged (u0, y0) and a candidate controller C the fictitious
//! reference r = C^-1 u0 + y0 is the signal that would have produced the
//! record under C. Passing r through the first-order reference model gives
//! the output that closed loop would have tracked, so
//!
//! ```text
//!   J(theta) = sum (y0 - ytilde)^2 + lambda sum (delta utilde)^2
//! ```
//!
//! scores a joint choice of PID gains and model time constant against the
//! record alone, no plant model needed. The optimizer is multi-start
//! Nelder-Mead over [kp, ki, kd, ln tc]; the log parameterization keeps tc
//! positive by construction.

use crate::optim::nelder_mead;
use crate::pid::{pid_as_filter, pid_inverse_filter, PidGains};
use crate::pl::pl_from_tc;
use crate::signals::{filter, TimeSeries};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::Path;

/// One logged closed-loop experiment: plant input, plant output, and the
/// PID gains that were active while logging. The loop is assumed to have
/// been stabilizing; that cannot be checked from the record itself.
#[derive(Debug, Clone)]
pub struct IoRecord {
    pub u0: TimeSeries,
    pub y0: TimeSeries,
    pub theta0: PidGains,
}

impl IoRecord {
    pub fn ts(&self) -> f64 {
        self.u0.ts
    }

    pub fn len(&self) -> usize {
        self.u0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u0.is_empty()
    }

    /// Three-column CSV `t,u,y`, same number formats as TimeSeries CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,u,y\n");
        for k in 0..self.len() {
            let t = k as f64 * self.ts();
            writeln!(out, "{t:.6},{:.8e},{:.8e}", self.u0.values[k], self.y0.values[k]).unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Reads a `t,u,y` CSV; the sampling time is inferred from the time
    /// column, which must be uniform.
    pub fn load_csv(path: &Path, theta0: PidGains) -> Result<IoRecord> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("").trim();
        if header != "t,u,y" {
            return Err(Error::Parse(format!(
                "expected header `t,u,y`, found {header:?}"
            )));
        }
        let mut t = Vec::new();
        let mut u = Vec::new();
        let mut y = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("row {}: expected 3 columns", i + 2)));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {}: bad number {s:?}", i + 2)))
            };
            t.push(parse(cols[0])?);
            u.push(parse(cols[1])?);
            y.push(parse(cols[2])?);
        }
        if t.len() < 2 {
            return Err(Error::Parse("record needs at least 2 rows".into()));
        }
        let ts = t[1] - t[0];
        if !(ts > 0.0) {
            return Err(Error::Parse("time column must be strictly increasing".into()));
        }
        for (k, &tk) in t.iter().enumerate() {
            if (tk - k as f64 * ts).abs() > 1e-6 * (1.0 + tk.abs()) {
                return Err(Error::Parse(format!("nonuniform time step at row {}", k + 2)));
            }
        }
        Ok(IoRecord {
            u0: TimeSeries::new(u, ts),
            y0: TimeSeries::new(y, ts),
            theta0,
        })
    }
}

/// Joint tuning vector: PID gains plus the reference-model time constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaFull {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub tc: f64,
}

impl ThetaFull {
    pub fn gains(&self, ts: f64) -> PidGains {
        PidGains {
            kp: self.kp,
            ki: self.ki,
            kd: self.kd,
            ts,
        }
    }
}

/// Tuning configuration: the input-variation weight plus optimizer
/// settings.
#[derive(Debug, Clone, Copy)]
pub struct EfritConfig {
    pub lambda: f64,
    /// Number of simplex starts; the first sits exactly on theta0.
    pub starts: usize,
    pub max_iter: usize,
    pub ftol: f64,
    pub seed: u64,
}

impl Default for EfritConfig {
    fn default() -> Self {
        EfritConfig {
            lambda: 0.0,
            starts: 8,
            max_iter: 5000,
            ftol: 1e-10,
            seed: 0,
        }
    }
}

/// r = C^-1 u0 + y0: the reference that would have produced the record
/// under gains g.
pub fn fictitious_reference(rec: &IoRecord, g: &PidGains) -> Result<TimeSeries> {
    let inv = pid_inverse_filter(g)?;
    let ci_u = filter(&inv, &rec.u0)?;
    let values = ci_u
        .values
        .iter()
        .zip(&rec.y0.values)
        .map(|(a, b)| a + b)
        .collect();
    Ok(TimeSeries::new(values, rec.ts()))
}

/// Fictitious model output, input, and input increments for a full tuning
/// vector: ytilde = P(tc) r, utilde = C (r - ytilde), and the first
/// difference of utilde with utilde(-1) = 0.
pub fn fictitious_outputs(
    rec: &IoRecord,
    th: &ThetaFull,
) -> Result<(TimeSeries, TimeSeries, TimeSeries)> {
    let ts = rec.ts();
    let g = th.gains(ts);
    let rt = fictitious_reference(rec, &g)?;
    let pl = pl_from_tc(th.tc, ts)?;
    let ytilde = filter(&pl.as_filter(), &rt)?;
    let err = rt.sub(&ytilde)?;
    let utilde = filter(&pid_as_filter(&g), &err)?;
    let mut prev = 0.0;
    let dutilde: Vec<f64> = utilde
        .values
        .iter()
        .map(|&u| {
            let d = u - prev;
            prev = u;
            d
        })
        .collect();
    Ok((ytilde, utilde, TimeSeries::new(dutilde, ts)))
}

/// Cost decomposition (tracking term, raw input-variation term), or None
/// when the candidate is infeasible on this record.
pub fn efrit_cost_split(rec: &IoRecord, th: &ThetaFull) -> Option<(f64, f64)> {
    if !th.tc.is_finite() || th.tc <= 0.0 {
        return None;
    }
    let (ytilde, _, dutilde) = match fictitious_outputs(rec, th) {
        Ok(v) => v,
        Err(_) => return None,
    };
    let jf: f64 = rec
        .y0
        .values
        .iter()
        .zip(&ytilde.values)
        .map(|(y, yt)| (y - yt) * (y - yt))
        .sum();
    let ju: f64 = dutilde.values.iter().map(|d| d * d).sum();
    if jf.is_finite() && ju.is_finite() {
        Some((jf, ju))
    } else {
        None
    }
}

/// J = sum (y0 - ytilde)^2 + lambda sum (delta utilde)^2, plain sums with
/// no length normalization. Infeasible or unstable candidates evaluate to
/// +inf so optimizers can treat them as out of bounds.
pub fn efrit_cost(rec: &IoRecord, th: &ThetaFull, lambda: f64) -> f64 {
    match efrit_cost_split(rec, th) {
        Some((jf, ju)) => {
            let j = jf + lambda * ju;
            if j.is_finite() {
                j
            } else {
                f64::INFINITY
            }
        }
        None => f64::INFINITY,
    }
}

/// Result of a tuning run.
#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub theta: ThetaFull,
    pub cost: f64,
    /// Total simplex iterations over all starts.
    pub iterations: usize,
    /// True when the winning start hit the iteration cap before meeting
    /// the simplex tolerance.
    pub stalled: bool,
    /// Global best cost after each iterate, monotone nonincreasing.
    pub trace: Vec<f64>,
    pub start_index: usize,
}

/// Multi-start minimization of the tuning cost over [kp, ki, kd, ln tc].
///
/// Start 0 sits exactly on th0; the others scatter gains by factors
/// e^U(-1.5, 4.5) and the time constant by factors in [0.02, 500]. Starts
/// run concurrently; the reduction picks the lowest cost with the lowest
/// start index as tie break, so results are deterministic for a seed.
pub fn optimize_pl(rec: &IoRecord, th0: &ThetaFull, cfg: &EfritConfig) -> TuneOutcome {
    debug_assert!(cfg.lambda >= 0.0 && cfg.starts >= 1);
    let tc0 = th0.tc;
    let g0 = [th0.kp, th0.ki, th0.kd];

    let mut starts: Vec<Vec<f64>> = vec![vec![g0[0], g0[1], g0[2], tc0.ln()]];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 1..cfg.starts {
        let gains: Vec<f64> = (0..3)
            .map(|i| g0[i] * rng.gen_range(-1.5..4.5_f64).exp())
            .collect();
        let lt = tc0.ln() + rng.gen_range(0.02_f64.ln()..500.0_f64.ln());
        starts.push(vec![gains[0], gains[1], gains[2], lt]);
    }

    let runs: Vec<_> = starts
        .into_par_iter()
        .enumerate()
        .map(|(si, x0)| {
            let steps: Vec<f64> = (0..3)
                .map(|i| (0.25 * x0[i].abs()).max(0.02 * g0[i].abs()).max(1e-6))
                .chain(std::iter::once(0.25))
                .collect();
            let cost = |x: &[f64]| {
                let th = ThetaFull {
                    kp: x[0],
                    ki: x[1],
                    kd: x[2],
                    tc: x[3].exp(),
                };
                efrit_cost(rec, &th, cfg.lambda)
            };
            (si, nelder_mead(cost, &x0, &steps, cfg.max_iter, cfg.ftol))
        })
        .collect();

    let mut best = 0;
    for i in 1..runs.len() {
        if runs[i].1.fx < runs[best].1.fx {
            best = i;
        }
    }

    let mut trace = Vec::new();
    let mut running = f64::INFINITY;
    let mut iterations = 0;
    for (_, r) in &runs {
        iterations += r.iterations;
        for &c in &r.best_trace {
            running = running.min(c);
            trace.push(running);
        }
    }

    let (start_index, winner) = (runs[best].0, &runs[best].1);
    TuneOutcome {
        theta: ThetaFull {
            kp: winner.x[0],
            ki: winner.x[1],
            kd: winner.x[2],
            tc: winner.x[3].exp(),
        },
        cost: winner.fx,
        iterations,
        stalled: winner.stalled,
        trace,
        start_index,
    }
}

/// Serialized tuning result, `key = value` text with keys kp, ki, kd, tc,
/// lambda, cost, iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningResult {
    pub theta: ThetaFull,
    pub lambda: f64,
    pub cost: f64,
    pub iterations: usize,
}

impl TuningResult {
    pub fn to_text(&self) -> String {
        format!(
            "kp = {:.17e}\nki = {:.17e}\nkd = {:.17e}\ntc = {:.17e}\nlambda = {:.17e}\ncost = {:.17e}\niterations = {}\n",
            self.theta.kp,
            self.theta.ki,
            self.theta.kd,
            self.theta.tc,
            self.lambda,
            self.cost,
            self.iterations
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<TuningResult> {
        let text = std::fs::read_to_string(path)?;
        let mut map = std::collections::HashMap::new();
        for line in text.lines() {
            if let Some((k, v)) = line.split_once('=') {
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let get = |k: &str| -> Result<f64> {
            map.get(k)
                .ok_or_else(|| Error::Parse(format!("missing key {k}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad value for {k}")))
        };
        Ok(TuningResult {
            theta: ThetaFull {
                kp: get("kp")?,
                ki: get("ki")?,
                kd: get("kd")?,
                tc: get("tc")?,
            },
            lambda: get("lambda")?,
            cost: get("cost")?,
            iterations: get("iterations")? as usize,
        })
    }
}
