//! Config-driven end-to-end runs: generate (or load) the initial
//! closed-loop record, tune, evaluate the predictive and baseline loops,
//! and write every artifact needed to audit the run.

use crate::analysis::{
    bode_csv, default_freq_grid, desired_output, empirical_freq_response, filter_freq_point,
    simulate_pid_loop, FreqPoint, PidLoopOptions,
};
use crate::estimator::EstimatorState;
use crate::frit::{
    efrit_cost, fictitious_outputs, optimize_pl, EfritConfig, IoRecord, ThetaFull, TuningResult,
};
use crate::mpc::{mpc_step, InputConstraints, MpcControllerState, MpcWeights, QpStatus};
use crate::pid::PidState;
use crate::pl::pl_from_tc;
use crate::plants::{
    sinusoid_reference, staircase_reference, BoucWen, BoucWenParams, Hammerstein, Plant,
};
use crate::signals::{rmse, sd, TimeSeries};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Deserialize;
use std::fmt::Write as _;
use std::path::Path;

// ------------------------------------------------------------- configuration

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub ts: f64,
    #[serde(default)]
    pub seed: u64,
    pub plant: PlantSection,
    pub reference: ReferenceSection,
    pub theta0: ThetaSection,
    pub efrit: EfritSection,
    pub mpc: MpcSection,
    pub constraints: ConstraintSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    /// "hammerstein", "boucwen", or "csv-replay".
    pub kind: String,
    /// Bouc-Wen parameter file; the built-in table when absent.
    #[serde(default)]
    pub params_file: Option<String>,
    /// Pre-recorded `t,u,y` data for csv-replay.
    #[serde(default)]
    pub record_file: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSection {
    /// "staircase" or "sinusoid".
    pub kind: String,
    #[serde(default)]
    pub levels: Vec<f64>,
    #[serde(default)]
    pub step_duration: f64,
    #[serde(default)]
    pub amp: f64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub freq: f64,
    #[serde(default)]
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSection {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EfritSection {
    pub lambda: f64,
    /// Initial model time constant; 10 ts when absent.
    #[serde(default)]
    pub tc0: Option<f64>,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_ftol")]
    pub ftol: f64,
}

fn default_starts() -> usize {
    8
}
fn default_max_iter() -> usize {
    5000
}
fn default_ftol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpcSection {
    pub q: f64,
    pub r: f64,
    pub v: f64,
    pub hp: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSection {
    pub u_min: f64,
    pub u_max: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.ts > 0.0) {
            return bad(format!("ts must be positive, got {}", self.ts));
        }
        match self.plant.kind.as_str() {
            "hammerstein" | "boucwen" => {}
            "csv-replay" => {
                if self.plant.record_file.is_none() {
                    return bad("csv-replay needs plant.record_file".into());
                }
            }
            other => return bad(format!("unknown plant kind {other:?}")),
        }
        match self.reference.kind.as_str() {
            "staircase" => {
                if self.reference.levels.is_empty() {
                    return bad("staircase reference needs levels".into());
                }
                if !(self.reference.step_duration >= self.ts) {
                    return bad("staircase step_duration must cover at least one sample".into());
                }
            }
            "sinusoid" => {
                if !(self.reference.amp > 0.0
                    && self.reference.freq > 0.0
                    && self.reference.duration >= self.ts)
                {
                    return bad("sinusoid reference needs amp, freq > 0 and duration >= ts".into());
                }
                if self.reference.freq >= 0.5 / self.ts {
                    return bad(format!(
                        "sinusoid frequency {} is at or above Nyquist for ts {}",
                        self.reference.freq, self.ts
                    ));
                }
            }
            other => return bad(format!("unknown reference kind {other:?}")),
        }
        if !(self.efrit.lambda >= 0.0) {
            return bad("efrit.lambda must be >= 0".into());
        }
        if self.efrit.starts == 0 {
            return bad("efrit.starts must be >= 1".into());
        }
        if let Some(tc0) = self.efrit.tc0 {
            if !(tc0 > 0.0) {
                return bad("efrit.tc0 must be positive".into());
            }
        }
        if !(self.mpc.q >= 0.0 && self.mpc.r >= 0.0) {
            return bad("mpc.q and mpc.r must be >= 0".into());
        }
        if !(self.mpc.v > 0.0) {
            return bad("mpc.v must be > 0".into());
        }
        if self.mpc.hp == 0 {
            return bad("mpc.hp must be >= 1".into());
        }
        if !(self.constraints.u_min < self.constraints.u_max) {
            return bad("constraints need u_min < u_max".into());
        }
        Ok(())
    }

    pub fn reference_series(&self) -> TimeSeries {
        match self.reference.kind.as_str() {
            "staircase" => {
                let segs: Vec<(f64, f64)> = self
                    .reference
                    .levels
                    .iter()
                    .map(|&l| (l, self.reference.step_duration))
                    .collect();
                staircase_reference(&segs, self.ts)
            }
            _ => sinusoid_reference(
                self.reference.amp,
                self.reference.offset,
                self.reference.freq,
                self.reference.duration,
                self.ts,
            ),
        }
    }

    fn theta0_full(&self) -> ThetaFull {
        ThetaFull {
            kp: self.theta0.kp,
            ki: self.theta0.ki,
            kd: self.theta0.kd,
            tc: self.efrit.tc0.unwrap_or(10.0 * self.ts),
        }
    }

    fn efrit_config(&self) -> EfritConfig {
        EfritConfig {
            lambda: self.efrit.lambda,
            starts: self.efrit.starts,
            max_iter: self.efrit.max_iter,
            ftol: self.efrit.ftol,
            seed: self.seed,
        }
    }

    fn input_constraints(&self) -> InputConstraints {
        InputConstraints {
            u_min: self.constraints.u_min,
            u_max: self.constraints.u_max,
        }
    }

    fn mpc_weights(&self) -> MpcWeights {
        MpcWeights {
            q: self.mpc.q,
            r: self.mpc.r,
            v: self.mpc.v,
            hp: self.mpc.hp,
        }
    }
}

/// Reads a config file and applies dotted-path overrides such as
/// `mpc.q=1000` before deserializing; override values parse as the
/// matching literal kind, falling back to a string.
pub fn load_config(path: &Path, overrides: &[(String, String)]) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut doc: toml::Value = text
        .parse()
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    for (key, value) in overrides {
        apply_override(&mut doc, key, value)?;
    }
    let cfg: ScenarioConfig = doc
        .try_into()
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

fn apply_override(doc: &mut toml::Value, key: &str, value: &str) -> Result<()> {
    let parsed: toml::Value = match format!("x = {value}").parse::<toml::Value>() {
        Ok(toml::Value::Table(mut t)) => t.remove("x").unwrap(),
        _ => toml::Value::String(value.to_string()),
    };
    let mut cur = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::Config(format!("bad override key {key:?}")));
        }
        let table = cur
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override {key:?} crosses a non-table")))?;
        if i + 1 == parts.len() {
            table.insert(part.to_string(), parsed);
            return Ok(());
        }
        cur = table
            .entry(part.to_string())
            .or_insert(toml::Value::Table(Default::default()));
    }
    unreachable!("override keys have at least one part")
}

// ---------------------------------------------------------------- plant pool

/// Fresh plant resting at the given output level, plus the constant input
/// holding it there (zero for plants starting from rest).
fn fresh_plant(
    cfg: &ScenarioConfig,
    base_dir: &Path,
    level: f64,
) -> Result<(Box<dyn Plant>, f64)> {
    match cfg.plant.kind.as_str() {
        "hammerstein" => Ok((Box::new(Hammerstein::default()), 0.0)),
        "boucwen" => {
            let params = match &cfg.plant.params_file {
                Some(rel) => BoucWenParams::load(&base_dir.join(rel))?,
                None => BoucWenParams::default(),
            };
            let (plant, u_eq) = BoucWen::at_equilibrium(params, level);
            Ok((Box::new(plant), u_eq))
        }
        other => Err(Error::Config(format!("plant kind {other:?} cannot be simulated"))),
    }
}

fn warm_options(cfg: &ScenarioConfig, u_eq: f64) -> PidLoopOptions {
    PidLoopOptions {
        limits: Some((cfg.constraints.u_min, cfg.constraints.u_max)),
        init: PidState {
            integ: u_eq,
            prev_err: 0.0,
        },
    }
}

/// Runs the logging experiment (or loads the replayed record).
pub fn initial_record(cfg: &ScenarioConfig, base_dir: &Path) -> Result<IoRecord> {
    let gains0 = cfg.theta0_full().gains(cfg.ts);
    if cfg.plant.kind == "csv-replay" {
        let rel = cfg.plant.record_file.as_ref().expect("validated");
        let rec = IoRecord::load_csv(&base_dir.join(rel), gains0)?;
        if (rec.ts() - cfg.ts).abs() > 1e-9 * (1.0 + cfg.ts) {
            return Err(Error::Config(format!(
                "record sampling time {} does not match configured ts {}",
                rec.ts(),
                cfg.ts
            )));
        }
        return Ok(rec);
    }
    let r = cfg.reference_series();
    let (mut plant, u_eq) = fresh_plant(cfg, base_dir, r.values[0])?;
    let opts = warm_options(cfg, u_eq);
    let (y0, u0) = simulate_pid_loop(plant.as_mut(), &gains0, &r, &opts)?;
    Ok(IoRecord {
        u0,
        y0,
        theta0: gains0,
    })
}

// ------------------------------------------------------------------ MPC loop

/// Trajectories and solver diagnostics from one receding-horizon run.
#[derive(Debug, Clone)]
pub struct MpcRun {
    pub y: TimeSeries,
    pub u_applied: TimeSeries,
    pub v: TimeSeries,
    pub cost: Vec<f64>,
    pub status: Vec<QpStatus>,
    pub iters: Vec<usize>,
    /// Worst excursion of the pre-clamp estimated input beyond the box.
    pub u_hat_overrun: f64,
}

/// Receding-horizon loop over a plant. The preview holds the last
/// reference sample past the end of the run.
pub fn run_mpc_loop(
    plant: &mut dyn Plant,
    th: &ThetaFull,
    weights: MpcWeights,
    constraints: InputConstraints,
    r: &TimeSeries,
    est0: EstimatorState,
) -> Result<MpcRun> {
    let n = r.len();
    let hp = weights.hp;
    let mut ctrl = MpcControllerState::new(
        *th,
        r.ts,
        weights,
        constraints,
        plant.output(),
        est0,
    );
    let mut y = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut cost = Vec::with_capacity(n);
    let mut status = Vec::with_capacity(n);
    let mut iters = Vec::with_capacity(n);
    let mut overrun: f64 = 0.0;
    let mut preview = vec![0.0; hp];
    for k in 0..n {
        let yk = plant.output();
        for (i, slot) in preview.iter_mut().enumerate() {
            *slot = r.values[(k + 1 + i).min(n - 1)];
        }
        let (vk, diag) = mpc_step(&mut ctrl, yk, &preview)?;
        overrun = overrun
            .max(diag.u_hat - constraints.u_max)
            .max(constraints.u_min - diag.u_hat);
        plant.step(diag.u_applied)?;
        y.push(yk);
        u.push(diag.u_applied);
        v.push(vk);
        cost.push(diag.cost);
        status.push(diag.qp_status);
        iters.push(diag.qp_iters);
    }
    Ok(MpcRun {
        y: TimeSeries::new(y, r.ts),
        u_applied: TimeSeries::new(u, r.ts),
        v: TimeSeries::new(v, r.ts),
        cost,
        status,
        iters,
        u_hat_overrun: overrun,
    })
}

// ------------------------------------------------------------------- reports

/// Headline numbers from one scenario run.
#[derive(Debug, Clone)]
pub struct Report {
    pub theta_star: ThetaFull,
    pub j_star: f64,
    pub rmse_proposed: f64,
    pub rmse_conventional: f64,
    pub sd_proposed: f64,
    pub sd_conventional: f64,
    pub u_hat_overrun: f64,
    /// Mean samples to enter and hold the 2% band, per staircase segment,
    /// for the predictive loop; absent for non-staircase references.
    pub settle_mean: Option<f64>,
}

impl Report {
    pub fn metrics_text(&self) -> String {
        let th = &self.theta_star;
        format!(
            "rmse_proposed = {:.8e}\nrmse_conventional = {:.8e}\nsd_proposed = {:.8e}\nsd_conventional = {:.8e}\ntheta_star = {:.17e},{:.17e},{:.17e},{:.17e}\nj_star = {:.8e}\n",
            self.rmse_proposed,
            self.rmse_conventional,
            self.sd_proposed,
            self.sd_conventional,
            th.kp,
            th.ki,
            th.kd,
            th.tc,
            self.j_star
        )
    }
}

/// Samples until y enters and stays inside the 2% band of each constant
/// segment, averaged over segments.
pub fn mean_settle_samples(r: &TimeSeries, y: &TimeSeries) -> f64 {
    let n = r.len();
    let mut segments = Vec::new();
    let mut start = 0;
    for k in 1..n {
        if r.values[k] != r.values[k - 1] {
            segments.push((start, k));
            start = k;
        }
    }
    segments.push((start, n));
    let mut total = 0.0;
    for &(a, b) in &segments {
        let band = 0.02 * r.values[a].abs().max(1e-9);
        let mut settled = b;
        for k in (a..b).rev() {
            if (y.values[k] - r.values[k]).abs() <= band {
                settled = k;
            } else {
                break;
            }
        }
        total += (settled - a) as f64;
    }
    total / segments.len() as f64
}

/// Fixed tuning vector or a fresh optimization: (theta, cost, iterations).
/// A vector that cannot be scored on this record surfaces its specific
/// failure (bad time constant, non-invertible gains, filter blow-up)
/// instead of an opaque infinite cost.
fn resolve_theta(
    cfg: &ScenarioConfig,
    rec: &IoRecord,
    theta_override: Option<ThetaFull>,
) -> Result<(ThetaFull, f64, usize)> {
    let check_finite = |th: &ThetaFull| -> Result<f64> {
        fictitious_outputs(rec, th)?;
        let cost = efrit_cost(rec, th, cfg.efrit.lambda);
        if !cost.is_finite() {
            // Finite samples whose squared sums overflow: the same
            // unstable-filter condition, caught one summation later.
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(cost)
    };
    match theta_override {
        Some(th) => Ok((th, check_finite(&th)?, 0)),
        None => {
            let outcome = optimize_pl(rec, &cfg.theta0_full(), &cfg.efrit_config());
            if !outcome.cost.is_finite() {
                // Every start was infeasible; the initial gains' own
                // failure is the actionable diagnosis.
                check_finite(&cfg.theta0_full())?;
                return Err(Error::NonFinite { index: 0 });
            }
            Ok((outcome.theta, outcome.cost, outcome.iterations))
        }
    }
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    Ok(())
}

/// Record + tune only; writes record.csv and tuning.txt.
pub fn run_tune(
    cfg: &ScenarioConfig,
    base_dir: &Path,
    out_dir: &Path,
    theta_override: Option<ThetaFull>,
) -> Result<TuningResult> {
    std::fs::create_dir_all(out_dir)?;
    let rec = initial_record(cfg, base_dir)?;
    rec.write_csv(&out_dir.join("record.csv"))?;
    let (theta, cost, iterations) = resolve_theta(cfg, &rec, theta_override)?;
    let result = TuningResult {
        theta,
        lambda: cfg.efrit.lambda,
        cost,
        iterations,
    };
    result.save(&out_dir.join("tuning.txt"))?;
    Ok(result)
}

/// The full pipeline: record, tune, run both loops, write artifacts.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    base_dir: &Path,
    out_dir: &Path,
    theta_override: Option<ThetaFull>,
) -> Result<Report> {
    if cfg.plant.kind == "csv-replay" {
        return Err(Error::Config(
            "csv-replay supports the tune command only".into(),
        ));
    }
    std::fs::create_dir_all(out_dir)?;
    let r = cfg.reference_series();

    let rec = initial_record(cfg, base_dir)?;
    rec.write_csv(&out_dir.join("record.csv"))?;
    let (theta, j_star, iterations) = resolve_theta(cfg, &rec, theta_override)?;
    TuningResult {
        theta,
        lambda: cfg.efrit.lambda,
        cost: j_star,
        iterations,
    }
    .save(&out_dir.join("tuning.txt"))?;

    // Baseline: the tuned PID alone in the same loop the record used.
    let (mut plant_c, u_eq) = fresh_plant(cfg, base_dir, r.values[0])?;
    let gains = theta.gains(cfg.ts);
    let opts = warm_options(cfg, u_eq);
    let (y_conv, u_conv) = simulate_pid_loop(plant_c.as_mut(), &gains, &r, &opts)?;
    let y_m = desired_output(theta.tc, &r)?;
    let mut conv_csv = String::from("t,r,y,u,ym\n");
    for k in 0..r.len() {
        writeln!(
            conv_csv,
            "{:.6},{:.8e},{:.8e},{:.8e},{:.8e}",
            k as f64 * cfg.ts,
            r.values[k],
            y_conv.values[k],
            u_conv.values[k],
            y_m.values[k]
        )
        .unwrap();
    }
    write_text(&out_dir.join("conventional.csv"), &conv_csv)?;

    // Predictive loop on a fresh plant from the same start.
    let (mut plant_p, u_eq_p) = fresh_plant(cfg, base_dir, r.values[0])?;
    let est0 = EstimatorState {
        pid_state: PidState {
            integ: u_eq_p,
            prev_err: 0.0,
        },
        last_u_hat: u_eq_p,
    };
    let run = run_mpc_loop(
        plant_p.as_mut(),
        &theta,
        cfg.mpc_weights(),
        cfg.input_constraints(),
        &r,
        est0,
    )?;
    let mut prop_csv = String::from("t,r,y,v,u,cost,qp_status,qp_iters\n");
    for k in 0..r.len() {
        writeln!(
            prop_csv,
            "{:.6},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{},{}",
            k as f64 * cfg.ts,
            r.values[k],
            run.y.values[k],
            run.v.values[k],
            run.u_applied.values[k],
            run.cost[k],
            run.status[k],
            run.iters[k]
        )
        .unwrap();
    }
    write_text(&out_dir.join("proposed.csv"), &prop_csv)?;

    let e_prop = run.y.sub(&r)?;
    let e_conv = y_conv.sub(&r)?;
    let report = Report {
        theta_star: theta,
        j_star,
        rmse_proposed: rmse(&run.y, &r)?,
        rmse_conventional: rmse(&y_conv, &r)?,
        sd_proposed: sd(&e_prop),
        sd_conventional: sd(&e_conv),
        u_hat_overrun: run.u_hat_overrun,
        settle_mean: (cfg.reference.kind == "staircase")
            .then(|| mean_settle_samples(&r, &run.y)),
    };
    write_text(&out_dir.join("metrics.txt"), &report.metrics_text())?;
    Ok(report)
}

// --------------------------------------------------------------------- sweep

/// One sweep entry: a human-readable label and the dotted overrides that
/// produced it.
#[derive(Debug, Clone)]
pub struct SweepVariant {
    pub label: String,
    pub overrides: Vec<(String, String)>,
}

/// Runs each variant of the base config in its own subdirectory. Failures
/// are isolated: a failing run writes error.txt in its directory and the
/// sweep continues.
pub fn run_sweep(
    config_path: &Path,
    shared_overrides: &[(String, String)],
    variants: &[SweepVariant],
    out_dir: &Path,
    theta_override: Option<ThetaFull>,
) -> Result<Vec<(String, Result<Report>)>> {
    std::fs::create_dir_all(out_dir)?;
    let single = [SweepVariant {
        label: "base".into(),
        overrides: Vec::new(),
    }];
    let variants = if variants.is_empty() {
        &single[..]
    } else {
        variants
    };
    let base_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();

    let results: Vec<(String, Result<Report>)> = variants
        .par_iter()
        .enumerate()
        .map(|(i, variant)| {
            let run_dir = out_dir.join(format!("run_{i:03}"));
            let mut overrides = shared_overrides.to_vec();
            overrides.extend(variant.overrides.iter().cloned());
            let outcome = load_config(config_path, &overrides).and_then(|cfg| {
                run_scenario(&cfg, &base_dir, &run_dir, theta_override)
            });
            if let Err(e) = &outcome {
                let _ = std::fs::create_dir_all(&run_dir);
                let _ = std::fs::write(
                    run_dir.join("error.txt"),
                    format!("error = {e}\nexit_code = {}\n", e.exit_code()),
                );
            }
            (variant.label.clone(), outcome)
        })
        .collect();

    let mut table = String::from("run,label,status,rmse_proposed,rmse_conventional,settle_mean,j_star\n");
    for (i, (label, res)) in results.iter().enumerate() {
        match res {
            Ok(rep) => {
                let settle = rep
                    .settle_mean
                    .map(|s| format!("{s:.3}"))
                    .unwrap_or_else(|| "-".into());
                writeln!(
                    table,
                    "run_{i:03},{label},ok,{:.8e},{:.8e},{settle},{:.8e}",
                    rep.rmse_proposed, rep.rmse_conventional, rep.j_star
                )
                .unwrap();
            }
            Err(e) => {
                writeln!(table, "run_{i:03},{label},error,{e},,,").unwrap();
            }
        }
    }
    write_text(&out_dir.join("sweep.csv"), &table)?;
    Ok(results)
}

// ---------------------------------------------------------------------- bode

/// Measures the tuned closed loop across the standard grid and writes the
/// paired loop/model responses. Needs a sinusoid scenario; each frequency
/// restarts the plant at the reference offset.
pub fn run_bode(
    cfg: &ScenarioConfig,
    base_dir: &Path,
    out_dir: &Path,
    theta_override: Option<ThetaFull>,
) -> Result<Vec<(FreqPoint, FreqPoint)>> {
    if cfg.reference.kind != "sinusoid" {
        return Err(Error::Config(
            "bode needs a sinusoid reference scenario".into(),
        ));
    }
    let grid = default_freq_grid();
    let nyquist_guard = 0.45 / cfg.ts;
    if grid.iter().any(|&f| f >= nyquist_guard) {
        return Err(Error::Config(format!(
            "sampling time {} is too coarse for the {} Hz top of the sweep grid",
            cfg.ts,
            grid.last().unwrap()
        )));
    }
    std::fs::create_dir_all(out_dir)?;

    let rec = initial_record(cfg, base_dir)?;
    rec.write_csv(&out_dir.join("record.csv"))?;
    let (theta, cost, iterations) = resolve_theta(cfg, &rec, theta_override)?;
    TuningResult {
        theta,
        lambda: cfg.efrit.lambda,
        cost,
        iterations,
    }
    .save(&out_dir.join("tuning.txt"))?;

    let gains = theta.gains(cfg.ts);
    let offset = cfg.reference.offset;
    let loop_sim = |r: &TimeSeries| -> Result<TimeSeries> {
        let (mut plant, u_eq) = fresh_plant(cfg, base_dir, offset)?;
        let opts = warm_options(cfg, u_eq);
        let (y, _) = simulate_pid_loop(plant.as_mut(), &gains, r, &opts)?;
        Ok(y)
    };
    let loop_pts = empirical_freq_response(
        loop_sim,
        &grid,
        cfg.reference.amp,
        offset,
        2,
        8,
        cfg.ts,
    )?;
    let model = pl_from_tc(theta.tc, cfg.ts)?.as_filter();
    let model_pts: Vec<FreqPoint> = grid
        .iter()
        .map(|&f| filter_freq_point(&model, f, cfg.ts))
        .collect::<Result<_>>()?;
    write_text(&out_dir.join("bode.csv"), &bode_csv(&loop_pts, &model_pts)?)?;
    Ok(loop_pts.into_iter().zip(model_pts).collect())
}

// --------------------------------------------------------------------- tests
