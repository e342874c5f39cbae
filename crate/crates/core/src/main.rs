use clap::{Args, Parser, Subcommand};
use plmpc::frit::ThetaFull;
use plmpc::scenario::{
    load_config, run_bode, run_scenario, run_sweep, run_tune, SweepVariant,
};
use plmpc::{Error, Result};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "plmpc",
    version,
    about = "Data-driven PID + first-order model tuning with a predictive outer loop"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate (or load) the initial record and tune gains + model
    Tune(CommonArgs),
    /// Full pipeline: record, tune, evaluate predictive and baseline loops
    Run(CommonArgs),
    /// Run config variants concurrently and aggregate a comparison table
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated key=value override set, one flag per run
        #[arg(long = "variant")]
        variants: Vec<String>,
    },
    /// Measure the tuned closed loop across the standard frequency grid
    Bode(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario config file
    #[arg(long)]
    config: PathBuf,
    /// Override the config's random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// kp,ki,kd,tc: skip tuning and use these values directly
    #[arg(long = "theta-override", value_name = "CSV4")]
    theta_override: Option<String>,
    /// Extra dotted config override key=value (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl CommonArgs {
    fn overrides(&self) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        if let Some(seed) = self.seed {
            out.push(("seed".to_string(), seed.to_string()));
        }
        for item in &self.set {
            out.push(parse_kv(item)?);
        }
        Ok(out)
    }

    fn theta(&self) -> Result<Option<ThetaFull>> {
        match &self.theta_override {
            None => Ok(None),
            Some(text) => {
                let parts: Vec<&str> = text.split(',').collect();
                if parts.len() != 4 {
                    return Err(Error::Config(format!(
                        "--theta-override needs kp,ki,kd,tc, got {text:?}"
                    )));
                }
                let mut vals = [0.0; 4];
                for (slot, part) in vals.iter_mut().zip(&parts) {
                    *slot = part.trim().parse().map_err(|_| {
                        Error::Config(format!("--theta-override: bad number {part:?}"))
                    })?;
                }
                Ok(Some(ThetaFull {
                    kp: vals[0],
                    ki: vals[1],
                    kd: vals[2],
                    tc: vals[3],
                }))
            }
        }
    }

    fn base_dir(&self) -> PathBuf {
        self.config
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or_else(|| std::path::Path::new("."))
            .to_path_buf()
    }
}

fn parse_kv(item: &str) -> Result<(String, String)> {
    match item.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => {
            Ok((k.trim().to_string(), v.trim().to_string()))
        }
        _ => Err(Error::Config(format!("expected key=value, got {item:?}"))),
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Tune(args) => {
            let cfg = load_config(&args.config, &args.overrides()?)?;
            let res = run_tune(&cfg, &args.base_dir(), &args.out, args.theta()?)?;
            print!("{}", res.to_text());
            println!("wrote {}", args.out.join("tuning.txt").display());
        }
        Command::Run(args) => {
            let cfg = load_config(&args.config, &args.overrides()?)?;
            let rep = run_scenario(&cfg, &args.base_dir(), &args.out, args.theta()?)?;
            print!("{}", rep.metrics_text());
            println!("wrote {}", args.out.join("metrics.txt").display());
        }
        Command::Sweep { common, variants } => {
            let shared = common.overrides()?;
            let parsed: Vec<SweepVariant> = variants
                .iter()
                .map(|v| {
                    let overrides = v
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(parse_kv)
                        .collect::<Result<Vec<_>>>()?;
                    Ok(SweepVariant {
                        label: v.clone(),
                        overrides,
                    })
                })
                .collect::<Result<_>>()?;
            let results =
                run_sweep(&common.config, &shared, &parsed, &common.out, common.theta()?)?;
            for (i, (label, res)) in results.iter().enumerate() {
                match res {
                    Ok(rep) => println!(
                        "run_{i:03} [{label}] rmse_proposed = {:.6e}, rmse_conventional = {:.6e}",
                        rep.rmse_proposed, rep.rmse_conventional
                    ),
                    Err(e) => println!("run_{i:03} [{label}] failed: {e}"),
                }
            }
            println!("wrote {}", common.out.join("sweep.csv").display());
        }
        Command::Bode(args) => {
            let cfg = load_config(&args.config, &args.overrides()?)?;
            let pts = run_bode(&cfg, &args.base_dir(), &args.out, args.theta()?)?;
            for (lp, mp) in &pts {
                println!(
                    "{:>8.4} Hz: loop {:8.3} dB {:8.2} deg | model {:8.3} dB {:8.2} deg",
                    lp.freq_hz, lp.gain_db, lp.phase_deg, mp.gain_db, mp.phase_deg
                );
            }
            println!("wrote {}", args.out.join("bode.csv").display());
        }
    }
    Ok(())
}

fn out_dir(cli: &Cli) -> &PathBuf {
    match &cli.command {
        Command::Tune(a) | Command::Run(a) | Command::Bode(a) => &a.out,
        Command::Sweep { common, .. } => &common.out,
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        let dir = out_dir(&cli);
        if std::fs::create_dir_all(dir).is_ok() {
            let _ = std::fs::write(
                dir.join("error.txt"),
                format!("error = {e}\nexit_code = {}\n", e.exit_code()),
            );
        }
        std::process::exit(e.exit_code());
    }
}
