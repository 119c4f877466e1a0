//! Command-line front end. [`dispatch`] returns the process exit code:
//! 0 on success, 1 on usage errors, 2 on numeric failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::{
    analytic_trajectory, builtin, builtin_scenarios, oracle_check, oracle_grid, read_config,
    records_from, run_file_name, run_scenario, scaling, summarize, sweep, write_json,
    write_records, write_run, write_summary, Quantity, ScenarioConfig, ScenarioName, ORACLE_MAX_K,
};

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "DEPHASE_OUT_DIR";

/// Largest deviation tolerated by `oracle-check`.
pub const ORACLE_DEVIATION_LIMIT: f64 = 1e-8;
pub const ORACLE_LEAKAGE_LIMIT: f64 = 1e-9;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dephase",
    version,
    about = "Correlation dynamics of two coupled oscillators under local dephasing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the built-in scenarios.
    List,
    /// Integrate one trajectory and write its CSV.
    Run(Common),
    /// Run every k of a scenario and write per-k CSVs plus a summary.
    Sweep(Common),
    /// Fit power laws to first-maximum amplitudes.
    Scaling {
        #[command(flatten)]
        common: Common,
        /// negativity, hs_participation, or both.
        #[arg(long, default_value = "both")]
        quantity: String,
    },
    /// Write closed-form curves: bath-only relaxation, the isolated linear
    /// coupling, or the Gaussian width boundary.
    Analytic(Common),
    /// Compare ladder and full-space evolution at small k.
    OracleCheck(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Built-in scenario name.
    #[arg(long)]
    scenario: Option<String>,
    /// Scenario JSON, e.g. a sidecar written by a previous run.
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// A count, an inclusive range `a..b` or `a..b:step`, or a list `a,b,c`.
    #[arg(long)]
    k: Option<String>,
    /// Output directory (default: $DEPHASE_OUT_DIR, then `out`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Parameter override `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

/// Parses `6`, `4..14`, `4..14:2` or `4,6,8`.
pub fn parse_k_list(text: &str) -> Result<Vec<u32>> {
    let bad = || Error::InvalidSpec(format!("cannot parse k '{text}'"));
    let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
    let ks: Vec<u32> = if let Some((lo, rest)) = text.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (num(hi)?, num(step)?),
            None => (num(rest)?, 1),
        };
        let lo = num(lo)?;
        if step == 0 || hi < lo {
            return Err(bad());
        }
        (lo..=hi).step_by(step as usize).collect()
    } else {
        text.split(',').map(num).collect::<Result<_>>()?
    };
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::InvalidSpec(format!("k values must be positive, got '{text}'")));
    }
    Ok(ks)
}

impl Common {
    fn config(
        &self,
        prepare: impl FnOnce(&mut ScenarioConfig) -> Result<()>,
    ) -> Result<ScenarioConfig> {
        let mut cfg = match (&self.scenario, &self.config) {
            (Some(name), None) => {
                let mut cfg = builtin(name.parse::<ScenarioName>()?);
                prepare(&mut cfg)?;
                cfg
            }
            (None, Some(path)) => read_config(path)?,
            _ => {
                return Err(Error::InvalidSpec("one of --scenario or --config is required".into()))
            }
        };
        for ov in &self.overrides {
            let (key, value) = ov.split_once('=').ok_or_else(|| {
                Error::InvalidSpec(format!("override '{ov}' is not of the form key=value"))
            })?;
            cfg.set(key.trim(), value)?;
        }
        if let Some(k) = &self.k {
            cfg.k_list = parse_k_list(k)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn single_k(&self, cfg: &ScenarioConfig) -> Result<u32> {
        match cfg.k_list.as_slice() {
            [k] => Ok(*k),
            _ => Err(Error::InvalidSpec("this command needs a single --k value".into())),
        }
    }

    fn out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn report(path: &Path) {
    println!("wrote {}", path.display());
}

fn list() {
    let mut out = std::io::stdout().lock();
    for cfg in builtin_scenarios() {
        let bath = match &cfg.bath {
            None => "isolated".to_string(),
            Some(b) => format!("{:?} Γ₁={:.4} Γ₂={:.4}", b.kind, b.gamma1, b.gamma2),
        };
        let ks = cfg.k_list.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        // a closed pipe (`dephase list | head`) just ends the listing
        let line = writeln!(
            out,
            "{:<10} {:?}(r={}, s={}) γ={} ω=({}, {}) {} k={}",
            cfg.name.as_str(),
            cfg.inter.kind,
            cfg.inter.r,
            cfg.inter.s,
            cfg.inter.gamma,
            cfg.osc.omega1,
            cfg.osc.omega2,
            bath,
            ks
        );
        if line.is_err() {
            return;
        }
    }
}

fn run(c: &Common) -> Result<()> {
    let cfg = c.config(|_| Ok(()))?;
    let k = c.single_k(&cfg)?;
    let path = c.out_dir().join(run_file_name(&cfg, k));
    write_run(&run_scenario(&cfg, k)?, &cfg, k, &path)?;
    report(&path);
    Ok(())
}

fn sweep_cmd(c: &Common) -> Result<()> {
    let cfg = c.config(|_| Ok(()))?;
    let dir = c.out_dir();
    let runs = sweep(&cfg, &cfg.k_list)?;
    for (k, recs) in &runs {
        let path = dir.join(run_file_name(&cfg, *k));
        write_run(recs, &cfg, *k, &path)?;
        report(&path);
    }
    let path = dir.join(format!("{}_summary.csv", cfg.name));
    write_summary(&summarize(&runs)?, &path)?;
    report(&path);
    Ok(())
}

fn scaling_cmd(c: &Common, quantity: &str) -> Result<()> {
    let quantities = match quantity {
        "both" => vec![Quantity::Negativity, Quantity::HsParticipation],
        q => vec![q.parse::<Quantity>()?],
    };
    let explicit = c.k.is_some();
    let cfg = c.config(|_| Ok(()))?;
    let fits = scaling(&cfg, &quantities, explicit.then_some(cfg.k_list.as_slice()))?;
    for f in &fits {
        println!(
            "{} {}: exponent {:.4} ± {:.4}",
            f.scenario, f.quantity, f.exponent, f.exponent_stderr
        );
    }
    let path = c.out_dir().join(format!("{}_scaling.json", cfg.name));
    write_json(&fits, &path)?;
    report(&path);
    Ok(())
}

fn analytic_cmd(c: &Common) -> Result<()> {
    let cfg = c.config(|_| Ok(()))?;
    let k = c.single_k(&cfg)?;
    let dir = c.out_dir();
    let path = if cfg.gamma_over_gamma().is_some() && cfg.inter.gamma > 0.0 {
        let path = dir.join(format!("{}_k{k}_width.json", cfg.name));
        write_json(&cfg.width_profile(k)?, &path)?;
        path
    } else {
        let traj = analytic_trajectory(&cfg, k)?;
        let path = dir.join(format!("{}_k{k}_analytic.csv", cfg.name));
        write_records(&records_from(&cfg, &traj)?, &path)?;
        path
    };
    report(&path);
    Ok(())
}

fn oracle_cmd(c: &Common) -> Result<i32> {
    let cfg = c.config(|cfg| {
        cfg.grid = oracle_grid(cfg, 101)?;
        Ok(())
    })?;
    let mut worst = EXIT_OK;
    for &k in &cfg.k_list {
        if k > ORACLE_MAX_K {
            return Err(Error::InvalidSpec(format!(
                "oracle-check supports k ≤ {ORACLE_MAX_K}, got {k}"
            )));
        }
    }
    for &k in &cfg.k_list {
        let rep = oracle_check(&cfg, k)?;
        let ok =
            rep.max_deviation < ORACLE_DEVIATION_LIMIT && rep.max_leakage < ORACLE_LEAKAGE_LIMIT;
        println!(
            "{} k={} max deviation {:.3e} leakage {:.3e} {}",
            cfg.name,
            k,
            rep.max_deviation,
            rep.max_leakage,
            if ok { "ok" } else { "FAILED" }
        );
        if !ok {
            worst = EXIT_NUMERIC;
        }
    }
    Ok(worst)
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::List => {
            list();
            Ok(EXIT_OK)
        }
        Command::Run(c) => run(c).map(|_| EXIT_OK),
        Command::Sweep(c) => sweep_cmd(c).map(|_| EXIT_OK),
        Command::Scaling { common, quantity } => scaling_cmd(common, quantity).map(|_| EXIT_OK),
        Command::Analytic(c) => analytic_cmd(c).map(|_| EXIT_OK),
        Command::OracleCheck(c) => oracle_cmd(c),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
