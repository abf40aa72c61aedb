//! Command-line front end. Every subcommand prints a JSON report on stdout.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::asymptotics;
use crate::bessel;
use crate::checks::{check_solution, CheckTolerances};
use crate::error::{Error, Result};
use crate::exact;
use crate::green::{self, FixedPointOptions};
use crate::pohozaev;
use crate::profile::{PhiProfile, VProfile};
use crate::region::{self, Axis, ScanSpec};
use crate::scaling::{phi_from_v, v_from_phi, Parameters};
use crate::shooting::{self, ShootingOptions};

#[derive(Debug, Parser)]
#[command(name = "zeromass", version, about = "Radial solutions of -Δu + A|x|^-α u = u^(p-1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate I_ν(t) and K_ν(t).
    BesselEval {
        #[arg(long)]
        nu: f64,
        /// One or more arguments.
        #[arg(long, num_args = 1.., required = true)]
        t: Vec<f64>,
        /// Report e^{-t} I_ν and e^{t} K_ν.
        #[arg(long)]
        scaled: bool,
    },
    /// Picard iteration for the fixed point v = Tv.
    Solve(SolveArgs),
    /// Integrate from the origin with v(0) = v0, or bisect a bracket.
    Shoot(ShootArgs),
    /// Compare the origin behavior of a profile with the predicted one.
    VerifyAsymptotics {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        profile: PathBuf,
    },
    /// Evaluate the Pohozaev-type identity on [a, b].
    PohozaevCheck {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// Left end, in r.
        #[arg(long)]
        a: f64,
        /// Right end, in r; defaults to the last grid point.
        #[arg(long)]
        b: Option<f64>,
    },
    /// Classify a grid of (α, p) pairs and render the map.
    RegionMap(RegionArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub params: PathBuf,
    /// `expdecay` or a profile CSV.
    #[arg(long, default_value = "expdecay")]
    pub init: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub damping: f64,
    /// Plain damped iteration without the rescaling step.
    #[arg(long)]
    pub no_stabilize: bool,
}

#[derive(Debug, Args)]
pub struct ShootArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, conflicts_with_all = ["bracket", "scan"])]
    pub v0: Option<f64>,
    /// `low,high`.
    #[arg(long, conflicts_with = "scan")]
    pub bracket: Option<String>,
    /// `low,high,count`: look for a bracket, then bisect it.
    #[arg(long)]
    pub scan: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = shooting::ShootingOptions::default().t_max)]
    pub t_max: f64,
    #[arg(long)]
    pub linear: bool,
}

#[derive(Debug, Args, Default)]
pub struct RegionArgs {
    #[arg(long = "N")]
    pub dim: Option<u32>,
    /// `start:stop:step` or a single value.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub with_numerics: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// JSON file with any of the other options.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Exit with status 2 when a cell times out.
    #[arg(long)]
    pub strict: bool,
    /// Per-cell budget for the numerics, in seconds.
    #[arg(long)]
    pub cell_timeout: Option<f64>,
}

/// The JSON form of [`RegionArgs`].
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    #[serde(rename = "N")]
    pub dim: Option<u32>,
    pub alpha: Option<String>,
    pub p: Option<String>,
    #[serde(default)]
    pub with_numerics: bool,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    #[serde(default)]
    pub strict: bool,
    pub cell_timeout: Option<f64>,
}

pub const DEFAULT_ALPHA_AXIS: &str = "0:4:0.05";
pub const DEFAULT_P_AXIS: &str = "2.05:8:0.05";

fn print(v: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

/// Loads a profile in either variable, converting `r,phi,dphi` tables.
pub fn load_v_profile(params: &Parameters, path: &Path) -> Result<VProfile> {
    match VProfile::load(path) {
        Ok(v) => Ok(v),
        Err(Error::Parse(_)) => v_from_phi(params, &PhiProfile::load(path)?),
        Err(e) => Err(e),
    }
}

fn load_phi_profile(params: &Parameters, path: &Path) -> Result<PhiProfile> {
    match PhiProfile::load(path) {
        Ok(v) => Ok(v),
        Err(Error::Parse(_)) => phi_from_v(params, &VProfile::load(path)?),
        Err(e) => Err(e),
    }
}

fn pair(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
        .collect()
}

/// Runs a parsed command and returns the process exit status.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::BesselEval { nu, t, scaled } => {
            let evals: Vec<bessel::BesselEval> = t
                .iter()
                .map(|&t| if scaled { bessel::evaluate_scaled(nu, t) } else { bessel::evaluate(nu, t) })
                .collect::<Result<_>>()?;
            print(&evals)?;
        }
        Command::Solve(a) => solve(a)?,
        Command::Shoot(a) => shoot(a)?,
        Command::VerifyAsymptotics { params, profile } => {
            let q = Parameters::load(params)?;
            let v = load_v_profile(&q, &profile)?;
            print(&asymptotics::verify(&q, &v)?)?;
        }
        Command::PohozaevCheck { params, profile, a, b } => {
            let q = Parameters::load(params)?;
            let phi = load_phi_profile(&q, &profile)?;
            let b = b.unwrap_or(phi.last());
            let identity = pohozaev::identity_residual(&q, &phi, a, b)?;
            let obstruction = if q.exact().in_obstruction_band() { Some(pohozaev::obstruction(&q, &phi, a)?) } else { None };
            print(&json!({ "identity": identity, "obstruction": obstruction }))?;
        }
        Command::RegionMap(a) => return region_map(a),
    }
    Ok(0)
}

fn solve(a: SolveArgs) -> Result<()> {
    let q = Parameters::load(&a.params)?;
    let init = if a.init == "expdecay" { green::expdecay_init()? } else { load_v_profile(&q, Path::new(&a.init))? };
    let opts = FixedPointOptions {
        max_iter: a.max_iter,
        tol: a.tol,
        damping: a.damping,
        stabilize: !a.no_stabilize,
        ..Default::default()
    };
    let result = green::fixed_point_solve(&q, &init, opts)?;
    if let Some(out) = &a.out {
        result.profile.save(out)?;
    }
    let checks = check_solution(&q, &result.profile, &CheckTolerances::default())?;
    print(&json!({ "result": result, "v0": result.profile.values[0], "checks": checks }))
}

fn shoot(a: ShootArgs) -> Result<()> {
    let q = Parameters::load(&a.params)?;
    let opts = ShootingOptions { t_max: a.t_max, linear: a.linear, ..Default::default() };
    if let Some(v0) = a.v0 {
        let traj = shooting::integrate_v(&q, v0, &opts)?;
        if let Some(out) = &a.out {
            traj.profile.save(out)?;
        }
        return print(&traj);
    }
    let mut report = serde_json::Map::new();
    let bracket = if let Some(text) = &a.bracket {
        match pair(text)?.as_slice() {
            [lo, hi] => (*lo, *hi),
            _ => return Err(Error::Parse("--bracket takes low,high".into())),
        }
    } else {
        let text = a.scan.as_deref().unwrap_or("1e-3,1e3,13");
        let (lo, hi, n) = match pair(text)?.as_slice() {
            [lo, hi, n] => (*lo, *hi, *n as usize),
            _ => return Err(Error::Parse("--scan takes low,high,count".into())),
        };
        let scan = shooting::scan_for_bracket(&q, lo, hi, n, &opts)?;
        report.insert("scan".into(), serde_json::to_value(&scan)?);
        match scan.bracket {
            Some(b) => b,
            None => {
                report.insert("ground_state".into(), Value::Null);
                return print(&report);
            }
        }
    };
    let gs = shooting::find_ground_state(&q, bracket, &opts)?;
    if let Some(gs) = &gs {
        if let Some(out) = &a.out {
            gs.profile.save(out)?;
        }
        report.insert("checks".into(), serde_json::to_value(check_solution(&q, &gs.profile, &CheckTolerances::default())?)?);
    }
    report.insert("ground_state".into(), serde_json::to_value(&gs)?);
    print(&report)
}

fn region_map(a: RegionArgs) -> Result<i32> {
    let cfg: RegionConfig = match &a.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => RegionConfig::default(),
    };
    let dim = a.dim.or(cfg.dim).unwrap_or(3);
    let alpha_text = a.alpha.or(cfg.alpha).unwrap_or_else(|| DEFAULT_ALPHA_AXIS.into());
    let p_text = a.p.or(cfg.p).unwrap_or_else(|| DEFAULT_P_AXIS.into());
    let alpha = Axis::parse(&alpha_text)?.above(&exact::int(0));
    let p = Axis::parse(&p_text)?.above(&exact::int(2));
    let mut spec = ScanSpec::new(dim, alpha, p);
    spec.with_numerics = a.with_numerics || cfg.with_numerics;
    if let Some(s) = a.cell_timeout.or(cfg.cell_timeout) {
        spec.cell_timeout = Duration::from_secs_f64(s);
    }
    let strict = a.strict || cfg.strict;
    let map = region::scan_grid(&spec)?;
    let side = region::sidecar(&map, &alpha_text, &p_text, &spec);
    if let Some(out) = a.out.or(cfg.out) {
        region::save_csv(&map, out, &side)?;
    }
    if let Some(svg) = a.svg.or(cfg.svg) {
        std::fs::write(svg, region::render_svg(&map)?)?;
    }
    print(&side)?;
    Ok(if strict && side.timed_out > 0 { 2 } else { 0 })
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
