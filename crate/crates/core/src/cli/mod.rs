//! Command-line front end: `simulate`, `monitor`, `norms`, `verify riesz` and `counterexample`.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 64 usage.
//! Errors go to standard error as one JSON object `{"stage", "message"}`.

mod config;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::frame::{counterexample_field, origin_vorticity, symmetrize, AngularProfile, FramedField};
use crate::grid::{read_snapshot, sample_balls, write_snapshot, Ball, BallStrategy, ScalarField};
use crate::growth::{GrowthConfig, GrowthFunction};
use crate::harmonic::riesz_invariants;
use crate::nlc::monitor::{load_series, monitor_run, write_csv};
use crate::norms::{compute_norm, Argmax, NormKind, PreparedFamily};
use crate::solver::{self, InitialData, SolverConfig};

pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "nlcrit", version, about = "Maximum-point symmetry diagnostics for 3D incompressible flows")]
pub struct Cli {
    /// Worker threads, or `auto`.
    #[arg(long, global = true, default_value = "auto")]
    pub threads: String,
    /// Flat JSON run configuration; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Suppress progress and summary output.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate Navier–Stokes and write a snapshot series.
    Simulate(SimulateArgs),
    /// Run the no-local-collapsing monitor over a snapshot series.
    Monitor(MonitorArgs),
    /// Evaluate one norm of one snapshot component.
    Norms(NormsArgs),
    /// Print an invariant table.
    Verify {
        #[command(subcommand)]
        target: VerifyTarget,
    },
    /// Write a counterexample-family snapshot.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// beltrami, tg, random:<seed> or gaussian.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Box half-width.
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// End time.
    #[arg(long = "T")]
    pub t_end: Option<f64>,
    /// Snapshot spacing; omit for initial and final only.
    #[arg(long)]
    pub snapshot_every: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// Directory of `.nscv` snapshots.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Blowup time `T` of the threshold.
    #[arg(long = "T")]
    pub t_blowup: Option<f64>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// 1, 2, 3 or |u|.
    #[arg(long)]
    pub component: Option<String>,
    /// campanato, pointed, morrey, holder or lip.
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Growth function as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub phi: Option<String>,
    /// exhaustive or dyadic:<stride>.
    #[arg(long)]
    pub balls: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum VerifyTarget {
    /// Riesz transform identities as CSV.
    Riesz {
        #[arg(long = "N", default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub bump_width: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed stage and its cause.
#[derive(Debug)]
pub struct Failure {
    pub stage: &'static str,
    pub error: Error,
}

impl Failure {
    fn at(stage: &'static str) -> impl Fn(Error) -> Failure {
        move |error| Failure { stage, error }
    }

    pub fn exit_code(&self) -> i32 {
        if self.error.is_numerical() {
            EXIT_NUMERICAL
        } else {
            EXIT_INVALID
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "stage": self.stage, "message": self.error.to_string() }).to_string()
    }
}

type Staged<T> = std::result::Result<T, Failure>;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("{}", f.to_json());
            f.exit_code()
        }
    }
}

fn configure_threads(spec: &str) -> Result<()> {
    let n = match spec {
        "auto" => return Ok(()),
        s => s.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| Error::Config(format!("--threads expects a positive integer or auto, got {s:?}")))?,
    };
    // a pool built earlier in the same process wins; that only happens in tests
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn dispatch(cli: &Cli) -> Staged<()> {
    configure_threads(&cli.threads).map_err(Failure::at("args"))?;
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(Failure::at("config"))?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Simulate(a) => simulate(a, &cfg, cli.quiet),
        Command::Monitor(a) => monitor(a, &cfg, cli.quiet),
        Command::Norms(a) => norms(a, &cfg),
        Command::Verify { target: VerifyTarget::Riesz { n, seed, out } } => verify_riesz(*n, *seed, out.as_deref()),
        Command::Counterexample(a) => counterexample(a, &cfg, cli.quiet),
    }
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("{flag} is required (flag or config key)")))
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn simulate(a: &SimulateArgs, cfg: &RunConfig, quiet: bool) -> Staged<()> {
    let bad = Failure::at("config");
    let init: InitialData = a.init.clone().or(cfg.init.clone()).unwrap_or_else(|| "beltrami".into()).parse().map_err(&bad)?;
    let l = a.l.or(cfg.l).unwrap_or(std::f64::consts::PI);
    let solver_cfg = SolverConfig {
        n: a.n.or(cfg.n).unwrap_or(32),
        l,
        dt: a.dt.or(cfg.dt).unwrap_or(1e-3),
        t_end: a.t_end.or(cfg.t_end).unwrap_or(1.0),
        snapshot_every: a.snapshot_every.or(cfg.snapshot_every),
        nu: 1.0,
        scheme: Default::default(),
    };
    solver_cfg.validate().map_err(&bad)?;
    let out = required(a.out.clone().or(cfg.out.clone()), "--out").map_err(&bad)?;
    let summary = solver::run(&init.for_box(l), &solver_cfg, &out).map_err(Failure::at("simulate"))?;
    if !quiet {
        eprintln!("wrote {} snapshots to {}", summary.paths.len(), out.display());
    }
    match summary.failure {
        Some(error) => Err(Failure { stage: "simulate", error }),
        None => Ok(()),
    }
}

fn monitor(a: &MonitorArgs, cfg: &RunConfig, quiet: bool) -> Staged<()> {
    let mut nlc = cfg.nlc_config(a.t_blowup).map_err(Failure::at("config"))?;
    if let Some(t) = a.t_blowup {
        nlc.t_blowup = t;
    }
    nlc.validate().map_err(Failure::at("config"))?;
    let dir = required(a.series.clone().or(cfg.series.clone()), "--series").map_err(Failure::at("config"))?;
    let series: Vec<_> = load_series(&dir)
        .map_err(Failure::at("ingest"))?
        .into_iter()
        .map(|(p, s)| (p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(), s))
        .collect();
    let outcome = monitor_run(&series, &nlc).map_err(Failure::at("monitor"))?;
    let out = a.out.clone().or(cfg.out.clone());
    let mut w = open_out(out.as_deref()).map_err(Failure::at("output"))?;
    write_csv(&mut w, &outcome).and_then(|_| w.flush().map_err(Error::from)).map_err(Failure::at("output"))?;
    if !quiet {
        eprintln!("{}", outcome.verdict());
    }
    Ok(())
}

fn parse_phi(s: &str) -> Result<GrowthConfig> {
    let text = if s.trim_start().starts_with('{') { s.to_string() } else { std::fs::read_to_string(s)? };
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad growth config: {e}")))
}

fn norms(a: &NormsArgs, cfg: &RunConfig) -> Staged<()> {
    let bad = Failure::at("config");
    let input = required(a.input.clone().or(cfg.input.clone()), "--input").map_err(&bad)?;
    let snap = read_snapshot(&input).map_err(Failure::at("ingest"))?;
    let component = a.component.clone().or(cfg.component.clone()).unwrap_or_else(|| "|u|".into());
    let f: ScalarField<f64> = match component.as_str() {
        "1" | "2" | "3" => snap.field.component(component.parse::<usize>().expect("digit") - 1).clone(),
        "|u|" | "mag" => snap.field.magnitude(),
        other => return Err(bad(Error::Config(format!("component must be 1, 2, 3 or |u|, got {other:?}")))),
    };
    let p = a.p.or(cfg.p).unwrap_or(4.0);
    let phi_cfg = match a.phi.as_deref() {
        Some(s) => parse_phi(s).map_err(&bad)?,
        None => cfg.phi.clone().unwrap_or_default(),
    };
    let phi = GrowthFunction::<f64>::from_config(&phi_cfg).map_err(&bad)?;
    let space = a.space.clone().or(cfg.space.clone()).unwrap_or_else(|| "campanato".into());
    let g = *f.grid();
    let kind = match space.as_str() {
        "campanato" => NormKind::Campanato { p, phi },
        "pointed" => NormKind::PointedCampanato { p, phi },
        "morrey" => NormKind::Morrey { p, phi },
        "holder" => NormKind::Holder { phi },
        "lip" => NormKind::LipOnBall { alpha: phi_cfg.alpha, ball: Ball::new([0.0; 3], 1.0).map_err(&bad)? },
        other => return Err(bad(Error::Config(format!("unknown space {other:?}")))),
    };
    let strategy: BallStrategy<f64> = a.balls.clone().or(cfg.balls.clone()).unwrap_or_else(|| "dyadic:2".into()).parse().map_err(&bad)?;
    let fam = sample_balls(&g, &strategy).and_then(|b| PreparedFamily::new(&g, &b)).map_err(Failure::at("norms"))?;
    let rep = compute_norm(&f, &kind, &fam).map_err(Failure::at("norms"))?;
    let (center, radius) = match rep.argmax {
        Argmax::Ball(b) => (format!("{};{};{}", b.center[0], b.center[1], b.center[2]), b.radius.to_string()),
        Argmax::Pair(x, y) => {
            let d = ((0..3).map(|k| (x[k] - y[k]).powi(2)).sum::<f64>()).sqrt();
            (format!("{};{};{}", x[0], x[1], x[2]), d.to_string())
        }
        Argmax::None => (String::new(), String::new()),
    };
    let point = rep.point_term.map(|v| format!("{v:e}")).unwrap_or_default();
    let out = a.out.clone().or(cfg.out.clone());
    let mut w = open_out(out.as_deref()).map_err(Failure::at("output"))?;
    let p_col = if space == "holder" || space == "lip" { String::new() } else { format!("{p}") };
    writeln!(w, "space,p,value,pointTerm,argmax_center,argmax_radius")
        .and_then(|_| writeln!(w, "{space},{p_col},{:e},{point},{center},{radius}", rep.value))
        .and_then(|_| w.flush())
        .map_err(|e| Failure { stage: "output", error: e.into() })
}

fn verify_riesz(n: usize, seed: u64, out: Option<&Path>) -> Staged<()> {
    let rows = riesz_invariants(n, seed).map_err(Failure::at("verify"))?;
    let mut w = open_out(out).map_err(Failure::at("output"))?;
    let write = |w: &mut Box<dyn Write>| -> io::Result<()> {
        writeln!(w, "invariant,value,tolerance,holds")?;
        for r in &rows {
            writeln!(w, "{},{:e},{:e},{}", r.name, r.value, r.tolerance, r.holds)?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| Failure { stage: "output", error: e.into() })?;
    match rows.iter().find(|r| !r.holds) {
        Some(r) => Err(Failure { stage: "verify", error: Error::Divergence(format!("{} = {:e} exceeds {:e}", r.name, r.value, r.tolerance)) }),
        None => Ok(()),
    }
}

fn counterexample(a: &CounterexampleArgs, cfg: &RunConfig, quiet: bool) -> Staged<()> {
    let bad = Failure::at("config");
    let lambda = a.lambda.or(cfg.lambda).unwrap_or(10.0);
    let width = a.bump_width.or(cfg.bump_width).unwrap_or(0.006);
    let n = a.n.or(cfg.n).unwrap_or(64);
    let out = required(a.out.clone().or(cfg.out.clone()), "--out").map_err(&bad)?;
    let profile = AngularProfile::new(1.0, width, lambda);
    let grid = profile.default_grid(n).map_err(&bad)?;
    let u = counterexample_field(&grid, &profile).map_err(Failure::at("counterexample"))?;
    let rem = symmetrize(&FramedField::from_y_field(u.clone(), 0.0)).rem.max_abs();
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure { stage: "output", error: e.into() })?;
    }
    write_snapshot(&out, &u, 0.0, 1.0).map_err(Failure::at("output"))?;
    if !quiet {
        let w = origin_vorticity(&u);
        println!("{}", json!({ "lambda": lambda, "curlOrigin": w, "remainderMax": rem, "L": grid.l() }));
    }
    Ok(())
}
