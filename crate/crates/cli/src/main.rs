//! `hmhd`: command-line driver. Every command prints one JSON document
//! `{"command", "ok", "report"}` on stdout, or `{"command", "ok": false, "error"}`
//! when it could not run. Exit status is 0 when every asserted tolerance holds,
//! 1 when a tolerance fails and 2 on errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use hallmhd::config::{load_config, RunConfig};
use hallmhd::dynamics::{audit_convergence, formulation_convergence, SolverState, Stencil};
use hallmhd::experiments::{
    decay_experiment, fit_decay, gen_initial_data, oracle_decay, smallness_scan, DecayOptions, ScanOptions,
};
use hallmhd::lp::inequalities::{parse_inequality, presets, InequalityId};
use hallmhd::lp::{verify_lp, verify_stability, Ensemble};
use hallmhd::pipeline;
use hallmhd::series::TimeSeries;
use hallmhd::spectral::Grid;

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

/// Slope tolerance of the radial oracle.
const ORACLE_TOLERANCE: f64 = 0.02;
/// Interpolation ratios may exceed one by roundoff only.
const INTERPOLATION_SLACK: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "hmhd",
    version,
    about = "Hall-MHD spectral solver and Littlewood-Paley diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate per a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Continue from a checkpoint written by an earlier run of the same configuration.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    #[command(subcommand)]
    Verify(Verify),
    #[command(subcommand)]
    Oracle(Oracle),
    /// Fit a power law in `1 + t` to one key of a JSON-lines series.
    FitDecay {
        #[arg(long)]
        series: PathBuf,
        /// Fit window `a,b`.
        #[arg(long, value_parser = parse_window)]
        window: (f64, f64),
        /// Record key; dotted keys descend into nested objects.
        #[arg(long, default_value = "E")]
        key: String,
    },
    #[command(subcommand)]
    Scan(Scan),
    /// Decay exponents of a run against the heat-flow baseline.
    Decay {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Partition of unity, reconstruction, orthogonality and Bony suite.
    Lp {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        box_scale: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Empirical constants of an inequality on a coarse and a fine grid.
    Inequalities {
        /// Preset name, inline JSON, or `all`.
        #[arg(long)]
        id: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        coarse: usize,
        #[arg(long, default_value_t = 64)]
        fine: usize,
        #[arg(long, default_value_t = 1.0)]
        box_scale: f64,
    },
    /// Energy balance of the configured run at dt and dt/2.
    Energy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = StencilArg::Fourth)]
        stencil: StencilArg,
    },
    /// Original against extended formulation at dt and dt/2; needs mu = nu.
    Formulations {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// Decay slope of the continuum heat flow for matched radial data.
    Decay {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1e2)]
        t_lo: f64,
        #[arg(long, default_value_t = 1e4)]
        t_hi: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
}

#[derive(Subcommand)]
enum Scan {
    /// Amplitude threshold of the smallness functional.
    Smallness {
        #[arg(long)]
        config: PathBuf,
        /// Increasing amplitudes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.4,0.8,1.6")]
        amplitudes: Vec<f64>,
        /// Defaults to the configured t_end.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, default_value_t = 4)]
        bisect: usize,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum StencilArg {
    Second,
    Fourth,
}

fn parse_window(text: &str) -> Result<(f64, f64), String> {
    let (a, b) = text.split_once(',').ok_or("window must be `a,b`")?;
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

struct Outcome {
    ok: bool,
    report: Value,
}

fn outcome(ok: bool, report: impl Serialize) -> Result<Outcome> {
    Ok(Outcome {
        ok,
        report: serde_json::to_value(report)?,
    })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HMHD_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("HMHD_THREADS={v:?} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn initial_state(cfg: &RunConfig) -> Result<SolverState> {
    let (u, b) = gen_initial_data(&cfg.data, &cfg.grid()?)?;
    Ok(SolverState::new(u, b, 0.0)?)
}

fn load(path: &Path) -> Result<RunConfig> {
    let cfg = load_config(path)?;
    cfg.validate()?;
    Ok(cfg)
}

fn inequalities(
    id: &str,
    samples: usize,
    seed: u64,
    coarse: usize,
    fine: usize,
    box_scale: f64,
) -> Result<Outcome> {
    let ids: Vec<InequalityId> = if id == "all" {
        presets().into_iter().map(|(_, id)| id).collect()
    } else {
        vec![parse_inequality(id)?]
    };
    let ensemble = Ensemble {
        n_samples: samples,
        seed,
        ..Ensemble::default()
    };
    let (gc, gf) = (Grid::new(coarse, box_scale)?, Grid::new(fine, box_scale)?);
    let mut ok = true;
    let mut reports = Vec::new();
    for id in &ids {
        let r = verify_stability(id, &ensemble, &gc, &gf)?;
        let bounded = !matches!(id, InequalityId::Interpolation { .. })
            || r.coarse.max_ratio.max(r.fine.max_ratio) <= 1.0 + INTERPOLATION_SLACK;
        ok &= r.stable && bounded;
        reports.push(r);
    }
    outcome(ok, reports)
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Run { config, resume } => {
            let cfg = load(&config)?;
            outcome(true, pipeline::run(&cfg, resume.as_deref())?)
        }
        Command::Verify(Verify::Lp { n, box_scale, seed }) => {
            let r = verify_lp(&Grid::new(n, box_scale)?, seed)?;
            outcome(r.pass, r)
        }
        Command::Verify(Verify::Inequalities {
            id,
            samples,
            seed,
            coarse,
            fine,
            box_scale,
        }) => inequalities(&id, samples, seed, coarse, fine, box_scale),
        Command::Verify(Verify::Energy { config, stencil }) => {
            let cfg = load(&config)?;
            let stencil = match stencil {
                StencilArg::Second => Stencil::Second,
                StencilArg::Fourth => Stencil::Fourth,
            };
            let r = audit_convergence(
                &initial_state(&cfg)?,
                &cfg.physics,
                &cfg.integrator,
                cfg.model,
                stencil,
            )?;
            outcome(r.passes(), r)
        }
        Command::Verify(Verify::Formulations { config }) => {
            let cfg = load(&config)?;
            let r = formulation_convergence(
                &initial_state(&cfg)?,
                &cfg.physics,
                &cfg.integrator,
                cfg.sample_every()?,
            )?;
            outcome(r.passes(), r)
        }
        Command::Oracle(Oracle::Decay {
            s,
            gamma,
            t_lo,
            t_hi,
            points,
        }) => {
            let r = oracle_decay(s, gamma, t_lo, t_hi, points)?;
            outcome((r.slope - r.expected_slope).abs() <= ORACLE_TOLERANCE, r)
        }
        Command::FitDecay { series, window, key } => {
            let text =
                std::fs::read_to_string(&series).with_context(|| format!("reading {}", series.display()))?;
            let ts = TimeSeries::from_jsonl(&text, &key)?;
            let fit = fit_decay(&ts, window)?;
            outcome(fit.warning.is_none(), fit)
        }
        Command::Scan(Scan::Smallness {
            config,
            amplitudes,
            horizon,
            bisect,
        }) => {
            let cfg = load(&config)?;
            let opts = ScanOptions {
                amplitudes,
                horizon: horizon.unwrap_or(cfg.integrator.t_end),
                bisection_steps: bisect,
                ratio_cap: 2.0,
            };
            let r = smallness_scan(
                &cfg.grid()?,
                &cfg.data,
                &cfg.physics,
                &cfg.integrator,
                &cfg.regularity,
                &opts,
            )?;
            outcome(r.threshold.is_some(), r)
        }
        Command::Decay { config } => {
            let cfg = load(&config)?;
            let opts = DecayOptions {
                sample_dt: cfg.diagnostics.sample_dt,
                model: cfg.model,
            };
            let r = decay_experiment(
                &cfg.grid()?,
                &cfg.data,
                &cfg.physics,
                &cfg.regularity,
                &cfg.integrator,
                &opts,
            )?;
            outcome(true, r)
        }
    }
}

fn name(command: &Command) -> &'static str {
    match command {
        Command::Run { .. } => "run",
        Command::Verify(Verify::Lp { .. }) => "verify lp",
        Command::Verify(Verify::Inequalities { .. }) => "verify inequalities",
        Command::Verify(Verify::Energy { .. }) => "verify energy",
        Command::Verify(Verify::Formulations { .. }) => "verify formulations",
        Command::Oracle(Oracle::Decay { .. }) => "oracle decay",
        Command::FitDecay { .. } => "fit-decay",
        Command::Scan(Scan::Smallness { .. }) => "scan smallness",
        Command::Decay { .. } => "decay",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = name(&cli.command);
    let result = configure_threads().and_then(|_| execute(cli.command));
    let (doc, code) = match result {
        Ok(o) => (
            json!({ "command": command, "ok": o.ok, "report": o.report }),
            if o.ok { 0 } else { 1 },
        ),
        Err(e) => (
            json!({
                "command": command,
                "ok": false,
                "error": { "message": format!("{e:#}") },
            }),
            2,
        ),
    };
    match serde_json::to_string_pretty(&doc) {
        Ok(text) => println!("{text}"),
        Err(e) => {
            eprintln!("hmhd: could not serialize the report: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
