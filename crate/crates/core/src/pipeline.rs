//! The `run` pipeline: simulate per configuration, stream diagnostics, write checkpoints.
//!
//! Output directory layout:
//!
//! - `diagnostics.jsonl`: one [`DiagnosticRecord`] per sample; deterministic
//! - `config.toml`: canonical echo of the configuration
//! - `metadata.json`: wall-clock timestamps and provenance of the run
//! - `checkpoint_<step>.bin`, `final.bin`: spectral checkpoints of `u` and `B`

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::dynamics::audit::{blowup_indicator, EnergySample};
use crate::dynamics::{SolverState, Stepper};
use crate::experiments::gen_initial_data;
use crate::lp::{besov_norm, build_partition, DyadicPartition};
use crate::series::DiagnosticRecord;
use crate::spectral::checkpoint;
use crate::spectral::norms::{hdot_squared, norm};
use crate::{Error, Result};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.jsonl";
pub const FINAL_CHECKPOINT: &str = "final.bin";

/// Diagnostics of one state per the configuration.
pub fn diagnose(
    state: &SolverState,
    cfg: &RunConfig,
    partition: Option<&DyadicPartition>,
) -> Result<DiagnosticRecord> {
    let energy = EnergySample::of(state, &cfg.physics)?;
    let mut hs_norms = BTreeMap::new();
    for kind in &cfg.diagnostics.norms {
        hs_norms.insert(format!("u:{}", kind.label()), norm(&state.u, *kind)?);
        hs_norms.insert(format!("B:{}", kind.label()), norm(&state.b, *kind)?);
    }
    let mut besov_neg = BTreeMap::new();
    if let Some(part) = partition {
        for spec in &cfg.diagnostics.besov {
            besov_neg.insert(format!("u:{}", spec.label()), besov_norm(&state.u, *spec, part)?);
            besov_neg.insert(format!("B:{}", spec.label()), besov_norm(&state.b, *spec, part)?);
        }
    }
    Ok(DiagnosticRecord {
        t: state.t,
        energy: energy.energy,
        diss_u: cfg.physics.mu * hdot_squared(&state.u, 1.0)?,
        diss_b: cfg.physics.nu * hdot_squared(&state.b, 1.0)?,
        hs_norms,
        besov_neg,
        blowup_proxy: blowup_indicator(state)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub steps: usize,
    pub samples: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub checkpoints: Vec<PathBuf>,
}

fn unix_seconds() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

pub fn load_state(path: &Path) -> Result<SolverState> {
    let records = checkpoint::load(path)?;
    let find = |name: &str| {
        records
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::Checkpoint(format!("{}: no '{name}' record", path.display())))
    };
    let (u, b) = (find("u")?, find("B")?);
    if u.t != b.t {
        return Err(Error::Checkpoint(format!(
            "{}: u and B at different times",
            path.display()
        )));
    }
    SolverState::new(u.field.clone(), b.field.clone(), u.t)
}

pub fn save_state(path: &Path, state: &SolverState) -> Result<()> {
    checkpoint::save(path, state.t, &[("u", &state.u), ("B", &state.b)])
}

/// Keeps the diagnostics lines strictly before `t`, so a resumed run appends
/// exactly the records an unbroken run would have written.
fn truncate_diagnostics(path: &Path, t: f64, dt: f64) -> Result<()> {
    if !path.exists() {
        return Ok(());
    }
    let text = fs::read_to_string(path)?;
    let mut kept = String::new();
    for line in text.lines() {
        let rec: DiagnosticRecord = serde_json::from_str(line)?;
        if rec.t < t - 0.5 * dt {
            kept.push_str(line);
            kept.push('\n');
        }
    }
    fs::write(path, kept)?;
    Ok(())
}

pub fn run(cfg: &RunConfig, resume: Option<&Path>) -> Result<RunSummary> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let dt = cfg.integrator.dt;
    let out = &cfg.output_dir;
    fs::create_dir_all(out)?;
    let started = unix_seconds();

    let state = match resume {
        Some(p) => {
            let s = load_state(p)?;
            if *s.grid() != grid {
                return Err(Error::Checkpoint(format!(
                    "{} was written on a different grid than the configuration",
                    p.display()
                )));
            }
            s
        }
        None => {
            let (u, b) = gen_initial_data(&cfg.data, &grid)?;
            SolverState::new(u, b, 0.0)?
        }
    };
    let k0 = crate::dynamics::integrator::steps_between(0.0, state.t, dt)?;
    let n = cfg.integrator.steps_from(state.t)?;
    let every = cfg.sample_every()?;
    let partition = if cfg.diagnostics.besov.is_empty() {
        None
    } else {
        Some(build_partition(&grid)?)
    };

    fs::write(out.join("config.toml"), cfg.to_toml()?)?;
    let diag_path = out.join(DIAGNOSTICS_FILE);
    let mut sink = if resume.is_some() {
        truncate_diagnostics(&diag_path, state.t, dt)?;
        BufWriter::new(OpenOptions::new().create(true).append(true).open(&diag_path)?)
    } else {
        BufWriter::new(File::create(&diag_path)?)
    };

    let mut stepper = Stepper::new(grid, cfg.physics, cfg.integrator, cfg.model)?;
    let mut checkpoints = Vec::new();
    let mut samples = 0;
    let mut state = state;
    let t_start = state.t;
    for local in 0..=n {
        let k = k0 + local;
        if local > 0 {
            state = stepper.step(&state)?;
            state.t = k as f64 * dt;
        }
        if k % every == 0 || local == n {
            sink.write_all(diagnose(&state, cfg, partition.as_ref())?.to_line()?.as_bytes())?;
            samples += 1;
        }
        let ce = cfg.diagnostics.checkpoints_every;
        if local > 0 && ce > 0 && k % ce == 0 {
            let path = out.join(format!("checkpoint_{k:08}.bin"));
            save_state(&path, &state)?;
            checkpoints.push(path);
        }
    }
    sink.flush()?;
    let final_path = out.join(FINAL_CHECKPOINT);
    save_state(&final_path, &state)?;
    checkpoints.push(final_path);

    let meta = serde_json::json!({
        "started_unix": started,
        "finished_unix": unix_seconds(),
        "version": env!("CARGO_PKG_VERSION"),
        "resumed_from": resume.map(|p| p.display().to_string()),
        "steps": n,
    });
    fs::write(
        out.join("metadata.json"),
        serde_json::to_string_pretty(&meta)? + "\n",
    )?;
    Ok(RunSummary {
        output_dir: out.clone(),
        steps: n,
        samples,
        t_start,
        t_end: state.t,
        checkpoints,
    })
}
