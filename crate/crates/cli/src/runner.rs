//! Single runs and parallel sweeps, plus their CSV/JSON renderings.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::json;
use ssqc_core::{detect_steady_state, propagate, SteadyStateResult, SweepPoint, Trajectory};

use crate::config::{emit_run, emit_sweep, RunConfig, SweepSpec};
use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub steady: SteadyStateResult,
    pub elapsed: Duration,
}

/// Propagate one configuration and locate its steady state.
pub fn run_single(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let rho0 = cfg.initial_state.build(cfg.system.n_qubits())?;
    let trajectory = propagate(
        &rho0,
        &cfg.system,
        &cfg.bath,
        cfg.squeeze.as_ref(),
        &cfg.integrator,
        cfg.regime,
    )?;
    let steady = detect_steady_state(&trajectory, cfg.steady.tol, cfg.steady.window)?;
    if !steady.converged {
        log::warn!(
            "not converged: residual {:.3e} > tol {:.1e} (Gamma={}, T={}, gamma={})",
            steady.residual,
            cfg.steady.tol,
            cfg.bath.coupling(),
            cfg.bath.temperature(),
            cfg.bath.bandwidth()
        );
    }
    Ok(RunOutput {
        trajectory,
        steady,
        elapsed: start.elapsed(),
    })
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// `t,C,rho_re_i_j,rho_im_i_j` for the upper triangle `i <= j`.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let dim = traj.samples.first().map_or(0, |s| s.rho.dim());
    let mut header = vec!["t".to_string(), "C".to_string()];
    for i in 0..dim {
        for j in i..dim {
            header.push(format!("rho_re_{i}_{j}"));
            header.push(format!("rho_im_{i}_{j}"));
        }
    }
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for s in &traj.samples {
        row.clear();
        row.push(fmt(s.t));
        row.push(fmt(s.coherence));
        for i in 0..dim {
            for j in i..dim {
                let z = s.rho.get(i, j);
                row.push(fmt(z.re));
                row.push(fmt(z.im));
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run_json(cfg: &RunConfig, out: &RunOutput) -> serde_json::Value {
    let h = &out.trajectory.hygiene;
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": emit_run(cfg),
        "elapsed_seconds": out.elapsed.as_secs_f64(),
        "steady_state": {
            "ssqc": out.steady.ssqc,
            "converged": out.steady.converged,
            "t_converged": out.steady.t_converged,
            "residual": out.steady.residual,
        },
        "hygiene": {
            "steps": h.steps,
            "max_trace_error": h.max_trace_error,
            "max_hermiticity_drift": h.max_hermiticity_drift,
            "max_repair": h.max_repair,
            "repairs": h.repairs,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub outer_value: Option<f64>,
    pub point: SweepPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub outer_value: Option<f64>,
    pub axis_value: f64,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Completed points, in axis order.
    pub rows: Vec<SweepRow>,
    pub failures: Vec<SweepFailure>,
    pub elapsed: Duration,
}

impl SweepOutcome {
    pub fn total(&self) -> usize {
        self.rows.len() + self.failures.len()
    }
}

/// Run every point of `spec` on a pool of `workers` threads.
///
/// Each point is independent and deterministic, so the output does not
/// depend on `workers`. A failing point is recorded, not fatal.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepOutcome, CliError> {
    let start = Instant::now();
    let points = spec.points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    log::info!("sweeping {} points on {} workers", points.len(), workers.max(1));
    let results: Vec<_> = pool.install(|| {
        points
            .par_iter()
            .map(|(outer, v, cfg)| {
                let r = run_single(cfg).map(|o| SweepPoint {
                    axis_value: *v,
                    ssqc: o.steady.ssqc,
                    converged: o.steady.converged,
                    t_converged: o.steady.t_converged,
                    residual: o.steady.residual,
                });
                (*outer, *v, r)
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (outer_value, axis_value, r) in results {
        match r {
            Ok(point) => rows.push(SweepRow { outer_value, point }),
            Err(e) => {
                log::error!("{}={axis_value}: {e}", spec.inner.axis);
                failures.push(SweepFailure {
                    outer_value,
                    axis_value,
                    error: e.to_string(),
                })
            }
        }
    }
    Ok(SweepOutcome {
        rows,
        failures,
        elapsed: start.elapsed(),
    })
}

/// `[outer_value,]axis_value,ssqc,converged,t_converged,residual`.
pub fn write_sweep_csv<W: Write>(spec: &SweepSpec, outcome: &SweepOutcome, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let two_d = spec.outer.is_some();
    let mut header = Vec::new();
    if two_d {
        header.push("outer_value");
    }
    header.extend(["axis_value", "ssqc", "converged", "t_converged", "residual"]);
    w.write_record(&header)?;
    for row in &outcome.rows {
        let p = &row.point;
        let mut rec = Vec::with_capacity(6);
        if let Some(o) = row.outer_value {
            rec.push(fmt(o));
        }
        rec.extend([
            fmt(p.axis_value),
            fmt(p.ssqc),
            p.converged.to_string(),
            fmt(p.t_converged),
            fmt(p.residual),
        ]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Manifest of points that did not complete.
pub fn write_failures_csv<W: Write>(outcome: &SweepOutcome, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["outer_value", "axis_value", "error"])?;
    for f in &outcome.failures {
        w.write_record([
            f.outer_value.map(fmt).unwrap_or_default(),
            fmt(f.axis_value),
            f.error.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn sweep_json(spec: &SweepSpec, outcome: &SweepOutcome) -> serde_json::Value {
    let points: Vec<_> = outcome
        .rows
        .iter()
        .map(|r| {
            json!({
                "outer_value": r.outer_value,
                "axis_value": r.point.axis_value,
                "ssqc": r.point.ssqc,
                "converged": r.point.converged,
                "t_converged": r.point.t_converged,
                "residual": r.point.residual,
            })
        })
        .collect();
    let failures: Vec<_> = outcome
        .failures
        .iter()
        .map(|f| json!({"outer_value": f.outer_value, "axis_value": f.axis_value, "error": f.error}))
        .collect();
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": emit_sweep(spec),
        "axis": spec.inner.axis.name(),
        "outer_axis": spec.outer.as_ref().map(|o| o.axis.name()),
        "elapsed_seconds": outcome.elapsed.as_secs_f64(),
        "points": points,
        "failures": failures,
    })
}
