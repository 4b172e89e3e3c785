//! The simulation loop: build the scenario, step until `t_max`, the monitor
//! threshold, or a solver failure, and keep the diagnostics ledger.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::config::SimulationConfig;
use crate::diagnostics::{energy_residual, gronwall_envelope, DiagnosticsRecord, LinfMode};
use crate::dynamics::{step, suggest_dt, StepPolicy};
use crate::output::{write_snapshot, write_timeseries};
use crate::spectral::Grid;
use crate::state::{FluidState, PhysicsParams};
use crate::{Error, Result};

/// Name of the time series written into the output directory.
pub const TIMESERIES_FILE: &str = "timeseries.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltReason {
    TMaxReached,
    MonitorExceeded,
    Overflow,
    DegenerateDirector,
}

impl HaltReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::TMaxReached => "t_max_reached",
            Self::MonitorExceeded => "monitor_exceeded",
            Self::Overflow => "overflow",
            Self::DegenerateDirector => "degenerate_director",
        }
    }

    /// Solver failures, as opposed to orderly stops.
    pub fn is_failure(self) -> bool {
        matches!(self, Self::Overflow | Self::DegenerateDirector)
    }
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub halt_reason: HaltReason,
    pub final_time: f64,
    pub steps: usize,
    pub final_record: DiagnosticsRecord,
    /// `None` when the envelope is undefined for this history.
    pub gronwall_c: Option<f64>,
    pub energy_residual: f64,
    pub history: Vec<DiagnosticsRecord>,
    pub final_state: FluidState,
}

/// Loop settings that do not come from the scenario.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub params: PhysicsParams,
    pub policy: StepPolicy,
    pub monitor_max: f64,
    pub record_every: usize,
    pub snapshot_every: usize,
    pub output_dir: Option<PathBuf>,
    pub linf: LinfMode,
}

impl RunSettings {
    pub fn from_config(config: &SimulationConfig) -> Result<Self> {
        Ok(Self {
            params: PhysicsParams::new(config.nu)?,
            policy: config.policy,
            monitor_max: config.monitor_max,
            record_every: config.record_every.max(1),
            snapshot_every: config.snapshot_every,
            output_dir: config.effective_output_dir(),
            linf: if config.oversample_linf {
                LinfMode::Oversampled
            } else {
                LinfMode::Collocation
            },
        })
    }
}

pub fn run(config: &SimulationConfig) -> Result<RunReport> {
    let grid = Grid::shared(config.dim, config.res, config.length)?;
    let initial = config.scenario.build(&grid)?;
    run_from(initial, &RunSettings::from_config(config)?)
}

/// Runs from an arbitrary initial state.
pub fn run_from(initial: FluidState, settings: &RunSettings) -> Result<RunReport> {
    settings.policy.validate()?;
    if let Some(dir) = &settings.output_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let params = &settings.params;
    let t_max = settings.policy.t_max;
    let tol = 1e-12 * t_max.max(1.0);

    let mut state = initial;
    let mut last = DiagnosticsRecord::evaluate(&state, params, settings.linf);
    let mut history = vec![last];
    let mut recorded = true;
    let mut steps = 0;
    maybe_snapshot(settings, &state, steps)?;

    let halt_reason = loop {
        if last.monitor_accum > settings.monitor_max {
            break HaltReason::MonitorExceeded;
        }
        if t_max - state.t() <= tol {
            break HaltReason::TMaxReached;
        }
        let dt = suggest_dt(&state, &settings.policy);
        let next = match step(&state, params, dt, settings.policy.integrator) {
            Ok(next) => next,
            Err(Error::Overflow { .. }) => break HaltReason::Overflow,
            Err(Error::DegenerateDirector { .. }) => break HaltReason::DegenerateDirector,
            Err(e) => return Err(e),
        };
        steps += 1;
        state = next;

        let mut current = DiagnosticsRecord::evaluate(&state, params, settings.linf);
        current.monitor_accum = last.monitor_accum
            + 0.5 * (state.t() - last.t) * (last.monitor_integrand + current.monitor_integrand);
        last = current;
        recorded = steps % settings.record_every == 0;
        if recorded {
            history.push(current);
        }
        maybe_snapshot(settings, &state, steps)?;
    };
    if !recorded {
        history.push(last);
    }

    if let Some(dir) = &settings.output_dir {
        write_timeseries(&history, &dir.join(TIMESERIES_FILE))?;
    }
    Ok(RunReport {
        halt_reason,
        final_time: state.t(),
        steps,
        final_record: last,
        gronwall_c: gronwall_envelope(&history).ok(),
        energy_residual: energy_residual(&history)?,
        history,
        final_state: state,
    })
}

fn maybe_snapshot(settings: &RunSettings, s: &FluidState, step: usize) -> Result<()> {
    match &settings.output_dir {
        Some(dir) if settings.snapshot_every > 0 && step.is_multiple_of(settings.snapshot_every) => {
            write_snapshot(s, &snapshot_path(dir, step))
        }
        _ => Ok(()),
    }
}

pub fn snapshot_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("snapshot_{step:06}.elcf"))
}
