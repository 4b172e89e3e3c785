//! Line-based `key = value` run configuration.
//!
//! ```text
//! # Taylor-Green decay
//! dim = 2
//! res = 64
//! scenario = taylor_green
//! t_max = 1
//! dt = 1e-3
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown and duplicate keys are
//! rejected. Required keys: `dim`, `res`, `scenario`, `t_max`. When `dt` is
//! present the run uses a fixed step; otherwise the CFL policy applies.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use crate::dynamics::{StepPolicy, TimeStep};
use crate::scenarios::{ScenarioKind, ScenarioSpec};
use crate::ConfigError;

/// Every accepted key.
pub const KEYS: [&str; 18] = [
    "dim",
    "res",
    "length",
    "nu",
    "scenario",
    "scenario.k",
    "scenario.amplitude",
    "scenario.seed",
    "scenario.slope",
    "dt",
    "cfl_factor",
    "integrator",
    "t_max",
    "monitor_max",
    "record_every",
    "snapshot_every",
    "output_dir",
    "oversample_linf",
];

pub const DEFAULT_CFL: f64 = 0.5;
pub const DEFAULT_MONITOR_MAX: f64 = 1e8;
pub const DEFAULT_RECORD_EVERY: usize = 10;

/// Environment variable that replaces `output_dir`.
pub const OUTPUT_DIR_ENV: &str = "SIM_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dim: usize,
    pub res: usize,
    pub length: f64,
    pub nu: f64,
    pub scenario: ScenarioSpec,
    pub policy: StepPolicy,
    /// Threshold on the accumulated blow-up monitor that halts a run.
    pub monitor_max: f64,
    pub record_every: usize,
    /// 0 disables snapshots.
    pub snapshot_every: usize,
    pub output_dir: Option<PathBuf>,
    pub oversample_linf: bool,
}

impl SimulationConfig {
    /// `output_dir` after applying the `SIM_OUTPUT_DIR` override.
    pub fn effective_output_dir(&self) -> Option<PathBuf> {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Some(PathBuf::from(dir)),
            _ => self.output_dir.clone(),
        }
    }
}

/// Raw key/value pairs, before validation.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("unknown key `{key}`"),
                });
            }
            if value.is_empty() {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("empty value for `{key}`"),
                });
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    /// Applies a `key=value` override, replacing any parsed value.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| ConfigError::Range {
                key: assignment.to_string(),
                message: "override must look like key=value".into(),
            })?;
        if !KEYS.contains(&key) {
            return Err(ConfigError::Range {
                key: key.to_string(),
                message: "unknown key".into(),
            });
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn build(&self) -> Result<SimulationConfig, ConfigError> {
        let dim: usize = self.required("dim")?;
        if dim != 2 && dim != 3 {
            return Err(range("dim", format!("must be 2 or 3, got {dim}")));
        }
        let res: usize = self.required("res")?;
        if res < 8 || !res.is_power_of_two() {
            return Err(range(
                "res",
                format!("must be a power of two >= 8, got {res}"),
            ));
        }
        let length = self.optional("length")?.unwrap_or(2.0 * PI);
        positive("length", length)?;
        let nu = self.optional("nu")?.unwrap_or(1.0);
        positive("nu", nu)?;

        let kind: ScenarioKind = self.required("scenario")?;
        let mut scenario = ScenarioSpec::new(kind);
        for key in ["k", "amplitude", "seed", "slope"] {
            let full = format!("scenario.{key}");
            if let Some(v) = self.optional::<f64>(&full)? {
                if !v.is_finite() {
                    return Err(range(&full, "must be finite".into()));
                }
                scenario = scenario.with(key, v);
            }
        }

        let t_max: f64 = self.required("t_max")?;
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(range(
                "t_max",
                format!("must be finite and >= 0, got {t_max}"),
            ));
        }
        let cfl = self.optional("cfl_factor")?.unwrap_or(DEFAULT_CFL);
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(range(
                "cfl_factor",
                format!("must lie in (0, 1], got {cfl}"),
            ));
        }
        let time_step = match self.optional::<f64>("dt")? {
            Some(dt) => {
                positive("dt", dt)?;
                TimeStep::Fixed(dt)
            }
            None => TimeStep::Cfl(cfl),
        };
        let integrator = self.optional("integrator")?.unwrap_or_default();

        let monitor_max = self.optional("monitor_max")?.unwrap_or(DEFAULT_MONITOR_MAX);
        if !(monitor_max > 0.0) {
            return Err(range(
                "monitor_max",
                format!("must be positive, got {monitor_max}"),
            ));
        }
        let record_every = self
            .optional("record_every")?
            .unwrap_or(DEFAULT_RECORD_EVERY);
        if record_every == 0 {
            return Err(range("record_every", "must be at least 1".into()));
        }

        Ok(SimulationConfig {
            dim,
            res,
            length,
            nu,
            scenario,
            policy: StepPolicy {
                time_step,
                t_max,
                integrator,
            },
            monitor_max,
            record_every,
            snapshot_every: self.optional("snapshot_every")?.unwrap_or(0),
            output_dir: self.entries.get("output_dir").map(PathBuf::from),
            oversample_linf: self.optional("oversample_linf")?.unwrap_or(false),
        })
    }

    fn optional<T>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T: std::str::FromStr,
        T::Err: std::fmt::Display,
    {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| range(key, format!("cannot parse `{v}`: {e}")))
            })
            .transpose()
    }

    fn required<T>(&self, key: &'static str) -> Result<T, ConfigError>
    where
        T: std::str::FromStr,
        T::Err: std::fmt::Display,
    {
        self.optional(key)?.ok_or(ConfigError::Missing(key))
    }
}

fn range(key: &str, message: String) -> ConfigError {
    ConfigError::Range {
        key: key.to_string(),
        message,
    }
}

fn positive(key: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(range(key, format!("must be positive, got {v}")))
    }
}

pub fn load_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    RawConfig::parse(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Integrator;

    const MINIMAL: &str = "dim = 2\nres = 64\nscenario = taylor_green\nt_max = 1\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = load_config(MINIMAL).unwrap();
        assert_eq!((c.dim, c.res), (2, 64));
        assert_eq!(c.length, 2.0 * PI);
        assert_eq!(c.nu, 1.0);
        assert_eq!(c.policy.time_step, TimeStep::Cfl(0.5));
        assert_eq!(c.policy.integrator, Integrator::IfRk4);
        assert_eq!(c.policy.t_max, 1.0);
        assert_eq!(c.record_every, 10);
        assert_eq!(c.snapshot_every, 0);
        assert_eq!(c.output_dir, None);
        assert!(!c.oversample_linf);
        assert_eq!(c.scenario.kind, ScenarioKind::TaylorGreen);
    }

    #[test]
    fn negative_viscosity_names_key() {
        let err = load_config(&format!("{MINIMAL}nu = -1\n")).unwrap_err();
        assert!(matches!(&err, ConfigError::Range { key, .. } if key == "nu"));
        assert!(err.to_string().contains("nu"));
    }

    #[test]
    fn duplicate_key_is_parse_error_with_line() {
        let err = load_config(&format!("{MINIMAL}res = 32\n")).unwrap_err();
        assert_eq!(
            err,
            ConfigError::Parse {
                line: 5,
                message: "duplicate key `res`".into()
            }
        );
    }

    #[test]
    fn unknown_and_malformed_lines() {
        assert!(matches!(
            load_config("dim = 2\ncolour = red\n"),
            Err(ConfigError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            load_config("# header\n\ndim 2\n"),
            Err(ConfigError::Parse { line: 3, .. })
        ));
        assert!(matches!(
            load_config("dim = 2\nres = 64\nscenario = taylor_green\n"),
            Err(ConfigError::Missing("t_max"))
        ));
        assert!(matches!(
            load_config(&format!("{MINIMAL}integrator = euler\n")),
            Err(ConfigError::Range { .. })
        ));
        assert!(matches!(
            load_config("dim = 4\nres = 64\nscenario = taylor_green\nt_max = 1\n"),
            Err(ConfigError::Range { .. })
        ));
    }

    #[test]
    fn full_config_round() {
        let text = "\
            dim = 3   # three dimensions\n\
            res = 32\n\
            length = 6.0\n\
            nu = 0.5\n\
            scenario = random_smooth\n\
            scenario.seed = 11\n\
            scenario.slope = 4\n\
            scenario.amplitude = 0.25\n\
            dt = 1e-3\n\
            integrator = IF-RK2\n\
            t_max = 0.1\n\
            monitor_max = 50\n\
            record_every = 2\n\
            snapshot_every = 5\n\
            output_dir = /tmp/out\n\
            oversample_linf = true\n";
        let c = load_config(text).unwrap();
        assert_eq!(c.policy.time_step, TimeStep::Fixed(1e-3));
        assert_eq!(c.policy.integrator, Integrator::IfRk2);
        assert_eq!(c.scenario.params["seed"], 11.0);
        assert_eq!(c.output_dir, Some(PathBuf::from("/tmp/out")));
        assert!(c.oversample_linf);
        assert_eq!(c.monitor_max, 50.0);
    }

    #[test]
    fn overrides_replace_values() {
        let mut raw = RawConfig::parse(MINIMAL).unwrap();
        raw.set("res=32").unwrap();
        raw.set("dt = 0.01").unwrap();
        let c = raw.build().unwrap();
        assert_eq!(c.res, 32);
        assert_eq!(c.policy.time_step, TimeStep::Fixed(0.01));
        assert!(raw.set("bogus=1").is_err());
        assert!(raw.set("novalue").is_err());
    }
}
