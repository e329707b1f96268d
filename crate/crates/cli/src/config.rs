//! Line-oriented `key = value` run configuration with dotted section keys,
//! `#` comments, and command-line overrides. Every key has a default; the
//! canonical echo written into run summaries re-parses to the same config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thermavg_core::ansatz::MixingFamily;
use thermavg_core::vqe::OptMethod;

use crate::error::CliError;
use crate::output::fmt17;

/// β-grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Which observable the sweep and oracle commands evaluate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObservableChoice {
    /// The model Hamiltonian itself.
    Energy,
    /// A plain-text observable file (`<coefficient> <axes>` lines).
    File(PathBuf),
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub q_s: usize,
    pub coupling: f64,
    pub field: f64,
    pub periodic: bool,
    pub q_a: usize,
    pub mixing_family: String,
    pub mixing_param: f64,
    pub layers: usize,
    pub method: String,
    pub max_iterations: usize,
    pub learning_rate: f64,
    pub learning_rate_final: f64,
    pub tolerance: f64,
    pub restarts: usize,
    pub mode: String,
    pub shots: u64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_count: usize,
    pub beta_spacing: Spacing,
    pub observable: ObservableChoice,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            q_s: 3,
            coupling: 1.0,
            field: 1.0,
            periodic: true,
            q_a: 3,
            mixing_family: "boltzmann".into(),
            mixing_param: 1.0,
            layers: 6,
            method: "gradient-adaptive".into(),
            max_iterations: 10_000,
            learning_rate: 0.03,
            learning_rate_final: 1e-3,
            tolerance: 1e-7,
            restarts: 3,
            mode: "exact".into(),
            shots: 4096,
            beta_min: 0.0,
            beta_max: 5.0,
            beta_count: 11,
            beta_spacing: Spacing::Linear,
            observable: ObservableChoice::Energy,
            seed: 42,
            out: PathBuf::from("out"),
        }
    }
}

fn config_error(key: &str, origin: &str, detail: &str) -> CliError {
    CliError::Config(format!("config key `{key}` ({origin}): {detail}"))
}

impl RunConfig {
    /// Apply one `key = value` assignment. `origin` names the source for
    /// error messages ("line 12" or "command line").
    pub fn set(&mut self, key: &str, value: &str, origin: &str) -> Result<(), CliError> {
        let parse_f64 = |k: &str, v: &str| -> Result<f64, CliError> {
            v.parse::<f64>().map_err(|_| config_error(k, origin, &format!("invalid number {v:?}")))
        };
        let parse_usize = |k: &str, v: &str| -> Result<usize, CliError> {
            v.parse::<usize>()
                .map_err(|_| config_error(k, origin, &format!("invalid integer {v:?}")))
        };
        let parse_u64 = |k: &str, v: &str| -> Result<u64, CliError> {
            v.parse::<u64>()
                .map_err(|_| config_error(k, origin, &format!("invalid integer {v:?}")))
        };
        let parse_bool = |k: &str, v: &str| -> Result<bool, CliError> {
            match v {
                "true" => Ok(true),
                "false" => Ok(false),
                _ => Err(config_error(k, origin, &format!("expected true or false, got {v:?}"))),
            }
        };
        match key {
            "model.q_s" | "q_s" => self.q_s = parse_usize(key, value)?,
            "model.j" | "j" => self.coupling = parse_f64(key, value)?,
            "model.h" | "h" => self.field = parse_f64(key, value)?,
            "model.periodic" | "periodic" => self.periodic = parse_bool(key, value)?,
            "q_a" => self.q_a = parse_usize(key, value)?,
            "mixing.family" => match value {
                "uniform" | "geometric" | "boltzmann" => self.mixing_family = value.into(),
                _ => {
                    return Err(config_error(
                        key,
                        origin,
                        &format!("expected uniform, geometric, or boltzmann, got {value:?}"),
                    ))
                }
            },
            "mixing.param" => self.mixing_param = parse_f64(key, value)?,
            "ansatz.layers" | "layers" => self.layers = parse_usize(key, value)?,
            "optimizer.method" => match value {
                "gradient-adaptive" | "perturbation-stochastic" => self.method = value.into(),
                _ => {
                    return Err(config_error(
                        key,
                        origin,
                        &format!(
                            "expected gradient-adaptive or perturbation-stochastic, got {value:?}"
                        ),
                    ))
                }
            },
            "optimizer.max_iterations" => self.max_iterations = parse_usize(key, value)?,
            "optimizer.learning_rate" => self.learning_rate = parse_f64(key, value)?,
            "optimizer.learning_rate_final" => self.learning_rate_final = parse_f64(key, value)?,
            "optimizer.tolerance" => self.tolerance = parse_f64(key, value)?,
            "optimizer.restarts" => self.restarts = parse_usize(key, value)?,
            "mode" => match value {
                "exact" | "shots" => self.mode = value.into(),
                _ => {
                    return Err(config_error(
                        key,
                        origin,
                        &format!("expected exact or shots, got {value:?}"),
                    ))
                }
            },
            "shots" => self.shots = parse_u64(key, value)?,
            "betas.min" => self.beta_min = parse_f64(key, value)?,
            "betas.max" => self.beta_max = parse_f64(key, value)?,
            "betas.count" => self.beta_count = parse_usize(key, value)?,
            "betas.spacing" => {
                self.beta_spacing = match value {
                    "linear" => Spacing::Linear,
                    "log" => Spacing::Log,
                    _ => {
                        return Err(config_error(
                            key,
                            origin,
                            &format!("expected linear or log, got {value:?}"),
                        ))
                    }
                }
            }
            "observable" => {
                self.observable = if value == "energy" {
                    ObservableChoice::Energy
                } else {
                    ObservableChoice::File(PathBuf::from(value))
                }
            }
            "seed" => self.seed = parse_u64(key, value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(config_error(key, origin, "unknown key")),
        }
        Ok(())
    }

    /// Parse a config file's text on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let origin = format!("line {}", idx + 1);
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("config {origin}: expected `key = value`, got {line:?}"))
            })?;
            self.set(key.trim(), value.trim(), &origin)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = RunConfig::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Semantic validation beyond per-key parsing.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.q_a > self.q_s {
            return Err(CliError::Config(format!(
                "q_a = {} must not exceed model.q_s = {}",
                self.q_a, self.q_s
            )));
        }
        if self.beta_count == 0 {
            return Err(CliError::Config("betas.count must be at least 1".into()));
        }
        if self.mode == "shots" && self.shots == 0 {
            return Err(CliError::Config("shots must be at least 1 in shot mode".into()));
        }
        if self.beta_spacing == Spacing::Log && self.beta_min <= 0.0 {
            return Err(CliError::Config(
                "betas.spacing = log requires betas.min > 0".into(),
            ));
        }
        if self.beta_count > 1 && self.beta_max <= self.beta_min {
            return Err(CliError::Config(
                "betas.max must exceed betas.min for a grid".into(),
            ));
        }
        Ok(())
    }

    /// The β grid described by the config.
    pub fn beta_grid(&self) -> Vec<f64> {
        if self.beta_count == 1 {
            return vec![self.beta_min];
        }
        let n = self.beta_count;
        match self.beta_spacing {
            Spacing::Linear => (0..n)
                .map(|i| {
                    self.beta_min
                        + (self.beta_max - self.beta_min) * i as f64 / (n - 1) as f64
                })
                .collect(),
            Spacing::Log => {
                let lo = self.beta_min.ln();
                let hi = self.beta_max.ln();
                (0..n)
                    .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
        }
    }

    pub fn mixing_family_kind(&self) -> MixingFamily {
        match self.mixing_family.as_str() {
            "uniform" => MixingFamily::Uniform,
            "geometric" => MixingFamily::Geometric(self.mixing_param),
            _ => MixingFamily::Boltzmann(self.mixing_param),
        }
    }

    pub fn opt_method(&self) -> OptMethod {
        if self.method == "perturbation-stochastic" {
            OptMethod::PerturbationStochastic
        } else {
            OptMethod::GradientAdaptive
        }
    }

    pub fn is_shot_mode(&self) -> bool {
        self.mode == "shots"
    }

    /// Canonical `key = value` echo; parsing it reproduces this config.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model.q_s = {}", self.q_s);
        let _ = writeln!(s, "model.j = {}", fmt17(self.coupling));
        let _ = writeln!(s, "model.h = {}", fmt17(self.field));
        let _ = writeln!(s, "model.periodic = {}", self.periodic);
        let _ = writeln!(s, "q_a = {}", self.q_a);
        let _ = writeln!(s, "mixing.family = {}", self.mixing_family);
        let _ = writeln!(s, "mixing.param = {}", fmt17(self.mixing_param));
        let _ = writeln!(s, "ansatz.layers = {}", self.layers);
        let _ = writeln!(s, "optimizer.method = {}", self.method);
        let _ = writeln!(s, "optimizer.max_iterations = {}", self.max_iterations);
        let _ = writeln!(s, "optimizer.learning_rate = {}", fmt17(self.learning_rate));
        let _ = writeln!(s, "optimizer.learning_rate_final = {}", fmt17(self.learning_rate_final));
        let _ = writeln!(s, "optimizer.tolerance = {}", fmt17(self.tolerance));
        let _ = writeln!(s, "optimizer.restarts = {}", self.restarts);
        let _ = writeln!(s, "mode = {}", self.mode);
        let _ = writeln!(s, "shots = {}", self.shots);
        let _ = writeln!(s, "betas.min = {}", fmt17(self.beta_min));
        let _ = writeln!(s, "betas.max = {}", fmt17(self.beta_max));
        let _ = writeln!(s, "betas.count = {}", self.beta_count);
        let _ = writeln!(
            s,
            "betas.spacing = {}",
            match self.beta_spacing {
                Spacing::Linear => "linear",
                Spacing::Log => "log",
            }
        );
        let _ = writeln!(
            s,
            "observable = {}",
            match &self.observable {
                ObservableChoice::Energy => "energy".to_string(),
                ObservableChoice::File(p) => p.display().to_string(),
            }
        );
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out = {}", self.out.display());
        s
    }
}
