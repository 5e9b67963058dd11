//! Line-oriented `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Values are resolved
//! in this order, later sources winning: built-in defaults, the config file,
//! `--set key=value` flags, dedicated command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use shadowkink_core::{FKind, GuessKind, ModelError, ModelParams, MuKind, SolverOptions, Tabulated};
use thiserror::Error;

use crate::io::read_table;

/// Every key the config file accepts.
pub const KEYS: &[&str] = &[
    "epsilon",
    "a",
    "chi",
    "grid.n",
    "grid.xmax",
    "mu",
    "f",
    "solver.newton_tol",
    "solver.flow_tol",
    "solver.max_newton",
    "solver.max_flow",
    "solver.guesses",
];

#[derive(Debug, Error)]
#[error("config key `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Builtin,
    File(PathBuf),
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Builtin => f.write_str("builtin"),
            FunctionSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub epsilon: f64,
    pub a: f64,
    pub chi: f64,
    pub grid_n: Option<usize>,
    pub grid_xmax: f64,
    pub mu: FunctionSpec,
    pub f: FunctionSpec,
    pub newton_tol: f64,
    pub flow_tol: f64,
    pub max_newton: usize,
    pub max_flow: usize,
    pub guesses: Vec<GuessKind>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolverOptions::default();
        Self {
            epsilon: 0.05,
            a: 1.0,
            chi: 0.5,
            grid_n: None,
            grid_xmax: s.x_max,
            mu: FunctionSpec::Builtin,
            f: FunctionSpec::Builtin,
            newton_tol: s.newton_tol,
            flow_tol: s.flow_tol,
            max_newton: s.max_newton,
            max_flow: s.max_flow,
            guesses: s.guesses,
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::new(key, format!("`{value}` is not a finite number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse::<usize>()
        .map_err(|_| ConfigError::new(key, format!("`{value}` is not a nonnegative integer")))
}

fn parse_function(key: &str, value: &str, builtin: &str) -> Result<FunctionSpec, ConfigError> {
    if value == builtin {
        return Ok(FunctionSpec::Builtin);
    }
    match value.strip_prefix("file:") {
        Some(path) if !path.trim().is_empty() => Ok(FunctionSpec::File(PathBuf::from(path.trim()))),
        _ => Err(ConfigError::new(
            key,
            format!("expected `{builtin}` or `file:<path>`, got `{value}`"),
        )),
    }
}

impl RunConfig {
    /// Apply one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "epsilon" => self.epsilon = parse_f64(key, value)?,
            "a" => self.a = parse_f64(key, value)?,
            "chi" => self.chi = parse_f64(key, value)?,
            "grid.n" => {
                let n = parse_usize(key, value)?;
                if n < 5 {
                    return Err(ConfigError::new(key, "need at least 5 nodes"));
                }
                self.grid_n = Some(n);
            }
            "grid.xmax" => {
                let x = parse_f64(key, value)?;
                if x <= 0.0 {
                    return Err(ConfigError::new(key, "must be positive"));
                }
                self.grid_xmax = x;
            }
            "mu" => self.mu = parse_function(key, value, "gaussian")?,
            "f" => self.f = parse_function(key, value, "halfnegmuprime")?,
            "solver.newton_tol" => self.newton_tol = parse_f64(key, value)?,
            "solver.flow_tol" => self.flow_tol = parse_f64(key, value)?,
            "solver.max_newton" => self.max_newton = parse_usize(key, value)?,
            "solver.max_flow" => self.max_flow = parse_usize(key, value)?,
            "solver.guesses" => {
                let mut guesses = Vec::new();
                for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let g = GuessKind::from_name(name).ok_or_else(|| {
                        ConfigError::new(
                            key,
                            format!("unknown guess `{name}` (expected phi, psi, psi_reflected, zero, random)"),
                        )
                    })?;
                    if !guesses.contains(&g) {
                        guesses.push(g);
                    }
                }
                if guesses.is_empty() {
                    return Err(ConfigError::new(key, "at least one guess is required"));
                }
                self.guesses = guesses;
            }
            _ => return Err(ConfigError::new(key, "unknown key")),
        }
        Ok(())
    }

    /// Apply `key = value` lines; later lines override earlier ones.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::new(line, format!("line {}: expected `key = value`", lineno + 1))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// Load tabulated functions and build the validated model parameters.
    pub fn model(&self) -> Result<ModelParams, ConfigError> {
        let load = |key: &str, path: &Path| -> Result<Tabulated, ConfigError> {
            let (xs, ys) = read_table(path).map_err(|e| ConfigError::new(key, e))?;
            Tabulated::new(xs, ys).map_err(|e| ConfigError::new(key, format!("{}: {e}", path.display())))
        };
        let mu = match &self.mu {
            FunctionSpec::Builtin => MuKind::Gaussian,
            FunctionSpec::File(p) => MuKind::Custom(load("mu", p)?),
        };
        let f = match &self.f {
            FunctionSpec::Builtin => FKind::HalfNegMuPrime,
            FunctionSpec::File(p) => FKind::Custom(load("f", p)?),
        };
        let p = ModelParams {
            epsilon: self.epsilon,
            a: self.a,
            chi: self.chi,
            mu,
            f,
        };
        p.validate().map_err(model_error)?;
        if matches!(p.mu, MuKind::Custom(_)) || matches!(p.f, FKind::Custom(_)) {
            p.check_hypotheses(self.grid_xmax).map_err(model_error)?;
        }
        p.zero_crossing().map_err(model_error)?;
        Ok(p)
    }

    pub fn solver(&self, seed: u64) -> Result<SolverOptions, ConfigError> {
        if !(self.newton_tol > 0.0) {
            return Err(ConfigError::new("solver.newton_tol", "must be positive"));
        }
        if !(self.flow_tol > 0.0) {
            return Err(ConfigError::new("solver.flow_tol", "must be positive"));
        }
        Ok(SolverOptions {
            newton_tol: self.newton_tol,
            flow_tol: self.flow_tol,
            max_newton: self.max_newton,
            max_flow: self.max_flow,
            guesses: self.guesses.clone(),
            seed,
            x_max: self.grid_xmax,
            n: self.grid_n,
        })
    }

    /// Non-fatal problems with the resolved configuration.
    pub fn warnings(&self, p: &ModelParams) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(n) = self.grid_n {
            let h = 2.0 * self.grid_xmax / (n - 1) as f64;
            if h > p.epsilon / 5.0 {
                out.push(format!(
                    "grid.n = {n} gives h = {h:.3e} > epsilon/5 = {:.3e}; the interior layer is under-resolved",
                    p.epsilon / 5.0
                ));
            }
        }
        if matches!(p.f, FKind::Custom(_)) {
            if let Some(v) = p.boundary_forcing_excess(self.grid_xmax) {
                out.push(format!("|f| = {v:.3e} at the truncation boundary exceeds 1e-12"));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "epsilon": self.epsilon,
            "a": self.a,
            "chi": self.chi,
            "grid.n": self.grid_n,
            "grid.xmax": self.grid_xmax,
            "mu": match &self.mu {
                FunctionSpec::Builtin => "gaussian".to_string(),
                other => other.to_string(),
            },
            "f": match &self.f {
                FunctionSpec::Builtin => "halfnegmuprime".to_string(),
                other => other.to_string(),
            },
            "solver.newton_tol": self.newton_tol,
            "solver.flow_tol": self.flow_tol,
            "solver.max_newton": self.max_newton,
            "solver.max_flow": self.max_flow,
            "solver.guesses": self.guesses.iter().map(|g| g.name()).collect::<Vec<_>>().join(","),
        })
    }
}

fn model_error(e: ModelError) -> ConfigError {
    match e {
        ModelError::InvalidParameter { name, value, expected } => {
            ConfigError::new(name, format!("{value} is out of range ({expected})"))
        }
        ModelError::HypothesisViolated { what, x } => {
            let key = if what.starts_with("f ") { "f" } else { "mu" };
            ConfigError::new(key, format!("hypothesis violated near x = {x}: {what}"))
        }
        ModelError::RootNotBracketed(_) => ConfigError::new("mu", e.to_string()),
        other => ConfigError::new("mu", other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let mut c = RunConfig::default();
        c.apply_text(
            "# comment\n\nepsilon = 0.02\na=2\nchi = 0.3\ngrid.n = 801\ngrid.xmax = 5\nmu = gaussian\n\
             f = halfnegmuprime\nsolver.newton_tol = 1e-9\nsolver.flow_tol = 1e-3\nsolver.max_newton = 10\n\
             solver.max_flow = 20\nsolver.guesses = phi, zero\n",
        )
        .unwrap();
        assert_eq!(c.epsilon, 0.02);
        assert_eq!(c.a, 2.0);
        assert_eq!(c.grid_n, Some(801));
        assert_eq!(c.grid_xmax, 5.0);
        assert_eq!(c.max_flow, 20);
        assert_eq!(c.guesses, vec![GuessKind::PhiPositive, GuessKind::Zero]);
        assert_eq!(c.to_json()["solver.guesses"], "phi,zero");
    }

    #[test]
    fn errors_name_the_key() {
        let mut c = RunConfig::default();
        assert_eq!(c.apply_text("epsilonn = 1").unwrap_err().key, "epsilonn");
        assert_eq!(c.apply_text("grid.n = many").unwrap_err().key, "grid.n");
        assert_eq!(c.apply_text("mu = lorentzian").unwrap_err().key, "mu");
        assert_eq!(c.apply_text("solver.guesses = phi,nope").unwrap_err().key, "solver.guesses");
        c.apply_text("chi = 1.5").unwrap();
        assert_eq!(c.model().unwrap_err().key, "chi");
    }

    #[test]
    fn file_paths_are_kept_verbatim() {
        let mut c = RunConfig::default();
        c.set("f", "file:tables/f.csv").unwrap();
        assert_eq!(c.f, FunctionSpec::File(PathBuf::from("tables/f.csv")));
        assert_eq!(c.to_json()["f"], "file:tables/f.csv");
    }

    #[test]
    fn coarse_grid_is_a_warning() {
        let mut c = RunConfig::default();
        c.set("grid.n", "101").unwrap();
        let p = c.model().unwrap();
        assert_eq!(c.warnings(&p).len(), 1);
    }
}
