//! Run manifest: what was run, with which resolved inputs, and what it wrote.

use std::path::PathBuf;

use serde_json::{json, Value};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Minimize,
    Sweep,
    Painleve,
    Thresholds,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Minimize => "minimize",
            Command::Sweep => "sweep",
            Command::Painleve => "painleve",
            Command::Thresholds => "thresholds",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: Command,
    pub config_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// False when a solver stopped without converging; artifacts are partial.
    pub converged: bool,
    /// Fully resolved inputs after defaults, config file and flags.
    pub parameters: Value,
    pub warnings: Vec<String>,
}

impl RunManifest {
    /// JSON form. `artifacts` lists every file of the run, the manifest
    /// itself included.
    pub fn to_json(&self, artifacts: &[String]) -> Value {
        let mut files: Vec<&str> = artifacts.iter().map(String::as_str).collect();
        if !files.contains(&MANIFEST_FILE) {
            files.push(MANIFEST_FILE);
        }
        json!({
            "command": self.command.name(),
            "config_path": self.config_path.as_ref().map(|p| p.display().to_string()),
            "out_dir": self.out_dir.display().to_string(),
            "seed": self.seed,
            "converged": self.converged,
            "parameters": self.parameters,
            "warnings": self.warnings,
            "artifacts": files,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_itself() {
        let m = RunManifest {
            command: Command::Sweep,
            config_path: None,
            out_dir: PathBuf::from("runs/s"),
            seed: 7,
            converged: true,
            parameters: json!({}),
            warnings: vec![],
        };
        let v = m.to_json(&["sweep.csv".to_string()]);
        assert_eq!(v["artifacts"], json!(["sweep.csv", "manifest.json"]));
        assert_eq!(v["command"], "sweep");
        assert_eq!(v["config_path"], Value::Null);
    }
}
