//! The JSON run configuration and `--override key=value` handling.

use crate::error::CliError;
use adaptive_hermite::collision::{KernelSpec, QuadOrders};
use adaptive_hermite::solver::{Scenario, SolverConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    /// Collision kernel; the scenario's default when absent.
    pub kernel: Option<KernelSpec>,
    pub solver: SolverConfig,
    /// Tensor quadrature orders; the exact minimum for `solver.n0` when
    /// absent.
    pub quadrature: Option<QuadOrders>,
    pub cache_dir: PathBuf,
    /// Whether `run` may assemble a missing tensor.
    pub allow_precompute: bool,
    pub out_dir: PathBuf,
    /// Worker threads; rayon's default when absent.
    pub threads: Option<usize>,
    /// Seed for randomised checks. The solver itself is deterministic.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: Scenario::by_name("bkw").expect("bkw is a known scenario"),
            kernel: None,
            solver: SolverConfig::default(),
            quadrature: None,
            cache_dir: PathBuf::from("tensors"),
            allow_precompute: true,
            out_dir: PathBuf::from("runs/latest"),
            threads: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn kernel(&self) -> KernelSpec {
        self.kernel.unwrap_or_else(|| self.scenario.kernel())
    }

    pub fn quadrature(&self) -> QuadOrders {
        self.quadrature.unwrap_or_else(|| QuadOrders::exact_for(self.solver.n0))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serialises")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let lib = |e: adaptive_hermite::Error| CliError::Config(e.to_string());
        self.solver.validate().map_err(lib)?;
        self.scenario.validate().map_err(lib)?;
        self.kernel().validate().map_err(lib)?;
        self.quadrature().check(self.solver.n0).map_err(lib)?;
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        for (name, dir) in [("cache_dir", &self.cache_dir), ("out_dir", &self.out_dir)] {
            if dir.as_os_str().is_empty() {
                return Err(CliError::Config(format!("{name} is empty")));
            }
            if dir.exists() && !dir.is_dir() {
                return Err(CliError::Config(format!("{name} {} is not a directory", dir.display())));
            }
        }
        Ok(())
    }

    /// Applies `key=value` overrides. Keys are dot paths into the JSON form;
    /// values are parsed as JSON and fall back to plain strings. Setting
    /// `scenario` or `scenario.name` selects a scenario with its default
    /// parameters.
    pub fn apply_overrides(&self, overrides: &[String]) -> Result<Self, CliError> {
        let mut doc = serde_json::to_value(self).expect("configuration serialises");
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("override {item:?} is not of the form key=value")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(CliError::Config(format!("override {item:?} has an empty key")));
            }
            let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            if key == "scenario" || key == "scenario.name" {
                let name = value
                    .as_str()
                    .ok_or_else(|| CliError::Config(format!("scenario name must be a string, got {raw}")))?;
                let s = Scenario::by_name(name).map_err(|e| CliError::Config(e.to_string()))?;
                doc["scenario"] = serde_json::to_value(s).expect("scenario serialises");
                continue;
            }
            set_path(&mut doc, key, value);
        }
        serde_json::from_value(doc).map_err(|e| CliError::Config(format!("after overrides: {e}")))
    }
}

fn set_path(doc: &mut Value, key: &str, value: Value) {
    let mut node = doc;
    for part in key.split('.') {
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        node = node.as_object_mut().expect("just made an object").entry(part).or_insert(Value::Null);
    }
    *node = value;
}
