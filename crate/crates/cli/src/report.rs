use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

/// Machine-readable summary of one run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub cost: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub wall_millis: u128,
    pub outputs: BTreeMap<String, PathBuf>,
    pub config: Value,
    pub extra: Map<String, Value>,
}

impl RunReport {
    pub fn new(command: &'static str, seed: Option<u64>, config: Value) -> Self {
        Self {
            command,
            seed,
            cost: None,
            iterations: 0,
            converged: true,
            wall_millis: 0,
            outputs: BTreeMap::new(),
            config,
            extra: Map::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.extra.insert(key.to_string(), value.into());
    }

    pub fn finish(&mut self, started: Instant) {
        self.wall_millis = started.elapsed().as_millis();
    }

    pub fn to_json(&self) -> Value {
        let outputs: Map<String, Value> = self
            .outputs
            .iter()
            .map(|(k, p)| (k.clone(), json!(p.display().to_string())))
            .collect();
        let mut v = json!({
            "command": self.command,
            "seed": self.seed,
            "cost": self.cost,
            "iterations": self.iterations,
            "converged": self.converged,
            "wallMillis": self.wall_millis as u64,
            "outputs": outputs,
            "config": self.config,
        });
        let obj = v.as_object_mut().expect("object literal");
        for (k, val) in &self.extra {
            obj.insert(k.clone(), val.clone());
        }
        v
    }

    pub fn write(&mut self, dir: &Path) -> CliResult<()> {
        let path = dir.join("report.json");
        self.outputs.insert("report".into(), path.clone());
        let text = serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
    }
}
