use std::path::Path;

use adjzeta::checks::{CheckConfig, CheckResult};
use serde_json::{json, Value};

pub struct Report {
    pub command: String,
    pub config: CheckConfig,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    /// serde_json maps are BTreeMaps, so keys come out sorted at every level.
    pub fn to_value(&self) -> Value {
        json!({
            "tool": "adjzeta",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "checks": self.checks,
            "pass": self.pass(),
        })
    }

    pub fn write(&self, path: Option<&Path>) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(&self.to_value())? + "\n";
        match path {
            Some(p) => std::fs::write(p, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    pub fn summary(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {:<18} {:>8.2}s  {}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.id,
                    c.seconds,
                    c.anchor
                )
            })
            .collect()
    }
}
