//! Report envelopes: every run emits its resolved configuration together
//! with the result, in JSON or CSV, atomically when writing to a file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use pairform::integrate::ConvergenceReport;
use pairform::stochastic::MonteCarloReport;

/// The resolved run configuration echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub options: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new(subcommand: &str) -> Self {
        RunConfig {
            subcommand: subcommand.to_string(),
            options: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: &dyn std::fmt::Display) -> Self {
        self.options.insert(key.to_string(), value.to_string());
        self
    }
}

/// A finished report: JSON value plus a CSV rendering of the same data.
pub struct Report {
    config: RunConfig,
    result: serde_json::Value,
    csv: String,
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report values are plain data")
}

/// Key-value CSV for scalar-ish results.
fn key_value_csv(value: &serde_json::Value) -> String {
    let mut out = String::from("key,value\n");
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            out.push_str(&format!("{k},{v}\n"));
        }
    } else {
        out.push_str(&format!("value,{value}\n"));
    }
    out
}

impl Report {
    /// Generic report: key-value CSV.
    pub fn json<T: Serialize>(config: RunConfig, result: T) -> Self {
        let value = to_value(&result);
        let csv = key_value_csv(&value);
        Report {
            config,
            result: value,
            csv,
        }
    }

    pub fn chi(config: RunConfig, chi: i64) -> Self {
        let value = serde_json::json!({ "chi": chi });
        let csv = format!("key,value\nchi,{chi}\n");
        Report {
            config,
            result: value,
            csv,
        }
    }

    pub fn convergence(config: RunConfig, report: ConvergenceReport) -> Self {
        let csv = report.to_csv();
        Report {
            config,
            result: to_value(&report),
            csv,
        }
    }

    pub fn monte_carlo(config: RunConfig, report: MonteCarloReport) -> Self {
        let mut csv = String::from("grid_size,mean,l2_diff\n");
        for i in 0..report.grid_sizes.len() {
            csv.push_str(&format!(
                "{},{},{}\n",
                report.grid_sizes[i], report.means[i], report.l2_diffs[i]
            ));
        }
        Report {
            config,
            result: to_value(&report),
            csv,
        }
    }

    pub fn gauss_bonnet<T: Serialize>(config: RunConfig, result: T) -> Self {
        let value = to_value(&result);
        let mut csv = String::from("level,mesh_size,n_simplices,sum\n");
        if let Some(levels) = value.get("levels").and_then(|l| l.as_array()) {
            for (i, l) in levels.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    i, l["mesh_size"], l["n_simplices"], l["sum"]
                ));
            }
        }
        Report {
            config,
            result: value,
            csv,
        }
    }

    pub fn lattice<T: Serialize>(config: RunConfig, result: T) -> Self {
        let value = to_value(&result);
        let mut csv = String::from("x,value\n");
        if let (Some(xmin), Some(dx), Some(values)) = (
            value.get("xmin").and_then(|v| v.as_f64()),
            value.get("dx").and_then(|v| v.as_f64()),
            value.get("values").and_then(|v| v.as_array()),
        ) {
            for (i, v) in values.iter().enumerate() {
                csv.push_str(&format!("{},{}\n", xmin + i as f64 * dx, v));
            }
        }
        Report {
            config,
            result: value,
            csv,
        }
    }

    /// Renders and writes the report. Files are written via a temporary
    /// sibling and an atomic rename.
    pub fn emit(&self, format: &str, output: Option<&Path>) -> Result<(), String> {
        let text = match format {
            "json" => {
                let envelope = serde_json::json!({
                    "config": to_value(&self.config),
                    "result": self.result,
                });
                let mut s = serde_json::to_string_pretty(&envelope).map_err(|e| e.to_string())?;
                s.push('\n');
                s
            }
            "csv" => {
                let mut s = String::new();
                s.push_str(&format!("# subcommand,{}\n", self.config.subcommand));
                for (k, v) in &self.config.options {
                    s.push_str(&format!("# {k},{v}\n"));
                }
                s.push_str(&self.csv);
                s
            }
            other => return Err(format!("unknown format '{other}'")),
        };
        match output {
            None => {
                print!("{text}");
                Ok(())
            }
            Some(path) => {
                let tmp = path.with_extension("tmp");
                std::fs::write(&tmp, &text).map_err(|e| e.to_string())?;
                std::fs::rename(&tmp, path).map_err(|e| e.to_string())?;
                Ok(())
            }
        }
    }
}
