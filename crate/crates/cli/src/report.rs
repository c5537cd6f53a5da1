//! `report.json` and `report.csv`. Both are deterministic for a fixed scene
//! and seed: keys are sorted and no timings are recorded.

use std::path::{Path, PathBuf};

use cloudcover::check::Check;
use serde::Serialize;
use serde_json::Value;

use crate::tasks::TaskOutcome;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<String>,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        Self { name: c.name.clone(), passed: c.passed, detail: c.detail.clone(), witness: c.witness.clone() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskRecord {
    pub index: usize,
    pub kind: String,
    pub task: String,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    pub outputs: Value,
}

impl TaskRecord {
    pub fn new(index: usize, kind: &str, echo: String, outcome: &TaskOutcome) -> Self {
        Self {
            index,
            kind: kind.to_string(),
            task: echo,
            passed: outcome.passed(),
            checks: outcome.checks.iter().map(CheckRecord::from).collect(),
            outputs: outcome.outputs.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub scene: String,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub passed: bool,
    pub tasks: Vec<TaskRecord>,
}

impl Report {
    pub fn new(command: &str, scene: String, seed: Option<u64>, samples: Option<usize>, tasks: Vec<TaskRecord>) -> Self {
        let passed = tasks.iter().all(|t| t.passed);
        Self { schema_version: SCHEMA_VERSION, command: command.to_string(), scene, seed, samples, passed, tasks }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> csv::Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            task: usize,
            kind: &'a str,
            check: &'a str,
            passed: bool,
            detail: &'a str,
            witness: &'a str,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for t in &self.tasks {
            for c in &t.checks {
                w.serialize(Row {
                    task: t.index,
                    kind: &t.kind,
                    check: &c.name,
                    passed: c.passed,
                    detail: &c.detail,
                    witness: c.witness.as_deref().unwrap_or(""),
                })?;
            }
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
    }

    /// Writes both files into `dir` and returns their paths.
    pub fn write(&self, dir: &Path) -> anyhow::Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join("report.json");
        let csv = dir.join("report.csv");
        std::fs::write(&json, self.to_json())?;
        std::fs::write(&csv, self.to_csv()?)?;
        Ok((json, csv))
    }
}
