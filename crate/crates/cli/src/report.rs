use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use conormal_core::varieties::{EmbeddedVariety, VarietySpec};

use crate::RunConfig;

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub records: Vec<Record>,
    /// Per-criterion checks, present for `catalog` runs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub suite: Option<serde_json::Value>,
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: "conormal".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            records: Vec::new(),
            suite: None,
            exit_code: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dim {
    pub quantity: String,
    pub degree: Option<i64>,
    pub value: usize,
}

/// Results for one instance. Dimensions, verdicts and flags are
/// deterministic functions of the configuration; timings are not.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub label: String,
    pub constructor: String,
    pub parameters: serde_json::Value,
    /// The seed the instance was built with, after any retries.
    pub seed: u64,
    pub primes: Vec<u64>,
    pub dims: Vec<Dim>,
    pub verdicts: BTreeMap<String, String>,
    pub flags: Vec<String>,
    pub timings_ms: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub details: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl Record {
    pub fn for_spec(spec: &VarietySpec) -> Self {
        Record {
            label: spec.label.clone(),
            constructor: spec.constructor.name().into(),
            parameters: serde_json::to_value(&spec.constructor).unwrap_or(serde_json::Value::Null),
            seed: spec.seed,
            primes: Vec::new(),
            dims: Vec::new(),
            verdicts: BTreeMap::new(),
            flags: Vec::new(),
            timings_ms: BTreeMap::new(),
            details: None,
            error: None,
        }
    }

    pub fn for_variety(x: &EmbeddedVariety) -> Self {
        let mut r = Self::for_spec(x.spec());
        r.primes.push(x.field().p());
        r
    }

    pub fn dim(&mut self, quantity: &str, degree: Option<i64>, value: usize) {
        self.dims.push(Dim { quantity: quantity.into(), degree, value });
    }

    pub fn get(&self, quantity: &str, degree: Option<i64>) -> Option<usize> {
        self.dims.iter().find(|d| d.quantity == quantity && d.degree == degree).map(|d| d.value)
    }

    pub fn verdict(&mut self, name: &str, value: impl ToString) {
        self.verdicts.insert(name.into(), value.to_string());
    }

    pub fn flag(&mut self, flag: &str) {
        if !self.flags.iter().any(|f| f == flag) {
            self.flags.push(flag.into());
            self.flags.sort();
        }
    }

    pub fn prime(&mut self, p: u64) {
        if !self.primes.contains(&p) {
            self.primes.push(p);
        }
    }

    pub fn time(&mut self, name: &str, since: Instant) {
        self.timings_ms.insert(name.into(), since.elapsed().as_millis() as u64);
    }

    /// Everything except timings, for reproducibility comparisons.
    pub fn deterministic_view(&self) -> Record {
        Record { timings_ms: BTreeMap::new(), ..self.clone() }
    }
}
