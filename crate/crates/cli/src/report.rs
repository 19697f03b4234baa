//! Report assembly and output.

use std::collections::BTreeMap;
use std::path::Path;

use loopmod_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::JobConfig;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

/// One row of a dimension table. `beta_coeffs` is `;`-joined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRow {
    pub beta_coeffs: String,
    pub n: i64,
    pub dim: usize,
}

impl DimRow {
    pub fn new(beta: &[i64], n: i64, dim: usize) -> Self {
        let beta_coeffs = beta.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";");
        Self { beta_coeffs, n, dim }
    }
}

/// What a task produces before it is wrapped into a report.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub checks: Vec<CheckRecord>,
    pub tables: BTreeMap<String, Vec<DimRow>>,
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument(_) => "InvalidArgument",
        Error::TruncationOverflow(_) => "TruncationOverflow",
        Error::LevelZero(_) => "LevelZero",
        Error::NotAdmissible(_) => "NotAdmissible",
        Error::NotDiagonal(_) => "NotDiagonal",
        Error::ProbeInconclusive(_) => "ProbeInconclusive",
        Error::CheckFailed(_) => "CheckFailed",
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::InvalidArgument(_) | Error::LevelZero(_))
}

impl Outcome {
    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("results serialize");
        self.results.insert(key.to_string(), v);
    }

    /// Runs a check. Mathematical failures are recorded; usage errors abort
    /// the job.
    pub fn check(&mut self, name: &str, f: impl FnOnce() -> loopmod_core::Result<usize>) -> loopmod_core::Result<()> {
        let rec = match f() {
            Ok(count) => CheckRecord { name: name.into(), passed: true, count: Some(count), error_kind: None, witness: None },
            Err(e) if is_usage(&e) => return Err(e),
            Err(e) => CheckRecord {
                name: name.into(),
                passed: false,
                count: None,
                error_kind: Some(error_kind(&e).into()),
                witness: Some(e.to_string()),
            },
        };
        self.checks.push(rec);
        Ok(())
    }

    /// Records a boolean condition as a check.
    pub fn expect(&mut self, name: &str, ok: bool, witness: impl FnOnce() -> String) -> loopmod_core::Result<()> {
        self.check(name, || if ok { Ok(1) } else { Err(Error::CheckFailed(witness())) })
    }

    pub fn table(&mut self, name: &str, rows: Vec<DimRow>) {
        self.tables.insert(name.to_string(), rows);
    }

    pub fn exit_code(&self) -> i32 {
        let failed: Vec<&CheckRecord> = self.checks.iter().filter(|c| !c.passed).collect();
        if failed.iter().any(|c| c.error_kind.as_deref() != Some("TruncationOverflow")) {
            1
        } else if failed.is_empty() {
            0
        } else {
            3
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub task: String,
    pub status: String,
    pub exit_code: i32,
    pub seed: u64,
    pub config: JobConfig,
    pub conventions: BTreeMap<&'static str, &'static str>,
    pub results: Map<String, Value>,
    pub checks: Vec<CheckRecord>,
    pub tables: BTreeMap<String, Vec<DimRow>>,
    /// Seconds since the Unix epoch. Excluded from determinism comparisons.
    pub generated_at: String,
}

pub fn conventions() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("scalars", "exact rationals, serialized as \"p/q\" strings"),
        ("heisenberg_bracket", "[e_i, e_-i] = sign(i) c; [x(k,i), x(-k,j)] = delta_ij k c"),
        ("phi_split", "for phi(k) = +: x(k,i) kills v, x(-k,i) creates; reversed for phi(k) = -"),
        ("sigma_shift", "sigma_i^e: c_i -> c_i + e a"),
        ("realization_basis", "signed exponents: p > 0 is R^p v, p < 0 is L^|p| v; T = R L (L first) acts by theta - p kappa a"),
        ("loop_form", "(x t^m, y t^n) bracket adds m delta_{m+n,0} tr(xy) c; [d, g] = deg(g) g"),
        ("loop_imaginary_basis", "x(k,i) = h_i t^k for k > 0, h_i^* t^k for k < 0 with h^* dual under tr"),
        ("pbw_order", "imaginary factors before real; reals by (height, beta lex, power); rightmost factor acts first"),
        ("probe_degree", "at head (beta, n) the probe applies the root vector of (beta, -m), degree k = n - m"),
        ("weight", "lambda - beta + n delta, stored as (beta in simple-root coordinates, n)"),
    ])
}

impl Report {
    pub fn new(cfg: &JobConfig, out: Outcome) -> Self {
        let exit_code = out.exit_code();
        let status = match exit_code {
            0 => "pass",
            3 => "truncation-overflow",
            _ => "fail",
        };
        let generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_default();
        Report {
            task: cfg.task.name().into(),
            status: status.into(),
            exit_code,
            seed: cfg.seed,
            config: cfg.clone(),
            conventions: conventions(),
            results: out.results,
            checks: out.checks,
            tables: out.tables,
            generated_at,
        }
    }

    pub fn write_json(&self, dir: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        std::fs::write(dir.join("report.json"), text)
    }

    /// One CSV file per table, named `<table>.csv`.
    pub fn write_csv(&self, dir: &Path) -> std::io::Result<Vec<String>> {
        let mut written = Vec::new();
        for (name, rows) in &self.tables {
            let file = format!("{name}.csv");
            let mut w = csv::Writer::from_path(dir.join(&file))?;
            if rows.is_empty() {
                w.write_record(["beta_coeffs", "n", "dim"])?;
            }
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
            written.push(file);
        }
        Ok(written)
    }
}
