use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Format, Mode, PotentialSpec};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "s,value,lp_distance,vnorm,iterations,wall_time_ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub s: f64,
    /// `λ^s`, `c_s` or `J_{s,p}(u_h)` depending on the mode.
    pub value: f64,
    /// `‖u_s - u_1‖_p`.
    pub lp_distance: f64,
    pub vnorm: f64,
    pub iterations: usize,
    /// Zero unless timing is enabled.
    pub wall_time_ms: f64,
}

/// Per-`s` quantities of the gamma checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRecord {
    pub s: f64,
    /// `|J_{s,p}(u) - J_{1,p}(u)|`.
    pub energy_gap: f64,
    /// `|⟨(-Δ_p)^s u, v⟩ - ⟨-Δ_p u, v⟩|`.
    pub pairing_gap: f64,
    /// Same with `v = u`.
    pub self_pairing_gap: f64,
    /// `|J(u + t v) - J(u) - t ⟨J'(u), v⟩|` for each `t`.
    pub development_defects: Vec<f64>,
    /// Least-squares slope of `log defect` against `log t`.
    pub development_exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub mode: Mode,
    pub a: f64,
    pub b: f64,
    pub num_elements: usize,
    pub p: f64,
    /// Nonlinearity exponent, ground-state runs only.
    pub q: Option<f64>,
    pub potential: PotentialSpec,
    /// One record per grid point, increasing in `s`.
    pub records: Vec<SweepRecord>,
    /// The `s = 1` record.
    pub reference: SweepRecord,
    /// `e_{j+1} / e_j` with `e_j = |value_j - reference.value|`; `None` when `e_j = 0`.
    pub error_ratios: Vec<Option<f64>>,
    /// The same for `lp_distance`.
    pub distance_ratios: Vec<Option<f64>>,
    /// Gamma-check runs only.
    pub gamma: Vec<GammaRecord>,
    pub checks: Vec<Check>,
}

pub(crate) fn successive_ratios(errors: &[f64]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| if w[0] > 0.0 { Some(w[1] / w[0]) } else { None })
        .collect()
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Records followed by the reference.
    pub fn rows(&self) -> impl Iterator<Item = &SweepRecord> {
        self.records.iter().chain(std::iter::once(&self.reference))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in self.rows() {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
                r.s, r.value, r.lp_distance, r.vnorm, r.iterations, r.wall_time_ms
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes the report to `path`.
pub fn emit_report(report: &SweepReport, format: Format, path: &Path) -> Result<()> {
    std::fs::write(path, report.render(format)?).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
