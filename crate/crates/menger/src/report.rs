//! Machine-readable run reports: a deterministic JSON document plus flat
//! CSV renderings of claim tables and density profiles.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::tangent::DensityProfile;

/// Outcome of one verified claim.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClaimRecord {
    /// Stable identifier, e.g. `"circumradius-forms"`.
    pub id: String,
    pub description: String,
    /// Closed-form reference value or bound, when one exists.
    pub reference_value: Option<f64>,
    pub computed: f64,
    pub error_bound: f64,
    pub pass: bool,
    pub diverged: bool,
    pub runtime_ms: u64,
}

/// A full run report. Field order is fixed and maps are sorted, so the JSON
/// output is byte-deterministic for a given run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    /// Echo of the effective configuration (sorted by key).
    pub config: BTreeMap<String, String>,
    pub records: Vec<ClaimRecord>,
}

impl Report {
    pub fn new(config: BTreeMap<String, String>) -> Self {
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: ClaimRecord) {
        self.records.push(record);
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn any_diverged(&self) -> bool {
        self.records.iter().any(|r| r.diverged)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One CSV row per claim.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "id,description,reference_value,computed,error_bound,pass,diverged,runtime_ms\n",
        );
        for r in &self.records {
            let reference = r
                .reference_value
                .map(|v| format!("{v:.17e}"))
                .unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{:.17e},{:.17e},{},{},{}",
                csv_field(&r.id),
                csv_field(&r.description),
                reference,
                r.computed,
                r.error_bound,
                r.pass,
                r.diverged,
                r.runtime_ms
            )
            .expect("write to string");
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// CSV rendering of a density profile: one row per probe radius with the
/// exact dyadic radius split into mantissa and binary exponent.
pub fn density_profile_csv(profile: &DensityProfile) -> String {
    let mut out =
        String::from("r_exp2,r_mantissa,measure_ratio,best_direction_angle,best_out_ratio\n");
    for e in &profile.entries {
        writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e},{:.17e}",
            e.r_exp2, e.r_mantissa, e.measure_ratio, e.best_direction_angle, e.best_out_ratio
        )
        .expect("write to string");
    }
    out
}
