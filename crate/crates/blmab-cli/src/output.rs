//! Deterministic artifacts: the manifest hash, the fixed CSV schema, and
//! the JSON run summary.
//!
//! The manifest hash covers the command name and the effective settings
//! echo only. Runtime knobs (thread count, output paths) and the timestamp
//! stay outside it, so equal hashes really do promise equal CSV bodies.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use blmab::analysis::FitReport;
use blmab::engine::{BoundAudit, RegretPoint};
use blmab::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CSV_HEADER: &str = "policy,tail,param,c,T,n_instances,n_sub,mean_regret,std_err,seed";

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

pub fn manifest_hash(command: &str, echo: &BTreeMap<String, String>) -> String {
    let mut canonical = format!("command={command}\n");
    for (key, value) in echo {
        let _ = writeln!(canonical, "{key}={value}");
    }
    sha256_hex(canonical.as_bytes())
}

/// One block of CSV rows sharing a policy and arrival law.
pub struct CsvGroup {
    pub policy: &'static str,
    pub tail: &'static str,
    pub param: Option<f64>,
    pub c: Option<f64>,
    pub n_subinstances: u32,
    pub seed: u64,
    pub points: Vec<RegretPoint>,
}

/// Renders the manifest comment, the fixed header, and one row per point.
/// Floats print in Rust's shortest round-trip form.
pub fn render_csv(manifest: &str, groups: &[CsvGroup]) -> String {
    let mut out = format!("# manifest {manifest}\n{CSV_HEADER}\n");
    for group in groups {
        let param = group.param.map(|p| p.to_string()).unwrap_or_default();
        let c = group.c.map(|c| c.to_string()).unwrap_or_default();
        for point in &group.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                group.policy,
                group.tail,
                param,
                c,
                point.horizon,
                point.n_instances,
                group.n_subinstances,
                point.mean_regret,
                point.std_error,
                group.seed,
            );
        }
    }
    out
}

#[derive(Serialize)]
pub struct GroupSummary {
    pub policy: &'static str,
    pub tail: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_override: Option<f64>,
    pub points: Vec<RegretPoint>,
    /// Absent when the curve cannot be fitted (single point, zero regret);
    /// `fit_error` then says why.
    pub fit: Option<FitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<BoundAudit>>,
}

#[derive(Serialize)]
pub struct RunSummary {
    pub version: &'static str,
    pub command: &'static str,
    pub manifest: String,
    pub timestamp_unix: u64,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub groups: Vec<GroupSummary>,
    pub csv_sha256: String,
}

pub fn unix_timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// With an output directory: writes `<command>.csv` and `<command>.json`.
/// Without one: prints the CSV to standard output and skips the JSON.
pub fn write_run_outputs(
    out: Option<&Path>,
    command: &str,
    csv: &str,
    summary: &RunSummary,
) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let csv_path = dir.join(format!("{command}.csv"));
            let json_path = dir.join(format!("{command}.json"));
            fs::write(&csv_path, csv)?;
            let mut json = serde_json::to_string_pretty(summary).expect("summary serializes");
            json.push('\n');
            fs::write(&json_path, json)?;
            eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

/// JSON report to a file, or to standard output when no path is given.
pub fn write_json_report(out: Option<&Path>, report: &impl Serialize) -> Result<()> {
    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    match out {
        Some(path) => {
            fs::write(path, json)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{json}"),
    }
    Ok(())
}
