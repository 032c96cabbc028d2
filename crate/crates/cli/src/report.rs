//! Report serialization: JSON mirrors the full record structure with a
//! fixed field order; CSV flattens to one row per check. Both are
//! byte-stable for a fixed configuration.

use serde::Serialize;
use std::io::Write;
use std::path::Path;

use robinfrac_core::verify::{CheckRecord, EnvironmentStamp, VerificationReport};

use crate::CliError;

#[derive(Serialize)]
struct ReportJson<'a> {
    scenario: &'a str,
    checks: Vec<CheckJson<'a>>,
    environment: EnvJson<'a>,
    pass: bool,
}

#[derive(Serialize)]
struct CheckJson<'a> {
    claim_id: &'a str,
    statement: &'a str,
    route: &'a str,
    value: f64,
    reference: f64,
    tolerance: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

#[derive(Serialize)]
struct EnvJson<'a> {
    domain_kind: &'a str,
    half_extents: &'a [f64],
    spacing: [f64; 2],
    interior_nodes: usize,
    modes: usize,
    cylinder_levels: usize,
    cylinder_grading: f64,
    cylinder_height: f64,
    s_values: &'a [f64],
}

fn to_json(report: &VerificationReport) -> ReportJson<'_> {
    ReportJson {
        scenario: &report.scenario,
        checks: report
            .checks
            .iter()
            .map(|c: &CheckRecord| CheckJson {
                claim_id: &c.claim_id,
                statement: &c.statement,
                route: &c.route,
                value: c.value,
                reference: c.reference,
                tolerance: c.tolerance,
                pass: c.pass,
                note: c.note.as_deref(),
            })
            .collect(),
        environment: env_json(&report.environment),
        pass: report.pass,
    }
}

fn env_json(e: &EnvironmentStamp) -> EnvJson<'_> {
    EnvJson {
        domain_kind: &e.domain_kind,
        half_extents: &e.half_extents,
        spacing: e.spacing,
        interior_nodes: e.interior_nodes,
        modes: e.modes,
        cylinder_levels: e.cylinder_levels,
        cylinder_grading: e.cylinder_grading,
        cylinder_height: e.cylinder_height,
        s_values: &e.s_values,
    }
}

pub fn write_json(report: &VerificationReport, path: &Path) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(&to_json(report))
        .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
    std::fs::write(path, json + "\n")
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn write_csv(report: &VerificationReport, path: &Path) -> Result<(), CliError> {
    let mut out = String::from("claim_id,route,value,tolerance,pass\n");
    for c in &report.checks {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.claim_id, c.route, c.value, c.tolerance, c.pass
        ));
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn print_summary(report: &VerificationReport, mut w: impl Write) -> std::io::Result<()> {
    for c in &report.checks {
        writeln!(
            w,
            "{} {} [{}] value={:.6e} reference={:.6e} tol={:.1e}{}",
            if c.pass { "PASS" } else { "FAIL" },
            c.claim_id,
            c.route,
            c.value,
            c.reference,
            c.tolerance,
            c.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
        )?;
    }
    writeln!(
        w,
        "scenario {}: {}",
        report.scenario,
        if report.pass { "PASS" } else { "FAIL" }
    )
}
