//! JSON configuration (lowercase snake_case keys) and conversion into the
//! library's scenario configuration.

use serde::Deserialize;

use robinfrac_core::verify::ToleranceSet;
use robinfrac_core::{CylinderParams, DomainKind, DomainSpec, ScenarioConfig, ScenarioKind};

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<String>,
    pub domain: Option<DomainConfig>,
    pub s_values: Option<Vec<f64>>,
    pub modes: Option<usize>,
    pub cylinder: Option<CylinderConfig>,
    pub points: Option<Vec<[f64; 2]>>,
    pub tolerances: Option<ToleranceConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub kind: String,
    pub half_extents: Vec<f64>,
    pub spacing: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderConfig {
    #[serde(default)]
    pub y_max: Option<f64>,
    pub levels: usize,
    pub grading: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub analytic_identity: Option<f64>,
    pub fd_vs_spectral: Option<f64>,
    pub boundary_vs_spectral: Option<f64>,
    pub numeric_relative: Option<f64>,
}

pub fn parse_domain_kind(name: &str) -> Result<DomainKind, CliError> {
    match name {
        "interval" => Ok(DomainKind::Interval),
        "rectangle" | "square" => Ok(DomainKind::Rectangle),
        "ellipse" => Ok(DomainKind::Ellipse),
        other => Err(CliError::Config(format!(
            "unknown domain kind '{other}' (expected interval, rectangle or ellipse)"
        ))),
    }
}

/// Default geometry per domain kind when none is configured.
pub fn default_domain(kind: DomainKind) -> DomainSpec {
    use core::f64::consts::PI;
    match kind {
        DomainKind::Interval => DomainSpec {
            kind,
            half_extents: vec![PI / 2.0],
            spacing: PI / 64.0,
        },
        DomainKind::Rectangle => DomainSpec {
            kind,
            half_extents: vec![PI / 2.0, PI / 2.0],
            spacing: PI / 64.0,
        },
        DomainKind::Ellipse => DomainSpec {
            kind,
            half_extents: vec![1.0, 0.6],
            spacing: 0.025,
        },
    }
}

/// Merge file configuration and command-line overrides into a scenario
/// configuration.
pub struct Overrides {
    pub domain: Option<String>,
    pub s: Vec<f64>,
    pub modes: Option<usize>,
    pub grid: Option<f64>,
}

pub fn build_scenario_config(
    scenario: ScenarioKind,
    file: &FileConfig,
    over: &Overrides,
) -> Result<ScenarioConfig, CliError> {
    let kind = if let Some(name) = &over.domain {
        parse_domain_kind(name)?
    } else if let Some(d) = &file.domain {
        parse_domain_kind(&d.kind)?
    } else {
        DomainKind::Rectangle
    };
    let mut domain = match &file.domain {
        Some(d) if over.domain.is_none() || parse_domain_kind(&d.kind)? == kind => DomainSpec {
            kind,
            half_extents: d.half_extents.clone(),
            spacing: d.spacing,
        },
        _ => default_domain(kind),
    };
    if let Some(h) = over.grid {
        domain.spacing = h;
    }
    let mut cfg = ScenarioConfig::new(scenario, domain);
    if let Some(s) = &file.s_values {
        cfg.s_values = s.clone();
    }
    if !over.s.is_empty() {
        cfg.s_values = over.s.clone();
    }
    if let Some(m) = file.modes {
        cfg.modes = m;
    }
    if let Some(m) = over.modes {
        cfg.modes = m;
    }
    if let Some(c) = &file.cylinder {
        cfg.cylinder = CylinderParams {
            y_max: c.y_max,
            levels: c.levels,
            grading: c.grading,
        };
    }
    if let Some(p) = &file.points {
        cfg.points = p.clone();
    }
    if let Some(t) = &file.tolerances {
        let mut tols = ToleranceSet::default();
        if let Some(v) = t.analytic_identity {
            tols.analytic_identity = v;
        }
        if let Some(v) = t.fd_vs_spectral {
            tols.fd_vs_spectral = v;
        }
        if let Some(v) = t.boundary_vs_spectral {
            tols.boundary_vs_spectral = v;
        }
        if let Some(v) = t.numeric_relative {
            tols.numeric_relative = v;
        }
        cfg.tolerances = tols;
    }
    Ok(cfg)
}

pub fn load_file(path: &std::path::Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
}
