//! Verification CLI for the spectral fractional Laplacian Green/Robin
//! library: eigenbasis exports, Green and Robin field computations,
//! cylinder extensions, and the named verification scenarios.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 invalid
//! configuration or usage, 3 I/O error.

mod config;
mod exports;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use robinfrac_core::extension::{ExtRoute, ExtSource};
use robinfrac_core::robin::ScanTolerances;
use robinfrac_core::verify::ConfigError;
use robinfrac_core::{
    build_domain, eigenbasis, extend, green_lateral_flux, green_solve, lateral_flux, robin_value,
    run_scenario, symmetry_scan, Accuracy, Cylinder, DomainKind, DomainSpec, EigenBasis,
    FractionalParams, GreenRoute, QuadratureSpec, RobinRoute, ScenarioConfig, ScenarioKind,
    VerificationReport,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "robinfrac",
    about = "Green/Robin functions of the spectral fractional Laplacian and their non-degeneracy checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// JSON configuration file (scenario fields, lowercase snake_case).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Domain kind: interval, rectangle or ellipse.
    #[arg(long)]
    domain: Option<String>,
    /// Fractional order(s); repeatable.
    #[arg(long = "s", value_name = "S")]
    s: Vec<f64>,
    /// Eigenbasis mode count.
    #[arg(long)]
    modes: Option<usize>,
    /// Grid spacing.
    #[arg(long)]
    grid: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Report format for `verify`.
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    /// Evaluate independent s-values on separate threads (reports are
    /// merged in order; output is identical to the sequential run).
    #[arg(long)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the Dirichlet eigenbasis and export eigenvalues (and
    /// optionally eigenfunction node dumps).
    Eigen {
        #[command(flatten)]
        common: CommonArgs,
        /// Also dump the first N eigenfunctions as per-node CSV files.
        #[arg(long, default_value_t = 0)]
        dump_modes: usize,
    },
    /// Solve for the Green function field and export it.
    Green {
        #[command(flatten)]
        common: CommonArgs,
        /// Source point "x1,x2".
        #[arg(long, default_value = "0,0")]
        source: String,
        /// Route: "spectral" or "mollified:<rho>".
        #[arg(long, default_value = "spectral")]
        route: String,
    },
    /// Robin function values (heat and extrapolation routes) at the test
    /// points, plus an optional symmetry-plane scan export.
    Robin {
        #[command(flatten)]
        common: CommonArgs,
        /// Also run a symmetry-plane scan across this axis and export it.
        #[arg(long)]
        scan: Option<usize>,
    },
    /// Harmonic extension of the ground mode (or a Green source) to the
    /// cylinder; exports the field and its lateral flux.
    Extend {
        #[command(flatten)]
        common: CommonArgs,
        /// "phi1" or "green".
        #[arg(long, default_value = "phi1")]
        source: String,
        /// Source point for the green case, "x1,x2".
        #[arg(long, default_value = "0,0")]
        point: String,
        /// Keep every n-th y-level in the exports.
        #[arg(long, default_value_t = 8)]
        stride: usize,
    },
    /// Run a named verification scenario and emit its report.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// One of: theorem1, theorem2, lemma_symmetry, lemma_u1,
        /// lemma_grad_formula, extension_selftest. May also come from the
        /// config file's "scenario" key.
        scenario: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eigen { common, dump_modes } => cmd_eigen(&common, dump_modes),
        Command::Green {
            common,
            source,
            route,
        } => cmd_green(&common, &source, &route),
        Command::Robin { common, scan } => cmd_robin(&common, scan),
        Command::Extend {
            common,
            source,
            point,
            stride,
        } => cmd_extend(&common, &source, &point, stride),
        Command::Verify { common, scenario } => {
            return match cmd_verify(&common, scenario.as_deref()) {
                Ok(pass) => {
                    if pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => fail(e),
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        CliError::Config(_) => ExitCode::from(2),
        CliError::Io(_) => ExitCode::from(3),
    }
}

/// Build the scenario config shared by all subcommands (field commands use
/// its domain/modes/s parts).
fn setup(common: &CommonArgs, scenario: ScenarioKind) -> Result<ScenarioConfig, CliError> {
    let file = match &common.config {
        Some(path) => config::load_file(path)?,
        None => config::FileConfig::default(),
    };
    config::build_scenario_config(
        scenario,
        &file,
        &config::Overrides {
            domain: common.domain.clone(),
            s: common.s.clone(),
            modes: common.modes,
            grid: common.grid,
        },
    )
}

fn build_basis(spec: &DomainSpec, modes: usize) -> Result<EigenBasis, CliError> {
    let (domain, grid) = build_domain(spec).map_err(|e| CliError::Config(e.to_string()))?;
    eigenbasis(&domain, &grid, modes).map_err(|e| CliError::Config(e.to_string()))
}

fn ensure_out(dir: &PathBuf) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn single_s(cfg: &ScenarioConfig) -> f64 {
    cfg.s_values.first().copied().unwrap_or(0.5)
}

fn parse_point(text: &str) -> Result<[f64; 2], CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.is_empty() || parts.len() > 2 {
        return Err(CliError::Config(format!("invalid point '{text}'")));
    }
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| CliError::Config(format!("invalid coordinate '{s}': {e}")))
    };
    let x = parse(parts[0])?;
    let y = if parts.len() == 2 { parse(parts[1])? } else { 0.0 };
    Ok([x, y])
}

fn cmd_eigen(common: &CommonArgs, dump_modes: usize) -> Result<(), CliError> {
    let cfg = setup(common, ScenarioKind::ExtensionSelftest)?;
    let basis = build_basis(&cfg.domain, cfg.modes)?;
    ensure_out(&common.out)?;
    exports::eigenvalues_csv(&basis, &common.out.join("eigenvalues.csv"))?;
    for j in 0..dump_modes.min(basis.len()) {
        exports::eigenfunction_csv(&basis, j, &common.out.join(format!("phi_{}.csv", j + 1)))?;
    }
    println!(
        "wrote {} eigenvalues for the {} domain",
        basis.len(),
        cfg.domain.kind.name()
    );
    Ok(())
}

fn cmd_green(common: &CommonArgs, source: &str, route: &str) -> Result<(), CliError> {
    let cfg = setup(common, ScenarioKind::ExtensionSelftest)?;
    let s = single_s(&cfg);
    validate_order(&cfg, s)?;
    let basis = build_basis(&cfg.domain, cfg.modes)?;
    let t = parse_point(source)?;
    let route = parse_green_route(route)?;
    let field = green_solve(&basis, t, s, route).map_err(|e| CliError::Config(e.to_string()))?;
    ensure_out(&common.out)?;
    exports::green_csv(&basis, &field, &common.out.join("green.csv"))?;
    println!(
        "wrote green.csv ({} nodes, source ({}, {}), s = {s})",
        field.values.len(),
        t[0],
        t[1]
    );
    Ok(())
}

fn parse_green_route(text: &str) -> Result<GreenRoute, CliError> {
    if text == "spectral" {
        return Ok(GreenRoute::Spectral);
    }
    if let Some(rho) = text.strip_prefix("mollified:") {
        let rho: f64 = rho
            .parse()
            .map_err(|e| CliError::Config(format!("invalid mollifier radius: {e}")))?;
        return Ok(GreenRoute::Mollified(rho));
    }
    Err(CliError::Config(format!(
        "unknown green route '{text}' (use spectral or mollified:<rho>)"
    )))
}

fn validate_order(cfg: &ScenarioConfig, s: f64) -> Result<(), CliError> {
    FractionalParams::new(cfg.domain.kind.dim(), s)
        .map(|_| ())
        .map_err(|e| CliError::Config(e.to_string()))
}

fn cmd_robin(common: &CommonArgs, scan: Option<usize>) -> Result<(), CliError> {
    let cfg = setup(common, ScenarioKind::Theorem1)?;
    let basis = build_basis(&cfg.domain, cfg.modes)?;
    ensure_out(&common.out)?;
    let mut rows = Vec::new();
    for &s in &cfg.s_values {
        validate_order(&cfg, s)?;
        let params = FractionalParams::new(cfg.domain.kind.dim(), s)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let points = if cfg.points.is_empty() {
            vec![[0.0, 0.0]]
        } else {
            cfg.points.clone()
        };
        for &t in &points {
            let d = basis.domain().distance_to_boundary(t);
            let quad = QuadratureSpec::build(&basis, d, Accuracy::Best)
                .map_err(|e| CliError::Config(e.to_string()))?;
            rows.push(
                robin_value(&basis, t, s, &params, &quad, RobinRoute::Heat)
                    .map_err(|e| CliError::Config(e.to_string()))?,
            );
            // The near-diagonal ladder needs room and modes; when the mesh
            // cannot support it, keep the heat row and say so.
            match robin_value(&basis, t, s, &params, &quad, RobinRoute::Extrapolation) {
                Ok(v) => rows.push(v),
                Err(e) => eprintln!(
                    "note: extrapolation route skipped at ({}, {}): {e}",
                    t[0], t[1]
                ),
            }
        }
    }
    exports::robin_csv(&rows, &common.out.join("robin.csv"))?;
    println!("wrote robin.csv ({} rows)", rows.len());

    if let Some(axis) = scan {
        if axis >= cfg.domain.kind.dim() {
            return Err(CliError::Config(format!(
                "scan axis {axis} out of range for a {}-dimensional domain",
                cfg.domain.kind.dim()
            )));
        }
        let s = single_s(&cfg);
        let params = FractionalParams::new(cfg.domain.kind.dim(), s)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let cyl =
            Cylinder::new(&basis, &cfg.cylinder).map_err(|e| CliError::Config(e.to_string()))?;
        let points: Vec<[f64; 2]> = if cfg.domain.kind.dim() == 1 {
            vec![[0.0, 0.0]]
        } else {
            let other = 1 - axis;
            let b = basis.domain().half_extents[other];
            (-2..=2)
                .map(|k| {
                    let mut p = [0.0, 0.0];
                    p[other] = k as f64 * 0.127 * b;
                    p
                })
                .collect()
        };
        let tols = if cfg.domain.kind == DomainKind::Ellipse {
            ScanTolerances::numeric()
        } else {
            ScanTolerances::analytic()
        };
        let reports = symmetry_scan(&basis, s, &params, axis, &points, Some(&cyl), &tols)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let rows: Vec<exports::ScanRow> = reports
            .iter()
            .map(|r| exports::ScanRow {
                t: r.t,
                dr1_spec: r.grad_spectral[axis],
                dr1_fd: r.grad_fd[axis],
                dr1_bdy: r.grad_boundary.map(|g| g[axis]).unwrap_or(f64::NAN),
                h11: r.hess_spectral[axis][axis],
                h12: r.hess_spectral[0][1],
                h22: r.hess_spectral[1 - axis][1 - axis],
                alpha_pass: r.alpha > 0.0,
            })
            .collect();
        exports::scan_csv(&rows, &common.out.join("scan.csv"))?;
        println!("wrote scan.csv ({} points)", rows.len());
    }
    Ok(())
}

fn cmd_extend(
    common: &CommonArgs,
    source: &str,
    point: &str,
    stride: usize,
) -> Result<(), CliError> {
    let cfg = setup(common, ScenarioKind::ExtensionSelftest)?;
    let s = single_s(&cfg);
    validate_order(&cfg, s)?;
    let basis = build_basis(&cfg.domain, cfg.modes)?;
    let cyl = Cylinder::new(&basis, &cfg.cylinder).map_err(|e| CliError::Config(e.to_string()))?;
    ensure_out(&common.out)?;
    match source {
        "phi1" => {
            let field = extend(
                &basis,
                &ExtSource::Coeffs(vec![1.0]),
                s,
                &cyl,
                ExtRoute::Spectral,
            )
            .map_err(|e| CliError::Config(e.to_string()))?;
            exports::extension_csv(
                &basis,
                &field,
                &cyl,
                stride,
                &common.out.join("extension.csv"),
            )?;
            let flux =
                lateral_flux(&basis, &field, &cyl).map_err(|e| CliError::Config(e.to_string()))?;
            exports::flux_csv(&flux, &cyl, stride, &common.out.join("flux.csv"))?;
        }
        "green" => {
            let t = parse_point(point)?;
            let field = extend(&basis, &ExtSource::Green { t }, s, &cyl, ExtRoute::Spectral)
                .map_err(|e| CliError::Config(e.to_string()))?;
            exports::extension_csv(
                &basis,
                &field,
                &cyl,
                stride,
                &common.out.join("extension.csv"),
            )?;
            let flux = green_lateral_flux(&basis, t, s, &cyl)
                .map_err(|e| CliError::Config(e.to_string()))?;
            exports::flux_csv(&flux, &cyl, stride, &common.out.join("flux.csv"))?;
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown extension source '{other}' (use phi1 or green)"
            )))
        }
    }
    println!("wrote extension.csv and flux.csv");
    Ok(())
}

fn cmd_verify(common: &CommonArgs, scenario: Option<&str>) -> Result<bool, CliError> {
    let from_file = match &common.config {
        Some(path) => config::load_file(path)?.scenario,
        None => None,
    };
    let name = scenario
        .map(str::to_owned)
        .or(from_file)
        .ok_or_else(|| {
            CliError::Config("no scenario given (positional argument or config key)".to_owned())
        })?;
    let kind = ScenarioKind::parse(&name).ok_or_else(|| {
        CliError::Config(format!(
            "unknown scenario '{name}' (expected one of: {})",
            ScenarioKind::all()
                .iter()
                .map(|k| k.name())
                .collect::<Vec<_>>()
                .join(", ")
        ))
    })?;
    let cfg = setup(common, kind)?;
    let report = if common.parallel && cfg.s_values.len() > 1 {
        run_parallel(&cfg)?
    } else {
        run_scenario(&cfg)?
    };
    ensure_out(&common.out)?;
    let stem = format!("report_{}", report.scenario);
    match common.format.as_str() {
        "csv" => report::write_csv(&report, &common.out.join(format!("{stem}.csv")))?,
        _ => report::write_json(&report, &common.out.join(format!("{stem}.json")))?,
    }
    report::print_summary(&report, std::io::stdout().lock())
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(report.pass)
}

/// Evaluate independent s-values on separate threads and merge the checks
/// in the sequential order, so the report is identical to a serial run.
fn run_parallel(cfg: &ScenarioConfig) -> Result<VerificationReport, CliError> {
    let mut partials: Vec<Option<Result<VerificationReport, ConfigError>>> =
        (0..cfg.s_values.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for &s in &cfg.s_values {
            let mut sub = cfg.clone();
            sub.s_values = vec![s];
            handles.push(scope.spawn(move || run_scenario(&sub)));
        }
        for (slot, handle) in partials.iter_mut().zip(handles) {
            *slot = Some(handle.join().expect("scenario thread panicked"));
        }
    });
    let mut merged: Option<VerificationReport> = None;
    for slot in partials {
        let part = slot.unwrap().map_err(CliError::from)?;
        match &mut merged {
            None => merged = Some(part),
            Some(m) => {
                m.checks.extend(part.checks);
                m.pass &= part.pass;
            }
        }
    }
    let mut report = merged.expect("at least one s value");
    // The environment stamp lists every s value.
    report.environment.s_values = cfg.s_values.clone();
    Ok(report)
}
