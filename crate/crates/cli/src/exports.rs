//! CSV exports for the field-producing subcommands.

use std::path::Path;

use robinfrac_core::extension::FluxField;
use robinfrac_core::{Cylinder, EigenBasis, ExtField, GreenField, RobinValue};

use crate::CliError;

fn write(path: &Path, contents: String) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn eigenvalues_csv(basis: &EigenBasis, path: &Path) -> Result<(), CliError> {
    let mut out = String::from("j,lambda_j\n");
    for (j, &lam) in basis.lambdas().iter().enumerate() {
        out.push_str(&format!("{},{}\n", j + 1, lam));
    }
    write(path, out)
}

pub fn eigenfunction_csv(basis: &EigenBasis, mode: usize, path: &Path) -> Result<(), CliError> {
    let grid = basis.grid();
    let mut out = String::from("node_index,x1,x2,phi\n");
    for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
        let p = grid.node(ix, iy);
        let phi = basis.values_at(p)[mode];
        out.push_str(&format!("{},{},{},{}\n", i, p[0], p[1], phi));
    }
    write(path, out)
}

pub fn green_csv(basis: &EigenBasis, field: &GreenField, path: &Path) -> Result<(), CliError> {
    let grid = basis.grid();
    let mut out = String::from("x1,x2,G\n");
    for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
        let p = grid.node(ix, iy);
        out.push_str(&format!("{},{},{}\n", p[0], p[1], field.values[i]));
    }
    write(path, out)
}

pub fn robin_csv(values: &[RobinValue], path: &Path) -> Result<(), CliError> {
    let mut out = String::from("t1,t2,R,route,err_est\n");
    for v in values {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            v.t[0],
            v.t[1],
            v.value,
            v.route.name(),
            v.err_est
        ));
    }
    write(path, out)
}

/// Symmetry-scan export, one row per scan point.
pub struct ScanRow {
    pub t: [f64; 2],
    pub dr1_spec: f64,
    pub dr1_fd: f64,
    pub dr1_bdy: f64,
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
    pub alpha_pass: bool,
}

pub fn scan_csv(rows: &[ScanRow], path: &Path) -> Result<(), CliError> {
    let mut out = String::from("t1,t2,dR1_spec,dR1_fd,dR1_bdy,H11,H12,H22,alpha_pass\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.t[0], r.t[1], r.dr1_spec, r.dr1_fd, r.dr1_bdy, r.h11, r.h12, r.h22, r.alpha_pass
        ));
    }
    write(path, out)
}

pub fn extension_csv(
    basis: &EigenBasis,
    field: &ExtField,
    cyl: &Cylinder,
    stride: usize,
    path: &Path,
) -> Result<(), CliError> {
    let grid = basis.grid();
    let stride = stride.max(1);
    let mut out = String::from("x1,x2,y,w\n");
    for k in (0..=field.levels).step_by(stride) {
        let y = cyl.y[k];
        for (i, &(ix, iy)) in grid.interior.iter().enumerate() {
            let p = grid.node(ix, iy);
            out.push_str(&format!("{},{},{},{}\n", p[0], p[1], y, field.value(k, i)));
        }
    }
    write(path, out)
}

pub fn flux_csv(flux: &FluxField, cyl: &Cylinder, stride: usize, path: &Path) -> Result<(), CliError> {
    let stride = stride.max(1);
    let mut out = String::from("face,index,y,flux\n");
    for k in (0..=flux.levels).step_by(stride) {
        let y = cyl.y[k];
        for (si, sample) in flux.samples.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                sample.face,
                si,
                y,
                flux.value(k, si)
            ));
        }
    }
    write(path, out)
}
