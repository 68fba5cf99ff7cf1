//! Deterministic CSV emission: UTF-8, header row, 17-significant-digit
//! float rendering, byte-identical across runs with identical configs.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{ConvergenceTable, TimeSeries};
use crate::stability::StabilityReport;

/// Render a float with 17 significant digits, enough to round-trip f64
/// exactly through the loader.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Trajectory table: t, r, u, γ, energies, and the oracle error when bound.
/// Optional columns appear only when the series carries them.
pub fn emit_trajectory_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("t,rx,ry,rz,ux,uy,uz,gamma,kinetic_energy");
    if series.has_potential {
        out.push_str(",potential_energy");
    }
    out.push_str(",total_energy");
    if series.has_oracle {
        out.push_str(",error_vs_oracle");
    }
    out.push('\n');
    for s in &series.samples {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt(s.t),
            fmt(s.r.x),
            fmt(s.r.y),
            fmt(s.r.z),
            fmt(s.u.x),
            fmt(s.u.y),
            fmt(s.u.z),
            fmt(s.gamma),
            fmt(s.kinetic_energy),
        );
        if series.has_potential {
            let _ = write!(out, ",{}", fmt(s.potential_energy.unwrap_or(0.0)));
        }
        let _ = write!(out, ",{}", fmt(s.total_energy));
        if series.has_oracle {
            let _ = write!(out, ",{}", fmt(s.error_vs_oracle.unwrap_or(0.0)));
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Energy history table.
pub fn emit_energy_csv(series: &TimeSeries, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str("t,gamma,kinetic_energy");
    if series.has_potential {
        out.push_str(",potential_energy");
    }
    out.push_str(",total_energy\n");
    for s in &series.samples {
        let _ = write!(
            out,
            "{},{},{}",
            fmt(s.t),
            fmt(s.gamma),
            fmt(s.kinetic_energy)
        );
        if series.has_potential {
            let _ = write!(out, ",{}", fmt(s.potential_energy.unwrap_or(0.0)));
        }
        let _ = write!(out, ",{}", fmt(s.total_energy));
        out.push('\n');
    }
    write_file(path, &out)
}

/// Convergence table; the fitted slope and floor repeat on every row so the
/// file is self-contained.
pub fn emit_convergence_csv(table: &ConvergenceTable, path: &Path) -> Result<()> {
    let mut out = String::from("dt,error,in_fit_window,fitted_slope,floor\n");
    let slope = table.fitted_slope.unwrap_or(f64::NAN);
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt(row.dt),
            fmt(row.error),
            u8::from(row.in_fit_window),
            fmt(slope),
            fmt(table.floor),
        );
    }
    write_file(path, &out)
}

/// Stability table: one row per eigenvalue or characteristic root.
pub fn emit_stability_csv(reports: &[StabilityReport], path: &Path) -> Result<()> {
    let mut out = String::from("method,omega_x,omega_y,omega_z,set,kind,re,im,magnitude\n");
    for report in reports {
        let w = report.omega;
        for (i, l) in report.eigenvalues.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},eigenvalue,{},{},{}",
                report.method.label(),
                fmt(w.x),
                fmt(w.y),
                fmt(w.z),
                i,
                fmt(l.re),
                fmt(l.im),
                fmt(l.norm()),
            );
        }
        for (i, set) in report.root_sets.iter().enumerate() {
            for z in &set.roots {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},root,{},{},{}",
                    report.method.label(),
                    fmt(w.x),
                    fmt(w.y),
                    fmt(w.z),
                    i,
                    fmt(z.re),
                    fmt(z.im),
                    fmt(z.norm()),
                );
            }
        }
    }
    write_file(path, &out)
}

/// Parse a CSV written by any emitter back into its header and numeric
/// rows. Non-numeric cells (the method/kind tags) parse as NaN.
pub fn load_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig(format!("{} is empty", path.display())))?
        .split(',')
        .map(str::to_owned)
        .collect();
    let rows = lines
        .map(|line| {
            line.split(',')
                .map(|cell| cell.parse::<f64>().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    Ok((header, rows))
}
