//! CSV and report writers.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back reproduces the in-memory values exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;

pub const TRAJECTORY_HEADER: &str = "t,s,e,i,z";
pub const CONTROLS_HEADER: &str = "t,s,e,i,z,u,v,w,p1,p2,p3,p4";
pub const SWEEP_HEADER: &str = "value,r0,peak_i,final_i,peak_z,final_z,status";

/// `t,s,e,i,z` rows, one per grid node.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * traj.states.len());
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (t, x) in traj.grid.nodes().zip(&traj.states) {
        let _ = writeln!(out, "{t},{},{},{},{}", x.s, x.e, x.i, x.z);
    }
    out
}

/// States, controls and costates per node. The trajectory must carry
/// controls and costates.
pub fn controls_csv(traj: &Trajectory) -> Result<String> {
    let (Some(controls), Some(adjoints)) = (&traj.controls, &traj.adjoints) else {
        return Err(Error::GridMismatch("trajectory lacks controls or costates".into()));
    };
    let mut out = String::with_capacity(160 * traj.states.len());
    out.push_str(CONTROLS_HEADER);
    out.push('\n');
    for (((t, x), c), p) in traj.grid.nodes().zip(&traj.states).zip(controls).zip(adjoints) {
        let _ = writeln!(
            out,
            "{t},{},{},{},{},{},{},{},{},{},{},{}",
            x.s, x.e, x.i, x.z, c.u, c.v, c.w, p.p1, p.p2, p.p3, p.p4
        );
    }
    Ok(out)
}

/// Parses a numeric CSV with a header row into `(header, rows)`.
pub fn read_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("CSV line {}: {e}", n + 2)))?;
        if row.len() != header.len() {
            return Err(Error::Parse(format!(
                "CSV line {}: expected {} fields",
                n + 2,
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), contents)?;
    Ok(())
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    write_file(dir, name, &(text + "\n"))
}
