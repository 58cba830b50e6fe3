//! CSV and JSON writers. Floats are written with 17 significant digits so
//! that every double round-trips bit-exactly through the files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;

use opgg_core::{ControlTrajectory, SimplexState, StateTrajectory, SweepResult};

use crate::run::CompareRow;

/// Lossless decimal rendering of a double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Flat coordinates for plotting simplex trajectories in the plane:
/// `X = y + z/2`, `Y = (sqrt(3)/2) z`, an equilateral triangle with the
/// cooperation vertex at the origin and the defection vertex at (1, 0).
pub fn ternary_coordinates(w: &SimplexState) -> (f64, f64) {
    (w.y + 0.5 * w.z, 3f64.sqrt() / 2.0 * w.z)
}

fn writer(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// `t,x,y,z` per node.
pub fn write_trajectory_csv(path: &Path, traj: &StateTrajectory) -> anyhow::Result<()> {
    let mut out = writer(path)?;
    writeln!(out, "t,x,y,z")?;
    for (k, w) in traj.states().iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(traj.grid().time(k)),
            fmt_f64(w.x),
            fmt_f64(w.y),
            fmt_f64(w.z)
        )?;
    }
    Ok(out.flush()?)
}

/// `t,v,yv` per node; `yv` is the punished share of the population.
pub fn write_control_csv(
    path: &Path,
    traj: &StateTrajectory,
    control: &ControlTrajectory,
) -> anyhow::Result<()> {
    let mut out = writer(path)?;
    writeln!(out, "t,v,yv")?;
    for k in 0..control.len() {
        let v = control.value(k);
        let y = traj.state(k).y;
        writeln!(
            out,
            "{},{},{}",
            fmt_f64(control.grid().time(k)),
            fmt_f64(v),
            fmt_f64(y * v)
        )?;
    }
    Ok(out.flush()?)
}

/// Plane coordinates per node; the header spells out the mapping.
pub fn write_ternary_csv(path: &Path, traj: &StateTrajectory) -> anyhow::Result<()> {
    let mut out = writer(path)?;
    writeln!(out, "X = y + z/2,Y = z*sqrt(3)/2")?;
    for w in traj.states() {
        let (x, y) = ternary_coordinates(w);
        writeln!(out, "{},{}", fmt_f64(x), fmt_f64(y))?;
    }
    Ok(out.flush()?)
}

/// `v,J` per sweep entry.
pub fn write_sweep_csv(path: &Path, sweep: &SweepResult) -> anyhow::Result<()> {
    let mut out = writer(path)?;
    writeln!(out, "v,J")?;
    for entry in &sweep.entries {
        writeln!(
            out,
            "{},{}",
            fmt_f64(entry.v),
            fmt_f64(entry.breakdown.total)
        )?;
    }
    Ok(out.flush()?)
}

/// One row per compared strategy.
pub fn write_comparison_csv(path: &Path, rows: &[CompareRow]) -> anyhow::Result<()> {
    let mut out = writer(path)?;
    writeln!(out, "strategy,J,punished_integral,wall_time_s")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.strategy,
            fmt_f64(row.j),
            fmt_f64(row.punished_integral),
            fmt_f64(row.wall_time_s)
        )?;
    }
    Ok(out.flush()?)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut out = writer(path)?;
    serde_json::to_writer_pretty(&mut out, value)
        .with_context(|| format!("cannot serialize {}", path.display()))?;
    writeln!(out)?;
    Ok(out.flush()?)
}
