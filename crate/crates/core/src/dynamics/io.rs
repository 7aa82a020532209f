//! State snapshots and trajectory tables.
//!
//! Snapshot layout, all little-endian:
//!
//! | offset | type      | content                                   |
//! |--------|-----------|-------------------------------------------|
//! | 0      | [u8; 8]   | magic `IONSNAP1`                          |
//! | 8      | u32       | format version (1)                        |
//! | 12     | u32       | ion count N                               |
//! | 16     | f64       | time [s]                                  |
//! | 24     | N × 10 f64| per ion: pos[3] m, vel[3] m/s, amp[4]     |
//!
//! `amp` holds (re, im) of the ground then the excited amplitude.

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use nalgebra::Vector3;
use num_complex::Complex64;
use std::io::{Read, Write};

use super::evolve::PeriodRecord;
use super::state::SystemState;
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"IONSNAP1";
pub const SNAPSHOT_VERSION: u32 = 1;

pub fn write_snapshot<W: Write>(state: &SystemState, mut w: W) -> Result<()> {
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_u32::<LittleEndian>(SNAPSHOT_VERSION)?;
    let n = u32::try_from(state.len()).map_err(|_| Error::Snapshot("too many ions".into()))?;
    w.write_u32::<LittleEndian>(n)?;
    w.write_f64::<LittleEndian>(state.time)?;
    for i in 0..state.len() {
        for c in state.positions[i].iter().chain(state.velocities[i].iter()) {
            w.write_f64::<LittleEndian>(*c)?;
        }
        for a in &state.internal[i] {
            w.write_f64::<LittleEndian>(a.re)?;
            w.write_f64::<LittleEndian>(a.im)?;
        }
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<SystemState> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let n = r.read_u32::<LittleEndian>()? as usize;
    if n == 0 {
        return Err(Error::Snapshot("empty snapshot".into()));
    }
    let time = r.read_f64::<LittleEndian>()?;
    let mut positions = Vec::with_capacity(n);
    let mut velocities = Vec::with_capacity(n);
    let mut internal = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v = [0.0; 10];
        r.read_f64_into::<LittleEndian>(&mut v)?;
        positions.push(Vector3::new(v[0], v[1], v[2]));
        velocities.push(Vector3::new(v[3], v[4], v[5]));
        internal.push([Complex64::new(v[6], v[7]), Complex64::new(v[8], v[9])]);
    }
    let state = SystemState {
        positions,
        velocities,
        internal,
        time,
    };
    if !state.is_finite() {
        return Err(Error::Snapshot("non-finite entries".into()));
    }
    Ok(state)
}

pub const TRAJECTORY_HEADER: &str =
    "period,time_s,kinetic_J,potential_J,total_J,centroid_x_m,centroid_y_m,centroid_z_m,max_displacement_m";

/// Writes per-period records as CSV.
pub fn write_trajectory_csv<W: Write>(records: &[PeriodRecord], mut w: W) -> Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.period,
            r.time,
            r.kinetic_energy,
            r.potential_energy,
            r.total_energy,
            r.centroid[0],
            r.centroid[1],
            r.centroid[2],
            r.max_displacement
        )?;
    }
    Ok(())
}
