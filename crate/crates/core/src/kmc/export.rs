//! Trajectory snapshot export.
//!
//! CSV: header `replica,t,site,occupation`, one row per (replica, grid time,
//! site).
//!
//! Binary (all integers and floats little-endian):
//!
//! | field      | type          |
//! |------------|---------------|
//! | magic      | `b"SSEP"`     |
//! | version    | `u16` (= 1)   |
//! | n          | `u32`         |
//! | theta      | `f64`         |
//! | grid length| `u32`         |
//! | replicas   | `u32`         |
//! | grid times | `f64` x grid length |
//!
//! followed, per replica, by its seed (`u64`), replica index (`u64`) and one
//! packed configuration per grid time (`ceil((n-1)/8)` bytes, site 1 in the
//! lowest bit of the first byte).

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::kmc::simulator::TrajectoryRecord;
use crate::lattice::Configuration;

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"SSEP";
pub const SNAPSHOT_VERSION: u16 = 1;

pub fn write_trajectory_csv<W: Write>(records: &[TrajectoryRecord], mut w: W) -> Result<()> {
    writeln!(w, "replica,t,site,occupation")?;
    for r in records {
        for (t, snap) in r.grid.iter().zip(&r.snapshots) {
            for x in 1..=snap.len() {
                writeln!(w, "{},{},{},{}", r.replica, t, x, snap.occ(x))?;
            }
        }
    }
    Ok(())
}

/// Decoded binary snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub n: usize,
    pub theta: f64,
    pub grid: Vec<f64>,
    /// `(seed, replica, snapshots)`.
    pub replicas: Vec<(u64, u64, Vec<Configuration>)>,
}

pub fn write_snapshots_binary<W: Write>(records: &[TrajectoryRecord], mut w: W) -> Result<()> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    if records
        .iter()
        .any(|r| r.params != first.params || r.grid != first.grid)
    {
        return Err(Error::MismatchedRecords);
    }
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&(first.params.n() as u32).to_le_bytes())?;
    w.write_all(&first.params.theta().to_le_bytes())?;
    w.write_all(&(first.grid.len() as u32).to_le_bytes())?;
    w.write_all(&(records.len() as u32).to_le_bytes())?;
    for t in &first.grid {
        w.write_all(&t.to_le_bytes())?;
    }
    for r in records {
        w.write_all(&r.seed.to_le_bytes())?;
        w.write_all(&r.replica.to_le_bytes())?;
        for s in &r.snapshots {
            w.write_all(&s.to_packed_bytes())?;
        }
    }
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
    Ok(buf)
}

pub fn read_snapshots_binary<R: Read>(mut r: R) -> Result<SnapshotFile> {
    if &take::<4, _>(&mut r)? != SNAPSHOT_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes(take(&mut r)?);
    if version != SNAPSHOT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = u32::from_le_bytes(take(&mut r)?) as usize;
    if n < 2 {
        return Err(Error::Format(format!("lattice size {n}")));
    }
    let theta = f64::from_le_bytes(take(&mut r)?);
    let grid_len = u32::from_le_bytes(take(&mut r)?) as usize;
    let count = u32::from_le_bytes(take(&mut r)?) as usize;
    let grid = (0..grid_len)
        .map(|_| Ok(f64::from_le_bytes(take(&mut r)?)))
        .collect::<Result<Vec<_>>>()?;
    let width = (n - 1).div_ceil(8);
    let mut replicas = Vec::with_capacity(count);
    for _ in 0..count {
        let seed = u64::from_le_bytes(take(&mut r)?);
        let replica = u64::from_le_bytes(take(&mut r)?);
        let mut snaps = Vec::with_capacity(grid_len);
        for _ in 0..grid_len {
            let mut buf = vec![0u8; width];
            r.read_exact(&mut buf)
                .map_err(|e| Error::Format(format!("truncated file: {e}")))?;
            snaps.push(Configuration::from_packed_bytes(n - 1, &buf));
        }
        replicas.push((seed, replica, snaps));
    }
    Ok(SnapshotFile {
        n,
        theta,
        grid,
        replicas,
    })
}
