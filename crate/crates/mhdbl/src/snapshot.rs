//! MHDBL1 snapshot files: a text header (magic, grid parameters, time)
//! followed by raw little-endian f64 blocks for u, f, v, g in row-major
//! order.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{MhdError, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::state::State;

pub const MAGIC: &str = "MHDBL1";

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub ymax: f64,
    pub ell: f64,
    pub delta: f64,
    pub t: f64,
    pub u: Vec<f64>,
    pub f: Vec<f64>,
    pub v: Vec<f64>,
    pub g: Vec<f64>,
}

pub fn write_snapshot(path: &Path, grid: &Grid, state: &State) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{MAGIC}")?;
    writeln!(
        w,
        "{} {} {:.17e} {:.17e} {:.17e} {:.17e}",
        grid.nx(),
        grid.ny(),
        grid.ymax(),
        grid.ell(),
        grid.delta(),
        state.t
    )?;
    for field in [&state.u, &state.f, &state.v, &state.g] {
        for v in field.data() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut line = String::new();
    r.read_line(&mut line)?;
    if line.trim_end() != MAGIC {
        return Err(MhdError::Config(format!(
            "not a {MAGIC} snapshot: bad magic {:?}",
            line.trim_end()
        )));
    }
    line.clear();
    r.read_line(&mut line)?;
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 6 {
        return Err(MhdError::Config("snapshot header must have 6 fields".into()));
    }
    let bad = |what: &str| MhdError::Config(format!("snapshot header: malformed {what}"));
    let nx: usize = parts[0].parse().map_err(|_| bad("nx"))?;
    let ny: usize = parts[1].parse().map_err(|_| bad("ny"))?;
    let ymax: f64 = parts[2].parse().map_err(|_| bad("ymax"))?;
    let ell: f64 = parts[3].parse().map_err(|_| bad("ell"))?;
    let delta: f64 = parts[4].parse().map_err(|_| bad("delta"))?;
    let t: f64 = parts[5].parse().map_err(|_| bad("t"))?;

    let n = nx * (ny + 1);
    let mut read_block = || -> Result<Vec<f64>> {
        let mut buf = vec![0u8; n * 8];
        r.read_exact(&mut buf)?;
        Ok(buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    };
    let u = read_block()?;
    let f = read_block()?;
    let v = read_block()?;
    let g = read_block()?;
    Ok(Snapshot { nx, ny, ymax, ell, delta, t, u, f, v, g })
}

impl Snapshot {
    /// Rebuild the grid and state (checks parameter validity on the way).
    pub fn into_state(self) -> Result<(Grid, State)> {
        let grid = Grid::build(self.nx, self.ny, self.ymax, self.ell, self.delta)?;
        let mut u = Field::zeros(&grid);
        let mut f = Field::zeros(&grid);
        u.data_mut().copy_from_slice(&self.u);
        f.data_mut().copy_from_slice(&self.f);
        let state = State::new(self.t, u, f, 0.0, self.delta, &grid);
        Ok((grid, state))
    }
}
