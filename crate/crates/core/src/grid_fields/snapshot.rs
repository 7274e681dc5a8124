//! Binary snapshots and CSV line exports.
//!
//! Snapshot layout, all little-endian: `dim: u32`, `n: u32`, `L: f64`,
//! `time_count: u32`, then `time_count · n^dim` complex samples stored as
//! `(re: f32, im: f32)`.

use std::io::{Read, Write};

use num_complex::Complex32;

use super::{GridField, SpaceTimeField, SpatialGrid};
use crate::error::{domain, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub grid: SpatialGrid,
    pub slices: Vec<Vec<Complex32>>,
}

pub fn write_snapshot<W: Write>(field: &SpaceTimeField, mut out: W) -> Result<()> {
    let g = field.grid();
    out.write_all(&(g.dim() as u32).to_le_bytes())?;
    out.write_all(&(g.points_per_axis() as u32).to_le_bytes())?;
    out.write_all(&g.half_extent().to_le_bytes())?;
    out.write_all(&(field.len() as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * g.len());
    for s in field.slices() {
        buf.clear();
        for v in s.values() {
            buf.extend_from_slice(&(v.re as f32).to_le_bytes());
            buf.extend_from_slice(&(v.im as f32).to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<Snapshot> {
    let dim = u32::from_le_bytes(read_array(&mut input)?) as usize;
    let n = u32::from_le_bytes(read_array(&mut input)?) as usize;
    let l = f64::from_le_bytes(read_array(&mut input)?);
    let count = u32::from_le_bytes(read_array(&mut input)?) as usize;
    let grid = SpatialGrid::new(dim, n, l)?;
    let mut payload = vec![0u8; 8 * grid.len()];
    let mut slices = Vec::with_capacity(count);
    for _ in 0..count {
        input.read_exact(&mut payload)?;
        let slice = payload
            .chunks_exact(8)
            .map(|c| {
                let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
                let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
                Complex32::new(re, im)
            })
            .collect();
        slices.push(slice);
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return domain("trailing bytes after snapshot payload");
    }
    Ok(Snapshot { grid, slices })
}

/// CSV `x,re,im,abs` along axis 0 through the origin of the other axes.
pub fn write_slice_csv<W: Write>(f: &GridField, out: W) -> Result<()> {
    let g = f.grid();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "re", "im", "abs"])?;
    let mut idx = [g.points_per_axis() / 2; 3];
    for k in 0..g.points_per_axis() {
        idx[0] = k;
        let v = f.values()[g.flat_index(&idx)];
        w.write_record([g.coord(k).to_string(), v.re.to_string(), v.im.to_string(), v.norm().to_string()])?;
    }
    w.flush()?;
    Ok(())
}
