//! Binary cache of σ tables keyed by `(γ, n_v, v_max)`.
//!
//! Layout: a 64-byte descriptor (`VMLSIGMA`, format version, γ, n_v, v_max,
//! node count, zero padding) followed by `n_v³ × 6` little-endian `f64`
//! values in row-major order.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Result, VmlError};
use crate::phase_grid::VelocityGrid;

use super::{build_collision_tables, CollisionTables};

const MAGIC: &[u8; 8] = b"VMLSIGMA";
const VERSION: u32 = 1;

pub fn write_sigma(w: &mut impl Write, tables: &CollisionTables) -> Result<()> {
    let grid = tables.grid();
    let mut head = [0u8; 64];
    head[..8].copy_from_slice(MAGIC);
    head[8..12].copy_from_slice(&VERSION.to_le_bytes());
    head[16..24].copy_from_slice(&tables.gamma().to_le_bytes());
    head[24..32].copy_from_slice(&(grid.n_v() as u64).to_le_bytes());
    head[32..40].copy_from_slice(&grid.v_max().to_le_bytes());
    head[40..48].copy_from_slice(&(grid.len() as u64).to_le_bytes());
    w.write_all(&head)?;
    let mut buf = Vec::with_capacity(grid.len() * 48);
    for s in tables.sigma() {
        for x in s {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Read a σ table; fails with a format error unless the key matches.
pub fn read_sigma(r: &mut impl Read, grid: &VelocityGrid, gamma: f64) -> Result<Vec<[f64; 6]>> {
    let mut head = [0u8; 64];
    r.read_exact(&mut head)?;
    if &head[..8] != MAGIC {
        return Err(VmlError::Format("not a sigma cache file".into()));
    }
    let f64_at = |o: usize| f64::from_le_bytes(head[o..o + 8].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(head[o..o + 8].try_into().unwrap());
    let version = u32::from_le_bytes(head[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(VmlError::Format(format!("unsupported sigma cache version {version}")));
    }
    if f64_at(16) != gamma || u64_at(24) != grid.n_v() as u64 || f64_at(32) != grid.v_max() {
        return Err(VmlError::Format("sigma cache key does not match the grid".into()));
    }
    let count = u64_at(40) as usize;
    if count != grid.len() {
        return Err(VmlError::Format("sigma cache node count mismatch".into()));
    }
    let mut bytes = vec![0u8; count * 48];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(48)
        .map(|c| std::array::from_fn(|k| f64::from_le_bytes(c[8 * k..8 * k + 8].try_into().unwrap())))
        .collect())
}

/// File name used for a given key inside a cache directory.
pub fn cache_file_name(grid: &VelocityGrid, gamma: f64) -> String {
    format!("sigma_g{gamma}_n{}_v{}.bin", grid.n_v(), grid.v_max())
}

/// Load the tables from `dir` when a matching cache exists, otherwise build
/// and store them.
pub fn load_or_build(dir: &Path, grid: &VelocityGrid, gamma: f64) -> Result<CollisionTables> {
    let path = dir.join(cache_file_name(grid, gamma));
    if let Ok(mut f) = std::fs::File::open(&path) {
        if let Ok(sigma) = read_sigma(&mut std::io::BufReader::new(&mut f), grid, gamma) {
            return CollisionTables::with_sigma(grid, gamma, sigma);
        }
    }
    let tables = build_collision_tables(grid, gamma)?;
    std::fs::create_dir_all(dir)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
    write_sigma(&mut f, &tables)?;
    f.flush()?;
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = VelocityGrid::new(8, 5.0).unwrap();
        let t = build_collision_tables(&g, -2.5).unwrap();
        let mut bytes = Vec::new();
        write_sigma(&mut bytes, &t).unwrap();
        assert_eq!(bytes.len(), 64 + 512 * 48);
        let back = read_sigma(&mut bytes.as_slice(), &g, -2.5).unwrap();
        assert_eq!(back, t.sigma());
        assert!(read_sigma(&mut bytes.as_slice(), &g, -3.0).is_err());
    }
}
