//! Binary state snapshots.
//!
//! A 64-byte descriptor
//!
//! ```text
//! 0  magic "VMLCKPT1"      8  format version (u32)   12 representation (u32)
//! 16 n_v per axis (u64)    24 spatial nodes (u64)    32 active-axis mask (u32)
//! 40 t (f64)               48 v_max (f64)            56 box length (f64)
//! ```
//!
//! is followed by little-endian `f64` values: `f` as interleaved real and
//! imaginary parts in `[species][x][v]` order, then `E₁, E₂, E₃, B₁, B₂, B₃`
//! per mode, also interleaved.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Result, VmlError};
use crate::maxwell::EMField;
use crate::phase_grid::{DistributionPair, Representation, SpatialGrid, VelocityGrid, C64};

use super::PhaseState;

const MAGIC: &[u8; 8] = b"VMLCKPT1";
const VERSION: u32 = 1;

fn put_complex(buf: &mut Vec<u8>, z: &C64) {
    buf.extend_from_slice(&z.re.to_le_bytes());
    buf.extend_from_slice(&z.im.to_le_bytes());
}

pub fn write_checkpoint(w: &mut impl Write, state: &PhaseState, sg: &SpatialGrid, vg: &VelocityGrid) -> Result<()> {
    let mut head = [0u8; 64];
    head[..8].copy_from_slice(MAGIC);
    head[8..12].copy_from_slice(&VERSION.to_le_bytes());
    let repr: u32 = match state.f.representation() {
        Representation::Physical => 0,
        Representation::Fourier => 1,
    };
    head[12..16].copy_from_slice(&repr.to_le_bytes());
    head[16..24].copy_from_slice(&(vg.n_v() as u64).to_le_bytes());
    head[24..32].copy_from_slice(&(sg.len() as u64).to_le_bytes());
    let mask = sg.active_axes().iter().enumerate().fold(0u32, |m, (i, &a)| m | (u32::from(a) << i));
    head[32..36].copy_from_slice(&mask.to_le_bytes());
    head[40..48].copy_from_slice(&state.t.to_le_bytes());
    head[48..56].copy_from_slice(&vg.v_max().to_le_bytes());
    head[56..64].copy_from_slice(&sg.box_length().to_le_bytes());
    w.write_all(&head)?;
    let mut buf = Vec::with_capacity(16 * (state.f.values().len() + 6 * state.em.len()));
    for z in state.f.values() {
        put_complex(&mut buf, z);
    }
    for c in state.em.e.iter().chain(state.em.b.iter()) {
        for z in c {
            put_complex(&mut buf, z);
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_complex(bytes: &[u8]) -> Vec<C64> {
    bytes
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect()
}

/// Read a snapshot; the descriptor must match the grids.
pub fn read_checkpoint(r: &mut impl Read, sg: &SpatialGrid, vg: &VelocityGrid) -> Result<PhaseState> {
    let mut head = [0u8; 64];
    r.read_exact(&mut head)?;
    if &head[..8] != MAGIC {
        return Err(VmlError::Format("not a checkpoint file".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(head[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(head[o..o + 8].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(head[o..o + 8].try_into().unwrap());
    if u32_at(8) != VERSION {
        return Err(VmlError::Format(format!("unsupported checkpoint version {}", u32_at(8))));
    }
    let repr = match u32_at(12) {
        0 => Representation::Physical,
        1 => Representation::Fourier,
        other => return Err(VmlError::Format(format!("unknown representation tag {other}"))),
    };
    let mask = sg.active_axes().iter().enumerate().fold(0u32, |m, (i, &a)| m | (u32::from(a) << i));
    if u64_at(16) != vg.n_v() as u64
        || u64_at(24) != sg.len() as u64
        || u32_at(32) != mask
        || f64_at(48) != vg.v_max()
        || f64_at(56) != sg.box_length()
    {
        return Err(VmlError::Format("checkpoint descriptor does not match the grids".into()));
    }
    let nf = 2 * sg.len() * vg.len();
    let mut bytes = vec![0u8; 16 * (nf + 6 * sg.len())];
    r.read_exact(&mut bytes)?;
    let vals = read_complex(&bytes);
    let f = DistributionPair::from_values(sg.len(), vg.len(), repr, vals[..nf].to_vec())?;
    let mut em = EMField::zeros(sg.len());
    let comps = vals[nf..].chunks_exact(sg.len());
    for (k, c) in comps.enumerate() {
        if k < 3 {
            em.e[k] = c.to_vec();
        } else {
            em.b[k - 3] = c.to_vec();
        }
    }
    Ok(PhaseState { f, em, t: f64_at(40) })
}

pub fn save(path: &Path, state: &PhaseState, sg: &SpatialGrid, vg: &VelocityGrid) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_checkpoint(&mut w, state, sg, vg)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path, sg: &SpatialGrid, vg: &VelocityGrid) -> Result<PhaseState> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    read_checkpoint(&mut r, sg, vg)
}
