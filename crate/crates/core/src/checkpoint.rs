//! Binary checkpoint format "FBSQ1".
//!
//! Byte layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  field
//! 0       5     magic b"FBSQ1"
//! 5       1     format version (1)
//! 6       1     mu_profile id (0 = exp_saturating, 1 = tanh_saturating)
//! 7       1     reserved (0)
//! 8       4     N (u32), modes per axis
//! 12      4     reserved (0)
//! 16      8     L (f64), box length
//! 24      8     alpha (f64)
//! 32      8     epsilon (f64)
//! 40      8     t (f64), simulation time
//! 48      8     seed (u64)
//! 56      16*N^2  theta coefficients, row-major complex128 (re, im)
//! ...     16*N^2  u1 coefficients
//! ...     16*N^2  u2 coefficients
//! ```
//!
//! The nonnegativity shift is recoverable as the real part of theta's zero
//! mode because generated data is mean-zero before shifting.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{FbsqError, Result};
use crate::field::{SpectralField, VectorField};
use crate::grid::Grid;
use crate::physics::{MuProfile, PhysParams};
use crate::solver::FlowState;

const MAGIC: &[u8; 5] = b"FBSQ1";
const VERSION: u8 = 1;
const HEADER_LEN: usize = 56;

#[derive(Debug, Clone, Copy)]
pub struct CheckpointMeta {
    pub n: usize,
    pub l: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub t: f64,
    pub seed: u64,
    pub mu_profile: MuProfile,
}

pub fn write_checkpoint(
    path: &Path,
    state: &FlowState,
    params: &PhysParams,
    seed: u64,
) -> Result<()> {
    let grid = state.theta.grid();
    let mut w = BufWriter::new(File::create(path)?);
    let mut header = [0u8; HEADER_LEN];
    header[0..5].copy_from_slice(MAGIC);
    header[5] = VERSION;
    header[6] = params.mu_profile.id();
    header[8..12].copy_from_slice(&(grid.n() as u32).to_le_bytes());
    header[16..24].copy_from_slice(&grid.box_length().to_le_bytes());
    header[24..32].copy_from_slice(&params.alpha.to_le_bytes());
    header[32..40].copy_from_slice(&params.epsilon.to_le_bytes());
    header[40..48].copy_from_slice(&state.t.to_le_bytes());
    header[48..56].copy_from_slice(&seed.to_le_bytes());
    w.write_all(&header)?;
    for field in [&state.theta, &state.u.x, &state.u.y] {
        for c in field.coeffs() {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<(FlowState, CheckpointMeta)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)?;
    if &header[0..5] != MAGIC {
        return Err(FbsqError::CheckpointFormat("bad magic".into()));
    }
    if header[5] != VERSION {
        return Err(FbsqError::CheckpointFormat(format!("unsupported version {}", header[5])));
    }
    let mu_profile = MuProfile::from_id(header[6])
        .ok_or_else(|| FbsqError::CheckpointFormat(format!("unknown mu profile {}", header[6])))?;
    let n = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let f = |o: usize| f64::from_le_bytes(header[o..o + 8].try_into().unwrap());
    let meta = CheckpointMeta {
        n,
        l: f(16),
        alpha: f(24),
        epsilon: f(32),
        t: f(40),
        seed: u64::from_le_bytes(header[48..56].try_into().unwrap()),
        mu_profile,
    };
    if !(n >= 16 && n.is_power_of_two()) {
        return Err(FbsqError::CheckpointFormat(format!("invalid N = {n}")));
    }
    let grid = Grid::new(n, meta.l);
    let mut read_field = || -> Result<SpectralField> {
        let mut buf = vec![0u8; 16 * n * n];
        r.read_exact(&mut buf)?;
        let coeffs = buf
            .chunks_exact(16)
            .map(|ch| {
                Complex64::new(
                    f64::from_le_bytes(ch[0..8].try_into().unwrap()),
                    f64::from_le_bytes(ch[8..16].try_into().unwrap()),
                )
            })
            .collect();
        Ok(SpectralField::from_coeffs(&grid, coeffs))
    };
    let theta = read_field()?;
    let ux = read_field()?;
    let uy = read_field()?;
    let shift = theta.mean();
    Ok((FlowState { theta, u: VectorField { x: ux, y: uy }, t: meta.t, shift }, meta))
}
