//! Binary checkpoints.
//!
//! Layout (little-endian): magic `CNLS`, version u32, N u32, m u32, p f64,
//! points u32 × N, box lengths f64 × N, coupling f64 × m² (row-major), time
//! f64, then for each component interleaved `(re, im)` f64 pairs in flat grid
//! order, and finally the CRC32 of everything between the magic and the
//! checksum.

use std::path::Path;

use cnls_core::model::{CouplingMatrix, Exponent, ModelParams, SystemState};
use cnls_core::spectral::{ComplexField, Grid};
use num_complex::Complex64;

use crate::error::{HarnessError, Result};
use crate::output::atomic_write;

pub const MAGIC: &[u8; 4] = b"CNLS";
pub const VERSION: u32 = 1;

/// Serializes `state` (brought to physical space) with its model.
pub fn encode(state: &SystemState, params: &ModelParams) -> Vec<u8> {
    let grid = state.grid();
    let mut payload = Vec::new();
    payload.extend_from_slice(&VERSION.to_le_bytes());
    payload.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    payload.extend_from_slice(&(state.m() as u32).to_le_bytes());
    payload.extend_from_slice(&params.p().to_le_bytes());
    for &n in grid.points() {
        payload.extend_from_slice(&(n as u32).to_le_bytes());
    }
    for &l in grid.lengths() {
        payload.extend_from_slice(&l.to_le_bytes());
    }
    for &a in params.coupling().entries() {
        payload.extend_from_slice(&a.to_le_bytes());
    }
    payload.extend_from_slice(&state.time.to_le_bytes());
    for u in state.to_physical().components() {
        for v in u.values() {
            payload.extend_from_slice(&v.re.to_le_bytes());
            payload.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    let crc = crc32fast::hash(&payload);
    let mut out = Vec::with_capacity(payload.len() + 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&payload);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

/// A decoded checkpoint: the state and the model stored alongside it.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub state: SystemState,
    pub dim: usize,
    pub p: f64,
    pub coupling: CouplingMatrix,
}

impl Checkpoint {
    /// Model parameters, with `p` taken from `exact` when it matches the stored value.
    pub fn params(&self, exact: Option<Exponent>) -> cnls_core::Result<ModelParams> {
        let p = match exact {
            Some(e) if e.to_f64() == self.p => e,
            _ => Exponent::Real(self.p),
        };
        ModelParams::new(self.dim, p, self.coupling.clone())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> std::result::Result<&[u8], String> {
        if self.pos + n > self.bytes.len() {
            return Err("unexpected end of checkpoint payload".into());
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Verifies the checksum first, so a corrupt or truncated file never yields
/// a partial state.
pub fn decode(bytes: &[u8]) -> std::result::Result<Checkpoint, String> {
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        if bytes.len() >= 4 && &bytes[..4] == MAGIC {
            return Err("checksum error: file too short".into());
        }
        return Err("not a checkpoint (bad magic bytes)".into());
    }
    let payload = &bytes[4..bytes.len() - 4];
    let stored = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().unwrap());
    if crc32fast::hash(payload) != stored {
        return Err("checksum error: payload does not match its CRC32".into());
    }
    let mut c = Cursor { bytes: payload, pos: 0 };
    let version = c.u32()?;
    if version != VERSION {
        return Err(format!("unsupported checkpoint version {version}"));
    }
    let dim = c.u32()? as usize;
    let m = c.u32()? as usize;
    if !(1..=4).contains(&dim) || m == 0 {
        return Err(format!("bad header: N = {dim}, m = {m}"));
    }
    let p = c.f64()?;
    let points = (0..dim).map(|_| c.u32().map(|n| n as usize)).collect::<std::result::Result<Vec<_>, _>>()?;
    let lengths = (0..dim).map(|_| c.f64()).collect::<std::result::Result<Vec<_>, _>>()?;
    let entries = (0..m * m).map(|_| c.f64()).collect::<std::result::Result<Vec<_>, _>>()?;
    let time = c.f64()?;
    let grid = Grid::new(&points, &lengths).map_err(|e| e.to_string())?;
    let mut components = Vec::with_capacity(m);
    for _ in 0..m {
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            let re = c.f64()?;
            let im = c.f64()?;
            values.push(Complex64::new(re, im));
        }
        components.push(ComplexField::new(grid.clone(), values).map_err(|e| e.to_string())?);
    }
    if c.pos != payload.len() {
        return Err(format!("{} trailing bytes after the last component", payload.len() - c.pos));
    }
    let coupling = CouplingMatrix::new(m, entries).map_err(|e| e.to_string())?;
    let state = SystemState::new(time, components).map_err(|e| e.to_string())?;
    Ok(Checkpoint {
        state,
        dim,
        p,
        coupling,
    })
}

pub fn save_checkpoint(state: &SystemState, params: &ModelParams, path: &Path) -> Result<()> {
    atomic_write(path, &encode(state, params))
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    decode(&bytes).map_err(|message| HarnessError::Checkpoint {
        path: path.to_path_buf(),
        message,
    })
}
