//! On-disk cache of shooting ground states keyed by `(N, α, λ, ω, grid)`.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::ground_state::{profile_norms, solve_shooting, GroundState, Method};
use crate::numerics::{RadialGrid, RadialProfile};
use crate::params::ModelParams;

const MAGIC: &[u8; 4] = b"NLSG";
const VERSION: u32 = 1;

/// FNV-1a over the little-endian bytes of the radial grid.
pub fn grid_hash(grid: &RadialGrid) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let bytes = grid.r_max().to_le_bytes().into_iter().chain((grid.len() as u64).to_le_bytes());
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Clone, Debug)]
pub struct GroundStateCache {
    dir: PathBuf,
}

impl GroundStateCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        GroundStateCache { dir: dir.into() }
    }

    pub fn path_for(&self, params: &ModelParams, grid: &RadialGrid) -> PathBuf {
        let ModelParams { dim, alpha, lambda, omega } = *params;
        self.dir.join(format!(
            "gs-n{dim}-a{:016x}-l{:016x}-w{:016x}-g{:016x}.bin",
            alpha.to_bits(),
            lambda.to_bits(),
            omega.to_bits(),
            grid_hash(grid)
        ))
    }

    /// Cached ground state, solving and storing it on a miss. Unreadable
    /// entries are recomputed and overwritten.
    pub fn load_or_solve(&self, params: &ModelParams, grid: &RadialGrid) -> Result<GroundState> {
        let path = self.path_for(params, grid);
        if let Some(gs) = read_entry(&path, params, grid) {
            return Ok(gs);
        }
        let gs = solve_shooting(params, grid)?;
        fs::create_dir_all(&self.dir)?;
        let tmp = path.with_extension("tmp");
        write_entry(&tmp, &gs)?;
        fs::rename(&tmp, &path)?;
        Ok(gs)
    }
}

/// Shooting ground state, through `cache` when one is given.
pub fn ground_state(params: &ModelParams, grid: &RadialGrid, cache: Option<&GroundStateCache>) -> Result<GroundState> {
    match cache {
        Some(c) => c.load_or_solve(params, grid),
        None => solve_shooting(params, grid),
    }
}

fn write_entry(path: &Path, gs: &GroundState) -> Result<()> {
    let mut buf = Vec::with_capacity(32 + 8 * gs.profile.values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(gs.profile.values.len() as u64).to_le_bytes());
    buf.extend_from_slice(&gs.residual_linf.to_le_bytes());
    for v in &gs.profile.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::File::create(path)?.write_all(&buf)?;
    Ok(())
}

fn read_entry(path: &Path, params: &ModelParams, grid: &RadialGrid) -> Option<GroundState> {
    let mut buf = Vec::new();
    fs::File::open(path).ok()?.read_to_end(&mut buf).ok()?;
    if buf.len() < 24 || &buf[..4] != MAGIC || buf[4..8] != VERSION.to_le_bytes() {
        return None;
    }
    let n = u64::from_le_bytes(buf[8..16].try_into().ok()?) as usize;
    if n != grid.len() || buf.len() != 24 + 8 * n {
        return None;
    }
    let residual_linf = f64::from_le_bytes(buf[16..24].try_into().ok()?);
    let values: Vec<f64> = buf[24..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let profile = RadialProfile::new(*grid, values, params.dim).ok()?;
    let norms = profile_norms(&profile, params).ok()?;
    Some(GroundState {
        profile,
        params: *params,
        norms,
        method: Method::Shooting,
        residual_linf,
        field: None,
    })
}
