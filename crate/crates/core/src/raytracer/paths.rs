use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MaterialParams, TraceConfig};
use crate::{io, signal, Error, Result, Vec3};

const MAGIC: &[u8; 4] = b"RSPS";
const FORMAT_VERSION: u32 = 1;
/// Stored lengths must agree with the recomputed chain length to this (m).
pub const LENGTH_TOL: f64 = 1e-9;

/// One captured TX → scatter points → RX path.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagationPath {
    pub tx_index: u32,
    pub rx_index: u32,
    /// Launch index of the ray within its TX; orders paths deterministically.
    pub ray_index: u64,
    pub hit_points: Vec<Vec3>,
    /// Triangle struck at each hit point.
    pub facets: Vec<u32>,
    pub total_length: f64,
}

impl PropagationPath {
    /// Analytic path through `points`; the length is computed from the geometry.
    /// Facets are recorded as `u32::MAX` (no mesh triangle).
    pub fn through_points(tx_index: u32, rx_index: u32, tx: &Vec3, points: Vec<Vec3>, rx: &Vec3) -> Self {
        let total_length = signal::path_length(tx, &points, rx);
        PropagationPath {
            tx_index,
            rx_index,
            ray_index: 0,
            facets: vec![u32::MAX; points.len()],
            hit_points: points,
            total_length,
        }
    }

    pub fn bounce_count(&self) -> usize {
        self.hit_points.len()
    }

    fn sort_key(&self) -> (u32, u32, u64, usize) {
        (self.tx_index, self.rx_index, self.ray_index, self.hit_points.len())
    }
}

/// Trace statistics carried alongside the paths.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub rays_launched: u64,
    /// Rays that struck the mesh at least once.
    pub rays_hit: u64,
    /// Set when the trace captured nothing; a valid outcome, not an error.
    pub no_paths: bool,
    pub warnings: Vec<String>,
}

/// Captured paths sorted by `(tx, rx, ray, bounce)` with a per-channel index.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSet {
    tx_count: usize,
    rx_count: usize,
    paths: Vec<PropagationPath>,
    /// `channel_start[tx * rx_count + rx]..channel_start[.. + 1]` indexes `paths`.
    channel_start: Vec<usize>,
    config: TraceConfig,
    material: MaterialParams,
    meta: TraceMeta,
}

#[derive(Serialize, Deserialize)]
struct PathSetHeader {
    format_version: u32,
    tx_count: usize,
    rx_count: usize,
    path_count: usize,
    seed: u64,
    config: TraceConfig,
    material: MaterialParams,
    meta: TraceMeta,
}

impl PathSet {
    /// Validates and sorts `paths`.
    pub fn new(
        tx_count: usize,
        rx_count: usize,
        mut paths: Vec<PropagationPath>,
        config: TraceConfig,
        material: MaterialParams,
        mut meta: TraceMeta,
    ) -> Result<Self> {
        for (i, p) in paths.iter().enumerate() {
            if p.tx_index as usize >= tx_count || p.rx_index as usize >= rx_count {
                return Err(Error::Dimension(format!(
                    "path {i} uses channel ({}, {}) outside {tx_count}x{rx_count}",
                    p.tx_index, p.rx_index
                )));
            }
            if p.hit_points.is_empty() || p.facets.len() != p.hit_points.len() {
                return Err(Error::Geometry(format!(
                    "path {i} has no hit points or mismatched facets"
                )));
            }
            if !(p.total_length > 0.0) || !p.total_length.is_finite() {
                return Err(Error::Geometry(format!(
                    "path {i} has non-positive length {}",
                    p.total_length
                )));
            }
        }
        paths.sort_by_key(PropagationPath::sort_key);
        let channels = tx_count * rx_count;
        let mut channel_start = vec![0usize; channels + 1];
        for p in &paths {
            channel_start[p.tx_index as usize * rx_count + p.rx_index as usize + 1] += 1;
        }
        for c in 0..channels {
            channel_start[c + 1] += channel_start[c];
        }
        meta.no_paths = paths.is_empty();
        Ok(PathSet {
            tx_count,
            rx_count,
            paths,
            channel_start,
            config,
            material,
            meta,
        })
    }

    /// Paths without trace provenance, e.g. analytic point targets.
    pub fn from_paths(tx_count: usize, rx_count: usize, paths: Vec<PropagationPath>) -> Result<Self> {
        let meta = TraceMeta::default();
        PathSet::new(
            tx_count,
            rx_count,
            paths,
            TraceConfig::default(),
            MaterialParams::new(0.0)?,
            meta,
        )
    }

    /// All paths of both sets; provenance is taken from `self`.
    pub fn union(&self, other: &PathSet) -> Result<PathSet> {
        if (self.tx_count, self.rx_count) != (other.tx_count, other.rx_count) {
            return Err(Error::Dimension("path sets cover different arrays".into()));
        }
        let mut paths = self.paths.clone();
        paths.extend(other.paths.iter().cloned());
        PathSet::new(
            self.tx_count,
            self.rx_count,
            paths,
            self.config.clone(),
            self.material,
            self.meta.clone(),
        )
    }

    pub fn tx_count(&self) -> usize {
        self.tx_count
    }

    pub fn rx_count(&self) -> usize {
        self.rx_count
    }

    pub fn paths(&self) -> &[PropagationPath] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn channel(&self, tx: usize, rx: usize) -> &[PropagationPath] {
        let c = tx * self.rx_count + rx;
        &self.paths[self.channel_start[c]..self.channel_start[c + 1]]
    }

    pub fn config(&self) -> &TraceConfig {
        &self.config
    }

    pub fn material(&self) -> MaterialParams {
        self.material
    }

    pub fn meta(&self) -> &TraceMeta {
        &self.meta
    }

    /// Header JSON followed by length-prefixed path records.
    ///
    /// Record: `u32` byte length, then `tx u32, rx u32, ray u64, bounces u32,
    /// total_length f64`, then per bounce `facet u32, x f64, y f64, z f64`.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let header = PathSetHeader {
            format_version: FORMAT_VERSION,
            tx_count: self.tx_count,
            rx_count: self.rx_count,
            path_count: self.paths.len(),
            seed: self.config.rng_seed,
            config: self.config.clone(),
            material: self.material,
            meta: self.meta.clone(),
        };
        let mut payload = Vec::new();
        for p in &self.paths {
            let body_len = 28 + 28 * p.hit_points.len();
            payload.extend_from_slice(&(body_len as u32).to_le_bytes());
            payload.extend_from_slice(&p.tx_index.to_le_bytes());
            payload.extend_from_slice(&p.rx_index.to_le_bytes());
            payload.extend_from_slice(&p.ray_index.to_le_bytes());
            payload.extend_from_slice(&(p.hit_points.len() as u32).to_le_bytes());
            payload.extend_from_slice(&p.total_length.to_le_bytes());
            for (h, f) in p.hit_points.iter().zip(&p.facets) {
                payload.extend_from_slice(&f.to_le_bytes());
                for c in h.iter() {
                    payload.extend_from_slice(&c.to_le_bytes());
                }
            }
        }
        io::encode_framed(MAGIC, &header, &payload)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (header, payload): (PathSetHeader, _) = io::decode_framed(MAGIC, bytes)?;
        if header.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported path set version {}",
                header.format_version
            )));
        }
        let mut rd = Reader { buf: &payload, pos: 0 };
        let mut paths = Vec::with_capacity(header.path_count);
        for _ in 0..header.path_count {
            let body_len = rd.u32()? as usize;
            let start = rd.pos;
            let tx_index = rd.u32()?;
            let rx_index = rd.u32()?;
            let ray_index = rd.u64()?;
            let bounces = rd.u32()? as usize;
            let total_length = rd.f64()?;
            if body_len != 28 + 28 * bounces {
                return Err(Error::Format(
                    "path record length does not match its bounce count".into(),
                ));
            }
            let mut hit_points = Vec::with_capacity(bounces);
            let mut facets = Vec::with_capacity(bounces);
            for _ in 0..bounces {
                facets.push(rd.u32()?);
                hit_points.push(Vec3::new(rd.f64()?, rd.f64()?, rd.f64()?));
            }
            debug_assert_eq!(rd.pos - start, body_len);
            paths.push(PropagationPath {
                tx_index,
                rx_index,
                ray_index,
                hit_points,
                facets,
                total_length,
            });
        }
        if rd.pos != payload.len() {
            return Err(Error::Format("trailing bytes after path records".into()));
        }
        PathSet::new(
            header.tx_count,
            header.rx_count,
            paths,
            header.config,
            header.material,
            header.meta,
        )
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_atomic(path, &self.to_bytes()?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        PathSet::from_bytes(&io::read_file(path)?)
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let bytes = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| Error::Format("truncated path record".into()))?;
        self.pos = end;
        Ok(bytes.try_into().unwrap())
    }

    fn u32(&mut self) -> Result<u32> {
        self.take().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64> {
        self.take().map(u64::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64> {
        self.take().map(f64::from_le_bytes)
    }
}
