//! Stepped-frequency IF synthesis.
//!
//! Each captured path contributes a unit phasor
//! `exp(−2πj·(f0 + n·Δf)·d/c)` to its channel at every frequency step `n`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::raytracer::PathSet;
use crate::{io, Error, Result, Vec3, SPEED_OF_LIGHT};

const MAGIC: &[u8; 4] = b"RSIF";
/// Channels with more paths than this are rejected.
pub const MAX_PATHS_PER_CHANNEL: usize = 100_000_000;

/// Frequency grid `f0 + n·Δf`, `n = 0..n_steps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SfcwRecord", into = "SfcwRecord")]
pub struct SfcwConfig {
    f0: f64,
    delta_f: f64,
    n_steps: usize,
    spreading_loss: bool,
}

#[derive(Serialize, Deserialize)]
struct SfcwRecord {
    f0: f64,
    delta_f: f64,
    n_steps: usize,
    #[serde(default)]
    c: Option<f64>,
    #[serde(default)]
    bandwidth: Option<f64>,
    #[serde(default)]
    spreading_loss: bool,
}

impl TryFrom<SfcwRecord> for SfcwConfig {
    type Error = Error;
    fn try_from(r: SfcwRecord) -> Result<Self> {
        if r.c.is_some_and(|c| c != SPEED_OF_LIGHT) {
            return Err(Error::Config(format!(
                "propagation speed is fixed at {SPEED_OF_LIGHT} m/s"
            )));
        }
        let cfg = SfcwConfig::new(r.f0, r.delta_f, r.n_steps)?.with_spreading_loss(r.spreading_loss);
        Ok(cfg)
    }
}

impl From<SfcwConfig> for SfcwRecord {
    fn from(c: SfcwConfig) -> Self {
        SfcwRecord {
            f0: c.f0,
            delta_f: c.delta_f,
            n_steps: c.n_steps,
            c: Some(SPEED_OF_LIGHT),
            bandwidth: Some(c.bandwidth()),
            spreading_loss: c.spreading_loss,
        }
    }
}

impl Default for SfcwConfig {
    /// 72–82 GHz in 128 steps, both band edges included.
    fn default() -> Self {
        SfcwConfig::spanning(72e9, 82e9, 128).expect("default band is valid")
    }
}

impl SfcwConfig {
    pub fn new(f0: f64, delta_f: f64, n_steps: usize) -> Result<Self> {
        if !(f0 > 0.0) || !f0.is_finite() {
            return Err(Error::Config(format!("f0 must be positive, got {f0}")));
        }
        if !(delta_f > 0.0) || !delta_f.is_finite() {
            return Err(Error::Config(format!("delta_f must be positive, got {delta_f}")));
        }
        if n_steps < 2 {
            return Err(Error::Config(format!("n_steps must be at least 2, got {n_steps}")));
        }
        Ok(SfcwConfig {
            f0,
            delta_f,
            n_steps,
            spreading_loss: false,
        })
    }

    /// Grid whose first and last steps land on `f_start` and `f_stop`.
    pub fn spanning(f_start: f64, f_stop: f64, n_steps: usize) -> Result<Self> {
        if n_steps < 2 {
            return Err(Error::Config(format!("n_steps must be at least 2, got {n_steps}")));
        }
        SfcwConfig::new(f_start, (f_stop - f_start) / (n_steps - 1) as f64, n_steps)
    }

    /// Weights each path by `1/d²` instead of unity.
    pub fn with_spreading_loss(mut self, on: bool) -> Self {
        self.spreading_loss = on;
        self
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn delta_f(&self) -> f64 {
        self.delta_f
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn spreading_loss(&self) -> bool {
        self.spreading_loss
    }

    pub fn bandwidth(&self) -> f64 {
        self.delta_f * (self.n_steps - 1) as f64
    }

    pub fn frequency(&self, n: usize) -> f64 {
        self.f0 + n as f64 * self.delta_f
    }

    /// Range resolution `c / (2B)`.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth())
    }
}

/// Length of the chain `tx → p₁ → … → pₘ → rx`.
pub fn path_length(tx: &Vec3, scatter_points: &[Vec3], rx: &Vec3) -> f64 {
    let (Some(first), Some(last)) = (scatter_points.first(), scatter_points.last()) else {
        return (rx - tx).norm();
    };
    let inner: f64 = scatter_points.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    (first - tx).norm() + inner + (rx - last).norm()
}

/// Complex IF samples indexed `[tx][rx][n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IfDataCube {
    tx_count: usize,
    rx_count: usize,
    config: SfcwConfig,
    data: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CubeHeader {
    dims: [usize; 3],
    sfcw: SfcwConfig,
}

impl IfDataCube {
    pub fn zeros(tx_count: usize, rx_count: usize, config: SfcwConfig) -> Self {
        let len = tx_count * rx_count * config.n_steps;
        IfDataCube {
            tx_count,
            rx_count,
            config,
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn from_samples(tx_count: usize, rx_count: usize, config: SfcwConfig, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != tx_count * rx_count * config.n_steps {
            return Err(Error::Dimension(format!(
                "{} samples for a {tx_count}x{rx_count}x{} cube",
                data.len(),
                config.n_steps
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Format("cube contains non-finite samples".into()));
        }
        Ok(IfDataCube {
            tx_count,
            rx_count,
            config,
            data,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.tx_count, self.rx_count, self.config.n_steps)
    }

    pub fn config(&self) -> &SfcwConfig {
        &self.config
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.data
    }

    pub fn channel(&self, tx: usize, rx: usize) -> &[Complex64] {
        let n = self.config.n_steps;
        let start = (tx * self.rx_count + rx) * n;
        &self.data[start..start + n]
    }

    pub fn get(&self, tx: usize, rx: usize, n: usize) -> Complex64 {
        self.channel(tx, rx)[n]
    }

    /// Elementwise sum of two cubes on the same grid.
    pub fn add(&self, other: &IfDataCube) -> Result<IfDataCube> {
        if self.dims() != other.dims() || self.config != other.config {
            return Err(Error::Dimension("cubes differ in shape or frequency grid".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(IfDataCube { data, ..self.clone() })
    }

    /// JSON header, then little-endian interleaved complex32 samples.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let header = CubeHeader {
            dims: [self.tx_count, self.rx_count, self.config.n_steps],
            sfcw: self.config.clone(),
        };
        let payload = io::f32_payload(self.data.iter().flat_map(|z| [z.re as f32, z.im as f32]));
        io::encode_framed(MAGIC, &header, &payload)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (header, payload): (CubeHeader, _) = io::decode_framed(MAGIC, bytes)?;
        let values = io::f32_from_payload(&payload)?;
        let data = values
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0] as f64, c[1] as f64))
            .collect();
        let [tx, rx, n] = header.dims;
        if n != header.sfcw.n_steps {
            return Err(Error::Format(
                "cube header dims disagree with its frequency grid".into(),
            ));
        }
        IfDataCube::from_samples(tx, rx, header.sfcw, data)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_atomic(path, &self.to_bytes()?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        IfDataCube::from_bytes(&io::read_file(path)?)
    }
}

/// Sums one unit phasor per path into every channel of the cube.
pub fn synthesize_if(paths: &PathSet, config: &SfcwConfig) -> Result<IfDataCube> {
    let (tx_count, rx_count) = (paths.tx_count(), paths.rx_count());
    let n_steps = config.n_steps;
    let channels: Vec<Vec<Complex64>> = (0..tx_count * rx_count)
        .into_par_iter()
        .map(|c| {
            let channel = paths.channel(c / rx_count, c % rx_count);
            if channel.len() > MAX_PATHS_PER_CHANNEL {
                return Err(Error::Config(format!(
                    "channel ({}, {}) holds {} paths, limit is {MAX_PATHS_PER_CHANNEL}",
                    c / rx_count,
                    c % rx_count,
                    channel.len()
                )));
            }
            let mut acc = vec![Complex64::new(0.0, 0.0); n_steps];
            for path in channel {
                let d = path.total_length;
                let amplitude = if config.spreading_loss { 1.0 / (d * d) } else { 1.0 };
                for (n, sample) in acc.iter_mut().enumerate() {
                    let phase = -2.0 * PI * config.frequency(n) * d / SPEED_OF_LIGHT;
                    *sample += Complex64::from_polar(amplitude, phase);
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let data = channels.into_iter().flatten().collect();
    IfDataCube::from_samples(tx_count, rx_count, config.clone(), data)
}
