use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::VoxelGrid;
use crate::scene::RigidPose;
use crate::{io, Error, Result};

const MAGIC: &[u8; 4] = b"RSIM";

/// Row-major real image; `(i, j)` addresses row `i`, column `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Image {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values for a {rows}x{cols} image",
                data.len()
            )));
        }
        Ok(Image { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let data = (0..rows * cols).map(|p| f(p / cols, p % cols)).collect();
        Image { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn map_in_place(&mut self, f: impl Fn(f64) -> f64) {
        self.data.iter_mut().for_each(|v| *v = f(*v));
    }

    /// 8-bit grayscale PNG, values scaled from `[0, scale]`.
    pub fn write_png(&self, path: &Path, scale: f64) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut encoder = png::Encoder::new(BufWriter::new(file), self.cols as u32, self.rows as u32);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        let to_io = |e: png::EncodingError| Error::io(path, std::io::Error::other(e));
        let mut writer = encoder.write_header().map_err(to_io)?;
        let bytes: Vec<u8> = self
            .data
            .iter()
            .map(|v| {
                if scale > 0.0 {
                    (v / scale * 255.0).round().clamp(0.0, 255.0) as u8
                } else {
                    0
                }
            })
            .collect();
        writer.write_image_data(&bytes).map_err(to_io)?;
        writer.finish().map_err(to_io)
    }
}

/// Generation parameters recorded with each image pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub alpha: f64,
    pub pose: RigidPose,
    /// Standoff and viewing angles that produced `pose`, degrees / meters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub view: Option<[f64; 4]>,
    #[serde(default)]
    pub path_count: usize,
    /// The trace captured no paths; the images are all zero.
    #[serde(default)]
    pub zero_paths: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augment_seed: Option<u64>,
}

/// Co-registered intensity and depth images from one reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct RadarImagePair {
    pub intensity: Image,
    /// z coordinate (m) of the projected voxel, or `[0, 1]` once normalized.
    pub depth: Image,
    pub grid: VoxelGrid,
    pub label: Option<String>,
    pub provenance: Option<Provenance>,
    pub normalized: bool,
}

#[derive(Serialize, Deserialize)]
struct PairHeader {
    dims: [usize; 2],
    planes: [String; 2],
    grid: VoxelGrid,
    label: Option<String>,
    provenance: Option<Provenance>,
    normalized: bool,
}

impl RadarImagePair {
    pub fn new(intensity: Image, depth: Image, grid: VoxelGrid) -> Self {
        assert_eq!((intensity.rows, intensity.cols), (depth.rows, depth.cols));
        RadarImagePair {
            intensity,
            depth,
            grid,
            label: None,
            provenance: None,
            normalized: false,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.intensity.rows, self.intensity.cols)
    }

    /// JSON header, then the intensity and depth planes as little-endian f32.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let header = PairHeader {
            dims: [self.intensity.rows, self.intensity.cols],
            planes: ["intensity".into(), "depth".into()],
            grid: self.grid,
            label: self.label.clone(),
            provenance: self.provenance.clone(),
            normalized: self.normalized,
        };
        let payload = io::f32_payload(self.intensity.data.iter().chain(&self.depth.data).map(|&v| v as f32));
        io::encode_framed(MAGIC, &header, &payload)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (header, payload): (PairHeader, _) = io::decode_framed(MAGIC, bytes)?;
        let [rows, cols] = header.dims;
        let values = io::f32_from_payload(&payload)?;
        if values.len() != 2 * rows * cols {
            return Err(Error::Format(format!(
                "expected {} plane values, found {}",
                2 * rows * cols,
                values.len()
            )));
        }
        let (a, b) = values.split_at(rows * cols);
        let plane = |v: &[f32]| Image {
            rows,
            cols,
            data: v.iter().map(|&x| x as f64).collect(),
        };
        Ok(RadarImagePair {
            intensity: plane(a),
            depth: plane(b),
            grid: header.grid,
            label: header.label,
            provenance: header.provenance,
            normalized: header.normalized,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_atomic(path, &self.to_bytes()?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        RadarImagePair::from_bytes(&io::read_file(path)?)
    }

    /// Reads only the JSON header's provenance.
    pub fn read_provenance(path: &Path) -> Result<Option<Provenance>> {
        let bytes = io::read_file(path)?;
        let (header, _): (PairHeader, Vec<u8>) = io::decode_framed(MAGIC, &bytes)?;
        Ok(header.provenance)
    }

    /// Writes `<stem>.intensity.png` and `<stem>.depth.png` next to `path`.
    pub fn write_previews(&self, path: &Path) -> Result<[PathBuf; 2]> {
        let with = |suffix: &str| {
            let mut p = path.to_path_buf();
            p.set_extension(suffix);
            p
        };
        let (ip, dp) = (with("intensity.png"), with("depth.png"));
        self.intensity.write_png(&ip, self.intensity.max())?;
        if self.normalized {
            self.depth.write_png(&dp, 1.0)?;
        } else {
            let (lo, hi) = (self.grid.z_min(), self.grid.z_max());
            let mut shifted = self.depth.clone();
            shifted.map_in_place(|d| d - lo);
            shifted.write_png(&dp, hi - lo)?;
        }
        Ok([ip, dp])
    }
}
