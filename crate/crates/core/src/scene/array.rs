use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{io, Error, Result, Vec3};

/// Two antenna elements closer than this (m) are considered coincident.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// Transmit and receive element positions (meters).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArrayRecord", into = "ArrayRecord")]
pub struct AntennaArray {
    name: String,
    tx: Vec<Vec3>,
    rx: Vec<Vec3>,
}

/// On-disk layout: `{ "tx": [[x,y,z],...], "rx": [[x,y,z],...] }`.
#[derive(Serialize, Deserialize)]
struct ArrayRecord {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    name: String,
    tx: Vec<[f64; 3]>,
    rx: Vec<[f64; 3]>,
}

impl TryFrom<ArrayRecord> for AntennaArray {
    type Error = Error;

    fn try_from(r: ArrayRecord) -> Result<Self> {
        AntennaArray::new(
            r.name,
            r.tx.into_iter().map(Vec3::from).collect(),
            r.rx.into_iter().map(Vec3::from).collect(),
        )
    }
}

impl From<AntennaArray> for ArrayRecord {
    fn from(a: AntennaArray) -> Self {
        ArrayRecord {
            name: a.name,
            tx: a.tx.iter().map(|&p| p.into()).collect(),
            rx: a.rx.iter().map(|&p| p.into()).collect(),
        }
    }
}

impl AntennaArray {
    pub fn new(name: impl Into<String>, tx: Vec<Vec3>, rx: Vec<Vec3>) -> Result<Self> {
        for (role, list) in [("tx", &tx), ("rx", &rx)] {
            if list.is_empty() {
                return Err(Error::Geometry(format!("{role} element list is empty")));
            }
            if list.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
                return Err(Error::Geometry(format!("{role} element with non-finite position")));
            }
            if let Some((i, j)) = first_coincident_pair(list) {
                return Err(Error::Geometry(format!("{role} elements {i} and {j} coincide")));
            }
        }
        Ok(AntennaArray {
            name: name.into(),
            tx,
            rx,
        })
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&io::read_file(path)?)?)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("array serialization is infallible")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tx(&self) -> &[Vec3] {
        &self.tx
    }

    pub fn rx(&self) -> &[Vec3] {
        &self.rx
    }

    pub fn channel_count(&self) -> usize {
        self.tx.len() * self.rx.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = &Vec3> {
        self.tx.iter().chain(&self.rx)
    }

    /// Largest distance between any two elements.
    pub fn aperture(&self) -> f64 {
        let all: Vec<&Vec3> = self.elements().collect();
        let mut best = 0.0f64;
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                best = best.max((*a - *b).norm());
            }
        }
        best
    }

    /// Smallest RX-to-RX distance, `None` for a single receiver.
    pub fn min_rx_pitch(&self) -> Option<f64> {
        min_spacing(&self.rx)
    }

    pub fn centroid(&self) -> Vec3 {
        let n = (self.tx.len() + self.rx.len()) as f64;
        self.elements().sum::<Vec3>() / n
    }
}

fn first_coincident_pair(points: &[Vec3]) -> Option<(usize, usize)> {
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate().skip(i + 1) {
            if (a - b).norm() <= COINCIDENCE_TOL {
                return Some((i, j));
            }
        }
    }
    None
}

fn min_spacing(points: &[Vec3]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = (a - b).norm();
            best = Some(best.map_or(d, |m| m.min(d)));
        }
    }
    best
}

/// Rectangular grid in a constant-z plane. Element `(r, c)` sits at
/// `origin + (c·pitch, r·pitch, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    pub pitch: f64,
    pub origin: [f64; 3],
}

impl GridSpec {
    fn positions(&self) -> Result<Vec<Vec3>> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Config("grid needs at least one row and one column".into()));
        }
        if !(self.pitch > 0.0) || !self.pitch.is_finite() {
            return Err(Error::Config(format!(
                "grid pitch must be positive, got {}",
                self.pitch
            )));
        }
        let o = Vec3::from(self.origin);
        Ok((0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .map(|(r, c)| o + Vec3::new(c as f64 * self.pitch, r as f64 * self.pitch, 0.0))
            .collect())
    }
}

/// How TX and RX positions are produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ArrayLayout {
    /// Independent TX and RX grids.
    Grids { tx: GridSpec, rx: GridSpec },
    /// Stand-in for the 94 TX / 94 RX rectangular imager, facing +z.
    #[serde(rename = "frame-94")]
    Frame94 {
        #[serde(default)]
        center: [f64; 3],
    },
    /// Explicit element list, same schema as the array layout file.
    Explicit { tx: Vec<[f64; 3]>, rx: Vec<[f64; 3]> },
}

impl Default for ArrayLayout {
    fn default() -> Self {
        ArrayLayout::Frame94 { center: [0.0; 3] }
    }
}

/// Elements per TX row / RX column of the 94-element frame.
const FRAME_SIDE_ELEMENTS: usize = 47;
/// Element pitch along each frame side. The TX/RX midpoints (virtual
/// elements) land on a 2 mm grid.
const FRAME_PITCH: f64 = 0.004;

/// Builds a planar array and checks that no TX element coincides with an RX element.
pub fn build_planar_array(layout: &ArrayLayout) -> Result<AntennaArray> {
    let (name, tx, rx) = match layout {
        ArrayLayout::Grids { tx, rx } => ("grid".to_string(), tx.positions()?, rx.positions()?),
        ArrayLayout::Frame94 { center } => {
            let c = Vec3::from(*center);
            let span = FRAME_PITCH * (FRAME_SIDE_ELEMENTS - 1) as f64;
            let half_side = 0.5 * span + 0.5 * FRAME_PITCH;
            let along = |k: usize| -0.5 * span + k as f64 * FRAME_PITCH;
            // TX on the top and bottom edges, RX on the left and right edges
            let tx = [-half_side, half_side]
                .iter()
                .flat_map(|&y| (0..FRAME_SIDE_ELEMENTS).map(move |k| Vec3::new(along(k), y, 0.0)))
                .map(|p| p + c)
                .collect();
            let rx = [-half_side, half_side]
                .iter()
                .flat_map(|&x| (0..FRAME_SIDE_ELEMENTS).map(move |k| Vec3::new(x, along(k), 0.0)))
                .map(|p| p + c)
                .collect();
            ("frame-94".to_string(), tx, rx)
        }
        ArrayLayout::Explicit { tx, rx } => (
            "explicit".to_string(),
            tx.iter().copied().map(Vec3::from).collect(),
            rx.iter().copied().map(Vec3::from).collect(),
        ),
    };
    for (i, t) in tx.iter().enumerate() {
        if let Some(j) = rx.iter().position(|r| (t - r).norm() <= COINCIDENCE_TOL) {
            return Err(Error::Geometry(format!("tx element {i} overlaps rx element {j}")));
        }
    }
    AntennaArray::new(name, tx, rx)
}
