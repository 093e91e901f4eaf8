use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{io, Error, Result, Vec3};

/// Triangles with area at or below this (m²) are rejected.
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Vec3::repeat(f64::INFINITY),
            max: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        points.into_iter().fold(Aabb::empty(), |b, p| b.grow(p))
    }

    pub fn grow(self, p: &Vec3) -> Self {
        Aabb {
            min: self.min.inf(p),
            max: self.max.sup(p),
        }
    }

    pub fn union(self, other: &Aabb) -> Self {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }

    /// Index of the longest axis.
    pub fn major_axis(&self) -> usize {
        self.extent().imax()
    }

    /// Slab test; returns the parametric entry distance if the ray overlaps
    /// the box within `[t_min, t_max]`.
    #[inline]
    pub(crate) fn hit(&self, origin: &Vec3, inv_dir: &Vec3, t_min: f64, t_max: f64) -> Option<f64> {
        let mut lo = t_min;
        let mut hi = t_max;
        for a in 0..3 {
            let t0 = (self.min[a] - origin[a]) * inv_dir[a];
            let t1 = (self.max[a] - origin[a]) * inv_dir[a];
            let (t0, t1) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
            // NaN from 0 * inf falls through max/min unchanged
            lo = if t0 > lo { t0 } else { lo };
            hi = if t1 < hi { t1 } else { hi };
            if lo > hi {
                return None;
            }
        }
        Some(lo)
    }
}

/// Input format for [`TriangleMesh::load`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Stl,
}

impl MeshFormat {
    /// Guesses the format from a file extension (`.obj` or `.stl`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "obj" => Some(MeshFormat::Obj),
            "stl" => Some(MeshFormat::Stl),
            _ => None,
        }
    }
}

/// Triangle mesh with per-facet unit normals derived from winding order.
///
/// Positions are in meters. Normals follow the right-hand rule over
/// `(v0, v1, v2)`; any normals present in the source file are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    normals: Vec<Vec3>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::EmptyMesh);
        }
        if let Some(v) = vertices.iter().find(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::Geometry(format!("non-finite vertex {v:?}")));
        }
        let n = vertices.len();
        let mut normals = Vec::with_capacity(triangles.len());
        for (index, tri) in triangles.iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&i| i as usize >= n) {
                return Err(Error::Geometry(format!(
                    "triangle {index}: vertex index {bad} out of range ({n} vertices)"
                )));
            }
            let [a, b, c] = tri.map(|i| vertices[i as usize]);
            let cross = (b - a).cross(&(c - a));
            let area = 0.5 * cross.norm();
            if !(area > MIN_TRIANGLE_AREA) {
                return Err(Error::DegenerateTriangle { index, area });
            }
            normals.push(cross / cross.norm());
        }
        Ok(TriangleMesh {
            vertices,
            triangles,
            normals,
        })
    }

    pub fn load(path: &Path, format: MeshFormat) -> Result<Self> {
        let bytes = io::read_file(path)?;
        match format {
            MeshFormat::Obj => {
                let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse {
                    path: path.into(),
                    line: 0,
                    msg: e.to_string(),
                })?;
                parse_obj(text, path)
            }
            MeshFormat::Stl => parse_stl(&bytes, path),
        }
    }

    pub fn from_obj_str(text: &str) -> Result<Self> {
        parse_obj(text, Path::new("<memory>"))
    }

    pub fn from_stl_bytes(bytes: &[u8]) -> Result<Self> {
        parse_stl(bytes, Path::new("<memory>"))
    }

    /// Serializes to OBJ text with `v` and `f` records only.
    pub fn to_obj_string(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z);
        }
        for t in &self.triangles {
            let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        out
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, index: usize) -> [Vec3; 3] {
        self.triangles[index].map(|i| self.vertices[i as usize])
    }

    pub fn bounding_box(&self) -> Aabb {
        Aabb::from_points(self.triangles.iter().flatten().map(|&i| &self.vertices[i as usize]))
    }

    /// Bounding sphere of the bounding box: (center, radius).
    pub fn bounding_sphere(&self) -> (Vec3, f64) {
        let b = self.bounding_box();
        (b.center(), 0.5 * b.extent().norm())
    }

    /// Rigidly transforms the mesh; normals are re-derived from the new positions.
    pub fn transformed(&self, pose: &super::RigidPose) -> Result<Self> {
        let vertices = self.vertices.iter().map(|v| pose.apply_point(v)).collect();
        TriangleMesh::new(vertices, self.triangles.clone())
    }

    /// Copy translated so its bounding-box center sits at the origin.
    pub fn centered(&self) -> Self {
        let c = self.bounding_box().center();
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| v - c).collect(),
            triangles: self.triangles.clone(),
            normals: self.normals.clone(),
        }
    }
}

fn parse_obj(text: &str, path: &Path) -> Result<TriangleMesh> {
    let err = |line: usize, msg: String| Error::Parse {
        path: path.into(),
        line,
        msg,
    };
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let coords: Vec<f64> = fields
                    .take(3)
                    .map(|f| {
                        f.parse::<f64>()
                            .map_err(|e| err(lineno, format!("bad coordinate {f:?}: {e}")))
                    })
                    .collect::<Result<_>>()?;
                if coords.len() != 3 {
                    return Err(err(lineno, "vertex needs three coordinates".into()));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut face = Vec::new();
                for f in fields {
                    let idx_str = f.split('/').next().unwrap_or("");
                    let idx: i64 = idx_str
                        .parse()
                        .map_err(|e| err(lineno, format!("bad face index {f:?}: {e}")))?;
                    // 1-based, negative counts back from the latest vertex
                    let resolved = if idx > 0 { idx - 1 } else { vertices.len() as i64 + idx };
                    if idx == 0 || resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(err(lineno, format!("face index {idx} out of range")));
                    }
                    face.push(resolved as u32);
                }
                if face.len() < 3 {
                    return Err(err(lineno, "face needs at least three vertices".into()));
                }
                for k in 1..face.len() - 1 {
                    triangles.push([face[0], face[k], face[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, triangles)
}

fn parse_stl(bytes: &[u8], path: &Path) -> Result<TriangleMesh> {
    let err = |msg: String| Error::Parse {
        path: path.into(),
        line: 0,
        msg,
    };
    if bytes.len() < 84 {
        return Err(err("binary STL shorter than its 84-byte header".into()));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let expected = 84 + 50 * count;
    if bytes.len() != expected {
        return Err(err(format!(
            "binary STL declares {count} facets ({expected} bytes) but file has {} bytes",
            bytes.len()
        )));
    }
    let mut vertices = Vec::with_capacity(3 * count);
    let mut triangles = Vec::with_capacity(count);
    for facet in bytes[84..].chunks_exact(50) {
        // skip the stored normal (12 bytes)
        let mut corner = [0u32; 3];
        for (k, chunk) in facet[12..48].chunks_exact(12).enumerate() {
            let c: Vec<f64> = chunk
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64)
                .collect();
            corner[k] = vertices.len() as u32;
            vertices.push(Vec3::new(c[0], c[1], c[2]));
        }
        triangles.push(corner);
    }
    TriangleMesh::new(vertices, triangles)
}
