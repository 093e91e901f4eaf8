use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::imaging::VoxelGrid;
use crate::raytracer::TraceConfig;
use crate::scene::{Aabb, ArrayLayout, MeshFormat};
use crate::signal::SfcwConfig;
use crate::{io, Error, Result, Vec3};

/// Class labels accepted by the dataset tooling.
pub const CLASS_LABELS: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub label: String,
    /// OBJ or binary STL, chosen by extension. Relative paths resolve against
    /// the config file's directory.
    pub mesh: PathBuf,
}

/// Viewing-angle sampler: each angle is uniform in `±range` degrees; the mesh
/// center is placed `standoff_m` in front of the array centroid along +z.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoseSampler {
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub roll_deg: f64,
    pub standoff_m: f64,
}

impl Default for PoseSampler {
    fn default() -> Self {
        PoseSampler {
            azimuth_deg: 20.0,
            elevation_deg: 20.0,
            roll_deg: 10.0,
            standoff_m: 0.30,
        }
    }
}

/// Imaging grid centered on each posed mesh's bounding box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub spacing: [f64; 3],
    pub counts: [usize; 3],
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            spacing: [0.005; 3],
            counts: [128, 128, 64],
        }
    }
}

impl GridConfig {
    pub fn around(&self, bounds: &Aabb) -> Result<VoxelGrid> {
        VoxelGrid::centered(bounds.center(), Vec3::from(self.spacing), self.counts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub classes: Vec<ClassSpec>,
    #[serde(default)]
    pub pose: PoseSampler,
    #[serde(default = "default_alpha_range")]
    pub alpha_range: [f64; 2],
    pub samples_per_class: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub array: ArrayLayout,
    /// `rng_seed` is ignored; every sample derives its own seed.
    #[serde(default)]
    pub trace: TraceConfig,
    #[serde(default)]
    pub sfcw: SfcwConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_alpha_range() -> [f64; 2] {
    [0.1, 0.5]
}

impl GenerationConfig {
    /// Loads a JSON config and resolves relative mesh paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: GenerationConfig = serde_json::from_slice(&io::read_file(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for class in &mut cfg.classes {
            if class.mesh.is_relative() {
                class.mesh = base.join(&class.mesh);
            }
        }
        if let Some(out) = &cfg.output_dir {
            if out.is_relative() {
                cfg.output_dir = Some(base.join(out));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::Config("at least one class is required".into()));
        }
        for (i, c) in self.classes.iter().enumerate() {
            if !CLASS_LABELS.contains(&c.label.as_str()) {
                return Err(Error::Config(format!("label {:?} is not one of A..H", c.label)));
            }
            if self.classes[..i].iter().any(|o| o.label == c.label) {
                return Err(Error::Config(format!("label {:?} appears more than once", c.label)));
            }
            if MeshFormat::from_path(&c.mesh).is_none() {
                return Err(Error::Config(format!(
                    "{}: mesh must be .obj or .stl",
                    c.mesh.display()
                )));
            }
        }
        if self.samples_per_class == 0 {
            return Err(Error::Config("samples_per_class must be at least 1".into()));
        }
        let [lo, hi] = self.alpha_range;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::Config(format!(
                "alpha_range {:?} must satisfy 0 <= lo <= hi <= 1",
                self.alpha_range
            )));
        }
        let p = &self.pose;
        if [p.azimuth_deg, p.elevation_deg, p.roll_deg]
            .iter()
            .any(|a| !(a.is_finite() && *a >= 0.0))
        {
            return Err(Error::Config(
                "pose angle ranges must be finite and non-negative".into(),
            ));
        }
        if !(p.standoff_m > 0.0) {
            return Err(Error::Config("standoff_m must be positive".into()));
        }
        self.trace.validate()?;
        VoxelGrid::new(Vec3::zeros(), Vec3::from(self.grid.spacing), self.grid.counts)?;
        Ok(())
    }

    pub fn total_samples(&self) -> usize {
        self.classes.len() * self.samples_per_class
    }
}
