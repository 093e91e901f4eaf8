//! Toy hand-like meshes for trying the pipeline without real scans.

use std::path::Path;

use anyhow::{Context, Result};
use radsim_core::dataset::{ClassSpec, GenerationConfig, GridConfig, PoseSampler, CLASS_LABELS};
use radsim_core::scene::ArrayLayout;
use radsim_core::{TraceConfig, TriangleMesh, Vec3};

struct Builder {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
}

impl Builder {
    /// Axis-aligned box with outward winding.
    fn cuboid(&mut self, min: Vec3, max: Vec3) {
        let base = self.vertices.len() as u32;
        for k in 0..8 {
            let pick = |bit: usize, lo: f64, hi: f64| if k & bit != 0 { hi } else { lo };
            self.vertices.push(Vec3::new(
                pick(1, min.x, max.x),
                pick(2, min.y, max.y),
                pick(4, min.z, max.z),
            ));
        }
        const FACES: [[u32; 4]; 6] = [
            [0, 2, 3, 1],
            [4, 5, 7, 6],
            [0, 1, 5, 4],
            [2, 6, 7, 3],
            [0, 4, 6, 2],
            [1, 3, 7, 5],
        ];
        for [a, b, c, d] in FACES {
            self.triangles.push([base + a, base + b, base + c]);
            self.triangles.push([base + a, base + c, base + d]);
        }
    }
}

/// Palm plate plus five fingers; `extended` bit `f` stretches finger `f`.
fn toy_hand(extended: u8) -> Result<TriangleMesh> {
    let mut b = Builder {
        vertices: Vec::new(),
        triangles: Vec::new(),
    };
    b.cuboid(Vec3::new(-0.04, -0.045, -0.01), Vec3::new(0.04, 0.045, 0.01));
    for f in 0..5 {
        let x = -0.04 + 0.016 * f as f64;
        let length = if extended & (1 << f) != 0 { 0.07 } else { 0.02 };
        b.cuboid(
            Vec3::new(x + 0.002, 0.045, -0.008),
            Vec3::new(x + 0.014, 0.045 + length, 0.008),
        );
    }
    Ok(TriangleMesh::new(b.vertices, b.triangles)?)
}

const FINGER_PATTERNS: [u8; 8] = [0b00000, 0b00010, 0b00110, 0b01110, 0b11110, 0b11111, 0b00001, 0b10001];

pub fn write(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut classes = Vec::new();
    for (label, pattern) in CLASS_LABELS.iter().zip(FINGER_PATTERNS) {
        let file = format!("{label}.obj");
        let path = dir.join(&file);
        std::fs::write(&path, toy_hand(pattern)?.to_obj_string())
            .with_context(|| format!("writing {}", path.display()))?;
        classes.push(ClassSpec {
            label: label.to_string(),
            mesh: file.into(),
        });
    }
    let cfg = GenerationConfig {
        classes,
        pose: PoseSampler::default(),
        alpha_range: [0.1, 0.5],
        samples_per_class: 1,
        base_seed: 1,
        array: ArrayLayout::default(),
        trace: TraceConfig {
            rays_per_tx: 100_000,
            // the half-pitch default captures about one path per channel at
            // this budget, too few for the image to focus
            perception_radius: Some(0.01),
            ..TraceConfig::default()
        },
        sfcw: Default::default(),
        grid: GridConfig {
            spacing: [0.005; 3],
            counts: [40, 48, 12],
        },
        output_dir: Some("dataset".into()),
    };
    cfg.validate()?;
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg)? + "\n")
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
