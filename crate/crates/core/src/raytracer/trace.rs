use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bvh::Bvh;
use super::paths::{PathSet, PropagationPath, TraceMeta};
use crate::rng::ray_rng;
use crate::{Error, Result, Scene, Vec3};

/// Minimum hit distance along a ray (m); suppresses self-intersection.
const T_MIN: f64 = 1e-9;
/// Rays per parallel work item.
const BLOCK: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TraceConfig {
    pub rays_per_tx: u64,
    pub max_bounces: u32,
    /// Capture radius around each RX (m). `None` uses half the minimum RX pitch.
    pub perception_radius: Option<f64>,
    pub rng_seed: u64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            rays_per_tx: 100_000,
            max_bounces: 3,
            perception_radius: None,
            rng_seed: 0,
        }
    }
}

impl TraceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rays_per_tx == 0 {
            return Err(Error::Config("rays_per_tx must be at least 1".into()));
        }
        if self.max_bounces == 0 {
            return Err(Error::Config("max_bounces must be at least 1".into()));
        }
        if let Some(r) = self.perception_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::Config(format!("perception_radius must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

/// Launches `rays_per_tx` rays from every TX into the cone subtended by the
/// mesh bounding sphere, bounces them off the mesh with the scene material and
/// records every unoccluded passage through an RX perception sphere.
///
/// The result depends only on the scene and `config`; the thread count does
/// not affect it.
pub fn trace_paths(scene: &Scene, config: &TraceConfig) -> Result<PathSet> {
    config.validate()?;
    let mesh = scene.mesh();
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let array = scene.array();
    let radius = match config.perception_radius {
        Some(r) => r,
        None => {
            0.5 * array
                .min_rx_pitch()
                .ok_or_else(|| Error::Config("perception_radius is required for a single-receiver array".into()))?
        }
    };
    let mut meta = TraceMeta::default();
    let aperture = array.aperture();
    if aperture > 0.0 && radius > 0.1 * aperture {
        meta.warnings.push(format!(
            "perception radius {radius} m exceeds 10% of the array aperture ({aperture} m)"
        ));
    }

    let bvh = Bvh::build(mesh);
    let (center, sphere_radius) = mesh.bounding_sphere();
    let tracer = RayTracer {
        scene,
        bvh: &bvh,
        radius,
        max_bounces: config.max_bounces,
        seed: config.rng_seed,
    };

    let blocks_per_tx = config.rays_per_tx.div_ceil(BLOCK);
    let work: Vec<(u32, u64)> = (0..array.tx().len() as u32)
        .flat_map(|tx| (0..blocks_per_tx).map(move |b| (tx, b)))
        .collect();
    let results: Vec<(Vec<PropagationPath>, u64)> = work
        .par_iter()
        .map(|&(tx, block)| {
            let cone = LaunchCone::new(&array.tx()[tx as usize], &center, sphere_radius);
            let start = block * BLOCK;
            let end = (start + BLOCK).min(config.rays_per_tx);
            let mut paths = Vec::new();
            let mut hits = 0;
            for ray in start..end {
                hits += tracer.trace_ray(tx, ray, &cone, &mut paths) as u64;
            }
            (paths, hits)
        })
        .collect();

    meta.rays_launched = config.rays_per_tx * array.tx().len() as u64;
    meta.rays_hit = results.iter().map(|r| r.1).sum();
    let paths = results.into_iter().flat_map(|r| r.0).collect();
    let echo = TraceConfig {
        perception_radius: Some(radius),
        ..config.clone()
    };
    PathSet::new(array.tx().len(), array.rx().len(), paths, echo, scene.material(), meta)
}

/// Uniform directions over the cone from an antenna to a bounding sphere.
struct LaunchCone {
    axis: Vec3,
    u: Vec3,
    v: Vec3,
    cos_max: f64,
}

impl LaunchCone {
    fn new(apex: &Vec3, center: &Vec3, radius: f64) -> Self {
        let to_center = center - apex;
        let dist = to_center.norm();
        // apex inside the sphere: launch over the full sphere
        let (axis, cos_max) = if dist <= radius || dist == 0.0 {
            (Vec3::z(), -1.0)
        } else {
            let sin_max = radius / dist;
            (to_center / dist, (1.0 - sin_max * sin_max).sqrt())
        };
        let (u, v) = orthonormal_basis(&axis);
        LaunchCone { axis, u, v, cos_max }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Vec3 {
        let cos_t = 1.0 - rng.random::<f64>() * (1.0 - self.cos_max);
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        (self.axis * cos_t + self.u * (sin_t * phi.cos()) + self.v * (sin_t * phi.sin())).normalize()
    }
}

fn orthonormal_basis(n: &Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = n.cross(&helper).normalize();
    (u, n.cross(&u))
}

/// Entry distance of a ray into a sphere, clamped to 0 when starting inside.
fn sphere_entry(origin: &Vec3, dir: &Vec3, center: &Vec3, radius: f64) -> Option<f64> {
    let oc = origin - center;
    let b = oc.dot(dir);
    let c = oc.norm_squared() - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t_exit = -b + sq;
    (t_exit > 0.0).then(|| (-b - sq).max(0.0))
}

struct RayTracer<'a> {
    scene: &'a Scene,
    bvh: &'a Bvh,
    radius: f64,
    max_bounces: u32,
    seed: u64,
}

impl RayTracer<'_> {
    /// Follows one ray, appending captured paths. Returns whether it hit the mesh.
    fn trace_ray(&self, tx: u32, ray: u64, cone: &LaunchCone, out: &mut Vec<PropagationPath>) -> bool {
        let mesh = self.scene.mesh();
        let rx_positions = self.scene.array().rx();
        let material = self.scene.material();

        let mut origin = self.scene.array().tx()[tx as usize];
        let mut dir = cone.sample(&mut ray_rng(self.seed, tx, ray, 0));
        let mut next = self.bvh.closest_hit(&origin, &dir, T_MIN, f64::INFINITY, None);
        let mut hit_points = Vec::new();
        let mut facets = Vec::new();
        let mut travelled = 0.0;

        for bounce in 1..=self.max_bounces {
            let Some(hit) = next else { break };
            let point = origin + dir * hit.t;
            travelled += hit.t;
            let mut normal = mesh.normals()[hit.triangle as usize];
            let cos_in = dir.dot(&normal);
            if cos_in == 0.0 {
                break;
            }
            if cos_in > 0.0 {
                // surfaces reflect on both sides
                normal = -normal;
            }
            let out_dir = material.scatter(&dir, &normal, &mut ray_rng(self.seed, tx, ray, bounce));
            hit_points.push(point);
            facets.push(hit.triangle);

            next = self
                .bvh
                .closest_hit(&point, &out_dir, T_MIN, f64::INFINITY, Some(hit.triangle));
            let blocked_at = next.map_or(f64::INFINITY, |h| h.t);
            for (rx, rx_pos) in rx_positions.iter().enumerate() {
                let Some(t_enter) = sphere_entry(&point, &out_dir, rx_pos, self.radius) else {
                    continue;
                };
                if blocked_at < t_enter {
                    continue;
                }
                let to_rx = rx_pos - point;
                let dist = to_rx.norm();
                if dist > 0.0
                    && self
                        .bvh
                        .occluded(&point, &(to_rx / dist), T_MIN, dist, Some(hit.triangle))
                {
                    continue;
                }
                out.push(PropagationPath {
                    tx_index: tx,
                    rx_index: rx as u32,
                    ray_index: ray,
                    hit_points: hit_points.clone(),
                    facets: facets.clone(),
                    total_length: travelled + dist,
                });
            }
            origin = point;
            dir = out_dir;
        }
        !hit_points.is_empty()
    }
}
