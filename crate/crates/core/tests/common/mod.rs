#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;

use radsim_core::{TriangleMesh, Vec3};

/// Square plate of side `2·half` in the plane `z = z0`, normal along ±z.
pub fn plate(z0: f64, half: f64) -> TriangleMesh {
    let v = vec![
        Vec3::new(-half, -half, z0),
        Vec3::new(half, -half, z0),
        Vec3::new(half, half, z0),
        Vec3::new(-half, half, z0),
    ];
    TriangleMesh::new(v, vec![[0, 1, 2], [0, 2, 3]]).unwrap()
}

/// Quad from four corners, split along the 0-2 diagonal.
pub fn quad(corners: [Vec3; 4]) -> (Vec<Vec3>, Vec<[u32; 3]>) {
    (corners.to_vec(), vec![[0, 1, 2], [0, 2, 3]])
}

/// Two plates meeting at a right angle along the y axis line through
/// `(0, ·, z0)`, opening toward −z (arms reach back to `z0 − arm`). Rays parallel to +z come back parallel
/// to −z, mirrored in x.
pub fn dihedral(z0: f64, arm: f64, half_y: f64) -> TriangleMesh {
    let a = [
        Vec3::new(0.0, -half_y, z0),
        Vec3::new(arm, -half_y, z0 - arm),
        Vec3::new(arm, half_y, z0 - arm),
        Vec3::new(0.0, half_y, z0),
    ];
    let b = [
        Vec3::new(0.0, -half_y, z0),
        Vec3::new(-arm, -half_y, z0 - arm),
        Vec3::new(-arm, half_y, z0 - arm),
        Vec3::new(0.0, half_y, z0),
    ];
    let mut vertices = a.to_vec();
    vertices.extend_from_slice(&b);
    TriangleMesh::new(vertices, vec![[0, 1, 2], [0, 2, 3], [4, 6, 5], [4, 7, 6]]).unwrap()
}

/// Icosahedron subdivided `levels` times and projected to a sphere.
/// Two levels give 320 faces.
pub fn icosphere(center: Vec3, radius: f64, levels: usize) -> (Vec<Vec3>, Vec<[u32; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut v: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut f: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..levels {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, v: &mut Vec<Vec3>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                v.push(((v[a as usize] + v[b as usize]) * 0.5).normalize());
                (v.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(f.len() * 4);
        for [a, b, c] in f {
            let ab = midpoint(a, b, &mut v);
            let bc = midpoint(b, c, &mut v);
            let ca = midpoint(c, a, &mut v);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        f = next;
    }
    (v.into_iter().map(|p| center + p * radius).collect(), f)
}

/// Binary STL writer, kept separate from the library's reader.
pub fn write_binary_stl(path: &Path, vertices: &[Vec3], triangles: &[[u32; 3]]) {
    let mut bytes = vec![0u8; 80];
    bytes.extend((triangles.len() as u32).to_le_bytes());
    for tri in triangles {
        let p: Vec<Vec3> = tri.iter().map(|&i| vertices[i as usize]).collect();
        let n = (p[1] - p[0]).cross(&(p[2] - p[0])).normalize();
        for q in std::iter::once(n).chain(p) {
            for c in q.iter() {
                bytes.extend((*c as f32).to_le_bytes());
            }
        }
        bytes.extend([0u8; 2]);
    }
    std::fs::write(path, bytes).unwrap();
}

pub fn write_obj(path: &Path, vertices: &[Vec3], triangles: &[[u32; 3]]) {
    let mut s = String::new();
    for v in vertices {
        s += &format!("v {} {} {}\n", v.x, v.y, v.z);
    }
    for t in triangles {
        s += &format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    std::fs::write(path, s).unwrap();
}

/// Largest value and its position in a slice.
pub fn argmax(values: &[f64]) -> (usize, f64) {
    values.iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (i, v)| if v > best.1 { (i, v) } else { best },
    )
}

/// Small generation setup: `classes` ellipsoid-like meshes written as OBJ
/// into `dir`, a 4×4 / 4×4 grid array and a coarse trace budget.
pub fn desk_config(dir: &Path, classes: usize, samples: usize) -> radsim_core::dataset::GenerationConfig {
    use radsim_core::dataset::{ClassSpec, GenerationConfig, GridConfig, CLASS_LABELS};
    use radsim_core::scene::{ArrayLayout, GridSpec};
    let specs = (0..classes)
        .map(|k| {
            let (v, f) = icosphere(Vec3::zeros(), 1.0, 1);
            let stretch = Vec3::new(0.03 + 0.005 * k as f64, 0.04 - 0.003 * k as f64, 0.015);
            let v: Vec<Vec3> = v.iter().map(|p| p.component_mul(&stretch)).collect();
            let file = dir.join(format!("class{k}.obj"));
            write_obj(&file, &v, &f);
            ClassSpec {
                label: CLASS_LABELS[k].to_string(),
                mesh: file,
            }
        })
        .collect();
    GenerationConfig {
        classes: specs,
        pose: Default::default(),
        alpha_range: [0.1, 0.5],
        samples_per_class: samples,
        base_seed: 2024,
        array: ArrayLayout::Grids {
            tx: GridSpec {
                rows: 4,
                cols: 4,
                pitch: 0.02,
                origin: [-0.03, -0.03, 0.0],
            },
            rx: GridSpec {
                rows: 4,
                cols: 4,
                pitch: 0.02,
                origin: [-0.02, -0.02, 0.0],
            },
        },
        trace: radsim_core::TraceConfig {
            rays_per_tx: 4000,
            max_bounces: 3,
            perception_radius: Some(0.005),
            rng_seed: 0,
        },
        sfcw: Default::default(),
        grid: GridConfig {
            spacing: [0.005; 3],
            counts: [24, 24, 12],
        },
        output_dir: None,
    }
}
