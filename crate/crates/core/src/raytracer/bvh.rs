//! Bounding volume hierarchy over mesh triangles, built by median split.

use crate::scene::{Aabb, TriangleMesh};
use crate::Vec3;

const LEAF_SIZE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    pub triangle: u32,
}

/// Precomputed triangle for Möller–Trumbore.
#[derive(Clone, Copy, Debug)]
struct Tri {
    v0: Vec3,
    e1: Vec3,
    e2: Vec3,
    index: u32,
}

impl Tri {
    /// Two-sided intersection, returns `t` in `(t_min, t_max)`.
    #[inline]
    fn intersect(&self, origin: &Vec3, dir: &Vec3, t_min: f64, t_max: f64) -> Option<f64> {
        let p = dir.cross(&self.e2);
        let det = self.e1.dot(&p);
        if det == 0.0 {
            return None;
        }
        let inv = 1.0 / det;
        let s = origin - self.v0;
        let u = s.dot(&p) * inv;
        if !(0.0..=1.0).contains(&u) {
            return None;
        }
        let q = s.cross(&self.e1);
        let v = dir.dot(&q) * inv;
        if v < 0.0 || u + v > 1.0 {
            return None;
        }
        let t = self.e2.dot(&q) * inv;
        (t > t_min && t < t_max).then_some(t)
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    bounds: Aabb,
    /// Leaf: first triangle. Interior: index of the right child (left is `self + 1`).
    offset: u32,
    /// Triangle count for leaves, 0 for interior nodes.
    count: u32,
}

#[derive(Clone, Debug)]
pub struct Bvh {
    nodes: Vec<Node>,
    tris: Vec<Tri>,
}

impl Bvh {
    pub fn build(mesh: &TriangleMesh) -> Self {
        let mut items: Vec<(Aabb, Vec3, u32)> = (0..mesh.len())
            .map(|i| {
                let [a, b, c] = mesh.triangle(i);
                let bounds = Aabb::from_points([&a, &b, &c]);
                (bounds, (a + b + c) / 3.0, i as u32)
            })
            .collect();
        let mut nodes = Vec::with_capacity(2 * mesh.len() / LEAF_SIZE + 1);
        build_node(&mut nodes, &mut items);
        let tris = items
            .iter()
            .map(|&(_, _, i)| {
                let [a, b, c] = mesh.triangle(i as usize);
                Tri {
                    v0: a,
                    e1: b - a,
                    e2: c - a,
                    index: i,
                }
            })
            .collect();
        Bvh { nodes, tris }
    }

    /// Closest hit with `t` in `(t_min, t_max)`, ignoring triangle `skip`.
    pub fn closest_hit(&self, origin: &Vec3, dir: &Vec3, t_min: f64, t_max: f64, skip: Option<u32>) -> Option<Hit> {
        let inv_dir = dir.map(|c| 1.0 / c);
        let mut best: Option<Hit> = None;
        let mut limit = t_max;
        let mut stack = [0u32; 64];
        let mut top = 1usize;
        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            if node.bounds.hit(origin, &inv_dir, t_min, limit).is_none() {
                continue;
            }
            if node.count > 0 {
                let start = node.offset as usize;
                for tri in &self.tris[start..start + node.count as usize] {
                    if Some(tri.index) == skip {
                        continue;
                    }
                    if let Some(t) = tri.intersect(origin, dir, t_min, limit) {
                        limit = t;
                        best = Some(Hit { t, triangle: tri.index });
                    }
                }
            } else {
                let here = stack[top] + 1;
                stack[top] = node.offset;
                stack[top + 1] = here;
                top += 2;
            }
        }
        best
    }

    /// True if any triangle other than `skip` blocks the open segment `(t_min, t_max)`.
    pub fn occluded(&self, origin: &Vec3, dir: &Vec3, t_min: f64, t_max: f64, skip: Option<u32>) -> bool {
        let inv_dir = dir.map(|c| 1.0 / c);
        let mut stack = [0u32; 64];
        let mut top = 1usize;
        while top > 0 {
            top -= 1;
            let node = &self.nodes[stack[top] as usize];
            if node.bounds.hit(origin, &inv_dir, t_min, t_max).is_none() {
                continue;
            }
            if node.count > 0 {
                let start = node.offset as usize;
                let blocked = self.tris[start..start + node.count as usize]
                    .iter()
                    .any(|tri| Some(tri.index) != skip && tri.intersect(origin, dir, t_min, t_max).is_some());
                if blocked {
                    return true;
                }
            } else {
                let here = stack[top] + 1;
                stack[top] = node.offset;
                stack[top + 1] = here;
                top += 2;
            }
        }
        false
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            let n = &nodes[i];
            if n.count > 0 {
                1
            } else {
                1 + go(nodes, i + 1).max(go(nodes, n.offset as usize))
            }
        }
        go(&self.nodes, 0)
    }
}

/// Appends the subtree for `items` and reorders `items` into leaf order.
fn build_node(nodes: &mut Vec<Node>, items: &mut [(Aabb, Vec3, u32)]) -> usize {
    fn recurse(nodes: &mut Vec<Node>, items: &mut [(Aabb, Vec3, u32)], first: usize) -> usize {
        let bounds = items.iter().fold(Aabb::empty(), |b, it| b.union(&it.0));
        let me = nodes.len();
        nodes.push(Node {
            bounds,
            offset: first as u32,
            count: items.len() as u32,
        });
        if items.len() <= LEAF_SIZE {
            return me;
        }
        let centroids = Aabb::from_points(items.iter().map(|it| &it.1));
        let axis = centroids.major_axis();
        if centroids.extent()[axis] <= 0.0 {
            // coincident centroids cannot be split
            return me;
        }
        let mid = items.len() / 2;
        items.select_nth_unstable_by(mid, |a, b| a.1[axis].total_cmp(&b.1[axis]).then(a.2.cmp(&b.2)));
        let (left, right) = items.split_at_mut(mid);
        recurse(nodes, left, first);
        let right_index = recurse(nodes, right, first + mid);
        nodes[me].offset = right_index as u32;
        nodes[me].count = 0;
        me
    }
    recurse(nodes, items, 0)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::raytracer::material::uniform_sphere;

    /// Random triangle soup inside the unit cube.
    fn soup(n: usize, seed: u64) -> TriangleMesh {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = Vec::new();
        let mut t = Vec::new();
        for i in 0..n {
            let c = Vec3::new(rng.random(), rng.random(), rng.random());
            for _ in 0..3 {
                v.push(c + 0.05 * Vec3::new(rng.random(), rng.random(), rng.random()));
            }
            t.push([3 * i as u32, 3 * i as u32 + 1, 3 * i as u32 + 2]);
        }
        TriangleMesh::new(v, t).unwrap()
    }

    fn brute_force(mesh: &TriangleMesh, o: &Vec3, d: &Vec3) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        for i in 0..mesh.len() {
            let [a, b, c] = mesh.triangle(i);
            let tri = Tri {
                v0: a,
                e1: b - a,
                e2: c - a,
                index: i as u32,
            };
            if let Some(t) = tri.intersect(o, d, 1e-9, f64::INFINITY) {
                if best.is_none_or(|h| t < h.t) {
                    best = Some(Hit { t, triangle: i as u32 });
                }
            }
        }
        best
    }

    #[test]
    fn matches_brute_force() {
        let mesh = soup(500, 1);
        let bvh = Bvh::build(&mesh);
        assert!(bvh.depth() < 20);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut hits = 0;
        for _ in 0..2000 {
            let o = Vec3::new(0.5, 0.5, 0.5) + 2.0 * uniform_sphere(&mut rng);
            let d = (Vec3::new(rng.random(), rng.random(), rng.random()) - o).normalize();
            let expected = brute_force(&mesh, &o, &d);
            assert_eq!(bvh.closest_hit(&o, &d, 1e-9, f64::INFINITY, None), expected);
            assert_eq!(bvh.occluded(&o, &d, 1e-9, f64::INFINITY, None), expected.is_some());
            hits += expected.is_some() as usize;
        }
        assert!(hits > 100);
    }

    #[test]
    fn skip_and_limits() {
        let mesh = TriangleMesh::from_obj_str("v -1 -1 1\nv 1 -1 1\nv 0 1 1\nf 1 2 3\n").unwrap();
        let bvh = Bvh::build(&mesh);
        let o = Vec3::zeros();
        let d = Vec3::z();
        assert_eq!(bvh.closest_hit(&o, &d, 0.0, 10.0, None).unwrap().t, 1.0);
        assert!(bvh.closest_hit(&o, &d, 0.0, 10.0, Some(0)).is_none());
        assert!(bvh.closest_hit(&o, &d, 0.0, 0.5, None).is_none());
        assert!(bvh.closest_hit(&o, &-d, 0.0, 10.0, None).is_none());
        // back side is hit too
        assert!(bvh
            .closest_hit(&Vec3::new(0.0, 0.0, 2.0), &-d, 0.0, 10.0, None)
            .is_some());
    }
}
