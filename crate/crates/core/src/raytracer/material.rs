//! Reflection law: a blend of a mirror reflection and a cosine-weighted
//! diffuse lobe, weighted by the material's `alpha`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

const UNIT_TOL: f64 = 1e-9;
/// Blends or diffuse sums shorter than this are resampled.
const DEGENERATE_LEN: f64 = 1e-6;

/// Diffuse weight `alpha ∈ [0, 1]`: 0 is a perfect mirror, 1 fully diffuse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlphaRecord", into = "AlphaRecord")]
pub struct MaterialParams {
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct AlphaRecord {
    alpha: f64,
}

impl TryFrom<AlphaRecord> for MaterialParams {
    type Error = Error;
    fn try_from(r: AlphaRecord) -> Result<Self> {
        MaterialParams::new(r.alpha)
    }
}

impl From<MaterialParams> for AlphaRecord {
    fn from(m: MaterialParams) -> Self {
        AlphaRecord { alpha: m.alpha }
    }
}

impl MaterialParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Config(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(MaterialParams { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Outgoing direction for a ray arriving along `t_i` at a surface with
    /// front-facing normal `n` (`t_i·n < 0`).
    pub fn scatter<R: Rng + ?Sized>(&self, t_i: &Vec3, n: &Vec3, rng: &mut R) -> Vec3 {
        let t_s = reflect(t_i, n);
        if self.alpha == 0.0 {
            return t_s;
        }
        loop {
            let t_d = diffuse_direction(n, rng);
            if let Some(out) = blend(self.alpha, &t_d, &t_s) {
                return out;
            }
        }
    }
}

#[inline]
fn reflect(t_i: &Vec3, n: &Vec3) -> Vec3 {
    t_i - 2.0 * t_i.dot(n) * n
}

fn check_unit(name: &str, v: &Vec3) -> Result<()> {
    if (v.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::Geometry(format!(
            "{name} is not unit length (|{name}| = {})",
            v.norm()
        )));
    }
    Ok(())
}

/// Mirror reflection `t_i − 2(t_i·n)n`.
///
/// Rejects non-unit inputs and rays that do not strike the front face.
pub fn specular_direction(t_i: &Vec3, n: &Vec3) -> Result<Vec3> {
    check_unit("t_i", t_i)?;
    check_unit("n", n)?;
    if t_i.dot(n) >= 0.0 {
        return Err(Error::Geometry("grazing or back-face incidence (t_i·n >= 0)".into()));
    }
    Ok(reflect(t_i, n))
}

/// Uniform sample on the unit sphere.
pub fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(s * phi.cos(), s * phi.sin(), z)
}

/// `normalize(n + r)` for a given sphere sample `r`; `None` at the antipode.
pub fn diffuse_from_sample(n: &Vec3, r: &Vec3) -> Option<Vec3> {
    let sum = n + r;
    let len = sum.norm();
    (len >= DEGENERATE_LEN).then(|| sum / len)
}

/// `normalize(n + r)` with `r` drawn by `sample`, redrawn until non-degenerate.
/// The result is cosine-distributed about `n`.
pub fn diffuse_direction_with(n: &Vec3, mut sample: impl FnMut() -> Vec3) -> Vec3 {
    loop {
        if let Some(d) = diffuse_from_sample(n, &sample()) {
            return d;
        }
    }
}

pub fn diffuse_direction<R: Rng + ?Sized>(n: &Vec3, rng: &mut R) -> Vec3 {
    diffuse_direction_with(n, || uniform_sphere(rng))
}

fn blend(alpha: f64, t_d: &Vec3, t_s: &Vec3) -> Option<Vec3> {
    if alpha == 0.0 {
        return Some(*t_s);
    }
    if alpha == 1.0 {
        return Some(*t_d);
    }
    let v = alpha * t_d + (1.0 - alpha) * t_s;
    let len = v.norm();
    (len >= DEGENERATE_LEN).then(|| v / len)
}

/// `normalize(α·t_d + (1−α)·t_s)`. The blend is renormalized so ray
/// directions stay unit length; `α = 0` and `α = 1` return `t_s` and `t_d`
/// unchanged.
///
/// Fails when the blend cancels (`t_d` antiparallel to `t_s`); callers redraw
/// `t_d` in that case.
pub fn mix_direction(material: MaterialParams, t_d: &Vec3, t_s: &Vec3) -> Result<Vec3> {
    check_unit("t_d", t_d)?;
    check_unit("t_s", t_s)?;
    blend(material.alpha, t_d, t_s).ok_or_else(|| Error::Geometry("blend has zero length; resample t_d".into()))
}

/// Angle between two vectors, accurate near 0 and π.
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}
