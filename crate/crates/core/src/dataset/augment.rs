//! Training-time image augmentation: random flips, rotation, scaling and a
//! Gaussian blur on the intensity plane.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::{read_manifest, write_manifest, ManifestEntry, MANIFEST_FILE};
use crate::imaging::{normalize_pair, Image, RadarImagePair};
use crate::rng::{counter_rng, Domain};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentConfig {
    /// Each enabled flip fires with probability 0.5.
    pub flip_horizontal: bool,
    pub flip_vertical: bool,
    /// Rotation angle range, degrees.
    pub rotation_deg: [f64; 2],
    /// Scale factor range; the result is re-padded to the original size.
    pub scale: [f64; 2],
    /// Gaussian blur standard deviation in pixels, intensity plane only.
    pub blur_sigma: f64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            flip_horizontal: true,
            flip_vertical: true,
            rotation_deg: [0.0, 30.0],
            scale: [0.70, 1.00],
            blur_sigma: 1.0,
        }
    }
}

impl AugmentConfig {
    /// No flips, rotation or scaling; only the (possibly negligible) blur.
    pub fn geometric_identity(blur_sigma: f64) -> Self {
        AugmentConfig {
            flip_horizontal: false,
            flip_vertical: false,
            rotation_deg: [0.0, 0.0],
            scale: [1.0, 1.0],
            blur_sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [r0, r1] = self.rotation_deg;
        let [s0, s1] = self.scale;
        if !(r0.is_finite() && r1.is_finite() && r0 <= r1) {
            return Err(Error::Config(format!("bad rotation range {:?}", self.rotation_deg)));
        }
        if !(s0 > 0.0 && s0 <= s1 && s1.is_finite()) {
            return Err(Error::Config(format!("bad scale range {:?}", self.scale)));
        }
        if !(self.blur_sigma > 0.0 && self.blur_sigma.is_finite()) {
            return Err(Error::Config(format!(
                "blur_sigma must be positive, got {}",
                self.blur_sigma
            )));
        }
        Ok(())
    }
}

fn uniform<R: Rng>(rng: &mut R, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Randomized geometric transform (identical on both planes) followed by a
/// blur of the intensity plane. Unnormalized pairs are normalized first.
pub fn augment(pair: &RadarImagePair, cfg: &AugmentConfig, seed: u64) -> Result<RadarImagePair> {
    cfg.validate()?;
    let mut rng = counter_rng(seed, Domain::Augment, 0, 0, 0);
    // always draw so the stream layout does not depend on the flags
    let flip_h = rng.random_bool(0.5) && cfg.flip_horizontal;
    let flip_v = rng.random_bool(0.5) && cfg.flip_vertical;
    let angle = uniform(&mut rng, cfg.rotation_deg).to_radians();
    let scale = uniform(&mut rng, cfg.scale);

    let mut out = if pair.normalized {
        pair.clone()
    } else {
        normalize_pair(pair)
    };
    for plane in [&mut out.intensity, &mut out.depth] {
        if flip_h {
            *plane = flip_horizontal(plane);
        }
        if flip_v {
            *plane = flip_vertical(plane);
        }
        if angle != 0.0 || scale != 1.0 {
            *plane = rotate_scale(plane, angle, scale);
        }
    }
    out.intensity = gaussian_blur(&out.intensity, cfg.blur_sigma);
    if let Some(p) = &mut out.provenance {
        p.augment_seed = Some(seed);
    }
    Ok(out)
}

/// `(i, j) → (i, W−1−j)`.
pub fn flip_horizontal(img: &Image) -> Image {
    let w = img.cols();
    Image::from_fn(img.rows(), w, |i, j| img.get(i, w - 1 - j))
}

/// `(i, j) → (H−1−i, j)`.
pub fn flip_vertical(img: &Image) -> Image {
    let h = img.rows();
    Image::from_fn(h, img.cols(), |i, j| img.get(h - 1 - i, j))
}

/// Bilinear sample with zero outside the image.
fn sample_bilinear(img: &Image, y: f64, x: f64) -> f64 {
    let (y0, x0) = (y.floor(), x.floor());
    let (fy, fx) = (y - y0, x - x0);
    let mut acc = 0.0;
    for (dy, wy) in [(0, 1.0 - fy), (1, fy)] {
        for (dx, wx) in [(0, 1.0 - fx), (1, fx)] {
            let w = wy * wx;
            if w == 0.0 {
                continue;
            }
            let (yy, xx) = (y0 as i64 + dy, x0 as i64 + dx);
            if yy >= 0 && xx >= 0 && (yy as usize) < img.rows() && (xx as usize) < img.cols() {
                acc += w * img.get(yy as usize, xx as usize);
            }
        }
    }
    acc
}

/// Rotates by `angle` (radians, counter-clockwise on screen) and scales by
/// `scale` about the image center, keeping the original dimensions.
pub fn rotate_scale(img: &Image, angle: f64, scale: f64) -> Image {
    let cy = 0.5 * (img.rows() as f64 - 1.0);
    let cx = 0.5 * (img.cols() as f64 - 1.0);
    let (s, c) = angle.sin_cos();
    Image::from_fn(img.rows(), img.cols(), |i, j| {
        // inverse map: output pixel -> source position
        let (dy, dx) = (i as f64 - cy, j as f64 - cx);
        let sx = (c * dx - s * dy) / scale;
        let sy = (s * dx + c * dy) / scale;
        sample_bilinear(img, cy + sy, cx + sx)
    })
}

/// Separable Gaussian blur; kernel truncated at 3σ and renormalized over
/// in-bounds taps at the border.
pub fn gaussian_blur(img: &Image, sigma: f64) -> Image {
    let radius = (3.0 * sigma).ceil() as i64;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let pass = |src: &Image, horizontal: bool| {
        Image::from_fn(src.rows(), src.cols(), |i, j| {
            let (mut acc, mut norm) = (0.0, 0.0);
            for (t, w) in (-radius..=radius).zip(&kernel) {
                let (ii, jj) = if horizontal {
                    (i as i64, j as i64 + t)
                } else {
                    (i as i64 + t, j as i64)
                };
                if ii >= 0 && jj >= 0 && (ii as usize) < src.rows() && (jj as usize) < src.cols() {
                    acc += w * src.get(ii as usize, jj as usize);
                    norm += w;
                }
            }
            acc / norm
        })
    };
    pass(&pass(img, true), false)
}

/// Materializes augmented copies of every pair listed in `in_dir`'s manifest.
/// Sample `k` uses seed `counter(seed, k)`.
pub fn augment_dataset(in_dir: &Path, out_dir: &Path, cfg: &AugmentConfig, seed: u64) -> Result<Vec<ManifestEntry>> {
    cfg.validate()?;
    let entries = read_manifest(&in_dir.join(MANIFEST_FILE))?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let out: Vec<ManifestEntry> = entries
        .par_iter()
        .enumerate()
        .map(|(k, entry)| {
            let sample_seed = counter_rng(seed, Domain::Augment, 1, k as u64, 0).random::<u64>();
            let pair = RadarImagePair::read(&in_dir.join(&entry.file))?;
            let augmented = augment(&pair, cfg, sample_seed)?;
            augmented.write(&out_dir.join(&entry.file))?;
            Ok(ManifestEntry {
                augment_seed: Some(sample_seed),
                ..entry.clone()
            })
        })
        .collect::<Result<_>>()?;
    write_manifest(&out_dir.join(MANIFEST_FILE), &out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::VoxelGrid;
    use crate::Vec3;

    fn one_hot(rows: usize, cols: usize, at: (usize, usize)) -> Image {
        Image::from_fn(rows, cols, |i, j| if (i, j) == at { 1.0 } else { 0.0 })
    }

    fn pair_of(intensity: Image, depth: Image) -> RadarImagePair {
        let grid = VoxelGrid::new(
            Vec3::zeros(),
            Vec3::repeat(0.005),
            [intensity.rows(), intensity.cols(), 4],
        )
        .unwrap();
        let mut p = RadarImagePair::new(intensity, depth, grid);
        p.normalized = true;
        p
    }

    #[test]
    fn horizontal_flip_reflects_columns() {
        let img = one_hot(5, 7, (1, 2));
        let f = flip_horizontal(&img);
        assert_eq!(f.get(1, 7 - 1 - 2), 1.0);
        assert_eq!(f.data().iter().sum::<f64>(), 1.0);
        assert_eq!(flip_horizontal(&f), img);
        assert_eq!(flip_vertical(&flip_vertical(&img)), img);
    }

    #[test]
    fn identity_transform_with_vanishing_blur() {
        let img = Image::from_fn(6, 9, |i, j| ((i * 9 + j) as f64).sin().abs());
        assert_eq!(rotate_scale(&img, 0.0, 1.0), img);
        let p = pair_of(img.clone(), img.clone());
        let out = augment(&p, &AugmentConfig::geometric_identity(1e-3), 11).unwrap();
        assert_eq!(out.intensity, img);
        assert_eq!(out.depth, img);
    }

    #[test]
    fn blur_preserves_constant_and_spreads_impulse() {
        let flat = Image::from_fn(8, 8, |_, _| 0.5);
        for v in gaussian_blur(&flat, 1.5).data() {
            assert!((v - 0.5).abs() < 1e-15);
        }
        let b = gaussian_blur(&one_hot(15, 15, (7, 7)), 1.0);
        assert!((b.data().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(b.get(7, 7) < 1.0 && b.get(7, 8) > 0.0);
        assert!((b.get(7, 8) - b.get(8, 7)).abs() < 1e-15);
    }

    #[test]
    fn quarter_turn_moves_pixels_exactly() {
        let img = one_hot(5, 5, (0, 2));
        let r = rotate_scale(&img, std::f64::consts::FRAC_PI_2, 1.0);
        let (mut best, mut at) = (0.0, (0, 0));
        for i in 0..5 {
            for j in 0..5 {
                if r.get(i, j) > best {
                    best = r.get(i, j);
                    at = (i, j);
                }
            }
        }
        assert!((best - 1.0).abs() < 1e-12);
        assert_eq!(at, (2, 0));
    }

    #[test]
    fn downscale_pads_with_zero() {
        let img = Image::from_fn(10, 10, |_, _| 1.0);
        let s = rotate_scale(&img, 0.0, 0.7);
        assert_eq!(s.get(0, 0), 0.0);
        assert_eq!(s.get(5, 5), 1.0);
    }

    #[test]
    fn same_seed_same_output_and_records_seed() {
        let img = Image::from_fn(12, 12, |i, j| (i + 2 * j) as f64 / 40.0);
        let mut p = pair_of(img.clone(), img);
        p.provenance = Some(crate::imaging::Provenance {
            seed: 1,
            alpha: 0.2,
            pose: crate::RigidPose::identity(),
            view: None,
            path_count: 0,
            zero_paths: true,
            augment_seed: None,
        });
        let cfg = AugmentConfig::default();
        let a = augment(&p, &cfg, 5).unwrap();
        assert_eq!(a, augment(&p, &cfg, 5).unwrap());
        assert_eq!(a.provenance.unwrap().augment_seed, Some(5));
    }

    #[test]
    fn rejects_bad_config() {
        let blur = AugmentConfig {
            blur_sigma: 0.0,
            ..AugmentConfig::default()
        };
        assert!(blur.validate().is_err());
        let scale = AugmentConfig {
            scale: [1.0, 0.5],
            ..AugmentConfig::default()
        };
        assert!(scale.validate().is_err());
    }
}
