use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{VoxelGrid, VoxelVolume};
use crate::signal::IfDataCube;
use crate::{AntennaArray, Error, Result, Vec3, SPEED_OF_LIGHT};

/// Backprojects the cube onto `grid` under a single-scatterer hypothesis:
///
/// `value(x) = | Σ_tx Σ_rx Σ_n s[tx][rx][n] · exp(+2πj·f_n·(|x_tx − x| + |x_rx − x|)/c) |`
///
/// The phase term factors into a TX part and an RX part, so the per-voxel
/// cost is one complex multiply-add per cube sample plus the per-element
/// phasor ramps.
pub fn matched_filter(cube: &IfDataCube, array: &AntennaArray, grid: &VoxelGrid) -> Result<VoxelVolume> {
    let (n_tx, n_rx, n_f) = cube.dims();
    if n_tx != array.tx().len() || n_rx != array.rx().len() {
        return Err(Error::Dimension(format!(
            "cube has {n_tx}x{n_rx} channels, array has {}x{}",
            array.tx().len(),
            array.rx().len()
        )));
    }
    let cfg = cube.config();
    let k0 = 2.0 * PI * cfg.f0() / SPEED_OF_LIGHT;
    let dk = 2.0 * PI * cfg.delta_f() / SPEED_OF_LIGHT;
    // split real/imaginary planes so the inner loops vectorize
    let (re, im): (Vec<f64>, Vec<f64>) = cube.samples().iter().map(|c| (c.re, c.im)).unzip();
    let samples = Planes { re: &re, im: &im };
    let [nx, ny, nz] = grid.counts();

    let columns: Vec<Vec<f64>> = (0..nx * ny)
        .into_par_iter()
        .map_init(
            || Scratch::new(n_tx, n_rx, n_f),
            |s, col| {
                let (i, j) = (col / ny, col % ny);
                (0..nz)
                    .map(|k| {
                        let x = grid.center_of(i, j, k);
                        s.voxel(&x, array, samples, k0, dk)
                    })
                    .collect()
            },
        )
        .collect();
    VoxelVolume::new(*grid, columns.into_iter().flatten().collect())
}

#[derive(Clone, Copy)]
struct Planes<'a> {
    re: &'a [f64],
    im: &'a [f64],
}

struct Scratch {
    n_f: usize,
    tx_re: Vec<f64>,
    tx_im: Vec<f64>,
    rx_re: Vec<f64>,
    rx_im: Vec<f64>,
    acc_re: Vec<f64>,
    acc_im: Vec<f64>,
}

impl Scratch {
    fn new(n_tx: usize, n_rx: usize, n_f: usize) -> Self {
        Scratch {
            n_f,
            tx_re: vec![0.0; n_tx * n_f],
            tx_im: vec![0.0; n_tx * n_f],
            rx_re: vec![0.0; n_rx * n_f],
            rx_im: vec![0.0; n_rx * n_f],
            acc_re: vec![0.0; n_f],
            acc_im: vec![0.0; n_f],
        }
    }

    fn voxel(&mut self, x: &Vec3, array: &AntennaArray, samples: Planes, k0: f64, dk: f64) -> f64 {
        let n_f = self.n_f;
        fill_ramps(&mut self.tx_re, &mut self.tx_im, array.tx(), x, k0, dk, n_f);
        fill_ramps(&mut self.rx_re, &mut self.rx_im, array.rx(), x, k0, dk, n_f);
        let n_rx = array.rx().len();
        let (mut total_re, mut total_im) = (0.0, 0.0);
        for tx in 0..array.tx().len() {
            let (acc_re, acc_im) = (&mut self.acc_re[..n_f], &mut self.acc_im[..n_f]);
            acc_re.fill(0.0);
            acc_im.fill(0.0);
            for rx in 0..n_rx {
                let start = (tx * n_rx + rx) * n_f;
                let (s_re, s_im) = (&samples.re[start..start + n_f], &samples.im[start..start + n_f]);
                let (r_re, r_im) = (
                    &self.rx_re[rx * n_f..(rx + 1) * n_f],
                    &self.rx_im[rx * n_f..(rx + 1) * n_f],
                );
                for n in 0..n_f {
                    acc_re[n] += s_re[n] * r_re[n] - s_im[n] * r_im[n];
                    acc_im[n] += s_re[n] * r_im[n] + s_im[n] * r_re[n];
                }
            }
            let (t_re, t_im) = (
                &self.tx_re[tx * n_f..(tx + 1) * n_f],
                &self.tx_im[tx * n_f..(tx + 1) * n_f],
            );
            for n in 0..n_f {
                total_re += acc_re[n] * t_re[n] - acc_im[n] * t_im[n];
                total_im += acc_re[n] * t_im[n] + acc_im[n] * t_re[n];
            }
        }
        total_re.hypot(total_im)
    }
}

/// `ramp[e·n_f + n] = exp(+j·(k0 + n·dk)·|p_e − x|)`, split into planes.
fn fill_ramps(re: &mut [f64], im: &mut [f64], elements: &[Vec3], x: &Vec3, k0: f64, dk: f64, n_f: usize) {
    for ((re, im), p) in re.chunks_exact_mut(n_f).zip(im.chunks_exact_mut(n_f)).zip(elements) {
        let r = (p - x).norm();
        let step = Complex64::from_polar(1.0, dk * r);
        let mut phasor = Complex64::from_polar(1.0, k0 * r);
        // re-anchor periodically so rounding in the recurrence stays bounded
        for n in 0..n_f {
            if n % 32 == 0 && n > 0 {
                phasor = Complex64::from_polar(1.0, (k0 + n as f64 * dk) * r);
            }
            re[n] = phasor.re;
            im[n] = phasor.im;
            phasor *= step;
        }
    }
}
