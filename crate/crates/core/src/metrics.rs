//! PSNR and SSIM on `[0, 1]` frames.
//!
//! SSIM uses the usual parameterization: an 11x11 Gaussian window with
//! sigma 1.5, `C1 = 0.01^2`, `C2 = 0.03^2`, averaged over all window
//! positions that fit entirely inside the image, then over channels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dims, Error, Result};
use crate::frames::Frame;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_C1: f64 = 0.01 * 0.01;
pub const SSIM_C2: f64 = 0.03 * 0.03;

/// Which representation the metrics are computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricSpace {
    #[default]
    Rgb,
    Luma,
}

fn planes(frame: &Frame, space: MetricSpace) -> Vec<Vec<f64>> {
    match space {
        MetricSpace::Rgb => (0..3)
            .map(|c| frame.data().iter().skip(c).step_by(3).copied().collect())
            .collect(),
        MetricSpace::Luma => vec![frame.luma()],
    }
}

/// `10 log10(1 / MSE)`; identical inputs give `+inf`.
pub fn psnr(a: &Frame, b: &Frame) -> Result<f64> {
    psnr_in(a, b, MetricSpace::Rgb)
}

pub fn psnr_in(a: &Frame, b: &Frame, space: MetricSpace) -> Result<f64> {
    check_dims(a.dims(), b.dims())?;
    let (pa, pb) = (planes(a, space), planes(b, space));
    let mut sum = 0.0;
    let mut n = 0usize;
    for (x, y) in pa.iter().zip(&pb) {
        sum += x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
        n += x.len();
    }
    let mse = sum / n.max(1) as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

pub fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0; SSIM_WINDOW];
    let r = (SSIM_WINDOW / 2) as f64;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - r;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Separable "valid" filtering: output is `(w - 10) x (h - 10)`.
fn filter_valid(plane: &[f64], w: usize, h: usize, k: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w + 1 - SSIM_WINDOW;
    let oh = h + 1 - SSIM_WINDOW;
    let mut horiz = vec![0.0; ow * h];
    horiz.par_chunks_mut(ow).enumerate().for_each(|(y, row)| {
        let src = &plane[y * w..(y + 1) * w];
        for (x, o) in row.iter_mut().enumerate() {
            *o = k.iter().zip(&src[x..x + SSIM_WINDOW]).map(|(a, b)| a * b).sum();
        }
    });
    let mut out = vec![0.0; ow * oh];
    out.par_chunks_mut(ow).enumerate().for_each(|(y, row)| {
        for (x, o) in row.iter_mut().enumerate() {
            *o = k
                .iter()
                .enumerate()
                .map(|(i, kv)| kv * horiz[(y + i) * ow + x])
                .sum();
        }
    });
    out
}

fn ssim_plane(x: &[f64], y: &[f64], w: usize, h: usize) -> f64 {
    let k = gaussian_window();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let mu_x = filter_valid(x, w, h, &k);
    let mu_y = filter_valid(y, w, h, &k);
    let e_xx = filter_valid(&xx, w, h, &k);
    let e_yy = filter_valid(&yy, w, h, &k);
    let e_xy = filter_valid(&xy, w, h, &k);
    let n = mu_x.len();
    let total: f64 = (0..n)
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            let vx = e_xx[i] - mx * mx;
            let vy = e_yy[i] - my * my;
            let cxy = e_xy[i] - mx * my;
            ((2.0 * mx * my + SSIM_C1) * (2.0 * cxy + SSIM_C2))
                / ((mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2))
        })
        .sum();
    total / n as f64
}

pub fn ssim(a: &Frame, b: &Frame) -> Result<f64> {
    ssim_in(a, b, MetricSpace::Rgb)
}

pub fn ssim_in(a: &Frame, b: &Frame, space: MetricSpace) -> Result<f64> {
    check_dims(a.dims(), b.dims())?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::invalid(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {w}x{h}"
        )));
    }
    let (pa, pb) = (planes(a, space), planes(b, space));
    let per: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| ssim_plane(x, y, w, h)).collect();
    Ok(per.iter().sum::<f64>() / per.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: usize, h: usize) -> Frame {
        Frame::from_fn(w, h, |x, y| {
            let v = 0.5 + 0.4 * ((x as f64 * 0.7).sin() * (y as f64 * 0.45).cos());
            [v, 1.0 - v, 0.5 * v + 0.2]
        })
    }

    #[test]
    fn psnr_closed_forms() {
        let a = Frame::filled(8, 8, [0.5; 3]);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        let b = Frame::filled(8, 8, [0.5 + 1.0 / 255.0; 3]);
        assert!((psnr(&a, &b).unwrap() - 20.0 * 255f64.log10()).abs() < 1e-9);
        assert!((psnr(&a, &b).unwrap() - 48.131).abs() < 1e-3);
        let c = Frame::filled(8, 8, [0.6; 3]);
        assert!((psnr(&a, &c).unwrap() - 20.0).abs() < 1e-9);
        assert!(psnr(&a, &Frame::filled(8, 7, [0.5; 3])).is_err());
    }

    #[test]
    fn psnr_decreases_with_amplitude() {
        let a = textured(16, 16);
        let mut last = f64::INFINITY;
        for k in 1..10 {
            let amp = k as f64 * 0.01;
            let b = Frame::from_fn(16, 16, |x, y| {
                let p = a.pixel(x, y);
                let s = if (x + y) % 2 == 0 { amp } else { -amp };
                [p[0] + s, p[1] + s, p[2] + s]
            });
            let v = psnr(&a, &b).unwrap();
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn ssim_identity_and_symmetry() {
        let a = textured(24, 20);
        assert_eq!(ssim(&a, &a).unwrap(), 1.0);
        let b = Frame::from_fn(24, 20, |x, y| {
            let p = a.pixel(x, y);
            [p[0] * 0.9, p[1], (p[2] + 0.05).min(1.0)]
        });
        assert_eq!(ssim(&a, &b).unwrap(), ssim(&b, &a).unwrap());
        assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
        assert!(ssim(&a, &b).unwrap() < 1.0);
    }

    #[test]
    fn ssim_of_negative_is_negative() {
        let a = textured(24, 24);
        let neg = Frame::from_fn(24, 24, |x, y| {
            let p = a.pixel(x, y);
            [1.0 - p[0], 1.0 - p[1], 1.0 - p[2]]
        });
        assert!(ssim(&a, &neg).unwrap() < 0.0);
    }

    #[test]
    fn ssim_rejects_small_images() {
        let a = Frame::filled(10, 30, [0.5; 3]);
        assert!(ssim(&a, &a).is_err());
    }

    #[test]
    fn luma_space() {
        let a = textured(16, 16);
        assert_eq!(psnr_in(&a, &a, MetricSpace::Luma).unwrap(), f64::INFINITY);
        assert_eq!(ssim_in(&a, &a, MetricSpace::Luma).unwrap(), 1.0);
    }
}
