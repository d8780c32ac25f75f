use rayon::prelude::*;

use super::{GrayImage, Homography};
use crate::error::Result;
use crate::pointset::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    Bilinear,
    Nearest,
}

/// Inverse-mapping warp with bilinear sampling.
pub fn warp_image(img: &GrayImage, h: &Homography, out_w: usize, out_h: usize) -> Result<GrayImage> {
    warp_image_with(img, h, out_w, out_h, Interpolation::Bilinear)
}

/// Each output pixel samples `img` at `H^-1 (x, y)`; samples falling outside
/// the source (or mapping to infinity) are 0.
pub fn warp_image_with(
    img: &GrayImage,
    h: &Homography,
    out_w: usize,
    out_h: usize,
    interpolation: Interpolation,
) -> Result<GrayImage> {
    let inv = h.inverse()?;
    let mut out = vec![0u8; out_w * out_h];
    out.par_chunks_mut(out_w.max(1))
        .enumerate()
        .for_each(|(y, row)| {
            for (x, px) in row.iter_mut().enumerate() {
                let Ok(src) = inv.apply(Point2 {
                    x: x as f64,
                    y: y as f64,
                }) else {
                    continue;
                };
                *px = match interpolation {
                    Interpolation::Bilinear => sample_bilinear(img, src.x, src.y),
                    Interpolation::Nearest => sample_nearest(img, src.x, src.y),
                };
            }
        });
    GrayImage::new(out_w, out_h, out)
}

fn sample_bilinear(img: &GrayImage, sx: f64, sy: f64) -> u8 {
    let (w, h) = (img.width(), img.height());
    if !(sx >= 0.0 && sy >= 0.0 && sx <= (w - 1) as f64 && sy <= (h - 1) as f64) {
        return 0;
    }
    let (x0, y0) = (sx.floor() as usize, sy.floor() as usize);
    let (fx, fy) = (sx - x0 as f64, sy - y0 as f64);
    let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
    let p = |x, y| img.get(x, y) as f64;
    let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
    let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
    let v = top * (1.0 - fy) + bottom * fy;
    v.round().clamp(0.0, 255.0) as u8
}

fn sample_nearest(img: &GrayImage, sx: f64, sy: f64) -> u8 {
    let (x, y) = (sx.round(), sy.round());
    if !(x >= 0.0 && y >= 0.0 && x <= (img.width() - 1) as f64 && y <= (img.height() - 1) as f64) {
        return 0;
    }
    img.get(x as usize, y as usize)
}

/// Non-zero pixel count of the difference-image chain
/// `d1 = img2 - i1W`, `d2 = img2 - d1`, `d3 = i1W - d2`, with `i1W` the
/// warp of `img1` into the frame of `img2` and saturating subtraction
/// throughout. Pixels count when they exceed `nonzero_threshold`.
pub fn alignment_error(img1: &GrayImage, img2: &GrayImage, h: &Homography, nonzero_threshold: u8) -> Result<usize> {
    alignment_error_with(img1, img2, h, nonzero_threshold, Interpolation::Bilinear)
}

pub fn alignment_error_with(
    img1: &GrayImage,
    img2: &GrayImage,
    h: &Homography,
    nonzero_threshold: u8,
    interpolation: Interpolation,
) -> Result<usize> {
    let warped = warp_image_with(img1, h, img2.width(), img2.height(), interpolation)?;
    let d1 = img2.saturating_sub(&warped)?;
    let d2 = img2.saturating_sub(&d1)?;
    let d3 = warped.saturating_sub(&d2)?;
    Ok(d3.count_above(nonzero_threshold))
}
