//! Planar homographies: normalized DLT estimation, point mapping and the
//! image-difference accuracy score.

mod image;
mod warp;

pub use image::GrayImage;
pub use warp::{alignment_error, alignment_error_with, warp_image, warp_image_with, Interpolation};

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::Rng;

use crate::error::{Error, Result};
use crate::pointset::Point2;

/// `|w|` below this is treated as a point at infinity.
pub const W_EPSILON: f64 = 1e-12;

/// 3x3 projective transform, scaled so that `m[2][2] = 1` when possible and
/// to unit Frobenius norm otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    m: Matrix3<f64>,
}

impl Homography {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateConfiguration(
                "homography has non-finite entries".into(),
            ));
        }
        let norm = m.norm();
        if norm == 0.0 || (m / norm).determinant().abs() < 1e-14 {
            return Err(Error::DegenerateConfiguration(
                "homography is singular".into(),
            ));
        }
        let m = if m[(2, 2)].abs() > 1e-12 * norm {
            m / m[(2, 2)]
        } else {
            m / norm
        };
        Ok(Self { m })
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(Matrix3::from_fn(|r, c| rows[r][c]))
    }

    pub fn identity() -> Self {
        Self {
            m: Matrix3::identity(),
        }
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        let mut m = Matrix3::identity();
        m[(0, 2)] = tx;
        m[(1, 2)] = ty;
        Self { m }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.m;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.m.try_inverse().ok_or_else(|| {
            Error::DegenerateConfiguration("homography is not invertible".into())
        })?;
        Self::new(inv)
    }

    /// Maps `p` through the transform with the projective divide.
    pub fn apply(&self, p: Point2) -> Result<Point2> {
        let v = self.m * Vector3::new(p.x, p.y, 1.0);
        if v.z.abs() < W_EPSILON {
            return Err(Error::PointAtInfinity(v.z));
        }
        Ok(Point2 {
            x: v.x / v.z,
            y: v.y / v.z,
        })
    }

    /// Largest entrywise difference relative to the largest entry of `self`.
    pub fn relative_difference(&self, other: &Homography) -> f64 {
        let scale = self.m.amax();
        (self.m - other.m).amax() / scale
    }
}

pub fn apply(h: &Homography, p: Point2) -> Result<Point2> {
    h.apply(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub p1: Point2,
    pub p2: Point2,
}

impl Correspondence {
    pub fn new(p1: Point2, p2: Point2) -> Self {
        Self { p1, p2 }
    }
}

/// Similarity transform taking `pts` to zero centroid and mean distance sqrt(2).
fn normalizing_transform(pts: impl Iterator<Item = Point2> + Clone) -> Matrix3<f64> {
    let n = pts.clone().count() as f64;
    let (sx, sy) = pts.clone().fold((0.0, 0.0), |(ax, ay), p| (ax + p.x, ay + p.y));
    let (cx, cy) = (sx / n, sy / n);
    let mean = pts.map(|p| (p.x - cx).hypot(p.y - cy)).sum::<f64>() / n;
    let s = if mean > 1e-12 {
        std::f64::consts::SQRT_2 / mean
    } else {
        1.0
    };
    Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0)
}

fn transform(t: &Matrix3<f64>, p: Point2) -> (f64, f64) {
    let v = t * Vector3::new(p.x, p.y, 1.0);
    (v.x / v.z, v.y / v.z)
}

/// Normalized direct linear transform over all correspondences.
///
/// Both point sets are conditioned (centroid at the origin, mean distance
/// sqrt(2)); the homogeneous system is solved by SVD and the result is
/// mapped back to pixel coordinates.
pub fn estimate_homography(corrs: &[Correspondence]) -> Result<Homography> {
    if corrs.len() < 4 {
        return Err(Error::InsufficientCorrespondences(corrs.len()));
    }
    if corrs
        .iter()
        .any(|c| !(c.p1.x.is_finite() && c.p1.y.is_finite() && c.p2.x.is_finite() && c.p2.y.is_finite()))
    {
        return Err(Error::InvalidArgument("non-finite correspondence".into()));
    }
    let t1 = normalizing_transform(corrs.iter().map(|c| c.p1));
    let t2 = normalizing_transform(corrs.iter().map(|c| c.p2));

    // pad to at least 9 rows so the SVD exposes the full right null space
    let rows = (2 * corrs.len()).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (k, c) in corrs.iter().enumerate() {
        let (x, y) = transform(&t1, c.p1);
        let (u, v) = transform(&t2, c.p2);
        let r = 2 * k;
        a.row_mut(r)
            .copy_from_slice(&[-x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u]);
        a.row_mut(r + 1)
            .copy_from_slice(&[0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v]);
    }

    let svd = a.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::DegenerateConfiguration("SVD did not converge".into()))?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    let largest = sv[order[0]];
    let second_smallest = sv[order[7]];
    if largest.is_nan() || largest <= 0.0 || second_smallest <= 1e-10 * largest {
        return Err(Error::DegenerateConfiguration(
            "correspondences do not constrain a unique homography".into(),
        ));
    }
    let h = v_t.row(order[8]);
    let hn = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]);
    let t2_inv = t2
        .try_inverse()
        .ok_or_else(|| Error::DegenerateConfiguration("degenerate normalization".into()))?;
    Homography::new(t2_inv * hn * t1)
}

/// Root-mean-square transfer error `|H p1 - p2|` over the correspondences.
pub fn reprojection_rmse(h: &Homography, corrs: &[Correspondence]) -> Result<f64> {
    if corrs.is_empty() {
        return Err(Error::InvalidArgument(
            "reprojection error of an empty correspondence set".into(),
        ));
    }
    let mut sum = 0.0;
    for c in corrs {
        let q = h.apply(c.p1)?;
        let (dx, dy) = (q.x - c.p2.x, q.y - c.p2.y);
        sum += dx * dx + dy * dy;
    }
    Ok((sum / corrs.len() as f64).sqrt())
}

/// RANSAC over minimal four-point samples followed by a refit on the
/// inliers of the best hypothesis.
pub fn estimate_homography_ransac<R: Rng + ?Sized>(
    corrs: &[Correspondence],
    inlier_threshold: f64,
    iterations: usize,
    rng: &mut R,
) -> Result<(Homography, Vec<bool>)> {
    if corrs.len() < 4 {
        return Err(Error::InsufficientCorrespondences(corrs.len()));
    }
    let inliers_of = |h: &Homography| -> Vec<bool> {
        corrs
            .iter()
            .map(|c| match h.apply(c.p1) {
                Ok(q) => (q.x - c.p2.x).hypot(q.y - c.p2.y) <= inlier_threshold,
                Err(_) => false,
            })
            .collect()
    };
    let mut best: Option<Vec<bool>> = None;
    let mut best_count = 0;
    for _ in 0..iterations {
        let idx = rand::seq::index::sample(rng, corrs.len(), 4);
        let sample: Vec<Correspondence> = idx.iter().map(|i| corrs[i]).collect();
        let Ok(h) = estimate_homography(&sample) else {
            continue;
        };
        let inl = inliers_of(&h);
        let count = inl.iter().filter(|&&b| b).count();
        if count > best_count {
            best_count = count;
            best = Some(inl);
        }
    }
    let mask = match best {
        Some(m) if best_count >= 4 => m,
        _ => {
            return Err(Error::DegenerateConfiguration(
                "RANSAC found no consensus set".into(),
            ))
        }
    };
    let chosen: Vec<Correspondence> = corrs
        .iter()
        .zip(&mask)
        .filter_map(|(c, &keep)| keep.then_some(*c))
        .collect();
    let h = estimate_homography(&chosen)?;
    let mask = inliers_of(&h);
    Ok((h, mask))
}
