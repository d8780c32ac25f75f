//! Seeded generators for point patterns, homographies and correspondences.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::homography::{estimate_homography, Correspondence, Homography};
use crate::pointset::{FeatureSet, Point2, Region};

/// `n` points drawn uniformly over `region` (a binomial CSR sample).
pub fn csr_points<R: Rng + ?Sized>(n: usize, region: Region, rng: &mut R) -> FeatureSet {
    let pts = (0..n)
        .map(|_| Point2 {
            x: rng.random_range(0.0..=region.width()),
            y: rng.random_range(0.0..=region.height()),
        })
        .collect();
    FeatureSet::new(pts, region).expect("uniform samples lie inside the region")
}

/// `dispersed` uniform points plus `clustered` points packed into a disk of
/// radius `cluster_radius` around a random center. Points are emitted in
/// raster order (by row, then column), as a scanning detector would.
pub fn cluster_dispersed<R: Rng + ?Sized>(
    dispersed: usize,
    clustered: usize,
    cluster_radius: f64,
    region: Region,
    rng: &mut R,
) -> FeatureSet {
    let mut pts = csr_points(dispersed, region, rng).points().to_vec();
    let margin = cluster_radius.min(region.width() / 2.0).min(region.height() / 2.0);
    let cx = rng.random_range(margin..=region.width() - margin);
    let cy = rng.random_range(margin..=region.height() - margin);
    for _ in 0..clustered {
        let r = cluster_radius * rng.random::<f64>().sqrt();
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        pts.push(Point2 {
            x: (cx + r * theta.cos()).clamp(0.0, region.width()),
            y: (cy + r * theta.sin()).clamp(0.0, region.height()),
        });
    }
    pts.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    FeatureSet::new(pts, region).expect("clamped into the region")
}

/// Random well-conditioned homography for a `width` x `height` image: each
/// corner is displaced by up to `jitter` of the image size and the map is
/// fitted to the four corner moves.
pub fn random_homography<R: Rng + ?Sized>(width: f64, height: f64, jitter: f64, rng: &mut R) -> Result<Homography> {
    let corners = [(0.0, 0.0), (width, 0.0), (width, height), (0.0, height)];
    let corrs: Vec<Correspondence> = corners
        .iter()
        .map(|&(x, y)| {
            let dx = rng.random_range(-jitter..=jitter) * width;
            let dy = rng.random_range(-jitter..=jitter) * height;
            Correspondence::new(Point2 { x, y }, Point2 { x: x + dx, y: y + dy })
        })
        .collect();
    estimate_homography(&corrs)
}

/// Maps every key-point through `h` and perturbs the image-2 side with
/// isotropic Gaussian noise of standard deviation `noise_sigma`. A fraction
/// `outlier_fraction` of correspondences is replaced by uniform junk inside
/// the `width` x `height` frame.
pub fn synthetic_correspondences<R: Rng + ?Sized>(
    h: &Homography,
    keypoints: &FeatureSet,
    noise_sigma: f64,
    outlier_fraction: f64,
    rng: &mut R,
) -> Result<Vec<Correspondence>> {
    let noise = Normal::new(0.0, noise_sigma.max(0.0)).expect("non-negative sigma");
    let region = keypoints.region();
    keypoints
        .points()
        .iter()
        .map(|&p| {
            let q = h.apply(p)?;
            let p2 = if rng.random::<f64>() < outlier_fraction {
                Point2 {
                    x: rng.random_range(0.0..=region.width()),
                    y: rng.random_range(0.0..=region.height()),
                }
            } else {
                Point2 {
                    x: q.x + noise.sample(rng),
                    y: q.y + noise.sample(rng),
                }
            };
            Ok(Correspondence::new(p, p2))
        })
        .collect()
}
