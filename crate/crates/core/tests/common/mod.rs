#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

/// Brute-force K with no edge correction, for points in an axis-aligned
/// rectangle of the given area.
pub fn brute_k(points: &[(f64, f64)], area: f64, radii: &[f64]) -> Vec<f64> {
    let n = points.len() as f64;
    radii
        .iter()
        .map(|&r| {
            let mut count = 0usize;
            for (i, a) in points.iter().enumerate() {
                for (j, b) in points.iter().enumerate() {
                    if i != j {
                        let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                        if d <= r {
                            count += 1;
                        }
                    }
                }
            }
            area / (n * n) * count as f64
        })
        .collect()
}

/// Brute-force alpha with no edge correction against `pi r^2`.
pub fn brute_alpha(points: &[(f64, f64)], area: f64, radii: &[f64]) -> f64 {
    brute_k(points, area, radii)
        .iter()
        .zip(radii)
        .map(|(k, r)| (k - PI * r * r).abs())
        .sum()
}

/// Fraction of the circle of radius `r` around `c` that lies inside
/// `[x0, x0 + w] x [y0, y0 + h]`, by sampling the circumference.
pub fn sampled_circle_fraction(c: (f64, f64), r: f64, x0: f64, y0: f64, w: f64, h: f64, samples: usize) -> f64 {
    let inside = (0..samples)
        .filter(|&k| {
            let t = (k as f64 + 0.5) / samples as f64 * TAU;
            let (x, y) = (c.0 + r * t.cos(), c.1 + r * t.sin());
            x >= x0 && x <= x0 + w && y >= y0 && y <= y0 + h
        })
        .count();
    inside as f64 / samples as f64
}

/// Brute-force isotropic K for a region anchored at `(x0, y0)`, with the
/// circumference fraction obtained by sampling and floored like the library.
pub fn brute_k_isotropic(points: &[(f64, f64)], x0: f64, y0: f64, w: f64, h: f64, radii: &[f64]) -> Vec<f64> {
    let n = points.len() as f64;
    radii
        .iter()
        .map(|&r| {
            let mut sum = 0.0;
            for (i, a) in points.iter().enumerate() {
                for (j, b) in points.iter().enumerate() {
                    let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                    if i != j && d <= r {
                        let w_ij = if d == 0.0 {
                            1.0
                        } else {
                            sampled_circle_fraction(*a, d, x0, y0, w, h, 200_000).max(0.01)
                        };
                        sum += 1.0 / w_ij;
                    }
                }
            }
            w * h / (n * n) * sum
        })
        .collect()
}
