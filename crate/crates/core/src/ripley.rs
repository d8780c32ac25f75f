//! Ripley's K-function estimator, its Poisson expectation and the coverage
//! metric alpha built from the two.
//!
//! `alpha` is the sum, over a regular radius grid, of the absolute gap
//! between the estimated K-function and the expectation under complete
//! spatial randomness. Clustered key-points push the estimate above the
//! expectation, so lower alpha means better spread.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::pointset::{distance, FeatureSet, Point2, Region};

/// Lower bound applied to isotropic weights before inversion. Weights only
/// approach zero for radii longer than the region's short side.
pub const MIN_EDGE_WEIGHT: f64 = 0.01;

/// Regular radius samples `r_min, r_min + dr, ...` up to and including
/// `r_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusGrid {
    r_min: f64,
    r_max: f64,
    delta_r: f64,
}

impl RadiusGrid {
    pub fn new(r_min: f64, r_max: f64, delta_r: f64) -> Result<Self> {
        let finite = r_min.is_finite() && r_max.is_finite() && delta_r.is_finite();
        if !finite || r_min <= 0.0 || delta_r <= 0.0 || r_max < r_min {
            return Err(Error::InvalidArgument(format!(
                "radius grid needs 0 < r_min <= r_max and dr > 0, got r_min={r_min} r_max={r_max} dr={delta_r}"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            delta_r,
        })
    }

    /// `r_max` = a quarter of the short side, fifty steps, starting at one step.
    pub fn default_for(region: Region) -> Self {
        let r_max = region.width().min(region.height()) / 4.0;
        let delta_r = r_max / 50.0;
        Self {
            r_min: delta_r,
            r_max,
            delta_r,
        }
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn delta_r(&self) -> f64 {
        self.delta_r
    }

    pub fn len(&self) -> usize {
        // relative slack so r_max survives accumulated rounding in (r_max - r_min)/dr
        ((self.r_max - self.r_min) / self.delta_r + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.r_min + k as f64 * self.delta_r)
            .collect()
    }

    /// Same grid with every length multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.r_min * s, self.r_max * s, self.delta_r * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeCorrection {
    None,
    #[default]
    Isotropic,
}

/// How the Poisson expectation is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PoissonScale {
    /// `pi r^2`, the expectation of the estimator under complete spatial
    /// randomness.
    #[default]
    Unit,
    /// `(N / A) pi r^2`, multiplying in the point intensity literally.
    Intensity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KProfile {
    pub radii: Vec<f64>,
    pub k_hat: Vec<f64>,
    pub k_poisson: Vec<f64>,
}

impl KProfile {
    /// Sum of `|k_hat - k_poisson|` over the samples.
    pub fn alpha(&self) -> f64 {
        self.k_hat
            .iter()
            .zip(&self.k_poisson)
            .map(|(k, p)| (k - p).abs())
            .sum()
    }
}

/// Fraction of the circle of radius `r` around `center` whose circumference
/// lies inside `region` (Ripley's isotropic correction).
pub fn edge_weight(center: Point2, r: f64, region: Region) -> Result<f64> {
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "edge weight radius must be positive, got {r}"
        )));
    }
    if !region.contains(center) {
        return Err(Error::InvalidArgument(format!(
            "edge weight center ({}, {}) outside region",
            center.x, center.y
        )));
    }
    Ok(isotropic_weight(center, r, region))
}

fn isotropic_weight(c: Point2, r: f64, region: Region) -> f64 {
    // (direction of the border normal, distance to that border)
    let borders = [
        (0.0, region.width() - c.x),
        (0.5 * PI, region.height() - c.y),
        (PI, c.x),
        (1.5 * PI, c.y),
    ];
    let mut arcs: Vec<(f64, f64)> = Vec::with_capacity(8);
    for (dir, d) in borders {
        if d >= r {
            continue;
        }
        let half = (d / r).clamp(-1.0, 1.0).acos();
        let (lo, hi) = (dir - half, dir + half);
        if lo < 0.0 {
            arcs.push((lo + TAU, TAU));
            arcs.push((0.0, hi));
        } else if hi > TAU {
            arcs.push((lo, TAU));
            arcs.push((0.0, hi - TAU));
        } else {
            arcs.push((lo, hi));
        }
    }
    if arcs.is_empty() {
        return 1.0;
    }
    arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut outside = 0.0;
    let (mut cur_lo, mut cur_hi) = arcs[0];
    for &(lo, hi) in &arcs[1..] {
        if lo <= cur_hi {
            cur_hi = cur_hi.max(hi);
        } else {
            outside += cur_hi - cur_lo;
            cur_lo = lo;
            cur_hi = hi;
        }
    }
    outside += cur_hi - cur_lo;
    (1.0 - outside / TAU).clamp(0.0, 1.0)
}

/// `pi r^2` at every grid sample.
pub fn k_theoretical(grid: &RadiusGrid) -> Vec<f64> {
    grid.radii().into_iter().map(|r| PI * r * r).collect()
}

/// K-function estimate of `fs` over `grid`, with the `pi r^2` expectation.
pub fn k_estimate(fs: &FeatureSet, grid: &RadiusGrid, correction: EdgeCorrection) -> Result<KProfile> {
    CoverageMetric::new(*grid, correction).profile(fs)
}

/// Coverage alpha of `fs`. Lower is better.
pub fn coverage_alpha(fs: &FeatureSet, grid: &RadiusGrid, correction: EdgeCorrection) -> Result<f64> {
    CoverageMetric::new(*grid, correction).alpha(fs)
}

/// Bundles the settings that define the coverage metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageMetric {
    pub grid: RadiusGrid,
    pub correction: EdgeCorrection,
    pub poisson_scale: PoissonScale,
}

impl CoverageMetric {
    pub fn new(grid: RadiusGrid, correction: EdgeCorrection) -> Self {
        Self {
            grid,
            correction,
            poisson_scale: PoissonScale::Unit,
        }
    }

    pub fn with_poisson_scale(mut self, scale: PoissonScale) -> Self {
        self.poisson_scale = scale;
        self
    }

    pub fn profile(&self, fs: &FeatureSet) -> Result<KProfile> {
        if fs.len() < 2 {
            return Err(Error::InsufficientPoints(fs.len()));
        }
        let table = self.pair_table(fs);
        let mask = vec![true; fs.len()];
        Ok(self
            .profile_masked(&table, &mask)
            .expect("full mask has at least two points"))
    }

    pub fn alpha(&self, fs: &FeatureSet) -> Result<f64> {
        self.profile(fs).map(|p| p.alpha())
    }

    pub fn poisson_expectation(&self, n: usize, area: f64) -> Vec<f64> {
        let scale = match self.poisson_scale {
            PoissonScale::Unit => 1.0,
            PoissonScale::Intensity => n as f64 / area,
        };
        k_theoretical(&self.grid)
            .into_iter()
            .map(|k| k * scale)
            .collect()
    }

    /// Precomputes, for every ordered pair within `r_max`, the first grid
    /// sample it contributes to and its inverse edge weight.
    pub fn pair_table(&self, fs: &FeatureSet) -> PairTable {
        let radii = self.grid.radii();
        let r_max = *radii.last().expect("grid is never empty");
        let region = fs.region();
        let pts = fs.points();
        let neighbours = pts
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                pts.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .filter_map(|(j, &q)| {
                        let d = distance(p, q);
                        if d > r_max {
                            return None;
                        }
                        let bin = radii.partition_point(|&r| r < d);
                        let inv_weight = match self.correction {
                            EdgeCorrection::None => 1.0,
                            EdgeCorrection::Isotropic if d == 0.0 => 1.0,
                            EdgeCorrection::Isotropic => {
                                1.0 / isotropic_weight(p, d, region).max(MIN_EDGE_WEIGHT)
                            }
                        };
                        Some(PairEntry {
                            j: j as u32,
                            bin: bin as u32,
                            inv_weight,
                        })
                    })
                    .collect()
            })
            .collect();
        PairTable {
            area: region.area(),
            neighbours,
            bins: radii.len(),
        }
    }

    /// Profile of the subset selected by `mask`; `None` when fewer than two
    /// points are selected.
    pub fn profile_masked(&self, table: &PairTable, mask: &[bool]) -> Option<KProfile> {
        assert_eq!(mask.len(), table.neighbours.len(), "mask bound to another set");
        let n = mask.iter().filter(|&&m| m).count();
        if n < 2 {
            return None;
        }
        let mut hist = vec![0.0f64; table.bins];
        for (i, row) in table.neighbours.iter().enumerate() {
            if !mask[i] {
                continue;
            }
            for e in row {
                if mask[e.j as usize] {
                    hist[e.bin as usize] += e.inv_weight;
                }
            }
        }
        let scale = table.area / (n as f64 * n as f64);
        let mut acc = 0.0;
        let k_hat = hist
            .into_iter()
            .map(|h| {
                acc += h;
                scale * acc
            })
            .collect();
        Some(KProfile {
            radii: self.grid.radii(),
            k_hat,
            k_poisson: self.poisson_expectation(n, table.area),
        })
    }

    pub fn alpha_masked(&self, table: &PairTable, mask: &[bool]) -> Option<f64> {
        self.profile_masked(table, mask).map(|p| p.alpha())
    }
}

#[derive(Debug, Clone, Copy)]
struct PairEntry {
    j: u32,
    bin: u32,
    inv_weight: f64,
}

/// Pairwise distances binned against a radius grid, reusable across every
/// subset of one feature set.
#[derive(Debug, Clone)]
pub struct PairTable {
    area: f64,
    neighbours: Vec<Vec<PairEntry>>,
    bins: usize,
}

impl PairTable {
    pub fn len(&self) -> usize {
        self.neighbours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbours.is_empty()
    }
}
