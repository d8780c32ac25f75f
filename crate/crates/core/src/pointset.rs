//! Key-points, the rectangular study region they live in, and tile counts.

use crate::error::{Error, Result};

/// A key-point location in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    /// Builds a point, rejecting NaN and infinite coordinates.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "non-finite point ({x}, {y})"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn translated(self, dx: f64, dy: f64) -> Self {
        Self {
            x: self.x + dx,
            y: self.y + dy,
        }
    }

    pub fn scaled(self, s: f64) -> Self {
        Self {
            x: self.x * s,
            y: self.y * s,
        }
    }
}

/// Euclidean distance between two points.
#[inline]
pub fn distance(p: Point2, q: Point2) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// Axis-aligned study region anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    width: f64,
    height: f64,
}

impl Region {
    pub fn new(width: f64, height: f64) -> Result<Self> {
        if !(width.is_finite() && height.is_finite() && width > 0.0 && height > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "region must have positive finite size, got {width}x{height}"
            )));
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Boundary-inclusive containment test.
    pub fn contains(&self, p: Point2) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.height
    }
}

/// Ordered key-points inside a region. Index `i` identifies feature `i` for
/// the lifetime of the set.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    points: Vec<Point2>,
    region: Region,
}

impl FeatureSet {
    pub fn new(points: Vec<Point2>, region: Region) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "point {i} is not finite: ({}, {})",
                    p.x, p.y
                )));
            }
            if !region.contains(*p) {
                return Err(Error::InvalidArgument(format!(
                    "point {i} ({}, {}) lies outside the {}x{} region",
                    p.x,
                    p.y,
                    region.width(),
                    region.height()
                )));
            }
        }
        Ok(Self { points, region })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Keeps the points whose mask entry is `true`, preserving order.
    pub fn subset(&self, mask: &[bool]) -> Result<Self> {
        if mask.len() != self.points.len() {
            return Err(Error::InvalidArgument(format!(
                "mask length {} does not match {} points",
                mask.len(),
                self.points.len()
            )));
        }
        let points = self
            .points
            .iter()
            .zip(mask)
            .filter_map(|(p, &keep)| keep.then_some(*p))
            .collect();
        Ok(Self {
            points,
            region: self.region,
        })
    }

    /// Drops exact duplicate coordinates, keeping the first occurrence.
    pub fn dedup_exact(&self) -> Self {
        let mut seen = std::collections::HashSet::new();
        let points = self
            .points
            .iter()
            .filter(|p| seen.insert((p.x.to_bits(), p.y.to_bits())))
            .copied()
            .collect();
        Self {
            points,
            region: self.region,
        }
    }
}

/// Counts points per tile of an `nx` by `ny` grid laid over the region.
///
/// Returned as `counts[row][col]` with row 0 at `y = 0`. A point on an
/// interior tile boundary goes to the tile with the larger index; points on
/// the far edges belong to the last tile.
pub fn grid_counts(fs: &FeatureSet, nx: usize, ny: usize) -> Result<Vec<Vec<usize>>> {
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidArgument(format!(
            "grid must have at least one tile per axis, got {nx}x{ny}"
        )));
    }
    let region = fs.region();
    let mut counts = vec![vec![0usize; nx]; ny];
    for p in fs.points() {
        let col = tile_index(p.x, region.width(), nx);
        let row = tile_index(p.y, region.height(), ny);
        counts[row][col] += 1;
    }
    Ok(counts)
}

fn tile_index(v: f64, extent: f64, tiles: usize) -> usize {
    let idx = (v / extent * tiles as f64).floor();
    if idx < 0.0 {
        0
    } else {
        (idx as usize).min(tiles - 1)
    }
}
