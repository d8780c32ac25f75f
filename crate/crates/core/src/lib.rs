//! Spatial coverage of image key-points.
//!
//! * [`ripley`] measures how evenly key-points spread over an image with
//!   Ripley's K-function and condenses the gap to complete spatial
//!   randomness into one number, alpha.
//! * [`ga`] searches for the subset of key-points that minimises alpha.
//! * [`homography`] estimates planar homographies and scores them with a
//!   difference-image pipeline, so the full and refined sets can be compared.
//! * [`stats`] holds the t-test and McNemar test used for that comparison.

pub mod error;
pub mod ga;
pub mod homography;
pub mod pointset;
pub mod ripley;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};
pub use ga::{evolve, Chromosome, GaConfig, GenerationRecord, MutationUnit, SelectionResult};
pub use homography::{estimate_homography, reprojection_rmse, Correspondence, GrayImage, Homography};
pub use pointset::{distance, grid_counts, FeatureSet, Point2, Region};
pub use ripley::{coverage_alpha, k_estimate, CoverageMetric, EdgeCorrection, KProfile, PoissonScale, RadiusGrid};
