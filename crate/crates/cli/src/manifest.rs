//! Serializable run description. A manifest holds every input path and
//! setting a command needs, so rerunning it reproduces the outputs exactly.

use std::path::{Path, PathBuf};

use featcov::ga::MutationUnit;
use featcov::homography::Interpolation;
use featcov::{CoverageMetric, EdgeCorrection, GaConfig, PoissonScale, RadiusGrid, Region};
use serde::{Deserialize, Serialize};

use crate::args::{
    CorrectionArg, CoverageArgs, EvaluateArgs, GaArgs, InterpolationArg, MetricArgs, MutationUnitArg,
    PoissonScaleArg, RegionArgs, SelectArgs, StatsArgs,
};
use crate::error::{CliError, CliResult};
use crate::io::{parse_dims, parse_grid};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUT: &str = "out";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub output_dir: PathBuf,
    #[serde(flatten)]
    pub command: CommandSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum CommandSpec {
    Coverage(CoverageSpec),
    Select(SelectSpec),
    Evaluate(EvaluateSpec),
    Stats(StatsSpec),
}

impl CommandSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CommandSpec::Coverage(_) => "coverage",
            CommandSpec::Select(_) => "select",
            CommandSpec::Evaluate(_) => "evaluate",
            CommandSpec::Stats(_) => "stats",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub width: f64,
    pub height: f64,
}

impl RegionSpec {
    pub fn region(&self) -> CliResult<Region> {
        Ok(Region::new(self.width, self.height)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub dr: Option<f64>,
    pub correction: CorrectionArg,
    pub poisson_scale: PoissonScaleArg,
    pub dedup: bool,
}

impl MetricSpec {
    /// Unset radii default to `r_max = min(w, h) / 4`, `dr = r_max / 50`,
    /// `r_min = dr`.
    pub fn metric(&self, region: Region) -> CliResult<CoverageMetric> {
        let defaults = RadiusGrid::default_for(region);
        let r_max = self.r_max.unwrap_or(defaults.r_max());
        let dr = self.dr.unwrap_or(r_max / 50.0);
        let r_min = self.r_min.unwrap_or(dr);
        let grid = RadiusGrid::new(r_min, r_max, dr)?;
        let correction = match self.correction {
            CorrectionArg::None => EdgeCorrection::None,
            CorrectionArg::Isotropic => EdgeCorrection::Isotropic,
        };
        let scale = match self.poisson_scale {
            PoissonScaleArg::Unit => PoissonScale::Unit,
            PoissonScaleArg::Intensity => PoissonScale::Intensity,
        };
        Ok(CoverageMetric::new(grid, correction).with_poisson_scale(scale))
    }
}

impl From<&MetricArgs> for MetricSpec {
    fn from(a: &MetricArgs) -> Self {
        Self {
            r_min: a.rmin,
            r_max: a.rmax,
            dr: a.dr,
            correction: a.correction,
            poisson_scale: a.poisson_scale,
            dedup: a.dedup,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaSpec {
    pub generations: usize,
    pub population_max: usize,
    pub population_init: usize,
    pub crossovers: usize,
    pub mutation_rate: f64,
    pub mutation_unit: MutationUnitArg,
    pub elitism: bool,
    pub seed: u64,
}

impl GaSpec {
    fn from_args(a: &GaArgs, seed: Option<u64>) -> Self {
        Self {
            generations: a.generations,
            population_max: a.pop_max,
            population_init: a.pop_init,
            crossovers: a.crossovers,
            mutation_rate: a.mutation_rate,
            mutation_unit: a.mutation_unit,
            elitism: !a.no_elitism,
            seed: seed.unwrap_or(DEFAULT_SEED),
        }
    }

    pub fn config(&self, seed_offset: u64) -> GaConfig {
        GaConfig {
            population_max: self.population_max,
            population_init: self.population_init,
            generations: self.generations,
            crossovers_per_generation: self.crossovers,
            mutation_rate: self.mutation_rate,
            mutation_unit: match self.mutation_unit {
                MutationUnitArg::Gene => MutationUnit::Gene,
                MutationUnitArg::Chromosome => MutationUnit::Chromosome,
            },
            elitism: self.elitism,
            rng_seed: self.seed.wrapping_add(seed_offset),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSpec {
    pub keypoints: PathBuf,
    pub region: RegionSpec,
    pub metric: MetricSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectSpec {
    pub keypoints: PathBuf,
    pub region: RegionSpec,
    pub metric: MetricSpec,
    pub ga: GaSpec,
    pub grid: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub id: String,
    pub image1: PathBuf,
    pub image2: PathBuf,
    /// Measured correspondences; exclusive with `homography`.
    pub correspondences: Option<PathBuf>,
    /// Ground truth used to synthesise correspondences.
    pub homography: Option<PathBuf>,
    /// Image-1 key-points for synthetic mode.
    pub keypoints: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub points: usize,
    pub noise: f64,
    pub outliers: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RansacSpec {
    pub threshold: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateSpec {
    pub pairs: Vec<PairSpec>,
    pub synthetic: SyntheticSpec,
    pub threshold: u8,
    pub ransac: Option<RansacSpec>,
    pub interpolation: InterpolationArg,
    pub metric: MetricSpec,
    pub ga: GaSpec,
}

impl EvaluateSpec {
    pub fn interpolation(&self) -> Interpolation {
        match self.interpolation {
            InterpolationArg::Bilinear => Interpolation::Bilinear,
            InterpolationArg::Nearest => Interpolation::Nearest,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSpec {
    pub results: PathBuf,
    pub summary: bool,
    pub tie_epsilon: f64,
    pub welch: bool,
}

pub fn load(path: &Path) -> CliResult<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::parse(path, e.line() as u64, e.to_string()))
}

pub fn save(path: &Path, manifest: &RunManifest) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn required<T>(v: Option<T>, what: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("missing {what} (or pass --manifest)")))
}

fn region_spec(a: &RegionArgs) -> CliResult<RegionSpec> {
    let s = required(a.region.as_deref(), "--region WxH")?;
    let (width, height) = parse_dims(s, "--region")?;
    Ok(RegionSpec { width, height })
}

/// Loads the manifest named by `--manifest`, checking it belongs to
/// `command`, and applies an `--out` override.
fn from_manifest(path: &Path, command: &str, out: Option<&PathBuf>) -> CliResult<RunManifest> {
    let mut m = load(path)?;
    if m.command.name() != command {
        return Err(CliError::Usage(format!(
            "manifest {} is for `{}`, not `{command}`",
            path.display(),
            m.command.name()
        )));
    }
    if let Some(out) = out {
        m.output_dir = out.clone();
    }
    Ok(m)
}

fn out_dir(out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn coverage(a: &CoverageArgs) -> CliResult<RunManifest> {
    if let Some(m) = &a.common.manifest {
        return from_manifest(m, "coverage", a.common.out.as_ref());
    }
    Ok(RunManifest {
        output_dir: out_dir(&a.common.out),
        command: CommandSpec::Coverage(CoverageSpec {
            keypoints: required(a.keypoints.clone(), "key-point file")?,
            region: region_spec(&a.region)?,
            metric: (&a.metric).into(),
        }),
    })
}

pub fn select(a: &SelectArgs) -> CliResult<RunManifest> {
    if let Some(m) = &a.common.manifest {
        return from_manifest(m, "select", a.common.out.as_ref());
    }
    let (nx, ny) = parse_grid(&a.grid)?;
    Ok(RunManifest {
        output_dir: out_dir(&a.common.out),
        command: CommandSpec::Select(SelectSpec {
            keypoints: required(a.keypoints.clone(), "key-point file")?,
            region: region_spec(&a.region)?,
            metric: (&a.metric).into(),
            ga: GaSpec::from_args(&a.ga, a.common.seed),
            grid: [nx, ny],
        }),
    })
}

pub fn evaluate(a: &EvaluateArgs) -> CliResult<RunManifest> {
    if let Some(m) = &a.common.manifest {
        return from_manifest(m, "evaluate", a.common.out.as_ref());
    }
    let pairs = match &a.pairs {
        Some(list) => read_pair_list(list)?,
        None => {
            let image1 = required(a.image1.clone(), "IMAGE1")?;
            let image2 = required(a.image2.clone(), "IMAGE2")?;
            if a.correspondences.is_none() && a.synthetic.is_none() {
                return Err(CliError::Usage(
                    "need a correspondence CSV or --synthetic H.txt".into(),
                ));
            }
            vec![PairSpec {
                id: a.id.clone(),
                image1,
                image2,
                correspondences: a.correspondences.clone(),
                homography: a.synthetic.clone(),
                keypoints: a.keypoints.clone(),
            }]
        }
    };
    Ok(RunManifest {
        output_dir: out_dir(&a.common.out),
        command: CommandSpec::Evaluate(EvaluateSpec {
            pairs,
            synthetic: SyntheticSpec {
                points: a.synthetic_points,
                noise: a.noise,
                outliers: a.outliers,
            },
            threshold: a.threshold,
            ransac: a.ransac.map(|threshold| RansacSpec {
                threshold,
                iterations: a.ransac_iters,
            }),
            interpolation: a.interpolation,
            metric: (&a.metric).into(),
            ga: GaSpec::from_args(&a.ga, a.common.seed),
        }),
    })
}

pub fn stats(a: &StatsArgs) -> CliResult<RunManifest> {
    if let Some(m) = &a.common.manifest {
        return from_manifest(m, "stats", a.common.out.as_ref());
    }
    Ok(RunManifest {
        output_dir: out_dir(&a.common.out),
        command: CommandSpec::Stats(StatsSpec {
            results: required(a.results.clone(), "results CSV")?,
            summary: a.summary,
            tie_epsilon: a.tie_epsilon,
            welch: a.welch,
        }),
    })
}

/// Batch list with header `id,image1,image2,correspondences,homography`
/// and an optional `keypoints` column. Relative paths resolve against the
/// list's directory; exactly one of the last two columns is filled per row.
pub fn read_pair_list(path: &Path) -> CliResult<Vec<PairSpec>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| CliError::parse(path, 1, e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(id), Some(i1), Some(i2)) = (col("id"), col("image1"), col("image2")) else {
        return Err(CliError::parse(path, 1, "header needs id,image1,image2"));
    };
    let (cc, hc, kc) = (col("correspondences"), col("homography"), col("keypoints"));
    let mut pairs = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            CliError::parse(path, e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |c: Option<usize>| {
            c.and_then(|c| rec.get(c))
                .filter(|s| !s.is_empty())
                .map(|s| base.join(s))
        };
        let pair = PairSpec {
            id: rec.get(id).unwrap_or_default().to_string(),
            image1: field(Some(i1)).ok_or_else(|| CliError::parse(path, line, "missing image1"))?,
            image2: field(Some(i2)).ok_or_else(|| CliError::parse(path, line, "missing image2"))?,
            correspondences: field(cc),
            homography: field(hc),
            keypoints: field(kc),
        };
        if pair.correspondences.is_some() == pair.homography.is_some() {
            return Err(CliError::parse(
                path,
                line,
                "give exactly one of correspondences or homography",
            ));
        }
        pairs.push(pair);
    }
    Ok(pairs)
}
