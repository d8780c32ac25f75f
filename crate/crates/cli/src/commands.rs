use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use featcov::ga::evolve_with_metric;
use featcov::homography::{alignment_error_with, estimate_homography_ransac};
use featcov::stats::{
    mcnemar, paired_outcomes, t_test_two_sample_with, McNemarReport, SampleSummary, TTestReport, VarianceModel,
};
use featcov::synthetic::{cluster_dispersed, synthetic_correspondences};
use featcov::{
    estimate_homography, grid_counts, reprojection_rmse, Correspondence, FeatureSet, Homography, Region,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};
use crate::io::{self, KeypointFormat};
use crate::manifest::{
    self, CommandSpec, CoverageSpec, EvaluateSpec, MetricSpec, PairSpec, RunManifest, SelectSpec, StatsSpec,
};
use crate::report;

/// Radius of the generated key-point cluster in synthetic evaluation.
const SYNTHETIC_CLUSTER_RADIUS: f64 = 5.0;

pub const RESULTS_HEADER: &str =
    "pair_id,n_original,n_refined,alignment_original,alignment_refined,rmse_original,rmse_refined";

/// Runs a manifest: writes it to the output directory, then the command's
/// outputs. Returns the text summary printed to stdout.
pub fn execute(m: &RunManifest) -> CliResult<String> {
    let out = &m.output_dir;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    manifest::save(&out.join(manifest::MANIFEST_FILE), m)?;
    match &m.command {
        CommandSpec::Coverage(s) => coverage(s, out),
        CommandSpec::Select(s) => select(s, out),
        CommandSpec::Evaluate(s) => evaluate(s, out),
        CommandSpec::Stats(s) => stats(s, out),
    }
}

fn load_features(path: &Path, region: Region, metric: &MetricSpec) -> CliResult<FeatureSet> {
    let pts = io::read_keypoints(path, region)?;
    let fs = FeatureSet::new(pts, region)?;
    Ok(if metric.dedup { fs.dedup_exact() } else { fs })
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn coverage(s: &CoverageSpec, out: &Path) -> CliResult<String> {
    let region = s.region.region()?;
    let fs = load_features(&s.keypoints, region, &s.metric)?;
    let metric = s.metric.metric(region)?;
    let profile = metric.profile(&fs)?;
    write_text(&out.join("profile.csv"), &report::profile_csv(&profile))?;
    let summary = format!(
        "points {}\nregion {}x{}\nradii {} (r_min {}, r_max {}, dr {})\nalpha {}\n",
        fs.len(),
        region.width(),
        region.height(),
        metric.grid.len(),
        metric.grid.r_min(),
        metric.grid.r_max(),
        metric.grid.delta_r(),
        profile.alpha()
    );
    write_text(&out.join("coverage.txt"), &summary)?;
    Ok(summary)
}

fn select(s: &SelectSpec, out: &Path) -> CliResult<String> {
    let region = s.region.region()?;
    let fs = load_features(&s.keypoints, region, &s.metric)?;
    let metric = s.metric.metric(region)?;
    let result = evolve_with_metric(&fs, &s.ga.config(0), &metric)?;

    let format = KeypointFormat::from_path(&s.keypoints);
    io::write_keypoints(
        &out.join(format!("refined.{}", format.extension())),
        result.refined.points(),
        format,
    )?;
    write_text(&out.join("history.csv"), &report::history_csv(&result.history))?;
    let [nx, ny] = s.grid;
    let before = grid_counts(&fs, nx, ny)?;
    let after = grid_counts(&result.refined, nx, ny)?;
    write_text(&out.join("grid_counts.txt"), &report::grid_block(&before, &after))?;

    let summary = format!(
        "original: {} points, alpha {}\nrefined:  {} points, alpha {}\n",
        fs.len(),
        result.original_alpha,
        result.refined.len(),
        result.refined_alpha
    );
    write_text(&out.join("summary.txt"), &summary)?;
    Ok(summary)
}

/// One row of the evaluation CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct PairResult {
    pub id: String,
    pub n_original: usize,
    pub n_refined: usize,
    pub alignment_original: usize,
    pub alignment_refined: usize,
    pub rmse_original: f64,
    pub rmse_refined: f64,
}

impl PairResult {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.id,
            self.n_original,
            self.n_refined,
            self.alignment_original,
            self.alignment_refined,
            self.rmse_original,
            self.rmse_refined
        )
    }
}

fn evaluate(s: &EvaluateSpec, out: &Path) -> CliResult<String> {
    let results_path = out.join("results.csv");
    let failures_path = out.join("failures.csv");
    let mut results = create(&results_path)?;
    let mut failures = create(&failures_path)?;
    writeln_flush(&mut results, &results_path, RESULTS_HEADER)?;
    writeln_flush(&mut failures, &failures_path, "pair_id,error")?;

    let mut ok = 0;
    let mut first_error: Option<CliError> = None;
    for (index, pair) in s.pairs.iter().enumerate() {
        match evaluate_pair(s, pair, index as u64) {
            Ok(row) => {
                ok += 1;
                writeln_flush(&mut results, &results_path, &row.csv_row())?;
            }
            Err(e) => {
                eprintln!("pair {}: {e}", pair.id);
                let msg = e.to_string().replace(['\n', ','], " ");
                writeln_flush(&mut failures, &failures_path, &format!("{},{}", pair.id, msg))?;
                first_error.get_or_insert(e);
            }
        }
    }
    let summary = format!("evaluated {ok} of {} pairs\n", s.pairs.len());
    match first_error {
        None => Ok(summary),
        Some(e) => {
            let failed = s.pairs.len() - ok;
            let msg = format!("{summary}{failed} pair(s) failed, first: {e}");
            Err(match e.exit_code() {
                crate::error::EXIT_DEGENERATE => CliError::Degenerate(msg),
                crate::error::EXIT_NUMERICAL => CliError::Numerical(msg),
                _ => CliError::Usage(msg),
            })
        }
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn writeln_flush(w: &mut BufWriter<File>, path: &Path, line: &str) -> CliResult<()> {
    writeln!(w, "{line}")
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

/// Estimates a homography from the full correspondence set and from the
/// subset whose image-1 key-points survive GA refinement, then scores both.
pub fn evaluate_pair(s: &EvaluateSpec, pair: &PairSpec, index: u64) -> CliResult<PairResult> {
    let img1 = io::read_pgm(&pair.image1)?;
    let img2 = io::read_pgm(&pair.image2)?;
    let region = Region::new(img1.width() as f64, img1.height() as f64)?;
    // stream 0 is reserved; pair i draws from stream i + 1
    let mut rng = ChaCha8Rng::seed_from_u64(s.ga.seed);
    rng.set_stream(index + 1);

    let corrs: Vec<Correspondence> = match (&pair.correspondences, &pair.homography) {
        (Some(path), _) => io::read_correspondences(path)?,
        (None, Some(h_path)) => {
            let truth = io::read_homography(h_path)?;
            let keypoints = match &pair.keypoints {
                Some(k) => FeatureSet::new(io::read_keypoints(k, region)?, region)?,
                None => {
                    let n = s.synthetic.points;
                    cluster_dispersed(n / 2, n - n / 2, SYNTHETIC_CLUSTER_RADIUS, region, &mut rng)
                }
            };
            synthetic_correspondences(&truth, &keypoints, s.synthetic.noise, s.synthetic.outliers, &mut rng)?
        }
        (None, None) => {
            return Err(CliError::Usage(format!(
                "pair {} has neither correspondences nor a homography",
                pair.id
            )))
        }
    };

    let points: Vec<_> = corrs.iter().map(|c| c.p1).collect();
    let fs = FeatureSet::new(points, region).map_err(|e| {
        CliError::Usage(format!("pair {}: image-1 key-points: {e}", pair.id))
    })?;
    let metric = s.metric.metric(region)?;
    let selection = evolve_with_metric(&fs, &s.ga.config(index), &metric)?;
    let refined: Vec<Correspondence> = corrs
        .iter()
        .zip(&selection.mask)
        .filter_map(|(c, &keep)| keep.then_some(*c))
        .collect();

    let mut estimate = |set: &[Correspondence]| -> CliResult<Homography> {
        Ok(match s.ransac {
            Some(r) => estimate_homography_ransac(set, r.threshold, r.iterations, &mut rng)?.0,
            None => estimate_homography(set)?,
        })
    };
    let h_original = estimate(&corrs)?;
    let h_refined = estimate(&refined)?;

    let score = |h: &Homography| -> CliResult<(usize, f64)> {
        Ok((
            alignment_error_with(&img1, &img2, h, s.threshold, s.interpolation())?,
            reprojection_rmse(h, &corrs)?,
        ))
    };
    let (alignment_original, rmse_original) = score(&h_original)?;
    let (alignment_refined, rmse_refined) = score(&h_refined)?;
    Ok(PairResult {
        id: pair.id.clone(),
        n_original: corrs.len(),
        n_refined: refined.len(),
        alignment_original,
        alignment_refined,
        rmse_original,
        rmse_refined,
    })
}

/// One t-test (and, for paired raw data, a McNemar test) per metric.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricComparison {
    pub metric: String,
    pub original: SampleSummary,
    pub refined: SampleSummary,
    pub t_test: TTestReport,
    pub mcnemar: Option<McNemarReport>,
}

fn stats(s: &StatsSpec, out: &Path) -> CliResult<String> {
    let comparisons = compare(s)?;
    let text = report::stats_text(&comparisons);
    write_text(&out.join("stats.txt"), &text)?;
    write_text(&out.join("stats.csv"), &report::stats_csv(&comparisons))?;
    Ok(text)
}

pub fn compare(s: &StatsSpec) -> CliResult<Vec<MetricComparison>> {
    let model = if s.welch {
        VarianceModel::Welch
    } else {
        VarianceModel::Pooled
    };
    let table = read_table(&s.results)?;
    let mut out = Vec::new();
    if s.summary {
        let col = |name: &str| {
            table
                .headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| CliError::parse(&s.results, 1, format!("missing column {name}")))
        };
        let metric = col("metric")?;
        let fields = [
            col("mean_original")?,
            col("sd_original")?,
            col("n_original")?,
            col("mean_refined")?,
            col("sd_refined")?,
            col("n_refined")?,
        ];
        for (line, row) in &table.rows {
            let num = |c: usize| -> CliResult<f64> {
                row.get(c)
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| CliError::parse(&s.results, *line, format!("bad number in column {}", table.headers[c])))
            };
            let summary = |m: usize, sd: usize, n: usize| -> CliResult<SampleSummary> {
                let n = num(n)?;
                if n.fract() != 0.0 || n < 0.0 {
                    return Err(CliError::parse(&s.results, *line, "observation count must be an integer"));
                }
                SampleSummary::new(num(m)?, num(sd)?, n as usize)
                    .map_err(|e| CliError::parse(&s.results, *line, e.to_string()))
            };
            let original = summary(fields[0], fields[1], fields[2])?;
            let refined = summary(fields[3], fields[4], fields[5])?;
            out.push(MetricComparison {
                metric: row.get(metric).cloned().unwrap_or_default(),
                t_test: t_test_two_sample_with(&original, &refined, model),
                original,
                refined,
                mcnemar: None,
            });
        }
        return Ok(out);
    }

    for (ci, name) in table.headers.iter().enumerate() {
        let Some(stem) = name.strip_suffix("_original") else {
            continue;
        };
        let Some(cr) = table.headers.iter().position(|h| *h == format!("{stem}_refined")) else {
            continue;
        };
        let original = numeric_column(&table, ci, &s.results)?;
        let refined = numeric_column(&table, cr, &s.results)?;
        if original.len() != refined.len() {
            return Err(CliError::Usage(format!(
                "{}: column {name} has {} values but {stem}_refined has {}",
                s.results.display(),
                original.len(),
                refined.len()
            )));
        }
        let so = SampleSummary::from_samples(&original)
            .map_err(|e| CliError::Usage(format!("{stem}: {e}")))?;
        let sr = SampleSummary::from_samples(&refined)
            .map_err(|e| CliError::Usage(format!("{stem}: {e}")))?;
        let (b, c) = paired_outcomes(&original, &refined, s.tie_epsilon)?;
        out.push(MetricComparison {
            metric: stem.to_string(),
            original: so,
            refined: sr,
            t_test: t_test_two_sample_with(&so, &sr, model),
            mcnemar: Some(mcnemar(b, c)),
        });
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: no <name>_original/<name>_refined column pairs found",
            s.results.display()
        )));
    }
    Ok(out)
}

struct Table {
    headers: Vec<String>,
    rows: Vec<(u64, Vec<String>)>,
}

fn read_table(path: &PathBuf) -> CliResult<Table> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| CliError::parse(path, 1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::parse(path, e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(Table { headers, rows })
}

/// Non-empty cells of column `c`; empty or missing cells are skipped.
fn numeric_column(t: &Table, c: usize, path: &Path) -> CliResult<Vec<f64>> {
    let mut v = Vec::new();
    for (line, row) in &t.rows {
        match row.get(c).map(String::as_str) {
            None | Some("") => {}
            Some(cell) => v.push(cell.parse::<f64>().map_err(|_| {
                CliError::parse(path, *line, format!("not a number in column {}: {cell:?}", t.headers[c]))
            })?),
        }
    }
    Ok(v)
}
