//! File formats: key-point lists, correspondences, homographies and PGM
//! images.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use featcov::{Correspondence, GrayImage, Homography, Point2, Region};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeypointFormat {
    /// `x,y` per line with an optional header row.
    Csv,
    /// A JSON array of `[x, y]` pairs.
    Json,
}

impl KeypointFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => KeypointFormat::Json,
            _ => KeypointFormat::Csv,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            KeypointFormat::Csv => "csv",
            KeypointFormat::Json => "json",
        }
    }
}

pub fn parse_dims(s: &str, what: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Usage(format!("{what} must look like WxH, got {s:?}"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let w: f64 = w.trim().parse().map_err(|_| bad())?;
    let h: f64 = h.trim().parse().map_err(|_| bad())?;
    Ok((w, h))
}

pub fn parse_grid(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("grid must look like NXxNY, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let nx: usize = a.trim().parse().map_err(|_| bad())?;
    let ny: usize = b.trim().parse().map_err(|_| bad())?;
    if nx == 0 || ny == 0 {
        return Err(bad());
    }
    Ok((nx, ny))
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

/// Reads numeric CSV rows of a fixed width. The first row is skipped as a
/// header when none of its fields is numeric. Returns `(line, values)`.
fn read_numeric_rows(path: &Path, width: usize) -> CliResult<Vec<(u64, Vec<f64>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let mut rows = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::parse(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(idx as u64 + 1, |p| p.line());
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Vec<Option<f64>> = rec.iter().map(|f| f.parse::<f64>().ok()).collect();
        if idx == 0 && parsed.iter().all(Option::is_none) {
            continue;
        }
        if rec.len() != width {
            return Err(CliError::parse(
                path,
                line,
                format!("expected {width} fields, found {} in row {:?}", rec.len(), rec.iter().collect::<Vec<_>>().join(",")),
            ));
        }
        let mut values = Vec::with_capacity(width);
        for (field, v) in rec.iter().zip(parsed) {
            match v {
                Some(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(CliError::parse(
                        path,
                        line,
                        format!("not a finite number: {field:?} in row {:?}", rec.iter().collect::<Vec<_>>().join(",")),
                    ))
                }
            }
        }
        rows.push((line, values));
    }
    Ok(rows)
}

/// Loads key-points, checking each lies inside `region`.
pub fn read_keypoints(path: &Path, region: Region) -> CliResult<Vec<Point2>> {
    let rows: Vec<(u64, f64, f64)> = match KeypointFormat::from_path(path) {
        KeypointFormat::Csv => read_numeric_rows(path, 2)?
            .into_iter()
            .map(|(line, v)| (line, v[0], v[1]))
            .collect(),
        KeypointFormat::Json => {
            let pts: Vec<[f64; 2]> = serde_json::from_reader(std::io::BufReader::new(open(path)?))
                .map_err(|e| CliError::parse(path, e.line() as u64, e.to_string()))?;
            pts.into_iter()
                .enumerate()
                .map(|(i, [x, y])| (i as u64 + 1, x, y))
                .collect()
        }
    };
    rows.into_iter()
        .map(|(line, x, y)| {
            let p = Point2::new(x, y).map_err(|e| CliError::parse(path, line, e.to_string()))?;
            if !region.contains(p) {
                return Err(CliError::parse(
                    path,
                    line,
                    format!(
                        "point ({x}, {y}) outside the {}x{} region",
                        region.width(),
                        region.height()
                    ),
                ));
            }
            Ok(p)
        })
        .collect()
}

/// Writes key-points with shortest round-trip float formatting, so reading
/// the file back reproduces every coordinate bit for bit.
pub fn write_keypoints(path: &Path, points: &[Point2], format: KeypointFormat) -> CliResult<()> {
    let mut w = create(path)?;
    let res = match format {
        KeypointFormat::Csv => (|| {
            writeln!(w, "x,y")?;
            for p in points {
                writeln!(w, "{},{}", p.x, p.y)?;
            }
            w.flush()
        })(),
        KeypointFormat::Json => {
            let pairs: Vec<[f64; 2]> = points.iter().map(|p| [p.x, p.y]).collect();
            serde_json::to_writer(&mut w, &pairs)
                .map_err(std::io::Error::other)
                .and_then(|_| writeln!(w))
                .and_then(|_| w.flush())
        }
    };
    res.map_err(|e| CliError::io(path, e))
}

pub fn read_correspondences(path: &Path) -> CliResult<Vec<Correspondence>> {
    read_numeric_rows(path, 4)?
        .into_iter()
        .map(|(_, v)| {
            Ok(Correspondence::new(
                Point2 { x: v[0], y: v[1] },
                Point2 { x: v[2], y: v[3] },
            ))
        })
        .collect()
}

pub fn write_correspondences(path: &Path, corrs: &[Correspondence]) -> CliResult<()> {
    let mut w = create(path)?;
    (|| {
        writeln!(w, "x1,y1,x2,y2")?;
        for c in corrs {
            writeln!(w, "{},{},{},{}", c.p1.x, c.p1.y, c.p2.x, c.p2.y)?;
        }
        w.flush()
    })()
    .map_err(|e| CliError::io(path, e))
}

/// Three lines of three whitespace-separated reals, row-major.
pub fn read_homography(path: &Path) -> CliResult<Homography> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut rows = Vec::with_capacity(3);
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
        let vals = vals.map_err(|e| CliError::parse(path, i as u64 + 1, e.to_string()))?;
        if vals.len() != 3 {
            return Err(CliError::parse(path, i as u64 + 1, format!("expected 3 values, found {}", vals.len())));
        }
        rows.push([vals[0], vals[1], vals[2]]);
    }
    if rows.len() != 3 {
        return Err(CliError::parse(path, rows.len() as u64, format!("expected 3 rows, found {}", rows.len())));
    }
    Ok(Homography::from_rows([rows[0], rows[1], rows[2]])?)
}

pub fn write_homography(path: &Path, h: &Homography) -> CliResult<()> {
    let mut w = create(path)?;
    (|| {
        for row in h.rows() {
            writeln!(w, "{} {} {}", row[0], row[1], row[2])?;
        }
        w.flush()
    })()
    .map_err(|e| CliError::io(path, e))
}

pub fn read_pgm(path: &Path) -> CliResult<GrayImage> {
    let reader = image::ImageReader::open(path).map_err(|e| CliError::io(path, e))?;
    let img = reader
        .with_guessed_format()
        .map_err(|e| CliError::io(path, e))?
        .decode()
        .map_err(|e| CliError::parse(path, 0, e.to_string()))?
        .into_luma8();
    let (w, h) = img.dimensions();
    Ok(GrayImage::new(w as usize, h as usize, img.into_raw())?)
}

/// Binary PGM (P5, maxval 255).
pub fn write_pgm(path: &Path, img: &GrayImage) -> CliResult<()> {
    use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
    use image::ImageEncoder;
    let w = create(path)?;
    PnmEncoder::new(w)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(
            img.pixels(),
            img.width() as u32,
            img.height() as u32,
            image::ExtendedColorType::L8,
        )
        .map_err(|e| CliError::io(path, std::io::Error::other(e)))
}
