#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn featcov(args: &[&str]) -> Output {
    featcov_env(args, &[])
}

pub fn featcov_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_featcov"));
    cmd.args(args).env_remove("COVERAGE_GA_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Rows of a CSV file as string fields, header first.
pub fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

/// The value in `column` of the first data row.
pub fn csv_value(path: &Path, column: &str) -> String {
    let rows = csv_rows(path);
    let c = rows[0].iter().position(|h| h == column).expect("column present");
    rows[1][c].clone()
}

/// Every regular file under `dir`, sorted by relative path, with contents.
pub fn snapshot(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

/// Brute-force K with no edge correction over all ordered pairs.
pub fn brute_k(points: &[(f64, f64)], area: f64, radii: &[f64]) -> Vec<f64> {
    let n = points.len() as f64;
    radii
        .iter()
        .map(|&r| {
            let mut count = 0usize;
            for (i, a) in points.iter().enumerate() {
                for (j, b) in points.iter().enumerate() {
                    if i != j && ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt() <= r {
                        count += 1;
                    }
                }
            }
            area / (n * n) * count as f64
        })
        .collect()
}

/// Brute-force isotropic alpha against `pi r^2`. The in-region fraction of
/// each circle is measured by sampling its circumference at `samples`
/// angles and floored at 0.01; coincident pairs get weight 1.
pub fn brute_alpha_isotropic(points: &[(f64, f64)], w: f64, h: f64, radii: &[f64], samples: usize) -> f64 {
    let n = points.len() as f64;
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let mut pairs = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate() {
            let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
            if i != j && d <= r_max {
                let frac = if d == 0.0 {
                    1.0
                } else {
                    let inside = (0..samples)
                        .filter(|&k| {
                            let t = (k as f64 + 0.5) / samples as f64 * std::f64::consts::TAU;
                            let (x, y) = (a.0 + d * t.cos(), a.1 + d * t.sin());
                            (0.0..=w).contains(&x) && (0.0..=h).contains(&y)
                        })
                        .count();
                    (inside as f64 / samples as f64).max(0.01)
                };
                pairs.push((d, 1.0 / frac));
            }
        }
    }
    radii
        .iter()
        .map(|&r| {
            let sum: f64 = pairs.iter().filter(|(d, _)| *d <= r).map(|(_, iw)| iw).sum();
            (w * h / (n * n) * sum - std::f64::consts::PI * r * r).abs()
        })
        .sum()
}
