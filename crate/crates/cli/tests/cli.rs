mod common;

use std::f64::consts::PI;

use common::{code, csv_rows, csv_value, featcov, fixture, s, snapshot, stderr, stdout};
use featcov::Point2;
use featcov_cli::io::{read_keypoints, write_keypoints, KeypointFormat};
use proptest::prelude::*;
use tempfile::tempdir;

#[test]
fn coverage_two_point_alpha() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("cov");
    let o = featcov(&[
        "coverage",
        s(&fixture("two_points.csv")),
        "--region", "100x100",
        "--rmin", "20", "--rmax", "20", "--dr", "1",
        "--correction", "none",
        "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let alpha: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("alpha "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((alpha - (5000.0 - 400.0 * PI)).abs() < 1e-9);
    let rows = csv_rows(&out.join("profile.csv"));
    assert_eq!(rows[0], ["r", "k_hat", "k_poisson"]);
    assert_eq!(rows[1][0], "20");
    assert_eq!(rows[1][1], "5000");
}

#[test]
fn coverage_empty_file_is_degenerate() {
    let dir = tempdir().unwrap();
    let o = featcov(&["coverage", s(&fixture("empty.csv")), "--region", "100x100", "--out", s(dir.path())]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn coverage_single_point_is_degenerate() {
    let dir = tempdir().unwrap();
    let one = dir.path().join("one.csv");
    std::fs::write(&one, "x,y\n3,4\n").unwrap();
    let o = featcov(&["coverage", s(&one), "--region", "100x100", "--out", s(dir.path())]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn coverage_malformed_row_names_line() {
    let dir = tempdir().unwrap();
    let o = featcov(&["coverage", s(&fixture("malformed.csv")), "--region", "100x100", "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains(":3:"), "{err}");
    assert!(err.contains("abc,1"), "{err}");
}

#[test]
fn coverage_point_outside_region_is_usage_error() {
    let dir = tempdir().unwrap();
    let o = featcov(&["coverage", s(&fixture("two_points.csv")), "--region", "50x50", "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains(":3:"));
}

#[test]
fn missing_region_and_bad_flags_are_usage_errors() {
    let dir = tempdir().unwrap();
    let o = featcov(&["coverage", s(&fixture("two_points.csv")), "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
    let o = featcov(&["coverage", s(&fixture("two_points.csv")), "--region", "100by100"]);
    assert_eq!(code(&o), 2);
    let o = featcov(&["coverage", "--correction", "sideways"]);
    assert_eq!(code(&o), 2);
    let o = featcov(&["frobnicate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn select_refines_fixture() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("sel");
    let o = featcov(&[
        "select",
        s(&fixture("cluster_dispersed.csv")),
        "--region", "640x480",
        "--seed", "42",
        "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let history = csv_rows(&out.join("history.csv"));
    assert_eq!(history[0], ["generation", "best_alpha", "selected_count"]);
    assert_eq!(history.len(), 22);
    let alphas: Vec<f64> = history[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(alphas.windows(2).all(|w| w[1] <= w[0]));
    assert!(alphas.last().unwrap() <= &alphas[0]);
    let refined = std::fs::read_to_string(out.join("refined.csv")).unwrap();
    assert!(refined.starts_with("x,y\n"));
    assert!(refined.lines().count() - 1 < 100);
    let grid = std::fs::read_to_string(out.join("grid_counts.txt")).unwrap();
    assert!(grid.contains("original") && grid.contains("refined"));
    assert!(out.join("manifest.json").exists());
}

#[test]
fn select_zero_generations_copies_input() {
    let dir = tempdir().unwrap();
    for name in ["cluster_dispersed.csv", "cluster_dispersed.json"] {
        let out = dir.path().join(name);
        let o = featcov(&[
            "select", s(&fixture(name)), "--region", "640x480", "--generations", "0", "--out", s(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let ext = name.rsplit('.').next().unwrap();
        assert_eq!(
            std::fs::read(out.join(format!("refined.{ext}"))).unwrap(),
            std::fs::read(fixture(name)).unwrap()
        );
    }
}

#[test]
fn select_rerun_from_manifest_is_byte_identical() {
    let dir = tempdir().unwrap();
    let first = dir.path().join("a");
    let o = featcov(&[
        "select", s(&fixture("cluster_dispersed.csv")), "--region", "640x480",
        "--generations", "8", "--mutation-unit", "chromosome", "--out", s(&first),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let second = dir.path().join("b");
    let o = featcov(&["select", "--manifest", s(&first.join("manifest.json")), "--out", s(&second)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (a, b) = (snapshot(&first), snapshot(&second));
    assert_eq!(a.len(), b.len());
    for ((pa, ca), (pb, cb)) in a.iter().zip(&b) {
        assert_eq!(pa, pb);
        if pa.as_os_str() != "manifest.json" {
            assert_eq!(ca, cb, "{}", pa.display());
        }
    }
}

#[test]
fn manifest_for_other_command_is_rejected() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("cov");
    let o = featcov(&["coverage", s(&fixture("two_points.csv")), "--region", "100x100", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let o = featcov(&["select", "--manifest", s(&out.join("manifest.json"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn evaluate_identical_images_align_perfectly() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("ev");
    let o = featcov(&[
        "evaluate",
        s(&fixture("scene1.pgm")),
        s(&fixture("scene1.pgm")),
        "--synthetic", s(&fixture("H_identity.txt")),
        "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let results = out.join("results.csv");
    assert_eq!(csv_value(&results, "alignment_original"), "0");
    assert_eq!(csv_value(&results, "alignment_refined"), "0");
}

#[test]
fn evaluate_noiseless_synthetic_pair() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("ev");
    let o = featcov(&[
        "evaluate",
        s(&fixture("scene1.pgm")),
        s(&fixture("scene2.pgm")),
        "--synthetic", s(&fixture("H_scene.txt")),
        "--id", "scene",
        "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let results = out.join("results.csv");
    assert_eq!(csv_value(&results, "pair_id"), "scene");
    for col in ["rmse_original", "rmse_refined"] {
        let v: f64 = csv_value(&results, col).parse().unwrap();
        assert!(v < 1e-6, "{col} = {v}");
    }
    let n_orig: usize = csv_value(&results, "n_original").parse().unwrap();
    let n_ref: usize = csv_value(&results, "n_refined").parse().unwrap();
    assert_eq!(n_orig, 100);
    assert!(n_ref <= n_orig);
}

#[test]
fn evaluate_correspondence_file() {
    let dir = tempdir().unwrap();
    let corrs = dir.path().join("c.csv");
    let mut text = String::from("x1,y1,x2,y2\n");
    for k in 0..30 {
        let (x, y) = ((k * 37 % 150) as f64 + 3.0, (k * 53 % 110) as f64 + 4.0);
        text.push_str(&format!("{x},{y},{},{}\n", x + 2.0, y - 1.0));
    }
    std::fs::write(&corrs, text).unwrap();
    let out = dir.path().join("ev");
    let o = featcov(&[
        "evaluate", s(&fixture("scene1.pgm")), s(&fixture("scene2.pgm")), s(&corrs), "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: f64 = csv_value(&out.join("results.csv"), "rmse_original").parse().unwrap();
    assert!(v < 1e-9);
}

#[test]
fn evaluate_batch_writes_one_row_per_pair() {
    let dir = tempdir().unwrap();
    let list = dir.path().join("pairs.csv");
    let mut text = String::from("id,image1,image2,homography\n");
    for k in 0..20 {
        text.push_str(&format!(
            "p{k:02},{},{},{}\n",
            s(&fixture("scene1.pgm")),
            s(&fixture("scene2.pgm")),
            s(&fixture("H_scene.txt"))
        ));
    }
    std::fs::write(&list, text).unwrap();
    let out = dir.path().join("ev");
    let o = featcov(&[
        "evaluate", "--pairs", s(&list), "--noise", "0.5", "--generations", "5", "--out", s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&out.join("results.csv"));
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[0].join(","), featcov_cli::commands::RESULTS_HEADER);
    for (k, row) in rows[1..].iter().enumerate() {
        assert_eq!(row[0], format!("p{k:02}"));
        assert_eq!(row.len(), 7);
    }
    assert_eq!(csv_rows(&out.join("failures.csv")).len(), 1);

    // the results feed straight into the stats command
    let st = dir.path().join("st");
    let o = featcov(&["stats", s(&out.join("results.csv")), "--tie-epsilon", "0.05", "--out", s(&st)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("rmse") && text.contains("alignment") && text.contains("McNemar z"));
}

#[test]
fn evaluate_batch_continues_past_failures() {
    let dir = tempdir().unwrap();
    let list = dir.path().join("pairs.csv");
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x1,y1,x2,y2\n1,1,2,2\n5,5,6,6\n").unwrap();
    let text = format!(
        "id,image1,image2,correspondences,homography\nok1,{i1},{i2},,{h}\nbad,{i1},{i2},{c},\nok2,{i1},{i2},,{h}\n",
        i1 = s(&fixture("scene1.pgm")),
        i2 = s(&fixture("scene2.pgm")),
        h = s(&fixture("H_scene.txt")),
        c = s(&bad),
    );
    std::fs::write(&list, text).unwrap();
    let out = dir.path().join("ev");
    let o = featcov(&["evaluate", "--pairs", s(&list), "--generations", "2", "--out", s(&out)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("bad"));
    let rows = csv_rows(&out.join("results.csv"));
    let ids: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(ids, ["ok1", "ok2"]);
    let failures = csv_rows(&out.join("failures.csv"));
    assert_eq!(failures.len(), 2);
    assert_eq!(failures[1][0], "bad");
}

#[test]
fn stats_table1_summary() {
    let dir = tempdir().unwrap();
    let o = featcov(&["stats", s(&fixture("table1_summary.csv")), "--summary", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t: f64 = csv_value(&dir.path().join("stats.csv"), "t_stat").parse().unwrap();
    assert!((t - 10.5723).abs() < 1e-3, "t = {t}");
    assert!(stdout(&o).contains("10.5723"));
}

#[test]
fn stats_table2_summary() {
    let dir = tempdir().unwrap();
    let o = featcov(&["stats", s(&fixture("table2_summary.csv")), "--summary", "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let t: f64 = csv_value(&dir.path().join("stats.csv"), "t_stat").parse().unwrap();
    assert!((t.abs() - 0.2875).abs() < 1e-3, "t = {t}");
}

#[test]
fn stats_identical_columns() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("r.csv");
    std::fs::write(&input, "pair_id,err_original,err_refined\na,1.5,1.5\nb,2.25,2.25\nc,0.75,0.75\nd,3,3\n").unwrap();
    let o = featcov(&["stats", s(&input), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = dir.path().join("stats.csv");
    assert_eq!(csv_value(&out, "t_stat").parse::<f64>().unwrap(), 0.0);
    assert_eq!(csv_value(&out, "mcnemar_z").parse::<f64>().unwrap(), 0.0);
}

#[test]
fn stats_unequal_columns_exit_2() {
    let dir = tempdir().unwrap();
    let input = dir.path().join("r.csv");
    std::fs::write(&input, "err_original,err_refined\n1,2\n3,\n4,5\n").unwrap();
    let o = featcov(&["stats", s(&input), "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("err_original"));
}

#[test]
fn thread_variable_must_be_positive() {
    let o = common::featcov_env(
        &["stats", s(&fixture("table1_summary.csv")), "--summary"],
        &[("COVERAGE_GA_THREADS", "zero")],
    );
    assert_eq!(code(&o), 2);
}

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![0.0..=640.0f64, (0u32..=640).prop_map(f64::from), Just(0.1 + 0.2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn keypoint_files_round_trip(
        pts in prop::collection::vec((coord(), coord()), 0..60),
        json in any::<bool>(),
    ) {
        let region = featcov::Region::new(640.0, 640.0).unwrap();
        let points: Vec<Point2> = pts.into_iter().map(|(x, y)| Point2 { x, y }).collect();
        let dir = tempdir().unwrap();
        let (name, format) = if json { ("k.json", KeypointFormat::Json) } else { ("k.csv", KeypointFormat::Csv) };
        let path = dir.path().join(name);
        write_keypoints(&path, &points, format).unwrap();
        let back = read_keypoints(&path, region).unwrap();
        prop_assert_eq!(back.len(), points.len());
        for (a, b) in back.iter().zip(&points) {
            prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
            prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
        }
    }
}
