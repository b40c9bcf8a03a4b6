use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_enclosure"));
    c.env_remove("ENCLOSURE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn write_scene(dir: &Path, name: &str, inclusion: &str, k: f64) -> PathBuf {
    let p = dir.join(name);
    let doc = format!(
        r#"{{"omega": {{"type": "regular_polygon", "n": 64, "circumradius": 3.0, "center": [0, 0]}},
            "inclusion": {{"vertices": {inclusion}}},
            "k": {k},
            "current": {{"type": "linear", "direction": [1, 0]}}}}"#
    );
    std::fs::write(&p, doc).unwrap();
    p
}

/// Forward run on the default scene into a fresh directory.
fn forward_default(extra: &[&str]) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["forward", "--out", path_str(dir.path())];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Parses an indicator CSV into `(tau, abs, trusted)` rows.
fn indicator_rows(p: &Path) -> Vec<(f64, f64, bool)> {
    let text = std::fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phi_rad,tau,t,re,im,abs,log_abs,trusted"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[5].parse().unwrap(), f[7] == "true")
        })
        .collect()
}

#[test]
fn forward_writes_compatible_data_and_manifest() {
    let dir = forward_default(&[]);
    let cd = read_json(&dir.path().join("cauchy.json"));
    let g = cd["g"].as_array().unwrap();
    let w = cd["weights"].as_array().unwrap();
    assert_eq!(g.len(), cd["boundary_nodes"].as_array().unwrap().len());
    let flux: f64 = g.iter().zip(w).map(|(g, w)| g.as_f64().unwrap() * w.as_f64().unwrap()).sum();
    assert!(flux.abs() < 1e-10, "flux {flux}");
    assert!(cd["scene_digest"].as_str().unwrap().len() == 64);

    let rec = read_json(&dir.path().join("run_record.json"));
    assert_eq!(rec["command"], "forward");
    let files = rec["files"].as_array().unwrap();
    assert_eq!(files.len(), 2);
    for f in files {
        let bytes = std::fs::read(dir.path().join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
    let stages: Vec<&str> = rec["timings"].as_array().unwrap().iter().map(|t| t["stage"].as_str().unwrap()).collect();
    assert_eq!(stages, ["mesh", "solve", "extract"]);
}

#[test]
fn scene_file_round_trips_through_forward() {
    let dir = forward_default(&["--h", "0.2"]);
    let scene = dir.path().join("scene.json");
    let again = tempfile::tempdir().unwrap();
    let o = run(&["forward", "--scene", path_str(&scene), "--h", "0.2", "--out", path_str(again.path())]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        std::fs::read(dir.path().join("cauchy.json")).unwrap(),
        std::fs::read(again.path().join("cauchy.json")).unwrap()
    );
}

#[test]
fn inclusion_touching_the_boundary_is_a_geometry_error() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_scene(dir.path(), "s.json", "[[2.5, -0.5], [3.5, -0.5], [3.5, 0.5], [2.5, 0.5]]", 2.0);
    let o = run(&["forward", "--scene", path_str(&s), "--out", path_str(dir.path())]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn restriction_violation_needs_the_override() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_scene(dir.path(), "big.json", "[[-1.2, -1.2], [1.2, -1.2], [1.2, 1.2], [-1.2, 1.2]]", 2.0);
    let out = dir.path().join("out");
    let o = run(&["forward", "--scene", path_str(&s), "--h", "0.2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 1);
    assert!(!out.exists());
    let o = run(&[
        "forward",
        "--scene",
        path_str(&s),
        "--h",
        "0.2",
        "--out",
        path_str(&out),
        "--allow-restriction-violation",
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(out.join("cauchy.json").exists());
}

#[test]
fn bad_inputs_are_configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&run(&["forward", "--scene", path_str(&missing), "--out", path_str(dir.path())])), 1);
    assert_eq!(code(&run(&["forward", "--h", "-1", "--out", path_str(dir.path())])), 1);
    let csv = dir.path().join("i.csv");
    assert_eq!(
        code(&run(&["indicator", "--cauchy", path_str(&missing), "--phi-deg", "45", "--out", path_str(&csv)])),
        1
    );
    let o = bin()
        .env("ENCLOSURE_THREADS", "0")
        .args(["spectrum", "--k", "2", "--theta-deg", "270", "--out", path_str(&csv)])
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn indicator_grows_inside_and_decays_outside() {
    let dir = forward_default(&[]);
    let cauchy = dir.path().join("cauchy.json");

    let inside = dir.path().join("t0.csv");
    let o = run(&["indicator", "--cauchy", path_str(&cauchy), "--phi-deg", "45", "--t", "0", "--out", path_str(&inside)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = indicator_rows(&inside);
    assert_eq!(rows.len(), 24);
    assert!((rows[0].0 - 4.0).abs() < 1e-12 && (rows[23].0 - 13.0).abs() < 1e-12);
    // samples past the trust cap are flagged, not dropped
    assert!(rows.iter().filter(|r| r.0 > 9.0).all(|r| !r.2));
    let trusted: Vec<_> = rows.iter().filter(|r| r.2).collect();
    assert!(trusted.len() >= 8);
    assert!(trusted.windows(2).all(|w| w[1].1 > w[0].1));

    let outside = dir.path().join("t2.csv");
    let o = run(&["indicator", "--cauchy", path_str(&cauchy), "--phi-deg", "45", "--t", "2", "--out", path_str(&outside)]);
    assert_eq!(code(&o), 0);
    let trusted: Vec<_> = indicator_rows(&outside).into_iter().filter(|r| r.2).collect();
    assert!(trusted.len() >= 8);
    assert!(trusted.windows(2).all(|w| w[1].1 < w[0].1));
}

#[test]
fn reconstruct_reports_hull_estimates_and_metrics() {
    let dir = forward_default(&[]);
    let cauchy = dir.path().join("cauchy.json");
    let scene = dir.path().join("scene.json");
    let out = dir.path().join("hull.json");
    let o = run(&[
        "reconstruct",
        "--cauchy",
        path_str(&cauchy),
        "--truth",
        path_str(&scene),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&out);
    let est = doc["estimates"].as_array().unwrap();
    assert_eq!(est.len(), 16);
    let ok: Vec<&Value> = est.iter().filter(|e| e["status"] == "ok").collect();
    assert!(ok.len() >= 8);
    for e in ok {
        assert!(e["r2"].as_f64().unwrap() >= 0.99);
        assert_eq!(e["window"].as_array().unwrap().len(), 2);
    }
    assert!(doc["hull"].as_array().unwrap().len() >= 3);
    let hd = doc["metrics"]["hausdorff"].as_f64().unwrap();
    assert!(hd > 0.0 && hd < 0.3, "hausdorff {hd}");
    assert_eq!(doc["metrics"]["support_errors"].as_array().unwrap().len(), 16);
}

#[test]
fn noise_that_hides_every_direction_is_a_coverage_error() {
    let dir = forward_default(&[]);
    let o = run(&[
        "reconstruct",
        "--cauchy",
        path_str(&dir.path().join("cauchy.json")),
        "--noise",
        "0.01",
        "--out",
        path_str(&dir.path().join("h.json")),
    ]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn spectrum_lists_the_corner_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("mu.csv");
    let trace = dir.path().join("det.csv");
    let o = run(&[
        "spectrum",
        "--k",
        "2",
        "--theta-deg",
        "270",
        "--out",
        path_str(&csv),
        "--det-trace",
        path_str(&trace),
    ]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mus: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    let mu1 = 2.0 / std::f64::consts::PI * (1.0f64 / 6.0).acos();
    assert_eq!(mus.len(), 7);
    assert!((mus[0] - mu1).abs() < 1e-10 && (mus[1] - (2.0 - mu1)).abs() < 1e-10 && (mus[2] - 2.0).abs() < 1e-10);
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 1001);

    assert_eq!(code(&run(&["spectrum", "--k", "1", "--theta-deg", "270", "--out", path_str(&csv)])), 1);
    assert_eq!(code(&run(&["spectrum", "--k", "2", "--theta-deg", "90", "--out", path_str(&csv)])), 1);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = forward_default(&[]);
    let b = forward_default(&[]);
    let ca = std::fs::read(a.path().join("cauchy.json")).unwrap();
    assert_eq!(ca, std::fs::read(b.path().join("cauchy.json")).unwrap());

    let hull = |d: &TempDir, threads: &str| {
        let out = d.path().join(format!("h{threads}.json"));
        let o = bin()
            .env("ENCLOSURE_THREADS", threads)
            .args(["reconstruct", "--cauchy", path_str(&d.path().join("cauchy.json"))])
            .args(["--out", path_str(&out)])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        std::fs::read(out).unwrap()
    };
    assert_eq!(hull(&a, "1"), hull(&b, "4"));
}

#[test]
fn config_digest_follows_the_configuration() {
    let digest = |extra: &[&str]| {
        let d = forward_default(&[&["--h", "0.2"], extra].concat());
        read_json(&d.path().join("run_record.json"))["config_digest"].as_str().unwrap().to_owned()
    };
    let base = digest(&[]);
    assert_eq!(base, digest(&[]));
    assert_ne!(base, digest(&["--grading", "3"]));
    assert_ne!(base, digest(&["--allow-restriction-violation"]));
}

#[test]
fn validate_passes_on_the_default_scene() {
    let o = run(&["validate"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    assert!(text.lines().count() >= 9);
}

#[test]
fn validate_without_contrast_checks_that_the_indicator_vanishes() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_scene(dir.path(), "flat.json", "[[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]", 1.0);
    let o = run(&["validate", "--scene", path_str(&s)]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{text}");
    assert!(text.contains("PASS  indicator vanishes without contrast"));
}
