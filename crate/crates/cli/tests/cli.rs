use std::process::{Command, Output};

use squitter_sim::sweep::point_seed;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squitter-sim"))
        .args(args)
        .env_remove("SQUITTER_SIM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = bin(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Mean received ratio from the `summary` rows of a sweep table, by value.
fn sweep_means(csv: &str) -> Vec<(String, String)> {
    csv.lines()
        .filter(|l| l.split(',').nth(2) == Some("summary"))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[4].to_string())
        })
        .collect()
}

#[test]
fn json_report_has_received_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("tiny.scn");
    std::fs::write(&scn, "n_planes = 30\nduration_s = 20\nseed = 4\n").unwrap();
    let text = stdout(&["run", "--scenario", scn.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let r = v["received_ratio"].as_f64().unwrap();
    assert!(r > 0.0 && r <= 1.0);
    assert_eq!(v["seed"], 4);
}

#[test]
fn missing_scenario_is_an_error() {
    let out = bin(&["run", "--scenario", "/nonexistent/none.scn"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("scenario not found"));
}

#[test]
fn unknown_key_is_reported_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("bad.scn");
    std::fs::write(&scn, "n_planes = 3\nn_gliders = 2\n").unwrap();
    let out = bin(&["run", "--scenario", scn.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n_gliders") && err.contains('2'), "{err}");
}

#[test]
fn fig6_csv_has_plane_and_uav_bins() {
    let text = stdout(&["run", "--scenario", "fig6"]);
    let bins: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.contains("bins/v1"))
        .skip(2)
        .take_while(|l| !l.is_empty())
        .collect();
    assert!(bins.iter().any(|l| l.split(',').nth(1) == Some("plane")));
    assert!(bins.iter().any(|l| l.split(',').nth(1) == Some("uav")));
}

#[test]
fn density_sweep_decreases_and_repeats() {
    let args = [
        "sweep", "--scenario", "fig3_200", "--param", "n_planes", "--values", "50,100,150,200", "--reps", "3",
    ];
    let first = stdout(&args);
    assert!(first.starts_with("# schema: squitter-sim/sweep/v1\n"));
    let means: Vec<f64> = sweep_means(&first).iter().map(|(_, m)| m.parse().unwrap()).collect();
    assert_eq!(means.len(), 4);
    assert!(means.windows(2).all(|w| w[0] > w[1]), "{means:?}");
    assert_eq!(first, stdout(&args));
}

#[test]
fn single_point_sweep_matches_run() {
    let sweep = stdout(&[
        "sweep", "--scenario", "fig3_100", "--param", "n_planes", "--values", "100", "--reps", "3",
    ]);
    let seed = point_seed(1, "100").to_string();
    let run = stdout(&["run", "--scenario", "fig3_100", "--seed", &seed, "--reps", "3"]);
    let mean_row = run.lines().find(|l| l.starts_with("mean,")).unwrap();
    let run_mean = mean_row.split(',').nth(2).unwrap();
    assert_eq!(sweep_means(&sweep), vec![("100".to_string(), run_mean.to_string())]);
}

#[test]
fn infeasible_calibration_fails() {
    let out = bin(&["calibrate", "--scenario", "fig5", "--target", "0.99", "--reps", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("calibration failed"));
}

#[test]
fn presets_listed_and_written() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&["presets", "--write-to", dir.path().to_str().unwrap()]);
    for name in ["fig3_50.scn", "fig4.scn", "fig5.scn", "fig6.scn", "fig7.scn"] {
        assert!(text.contains(name));
        assert!(dir.path().join(name).exists());
    }
    let written = dir.path().join("fig6.scn");
    let from_file = stdout(&["run", "--scenario", written.to_str().unwrap(), "--format", "json"]);
    assert_eq!(from_file, stdout(&["run", "--scenario", "fig6", "--format", "json"]));
}

#[test]
fn out_dir_env_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_squitter-sim"))
        .args(["run", "--scenario", "fig3_50", "--format", "json"])
        .env("SQUITTER_SIM_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("run.json").exists());
    let explicit = dir.path().join("nested/report.csv");
    stdout(&["run", "--scenario", "fig3_50", "--out", explicit.to_str().unwrap()]);
    let body = std::fs::read_to_string(explicit).unwrap();
    assert!(body.starts_with("# schema: squitter-sim/summary/v1"));
}

#[test]
fn identical_invocations_identical_output() {
    let args = ["run", "--scenario", "fig5", "--reps", "2", "--format", "csv"];
    assert_eq!(stdout(&args), stdout(&args));
}
