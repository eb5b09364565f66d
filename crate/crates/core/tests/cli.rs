//! The command-line front end: outputs, sweeps and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CONFIG: &str = r#"
name = "small"

[scene]
transducers = 21
aperture = 100.0
standoff = 100.0

[window]
cross_range_extent = 20.0
range_extent = 40.0
cross_range_count = 21
range_count = 21

[scatterers]
count = 2
seed = 4
min_separation_cells = 5

[data]
kind = "single_freq"

[[illumination]]
policy = "point"

[noise]
snr_db = 20.0
seeds = 3
"#;

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_music-imaging"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn run_writes_metrics_images_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.toml"), CONFIG).unwrap();
    let out = cli(&["run", "small.toml", "--out", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res = dir.path().join("res");
    let metrics = fs::read_to_string(res.join("metrics.csv")).unwrap();
    // header plus one row per noise seed
    assert_eq!(metrics.lines().count(), 4);
    assert!(res.join("manifest.toml").exists());
    assert!(res.join("image_scene0_point_noise0.pgm").exists());

    // the saved config reproduces the metrics exactly
    let again = cli(&["run", "res/config.toml", "--out", "again"], dir.path());
    assert!(again.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("again/metrics.csv")).unwrap(), metrics);
}

#[test]
fn sweep_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.toml"), CONFIG).unwrap();
    let out = cli(
        &["sweep", "small.toml", "--param", "noise.snr_db", "--values", "40,0", "--out", "sw", "--threads", "2"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(dir.path().join("sw/sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.lines().nth(1).unwrap().starts_with("noise.snr_db,40"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["run"], dir.path()).status.code(), Some(2));
    assert_eq!(cli(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(cli(&["run", "--preset", "fig9"], dir.path()).status.code(), Some(2));
    assert_eq!(cli(&["run", "missing.toml"], dir.path()).status.code(), Some(4));

    fs::write(dir.path().join("bad.toml"), CONFIG.replace("seeds = 3", "seeds = 3\ncolour = 1")).unwrap();
    let out = cli(&["run", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("colour"), "{stderr}");

    let out = cli(&["sweep", "--preset", "fig3", "--param", "scene.transducers", "--values", "0"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn presets_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["presets"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["fig2", "fig3", "fig4", "fig5"] {
        assert!(text.contains(name));
    }
}
