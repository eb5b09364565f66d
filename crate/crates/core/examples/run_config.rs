// Config-driven runs: load a bundled preset, shrink it, run it into a
// directory and sweep one parameter.
//
// cargo run --example run_config (output under $MUSIC_EXAMPLE_OUT, default the temp dir)

use std::path::PathBuf;

use music_imaging::experiment::presets;
use music_imaging::experiment::run::{run, sweep};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::var_os("MUSIC_EXAMPLE_OUT").map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("music-run-config"));
    let mut table: toml::Table = presets::text("fig3").ok_or("missing preset")?.parse()?;
    // a smaller array keeps the example quick
    table["scene"]["transducers"] = toml::Value::Integer(11);
    table.remove("sweep");
    let cfg = music_imaging::experiment::ExperimentConfig::from_table(table.clone())?;

    let manifest = run(&cfg, &out.join("single"))?;
    println!(
        "{}: {} jobs, exact {:.2}, mean error {:.2} cells, config hash {}",
        manifest.name, manifest.summary.jobs, manifest.summary.exact_fraction, manifest.summary.mean_error, manifest.config_hash
    );
    for f in &manifest.files {
        println!("  {} ({} bytes)", f.path, f.bytes);
    }

    let values = [toml::Value::Float(0.02), toml::Value::Float(0.05)];
    for point in sweep(&table, "frequencies.relative_bandwidth", &values, &out.join("sweep"))? {
        println!("  bandwidth {}: mean error {:.2} cells", point.value, point.summary.mean_error);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
