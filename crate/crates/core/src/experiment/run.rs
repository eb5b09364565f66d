//! Config-driven runs and sweeps.
//!
//! A run expands into jobs `(scene, illumination set, noise seed)` that are
//! executed in parallel and collected in job order, so outputs do not depend
//! on the thread count. Files written into the output directory:
//!
//! - `metrics.csv`, one row per job, header [`METRICS_HEADER`];
//! - `<image>.pgm`, `<image>.scale.txt`, `<image>.csv` per imaged job;
//! - `config.toml`, the canonical config (re-running it reproduces the run);
//! - `manifest.toml`, with the config hash, seeds, summary and an inventory
//!   of every file above with its SHA-256.
//!
//! A sweep writes one run per value into `<out>/<index>_<value>/` and merges
//! the summaries into `<out>/sweep.csv` (header [`SWEEP_HEADER`]).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{ConfigErrors, ExperimentConfig, IlluminationPolicy, ImagePolicy, SupportMethod};
use super::metrics::metrics;
use super::pipeline::{first_response, image, ImagingRequest};
use super::ExperimentError;
use crate::export::write_pseudospectrum;
use crate::forward::Illumination;
use crate::robustness::{illumination_gamma, optimal_illuminations, random_illuminations};
use crate::scene::Scene;
use crate::structures::{single_freq_model, DataKind};

pub const METRICS_HEADER: [&str; 17] = [
    "scene",
    "scene_seed",
    "illumination",
    "gamma",
    "noise_seed",
    "snr_db",
    "kind",
    "rank",
    "exact_match",
    "mean_error",
    "max_error",
    "max_recovered_error",
    "misses",
    "false_alarms",
    "weyl_max_shift",
    "weyl_bound",
    "clamped_intensities",
];

pub const SWEEP_HEADER: [&str; 9] = [
    "param",
    "value",
    "jobs",
    "exact_fraction",
    "mean_error",
    "max_error",
    "max_recovered_error",
    "misses",
    "false_alarms",
];

/// Illumination set of a single-frequency run; `None` for other kinds.
#[derive(Debug, Clone)]
pub struct IlluminationSet {
    pub label: String,
    pub illuminations: Option<Vec<Illumination>>,
}

/// Result of one job.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub scene: usize,
    pub scene_seed: u64,
    pub illumination: String,
    /// `gamma` of the illumination set on the true support (single frequency).
    pub gamma: Option<f64>,
    pub noise_seed: Option<u64>,
    pub snr_db: Option<f64>,
    pub kind: DataKind,
    pub rank: usize,
    pub exact_match: bool,
    pub mean_error: f64,
    pub max_error: f64,
    /// Largest distance from a recovered index to the nearest scatterer.
    pub max_recovered_error: f64,
    pub misses: usize,
    pub false_alarms: usize,
    pub weyl_max_shift: Option<f64>,
    pub weyl_bound: Option<f64>,
    pub clamped: usize,
}

/// Pseudospectrum kept for writing.
#[derive(Debug, Clone)]
pub struct Image {
    pub stem: String,
    pub values: Vec<f64>,
    pub dims: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct Execution {
    pub rows: Vec<MetricRow>,
    pub images: Vec<Image>,
}

/// Aggregates over a set of rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub jobs: usize,
    pub exact_fraction: f64,
    /// Mean over jobs of the per-job mean localization error.
    pub mean_error: f64,
    pub max_error: f64,
    pub max_recovered_error: f64,
    pub misses: usize,
    pub false_alarms: usize,
}

impl Summary {
    pub fn of<'a>(rows: impl IntoIterator<Item = &'a MetricRow>) -> Self {
        let mut s = Summary {
            jobs: 0,
            exact_fraction: 0.0,
            mean_error: 0.0,
            max_error: 0.0,
            max_recovered_error: 0.0,
            misses: 0,
            false_alarms: 0,
        };
        let mut exact = 0usize;
        for r in rows {
            s.jobs += 1;
            exact += r.exact_match as usize;
            s.mean_error += r.mean_error;
            s.max_error = s.max_error.max(r.max_error);
            s.max_recovered_error = s.max_recovered_error.max(r.max_recovered_error);
            s.misses += r.misses;
            s.false_alarms += r.false_alarms;
        }
        if s.jobs > 0 {
            s.exact_fraction = exact as f64 / s.jobs as f64;
            s.mean_error /= s.jobs as f64;
        }
        s
    }
}

/// Illumination sets for one scene, in config order.
pub fn illumination_sets(cfg: &ExperimentConfig, scene: &Scene) -> crate::Result<Vec<IlluminationSet>> {
    if cfg.kind() != DataKind::SingleFreq {
        return Ok(vec![IlluminationSet {
            label: "-".into(),
            illuminations: None,
        }]);
    }
    if cfg.illumination.is_empty() {
        return Ok(vec![IlluminationSet {
            label: "point".into(),
            illuminations: None,
        }]);
    }
    let n = scene.array.len();
    let mut out = Vec::new();
    for section in &cfg.illumination {
        match section.policy {
            IlluminationPolicy::Point => out.push(IlluminationSet {
                label: "point".into(),
                illuminations: Some(Illumination::all_points(n)),
            }),
            IlluminationPolicy::Optimal => {
                let count = section.count.unwrap_or(scene.scatterers.len());
                out.push(IlluminationSet {
                    label: format!("optimal{count}"),
                    illuminations: Some(optimal_illuminations(&first_response(scene)?, count)?),
                });
            }
            IlluminationPolicy::Random => {
                let count = section.count.expect("validated");
                for s in 0..section.sets as u64 {
                    let seed = section.seed + s;
                    out.push(IlluminationSet {
                        label: format!("random{count}-s{seed}"),
                        illuminations: Some(random_illuminations(n, count, seed)),
                    });
                }
            }
        }
    }
    Ok(out)
}

struct Job<'a> {
    scene_index: usize,
    scene_seed: u64,
    scene: &'a Scene,
    set: &'a IlluminationSet,
    gamma: Option<f64>,
    noise_seed: u64,
    keep_image: bool,
}

/// Compute every job of a config without touching the file system.
pub fn execute(cfg: &ExperimentConfig) -> Result<Execution, ExperimentError> {
    let scenes = cfg.scenes()?;
    let seeds = cfg.noise_seeds();
    let mut sets = Vec::with_capacity(scenes.len());
    for (_, scene) in &scenes {
        let s = illumination_sets(cfg, scene)?;
        let gammas = if cfg.kind() == DataKind::SingleFreq {
            let a = single_freq_model(scene, 0)?;
            let mut support = scene.scatterer_cells()?;
            support.sort_unstable();
            s.iter()
                .map(|set| {
                    let illums = set.illuminations.clone().unwrap_or_else(|| Illumination::all_points(scene.array.len()));
                    illumination_gamma(&a, &illums, &support).map(Some)
                })
                .collect::<crate::Result<Vec<_>>>()?
        } else {
            vec![None; s.len()]
        };
        sets.push((s, gammas));
    }

    let mut jobs = Vec::new();
    for (si, (scene_seed, scene)) in scenes.iter().enumerate() {
        let (s, gammas) = &sets[si];
        for (set, gamma) in s.iter().zip(gammas) {
            for (ni, &noise_seed) in seeds.iter().enumerate() {
                let keep_image = match cfg.output.images {
                    ImagePolicy::All => true,
                    ImagePolicy::First => si == 0 && ni == 0,
                    ImagePolicy::None => false,
                };
                jobs.push(Job {
                    scene_index: si,
                    scene_seed: *scene_seed,
                    scene,
                    set,
                    gamma: *gamma,
                    noise_seed,
                    keep_image,
                });
            }
        }
    }

    let results: Vec<crate::Result<(MetricRow, Option<Image>)>> = jobs.par_iter().map(|job| run_job(cfg, job)).collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut images = Vec::new();
    for r in results {
        let (row, img) = r?;
        rows.push(row);
        images.extend(img);
    }
    Ok(Execution { rows, images })
}

fn run_job(cfg: &ExperimentConfig, job: &Job) -> crate::Result<(MetricRow, Option<Image>)> {
    let kind = cfg.kind();
    let scene = job.scene;
    let mut req = ImagingRequest::new(scene, kind);
    req.acquisition = cfg.acquisition();
    req.illuminations = job.set.illuminations.as_deref();
    req.snr_db = cfg.noise.snr_db;
    req.seed = job.noise_seed;
    req.rank = Some(cfg.rank_policy(scene.scatterers.len()));
    req.conjugate = cfg.data.conjugate;
    let out = image(&req)?;
    let support = match cfg.music.support {
        SupportMethod::Top => &out.support,
        SupportMethod::Peaks => &out.peaks,
    };
    let m = metrics(scene, support, cfg.music.tolerance_cells)?;
    let row = MetricRow {
        scene: job.scene_index,
        scene_seed: job.scene_seed,
        illumination: job.set.label.clone(),
        gamma: job.gamma,
        noise_seed: cfg.noise.snr_db.map(|_| job.noise_seed),
        snr_db: cfg.noise.snr_db,
        kind,
        rank: out.decomposition.rank,
        exact_match: m.exact_match,
        mean_error: m.mean_error,
        max_error: m.max_error,
        max_recovered_error: m.recovered_errors.iter().copied().fold(0.0, f64::max),
        misses: m.misses,
        false_alarms: m.false_alarms,
        weyl_max_shift: out.weyl.map(|w| w.max_shift),
        weyl_bound: out.weyl.map(|w| w.perturbation_norm),
        clamped: out.clamped,
    };
    let img = job.keep_image.then(|| Image {
        stem: image_stem(job, cfg.noise.snr_db.is_some()),
        values: out.image.values.clone(),
        dims: scene.grid.dims(),
    });
    Ok((row, img))
}

fn image_stem(job: &Job, noisy: bool) -> String {
    let mut stem = format!("image_scene{}", job.scene_index);
    if job.set.label != "-" {
        stem.push('_');
        stem.push_str(&job.set.label);
    }
    if noisy {
        stem.push_str(&format!("_noise{}", job.noise_seed));
    }
    stem
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_metrics_csv<W: Write>(writer: W, rows: &[MetricRow]) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(METRICS_HEADER)?;
    for r in rows {
        w.write_record([
            r.scene.to_string(),
            r.scene_seed.to_string(),
            r.illumination.clone(),
            opt(r.gamma),
            r.noise_seed.map(|s| s.to_string()).unwrap_or_default(),
            opt(r.snr_db),
            r.kind.name().to_string(),
            r.rank.to_string(),
            r.exact_match.to_string(),
            r.mean_error.to_string(),
            r.max_error.to_string(),
            r.max_recovered_error.to_string(),
            r.misses.to_string(),
            r.false_alarms.to_string(),
            opt(r.weyl_max_shift),
            opt(r.weyl_bound),
            r.clamped.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SetSummary {
    pub label: String,
    /// Mean `gamma` over scenes, when defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub exact_fraction: f64,
    pub mean_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectationCheck {
    pub met: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_exact_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_mean_error: Option<f64>,
}

/// Everything needed to audit or repeat a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub name: String,
    pub tool: String,
    pub config_hash: String,
    pub snr_definition: String,
    pub scene_seeds: Vec<u64>,
    pub noise_seeds: Vec<u64>,
    pub weyl_holds: bool,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectationCheck>,
    pub illumination_sets: Vec<SetSummary>,
    pub files: Vec<FileEntry>,
    pub config: ExperimentConfig,
}

/// Slack for the singular-value perturbation check.
pub const WEYL_SLACK: f64 = 1e-12;

pub fn set_summaries(rows: &[MetricRow]) -> Vec<SetSummary> {
    let mut labels: Vec<&str> = Vec::new();
    for r in rows {
        if !labels.contains(&r.illumination.as_str()) {
            labels.push(&r.illumination);
        }
    }
    labels
        .into_iter()
        .map(|label| {
            let sel: Vec<&MetricRow> = rows.iter().filter(|r| r.illumination == label).collect();
            let s = Summary::of(sel.iter().copied());
            let gammas: Vec<f64> = sel.iter().filter(|r| r.noise_seed.unwrap_or(0) == sel[0].noise_seed.unwrap_or(0)).filter_map(|r| r.gamma).collect();
            SetSummary {
                label: label.to_string(),
                gamma: (!gammas.is_empty()).then(|| gammas.iter().sum::<f64>() / gammas.len() as f64),
                exact_fraction: s.exact_fraction,
                mean_error: s.mean_error,
            }
        })
        .collect()
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> ExperimentError + '_ {
    move |e| ExperimentError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn file_entry(dir: &Path, path: &Path) -> Result<FileEntry, ExperimentError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    Ok(FileEntry {
        path: path.strip_prefix(dir).unwrap_or(path).to_string_lossy().into_owned(),
        bytes: bytes.len() as u64,
        sha256: Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect(),
    })
}

/// Execute a config and write its outputs into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunManifest, ExperimentError> {
    let exec = execute(cfg)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut written: Vec<PathBuf> = Vec::new();

    let metrics_path = out.join("metrics.csv");
    write_metrics_csv(fs::File::create(&metrics_path).map_err(io_err(&metrics_path))?, &exec.rows)?;
    written.push(metrics_path);
    for img in &exec.images {
        written.extend(write_pseudospectrum(out, &img.stem, &img.values, img.dims, cfg.scale())?);
    }
    let config_path = out.join("config.toml");
    fs::write(&config_path, cfg.to_toml()).map_err(io_err(&config_path))?;
    written.push(config_path);

    let summary = Summary::of(&exec.rows);
    let expected = cfg.expected.as_ref().map(|e| ExpectationCheck {
        met: e.min_exact_fraction.is_none_or(|x| summary.exact_fraction >= x)
            && e.max_mean_error.is_none_or(|x| summary.mean_error <= x),
        min_exact_fraction: e.min_exact_fraction,
        max_mean_error: e.max_mean_error,
    });
    let mut scene_seeds: Vec<u64> = exec.rows.iter().map(|r| r.scene_seed).collect();
    scene_seeds.dedup();
    let manifest = RunManifest {
        name: cfg.name.clone(),
        tool: format!("music-imaging {}", env!("CARGO_PKG_VERSION")),
        config_hash: cfg.content_hash(),
        snr_definition: "per-entry noise variance ||B||_F^2 / (entries * 10^(snr_db/10)); phaseless intensity noise uses mean(I^2) in place of ||B||_F^2 / entries".into(),
        scene_seeds,
        noise_seeds: if cfg.noise.snr_db.is_some() { cfg.noise_seeds() } else { Vec::new() },
        weyl_holds: exec
            .rows
            .iter()
            .all(|r| r.weyl_max_shift.zip(r.weyl_bound).is_none_or(|(s, b)| s <= b + WEYL_SLACK)),
        summary,
        expected,
        illumination_sets: set_summaries(&exec.rows),
        files: written.iter().map(|p| file_entry(out, p)).collect::<Result<_, _>>()?,
        config: cfg.clone(),
    };
    let manifest_path = out.join("manifest.toml");
    let text = toml::to_string(&manifest).map_err(|e| ExperimentError::Io {
        path: manifest_path.clone(),
        message: e.to_string(),
    })?;
    fs::write(&manifest_path, text).map_err(io_err(&manifest_path))?;
    log::info!("{}: {} jobs, exact fraction {:.3}", out.display(), summary.jobs, summary.exact_fraction);
    Ok(manifest)
}

/// Parse a CLI value as a TOML value (number, boolean, array, quoted
/// string); anything else is taken as a bare string.
pub fn parse_value(text: &str) -> toml::Value {
    let text = text.trim();
    format!("v = {text}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(text.to_string()))
}

/// Set a dotted parameter such as `scene.a_over_l` in a config table.
pub fn set_param(table: &mut toml::Table, param: &str, value: toml::Value) -> Result<(), ConfigErrors> {
    let bad = |msg: &str| ConfigErrors(vec![super::config::ConfigError {
        field: param.to_string(),
        line: None,
        message: msg.to_string(),
    }]);
    let mut parts: Vec<&str> = param.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| bad("empty parameter name"))?;
    let mut t = table;
    for p in parts {
        t = t
            .entry(p)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| bad("path crosses a non-table value"))?;
    }
    t.insert(last.to_string(), value);
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: String,
    pub dir: PathBuf,
    pub summary: Summary,
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        // a whole section, e.g. `data`: name it by its values
        toml::Value::Table(t) => t.values().map(value_text).collect::<Vec<_>>().join("-"),
        other => other.to_string(),
    }
}

fn dir_name(index: usize, value: &str) -> String {
    let clean: String = value
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    format!("{index:02}_{clean}")
}

/// Validated configs for every value of a sweep, in order.
pub fn sweep_configs(base: &toml::Table, param: &str, values: &[toml::Value]) -> Result<Vec<ExperimentConfig>, ExperimentError> {
    values
        .iter()
        .map(|v| {
            let mut t = base.clone();
            set_param(&mut t, param, v.clone())?;
            t.remove("sweep");
            // expected ranges describe the base point only
            t.remove("expected");
            Ok(ExperimentConfig::from_table(t)?)
        })
        .collect()
}

/// Run every value of `param` and merge the summaries into `sweep.csv`.
pub fn sweep(base: &toml::Table, param: &str, values: &[toml::Value], out: &Path) -> Result<Vec<SweepPoint>, ExperimentError> {
    let configs = sweep_configs(base, param, values)?;
    let points: Vec<Result<SweepPoint, ExperimentError>> = configs
        .par_iter()
        .zip(values.par_iter())
        .enumerate()
        .map(|(i, (cfg, v))| {
            let text = value_text(v);
            let dir = out.join(dir_name(i, &text));
            let manifest = run(cfg, &dir)?;
            Ok(SweepPoint {
                value: text,
                dir,
                summary: manifest.summary,
            })
        })
        .collect();
    let points = points.into_iter().collect::<Result<Vec<_>, _>>()?;
    let path = out.join("sweep.csv");
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |e: csv::Error| ExperimentError::Io {
        path: path.clone(),
        message: e.to_string(),
    };
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for p in &points {
        let s = &p.summary;
        w.write_record([
            param.to_string(),
            p.value.clone(),
            s.jobs.to_string(),
            s.exact_fraction.to_string(),
            s.mean_error.to_string(),
            s.max_error.to_string(),
            s.max_recovered_error.to_string(),
            s.misses.to_string(),
            s.false_alarms.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err(&path))?;
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"
name = "small"
[scene]
transducers = 15
aperture = 30.0
standoff = 40.0
[window]
cross_range_extent = 12.0
range_extent = 12.0
cross_range_count = 9
range_count = 7
[scatterers]
count = 2
seed = 3
scenes = 2
min_separation_cells = 3
[data]
kind = "single_freq"
[[illumination]]
policy = "optimal"
[[illumination]]
policy = "random"
count = 6
sets = 2
[noise]
snr_db = 30.0
seeds = 2
"#;

    #[test]
    fn job_expansion_and_order() {
        let cfg = ExperimentConfig::from_toml_str(CFG).unwrap();
        let exec = execute(&cfg).unwrap();
        // 2 scenes x 3 illumination sets x 2 noise seeds
        assert_eq!(exec.rows.len(), 12);
        let labels: Vec<&str> = exec.rows[..6].iter().map(|r| r.illumination.as_str()).collect();
        assert_eq!(labels, ["optimal2", "optimal2", "random6-s0", "random6-s0", "random6-s1", "random6-s1"]);
        assert!(exec.rows.iter().all(|r| r.gamma.is_some_and(|g| g > 0.0)));
        assert!(exec.rows.iter().all(|r| r.weyl_max_shift.unwrap() <= r.weyl_bound.unwrap() + WEYL_SLACK));
        assert_eq!(exec.images.len(), 3);
    }

    #[test]
    fn outputs_are_deterministic_and_inventoried() {
        let cfg = ExperimentConfig::from_toml_str(CFG).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ma = run(&cfg, a.path()).unwrap();
        run(&cfg, b.path()).unwrap();
        for f in &ma.files {
            if f.path.ends_with(".csv") || f.path.ends_with(".toml") {
                assert_eq!(fs::read(a.path().join(&f.path)).unwrap(), fs::read(b.path().join(&f.path)).unwrap(), "{}", f.path);
            }
        }
        let listed: Vec<&str> = ma.files.iter().map(|f| f.path.as_str()).collect();
        for entry in fs::read_dir(a.path()).unwrap() {
            let name = entry.unwrap().file_name().into_string().unwrap();
            assert!(name == "manifest.toml" || listed.contains(&name.as_str()), "{name} not in manifest");
        }
        let header = fs::read_to_string(a.path().join("metrics.csv")).unwrap();
        assert!(header.starts_with(&METRICS_HEADER.join(",")));
    }

    #[test]
    fn rerun_from_written_config() {
        let cfg = ExperimentConfig::from_toml_str(CFG).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let m = run(&cfg, dir.path()).unwrap();
        let echoed = ExperimentConfig::from_toml_str(&fs::read_to_string(dir.path().join("config.toml")).unwrap()).unwrap();
        assert_eq!(echoed, cfg);
        assert_eq!(echoed.content_hash(), m.config_hash);
    }

    #[test]
    fn sweep_overrides_and_merges() {
        let base: toml::Table = CFG.parse().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let values = ["20", "40"].map(parse_value);
        let points = sweep(&base, "noise.snr_db", &values, dir.path()).unwrap();
        assert_eq!(points.len(), 2);
        let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER.join(","));
        assert!(lines[1].starts_with("noise.snr_db,20,12,"));
        assert!(dir.path().join("01_40").join("manifest.toml").exists());
    }

    #[test]
    fn sweep_rejects_invalid_values() {
        let base: toml::Table = CFG.parse().unwrap();
        let err = sweep_configs(&base, "scene.transducers", &[parse_value("0")]).unwrap_err();
        assert_eq!(err.exit_code(), super::super::EXIT_CONFIG);
        assert!(matches!(parse_value("mc_stack"), toml::Value::String(_)));
        assert_eq!(parse_value("0.25"), toml::Value::Float(0.25));
    }
}
