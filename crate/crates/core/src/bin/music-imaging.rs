//! Command-line front end: `run` and `sweep` experiment configs or presets.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use music_imaging::experiment::run::{parse_value, run, sweep};
use music_imaging::experiment::{presets, ConfigErrors, ExperimentConfig, ExperimentError};

#[derive(Parser)]
#[command(name = "music-imaging", version, about = "MUSIC array imaging experiments")]
struct Cli {
    /// Output directory (default: out/<config name>)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Use a bundled config instead of a file: fig2, fig3, fig4, fig5
    #[arg(long, global = true)]
    preset: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment
    Run { config: Option<PathBuf> },
    /// Run an experiment once per parameter value
    Sweep {
        config: Option<PathBuf>,
        /// Dotted parameter, e.g. scene.a_over_l (default: the config's [sweep])
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated TOML values, e.g. 0.01,0.05,0.25,1
        #[arg(long)]
        values: Option<String>,
    },
    /// List the bundled presets
    Presets,
}

/// Config text and a name for diagnostics.
fn source(config: Option<&Path>, preset: Option<&str>) -> Result<(String, String), ExperimentError> {
    match (config, preset) {
        (Some(_), Some(_)) => Err(ExperimentError::Usage("give a config file or --preset, not both".into())),
        (None, None) => Err(ExperimentError::Usage("a config file or --preset is required".into())),
        (None, Some(name)) => presets::text(name)
            .map(|t| (t.to_string(), format!("preset {name}")))
            .ok_or_else(|| ExperimentError::Usage(format!("unknown preset `{name}`; available: {}", presets::names().join(", ")))),
        (Some(path), None) => fs::read_to_string(path)
            .map(|t| (t, path.display().to_string()))
            .map_err(|e| ExperimentError::Io {
                path: path.to_path_buf(),
                message: e.to_string(),
            }),
    }
}

/// Split a value list on top-level commas, keeping `[..]`, `{..}` and quotes intact.
fn split_values(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut quote: Option<char> = None;
    let mut cur = String::new();
    for ch in list.chars() {
        match (quote, ch) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, '"' | '\'') => quote = Some(ch),
            (None, '[' | '{') => depth += 1,
            (None, ']' | '}') => depth -= 1,
            (None, ',') if depth == 0 => {
                out.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

fn out_dir(cli_out: Option<&PathBuf>, name: &str) -> PathBuf {
    cli_out.cloned().unwrap_or_else(|| {
        let name = if name.is_empty() { "run" } else { name };
        Path::new("out").join(name)
    })
}

fn name_errors(e: ExperimentError, origin: &str) -> ExperimentError {
    match e {
        ExperimentError::Config(ConfigErrors(errs)) => {
            eprintln!("{origin}:");
            ExperimentError::Config(ConfigErrors(errs))
        }
        other => other,
    }
}

fn main_inner(cli: Cli) -> Result<(), ExperimentError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ExperimentError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ExperimentError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Presets => {
            for name in presets::names() {
                let first = presets::text(name).and_then(|t| t.lines().next()).unwrap_or("");
                println!("{name:6} {}", first.trim_start_matches('#').trim());
            }
            Ok(())
        }
        Command::Run { config } => {
            let (text, origin) = source(config.as_deref(), cli.preset.as_deref())?;
            let cfg = ExperimentConfig::from_toml_str(&text).map_err(|e| name_errors(e.into(), &origin))?;
            let out = out_dir(cli.out.as_ref(), &cfg.name);
            let m = run(&cfg, &out)?;
            let s = m.summary;
            println!(
                "{}: {} jobs, exact {:.3}, mean error {:.4} cells, max {:.4} -> {}",
                origin,
                s.jobs,
                s.exact_fraction,
                s.mean_error,
                s.max_error,
                out.display()
            );
            for set in m.illumination_sets.iter().filter(|s| s.label != "-") {
                let gamma = set.gamma.map(|g| format!("{g:.4e}")).unwrap_or_else(|| "-".into());
                println!("  {:16} gamma {gamma:>11}  exact {:.3}", set.label, set.exact_fraction);
            }
            if let Some(e) = &m.expected {
                println!("  expected ranges {}", if e.met { "met" } else { "NOT met" });
            }
            Ok(())
        }
        Command::Sweep { config, param, values } => {
            let (text, origin) = source(config.as_deref(), cli.preset.as_deref())?;
            // validate the base config first for line-numbered diagnostics
            let cfg = ExperimentConfig::from_toml_str(&text).map_err(|e| name_errors(e.into(), &origin))?;
            let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ExperimentError::Usage(e.to_string()))?;
            let (param, values) = match (param, values, &cfg.sweep) {
                (Some(p), Some(v), _) => (p, split_values(&v).iter().map(|s| parse_value(s)).collect::<Vec<_>>()),
                (None, None, Some(sw)) => (sw.param.clone(), sw.values.clone()),
                (Some(p), None, Some(sw)) if p == sw.param => (p, sw.values.clone()),
                _ => return Err(ExperimentError::Usage("sweep needs --param and --values (or a [sweep] section)".into())),
            };
            if values.is_empty() {
                return Err(ExperimentError::Usage("--values is empty".into()));
            }
            let out = out_dir(cli.out.as_ref(), &cfg.name);
            let points = sweep(&table, &param, &values, &out)?;
            println!("{origin}: sweep of {param} -> {}", out.join("sweep.csv").display());
            for p in points {
                let s = p.summary;
                println!(
                    "  {:>24}  jobs {:3}  exact {:.3}  mean error {:.4}  max {:.4}",
                    p.value, s.jobs, s.exact_fraction, s.mean_error, s.max_error
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
