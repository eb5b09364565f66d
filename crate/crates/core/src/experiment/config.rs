//! Experiment configuration.
//!
//! A config is TOML with named sections. Parsing rejects unknown keys and
//! type errors with their line; `validate` then checks every constraint and
//! reports all violations at once, each with its dotted field path and,
//! when the config came from text, the line it sits on.
//!
//! ```toml
//! name = "demo"
//!
//! [scene]
//! transducers = 21
//! aperture = 500.0        # lengths in central wavelengths
//! standoff = 10000.0      # or: a_over_l = 0.05
//!
//! [window]
//! cross_range_extent = 100.0   # or: cross_range_resolutions = 5 (units of L/a)
//! range_extent = 100.0         # or: range_resolutions = 5 (units of c0/B)
//! cross_range_count = 51
//! range_count = 51
//!
//! [scatterers]
//! count = 4                    # random scenes; or an explicit list:
//! seed = 0                     # points = [{ cell = [10, 20] }, ...]
//!
//! [frequencies]
//! count = 12
//! relative_bandwidth = 0.05
//!
//! [data]
//! kind = "mc_stack"
//! acquisition = "phaseless"
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::experiment::pipeline::{Acquisition, NoiseMode};
use crate::export::Scale;
use crate::music::RankPolicy;
use crate::scene::{ArrayGeometry, FrequencySet, ImagingGrid, RandomSceneSpec, Scatterer, Scene};
use crate::structures::DataKind;
use crate::linalg::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub scene: SceneSection,
    pub window: WindowSection,
    pub scatterers: ScattererSection,
    #[serde(default)]
    pub frequencies: FrequencySection,
    pub data: DataSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub illumination: Vec<IlluminationSection>,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub music: MusicSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Default parameter and values for `sweep` when none are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    /// Metric ranges the run is expected to meet; checked in the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<ExpectedSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSection {
    pub transducers: usize,
    #[serde(default)]
    pub aperture: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standoff: Option<f64>,
    /// Sets the standoff to `aperture / a_over_l`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_over_l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSection {
    #[serde(default)]
    pub center_cross_range: f64,
    /// Window centre in range relative to the standoff.
    #[serde(default)]
    pub range_offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_range_extent: Option<f64>,
    /// Extent in units of the cross-range resolution `L / a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_range_resolutions: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_extent: Option<f64>,
    /// Extent in units of the range resolution `c0 / B`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_resolutions: Option<f64>,
    pub cross_range_count: usize,
    pub range_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySection {
    #[serde(default = "one")]
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_bandwidth: Option<f64>,
}

impl Default for FrequencySection {
    fn default() -> Self {
        Self {
            count: 1,
            relative_bandwidth: None,
        }
    }
}

/// Either an explicit list of points or a random-scene draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Seed of the first random scene; scene `s` uses `seed + s`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub scenes: usize,
    #[serde(default)]
    pub min_separation_cells: usize,
    /// Fraction of a mesh size added to both coordinates.
    #[serde(default)]
    pub off_grid_shift: f64,
    #[serde(default = "one")]
    pub margin_cells: usize,
    #[serde(default = "unit_interval")]
    pub magnitude: [f64; 2],
}

/// A scatterer at grid cell `[cross_range_index, range_index]`, optionally
/// displaced by `shift` mesh sizes. Cells keep a scene fixed in pixel terms
/// when the window is resized by a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub cell: [usize; 2],
    #[serde(default)]
    pub shift: [f64; 2],
    #[serde(default = "one_f64")]
    pub magnitude: f64,
    /// Phase in radians.
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AcquisitionName {
    #[default]
    FullPhase,
    Phaseless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModeName {
    #[default]
    Intensity,
    Field,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub kind: String,
    #[serde(default)]
    pub acquisition: AcquisitionName,
    /// Where noise enters phaseless data.
    #[serde(default)]
    pub noise_mode: NoiseModeName,
    /// Project conjugated imaging vectors; defaults by data kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugate: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IlluminationPolicy {
    Point,
    Optimal,
    Random,
}

/// One illumination policy for single-frequency data. `random` expands into
/// `sets` sets seeded `seed, seed + 1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IlluminationSection {
    pub policy: IlluminationPolicy,
    /// Illuminations per set; `optimal` defaults to the scatterer count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub sets: usize,
}

/// `seeds = 50` means seeds `0..50`; a list is used as given.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Count(u64),
    List(Vec<u64>),
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds::List(vec![0])
    }
}

impl Seeds {
    pub fn values(&self) -> Vec<u64> {
        match self {
            Seeds::Count(n) => (0..*n).collect(),
            Seeds::List(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    /// Absent means noise-free data (and a single run per scene).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub seeds: Seeds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankName {
    #[default]
    Known,
    Threshold,
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportMethod {
    /// The `M` largest pseudospectrum values.
    #[default]
    Top,
    /// The `M` largest local maxima.
    Peaks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MusicSection {
    #[serde(default)]
    pub rank: RankName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Overrides the scatterer count for `rank = "known"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_rank: Option<usize>,
    #[serde(default)]
    pub support: SupportMethod,
    /// Distance (cells) beyond which a scatterer counts as missed.
    #[serde(default = "one_f64")]
    pub tolerance_cells: f64,
}

impl Default for MusicSection {
    fn default() -> Self {
        Self {
            rank: RankName::Known,
            threshold: None,
            known_rank: None,
            support: SupportMethod::Top,
            tolerance_cells: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleName {
    Linear,
    #[default]
    Log10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImagePolicy {
    /// One image per illumination set: first scene, first noise seed.
    #[default]
    First,
    All,
    None,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub scale: ScaleName,
    #[serde(default)]
    pub images: ImagePolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: String,
    pub values: Vec<toml::Value>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_exact_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_mean_error: Option<f64>,
}

fn one() -> usize {
    1
}

fn one_f64() -> f64 {
    1.0
}

fn unit_interval() -> [f64; 2] {
    [1.0, 1.0]
}

/// One violated constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

/// Every violation found in a config.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

impl ConfigErrors {
    fn single(field: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        ConfigErrors(vec![ConfigError {
            field: field.into(),
            line,
            message: message.into(),
        }])
    }
}

struct Checker {
    errors: Vec<ConfigError>,
}

impl Checker {
    fn fail(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ConfigError {
            field: field.into(),
            line: None,
            message: message.into(),
        });
    }

    fn check(&mut self, ok: bool, field: &str, message: &str) {
        if !ok {
            self.fail(field, message);
        }
    }

    fn positive(&mut self, value: f64, field: &str) {
        self.check(value.is_finite() && value > 0.0, field, "must be a positive number");
    }
}

fn one_of(c: &mut Checker, a: (bool, &str), b: (bool, &str)) {
    match (a.0, b.0) {
        (true, true) => c.fail(a.1, format!("give either {} or {}, not both", a.1, b.1)),
        (false, false) => c.fail(a.1, format!("one of {} or {} is required", a.1, b.1)),
        _ => {}
    }
}

impl ExperimentConfig {
    /// Parse and validate config text.
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigErrors> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start));
            ConfigErrors::single("config", line, e.message().to_string())
        })?;
        cfg.validate().map_err(|ConfigErrors(mut errors)| {
            for e in &mut errors {
                e.line = locate(text, &e.field);
            }
            ConfigErrors(errors)
        })?;
        Ok(cfg)
    }

    /// Build from an already parsed table (used by sweeps) and validate.
    pub fn from_table(table: toml::Table) -> Result<Self, ConfigErrors> {
        let cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigErrors::single("config", None, e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kind(&self) -> DataKind {
        DataKind::from_name(&self.data.kind).expect("validated")
    }

    pub fn standoff(&self) -> f64 {
        match (self.scene.standoff, self.scene.a_over_l) {
            (Some(l), _) => l,
            (None, Some(r)) => self.scene.aperture / r,
            (None, None) => unreachable!("validated"),
        }
    }

    /// Range resolution `c0 / B` in central wavelengths, when there is a band.
    pub fn range_resolution(&self) -> Option<f64> {
        self.frequencies.relative_bandwidth.filter(|_| self.frequencies.count > 1).map(|b| 1.0 / b)
    }

    pub fn array(&self) -> crate::Result<ArrayGeometry> {
        ArrayGeometry::linear(self.scene.transducers, self.scene.aperture)
    }

    pub fn window_extents(&self) -> (f64, f64) {
        let w = &self.window;
        let cr = w
            .cross_range_extent
            .or_else(|| w.cross_range_resolutions.map(|n| n * self.standoff() / self.scene.aperture))
            .unwrap_or(0.0);
        let range = w
            .range_extent
            .or_else(|| w.range_resolutions.zip(self.range_resolution()).map(|(n, r)| n * r))
            .unwrap_or(0.0);
        (cr, range)
    }

    pub fn grid(&self) -> crate::Result<ImagingGrid> {
        let (cr, range) = self.window_extents();
        ImagingGrid::centered(
            self.window.center_cross_range,
            self.standoff() + self.window.range_offset,
            cr,
            range,
            self.window.cross_range_count,
            self.window.range_count,
        )
    }

    pub fn frequency_set(&self) -> crate::Result<FrequencySet> {
        let f = &self.frequencies;
        FrequencySet::equispaced_band(f.count, f.relative_bandwidth.unwrap_or(0.0))
    }

    pub fn acquisition(&self) -> Acquisition {
        match self.data.acquisition {
            AcquisitionName::FullPhase => Acquisition::FullPhase,
            AcquisitionName::Phaseless => Acquisition::Phaseless(match self.data.noise_mode {
                NoiseModeName::Intensity => NoiseMode::Intensity,
                NoiseModeName::Field => NoiseMode::Field,
            }),
        }
    }

    /// Rank policy for a scene with `scatterers` scatterers.
    pub fn rank_policy(&self, scatterers: usize) -> RankPolicy {
        match self.music.rank {
            RankName::Known => {
                let m = self.music.known_rank.unwrap_or(scatterers);
                RankPolicy::Known(if self.kind() == DataKind::PdBlock { m * self.frequencies.count } else { m })
            }
            RankName::Threshold => RankPolicy::Threshold(self.music.threshold.expect("validated")),
            RankName::Gap => RankPolicy::Gap,
        }
    }

    pub fn scale(&self) -> Scale {
        match self.output.scale {
            ScaleName::Linear => Scale::Linear,
            ScaleName::Log10 => Scale::Log10,
        }
    }

    pub fn noise_seeds(&self) -> Vec<u64> {
        if self.noise.snr_db.is_some() {
            self.noise.seeds.values()
        } else {
            vec![0]
        }
    }

    /// The scenes of this experiment with their seeds (explicit scenes use 0).
    pub fn scenes(&self) -> crate::Result<Vec<(u64, Scene)>> {
        let array = self.array()?;
        let grid = self.grid()?;
        let freqs = self.frequency_set()?;
        let s = &self.scatterers;
        if let Some(points) = &s.points {
            let (dx, dz) = grid.spacing();
            let scatterers = points
                .iter()
                .map(|p| {
                    let mut y = grid.point(grid.index(p.cell[0], p.cell[1]));
                    y[0] += p.shift[0] * dx;
                    y[2] += p.shift[1] * dz;
                    Scatterer::new(y, C64::from_polar(p.magnitude, p.phase))
                })
                .collect::<crate::Result<Vec<_>>>()?;
            return Ok(vec![(0, Scene::new(array, scatterers, grid, freqs))]);
        }
        let spec = RandomSceneSpec {
            count: s.count.expect("validated"),
            min_separation: 0.0,
            min_separation_cells: s.min_separation_cells,
            off_grid_shift: s.off_grid_shift,
            margin_cells: s.margin_cells,
            magnitude_range: (s.magnitude[0], s.magnitude[1]),
        };
        (0..s.scenes as u64)
            .map(|i| {
                let seed = s.seed + i;
                let scatterers = crate::scene::random_scatterers(&grid, &spec, seed)?;
                Ok((seed, Scene::new(array.clone(), scatterers, grid.clone(), freqs.clone())))
            })
            .collect()
    }

    /// SHA-256 of the canonical serialization: formatting and comments do
    /// not change it, any parameter does.
    pub fn content_hash(&self) -> String {
        let text = self.to_toml();
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Check every constraint; all violations are reported together.
    pub fn validate(&self) -> Result<(), ConfigErrors> {
        let mut c = Checker { errors: Vec::new() };
        let kind = DataKind::from_name(&self.data.kind);
        if kind.is_none() {
            let names: Vec<&str> = DataKind::ALL.iter().map(|k| k.name()).collect();
            c.fail("data.kind", format!("unknown data kind `{}`; expected one of {}", self.data.kind, names.join(", ")));
        }

        // scene
        let sc = &self.scene;
        c.check(sc.transducers >= 1, "scene.transducers", "at least one transducer is required");
        c.check(sc.aperture.is_finite() && sc.aperture >= 0.0, "scene.aperture", "must be a non-negative number");
        c.check(sc.transducers <= 1 || sc.aperture > 0.0, "scene.aperture", "must be positive with more than one transducer");
        one_of(&mut c, (sc.standoff.is_some(), "scene.standoff"), (sc.a_over_l.is_some(), "scene.a_over_l"));
        if let Some(l) = sc.standoff {
            c.positive(l, "scene.standoff");
        }
        if let Some(r) = sc.a_over_l {
            c.positive(r, "scene.a_over_l");
            c.check(sc.aperture > 0.0, "scene.a_over_l", "needs a positive aperture");
        }

        // frequencies
        let f = &self.frequencies;
        c.check(f.count >= 1, "frequencies.count", "at least one frequency is required");
        match f.relative_bandwidth {
            Some(b) => {
                c.check(f.count > 1, "frequencies.relative_bandwidth", "only meaningful with more than one frequency");
                c.check(b.is_finite() && b > 0.0 && b < 2.0, "frequencies.relative_bandwidth", "must lie in (0, 2)");
            }
            None => c.check(f.count <= 1, "frequencies.relative_bandwidth", "required with more than one frequency"),
        }

        // window
        let w = &self.window;
        c.check(w.cross_range_count >= 1, "window.cross_range_count", "must be at least 1");
        c.check(w.range_count >= 1, "window.range_count", "must be at least 1");
        for (extent, res, count, names, unit_ok) in [
            (
                w.cross_range_extent,
                w.cross_range_resolutions,
                w.cross_range_count,
                ("window.cross_range_extent", "window.cross_range_resolutions"),
                sc.aperture > 0.0,
            ),
            (
                w.range_extent,
                w.range_resolutions,
                w.range_count,
                ("window.range_extent", "window.range_resolutions"),
                self.range_resolution().is_some(),
            ),
        ] {
            if count > 1 || extent.is_some() || res.is_some() {
                one_of(&mut c, (extent.is_some(), names.0), (res.is_some(), names.1));
            }
            if let Some(e) = extent {
                c.check(e.is_finite() && (e > 0.0 || count == 1 && e == 0.0), names.0, "must be positive");
            }
            if let Some(r) = res {
                c.positive(r, names.1);
                c.check(unit_ok, names.1, "the resolution unit is undefined for this scene");
            }
        }
        for (v, name) in [(w.center_cross_range, "window.center_cross_range"), (w.range_offset, "window.range_offset")] {
            c.check(v.is_finite(), name, "must be finite");
        }
        if c.errors.is_empty() {
            let (_, range) = self.window_extents();
            let near = self.standoff() + w.range_offset - range / 2.0;
            c.check(near > 0.0, "window.range_offset", "the window must lie entirely in front of the array");
        }

        // scatterers
        let s = &self.scatterers;
        one_of(&mut c, (s.points.is_some(), "scatterers.points"), (s.count.is_some(), "scatterers.count"));
        if let Some(points) = &s.points {
            c.check(!points.is_empty(), "scatterers.points", "the scatterer list is empty");
            for (i, p) in points.iter().enumerate() {
                let field = format!("scatterers.points[{i}]");
                if p.cell[0] >= w.cross_range_count.max(1) || p.cell[1] >= w.range_count.max(1) {
                    c.fail(format!("{field}.cell"), format!("cell {:?} is outside the {}x{} grid", p.cell, w.cross_range_count, w.range_count));
                }
                if points[..i].iter().any(|q| q.cell == p.cell) {
                    c.fail(format!("{field}.cell"), format!("cell {:?} is used twice", p.cell));
                }
                if p.shift.iter().any(|x| !(x.is_finite() && *x > -0.5 && *x <= 0.5)) {
                    c.fail(format!("{field}.shift"), "shifts must lie in (-0.5, 0.5] mesh sizes");
                }
                c.check(p.magnitude.is_finite() && p.magnitude > 0.0, &format!("{field}.magnitude"), "must be positive");
                c.check(p.phase.is_finite(), &format!("{field}.phase"), "must be finite");
            }
        }
        if let Some(n) = s.count {
            c.check(n >= 1, "scatterers.count", "at least one scatterer is required");
            c.check(s.scenes >= 1, "scatterers.scenes", "at least one scene is required");
            let [lo, hi] = s.magnitude;
            c.check(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi, "scatterers.magnitude", "needs 0 < low <= high");
            c.check(
                s.off_grid_shift.is_finite() && (0.0..0.5).contains(&s.off_grid_shift) || s.off_grid_shift == 0.5,
                "scatterers.off_grid_shift",
                "must lie in [0, 0.5]",
            );
            let free = |count: usize| if count > 1 { count.saturating_sub(2 * s.margin_cells) } else { 1 };
            c.check(
                free(w.cross_range_count) * free(w.range_count) >= n,
                "scatterers.margin_cells",
                "leaves too few grid points for the scatterers",
            );
        }

        // data
        if let Some(kind) = kind {
            let a = &self.data.acquisition;
            c.check(
                *a == AcquisitionName::FullPhase || kind.is_interferometric(),
                "data.acquisition",
                &format!("{kind} data cannot be acquired from intensities"),
            );
            match kind {
                DataKind::SingleFreq | DataKind::MSingle => {
                    c.check(f.count == 1, "frequencies.count", &format!("{kind} uses exactly one frequency"));
                }
                DataKind::PcStack | DataKind::PdBlock | DataKind::McStack => {
                    c.check(f.count >= 2, "frequencies.count", &format!("{kind} needs at least two frequencies"));
                }
                DataKind::PronyToeplitz => {
                    c.check(f.count % 2 == 1, "frequencies.count", "Prony data need an odd number of frequencies");
                    c.check(sc.transducers == 1, "scene.transducers", "Prony data use a single transducer");
                    c.check(w.cross_range_count == 1, "window.cross_range_count", "Prony data use a range-only grid");
                    c.check(w.center_cross_range == 0.0, "window.center_cross_range", "the range-only grid lies on the array axis");
                    if let (Some(b), true) = (f.relative_bandwidth, f.count > 1) {
                        // Delays are identifiable when 2 * dkappa * extent < 2 pi.
                        let dk = 2.0 * std::f64::consts::PI * b / (f.count - 1) as f64;
                        let (_, range) = self.window_extents();
                        c.check(
                            2.0 * dk * range < 2.0 * std::f64::consts::PI,
                            "window.range_extent",
                            "aliased: the window is longer than the unambiguous delay range",
                        );
                    }
                }
            }
            c.check(
                self.illumination.is_empty() || kind == DataKind::SingleFreq,
                "illumination",
                "illumination sets apply to single_freq data only",
            );
        }
        for (i, ill) in self.illumination.iter().enumerate() {
            let field = format!("illumination[{i}]");
            c.check(ill.sets >= 1, &format!("{field}.sets"), "must be at least 1");
            match ill.policy {
                IlluminationPolicy::Point => {
                    c.check(ill.count.is_none(), &format!("{field}.count"), "point illuminations use every transducer");
                    c.check(ill.sets == 1, &format!("{field}.sets"), "point illuminations form a single set");
                }
                IlluminationPolicy::Optimal => {
                    if let Some(n) = ill.count {
                        c.check(n >= 1 && n <= sc.transducers, &format!("{field}.count"), "must lie in 1..=transducers");
                    }
                    c.check(ill.sets == 1, &format!("{field}.sets"), "optimal illuminations form a single set");
                }
                IlluminationPolicy::Random => {
                    c.check(ill.count.is_some_and(|n| n >= 1), &format!("{field}.count"), "random illuminations need a positive count");
                }
            }
        }

        // noise
        if let Some(snr) = self.noise.snr_db {
            c.check(snr.is_finite(), "noise.snr_db", "must be finite");
            c.check(!self.noise.seeds.values().is_empty(), "noise.seeds", "at least one seed is required");
        }

        // music
        let m = &self.music;
        match m.rank {
            RankName::Threshold => c.check(
                m.threshold.is_some_and(|t| t > 0.0 && t < 1.0),
                "music.threshold",
                "rank = \"threshold\" needs a threshold in (0, 1)",
            ),
            _ => c.check(m.threshold.is_none(), "music.threshold", "only used with rank = \"threshold\""),
        }
        if let Some(k) = m.known_rank {
            c.check(m.rank == RankName::Known, "music.known_rank", "only used with rank = \"known\"");
            c.check(k >= 1, "music.known_rank", "must be at least 1");
        }
        c.positive(m.tolerance_cells, "music.tolerance_cells");

        if let Some(sw) = &self.sweep {
            c.check(!sw.param.is_empty(), "sweep.param", "must name a parameter");
            c.check(!sw.values.is_empty(), "sweep.values", "at least one value is required");
        }
        if let Some(e) = &self.expected {
            if let Some(x) = e.min_exact_fraction {
                c.check((0.0..=1.0).contains(&x), "expected.min_exact_fraction", "must lie in [0, 1]");
            }
            if let Some(x) = e.max_mean_error {
                c.check(x.is_finite() && x >= 0.0, "expected.max_mean_error", "must be non-negative");
            }
        }

        if c.errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(c.errors))
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Best-effort line of a dotted field such as `scene.a_over_l` or
/// `illumination[1].count`: the key inside its section, else the section
/// header.
fn locate(text: &str, field: &str) -> Option<usize> {
    let mut parts: Vec<&str> = field.split('.').collect();
    let key = if parts.len() > 1 { parts.pop() } else { None };
    let (section, index) = match parts.first().copied().unwrap_or("").split_once('[') {
        Some((name, rest)) => (name, rest.trim_end_matches(']').parse::<usize>().ok()),
        None => (parts.first().copied().unwrap_or(""), None),
    };
    let key = key.map(|k| k.split('[').next().unwrap_or(k));
    let mut current = String::new();
    let mut seen = 0usize;
    let mut header = None;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix("[[").and_then(|l| l.split("]]").next()) {
            current = name.trim().to_string();
            if current == section {
                seen += 1;
                if index.is_none_or(|i| i + 1 == seen) {
                    header = header.or(Some(n + 1));
                }
            }
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
            current = name.trim().to_string();
            if current == section {
                header = header.or(Some(n + 1));
            }
            continue;
        }
        let in_section = current == section && index.is_none_or(|i| i + 1 == seen);
        if let (true, Some(key)) = (in_section, key) {
            let lhs = line.split('=').next().unwrap_or("").trim();
            if line.contains('=') && lhs == key {
                return Some(n + 1);
            }
        }
    }
    header
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
name = "t"
[scene]
transducers = 11
aperture = 50.0
standoff = 100.0

[window]
cross_range_extent = 20.0
range_extent = 10.0
cross_range_count = 11
range_count = 6

[scatterers]
points = [{ cell = [2, 3] }, { cell = [8, 1], magnitude = 2.0 }]

[data]
kind = "single_freq"
"#;

    #[test]
    fn parses_and_builds_a_scene() {
        let cfg = ExperimentConfig::from_toml_str(BASE).unwrap();
        let scenes = cfg.scenes().unwrap();
        assert_eq!(scenes.len(), 1);
        let s = &scenes[0].1;
        assert_eq!(s.scatterer_cells().unwrap(), vec![s.grid.index(2, 3), s.grid.index(8, 1)]);
        assert_eq!(cfg.noise_seeds(), vec![0]);
        assert_eq!(cfg.rank_policy(2), RankPolicy::Known(2));
    }

    #[test]
    fn empty_scatterer_list_is_rejected_with_its_line() {
        let text = BASE.replace("points = [{ cell = [2, 3] }, { cell = [8, 1], magnitude = 2.0 }]", "points = []");
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
        assert_eq!(err.0.len(), 1);
        assert_eq!(err.0[0].field, "scatterers.points");
        assert_eq!(err.0[0].line, Some(15));
    }

    #[test]
    fn reports_every_violation() {
        let text = BASE
            .replace("standoff = 100.0", "standoff = 100.0\na_over_l = 0.5")
            .replace("kind = \"single_freq\"", "kind = \"mc_stack\"\nacquisition = \"phaseless\"")
            .replace("range_count = 6", "range_count = 6\n[music]\nrank = \"threshold\"");
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
        let fields: Vec<&str> = err.0.iter().map(|e| e.field.as_str()).collect();
        assert!(fields.contains(&"scene.standoff"), "{err}");
        assert!(fields.contains(&"frequencies.count"), "{err}");
        assert!(fields.contains(&"music.threshold"), "{err}");
        let line = |f: &str| err.0.iter().find(|e| e.field == f).and_then(|e| e.line);
        assert_eq!(line("scene.standoff"), Some(6));
        assert_eq!(line("music.threshold"), Some(14)); // the section header: no such key
    }

    #[test]
    fn parse_errors_carry_a_line() {
        let text = BASE.replace("transducers = 11", "transducers = 11\nwavelength = 3");
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
        assert_eq!(err.0[0].line, Some(5), "{err}");
        assert!(err.0[0].message.contains("wavelength"));
    }

    #[test]
    fn resolution_units_follow_the_geometry() {
        let text = r#"
[scene]
transducers = 21
aperture = 500.0
a_over_l = 0.05
[window]
cross_range_resolutions = 5.0
range_resolutions = 5.0
cross_range_count = 51
range_count = 51
[scatterers]
count = 3
[frequencies]
count = 12
relative_bandwidth = 0.05
[data]
kind = "pd_block"
"#;
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert!((cfg.standoff() - 10000.0).abs() < 1e-9);
        let (cr, range) = cfg.window_extents();
        assert!((cr - 100.0).abs() < 1e-9 && (range - 100.0).abs() < 1e-9);
        assert_eq!(cfg.rank_policy(3), RankPolicy::Known(36));
    }

    #[test]
    fn hash_ignores_formatting_only() {
        let a = ExperimentConfig::from_toml_str(BASE).unwrap();
        let b = ExperimentConfig::from_toml_str(&format!("# comment\n{BASE}")).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        let c = ExperimentConfig::from_toml_str(&BASE.replace("standoff = 100.0", "standoff = 101.0")).unwrap();
        assert_ne!(a.content_hash(), c.content_hash());
    }
}
