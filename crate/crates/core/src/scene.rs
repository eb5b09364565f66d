//! Physical configuration: transducer array, point scatterers, imaging
//! window grid and probing frequencies.
//!
//! Coordinates are `[cross_range_1, cross_range_2, range]` in units of the
//! central wavelength. The array lies in the plane `range = 0`; the imaging
//! window (IW) is the planar region `cross_range_2 = 0` facing it.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ImagingError, Result};
use crate::linalg::C64;
use crate::rng::{self, Stream};

pub type Point3 = [f64; 3];

pub(crate) fn distance(a: &Point3, b: &Point3) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Transducer positions. Every transducer both emits and records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    positions: Vec<Point3>,
}

impl ArrayGeometry {
    pub fn new(positions: Vec<Point3>) -> Result<Self> {
        if positions.is_empty() {
            return Err(ImagingError::InvalidGeometry("array needs at least one transducer".into()));
        }
        if let Some(p) = positions.iter().find(|p| p[2] != 0.0) {
            return Err(ImagingError::InvalidGeometry(format!(
                "transducer at {p:?} is not in the array plane range = 0"
            )));
        }
        for (i, a) in positions.iter().enumerate() {
            for b in &positions[i + 1..] {
                if a == b {
                    return Err(ImagingError::InvalidGeometry(format!("duplicate transducer at {a:?}")));
                }
            }
        }
        Ok(Self { positions })
    }

    /// `n` equispaced transducers along the first cross-range axis spanning
    /// `[-aperture/2, aperture/2]`. A single transducer sits at the origin.
    pub fn linear(n: usize, aperture: f64) -> Result<Self> {
        if n == 0 {
            return Err(ImagingError::InvalidGeometry("array needs at least one transducer".into()));
        }
        if n > 1 && aperture <= 0.0 {
            return Err(ImagingError::InvalidGeometry("aperture must be positive".into()));
        }
        let positions = (0..n)
            .map(|i| {
                let x = if n == 1 { 0.0 } else { -aperture / 2.0 + aperture * i as f64 / (n - 1) as f64 };
                [x, 0.0, 0.0]
            })
            .collect();
        Self::new(positions)
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Largest cross-range extent of the array.
    pub fn aperture(&self) -> f64 {
        let xs = self.positions.iter().map(|p| p[0]);
        let lo = xs.clone().fold(f64::INFINITY, f64::min);
        let hi = xs.fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }
}

/// A point scatterer at `position` with complex reflectivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    pub position: Point3,
    pub reflectivity: C64,
}

impl Scatterer {
    pub fn new(position: Point3, reflectivity: C64) -> Result<Self> {
        if reflectivity.norm() == 0.0 {
            return Err(ImagingError::InvalidArgument("scatterer reflectivity must be nonzero".into()));
        }
        Ok(Self { position, reflectivity })
    }
}

/// Uniform planar grid over the imaging window. Points are enumerated
/// row-major with cross range varying fastest: `k = j * cross_range_count + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImagingGrid {
    origin: Point3,
    cross_range_extent: f64,
    range_extent: f64,
    cross_range_count: usize,
    range_count: usize,
}

impl ImagingGrid {
    /// Grid whose first point (smallest cross range, smallest range) is `origin`.
    pub fn new(
        origin: Point3,
        cross_range_extent: f64,
        range_extent: f64,
        cross_range_count: usize,
        range_count: usize,
    ) -> Result<Self> {
        if cross_range_count == 0 || range_count == 0 {
            return Err(ImagingError::InvalidGeometry("grid counts must be positive".into()));
        }
        for (extent, count, axis) in [
            (cross_range_extent, cross_range_count, "cross-range"),
            (range_extent, range_count, "range"),
        ] {
            if !(extent >= 0.0) || (count > 1 && extent <= 0.0) {
                return Err(ImagingError::InvalidGeometry(format!(
                    "{axis} extent must be positive when the axis has more than one point"
                )));
            }
        }
        Ok(Self {
            origin,
            cross_range_extent,
            range_extent,
            cross_range_count,
            range_count,
        })
    }

    /// Grid centred on `center` (cross range, range) in the plane `cross_range_2 = 0`.
    pub fn centered(
        center_cross_range: f64,
        center_range: f64,
        cross_range_extent: f64,
        range_extent: f64,
        cross_range_count: usize,
        range_count: usize,
    ) -> Result<Self> {
        let origin = [
            center_cross_range - cross_range_extent / 2.0,
            0.0,
            center_range - range_extent / 2.0,
        ];
        Self::new(origin, cross_range_extent, range_extent, cross_range_count, range_count)
    }

    pub fn len(&self) -> usize {
        self.cross_range_count * self.range_count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.cross_range_count, self.range_count)
    }

    pub fn origin(&self) -> Point3 {
        self.origin
    }

    pub fn extents(&self) -> (f64, f64) {
        (self.cross_range_extent, self.range_extent)
    }

    /// Mesh size per axis. A single-point axis reports its extent, or 1 when
    /// that is zero, so that cell-normalized distances stay defined.
    pub fn spacing(&self) -> (f64, f64) {
        fn step(extent: f64, count: usize) -> f64 {
            if count > 1 {
                extent / (count - 1) as f64
            } else if extent > 0.0 {
                extent
            } else {
                1.0
            }
        }
        (
            step(self.cross_range_extent, self.cross_range_count),
            step(self.range_extent, self.range_count),
        )
    }

    pub fn index(&self, cross_range_idx: usize, range_idx: usize) -> usize {
        range_idx * self.cross_range_count + cross_range_idx
    }

    /// `(cross_range_idx, range_idx)` of flat index `k`.
    pub fn cell(&self, k: usize) -> (usize, usize) {
        (k % self.cross_range_count, k / self.cross_range_count)
    }

    pub fn point(&self, k: usize) -> Point3 {
        let (i, j) = self.cell(k);
        let (dx, dz) = self.spacing();
        [
            self.origin[0] + i as f64 * dx,
            self.origin[1],
            self.origin[2] + j as f64 * dz,
        ]
    }

    /// All grid points `y_1..y_K`.
    pub fn points(&self) -> Vec<Point3> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Chebyshev distance between two grid indices in cells.
    pub fn cell_distance(&self, a: usize, b: usize) -> usize {
        let (ia, ja) = self.cell(a);
        let (ib, jb) = self.cell(b);
        ia.abs_diff(ib).max(ja.abs_diff(jb))
    }

    /// Standoff: range coordinate of the window centre.
    pub fn standoff(&self) -> f64 {
        self.origin[2] + self.range_extent / 2.0
    }

    /// Cross-range part `(x1, x2)` of grid point `k`.
    pub fn cross_range(&self, k: usize) -> [f64; 2] {
        let p = self.point(k);
        [p[0], p[1]]
    }

    /// Range offset of grid point `k` relative to the standoff.
    pub fn range_offset(&self, k: usize) -> f64 {
        self.point(k)[2] - self.standoff()
    }

    /// Nearest grid point in the cell-normalized infinity norm, with ties
    /// going to the lowest index. `None` when no grid point is closer than one
    /// mesh size along every axis, i.e. the point is outside the window.
    pub fn nearest(&self, z: &Point3) -> Option<usize> {
        let (dx, dz) = self.spacing();
        if (z[1] - self.origin[1]).abs() > 1e-9 * dx.max(dz) {
            return None;
        }
        let fi = (z[0] - self.origin[0]) / dx;
        let fj = (z[2] - self.origin[2]) / dz;
        let nearest_axis = |f: f64, count: usize| -> Option<usize> {
            // rounding half down realises the lowest-index tie-break
            let tol = 1e-9;
            let cand = (f - 0.5 - tol).ceil().max(0.0);
            let cand = (cand as usize).min(count - 1);
            if (f - cand as f64).abs() < 1.0 {
                Some(cand)
            } else {
                None
            }
        };
        let i = nearest_axis(fi, self.cross_range_count)?;
        let j = nearest_axis(fj, self.range_count)?;
        Some(self.index(i, j))
    }
}

/// Probing frequencies. With `c0 = 1` and lengths in central wavelengths the
/// angular frequency and wavenumber coincide numerically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySet {
    frequencies: Vec<f64>,
    wave_speed: f64,
}

impl FrequencySet {
    pub fn new(frequencies: Vec<f64>, wave_speed: f64) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(ImagingError::InvalidArgument("at least one frequency is required".into()));
        }
        if !(wave_speed > 0.0) {
            return Err(ImagingError::InvalidArgument("wave speed must be positive".into()));
        }
        if frequencies.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(ImagingError::InvalidArgument("frequencies must be positive".into()));
        }
        if frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ImagingError::InvalidArgument("frequencies must be strictly increasing".into()));
        }
        Ok(Self { frequencies, wave_speed })
    }

    /// Single frequency whose wavelength is one length unit.
    pub fn single_central() -> Self {
        Self::new(vec![2.0 * PI], 1.0).expect("valid")
    }

    /// `count` equally spaced frequencies centred on the unit-wavelength
    /// frequency, spanning `relative_bandwidth * 2*pi` from first to last.
    pub fn equispaced_band(count: usize, relative_bandwidth: f64) -> Result<Self> {
        if count == 0 {
            return Err(ImagingError::InvalidArgument("at least one frequency is required".into()));
        }
        let centre = 2.0 * PI;
        if count == 1 {
            return Self::new(vec![centre], 1.0);
        }
        if !(relative_bandwidth > 0.0 && relative_bandwidth < 2.0) {
            return Err(ImagingError::InvalidArgument("relative bandwidth must be in (0, 2)".into()));
        }
        let band = centre * relative_bandwidth;
        let step = band / (count - 1) as f64;
        let first = centre - band / 2.0;
        Self::new((0..count).map(|m| first + step * m as f64).collect(), 1.0)
    }

    /// Wavenumbers `kappa_1 + m * step`, `m = 0..count`, with unit wave speed.
    pub fn from_wavenumbers(first: f64, step: f64, count: usize) -> Result<Self> {
        Self::new((0..count).map(|m| first + step * m as f64).collect(), 1.0)
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn wave_speed(&self) -> f64 {
        self.wave_speed
    }

    pub fn wavenumber(&self, l: usize) -> f64 {
        self.frequencies[l] / self.wave_speed
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.len()).map(|l| self.wavenumber(l)).collect()
    }

    /// Midpoint of the band, in wavenumber units.
    pub fn central_wavenumber(&self) -> f64 {
        (self.wavenumber(0) + self.wavenumber(self.len() - 1)) / 2.0
    }

    /// `omega_S - omega_1`.
    pub fn bandwidth(&self) -> f64 {
        self.frequencies[self.len() - 1] - self.frequencies[0]
    }

    /// Wavenumber step when the set is equispaced.
    pub fn wavenumber_step(&self) -> Option<f64> {
        if !self.equally_spaced() {
            return None;
        }
        Some(if self.len() > 1 { self.wavenumber(1) - self.wavenumber(0) } else { 0.0 })
    }

    /// True iff consecutive wavenumber differences agree to 1e-12 relative to
    /// the largest wavenumber.
    pub fn equally_spaced(&self) -> bool {
        if self.len() < 3 {
            return true;
        }
        let k = self.wavenumbers();
        let d0 = k[1] - k[0];
        let scale = k[k.len() - 1].abs();
        k.windows(2).all(|w| ((w[1] - w[0]) - d0).abs() <= 1e-12 * scale)
    }
}

/// Discrete reflectivity on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectivityVector {
    pub values: Vec<C64>,
    pub support: Vec<usize>,
}

impl ReflectivityVector {
    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    /// Smallest nonzero magnitude, `mu`.
    pub fn min_magnitude(&self) -> f64 {
        self.support.iter().map(|&k| self.values[k].norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Immutable imaging scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub array: ArrayGeometry,
    pub scatterers: Vec<Scatterer>,
    pub grid: ImagingGrid,
    pub frequencies: FrequencySet,
}

impl Scene {
    pub fn new(
        array: ArrayGeometry,
        scatterers: Vec<Scatterer>,
        grid: ImagingGrid,
        frequencies: FrequencySet,
    ) -> Self {
        Self {
            array,
            scatterers,
            grid,
            frequencies,
        }
    }

    /// Map continuous scatterers onto the grid.
    pub fn discretize_reflectivity(&self) -> Result<ReflectivityVector> {
        let k = self.grid.len();
        let mut values = vec![C64::new(0.0, 0.0); k];
        let mut owner: Vec<Option<usize>> = vec![None; k];
        for (j, s) in self.scatterers.iter().enumerate() {
            let cell = self.grid.nearest(&s.position).ok_or(ImagingError::OutsideWindow { index: j })?;
            if let Some(first) = owner[cell] {
                return Err(ImagingError::TwoScatterersOneCell {
                    first,
                    second: j,
                    cell,
                });
            }
            owner[cell] = Some(j);
            values[cell] = s.reflectivity;
        }
        let support = (0..k).filter(|&i| owner[i].is_some()).collect();
        Ok(ReflectivityVector { values, support })
    }

    /// Grid index of each scatterer, in scatterer order.
    pub fn scatterer_cells(&self) -> Result<Vec<usize>> {
        self.scatterers
            .iter()
            .enumerate()
            .map(|(j, s)| self.grid.nearest(&s.position).ok_or(ImagingError::OutsideWindow { index: j }))
            .collect()
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn content_hash(&self) -> String {
        let text = serde_json_like(self);
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

// Canonical text for hashing: TOML via serde, which is stable for a given
// field order and prints floats round-trip exactly.
fn serde_json_like(scene: &Scene) -> String {
    toml::to_string(scene).unwrap_or_default()
}

/// Parameters for drawing random on-grid or off-grid scenes.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSceneSpec {
    pub count: usize,
    /// Minimum pairwise Euclidean separation between scatterers.
    pub min_separation: f64,
    /// Minimum pairwise separation in grid cells (Chebyshev distance of
    /// grid indices), useful when the mesh is tied to the resolution.
    pub min_separation_cells: usize,
    /// Fraction of a mesh size added to both coordinates (0.5 puts scatterers
    /// half way between grid points).
    pub off_grid_shift: f64,
    /// Keep scatterers this many cells away from the window border.
    pub margin_cells: usize,
    /// Reflectivity magnitudes are drawn uniformly from this range, phases uniformly.
    pub magnitude_range: (f64, f64),
}

impl Default for RandomSceneSpec {
    fn default() -> Self {
        Self {
            count: 4,
            min_separation: 0.0,
            min_separation_cells: 0,
            off_grid_shift: 0.0,
            margin_cells: 1,
            magnitude_range: (1.0, 1.0),
        }
    }
}

/// Draw scatterers on (or shifted from) grid points by rejection sampling.
pub fn random_scatterers(grid: &ImagingGrid, spec: &RandomSceneSpec, seed: u64) -> Result<Vec<Scatterer>> {
    let mut r = rng::rng(seed, Stream::Scene);
    let (nx, nz) = grid.dims();
    let m = spec.margin_cells;
    if nx <= 2 * m && nx > 1 || nz <= 2 * m && nz > 1 {
        return Err(ImagingError::InvalidArgument("grid too small for the requested margin".into()));
    }
    let (dx, dz) = grid.spacing();
    let span = |n: usize| if n > 2 * m { (m, n - m) } else { (0, n) };
    let (ix0, ix1) = span(nx);
    let (iz0, iz1) = span(nz);
    let mut out: Vec<Scatterer> = Vec::with_capacity(spec.count);
    let mut cells: Vec<(usize, usize)> = Vec::with_capacity(spec.count);
    let mut attempts = 0usize;
    while out.len() < spec.count {
        attempts += 1;
        if attempts > 100_000 {
            return Err(ImagingError::InvalidArgument(format!(
                "could not place {} scatterers {} apart",
                spec.count, spec.min_separation
            )));
        }
        let i = r.random_range(ix0..ix1);
        let j = r.random_range(iz0..iz1);
        let mut p = grid.point(grid.index(i, j));
        if nx > 1 {
            p[0] += spec.off_grid_shift * dx;
        }
        if nz > 1 {
            p[2] += spec.off_grid_shift * dz;
        }
        if out.iter().any(|s| distance(&s.position, &p) < spec.min_separation.max(1e-12)) {
            continue;
        }
        if cells.iter().any(|&(a, b): &(usize, usize)| a.abs_diff(i).max(b.abs_diff(j)) < spec.min_separation_cells) {
            continue;
        }
        let (lo, hi) = spec.magnitude_range;
        let mag = if hi > lo { r.random_range(lo..hi) } else { lo };
        let phase = r.random_range(0.0..2.0 * PI);
        out.push(Scatterer::new(p, C64::from_polar(mag, phase))?);
        cells.push((i, j));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_grid_is_its_origin() {
        let g = ImagingGrid::new([1.0, 0.0, 5.0], 0.0, 0.0, 1, 1).unwrap();
        assert_eq!(g.points(), vec![[1.0, 0.0, 5.0]]);
    }

    #[test]
    fn fifty_one_points_over_hundred_wavelengths() {
        let g = ImagingGrid::centered(0.0, 10_000.0, 100.0, 100.0, 51, 51).unwrap();
        let (dx, dz) = g.spacing();
        assert!((dx - 2.0).abs() < 1e-12 && (dz - 2.0).abs() < 1e-12);
        assert_eq!(g.len(), 2601);
    }

    #[test]
    fn three_by_three_spacing_two() {
        let g = ImagingGrid::new([0.0, 0.0, 10.0], 4.0, 4.0, 3, 3).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[1], [2.0, 0.0, 10.0]);
        assert_eq!(pts[3], [0.0, 0.0, 12.0]);
        assert_eq!(pts[8], [4.0, 0.0, 14.0]);
    }

    #[test]
    fn spacing_times_count_is_extent() {
        for (ext, n) in [(100.0, 51usize), (5.0, 50), (37.3, 7)] {
            let g = ImagingGrid::new([0.0; 3], ext, ext * 2.0, n, n + 1).unwrap();
            let (dx, dz) = g.spacing();
            assert!((dx * (n - 1) as f64 - ext).abs() <= 1e-12 * ext);
            assert!((dz * n as f64 - 2.0 * ext).abs() <= 1e-12 * ext);
        }
    }

    fn small_scene(scatterers: Vec<Scatterer>) -> Scene {
        Scene::new(
            ArrayGeometry::linear(5, 10.0).unwrap(),
            scatterers,
            ImagingGrid::new([0.0, 0.0, 10.0], 4.0, 4.0, 3, 3).unwrap(),
            FrequencySet::single_central(),
        )
    }

    #[test]
    fn on_grid_scatterer_lands_on_its_point() {
        let g = ImagingGrid::new([0.0, 0.0, 10.0], 4.0, 4.0, 3, 3).unwrap();
        let alpha = C64::new(2.0, 1.0);
        let scene = small_scene(vec![Scatterer::new(g.point(4), alpha).unwrap()]);
        let rho = scene.discretize_reflectivity().unwrap();
        assert_eq!(rho.support, vec![4]);
        assert_eq!(rho.values[4], alpha);
        assert_eq!(rho.values.iter().filter(|v| v.norm() > 0.0).count(), 1);
    }

    #[test]
    fn half_cell_displacement_goes_to_lowest_index() {
        let g = ImagingGrid::new([0.0, 0.0, 10.0], 4.0, 4.0, 3, 3).unwrap();
        let mut p = g.point(0);
        p[0] += 1.0;
        p[2] += 1.0;
        let scene = small_scene(vec![Scatterer::new(p, C64::new(1.0, 0.0)).unwrap()]);
        assert_eq!(scene.discretize_reflectivity().unwrap().support, vec![0]);
    }

    #[test]
    fn outside_window_is_rejected() {
        let scene = small_scene(vec![Scatterer::new([20.0, 0.0, 10.0], C64::new(1.0, 0.0)).unwrap()]);
        assert_eq!(
            scene.discretize_reflectivity(),
            Err(ImagingError::OutsideWindow { index: 0 })
        );
        let off_plane = small_scene(vec![Scatterer::new([0.0, 1.0, 10.0], C64::new(1.0, 0.0)).unwrap()]);
        assert!(off_plane.discretize_reflectivity().is_err());
    }

    #[test]
    fn two_scatterers_in_one_cell_is_rejected() {
        let scene = small_scene(vec![
            Scatterer::new([0.1, 0.0, 10.0], C64::new(1.0, 0.0)).unwrap(),
            Scatterer::new([-0.1, 0.0, 10.2], C64::new(1.0, 0.0)).unwrap(),
        ]);
        assert!(matches!(
            scene.discretize_reflectivity(),
            Err(ImagingError::TwoScatterersOneCell { first: 0, second: 1, cell: 0 })
        ));
    }

    #[test]
    fn on_grid_positions_round_trip() {
        let g = ImagingGrid::new([-3.0, 0.0, 50.0], 6.0, 8.0, 7, 5).unwrap();
        let spec = RandomSceneSpec {
            count: 5,
            min_separation: 1.5,
            ..Default::default()
        };
        let scatterers = random_scatterers(&g, &spec, 7).unwrap();
        let scene = Scene::new(
            ArrayGeometry::linear(3, 2.0).unwrap(),
            scatterers.clone(),
            g.clone(),
            FrequencySet::single_central(),
        );
        let rho = scene.discretize_reflectivity().unwrap();
        let mut back: Vec<Point3> = rho.support.iter().map(|&k| g.point(k)).collect();
        let mut truth: Vec<Point3> = scatterers.iter().map(|s| s.position).collect();
        back.sort_by(|a, b| a.partial_cmp(b).unwrap());
        truth.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(back, truth);
    }

    #[test]
    fn equal_spacing_detection() {
        let f = FrequencySet::from_wavenumbers(6.0, 0.01, 12).unwrap();
        assert!(f.equally_spaced());
        let mut w = f.frequencies().to_vec();
        w[5] *= 1.0 + 2e-6;
        assert!(!FrequencySet::new(w, 1.0).unwrap().equally_spaced());
        let band = FrequencySet::equispaced_band(12, 0.05).unwrap();
        assert!(band.equally_spaced());
        assert!((band.central_wavenumber() - 2.0 * PI).abs() < 1e-12);
        assert!((band.bandwidth() - 0.1 * PI).abs() < 1e-12);
    }

    #[test]
    fn frequency_validation() {
        assert!(FrequencySet::new(vec![], 1.0).is_err());
        assert!(FrequencySet::new(vec![2.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn array_validation() {
        assert!(ArrayGeometry::new(vec![]).is_err());
        assert!(ArrayGeometry::new(vec![[0.0, 0.0, 1.0]]).is_err());
        assert!(ArrayGeometry::new(vec![[0.0; 3], [0.0; 3]]).is_err());
        let a = ArrayGeometry::linear(81, 100.0).unwrap();
        assert_eq!(a.len(), 81);
        assert!((a.aperture() - 100.0).abs() < 1e-12);
    }
}
