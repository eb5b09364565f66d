//! Support-recovery metrics. Distances are Chebyshev distances in units of
//! the grid spacing (each axis divided by its own mesh size), measured from
//! the true continuous positions, so an on-grid hit scores 0 and a
//! half-cell off-grid hit scores 0.5.

use crate::error::Result;
use crate::scene::{ImagingGrid, Point3, Scene};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    /// Extracted support equals the discretized true support.
    pub exact_match: bool,
    /// Per true scatterer: distance to the nearest recovered grid point.
    pub scatterer_errors: Vec<f64>,
    /// Per recovered index: distance to the nearest true scatterer.
    pub recovered_errors: Vec<f64>,
    pub mean_error: f64,
    pub max_error: f64,
    /// True scatterers with no recovered index within the tolerance.
    pub misses: usize,
    /// Recovered indices with no true scatterer within the tolerance.
    pub false_alarms: usize,
}

/// Distance in cells between a continuous point and grid point `k`; axes
/// with a single grid point are ignored.
pub fn cell_distance(grid: &ImagingGrid, p: &Point3, k: usize) -> f64 {
    let y = grid.point(k);
    let (nx, nz) = grid.dims();
    let (dx, dz) = grid.spacing();
    let mut d = 0.0f64;
    if nx > 1 {
        d = d.max((p[0] - y[0]).abs() / dx);
    }
    if nz > 1 {
        d = d.max((p[2] - y[2]).abs() / dz);
    }
    d
}

/// Compare an extracted support with the scene. `tolerance` (in cells)
/// decides what counts as a miss or a false alarm.
pub fn metrics(scene: &Scene, support: &[usize], tolerance: f64) -> Result<MetricRecord> {
    let grid = &scene.grid;
    let mut truth = scene.scatterer_cells()?;
    truth.sort_unstable();
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    let exact_match = truth == sorted;

    let scatterer_errors: Vec<f64> = scene
        .scatterers
        .iter()
        .map(|s| {
            support
                .iter()
                .map(|&k| cell_distance(grid, &s.position, k))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let recovered_errors: Vec<f64> = support
        .iter()
        .map(|&k| {
            scene
                .scatterers
                .iter()
                .map(|s| cell_distance(grid, &s.position, k))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let n = scatterer_errors.len().max(1) as f64;
    let mean_error = scatterer_errors.iter().sum::<f64>() / n;
    let max_error = scatterer_errors.iter().copied().fold(0.0, f64::max);
    Ok(MetricRecord {
        exact_match,
        misses: scatterer_errors.iter().filter(|&&e| e > tolerance).count(),
        false_alarms: recovered_errors.iter().filter(|&&e| e > tolerance).count(),
        scatterer_errors,
        recovered_errors,
        mean_error,
        max_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::scene::{ArrayGeometry, FrequencySet, Scatterer};

    fn scene(points: &[Point3]) -> Scene {
        let grid = ImagingGrid::centered(0.0, 100.0, 20.0, 10.0, 11, 6).unwrap();
        let scatterers = points.iter().map(|p| Scatterer::new(*p, C64::new(1.0, 0.0)).unwrap()).collect();
        Scene::new(ArrayGeometry::linear(5, 10.0).unwrap(), scatterers, grid, FrequencySet::single_central())
    }

    #[test]
    fn exact_recovery() {
        let s = scene(&[]);
        let pts = [s.grid.point(3), s.grid.point(40)];
        let s = scene(&pts);
        let m = metrics(&s, &[40, 3], 1.0).unwrap();
        assert!(m.exact_match);
        assert_eq!(m.scatterer_errors, vec![0.0, 0.0]);
        assert_eq!((m.misses, m.false_alarms), (0, 0));
    }

    #[test]
    fn one_missed_scatterer() {
        let g = scene(&[]).grid;
        let s = scene(&[g.point(3), g.point(40)]);
        // the second recovered point is far from scatterer 40
        let m = metrics(&s, &[3, 10], 1.0).unwrap();
        assert!(!m.exact_match);
        assert_eq!(m.misses, 1);
        assert_eq!(m.false_alarms, 1);
    }

    #[test]
    fn half_cell_offsets() {
        let g = scene(&[]).grid;
        let mut p = g.point(25);
        p[0] += 1.0; // half of the 2.0 cross-range mesh
        p[2] += 1.0; // half of the 2.0 range mesh
        let s = scene(&[p]);
        let m = metrics(&s, &[25], 1.0).unwrap();
        assert!((m.mean_error - 0.5).abs() < 1e-12);
        let far = metrics(&s, &[27], 1.0).unwrap();
        assert!((far.mean_error - 1.5).abs() < 1e-12);
        assert_eq!(far.misses, 1);
    }
}
