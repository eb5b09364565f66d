//! The cross-frequency stack of interferometric matrices, conj(P_l) P_1,
//! shares its signal subspace with the conjugated full-phase stack in the
//! paraxial regime, so imaging it needs conjugated model vectors. The match
//! is only approximate: the full-phase stack has rank above M once the
//! per-frequency right factors stop being phase multiples of each other.

use music_imaging::forward::response_tensor;
use music_imaging::linalg::{projection_distance, C64};
use music_imaging::music::{decompose, pseudospectrum, ImagingOptions, RankPolicy};
use music_imaging::scene::{ArrayGeometry, FrequencySet, ImagingGrid, Scatterer, Scene};
use music_imaging::structures::{build_mc, build_pc};

fn scene_with_aperture(aperture: f64) -> Scene {
    let grid = ImagingGrid::centered(0.0, 10_000.0, 100.0, 100.0, 21, 21).unwrap();
    let scatterers = [(3, 4, 1.0), (15, 9, 0.8), (8, 17, 1.3)]
        .into_iter()
        .map(|(i, j, r)| Scatterer::new(grid.point(grid.index(i, j)), C64::from_polar(r, i as f64)).unwrap())
        .collect();
    Scene::new(ArrayGeometry::linear(21, aperture).unwrap(), scatterers, grid, FrequencySet::equispaced_band(12, 0.05).unwrap())
}

/// a/L = 0.05 at the 10000-wavelength standoff.
fn paraxial_scene() -> Scene {
    scene_with_aperture(500.0)
}

/// Distances between the M^c signal subspace and the full-phase one, with
/// and without conjugation.
fn subspace_distances(scene: &Scene) -> (f64, f64) {
    let tensor = response_tensor(scene).unwrap();
    let (pc, _) = build_pc(scene, &tensor).unwrap();
    let mc = build_mc(&tensor);
    let u_pc = decompose(&pc.entries, RankPolicy::Known(3)).unwrap().signal_basis();
    let u_mc = decompose(&mc.entries, RankPolicy::Known(3)).unwrap().signal_basis();
    (projection_distance(&u_mc, &u_pc.map(|z| z.conj())), projection_distance(&u_mc, &u_pc))
}

#[test]
fn coherent_stack_matches_conjugated_full_phase_stack_deep_paraxial() {
    // a/L = 0.01; measured 4.6e-5 conjugated, 1.0 plain
    let (conj, plain) = subspace_distances(&scene_with_aperture(100.0));
    assert!(conj < 1e-3, "conjugated distance {conj:e}");
    assert!(plain > 0.9, "plain distance {plain:e}");
}

#[test]
fn subspace_match_degrades_with_aperture() {
    let conj: Vec<f64> = [100.0, 500.0, 2500.0].into_iter().map(|a| subspace_distances(&scene_with_aperture(a)).0).collect();
    assert!(conj.windows(2).all(|w| w[1] > w[0]), "{conj:?}");
}

#[test]
fn coherent_stack_images_only_with_conjugation() {
    let scene = paraxial_scene();
    let tensor = response_tensor(&scene).unwrap();
    let (_, family) = build_pc(&scene, &tensor).unwrap();
    let dec = decompose(&build_mc(&tensor).entries, RankPolicy::Known(3)).unwrap();
    let mut truth = scene.scatterer_cells().unwrap();
    truth.sort_unstable();
    let conj = pseudospectrum(&dec, &family, ImagingOptions::conjugated()).unwrap();
    assert_eq!(conj.support, truth);
    let plain = pseudospectrum(&dec, &family, ImagingOptions::default()).unwrap();
    assert_ne!(plain.support, truth);
}
