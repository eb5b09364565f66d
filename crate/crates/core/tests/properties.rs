//! Randomized invariants of the forward model, the phaseless identities and
//! the MUSIC functional.

use proptest::prelude::*;

use music_imaging::forward::{noise_matrix, response_matrix, Illumination};
use music_imaging::linalg::{frobenius, relative_error, CMatrix, CVector, C64};
use music_imaging::music::{decompose, extract_support, pseudospectrum, ImagingOptions, RankPolicy};
use music_imaging::phaseless::polarization_inner;
use music_imaging::scene::{ArrayGeometry, FrequencySet, ImagingGrid, Scatterer, Scene};
use music_imaging::structures::{build_single_freq, DataKind};

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn nonzero() -> impl Strategy<Value = C64> {
    (0.2..2.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

/// Scene with scatterers at distinct grid cells of a small window.
fn scene_with(cells: &[(usize, C64)]) -> Scene {
    let grid = ImagingGrid::centered(0.0, 40.0, 12.0, 12.0, 13, 13).unwrap();
    let scatterers = cells.iter().map(|&(k, rho)| Scatterer::new(grid.point(k), rho).unwrap()).collect();
    Scene::new(ArrayGeometry::linear(17, 30.0).unwrap(), scatterers, grid, FrequencySet::single_central())
}

fn well_separated(cells: &[(usize, C64)]) -> bool {
    let cell = |k: usize| ((k % 13) as i64, (k / 13) as i64);
    cells.iter().enumerate().all(|(a, &(ka, _))| {
        cells[a + 1..].iter().all(|&(kb, _)| {
            let ((ia, ja), (ib, jb)) = (cell(ka), cell(kb));
            (ia - ib).abs().max((ja - jb).abs()) >= 3
        })
    })
}

fn cells() -> impl Strategy<Value = Vec<(usize, C64)>> {
    prop::collection::btree_map(0..169usize, nonzero(), 1..4).prop_map(|m| m.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn response_matrix_is_symmetric(cells in cells(), dx in -0.4..0.4f64, dz in -0.4..0.4f64) {
        let mut scene = scene_with(&cells);
        for s in &mut scene.scatterers {
            s.position[0] += dx;
            s.position[2] += dz;
        }
        let p = response_matrix(&scene, 0).unwrap();
        prop_assert!(relative_error(&p.transpose(), &p) < 1e-14);
    }

    #[test]
    fn polarization_recovers_inner_products(u in prop::collection::vec(complex(), 1..6), v in prop::collection::vec(complex(), 1..6)) {
        let n = u.len().min(v.len());
        let (u, v) = (CVector::from_iterator(n, u.into_iter().take(n)), CVector::from_iterator(n, v.into_iter().take(n)));
        let iv = &v * C64::i();
        let got = polarization_inner(u.norm_squared(), v.norm_squared(), (&u + &v).norm_squared(), (&u - &iv).norm_squared());
        let want = u.dotc(&v);
        prop_assert!((got - want).norm() <= 1e-12 * (1.0 + u.norm() * v.norm()));
    }

    #[test]
    fn image_ignores_data_scaling(cells in cells(), c in nonzero()) {
        // resolution is about 1.3 cells across and 2 in range
        prop_assume!(well_separated(&cells));
        let scene = scene_with(&cells);
        let illums: Vec<Illumination> = (0..17).map(|q| Illumination::point(17, q)).collect();
        let (data, family) = build_single_freq(&scene, 0, &illums).unwrap();
        let m = cells.len();
        let base = pseudospectrum(&decompose(&data.entries, RankPolicy::Known(m)).unwrap(), &family, ImagingOptions::default()).unwrap();
        let scaled_data: CMatrix = &data.entries * c;
        let scaled = pseudospectrum(&decompose(&scaled_data, RankPolicy::Known(m)).unwrap(), &family, ImagingOptions::default()).unwrap();
        prop_assert_eq!(&base.support, &scaled.support);
        let mut truth: Vec<usize> = cells.iter().map(|&(k, _)| k).collect();
        truth.sort_unstable();
        prop_assert_eq!(base.support, truth);
        prop_assert_eq!(data.kind, DataKind::SingleFreq);
    }

    #[test]
    fn support_is_sorted_unique_and_bounded(values in prop::collection::vec(0.0..1.0f64, 0..40), m in 0..50usize) {
        let s = extract_support(&values, m);
        prop_assert_eq!(s.len(), m.min(values.len()));
        prop_assert!(s.windows(2).all(|w| w[0] < w[1]));
        // nothing left out is larger than anything kept
        if let Some(kept_min) = s.iter().map(|&k| values[k]).reduce(f64::min) {
            prop_assert!((0..values.len()).filter(|k| !s.contains(k)).all(|k| values[k] <= kept_min));
        }
    }

    #[test]
    fn noise_energy_follows_snr(snr in -10.0..40.0f64, seed in 0..1000u64) {
        let b = CMatrix::from_fn(40, 40, |i, j| C64::from_polar(1.0 + (i % 3) as f64, (i * j) as f64));
        let e = noise_matrix(&b, snr, seed).unwrap();
        let ratio = frobenius(&e).powi(2) / frobenius(&b).powi(2) * 10f64.powf(snr / 10.0);
        // 1600 complex entries: the energy ratio concentrates within a few percent
        prop_assert!((ratio - 1.0).abs() < 0.1, "ratio {}", ratio);
    }

    #[test]
    fn same_seed_same_noise(seed in any::<u64>()) {
        let b = CMatrix::from_element(4, 3, C64::new(1.0, -1.0));
        prop_assert_eq!(noise_matrix(&b, 3.0, seed).unwrap(), noise_matrix(&b, 3.0, seed).unwrap());
    }
}
