// Born-approximation response matrix of a linear array: symmetry, rank and
// the effect of additive noise at a given SNR.
//
// cargo run --example forward_model

use music_imaging::forward::{add_noise, response_matrix};
use music_imaging::linalg::{relative_error, singular_values, C64};
use music_imaging::scene::{ArrayGeometry, FrequencySet, ImagingGrid, Scatterer, Scene};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let array = ArrayGeometry::linear(21, 50.0)?;
    let grid = ImagingGrid::centered(0.0, 100.0, 20.0, 20.0, 21, 21)?;
    let scatterers = vec![
        Scatterer::new([-4.0, 0.0, 98.0], C64::new(1.0, 0.0))?,
        Scatterer::new([5.0, 0.0, 104.0], C64::from_polar(0.7, 1.2))?,
    ];
    let scene = Scene::new(array, scatterers, grid, FrequencySet::single_central());

    let p = response_matrix(&scene, 0)?;
    let asymmetry = relative_error(&p.transpose(), &p);
    let sv = singular_values(&p);
    println!("P is {}x{}, ||P^T - P|| / ||P|| = {asymmetry:.1e}", p.nrows(), p.ncols());
    println!("leading singular values: {:.3e} {:.3e} {:.3e}", sv[0], sv[1], sv[2]);
    assert!(asymmetry < 1e-14);
    // two scatterers: rank two
    assert!(sv[2] < 1e-12 * sv[0]);

    for snr in [40.0, 20.0, 0.0] {
        let noisy = add_noise(&p, snr, 7)?;
        let err = relative_error(&noisy, &p);
        println!("snr {snr:>4} dB: relative perturbation {err:.3}");
        // Frobenius SNR: ||E|| / ||P|| is close to 10^(-snr/20)
        assert!((err / 10f64.powf(-snr / 20.0) - 1.0).abs() < 0.2);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
