// One transducer, many frequencies: delays from the Toeplitz (Prony) data
// matrix by MUSIC.
//
// cargo run --example prony_delays

use music_imaging::linalg::C64;
use music_imaging::music::{decompose, extract_support, pseudospectrum, ImagingOptions, RankPolicy};
use music_imaging::scene::FrequencySet;
use music_imaging::structures::{build_prony, DelayScene};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let centre = 2.0 * std::f64::consts::PI;
    let step = centre * 0.05 / 20.0;
    let freqs = FrequencySet::from_wavenumbers(centre - 10.0 * step, step, 21)?;
    let grid = DelayScene::uniform_grid(50.0, 2.0, 80);
    let scene = DelayScene::on_grid(grid, &[(12, C64::new(1.0, 0.0)), (40, C64::from_polar(0.6, 2.0)), (61, C64::new(0.0, 1.3))]);

    let (data, family) = build_prony(&scene, &freqs)?;
    let rho = scene.reflectivity()?;
    let residual = family.factorization_residuals(&rho, &data.entries).into_iter().fold(0.0, f64::max);
    println!("Toeplitz data {}x{}, worst factorization residual {residual:.1e}", data.entries.nrows(), data.entries.ncols());

    let dec = decompose(&data.entries, RankPolicy::Threshold(1e-8))?;
    let img = pseudospectrum(&dec, &family, ImagingOptions::default())?;
    let support = extract_support(&img.values, dec.rank);
    println!("rank {} -> delay cells {support:?}", dec.rank);
    assert_eq!(support, vec![12, 40, 61]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
