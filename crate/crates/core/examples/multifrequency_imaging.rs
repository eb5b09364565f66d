// Multifrequency phaseless imaging in the paraxial regime: the coherent
// cross-frequency stack against the block-diagonal structure, with images
// written as PGM.
//
// cargo run --example multifrequency_imaging (output under $MUSIC_EXAMPLE_OUT, default the temp dir)

use std::path::PathBuf;

use music_imaging::experiment::metrics::metrics;
use music_imaging::experiment::pipeline::{image, Acquisition, ImagingRequest};
use music_imaging::export::{write_pseudospectrum, Scale};
use music_imaging::linalg::C64;
use music_imaging::scene::{ArrayGeometry, FrequencySet, ImagingGrid, Scatterer, Scene};
use music_imaging::structures::DataKind;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::var_os("MUSIC_EXAMPLE_OUT").map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("music-multifrequency"));
    // a/L = 0.05; cross-range resolution L/a = 20, range resolution 1/B = 20
    let array = ArrayGeometry::linear(21, 500.0)?;
    let grid = ImagingGrid::centered(0.0, 10_000.0, 100.0, 100.0, 51, 51)?;
    let place = |i: usize, j: usize, rho: C64| Scatterer::new(grid.point(grid.index(i, j)), rho);
    let scatterers = vec![place(10, 12, C64::new(1.0, 0.0))?, place(30, 35, C64::from_polar(1.2, 0.4))?, place(42, 20, C64::new(0.0, 0.9))?];
    let freqs = FrequencySet::equispaced_band(12, 0.05)?;
    let scene = Scene::new(array, scatterers, grid.clone(), freqs);

    for (kind, name) in [(DataKind::McStack, "coherent"), (DataKind::PdBlock, "block")] {
        let mut req = ImagingRequest::new(&scene, kind);
        if kind == DataKind::McStack {
            req.acquisition = Acquisition::Phaseless(Default::default());
        }
        let out_img = image(&req)?;
        let m = metrics(&scene, &out_img.peaks, 1.0)?;
        let files = write_pseudospectrum(&out, name, &out_img.image.values, grid.dims(), Scale::Log10)?;
        println!(
            "{name:>8}: rank {:3}, mean error {:.2} cells, max {:.2} -> {}",
            out_img.decomposition.rank,
            m.mean_error,
            m.max_error,
            files[0].display()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
