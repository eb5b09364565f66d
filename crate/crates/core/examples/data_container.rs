// Binary containers for data matrices and model families, and the CSV/PGM
// image export.
//
// cargo run --example data_container

use music_imaging::container::{read_data_matrix, read_family, write_data_matrix, write_family};
use music_imaging::experiment::pipeline::{image, ImagingRequest};
use music_imaging::export::{encode_pgm, write_values_csv, Scale};
use music_imaging::linalg::C64;
use music_imaging::scene::{ArrayGeometry, FrequencySet, ImagingGrid, Scatterer, Scene};
use music_imaging::structures::DataKind;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let grid = ImagingGrid::centered(0.0, 60.0, 10.0, 10.0, 11, 11)?;
    let scatterer = Scatterer::new(grid.point(grid.index(4, 7)), C64::new(1.0, -0.5))?;
    let scene = Scene::new(ArrayGeometry::linear(15, 30.0)?, vec![scatterer], grid.clone(), FrequencySet::single_central());
    let out = image(&ImagingRequest::new(&scene, DataKind::SingleFreq))?;

    let mut bytes = Vec::new();
    write_data_matrix(&mut bytes, &out.data)?;
    let data = read_data_matrix(bytes.as_slice())?;
    println!("data matrix {:?}: {} bytes, round trip exact: {}", data.kind, bytes.len(), data.entries == out.data.entries);
    assert_eq!(data.entries, out.data.entries);

    let mut bytes = Vec::new();
    write_family(&mut bytes, &out.family)?;
    let family = read_family(bytes.as_slice())?;
    println!("model family: {} bytes, {} columns", bytes.len(), family.grid_size());
    assert_eq!(family.a, out.family.a);

    let pgm = encode_pgm(&out.image.values, grid.dims(), Scale::Log10)?;
    let mut csv = Vec::new();
    write_values_csv(&mut csv, &out.image.values)?;
    println!("image: {} byte PGM, {} byte CSV, peak at {:?}", pgm.bytes.len(), csv.len(), grid.cell(out.support[0]));
    assert_eq!(grid.cell(out.support[0]), (4, 7));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
