// Intensity-only acquisition: interferometric matrices P^*P per frequency
// and the cross-frequency stack from recorded intensities, including a CSV
// round trip of the records.
//
// cargo run --example phaseless_recovery

use music_imaging::forward::response_tensor;
use music_imaging::linalg::{relative_error, C64};
use music_imaging::phaseless::{
    measure_intensities, read_intensities_csv, recover_interferometric, recover_mc, write_intensities_csv,
    AcquisitionPlan, IntensityTable,
};
use music_imaging::scene::{ArrayGeometry, FrequencySet, ImagingGrid, Scatterer, Scene};
use music_imaging::structures::build_mc;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let array = ArrayGeometry::linear(11, 100.0)?;
    let grid = ImagingGrid::centered(0.0, 200.0, 40.0, 40.0, 21, 21)?;
    let scatterers = vec![
        Scatterer::new([3.0, 0.0, 195.0], C64::new(1.0, 0.5))?,
        Scatterer::new([-9.0, 0.0, 210.0], C64::new(-0.8, 0.0))?,
    ];
    let freqs = FrequencySet::equispaced_band(4, 0.1)?;
    let scene = Scene::new(array, scatterers, grid, freqs);
    let tensor = response_tensor(&scene)?;
    let n = tensor.transducers();

    let plan = AcquisitionPlan::interferometric(0, n, 0);
    let records = measure_intensities(&tensor, &plan)?;
    let mut csv = Vec::new();
    write_intensities_csv(&mut csv, &records)?;
    let reread = read_intensities_csv(csv.as_slice())?;
    println!("{} probes, {} intensity records, {} bytes of CSV", plan.len(), records.len(), csv.len());

    let m = recover_interferometric(&IntensityTable::from_records(&reread), 0, n, 0)?;
    let p = tensor.slice(0);
    let err = relative_error(&m, &(p.adjoint() * p));
    println!("P^*P from intensities: relative error {err:.1e}");
    assert!(err < 1e-10);

    let s = tensor.frequencies();
    let plan = AcquisitionPlan::multifrequency(s, n, 0);
    let table = IntensityTable::from_records(&measure_intensities(&tensor, &plan)?);
    let mc = recover_mc(&table, s, n, 0)?;
    let err = relative_error(&mc, &build_mc(&tensor).entries);
    println!("cross-frequency stack ({}x{}) from {} probes: relative error {err:.1e}", mc.nrows(), mc.ncols(), plan.len());
    assert!(err < 1e-10);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
