// Illumination design: gamma (smallest singular value of the restricted
// illumination matrix) for the optimal right singular vectors and for random
// sets, with the exact-recovery rate each achieves under noise.
//
// cargo run --example illumination_gamma

use music_imaging::experiment::pipeline::{first_response, image, ImagingRequest};
use music_imaging::forward::Illumination;
use music_imaging::robustness::{illumination_gamma, optimal_illuminations, random_illuminations};
use music_imaging::scene::{random_scatterers, ArrayGeometry, FrequencySet, ImagingGrid, RandomSceneSpec, Scene};
use music_imaging::structures::{single_freq_model, DataKind};

fn exact_rate(scene: &Scene, illums: &[Illumination], truth: &[usize], snr_db: f64, seeds: u64) -> Result<f64, Box<dyn std::error::Error>> {
    let mut exact = 0;
    for seed in 0..seeds {
        let mut req = ImagingRequest::new(scene, DataKind::SingleFreq);
        req.illuminations = Some(illums);
        req.snr_db = Some(snr_db);
        req.seed = seed;
        exact += (image(&req)?.support == truth) as usize;
    }
    Ok(exact as f64 / seeds as f64)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let array = ArrayGeometry::linear(41, 100.0)?;
    let grid = ImagingGrid::centered(0.0, 100.0, 5.0, 50.0, 25, 25)?;
    let spec = RandomSceneSpec {
        count: 2,
        min_separation_cells: 6,
        ..Default::default()
    };
    let scene = Scene::new(array, random_scatterers(&grid, &spec, 2)?, grid, FrequencySet::single_central());
    let mut truth = scene.scatterer_cells()?;
    truth.sort_unstable();
    let a = single_freq_model(&scene, 0)?;
    let n = scene.array.len();

    let mut sets = vec![("optimal".to_string(), optimal_illuminations(&first_response(&scene)?, 6)?)];
    sets.extend((0..4).map(|s| (format!("random-{s}"), random_illuminations(n, 6, s))));
    for (label, illums) in &sets {
        let gamma = illumination_gamma(&a, illums, &truth)?;
        let rate = exact_rate(&scene, illums, &truth, 5.0, 20)?;
        println!("{label:>9}: gamma {gamma:.3e}, exact at 5 dB in {:.0}% of 20 draws", 100.0 * rate);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
