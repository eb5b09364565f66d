// Noise robustness: projector distance between noisy and clean signal
// subspaces against the bound built from gamma, coherence and the smallest
// reflectivity, on random toy dictionaries.
//
// cargo run --example theorem_bound

use music_imaging::robustness::{check_theorem_bound, write_bound_reports_csv, TheoremSetup};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut reports = Vec::new();
    for seed in 0..40 {
        let setup = TheoremSetup::random_toy(16, 40, 3, 8, 0.2, seed)?;
        let (gamma, eps, mu) = (setup.gamma()?, setup.epsilon(), setup.mu());
        if eps >= 1.0 / 3.0 {
            continue;
        }
        let threshold = mu * gamma * (1.0 - 2.0 * eps) / 2.0;
        for fraction in [0.1, 0.5, 0.9] {
            reports.extend(check_theorem_bound(&setup, fraction * threshold, &[seed])?);
        }
        if reports.len() >= 15 {
            break;
        }
    }
    let stdout = std::io::stdout();
    write_bound_reports_csv(stdout.lock(), &reports)?;
    let holding = reports.iter().filter(|r| r.holds()).count();
    println!("{holding}/{} trials within the bound", reports.len());
    assert_eq!(holding, reports.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
