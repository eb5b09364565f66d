//! Bundled presets still land inside their recorded metric ranges.

use music_imaging::experiment::presets;
use music_imaging::experiment::run::run;

#[test]
fn presets_meet_expected_ranges() {
    let dir = tempfile::tempdir().unwrap();
    for name in presets::names() {
        let cfg = presets::load(name).unwrap().unwrap();
        let manifest = run(&cfg, &dir.path().join(name)).unwrap();
        let check = manifest.expected.unwrap_or_else(|| panic!("{name} has no expected ranges"));
        assert!(check.met, "{name}: {:?}", manifest.summary);
    }
}
