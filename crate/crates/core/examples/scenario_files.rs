//! Writing a scenario to JSON, loading it back, and exporting a report.
//!
//! ```text
//! cargo run --release --example scenario_files -- /tmp/rural.json
//! ```

use spectrum_match::scenario::ScenarioTemplate;
use spectrum_match::simulation::{shard_count, SeedInfo, StatsReport};
use spectrum_match::{run_monte_carlo, ExperimentMode};

const DOC: &str = r#"{
  "label": "rural-two-towers",
  "providers": [
    { "id": "North", "quota": 2, "prefs": ["Farm", "Clinic", "School"] },
    { "id": "South", "quota": 1, "prefs": ["School", "Clinic"] }
  ],
  "users": [
    { "id": "Farm", "policy": "uniform-random" },
    { "id": "Clinic", "policy": "fixed", "prefs": ["South", "North"] },
    { "id": "School", "policy": "uniform-random" }
  ]
}"#;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("rural-two-towers.json").display().to_string());
    ScenarioTemplate::from_json(DOC).unwrap().save(&path).unwrap();
    let template = ScenarioTemplate::load(&path).unwrap();
    println!("saved and reloaded {path}");

    let (instants, seed) = (20_000, 11);
    let mode = ExperimentMode::ManyToOneGs;
    let stats = run_monte_carlo(&template, mode, instants, seed).unwrap();
    let report = StatsReport::new(
        &template,
        mode,
        SeedInfo::MonteCarlo(seed),
        shard_count(instants),
        &stats,
    );
    print!("{}", report.to_csv());
}
