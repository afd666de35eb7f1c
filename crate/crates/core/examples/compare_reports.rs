//! Side-by-side comparison of two experiments over the same users.
//!
//! ```text
//! cargo run --release --example compare_reports
//! ```

use spectrum_match::cli::Comparison;
use spectrum_match::simulation::{SeedInfo, StatsReport};
use spectrum_match::{builtin_scenario, run_exhaustive, ExperimentMode};

fn exact(label: &str, mode: ExperimentMode) -> StatsReport {
    let template = builtin_scenario(label).unwrap();
    let stats = run_exhaustive(&template, mode).unwrap();
    StatsReport::new(&template, mode, SeedInfo::Exhaustive, 1, &stats)
}

fn main() {
    // same providers, but the PAL holders rank users differently
    let cmp = Comparison::new(
        exact("table3-1to1", ExperimentMode::OneToOneDa),
        exact("eq4-cbrs-random", ExperimentMode::OneToOneDa),
    )
    .unwrap();
    println!("a = {}, b = {}", cmp.a.scenario, cmp.b.scenario);
    print!("{}", cmp.to_csv());
}
