//! Moving SU2 up provider C's list and watching SU2's first-choice share.
//!
//! ```text
//! cargo run --release --example provider_preference_sweep
//! ```

use spectrum_match::scenario::fig8_sweep_label;
use spectrum_match::{builtin_scenario, run_exhaustive, ExperimentMode, SuId};

fn main() {
    println!(
        "{:<9} {:<22} {:>7} {:>7} {:>7} {:>7}",
        "position", "P(C)", "S(1,1)", "S(2,1)", "S(3,1)", "S(4,1)"
    );
    for position in (1..=4).rev() {
        let template = builtin_scenario(&fig8_sweep_label(position)).unwrap();
        let c = &template.providers()[2];
        let list: Vec<&str> = c
            .prefs
            .as_slice()
            .iter()
            .map(|&n| template.users()[n.0].name.as_str())
            .collect();
        let stats = run_exhaustive(&template, ExperimentMode::ManyToOneGs).unwrap();
        let shares: Vec<String> = (0..4).map(|n| format!("{:>7.4}", stats.success(SuId(n), 1))).collect();
        println!("{position:<9} {:<22} {}", list.join(" > "), shares.join(" "));
    }
}
