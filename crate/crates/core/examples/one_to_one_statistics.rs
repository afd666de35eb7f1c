//! Matching success of one-to-one deferred acceptance when users rank the
//! three providers uniformly at random at each instant.
//!
//! The exact distribution comes from enumerating all 6^3 preference profiles;
//! the Monte Carlo estimate should agree to within a fraction of a percent.
//!
//! ```text
//! cargo run --release --example one_to_one_statistics -- 100000 42
//! ```

use spectrum_match::{builtin_scenario, run_exhaustive, run_monte_carlo, ExperimentMode, SuId};

fn main() {
    let mut args = std::env::args().skip(1);
    let instants: u64 = args.next().map_or(100_000, |s| s.parse().expect("instants"));
    let seed: u64 = args.next().map_or(42, |s| s.parse().expect("seed"));

    let template = builtin_scenario("table2-1to1").unwrap();
    let exact = run_exhaustive(&template, ExperimentMode::OneToOneDa).unwrap();
    let estimate = run_monte_carlo(&template, ExperimentMode::OneToOneDa, instants, seed).unwrap();

    println!("{:<5} {:>6} {:>10} {:>10}", "user", "rank", "exact", "estimate");
    for (n, user) in template.users().iter().enumerate() {
        for rank in 1..=template.num_providers() {
            println!(
                "{:<5} {:>6} {:>10.4} {:>10.4}",
                user.name,
                rank,
                exact.success(SuId(n), rank),
                estimate.success(SuId(n), rank)
            );
        }
    }
    println!(
        "\n{} profiles enumerated, {instants} instants sampled with seed {seed}",
        exact.instants()
    );
}
