//! Stable matching versus handing out slices blind to preferences.
//!
//! ```text
//! cargo run --release --example uncoordinated_baseline
//! ```

use spectrum_match::{builtin_scenario, run_exhaustive, run_monte_carlo, ExperimentMode, SuId};

fn main() {
    let instants = 100_000;
    let cyclic = builtin_scenario("table2-1to1").unwrap();
    let variant = builtin_scenario("table2-spB-variant").unwrap();

    let da = run_exhaustive(&cyclic, ExperimentMode::OneToOneDa).unwrap();
    let da_variant = run_exhaustive(&variant, ExperimentMode::OneToOneDa).unwrap();
    let blind = run_monte_carlo(&cyclic, ExperimentMode::Uncoordinated, instants, 7).unwrap();

    println!("first-choice share per user");
    println!(
        "{:<5} {:>12} {:>14} {:>14}",
        "user", "stable", "B favours SU1", "uncoordinated"
    );
    for (n, user) in cyclic.users().iter().enumerate() {
        let n = SuId(n);
        println!(
            "{:<5} {:>12.4} {:>14.4} {:>14.4}",
            user.name,
            da.success(n, 1),
            da_variant.success(n, 1),
            blind.success(n, 1)
        );
    }
}
