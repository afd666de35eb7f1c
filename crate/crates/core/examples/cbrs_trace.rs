//! Round-by-round deferred acceptance on the three-PAL / four-GAA market.
//!
//! ```text
//! cargo run --example cbrs_trace
//! ```

use spectrum_match::{builtin_scenario, DeferredAcceptance, RandomStream};

fn main() {
    let template = builtin_scenario("eq4-cbrs").unwrap();
    // every user has a fixed list, so any stream gives the same instance
    let market = template.instantiate(&RandomStream::new(0, 0));

    for p in market.providers() {
        let prefs: Vec<String> = p
            .prefs
            .as_slice()
            .iter()
            .map(|&n| market.user(n).name.clone())
            .collect();
        println!("P({}) = {}", p.name, prefs.join(" > "));
    }
    for u in market.users() {
        let prefs: Vec<String> = u
            .prefs
            .as_slice()
            .iter()
            .map(|&m| market.provider(m).name.clone())
            .collect();
        println!("P({}) = {}", u.name, prefs.join(" > "));
    }
    println!();

    let outcome = DeferredAcceptance::new(&market).traced(true).run();
    print!("{}", outcome.render_trace(&market));
    println!(
        "{} proposals, matching {}",
        outcome.proposals,
        outcome.matching.display(&market)
    );
}
