//! Brute-force stability tools on a hand-built market.
//!
//! ```text
//! cargo run --example stability_oracle
//! ```

use spectrum_match::{
    da_one_to_one, enumerate_stable_matchings, find_blocking_pairs, rank_of_match, MarketInstance, Matching, SpId, SuId,
};

fn main() {
    // three providers and three users with opposed tastes, so the stable
    // set contains several matchings
    let market = MarketInstance::from_indices(
        &[(1, vec![1, 2, 0]), (1, vec![2, 0, 1]), (1, vec![0, 1, 2])],
        &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]],
    )
    .unwrap();

    let stable = enumerate_stable_matchings(&market).unwrap();
    println!("{} stable matchings:", stable.len());
    for m in &stable {
        println!("  {}", m.display(&market));
    }

    let da = da_one_to_one(&market);
    let ranks: Vec<String> = market
        .user_ids()
        .map(|n| format!("{:?}", rank_of_match(n, &da, &market).unwrap()))
        .collect();
    println!(
        "\nuser-proposing result {} with user ranks {}",
        da.display(&market),
        ranks.join(", ")
    );

    let shuffled = Matching::from_pairs(3, 3, [(SuId(0), SpId(1)), (SuId(1), SpId(0)), (SuId(2), SpId(2))]).unwrap();
    println!("\n{} is blocked by:", shuffled.display(&market));
    for (n, m) in find_blocking_pairs(&market, &shuffled).unwrap() {
        println!("  {} and {}", market.user(n).name, market.provider(m).name);
    }
}
