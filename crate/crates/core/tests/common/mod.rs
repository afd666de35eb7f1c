#![allow(dead_code)]

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use spectrum_match::{rank_of_match, MarketInstance, Matching, SuId};

/// A ranking over `0..len`: complete, or any prefix of a shuffle when `partial`.
pub fn ranking(len: usize, partial: bool) -> impl Strategy<Value = Vec<usize>> {
    let min = if partial { 0 } else { len };
    (Just((0..len).collect::<Vec<_>>()).prop_shuffle(), min..=len).prop_map(|(mut v, k)| {
        v.truncate(k);
        v
    })
}

pub fn market(max_side: usize, max_quota: usize, partial: bool) -> impl Strategy<Value = MarketInstance> {
    (1..=max_side, 1..=max_side)
        .prop_flat_map(move |(m, n)| {
            (
                prop::collection::vec((1..=max_quota, ranking(n, partial)), m),
                prop::collection::vec(ranking(m, partial), n),
            )
        })
        .prop_map(|(sp, su)| MarketInstance::from_indices(&sp, &su).unwrap())
}

/// Same shape as [`market`] but drawn from a plain RNG, for fixed-size loops.
pub fn random_market<R: Rng>(
    rng: &mut R,
    sides: std::ops::RangeInclusive<usize>,
    max_quota: usize,
    partial: bool,
) -> MarketInstance {
    let m = rng.gen_range(sides.clone());
    let n = rng.gen_range(sides);
    let list = |len: usize, rng: &mut R| {
        let mut v: Vec<usize> = (0..len).collect();
        v.shuffle(rng);
        if partial {
            v.truncate(rng.gen_range(0..=len));
        }
        v
    };
    let sp: Vec<(usize, Vec<usize>)> = (0..m)
        .map(|_| {
            let q = rng.gen_range(1..=max_quota);
            (q, list(n, rng))
        })
        .collect();
    let su: Vec<Vec<usize>> = (0..n).map(|_| list(m, rng)).collect();
    MarketInstance::from_indices(&sp, &su).unwrap()
}

/// Rank of every user, unmatched counted as one past the end of its list.
pub fn ordinals(instance: &MarketInstance, matching: &Matching) -> Vec<usize> {
    instance
        .user_ids()
        .map(|n: SuId| {
            rank_of_match(n, matching, instance)
                .unwrap()
                .ordinal(instance.user(n).prefs.len())
        })
        .collect()
}

/// True if no user does strictly better in any of `others` than in `candidate`.
pub fn is_user_optimal<'a>(
    instance: &MarketInstance,
    candidate: &Matching,
    others: impl IntoIterator<Item = &'a Matching>,
) -> bool {
    let mine = ordinals(instance, candidate);
    others.into_iter().all(|other| {
        ordinals(instance, other)
            .iter()
            .zip(&mine)
            .all(|(theirs, mine)| mine <= theirs)
    })
}
