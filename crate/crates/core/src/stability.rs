//! Blocking pairs, ranks, and exhaustive enumeration of stable matchings.
//!
//! A pair `(n, m)` blocks a matching when `n` is not held by `m`, `n` prefers
//! `m` to its current provider (or is unmatched and ranks `m`), `m` ranks `n`,
//! and `m` either has a free slot or prefers `n` to one of the users it holds.
//! Quotas are read from the instance; check one-to-one outcomes against
//! [`MarketInstance::with_unit_quotas`].

use std::collections::BTreeSet;

use crate::market::{MarketError, MarketInstance, SpId, SuId};
use crate::matching::Matching;

/// Upper bound on candidate matchings [`enumerate_stable_matchings`] will visit.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Where a user's provider sits in its own preference list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatchRank {
    /// 1-based position in P(n).
    Ranked(usize),
    Unmatched,
}

impl MatchRank {
    /// Rank as a number, with `Unmatched` mapped to `list_len + 1`.
    pub fn ordinal(self, list_len: usize) -> usize {
        match self {
            MatchRank::Ranked(i) => i,
            MatchRank::Unmatched => list_len + 1,
        }
    }
}

pub fn rank_of_match(user: SuId, matching: &Matching, instance: &MarketInstance) -> Result<MatchRank, MarketError> {
    match matching.provider_of(user) {
        None => Ok(MatchRank::Unmatched),
        Some(m) => instance
            .user(user)
            .prefs
            .position(m)
            .map(|p| MatchRank::Ranked(p + 1))
            .ok_or(MarketError::MatchNotInPreferenceList { user, provider: m }),
    }
}

/// Every `(user, provider)` pair that blocks `matching`, in user-major order.
pub fn find_blocking_pairs(instance: &MarketInstance, matching: &Matching) -> Result<Vec<(SuId, SpId)>, MarketError> {
    matching.check_against(instance)?;
    let mut blocking = Vec::new();
    for n in instance.user_ids() {
        let prefs = instance.user(n).prefs.as_slice();
        let better = match matching.provider_of(n) {
            // a provider off the list can never be beaten from within it, so
            // everything ranked counts as an improvement
            Some(current) => prefs.iter().position(|&m| m == current).map_or(prefs, |p| &prefs[..p]),
            None => prefs,
        };
        for &m in better {
            if instance.provider_rank(m, n).is_none() {
                continue;
            }
            let held = matching.users_of(m);
            let wants = held.len() < instance.quota(m) || held.iter().any(|&h| instance.provider_prefers(m, n, h));
            if wants {
                blocking.push((n, m));
            }
        }
    }
    Ok(blocking)
}

pub fn is_stable(instance: &MarketInstance, matching: &Matching) -> Result<bool, MarketError> {
    Ok(find_blocking_pairs(instance, matching)?.is_empty())
}

/// Number of candidates visited by [`enumerate_stable_matchings`].
///
/// Each user is either unmatched or paired with a mutually acceptable
/// provider; pairs outside both lists cannot appear in a stable matching.
pub fn candidate_count(instance: &MarketInstance) -> u128 {
    instance
        .user_ids()
        .map(|n| {
            1 + instance
                .provider_ids()
                .filter(|&m| instance.is_mutually_acceptable(n, m))
                .count() as u128
        })
        .fold(1u128, |acc, c| acc.saturating_mul(c))
}

/// All stable matchings of a small instance, by brute force.
pub fn enumerate_stable_matchings(instance: &MarketInstance) -> Result<BTreeSet<Matching>, MarketError> {
    let candidates = candidate_count(instance);
    if candidates > ENUMERATION_LIMIT {
        return Err(MarketError::InstanceTooLarge {
            candidates,
            limit: ENUMERATION_LIMIT,
        });
    }
    let options: Vec<Vec<SpId>> = instance
        .user_ids()
        .map(|n| {
            instance
                .provider_ids()
                .filter(|&m| instance.is_mutually_acceptable(n, m))
                .collect()
        })
        .collect();
    let mut found = BTreeSet::new();
    let mut choice = vec![None; instance.num_users()];
    let mut load = vec![0usize; instance.num_providers()];
    extend(instance, &options, 0, &mut choice, &mut load, &mut found)?;
    Ok(found)
}

fn extend(
    instance: &MarketInstance,
    options: &[Vec<SpId>],
    user: usize,
    choice: &mut Vec<Option<SpId>>,
    load: &mut Vec<usize>,
    found: &mut BTreeSet<Matching>,
) -> Result<(), MarketError> {
    if user == options.len() {
        let matching = Matching::from_pairs(
            instance.num_providers(),
            instance.num_users(),
            choice.iter().enumerate().filter_map(|(n, m)| m.map(|m| (SuId(n), m))),
        )?;
        if is_stable(instance, &matching)? {
            found.insert(matching);
        }
        return Ok(());
    }
    choice[user] = None;
    extend(instance, options, user + 1, choice, load, found)?;
    for &m in &options[user] {
        if load[m.0] < instance.quota(m) {
            load[m.0] += 1;
            choice[user] = Some(m);
            extend(instance, options, user + 1, choice, load, found)?;
            load[m.0] -= 1;
        }
    }
    choice[user] = None;
    Ok(())
}
