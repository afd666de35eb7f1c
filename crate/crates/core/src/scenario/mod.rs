//! Scenario templates and per-instant randomization.
//!
//! A template fixes the provider side (preferences and quotas) and gives each
//! user a [`PreferencePolicy`]. Every allocation instant draws fresh lists for
//! the randomized users from its own substream, so an instant's market depends
//! only on `(template, master_seed, instant)`.

mod builtin;
mod file;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::deferred_acceptance::Capacity;
use crate::market::{MarketError, MarketInstance, PreferenceList, SpId, SpectrumProvider, SpectrumUser, SuId};
use crate::matching::Matching;

pub use builtin::{builtin_scenario, builtin_scenarios, fig8_sweep_label, BUILTIN_LABELS};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown scenario label `{0}`")]
    UnknownLabel(String),
    #[error("invalid scenario: {0}")]
    Market(#[from] MarketError),
    #[error("malformed scenario document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("agent id `{0}` is declared twice")]
    DuplicateId(String),
    #[error("`{owner}` ranks unknown agent `{unknown}`")]
    UnknownName { owner: String, unknown: String },
    #[error("user `{0}` has a fixed policy but no preference list")]
    MissingPrefs(String),
    #[error("user `{0}` has a uniform-random policy and must not carry a preference list")]
    UnexpectedPrefs(String),
}

/// How a user's preference list is produced at each instant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreferencePolicy {
    Fixed(PreferenceList<SpId>),
    /// A uniformly random strict order over all providers, redrawn every instant.
    UniformRandom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserTemplate {
    pub name: String,
    pub policy: PreferencePolicy,
}

impl UserTemplate {
    pub fn fixed(name: impl Into<String>, prefs: PreferenceList<SpId>) -> Self {
        Self {
            name: name.into(),
            policy: PreferencePolicy::Fixed(prefs),
        }
    }

    pub fn random(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            policy: PreferencePolicy::UniformRandom,
        }
    }
}

/// A market skeleton: fixed providers plus a preference policy per user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioTemplate {
    label: String,
    providers: Vec<SpectrumProvider>,
    users: Vec<UserTemplate>,
}

impl ScenarioTemplate {
    pub fn new(
        label: impl Into<String>,
        providers: Vec<SpectrumProvider>,
        users: Vec<UserTemplate>,
    ) -> Result<Self, ScenarioError> {
        let template = Self {
            label: label.into(),
            providers,
            users,
        };
        // random users get a complete list, which is always valid, so checking
        // one profile checks them all
        MarketInstance::new(template.providers.clone(), template.skeleton_users())?;
        Ok(template)
    }

    fn skeleton_users(&self) -> Vec<SpectrumUser> {
        let all: PreferenceList<SpId> = (0..self.providers.len()).map(SpId).collect();
        self.users
            .iter()
            .map(|u| match &u.policy {
                PreferencePolicy::Fixed(prefs) => SpectrumUser::new(u.name.clone(), prefs.clone()),
                PreferencePolicy::UniformRandom => SpectrumUser::new(u.name.clone(), all.clone()),
            })
            .collect()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn providers(&self) -> &[SpectrumProvider] {
        &self.providers
    }

    pub fn users(&self) -> &[UserTemplate] {
        &self.users
    }

    pub fn num_providers(&self) -> usize {
        self.providers.len()
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    /// Users whose lists are redrawn every instant.
    pub fn random_users(&self) -> impl Iterator<Item = SuId> + '_ {
        self.users
            .iter()
            .enumerate()
            .filter(|(_, u)| u.policy == PreferencePolicy::UniformRandom)
            .map(|(n, _)| SuId(n))
    }

    /// True when no user preference is randomized.
    pub fn is_deterministic(&self) -> bool {
        self.random_users().next().is_none()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The market of one allocation instant.
    pub fn instantiate(&self, stream: &RandomStream) -> MarketInstance {
        self.instantiate_with(&mut stream.preference_rng())
    }

    pub(crate) fn instantiate_with<R: Rng + ?Sized>(&self, rng: &mut R) -> MarketInstance {
        let mut order: Vec<SpId> = (0..self.providers.len()).map(SpId).collect();
        let users = self
            .users
            .iter()
            .map(|u| match &u.policy {
                PreferencePolicy::Fixed(prefs) => SpectrumUser::new(u.name.clone(), prefs.clone()),
                PreferencePolicy::UniformRandom => {
                    order.shuffle(rng);
                    SpectrumUser::new(u.name.clone(), PreferenceList::new(order.clone()))
                }
            })
            .collect();
        MarketInstance::from_parts_unchecked(self.providers.clone(), users)
    }

    /// The market obtained by giving the random users the lists in `profile`,
    /// in the order of [`ScenarioTemplate::random_users`]. Every list must be a
    /// permutation of all providers.
    pub(crate) fn with_profile(&self, profile: &[&[SpId]]) -> MarketInstance {
        let mut lists = profile.iter();
        let users = self
            .users
            .iter()
            .map(|u| match &u.policy {
                PreferencePolicy::Fixed(prefs) => SpectrumUser::new(u.name.clone(), prefs.clone()),
                PreferencePolicy::UniformRandom => {
                    let list = lists.next().expect("one list per random user");
                    debug_assert_eq!(list.len(), self.providers.len());
                    SpectrumUser::new(u.name.clone(), PreferenceList::new(list.to_vec()))
                }
            })
            .collect();
        MarketInstance::from_parts_unchecked(self.providers.clone(), users)
    }
}

/// Seed material for one allocation instant.
///
/// Instant `t` reads ChaCha stream `t` under a key derived from the master
/// seed, so distinct instants never share random numbers and the result of a
/// run does not depend on how instants are split across threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub master_seed: u64,
    pub instant: u64,
}

// separates the matcher key from the preference key
const MATCHER_KEY_TWEAK: u64 = 0x6a09_e667_f3bc_c909;

impl RandomStream {
    pub fn new(master_seed: u64, instant: u64) -> Self {
        Self { master_seed, instant }
    }

    /// Generator for the randomized user preference lists.
    pub fn preference_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.instant);
        rng
    }

    /// Generator for randomized matchers, independent of [`Self::preference_rng`].
    pub fn matcher_rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed ^ MATCHER_KEY_TWEAK);
        rng.set_stream(self.instant);
        rng
    }
}

/// Preference-blind random allocation.
///
/// With [`Capacity::Unit`] a uniformly random injective assignment of
/// `min(N, M)` users to providers is drawn. With [`Capacity::Declared`] users
/// arrive in random order and each takes a uniformly random provider that
/// still has a free slot, until users or slots run out.
pub fn uncoordinated_match(instance: &MarketInstance, capacity: Capacity, stream: &RandomStream) -> Matching {
    uncoordinated_with(instance, capacity, &mut stream.matcher_rng())
}

pub(crate) fn uncoordinated_with<R: Rng + ?Sized>(
    instance: &MarketInstance,
    capacity: Capacity,
    rng: &mut R,
) -> Matching {
    let mut users: Vec<SuId> = instance.user_ids().collect();
    users.shuffle(rng);
    let mut matching = Matching::empty(instance.num_providers(), instance.num_users());
    match capacity {
        Capacity::Unit => {
            let mut providers: Vec<SpId> = instance.provider_ids().collect();
            providers.shuffle(rng);
            for (n, m) in users.into_iter().zip(providers) {
                matching.assign(n, m);
            }
        }
        Capacity::Declared => {
            let mut slots: Vec<(SpId, usize)> = instance.provider_ids().map(|m| (m, instance.quota(m))).collect();
            for n in users {
                if slots.is_empty() {
                    break;
                }
                let pick = rng.gen_range(0..slots.len());
                let (m, left) = &mut slots[pick];
                matching.assign(n, *m);
                *left -= 1;
                if *left == 0 {
                    slots.swap_remove(pick);
                }
            }
        }
    }
    matching
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::{rank_of_match, MatchRank};

    #[test]
    fn fixed_template_instantiates_verbatim() {
        let t = builtin_scenario("eq4-cbrs").unwrap();
        assert!(t.is_deterministic());
        let a = t.instantiate(&RandomStream::new(1, 0));
        let b = t.instantiate(&RandomStream::new(99, 12345));
        assert_eq!(a, b);
        assert_eq!(a.providers(), t.providers());
    }

    #[test]
    fn same_seed_and_instant_give_same_market() {
        let t = builtin_scenario("table2-1to1").unwrap();
        let s = RandomStream::new(42, 0);
        assert_eq!(t.instantiate(&s), t.instantiate(&s));
        let different = (1..20).any(|i| t.instantiate(&RandomStream::new(42, i)) != t.instantiate(&s));
        assert!(different);
    }

    #[test]
    fn random_lists_are_complete_permutations() {
        let t = builtin_scenario("table3-1to1").unwrap();
        for i in 0..50 {
            let inst = t.instantiate(&RandomStream::new(3, i));
            for u in inst.users() {
                let mut ids: Vec<usize> = u.prefs.as_slice().iter().map(|m| m.0).collect();
                ids.sort_unstable();
                assert_eq!(ids, vec![0, 1, 2]);
            }
        }
    }

    #[test]
    fn permutation_frequencies_are_uniform() {
        let t = builtin_scenario("table2-1to1").unwrap();
        let draws = 60_000u64;
        let mut freq = std::collections::HashMap::new();
        for i in 0..draws {
            let inst = t.instantiate(&RandomStream::new(2024, i));
            *freq.entry(inst.users()[0].prefs.clone()).or_insert(0u64) += 1;
        }
        assert_eq!(freq.len(), 6);
        for count in freq.values() {
            let f = *count as f64 / draws as f64;
            assert!((f - 1.0 / 6.0).abs() <= 0.01, "frequency {f}");
        }
    }

    #[test]
    fn uncoordinated_single_pair() {
        let inst = MarketInstance::from_indices(&[(1, vec![0])], &[vec![0]]).unwrap();
        for i in 0..10 {
            let m = uncoordinated_match(&inst, Capacity::Unit, &RandomStream::new(5, i));
            assert_eq!(m.provider_of(SuId(0)), Some(SpId(0)));
        }
    }

    #[test]
    fn uncoordinated_square_market_is_a_bijection() {
        let t = builtin_scenario("table2-1to1").unwrap();
        let draws = 100_000u64;
        let mut first_choice = 0u64;
        for i in 0..draws {
            let s = RandomStream::new(7, i);
            let inst = t.instantiate(&s);
            let m = uncoordinated_match(&inst, Capacity::Unit, &s);
            for sp in inst.provider_ids() {
                assert_eq!(m.users_of(sp).len(), 1);
            }
            if rank_of_match(SuId(0), &m, &inst).unwrap() == MatchRank::Ranked(1) {
                first_choice += 1;
            }
        }
        let f = first_choice as f64 / draws as f64;
        assert!((f - 1.0 / 3.0).abs() <= 0.01, "first-choice share {f}");
    }

    #[test]
    fn uncoordinated_with_quotas_fills_slots() {
        let t = builtin_scenario("table3-quotaA2").unwrap();
        for i in 0..200 {
            let s = RandomStream::new(11, i);
            let inst = t.instantiate(&s);
            let m = uncoordinated_match(&inst, Capacity::Declared, &s);
            // 4 slots for 4 users
            assert_eq!(m.num_matched(), 4);
            assert!(m.check_against(&inst).is_ok());
        }
    }

    #[test]
    fn streams_differ_between_purposes() {
        let s = RandomStream::new(1, 1);
        let a: u64 = s.preference_rng().gen();
        let b: u64 = s.matcher_rng().gen();
        assert_ne!(a, b);
    }
}
