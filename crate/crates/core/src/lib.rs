//! Stable two-sided matching for licensed spectrum sharing markets.
//!
//! Spectrum providers (SPs) offer slices of licensed spectrum at discrete
//! allocation instants; spectrum users (SUs) request them. Both sides rank the
//! other side, and the user-proposing deferred acceptance algorithm produces
//! a stable allocation, one-to-one or with per-provider quotas.
//!
//! On top of the matchers the crate provides scenario templates with
//! randomized user preferences, a Monte Carlo and an exhaustive experiment
//! driver that tally how often each user is served by its i-th choice, and a
//! preference-blind random baseline for comparison.
//!
//! ```
//! use spectrum_match::{da_one_to_one, MarketInstance, SpId, SuId};
//!
//! let market = MarketInstance::from_indices(
//!     &[(1, vec![0, 1]), (1, vec![1, 0])],
//!     &[vec![1, 0], vec![1, 0]],
//! )
//! .unwrap();
//! let matching = da_one_to_one(&market);
//! assert_eq!(matching.provider_of(SuId(1)), Some(SpId(1)));
//! assert_eq!(matching.provider_of(SuId(0)), Some(SpId(0)));
//! ```

pub mod cli;
pub mod deferred_acceptance;
pub mod market;
pub mod matching;
pub mod reproduce;
pub mod scenario;
pub mod simulation;
pub mod stability;

pub use deferred_acceptance::{
    da_one_to_one, gale_shapley_many_to_one, Capacity, DeferredAcceptance, Outcome, RoundLog, Schedule,
};
pub use market::{
    AgentId, MarketError, MarketInstance, PreferenceList, Side, SpId, SpectrumProvider, SpectrumUser, SuId,
};
pub use matching::Matching;
pub use scenario::{
    builtin_scenario, builtin_scenarios, uncoordinated_match, PreferencePolicy, RandomStream, ScenarioError,
    ScenarioTemplate, UserTemplate,
};
pub use simulation::{run_exhaustive, run_monte_carlo, AllocationStats, ExperimentMode, SimulationError, StatsReport};
pub use stability::{enumerate_stable_matchings, find_blocking_pairs, is_stable, rank_of_match, MatchRank};
