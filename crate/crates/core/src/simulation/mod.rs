//! Experiment drivers producing per-user matching-success statistics.
//!
//! For every allocation instant the driver builds the market from the
//! template, solves it with the selected [`ExperimentMode`] and tallies where
//! each user ended up in its own preference list. `S(n, i)` is the share of
//! instants in which user `n` was served by its i-th choice; `U(n)` is the
//! share in which it got nothing. Every user requests spectrum at every
//! instant, so both are taken over all instants.
//!
//! Counts stay integral until presentation, so partial runs merge exactly and
//! a sharded run equals the serial one bit for bit.

mod report;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::deferred_acceptance::{da_one_to_one, gale_shapley_many_to_one, Capacity};
use crate::market::{MarketError, MarketInstance, SpId, SuId};
use crate::matching::Matching;
use crate::scenario::{uncoordinated_with, RandomStream, ScenarioTemplate};
use crate::stability::{rank_of_match, MatchRank};

pub use report::{ReportParseError, ReportRow, SeedInfo, StatsReport};

/// Instants per work unit in [`run_monte_carlo`].
pub const SHARD_SIZE: u64 = 4096;

/// Upper bound on preference profiles visited by [`run_exhaustive`].
pub const PROFILE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentMode {
    /// One-to-one deferred acceptance; quotas ignored.
    OneToOneDa,
    /// Deferred acceptance with provider quotas.
    ManyToOneGs,
    /// Preference-blind random allocation.
    Uncoordinated,
}

impl ExperimentMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentMode::OneToOneDa => "one-to-one",
            ExperimentMode::ManyToOneGs => "many-to-one",
            ExperimentMode::Uncoordinated => "uncoordinated",
        }
    }
}

impl fmt::Display for ExperimentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one-to-one" => Ok(ExperimentMode::OneToOneDa),
            "many-to-one" => Ok(ExperimentMode::ManyToOneGs),
            "uncoordinated" => Ok(ExperimentMode::Uncoordinated),
            other => Err(format!(
                "unknown mode `{other}` (expected one-to-one, many-to-one or uncoordinated)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error("a run needs at least one instant")]
    ZeroInstants,
    #[error("{profiles} preference profiles exceed the exhaustive limit of {limit}")]
    ProfileSpaceTooLarge { profiles: u128, limit: u128 },
    #[error("mode `{0}` cannot be run exhaustively")]
    UnsupportedMode(ExperimentMode),
    #[error("statistics shapes differ: {0}")]
    ShapeMismatch(String),
}

/// Solves one instant with the given mode. `stream` only matters for the
/// uncoordinated baseline.
pub fn solve(mode: ExperimentMode, instance: &MarketInstance, stream: &RandomStream) -> Matching {
    match mode {
        ExperimentMode::OneToOneDa => da_one_to_one(instance),
        ExperimentMode::ManyToOneGs => gale_shapley_many_to_one(instance),
        ExperimentMode::Uncoordinated => {
            uncoordinated_with(instance, uncoordinated_capacity(instance), &mut stream.matcher_rng())
        }
    }
}

fn uncoordinated_capacity(instance: &MarketInstance) -> Capacity {
    if instance.all_quotas_unit() {
        Capacity::Unit
    } else {
        Capacity::Declared
    }
}

/// Per-user tallies of match ranks over a number of instants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationStats {
    // counts[n][i]: instants in which user n was matched to its (i+1)-th choice
    counts: Vec<Vec<u64>>,
    unmatched: Vec<u64>,
    instants: u64,
}

impl AllocationStats {
    /// Empty tallies for `users` users ranking up to `max_rank` providers.
    pub fn zero(users: usize, max_rank: usize) -> Self {
        Self {
            counts: vec![vec![0; max_rank]; users],
            unmatched: vec![0; users],
            instants: 0,
        }
    }

    /// Rebuilds statistics from raw tallies, checking that every row sums to `instants`.
    pub fn from_counts(counts: Vec<Vec<u64>>, unmatched: Vec<u64>, instants: u64) -> Result<Self, SimulationError> {
        if counts.len() != unmatched.len() {
            return Err(SimulationError::ShapeMismatch(format!(
                "{} count rows but {} unmatched entries",
                counts.len(),
                unmatched.len()
            )));
        }
        let max_rank = counts.first().map_or(0, Vec::len);
        for (n, row) in counts.iter().enumerate() {
            if row.len() != max_rank {
                return Err(SimulationError::ShapeMismatch(format!(
                    "row {n} has {} ranks, expected {max_rank}",
                    row.len()
                )));
            }
            let total: u64 = row.iter().sum::<u64>() + unmatched[n];
            if total != instants {
                return Err(SimulationError::ShapeMismatch(format!(
                    "row {n} accounts for {total} of {instants} instants"
                )));
            }
        }
        Ok(Self {
            counts,
            unmatched,
            instants,
        })
    }

    pub fn num_users(&self) -> usize {
        self.counts.len()
    }

    pub fn max_rank(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    pub fn instants(&self) -> u64 {
        self.instants
    }

    /// Instants in which `user` got its `rank`-th choice (1-based).
    pub fn count(&self, user: SuId, rank: usize) -> u64 {
        self.counts[user.0][rank - 1]
    }

    pub fn counts(&self, user: SuId) -> &[u64] {
        &self.counts[user.0]
    }

    pub fn unmatched_count(&self, user: SuId) -> u64 {
        self.unmatched[user.0]
    }

    /// Matching success `S(user, rank)`.
    pub fn success(&self, user: SuId, rank: usize) -> f64 {
        ratio(self.count(user, rank), self.instants)
    }

    /// Unmatched share `U(user)`.
    pub fn unmatched_share(&self, user: SuId) -> f64 {
        ratio(self.unmatched_count(user), self.instants)
    }

    /// Adds one instant's outcome.
    pub fn record(&mut self, instance: &MarketInstance, matching: &Matching) -> Result<(), MarketError> {
        for n in instance.user_ids() {
            match rank_of_match(n, matching, instance)? {
                MatchRank::Ranked(i) => self.counts[n.0][i - 1] += 1,
                MatchRank::Unmatched => self.unmatched[n.0] += 1,
            }
        }
        self.instants += 1;
        Ok(())
    }

    /// Componentwise sum of two tallies over the same market shape.
    pub fn merge(&self, other: &Self) -> Result<Self, SimulationError> {
        if self.num_users() != other.num_users() || self.max_rank() != other.max_rank() {
            return Err(SimulationError::ShapeMismatch(format!(
                "{} users x {} ranks vs {} users x {} ranks",
                self.num_users(),
                self.max_rank(),
                other.num_users(),
                other.max_rank()
            )));
        }
        Ok(Self {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
            unmatched: self
                .unmatched
                .iter()
                .zip(&other.unmatched)
                .map(|(x, y)| x + y)
                .collect(),
            instants: self.instants + other.instants,
        })
    }
}

fn ratio(count: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Serial run over the instants in `range`; one shard of a Monte Carlo run.
pub fn run_instants(
    template: &ScenarioTemplate,
    mode: ExperimentMode,
    range: Range<u64>,
    master_seed: u64,
) -> Result<AllocationStats, SimulationError> {
    run_instants_inspect(template, mode, range, master_seed, |_, _, _| {})
}

/// Like [`run_instants`], handing every instant's market and matching to `inspect`.
pub fn run_instants_inspect<F>(
    template: &ScenarioTemplate,
    mode: ExperimentMode,
    range: Range<u64>,
    master_seed: u64,
    mut inspect: F,
) -> Result<AllocationStats, SimulationError>
where
    F: FnMut(u64, &MarketInstance, &Matching),
{
    let mut stats = AllocationStats::zero(template.num_users(), template.num_providers());
    for t in range {
        let stream = RandomStream::new(master_seed, t);
        let instance = template.instantiate(&stream);
        let matching = solve(mode, &instance, &stream);
        stats.record(&instance, &matching)?;
        inspect(t, &instance, &matching);
    }
    Ok(stats)
}

/// Number of shards [`run_monte_carlo`] splits `instants` into.
pub fn shard_count(instants: u64) -> u64 {
    instants.div_ceil(SHARD_SIZE)
}

/// Monte Carlo estimate over instants `0..instants`, sharded across threads.
pub fn run_monte_carlo(
    template: &ScenarioTemplate,
    mode: ExperimentMode,
    instants: u64,
    master_seed: u64,
) -> Result<AllocationStats, SimulationError> {
    if instants == 0 {
        return Err(SimulationError::ZeroInstants);
    }
    let zero = AllocationStats::zero(template.num_users(), template.num_providers());
    (0..shard_count(instants))
        .into_par_iter()
        .map(|s| {
            let start = s * SHARD_SIZE;
            let end = (start + SHARD_SIZE).min(instants);
            run_instants(template, mode, start..end, master_seed)
        })
        .try_reduce(|| zero.clone(), |a, b| a.merge(&b))
}

/// All strict orders over `0..m`, lexicographic.
fn permutations(m: usize) -> Vec<Vec<SpId>> {
    fn build(prefix: &mut Vec<SpId>, used: &mut [bool], out: &mut Vec<Vec<SpId>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(SpId(i));
                build(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    build(&mut Vec::with_capacity(m), &mut vec![false; m], &mut out);
    out
}

/// Number of equally weighted preference profiles of `template`.
pub fn profile_count(template: &ScenarioTemplate) -> u128 {
    let per_user: u128 = (1..=template.num_providers() as u128).fold(1u128, |acc, k| acc.saturating_mul(k));
    (0..template.random_users().count()).fold(1u128, |acc, _| acc.saturating_mul(per_user))
}

/// Exact statistics: every preference profile of the random users, equally weighted.
pub fn run_exhaustive(template: &ScenarioTemplate, mode: ExperimentMode) -> Result<AllocationStats, SimulationError> {
    if mode == ExperimentMode::Uncoordinated {
        return Err(SimulationError::UnsupportedMode(mode));
    }
    let profiles = profile_count(template);
    if profiles > PROFILE_LIMIT {
        return Err(SimulationError::ProfileSpaceTooLarge {
            profiles,
            limit: PROFILE_LIMIT,
        });
    }
    let perms = permutations(template.num_providers());
    let random_users = template.random_users().count();
    let total = profiles as u64;
    let zero = AllocationStats::zero(template.num_users(), template.num_providers());
    // the seed is irrelevant for deterministic modes
    let stream = RandomStream::new(0, 0);
    (0..shard_count(total))
        .into_par_iter()
        .map(|s| {
            let mut stats = zero.clone();
            let mut digits = vec![0usize; random_users];
            for index in s * SHARD_SIZE..((s + 1) * SHARD_SIZE).min(total) {
                // mixed-radix decode: user k takes permutation digits[k]
                let mut rest = index;
                for d in digits.iter_mut().rev() {
                    *d = (rest % perms.len() as u64) as usize;
                    rest /= perms.len() as u64;
                }
                let profile: Vec<&[SpId]> = digits.iter().map(|&d| perms[d].as_slice()).collect();
                let instance = template.with_profile(&profile);
                stats.record(&instance, &solve(mode, &instance, &stream))?;
            }
            Ok(stats)
        })
        .try_reduce(|| zero.clone(), |a, b| a.merge(&b))
}
