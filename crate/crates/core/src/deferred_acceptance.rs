//! User-proposing deferred acceptance, one-to-one and with provider quotas.
//!
//! Every free user requests spectrum from the best provider that has not yet
//! rejected it. Each provider holds its most preferred acceptable requests, up
//! to its quota, and rejects the rest. Holding is conditional: a later, better
//! request displaces the provider's least preferred held user. The run ends
//! when no free user has a provider left to ask; providers are then matched
//! to the users they hold.
//!
//! The result is the user-optimal stable matching, so it does not depend on
//! the order in which proposals are processed. [`Schedule::Rounds`] follows
//! the simultaneous rounds of the textbook description and is the default;
//! [`Schedule::Sequential`] lets one user propose at a time.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::market::{MarketInstance, SpId, SuId};
use crate::matching::Matching;

/// How many users a provider may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Capacity {
    /// Every provider holds at most one user, whatever its declared quota.
    #[default]
    Unit,
    /// Provider `m` holds at most `q_m` users.
    Declared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// All free users propose simultaneously, then every provider decides.
    #[default]
    Rounds,
    /// One free user proposes at a time, first-in first-out.
    Sequential,
}

/// What happened in one proposal round.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoundLog {
    pub requests: Vec<(SuId, SpId)>,
    /// `(user, provider)` for every rejection issued this round, including
    /// displaced users that had been held before.
    pub rejections: Vec<(SuId, SpId)>,
    /// Holdings of every provider that received a request this round, most preferred first.
    pub holds: Vec<(SpId, Vec<SuId>)>,
    /// Users that ran out of providers to ask at the end of this round.
    pub exhausted: Vec<SuId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub matching: Matching,
    /// Total number of requests made; never exceeds `N * M`.
    pub proposals: usize,
    /// Per-round log, filled only when tracing is enabled.
    pub rounds: Vec<RoundLog>,
}

impl Outcome {
    /// Renders the round log followed by a final summary line such as
    /// `A holds SU1; B holds SU3; C holds SU2; SU4 exhausted list`.
    pub fn render_trace(&self, instance: &MarketInstance) -> String {
        let sp = |m: SpId| instance.provider(m).name.as_str();
        let su = |n: SuId| instance.user(n).name.as_str();
        let mut out = String::new();
        for (i, round) in self.rounds.iter().enumerate() {
            let _ = writeln!(out, "round {}", i + 1);
            for &(n, m) in &round.requests {
                let _ = writeln!(out, "  {} requests {}", su(n), sp(m));
            }
            for (m, held) in &round.holds {
                let held_names: Vec<_> = held.iter().map(|&n| su(n)).collect();
                let rejected: Vec<_> = round
                    .rejections
                    .iter()
                    .filter(|(_, r)| r == m)
                    .map(|&(n, _)| su(n))
                    .collect();
                let mut line = if held_names.is_empty() {
                    format!("  {} holds nothing", sp(*m))
                } else {
                    format!("  {} holds {}", sp(*m), held_names.join(", "))
                };
                if !rejected.is_empty() {
                    let _ = write!(line, "; rejects {}", rejected.join(", "));
                }
                let _ = writeln!(out, "{line}");
            }
            for &n in &round.exhausted {
                let _ = writeln!(out, "  {} exhausted list", su(n));
            }
        }
        let mut summary: Vec<String> = instance
            .provider_ids()
            .map(|m| {
                let held = self.matching.users_of(m);
                if held.is_empty() {
                    format!("{} holds nothing", sp(m))
                } else {
                    let names: Vec<_> = held.iter().map(|&n| su(n)).collect();
                    format!("{} holds {}", sp(m), names.join(", "))
                }
            })
            .collect();
        summary.extend(
            instance
                .user_ids()
                .filter(|&n| self.matching.provider_of(n).is_none())
                .map(|n| format!("{} exhausted list", su(n))),
        );
        let _ = writeln!(out, "{}", summary.join("; "));
        out
    }
}

/// Configurable deferred-acceptance run over a validated market.
#[derive(Debug, Clone, Copy)]
pub struct DeferredAcceptance<'a> {
    instance: &'a MarketInstance,
    capacity: Capacity,
    schedule: Schedule,
    trace: bool,
}

impl<'a> DeferredAcceptance<'a> {
    pub fn new(instance: &'a MarketInstance) -> Self {
        Self {
            instance,
            capacity: Capacity::default(),
            schedule: Schedule::default(),
            trace: false,
        }
    }

    pub fn capacity(mut self, capacity: Capacity) -> Self {
        self.capacity = capacity;
        self
    }

    pub fn schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn traced(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn run(&self) -> Outcome {
        let mut state = ProposalState::new(self.instance, self.capacity);
        let mut rounds = Vec::new();
        match self.schedule {
            Schedule::Rounds => {
                while let Some(log) = state.round() {
                    if self.trace {
                        rounds.push(log);
                    }
                }
            }
            Schedule::Sequential => {
                let mut free: VecDeque<SuId> = self.instance.user_ids().collect();
                while let Some(n) = free.pop_front() {
                    if let Some(log) = state.single(n, &mut free) {
                        if self.trace {
                            rounds.push(log);
                        }
                    }
                }
            }
        }
        Outcome {
            matching: state.to_matching(),
            proposals: state.proposals,
            rounds,
        }
    }
}

/// Algorithm-internal bookkeeping.
struct ProposalState<'a> {
    instance: &'a MarketInstance,
    capacity: Capacity,
    /// `next[n]`: position in P(n) of the next provider to ask. Every provider
    /// before it has either rejected n or currently holds it, so the set of
    /// rejecting providers only grows.
    next: Vec<usize>,
    /// Held users per provider, most preferred first.
    held: Vec<Vec<SuId>>,
    holder: Vec<Option<SpId>>,
    proposals: usize,
}

impl<'a> ProposalState<'a> {
    fn new(instance: &'a MarketInstance, capacity: Capacity) -> Self {
        Self {
            instance,
            capacity,
            next: vec![0; instance.num_users()],
            held: vec![Vec::new(); instance.num_providers()],
            holder: vec![None; instance.num_users()],
            proposals: 0,
        }
    }

    fn cap(&self, m: SpId) -> usize {
        match self.capacity {
            Capacity::Unit => 1,
            Capacity::Declared => self.instance.quota(m),
        }
    }

    fn next_target(&mut self, n: SuId) -> Option<SpId> {
        let target = self.instance.user(n).prefs.get(self.next[n.0])?;
        self.next[n.0] += 1;
        self.proposals += 1;
        Some(target)
    }

    fn is_exhausted(&self, n: SuId) -> bool {
        self.holder[n.0].is_none() && self.next[n.0] >= self.instance.user(n).prefs.len()
    }

    /// Offers `n` to `m`. Returns the users rejected as a consequence.
    fn offer(&mut self, n: SuId, m: SpId) -> Vec<SuId> {
        let Some(rank) = self.instance.provider_rank(m, n) else {
            return vec![n];
        };
        let instance = self.instance;
        let held = &mut self.held[m.0];
        let at = held.partition_point(|&h| instance.provider_rank(m, h) < Some(rank));
        held.insert(at, n);
        self.holder[n.0] = Some(m);
        let cap = self.cap(m);
        let mut rejected = Vec::new();
        while self.held[m.0].len() > cap {
            let worst = self.held[m.0].pop().expect("non-empty");
            self.holder[worst.0] = None;
            rejected.push(worst);
        }
        rejected
    }

    fn round(&mut self) -> Option<RoundLog> {
        let free: Vec<SuId> = self
            .instance
            .user_ids()
            .filter(|&n| self.holder[n.0].is_none())
            .collect();
        let requests: Vec<(SuId, SpId)> = free
            .into_iter()
            .filter_map(|n| self.next_target(n).map(|m| (n, m)))
            .collect();
        if requests.is_empty() {
            return None;
        }
        let mut log = RoundLog {
            requests: requests.clone(),
            ..RoundLog::default()
        };
        for &(n, m) in &requests {
            for r in self.offer(n, m) {
                log.rejections.push((r, m));
            }
        }
        let mut touched: Vec<SpId> = requests.iter().map(|&(_, m)| m).collect();
        touched.sort_unstable();
        touched.dedup();
        log.holds = touched.into_iter().map(|m| (m, self.held[m.0].clone())).collect();
        log.exhausted = log
            .rejections
            .iter()
            .map(|&(n, _)| n)
            .filter(|&n| self.is_exhausted(n))
            .collect();
        log.exhausted.sort_unstable();
        log.exhausted.dedup();
        Some(log)
    }

    fn single(&mut self, n: SuId, free: &mut VecDeque<SuId>) -> Option<RoundLog> {
        let m = self.next_target(n)?;
        let rejected = self.offer(n, m);
        let mut log = RoundLog {
            requests: vec![(n, m)],
            holds: vec![(m, self.held[m.0].clone())],
            ..RoundLog::default()
        };
        for r in rejected {
            log.rejections.push((r, m));
            if self.is_exhausted(r) {
                log.exhausted.push(r);
            } else {
                free.push_back(r);
            }
        }
        Some(log)
    }

    fn to_matching(&self) -> Matching {
        let mut matching = Matching::empty(self.instance.num_providers(), self.instance.num_users());
        for m in self.instance.provider_ids() {
            for &n in &self.held[m.0] {
                matching.assign(n, m);
            }
        }
        matching
    }
}

/// One-to-one deferred acceptance; declared quotas are ignored.
pub fn da_one_to_one(instance: &MarketInstance) -> Matching {
    DeferredAcceptance::new(instance)
        .capacity(Capacity::Unit)
        .run()
        .matching
}

/// Many-to-one deferred acceptance where provider `m` holds up to `q_m` users.
pub fn gale_shapley_many_to_one(instance: &MarketInstance) -> Matching {
    DeferredAcceptance::new(instance)
        .capacity(Capacity::Declared)
        .run()
        .matching
}

#[cfg(test)]
mod tests {
    use super::*;

    // P(A)=(n1,n2,n4,n3), P(B)=(n3,n4,n1,n2), P(C)=(n1,n3,n2,n4)
    // P(1)=(A,B,C), P(2)=(B,A,C), P(3)=(B,C,A), P(4)=(A,C,B)
    fn cbrs() -> MarketInstance {
        MarketInstance::from_indices(
            &[(1, vec![0, 1, 3, 2]), (1, vec![2, 3, 0, 1]), (1, vec![0, 2, 1, 3])],
            &[vec![0, 1, 2], vec![1, 0, 2], vec![1, 2, 0], vec![0, 2, 1]],
        )
        .unwrap()
    }

    #[test]
    fn cbrs_worked_example() {
        let inst = cbrs();
        let out = DeferredAcceptance::new(&inst).traced(true).run();
        let expected =
            Matching::from_pairs(3, 4, [(SuId(0), SpId(0)), (SuId(2), SpId(1)), (SuId(1), SpId(2))]).unwrap();
        assert_eq!(out.matching, expected);
        assert_eq!(out.matching.provider_of(SuId(3)), None);

        // round 1: SU1, SU4 -> A; SU2, SU3 -> B
        let r1 = &out.rounds[0];
        assert_eq!(
            r1.requests,
            vec![
                (SuId(0), SpId(0)),
                (SuId(1), SpId(1)),
                (SuId(2), SpId(1)),
                (SuId(3), SpId(0))
            ]
        );
        assert_eq!(r1.holds, vec![(SpId(0), vec![SuId(0)]), (SpId(1), vec![SuId(2)])]);
        // C releases SU4 for SU2 in round 3, B turns SU4 away in round 4
        assert_eq!(out.rounds[2].rejections, vec![(SuId(3), SpId(2))]);
        assert_eq!(out.rounds[3].exhausted, vec![SuId(3)]);
        assert_eq!(out.rounds.len(), 4);
        assert_eq!(out.proposals, 8);

        let trace = out.render_trace(&inst);
        assert!(trace
            .trim_end()
            .ends_with("A holds SU1; B holds SU3; C holds SU2; SU4 exhausted list"));
        assert!(trace.contains("  B holds SU3; rejects SU2\n"));
    }

    #[test]
    fn single_pair() {
        let inst = MarketInstance::from_indices(&[(1, vec![0])], &[vec![0]]).unwrap();
        let m = da_one_to_one(&inst);
        assert_eq!(m.provider_of(SuId(0)), Some(SpId(0)));
    }

    #[test]
    fn mutual_first_choices_give_identity() {
        let inst = MarketInstance::from_indices(
            &[(1, vec![0, 1, 2]), (1, vec![1, 2, 0]), (1, vec![2, 0, 1])],
            &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]],
        )
        .unwrap();
        let m = da_one_to_one(&inst);
        for i in 0..3 {
            assert_eq!(m.provider_of(SuId(i)), Some(SpId(i)));
        }
    }

    #[test]
    fn provider_rejects_unranked_user() {
        // A only ranks SU2; SU1 asks A first and must fall through to B
        let inst = MarketInstance::from_indices(&[(2, vec![1]), (1, vec![0])], &[vec![0, 1], vec![0]]).unwrap();
        let m = gale_shapley_many_to_one(&inst);
        assert_eq!(m.provider_of(SuId(0)), Some(SpId(1)));
        assert_eq!(m.provider_of(SuId(1)), Some(SpId(0)));
    }

    #[test]
    fn user_never_asks_unlisted_provider() {
        let inst = MarketInstance::from_indices(&[(1, vec![0])], &[vec![]]).unwrap();
        let out = DeferredAcceptance::new(&inst).run();
        assert_eq!(out.proposals, 0);
        assert_eq!(out.matching.num_matched(), 0);
    }

    #[test]
    fn single_provider_with_room_for_everyone() {
        let inst = MarketInstance::from_indices(&[(3, vec![2, 0, 1])], &[vec![0], vec![0], vec![0]]).unwrap();
        let m = gale_shapley_many_to_one(&inst);
        assert_eq!(m.users_of(SpId(0)), &[SuId(0), SuId(1), SuId(2)]);
    }

    #[test]
    fn quota_two_fixed_profile_places_every_user() {
        // table3 providers, all quotas 2, users as in the CBRS example
        let inst = MarketInstance::from_indices(
            &[(2, vec![0, 1, 2, 3]), (2, vec![1, 2, 3, 0]), (2, vec![2, 3, 0, 1])],
            &[vec![0, 1, 2], vec![1, 0, 2], vec![1, 2, 0], vec![0, 2, 1]],
        )
        .unwrap();
        let m = gale_shapley_many_to_one(&inst);
        // round 1: A holds SU1, SU4; B holds SU2, SU3; nobody rejected
        let expected = Matching::from_pairs(
            3,
            4,
            [
                (SuId(0), SpId(0)),
                (SuId(1), SpId(1)),
                (SuId(2), SpId(1)),
                (SuId(3), SpId(0)),
            ],
        )
        .unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn sequential_schedule_matches_rounds_on_cbrs() {
        let inst = cbrs();
        let seq = DeferredAcceptance::new(&inst)
            .schedule(Schedule::Sequential)
            .traced(true)
            .run();
        assert_eq!(seq.matching, da_one_to_one(&inst));
        assert!(seq.rounds.iter().all(|r| r.requests.len() == 1));
    }
}
