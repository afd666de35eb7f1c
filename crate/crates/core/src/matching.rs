use std::fmt;

use crate::market::{MarketError, MarketInstance, SpId, SuId};

/// An assignment of users to providers, kept consistent in both directions.
///
/// Each user holds at most one provider; the user set of every provider is
/// stored sorted by user index so that equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching {
    su_to_sp: Vec<Option<SpId>>,
    sp_to_sus: Vec<Vec<SuId>>,
}

impl Matching {
    pub fn empty(providers: usize, users: usize) -> Self {
        Self {
            su_to_sp: vec![None; users],
            sp_to_sus: vec![Vec::new(); providers],
        }
    }

    /// Builds a matching from `(user, provider)` pairs. A user listed twice is an error.
    pub fn from_pairs(
        providers: usize,
        users: usize,
        pairs: impl IntoIterator<Item = (SuId, SpId)>,
    ) -> Result<Self, MarketError> {
        let mut out = Self::empty(providers, users);
        for (n, m) in pairs {
            if n.0 >= users || m.0 >= providers {
                return Err(MarketError::InconsistentMatching(format!(
                    "pair ({n}, {m}) is outside a {providers}x{users} market"
                )));
            }
            if let Some(prev) = out.su_to_sp[n.0] {
                return Err(MarketError::InconsistentMatching(format!(
                    "{n} is matched to both {prev} and {m}"
                )));
            }
            out.assign(n, m);
        }
        Ok(out)
    }

    /// Builds a matching from both directions, checking that they agree.
    pub fn from_maps(su_to_sp: Vec<Option<SpId>>, mut sp_to_sus: Vec<Vec<SuId>>) -> Result<Self, MarketError> {
        for sus in &mut sp_to_sus {
            sus.sort_unstable();
        }
        let rebuilt = Self::from_pairs(
            sp_to_sus.len(),
            su_to_sp.len(),
            su_to_sp.iter().enumerate().filter_map(|(n, m)| m.map(|m| (SuId(n), m))),
        )?;
        if rebuilt.sp_to_sus != sp_to_sus {
            return Err(MarketError::InconsistentMatching(
                "user-to-provider and provider-to-user maps disagree".into(),
            ));
        }
        Ok(rebuilt)
    }

    pub(crate) fn assign(&mut self, user: SuId, provider: SpId) {
        debug_assert!(self.su_to_sp[user.0].is_none());
        self.su_to_sp[user.0] = Some(provider);
        let sus = &mut self.sp_to_sus[provider.0];
        let at = sus.partition_point(|&n| n < user);
        sus.insert(at, user);
    }

    pub fn provider_of(&self, user: SuId) -> Option<SpId> {
        self.su_to_sp[user.0]
    }

    pub fn users_of(&self, provider: SpId) -> &[SuId] {
        &self.sp_to_sus[provider.0]
    }

    pub fn num_providers(&self) -> usize {
        self.sp_to_sus.len()
    }

    pub fn num_users(&self) -> usize {
        self.su_to_sp.len()
    }

    pub fn num_matched(&self) -> usize {
        self.su_to_sp.iter().filter(|m| m.is_some()).count()
    }

    /// All `(user, provider)` pairs in user order.
    pub fn pairs(&self) -> impl Iterator<Item = (SuId, SpId)> + '_ {
        self.su_to_sp
            .iter()
            .enumerate()
            .filter_map(|(n, m)| m.map(|m| (SuId(n), m)))
    }

    /// Checks shape and quotas against `instance`.
    pub fn check_against(&self, instance: &MarketInstance) -> Result<(), MarketError> {
        if self.num_providers() != instance.num_providers() || self.num_users() != instance.num_users() {
            return Err(MarketError::InconsistentMatching(format!(
                "matching covers {}x{} agents, market has {}x{}",
                self.num_providers(),
                self.num_users(),
                instance.num_providers(),
                instance.num_users()
            )));
        }
        for m in instance.provider_ids() {
            let held = self.users_of(m).len();
            if held > instance.quota(m) {
                return Err(MarketError::InconsistentMatching(format!(
                    "{m} holds {held} users but its quota is {}",
                    instance.quota(m)
                )));
            }
        }
        Ok(())
    }

    /// Renders the matching with the agent names of `instance`, e.g. `{A–SU1, B–SU3}`.
    pub fn display<'a>(&'a self, instance: &'a MarketInstance) -> impl fmt::Display + 'a {
        DisplayMatching {
            matching: self,
            instance,
        }
    }
}

struct DisplayMatching<'a> {
    matching: &'a Matching,
    instance: &'a MarketInstance,
}

impl fmt::Display for DisplayMatching<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for m in self.instance.provider_ids() {
            for &n in self.matching.users_of(m) {
                parts.push(format!(
                    "{}–{}",
                    self.instance.provider(m).name,
                    self.instance.user(n).name
                ));
            }
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_build_both_directions() {
        let m = Matching::from_pairs(2, 3, [(SuId(2), SpId(0)), (SuId(0), SpId(0))]).unwrap();
        assert_eq!(m.users_of(SpId(0)), &[SuId(0), SuId(2)]);
        assert_eq!(m.provider_of(SuId(1)), None);
        assert_eq!(m.num_matched(), 2);
        assert_eq!(
            m.pairs().collect::<Vec<_>>(),
            vec![(SuId(0), SpId(0)), (SuId(2), SpId(0))]
        );
    }

    #[test]
    fn user_matched_twice_is_inconsistent() {
        let err = Matching::from_pairs(2, 1, [(SuId(0), SpId(0)), (SuId(0), SpId(1))]);
        assert!(matches!(err, Err(MarketError::InconsistentMatching(_))));
    }

    #[test]
    fn disagreeing_maps_are_inconsistent() {
        let err = Matching::from_maps(vec![Some(SpId(0)), None], vec![vec![SuId(1)]]);
        assert!(matches!(err, Err(MarketError::InconsistentMatching(_))));
        let ok = Matching::from_maps(vec![Some(SpId(0)), Some(SpId(0))], vec![vec![SuId(1), SuId(0)]]);
        assert!(ok.is_ok());
    }

    #[test]
    fn quota_overflow_is_detected() {
        let inst = MarketInstance::from_indices(&[(1, vec![0, 1])], &[vec![0], vec![0]]).unwrap();
        let m = Matching::from_pairs(1, 2, [(SuId(0), SpId(0)), (SuId(1), SpId(0))]).unwrap();
        assert!(m.check_against(&inst).is_err());
        assert!(Matching::empty(1, 2).check_against(&inst).is_ok());
        assert!(Matching::empty(2, 2).check_against(&inst).is_err());
    }

    #[test]
    fn display_uses_agent_names() {
        let inst = MarketInstance::from_indices(&[(1, vec![0]), (1, vec![1])], &[vec![0], vec![1]]).unwrap();
        let m = Matching::from_pairs(2, 2, [(SuId(0), SpId(0)), (SuId(1), SpId(1))]).unwrap();
        assert_eq!(m.display(&inst).to_string(), "{A–SU1, B–SU2}");
    }
}
