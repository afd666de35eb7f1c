//! Agents, preference lists and the validated market handed to the matchers.

use std::fmt;

use thiserror::Error;

/// Index of a spectrum provider within a [`MarketInstance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpId(pub usize);

/// Index of a spectrum user within a [`MarketInstance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SuId(pub usize);

impl fmt::Display for SpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SP#{}", self.0)
    }
}

impl fmt::Display for SuId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SU#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Provider,
    User,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Provider => f.write_str("provider"),
            Side::User => f.write_str("user"),
        }
    }
}

/// An agent on either side of the market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentId {
    Provider(SpId),
    User(SuId),
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentId::Provider(id) => id.fmt(f),
            AgentId::User(id) => id.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("{owner} ranks {duplicate} more than once")]
    DuplicateInPreference { owner: AgentId, duplicate: AgentId },
    #[error("{owner} ranks {unknown}, which is not part of the market")]
    UnknownAgentId { owner: AgentId, unknown: AgentId },
    #[error("{0} has a quota of zero")]
    ZeroQuota(SpId),
    #[error("the market has no {0}s")]
    EmptySide(Side),
    #[error("{user} is matched to {provider}, which it does not rank")]
    MatchNotInPreferenceList { user: SuId, provider: SpId },
    #[error("inconsistent matching: {0}")]
    InconsistentMatching(String),
    #[error("{candidates} candidate matchings exceed the enumeration limit of {limit}")]
    InstanceTooLarge { candidates: u128, limit: u128 },
}

/// A strict, possibly partial ranking of agents, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceList<T> {
    ranked: Vec<T>,
}

impl<T: Copy + PartialEq> PreferenceList<T> {
    pub fn new(ranked: Vec<T>) -> Self {
        Self { ranked }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.ranked
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }

    pub fn get(&self, position: usize) -> Option<T> {
        self.ranked.get(position).copied()
    }

    /// Zero-based position of `agent`, or `None` if it is not ranked.
    pub fn position(&self, agent: T) -> Option<usize> {
        self.ranked.iter().position(|&a| a == agent)
    }

    pub fn contains(&self, agent: T) -> bool {
        self.ranked.contains(&agent)
    }

    fn first_duplicate(&self) -> Option<T> {
        self.ranked
            .iter()
            .enumerate()
            .find(|(i, a)| self.ranked[..*i].contains(a))
            .map(|(_, &a)| a)
    }
}

impl<T> FromIterator<T> for PreferenceList<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Self {
            ranked: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumProvider {
    pub name: String,
    /// Spectrum slices offered per allocation instant.
    pub quota: usize,
    pub prefs: PreferenceList<SuId>,
}

impl SpectrumProvider {
    pub fn new(name: impl Into<String>, quota: usize, prefs: PreferenceList<SuId>) -> Self {
        Self {
            name: name.into(),
            quota,
            prefs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumUser {
    pub name: String,
    pub prefs: PreferenceList<SpId>,
}

impl SpectrumUser {
    pub fn new(name: impl Into<String>, prefs: PreferenceList<SpId>) -> Self {
        Self {
            name: name.into(),
            prefs,
        }
    }
}

/// Default display name for the provider at `index`: `A`, `B`, ... then `SP27`, ...
pub fn default_provider_name(index: usize) -> String {
    if index < 26 {
        char::from(b'A' + index as u8).to_string()
    } else {
        format!("SP{}", index + 1)
    }
}

/// Default display name for the user at `index`: `SU1`, `SU2`, ...
pub fn default_user_name(index: usize) -> String {
    format!("SU{}", index + 1)
}

/// One allocation instant: every provider and user with their preference lists.
///
/// Provider `m` is addressed as `SpId(m)` and user `n` as `SuId(n)`. Instances
/// are validated on construction, so the matchers treat them as total inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarketInstance {
    providers: Vec<SpectrumProvider>,
    users: Vec<SpectrumUser>,
    // provider_rank[m][n]: position of user n in P(m)
    provider_rank: Vec<Vec<Option<usize>>>,
}

impl MarketInstance {
    pub fn new(providers: Vec<SpectrumProvider>, users: Vec<SpectrumUser>) -> Result<Self, MarketError> {
        validate_parts(&providers, &users)?;
        Ok(Self::from_parts_unchecked(providers, users))
    }

    /// Builds an instance from raw index lists using the default agent names.
    ///
    /// `providers` holds `(quota, P(m))` per provider, `users` holds `P(n)`.
    pub fn from_indices(providers: &[(usize, Vec<usize>)], users: &[Vec<usize>]) -> Result<Self, MarketError> {
        let providers = providers
            .iter()
            .enumerate()
            .map(|(m, (quota, prefs))| {
                SpectrumProvider::new(
                    default_provider_name(m),
                    *quota,
                    prefs.iter().map(|&n| SuId(n)).collect(),
                )
            })
            .collect();
        let users = users
            .iter()
            .enumerate()
            .map(|(n, prefs)| SpectrumUser::new(default_user_name(n), prefs.iter().map(|&m| SpId(m)).collect()))
            .collect();
        Self::new(providers, users)
    }

    pub(crate) fn from_parts_unchecked(providers: Vec<SpectrumProvider>, users: Vec<SpectrumUser>) -> Self {
        let provider_rank = providers
            .iter()
            .map(|p| {
                let mut ranks = vec![None; users.len()];
                for (pos, n) in p.prefs.as_slice().iter().enumerate() {
                    ranks[n.0] = Some(pos);
                }
                ranks
            })
            .collect();
        Self {
            providers,
            users,
            provider_rank,
        }
    }

    /// Re-checks every invariant. Always `Ok` for instances built through [`MarketInstance::new`].
    pub fn validate(&self) -> Result<&Self, MarketError> {
        validate_parts(&self.providers, &self.users)?;
        Ok(self)
    }

    pub fn providers(&self) -> &[SpectrumProvider] {
        &self.providers
    }

    pub fn users(&self) -> &[SpectrumUser] {
        &self.users
    }

    pub fn num_providers(&self) -> usize {
        self.providers.len()
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn provider(&self, id: SpId) -> &SpectrumProvider {
        &self.providers[id.0]
    }

    pub fn user(&self, id: SuId) -> &SpectrumUser {
        &self.users[id.0]
    }

    pub fn provider_ids(&self) -> impl Iterator<Item = SpId> {
        (0..self.providers.len()).map(SpId)
    }

    pub fn user_ids(&self) -> impl Iterator<Item = SuId> {
        (0..self.users.len()).map(SuId)
    }

    pub fn quota(&self, id: SpId) -> usize {
        self.providers[id.0].quota
    }

    /// Zero-based position of `user` in P(`provider`), `None` if unacceptable.
    pub fn provider_rank(&self, provider: SpId, user: SuId) -> Option<usize> {
        self.provider_rank[provider.0][user.0]
    }

    /// True if `provider` ranks `a` strictly above `b`. Unranked users lose to ranked ones.
    pub fn provider_prefers(&self, provider: SpId, a: SuId, b: SuId) -> bool {
        match (self.provider_rank(provider, a), self.provider_rank(provider, b)) {
            (Some(ra), Some(rb)) => ra < rb,
            (Some(_), None) => true,
            _ => false,
        }
    }

    pub fn is_mutually_acceptable(&self, user: SuId, provider: SpId) -> bool {
        self.provider_rank(provider, user).is_some() && self.user(user).prefs.contains(provider)
    }

    /// The same market with every quota set to one.
    pub fn with_unit_quotas(&self) -> Self {
        let mut out = self.clone();
        for p in &mut out.providers {
            p.quota = 1;
        }
        out
    }

    pub fn all_quotas_unit(&self) -> bool {
        self.providers.iter().all(|p| p.quota == 1)
    }
}

fn validate_parts(providers: &[SpectrumProvider], users: &[SpectrumUser]) -> Result<(), MarketError> {
    if providers.is_empty() {
        return Err(MarketError::EmptySide(Side::Provider));
    }
    if users.is_empty() {
        return Err(MarketError::EmptySide(Side::User));
    }
    for (m, p) in providers.iter().enumerate() {
        let owner = AgentId::Provider(SpId(m));
        if p.quota == 0 {
            return Err(MarketError::ZeroQuota(SpId(m)));
        }
        if let Some(&n) = p.prefs.as_slice().iter().find(|n| n.0 >= users.len()) {
            return Err(MarketError::UnknownAgentId {
                owner,
                unknown: AgentId::User(n),
            });
        }
        if let Some(n) = p.prefs.first_duplicate() {
            return Err(MarketError::DuplicateInPreference {
                owner,
                duplicate: AgentId::User(n),
            });
        }
    }
    for (n, u) in users.iter().enumerate() {
        let owner = AgentId::User(SuId(n));
        if let Some(&m) = u.prefs.as_slice().iter().find(|m| m.0 >= providers.len()) {
            return Err(MarketError::UnknownAgentId {
                owner,
                unknown: AgentId::Provider(m),
            });
        }
        if let Some(m) = u.prefs.first_duplicate() {
            return Err(MarketError::DuplicateInPreference {
                owner,
                duplicate: AgentId::Provider(m),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table2() -> Result<MarketInstance, MarketError> {
        MarketInstance::from_indices(
            &[(1, vec![0, 1, 2]), (1, vec![1, 2, 0]), (1, vec![2, 0, 1])],
            &[vec![0, 1, 2], vec![1, 0, 2], vec![1, 2, 0]],
        )
    }

    #[test]
    fn table2_instance_is_valid() {
        let inst = table2().unwrap();
        assert!(inst.validate().is_ok());
        assert_eq!(inst.provider(SpId(0)).name, "A");
        assert_eq!(inst.user(SuId(2)).name, "SU3");
        assert_eq!(inst.provider_rank(SpId(1), SuId(0)), Some(2));
    }

    #[test]
    fn duplicate_in_provider_list_is_rejected() {
        let err = MarketInstance::from_indices(
            &[(1, vec![0, 0, 1]), (1, vec![1, 2, 0]), (1, vec![2, 0, 1])],
            &[vec![0], vec![1], vec![2]],
        )
        .unwrap_err();
        assert_eq!(
            err,
            MarketError::DuplicateInPreference {
                owner: AgentId::Provider(SpId(0)),
                duplicate: AgentId::User(SuId(0)),
            }
        );
    }

    #[test]
    fn dangling_provider_reference_is_rejected() {
        // SU1 ranks a fourth provider "D" that does not exist
        let err = MarketInstance::from_indices(
            &[(1, vec![0, 1, 2]), (1, vec![1, 2, 0]), (1, vec![2, 0, 1])],
            &[vec![0, 3], vec![1], vec![2]],
        )
        .unwrap_err();
        assert_eq!(
            err,
            MarketError::UnknownAgentId {
                owner: AgentId::User(SuId(0)),
                unknown: AgentId::Provider(SpId(3)),
            }
        );
    }

    #[test]
    fn zero_quota_and_empty_sides() {
        assert_eq!(
            MarketInstance::from_indices(&[(0, vec![0])], &[vec![0]]).unwrap_err(),
            MarketError::ZeroQuota(SpId(0))
        );
        assert_eq!(
            MarketInstance::from_indices(&[], &[vec![]]).unwrap_err(),
            MarketError::EmptySide(Side::Provider)
        );
        assert_eq!(
            MarketInstance::from_indices(&[(1, vec![])], &[]).unwrap_err(),
            MarketError::EmptySide(Side::User)
        );
    }

    #[test]
    fn partial_lists_are_allowed() {
        let inst = MarketInstance::from_indices(&[(2, vec![1])], &[vec![], vec![0]]).unwrap();
        assert!(!inst.is_mutually_acceptable(SuId(0), SpId(0)));
        assert!(inst.is_mutually_acceptable(SuId(1), SpId(0)));
        assert!(inst.provider_prefers(SpId(0), SuId(1), SuId(0)));
        assert!(!inst.provider_prefers(SpId(0), SuId(0), SuId(1)));
    }

    #[test]
    fn unit_quota_copy() {
        let inst = MarketInstance::from_indices(&[(3, vec![0]), (2, vec![0])], &[vec![0, 1]]).unwrap();
        assert!(!inst.all_quotas_unit());
        let unit = inst.with_unit_quotas();
        assert!(unit.all_quotas_unit());
        assert_eq!(unit.users(), inst.users());
    }

    #[test]
    fn default_names() {
        assert_eq!(default_provider_name(2), "C");
        assert_eq!(default_provider_name(26), "SP27");
        assert_eq!(default_user_name(0), "SU1");
    }
}
