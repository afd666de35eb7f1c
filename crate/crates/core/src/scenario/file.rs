//! JSON scenario documents.
//!
//! ```json
//! {
//!   "label": "table2-1to1",
//!   "providers": [{ "id": "A", "quota": 1, "prefs": ["SU1", "SU2", "SU3"] }],
//!   "users": [
//!     { "id": "SU1", "policy": "uniform-random" },
//!     { "id": "SU2", "policy": "fixed", "prefs": ["A"] }
//!   ]
//! }
//! ```
//!
//! Ids are free-form strings, unique per side. Unknown keys are rejected.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{PreferencePolicy, ScenarioError, ScenarioTemplate, UserTemplate};
use crate::market::{SpId, SpectrumProvider, SuId};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    label: String,
    providers: Vec<ProviderDoc>,
    users: Vec<UserDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProviderDoc {
    id: String,
    quota: usize,
    prefs: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UserDoc {
    id: String,
    policy: PolicyDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prefs: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum PolicyDoc {
    Fixed,
    UniformRandom,
}

fn index_names<'a>(names: impl Iterator<Item = &'a str>) -> Result<HashMap<&'a str, usize>, ScenarioError> {
    let mut index = HashMap::new();
    for (i, name) in names.enumerate() {
        if index.insert(name, i).is_some() {
            return Err(ScenarioError::DuplicateId(name.to_owned()));
        }
    }
    Ok(index)
}

fn resolve(owner: &str, names: &[String], index: &HashMap<&str, usize>) -> Result<Vec<usize>, ScenarioError> {
    names
        .iter()
        .map(|name| {
            index
                .get(name.as_str())
                .copied()
                .ok_or_else(|| ScenarioError::UnknownName {
                    owner: owner.to_owned(),
                    unknown: name.clone(),
                })
        })
        .collect()
}

impl ScenarioTemplate {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let doc: ScenarioDoc = serde_json::from_str(text)?;
        let sp_index = index_names(doc.providers.iter().map(|p| p.id.as_str()))?;
        let su_index = index_names(doc.users.iter().map(|u| u.id.as_str()))?;
        let providers = doc
            .providers
            .iter()
            .map(|p| {
                let prefs = resolve(&p.id, &p.prefs, &su_index)?;
                Ok(SpectrumProvider::new(
                    p.id.clone(),
                    p.quota,
                    prefs.into_iter().map(SuId).collect(),
                ))
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        let users = doc
            .users
            .iter()
            .map(|u| match (u.policy, &u.prefs) {
                (PolicyDoc::Fixed, Some(prefs)) => {
                    let prefs = resolve(&u.id, prefs, &sp_index)?;
                    Ok(UserTemplate::fixed(u.id.clone(), prefs.into_iter().map(SpId).collect()))
                }
                (PolicyDoc::Fixed, None) => Err(ScenarioError::MissingPrefs(u.id.clone())),
                (PolicyDoc::UniformRandom, None) => Ok(UserTemplate::random(u.id.clone())),
                (PolicyDoc::UniformRandom, Some(_)) => Err(ScenarioError::UnexpectedPrefs(u.id.clone())),
            })
            .collect::<Result<Vec<_>, ScenarioError>>()?;
        ScenarioTemplate::new(doc.label, providers, users)
    }

    pub fn to_json(&self) -> String {
        let user_name = |n: &SuId| self.users[n.0].name.clone();
        let provider_name = |m: &SpId| self.providers[m.0].name.clone();
        let doc = ScenarioDoc {
            label: self.label.clone(),
            providers: self
                .providers
                .iter()
                .map(|p| ProviderDoc {
                    id: p.name.clone(),
                    quota: p.quota,
                    prefs: p.prefs.as_slice().iter().map(user_name).collect(),
                })
                .collect(),
            users: self
                .users
                .iter()
                .map(|u| match &u.policy {
                    PreferencePolicy::Fixed(prefs) => UserDoc {
                        id: u.name.clone(),
                        policy: PolicyDoc::Fixed,
                        prefs: Some(prefs.as_slice().iter().map(provider_name).collect()),
                    },
                    PreferencePolicy::UniformRandom => UserDoc {
                        id: u.name.clone(),
                        policy: PolicyDoc::UniformRandom,
                        prefs: None,
                    },
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("scenario documents always serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}
