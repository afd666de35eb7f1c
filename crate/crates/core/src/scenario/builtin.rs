//! Bundled scenarios.
//!
//! | label                | providers (quota)                 | users                        |
//! |----------------------|-----------------------------------|------------------------------|
//! | `table2-1to1`        | A, B, C cyclic over 3 users (1)   | 3 random                     |
//! | `table2-spB-variant` | as above, P(B) = (n1, n3, n2)     | 3 random                     |
//! | `eq4-cbrs`           | CBRS PA licensees (1)             | 4 fixed, CBRS example        |
//! | `eq4-cbrs-random`    | CBRS PA licensees (1)             | 4 random                     |
//! | `table3-1to1`        | A, B, C cyclic over 4 users (1)   | 4 random                     |
//! | `table3-quota2-all`  | as above, every quota 2           | 4 random                     |
//! | `table3-quotaA2`     | as above, quota 2 for A only      | 4 random                     |
//! | `fig8-sweep-<k>`     | `table3-quotaA2`, SU2 at k in P(C) | 4 random                    |

use std::collections::BTreeMap;

use super::{ScenarioError, ScenarioTemplate, UserTemplate};
use crate::market::{default_provider_name, default_user_name, SpId, SpectrumProvider, SuId};

pub const BUILTIN_LABELS: &[&str] = &[
    "table2-1to1",
    "table2-spB-variant",
    "eq4-cbrs",
    "eq4-cbrs-random",
    "table3-1to1",
    "table3-quota2-all",
    "table3-quotaA2",
    "fig8-sweep-4",
    "fig8-sweep-3",
    "fig8-sweep-2",
    "fig8-sweep-1",
];

const TABLE2: [&[usize]; 3] = [&[1, 2, 3], &[2, 3, 1], &[3, 1, 2]];
const TABLE2_SPB_VARIANT: [&[usize]; 3] = [&[1, 2, 3], &[1, 3, 2], &[3, 1, 2]];
const TABLE3: [&[usize]; 3] = [&[1, 2, 3, 4], &[2, 3, 4, 1], &[3, 4, 1, 2]];
const CBRS_PROVIDERS: [&[usize]; 3] = [&[1, 2, 4, 3], &[3, 4, 1, 2], &[1, 3, 2, 4]];
// A = 1, B = 2, C = 3
const CBRS_USERS: [&[usize]; 4] = [&[1, 2, 3], &[2, 1, 3], &[2, 3, 1], &[1, 3, 2]];

pub fn fig8_sweep_label(position: usize) -> String {
    format!("fig8-sweep-{position}")
}

/// Providers named A, B, ... with 1-based user numbers in their lists.
fn providers(lists: &[&[usize]], quotas: &[usize]) -> Vec<SpectrumProvider> {
    lists
        .iter()
        .zip(quotas)
        .enumerate()
        .map(|(m, (list, &quota))| {
            SpectrumProvider::new(
                default_provider_name(m),
                quota,
                list.iter().map(|&n| SuId(n - 1)).collect(),
            )
        })
        .collect()
}

fn random_users(count: usize) -> Vec<UserTemplate> {
    (0..count).map(|n| UserTemplate::random(default_user_name(n))).collect()
}

fn build(label: &str, providers: Vec<SpectrumProvider>, users: Vec<UserTemplate>) -> ScenarioTemplate {
    ScenarioTemplate::new(label, providers, users).expect("bundled scenarios are valid")
}

/// SU2 moved to 1-based `position` in `list`, everyone else keeping their order.
fn move_user(list: &[usize], user: usize, position: usize) -> Vec<usize> {
    let mut out: Vec<usize> = list.iter().copied().filter(|&n| n != user).collect();
    out.insert(position - 1, user);
    out
}

pub fn builtin_scenarios() -> BTreeMap<String, ScenarioTemplate> {
    let mut out = BTreeMap::new();
    let mut add = |t: ScenarioTemplate| {
        out.insert(t.label().to_owned(), t);
    };

    add(build("table2-1to1", providers(&TABLE2, &[1, 1, 1]), random_users(3)));
    add(build(
        "table2-spB-variant",
        providers(&TABLE2_SPB_VARIANT, &[1, 1, 1]),
        random_users(3),
    ));
    let cbrs_users = CBRS_USERS
        .iter()
        .enumerate()
        .map(|(n, list)| UserTemplate::fixed(default_user_name(n), list.iter().map(|&m| SpId(m - 1)).collect()))
        .collect();
    add(build("eq4-cbrs", providers(&CBRS_PROVIDERS, &[1, 1, 1]), cbrs_users));
    add(build(
        "eq4-cbrs-random",
        providers(&CBRS_PROVIDERS, &[1, 1, 1]),
        random_users(4),
    ));
    add(build("table3-1to1", providers(&TABLE3, &[1, 1, 1]), random_users(4)));
    add(build(
        "table3-quota2-all",
        providers(&TABLE3, &[2, 2, 2]),
        random_users(4),
    ));
    add(build("table3-quotaA2", providers(&TABLE3, &[2, 1, 1]), random_users(4)));
    for position in (1..=4).rev() {
        let swept_c = move_user(TABLE3[2], 2, position);
        let lists: [&[usize]; 3] = [TABLE3[0], TABLE3[1], &swept_c];
        add(build(
            &fig8_sweep_label(position),
            providers(&lists, &[2, 1, 1]),
            random_users(4),
        ));
    }
    out
}

pub fn builtin_scenario(label: &str) -> Result<ScenarioTemplate, ScenarioError> {
    builtin_scenarios()
        .remove(label)
        .ok_or_else(|| ScenarioError::UnknownLabel(label.to_owned()))
}
