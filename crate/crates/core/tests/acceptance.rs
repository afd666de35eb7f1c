//! Acceptance criteria. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectrum_match::scenario::{fig8_sweep_label, RandomStream, BUILTIN_LABELS};
use spectrum_match::simulation::{run_instants, run_instants_inspect};
use spectrum_match::{
    builtin_scenario, da_one_to_one, enumerate_stable_matchings, find_blocking_pairs, gale_shapley_many_to_one,
    run_exhaustive, run_monte_carlo, AllocationStats, Capacity, DeferredAcceptance, ExperimentMode, Matching, Schedule,
    SpId, SuId,
};

const SEED: u64 = 20_240_601;
const INSTANTS: u64 = 100_000;
const TIME_BUDGET: Duration = Duration::from_secs(5);

type Verdict = Result<String, String>;
type Criterion = fn() -> Verdict;

fn fmt_shares(shares: &[f64]) -> String {
    shares.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>().join("/")
}

fn criterion_1() -> Verdict {
    let started = Instant::now();
    let t = builtin_scenario("table2-1to1").unwrap();
    let exact = run_exhaustive(&t, ExperimentMode::OneToOneDa).unwrap();
    let mc = run_monte_carlo(&t, ExperimentMode::OneToOneDa, INSTANTS, SEED).unwrap();
    let elapsed = started.elapsed();

    let reference = [0.70, 0.17, 0.13];
    let mut problems = Vec::new();
    for n in 0..3 {
        let shares: Vec<f64> = (1..=3).map(|i| exact.success(SuId(n), i)).collect();
        if shares.iter().zip(reference).any(|(s, r)| (s - r).abs() > 0.03) {
            problems.push(format!(
                "SU{} exact shares {} outside 0.70/0.17/0.13 ±0.03",
                n + 1,
                fmt_shares(&shares)
            ));
        }
    }
    if (1..3).any(|n| exact.counts(SuId(n)) != exact.counts(SuId(0)) || exact.unmatched_count(SuId(n)) != 0) {
        problems.push("shares differ across users".into());
    }
    let mut gap: f64 = 0.0;
    for n in 0..3 {
        for i in 1..=3 {
            gap = gap.max((mc.success(SuId(n), i) - exact.success(SuId(n), i)).abs());
        }
    }
    if gap > 0.01 {
        problems.push(format!("Monte Carlo off by {gap:.4}"));
    }
    if elapsed >= TIME_BUDGET {
        problems.push(format!("took {elapsed:?}"));
    }
    let summary = format!(
        "exact S(n,1..3) = {}, Monte Carlo max gap {gap:.4}, {:.2}s",
        fmt_shares(&(1..=3).map(|i| exact.success(SuId(0), i)).collect::<Vec<_>>()),
        elapsed.as_secs_f64()
    );
    if problems.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", problems.join("; ")))
    }
}

fn criterion_2() -> Verdict {
    let started = Instant::now();
    let variant = run_exhaustive(
        &builtin_scenario("table2-spB-variant").unwrap(),
        ExperimentMode::OneToOneDa,
    )
    .unwrap();
    let blind = run_monte_carlo(
        &builtin_scenario("table2-1to1").unwrap(),
        ExperimentMode::Uncoordinated,
        INSTANTS,
        SEED,
    )
    .unwrap();
    let elapsed = started.elapsed();
    let s11 = variant.success(SuId(0), 1);
    let u11 = blind.success(SuId(0), 1);
    let summary = format!(
        "B-variant S(1,1) = {s11:.4} (0.89 ±0.03), uncoordinated S(1,1) = {u11:.4} (1/3 ±0.01), {:.2}s",
        elapsed.as_secs_f64()
    );
    if (s11 - 0.89).abs() <= 0.03 && (u11 - 1.0 / 3.0).abs() <= 0.01 && elapsed < TIME_BUDGET {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn criterion_3() -> Verdict {
    let t = builtin_scenario("eq4-cbrs").unwrap();
    let inst = t.instantiate(&RandomStream::new(0, 0));
    let m = da_one_to_one(&inst);
    let expected = Matching::from_pairs(3, 4, [(SuId(0), SpId(0)), (SuId(2), SpId(1)), (SuId(1), SpId(2))]).unwrap();
    let summary = format!(
        "matching {}, SU4 unmatched: {}",
        m.display(&inst),
        m.provider_of(SuId(3)).is_none()
    );
    if m == expected {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn criterion_4() -> Verdict {
    let many = run_exhaustive(
        &builtin_scenario("table3-quota2-all").unwrap(),
        ExperimentMode::ManyToOneGs,
    )
    .unwrap();
    let single = run_exhaustive(&builtin_scenario("table3-1to1").unwrap(), ExperimentMode::OneToOneDa).unwrap();
    let unmatched: Vec<u64> = (0..4).map(|n| many.unmatched_count(SuId(n))).collect();
    let first: Vec<f64> = (0..4).map(|n| many.success(SuId(n), 1)).collect();
    let before: Vec<f64> = (0..4).map(|n| single.success(SuId(n), 1)).collect();
    let summary = format!(
        "unmatched counts {unmatched:?}; S(n,1) {} vs one-to-one {}",
        fmt_shares(&first),
        fmt_shares(&before)
    );
    if unmatched.iter().all(|&u| u == 0) && first.iter().zip(&before).all(|(a, b)| a > b) {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn criterion_5() -> Verdict {
    let t = builtin_scenario("table3-quotaA2").unwrap();
    let a = SpId(0);
    let (mut checked, mut violations) = (0u64, 0u64);
    run_instants_inspect(&t, ExperimentMode::ManyToOneGs, 0..INSTANTS, SEED, |_, inst, m| {
        for &n in &inst.provider(a).prefs.as_slice()[..2] {
            if inst.user(n).prefs.get(0) == Some(a) {
                checked += 1;
                if m.provider_of(n) != Some(a) {
                    violations += 1;
                }
            }
        }
    })
    .unwrap();
    let summary = format!("{violations} violations in {checked} first-choice requests over {INSTANTS} instants");
    if violations == 0 && checked > 0 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn criterion_6() -> Verdict {
    let mut s21 = Vec::new();
    let mut s31 = 0.0;
    for position in [4, 3, 2] {
        let stats = run_exhaustive(
            &builtin_scenario(&fig8_sweep_label(position)).unwrap(),
            ExperimentMode::ManyToOneGs,
        )
        .unwrap();
        s21.push(stats.success(SuId(1), 1));
        s31 = stats.success(SuId(2), 1);
    }
    let summary = format!(
        "S(2,1) at positions 4/3/2 = {}; S(3,1) at 2 = {s31:.4}",
        fmt_shares(&s21)
    );
    if s21.windows(2).all(|w| w[1] >= w[0]) && s21[2] > s31 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    let per_kind = 1000;
    for partial in [false, true] {
        for _ in 0..per_kind {
            let inst = common::random_market(&mut rng, 1..=4, 2, partial);
            let gs = gale_shapley_many_to_one(&inst);
            let stable = enumerate_stable_matchings(&inst).unwrap();
            if !find_blocking_pairs(&inst, &gs).unwrap().is_empty() || !stable.contains(&gs) {
                failures.push(format!("many-to-one on {inst:?}"));
            }
            let unit = inst.with_unit_quotas();
            let da = da_one_to_one(&inst);
            let unit_stable = enumerate_stable_matchings(&unit).unwrap();
            if !find_blocking_pairs(&unit, &da).unwrap().is_empty()
                || !unit_stable.contains(&da)
                || !common::is_user_optimal(&unit, &da, &unit_stable)
            {
                failures.push(format!("one-to-one on {inst:?}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(format!("{} instances, zero violations", 2 * per_kind))
    } else {
        Err(format!("{} violations, first: {}", failures.len(), failures[0]))
    }
}

fn criterion_8() -> Verdict {
    let cases = 10_000;
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    let modes = vec![
        ExperimentMode::OneToOneDa,
        ExperimentMode::ManyToOneGs,
        ExperimentMode::Uncoordinated,
    ];
    let strategy = (
        common::market(6, 3, true),
        prop::sample::select(BUILTIN_LABELS),
        prop::sample::select(modes),
        any::<u64>(),
        0u64..=24,
    );
    let outcome = runner.run(&strategy, |(inst, label, mode, seed, cut)| {
        for cap in [Capacity::Unit, Capacity::Declared] {
            let rounds = DeferredAcceptance::new(&inst)
                .capacity(cap)
                .schedule(Schedule::Rounds)
                .run()
                .matching;
            let seq = DeferredAcceptance::new(&inst)
                .capacity(cap)
                .schedule(Schedule::Sequential)
                .run()
                .matching;
            prop_assert_eq!(&rounds, &seq, "scheduling");
            let limit = |sp: SpId| if cap == Capacity::Unit { 1 } else { inst.quota(sp) };
            for sp in inst.provider_ids() {
                prop_assert!(rounds.users_of(sp).len() <= limit(sp), "quota");
                for &n in rounds.users_of(sp) {
                    prop_assert_eq!(rounds.provider_of(n), Some(sp), "consistency");
                }
            }
            for n in inst.user_ids() {
                if let Some(sp) = rounds.provider_of(n) {
                    prop_assert!(rounds.users_of(sp).contains(&n), "consistency");
                }
            }
        }
        prop_assert_eq!(
            gale_shapley_many_to_one(&inst.with_unit_quotas()),
            da_one_to_one(&inst),
            "reduction"
        );

        let t = builtin_scenario(label).unwrap();
        let serial = run_instants(&t, mode, 0..24, seed).unwrap();
        for n in 0..t.num_users() {
            let n = SuId(n);
            let total: f64 =
                (1..=serial.max_rank()).map(|i| serial.success(n, i)).sum::<f64>() + serial.unmatched_share(n);
            prop_assert!((total - 1.0).abs() < 1e-12, "normalization");
        }
        let merged = run_instants(&t, mode, cut..24, seed)
            .unwrap()
            .merge(&run_instants(&t, mode, 0..cut, seed).unwrap())
            .unwrap();
        prop_assert_eq!(&merged, &serial, "merge");
        let zero = AllocationStats::zero(t.num_users(), t.num_providers());
        prop_assert_eq!(zero.merge(&serial).unwrap(), serial, "merge identity");
        Ok(())
    });
    match outcome {
        Ok(()) => Ok(format!("{cases} generated cases, all invariants hold")),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 8] = [
        ("one-to-one shares in the cyclic market", criterion_1),
        ("provider B variant and uncoordinated baseline", criterion_2),
        ("golden trace", criterion_3),
        ("quota two everywhere", criterion_4),
        ("priority of A's top two users", criterion_5),
        ("provider C sweep", criterion_6),
        ("brute-force oracle equivalence", criterion_7),
        ("invariant suite", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        match run() {
            Ok(detail) => println!("[PASS] criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
