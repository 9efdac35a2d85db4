mod common;

use halfmap::{
    find_crossing_orbits, oracle_circuit, Classification, Conclusion, Execution, PwlSystem,
    SearchConfig,
};
use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;

fn any_system() -> impl Strategy<Value = PwlSystem> {
    any::<u64>().prop_map(|seed| common::pwl_system(&mut common::rng(seed)))
}

/// Two foci with random trace signs; these carry most crossing orbits.
fn focus_pair() -> impl Strategy<Value = PwlSystem> {
    (
        prop::sample::select(vec![-1i8, 1]),
        prop::sample::select(vec![-1i8, 1]),
        any::<u64>(),
        -2.0..2.0f64,
    )
        .prop_filter_map("zone draw", |(sl, sr, seed, b)| {
            let mut rng = common::rng(seed);
            let left = common::zone(&mut rng, 1, sl, common::Regime::Focus)?;
            let right = common::zone(&mut rng, -1, sr, common::Regime::Focus)?;
            PwlSystem::new(left, right, b).ok()
        })
}

fn numeric(execution: Execution) -> SearchConfig {
    SearchConfig {
        use_certificates: false,
        execution,
        ..SearchConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 24,
        failure_persistence: Some(Box::new(FileFailurePersistence::WithSource("regressions"))),
        ..ProptestConfig::default()
    })]

    #[test]
    fn orbits_close_under_the_flow(sys in prop_oneof![any_system(), focus_pair()]) {
        let Ok(report) = find_crossing_orbits(&sys, &numeric(Execution::Sequential)) else {
            return Ok(());
        };
        for orbit in &report.orbits {
            let back = oracle_circuit(&sys, orbit.y0).unwrap();
            prop_assert!(
                (back - orbit.y0).abs() <= 1e-8 * (1.0 + orbit.y0.abs()),
                "{sys:?}: {orbit:?} returns to {back}"
            );
        }
    }

    #[test]
    fn certificates_never_contradict_the_search(sys in prop_oneof![any_system(), focus_pair()]) {
        let Ok(report) = find_crossing_orbits(&sys, &numeric(Execution::Sequential)) else {
            return Ok(());
        };
        let isolated = report.orbits.len();
        for cert in &report.applicable {
            match cert.conclusion() {
                Conclusion::NoOrbits => {
                    prop_assert_eq!(report.classification, Classification::None, "{:?}", cert)
                }
                Conclusion::Continuum => {
                    prop_assert_eq!(report.classification, Classification::Continuum)
                }
                Conclusion::NoLimitCycles => {
                    prop_assert!(report.classification != Classification::Finite, "{:?}", report)
                }
                Conclusion::AtMostTwoLimitCycles => prop_assert!(isolated <= 2),
            }
        }
    }

    #[test]
    fn schedule_does_not_change_the_answer(sys in any_system()) {
        let seq = find_crossing_orbits(&sys, &numeric(Execution::Sequential));
        let par = find_crossing_orbits(&sys, &numeric(Execution::Parallel));
        prop_assert_eq!(format!("{seq:?}"), format!("{par:?}"));
    }
}
