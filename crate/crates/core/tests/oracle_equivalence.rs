mod common;

use common::{interior_samples, zone, REGIMES};
use halfmap::{oracle_half_map, sign, HalfMap, LienardParams};
use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;

fn any_zone() -> impl Strategy<Value = LienardParams> {
    (-1i8..=1, -1i8..=1, 0usize..4, any::<u64>()).prop_filter_map(
        "impossible stratum",
        |(sa, st, r, seed)| {
            let mut rng = common::rng(seed);
            zone(&mut rng, sa, st, REGIMES[r])
        },
    )
}

fn existing(p: LienardParams) -> Option<HalfMap> {
    HalfMap::new(p).ok().filter(|m| m.domain().exists)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: Some(Box::new(FileFailurePersistence::WithSource("regressions"))),
        ..ProptestConfig::default()
    })]

    #[test]
    fn agrees_with_the_flow(p in any_zone()) {
        let Some(map) = existing(p) else { return Ok(()); };
        for y0 in interior_samples(&p, 8) {
            let got = map.eval(y0).unwrap();
            let want = oracle_half_map(&p, y0).unwrap();
            prop_assert!(
                (got - want).abs() <= 1e-9 * (1.0 + want.abs()),
                "{p:?} y0={y0}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn inverse_round_trip(p in any_zone()) {
        let Some(map) = existing(p) else { return Ok(()); };
        for y0 in interior_samples(&p, 8) {
            let y1 = map.eval(y0).unwrap();
            if map.derivative1(y0).unwrap().abs() < 1e-6 {
                continue;
            }
            let back = map.inverse(y1).unwrap();
            prop_assert!((back - y0).abs() <= 1e-8 * (1.0 + y0.abs()), "{p:?} y0={y0} back={back}");
        }
    }

    #[test]
    fn sign_laws(p in any_zone()) {
        let Some(map) = existing(p) else { return Ok(()); };
        let (t, a) = (p.trace, p.offset);
        for y0 in interior_samples(&p, 8) {
            prop_assert!(map.derivative1(y0).unwrap() < 0.0);
            prop_assert_eq!(map.bisector_position(y0).unwrap(), -sign(t));
            let d2 = map.derivative2(y0).unwrap();
            prop_assert_eq!(sign(d2), -sign(a * a * t), "{:?} y0={} P''={}", p, y0, d2);
        }
    }
}
