#![allow(dead_code)]

use halfmap::{domain_interval, EndpointKind, LienardParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Focus,
    Saddle,
    Node,
    Singular,
}

pub const REGIMES: [Regime; 4] = [
    Regime::Focus,
    Regime::Saddle,
    Regime::Node,
    Regime::Singular,
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One zone with the requested signs of `a` and `T` and the requested spectrum.
/// `None` when the combination is impossible (a node needs `T != 0`).
pub fn zone(rng: &mut impl Rng, sign_a: i8, sign_t: i8, regime: Regime) -> Option<LienardParams> {
    if regime == Regime::Node && sign_t == 0 {
        return None;
    }
    let a = sign_a as f64 * rng.gen_range(0.2..2.0);
    let t = sign_t as f64 * rng.gen_range(0.1..2.0);
    let d = match regime {
        Regime::Focus => (t * t + rng.gen_range(0.2..4.0)) / 4.0,
        Regime::Saddle => -rng.gen_range(0.1..2.0),
        Regime::Node => t * t / 4.0 * rng.gen_range(0.1..0.9),
        Regime::Singular => 0.0,
    };
    LienardParams::new(t, d, a).ok()
}

/// Every stratum `sign(a) × sign(T) × regime`, cycled until `count` zones are drawn.
pub fn stratified_zones(seed: u64, count: usize) -> Vec<LienardParams> {
    let mut rng = rng(seed);
    let mut strata = Vec::new();
    for sa in [-1i8, 0, 1] {
        for st in [-1i8, 0, 1] {
            for r in REGIMES {
                if !(r == Regime::Node && st == 0) && !(sa == 0 && r == Regime::Singular) {
                    strata.push((sa, st, r));
                }
            }
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut k = 0;
    while out.len() < count {
        let (sa, st, r) = strata[k % strata.len()];
        if let Some(z) = zone(&mut rng, sa, st, r) {
            out.push(z);
        }
        k += 1;
    }
    out
}

/// `n` points of the interior of `I`, graded toward finite endpoints.
pub fn interior_samples(params: &LienardParams, n: usize) -> Vec<f64> {
    let Ok(dom) = domain_interval(params) else {
        return Vec::new();
    };
    if !dom.exists {
        return Vec::new();
    }
    let lo = dom.lower.value;
    let scale = 1f64.max(params.offset.abs());
    let hi = match dom.upper.kind {
        EndpointKind::Unbounded => lo + 8.0 * scale,
        _ => dom.upper.value,
    };
    (1..=n)
        .map(|k| {
            let s = k as f64 / (n + 1) as f64;
            // smoothstep pulls points toward both ends
            let g = s * s * (3.0 - 2.0 * s);
            lo + (hi - lo) * (0.02 + 0.96 * g)
        })
        .filter(|&y| dom.contains_interior(y))
        .collect()
}

/// A random two-zone system; `b = 0` a third of the time.
pub fn pwl_system(rng: &mut impl Rng) -> halfmap::PwlSystem {
    let pick = |rng: &mut ChaCha8Rng| loop {
        let sa = [-1i8, 0, 1][rng.gen_range(0..3)];
        let st = [-1i8, 0, 1][rng.gen_range(0..3)];
        // foci half of the time: they carry most crossing orbits
        let r = if rng.gen_bool(0.5) {
            Regime::Focus
        } else {
            REGIMES[rng.gen_range(0..4)]
        };
        if let Some(z) = zone(rng, sa, st, r) {
            return z;
        }
    };
    let mut inner = ChaCha8Rng::seed_from_u64(rng.gen());
    let left = pick(&mut inner);
    let right = pick(&mut inner);
    let b = if inner.gen_range(0..3) == 0 {
        0.0
    } else {
        inner.gen_range(-2.0..2.0)
    };
    halfmap::PwlSystem::new(left, right, b).unwrap()
}

/// Sign changes of the flow-oracle displacement over `int(I_L ∩ I_R)`.
pub fn oracle_sign_changes(sys: &halfmap::PwlSystem, lo: f64, hi: f64) -> Option<usize> {
    let n = 3000;
    let top = if hi.is_finite() { hi } else { lo + 1e4 };
    let mut last: Option<f64> = None;
    let mut count = 0;
    for k in 1..n {
        let s = k as f64 / n as f64;
        let y = if hi.is_finite() {
            lo + (top - lo) * s
        } else {
            lo + (top - lo) * s.powi(4)
        };
        let d = match (
            halfmap::oracle_half_map(&sys.left, y),
            halfmap::oracle_backward_map(sys, y),
        ) {
            (Ok(l), Ok(r)) => l - r,
            _ => continue,
        };
        if let Some(p) = last {
            if p * d < 0.0 {
                count += 1;
            }
        }
        if d != 0.0 {
            last = Some(d);
        }
    }
    Some(count)
}
