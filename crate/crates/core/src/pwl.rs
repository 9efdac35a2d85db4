//! Two-zone piecewise linear systems in Liénard canonical form
//!
//! ```text
//! x < 0:  x' = T_L x - y,      y' = D_L x - a_L
//! x > 0:  x' = T_R x - y + b,  y' = D_R x - a_R
//! ```
//!
//! Crossing periodic orbits are the intersections of the forward half-map
//! `y_L = P_(T_L, D_L, a_L)` with the backward half-map
//! `y_R(y0) = P_(-T_R, D_R, -a_R)(y0 - b) + b` over `int(I_L ∩ I_R)`.

use serde::Serialize;

use crate::error::{HalfMapError, Result};
use crate::flow::{first_return_in, oracle_half_map, AffineFlow, ReturnBudget, Side};
use crate::halfmap::{EndpointKind, HalfMap};
use crate::params::{sign, LienardParams};
use crate::series::taylor_infinity;
use crate::solve::{brent, golden_min, SolverConfig};
use crate::sweep::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PwlSystem {
    pub left: LienardParams,
    /// `(T_R, D_R, a_R)` as written in the right zone.
    pub right: LienardParams,
    /// Ordinate of the right tangency point `(0, b)`.
    pub b: f64,
}

/// Points of the section strictly between the tangency points `(0, 0)` and `(0, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlidingSegment {
    pub lower: f64,
    pub upper: f64,
}

impl SlidingSegment {
    pub fn is_empty(&self) -> bool {
        self.lower == self.upper
    }

    /// `y` lies in the closed segment (tangency points included).
    pub fn touches(&self, y: f64) -> bool {
        self.lower <= y && y <= self.upper
    }
}

impl PwlSystem {
    pub fn new(left: LienardParams, right: LienardParams, b: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(HalfMapError::InvalidParams(format!(
                "b must be finite, got {b}"
            )));
        }
        Ok(Self { left, right, b })
    }

    pub fn is_sewing(&self) -> bool {
        self.b == 0.0
    }

    pub fn sliding_segment(&self) -> SlidingSegment {
        SlidingSegment {
            lower: self.b.min(0.0),
            upper: self.b.max(0.0),
        }
    }

    /// The zone whose left half-map gives `y_R` after the shift by `b`.
    pub fn reflected_right(&self) -> LienardParams {
        self.right.reflected()
    }

    fn scale(&self) -> f64 {
        1f64.max(self.left.offset.abs())
            .max(self.right.offset.abs())
            .max(self.b.abs())
    }
}

/// `int(I_L ∩ I_R)` as an open interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommonInterval {
    pub lower: f64,
    /// `+inf` when unbounded.
    pub upper: f64,
}

impl CommonInterval {
    pub fn contains(&self, y0: f64) -> bool {
        self.lower < y0 && y0 < self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }
}

/// Both half-maps of a system, with their domains computed once.
#[derive(Debug, Clone)]
pub struct PwlHalfMaps {
    system: PwlSystem,
    left: HalfMap,
    right: HalfMap,
    common: Option<CommonInterval>,
}

fn upper_value(map: &HalfMap) -> f64 {
    let up = map.domain().upper;
    match up.kind {
        EndpointKind::Unbounded => f64::INFINITY,
        _ => up.value,
    }
}

impl PwlHalfMaps {
    pub fn new(system: &PwlSystem) -> Result<Self> {
        Self::with_solver(system, SolverConfig::default())
    }

    pub fn with_solver(system: &PwlSystem, solver: SolverConfig) -> Result<Self> {
        let left = HalfMap::with_solver(system.left, solver)?;
        let right = HalfMap::with_solver(system.reflected_right(), solver)?;
        let b = system.b;
        let lower = left
            .domain()
            .lower
            .value
            .max(right.domain().lower.value + b);
        let upper = upper_value(&left).min(upper_value(&right) + b);
        let common = (lower < upper).then_some(CommonInterval { lower, upper });
        Ok(Self {
            system: *system,
            left,
            right,
            common,
        })
    }

    pub fn system(&self) -> &PwlSystem {
        &self.system
    }

    pub fn left(&self) -> &HalfMap {
        &self.left
    }

    /// Left half-map of the reflected right zone.
    pub fn reflected_right(&self) -> &HalfMap {
        &self.right
    }

    pub fn common_interval(&self) -> Option<CommonInterval> {
        self.common
    }

    /// `y_L(y0)`.
    pub fn forward(&self, y0: f64) -> Result<f64> {
        self.left.eval(y0)
    }

    /// `y_R(y0)`.
    pub fn backward(&self, y0: f64) -> Result<f64> {
        let b = self.system.b;
        Ok(self.right.eval(y0 - b)? + b)
    }

    /// `y_L(y0) - y_R(y0)` on `int(I_L ∩ I_R)`.
    pub fn displacement(&self, y0: f64) -> Result<f64> {
        match self.common {
            Some(j) if j.contains(y0) => Ok(self.forward(y0)? - self.backward(y0)?),
            _ => Err(HalfMapError::OutOfDomain {
                value: y0,
                domain: match self.common {
                    Some(j) => format!("int(I_L ∩ I_R) = ({}, {})", j.lower, j.upper),
                    None => "int(I_L ∩ I_R) = empty".into(),
                },
            }),
        }
    }

    /// Derivative of the full return map `y_R^{-1} ∘ y_L` at a crossing through `(0, y0)`.
    pub fn multiplier(&self, y0: f64) -> Result<f64> {
        Ok(self.left.derivative1(y0)? / self.right.derivative1(y0 - self.system.b)?)
    }
}

/// `y_L(y0)`.
pub fn forward_map(system: &PwlSystem, y0: f64) -> Result<f64> {
    HalfMap::new(system.left)?.eval(y0)
}

/// `y_R(y0)`.
pub fn backward_map(system: &PwlSystem, y0: f64) -> Result<f64> {
    Ok(HalfMap::new(system.reflected_right())?.eval(y0 - system.b)? + system.b)
}

pub fn displacement(system: &PwlSystem, y0: f64) -> Result<f64> {
    PwlHalfMaps::new(system)?.displacement(y0)
}

/// Analytic conclusions that hold for a system by its parameters alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// `T_L = T_R = 0`, `b = 0` and overlapping domains: `y_L = y_R = -y0`.
    VanishingTracesContinuum,
    /// `T_L = T_R = 0`, `b != 0`: `y_L - y_R = -2b`.
    VanishingTracesOffset,
    /// `T_L T_R >= 0` with a nonzero trace `T` satisfying `T b >= 0`.
    TraceSign,
    /// `T_L T_R >= 0` and `T_L b >= 0` (with `T_R b >= 0` too when `T_L = 0`):
    /// no isolated crossing orbit.
    NoLimitCycles,
    /// `T_L T_R > 0`: at most two limit cycles.
    AtMostTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conclusion {
    NoOrbits,
    Continuum,
    NoLimitCycles,
    AtMostTwoLimitCycles,
}

impl Certificate {
    pub fn conclusion(self) -> Conclusion {
        match self {
            Certificate::VanishingTracesContinuum => Conclusion::Continuum,
            Certificate::VanishingTracesOffset | Certificate::TraceSign => Conclusion::NoOrbits,
            Certificate::NoLimitCycles => Conclusion::NoLimitCycles,
            Certificate::AtMostTwo => Conclusion::AtMostTwoLimitCycles,
        }
    }
}

/// Every certificate whose hypotheses hold.
pub fn corollary_certificates(system: &PwlSystem) -> Vec<Certificate> {
    let (tl, tr, b) = (system.left.trace, system.right.trace, system.b);
    let mut out = Vec::new();
    if tl == 0.0 && tr == 0.0 {
        if b != 0.0 {
            out.push(Certificate::VanishingTracesOffset);
        } else if PwlHalfMaps::new(system).is_ok_and(|m| m.common_interval().is_some()) {
            out.push(Certificate::VanishingTracesContinuum);
        }
    }
    if tl * tr >= 0.0 && ((tl != 0.0 && tl * b >= 0.0) || (tr != 0.0 && tr * b >= 0.0)) {
        out.push(Certificate::TraceSign);
    }
    // with T_L = 0 the merged statement needs T_R = 0 or T_R b >= 0 as well
    if tl * tr >= 0.0 && tl * b >= 0.0 && (tl != 0.0 || tr == 0.0 || tr * b >= 0.0) {
        out.push(Certificate::NoLimitCycles);
    }
    if tl * tr > 0.0 {
        out.push(Certificate::AtMostTwo);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    None,
    Continuum,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Stable,
    Unstable,
    Nonhyperbolic,
}

/// One crossing periodic orbit through `(0, y0)` and `(0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingOrbit {
    pub y0: f64,
    pub y1: f64,
    pub multiplier: f64,
    pub stability: Stability,
    /// Found as a double zero of the displacement (no sign change).
    pub tangential: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingOrbitReport {
    pub classification: Classification,
    pub orbits: Vec<CrossingOrbit>,
    /// The certificate that decided the classification, if one did.
    pub certificate: Option<Certificate>,
    /// All certificates whose hypotheses hold.
    pub applicable: Vec<Certificate>,
    pub common_interval: Option<CommonInterval>,
    /// Displacement evaluations spent.
    pub evaluations: usize,
}

impl CrossingOrbitReport {
    fn empty(applicable: Vec<Certificate>, common: Option<CommonInterval>) -> Self {
        Self {
            classification: Classification::None,
            orbits: Vec::new(),
            certificate: None,
            applicable,
            common_interval: common,
            evaluations: 0,
        }
    }
}

/// Settings of the numeric crossing-orbit search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Evenly spaced interior points of the grid (before end grading).
    pub grid_points: usize,
    /// Halvings toward each finite end of the common interval.
    pub end_levels: usize,
    /// The unbounded part is scanned up to `10^tail_decades · scale`.
    pub tail_decades: f64,
    pub root_tol: f64,
    /// A local minimum of `|y_L - y_R|` below this (relative to `1 + y0`) is a double zero.
    pub tangential_tol: f64,
    pub continuum_tol: f64,
    pub continuum_samples: usize,
    /// `|multiplier - 1|` at or below this is nonhyperbolic.
    pub hyperbolic_band: f64,
    pub max_evaluations: usize,
    /// Let certificates decide before any numerics.
    pub use_certificates: bool,
    pub execution: Execution,
    pub solver: SolverConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_points: 256,
            end_levels: 40,
            tail_decades: 6.0,
            root_tol: 1e-11,
            tangential_tol: 1e-9,
            continuum_tol: 1e-12,
            continuum_samples: 64,
            hyperbolic_band: 1e-6,
            max_evaluations: 50_000,
            use_certificates: true,
            execution: Execution::default(),
            solver: SolverConfig::default(),
        }
    }
}

/// Interior points of `j`, graded geometrically toward finite ends and
/// logarithmically along an unbounded tail.
pub fn graded_grid(j: &CommonInterval, scale: f64, config: &SearchConfig) -> Vec<f64> {
    let n = config.grid_points.max(2);
    let mut pts = Vec::with_capacity(n + 2 * config.end_levels + 128);
    let lo = j.lower;
    let (hi, tail_end) = if j.is_bounded() {
        (j.upper, None)
    } else {
        let core = lo + 20.0 * scale.max(lo.abs());
        (core, Some(lo + 10f64.powf(config.tail_decades) * scale))
    };
    let len = hi - lo;
    let cell = len / (n + 1) as f64;
    for k in 1..=n {
        pts.push(lo + cell * k as f64);
    }
    let mut f = 0.5;
    for _ in 0..config.end_levels {
        pts.push(lo + cell * f);
        if j.is_bounded() {
            pts.push(hi - cell * f);
        }
        f *= 0.5;
    }
    if let Some(end) = tail_end {
        pts.push(hi);
        let mut y = hi;
        while y < end {
            y = lo + (y - lo) * 1.25;
            pts.push(y.min(end));
        }
    }
    pts.retain(|&y| j.contains(y));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn budget_error(reason: String, partial: CrossingOrbitReport) -> HalfMapError {
    HalfMapError::SearchBudgetExceeded {
        reason,
        partial: Box::new(partial),
    }
}

/// Sign of `y_L - y_R` as `y0 -> +inf`, from the expansions at infinity of
/// both maps. `None` when either zone has no rotation or the leading terms tie.
fn sign_at_infinity(system: &PwlSystem, tol: f64) -> Option<i8> {
    let l = taylor_infinity(&system.left, 3).ok()?.coefficients();
    let r = taylor_infinity(&system.reflected_right(), 3)
        .ok()?
        .coefficients();
    let b = system.b;
    // y_R(y) = r1 (y - b) + r0 + b + r_{-1} / (y - b) + ...
    let diffs = [l[0] - r[0], l[1] - (r[1] - r[0] * b + b), l[2] - r[2]];
    let mags = [
        l[0].abs() + r[0].abs(),
        l[1].abs() + r[1].abs() + (r[0] * b).abs() + b.abs(),
        l[2].abs() + r[2].abs(),
    ];
    diffs
        .iter()
        .zip(mags)
        .find(|(d, m)| d.abs() > tol * m.max(1.0))
        .map(|(d, _)| sign(*d))
}

/// Finds and classifies the crossing periodic orbits of `system`.
pub fn find_crossing_orbits(
    system: &PwlSystem,
    config: &SearchConfig,
) -> Result<CrossingOrbitReport> {
    let applicable = corollary_certificates(system);
    let maps = match PwlHalfMaps::with_solver(system, config.solver) {
        Ok(m) => m,
        Err(HalfMapError::NonexistentHalfMap(_)) => {
            return Ok(CrossingOrbitReport::empty(applicable, None));
        }
        Err(e) => return Err(e),
    };
    let mut report = CrossingOrbitReport::empty(applicable.clone(), maps.common_interval());
    let Some(j) = maps.common_interval() else {
        return Ok(report);
    };
    if config.use_certificates {
        let decisive = applicable
            .iter()
            .find(|c| matches!(c.conclusion(), Conclusion::NoOrbits | Conclusion::Continuum));
        if let Some(&c) = decisive {
            report.certificate = Some(c);
            report.classification = match c.conclusion() {
                Conclusion::Continuum => Classification::Continuum,
                _ => Classification::None,
            };
            return Ok(report);
        }
    }

    let grid = graded_grid(&j, system.scale(), config);
    if grid.len() > config.max_evaluations {
        return Err(budget_error(
            format!(
                "grid of {} points exceeds the cap {}",
                grid.len(),
                config.max_evaluations
            ),
            report,
        ));
    }
    let values = sweep::map(config.execution, &grid, |&y| maps.displacement(y).ok());
    report.evaluations = grid.len();
    let samples: Vec<(f64, f64)> = grid
        .iter()
        .zip(values)
        .filter_map(|(&y, d)| d.filter(|v| v.is_finite()).map(|d| (y, d)))
        .collect();
    if samples.len() < 2 {
        return Err(budget_error(
            "displacement could not be evaluated on the grid".into(),
            report,
        ));
    }

    if is_continuum(&samples, config) {
        report.classification = Classification::Continuum;
        report.certificate = applicable
            .iter()
            .copied()
            .find(|c| *c == Certificate::VanishingTracesContinuum);
        return Ok(report);
    }
    if config.use_certificates && applicable.contains(&Certificate::NoLimitCycles) {
        report.certificate = Some(Certificate::NoLimitCycles);
        return Ok(report);
    }

    let d = |y: f64| maps.displacement(y).unwrap_or(f64::NAN);
    let mut evals = 0usize;
    let mut roots: Vec<(f64, bool)> = Vec::new();
    let solver = SolverConfig {
        abs_tol: config.root_tol,
        max_iters: config.solver.max_iters.max(200),
    };
    let refine = |lo: f64, hi: f64, evals: &mut usize| -> Option<f64> {
        let cfg = SolverConfig {
            abs_tol: solver.abs_tol * 1f64.max(lo.abs()),
            ..solver
        };
        *evals += cfg.max_iters;
        brent(d, lo, hi, &cfg).ok()
    };
    for w in samples.windows(2) {
        let ((y_a, d_a), (y_b, d_b)) = (w[0], w[1]);
        if d_a == 0.0 {
            roots.push((y_a, false));
        } else if d_a * d_b < 0.0 {
            if let Some(r) = refine(y_a, y_b, &mut evals) {
                roots.push((r, false));
            }
        }
    }
    if let Some(&(y, 0.0)) = samples.last() {
        roots.push((y, false));
    }
    for w in samples.windows(3) {
        let ((y_a, d_a), (_, d_m), (y_b, d_b)) = (w[0], w[1], w[2]);
        let s = d_m.signum();
        if d_m == 0.0 || d_a * d_m <= 0.0 || d_m * d_b <= 0.0 {
            continue;
        }
        if !(d_m.abs() < d_a.abs() && d_m.abs() <= d_b.abs()) {
            continue;
        }
        // smallest signed value between the neighbours
        let (x, fx) = golden_min(|y| s * d(y), y_a, y_b, 200);
        evals += 200;
        if !fx.is_finite() {
            continue;
        }
        if fx < 0.0 {
            // two transversal zeros closer than the grid spacing
            roots.extend(refine(y_a, x, &mut evals).map(|r| (r, false)));
            roots.extend(refine(x, y_b, &mut evals).map(|r| (r, false)));
        } else {
            let margin = 1e-3 * (y_b - y_a);
            let deep = fx <= 1e-3 * d_a.abs().min(d_b.abs());
            if fx <= config.tangential_tol * (1.0 + x.abs())
                && deep
                && x - y_a > margin
                && y_b - x > margin
            {
                roots.push((x, true));
            }
        }
    }

    if !j.is_bounded() {
        let &(y_last, d_last) = samples.last().expect("two samples");
        if let Some(s_inf) = sign_at_infinity(system, 1e-12) {
            if s_inf != sign(d_last) && d_last != 0.0 {
                // one more sign change beyond the scanned tail
                let mut lo = y_last;
                let mut hit = None;
                for _ in 0..200 {
                    let hi = lo * 2.0;
                    let v = d(hi);
                    evals += 1;
                    if v.is_finite() && sign(v) != sign(d_last) {
                        hit = refine(lo, hi, &mut evals);
                        break;
                    }
                    lo = hi;
                    if !hi.is_finite() {
                        break;
                    }
                }
                match hit {
                    Some(r) => roots.push((r, false)),
                    None => {
                        report.evaluations += evals;
                        return Err(budget_error(
                            "sign change beyond the scanned tail was not located".into(),
                            report,
                        ));
                    }
                }
            }
        } else if system.left.is_monodromic() && system.right.is_monodromic() {
            report.evaluations += evals;
            report.orbits = build_orbits(&maps, roots, config);
            report.classification = classify(&report.orbits);
            return Err(budget_error(
                "expansions at infinity tie; the far tail is unresolved".into(),
                report,
            ));
        }
    }

    report.evaluations += evals;
    if report.evaluations > config.max_evaluations {
        report.orbits = build_orbits(&maps, roots, config);
        report.classification = classify(&report.orbits);
        return Err(budget_error(
            format!(
                "{} evaluations exceed the cap {}",
                report.evaluations, config.max_evaluations
            ),
            report,
        ));
    }
    report.orbits = build_orbits(&maps, roots, config);
    report.classification = classify(&report.orbits);
    Ok(report)
}

fn classify(orbits: &[CrossingOrbit]) -> Classification {
    if orbits.is_empty() {
        Classification::None
    } else {
        Classification::Finite
    }
}

fn is_continuum(samples: &[(f64, f64)], config: &SearchConfig) -> bool {
    let k = config.continuum_samples.max(2);
    if samples.len() < k {
        return samples
            .iter()
            .all(|&(y, d)| d.abs() <= config.continuum_tol * (1.0 + y.abs()));
    }
    (0..k)
        .map(|i| samples[i * (samples.len() - 1) / (k - 1)])
        .all(|(y, d)| d.abs() <= config.continuum_tol * (1.0 + y.abs()))
}

fn build_orbits(
    maps: &PwlHalfMaps,
    mut roots: Vec<(f64, bool)>,
    config: &SearchConfig,
) -> Vec<CrossingOrbit> {
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-9 * (1.0 + b.0.abs()));
    let seg = maps.system().sliding_segment();
    roots
        .into_iter()
        .filter_map(|(y0, tangential)| {
            let y1 = maps.forward(y0).ok()?;
            if seg.touches(y0) || seg.touches(y1) || y1 >= 0.0 || y0 <= 0.0 {
                return None;
            }
            let multiplier = maps.multiplier(y0).ok()?;
            let stability = if (multiplier - 1.0).abs() <= config.hyperbolic_band || tangential {
                Stability::Nonhyperbolic
            } else if multiplier < 1.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            };
            Some(CrossingOrbit {
                y0,
                y1,
                multiplier,
                stability,
                tangential,
            })
        })
        .collect()
}

/// The right-zone vector field in forward time.
pub fn right_zone_flow(system: &PwlSystem) -> AffineFlow {
    let r = system.right;
    AffineFlow::new([[r.trace, -1.0], [r.det, 0.0]], [system.b, -r.offset])
}

/// `y_R(y0)` by integrating the right zone backward in time from `(0, y0)`.
pub fn oracle_backward_map(system: &PwlSystem, y0: f64) -> Result<f64> {
    let flow = right_zone_flow(system).reversed();
    Ok(first_return_in(&flow, y0, Side::Right, &ReturnBudget::default())?.exit_y)
}

/// `y_L(y0)` from the left flow.
pub fn oracle_forward_map(system: &PwlSystem, y0: f64) -> Result<f64> {
    oracle_half_map(&system.left, y0)
}

/// Ordinate after one full circuit from `(0, y0)`: a left pass, then a
/// forward right pass.
pub fn oracle_circuit(system: &PwlSystem, y0: f64) -> Result<f64> {
    let y1 = oracle_forward_map(system, y0)?;
    let flow = right_zone_flow(system);
    Ok(first_return_in(&flow, y1, Side::Right, &ReturnBudget::default())?.exit_y)
}
