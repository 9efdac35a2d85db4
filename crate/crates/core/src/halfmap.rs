//! The left Poincaré half-map `P` of `x' = T x - y, y' = D x - a` on the
//! section `x = 0`, evaluated from its integral characterization
//!
//! ```text
//! PV ∫_{P(y0)}^{y0} -y / W(y) dy = c T
//! ```
//!
//! instead of integrating the flow. The left-hand side is strictly
//! decreasing in `P(y0)` (its derivative is `y1 / W(y1) < 0`), so every
//! evaluation is a bracketed monotone root find.

use serde::Serialize;

use crate::error::{HalfMapError, Result};
use crate::integral::{c_constant, Antiderivative};
use crate::params::{sign, LienardParams};
use crate::series;
use crate::solve::{brent_with_values, SolverConfig};

/// How an interval endpoint is attained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndpointKind {
    ClosedAtValue,
    OpenAtRootOfW,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Endpoint {
    pub value: f64,
    pub kind: EndpointKind,
}

impl Endpoint {
    fn closed(value: f64) -> Self {
        Self {
            value,
            kind: EndpointKind::ClosedAtValue,
        }
    }

    fn root(value: f64) -> Self {
        Self {
            value,
            kind: EndpointKind::OpenAtRootOfW,
        }
    }

    fn infinite(value: f64) -> Self {
        Self {
            value,
            kind: EndpointKind::Unbounded,
        }
    }

    fn from_root(root: Option<f64>, infinity: f64) -> Self {
        root.map_or(Self::infinite(infinity), Self::root)
    }
}

/// Definition interval `I` of `P` and its image `P(I)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainInfo {
    pub exists: bool,
    pub lower: Endpoint,
    pub upper: Endpoint,
    pub image_lower: Endpoint,
    pub image_upper: Endpoint,
    /// `ŷ0 > 0` with `P(ŷ0) = 0` (stable focus in the left half-plane).
    pub hat_y0: Option<f64>,
    /// `ŷ1 = P(0) < 0` (unstable focus in the left half-plane).
    pub hat_y1: Option<f64>,
    /// Why the map does not exist, when it does not.
    pub reason: Option<String>,
}

impl DomainInfo {
    fn nonexistent(reason: String) -> Self {
        let nan = Endpoint::closed(f64::NAN);
        Self {
            exists: false,
            lower: nan,
            upper: nan,
            image_lower: nan,
            image_upper: nan,
            hat_y0: None,
            hat_y1: None,
            reason: Some(reason),
        }
    }

    /// `y0 ∈ I`.
    pub fn contains(&self, y0: f64) -> bool {
        self.exists && y0 >= self.lower.value && below_upper(&self.upper, y0)
    }

    /// `y0 ∈ int(I)`.
    pub fn contains_interior(&self, y0: f64) -> bool {
        self.exists && y0 > self.lower.value && below_upper(&self.upper, y0)
    }

    /// `y1 ∈ P(I)`.
    pub fn image_contains(&self, y1: f64) -> bool {
        self.exists
            && y1 <= self.image_upper.value
            && match self.image_lower.kind {
                EndpointKind::Unbounded => y1 > f64::NEG_INFINITY,
                _ => y1 > self.image_lower.value,
            }
    }

    pub(crate) fn describe(&self) -> String {
        if !self.exists {
            return "empty".into();
        }
        let open_hi = matches!(self.upper.kind, EndpointKind::ClosedAtValue);
        format!(
            "[{}, {}{}",
            self.lower.value,
            self.upper.value,
            if open_hi { "]" } else { ")" }
        )
    }

    fn describe_image(&self) -> String {
        if !self.exists {
            return "empty".into();
        }
        format!("({}, {}]", self.image_lower.value, self.image_upper.value)
    }
}

fn below_upper(upper: &Endpoint, y: f64) -> bool {
    match upper.kind {
        EndpointKind::Unbounded => y < f64::INFINITY,
        EndpointKind::OpenAtRootOfW => y < upper.value,
        EndpointKind::ClosedAtValue => y <= upper.value,
    }
}

/// Which evaluation route applies to a parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Route {
    /// `T = 0`: the integrand is odd, so `P(y0) = -y0`.
    Negation,
    /// `a = 0`: `P(y0) = -exp(πT / sqrt(4D - T^2)) y0`.
    Linear {
        factor: f64,
    },
    General,
}

/// Below this multiple of `|a| / max(1, |T|)` the origin jet replaces the root find.
const TANGENCY_WINDOW: f64 = 1e-4;
const TANGENCY_ORDER: usize = 6;
/// Relative distance to a root of `W` below which values are solved for in split form.
const NEAR_ROOT: f64 = 1e-3;

/// A left half-map with its domain precomputed.
#[derive(Debug, Clone)]
pub struct HalfMap {
    params: LienardParams,
    anti: Antiderivative,
    /// Right-hand side `c T`.
    target: f64,
    domain: DomainInfo,
    route: Route,
    /// Origin jet coefficients `c1..c6` when `a != 0` and `P(0) = 0`.
    origin_jet: Option<Vec<f64>>,
    tangency_radius: f64,
    solver: SolverConfig,
}

impl HalfMap {
    pub fn new(params: LienardParams) -> Result<Self> {
        Self::with_solver(params, SolverConfig::default())
    }

    pub fn with_solver(params: LienardParams, solver: SolverConfig) -> Result<Self> {
        let params = LienardParams::new(params.trace, params.det, params.offset)?;
        let c = c_constant(&params)?.c;
        let (t, a) = (params.trace, params.offset);
        let anti = Antiderivative::new(&params);
        let target = c * t;
        let route = if t == 0.0 {
            Route::Negation
        } else if a == 0.0 {
            Route::Linear {
                factor: (std::f64::consts::PI * t / params.focus_discriminant().sqrt()).exp(),
            }
        } else {
            Route::General
        };
        let w = anti.w().clone();
        let (hat_y0, hat_y1) = if a < 0.0 && t > 0.0 {
            // ∫_{ŷ1}^0 -y/W = cT, i.e. -H(ŷ1) = cT
            let y = solve_unbounded(|y| -anti.eval_unchecked(y) - target, -1.0, &solver)?;
            (None, Some(y))
        } else if a < 0.0 && t < 0.0 {
            // H(ŷ0) = cT
            let y = solve_unbounded(|y| anti.eval_unchecked(y) - target, 1.0, &solver)?;
            (Some(y), None)
        } else {
            (None, None)
        };
        let domain = DomainInfo {
            exists: true,
            lower: Endpoint::closed(hat_y0.unwrap_or(0.0)),
            upper: Endpoint::from_root(w.positive_root(), f64::INFINITY),
            image_lower: Endpoint::from_root(w.negative_root(), f64::NEG_INFINITY),
            image_upper: Endpoint::closed(hat_y1.unwrap_or(0.0)),
            hat_y0,
            hat_y1,
            reason: None,
        };
        let origin_jet = if a != 0.0 && hat_y0.is_none() && hat_y1.is_none() {
            series::origin_coefficients(&params, TANGENCY_ORDER).ok()
        } else {
            None
        };
        Ok(Self {
            params,
            anti,
            target,
            domain,
            route,
            origin_jet,
            tangency_radius: TANGENCY_WINDOW * a.abs() / t.abs().max(1.0),
            solver,
        })
    }

    pub fn params(&self) -> &LienardParams {
        &self.params
    }

    pub fn domain(&self) -> &DomainInfo {
        &self.domain
    }

    /// The right-hand side `c T` of the characterization.
    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn antiderivative(&self) -> &Antiderivative {
        &self.anti
    }

    pub fn solver(&self) -> &SolverConfig {
        &self.solver
    }

    fn out_of_domain(&self, y0: f64) -> HalfMapError {
        HalfMapError::OutOfDomain {
            value: y0,
            domain: format!("I = {}", self.domain.describe()),
        }
    }

    fn in_tangency_window(&self, y: f64) -> Option<&[f64]> {
        self.origin_jet
            .as_deref()
            .filter(|_| y.abs() < self.tangency_radius)
    }

    /// `P(y0)`.
    pub fn eval(&self, y0: f64) -> Result<f64> {
        if !self.domain.contains(y0) {
            return Err(self.out_of_domain(y0));
        }
        match self.route {
            Route::Negation => return Ok(-y0),
            Route::Linear { factor } => return Ok(-factor * y0),
            Route::General => {}
        }
        if let Some(jet) = self.in_tangency_window(y0) {
            return Ok(horner(jet, y0));
        }
        if self.domain.hat_y0 == Some(y0) {
            return Ok(0.0);
        }
        self.solve_image(self.anti.eval_unchecked(y0), y0)
    }

    /// `P(r - eps)` for the upper end `r` of `I` when it is a root of `W`.
    /// Resolves points closer to `r` than the spacing of doubles there.
    pub fn eval_below_upper(&self, eps: f64) -> Result<f64> {
        let r = self.endpoint_root(self.domain.upper, "I")?;
        let y0 = r - eps;
        if !(eps > 0.0 && eps <= r - self.domain.lower.value) {
            return Err(self.out_of_domain(y0));
        }
        if eps > NEAR_ROOT * r.abs() || self.route != Route::General {
            return self.eval(y0);
        }
        let h0 = self
            .anti
            .eval_near_root(r, -eps)
            .ok_or_else(|| self.out_of_domain(y0))?;
        self.solve_image(h0, y0)
    }

    /// `P(y0) - r` for the lower end `r` of `P(I)` when it is a root of `W`.
    /// Accurate relative to itself where `P(y0)` is within rounding of `r`.
    pub fn image_offset(&self, y0: f64) -> Result<f64> {
        let r = self.endpoint_root(self.domain.image_lower, "P(I)")?;
        let p = self.eval(y0)?;
        Ok(self.refined_offset(r, y0, p))
    }

    fn endpoint_root(&self, end: Endpoint, name: &str) -> Result<f64> {
        if end.kind == EndpointKind::OpenAtRootOfW {
            Ok(end.value)
        } else {
            Err(HalfMapError::PreconditionViolated(format!(
                "the end of {name} at {} is not a root of W",
                end.value
            )))
        }
    }

    /// `P(y0) - r` given `p = P(y0)`, refined through the logarithmic part of `H`
    /// when `p` is close to the root `r`.
    fn refined_offset(&self, r: f64, y0: f64, p: f64) -> f64 {
        let rough = p - r;
        if rough.abs() > NEAR_ROOT * r.abs() || self.route != Route::General {
            return rough;
        }
        let h1 = self.anti.eval_unchecked(y0) - self.target;
        self.anti.solve_near_root(r, h1).unwrap_or(rough)
    }

    /// Solves `H(y1) = h0 - cT` for `y1 < 0`.
    fn solve_image(&self, h0: f64, y0: f64) -> Result<f64> {
        let target = self.target;
        let objective = |y1: f64| h0 - self.anti.eval_unchecked(y1) - target;
        let at_zero = objective(0.0);
        if at_zero >= 0.0 {
            // only reachable at (or a rounding error away from) ŷ0 or the origin
            return Ok(0.0);
        }
        let end = self.domain.image_lower;
        if end.kind == EndpointKind::OpenAtRootOfW {
            let r = end.value;
            if objective(r * (1.0 - NEAR_ROOT)) <= 0.0 {
                // the image hugs the root: solve for the offset directly
                if let Some(d) = self.anti.solve_near_root(r, h0 - target) {
                    return Ok(r + d);
                }
            }
        }
        let (lo, f_lo) = self
            .bracket_outward(&objective, end, -1.0, y0)
            .ok_or_else(|| self.out_of_domain(y0))?;
        if f_lo <= 0.0 {
            return Ok(lo);
        }
        brent_with_values(objective, lo, f_lo, 0.0, at_zero, &self.solver)
    }

    /// `P^{-1}(y1)` for `y1 ∈ P(I)`.
    pub fn inverse(&self, y1: f64) -> Result<f64> {
        if !self.domain.image_contains(y1) {
            return Err(HalfMapError::OutOfDomain {
                value: y1,
                domain: format!("P(I) = {}", self.domain.describe_image()),
            });
        }
        match self.route {
            Route::Negation => return Ok(-y1),
            Route::Linear { factor } => return Ok(-y1 / factor),
            Route::General => {}
        }
        if let Some(jet) = self.in_tangency_window(y1) {
            // P is an involution here, so the same jet inverts it
            return Ok(horner(jet, y1));
        }
        let h1 = self.anti.eval_unchecked(y1);
        let target = self.target;
        let objective = |y0: f64| self.anti.eval_unchecked(y0) - h1 - target;
        let lo = self.domain.lower.value;
        let at_lo = objective(lo);
        if at_lo <= 0.0 {
            return Ok(lo);
        }
        let (hi, f_hi) = self
            .bracket_outward(&objective, self.domain.upper, 1.0, -y1)
            .ok_or(HalfMapError::OutOfDomain {
                value: y1,
                domain: format!("P(I) = {}", self.domain.describe_image()),
            })?;
        if f_hi >= 0.0 {
            return Ok(hi);
        }
        brent_with_values(objective, lo, at_lo, hi, f_hi, &self.solver)
    }

    /// Walks from 0 towards `end` (a root of `W`, approached geometrically, or
    /// infinity, by doubling) until the objective is positive when walking
    /// left (`direction < 0`) or negative when walking right. Next to a root
    /// the last representable probe is returned even without a sign change:
    /// the solution is then within rounding of the root.
    fn bracket_outward<F>(
        &self,
        objective: &F,
        end: Endpoint,
        direction: f64,
        hint: f64,
    ) -> Option<(f64, f64)>
    where
        F: Fn(f64) -> f64,
    {
        let done = |v: f64| if direction < 0.0 { v > 0.0 } else { v < 0.0 };
        match end.kind {
            EndpointKind::OpenAtRootOfW => {
                let r = end.value;
                let mut frac = 0.5;
                let mut last = None;
                for _ in 0..64 {
                    let y = r * (1.0 - frac);
                    if y == r {
                        break;
                    }
                    let v = objective(y);
                    if done(v) {
                        return Some((y, v));
                    }
                    if v.is_finite() {
                        last = Some((y, v));
                    }
                    frac *= 0.5;
                }
                last
            }
            _ => {
                let mut k = hint.abs().max(1.0);
                for _ in 0..1100 {
                    let y = direction * k;
                    if !y.is_finite() {
                        break;
                    }
                    let v = objective(y);
                    if done(v) {
                        return Some((y, v));
                    }
                    k *= 2.0;
                }
                None
            }
        }
    }

    /// `P'(y0) = y0 W(P) / (P W(y0))` on `int(I)`.
    pub fn derivative1(&self, y0: f64) -> Result<f64> {
        let p = self.interior_value(y0)?;
        Ok(y0 * self.w_at_image(y0, p) / (p * self.w_at_domain(y0)))
    }

    /// `W(y0)`, factored next to the upper root of `I`.
    fn w_at_domain(&self, y0: f64) -> f64 {
        let end = self.domain.upper;
        if end.kind == EndpointKind::OpenAtRootOfW
            && (y0 - end.value).abs() <= NEAR_ROOT * end.value.abs()
        {
            if let Some(w) = self.anti.w_near_root(end.value, y0 - end.value) {
                return w;
            }
        }
        self.anti.w().eval(y0)
    }

    /// `W(P(y0))`, factored through the refined offset next to the lower root of `P(I)`.
    fn w_at_image(&self, y0: f64, p: f64) -> f64 {
        let end = self.domain.image_lower;
        if end.kind == EndpointKind::OpenAtRootOfW
            && (p - end.value).abs() <= NEAR_ROOT * end.value.abs()
        {
            let d = self.refined_offset(end.value, y0, p);
            if let Some(w) = self.anti.w_near_root(end.value, d) {
                return w;
            }
        }
        self.anti.w().eval(p)
    }

    /// `P''(y0) = -a^2 (y0^2 - P^2) W(P) / (P^3 W(y0)^2)` on `int(I)`.
    pub fn derivative2(&self, y0: f64) -> Result<f64> {
        let p = self.interior_value(y0)?;
        let a = self.params.offset;
        let wy0 = self.w_at_domain(y0);
        // y0^2 - P^2 = (y0 - P)(y0 + P); the second factor carries the sign law
        let spread = (y0 - p) * self.bisector_gap(y0, p);
        Ok(-a * a * spread * self.w_at_image(y0, p) / (p * p * p * wy0 * wy0))
    }

    fn interior_value(&self, y0: f64) -> Result<f64> {
        if !self.domain.contains_interior(y0) {
            return Err(HalfMapError::OutOfDomain {
                value: y0,
                domain: format!("int(I) with I = {}", self.domain.describe()),
            });
        }
        let p = self.eval(y0)?;
        if p == 0.0 {
            return Err(HalfMapError::TangencyPoint(y0));
        }
        Ok(p)
    }

    /// `y0 + P(y0)`, computed without cancellation inside the tangency window.
    fn bisector_gap(&self, y0: f64, p: f64) -> f64 {
        match (self.route, self.in_tangency_window(y0)) {
            (Route::Negation, _) => 0.0,
            (Route::General, Some(jet)) => horner(&jet[1..], y0) * y0,
            _ => y0 + p,
        }
    }

    /// `sign(y0 + P(y0))`; equals `-sign(T)` on `I \ {0}`.
    pub fn bisector_position(&self, y0: f64) -> Result<i8> {
        let p = self.eval(y0)?;
        Ok(sign(self.bisector_gap(y0, p)))
    }

    /// Residual of the characterization: `PV ∫_{P(y0)}^{y0} -y/W - cT`.
    pub fn residual(&self, y0: f64) -> Result<f64> {
        let p = self.eval(y0)?;
        if self.params.offset == 0.0 {
            return Ok(self.anti.integral(p, y0)? - self.target);
        }
        Ok(self.anti.eval_unchecked(y0) - self.anti.eval_unchecked(p) - self.target)
    }
}

/// `Σ_{k>=1} c_k y^k` for `coeffs = [c1, c2, ...]`.
fn horner(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| (acc + c) * y)
}

/// Root of `f` on the half-line starting at 0 in `direction`, bracketed by doubling.
fn solve_unbounded<F>(f: F, direction: f64, solver: &SolverConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let f0 = f(0.0);
    let mut k = 1.0;
    for _ in 0..1100 {
        let y = direction * k;
        let v = f(y);
        if v.signum() != f0.signum() {
            let (lo, flo, hi, fhi) = if direction < 0.0 {
                (y, v, 0.0, f0)
            } else {
                (0.0, f0, y, v)
            };
            return brent_with_values(&f, lo, flo, hi, fhi, solver);
        }
        k *= 2.0;
    }
    Err(HalfMapError::NoConvergence {
        iterations: 1100,
        context: "could not bracket the tangency preimage".into(),
    })
}

/// `I`, `P(I)` and the tangency points for one zone.
pub fn domain_interval(params: &LienardParams) -> Result<DomainInfo> {
    let params = LienardParams::new(params.trace, params.det, params.offset)?;
    match HalfMap::new(params) {
        Ok(map) => Ok(map.domain),
        Err(HalfMapError::NonexistentHalfMap(reason)) => Ok(DomainInfo::nonexistent(reason)),
        Err(e) => Err(e),
    }
}

pub fn half_map(params: &LienardParams, y0: f64) -> Result<f64> {
    HalfMap::new(*params)?.eval(y0)
}

pub fn half_map_inverse(params: &LienardParams, y1: f64) -> Result<f64> {
    HalfMap::new(*params)?.inverse(y1)
}

pub fn derivative1(params: &LienardParams, y0: f64) -> Result<f64> {
    HalfMap::new(*params)?.derivative1(y0)
}

pub fn derivative2(params: &LienardParams, y0: f64) -> Result<f64> {
    HalfMap::new(*params)?.derivative2(y0)
}

pub fn bisector_position(params: &LienardParams, y0: f64) -> Result<i8> {
    HalfMap::new(*params)?.bisector_position(y0)
}
