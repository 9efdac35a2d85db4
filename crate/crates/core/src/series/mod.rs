//! Jets of the half-map at the ends of its domain: the tangency point, the
//! tangency preimage `ŷ0`, and infinity.
//!
//! Every finite jet comes from undetermined coefficients on
//!
//! ```text
//! y1 W(y0) dy1 - y0 W(y1) dy0 = 0
//! ```
//!
//! after the substitution `y0 = x(s)` suited to the anchor (`x = s` for Taylor
//! jets, `x = ŷ0 + s^2` for the half-integer jet at `ŷ0`). The jet at infinity
//! is built from the one-sided derivatives `α1..α4` of `u -> 1/P(1/u)`.

mod exact;
mod invert;
mod kernel;

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::error::{HalfMapError, Result};
use crate::halfmap::HalfMap;
use crate::params::LienardParams;

pub use exact::{taylor_origin_exact, to_f64 as rational_to_f64};
pub use kernel::Scalar;

use invert::{revert, revert_square};
use kernel::{Residual, Substitution};

/// Largest order accepted for Taylor jets.
pub const TAYLOR_ORDER_CAP: usize = 20;
/// Largest number of half-steps accepted for the jet at `ŷ0`.
pub const PUISEUX_ORDER_CAP: usize = 24;
/// Terms available at infinity (`α1..α4`).
pub const INFINITY_ORDER_CAP: usize = 4;

/// Where a jet is anchored and in which variable it is written.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Anchor {
    /// Powers of `y0`, no constant term.
    Origin,
    /// Powers of `y0` with constant term `value`.
    ShiftedOrigin { value: f64 },
    /// Powers of `sqrt(direction (y0 - center))`.
    Puiseux { center: f64, direction: f64 },
    /// Powers of `y0` (descending from 1) for large `y0`.
    Infinity,
    /// Powers of `y0 - center`.
    Point { center: f64 },
}

/// `coefficient * X^(half_exponent / 2)` where `X` is the anchor's variable
/// (for [`Anchor::Puiseux`] the exponent is on `y0 - center`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub half_exponent: i32,
    pub coefficient: f64,
}

impl Term {
    pub fn exponent(&self) -> f64 {
        f64::from(self.half_exponent) / 2.0
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&self.exponent())?;
        t.serialize_element(&self.coefficient)?;
        t.end()
    }
}

/// A truncated expansion of `P` at an anchor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSeries {
    pub anchor: Anchor,
    pub terms: Vec<Term>,
}

impl PowerSeries {
    fn integer_terms(anchor: Anchor, coeffs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let terms = coeffs
            .into_iter()
            .map(|(k, coefficient)| Term {
                half_exponent: 2 * k as i32,
                coefficient,
            })
            .collect();
        Self { anchor, terms }
    }

    /// Number of stored terms.
    pub fn order(&self) -> usize {
        self.terms.len()
    }

    /// Exponent increment between consecutive terms.
    pub fn step(&self) -> f64 {
        match self.anchor {
            Anchor::Puiseux { .. } => 0.5,
            Anchor::Infinity => -1.0,
            _ => 1.0,
        }
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    /// Coefficient of the given exponent, if stored.
    pub fn coefficient(&self, exponent: f64) -> Option<f64> {
        self.terms
            .iter()
            .find(|t| t.exponent() == exponent)
            .map(|t| t.coefficient)
    }

    /// Evaluates the truncated series at `y0`.
    pub fn eval(&self, y0: f64) -> Result<f64> {
        let (base, per_half) = match self.anchor {
            Anchor::Origin | Anchor::ShiftedOrigin { .. } => (y0, false),
            Anchor::Point { center } => (y0 - center, false),
            Anchor::Puiseux { center, direction } => {
                let v = direction * (y0 - center);
                if v < 0.0 || v.is_nan() {
                    return Err(HalfMapError::WrongSide(format!(
                        "y0 = {y0} lies on the wrong side of {center}"
                    )));
                }
                (v.sqrt(), true)
            }
            Anchor::Infinity => {
                if y0 <= 0.0 || y0.is_nan() {
                    return Err(HalfMapError::WrongSide(format!(
                        "expansion at infinity needs y0 > 0, got {y0}"
                    )));
                }
                (y0, false)
            }
        };
        Ok(self
            .terms
            .iter()
            .rev()
            .map(|t| {
                let k = if per_half {
                    t.half_exponent
                } else {
                    t.half_exponent / 2
                };
                t.coefficient * base.powi(k)
            })
            .sum())
    }

    /// Dense coefficients in the anchor variable; `None` for the infinity anchor.
    fn dense(&self) -> Option<Vec<f64>> {
        let per_half = match self.anchor {
            Anchor::Infinity => return None,
            Anchor::Puiseux { .. } => true,
            _ => false,
        };
        let index = |t: &Term| {
            if per_half {
                t.half_exponent as usize
            } else {
                (t.half_exponent / 2) as usize
            }
        };
        if self.terms.iter().any(|t| t.half_exponent < 0) {
            return None;
        }
        let len = self.terms.iter().map(|t| index(t) + 1).max().unwrap_or(0);
        let mut c = vec![0.0; len];
        for t in &self.terms {
            c[index(t)] += t.coefficient;
        }
        Some(c)
    }
}

/// The one-sided derivatives at `0+` of `u -> 1/P(1/u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfinityInversionJet {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub alpha4: f64,
}

impl InfinityInversionJet {
    /// Coefficients of `y0, 1, 1/y0, 1/y0^2` in the expansion of `P`.
    pub fn expansion(&self) -> [f64; 4] {
        let (a1, a2, a3, a4) = (self.alpha1, self.alpha2, self.alpha3, self.alpha4);
        [
            1.0 / a1,
            -a2 / (2.0 * a1 * a1),
            (3.0 * a2 * a2 - 2.0 * a1 * a3) / (12.0 * a1.powi(3)),
            -(3.0 * a2.powi(3) - 4.0 * a1 * a2 * a3 + a1 * a1 * a4) / (24.0 * a1.powi(4)),
        ]
    }
}

pub(crate) fn origin_precondition(sign_a: i8, trace_zero: bool, focus: bool) -> Result<()> {
    let fail = |m: &str| Err(HalfMapError::PreconditionViolated(m.to_string()));
    match sign_a {
        0 => fail("requires a != 0"),
        s if s < 0 && !focus => fail("requires 4D - T^2 > 0 when a < 0"),
        s if s < 0 && !trace_zero => fail("requires P(0) = 0, i.e. a > 0, or a < 0 with T = 0"),
        _ => Ok(()),
    }
}

pub(crate) fn check_origin_order(order: usize) -> Result<()> {
    check_order(order, TAYLOR_ORDER_CAP)
}

fn check_order(order: usize, cap: usize) -> Result<()> {
    if order == 0 || order > cap {
        return Err(HalfMapError::PreconditionViolated(format!(
            "order must lie in 1..={cap}, got {order}"
        )));
    }
    Ok(())
}

fn degenerate(n: usize) -> HalfMapError {
    HalfMapError::PreconditionViolated(format!("degenerate recurrence at order {n}"))
}

fn require_focus(params: &LienardParams) -> Result<()> {
    if params.is_monodromic() {
        Ok(())
    } else {
        Err(HalfMapError::PreconditionViolated(
            "requires 4D - T^2 > 0".to_string(),
        ))
    }
}

/// `c1..c_order` of the origin jet in `f64` (needs `a != 0`).
pub fn origin_coefficients(params: &LienardParams, order: usize) -> Result<Vec<f64>> {
    if params.offset == 0.0 {
        return Err(HalfMapError::PreconditionViolated("requires a != 0".into()));
    }
    let jet = kernel::origin_jet(params.trace, params.det, params.offset, order + 1)
        .map_err(degenerate)?;
    Ok(jet[1..].to_vec())
}

/// Taylor jet of `P` at the origin when `P(0) = 0`. The recurrence runs in
/// exact rational arithmetic on the (exactly representable) inputs and is
/// rounded once at the end.
pub fn taylor_origin(params: &LienardParams, order: usize) -> Result<PowerSeries> {
    check_origin_order(order)?;
    let exact = |v: f64| {
        num_rational::BigRational::from_float(v)
            .ok_or_else(|| HalfMapError::InvalidParams(format!("{v} is not finite")))
    };
    let c = taylor_origin_exact(
        &exact(params.trace)?,
        &exact(params.det)?,
        &exact(params.offset)?,
        order,
    )?;
    Ok(PowerSeries::integer_terms(
        Anchor::Origin,
        c.iter()
            .enumerate()
            .map(|(i, q)| (i + 1, rational_to_f64(q))),
    ))
}

/// Taylor jet of `P` at the origin when `P(0) = ŷ1 < 0`; `order` is the highest power.
pub fn taylor_origin_shifted(params: &LienardParams, order: usize) -> Result<PowerSeries> {
    check_order(order, TAYLOR_ORDER_CAP)?;
    let (t, a) = (params.trace, params.offset);
    if !(a < 0.0 && t > 0.0 && params.is_monodromic()) {
        return Err(HalfMapError::PreconditionViolated(
            "requires P(0) = ŷ1 < 0, i.e. a < 0, T > 0 and 4D - T^2 > 0".into(),
        ));
    }
    let hat = HalfMap::new(*params)?
        .domain()
        .hat_y1
        .ok_or_else(|| HalfMapError::PreconditionViolated("ŷ1 not found".into()))?;
    shifted_series(params, hat, order)
}

/// Taylor jet of `P^{-1}` at the origin when `P(ŷ0) = 0`; `P^{-1}(0) = ŷ0` and
/// the linear coefficient vanishes.
pub fn inverse_jet_at_origin(params: &LienardParams, order: usize) -> Result<PowerSeries> {
    check_order(order, TAYLOR_ORDER_CAP)?;
    let hat = hat_y0(params)?;
    shifted_series(params, hat, order)
}

fn shifted_series(params: &LienardParams, value: f64, order: usize) -> Result<PowerSeries> {
    let jet = kernel::shifted_jet(params.trace, params.det, params.offset, value, order + 1)
        .map_err(degenerate)?;
    Ok(PowerSeries::integer_terms(
        Anchor::ShiftedOrigin { value },
        jet.into_iter().enumerate(),
    ))
}

fn hat_y0(params: &LienardParams) -> Result<f64> {
    let (t, a) = (params.trace, params.offset);
    if !(a < 0.0 && t < 0.0 && params.is_monodromic()) {
        return Err(HalfMapError::PreconditionViolated(
            "requires ŷ0 > 0 with P(ŷ0) = 0, i.e. a < 0, T < 0 and 4D - T^2 > 0".into(),
        ));
    }
    HalfMap::new(*params)?
        .domain()
        .hat_y0
        .ok_or_else(|| HalfMapError::PreconditionViolated("ŷ0 not found".into()))
}

/// Half-integer jet of `P` at `ŷ0`, valid for `y0 >= ŷ0`; `order` counts half-steps.
pub fn puiseux_at_hat_y0(params: &LienardParams, order: usize) -> Result<PowerSeries> {
    check_order(order, PUISEUX_ORDER_CAP)?;
    let hat = hat_y0(params)?;
    let w = params.w().eval(hat);
    // nonpositive branch: a < 0 makes the lead negative
    let lead = params.offset * (2.0 * hat / w).sqrt();
    let jet = kernel::half_step_jet(
        params.trace,
        params.det,
        params.offset,
        hat,
        lead,
        order + 1,
    )
    .map_err(degenerate)?;
    Ok(PowerSeries {
        anchor: Anchor::Puiseux {
            center: hat,
            direction: 1.0,
        },
        terms: jet
            .into_iter()
            .enumerate()
            .skip(1)
            .map(|(k, coefficient)| Term {
                half_exponent: k as i32,
                coefficient,
            })
            .collect(),
    })
}

fn focus_exponent(params: &LienardParams) -> f64 {
    std::f64::consts::PI * params.trace / params.focus_discriminant().sqrt()
}

/// `α1..α4` from their closed forms.
pub fn infinity_jet(params: &LienardParams) -> Result<InfinityInversionJet> {
    require_focus(params)?;
    let (t, d, a) = (params.trace, params.det, params.offset);
    let x = focus_exponent(params);
    let e = x.exp();
    let t2 = t * t;
    Ok(InfinityInversionJet {
        alpha1: -(-x).exp(),
        alpha2: -(2.0 * a * t / d) * (-2.0 * x).exp() * (e + 1.0),
        alpha3: (3.0 * a * a / (d * d))
            * (-3.0 * x).exp()
            * (e + 1.0)
            * (-2.0 * t2 * e + d * e - d - 2.0 * t2),
        alpha4: (4.0 * a.powi(3) * t / d.powi(3))
            * (-4.0 * x).exp()
            * (1.0 + e).powi(2)
            * (-8.0 * d + 7.0 * d * e - 6.0 * t2 - 6.0 * t2 * e),
    })
}

/// `α2..α4` regenerated from `α1` by the reciprocal-variable recurrence.
pub fn infinity_jet_by_recurrence(params: &LienardParams) -> Result<InfinityInversionJet> {
    require_focus(params)?;
    let alpha1 = -(-focus_exponent(params)).exp();
    let beta = kernel::reciprocal_jet(params.trace, params.det, params.offset, alpha1, 5)
        .map_err(degenerate)?;
    Ok(InfinityInversionJet {
        alpha1,
        alpha2: 2.0 * beta[2],
        alpha3: 6.0 * beta[3],
        alpha4: 24.0 * beta[4],
    })
}

/// Expansion of `P` at infinity with `order` terms (powers `1, 0, -1, -2`).
pub fn taylor_infinity(params: &LienardParams, order: usize) -> Result<PowerSeries> {
    check_order(order, INFINITY_ORDER_CAP)?;
    let c = infinity_jet(params)?.expansion();
    Ok(PowerSeries {
        anchor: Anchor::Infinity,
        terms: c
            .iter()
            .take(order)
            .enumerate()
            .map(|(i, &coefficient)| Term {
                half_exponent: 2 - 2 * i as i32,
                coefficient,
            })
            .collect(),
    })
}

pub fn series_eval(s: &PowerSeries, y0: f64) -> Result<f64> {
    s.eval(y0)
}

/// Compositional inverse of a Taylor jet at a finite point. With a vanishing
/// linear and nonzero quadratic coefficient the result is a half-integer jet on
/// the branch where the inverse is nonpositive relative to the original center.
pub fn series_invert(s: &PowerSeries) -> Result<PowerSeries> {
    let center = match s.anchor {
        Anchor::Origin | Anchor::ShiftedOrigin { .. } => 0.0,
        Anchor::Point { center } => center,
        _ => {
            return Err(HalfMapError::NotInvertible(
                "only Taylor jets at a finite point can be inverted".into(),
            ))
        }
    };
    let c = s
        .dense()
        .ok_or_else(|| HalfMapError::NotInvertible("negative exponents".into()))?;
    let coeff = |k: usize| c.get(k).copied().unwrap_or(0.0);
    let c0 = coeff(0);
    let constant = (center != 0.0).then_some(Term {
        half_exponent: 0,
        coefficient: center,
    });
    if coeff(1) != 0.0 {
        let g = revert(&c);
        let anchor = match (c0 == 0.0, center == 0.0) {
            (true, true) => Anchor::Origin,
            (true, false) => Anchor::ShiftedOrigin { value: center },
            (false, _) => Anchor::Point { center: c0 },
        };
        let mut terms: Vec<Term> = match anchor {
            Anchor::Origin => Vec::new(),
            _ => vec![Term {
                half_exponent: 0,
                coefficient: center,
            }],
        };
        terms.extend(g.iter().enumerate().skip(1).map(|(k, &coefficient)| Term {
            half_exponent: 2 * k as i32,
            coefficient,
        }));
        return Ok(PowerSeries { anchor, terms });
    }
    if coeff(2) != 0.0 {
        let e = revert_square(&c);
        let mut terms: Vec<Term> = constant.into_iter().collect();
        terms.extend(e.iter().enumerate().skip(1).map(|(k, &coefficient)| Term {
            half_exponent: k as i32,
            coefficient,
        }));
        return Ok(PowerSeries {
            anchor: Anchor::Puiseux {
                center: c0,
                direction: coeff(2).signum(),
            },
            terms,
        });
    }
    Err(HalfMapError::NotInvertible(
        "linear and quadratic coefficients both vanish".into(),
    ))
}

/// Coefficients of `Y W(x) Y' - x x' W(Y)` for the jet, at the orders fully
/// determined by its stored terms. Not defined for the infinity anchor.
pub fn ode_residual(params: &LienardParams, s: &PowerSeries) -> Result<Vec<f64>> {
    let x = match s.anchor {
        Anchor::Origin | Anchor::ShiftedOrigin { .. } => vec![0.0, 1.0],
        Anchor::Point { center } => vec![center, 1.0],
        Anchor::Puiseux { center, direction } => vec![center, 0.0, direction],
        Anchor::Infinity => {
            return Err(HalfMapError::PreconditionViolated(
                "the residual is defined for finite anchors".into(),
            ))
        }
    };
    let y = s
        .dense()
        .ok_or_else(|| HalfMapError::PreconditionViolated("negative exponents".into()))?;
    let ode = Substitution::new(params.trace, params.det, params.offset, x);
    Ok((0..y.len().saturating_sub(1))
        .map(|m| ode.value(&y, m))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfmap::half_map;

    fn p(t: f64, d: f64, a: f64) -> LienardParams {
        LienardParams::new(t, d, a).unwrap()
    }

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * (1.0 + y.abs())
    }

    #[test]
    fn zero_trace_origin_jet_is_negation() {
        for a in [1.0, -2.0] {
            let s = taylor_origin(&p(0.0, 1.5, a), 8).unwrap();
            assert_eq!(s.coefficient(1.0), Some(-1.0));
            assert!(s.terms[1..].iter().all(|t| t.coefficient == 0.0));
            assert_eq!(s.eval(5.0).unwrap(), -5.0);
        }
    }

    #[test]
    fn origin_jet_printed_examples() {
        let s = taylor_origin(&p(1.0, 1.0, 1.0), 3).unwrap();
        assert_eq!(s.coefficients(), vec![-1.0, -2.0 / 3.0, -4.0 / 9.0]);
        let s = taylor_origin(&p(1.0, 2.0, 1.0), 4).unwrap();
        assert_eq!(s.coefficient(4.0), Some(-8.0 / 135.0));
    }

    #[test]
    fn origin_jet_preconditions() {
        assert!(matches!(
            taylor_origin(&p(1.0, 1.0, -1.0), 3),
            Err(HalfMapError::PreconditionViolated(_))
        ));
        assert!(taylor_origin(&p(1.0, 1.0, 0.0), 3).is_err());
        assert!(taylor_origin(&p(1.0, 1.0, 1.0), 21).is_err());
        assert!(taylor_origin(&p(1.0, 1.0, 1.0), 20).is_ok());
    }

    #[test]
    fn origin_jet_is_an_involution() {
        let s = taylor_origin(&p(0.7, 1.9, 1.3), 10).unwrap();
        let inv = series_invert(&s).unwrap();
        assert_eq!(inv.anchor, Anchor::Origin);
        for (a, b) in s.terms.iter().zip(&inv.terms) {
            assert_eq!(a.half_exponent, b.half_exponent);
            assert!(close(a.coefficient, b.coefficient, 1e-12), "{a:?} {b:?}");
        }
    }

    #[test]
    fn f64_and_exact_origin_jets_agree() {
        let z = p(-0.37, 2.2, 0.81);
        let f = origin_coefficients(&z, 12).unwrap();
        let e = taylor_origin(&z, 12).unwrap().coefficients();
        for (x, y) in f.iter().zip(&e) {
            assert!(close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn shifted_jet_shape() {
        let z = p(1.0, 1.0, -1.0);
        let s = taylor_origin_shifted(&z, 6).unwrap();
        let Anchor::ShiftedOrigin { value: h } = s.anchor else {
            panic!("anchor")
        };
        assert_eq!(s.coefficient(0.0), Some(h));
        assert_eq!(s.coefficient(1.0).unwrap().abs(), 0.0);
        let c2 = z.w().eval(h) / (2.0 * h);
        assert!(close(s.coefficient(2.0).unwrap(), c2, 1e-14));
        assert!(c2 < 0.0);
        let y0 = 0.05;
        assert!((s.eval(y0).unwrap() - half_map(&z, y0).unwrap()).abs() <= 1e-9);
        for r in ode_residual(&z, &s).unwrap() {
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn shifted_jet_preconditions() {
        assert!(taylor_origin_shifted(&p(-1.0, 1.0, -1.0), 4).is_err());
        assert!(taylor_origin_shifted(&p(1.0, 1.0, 1.0), 4).is_err());
    }

    #[test]
    fn puiseux_jet_shape() {
        let z = p(-1.0, 1.0, -1.0);
        let s = puiseux_at_hat_y0(&z, 4).unwrap();
        let Anchor::Puiseux { center, .. } = s.anchor else {
            panic!("anchor")
        };
        assert_eq!(s.terms[0].exponent(), 0.5);
        assert!(s.terms[0].coefficient < 0.0);
        assert_eq!(s.eval(center).unwrap(), 0.0);
        assert!(matches!(
            s.eval(center - 1e-3),
            Err(HalfMapError::WrongSide(_))
        ));
        let y0 = center + 0.01;
        assert!((s.eval(y0).unwrap() - half_map(&z, y0).unwrap()).abs() <= 1e-6);
        for r in ode_residual(&z, &s).unwrap() {
            assert!(r.abs() < 1e-12);
        }
    }

    #[test]
    fn puiseux_from_inverted_inverse_jet() {
        let z = p(-0.6, 1.4, -0.8);
        let inv = inverse_jet_at_origin(&z, 9).unwrap();
        assert_eq!(inv.coefficient(1.0).unwrap().abs(), 0.0);
        let via = series_invert(&inv).unwrap();
        let direct = puiseux_at_hat_y0(&z, 8).unwrap();
        assert_eq!(via.anchor, direct.anchor);
        assert_eq!(via.order(), direct.order());
        for (a, b) in via.terms.iter().zip(&direct.terms) {
            assert_eq!(a.half_exponent, b.half_exponent);
            assert!((a.coefficient - b.coefficient).abs() < 1e-12, "{a:?} {b:?}");
        }
    }

    #[test]
    fn inversion_examples() {
        let id = PowerSeries::integer_terms(Anchor::Origin, [(1, 1.0)]);
        assert_eq!(series_invert(&id).unwrap(), id);
        let sq = PowerSeries::integer_terms(Anchor::Origin, [(2, 1.0)]);
        let r = series_invert(&sq).unwrap();
        assert_eq!(r.terms[0].exponent(), 0.5);
        assert_eq!(r.terms[0].coefficient, -1.0);
        assert_eq!(r.eval(4.0).unwrap(), -2.0);
        let flat = PowerSeries::integer_terms(Anchor::Origin, [(3, 1.0)]);
        assert!(matches!(
            series_invert(&flat),
            Err(HalfMapError::NotInvertible(_))
        ));
        assert!(series_invert(&taylor_infinity(&p(0.0, 1.0, 1.0), 4).unwrap()).is_err());
    }

    #[test]
    fn infinity_jet_examples() {
        let j = infinity_jet(&p(0.0, 1.0, 1.0)).unwrap();
        assert_eq!(
            (j.alpha1, j.alpha2, j.alpha3, j.alpha4),
            (-1.0, 0.0, 0.0, 0.0)
        );
        let z = p(0.8, 2.0, 0.0);
        let j = infinity_jet(&z).unwrap();
        assert_eq!((j.alpha2, j.alpha3, j.alpha4), (0.0, 0.0, 0.0));
        assert!(infinity_jet(&p(3.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn infinity_recurrence_matches_closed_form() {
        for z in [p(0.5, 1.0, 1.0), p(-1.2, 3.0, -0.7), p(1.9, 1.0, 2.5)] {
            let a = infinity_jet(&z).unwrap();
            let b = infinity_jet_by_recurrence(&z).unwrap();
            for (x, y) in [
                (a.alpha2, b.alpha2),
                (a.alpha3, b.alpha3),
                (a.alpha4, b.alpha4),
            ] {
                assert!(close(x, y, 1e-12), "{z:?}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn infinity_series_examples() {
        let s = taylor_infinity(&p(0.0, 1.0, 1.0), 4).unwrap();
        let pairs: Vec<(f64, f64)> = s
            .terms
            .iter()
            .map(|t| (t.exponent(), t.coefficient))
            .collect();
        assert_eq!(
            pairs,
            vec![(1.0, -1.0), (0.0, 0.0), (-1.0, 0.0), (-2.0, 0.0)]
        );
        let s = taylor_infinity(&p(2.0, 2.0, 0.0), 4).unwrap();
        let e = std::f64::consts::PI.exp();
        assert!(close(s.eval(1.0).unwrap(), -e, 1e-14));
        assert!(matches!(s.eval(-1.0), Err(HalfMapError::WrongSide(_))));
        assert!(taylor_infinity(&p(2.0, 2.0, 0.0), 5).is_err());
    }

    #[test]
    fn infinity_series_residual_scaling() {
        let z = p(1.0, 1.0, 1.0);
        let s = taylor_infinity(&z, 4).unwrap();
        let err = |y: f64| (half_map(&z, y).unwrap() - s.eval(y).unwrap()).abs();
        let ratio = err(100.0) / err(1000.0);
        assert!((500.0..=2000.0).contains(&ratio), "ratio {ratio}");
    }
}
