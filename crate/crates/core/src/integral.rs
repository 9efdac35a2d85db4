//! The integral `PV ∫_{y1}^{y0} -y / W(y) dy` in closed form.
//!
//! For `a != 0` the antiderivative is normalized so that `H(0) = 0` on the
//! connected component of `{W > 0}` containing the origin; the same formula
//! (with `ln|.|`) is an antiderivative on every other component. For `a = 0`
//! the integrand is `-1/(D y)` and only the principal value across the origin
//! makes sense.

use std::f64::consts::PI;

use crate::error::{HalfMapError, Result};
use crate::params::{LienardParams, QuadraticW};

/// The right-hand side constant `c` of the characterization `PV ∫ = c T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvConstant {
    pub c: f64,
}

pub fn c_constant(params: &LienardParams) -> Result<PvConstant> {
    let a = params.offset;
    if a > 0.0 {
        return Ok(PvConstant { c: 0.0 });
    }
    let gap = params.focus_discriminant();
    if gap <= 0.0 {
        return Err(HalfMapError::NonexistentHalfMap(format!(
            "requires 4D - T^2 > 0 when a <= 0 (T={}, D={}, a={a})",
            params.trace, params.det
        )));
    }
    let base = PI / (params.det * gap.sqrt());
    Ok(PvConstant {
        c: if a == 0.0 { base } else { 2.0 * base },
    })
}

/// `ln|1 + x| - x`, accurate for small `x`.
pub(crate) fn log1p_minus_x(x: f64) -> f64 {
    if x.abs() < 0.1 {
        // -x^2/2 + x^3/3 - ...
        let mut term = x;
        let mut sum = 0.0;
        for k in 2..40 {
            term *= -x;
            let add = term / k as f64;
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else if x > -1.0 {
        x.ln_1p() - x
    } else {
        (-(1.0 + x)).ln() - x
    }
}

#[derive(Debug, Clone)]
enum Form {
    /// `a = 0`: `-ln|y| / D`.
    PrincipalValue { det: f64 },
    /// `D != 0`, two simple real roots.
    TwoRoots { r1: f64, r2: f64, c1: f64, c2: f64 },
    /// `D != 0`, double root.
    DoubleRoot { r: f64, det: f64 },
    /// `D > 0`, no real roots: logarithm plus arctangent.
    Complex { det: f64, at: f64, a2: f64, s: f64 },
    /// `D = 0`, `T != 0`: `W = a^2 - a T y`.
    Linear { t: f64, a: f64 },
    /// `D = 0`, `T = 0`: `W = a^2`.
    Constant { a2: f64 },
}

/// Closed-form antiderivative `H` of `-y / W(y)` for one parameter set.
#[derive(Debug, Clone)]
pub struct Antiderivative {
    params: LienardParams,
    w: QuadraticW,
    form: Form,
    /// Radius below which the Maclaurin series of `H` is used.
    series_radius: f64,
}

impl Antiderivative {
    pub fn new(params: &LienardParams) -> Self {
        let (t, d, a) = (params.trace, params.det, params.offset);
        let w = params.w();
        let form = if a == 0.0 {
            Form::PrincipalValue { det: d }
        } else if d == 0.0 {
            if t == 0.0 {
                Form::Constant { a2: a * a }
            } else {
                Form::Linear { t, a }
            }
        } else {
            match w.roots() {
                [r] => Form::DoubleRoot { r: r.value, det: d },
                [r1, r2] => {
                    let (r1, r2) = (r1.value, r2.value);
                    let span = d * (r2 - r1);
                    Form::TwoRoots {
                        r1,
                        r2,
                        c1: r1 / span,
                        c2: -r2 / span,
                    }
                }
                _ => Form::Complex {
                    det: d,
                    at: a * t,
                    a2: a * a,
                    s: a.abs() * params.focus_discriminant().sqrt(),
                },
            }
        };
        let series_radius = if a == 0.0 {
            0.0
        } else {
            0.25 * w.root_modulus()
        };
        Self {
            params: *params,
            w,
            form,
            series_radius,
        }
    }

    pub fn params(&self) -> &LienardParams {
        &self.params
    }

    pub fn w(&self) -> &QuadraticW {
        &self.w
    }

    /// `H(y)` with `H' = -y/W`. Fails where `W(y) <= 0`.
    pub fn eval(&self, y: f64) -> Result<f64> {
        let wy = self.w.eval(y);
        let on_root = self.w.roots().iter().any(|r| r.value == y);
        if wy <= 0.0 || on_root {
            return Err(HalfMapError::DomainError(format!(
                "W({y}) = {wy} for T={}, D={}, a={}",
                self.params.trace, self.params.det, self.params.offset
            )));
        }
        Ok(self.eval_unchecked(y))
    }

    /// `H(y)` without checking the sign of `W`.
    pub(crate) fn eval_unchecked(&self, y: f64) -> f64 {
        if y.abs() <= self.series_radius {
            return self.maclaurin(y);
        }
        match self.form {
            Form::PrincipalValue { det } => -y.abs().ln() / det,
            Form::TwoRoots { r1, r2, c1, c2 } => {
                c1 * log1p_minus_x(-y / r1) + c2 * log1p_minus_x(-y / r2)
            }
            Form::DoubleRoot { r, det } => {
                let x = -y / r;
                (-x * x / (1.0 + x) - log1p_minus_x(x)) / det
            }
            Form::Complex { det, at, a2, s } => {
                let log_part = -((det * y - at) * y / a2).ln_1p() / (2.0 * det);
                let v = -at / s;
                let u = (2.0 * det * y - at) / s;
                let atan_diff = (2.0 * det * y / s).atan2(1.0 + u * v);
                log_part - at / det * atan_diff / s
            }
            Form::Linear { t, a } => log1p_minus_x(-t * y / a) / (t * t),
            Form::Constant { a2 } => -y * y / (2.0 * a2),
        }
    }

    /// At a simple root `r` of `W`: the coefficient of `ln|y - r|` in `H`, and the
    /// other root with its coefficient when there is one.
    fn singular_part(&self, r: f64) -> Option<(f64, Option<(f64, f64)>)> {
        match self.form {
            Form::TwoRoots { r1, r2, c1, c2 } if r == r1 => Some((c1, Some((c2, r2)))),
            Form::TwoRoots { r1, r2, c1, c2 } if r == r2 => Some((c2, Some((c1, r1)))),
            Form::Linear { t, a } if r == a / t => Some((1.0 / (t * t), None)),
            _ => None,
        }
    }

    /// `H(r + delta)` at a simple root `r` of `W`, with `delta` on the side where
    /// `W > 0`. Keeps full accuracy when `r + delta` rounds to `r`.
    pub fn eval_near_root(&self, r: f64, delta: f64) -> Option<f64> {
        let (cr, other) = self.singular_part(r)?;
        let x = delta / r;
        if x.is_nan() || x >= 0.0 {
            return None;
        }
        let smooth = other.map_or(0.0, |(co, ro)| co * log1p_minus_x(-(r + delta) / ro));
        Some(cr * ((-x).ln() + 1.0 + x) + smooth)
    }

    /// Solves `H(r + delta) = h` for `delta` next to a simple root `r` of `W`, on
    /// the side where `W > 0`. Newton iteration in `ln|delta / r|`.
    pub fn solve_near_root(&self, r: f64, h: f64) -> Option<f64> {
        let (cr, other) = self.singular_part(r)?;
        let delta_of = |s: f64| -r * s.exp();
        let smooth = |d: f64| other.map_or(0.0, |(co, ro)| co * log1p_minus_x(-(r + d) / ro));
        let smooth_slope = |d: f64| {
            other.map_or(0.0, |(co, ro)| {
                let x = -(r + d) / ro;
                co * x / ((1.0 + x) * ro)
            })
        };
        let mut s = (h - cr - smooth(0.0)) / cr;
        for _ in 0..60 {
            if !s.is_finite() || s > 0.0 {
                return None;
            }
            let d = delta_of(s);
            let g = cr * (s + 1.0 + d / r) + smooth(d) - h;
            let slope = cr + d * (cr / r + smooth_slope(d));
            let step = g / slope;
            s -= step;
            if step.abs() <= 4.0 * f64::EPSILON * s.abs().max(1.0) {
                return Some(delta_of(s));
            }
        }
        None
    }

    /// `W(r + delta)` at a simple root `r`, in factored form.
    pub fn w_near_root(&self, r: f64, delta: f64) -> Option<f64> {
        match self.form {
            Form::TwoRoots { r1, r2, .. } if r == r1 || r == r2 => {
                let other = if r == r1 { r2 } else { r1 };
                Some(self.params.det * delta * (r - other + delta))
            }
            Form::Linear { t, a } if r == a / t => Some(-a * t * delta),
            _ => None,
        }
    }

    /// `H(y) = -(1/a^2) Σ w_k y^(k+2) / (k+2)` where `1/W = (1/a^2) Σ w_k y^k`.
    fn maclaurin(&self, y: f64) -> f64 {
        let (t, d, a) = (self.params.trace, self.params.det, self.params.offset);
        let p = t / a;
        let q = d / (a * a);
        let (mut w_prev, mut w_cur) = (0.0f64, 1.0f64);
        let mut pow = y * y;
        let mut sum = 0.0;
        for k in 0..80 {
            sum += w_cur * pow / (k as f64 + 2.0);
            // w_k can vanish transiently, so bound the next two terms together
            if (w_cur.abs() + w_prev.abs()) * pow.abs() <= 1e-18 * sum.abs() {
                break;
            }
            let next = p * w_cur - q * w_prev;
            w_prev = w_cur;
            w_cur = next;
            pow *= y;
        }
        -sum / (a * a)
    }
}

/// `H(y)` for a single evaluation; see [`Antiderivative`].
pub fn antiderivative_h(params: &LienardParams, y: f64) -> Result<f64> {
    Antiderivative::new(params).eval(y)
}

/// `PV ∫_{y1}^{y0} -y/W(y) dy` for `y1 <= 0 <= y0`.
pub fn integral_value(params: &LienardParams, y1: f64, y0: f64) -> Result<f64> {
    Antiderivative::new(params).integral(y1, y0)
}

impl Antiderivative {
    /// See [`integral_value`].
    pub fn integral(&self, y1: f64, y0: f64) -> Result<f64> {
        if y1 > 0.0 || y0 < 0.0 || y1.is_nan() || y0.is_nan() {
            return Err(HalfMapError::PreconditionViolated(format!(
                "integral needs y1 <= 0 <= y0, got y1={y1}, y0={y0}"
            )));
        }
        if let Form::PrincipalValue { det } = self.form {
            return match (y1 == 0.0, y0 == 0.0) {
                (true, true) => Ok(0.0),
                (true, false) | (false, true) => Err(HalfMapError::PvUndefined(format!(
                    "a = 0 needs both endpoints nonzero or both zero (y1={y1}, y0={y0})"
                ))),
                _ => {
                    if det <= 0.0 {
                        Err(HalfMapError::DomainError(format!(
                            "W(y) = D y^2 <= 0 with D = {det}"
                        )))
                    } else {
                        Ok(((-y1).ln() - y0.ln()) / det)
                    }
                }
            };
        }
        if let Some(r) = self.w.negative_root() {
            if y1 <= r {
                return Err(HalfMapError::DomainError(format!(
                    "W vanishes at {r} inside [{y1}, 0)"
                )));
            }
        }
        if let Some(r) = self.w.positive_root() {
            if y0 >= r {
                return Err(HalfMapError::DomainError(format!(
                    "W vanishes at {r} inside (0, {y0}]"
                )));
            }
        }
        if self.w.quadratic < 0.0 && self.w.roots().is_empty() {
            return Err(HalfMapError::DomainError("W < 0 everywhere".into()));
        }
        Ok(self.eval_unchecked(y0) - self.eval_unchecked(y1))
    }
}
