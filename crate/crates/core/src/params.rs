//! Parameters of one linear zone in generalized Liénard form,
//!
//! ```text
//! x' = T x - y
//! y' = D x - a
//! ```
//!
//! and the quadratic `W(y) = D y^2 - a T y + a^2` that drives every
//! half-map computation.

use serde::{Deserialize, Serialize};

use crate::error::{HalfMapError, Result};

/// One linear zone: trace `T`, determinant `D` and offset `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LienardParams {
    pub trace: f64,
    pub det: f64,
    pub offset: f64,
}

impl LienardParams {
    /// Builds a zone, rejecting `a = D = 0` (continuum of equilibria, no return possible).
    pub fn new(trace: f64, det: f64, offset: f64) -> Result<Self> {
        if !(trace.is_finite() && det.is_finite() && offset.is_finite()) {
            return Err(HalfMapError::InvalidParams(format!(
                "parameters must be finite (T={trace}, D={det}, a={offset})"
            )));
        }
        if offset == 0.0 && det == 0.0 {
            return Err(HalfMapError::InvalidParams(
                "requires a^2 + D^2 != 0".to_string(),
            ));
        }
        Ok(Self { trace, det, offset })
    }

    /// Reduces `x' = A x + b` to Liénard form. Needs the observability
    /// condition `a12 != 0`.
    pub fn from_linear_system(matrix: [[f64; 2]; 2], vector: [f64; 2]) -> Result<Self> {
        let [[a11, a12], [a21, a22]] = matrix;
        if a12 == 0.0 {
            return Err(HalfMapError::InvalidParams(
                "requires a12 != 0 (observability condition)".to_string(),
            ));
        }
        let trace = a11 + a22;
        let det = a11 * a22 - a12 * a21;
        let offset = a12 * vector[1] - a22 * vector[0];
        Self::new(trace, det, offset)
    }

    /// `4D - T^2`; positive exactly when the equilibrium is a focus or a center.
    pub fn focus_discriminant(&self) -> f64 {
        4.0 * self.det - self.trace * self.trace
    }

    pub fn is_monodromic(&self) -> bool {
        self.focus_discriminant() > 0.0
    }

    /// The zone obtained from `(x, y, a) -> (-x, -y, -a)` composed with time
    /// reversal, i.e. `(T, D, a) -> (-T, D, -a)`. The left half-map of the
    /// reflected zone gives the backward half-map of the original right zone.
    pub fn reflected(&self) -> Self {
        Self {
            trace: -self.trace,
            det: self.det,
            offset: -self.offset,
        }
    }

    pub fn w(&self) -> QuadraticW {
        QuadraticW::new(self)
    }
}

/// `W(y) = D y^2 - a T y + a^2` with its real roots.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticW {
    /// Coefficients of `y^2`, `y^1`, `y^0`.
    pub quadratic: f64,
    pub linear: f64,
    pub constant: f64,
    roots: Vec<Root>,
}

/// A real root of `W` with its multiplicity (1 or 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    pub multiplicity: u8,
}

impl QuadraticW {
    pub fn new(p: &LienardParams) -> Self {
        let (t, d, a) = (p.trace, p.det, p.offset);
        let quadratic = d;
        let linear = -a * t;
        let constant = a * a;
        let mut roots = Vec::new();
        if d == 0.0 {
            if t != 0.0 && a != 0.0 {
                roots.push(Root {
                    value: a / t,
                    multiplicity: 1,
                });
            }
        } else if a == 0.0 {
            roots.push(Root {
                value: 0.0,
                multiplicity: 2,
            });
        } else {
            // disc = a^2 (T^2 - 4D); computed through the factored form.
            let gap = t * t - 4.0 * d;
            if gap == 0.0 {
                roots.push(Root {
                    value: a * t / (2.0 * d),
                    multiplicity: 2,
                });
            } else if gap > 0.0 && linear == 0.0 {
                // symmetric pair, kept exactly symmetric
                let r = (-constant / d).sqrt();
                roots.push(Root {
                    value: -r,
                    multiplicity: 1,
                });
                roots.push(Root {
                    value: r,
                    multiplicity: 1,
                });
            } else if gap > 0.0 {
                let sq = a.abs() * gap.sqrt();
                // q = -(B + sign(B) sqrt(disc)) / 2 with B = -aT.
                let b = linear;
                let q = if b >= 0.0 {
                    -0.5 * (b + sq)
                } else {
                    -0.5 * (b - sq)
                };
                let mut r1 = q / d;
                let mut r2 = constant / q;
                if r1 > r2 {
                    std::mem::swap(&mut r1, &mut r2);
                }
                roots.push(Root {
                    value: r1,
                    multiplicity: 1,
                });
                roots.push(Root {
                    value: r2,
                    multiplicity: 1,
                });
            }
        }
        Self {
            quadratic,
            linear,
            constant,
            roots,
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.quadratic * y + self.linear) * y + self.constant
    }

    /// Real roots in ascending order; a double root is stored once.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Nearest root strictly below zero, if any.
    pub fn negative_root(&self) -> Option<f64> {
        self.roots
            .iter()
            .map(|r| r.value)
            .filter(|&v| v < 0.0)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |m| m.max(v)))
            })
    }

    /// Nearest root strictly above zero, if any.
    pub fn positive_root(&self) -> Option<f64> {
        self.roots
            .iter()
            .map(|r| r.value)
            .filter(|&v| v > 0.0)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |m| m.min(v)))
            })
    }

    /// Smallest modulus among the (possibly complex) roots; infinite when `W` is constant.
    pub fn root_modulus(&self) -> f64 {
        if self.quadratic == 0.0 {
            if self.linear == 0.0 {
                f64::INFINITY
            } else {
                (self.constant / self.linear).abs()
            }
        } else if self.roots.is_empty() {
            (self.constant / self.quadratic).abs().sqrt()
        } else {
            self.roots
                .iter()
                .map(|r| r.value.abs())
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Convenience wrapper for `W(y)`.
pub fn eval_w(params: &LienardParams, y: f64) -> f64 {
    let (t, d, a) = (params.trace, params.det, params.offset);
    (d * y - a * t) * y + a * a
}

/// `sign` with `sign(0) = 0`.
pub fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}
