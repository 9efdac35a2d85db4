//! Bracketed scalar root finding.
//!
//! Bisection safeguarded secant / inverse-quadratic steps (Brent's scheme).
//! Every objective handed to this module is monotone on its bracket, so a
//! sign change is all that is required for convergence.

use crate::error::{HalfMapError, Result};

/// Tolerances for the bracketed solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Absolute tolerance on the abscissa.
    pub abs_tol: f64,
    pub max_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            max_iters: 200,
        }
    }
}

/// Finds `x` in `[lo, hi]` with `f(x) = 0`, given `f(lo)` and `f(hi)` of opposite sign
/// (or one of them zero).
pub fn brent<F>(mut f: F, lo: f64, hi: f64, cfg: &SolverConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let fa = f(lo);
    let fb = f(hi);
    brent_with_values(f, lo, fa, hi, fb, cfg)
}

/// Same as [`brent`] when the endpoint values are already known.
pub fn brent_with_values<F>(
    mut f: F,
    lo: f64,
    f_lo: f64,
    hi: f64,
    f_hi: f64,
    cfg: &SolverConfig,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f_lo, f_hi);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(HalfMapError::NoConvergence {
            iterations: 0,
            context: format!("no sign change on [{lo}, {hi}] (f = {fa}, {fb})"),
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..cfg.max_iters {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * cfg.abs_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(HalfMapError::NoConvergence {
                iterations: cfg.max_iters,
                context: format!("objective returned NaN at {b}"),
            });
        }
    }
    Err(HalfMapError::NoConvergence {
        iterations: cfg.max_iters,
        context: format!("bracket [{lo}, {hi}]"),
    })
}

/// Golden-section search for a local minimum of `f` on `[lo, hi]`.
pub fn golden_min<F>(mut f: F, lo: f64, hi: f64, iters: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt2() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, &SolverConfig::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn endpoint_roots_returned_exactly() {
        let cfg = SolverConfig::default();
        assert_eq!(brent(|x| x, 0.0, 1.0, &cfg).unwrap(), 0.0);
        assert_eq!(brent(|x| x - 1.0, 0.0, 1.0, &cfg).unwrap(), 1.0);
    }

    #[test]
    fn rejects_missing_sign_change() {
        let e = brent(|x| x * x + 1.0, -1.0, 1.0, &SolverConfig::default()).unwrap_err();
        assert!(matches!(e, HalfMapError::NoConvergence { .. }));
    }

    #[test]
    fn iteration_cap_is_honored() {
        let cfg = SolverConfig {
            abs_tol: 0.0,
            max_iters: 3,
        };
        assert!(brent(|x: f64| x.powi(3) - 0.3, -10.0, 10.0, &cfg).is_err());
    }

    #[test]
    fn steep_log_objective() {
        // shape of the half-map objective near a simple root of W
        let f = |y: f64| -(1.0 + y).ln() - 30.0;
        let r = brent(f, -1.0 + 1e-15, 0.0, &SolverConfig::default()).unwrap();
        assert!((r - (-30f64).exp_m1()).abs() < 1e-12);
    }

    #[test]
    fn golden_finds_parabola_min() {
        let (x, fx) = golden_min(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!(fx < 1e-14);
    }
}
