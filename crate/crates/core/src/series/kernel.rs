//! Undetermined coefficients for `y1 W(y0) dy1 = y0 W(y1) dy0`.
//!
//! A jet is found one coefficient at a time: the residual at the order where
//! the newest unknown first appears is affine in it, so the unknown is
//! `-value / slope` with the slope taken from the exact partial derivative.

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{FromPrimitive, Num};

/// Field used for coefficient arithmetic (`f64` or `BigRational`).
pub trait Scalar: Clone + Debug + Num + Neg<Output = Self> + FromPrimitive {}

impl<S> Scalar for S where S: Clone + Debug + Num + Neg<Output = S> + FromPrimitive {}

fn at<S: Scalar>(p: &[S], k: usize) -> S {
    p.get(k).cloned().unwrap_or_else(S::zero)
}

fn int<S: Scalar>(k: usize) -> S {
    S::from_usize(k).unwrap_or_else(S::zero)
}

/// Coefficient `m` of `p q`.
pub(crate) fn conv_at<S: Scalar>(p: &[S], q: &[S], m: usize) -> S {
    let lo = m.saturating_sub(q.len().saturating_sub(1));
    let hi = m.min(p.len().saturating_sub(1));
    let mut acc = S::zero();
    if p.is_empty() || q.is_empty() || lo > hi {
        return acc;
    }
    for i in lo..=hi {
        acc = acc + p[i].clone() * q[m - i].clone();
    }
    acc
}

/// Truncated product keeping `len` coefficients.
pub(crate) fn mul_trunc<S: Scalar>(p: &[S], q: &[S], len: usize) -> Vec<S> {
    (0..len).map(|m| conv_at(p, q, m)).collect()
}

fn derivative<S: Scalar>(p: &[S]) -> Vec<S> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| int::<S>(k) * c.clone())
        .collect()
}

/// A residual that is polynomial in the unknown series.
pub(crate) trait Residual<S: Scalar> {
    /// Coefficient `m` of the residual for the current coefficients `y`.
    fn value(&self, y: &[S], m: usize) -> S;
    /// `∂R_m / ∂y_n`, ignoring terms quadratic in `y_n` (they sit above order `m`).
    fn slope(&self, y: &[S], n: usize, m: usize) -> S;
}

/// `R = Y W(x) Y' - x x' W(Y)` for the parametrization `y0 = x(s)`, `y1 = Y(s)`.
pub(crate) struct Substitution<S> {
    /// `W` as `[a^2, -aT, D]`.
    w: [S; 3],
    /// `W(x(s))`.
    wx: Vec<S>,
    /// `x(s) x'(s)`.
    xdx: Vec<S>,
}

impl<S: Scalar> Substitution<S> {
    pub(crate) fn new(trace: S, det: S, offset: S, x: Vec<S>) -> Self {
        let w = [offset.clone() * offset.clone(), -(offset * trace), det];
        let n = 2 * x.len();
        let x2 = mul_trunc(&x, &x, n);
        let wx = (0..n)
            .map(|k| {
                let c0 = if k == 0 { w[0].clone() } else { S::zero() };
                c0 + w[1].clone() * at(&x, k) + w[2].clone() * at(&x2, k)
            })
            .collect();
        let xdx = mul_trunc(&x, &derivative(&x), n);
        Self { w, wx, xdx }
    }

    fn w_of_y(&self, y: &[S], k: usize) -> S {
        let c0 = if k == 0 { self.w[0].clone() } else { S::zero() };
        c0 + self.w[1].clone() * at(y, k) + self.w[2].clone() * conv_at(y, y, k)
    }
}

impl<S: Scalar> Residual<S> for Substitution<S> {
    fn value(&self, y: &[S], m: usize) -> S {
        let dy = derivative(y);
        let mut acc = S::zero();
        for (j, wj) in self.wx.iter().enumerate().take(m + 1) {
            acc = acc + wj.clone() * conv_at(y, &dy, m - j);
        }
        for (j, xj) in self.xdx.iter().enumerate().take(m + 1) {
            acc = acc - xj.clone() * self.w_of_y(y, m - j);
        }
        acc
    }

    fn slope(&self, y: &[S], n: usize, m: usize) -> S {
        // ∂(Y Y')_k/∂y_n = (k + 1) Y_{k+1-n};  ∂W(Y)_k/∂y_n = w1 δ_{kn} + 2 w2 Y_{k-n}
        let mut acc = S::zero();
        for (j, wj) in self.wx.iter().enumerate().take(m + 1) {
            let k = m - j;
            if k + 1 >= n {
                acc = acc + wj.clone() * int::<S>(k + 1) * at(y, k + 1 - n);
            }
        }
        for (j, xj) in self.xdx.iter().enumerate().take(m + 1) {
            let k = m - j;
            if k >= n {
                let mut d = int::<S>(2) * self.w[2].clone() * at(y, k - n);
                if k == n {
                    d = d + self.w[1].clone();
                }
                acc = acc - xj.clone() * d;
            }
        }
        acc
    }
}

/// The reciprocal form `u W~(u) v' - v W~(v)` with `W~(z) = a^2 z^2 - aT z + D`,
/// satisfied by `v(u) = 1 / P(1/u)`.
pub(crate) struct Reciprocal<S> {
    /// `W~` as `[D, -aT, a^2]`.
    w: [S; 3],
}

impl<S: Scalar> Reciprocal<S> {
    pub(crate) fn new(trace: S, det: S, offset: S) -> Self {
        Self {
            w: [det, -(offset.clone() * trace), offset.clone() * offset],
        }
    }

    /// Coefficient `j` of `u W~(u)`.
    fn uw(&self, j: usize) -> S {
        match j {
            1..=3 => self.w[j - 1].clone(),
            _ => S::zero(),
        }
    }
}

impl<S: Scalar> Residual<S> for Reciprocal<S> {
    fn value(&self, v: &[S], m: usize) -> S {
        let dv = derivative(v);
        let mut acc = S::zero();
        for j in 1..=m.min(3) {
            acc = acc + self.uw(j) * at(&dv, m - j);
        }
        let v2 = mul_trunc(v, v, m + 1);
        let v3 = conv_at(v, &v2, m);
        acc - (self.w[0].clone() * at(v, m)
            + self.w[1].clone() * at(&v2, m)
            + self.w[2].clone() * v3)
    }

    fn slope(&self, v: &[S], n: usize, m: usize) -> S {
        let mut acc = S::zero();
        if m + 1 >= n {
            acc = acc + self.uw(m + 1 - n) * int::<S>(n);
        }
        if m >= n {
            let k = m - n;
            let v2 = mul_trunc(v, v, k + 1);
            let mut d = int::<S>(2) * self.w[1].clone() * at(v, k)
                + int::<S>(3) * self.w[2].clone() * at(&v2, k);
            if k == 0 {
                d = d + self.w[0].clone();
            }
            acc = acc - d;
        }
        acc
    }
}

/// Extends `seed` to `len` coefficients. Unknown `y_n` is fixed by the residual
/// at order `n - shift`. Returns the index whose slope vanished on failure.
pub(crate) fn undetermined<S, R>(
    residual: &R,
    seed: Vec<S>,
    len: usize,
    shift: usize,
) -> std::result::Result<Vec<S>, usize>
where
    S: Scalar,
    R: Residual<S>,
{
    let mut y = seed;
    while y.len() < len {
        let n = y.len();
        let m = n.checked_sub(shift).ok_or(n)?;
        y.push(S::zero());
        let s = residual.slope(&y, n, m);
        if s.is_zero() {
            return Err(n);
        }
        let r = residual.value(&y, m);
        y[n] = -(r / s);
    }
    Ok(y)
}

/// `[0, -1, c2, ...]`: the involutive jet at the origin.
pub(crate) fn origin_jet<S: Scalar>(
    trace: S,
    det: S,
    offset: S,
    len: usize,
) -> std::result::Result<Vec<S>, usize> {
    let ode = Substitution::new(trace, det, offset, vec![S::zero(), S::one()]);
    undetermined(&ode, vec![S::zero(), -S::one()], len, 0)
}

/// Jet at the origin of a solution through `(0, value)`, `value != 0`.
pub(crate) fn shifted_jet<S: Scalar>(
    trace: S,
    det: S,
    offset: S,
    value: S,
    len: usize,
) -> std::result::Result<Vec<S>, usize> {
    let ode = Substitution::new(trace, det, offset, vec![S::zero(), S::one()]);
    undetermined(&ode, vec![value], len, 1)
}

/// Taylor jet of `Q(s) = P(center + s^2)` with `Q'(0) = lead`.
pub(crate) fn half_step_jet<S: Scalar>(
    trace: S,
    det: S,
    offset: S,
    center: S,
    lead: S,
    len: usize,
) -> std::result::Result<Vec<S>, usize> {
    let x = vec![center, S::zero(), S::one()];
    let ode = Substitution::new(trace, det, offset, x);
    undetermined(&ode, vec![S::zero(), lead], len, 0)
}

/// `[0, β1, β2, ...]` for `1/P(1/u) = Σ β_k u^k` given `β1`.
pub(crate) fn reciprocal_jet<S: Scalar>(
    trace: S,
    det: S,
    offset: S,
    beta1: S,
    len: usize,
) -> std::result::Result<Vec<S>, usize> {
    let ode = Reciprocal::new(trace, det, offset);
    undetermined(&ode, vec![S::zero(), beta1], len, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn conv_matches_full_product() {
        let p = [1.0, 2.0, 3.0];
        let r = [4.0, 5.0];
        assert_eq!(mul_trunc(&p, &r, 5), vec![4.0, 13.0, 22.0, 15.0, 0.0]);
    }

    #[test]
    fn origin_jet_exact_first_terms() {
        let y = origin_jet(q(1, 1), q(1, 1), q(1, 1), 5).unwrap();
        assert_eq!(y[1], q(-1, 1));
        assert_eq!(y[2], q(-2, 3));
        assert_eq!(y[3], q(-4, 9));
        // 2(9 - 22)/135
        assert_eq!(y[4], q(-26, 135));
    }

    #[test]
    fn slope_agrees_with_difference() {
        let ode = Substitution::new(0.7f64, 1.3, -0.4, vec![0.9, 0.0, 1.0]);
        let mut y = vec![0.0, -0.3, 0.2, 0.1, 0.0];
        for (n, m) in [(4, 4), (3, 4), (2, 3)] {
            let save = y[n];
            y[n] = 0.0;
            let r0 = ode.value(&y, m);
            y[n] = 1.0;
            let r1 = ode.value(&y, m);
            y[n] = save;
            let mut probe = y.clone();
            probe[n] = 0.0;
            if 2 * n - 1 > m {
                assert!((ode.slope(&probe, n, m) - (r1 - r0)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reciprocal_slope_agrees_with_difference() {
        let ode = Reciprocal::new(0.5f64, 2.0, 1.5);
        let mut v = vec![0.0, -0.8, 0.3, 0.0];
        let n = 3;
        let r0 = ode.value(&v, n);
        v[n] = 1.0;
        let r1 = ode.value(&v, n);
        v[n] = 0.0;
        assert!((ode.slope(&v, n, n) - (r1 - r0)).abs() < 1e-14);
    }

    #[test]
    fn produced_jets_annihilate_residual() {
        let ode = Substitution::new(0.3f64, 2.0, 1.0, vec![0.0, 1.0]);
        let y = undetermined(&ode, vec![0.0, -1.0], 12, 0).unwrap();
        for m in 0..12 {
            assert!(ode.value(&y, m).abs() < 1e-13, "order {m}");
        }
    }

    #[test]
    fn vanishing_slope_is_reported() {
        // W == 0 at the seed makes every slope vanish
        assert_eq!(shifted_jet(0.0f64, 0.0, 0.0, 1.0, 3), Err(1));
    }
}
