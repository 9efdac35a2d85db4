//! Compositional inversion of jets.

use super::kernel::{mul_trunc, Scalar};

/// Reverts `f = f1 z + f2 z^2 + ...` (`f[0]` is ignored, `f[1] != 0`), returning
/// `g` with `f(g(w)) = w` to the same order.
pub(crate) fn revert<S: Scalar>(f: &[S]) -> Vec<S> {
    let len = f.len();
    let mut g = vec![S::zero(); len];
    if len < 2 {
        return g;
    }
    let f1 = f[1].clone();
    g[1] = S::one() / f1.clone();
    for n in 2..len {
        // coefficient n of Σ_{k>=2} f_k g^k; g_n only enters through f1 g_n
        let mut power = g[..=n].to_vec();
        let mut acc = S::zero();
        for fk in f.iter().take(n + 1).skip(2) {
            power = mul_trunc(&power, &g[..=n], n + 1);
            acc = acc + fk.clone() * power[n].clone();
        }
        g[n] = -(acc / f1.clone());
    }
    g
}

/// `sqrt(u)` for a jet with `u[0] = 1`.
pub(crate) fn sqrt_unit<S: Scalar>(u: &[S]) -> Vec<S> {
    let two = S::one() + S::one();
    let mut s = vec![S::zero(); u.len()];
    if u.is_empty() {
        return s;
    }
    s[0] = S::one();
    for n in 1..u.len() {
        let mut cross = S::zero();
        for i in 1..n {
            cross = cross + s[i].clone() * s[n - i].clone();
        }
        s[n] = (u[n].clone() - cross) / two.clone();
    }
    s
}

/// Inverts `w = c2 z^2 + c3 z^3 + ... + c_N z^N` (`c[0] = c[1] = 0`, `c2 != 0`)
/// on the branch `z <= 0`. Returns `e` with `z = Σ_{k>=1} e_k t^k`,
/// `t = sqrt(sign(c2) w)`; `e` has `N - 1` meaningful terms after `e[0] = 0`.
pub(crate) fn revert_square(c: &[f64]) -> Vec<f64> {
    let c2 = c[2];
    // w = c2 z^2 u(z) with u = 1 + (c3/c2) z + ...
    let u: Vec<f64> = c[2..].iter().map(|v| v / c2).collect();
    let root = sqrt_unit(&u);
    // t = sqrt|c2| |z| sqrt(u) = -sqrt|c2| z sqrt(u) on z <= 0
    let scale = -c2.abs().sqrt();
    let mut k = vec![0.0; root.len() + 1];
    for (i, r) in root.iter().enumerate() {
        k[i + 1] = scale * r;
    }
    revert(&k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn compose(f: &[f64], g: &[f64]) -> Vec<f64> {
        let len = f.len();
        let mut out = vec![0.0; len];
        let mut power = vec![0.0; len];
        power[0] = 1.0;
        for fk in f {
            for (o, p) in out.iter_mut().zip(&power) {
                *o += fk * p;
            }
            power = mul_trunc(&power, g, len);
        }
        out
    }

    #[test]
    fn identity_reverts_to_identity() {
        assert_eq!(revert(&[0.0, 1.0, 0.0, 0.0]), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn log1p_reverts_to_expm1() {
        let f: Vec<f64> = (0..10)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    (-1f64).powi(k + 1) / k as f64
                }
            })
            .collect();
        let g = revert(&f);
        let mut fact = 1.0;
        for (k, gk) in g.iter().enumerate().skip(1) {
            fact *= k as f64;
            assert!((gk - 1.0 / fact).abs() < 1e-14, "k={k}");
        }
        let id = compose(&f, &g);
        for (k, v) in id.iter().enumerate() {
            assert!((v - if k == 1 { 1.0 } else { 0.0 }).abs() < 1e-14);
        }
    }

    #[test]
    fn sqrt_of_square() {
        // (1 + z)^2 = 1 + 2z + z^2
        let s = sqrt_unit(&[1.0, 2.0, 1.0, 0.0, 0.0]);
        assert_eq!(s, vec![1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn square_branch_is_nonpositive() {
        // w = z^2: z = -t
        let e = revert_square(&[0.0, 0.0, 1.0]);
        assert_eq!(e[1], -1.0);
        // w = 4 z^2 + 4 z^3 has z = -t/2 + t^2/8 + ...
        let e = revert_square(&[0.0, 0.0, 4.0, 4.0, 0.0, 0.0]);
        let t: f64 = 1e-2;
        let z: f64 = e
            .iter()
            .enumerate()
            .map(|(k, ek)| ek * t.powi(k as i32))
            .sum();
        assert!(z < 0.0);
        assert!((4.0 * z * z + 4.0 * z.powi(3) - t * t).abs() < 1e-12);
    }
}
