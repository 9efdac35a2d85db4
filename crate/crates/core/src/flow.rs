//! Half-maps by following the actual flow, used as an oracle for the
//! integral-characterization code.
//!
//! The flow of `z' = M z + f` is written through the scalar solution `u` of
//! `u'' = tr(M) u' - det(M) u`, `u(0) = 0`, `u'(0) = 1`:
//!
//! ```text
//! exp(M t)            = (u' - tr u) I + u M
//! ∫_0^t exp(M s) ds   = g0 I + g1 M,   g1 = ∫ u,   g0 = ∫ (u' - tr u)
//! ```
//!
//! with closed forms for `u` in the focus, node, degenerate and `det = 0` cases.

use serde::Serialize;

use crate::error::{HalfMapError, Result};
use crate::params::LienardParams;
use crate::solve::{brent, SolverConfig};

/// Shape of the spectrum of `M`, with the quantities the closed forms need.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Spectrum {
    /// `μ ± iω`.
    Focus { mu: f64, omega: f64 },
    /// `μ ± κ`, `κ > 0`, `det != 0`.
    Node { mu: f64, kappa: f64 },
    /// Double eigenvalue `μ`, `det != 0`.
    Degenerate { mu: f64 },
    /// `det = 0`: eigenvalues `tr` and 0.
    Drift,
}

/// `z' = M z + f` in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFlow {
    pub matrix: [[f64; 2]; 2],
    pub forcing: [f64; 2],
    trace: f64,
    det: f64,
    spectrum: Spectrum,
}

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.exp_m1() / z
    }
}

/// `(e^z - 1 - z) / z^2`.
fn phi2(z: f64) -> f64 {
    if z.abs() < 0.5 {
        let mut term = 0.5;
        let mut sum = 0.0;
        for k in 0..30 {
            sum += term;
            term *= z / (k as f64 + 3.0);
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

impl AffineFlow {
    pub fn new(matrix: [[f64; 2]; 2], forcing: [f64; 2]) -> Self {
        let trace = matrix[0][0] + matrix[1][1];
        let det = matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
        let mu = 0.5 * trace;
        let gap = mu * mu - det;
        let spectrum = if det == 0.0 {
            Spectrum::Drift
        } else if gap < 0.0 {
            Spectrum::Focus {
                mu,
                omega: (-gap).sqrt(),
            }
        } else if gap > 0.0 {
            Spectrum::Node {
                mu,
                kappa: gap.sqrt(),
            }
        } else {
            Spectrum::Degenerate { mu }
        };
        Self {
            matrix,
            forcing,
            trace,
            det,
            spectrum,
        }
    }

    /// The left zone `x' = T x - y`, `y' = D x - a`.
    pub fn lienard(params: &LienardParams) -> Self {
        Self::new(
            [[params.trace, -1.0], [params.det, 0.0]],
            [0.0, -params.offset],
        )
    }

    /// The same vector field with time reversed.
    pub fn reversed(&self) -> Self {
        let m = self.matrix;
        Self::new(
            [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]],
            [-self.forcing[0], -self.forcing[1]],
        )
    }

    pub fn velocity(&self, z: [f64; 2]) -> [f64; 2] {
        let m = self.matrix;
        [
            m[0][0] * z[0] + m[0][1] * z[1] + self.forcing[0],
            m[1][0] * z[0] + m[1][1] * z[1] + self.forcing[1],
        ]
    }

    /// Largest rate at which solutions can vary.
    fn rate(&self) -> f64 {
        match self.spectrum {
            Spectrum::Focus { mu, omega } => mu.abs() + omega,
            Spectrum::Node { mu, kappa } => mu.abs() + kappa,
            Spectrum::Degenerate { mu } => mu.abs(),
            Spectrum::Drift => self.trace.abs(),
        }
    }

    /// `(u(s), u'(s) - tr u(s))`.
    fn scalars(&self, s: f64) -> (f64, f64) {
        match self.spectrum {
            Spectrum::Focus { mu, omega } => {
                let e = (mu * s).exp();
                let sn = (omega * s).sin() / omega;
                (e * sn, e * ((omega * s).cos() - mu * sn))
            }
            Spectrum::Node { mu, kappa } if kappa * s.abs() <= 1.0 => {
                let e = (mu * s).exp();
                let sh = (kappa * s).sinh() / kappa;
                (e * sh, e * ((kappa * s).cosh() - mu * sh))
            }
            Spectrum::Node { mu, kappa } => {
                let e1 = ((mu + kappa) * s).exp();
                let e2 = ((mu - kappa) * s).exp();
                // κ ∓ μ with the smaller one from κ^2 - μ^2 = -det
                let (minus, plus) = if mu >= 0.0 {
                    (-self.det / (kappa + mu), kappa + mu)
                } else {
                    (kappa - mu, -self.det / (kappa - mu))
                };
                (
                    (e1 - e2) / (2.0 * kappa),
                    (minus * e1 + plus * e2) / (2.0 * kappa),
                )
            }
            Spectrum::Degenerate { mu } => {
                let e = (mu * s).exp();
                (s * e, e * (1.0 - mu * s))
            }
            Spectrum::Drift => (s * phi1(self.trace * s), 1.0),
        }
    }

    /// Gauss-Legendre quadrature of `scalars(s).k` over `[0, t]`.
    fn integrate(&self, t: f64, pick: fn((f64, f64)) -> f64) -> f64 {
        let panels = (t.abs() * self.rate()).ceil().max(1.0) as usize * 2;
        let h = t / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                let off = 0.5 * h * x;
                sum += w * (pick(self.scalars(mid - off)) + pick(self.scalars(mid + off)));
            }
        }
        0.5 * h * sum
    }

    /// `(g0(t), g1(t))`.
    fn integrals(&self, t: f64, u: f64, c0: f64) -> (f64, f64) {
        if let Spectrum::Drift = self.spectrum {
            return (t, t * t * phi2(self.trace * t));
        }
        // det g1 = 1 - c0 and g0 = u - tr g1, unless those cancel
        let g1 = if (1.0 - c0).abs() >= 1e-3 * c0.abs().max(1.0) {
            (1.0 - c0) / self.det
        } else {
            self.integrate(t, |p| p.0)
        };
        let g0 = u - self.trace * g1;
        let g0 = if g0.abs() >= 1e-3 * u.abs().max((self.trace * g1).abs()) {
            g0
        } else {
            self.integrate(t, |p| p.1)
        };
        (g0, g1)
    }

    /// State at time `t` (of either sign) from `z0`.
    pub fn at(&self, z0: [f64; 2], t: f64) -> [f64; 2] {
        if t == 0.0 {
            return z0;
        }
        let (u, c0) = self.scalars(t);
        let (g0, g1) = self.integrals(t, u, c0);
        let m = self.matrix;
        let f = self.forcing;
        let apply = |v: [f64; 2], a: f64, b: f64| {
            [
                a * v[0] + b * (m[0][0] * v[0] + m[0][1] * v[1]),
                a * v[1] + b * (m[1][0] * v[0] + m[1][1] * v[1]),
            ]
        };
        let e = apply(z0, c0, u);
        let g = apply(f, g0, g1);
        [e[0] + g[0], e[1] + g[1]]
    }
}

/// State of the left-zone flow at time `t`.
pub fn flow_at(params: &LienardParams, state: (f64, f64), t: f64) -> (f64, f64) {
    let z = AffineFlow::lienard(params).at([state.0, state.1], t);
    (z[0], z[1])
}

/// Return to the section `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowCrossing {
    pub flight_time: f64,
    pub exit_y: f64,
    /// The return is tangential (`x' = 0` at the exit within `1e-10`).
    pub grazing: bool,
}

/// Dense samples of one flight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSample {
    pub times: Vec<f64>,
    pub states: Vec<(f64, f64)>,
}

/// Which half-plane the flight stays in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

/// Limits on the search for a return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnBudget {
    /// Multiple of `2π / sqrt(4 det - tr^2)` allowed for rotating flows.
    pub turns: f64,
    /// Arc length allowed, in units of `max(1, |y0|, |f|)`.
    pub arc_length: f64,
    /// Multiple of `1 / min |λ|` allowed for non-rotating flows.
    pub decay_times: f64,
}

impl Default for ReturnBudget {
    fn default() -> Self {
        Self {
            turns: 10.0,
            arc_length: 1e6,
            decay_times: 100.0,
        }
    }
}

const GRAZING_TOL: f64 = 1e-10;

/// First return of the flight from `(0, y0)` through the half-plane `side`.
pub fn first_return_in(
    flow: &AffineFlow,
    y0: f64,
    side: Side,
    budget: &ReturnBudget,
) -> Result<FlowCrossing> {
    let s = side.sign();
    let z0 = [0.0, y0];
    let v0 = flow.velocity(z0);
    let sx = |t: f64| s * flow.at(z0, t)[0];
    let sv = |t: f64| s * flow.velocity(flow.at(z0, t))[0];
    if s * v0[0] <= 0.0 {
        return Err(HalfMapError::NoReturn(format!(
            "the flow at (0, {y0}) does not enter the {side:?} half-plane"
        )));
    }
    let scale = 1f64
        .max(y0.abs())
        .max(flow.forcing[0].abs())
        .max(flow.forcing[1].abs());
    let (t_max, h_max) = match flow.spectrum {
        Spectrum::Focus { omega, .. } => (
            budget.turns * std::f64::consts::PI / omega,
            std::f64::consts::PI / (16.0 * omega),
        ),
        _ => {
            let slowest = match flow.spectrum {
                Spectrum::Node { mu, kappa } => (mu.abs() - kappa).abs().min(mu.abs() + kappa),
                Spectrum::Degenerate { mu } => mu.abs(),
                _ => 0.0,
            };
            let t = if slowest > 0.0 {
                budget.decay_times / slowest
            } else {
                f64::INFINITY
            };
            (t, f64::INFINITY)
        }
    };
    // initial step well inside the first excursion: x ≈ v t + acc t^2 / 2
    let acc = flow.matrix[0][0] * v0[0] + flow.matrix[0][1] * v0[1];
    let rate = flow.rate().max(1e-300);
    let mut h = (0.05 / rate).min(h_max);
    if acc != 0.0 {
        h = h.min(0.05 * (v0[0] / acc).abs());
    }
    let solver = SolverConfig {
        abs_tol: 0.0,
        max_iters: 400,
    };
    let (mut t_prev, mut v_prev) = (0.0, s * v0[0]);
    let mut z_prev = z0;
    let mut arc = 0.0;
    let exit = |t: f64| {
        let z = flow.at(z0, t);
        let vx = flow.velocity(z)[0];
        Ok(FlowCrossing {
            flight_time: t,
            exit_y: z[1],
            grazing: vx.abs() <= GRAZING_TOL,
        })
    };
    for _ in 0..1_000_000 {
        let t = t_prev + h;
        let z = flow.at(z0, t);
        let x = s * z[0];
        let v = s * flow.velocity(z)[0];
        if !(x.is_finite() && z[1].is_finite()) {
            break;
        }
        if x <= 0.0 {
            if t_prev == 0.0 {
                // step overshot the whole excursion
                h *= 0.125;
                if h < 1e-300 {
                    break;
                }
                continue;
            }
            let tau = brent(sx, t_prev, t, &solver)?;
            return exit(tau);
        }
        if v_prev < 0.0 && v >= 0.0 {
            // s x has a local minimum in between
            let t_min = brent(sv, t_prev, t, &solver)?;
            let x_min = sx(t_min);
            if x_min <= 0.0 {
                let tau = if x_min == 0.0 {
                    t_min
                } else {
                    brent(sx, t_prev, t_min, &solver)?
                };
                return exit(tau);
            }
            if x_min <= 1e-13 * scale {
                return exit(t_min);
            }
        }
        arc += ((z[0] - z_prev[0]).powi(2) + (z[1] - z_prev[1]).powi(2)).sqrt();
        if t > t_max || arc > budget.arc_length * scale {
            break;
        }
        t_prev = t;
        v_prev = v;
        z_prev = z;
        h = (h * 1.25).min(h_max);
    }
    Err(HalfMapError::NoReturn(format!(
        "no return from (0, {y0}) within t = {:.6e}",
        t_prev
    )))
}

/// Left half-map flight from `(0, y0)`.
pub fn first_return(params: &LienardParams, y0: f64) -> Result<FlowCrossing> {
    first_return_in(
        &AffineFlow::lienard(params),
        y0,
        Side::Left,
        &ReturnBudget::default(),
    )
}

/// `P(y0)` from the flow. At the tangency `y0 = 0` the value is the limit
/// extrapolated linearly from `y0 = 1e-6` and `y0 = 1e-8`.
pub fn oracle_half_map(params: &LienardParams, y0: f64) -> Result<f64> {
    if y0 == 0.0 {
        let (y_far, y_near) = (1e-6, 1e-8);
        let p_far = first_return(params, y_far)?.exit_y;
        let p_near = first_return(params, y_near)?.exit_y;
        return Ok(p_near - (p_far - p_near) * y_near / (y_far - y_near));
    }
    Ok(first_return(params, y0)?.exit_y)
}

/// `n + 1` evenly spaced states along the left flight from `(0, y0)`.
pub fn orbit_sample(params: &LienardParams, y0: f64, n: usize) -> Result<OrbitSample> {
    let flow = AffineFlow::lienard(params);
    let tau = first_return(params, y0)?.flight_time;
    let n = n.max(1);
    let times: Vec<f64> = (0..=n).map(|k| tau * k as f64 / n as f64).collect();
    let states = times
        .iter()
        .map(|&t| {
            let z = flow.at([0.0, y0], t);
            (z[0], z[1])
        })
        .collect();
    Ok(OrbitSample { times, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(t: f64, d: f64, a: f64) -> LienardParams {
        LienardParams::new(t, d, a).unwrap()
    }

    /// Classical RK4 with a fixed small step, independent of the closed form.
    fn rk4(flow: &AffineFlow, z0: [f64; 2], t: f64, steps: usize) -> [f64; 2] {
        let h = t / steps as f64;
        let mut z = z0;
        let add = |z: [f64; 2], k: [f64; 2], c: f64| [z[0] + c * k[0], z[1] + c * k[1]];
        for _ in 0..steps {
            let k1 = flow.velocity(z);
            let k2 = flow.velocity(add(z, k1, 0.5 * h));
            let k3 = flow.velocity(add(z, k2, 0.5 * h));
            let k4 = flow.velocity(add(z, k3, h));
            for i in 0..2 {
                z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        z
    }

    #[test]
    fn identity_at_time_zero() {
        assert_eq!(flow_at(&p(0.3, 1.0, 2.0), (0.5, -1.0), 0.0), (0.5, -1.0));
    }

    #[test]
    fn center_rotates() {
        let (x, y) = flow_at(&p(0.0, 1.0, 0.0), (-1.0, 0.0), PI);
        assert!((x - 1.0).abs() < 1e-14 && y.abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_rk4_in_every_regime() {
        let cases = [
            p(0.4, 2.0, 1.0),   // focus
            p(-0.4, 2.0, -1.0), // focus
            p(3.0, 1.0, 0.5),   // node
            p(0.5, -2.0, 1.0),  // saddle
            p(2.0, 1.0, 1.0),   // degenerate node
            p(1.5, 0.0, -1.0),  // det = 0
            p(0.0, 0.0, 1.0),   // nilpotent
            p(1.0, 1e-7, 1.0),  // nearly det = 0
        ];
        for z in cases {
            let flow = AffineFlow::lienard(&z);
            for &t in &[0.3, 1.7, -1.1] {
                let exact = flow.at([0.2, 0.7], t);
                let approx = rk4(&flow, [0.2, 0.7], t, 20_000);
                for i in 0..2 {
                    assert!(
                        (exact[i] - approx[i]).abs() <= 1e-10 * (1.0 + approx[i].abs()),
                        "{z:?} t={t}: {exact:?} vs {approx:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn semigroup() {
        for z in [
            p(0.4, 2.0, 1.0),
            p(3.0, 1.0, 0.5),
            p(1.5, 0.0, -1.0),
            p(2.0, 1.0, 1.0),
        ] {
            let flow = AffineFlow::lienard(&z);
            let whole = flow.at([0.1, 1.0], 1.3);
            let half = flow.at(flow.at([0.1, 1.0], 0.65), 0.65);
            for i in 0..2 {
                assert!((whole[i] - half[i]).abs() <= 1e-12 * (1.0 + whole[i].abs()));
            }
        }
    }

    #[test]
    fn reversed_flow_undoes_forward() {
        let flow = AffineFlow::lienard(&p(0.7, 1.5, -0.4));
        let z = flow.at([0.3, -0.2], 2.0);
        let back = flow.reversed().at(z, 2.0);
        assert!((back[0] - 0.3).abs() < 1e-12 && (back[1] + 0.2).abs() < 1e-12);
    }

    #[test]
    fn center_return() {
        let c = first_return(&p(0.0, 1.0, 0.0), 1.0).unwrap();
        assert!((c.exit_y + 1.0).abs() < 1e-12);
        assert!((c.flight_time - PI).abs() < 1e-12);
        assert!(!c.grazing);
    }

    #[test]
    fn focus_return_matches_closed_form() {
        let c = first_return(&p(2.0, 2.0, 0.0), 1.0).unwrap();
        assert!((c.exit_y + PI.exp()).abs() < 1e-10 * PI.exp());
        // u(τ) = 0 with ω = 1: the flight takes π
        assert!((c.flight_time - PI).abs() < 1e-12);
    }

    #[test]
    fn saddle_beyond_root_has_no_return() {
        let z = p(0.0, -1.0, 1.0);
        let r = z.w().positive_root().unwrap();
        assert!(first_return(&z, 0.5 * r).is_ok());
        assert!(matches!(
            first_return(&z, 1.5 * r),
            Err(HalfMapError::NoReturn(_))
        ));
    }

    #[test]
    fn stable_focus_below_hat_y0_has_no_return() {
        let z = p(-1.0, 1.0, -1.0);
        assert!(matches!(
            first_return(&z, 1e-3),
            Err(HalfMapError::NoReturn(_))
        ));
    }

    #[test]
    fn small_flights_near_tangency() {
        // x ≈ -y0 t + a t^2/2 returns at t ≈ 2 y0 / a with P ≈ -y0
        let c = first_return(&p(0.5, 1.0, 2.0), 1e-8).unwrap();
        assert!((c.flight_time - 1e-8).abs() < 1e-12);
        assert!((c.exit_y + 1e-8).abs() < 1e-14);
        assert!(!c.grazing);
        let lim = oracle_half_map(&p(0.5, 1.0, 2.0), 0.0).unwrap();
        assert!(lim.abs() < 1e-14);
    }

    #[test]
    fn orbit_stays_left() {
        let s = orbit_sample(&p(0.3, 1.0, 1.0), 1.5, 200).unwrap();
        assert_eq!(s.states[0], (0.0, 1.5));
        for &(x, _) in &s.states[1..200] {
            assert!(x < 0.0);
        }
        assert!(s.states[200].0.abs() < 1e-12);
    }

    #[test]
    fn right_side_flight() {
        // mirror of the center: x' = -y, y' = x, starting at (0, -1) moving right
        let flow = AffineFlow::new([[0.0, -1.0], [1.0, 0.0]], [0.0, 0.0]);
        let c = first_return_in(&flow, -1.0, Side::Right, &ReturnBudget::default()).unwrap();
        assert!((c.exit_y - 1.0).abs() < 1e-12);
        assert!(first_return_in(&flow, 1.0, Side::Right, &ReturnBudget::default()).is_err());
    }
}
