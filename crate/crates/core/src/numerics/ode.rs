//! Dormand–Prince 5(4) integrator for small complex systems, with the
//! standard fourth-order continuous extension.

use crate::error::{Error, Result};
use crate::numerics::C64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone)]
struct DenseStep<const N: usize> {
    x: f64,
    h: f64,
    rc: [[C64; N]; 5],
}

/// Accepted steps of one integration run with dense output.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    x0: f64,
    x1: f64,
    y0: [C64; N],
    end: [C64; N],
    steps: Vec<DenseStep<N>>,
    evaluations: usize,
}

impl<const N: usize> Trajectory<N> {
    pub fn start(&self) -> (f64, [C64; N]) {
        (self.x0, self.y0)
    }

    pub fn end(&self) -> (f64, [C64; N]) {
        (self.x1, self.end)
    }

    pub fn steps(&self) -> usize {
        self.steps.len()
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Interpolated state at `x`, clamped to the integration span.
    pub fn eval(&self, x: f64) -> [C64; N] {
        if self.steps.is_empty() {
            return self.y0;
        }
        let forward = self.x1 >= self.x0;
        let idx = self
            .steps
            .partition_point(|s| if forward { s.x <= x } else { s.x >= x });
        let step = &self.steps[idx.saturating_sub(1)];
        let theta = ((x - step.x) / step.h).clamp(0.0, 1.0);
        let t1 = 1.0 - theta;
        let mut y = [C64::new(0.0, 0.0); N];
        for i in 0..N {
            let r = &step.rc;
            y[i] = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
        }
        y
    }
}

fn axpy<const N: usize>(y: &[C64; N], h: f64, terms: &[(f64, &[C64; N])]) -> [C64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

fn max_abs<const N: usize>(y: &[C64; N]) -> f64 {
    y.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Integrates y' = f(x, y) from x0 to x1 (either direction). Steps land
/// exactly on every point of `stops`, and the right-hand side is never
/// sampled across a stop, so coefficients may jump there.
pub fn integrate<const N: usize, F>(
    mut f: F,
    x0: f64,
    x1: f64,
    y0: [C64; N],
    stops: &[f64],
    tol: f64,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[C64; N]) -> [C64; N],
{
    if !(1e-15..=1e-3).contains(&tol) {
        return Err(Error::Parameter(format!(
            "ODE tolerance {tol} outside [1e-15, 1e-3]"
        )));
    }
    if !x0.is_finite()
        || !x1.is_finite()
        || y0.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(Error::Parameter(
            "ODE span and initial data must be finite".into(),
        ));
    }
    let mut traj = Trajectory {
        x0,
        x1,
        y0,
        end: y0,
        steps: Vec::new(),
        evaluations: 0,
    };
    if x0 == x1 {
        return Ok(traj);
    }
    let dir = (x1 - x0).signum();
    let mut bounds: Vec<f64> = stops
        .iter()
        .copied()
        .filter(|s| (s - x0) * dir > 0.0 && (x1 - s) * dir > 0.0)
        .collect();
    bounds.sort_by(|a, b| {
        if dir > 0.0 {
            a.total_cmp(b)
        } else {
            b.total_cmp(a)
        }
    });
    bounds.dedup();
    bounds.push(x1);

    let span = (x1 - x0).abs();
    let mut h = dir * (1e-3 * span).min(1e-2);
    let mut x = x0;
    let mut y = y0;
    let mut seg_start = x0;
    for &seg_end in &bounds {
        let lo = seg_start.min(seg_end);
        let hi = seg_start.max(seg_end);
        let eps = 8.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
        let mut rhs = |xx: f64, yy: &[C64; N]| f(xx.clamp(lo + eps, hi - eps), yy);
        let mut k1 = rhs(x, &y);
        traj.evaluations += 1;
        while (seg_end - x) * dir > 0.0 {
            if traj.steps.len() > MAX_STEPS {
                return Err(Error::Stiffness { x, step: h.abs() });
            }
            let remaining = seg_end - x;
            let mut last = false;
            let h_free = h;
            if h.abs() >= remaining.abs() {
                h = remaining;
                last = true;
            }
            if h.abs() < 1e-14 * x.abs().max(span) {
                return Err(Error::Stiffness { x, step: h.abs() });
            }
            let k2 = rhs(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = rhs(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(
                x + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = rhs(
                x + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                x + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let ynew = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let xnew = if last { seg_end } else { x + h };
            let k7 = rhs(xnew, &ynew);
            traj.evaluations += 6;

            let floor = 1e-3 * max_abs(&y).max(max_abs(&ynew));
            let mut err: f64 = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = tol * y[i].norm().max(ynew[i].norm()).max(floor).max(1e-300);
                err = err.max(e.norm() / sc);
            }
            if !err.is_finite() {
                h *= 0.2;
                continue;
            }
            if err <= 1.0 {
                let mut rc = [[C64::new(0.0, 0.0); N]; 5];
                for i in 0..N {
                    let d = ynew[i] - y[i];
                    let bspl = h * k1[i] - d;
                    rc[0][i] = y[i];
                    rc[1][i] = d;
                    rc[2][i] = bspl;
                    rc[3][i] = d - h * k7[i] - bspl;
                    rc[4][i] = h
                        * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]);
                }
                traj.steps.push(DenseStep { x, h, rc });
                x = xnew;
                y = ynew;
                k1 = k7;
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = if last {
                    h_free.abs().max(h.abs() * fac) * dir
                } else {
                    h * fac
                };
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        seg_start = seg_end;
        x = seg_end;
    }
    traj.end = y;
    Ok(traj)
}

/// Solution of y'' = q(x) y with dense output of (y, y').
#[derive(Debug, Clone)]
pub struct SecondOrderSolution {
    traj: Trajectory<2>,
    /// When set, the trajectory holds (F, F') with y = F e^{ikx}.
    gauge: Option<C64>,
}

impl SecondOrderSolution {
    fn ungauge(&self, x: f64, s: [C64; 2]) -> (C64, C64) {
        match self.gauge {
            None => (s[0], s[1]),
            Some(k) => {
                let e = (C64::new(0.0, 1.0) * k * x).exp();
                (s[0] * e, (s[1] + C64::new(0.0, 1.0) * k * s[0]) * e)
            }
        }
    }

    pub fn eval(&self, x: f64) -> (C64, C64) {
        self.ungauge(x, self.traj.eval(x))
    }

    pub fn end(&self) -> (C64, C64) {
        let (x, s) = self.traj.end();
        self.ungauge(x, s)
    }

    pub fn trajectory(&self) -> &Trajectory<2> {
        &self.traj
    }
}

/// Adaptive integration of y'' = q(x) y over `span`, either direction.
pub fn ode_second_order<Q: Fn(f64) -> C64>(
    q: Q,
    span: (f64, f64),
    init: (C64, C64),
    tol: f64,
) -> Result<SecondOrderSolution> {
    ode_second_order_with_stops(q, span, init, tol, &[])
}

pub fn ode_second_order_with_stops<Q: Fn(f64) -> C64>(
    q: Q,
    span: (f64, f64),
    init: (C64, C64),
    tol: f64,
    stops: &[f64],
) -> Result<SecondOrderSolution> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::Parameter(format!(
            "tolerance {tol} outside [1e-14, 1e-6]"
        )));
    }
    let traj = integrate(
        |x, y: &[C64; 2]| [y[1], q(x) * y[0]],
        span.0,
        span.1,
        [init.0, init.1],
        stops,
        tol,
    )?;
    Ok(SecondOrderSolution { traj, gauge: None })
}

/// Solution of y'' = (v(x) − k²) y with y ~ e^{ikx} at the start of `span`,
/// integrated as F = y e^{−ikx}, which obeys F'' = v F − 2ik F'.
pub fn ode_outgoing_with_stops<V: Fn(f64) -> C64>(
    v: V,
    k: C64,
    span: (f64, f64),
    tol: f64,
    stops: &[f64],
) -> Result<SecondOrderSolution> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(Error::Parameter(format!(
            "tolerance {tol} outside [1e-14, 1e-6]"
        )));
    }
    let two_ik = C64::new(0.0, 2.0) * k;
    let traj = integrate(
        |x, y: &[C64; 2]| [y[1], v(x) * y[0] - two_ik * y[1]],
        span.0,
        span.1,
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        stops,
        tol,
    )?;
    Ok(SecondOrderSolution {
        traj,
        gauge: Some(k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn outgoing_free_solution_is_exact() {
        let k = C64::new(0.3, 1.0);
        let s = ode_outgoing_with_stops(|_| c(0.0), k, (10.0, 0.0), 1e-12, &[]).unwrap();
        let (y, dy) = s.end();
        assert!((y - 1.0).norm() < 1e-15 && (dy - C64::new(0.0, 1.0) * k).norm() < 1e-15);
        let (y, _) = s.eval(4.0);
        assert!((y - (C64::new(0.0, 4.0) * k).exp()).norm() < 1e-15);
    }

    #[test]
    fn exponential_growth() {
        let s = ode_second_order(|_| c(1.0), (0.0, 1.0), (c(1.0), c(1.0)), 1e-12).unwrap();
        let (y, dy) = s.end();
        let e = std::f64::consts::E;
        assert!((y - e).norm() < 1e-10 * e && (dy - e).norm() < 1e-10 * e);
    }

    #[test]
    fn sine_quarter_period() {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let s = ode_second_order(|_| c(-1.0), (0.0, half_pi), (c(0.0), c(1.0)), 1e-12).unwrap();
        assert!((s.end().0 - 1.0).norm() < 1e-10);
        let (y, _) = s.eval(0.4);
        assert!((y - 0.4f64.sin()).norm() < 1e-9);
    }

    #[test]
    fn backward_direction() {
        let s = ode_second_order(
            |_| c(1.0),
            (2.0, 0.0),
            (c((-2f64).exp()), c(-(-2f64).exp())),
            1e-12,
        )
        .unwrap();
        assert!((s.end().0 - 1.0).norm() < 1e-10);
        assert!((s.eval(1.0).0 - (-1f64).exp()).norm() < 1e-10);
    }

    fn airy_series(x: f64, y0: f64, dy0: f64) -> (f64, f64) {
        let mut a = vec![0.0; 80];
        a[0] = y0;
        a[1] = dy0;
        for n in 0..77 {
            let prev = if n >= 1 { a[n - 1] } else { 0.0 };
            a[n + 2] = prev / ((n + 2) as f64 * (n + 1) as f64);
        }
        let y: f64 = a
            .iter()
            .enumerate()
            .map(|(n, c)| c * x.powi(n as i32))
            .sum();
        let dy: f64 = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| n as f64 * c * x.powi(n as i32 - 1))
            .sum();
        (y, dy)
    }

    #[test]
    fn airy_matches_power_series() {
        let s = ode_second_order(c, (0.0, 1.0), (c(1.0), c(0.0)), 1e-12).unwrap();
        let (want, dwant) = airy_series(1.0, 1.0, 0.0);
        let (y, dy) = s.end();
        assert!((y - want).norm() < 1e-10 && (dy - dwant).norm() < 1e-10);
        let (mid, _) = airy_series(0.37, 1.0, 0.0);
        assert!((s.eval(0.37).0 - mid).norm() < 1e-10);
    }

    #[test]
    fn discontinuous_coefficient_with_stop() {
        // y'' = q y with q = -1 on (0,1), 0 beyond; exact matching at x = 1.
        let q = |x: f64| if x < 1.0 { c(-1.0) } else { c(0.0) };
        let s =
            ode_second_order_with_stops(q, (0.0, 2.0), (c(0.0), c(1.0)), 1e-12, &[1.0]).unwrap();
        let want = 1f64.sin() + 1f64.cos();
        assert!((s.end().0 - want).norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(ode_second_order(|_| c(1.0), (0.0, 1.0), (c(1.0), c(1.0)), 1e-3).is_err());
    }

    #[test]
    fn stiffness_error_on_blowup() {
        let r = integrate(
            |_, y: &[C64; 1]| [y[0] * y[0]],
            0.0,
            2.0,
            [c(1.0)],
            &[],
            1e-10,
        );
        assert!(matches!(r, Err(Error::Stiffness { .. })));
    }
}
