//! Adaptive integrators for autonomous ODE systems.
//!
//! The default method is Dormand–Prince 5(4) with its native fourth-order
//! dense output. When stiffness detection is enabled, repeated large
//! `h·|λ|` estimates switch the solver to a Rosenbrock W-method of order
//! 2(3) (Shampine–Reichelt) with a finite-difference Jacobian; it switches
//! back once `h·ρ(J)` stays small.

use nalgebra::{DMatrix, DVector};

/// An autonomous system `y' = f(y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn eval(&self, y: &[f64], dy: &mut [f64]);
}

impl<F: Fn(&[f64], &mut [f64])> OdeSystem for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }
    fn eval(&self, y: &[f64], dy: &mut [f64]) {
        (self.1)(y, dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: Option<f64>,
    pub max_steps: usize,
    /// Allow switching to the Rosenbrock method. Off for large systems where
    /// a dense Jacobian is unaffordable.
    pub stiffness_switching: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: None,
            max_steps: 50_000_000,
            stiffness_switching: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub stiff_steps: usize,
    pub switches: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    StepUnderflow,
    NonFinite,
    TooManySteps,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeFailure {
    pub t: f64,
    pub kind: FailureKind,
    pub stats: SolveStats,
}

// Dormand–Prince coefficients (the system is autonomous, so the nodes cᵢ are unused).
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

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Explicit,
    Stiff,
}

struct Work {
    n: usize,
    k: [Vec<f64>; 7],
    ytmp: Vec<f64>,
    ysti: Vec<f64>,
    ynew: Vec<f64>,
    err: Vec<f64>,
    cont: [Vec<f64>; 5],
}

impl Work {
    fn new(n: usize) -> Self {
        let v = || vec![0.0; n];
        Self {
            n,
            k: [v(), v(), v(), v(), v(), v(), v()],
            ytmp: v(),
            ysti: v(),
            ynew: v(),
            err: v(),
            cont: [v(), v(), v(), v(), v()],
        }
    }
}

fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], opts: &SolverOptions) -> f64 {
    let n = err.len() as f64;
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

fn initial_step<S: OdeSystem>(sys: &S, y: &[f64], f0: &[f64], opts: &SolverOptions, hmax: f64) -> f64 {
    let n = y.len();
    let sc: Vec<f64> = y.iter().map(|v| opts.abs_tol + opts.rel_tol * v.abs()).collect();
    let d0 = (y.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d1 = (f0.iter().zip(&sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(hmax);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(v, f)| v + h0 * f).collect();
    let mut f1 = vec![0.0; n];
    sys.eval(&y1, &mut f1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(&sc)
        .map(|((a, b), s)| ((a - b) / s).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(hmax)
}

/// Integrates from `t = times[0]` and reports the solution at every entry of
/// `times` (which must be non-decreasing). `on_sample` receives the sample
/// index and the interpolated state; returning `false` stops integration.
pub fn solve_sampled<S, F>(
    sys: &S,
    y0: &[f64],
    times: &[f64],
    opts: &SolverOptions,
    mut on_sample: F,
) -> Result<SolveStats, OdeFailure>
where
    S: OdeSystem,
    F: FnMut(usize, &[f64]) -> bool,
{
    let n = sys.dim();
    assert_eq!(y0.len(), n);
    let mut stats = SolveStats::default();
    if times.is_empty() {
        return Ok(stats);
    }
    let t_start = times[0];
    let t_final = *times.last().unwrap();
    let mut next = 0usize;
    while next < times.len() && times[next] <= t_start {
        if !on_sample(next, y0) {
            return Ok(stats);
        }
        next += 1;
    }
    if next == times.len() {
        return Ok(stats);
    }

    let span = t_final - t_start;
    let hmax = opts.max_step.unwrap_or(span).min(span);
    let mut w = Work::new(n);
    let mut y = y0.to_vec();
    let mut t = t_start;
    sys.eval(&y, &mut w.k[0]);
    stats.rhs_evals += 1;
    let mut h = initial_step(sys, &y, &w.k[0], opts, hmax);
    stats.rhs_evals += 1;

    let mut mode = Mode::Explicit;
    let mut facold: f64 = 1e-4;
    let mut iasti = 0usize;
    let mut nonsti = 0usize;
    let mut calm = 0usize;
    let mut rejected_last = false;
    let mut stiff = StiffState::new(n);
    let mut sample = vec![0.0; n];

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(OdeFailure { t, kind: FailureKind::TooManySteps, stats });
        }
        let remaining = t_final - t;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(OdeFailure { t, kind: FailureKind::StepUnderflow, stats });
        }

        match mode {
            Mode::Explicit => {
                dopri_stages(sys, &y, h, &mut w);
                stats.rhs_evals += 6;
                let err = error_norm(&w.err, &y, &w.ynew, opts);
                if !err.is_finite() || w.ynew.iter().any(|v| !v.is_finite()) {
                    if h < 1e-12 * span.max(1.0) {
                        return Err(OdeFailure { t, kind: FailureKind::NonFinite, stats });
                    }
                    h *= 0.1;
                    stats.rejected += 1;
                    rejected_last = true;
                    continue;
                }
                let fac11 = err.powf(0.2 - 0.04 * 0.75);
                // fac = h / h_new, limited to a growth of 5 and a shrink of 10
                let fac = (fac11 / facold.powf(0.04) / 0.9).clamp(0.2, 10.0);
                let mut hnew = (h / fac).min(hmax);
                if err <= 1.0 {
                    facold = err.max(1e-4);
                    stats.accepted += 1;
                    if opts.stiffness_switching {
                        let stnum: f64 =
                            w.k[6].iter().zip(&w.k[5]).map(|(a, b)| (a - b).powi(2)).sum();
                        let stden: f64 =
                            w.ynew.iter().zip(&w.ysti).map(|(a, b)| (a - b).powi(2)).sum();
                        if stden > 0.0 && h * (stnum / stden).sqrt() > 3.25 {
                            nonsti = 0;
                            iasti += 1;
                            if iasti == 15 {
                                mode = Mode::Stiff;
                                stats.switches += 1;
                                iasti = 0;
                                calm = 0;
                            }
                        } else {
                            nonsti += 1;
                            if nonsti == 6 {
                                iasti = 0;
                            }
                        }
                    }
                    dopri_dense_prepare(&y, h, &mut w);
                    let t_new = if last { t_final } else { t + h };
                    while next < times.len() && times[next] <= t_new {
                        let theta = ((times[next] - t) / h).clamp(0.0, 1.0);
                        dopri_dense_eval(&w, theta, &mut sample);
                        if !on_sample(next, &sample) {
                            return Ok(stats);
                        }
                        next += 1;
                    }
                    let (kfirst, klast) = w.k.split_at_mut(6);
                    kfirst[0].copy_from_slice(&klast[0]);
                    std::mem::swap(&mut y, &mut w.ynew);
                    t = t_new;
                    if rejected_last {
                        hnew = hnew.min(h);
                    }
                    rejected_last = false;
                    if last || next >= times.len() {
                        return Ok(stats);
                    }
                    h = hnew;
                } else {
                    hnew = h / (fac11 / 0.9).clamp(0.2, 10.0);
                    stats.rejected += 1;
                    rejected_last = true;
                    h = hnew;
                }
            }
            Mode::Stiff => {
                let outcome = stiff.step(sys, &y, h, opts, &mut stats);
                match outcome {
                    StiffOutcome::NonFinite => {
                        if h < 1e-12 * span.max(1.0) {
                            return Err(OdeFailure { t, kind: FailureKind::NonFinite, stats });
                        }
                        h *= 0.1;
                        stats.rejected += 1;
                        continue;
                    }
                    StiffOutcome::Done { err, h_rho } => {
                        let fac = (err.powf(1.0 / 3.0) / 0.9).clamp(0.2, 10.0);
                        let hnew = (h / fac).min(hmax);
                        if err <= 1.0 {
                            stats.accepted += 1;
                            stats.stiff_steps += 1;
                            let t_new = if last { t_final } else { t + h };
                            while next < times.len() && times[next] <= t_new {
                                let s = ((times[next] - t) / h).clamp(0.0, 1.0);
                                stiff.dense(&y, h, s, &mut sample);
                                if !on_sample(next, &sample) {
                                    return Ok(stats);
                                }
                                next += 1;
                            }
                            y.copy_from_slice(&stiff.ynew);
                            t = t_new;
                            if last || next >= times.len() {
                                return Ok(stats);
                            }
                            if h_rho < 1.5 {
                                calm += 1;
                                if calm >= 10 {
                                    mode = Mode::Explicit;
                                    stats.switches += 1;
                                    sys.eval(&y, &mut w.k[0]);
                                    stats.rhs_evals += 1;
                                    facold = 1e-4;
                                }
                            } else {
                                calm = 0;
                            }
                            h = hnew;
                        } else {
                            stats.rejected += 1;
                            h = hnew;
                        }
                    }
                }
            }
        }
    }
}

fn dopri_stages<S: OdeSystem>(sys: &S, y: &[f64], h: f64, w: &mut Work) {
    let n = w.n;
    let (k1, rest) = w.k.split_at_mut(1);
    let k1 = &k1[0];
    let [k2, k3, k4, k5, k6, k7] = rest else { unreachable!() };
    let yt = &mut w.ytmp;
    for i in 0..n {
        yt[i] = y[i] + h * A21 * k1[i];
    }
    sys.eval(yt, k2);
    for i in 0..n {
        yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    sys.eval(yt, k3);
    for i in 0..n {
        yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    sys.eval(yt, k4);
    for i in 0..n {
        yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    sys.eval(yt, k5);
    for i in 0..n {
        w.ysti[i] =
            y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    sys.eval(&w.ysti, k6);
    for i in 0..n {
        w.ynew[i] =
            y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
    }
    sys.eval(&w.ynew, k7);
    for i in 0..n {
        w.err[i] = h
            * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
}

fn dopri_dense_prepare(y: &[f64], h: f64, w: &mut Work) {
    let k = &w.k;
    for i in 0..w.n {
        let ydiff = w.ynew[i] - y[i];
        let bspl = h * k[0][i] - ydiff;
        w.cont[0][i] = y[i];
        w.cont[1][i] = ydiff;
        w.cont[2][i] = bspl;
        w.cont[3][i] = ydiff - h * k[6][i] - bspl;
        w.cont[4][i] = h
            * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i]
                + D7 * k[6][i]);
    }
}

fn dopri_dense_eval(w: &Work, theta: f64, out: &mut [f64]) {
    let th1 = 1.0 - theta;
    let c = &w.cont;
    for i in 0..w.n {
        out[i] = c[0][i] + theta * (c[1][i] + th1 * (c[2][i] + theta * (c[3][i] + th1 * c[4][i])));
    }
}

enum StiffOutcome {
    Done { err: f64, h_rho: f64 },
    NonFinite,
}

/// Rosenbrock W-method of order 2(3) (the `ode23s` scheme).
struct StiffState {
    n: usize,
    jac: DMatrix<f64>,
    f0: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    ytmp: Vec<f64>,
    k1: Vec<f64>,
    k2: Vec<f64>,
    ynew: Vec<f64>,
}

const ROS_D: f64 = 0.292_893_218_813_452_5; // 1 / (2 + √2)
const ROS_E32: f64 = 7.414_213_562_373_095; // 6 + √2

impl StiffState {
    fn new(n: usize) -> Self {
        Self {
            n,
            jac: DMatrix::zeros(0, 0),
            f0: vec![0.0; n],
            f1: vec![0.0; n],
            f2: vec![0.0; n],
            ytmp: vec![0.0; n],
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            ynew: vec![0.0; n],
        }
    }

    fn step<S: OdeSystem>(
        &mut self,
        sys: &S,
        y: &[f64],
        h: f64,
        opts: &SolverOptions,
        stats: &mut SolveStats,
    ) -> StiffOutcome {
        let n = self.n;
        if self.jac.nrows() != n {
            self.jac = DMatrix::zeros(n, n);
        }
        sys.eval(y, &mut self.f0);
        stats.rhs_evals += 1;
        finite_difference_jacobian(sys, y, &self.f0, &mut self.jac);
        stats.rhs_evals += n;
        let rho = spectral_radius_estimate(&self.jac);
        let mut wm = DMatrix::<f64>::identity(n, n);
        wm -= &self.jac * (h * ROS_D);
        let lu = wm.lu();
        let solve = |rhs: &[f64]| -> Option<Vec<f64>> {
            lu.solve(&DVector::from_column_slice(rhs)).map(|v| v.as_slice().to_vec())
        };
        let Some(k1) = solve(&self.f0) else { return StiffOutcome::NonFinite };
        self.k1.copy_from_slice(&k1);
        for i in 0..n {
            self.ytmp[i] = y[i] + 0.5 * h * self.k1[i];
        }
        sys.eval(&self.ytmp, &mut self.f1);
        let r: Vec<f64> = (0..n).map(|i| self.f1[i] - self.k1[i]).collect();
        let Some(k2) = solve(&r) else { return StiffOutcome::NonFinite };
        for i in 0..n {
            self.k2[i] = k2[i] + self.k1[i];
            self.ynew[i] = y[i] + h * self.k2[i];
        }
        sys.eval(&self.ynew, &mut self.f2);
        let r: Vec<f64> = (0..n)
            .map(|i| {
                self.f2[i] - ROS_E32 * (self.k2[i] - self.f1[i]) - 2.0 * (self.k1[i] - self.f0[i])
            })
            .collect();
        let Some(k3) = solve(&r) else { return StiffOutcome::NonFinite };
        stats.rhs_evals += 2;
        let err: Vec<f64> = (0..n)
            .map(|i| h / 6.0 * (self.k1[i] - 2.0 * self.k2[i] + k3[i]))
            .collect();
        if self.ynew.iter().any(|v| !v.is_finite()) {
            return StiffOutcome::NonFinite;
        }
        let e = error_norm(&err, y, &self.ynew, opts);
        if !e.is_finite() {
            return StiffOutcome::NonFinite;
        }
        StiffOutcome::Done { err: e, h_rho: h * rho }
    }

    fn dense(&self, y: &[f64], h: f64, s: f64, out: &mut [f64]) {
        let denom = 1.0 - 2.0 * ROS_D;
        let c1 = s * (1.0 - s) / denom;
        let c2 = s * (s - 2.0 * ROS_D) / denom;
        for i in 0..self.n {
            out[i] = y[i] + h * (c1 * self.k1[i] + c2 * self.k2[i]);
        }
    }
}

/// Forward differences with step √ε·max(1, |yⱼ|).
pub fn finite_difference_jacobian<S: OdeSystem>(sys: &S, y: &[f64], f0: &[f64], jac: &mut DMatrix<f64>) {
    let n = y.len();
    let mut yp = y.to_vec();
    let mut fp = vec![0.0; n];
    let sq = f64::EPSILON.sqrt();
    for j in 0..n {
        let dj = sq * y[j].abs().max(1.0);
        yp[j] = y[j] + dj;
        let dj = yp[j] - y[j];
        sys.eval(&yp, &mut fp);
        for i in 0..n {
            jac[(i, j)] = (fp[i] - f0[i]) / dj;
        }
        yp[j] = y[j];
    }
}

/// Central-difference Jacobian. Exact up to rounding for right-hand sides
/// that are at most quadratic, with an O(h²) error for cubic terms.
pub fn central_difference_jacobian<S: OdeSystem>(sys: &S, y: &[f64], jac: &mut DMatrix<f64>) {
    let n = y.len();
    let mut yp = y.to_vec();
    let mut fp = vec![0.0; n];
    let mut fm = vec![0.0; n];
    let h0 = f64::EPSILON.cbrt();
    for j in 0..n {
        let h = h0 * y[j].abs().max(1.0);
        yp[j] = y[j] + h;
        sys.eval(&yp, &mut fp);
        yp[j] = y[j] - h;
        sys.eval(&yp, &mut fm);
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
        yp[j] = y[j];
    }
}

/// Spectral radius from the eigenvalues of a small dense matrix, or the
/// infinity-norm bound when the QR iteration does not converge.
fn spectral_radius_estimate(j: &DMatrix<f64>) -> f64 {
    match nalgebra::linalg::Schur::try_new(j.clone(), f64::EPSILON, 500) {
        Some(schur) => schur.complex_eigenvalues().iter().map(|c| c.norm()).fold(0.0, f64::max),
        None => j.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(t_end: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn exponential_decay_dense_output() {
        let sys = (1usize, |y: &[f64], dy: &mut [f64]| dy[0] = -2.0 * y[0]);
        let times = uniform(3.0, 31);
        let mut max_err: f64 = 0.0;
        solve_sampled(&sys, &[1.0], &times, &SolverOptions::default(), |i, y| {
            max_err = max_err.max((y[0] - (-2.0 * times[i]).exp()).abs());
            true
        })
        .unwrap();
        assert!(max_err < 1e-8, "{max_err}");
    }

    #[test]
    fn harmonic_oscillator() {
        let w = 30.0;
        let sys = (2usize, move |y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -w * w * y[0];
        });
        let times = uniform(10.0, 1001);
        let mut max_err: f64 = 0.0;
        solve_sampled(&sys, &[1.0, 0.0], &times, &SolverOptions::default(), |i, y| {
            max_err = max_err.max((y[0] - (w * times[i]).cos()).abs());
            true
        })
        .unwrap();
        assert!(max_err < 1e-6, "{max_err}");
    }

    #[test]
    fn stiff_problem_switches_method() {
        // Robertson-like stiff linear system: fast mode at -1e5.
        let sys = (2usize, |y: &[f64], dy: &mut [f64]| {
            dy[0] = -1e5 * (y[0] - y[1].cos());
            dy[1] = -y[1];
        });
        let times = uniform(20.0, 11);
        let mut last = vec![0.0; 2];
        let stats = solve_sampled(&sys, &[0.0, 1.0], &times, &SolverOptions::default(), |_, y| {
            last.copy_from_slice(y);
            true
        })
        .unwrap();
        assert!(stats.switches >= 1, "{stats:?}");
        assert!(stats.stiff_steps > 0);
        let y1 = (-20.0f64).exp();
        assert!((last[1] - y1).abs() < 1e-9);
        assert!((last[0] - y1.cos()).abs() < 1e-6);
    }

    #[test]
    fn radius_of_defective_matrix_terminates() {
        let j = DMatrix::from_row_slice(2, 2, &[-1.0, 1e300, 0.0, -1.0]);
        assert!(spectral_radius_estimate(&j).is_finite());
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        assert!((spectral_radius_estimate(&rot) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn early_stop() {
        let sys = (1usize, |y: &[f64], dy: &mut [f64]| dy[0] = -y[0]);
        let times = uniform(1.0, 11);
        let mut seen = 0;
        solve_sampled(&sys, &[1.0], &times, &SolverOptions::default(), |i, _| {
            seen = i;
            i < 3
        })
        .unwrap();
        assert_eq!(seen, 3);
    }

    #[test]
    fn blow_up_is_reported() {
        let sys = (1usize, |y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0]);
        let times = uniform(2.0, 3);
        let err = solve_sampled(&sys, &[1.0], &times, &SolverOptions::default(), |_, _| true)
            .unwrap_err();
        assert!(err.t < 1.0 + 1e-6 && err.t > 0.99, "{err:?}");
    }
}
