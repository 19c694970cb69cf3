//! Newton solver for the monodromy problem.
//!
//! Unknowns are the real coefficients `x_{j,m}`, `m = 0..=n`, and `r = e^s`.
//! The residual stacks the Fourier coefficients of `p_hat - p_hat*` and
//! `q_hat - q_hat*` (hats divide by `t`), the value `q_hat(1)`, and every
//! Laurent coefficient of `K - 1`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::exec::Executor;
use crate::linalg::{least_squares, Dense, Mat2, C64};
use crate::loops::{circle, dft};
use crate::monodromy::{
    half_traces, p_coordinate, pq_tables, q_coordinate, transport_one, transport_tangent, HalfTraces, Numerics,
    TransportResult,
};
use crate::potential::{cal_k, central_value, PotentialCoeffs, SurfaceParams};

/// Solver unknowns: `x[j][m]` for `m = 0..=n` and `r > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnknownVector {
    /// Nonnegative-degree coefficients of `x_1, x_2, x_3`.
    pub x: [Vec<f64>; 3],
    /// The scale `r`.
    pub r: f64,
}

impl UnknownVector {
    /// Truncation order.
    pub fn order(&self) -> usize {
        self.x[0].len() - 1
    }

    /// Dimension `3(n + 1) + 1`.
    pub fn dim(&self) -> usize {
        3 * self.x[0].len() + 1
    }

    /// Read the unknowns off potential coefficients.
    pub fn from_coeffs(c: &PotentialCoeffs) -> Self {
        let x = c.x().clone().map(|l| l.coeffs()[1..].to_vec());
        UnknownVector { x, r: c.r() }
    }

    /// Potential coefficients for `params`.
    pub fn to_coeffs(&self, params: SurfaceParams) -> Result<PotentialCoeffs> {
        PotentialCoeffs::from_parts(params, self.r, [&self.x[0], &self.x[1], &self.x[2]])
    }

    /// Re-truncate to order `n` (zero padding or dropping high modes).
    pub fn with_order(&self, n: usize) -> Self {
        let x = self.x.clone().map(|mut v| {
            v.resize(n + 1, 0.0);
            v
        });
        UnknownVector { x, r: self.r }
    }

    fn pack(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.x.iter().flatten().copied().collect();
        v.push(self.r.ln());
        v
    }

    fn unpack(v: &[f64], n: usize) -> Self {
        let m = n + 1;
        let x = [v[..m].to_vec(), v[m..2 * m].to_vec(), v[2 * m..3 * m].to_vec()];
        UnknownVector { x, r: v[3 * m].exp() }
    }
}

/// How the Newton Jacobian is formed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JacobianMode {
    /// Exact derivative of the discrete RK4 map (tangent transport).
    Tangent,
    /// Forward differences with the given relative step.
    FiniteDifference(f64),
}

/// Newton configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Discretization.
    pub numerics: Numerics,
    /// Target residual infinity norm.
    pub tol: f64,
    /// Maximum Newton iterations.
    pub max_iter: usize,
    /// Jacobian strategy.
    pub jacobian: JacobianMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { numerics: Numerics::default(), tol: 1e-12, max_iter: 20, jacobian: JacobianMode::Tangent }
    }
}

/// Number of residual rows for order `n`.
pub fn residual_len(n: usize) -> usize {
    // p and q: 2n each; q(1): 2; K - 1: 2n + 3.
    4 * n + 2 + 2 * n + 3
}

struct Samples {
    p: Vec<Mat2>,
    q: Vec<Mat2>,
    dp: Vec<[Mat2; 3]>,
    dq: Vec<[Mat2; 3]>,
}

fn transport_samples<E: Executor>(
    coeffs: &PotentialCoeffs,
    num: &Numerics,
    tangent: bool,
    exec: &E,
) -> Result<Samples> {
    let t = coeffs.params().t();
    let tabs = pq_tables(coeffs.params().phi(), num)?;
    let weights = coeffs.weights(&circle(num.samples));
    let out = exec.map(2 * weights.len(), |i| {
        let (tab, w) = (&tabs[i % 2], &weights[i / 2]);
        if tangent {
            transport_tangent(tab, t, w, Mat2::IDENTITY)
        } else {
            (transport_one(tab, t, w, Mat2::IDENTITY), [Mat2::ZERO; 3])
        }
    });
    let mut s = Samples { p: vec![], q: vec![], dp: vec![], dq: vec![] };
    for (i, (m, d)) in out.into_iter().enumerate() {
        if !m.is_finite() {
            return Err(invalid("transport produced non-finite values"));
        }
        if i % 2 == 0 {
            s.p.push(m);
            s.dp.push(d);
        } else {
            s.q.push(m);
            s.dq.push(d);
        }
    }
    Ok(s)
}

fn push_reality_rows(out: &mut Vec<f64>, hat: &[C64], n: usize) {
    let c = dft(hat);
    let big = c.len();
    for m in 1..=n {
        let d = c[m] - c[big - m].conj();
        out.push(d.re);
        out.push(d.im);
    }
}

fn assemble(coeffs: &PotentialCoeffs, p: &[C64], q: &[C64]) -> Vec<f64> {
    let n = coeffs.order();
    let t = coeffs.params().t();
    let mut out = Vec::with_capacity(residual_len(n));
    let ph: Vec<C64> = p.iter().map(|v| v / t).collect();
    let qh: Vec<C64> = q.iter().map(|v| v / t).collect();
    push_reality_rows(&mut out, &ph, n);
    push_reality_rows(&mut out, &qh, n);
    out.push(qh[0].re);
    out.push(qh[0].im);
    let k = cal_k(coeffs);
    for m in -2..=2 * n as i32 {
        let target = if m == 0 { 1.0 } else { 0.0 };
        out.push(k.coeff(m).re - target);
    }
    out
}

/// Residual vector at `u`.
pub fn residual<E: Executor>(u: &UnknownVector, params: SurfaceParams, num: &Numerics, exec: &E) -> Result<Vec<f64>> {
    let coeffs = u.to_coeffs(params)?;
    let s = transport_samples(&coeffs, num, false, exec)?;
    let p: Vec<C64> = s.p.iter().map(p_coordinate).collect();
    let q: Vec<C64> = s.q.iter().map(q_coordinate).collect();
    Ok(assemble(&coeffs, &p, &q))
}

fn dp_coordinate(p: &Mat2, d: &Mat2) -> C64 {
    d.at(0, 0) * p.at(1, 0) + p.at(0, 0) * d.at(1, 0) - d.at(0, 1) * p.at(1, 1) - p.at(0, 1) * d.at(1, 1)
}

fn dq_coordinate(q: &Mat2, d: &Mat2) -> C64 {
    crate::linalg::I
        * (d.at(0, 0) * q.at(1, 0) + q.at(0, 0) * d.at(1, 0) + d.at(0, 1) * q.at(1, 1) + q.at(0, 1) * d.at(1, 1))
}

/// Residual and exact Jacobian (with respect to `x_{j,m}` and `s = ln r`).
pub fn residual_and_jacobian<E: Executor>(
    u: &UnknownVector,
    params: SurfaceParams,
    num: &Numerics,
    exec: &E,
) -> Result<(Vec<f64>, Dense)> {
    let coeffs = u.to_coeffs(params)?;
    let n = coeffs.order();
    let t = params.t();
    let s = transport_samples(&coeffs, num, true, exec)?;
    let p: Vec<C64> = s.p.iter().map(p_coordinate).collect();
    let q: Vec<C64> = s.q.iter().map(q_coordinate).collect();
    let f = assemble(&coeffs, &p, &q);
    // dp/da_j and dq/da_j per sample.
    let dpa: Vec<[C64; 3]> = s.p.iter().zip(&s.dp).map(|(m, d)| [0, 1, 2].map(|j| dp_coordinate(m, &d[j]))).collect();
    let dqa: Vec<[C64; 3]> = s.q.iter().zip(&s.dq).map(|(m, d)| [0, 1, 2].map(|j| dq_coordinate(m, &d[j]))).collect();
    let lam = circle(num.samples);
    let weights = coeffs.weights(&lam);
    let dim = u.dim();
    let mut jac = Dense::zeros(f.len(), dim);
    let r = coeffs.r();
    let k_rows_start = 4 * n + 2;
    for col in 0..dim {
        // da_j(lambda)/du for this unknown.
        let da = |i: usize| -> [C64; 3] {
            if col == dim - 1 {
                weights[i]
            } else {
                let (j, m) = (col / (n + 1), col % (n + 1));
                let mut v = [C64::new(0.0, 0.0); 3];
                v[j] = r * lam[i].powi(m as i32);
                v
            }
        };
        let mut dph = Vec::with_capacity(num.samples);
        let mut dqh = Vec::with_capacity(num.samples);
        for i in 0..num.samples {
            let a = da(i);
            dph.push((0..3).map(|j| dpa[i][j] * a[j]).sum::<C64>() / t);
            dqh.push((0..3).map(|j| dqa[i][j] * a[j]).sum::<C64>() / t);
        }
        let mut rows = Vec::with_capacity(f.len());
        push_reality_rows(&mut rows, &dph, n);
        push_reality_rows(&mut rows, &dqh, n);
        rows.push(dqh[0].re);
        rows.push(dqh[0].im);
        for (i, v) in rows.iter().enumerate() {
            *jac.get_mut(i, col) = *v;
        }
    }
    // K = r^2 (-x1^2 + x2^2 + x3^2): derivatives in coefficient space.
    let sign = [-1.0, 1.0, 1.0];
    let x = coeffs.x();
    for j in 0..3 {
        for m in 0..=n {
            let col = j * (n + 1) + m;
            for (row, deg) in (-2..=2 * n as i32).enumerate() {
                let v = 2.0 * r * r * sign[j] * x[j].coeff(deg - m as i32);
                *jac.get_mut(k_rows_start + row, col) = v;
            }
        }
    }
    let k = cal_k(&coeffs);
    for (row, deg) in (-2..=2 * n as i32).enumerate() {
        *jac.get_mut(k_rows_start + row, dim - 1) = 2.0 * k.coeff(deg).re;
    }
    Ok((f, jac))
}

/// Residual and forward-difference Jacobian.
pub fn residual_and_fd_jacobian<E: Executor>(
    u: &UnknownVector,
    params: SurfaceParams,
    num: &Numerics,
    rel_step: f64,
    exec: &E,
) -> Result<(Vec<f64>, Dense)> {
    let n = u.order();
    let f = residual(u, params, num, exec)?;
    let base = u.pack();
    let mut jac = Dense::zeros(f.len(), base.len());
    for col in 0..base.len() {
        let h = rel_step * base[col].abs().max(1.0);
        let mut v = base.clone();
        v[col] += h;
        let fp = residual(&UnknownVector::unpack(&v, n), params, num, exec)?;
        for (i, (a, b)) in fp.iter().zip(&f).enumerate() {
            *jac.get_mut(i, col) = (a - b) / h;
        }
    }
    Ok((f, jac))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn two_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// A converged solution with its monodromy data.
#[derive(Clone, Debug)]
pub struct Solution {
    /// Surface parameters.
    pub params: SurfaceParams,
    /// Discretization used.
    pub numerics: Numerics,
    /// Solved potential coefficients.
    pub coeffs: PotentialCoeffs,
    /// Final residual infinity norm.
    pub residual_norm: f64,
    /// Newton steps taken.
    pub iterations: usize,
    /// Residual infinity norm before every step, then the final value.
    pub history: Vec<f64>,
    /// `P`, `Q` at the solution.
    pub transport: TransportResult,
    /// Half-traces at the solution.
    pub half_traces: HalfTraces,
    /// `Delta(lambda = i)`, real part.
    pub delta_at_i: f64,
}

impl Solution {
    /// Unknowns of the solution.
    pub fn unknowns(&self) -> UnknownVector {
        UnknownVector::from_coeffs(&self.coeffs)
    }
}

/// Package solved coefficients with their monodromy data.
pub fn finalize<E: Executor>(
    coeffs: PotentialCoeffs,
    num: &Numerics,
    residual_norm: f64,
    iterations: usize,
    history: Vec<f64>,
    exec: &E,
) -> Result<Solution> {
    let params = *coeffs.params();
    let transport = crate::monodromy::compute_pq(&coeffs, num, exec)?;
    let ht = half_traces(&transport, params.t())?;
    let delta_at_i = ht.delta[num.samples / 4].re;
    if !(delta_at_i > 0.0) {
        return Err(Error::Unitarizability { reason: format!("Delta(i) = {delta_at_i:e} is not positive") });
    }
    Ok(Solution { params, numerics: *num, coeffs, residual_norm, iterations, history, transport, half_traces: ht, delta_at_i })
}

/// Damped Gauss-Newton from `seed`.
pub fn gauss_newton<E: Executor>(
    seed: &UnknownVector,
    params: SurfaceParams,
    cfg: &SolverConfig,
    exec: &E,
) -> Result<Solution> {
    let num = &cfg.numerics;
    num.validate()?;
    let n = num.order;
    let mut u = seed.with_order(n);
    let mut history = Vec::new();
    let diverged = |history: &Vec<f64>, reason: &str| Error::Diverged { history: history.clone(), reason: reason.to_string() };
    let mut iterations = 0;
    loop {
        let (f, jac) = match cfg.jacobian {
            JacobianMode::Tangent => residual_and_jacobian(&u, params, num, exec),
            JacobianMode::FiniteDifference(h) => residual_and_fd_jacobian(&u, params, num, h, exec),
        }
        .map_err(|e| match e {
            Error::PathTooClose { .. } | Error::Pole { .. } | Error::InvalidInput { .. } => e,
            _ => diverged(&history, "residual evaluation failed"),
        })?;
        let nrm = inf_norm(&f);
        history.push(nrm);
        if !nrm.is_finite() {
            return Err(diverged(&history, "non-finite residual"));
        }
        if nrm <= cfg.tol {
            let coeffs = u.to_coeffs(params)?;
            return finalize(coeffs, num, nrm, iterations, history, exec);
        }
        if iterations >= cfg.max_iter {
            return Err(diverged(&history, "iteration limit reached"));
        }
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let step = least_squares(&jac, &rhs).ok_or_else(|| diverged(&history, "rank-deficient Jacobian"))?;
        let base = u.pack();
        let f2 = two_norm(&f);
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha >= 1.0 / 1024.0 {
            let trial: Vec<f64> = base.iter().zip(&step).map(|(b, d)| b + alpha * d).collect();
            let cand = UnknownVector::unpack(&trial, n);
            if let Ok(ft) = residual(&cand, params, num, exec) {
                if two_norm(&ft) < f2 {
                    accepted = Some(cand);
                    break;
                }
            }
            alpha /= 2.0;
        }
        iterations += 1;
        match accepted {
            Some(c) => u = c,
            None => return Err(diverged(&history, "line search failed to reduce the residual")),
        }
    }
}

/// Newton from the central value at `params`.
pub fn solve_from_central<E: Executor>(params: SurfaceParams, cfg: &SolverConfig, exec: &E) -> Result<Solution> {
    let seed = UnknownVector::from_coeffs(&central_value(params, cfg.numerics.order)?);
    gauss_newton(&seed, params, cfg, exec)
}

/// Step control for continuation in `phi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuationPolicy {
    /// Initial and maximal step in `phi`.
    pub step: f64,
    /// Smallest admitted step.
    pub min_step: f64,
}

impl Default for ContinuationPolicy {
    fn default() -> Self {
        ContinuationPolicy { step: 0.05, min_step: 1e-5 }
    }
}

/// Result of a continuation run.
#[derive(Clone, Debug)]
pub struct Chain {
    /// Accepted solutions in order of traversal.
    pub solutions: Vec<Solution>,
    /// `(phi, error)` if the floor was reached before `phi_1`.
    pub failure: Option<(f64, Error)>,
}

/// Continue `start` to `phi_1`, seeding every step with the previous
/// solution and halving on failure.
pub fn continuation<E: Executor>(
    start: Solution,
    phi1: f64,
    policy: &ContinuationPolicy,
    cfg: &SolverConfig,
    exec: &E,
) -> Chain {
    let mut chain = Chain { solutions: vec![start], failure: None };
    let mut step = policy.step;
    loop {
        let last = chain.solutions.last().expect("nonempty chain");
        let phi = last.params.phi();
        let remaining = phi1 - phi;
        if remaining.abs() <= 1e-15 {
            return chain;
        }
        let h = step.min(remaining.abs()) * remaining.signum();
        let target = phi + h;
        let attempt = last
            .params
            .with_phi(if h.abs() == remaining.abs() { phi1 } else { target })
            .and_then(|p| gauss_newton(&last.unknowns(), p, cfg, exec));
        match attempt {
            Ok(sol) => {
                chain.solutions.push(sol);
                step = (step * 1.5).min(policy.step);
            }
            Err(e) => {
                step /= 2.0;
                if step < policy.min_step {
                    chain.failure = Some((target, e));
                    return chain;
                }
            }
        }
    }
}

/// Solve at `params`: central seed first, then continuation from `pi/4`.
pub fn solve<E: Executor>(params: SurfaceParams, cfg: &SolverConfig, exec: &E) -> Result<Solution> {
    match solve_from_central(params, cfg, exec) {
        Ok(s) => Ok(s),
        Err(first) => {
            if (params.phi() - FRAC_PI_4).abs() < 1e-12 {
                return Err(first);
            }
            let start = solve_from_central(params.with_phi(FRAC_PI_4)?, cfg, exec)?;
            let mut chain = continuation(start, params.phi(), &ContinuationPolicy::default(), cfg, exec);
            match chain.failure {
                Some((_, e)) => Err(e),
                None => Ok(chain.solutions.pop().expect("nonempty chain")),
            }
        }
    }
}
